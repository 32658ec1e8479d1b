//! Angle arguments: plain radians (`1.25`, `-3e-2`) or rational multiples
//! of π (`pi`, `2pi/3`, `3*pi/4`, `-pi/2`, `0.5pi`).

use std::f64::consts::PI;

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.trim().chars().filter(|c| !c.is_whitespace()).collect();
    let lower = s.to_ascii_lowercase();
    let value = match lower.find("pi") {
        None => lower.parse::<f64>().map_err(|_| format!("cannot parse angle `{text}`"))?,
        Some(at) => {
            let coef_text = lower[..at].trim_end_matches('*');
            let coef = match coef_text {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .parse::<f64>()
                    .map_err(|_| format!("bad coefficient in angle `{text}`"))?,
            };
            let rest = &lower[at + 2..];
            let denom = if rest.is_empty() {
                1.0
            } else if let Some(d) = rest.strip_prefix('/') {
                d.parse::<f64>()
                    .map_err(|_| format!("bad denominator in angle `{text}`"))?
            } else {
                return Err(format!("unexpected `{rest}` in angle `{text}`"));
            };
            if denom == 0.0 {
                return Err(format!("zero denominator in angle `{text}`"));
            }
            coef * PI / denom
        }
    };
    if !value.is_finite() {
        return Err(format!("angle `{text}` is not finite"));
    }
    Ok(value)
}
