//! CSV and SVG emission for θ-sweeps.

use std::fmt::Write as _;

use duality_core::coplanar::SweepRow;

pub const CSV_HEADER: &str = "theta,V,D,D2V2,branch,beta_opt,gamma_opt";

/// 17 significant digits, `.` decimal separator.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 140);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_float(r.theta),
            fmt_float(r.visibility),
            fmt_float(r.distinguishability),
            fmt_float(r.sum_sq),
            r.branch,
            fmt_float(r.beta_opt),
            fmt_float(r.gamma_opt),
        );
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

struct Series<'a> {
    label: &'a str,
    dash: Option<&'a str>,
    value: fn(&SweepRow) -> f64,
}

/// Line chart with `D` solid, `V` dotted and `D² + V²` dashed against `θ/π`.
pub fn sweep_svg(rows: &[SweepRow]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |theta: f64| LEFT + plot_w * theta / std::f64::consts::PI;
    let y_of = |v: f64| TOP + plot_h * (1.0 - v.clamp(0.0, 1.05) / 1.05);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes
    let (x0, x1) = (LEFT, LEFT + plot_w);
    let (y0, y1) = (TOP + plot_h, TOP);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let x = LEFT + plot_w * t;
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}"/>"#, y0 + 5.0);
        let v = k as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}"/>"#, x0 - 5.0);
    }
    let _ = writeln!(s, "</g>");
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            LEFT + plot_w * t,
            y0 + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
            x0 - 8.0,
            y_of(t) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">θ/π</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">value</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let series = [
        Series {
            label: "D",
            dash: None,
            value: |r| r.distinguishability,
        },
        Series {
            label: "V",
            dash: Some("1.5,3"),
            value: |r| r.visibility,
        },
        Series {
            label: "D²+V²",
            dash: Some("7,4"),
            value: |r| r.sum_sq,
        },
    ];
    for (i, se) in series.iter().enumerate() {
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.3},{:.3}", x_of(r.theta), y_of((se.value)(r))))
            .collect();
        let dash = se
            .dash
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<polyline id="series-{i}" fill="none" stroke="black" stroke-width="1.5"{dash} points="{}"><title>{}</title></polyline>"#,
            points.join(" "),
            se.label
        );
        // legend entry
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let lx = x1 - 110.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="black" stroke-width="1.5"{dash}/>"#,
            lx + 30.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 38.0, ly + 4.0, se.label);
    }
    let _ = writeln!(s, "</svg>");
    s
}
