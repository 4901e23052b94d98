use std::fmt::Write;

use super::CertificationReport;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 380.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;

/// Band chart: states on x, measured value on y, the classical bound 4 as a
/// solid line, the corrected bound dashed and the expected band shaded.
pub fn band_chart(report: &CertificationReport) -> String {
    let states = &report.states;
    let (band_lo, band_hi) = report.band;
    let mut y_min = 3.9f64.min(report.corrected_bound);
    let mut y_max = band_hi.max(report.quantum_value);
    for s in states {
        let u = s.uncertainty.unwrap_or(0.0);
        y_min = y_min.min(s.value - u);
        y_max = y_max.max(s.value + u);
    }
    y_min = (y_min * 10.0).floor() / 10.0;
    y_max = (y_max * 10.0).ceil() / 10.0;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |v: f64| TOP + plot_h * (y_max - v) / (y_max - y_min);
    let step = plot_w / states.len().max(1) as f64;
    let x = |i: usize| LEFT + step * (i as f64 + 0.5);

    let mut out = String::new();
    let w = &mut out;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r##"<rect class="band" x="{LEFT:.2}" y="{:.2}" width="{plot_w:.2}" height="{:.2}" fill="#d62728" fill-opacity="0.25"/>"##,
        y(band_hi),
        y(band_lo) - y(band_hi)
    )
    .unwrap();

    let mut tick = (y_min * 10.0).round() as i64;
    while tick as f64 / 10.0 <= y_max + 1e-9 {
        let v = tick as f64 / 10.0;
        writeln!(
            w,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"##,
            LEFT - 4.0,
            y(v),
            y(v),
            LEFT - 6.0,
            y(v) + 4.0
        )
        .unwrap();
        tick += 1;
    }

    writeln!(
        w,
        r##"<line class="classical" x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.5"/>"##,
        y(4.0),
        LEFT + plot_w,
        y(4.0)
    )
    .unwrap();
    writeln!(
        w,
        r##"<line class="corrected" x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-dasharray="6 4"/>"##,
        y(report.corrected_bound),
        LEFT + plot_w,
        y(report.corrected_bound)
    )
    .unwrap();

    for (i, s) in states.iter().enumerate() {
        let (cx, cy) = (x(i), y(s.value));
        if let Some(u) = s.uncertainty.filter(|&u| u > 0.0) {
            writeln!(
                w,
                r##"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="#1f77b4"/>"##,
                y(s.value + u),
                y(s.value - u)
            )
            .unwrap();
        }
        writeln!(
            w,
            r##"<circle class="state" cx="{cx:.2}" cy="{cy:.2}" r="3" fill="#1f77b4"><title>{} {}</title></circle>"##,
            s.state, s.value
        )
        .unwrap();
        writeln!(
            w,
            r##"<text x="{cx:.2}" y="{:.2}" text-anchor="end" transform="rotate(-60 {cx:.2} {:.2})">{}</text>"##,
            TOP + plot_h + 12.0,
            TOP + plot_h + 12.0,
            s.state
        )
        .unwrap();
    }

    writeln!(
        w,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"##
    )
    .unwrap();
    writeln!(
        w,
        r##"<text x="14" y="{:.2}" transform="rotate(-90 14 {:.2})" text-anchor="middle">value</text>"##,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}
