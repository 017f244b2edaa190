//! Static SVG plot of one mode's reachable sets.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;

/// Start set in grey, step `k` polygons shaded from blue (k = 1) to red (k = N).
pub fn render(title: &str, start: &[[f64; 2]], steps: &[Vec<[f64; 2]>]) -> String {
    let all = start.iter().chain(steps.iter().flatten());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if !lo[0].is_finite() {
        lo = [-1.0, -1.0];
        hi = [1.0, 1.0];
    }
    // Equal scale on both axes, padded so degenerate extents still render.
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9) * 1.1;
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let scale = ((WIDTH - 2.0 * MARGIN) / span).min((HEIGHT - 2.0 * MARGIN) / span);
    let to_px = |p: &[f64; 2]| {
        (
            WIDTH / 2.0 + (p[0] - mid[0]) * scale,
            HEIGHT / 2.0 - (p[1] - mid[1]) * scale,
        )
    };
    let points = |poly: &[[f64; 2]]| {
        poly.iter()
            .map(|p| {
                let (x, y) = to_px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="30" font-family="sans-serif" font-size="16">{}</text>"#, escape(title));

    // Axes through the origin, when visible.
    let (x0, y0) = to_px(&[0.0, 0.0]);
    if (0.0..=HEIGHT).contains(&y0) {
        let _ = writeln!(s, r##"<line x1="0" y1="{y0:.2}" x2="{WIDTH}" y2="{y0:.2}" stroke="#999" stroke-width="1"/>"##);
    }
    if (0.0..=WIDTH).contains(&x0) {
        let _ = writeln!(s, r##"<line x1="{x0:.2}" y1="0" x2="{x0:.2}" y2="{HEIGHT}" stroke="#999" stroke-width="1"/>"##);
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="12">x [{:.3}, {:.3}] m, y [{:.3}, {:.3}] m</text>"#,
        HEIGHT - 15.0,
        lo[0],
        hi[0],
        lo[1],
        hi[1]
    );

    let n = steps.len();
    for (k, poly) in steps.iter().enumerate().rev() {
        let t = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
        let (r, b) = ((255.0 * t).round() as u8, (255.0 * (1.0 - t)).round() as u8);
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#{r:02x}40{b:02x}" fill-opacity="0.15" stroke="#{r:02x}40{b:02x}" stroke-width="1"><title>k = {}</title></polygon>"##,
            points(poly),
            k + 1
        );
    }
    if !start.is_empty() {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#808080" fill-opacity="0.5" stroke="black" stroke-width="1.5"><title>start</title></polygon>"##,
            points(start)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
