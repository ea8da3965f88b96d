//! Plain SVG charts: decomposition panels and ratio box plots.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const PANEL: f64 = 180.0;
const MARGIN: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn polyline(out: &mut String, values: &[f64], top: f64, color: &str) {
    if values.is_empty() {
        return;
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let step = if values.len() > 1 { (WIDTH - 2.0 * MARGIN) / (values.len() - 1) as f64 } else { 0.0 };
    let points: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = MARGIN + step * i as f64;
            let y = top + PANEL - 20.0 - (v - lo) / span * (PANEL - 40.0);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.0}" y="{:.2}" font-size="10" text-anchor="end">{}</text><text x="{:.0}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        top + 24.0,
        format_tick(hi),
        MARGIN - 4.0,
        top + PANEL - 18.0,
        format_tick(lo)
    );
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Observed, trend and seasonal panels stacked vertically.
pub fn decomposition_svg(
    title: &str,
    first_label: &str,
    last_label: &str,
    observed: &[f64],
    trend: &[f64],
    seasonal: &[f64],
) -> String {
    let height = 3.0 * PANEL + MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20" font-size="14">{}</text>"#, escape(title));
    for (k, (name, values, color)) in
        [("observed", observed, "#1f77b4"), ("trend", trend, "#d62728"), ("seasonal", seasonal, "#2ca02c")]
            .into_iter()
            .enumerate()
    {
        let top = MARGIN + PANEL * k as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN}" y="{:.0}" width="{:.0}" height="{:.0}" fill="none" stroke="#ccc"/>"##,
            top + 10.0,
            WIDTH - 2.0 * MARGIN,
            PANEL - 20.0
        );
        let _ = writeln!(out, r#"<text x="{:.0}" y="{:.0}" font-size="12">{name}</text>"#, MARGIN + 6.0, top + 24.0);
        polyline(&mut out, values, top, color);
    }
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{:.0}" font-size="10">{}</text><text x="{:.0}" y="{:.0}" font-size="10" text-anchor="end">{}</text>"#,
        height - 8.0,
        escape(first_label),
        WIDTH - MARGIN,
        height - 8.0,
        escape(last_label)
    );
    out.push_str("</svg>\n");
    out
}

/// Box plots of named samples on a shared axis from 0 to `clip`. Values
/// above `clip` are drawn at `clip`.
pub fn boxplot_svg(title: &str, groups: &[(String, Vec<f64>)], clip: f64) -> String {
    let height = 360.0;
    let plot_top = 40.0;
    let plot_bottom = height - 50.0;
    let y_of = |v: f64| plot_bottom - v.clamp(0.0, clip) / clip * (plot_bottom - plot_top);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20" font-size="14">{}</text>"#, escape(title));
    for tick in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5].into_iter().filter(|t| *t <= clip) {
        let y = y_of(tick);
        let stroke = if tick == 1.0 { "#999" } else { "#eee" };
        let _ = writeln!(
            out,
            r#"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.0}" y2="{y:.2}" stroke="{stroke}"/><text x="{:.0}" y="{:.2}" font-size="10" text-anchor="end">{tick}</text>"#,
            WIDTH - MARGIN,
            MARGIN - 4.0,
            y + 3.0
        );
    }
    let slot = (WIDTH - 2.0 * MARGIN) / groups.len().max(1) as f64;
    for (i, (name, values)) in groups.iter().enumerate() {
        let cx = MARGIN + slot * (i as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.0}" font-size="12" text-anchor="middle">{} (n={})</text>"#,
            height - 25.0,
            escape(name),
            values.len()
        );
        let Some(q) = autocast_core::eval::Quartiles::of(values) else { continue };
        let half = (slot * 0.2).min(60.0);
        let _ = writeln!(
            out,
            r##"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="#333"/><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#333"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" stroke-width="2"/>"##,
            y_of(q.min),
            y_of(q.max),
            cx - half,
            y_of(q.q3),
            2.0 * half,
            (y_of(q.q1) - y_of(q.q3)).max(0.5),
            cx - half,
            y_of(q.median),
            cx + half,
            y_of(q.median)
        );
    }
    out.push_str("</svg>\n");
    out
}
