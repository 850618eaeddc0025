use std::fmt::Write;

use super::document::CurveDocument;
use crate::error::{Error, Result};
use crate::spreads::SpreadPoint;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Frame {
    s_max: f64,
    g_max: f64,
}

impl Frame {
    fn x(&self, s: f64) -> f64 {
        MARGIN + (WIDTH - 2.0 * MARGIN) * (s / self.s_max).clamp(0.0, 1.0)
    }

    fn y(&self, g: f64) -> f64 {
        HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (g / self.g_max).clamp(0.0, 1.0)
    }
}

fn polyline(out: &mut String, frame: &Frame, pts: impl Iterator<Item = [f64; 2]>, class: &str, style: &str) {
    let coords: Vec<String> = pts.map(|[s, g]| format!("{:.2},{:.2}", frame.x(s), frame.y(g))).collect();
    let _ = writeln!(out, r#"<polyline class="{class}" fill="none" {style} points="{}"/>"#, coords.join(" "));
}

fn tick(x: f64) -> String {
    let t = format!("{x:.3}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// SVG 1.1 plot of the lower and upper bounds of `doc` over
/// `[0, λ_max] × [0, E²]`, with an optional diffusion trace overlaid.
pub fn render_svg(doc: &CurveDocument, diffusion: Option<&[SpreadPoint<f64>]>) -> Result<String> {
    if doc.lower.is_empty() || doc.upper.is_empty() {
        return Err(Error::EmptyDocument("curve has no polylines"));
    }
    if diffusion.is_some_and(|d| d.is_empty()) {
        return Err(Error::EmptyDocument("diffusion trace has no points"));
    }
    let e2 = doc.metadata.eccentricity * doc.metadata.eccentricity;
    let frame = Frame { s_max: doc.metadata.lambda_max.max(f64::MIN_POSITIVE), g_max: e2.max(f64::MIN_POSITIVE) };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{} N={} u0={}</title>", doc.metadata.family, doc.metadata.n, doc.metadata.u0);
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let (x0, x1, y0, y1) = (frame.x(0.0), frame.x(frame.s_max), frame.y(0.0), frame.y(frame.g_max));
    let _ = writeln!(out, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    let _ = writeln!(out, "</g>");
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (sv, gv) = (f * frame.s_max, f * frame.g_max);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, frame.x(sv), y0 + 16.0, tick(sv));
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, frame.y(gv) + 4.0, tick(gv));
    }
    let _ = writeln!(
        out,
        r#"<text class="xlabel" aria-label="Δ²_s" x="{:.2}" y="{:.2}" text-anchor="middle">Δ<tspan baseline-shift="super" font-size="9">2</tspan><tspan baseline-shift="sub" font-size="9">s</tspan></text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        out,
        r#"<text class="ylabel" aria-label="Δ²_{{g,u0}}" x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">Δ<tspan baseline-shift="super" font-size="9">2</tspan><tspan baseline-shift="sub" font-size="9">g,u0</tspan></text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    polyline(&mut out, &frame, doc.upper.iter().copied(), "upper", r##"stroke="#1f5fbf" stroke-width="1.5""##);
    polyline(&mut out, &frame, doc.lower.iter().copied(), "lower", r##"stroke="#c03020" stroke-width="1.5" stroke-dasharray="6 3""##);
    if let Some(trace) = diffusion {
        polyline(&mut out, &frame, trace.iter().map(|p| [p.s, p.g]), "diffusion", r##"stroke="#208040" stroke-width="1.5" stroke-dasharray="2 2""##);
    }
    let legend: &[(&str, &str)] = if diffusion.is_some() {
        &[("upper bound", "#1f5fbf"), ("lower bound", "#c03020"), ("diffusion", "#208040")]
    } else {
        &[("upper bound", "#1f5fbf"), ("lower bound", "#c03020")]
    };
    for (i, (name, color)) in legend.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}" fill="{color}" text-anchor="end">{name}</text>"#, x1);
    }
    out.push_str("</svg>\n");
    Ok(out)
}
