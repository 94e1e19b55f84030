use std::fmt::Write as _;
use std::path::Path;

use super::ScenarioConfig;
use crate::error::Result;
use crate::geometry::{Point2, Vector2};
use crate::sensing::SensorState;
use crate::voronoi::VoronoiDiagram;

struct Canvas {
    height: f64,
}

impl Canvas {
    /// Region coordinates are y-up; SVG is y-down.
    fn xy(&self, p: Point2) -> String {
        format!("{:.3},{:.3}", p.x, self.height - p.y)
    }
}

fn sector_path(c: &Canvas, apex: Point2, orientation: f64, view: f64, r: f64) -> String {
    let start = apex + Vector2::from_angle(orientation - 0.5 * view) * r;
    let end = apex + Vector2::from_angle(orientation + 0.5 * view) * r;
    let large = u8::from(view > std::f64::consts::PI);
    // counter-clockwise in region coordinates is sweep-flag 0 after the flip
    format!(
        "M {} L {} A {r:.3} {r:.3} 0 {large} 0 {} Z",
        c.xy(apex),
        c.xy(start),
        c.xy(end)
    )
}

/// SVG 1.1 drawing of a run: cells, uncertainty circles, fields of view
/// and markers, one group per layer.
pub fn svg_document(states: &[SensorState], diagram: &VoronoiDiagram, config: &ScenarioConfig) -> Result<String> {
    let sensor = config.sensor_config()?;
    let (w, h) = (config.region.width, config.region.height);
    let c = Canvas { height: h };
    let stroke = 0.002 * w.max(h);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let _ = writeln!(
        out,
        r#"  <rect id="region" x="0" y="0" width="{w:.3}" height="{h:.3}" fill="white" stroke="black" stroke-width="{:.3}"/>"#,
        2.0 * stroke
    );

    let _ = writeln!(out, r##"  <g id="cells" fill="none" stroke="#555555" stroke-width="{stroke:.3}">"##);
    for cell in diagram.cells() {
        let pts: Vec<String> = cell.vertices().iter().map(|&p| c.xy(p)).collect();
        let _ = writeln!(out, r#"    <polygon points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(
        out,
        r##"  <g id="circles" fill="none" stroke="#1f77b4" stroke-dasharray="{:.3}" stroke-width="{stroke:.3}">"##,
        4.0 * stroke
    );
    for s in states {
        let (cx, cy) = (s.nominal.x, h - s.nominal.y);
        let _ = writeln!(out, r#"    <circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#, s.rho);
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(
        out,
        r##"  <g id="sectors" fill="#ff7f0e" fill-opacity="0.35" stroke="#d62728" stroke-width="{stroke:.3}">"##
    );
    for s in states {
        if sensor.view_angle >= std::f64::consts::TAU - 1e-12 {
            let (cx, cy) = (s.evaluated.x, h - s.evaluated.y);
            let _ = writeln!(out, r#"    <circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#, sensor.range);
        } else {
            let d = sector_path(&c, s.evaluated, s.orientation, sensor.view_angle, sensor.range);
            let _ = writeln!(out, r#"    <path d="{d}"/>"#);
        }
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(out, r#"  <g id="markers">"#);
    let dot = 3.0 * stroke;
    for s in states {
        let (cx, cy) = (s.nominal.x, h - s.nominal.y);
        let _ = writeln!(out, r#"    <circle cx="{cx:.3}" cy="{cy:.3}" r="{dot:.3}" fill="black"/>"#);
        if let Some(v) = s.chosen_vertex {
            let _ = writeln!(
                out,
                r##"    <rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#2ca02c"/>"##,
                v.x - dot,
                h - v.y - dot,
                2.0 * dot,
                2.0 * dot
            );
        }
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

/// Writes [`svg_document`] to `path`.
pub fn render_svg(states: &[SensorState], diagram: &VoronoiDiagram, config: &ScenarioConfig, path: &Path) -> Result<()> {
    std::fs::write(path, svg_document(states, diagram, config)?)?;
    Ok(())
}
