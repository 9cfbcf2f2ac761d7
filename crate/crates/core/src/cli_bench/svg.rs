use std::fmt::Write;

use super::{Algorithm, ResultRow};
use crate::geometry::{hexagon_vertices, hexagonal_cells, Environment, Point2};
use crate::planners::{MeasurementSet, Origin};
use crate::tsp::Tour;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round tick spacing giving roughly `target` intervals over `span`.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = (span / target).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v.fract().abs() < 1e-9 {
        format!("{:.0}", v)
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

/// Side-by-side line charts sharing axis labels, one per panel.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, panels: &[Panel]) -> String {
    let (pw, ph) = (380.0, 320.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 60.0, 60.0);
    let legend_h = 24.0;
    let width = ml + mr + pw * panels.len().max(1) as f64 + 40.0 * (panels.len().saturating_sub(1)) as f64;
    let height = mt + ph + mb + legend_h;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>
<text x="{:.1}" y="22" text-anchor="middle" font-size="16">{}</text>"#,
        width / 2.0,
        escape(title)
    );

    let mut names: Vec<&str> = Vec::new();
    for p in panels {
        for se in &p.series {
            if !names.contains(&se.name.as_str()) {
                names.push(&se.name);
            }
        }
    }

    for (k, panel) in panels.iter().enumerate() {
        let x0 = ml + k as f64 * (pw + 40.0);
        let y0 = mt;
        let pts = panel.series.iter().flat_map(|se| se.points.iter());
        let (mut xmin, mut xmax, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for &(x, y) in pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymax = ymax.max(y);
        }
        if !xmin.is_finite() {
            (xmin, xmax, ymax) = (0.0, 1.0, 1.0);
        }
        let xmin = 0.0f64.min(xmin);
        let xmax = if xmax > xmin { xmax } else { xmin + 1.0 };
        let ymax = if ymax > 0.0 { ymax * 1.05 } else { 1.0 };
        let sx = |x: f64| x0 + (x - xmin) / (xmax - xmin) * pw;
        let sy = |y: f64| y0 + ph - y / ymax * ph;

        let _ = writeln!(
            s,
            r#"<g class="panel"><text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
            x0 + pw / 2.0,
            y0 - 10.0,
            escape(&panel.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.1}" y="{y0:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#333"/>"##
        );
        let xs = tick_step(xmax - xmin, 5.0);
        let mut t = (xmin / xs).ceil() * xs;
        while t <= xmax + 1e-9 * xs {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#333"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{4}</text>"##,
                sx(t),
                y0 + ph,
                y0 + ph + 5.0,
                y0 + ph + 18.0,
                fmt_tick(t)
            );
            t += xs;
        }
        let ys = tick_step(ymax, 5.0);
        let mut t = 0.0;
        while t <= ymax + 1e-9 * ys {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="#333"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{5}</text>"##,
                x0 - 5.0,
                sy(t),
                x0,
                x0 - 8.0,
                sy(t) + 4.0,
                fmt_tick(t)
            );
            t += ys;
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x0 + pw / 2.0,
            y0 + ph + 40.0,
            escape(x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{0:.1}" y="{1:.1}" text-anchor="middle" transform="rotate(-90 {0:.1} {1:.1})">{2}</text>"#,
            x0 - 52.0,
            y0 + ph / 2.0,
            escape(y_label)
        );
        for se in &panel.series {
            let color = PALETTE[names.iter().position(|n| *n == se.name).unwrap_or(0) % PALETTE.len()];
            let mut pts = se.points.clone();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline class="series" data-name="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                escape(&se.name),
                path.join(" ")
            );
            for &(x, y) in &pts {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
            }
        }
        s.push_str("</g>\n");
    }

    let ly = height - legend_h / 2.0;
    for (i, name) in names.iter().enumerate() {
        let lx = ml + i as f64 * 150.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            PALETTE[i % PALETTE.len()],
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Sample-count and tour-length charts against area, one panel per
/// tolerance fraction in order of first appearance.
pub fn sweep_figures(rows: &[ResultRow]) -> (String, String) {
    let mut fractions: Vec<f64> = Vec::new();
    for r in rows {
        if !fractions.contains(&r.delta_fraction) {
            fractions.push(r.delta_fraction);
        }
    }
    let placement: Vec<Algorithm> = {
        let plain: Vec<Algorithm> = [Algorithm::HexCover, Algorithm::DiskCover]
            .into_iter()
            .filter(|a| rows.iter().any(|r| r.algorithm == *a))
            .collect();
        if plain.is_empty() {
            vec![Algorithm::HexCoverTour, Algorithm::DiskCoverTour]
        } else {
            plain
        }
    };
    let build = |algos: &[Algorithm], value: &dyn Fn(&ResultRow) -> Option<f64>| -> Vec<Panel> {
        fractions
            .iter()
            .map(|&f| Panel {
                title: format!("Δ/σ₀² = {f}"),
                series: algos
                    .iter()
                    .filter_map(|&a| {
                        let points: Vec<(f64, f64)> = rows
                            .iter()
                            .filter(|r| r.algorithm == a && r.delta_fraction == f)
                            .filter_map(|r| value(r).map(|v| (r.area_m2, v)))
                            .collect();
                        (!points.is_empty()).then(|| Series {
                            name: a.name().to_string(),
                            points,
                        })
                    })
                    .collect(),
            })
            .collect()
    };
    let samples = line_chart_svg(
        "Measurements vs environment size",
        "Environment area (m²)",
        "Number of measurements",
        &build(&placement, &|r| Some(r.n_samples as f64)),
    );
    let tours = line_chart_svg(
        "Tour length vs environment size",
        "Environment area (m²)",
        "Tour length (m)",
        &build(&[Algorithm::HexCoverTour, Algorithm::DiskCoverTour], &|r| r.tour_length_m),
    );
    (samples, tours)
}

/// Environment outline, hexagonal cells of edge `cell_edge`, samples
/// coloured by origin, and the closed tour.
pub fn tour_svg(env: &Environment, samples: &MeasurementSet, tour: &Tour, cell_edge: f64) -> String {
    let bb = env.bbox();
    let pad = cell_edge.max(1e-9);
    let (wx, wy) = (bb.width() + 2.0 * pad, bb.height() + 2.0 * pad);
    let scale = 800.0 / wx.max(wy);
    let (w, h) = (wx * scale, wy * scale);
    let tx = |p: Point2| ((p.x - bb.min.x + pad) * scale, h - (p.y - bb.min.y + pad) * scale);
    let poly = |pts: &[Point2]| -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = tx(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let dot = (0.15 * cell_edge * scale).clamp(1.5, 6.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">
<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#
    );
    s.push_str(r##"<g class="cells" fill="none" stroke="#bbbbbb" stroke-width="0.8">"##);
    s.push('\n');
    if let Ok(cells) = hexagonal_cells(env, cell_edge) {
        for c in cells {
            let _ = writeln!(s, r#"<polygon points="{}"/>"#, poly(&hexagon_vertices(c, cell_edge)));
        }
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r##"<polygon class="environment" points="{}" fill="none" stroke="#000000" stroke-width="2"/>"##,
        poly(&env.vertices())
    );
    if !tour.order.is_empty() {
        let mut route: Vec<Point2> = tour.order.iter().map(|&v| samples.points[v]).collect();
        route.push(route[0]);
        let _ = writeln!(
            s,
            r##"<polyline class="tour" points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
            poly(&route)
        );
    }
    s.push_str("<g class=\"samples\">\n");
    for (p, o) in samples.points.iter().zip(&samples.origins) {
        let (x, y) = tx(*p);
        let color = match o {
            Origin::Tiling => "#d62728",
            Origin::Projected => "#ff7f0e",
            Origin::Repair => "#2ca02c",
        };
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{dot:.2}" fill="{color}"><title>{}</title></circle>"#,
            o.as_str()
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_well_formed() {
        let panels = vec![Panel {
            title: "a < b & c".into(),
            series: vec![Series {
                name: "hexcover".into(),
                points: vec![(400.0, 3.0), (40000.0, 300.0)],
            }],
        }];
        let svg = line_chart_svg("t", "Environment area (m²)", "n", &panels);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert!(svg.contains("a &lt; b &amp; c"));
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(tick_step(40000.0, 5.0), 10000.0);
        assert_eq!(tick_step(7.0, 5.0), 2.0);
        assert_eq!(tick_step(0.3, 5.0), 0.1);
    }
}
