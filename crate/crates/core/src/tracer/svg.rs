//! SVG rendering: the curve in red, trajectories in gray, poles as filled
//! dots, zeros as open circles. The window maps to a 1024-wide viewbox
//! with the y axis flipped.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{CurveGraph, Trajectory, Window};

pub struct PlotScene<'a> {
    pub graph: &'a CurveGraph,
    pub trajectories: &'a [Trajectory],
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    pub window: Window,
}

const WIDTH: f64 = 1024.0;

pub fn render_svg(scene: &PlotScene) -> String {
    let w = &scene.window;
    let height = (WIDTH * w.half_height / w.half_width).round();
    let map = |p: Complex64| -> (f64, f64) {
        let sx = (p.re - (w.center.re - w.half_width)) / (2.0 * w.half_width) * WIDTH;
        let sy = height * (1.0 - (p.im - (w.center.im - w.half_height)) / (2.0 * w.half_height));
        (sx, sy)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {height}" width="{WIDTH}" height="{height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>"#
    );

    for traj in scene.trajectories {
        if traj.points.len() < 2 {
            continue;
        }
        let _ = write!(svg, r##"<polyline fill="none" stroke="#999999" stroke-width="0.7" points=""##);
        push_points(&mut svg, &traj.points, &map);
        let _ = writeln!(svg, r#""/>"#);
    }

    for edge in &scene.graph.edges {
        if edge.points.len() < 2 {
            continue;
        }
        let _ = write!(svg, r#"<polyline fill="none" stroke="red" stroke-width="2" points=""#);
        push_points(&mut svg, &edge.points, &map);
        let _ = writeln!(svg, r#""/>"#);
    }

    for &p in &scene.poles {
        if !w.contains(p) {
            continue;
        }
        let (x, y) = map(p);
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="black"/>"#
        );
    }
    for &p in &scene.zeros {
        if !w.contains(p) {
            continue;
        }
        let (x, y) = map(p);
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="white" stroke="black" stroke-width="1.5"/>"#
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn push_points(svg: &mut String, points: &[Complex64], map: &impl Fn(Complex64) -> (f64, f64)) {
    for (i, &p) in points.iter().enumerate() {
        let (x, y) = map(p);
        if i > 0 {
            svg.push(' ');
        }
        let _ = write!(svg, "{x:.2},{y:.2}");
    }
}
