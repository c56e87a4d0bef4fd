//! Numerical tracing of the inflection curve and trajectory integration.
//!
//! The tracer works on the defining polynomial, which is finite at the
//! poles, rather than on `Im R'`, which blows up there. That is what makes
//! pole-vertices resolvable as ordinary junctions of the traced graph.

mod graph;
mod march;
mod svg;
mod trajectory;

pub use svg::{render_svg, PlotScene};
pub use trajectory::{
    inflection_crosscheck, integrate_trajectories, CrossCheckReport, StepControl, Trajectory,
};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Error;
use crate::geometry::{self, Boundedness, BoundednessReport, PoleData};
use crate::inflection::InflectionCurve;
use crate::jsonutil::complex_json;

/// Rectangular tracing window with a square grid per axis.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub center: Complex64,
    pub half_width: f64,
    pub half_height: f64,
    /// Grid cells per axis, at least 16.
    pub resolution: usize,
}

impl Window {
    pub fn new(center: Complex64, half_width: f64, half_height: f64, resolution: usize) -> Self {
        Self {
            center,
            half_width: half_width.abs().max(1e-9),
            half_height: half_height.abs().max(1e-9),
            resolution: resolution.max(16),
        }
    }

    /// Bounding box of the poles and zeros of `R`, padded by half its
    /// extent on each side; falls back to `[-2, 2]^2` when empty.
    pub fn auto(r: &crate::ratfun::RationalFunction, resolution: usize) -> Result<Self, Error> {
        let mut points: Vec<Complex64> = Vec::new();
        points.extend(r.denominator_roots()?.iter().map(|&(z, _)| z));
        points.extend(r.numerator_roots()?.iter().map(|&(z, _)| z));
        if points.is_empty() {
            return Ok(Self::new(Complex64::new(0.0, 0.0), 2.0, 2.0, resolution));
        }
        let (mut xmin, mut xmax, mut ymin, mut ymax) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &points {
            xmin = xmin.min(p.re);
            xmax = xmax.max(p.re);
            ymin = ymin.min(p.im);
            ymax = ymax.max(p.im);
        }
        let center = Complex64::new(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
        let half = (0.5 * (xmax - xmin)).max(0.5 * (ymax - ymin));
        let padded = (1.5 * half).max(1.5);
        Ok(Self::new(center, padded, padded, resolution))
    }

    /// Cell size along the larger axis.
    pub fn cell(&self) -> f64 {
        2.0 * self.half_width.max(self.half_height) / self.resolution as f64
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z.re - self.center.re).abs() <= self.half_width
            && (z.im - self.center.im).abs() <= self.half_height
    }

    pub fn grown(&self, factor: f64) -> Self {
        Self {
            center: self.center,
            half_width: self.half_width * factor,
            half_height: self.half_height * factor,
            resolution: self.resolution,
        }
    }

    pub fn with_resolution(&self, resolution: usize) -> Self {
        Self {
            resolution: resolution.max(16),
            ..*self
        }
    }

    pub fn diagonal(&self) -> f64 {
        2.0 * (self.half_width.powi(2) + self.half_height.powi(2)).sqrt()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "center": complex_json(self.center),
            "half_width": self.half_width,
            "half_height": self.half_height,
            "resolution": self.resolution,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// Regular junction of the curve away from poles.
    Junction,
    /// Vertex snapped to a pole of `R`; `pole_id` indexes the pole list.
    Pole { pole_id: usize },
    /// Loose end on the window boundary.
    BoundaryExit,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub position: Complex64,
    pub kind: VertexKind,
    pub valency: usize,
}

/// Polyline edge; `start`/`end` of `None` marks a closed loop.
#[derive(Clone, Debug)]
pub struct Edge {
    pub points: Vec<Complex64>,
    pub start: Option<usize>,
    pub end: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct GraphComponent {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    /// No edge of the component reaches the window boundary.
    pub bounded: bool,
    pub pole_ids: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CurveGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub components: Vec<GraphComponent>,
}

impl CurveGraph {
    pub fn boundary_exit_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| matches!(v.kind, VertexKind::BoundaryExit))
            .count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|v| json!({
                "position": complex_json(v.position),
                "valency": v.valency,
                "kind": match v.kind {
                    VertexKind::Junction => "regular-junction",
                    VertexKind::Pole { .. } => "pole-vertex",
                    VertexKind::BoundaryExit => "boundary-exit",
                },
                "pole_id": match v.kind {
                    VertexKind::Pole { pole_id } => json!(pole_id),
                    _ => Value::Null,
                },
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "start": e.start,
                "end": e.end,
                "points": e.points.iter().map(|&p| complex_json(p)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "components": self.components.iter().map(|c| json!({
                "edges": c.edges,
                "vertices": c.vertices,
                "bounded": c.bounded,
                "poles": c.pole_ids,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Traces the zero set of the defining polynomial over the window.
///
/// `poles` is the pole list of the same `R` (ids index into it). Errors
/// when the defining polynomial vanishes identically (derivative constant
/// real).
pub fn trace_curve(
    curve: &InflectionCurve,
    poles: &[PoleData],
    w: &Window,
) -> Result<CurveGraph, Error> {
    let f = curve.defining_polynomial().normalized();
    if f.is_zero() {
        return Err(Error::Degenerate(
            "defining polynomial vanishes identically".into(),
        ));
    }
    let segments = march::march(&f, w, 6);
    let marks: Vec<(usize, Complex64, usize)> = poles
        .iter()
        .enumerate()
        .filter(|(_, p)| w.contains(p.location))
        .map(|(i, p)| (i, p.location, p.order))
        .collect();
    // Non-pole singular points of the curve; junction clusters snap here.
    let anchors: Vec<Complex64> = geometry::singular_candidates(curve.rational(), 1e-6)
        .unwrap_or_default()
        .into_iter()
        .filter(|z| w.contains(*z))
        .collect();
    let params = graph::StitchParams::for_window(w);
    Ok(graph::build_graph(&segments, &marks, &anchors, w, &params))
}

/// Per-component verdict combining the traced graph with the global
/// boundedness analysis.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub component: usize,
    pub bounded: bool,
    pub pole_ids: Vec<usize>,
    /// A bounded component that contains no pole. Must not occur for a
    /// correct trace; it triggers refinement.
    pub violation: bool,
}

pub fn component_report(g: &CurveGraph, _bd: &BoundednessReport) -> Vec<ComponentReport> {
    g.components
        .iter()
        .enumerate()
        .map(|(i, c)| ComponentReport {
            component: i,
            bounded: c.bounded,
            pole_ids: c.pole_ids.clone(),
            violation: c.bounded && c.pole_ids.is_empty(),
        })
        .collect()
}

/// Full tracing pipeline with window growth and resolution refinement.
#[derive(Clone, Debug)]
pub struct TraceOutcome {
    pub graph: CurveGraph,
    pub window: Window,
    pub poles: Vec<PoleData>,
    pub boundedness: BoundednessReport,
    pub reports: Vec<ComponentReport>,
}

impl TraceOutcome {
    pub fn to_json(&self) -> Value {
        json!({
            "window": self.window.to_json(),
            "boundedness": self.boundedness.to_json(),
            "graph": self.graph.to_json(),
            "components": self.reports.iter().map(|r| json!({
                "component": r.component,
                "bounded": r.bounded,
                "poles": r.pole_ids,
                "violation": r.violation,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Traces with reconciliation: the window grows once (by 2x) when the
/// global verdict says bounded but some component exits, and the
/// resolution doubles (up to 2 retries) while any bounded component lacks
/// a pole.
pub fn trace_analyzed(
    curve: &InflectionCurve,
    window: Option<Window>,
    resolution: usize,
) -> Result<TraceOutcome, Error> {
    let r = curve.rational();
    let poles = geometry::poles(r)?;
    let boundedness = geometry::boundedness_analysis(r)?;
    let mut w = match window {
        Some(w) => w,
        None => Window::auto(r, resolution)?,
    };

    let mut graph = trace_curve(curve, &poles, &w)?;
    if boundedness.verdict == Boundedness::Bounded
        && graph.components.iter().any(|c| !c.bounded)
    {
        log::debug!("bounded verdict but boundary exits; growing window 2x");
        w = w.grown(2.0);
        graph = trace_curve(curve, &poles, &w)?;
    }

    let mut reports = component_report(&graph, &boundedness);
    let mut retries = 0;
    while reports.iter().any(|r| r.violation) && retries < 2 {
        retries += 1;
        w = w.with_resolution(w.resolution * 2);
        log::debug!(
            "bounded component without pole; refining to resolution {}",
            w.resolution
        );
        graph = trace_curve(curve, &poles, &w)?;
        reports = component_report(&graph, &boundedness);
    }

    Ok(TraceOutcome {
        graph,
        window: w,
        poles,
        boundedness,
        reports,
    })
}
