//! Marching squares over the defining polynomial with recursive
//! subdivision of ambiguous (saddle) cells.

use crate::inflection::RealBivariatePoly;

use super::Window;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

/// Extracts zero-crossing segments of `f` on the window grid. Cells whose
/// corner signs alternate diagonally are subdivided up to `max_depth`
/// before falling back to the center-sign decider.
pub(crate) fn march(f: &RealBivariatePoly, w: &Window, max_depth: u32) -> Vec<Segment> {
    let res = w.resolution;
    let x0 = w.center.re - w.half_width;
    let y0 = w.center.im - w.half_height;
    let dx = 2.0 * w.half_width / res as f64;
    let dy = 2.0 * w.half_height / res as f64;

    // Grid values, row-major over (i, j) -> (x0 + i dx, y0 + j dy).
    let n = res + 1;
    let mut values = vec![0.0f64; n * n];
    for i in 0..n {
        let x = x0 + i as f64 * dx;
        for j in 0..n {
            let y = y0 + j as f64 * dy;
            values[i * n + j] = f.eval(x, y);
        }
    }

    let mut out = Vec::new();
    for i in 0..res {
        for j in 0..res {
            let xa = x0 + i as f64 * dx;
            let ya = y0 + j as f64 * dy;
            let cell = CellCorners {
                x0: xa,
                y0: ya,
                x1: xa + dx,
                y1: ya + dy,
                v00: values[i * n + j],
                v10: values[(i + 1) * n + j],
                v11: values[(i + 1) * n + j + 1],
                v01: values[i * n + j + 1],
            };
            process_cell(f, &cell, max_depth, &mut out);
        }
    }
    out
}

struct CellCorners {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    /// Corner values: v{xbit}{ybit}.
    v00: f64,
    v10: f64,
    v11: f64,
    v01: f64,
}

/// Treats exact zeros as positive so every node has a definite sign.
fn positive(v: f64) -> bool {
    !(v < 0.0)
}

/// Edge indices: 0 bottom, 1 right, 2 top, 3 left.
fn edge_crossing(cell: &CellCorners, edge: usize) -> (f64, f64) {
    let (pa, va, pb, vb) = match edge {
        0 => ((cell.x0, cell.y0), cell.v00, (cell.x1, cell.y0), cell.v10),
        1 => ((cell.x1, cell.y0), cell.v10, (cell.x1, cell.y1), cell.v11),
        2 => ((cell.x1, cell.y1), cell.v11, (cell.x0, cell.y1), cell.v01),
        _ => ((cell.x0, cell.y1), cell.v01, (cell.x0, cell.y0), cell.v00),
    };
    let denom = va - vb;
    let t = if denom == 0.0 { 0.5 } else { (va / denom).clamp(0.0, 1.0) };
    (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
}

fn emit(cell: &CellCorners, e1: usize, e2: usize, out: &mut Vec<Segment>) {
    let a = edge_crossing(cell, e1);
    let b = edge_crossing(cell, e2);
    if a != b {
        out.push(Segment { a, b });
    }
}

fn process_cell(
    f: &RealBivariatePoly,
    cell: &CellCorners,
    depth: u32,
    out: &mut Vec<Segment>,
) {
    // Corner bits: 0 = (x0,y0), 1 = (x1,y0), 2 = (x1,y1), 3 = (x0,y1).
    let mut case = 0usize;
    if positive(cell.v00) {
        case |= 1;
    }
    if positive(cell.v10) {
        case |= 2;
    }
    if positive(cell.v11) {
        case |= 4;
    }
    if positive(cell.v01) {
        case |= 8;
    }

    match case {
        0 | 15 => {}
        1 | 14 => emit(cell, 3, 0, out),
        2 | 13 => emit(cell, 0, 1, out),
        3 | 12 => emit(cell, 3, 1, out),
        4 | 11 => emit(cell, 1, 2, out),
        6 | 9 => emit(cell, 0, 2, out),
        7 | 8 => emit(cell, 3, 2, out),
        5 | 10 => {
            // Diagonal ambiguity: subdivide rather than guess the saddle
            // connectivity; the center decider is only the depth-0 fallback.
            if depth > 0 {
                subdivide(f, cell, depth - 1, out);
            } else {
                let cx = 0.5 * (cell.x0 + cell.x1);
                let cy = 0.5 * (cell.y0 + cell.y1);
                let center_positive = positive(f.eval(cx, cy));
                if case == 5 {
                    // Corners 00 and 11 positive.
                    if center_positive {
                        emit(cell, 0, 1, out);
                        emit(cell, 2, 3, out);
                    } else {
                        emit(cell, 3, 0, out);
                        emit(cell, 1, 2, out);
                    }
                } else {
                    // Corners 10 and 01 positive.
                    if center_positive {
                        emit(cell, 3, 0, out);
                        emit(cell, 1, 2, out);
                    } else {
                        emit(cell, 0, 1, out);
                        emit(cell, 2, 3, out);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
}

fn subdivide(f: &RealBivariatePoly, cell: &CellCorners, depth: u32, out: &mut Vec<Segment>) {
    let xm = 0.5 * (cell.x0 + cell.x1);
    let ym = 0.5 * (cell.y0 + cell.y1);
    let vm0 = f.eval(xm, cell.y0);
    let vm1 = f.eval(xm, cell.y1);
    let v0m = f.eval(cell.x0, ym);
    let v1m = f.eval(cell.x1, ym);
    let vmm = f.eval(xm, ym);
    let quads = [
        CellCorners {
            x0: cell.x0,
            y0: cell.y0,
            x1: xm,
            y1: ym,
            v00: cell.v00,
            v10: vm0,
            v11: vmm,
            v01: v0m,
        },
        CellCorners {
            x0: xm,
            y0: cell.y0,
            x1: cell.x1,
            y1: ym,
            v00: vm0,
            v10: cell.v10,
            v11: v1m,
            v01: vmm,
        },
        CellCorners {
            x0: cell.x0,
            y0: ym,
            x1: xm,
            y1: cell.y1,
            v00: v0m,
            v10: vmm,
            v11: vm1,
            v01: cell.v01,
        },
        CellCorners {
            x0: xm,
            y0: ym,
            x1: cell.x1,
            y1: cell.y1,
            v00: vmm,
            v10: v1m,
            v11: cell.v11,
            v01: vm1,
        },
    ];
    for q in &quads {
        process_cell(f, q, depth, out);
    }
}
