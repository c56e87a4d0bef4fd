//! Stitches marching-squares segments into a curve graph: endpoint
//! merging, junction clustering, pole snapping, polyline extraction, and
//! connected components by union-find.

use std::collections::HashMap;

use num_complex::Complex64;

use super::march::Segment;
use super::{CurveGraph, Edge, GraphComponent, Vertex, VertexKind, Window};

pub(crate) struct StitchParams {
    /// Endpoint identification radius.
    pub merge_radius: f64,
    /// Non-regular nodes within this radius collapse into one junction.
    pub junction_radius: f64,
    /// Nodes within this radius of a pole collapse into the pole vertex.
    pub pole_snap_radius: f64,
    /// Distance to the window edge below which a loose end is an exit.
    pub boundary_tol: f64,
    /// Dangling chains shorter than this are pruned.
    pub stub_length: f64,
}

impl StitchParams {
    pub fn for_window(w: &Window) -> Self {
        let cell = w.cell();
        Self {
            merge_radius: 0.3 * cell,
            junction_radius: 1.5 * cell,
            pole_snap_radius: 2.0 * cell,
            boundary_tol: 0.75 * cell,
            stub_length: 3.0 * cell,
        }
    }
}

struct NodeArena {
    positions: Vec<(f64, f64)>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    box_size: f64,
}

impl NodeArena {
    fn new(box_size: f64) -> Self {
        Self {
            positions: Vec::new(),
            buckets: HashMap::new(),
            box_size,
        }
    }

    fn key(&self, p: (f64, f64)) -> (i64, i64) {
        (
            (p.0 / self.box_size).floor() as i64,
            (p.1 / self.box_size).floor() as i64,
        )
    }

    fn find_or_create(&mut self, p: (f64, f64), radius: f64) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.buckets.get(&(kx + dx, ky + dy)) {
                    for &id in ids {
                        let q = self.positions[id];
                        let d2 = (q.0 - p.0).powi(2) + (q.1 - p.1).powi(2);
                        if d2 <= radius * radius {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.positions.len();
        self.positions.push(p);
        self.buckets.entry((kx, ky)).or_default().push(id);
        id
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Poles that lie inside the window, as `(pole_id, location, order)`.
pub(crate) type PoleMarks<'a> = &'a [(usize, Complex64, usize)];

/// Builds the curve graph from raw segments.
///
/// `anchors` are certified singular points of the curve away from poles;
/// junction clusters snap onto them. This keeps crossings intact even when
/// the grid aligns with the zero set and marching alone would chamfer them
/// into disjoint strands.
pub(crate) fn build_graph(
    segments: &[Segment],
    poles: PoleMarks,
    anchors: &[Complex64],
    w: &Window,
    params: &StitchParams,
) -> CurveGraph {
    // 1. Merge endpoints into nodes.
    let mut arena = NodeArena::new(params.merge_radius.max(1e-12));
    let mut seg_nodes = Vec::with_capacity(segments.len());
    for s in segments {
        let na = arena.find_or_create(s.a, params.merge_radius);
        let nb = arena.find_or_create(s.b, params.merge_radius);
        seg_nodes.push((na, nb));
    }
    let positions = arena.positions;
    let n_nodes = positions.len();

    // 2. Adjacency (degenerate self-segments dropped).
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_nodes];
    let mut kept_segs = Vec::new();
    for (seg_idx, &(na, nb)) in seg_nodes.iter().enumerate() {
        if na == nb {
            continue;
        }
        let id = kept_segs.len();
        kept_segs.push(seg_idx);
        adj[na].push((nb, id));
        adj[nb].push((na, id));
    }
    let degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();

    let at_boundary = |p: (f64, f64)| -> bool {
        let bx = w.half_width - (p.0 - w.center.re).abs();
        let by = w.half_height - (p.1 - w.center.im).abs();
        bx.min(by) <= params.boundary_tol
    };
    let is_exit = |n: usize| degree[n] == 1 && at_boundary(positions[n]);
    let irregular: Vec<usize> = (0..n_nodes)
        .filter(|&n| degree[n] != 2 && !is_exit(n))
        .collect();

    // 3. Cluster irregular nodes; snap to poles and to singular anchors.
    // Slots beyond the node count are virtual anchor slots.
    let mut uf = UnionFind::new(n_nodes + poles.len() + anchors.len());
    for (a_idx, &a) in irregular.iter().enumerate() {
        for &b in irregular.iter().skip(a_idx + 1) {
            let pa = positions[a];
            let pb = positions[b];
            let d2 = (pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2);
            if d2 <= params.junction_radius * params.junction_radius {
                uf.union(a, b);
            }
        }
    }
    for (k, &(_, loc, _)) in poles.iter().enumerate() {
        for n in 0..n_nodes {
            let p = positions[n];
            let d2 = (p.0 - loc.re).powi(2) + (p.1 - loc.im).powi(2);
            if d2 <= params.pole_snap_radius * params.pole_snap_radius {
                uf.union(n, n_nodes + k);
            }
        }
    }
    for (k, &loc) in anchors.iter().enumerate() {
        for n in 0..n_nodes {
            let p = positions[n];
            let d2 = (p.0 - loc.re).powi(2) + (p.1 - loc.im).powi(2);
            if d2 <= params.junction_radius * params.junction_radius {
                uf.union(n, n_nodes + poles.len() + k);
            }
        }
    }

    // 4. Resolve terminal clusters to vertices.
    #[derive(Default)]
    struct ClusterInfo {
        members: Vec<usize>,
        pole: Option<usize>,
        anchor: Option<usize>,
    }
    let mut clusters: HashMap<usize, ClusterInfo> = HashMap::new();
    for n in 0..n_nodes {
        let root = uf.find(n);
        clusters.entry(root).or_default().members.push(n);
    }
    for (k, &(pole_id, _, _)) in poles.iter().enumerate() {
        let root = uf.find(n_nodes + k);
        if let Some(info) = clusters.get_mut(&root) {
            info.pole.get_or_insert(pole_id);
        }
    }
    for (k, _) in anchors.iter().enumerate() {
        let root = uf.find(n_nodes + poles.len() + k);
        if let Some(info) = clusters.get_mut(&root) {
            info.anchor.get_or_insert(k);
        }
    }

    let mut vertices: Vec<Vertex> = Vec::new();
    let mut node_vertex: Vec<Option<usize>> = vec![None; n_nodes];
    let irregular_flag = {
        let mut f = vec![false; n_nodes];
        for &n in &irregular {
            f[n] = true;
        }
        f
    };
    // Deterministic order over clusters.
    let mut roots: Vec<usize> = clusters.keys().copied().collect();
    roots.sort_unstable();
    for root in roots {
        let info = &clusters[&root];
        let terminal = info.pole.is_some()
            || info.anchor.is_some()
            || info.members.iter().any(|&n| irregular_flag[n]);
        if !terminal {
            continue;
        }
        let position = if let Some(pid) = info.pole {
            poles.iter().find(|p| p.0 == pid).map(|p| p.1).unwrap()
        } else if let Some(aid) = info.anchor {
            anchors[aid]
        } else {
            let (mut sx, mut sy) = (0.0, 0.0);
            for &n in &info.members {
                sx += positions[n].0;
                sy += positions[n].1;
            }
            let count = info.members.len() as f64;
            Complex64::new(sx / count, sy / count)
        };
        let vid = vertices.len();
        vertices.push(Vertex {
            position,
            kind: match info.pole {
                Some(pid) => VertexKind::Pole { pole_id: pid },
                None => VertexKind::Junction,
            },
            valency: 0,
        });
        for &n in &info.members {
            node_vertex[n] = Some(vid);
        }
    }
    for n in 0..n_nodes {
        if node_vertex[n].is_none() && is_exit(n) {
            let vid = vertices.len();
            vertices.push(Vertex {
                position: Complex64::new(positions[n].0, positions[n].1),
                kind: VertexKind::BoundaryExit,
                valency: 0,
            });
            node_vertex[n] = Some(vid);
        }
    }

    let terminal = |n: usize| node_vertex[n].is_some();

    // 5. Extract polylines between terminals.
    let mut visited = vec![false; kept_segs.len()];
    let mut edges: Vec<Edge> = Vec::new();
    for start in 0..n_nodes {
        if !terminal(start) {
            continue;
        }
        for k in 0..adj[start].len() {
            let (mut next, seg) = adj[start][k];
            if visited[seg] {
                continue;
            }
            visited[seg] = true;
            let svid = node_vertex[start].unwrap();
            let mut points = vec![vertices[svid].position];
            let mut prev_seg = seg;
            loop {
                if terminal(next) {
                    let evid = node_vertex[next].unwrap();
                    points.push(vertices[evid].position);
                    if evid == svid && polyline_length(&points) < params.stub_length {
                        break; // tiny self-loop at a vertex: noise
                    }
                    edges.push(Edge {
                        points,
                        start: Some(svid),
                        end: Some(evid),
                    });
                    break;
                }
                points.push(Complex64::new(positions[next].0, positions[next].1));
                let Some(&(after, nseg)) = adj[next].iter().find(|&&(_, s)| s != prev_seg && !visited[s])
                else {
                    // Dangling end away from the boundary.
                    if polyline_length(&points) >= params.stub_length {
                        let vid = vertices.len();
                        vertices.push(Vertex {
                            position: *points.last().unwrap(),
                            kind: VertexKind::Junction,
                            valency: 0,
                        });
                        edges.push(Edge {
                            points,
                            start: Some(svid),
                            end: Some(vid),
                        });
                    }
                    break;
                };
                visited[nseg] = true;
                prev_seg = nseg;
                next = after;
            }
        }
    }

    // 6. Remaining segments form closed loops of regular nodes.
    for id in 0..kept_segs.len() {
        if visited[id] {
            continue;
        }
        let (u, v) = {
            let &(na, nb) = &seg_nodes[kept_segs[id]];
            (na, nb)
        };
        visited[id] = true;
        let mut points = vec![
            Complex64::new(positions[u].0, positions[u].1),
            Complex64::new(positions[v].0, positions[v].1),
        ];
        let mut prev_seg = id;
        let mut cur = v;
        while cur != u {
            let Some(&(after, nseg)) = adj[cur].iter().find(|&&(_, s)| s != prev_seg && !visited[s])
            else {
                break;
            };
            visited[nseg] = true;
            prev_seg = nseg;
            cur = after;
            points.push(Complex64::new(positions[cur].0, positions[cur].1));
        }
        edges.push(Edge {
            points,
            start: None,
            end: None,
        });
    }

    // 7. Valencies.
    for e in &edges {
        if let Some(v) = e.start {
            vertices[v].valency += 1;
        }
        if let Some(v) = e.end {
            vertices[v].valency += 1;
        }
    }

    // 8. Components over vertices and edges.
    let n_v = vertices.len();
    let mut comp_uf = UnionFind::new(n_v + edges.len());
    for (eid, e) in edges.iter().enumerate() {
        if let Some(v) = e.start {
            comp_uf.union(n_v + eid, v);
        }
        if let Some(v) = e.end {
            comp_uf.union(n_v + eid, v);
        }
    }
    let mut comp_ids: HashMap<usize, usize> = HashMap::new();
    let mut components: Vec<GraphComponent> = Vec::new();
    for eid in 0..edges.len() {
        let root = comp_uf.find(n_v + eid);
        let next_id = components.len();
        let cid = *comp_ids.entry(root).or_insert(next_id);
        if cid == components.len() {
            components.push(GraphComponent::default());
        }
        components[cid].edges.push(eid);
    }
    for vid in 0..n_v {
        let root = comp_uf.find(vid);
        if let Some(&cid) = comp_ids.get(&root) {
            components[cid].vertices.push(vid);
        }
        // Isolated vertices (no incident edges) are dropped from the
        // component list.
    }
    for comp in components.iter_mut() {
        comp.bounded = comp
            .vertices
            .iter()
            .all(|&v| !matches!(vertices[v].kind, VertexKind::BoundaryExit));
        comp.pole_ids = comp
            .vertices
            .iter()
            .filter_map(|&v| match vertices[v].kind {
                VertexKind::Pole { pole_id } => Some(pole_id),
                _ => None,
            })
            .collect();
        comp.pole_ids.sort_unstable();
        comp.pole_ids.dedup();
    }

    CurveGraph {
        vertices,
        edges,
        components,
    }
}

fn polyline_length(points: &[Complex64]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .sum()
}
