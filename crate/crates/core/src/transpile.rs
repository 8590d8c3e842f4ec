//! Lowering to `{1-qubit, CX}`, routing onto coupling graphs, and gate metrics.
//!
//! Multi-controlled Z gates are synthesised exactly from their phase
//! polynomial. For qubits `x_0 … x_{m-1}`,
//!
//! ```text
//! x_0·x_1·…·x_{m-1} = 2^{1-m} · Σ_{S ≠ ∅} (−1)^{|S|+1} · ⊕_{i∈S} x_i
//! ```
//!
//! so `C^{m-1}Z = exp(iπ·x_0…x_{m-1})` is a product of parity phases with angle
//! `±π/2^{m-1}`. The parities that include the last qubit are walked in Gray-code
//! order with one CX per step; the rest recurse on the remaining qubits. The
//! result uses `2^m − 2` CX gates and is exact up to global phase.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub total_gates: usize,
    pub cx_count: usize,
    pub depth: usize,
    pub width: usize,
}

pub fn metrics(circuit: &Circuit) -> CircuitMetrics {
    let mut frontier = vec![0usize; circuit.width()];
    let mut depth = 0;
    let mut cx_count = 0;
    for op in circuit.ops() {
        if op.kind == GateKind::Cx {
            cx_count += 1;
        }
        let level = 1 + op.qubits.iter().map(|&q| frontier[q]).max().unwrap_or(0);
        for &q in &op.qubits {
            frontier[q] = level;
        }
        depth = depth.max(level);
    }
    CircuitMetrics {
        total_gates: circuit.ops().len(),
        cx_count,
        depth,
        width: circuit.width(),
    }
}

/// Appends `C^{m-1}Z` over `qubits` (last entry is the Gray-code target).
fn push_mcz(out: &mut Vec<GateOp>, qubits: &[usize]) {
    let unit = PI / (1u64 << (qubits.len() - 1)) as f64;
    push_parity_phases(out, qubits, unit);
}

/// All parity phases over nonempty subsets of `qubits`, sign `(−1)^{|S|+1}`.
fn push_parity_phases(out: &mut Vec<GateOp>, qubits: &[usize], unit: f64) {
    let Some((&target, controls)) = qubits.split_last() else {
        return;
    };
    let sign = |size: u32| if size % 2 == 1 { 1.0 } else { -1.0 };
    out.push(GateOp::rz(unit, target));
    let k = controls.len();
    let mut prev = 0usize;
    for j in 1..(1usize << k) {
        let code = j ^ (j >> 1);
        let flipped = (code ^ prev).trailing_zeros() as usize;
        out.push(GateOp::cx(controls[flipped], target));
        out.push(GateOp::rz(sign(code.count_ones() + 1) * unit, target));
        prev = code;
    }
    if k > 0 {
        // The last Gray code is the single top bit.
        out.push(GateOp::cx(controls[k - 1], target));
    }
    push_parity_phases(out, controls, unit);
}

fn decompose_op(op: &GateOp, out: &mut Vec<GateOp>) {
    let q = &op.qubits;
    match op.kind {
        GateKind::Cz | GateKind::Mcz(1) => {
            out.push(GateOp::h(q[1]));
            out.push(GateOp::cx(q[0], q[1]));
            out.push(GateOp::h(q[1]));
        }
        GateKind::Mcx(1) => out.push(GateOp::cx(q[0], q[1])),
        GateKind::Mcz(_) => push_mcz(out, q),
        GateKind::Mcx(k) => {
            out.push(GateOp::h(q[k]));
            push_mcz(out, q);
            out.push(GateOp::h(q[k]));
        }
        GateKind::Swap => {
            out.push(GateOp::cx(q[0], q[1]));
            out.push(GateOp::cx(q[1], q[0]));
            out.push(GateOp::cx(q[0], q[1]));
        }
        _ => out.push(op.clone()),
    }
}

/// Rewrites every gate into single-qubit gates and CX.
pub fn decompose(circuit: &Circuit) -> Circuit {
    let mut ops = Vec::with_capacity(circuit.ops().len());
    for op in circuit.ops() {
        decompose_op(op, &mut ops);
    }
    circuit
        .with_ops(ops)
        .expect("decomposition keeps qubits in range")
}

pub fn is_decomposed(circuit: &Circuit) -> bool {
    circuit
        .ops()
        .iter()
        .all(|op| op.kind.arity() == 1 || op.kind == GateKind::Cx)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGraph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

/// Edges of the 27-qubit heavy-hex lattice used by IBM Falcon devices.
const HEAVY_HEX_27: [(usize, usize); 28] = [
    (0, 1),
    (1, 2),
    (1, 4),
    (2, 3),
    (3, 5),
    (4, 7),
    (5, 8),
    (6, 7),
    (7, 10),
    (8, 9),
    (8, 11),
    (10, 12),
    (11, 14),
    (12, 13),
    (12, 15),
    (13, 14),
    (14, 16),
    (15, 18),
    (16, 19),
    (17, 18),
    (18, 21),
    (19, 20),
    (19, 22),
    (21, 23),
    (22, 25),
    (23, 24),
    (24, 25),
    (25, 26),
];

impl CouplingGraph {
    /// Validated graph: connected, no self-loops, endpoints in range.
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::invalid("graph", "no nodes"));
        }
        let mut adjacency = vec![Vec::new(); nodes];
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::invalid("graph", format!("self-loop on {a}")));
            }
            if a >= nodes || b >= nodes {
                return Err(Error::invalid("graph", format!("edge ({a}, {b}) out of range")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        let graph = CouplingGraph {
            nodes,
            edges,
            adjacency,
        };
        if graph.distances_from(0).iter().any(Option::is_none) {
            return Err(Error::invalid("graph", "coupling graph is disconnected"));
        }
        Ok(graph)
    }

    pub fn line(nodes: usize) -> Result<Self> {
        Self::new(nodes, (1..nodes).map(|i| (i - 1, i)).collect())
    }

    pub fn full(nodes: usize) -> Result<Self> {
        let edges = (0..nodes)
            .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
            .collect();
        Self::new(nodes, edges)
    }

    pub fn heavy_hex27() -> Self {
        Self::new(27, HEAVY_HEX_27.to_vec()).expect("heavy-hex lattice is connected")
    }

    /// Built-in presets: `line7`, `heavy-hex27`, `full` (sized to `width`).
    pub fn preset(name: &str, width: usize) -> Result<Self> {
        match name {
            "line7" => Self::line(7),
            "heavy-hex27" => Ok(Self::heavy_hex27()),
            "full" => Self::full(width),
            _ => Err(Error::invalid(
                "coupling",
                format!("unknown graph {name:?}; expected line7, heavy-hex27 or full"),
            )),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Breadth-first shortest path, lowest-index neighbours first.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.nodes];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &v in &self.adjacency[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        while *path.last().unwrap() != from {
            path.push(parent[*path.last().unwrap()]);
        }
        path.reverse();
        path
    }
}

/// A circuit on physical qubits plus where each logical qubit ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct Routing {
    pub circuit: Circuit,
    pub initial_layout: Vec<usize>,
    /// `final_layout[l]` is the physical qubit holding logical qubit `l` at the end.
    pub final_layout: Vec<usize>,
}

impl Routing {
    /// SWAPs that move every logical qubit back to its initial physical position.
    pub fn restore_ops(&self) -> Vec<GateOp> {
        let mut at = self.final_layout.clone();
        let mut ops = Vec::new();
        for l in 0..at.len() {
            let want = self.initial_layout[l];
            if at[l] != want {
                ops.push(GateOp::swap(at[l], want));
                if let Some(other) = at.iter().position(|&p| p == want) {
                    at[other] = at[l];
                }
                at[l] = want;
            }
        }
        ops
    }
}

/// Places logical qubit `l` on `layout[l]` and inserts SWAP chains (3 CX each)
/// along shortest paths so that every CX acts on a graph edge. Qubits are not
/// swapped back; the measured list follows the data to their final positions.
pub fn route(circuit: &Circuit, graph: &CouplingGraph, layout: &[usize]) -> Result<Routing> {
    if !is_decomposed(circuit) {
        return Err(Error::invalid("circuit", "route requires a decomposed circuit"));
    }
    if layout.len() != circuit.width() {
        return Err(Error::invalid(
            "layout",
            format!("{} entries for width {}", layout.len(), circuit.width()),
        ));
    }
    let mut phys_to_log = vec![None; graph.nodes()];
    for (l, &p) in layout.iter().enumerate() {
        if p >= graph.nodes() || phys_to_log[p].is_some() {
            return Err(Error::invalid("layout", format!("physical qubit {p} invalid or reused")));
        }
        phys_to_log[p] = Some(l);
    }
    let mut log_to_phys = layout.to_vec();
    let mut ops = Vec::with_capacity(circuit.ops().len());
    for op in circuit.ops() {
        if op.kind != GateKind::Cx {
            ops.push(GateOp::new(op.kind, [log_to_phys[op.qubits[0]]]));
            continue;
        }
        let (c, t) = (log_to_phys[op.qubits[0]], log_to_phys[op.qubits[1]]);
        let path = graph.shortest_path(c, t);
        // Walk the control along the path until it neighbours the target.
        for w in path[..path.len() - 1].windows(2) {
            let (a, b) = (w[0], w[1]);
            ops.push(GateOp::cx(a, b));
            ops.push(GateOp::cx(b, a));
            ops.push(GateOp::cx(a, b));
            phys_to_log.swap(a, b);
            for p in [a, b] {
                if let Some(l) = phys_to_log[p] {
                    log_to_phys[l] = p;
                }
            }
        }
        ops.push(GateOp::cx(path[path.len() - 2], t));
    }
    let measured = circuit.measured().iter().map(|&l| log_to_phys[l]).collect();
    let routed = Circuit::with_layout(circuit.n_data(), graph.nodes(), ops, measured)?;
    Ok(Routing {
        circuit: routed,
        initial_layout: layout.to_vec(),
        final_layout: log_to_phys,
    })
}

/// Relabels the qubits a circuit actually uses onto `0..k`, preserving order.
pub fn compact(circuit: &Circuit) -> Result<Circuit> {
    let mut used = vec![false; circuit.width()];
    for op in circuit.ops() {
        for &q in &op.qubits {
            used[q] = true;
        }
    }
    for &q in circuit.measured() {
        used[q] = true;
    }
    let mut relabel = vec![usize::MAX; circuit.width()];
    let mut next = 0;
    for (q, &u) in used.iter().enumerate() {
        if u {
            relabel[q] = next;
            next += 1;
        }
    }
    let ops = circuit
        .ops()
        .iter()
        .map(|op| GateOp::new(op.kind, op.qubits.iter().map(|&q| relabel[q]).collect::<Vec<_>>()))
        .collect();
    let measured = circuit.measured().iter().map(|&q| relabel[q]).collect();
    Circuit::with_layout(circuit.n_data(), next, ops, measured)
}

/// What `transpile` does on top of decomposition.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TranspileOptions {
    /// Leave the circuit untouched when false.
    pub decompose: bool,
    /// Route with the identity layout, then drop idle physical qubits.
    pub coupling: Option<CouplingGraph>,
}

impl TranspileOptions {
    pub fn decomposed() -> Self {
        TranspileOptions {
            decompose: true,
            coupling: None,
        }
    }

    pub fn routed(graph: CouplingGraph) -> Self {
        TranspileOptions {
            decompose: true,
            coupling: Some(graph),
        }
    }
}

pub fn transpile(circuit: &Circuit, options: &TranspileOptions) -> Result<Circuit> {
    if !options.decompose && options.coupling.is_none() {
        return Ok(circuit.clone());
    }
    let lowered = decompose(circuit);
    match &options.coupling {
        None => Ok(lowered),
        Some(graph) => {
            if graph.nodes() < circuit.width() {
                return Err(Error::invalid(
                    "coupling",
                    format!("{} nodes cannot host width {}", graph.nodes(), circuit.width()),
                ));
            }
            let layout: Vec<usize> = (0..circuit.width()).collect();
            compact(&route(&lowered, graph, &layout)?.circuit)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::{build_grover, GroverSpec, Variant};
    use crate::sim::{exact_distribution, run_ideal};

    fn single(width: usize, op: GateOp) -> Circuit {
        Circuit::new(width, 0).unwrap().append(op).unwrap()
    }

    fn assert_equivalent(a: &Circuit, b: &Circuit) {
        let (ua, ub) = (a.dense_unitary().unwrap(), b.dense_unitary().unwrap());
        let d = ua.phase_aligned_diff(&ub, 1e-9);
        assert!(d <= 1e-9, "diff {d}");
    }

    #[test]
    fn metrics_by_hand() {
        let c = Circuit::new(2, 0).unwrap();
        assert_eq!(
            metrics(&c),
            CircuitMetrics {
                total_gates: 0,
                cx_count: 0,
                depth: 0,
                width: 2
            }
        );
        let c = c
            .append(GateOp::h(0))
            .unwrap()
            .append(GateOp::h(1))
            .unwrap()
            .append(GateOp::cx(0, 1))
            .unwrap();
        let m = metrics(&c);
        assert_eq!((m.total_gates, m.cx_count, m.depth), (3, 1, 2));
    }

    #[test]
    fn cx_is_already_basis() {
        let c = single(2, GateOp::cx(0, 1));
        assert_eq!(decompose(&c), c);
    }

    #[test]
    fn cz_becomes_h_cx_h() {
        let c = single(2, GateOp::cz(0, 1));
        let d = decompose(&c);
        assert_eq!(d.ops(), &[GateOp::h(1), GateOp::cx(0, 1), GateOp::h(1)]);
        assert_equivalent(&c, &d);
    }

    #[test]
    fn multi_controlled_gates_are_exact() {
        for m in 2..=5 {
            let qubits: Vec<usize> = (0..m).rev().collect();
            let mcz = single(m, GateOp::new(GateKind::Mcz(m - 1), qubits.clone()));
            let d = decompose(&mcz);
            assert!(is_decomposed(&d));
            assert_equivalent(&mcz, &d);
            if m >= 3 {
                assert_eq!(metrics(&d).cx_count, (1 << m) - 2, "m={m}");
            }
            let mcx = single(m, GateOp::new(GateKind::Mcx(m - 1), qubits));
            assert_equivalent(&mcx, &decompose(&mcx));
        }
        let swap = single(3, GateOp::swap(2, 0));
        assert_equivalent(&swap, &decompose(&swap));
    }

    #[test]
    fn smaller_oracle_core_has_fewer_cx() {
        let four = decompose(&single(4, GateOp::new(GateKind::Mcz(3), [0, 1, 2, 3])));
        let five_z = decompose(&single(5, GateOp::new(GateKind::Mcz(4), [0, 1, 2, 3, 4])));
        let five_x = decompose(&single(5, GateOp::new(GateKind::Mcx(4), [0, 1, 2, 3, 4])));
        assert!(metrics(&four).cx_count < metrics(&five_z).cx_count);
        assert!(metrics(&four).cx_count < metrics(&five_x).cx_count);
    }

    #[test]
    fn graph_validation() {
        assert!(CouplingGraph::new(3, vec![(0, 1)]).is_err());
        assert!(CouplingGraph::new(2, vec![(0, 0), (0, 1)]).is_err());
        assert!(CouplingGraph::new(2, vec![(0, 2)]).is_err());
        assert_eq!(CouplingGraph::heavy_hex27().edges().len(), 28);
        assert!(CouplingGraph::preset("ring", 4).is_err());
        assert_eq!(CouplingGraph::preset("full", 5).unwrap().edges().len(), 10);
    }

    #[test]
    fn full_graph_routing_is_a_no_op() {
        let spec = GroverSpec::new(3, 5, 1, Variant::NoAncilla).unwrap();
        let c = decompose(&build_grover(&spec).unwrap());
        let routed = route(&c, &CouplingGraph::full(3).unwrap(), &[0, 1, 2]).unwrap();
        assert_eq!(routed.circuit.ops(), c.ops());
        assert_eq!(routed.final_layout, vec![0, 1, 2]);
    }

    #[test]
    fn line_routing_swaps_through_the_middle() {
        let c = single(3, GateOp::h(0)).append(GateOp::cx(0, 2)).unwrap();
        let line = CouplingGraph::line(3).unwrap();
        let routed = route(&c, &line, &[0, 1, 2]).unwrap();
        for op in routed.circuit.ops().iter().filter(|o| o.kind == GateKind::Cx) {
            assert!(line.are_adjacent(op.qubits[0], op.qubits[1]));
        }
        assert_eq!(metrics(&routed.circuit).cx_count, 4);
        assert_eq!(routed.final_layout, vec![1, 0, 2]);

        // Restoring the layout recovers the original unitary.
        let mut restored = routed.circuit.clone();
        for op in routed.restore_ops() {
            restored.push(op).unwrap();
        }
        assert_equivalent(&c, &restored);

        // Distributions agree after following the measured mapping.
        let d0 = exact_distribution(&run_ideal(&c).unwrap(), c.measured()).unwrap();
        let rc = &routed.circuit;
        let d1 = exact_distribution(&run_ideal(rc).unwrap(), rc.measured()).unwrap();
        for (a, b) in d0.probs.iter().zip(&d1.probs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn routing_rejects_bad_inputs() {
        let line = CouplingGraph::line(3).unwrap();
        let undecomposed = single(3, GateOp::cz(0, 2));
        assert!(route(&undecomposed, &line, &[0, 1, 2]).is_err());
        let c = single(3, GateOp::cx(0, 2));
        assert!(route(&c, &line, &[0, 0, 2]).is_err());
        assert!(route(&c, &line, &[0, 1]).is_err());
        assert!(route(&c, &line, &[0, 1, 5]).is_err());
    }

    #[test]
    fn line_routing_costs_more_cx() {
        let spec = GroverSpec::new(4, 14, 1, Variant::NoAncilla).unwrap();
        let c = build_grover(&spec).unwrap();
        let full = transpile(&c, &TranspileOptions::routed(CouplingGraph::full(4).unwrap())).unwrap();
        let line = transpile(&c, &TranspileOptions::routed(CouplingGraph::line(7).unwrap())).unwrap();
        assert!(metrics(&line).cx_count > metrics(&full).cx_count);
        let d0 = exact_distribution(&run_ideal(&c).unwrap(), c.measured()).unwrap();
        let d1 = exact_distribution(&run_ideal(&line).unwrap(), line.measured()).unwrap();
        for (a, b) in d0.probs.iter().zip(&d1.probs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn compact_drops_idle_qubits() {
        let mut c = Circuit::new(2, 3).unwrap();
        c.push(GateOp::cx(0, 3)).unwrap();
        c.set_measured(vec![3, 0]).unwrap();
        let k = compact(&c).unwrap();
        assert_eq!(k.width(), 2);
        assert_eq!(k.ops(), &[GateOp::cx(0, 1)]);
        assert_eq!(k.measured(), &[1, 0]);
    }

    #[test]
    fn heavy_hex_routing_stays_on_the_lattice() {
        let spec = GroverSpec::new(4, 14, 1, Variant::OneAncilla).unwrap();
        let c = decompose(&build_grover(&spec).unwrap());
        let hh = CouplingGraph::heavy_hex27();
        let routed = route(&c, &hh, &[0, 1, 2, 3, 4]).unwrap();
        for op in routed.circuit.ops().iter().filter(|o| o.kind == GateKind::Cx) {
            assert!(hh.are_adjacent(op.qubits[0], op.qubits[1]));
        }
        let k = compact(&routed.circuit).unwrap();
        let d0 = exact_distribution(&run_ideal(&c).unwrap(), c.measured()).unwrap();
        let d1 = exact_distribution(&run_ideal(&k).unwrap(), k.measured()).unwrap();
        for (a, b) in d0.probs.iter().zip(&d1.probs) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
