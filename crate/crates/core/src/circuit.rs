//! Circuit representation and the dense-unitary reference.
//!
//! Controlled gates list their qubits controls-first, target-last. In the local
//! basis of a gate the first listed qubit is the most significant bit, so a
//! controlled gate's matrix is the direct sum `I ⊕ … ⊕ I ⊕ U` with `U` acting
//! on the target.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_DENSE_WIDTH, MAX_WIDTH};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    /// `diag(e^{-iθ/2}, e^{iθ/2})`, angle in radians.
    Rz(f64),
    Cx,
    Cz,
    /// X on the target controlled by `k` qubits.
    Mcx(usize),
    /// Phase −1 on the all-ones state of `k + 1` qubits.
    Mcz(usize),
    Swap,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match *self {
            GateKind::H | GateKind::X | GateKind::Y | GateKind::Z | GateKind::Rz(_) => 1,
            GateKind::Cx | GateKind::Cz | GateKind::Swap => 2,
            GateKind::Mcx(k) | GateKind::Mcz(k) => k + 1,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            GateKind::H => "h".into(),
            GateKind::X => "x".into(),
            GateKind::Y => "y".into(),
            GateKind::Z => "z".into(),
            GateKind::Rz(theta) => format!("rz({theta})"),
            GateKind::Cx => "cx".into(),
            GateKind::Cz => "cz".into(),
            GateKind::Mcx(k) => format!("mcx{k}"),
            GateKind::Mcz(k) => format!("mcz{k}"),
            GateKind::Swap => "swap".into(),
        }
    }

    /// The 2x2 matrix of a single-qubit gate, row-major.
    pub fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let i = Complex64::i();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match *self {
            GateKind::H => Some([[h, h], [h, -h]]),
            GateKind::X => Some([[ZERO, ONE], [ONE, ZERO]]),
            GateKind::Y => Some([[ZERO, -i], [i, ZERO]]),
            GateKind::Z => Some([[ONE, ZERO], [ZERO, -ONE]]),
            GateKind::Rz(theta) => Some([
                [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
            ]),
            _ => None,
        }
    }

    /// Dense `2^arity` square matrix in the gate's local basis (first qubit = MSB).
    pub fn local_matrix(&self) -> Vec<Vec<Complex64>> {
        let dim = 1usize << self.arity();
        let mut m = vec![vec![ZERO; dim]; dim];
        if let Some(u) = self.single_qubit_matrix() {
            for (r, row) in u.iter().enumerate() {
                m[r][..2].copy_from_slice(row);
            }
            return m;
        }
        for (r, row) in m.iter_mut().enumerate() {
            row[r] = ONE;
        }
        let last = dim - 1;
        match self {
            GateKind::Cx | GateKind::Mcx(_) => {
                m[last - 1][last - 1] = ZERO;
                m[last][last] = ZERO;
                m[last - 1][last] = ONE;
                m[last][last - 1] = ONE;
            }
            GateKind::Cz | GateKind::Mcz(_) => m[last][last] = -ONE,
            GateKind::Swap => {
                m[1][1] = ZERO;
                m[2][2] = ZERO;
                m[1][2] = ONE;
                m[2][1] = ONE;
            }
            _ => unreachable!("single-qubit gates handled above"),
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: impl Into<Vec<usize>>) -> Self {
        GateOp {
            kind,
            qubits: qubits.into(),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, [q])
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, [q])
    }

    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, [q])
    }

    pub fn rz(theta: f64, q: usize) -> Self {
        Self::new(GateKind::Rz(theta), [q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cx, [control, target])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::Cz, [a, b])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, [a, b])
    }

    /// Multi-controlled X. A single control yields a plain `CX`.
    pub fn mcx(controls: &[usize], target: usize) -> Self {
        let mut qubits = controls.to_vec();
        qubits.push(target);
        match controls.len() {
            1 => Self::new(GateKind::Cx, qubits),
            k => Self::new(GateKind::Mcx(k), qubits),
        }
    }

    /// Multi-controlled Z over `qubits`; the last entry is the nominal target.
    pub fn mcz(qubits: &[usize]) -> Self {
        match qubits.len() {
            1 => Self::new(GateKind::Z, qubits),
            2 => Self::new(GateKind::Cz, qubits),
            m => Self::new(GateKind::Mcz(m - 1), qubits),
        }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        if let GateKind::Mcx(0) | GateKind::Mcz(0) = self.kind {
            return Err(Error::invalid("kind", "multi-controlled gate needs k >= 1"));
        }
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::invalid(
                "qubits",
                format!(
                    "{} expects {} qubits, got {}",
                    self.kind.name(),
                    self.kind.arity(),
                    self.qubits.len()
                ),
            ));
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= width {
                return Err(Error::invalid(
                    "qubits",
                    format!("index {q} out of range for width {width}"),
                ));
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::invalid("qubits", format!("duplicate qubit {q}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.kind.name(), self.qubits)
    }
}

/// An ordered list of gate applications over `n_data + n_ancilla` qubits.
///
/// `measured[i]` is the qubit whose value becomes bit `i` of a reported
/// outcome. Fresh circuits measure their data qubits in order; routed
/// circuits carry the physical positions the data ended up in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_data: usize,
    n_ancilla: usize,
    ops: Vec<GateOp>,
    measured: Vec<usize>,
}

impl Circuit {
    pub fn new(n_data: usize, n_ancilla: usize) -> Result<Self> {
        if n_data == 0 {
            return Err(Error::invalid("n_data", "at least one data qubit required"));
        }
        let width = n_data + n_ancilla;
        if width > MAX_WIDTH {
            return Err(Error::Capacity {
                what: "circuit",
                width,
                limit: MAX_WIDTH,
            });
        }
        Ok(Circuit {
            n_data,
            n_ancilla,
            ops: Vec::new(),
            measured: (0..n_data).collect(),
        })
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn width(&self) -> usize {
        self.n_data + self.n_ancilla
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.width())?;
        self.ops.push(op);
        Ok(())
    }

    /// Builder-style [`push`](Self::push).
    pub fn append(mut self, op: GateOp) -> Result<Self> {
        self.push(op)?;
        Ok(self)
    }

    /// Appends every op of `other`, which must have the same width.
    pub fn extend_from(&mut self, other: &Circuit) -> Result<()> {
        if other.width() != self.width() {
            return Err(Error::invalid(
                "width",
                format!("fragment width {} != circuit width {}", other.width(), self.width()),
            ));
        }
        self.ops.extend_from_slice(&other.ops);
        Ok(())
    }

    /// Replaces the measured-qubit list; entries must be distinct and in range.
    pub fn set_measured(&mut self, measured: Vec<usize>) -> Result<()> {
        if measured.is_empty() {
            return Err(Error::invalid("measured", "empty measured set"));
        }
        for (i, &q) in measured.iter().enumerate() {
            if q >= self.width() || measured[..i].contains(&q) {
                return Err(Error::invalid("measured", format!("bad qubit {q}")));
            }
        }
        self.measured = measured;
        Ok(())
    }

    /// Same register and measurement, ops replaced. Ops are validated.
    pub fn with_ops(&self, ops: Vec<GateOp>) -> Result<Self> {
        let width = self.width();
        ops.iter().try_for_each(|op| op.validate(width))?;
        Ok(Circuit {
            ops,
            ..self.clone_empty()
        })
    }

    /// Physical register of `width` qubits (routing output). Not subject to the
    /// execution cap; the simulator rejects it if too wide.
    pub(crate) fn with_layout(
        n_data: usize,
        width: usize,
        ops: Vec<GateOp>,
        measured: Vec<usize>,
    ) -> Result<Self> {
        let n_data = n_data.min(width);
        let mut c = Circuit {
            n_data,
            n_ancilla: width - n_data,
            ops: Vec::with_capacity(ops.len()),
            measured: Vec::new(),
        };
        for op in ops {
            c.push(op)?;
        }
        c.set_measured(measured)?;
        Ok(c)
    }

    fn clone_empty(&self) -> Self {
        Circuit {
            n_data: self.n_data,
            n_ancilla: self.n_ancilla,
            ops: Vec::new(),
            measured: self.measured.clone(),
        }
    }

    /// The full `2^width` unitary, built by embedding each gate's local matrix.
    ///
    /// Independent of the simulator kernels; used as their reference.
    pub fn dense_unitary(&self) -> Result<UnitaryMatrix> {
        let width = self.width();
        if width > MAX_DENSE_WIDTH {
            return Err(Error::Capacity {
                what: "dense unitary",
                width,
                limit: MAX_DENSE_WIDTH,
            });
        }
        let mut u = UnitaryMatrix::identity(1 << width);
        for op in &self.ops {
            u = embed_and_multiply(op, &u);
        }
        Ok(u)
    }
}

/// Computes `E · u` where `E` is `op`'s local matrix embedded in the full register.
fn embed_and_multiply(op: &GateOp, u: &UnitaryMatrix) -> UnitaryMatrix {
    let local = op.kind.local_matrix();
    let arity = op.qubits.len();
    // Local bit (arity-1-j) corresponds to register qubit qubits[j].
    let local_index = |b: usize| {
        op.qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | (((b >> q) & 1) << (arity - 1 - j)))
    };
    let with_local = |b: usize, l: usize| {
        op.qubits.iter().enumerate().fold(b, |acc, (j, &q)| {
            let bit = (l >> (arity - 1 - j)) & 1;
            (acc & !(1 << q)) | (bit << q)
        })
    };
    let dim = u.dim;
    let mut out = UnitaryMatrix::zeros(dim);
    for r in 0..dim {
        let lr = local_index(r);
        for (lc, &m) in local[lr].iter().enumerate() {
            if m == ZERO {
                continue;
            }
            let src = with_local(r, lc);
            for c in 0..dim {
                out.data[r * dim + c] += m * u.data[src * dim + c];
            }
        }
    }
    out
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn zeros(dim: usize) -> Self {
        UnitaryMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect::<Vec<_>>();
        assert_eq!(data.len(), dim * dim, "matrix must be square");
        UnitaryMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise distance after aligning global phase on the first entry of
    /// `self` whose modulus exceeds `tol`. Infinite if that entry vanishes in `other`.
    pub fn phase_aligned_diff(&self, other: &UnitaryMatrix, tol: f64) -> f64 {
        assert_eq!(self.dim, other.dim);
        let Some(pos) = self.data.iter().position(|a| a.norm() > tol) else {
            return self.max_abs_diff(other);
        };
        let (a, b) = (self.data[pos], other.data[pos]);
        if b.norm() <= tol {
            return f64::INFINITY;
        }
        let phase = (a / b) / (a / b).norm();
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y * phase).norm())
            .fold(0.0, f64::max)
    }

    pub fn equivalent_up_to_phase(&self, other: &UnitaryMatrix, tol: f64) -> bool {
        self.phase_aligned_diff(other, tol) <= tol
    }
}

/// Parses an MSB-first bitstring (`q_{n-1} … q_0`) of exactly `n` characters.
pub fn parse_bitstring(s: &str, n: usize) -> Result<usize> {
    if s.len() != n {
        return Err(Error::invalid(
            "goal",
            format!("bitstring {s:?} has length {}, expected {n}", s.len()),
        ));
    }
    s.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::invalid("goal", format!("bitstring {s:?} contains {ch:?}"))),
    })
}

pub fn format_bitstring(index: usize, n: usize) -> String {
    (0..n)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}
