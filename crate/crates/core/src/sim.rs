//! Noiseless state-vector execution.
//!
//! Gates are applied in place with index-pair stride kernels: a gate on target
//! qubit `t` touches amplitude pairs `(b, b | 2^t)` with bit `t` of `b` clear,
//! so every gate is `O(2^n)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::{Error, Result, MAX_WIDTH};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_WIDTH {
            return Err(Error::Capacity {
                what: "state vector",
                width: n,
                limit: MAX_WIDTH,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::invalid("amplitudes", format!("length {len} is not 2^n")));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_WIDTH {
            return Err(Error::Capacity {
                what: "state vector",
                width: n,
                limit: MAX_WIDTH,
            });
        }
        let state = StateVector { n, amps };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("amplitudes", "state is not normalised"));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Resets to `|0…0⟩` without reallocating.
    pub fn reset(&mut self) {
        self.amps.fill(Complex64::new(0.0, 0.0));
        self.amps[0] = Complex64::new(1.0, 0.0);
    }

    /// Applies `op`. Qubit indices must already be validated against the width.
    pub fn apply(&mut self, op: &GateOp) {
        let q = &op.qubits;
        match op.kind {
            GateKind::X => self.apply_x(q[0], 0),
            GateKind::Z => self.apply_phase_flip(1 << q[0]),
            GateKind::H | GateKind::Y | GateKind::Rz(_) => {
                let m = op.kind.single_qubit_matrix().expect("single-qubit gate");
                self.apply_single(q[0], &m);
            }
            GateKind::Cx => self.apply_x(q[1], 1 << q[0]),
            GateKind::Mcx(k) => self.apply_x(q[k], mask_of(&q[..k])),
            GateKind::Cz | GateKind::Mcz(_) => self.apply_phase_flip(mask_of(q)),
            GateKind::Swap => self.apply_swap(q[0], q[1]),
        }
    }

    pub fn apply_single(&mut self, target: usize, m: &[[Complex64; 2]; 2]) {
        let stride = 1 << target;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = m[0][0] * x0 + m[0][1] * x1;
                *a1 = m[1][0] * x0 + m[1][1] * x1;
            }
        }
    }

    /// X on `target` where every bit of `controls` is set.
    fn apply_x(&mut self, target: usize, controls: usize) {
        let stride = 1 << target;
        for (chunk, block) in self.amps.chunks_exact_mut(2 * stride).enumerate() {
            let base = chunk * 2 * stride;
            let (lo, hi) = block.split_at_mut(stride);
            for (j, (a0, a1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (base + j) & controls == controls {
                    std::mem::swap(a0, a1);
                }
            }
        }
    }

    /// Negates every amplitude whose index has all bits of `mask` set.
    fn apply_phase_flip(&mut self, mask: usize) {
        for (b, a) in self.amps.iter_mut().enumerate() {
            if b & mask == mask {
                *a = -*a;
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1 << a, 1 << b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, (i & !ma) | mb);
            }
        }
    }
}

fn mask_of(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << q))
}

/// Executes `circuit` on `|0…0⟩` and returns the pre-measurement state.
pub fn run_ideal(circuit: &Circuit) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.width())?;
    for op in circuit.ops() {
        state.apply(op);
    }
    Ok(state)
}

/// Exact probabilities over `n_data` measured qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub n_data: usize,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let len = probs.len();
        if !len.is_power_of_two() {
            return Err(Error::invalid("probs", format!("length {len} is not 2^n")));
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::invalid("probs", "negative or NaN probability"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("probs", format!("sum {total} != 1")));
        }
        Ok(Distribution {
            n_data: len.trailing_zeros() as usize,
            probs,
        })
    }

    pub fn uniform(n_data: usize) -> Self {
        let len = 1usize << n_data;
        Distribution {
            n_data,
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Outcome counts over the measured qubits, with the seed that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub n_data: usize,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
}

impl Histogram {
    pub fn empty(n_data: usize, seed: u64) -> Self {
        Histogram {
            n_data,
            counts: vec![0; 1 << n_data],
            shots: 0,
            seed,
        }
    }

    pub fn record(&mut self, outcome: usize) {
        self.counts[outcome] += 1;
        self.shots += 1;
    }

    /// Empirical frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        let shots = self.shots.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / shots).collect()
    }
}

/// Marginal distribution of `measured` (bit `i` of an outcome = qubit `measured[i]`).
pub fn exact_distribution(state: &StateVector, measured: &[usize]) -> Result<Distribution> {
    if measured.is_empty() {
        return Err(Error::invalid("measured", "empty measured set"));
    }
    for (i, &q) in measured.iter().enumerate() {
        if q >= state.n || measured[..i].contains(&q) {
            return Err(Error::invalid("measured", format!("bad qubit {q}")));
        }
    }
    let mut probs = vec![0.0; 1 << measured.len()];
    for (b, a) in state.amps.iter().enumerate() {
        let outcome = measured
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (((b >> q) & 1) << i));
        probs[outcome] += a.norm_sqr();
    }
    Ok(Distribution {
        n_data: measured.len(),
        probs,
    })
}

/// Inverse-CDF sampler over a fixed distribution.
#[derive(Debug, Clone)]
pub(crate) struct CdfSampler {
    cdf: Vec<f64>,
}

impl CdfSampler {
    pub(crate) fn new(probs: &[f64]) -> Self {
        let cdf = probs
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        CdfSampler { cdf }
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().expect("nonempty distribution");
        let u = rng.gen::<f64>() * total;
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }
}

/// Draws `shots` i.i.d. outcomes with a ChaCha generator seeded from `seed`.
pub fn sample(dist: &Distribution, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::invalid("shots", "must be at least 1"));
    }
    let sampler = CdfSampler::new(&dist.probs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = Histogram::empty(dist.n_data, seed);
    for _ in 0..shots {
        hist.record(sampler.draw(&mut rng));
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::grover::{build_grover, GroverSpec, Variant};

    fn grover_n4_r1() -> Circuit {
        build_grover(&GroverSpec::new(4, 14, 1, Variant::NoAncilla).unwrap()).unwrap()
    }

    #[test]
    fn empty_circuit_is_ground_state() {
        let s = run_ideal(&Circuit::new(3, 0).unwrap()).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn hadamard_layer_is_uniform() {
        let mut c = Circuit::new(4, 0).unwrap();
        for q in 0..4 {
            c.push(GateOp::h(q)).unwrap();
        }
        let s = run_ideal(&c).unwrap();
        for a in s.amplitudes() {
            assert!((a - Complex64::new(0.25, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn one_grover_step_on_sixteen_states() {
        // The diffuser is 1 − 2|s⟩⟨s|, so the amplitudes carry a global −1.
        let s = run_ideal(&grover_n4_r1()).unwrap();
        for (b, a) in s.amplitudes().iter().enumerate() {
            let want = if b == 14 { -11.0 / 16.0 } else { -3.0 / 16.0 };
            assert!((a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12, "b={b} a={a}");
        }
    }

    #[test]
    fn minus_state_measures_uniformly() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&GateOp::x(0));
        s.apply(&GateOp::h(0));
        let d = exact_distribution(&s, &[0]).unwrap();
        assert!((d.probs[0] - 0.5).abs() < 1e-12 && (d.probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grover_distribution_excludes_ancilla() {
        let s = run_ideal(&grover_n4_r1()).unwrap();
        let d = exact_distribution(&s, &[0, 1, 2, 3]).unwrap();
        assert!((d.probs[14] - 121.0 / 256.0).abs() < 1e-12);
        assert!((d.probs[0] - 9.0 / 256.0).abs() < 1e-12);

        let anc = build_grover(&GroverSpec::new(4, 14, 1, Variant::OneAncilla).unwrap()).unwrap();
        let da = exact_distribution(&run_ideal(&anc).unwrap(), anc.measured()).unwrap();
        for (p, q) in d.probs.iter().zip(&da.probs) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_measured_set_is_rejected() {
        let s = StateVector::zero(2).unwrap();
        assert!(exact_distribution(&s, &[]).is_err());
        assert!(exact_distribution(&s, &[2]).is_err());
    }

    #[test]
    fn point_mass_sampling() {
        let mut probs = vec![0.0; 16];
        probs[0] = 1.0;
        let d = Distribution::new(probs).unwrap();
        let h = sample(&d, 1000, 99).unwrap();
        assert_eq!(h.counts[0], 1000);
        assert_eq!(h.shots, 1000);
    }

    #[test]
    fn uniform_sampling_within_five_sigma() {
        let h = sample(&Distribution::uniform(4), 4000, 3).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 4000);
        for &c in &h.counts {
            assert!((c as i64 - 250).abs() <= 77, "count {c}");
        }
    }

    #[test]
    fn grover_sampling_within_five_sigma() {
        let c = grover_n4_r1();
        let d = exact_distribution(&run_ideal(&c).unwrap(), c.measured()).unwrap();
        let h = sample(&d, 1000, 7).unwrap();
        let sigma = (1000.0 * (121.0 / 256.0) * (135.0 / 256.0f64)).sqrt();
        assert!((h.counts[14] as f64 - 472.66).abs() <= 5.0 * sigma);
    }

    #[test]
    fn sampling_is_deterministic_and_rejects_zero_shots() {
        let d = Distribution::uniform(3);
        assert_eq!(sample(&d, 500, 11).unwrap(), sample(&d, 500, 11).unwrap());
        assert_ne!(sample(&d, 500, 11).unwrap(), sample(&d, 500, 12).unwrap());
        assert!(sample(&d, 0, 1).is_err());
    }

    #[test]
    fn zero_probability_outcomes_never_drawn() {
        let d = Distribution::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let h = sample(&d, 10_000, 5).unwrap();
        assert_eq!(h.counts[1] + h.counts[2], 0);
    }
}
