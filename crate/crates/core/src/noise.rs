//! Depolarizing gate noise and readout errors, unravelled into Pauli trajectories.
//!
//! A depolarizing event with probability `p` applies one of X, Y, Z (each with
//! probability `p/3`) to the pure state. Averaged over trajectories this is the
//! channel `ρ → (1−p)ρ + (p/3)(XρX + YρY + ZρZ)`.
//!
//! Fault decisions never depend on the state, so a shot first draws its fault
//! list and only re-simulates when that list is non-empty; fault-free shots
//! sample from the cached ideal distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{selectivity, SelectivityReport};
use crate::circuit::{Circuit, GateKind, GateOp};
use crate::grover::{build_grover, GroverSpec};
use crate::sim::{exact_distribution, run_ideal, CdfSampler, Histogram, StateVector};
use crate::transpile::{transpile, TranspileOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub p1: f64,
    /// Depolarizing probability applied to every qubit of a multi-qubit gate.
    pub p2: f64,
    /// Readout bit-flip probability per measured qubit.
    pub eps_ro: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, eps_ro: f64) -> Result<Self> {
        let model = NoiseModel { p1, p2, eps_ro };
        model.validate()?;
        Ok(model)
    }

    /// `p1 = p2 = p`, no readout error.
    pub fn uniform(p: f64) -> Result<Self> {
        Self::new(p, p, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, p) in [("p1", self.p1), ("p2", self.p2), ("eps_ro", self.eps_ro)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(field, format!("{p} is not in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.eps_ro == 0.0
    }

    fn gate_probability(&self, op: &GateOp) -> f64 {
        if op.kind.arity() == 1 {
            self.p1
        } else {
            self.p2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn gate(self, qubit: usize) -> GateOp {
        let kind = match self {
            Pauli::X => GateKind::X,
            Pauli::Y => GateKind::Y,
            Pauli::Z => GateKind::Z,
        };
        GateOp::new(kind, [qubit])
    }
}

/// With probability `p` one of X, Y, Z uniformly, else none. One uniform draw.
pub fn draw_pauli<R: Rng>(p: f64, rng: &mut R) -> Option<Pauli> {
    let u: f64 = rng.gen();
    if u >= p {
        return None;
    }
    Some(match (3.0 * u / p) as usize {
        0 => Pauli::X,
        1 => Pauli::Y,
        _ => Pauli::Z,
    })
}

/// One trajectory step of the depolarizing channel on `qubit`.
pub fn apply_depolarizing<R: Rng>(state: &mut StateVector, qubit: usize, p: f64, rng: &mut R) {
    if let Some(pauli) = draw_pauli(p, rng) {
        state.apply(&pauli.gate(qubit));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    /// Index of the op after which the Pauli is applied.
    pub position: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub injected: Vec<Fault>,
}

impl Trajectory {
    /// Draws the fault list for `circuit`, consuming one uniform per
    /// (op, participating qubit) event from `rng`.
    pub fn draw<R: Rng>(circuit: &Circuit, model: &NoiseModel, seed: u64, rng: &mut R) -> Self {
        let mut injected = Vec::new();
        for (position, op) in circuit.ops().iter().enumerate() {
            let p = model.gate_probability(op);
            for &qubit in &op.qubits {
                if let Some(pauli) = draw_pauli(p, rng) {
                    injected.push(Fault {
                        position,
                        qubit,
                        pauli,
                    });
                }
            }
        }
        Trajectory { seed, injected }
    }

    /// Executes `circuit` with this trajectory's faults into `state`.
    pub fn run_into(&self, circuit: &Circuit, state: &mut StateVector) {
        state.reset();
        let mut faults = self.injected.iter().peekable();
        for (position, op) in circuit.ops().iter().enumerate() {
            state.apply(op);
            while let Some(f) = faults.next_if(|f| f.position == position) {
                state.apply(&f.pauli.gate(f.qubit));
            }
        }
    }

    pub fn run(&self, circuit: &Circuit) -> Result<StateVector> {
        let mut state = StateVector::zero(circuit.width())?;
        self.run_into(circuit, &mut state);
        Ok(state)
    }
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of shot `shot` under master seed `seed`; independent of execution order.
pub fn shot_seed(seed: u64, shot: u64) -> u64 {
    mix64(mix64(seed) ^ shot.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

struct ShotRunner<'a> {
    circuit: &'a Circuit,
    model: &'a NoiseModel,
    seed: u64,
    ideal: CdfSampler,
}

impl ShotRunner<'_> {
    fn run_block(&self, shots: std::ops::Range<u64>) -> Result<Vec<u64>> {
        let n_out = self.circuit.measured().len();
        let mut counts = vec![0u64; 1 << n_out];
        let mut state = StateVector::zero(self.circuit.width())?;
        for shot in shots {
            let seed = shot_seed(self.seed, shot);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let traj = Trajectory::draw(self.circuit, self.model, seed, &mut rng);
            let mut outcome = if traj.injected.is_empty() {
                self.ideal.draw(&mut rng)
            } else {
                traj.run_into(self.circuit, &mut state);
                let dist = exact_distribution(&state, self.circuit.measured())?;
                CdfSampler::new(&dist.probs).draw(&mut rng)
            };
            for bit in 0..n_out {
                if rng.gen::<f64>() < self.model.eps_ro {
                    outcome ^= 1 << bit;
                }
            }
            counts[outcome] += 1;
        }
        Ok(counts)
    }
}

const BLOCK: u64 = 256;

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Monte-Carlo execution with per-gate depolarizing noise and readout flips.
///
/// Each shot derives its own generator from `(seed, shot index)`, so the
/// histogram does not depend on how shots are scheduled across threads.
pub fn run_noisy(circuit: &Circuit, model: &NoiseModel, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(Error::invalid("shots", "must be at least 1"));
    }
    model.validate()?;
    let ideal = exact_distribution(&run_ideal(circuit)?, circuit.measured())?;
    let runner = ShotRunner {
        circuit,
        model,
        seed,
        ideal: CdfSampler::new(&ideal.probs),
    };
    let blocks = shots.div_ceil(BLOCK);
    let range = |b: u64| b * BLOCK..((b + 1) * BLOCK).min(shots);
    let empty = vec![0u64; ideal.probs.len()];

    #[cfg(feature = "parallel")]
    let counts = {
        use rayon::prelude::*;
        (0..blocks)
            .into_par_iter()
            .map(|b| runner.run_block(range(b)))
            .try_reduce(|| empty.clone(), |a, b| Ok(merge(a, b)))?
    };
    #[cfg(not(feature = "parallel"))]
    let counts = (0..blocks).try_fold(empty, |acc, b| Ok::<_, Error>(merge(acc, runner.run_block(range(b))?)))?;

    Ok(Histogram {
        n_data: circuit.measured().len(),
        counts,
        shots,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub repetitions: usize,
    pub model: NoiseModel,
    pub histogram: Histogram,
    pub selectivity: SelectivityReport,
}

/// One [`run_noisy`] per `(R, model)` cell, `R` outer. Every cell uses `seed`.
pub fn noise_sweep(
    spec: &GroverSpec,
    models: &[NoiseModel],
    repetitions: &[usize],
    shots: u64,
    seed: u64,
    options: &TranspileOptions,
) -> Result<Vec<SweepRow>> {
    if models.is_empty() || repetitions.is_empty() {
        return Err(Error::invalid("grid", "sweep grids must be nonempty"));
    }
    let mut rows = Vec::with_capacity(models.len() * repetitions.len());
    for &r in repetitions {
        let cell = GroverSpec {
            repetitions: r,
            ..*spec
        };
        let circuit = transpile(&build_grover(&cell)?, options)?;
        for model in models {
            let histogram = run_noisy(&circuit, model, shots, seed)?;
            let selectivity = selectivity(&histogram, spec.goal)?;
            rows.push(SweepRow {
                repetitions: r,
                model: *model,
                histogram,
                selectivity,
            });
        }
    }
    Ok(rows)
}
