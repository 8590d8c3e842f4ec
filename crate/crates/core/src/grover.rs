//! The three Grover circuit variants and repetition-count formulas.
//!
//! Every variant starts from `H^{⊗n}` on the data qubits and repeats
//! oracle-then-diffuser `R` times. They differ only in how the phase flip on
//! the goal state is realised:
//!
//! | variant      | ancilla | oracle core                                  | diffuser core          |
//! |--------------|---------|----------------------------------------------|------------------------|
//! | `NoAncilla`  | no      | `H(t)·C^{n-1}X·H(t)` over the data           | same, data only        |
//! | `OneAncilla` | `\|−⟩`  | `C^nX` from the data onto the ancilla        | data-only `C^{n-1}Z`   |
//! | `Sdp`        | `\|−⟩`  | `C^nZ` spanning data and ancilla, ancilla H-conjugated | same oracle core |
//!
//! Goal encoding conjugates the core by `X` on every data qubit whose goal bit is 0.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateOp};
use crate::{Error, Result, MAX_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// String-detection-problem circuit: multi-controlled Z across data and ancilla.
    Sdp,
    NoAncilla,
    OneAncilla,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Sdp, Variant::NoAncilla, Variant::OneAncilla];

    pub fn n_ancilla(self) -> usize {
        match self {
            Variant::NoAncilla => 0,
            Variant::Sdp | Variant::OneAncilla => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Sdp => "sdp",
            Variant::NoAncilla => "noancilla",
            Variant::OneAncilla => "oneancilla",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "sdp" => Ok(Variant::Sdp),
            "noancilla" => Ok(Variant::NoAncilla),
            "oneancilla" | "ancilla" => Ok(Variant::OneAncilla),
            _ => Err(Error::invalid(
                "variant",
                format!("{s:?} is not one of sdp, noancilla, oneancilla"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroverSpec {
    pub n: usize,
    pub goal: usize,
    pub repetitions: usize,
    pub variant: Variant,
}

impl GroverSpec {
    pub fn new(n: usize, goal: usize, repetitions: usize, variant: Variant) -> Result<Self> {
        let spec = GroverSpec {
            n,
            goal,
            repetitions,
            variant,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n", "Grover circuits need at least 2 data qubits"));
        }
        let width = self.width();
        if width > MAX_WIDTH {
            return Err(Error::Capacity {
                what: "grover circuit",
                width,
                limit: MAX_WIDTH,
            });
        }
        if self.goal >= self.search_space() {
            return Err(Error::invalid(
                "goal",
                format!("{} out of range for n = {}", self.goal, self.n),
            ));
        }
        Ok(())
    }

    /// `N = 2^n`.
    pub fn search_space(&self) -> usize {
        1 << self.n
    }

    pub fn width(&self) -> usize {
        self.n + self.variant.n_ancilla()
    }

    fn ancilla(&self) -> Option<usize> {
        (self.variant.n_ancilla() == 1).then_some(self.n)
    }

    fn empty(&self) -> Result<Circuit> {
        Circuit::new(self.n, self.variant.n_ancilla())
    }
}

fn check_power_of_two(size: usize) -> Result<usize> {
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::invalid("N", format!("{size} is not 2^n with n >= 1")));
    }
    Ok(size)
}

/// `⌊π√N/2 − 1/2⌋`.
pub fn floor_repetitions(size: usize) -> Result<usize> {
    let size = check_power_of_two(size)? as f64;
    Ok((PI * size.sqrt() / 2.0 - 0.5).floor() as usize)
}

/// The standard optimum `round(π/(4θ) − 1/2)` with `θ = arcsin(1/√N)`, at least 1.
pub fn optimal_repetitions(size: usize) -> Result<usize> {
    let size = check_power_of_two(size)? as f64;
    let theta = (1.0 / size.sqrt()).asin();
    Ok(((PI / (4.0 * theta) - 0.5).round() as usize).max(1))
}

fn flip_zero_bits(c: &mut Circuit, n: usize, goal: usize) -> Result<()> {
    for q in (0..n).filter(|q| (goal >> q) & 1 == 0) {
        c.push(GateOp::x(q))?;
    }
    Ok(())
}

/// Phase flip on the data all-ones state: `H(t)·C^{n-1}X·H(t)` with `t = q_{n-1}`.
fn data_mcz(c: &mut Circuit, n: usize) -> Result<()> {
    let target = n - 1;
    let controls: Vec<usize> = (0..target).collect();
    c.push(GateOp::h(target))?;
    c.push(GateOp::mcx(&controls, target))?;
    c.push(GateOp::h(target))
}

/// Multi-controlled Z across data and ancilla, the ancilla conjugated by H so
/// that it acts as a phase kickback from the `|−⟩` ancilla.
fn spanning_mcz(c: &mut Circuit, n: usize, ancilla: usize) -> Result<()> {
    let qubits: Vec<usize> = (0..n).chain([ancilla]).collect();
    c.push(GateOp::h(ancilla))?;
    c.push(GateOp::mcz(&qubits))?;
    c.push(GateOp::h(ancilla))
}

/// The phase oracle `1 − 2|g⟩⟨g|` on the data register, as a fragment of the
/// variant's full width.
pub fn build_oracle(spec: &GroverSpec) -> Result<Circuit> {
    spec.validate()?;
    let mut c = spec.empty()?;
    flip_zero_bits(&mut c, spec.n, spec.goal)?;
    match (spec.variant, spec.ancilla()) {
        (Variant::NoAncilla, _) => data_mcz(&mut c, spec.n)?,
        (Variant::OneAncilla, Some(anc)) => {
            let controls: Vec<usize> = (0..spec.n).collect();
            c.push(GateOp::mcx(&controls, anc))?;
        }
        (Variant::Sdp, Some(anc)) => spanning_mcz(&mut c, spec.n, anc)?,
        _ => unreachable!("ancilla variants always carry an ancilla"),
    }
    flip_zero_bits(&mut c, spec.n, spec.goal)?;
    Ok(c)
}

/// Reflection about `|+⟩^{⊗n}`: `H^{⊗n} · (oracle for |0…0⟩) · H^{⊗n}` on
/// `n` data qubits with no ancilla.
pub fn build_diffuser(n: usize) -> Result<Circuit> {
    let spec = GroverSpec::new(n, 0, 0, Variant::NoAncilla)?;
    diffuser_for(&spec)
}

/// Diffuser matching `spec`'s register. The SDP circuit reuses its own oracle
/// core (targeting `|0…0⟩`); the other variants use the data-only reflection.
pub fn diffuser_for(spec: &GroverSpec) -> Result<Circuit> {
    let mut c = spec.empty()?;
    let oracle_zero = GroverSpec {
        goal: 0,
        variant: match spec.variant {
            Variant::Sdp => Variant::Sdp,
            Variant::NoAncilla | Variant::OneAncilla => Variant::NoAncilla,
        },
        ..*spec
    };
    let mut core = build_oracle(&oracle_zero)?;
    if spec.variant == Variant::OneAncilla {
        // Same ops, embedded in the wider register.
        core = Circuit::new(spec.n, 1)?.with_ops(core.ops().to_vec())?;
    }
    for q in 0..spec.n {
        c.push(GateOp::h(q))?;
    }
    c.extend_from(&core)?;
    for q in 0..spec.n {
        c.push(GateOp::h(q))?;
    }
    Ok(c)
}

/// Initialisation, `R` oracle/diffuser rounds; data qubits measured.
pub fn build_grover(spec: &GroverSpec) -> Result<Circuit> {
    spec.validate()?;
    let mut c = spec.empty()?;
    for q in 0..spec.n {
        c.push(GateOp::h(q))?;
    }
    if let Some(anc) = spec.ancilla() {
        c.push(GateOp::x(anc))?;
        c.push(GateOp::h(anc))?;
    }
    let oracle = build_oracle(spec)?;
    let diffuser = diffuser_for(spec)?;
    for _ in 0..spec.repetitions {
        c.extend_from(&oracle)?;
        c.extend_from(&diffuser)?;
    }
    Ok(c)
}
