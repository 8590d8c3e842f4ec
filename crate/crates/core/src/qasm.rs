//! OpenQASM 2.0 export.

use std::fmt::Write;

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::{Error, Result};

const CCZ_DEF: &str = "gate ccz a,b,c { h c; ccx a,b,c; h c; }";

fn gate_line(op: &GateOp) -> Result<String> {
    let args = op
        .qubits
        .iter()
        .map(|q| format!("q[{q}]"))
        .collect::<Vec<_>>()
        .join(",");
    let name = match op.kind {
        GateKind::H => "h".to_string(),
        GateKind::X => "x".to_string(),
        GateKind::Y => "y".to_string(),
        GateKind::Z => "z".to_string(),
        GateKind::Rz(theta) => format!("rz({theta:?})"),
        GateKind::Cx | GateKind::Mcx(1) => "cx".to_string(),
        GateKind::Cz | GateKind::Mcz(1) => "cz".to_string(),
        GateKind::Mcx(2) => "ccx".to_string(),
        GateKind::Mcz(2) => "ccz".to_string(),
        GateKind::Swap => "swap".to_string(),
        GateKind::Mcx(_) | GateKind::Mcz(_) => {
            return Err(Error::UnsupportedGate {
                gate: op.kind.name(),
            })
        }
    };
    Ok(format!("{name} {args};"))
}

/// Renders `circuit` as OpenQASM 2.0 with one line per gate and one `measure`
/// per measured qubit (`c[i]` receives `measured[i]`).
pub fn export_qasm(circuit: &Circuit) -> Result<String> {
    let lines = circuit
        .ops()
        .iter()
        .map(gate_line)
        .collect::<Result<Vec<_>>>()?;
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if circuit.ops().iter().any(|op| op.kind == GateKind::Mcz(2)) {
        out.push_str(CCZ_DEF);
        out.push('\n');
    }
    let _ = writeln!(out, "qreg q[{}];", circuit.width());
    let _ = writeln!(out, "creg c[{}];", circuit.measured().len());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    for (i, q) in circuit.measured().iter().enumerate() {
        let _ = writeln!(out, "measure q[{q}] -> c[{i}];");
    }
    Ok(out)
}

/// Number of gate statements in exported QASM text.
pub fn count_gate_lines(qasm: &str) -> usize {
    qasm.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .filter(|l| {
            !["OPENQASM", "include", "qreg", "creg", "measure", "gate ", "//"]
                .iter()
                .any(|p| l.starts_with(p))
        })
        .count()
}
