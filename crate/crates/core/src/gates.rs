//! Digital gates: synthesis from pulse parameters and Rydberg blockade,
//! circuit execution, and fidelity scoring.
//!
//! Gate-level atoms are three-level systems |0>, |1>, |r>; pulses drive one
//! level pair. Multi-qubit gates arise from pulse sequences in which a
//! blockaded atom cannot be driven into |r> while a neighbour occupies it.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64, ONE, ZERO};
use crate::statevec::QuantumState;
use std::f64::consts::{FRAC_PI_4, PI};

/// Square drive pulse: Rabi frequency and detuning in rad/µs, phase in rad,
/// duration in µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub omega: f64,
    pub delta: f64,
    pub phase: f64,
    pub tau: f64,
}

impl PulseParams {
    pub fn new(omega: f64, delta: f64, phase: f64, tau: f64) -> Result<Self> {
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::invalid_argument(format!(
                "pulse omega must be >= 0, got {omega}"
            )));
        }
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::invalid_argument(format!(
                "pulse tau must be >= 0, got {tau}"
            )));
        }
        if !delta.is_finite() || !phase.is_finite() {
            return Err(Error::invalid_argument("pulse delta/phase must be finite"));
        }
        Ok(PulseParams {
            omega,
            delta,
            phase,
            tau,
        })
    }

    /// Resonant pulse of area Ωτ = π.
    pub fn pi(omega: f64) -> Result<Self> {
        Self::new(omega, 0.0, 0.0, PI / omega)
    }

    /// Resonant pulse of area Ωτ = 2π.
    pub fn two_pi(omega: f64) -> Result<Self> {
        Self::new(omega, 0.0, 0.0, 2.0 * PI / omega)
    }
}

/// Single-qubit rotation generated by a square pulse:
/// U = exp(−i τ/2 (Ω cosφ σx + Ω sinφ σy + δ σz)).
///
/// Evaluated in closed form from the generalized Rabi vector, so the result
/// is unitary to machine precision.
pub fn rotation_from_pulse(p: &PulseParams) -> CMat {
    let g = (p.omega * p.omega + p.delta * p.delta).sqrt();
    let theta = g * p.tau;
    let mut u = CMat::zeros((2, 2));
    if g == 0.0 || theta == 0.0 {
        u[[0, 0]] = ONE;
        u[[1, 1]] = ONE;
        return u;
    }
    let (nx, ny, nz) = (
        p.omega * p.phase.cos() / g,
        p.omega * p.phase.sin() / g,
        p.delta / g,
    );
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    // cos(θ/2) I − i sin(θ/2) (n · σ)
    u[[0, 0]] = C64::new(c, -s * nz);
    u[[1, 1]] = C64::new(c, s * nz);
    u[[0, 1]] = C64::new(-s * ny, -s * nx);
    u[[1, 0]] = C64::new(s * ny, -s * nx);
    u
}

/// Which level pair a pulse drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// |0> <-> |r>
    ZeroR,
    /// |1> <-> |r>
    OneR,
    /// |0> <-> |1>
    ZeroOne,
}

impl Coupling {
    fn levels(self) -> (usize, usize) {
        match self {
            Coupling::ZeroR => (0, 2),
            Coupling::OneR => (1, 2),
            Coupling::ZeroOne => (0, 1),
        }
    }
}

/// Interaction regime between Rydberg levels of different atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum Blockade {
    /// Infinite-shift limit: a drive into |r> is removed whenever another
    /// atom already occupies |r>.
    Perfect,
    /// Van der Waals shift c6/r^6 between every doubly-Rydberg pair, from
    /// explicit atom positions (µm).
    Finite { c6: f64, positions: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelAtomModel {
    pub coupling: Coupling,
    pub blockade: Blockade,
    /// Leakage population above which the report is flagged.
    pub leakage_threshold: f64,
}

impl ThreeLevelAtomModel {
    pub fn perfect(coupling: Coupling) -> Self {
        ThreeLevelAtomModel {
            coupling,
            blockade: Blockade::Perfect,
            leakage_threshold: 1e-3,
        }
    }

    pub fn finite(coupling: Coupling, c6: f64, positions: Vec<[f64; 3]>) -> Result<Self> {
        if !(c6 > 0.0) || !c6.is_finite() {
            return Err(Error::invalid_argument("finite blockade needs c6 > 0"));
        }
        Ok(ThreeLevelAtomModel {
            coupling,
            blockade: Blockade::Finite { c6, positions },
            leakage_threshold: 1e-3,
        })
    }
}

/// Residual population left outside the qubit subspace by a synthesized
/// gate, maximized over computational basis inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageReport {
    pub max_population: f64,
    pub threshold: f64,
    pub flagged: bool,
}

fn base3_digits(mut idx: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0usize; n];
    for k in (0..n).rev() {
        d[k] = idx % 3;
        idx /= 3;
    }
    d
}

fn base3_index(digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * 3 + d)
}

/// Unitary of one square pulse on `atom` within an n-atom three-level
/// system, honouring the blockade model.
fn pulse_unitary(
    n_atoms: usize,
    atom: usize,
    pulse: &PulseParams,
    model: &ThreeLevelAtomModel,
) -> Result<CMat> {
    let (l1, l2) = model.coupling.levels();
    let dim = 3usize.pow(n_atoms as u32);
    let mut h = CMat::zeros((dim, dim));
    let drives_rydberg = l2 == 2;
    let pair_shift: Option<Vec<Vec<f64>>> = match &model.blockade {
        Blockade::Perfect => None,
        Blockade::Finite { c6, positions } => {
            if positions.len() != n_atoms {
                return Err(Error::invalid_argument(format!(
                    "finite blockade has {} positions for {} atoms",
                    positions.len(),
                    n_atoms
                )));
            }
            let mut v = vec![vec![0.0; n_atoms]; n_atoms];
            for i in 0..n_atoms {
                for j in i + 1..n_atoms {
                    let dx = positions[i][0] - positions[j][0];
                    let dy = positions[i][1] - positions[j][1];
                    let dz = positions[i][2] - positions[j][2];
                    let r2 = dx * dx + dy * dy + dz * dz;
                    if r2 == 0.0 {
                        return Err(Error::InvalidRegister(format!(
                            "atoms {i} and {j} coincide"
                        )));
                    }
                    v[i][j] = c6 / r2.powi(3);
                }
            }
            Some(v)
        }
    };

    let half = pulse.omega / 2.0;
    let coupling_up = C64::from_polar(half, pulse.phase); // <l2|H|l1>
    for s in 0..dim {
        let digs = base3_digits(s, n_atoms);
        // detuning acts as ±δ/2 on the driven pair of the addressed atom
        if digs[atom] == l1 {
            h[[s, s]] += C64::new(pulse.delta / 2.0, 0.0);
        } else if digs[atom] == l2 {
            h[[s, s]] -= C64::new(pulse.delta / 2.0, 0.0);
        }
        if let Some(v) = &pair_shift {
            let mut shift = 0.0;
            for i in 0..n_atoms {
                if digs[i] != 2 {
                    continue;
                }
                for j in i + 1..n_atoms {
                    if digs[j] == 2 {
                        shift += v[i][j];
                    }
                }
            }
            h[[s, s]] += C64::new(shift, 0.0);
        }
        if digs[atom] == l1 {
            let blocked = matches!(model.blockade, Blockade::Perfect)
                && drives_rydberg
                && digs
                    .iter()
                    .enumerate()
                    .any(|(k, &d)| k != atom && d == 2);
            if !blocked {
                let mut up = digs.clone();
                up[atom] = l2;
                let s2 = base3_index(&up);
                h[[s2, s]] += coupling_up;
                h[[s, s2]] += coupling_up.conj();
            }
        }
    }
    let gen = h.mapv(|z| z * C64::new(0.0, -pulse.tau));
    Ok(linalg::expm(&gen))
}

/// Simulate a pulse schedule (atom index, pulse) on an n-atom three-level
/// system and project onto the computational subspace.
fn blockade_gate(
    n_atoms: usize,
    schedule: &[(usize, PulseParams)],
    model: &ThreeLevelAtomModel,
) -> Result<(CMat, LeakageReport)> {
    let dim3 = 3usize.pow(n_atoms as u32);
    let mut u = linalg::eye(dim3);
    for (atom, pulse) in schedule {
        if *atom >= n_atoms {
            return Err(Error::invalid_argument(format!(
                "pulse atom {atom} out of range"
            )));
        }
        let step = pulse_unitary(n_atoms, *atom, pulse, model)?;
        u = step.dot(&u);
    }
    // qubit-subspace block
    let dimq = 1usize << n_atoms;
    let full_index = |q: usize| -> usize {
        let mut digits = vec![0usize; n_atoms];
        for k in 0..n_atoms {
            digits[k] = (q >> (n_atoms - 1 - k)) & 1;
        }
        base3_index(&digits)
    };
    let mut block = CMat::zeros((dimq, dimq));
    for q_col in 0..dimq {
        for q_row in 0..dimq {
            block[[q_row, q_col]] = u[[full_index(q_row), full_index(q_col)]];
        }
    }
    let mut max_leak = 0.0f64;
    for q_col in 0..dimq {
        let kept: f64 = (0..dimq).map(|r| block[[r, q_col]].norm_sqr()).sum();
        max_leak = max_leak.max(1.0 - kept);
    }
    let report = LeakageReport {
        max_population: max_leak,
        threshold: model.leakage_threshold,
        flagged: max_leak > model.leakage_threshold,
    };
    Ok((block, report))
}

/// The canonical three-pulse sequence π(control), 2π(target), π(control).
pub fn cz_pulse_sequence(omega: f64) -> Result<[PulseParams; 3]> {
    Ok([
        PulseParams::pi(omega)?,
        PulseParams::two_pi(omega)?,
        PulseParams::pi(omega)?,
    ])
}

/// Controlled-Z from three |0>-to-|r> pulses under blockade: the returned
/// 4x4 block is the evolution restricted to the qubit subspace, with the
/// worst-case residual Rydberg population reported alongside.
pub fn cz_via_blockade(
    pulses: &[PulseParams; 3],
    model: &ThreeLevelAtomModel,
) -> Result<(CMat, LeakageReport)> {
    if model.coupling != Coupling::ZeroR {
        return Err(Error::invalid_argument(
            "blockade CZ drives the |0> <-> |r> transition",
        ));
    }
    let schedule = [(0usize, pulses[0]), (1, pulses[1]), (0, pulses[2])];
    blockade_gate(2, &schedule, model)
}

/// The five-pulse sequence π(c1), π(c2), 2π(t), π(c2), π(c1).
pub fn ccz_pulse_sequence(omega: f64) -> Result<[PulseParams; 5]> {
    Ok([
        PulseParams::pi(omega)?,
        PulseParams::pi(omega)?,
        PulseParams::two_pi(omega)?,
        PulseParams::pi(omega)?,
        PulseParams::pi(omega)?,
    ])
}

/// Doubly-controlled Z from five pulses under blockade; 8x8 qubit block
/// plus leakage report.
pub fn ccz_via_blockade(
    pulses: &[PulseParams; 5],
    model: &ThreeLevelAtomModel,
) -> Result<(CMat, LeakageReport)> {
    if model.coupling != Coupling::ZeroR {
        return Err(Error::invalid_argument(
            "blockade CCZ drives the |0> <-> |r> transition",
        ));
    }
    let schedule = [
        (0usize, pulses[0]),
        (1, pulses[1]),
        (2, pulses[2]),
        (1, pulses[3]),
        (0, pulses[4]),
    ];
    blockade_gate(3, &schedule, model)
}

/// Average-gate-fidelity proxy |tr(U_ideal† U_actual)|² / d², invariant
/// under a global phase and clamped to [0, 1].
pub fn gate_fidelity(u_actual: &CMat, u_ideal: &CMat) -> Result<f64> {
    if u_actual.dim() != u_ideal.dim() || u_actual.dim().0 != u_actual.dim().1 {
        return Err(Error::invalid_argument(
            "gate fidelity needs equal square dimensions",
        ));
    }
    let d = u_actual.dim().0 as f64;
    let tr: C64 = linalg::dagger(u_ideal).dot(u_actual).diag().sum();
    Ok((tr.norm_sqr() / (d * d)).clamp(0.0, 1.0))
}

/// A named gate acting on explicit qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    T(usize),
    Tdg(usize),
    Rz { qubit: usize, theta: f64 },
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
    Swap(usize, usize),
    Ccz(usize, usize, usize),
    Toffoli { control1: usize, control2: usize, target: usize },
    Raw { name: String, qubits: Vec<usize>, matrix: CMat },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::T(q) | Gate::Tdg(q) => vec![*q],
            Gate::Rz { qubit, .. } => vec![*qubit],
            Gate::Cz(a, b) | Gate::Swap(a, b) => vec![*a, *b],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Ccz(a, b, c) => vec![*a, *b, *c],
            Gate::Toffoli {
                control1,
                control2,
                target,
            } => vec![*control1, *control2, *target],
            Gate::Raw { qubits, .. } => qubits.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Gate::H(_) => "H".into(),
            Gate::X(_) => "X".into(),
            Gate::T(_) => "T".into(),
            Gate::Tdg(_) => "TDG".into(),
            Gate::Rz { .. } => "RZ".into(),
            Gate::Cz(..) => "CZ".into(),
            Gate::Cnot { .. } => "CNOT".into(),
            Gate::Swap(..) => "SWAP".into(),
            Gate::Ccz(..) => "CCZ".into(),
            Gate::Toffoli { .. } => "TOFFOLI".into(),
            Gate::Raw { name, .. } => name.clone(),
        }
    }

    /// Dense matrix on the gate's own qubits, first listed qubit most
    /// significant.
    pub fn matrix(&self) -> CMat {
        match self {
            Gate::H(_) => {
                let s = 1.0 / 2f64.sqrt();
                let mut m = CMat::zeros((2, 2));
                m[[0, 0]] = C64::new(s, 0.0);
                m[[0, 1]] = C64::new(s, 0.0);
                m[[1, 0]] = C64::new(s, 0.0);
                m[[1, 1]] = C64::new(-s, 0.0);
                m
            }
            Gate::X(_) => {
                let mut m = CMat::zeros((2, 2));
                m[[0, 1]] = ONE;
                m[[1, 0]] = ONE;
                m
            }
            Gate::T(_) => {
                let mut m = CMat::zeros((2, 2));
                m[[0, 0]] = ONE;
                m[[1, 1]] = C64::from_polar(1.0, FRAC_PI_4);
                m
            }
            Gate::Tdg(_) => {
                let mut m = CMat::zeros((2, 2));
                m[[0, 0]] = ONE;
                m[[1, 1]] = C64::from_polar(1.0, -FRAC_PI_4);
                m
            }
            Gate::Rz { theta, .. } => {
                let mut m = CMat::zeros((2, 2));
                m[[0, 0]] = C64::from_polar(1.0, -theta / 2.0);
                m[[1, 1]] = C64::from_polar(1.0, theta / 2.0);
                m
            }
            Gate::Cz(..) => {
                let mut m = linalg::eye(4);
                m[[3, 3]] = -ONE;
                m
            }
            Gate::Cnot { .. } => {
                let mut m = CMat::zeros((4, 4));
                m[[0, 0]] = ONE;
                m[[1, 1]] = ONE;
                m[[2, 3]] = ONE;
                m[[3, 2]] = ONE;
                m
            }
            Gate::Swap(..) => {
                let mut m = CMat::zeros((4, 4));
                m[[0, 0]] = ONE;
                m[[1, 2]] = ONE;
                m[[2, 1]] = ONE;
                m[[3, 3]] = ONE;
                m
            }
            Gate::Ccz(..) => {
                let mut m = linalg::eye(8);
                m[[7, 7]] = -ONE;
                m
            }
            Gate::Toffoli { .. } => {
                let mut m = linalg::eye(8);
                m[[6, 6]] = ZERO;
                m[[7, 7]] = ZERO;
                m[[6, 7]] = ONE;
                m[[7, 6]] = ONE;
                m
            }
            Gate::Raw { matrix, .. } => matrix.clone(),
        }
    }
}

/// Ordered gate list over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let qs = gate.qubits();
        for &q in &qs {
            if q >= self.n_qubits {
                return Err(Error::invalid_argument(format!(
                    "gate {} touches qubit {q}, circuit has {}",
                    gate.name(),
                    self.n_qubits
                )));
            }
        }
        for i in 0..qs.len() {
            for j in i + 1..qs.len() {
                if qs[i] == qs[j] {
                    return Err(Error::invalid_argument(format!(
                        "gate {} lists qubit {} twice",
                        gate.name(),
                        qs[i]
                    )));
                }
            }
        }
        if let Gate::Raw { qubits, matrix, .. } = &gate {
            let d = 1usize << qubits.len();
            if matrix.dim() != (d, d) {
                return Err(Error::invalid_argument(format!(
                    "raw gate matrix is {:?} for {} qubits",
                    matrix.dim(),
                    qubits.len()
                )));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.qubits().len() == 2).count()
    }

    /// Full 2^n unitary built by running the circuit on each basis state.
    pub fn unitary(&self) -> Result<CMat> {
        let dim = 1usize << self.n_qubits;
        let mut u = CMat::zeros((dim, dim));
        for col in 0..dim {
            let mut amps = crate::linalg::CVec::zeros(dim);
            amps[col] = ONE;
            let state = QuantumState::from_amplitudes(&vec![2; self.n_qubits], amps)?;
            let out = run_circuit(self, &state)?;
            for row in 0..dim {
                u[[row, col]] = out.amplitudes()[row];
            }
        }
        Ok(u)
    }
}

/// Apply the circuit's gates in order via tensor-slot application.
pub fn run_circuit(circuit: &Circuit, state: &QuantumState) -> Result<QuantumState> {
    if state.n_atoms() != circuit.n_qubits {
        return Err(Error::invalid_argument(format!(
            "circuit has {} qubits, state has {} atoms",
            circuit.n_qubits,
            state.n_atoms()
        )));
    }
    let mut s = state.clone();
    for gate in &circuit.gates {
        s = s.apply_operator(&gate.matrix(), &gate.qubits())?;
    }
    Ok(s)
}

/// CNOT decomposed as H(target) · CZ · H(target).
pub fn cnot_from_cz() -> Circuit {
    let mut c = Circuit::new(2);
    c.push(Gate::H(1)).unwrap();
    c.push(Gate::Cz(0, 1)).unwrap();
    c.push(Gate::H(1)).unwrap();
    c
}

/// Toffoli decomposed as H(target) · CCZ · H(target).
pub fn toffoli_from_ccz() -> Circuit {
    let mut c = Circuit::new(3);
    c.push(Gate::H(2)).unwrap();
    c.push(Gate::Ccz(0, 1, 2)).unwrap();
    c.push(Gate::H(2)).unwrap();
    c
}

/// Textbook Toffoli decomposition into exactly six CNOTs plus an H/T
/// single-qubit layer (nine single-qubit gates).
pub fn toffoli_from_cnots() -> Circuit {
    let (c1, c2, t) = (0, 1, 2);
    let mut c = Circuit::new(3);
    for gate in [
        Gate::H(t),
        Gate::Cnot {
            control: c2,
            target: t,
        },
        Gate::Tdg(t),
        Gate::Cnot {
            control: c1,
            target: t,
        },
        Gate::T(t),
        Gate::Cnot {
            control: c2,
            target: t,
        },
        Gate::Tdg(t),
        Gate::Cnot {
            control: c1,
            target: t,
        },
        Gate::T(c2),
        Gate::T(t),
        Gate::H(t),
        Gate::Cnot {
            control: c1,
            target: c2,
        },
        Gate::T(c1),
        Gate::Tdg(c2),
        Gate::Cnot {
            control: c1,
            target: c2,
        },
    ] {
        c.push(gate).unwrap();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eye, is_unitary, max_abs_diff, phase_aligned_distance};
    use crate::pauli::PauliString;
    use crate::statevec::Observable;
    use approx::assert_abs_diff_eq;

    fn ideal_cz() -> CMat {
        Gate::Cz(0, 1).matrix()
    }

    fn ideal_ccz() -> CMat {
        Gate::Ccz(0, 1, 2).matrix()
    }

    #[test]
    fn pi_pulse_is_not_gate() {
        let p = PulseParams::pi(3.0).unwrap();
        let u = rotation_from_pulse(&p);
        assert!(is_unitary(&u, 1e-12));
        assert!(phase_aligned_distance(&u, &Gate::X(0).matrix()) < 1e-12);
    }

    #[test]
    fn zero_duration_is_identity() {
        let p = PulseParams::new(2.0, 1.0, 0.3, 0.0).unwrap();
        assert!(max_abs_diff(&rotation_from_pulse(&p), &eye(2)) < 1e-15);
    }

    #[test]
    fn detuned_pi_pulse_is_hadamard() {
        // δ = Ω, φ = 0, generalized area √2 Ω τ = π
        let omega = 1.7;
        let tau = PI / (2f64.sqrt() * omega);
        let p = PulseParams::new(omega, omega, 0.0, tau).unwrap();
        let u = rotation_from_pulse(&p);
        assert!(phase_aligned_distance(&u, &Gate::H(0).matrix()) < 1e-9);
    }

    #[test]
    fn pulse_areas_compose() {
        for (a, b) in [(0.4, 1.1), (2.0, 0.25), (PI, PI)] {
            let pa = PulseParams::new(1.0, 0.0, 0.0, a).unwrap();
            let pb = PulseParams::new(1.0, 0.0, 0.0, b).unwrap();
            let pab = PulseParams::new(1.0, 0.0, 0.0, a + b).unwrap();
            let seq = rotation_from_pulse(&pb).dot(&rotation_from_pulse(&pa));
            assert!(max_abs_diff(&seq, &rotation_from_pulse(&pab)) < 1e-9);
        }
    }

    #[test]
    fn perfect_blockade_cz_matches_paper_phases() {
        let pulses = cz_pulse_sequence(1.0).unwrap();
        let model = ThreeLevelAtomModel::perfect(Coupling::ZeroR);
        let (u, report) = cz_via_blockade(&pulses, &model).unwrap();
        // exp(iπ) CZ = diag(−1, −1, −1, 1), entrywise
        let mut expected = eye(4).mapv(|z| -z);
        expected[[3, 3]] = ONE;
        assert!(
            max_abs_diff(&u, &expected) < 1e-9,
            "deviation {}",
            max_abs_diff(&u, &expected)
        );
        assert!(report.max_population < 1e-12);
        assert!(!report.flagged);
        assert_abs_diff_eq!(gate_fidelity(&u, &ideal_cz()).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn both_excited_input_is_untouched() {
        // |1c 1t>: every pulse off-resonant, state unchanged including phase
        let pulses = cz_pulse_sequence(2.0).unwrap();
        let model = ThreeLevelAtomModel::perfect(Coupling::ZeroR);
        let (u, _) = cz_via_blockade(&pulses, &model).unwrap();
        assert_abs_diff_eq!(u[[3, 3]].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u[[3, 3]].im, 0.0, epsilon = 1e-12);
        for row in 0..3 {
            assert!(u[[row, 3]].norm() < 1e-12);
        }
    }

    #[test]
    fn zero_area_pulses_give_identity() {
        let zero = PulseParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let model = ThreeLevelAtomModel::perfect(Coupling::ZeroR);
        let (u, _) = cz_via_blockade(&[zero, zero, zero], &model).unwrap();
        assert!(max_abs_diff(&u, &eye(4)) < 1e-12);
        let (u8, _) = ccz_via_blockade(&[zero; 5], &model).unwrap();
        assert!(max_abs_diff(&u8, &eye(8)) < 1e-12);
    }

    #[test]
    fn finite_blockade_cz_fidelity() {
        let omega = 1.0;
        let pulses = cz_pulse_sequence(omega).unwrap();
        // two atoms at r = 1 µm, shift c6/r^6 = 100 Ω
        let model = ThreeLevelAtomModel::finite(
            Coupling::ZeroR,
            100.0 * omega,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
        )
        .unwrap();
        let (u, report) = cz_via_blockade(&pulses, &model).unwrap();
        let f = gate_fidelity(&u, &ideal_cz()).unwrap();
        assert!(f > 0.99, "fidelity {f}");
        assert!(report.max_population < 1e-2);
    }

    #[test]
    fn blockade_fidelity_monotone_in_shift() {
        let omega = 1.0;
        let pulses = cz_pulse_sequence(omega).unwrap();
        let ratios = [10.0, 31.6, 100.0, 316.0, 1000.0, 3162.0, 10000.0];
        let mut last = 0.0;
        for &ratio in &ratios {
            let model = ThreeLevelAtomModel::finite(
                Coupling::ZeroR,
                ratio * omega,
                vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            )
            .unwrap();
            let (u, _) = cz_via_blockade(&pulses, &model).unwrap();
            let f = gate_fidelity(&u, &ideal_cz()).unwrap();
            assert!(
                f >= last,
                "fidelity not monotone at ratio {ratio}: {f} < {last}"
            );
            last = f;
        }
        assert!(last > 0.9999);
    }

    #[test]
    fn perfect_blockade_ccz_truth_table() {
        let pulses = ccz_pulse_sequence(1.0).unwrap();
        let model = ThreeLevelAtomModel::perfect(Coupling::ZeroR);
        let (u, report) = ccz_via_blockade(&pulses, &model).unwrap();
        assert!(report.max_population < 1e-12);
        // −1 on every input except |111>, which stays +1
        for col in 0..8 {
            let expected = if col == 7 { ONE } else { -ONE };
            let got = u[[col, col]];
            assert!(
                (got - expected).norm() < 1e-9,
                "basis {col}: {got} vs {expected}"
            );
            for row in 0..8 {
                if row != col {
                    assert!(u[[row, col]].norm() < 1e-9);
                }
            }
        }
        assert!(phase_aligned_distance(&u, &ideal_ccz()) < 1e-9);
    }

    #[test]
    fn synthesized_gates_are_unitary() {
        let model = ThreeLevelAtomModel::perfect(Coupling::ZeroR);
        let (cz, _) = cz_via_blockade(&cz_pulse_sequence(1.3).unwrap(), &model).unwrap();
        assert!(is_unitary(&cz, 1e-9));
        let (ccz, _) = ccz_via_blockade(&ccz_pulse_sequence(0.8).unwrap(), &model).unwrap();
        assert!(is_unitary(&ccz, 1e-9));
    }

    #[test]
    fn cnot_from_cz_matches_cnot_matrix() {
        let u = cnot_from_cz().unitary().unwrap();
        assert!(max_abs_diff(&u, &Gate::Cnot { control: 0, target: 1 }.matrix()) < 1e-12);
    }

    #[test]
    fn cnot_from_cz_squares_to_identity() {
        let u = cnot_from_cz().unitary().unwrap();
        assert!(max_abs_diff(&u.dot(&u), &eye(4)) < 1e-9);
    }

    #[test]
    fn toffoli_truth_table_and_equivalences() {
        let via_ccz = toffoli_from_ccz().unitary().unwrap();
        // |110> -> |111>
        let mut amps = crate::linalg::CVec::zeros(8);
        amps[6] = ONE;
        let s = QuantumState::from_amplitudes(&[2, 2, 2], amps).unwrap();
        let out = run_circuit(&toffoli_from_ccz(), &s).unwrap();
        assert!((out.amplitudes()[7].norm() - 1.0).abs() < 1e-12);

        let ideal = Gate::Toffoli {
            control1: 0,
            control2: 1,
            target: 2,
        }
        .matrix();
        assert!(phase_aligned_distance(&via_ccz, &ideal) < 1e-9);

        let via_cnots = toffoli_from_cnots();
        let cnots = via_cnots
            .gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count();
        assert_eq!(cnots, 6);
        let singles = via_cnots
            .gates
            .iter()
            .filter(|g| g.qubits().len() == 1)
            .count();
        assert_eq!(singles, 9);
        let u6 = via_cnots.unitary().unwrap();
        assert!(phase_aligned_distance(&u6, &ideal) < 1e-9);
        assert!(phase_aligned_distance(&u6, &via_ccz) < 1e-9);
    }

    #[test]
    fn run_circuit_builds_bell_state() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        let s = run_circuit(&c, &QuantumState::new(&[2, 2]).unwrap()).unwrap();
        let zz = PauliString::parse("ZZ").unwrap();
        let zi = PauliString::parse("ZI").unwrap();
        assert_abs_diff_eq!(
            s.expectation(&Observable::Pauli(zz)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            s.expectation(&Observable::Pauli(zi)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(2);
        let s = QuantumState::new(&[2, 2]).unwrap();
        assert_eq!(run_circuit(&c, &s).unwrap(), s);
    }

    #[test]
    fn x_on_first_qubit_convention() {
        let mut c = Circuit::new(2);
        c.push(Gate::X(0)).unwrap();
        let s = run_circuit(&c, &QuantumState::new(&[2, 2]).unwrap()).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[2].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_invariances() {
        let u = crate::linalg::random_unitary(4, 17);
        assert_abs_diff_eq!(gate_fidelity(&u, &u).unwrap(), 1.0, epsilon = 1e-12);
        let rotated = u.mapv(|z| z * C64::from_polar(1.0, 0.77));
        assert_abs_diff_eq!(gate_fidelity(&rotated, &u).unwrap(), 1.0, epsilon = 1e-12);
        assert!(gate_fidelity(&u, &eye(8)).is_err());
    }

    #[test]
    fn circuit_rejects_bad_gates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::H(2)).is_err());
        assert!(c.push(Gate::Cz(1, 1)).is_err());
        assert!(c
            .push(Gate::Raw {
                name: "BAD".into(),
                qubits: vec![0],
                matrix: eye(4),
            })
            .is_err());
    }
}
