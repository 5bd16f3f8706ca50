//! Time-dependent Ising and XY spin Hamiltonians and Schrödinger evolution.
//!
//! Hamiltonians are built from a [`Register`] and per-channel [`Waveform`]s
//! (rad/µs over µs). With ħ = 1 the Ising form reads
//!
//! ```text
//! H(t) = Ω(t)/2 Σ_j σx_j − δ(t) Σ_j n_j + Σ_{i<j} C6/r_ij^6 n_i n_j
//! ```
//!
//! with n_j the projector onto |1> of atom j, and the XY form
//!
//! ```text
//! H(t) = Ω(t)/2 Σ_j σx_j − δ(t)/2 Σ_j σz_j + 2 Σ_{i<j} C3/r_ij^3 (σx_i σx_j + σy_i σy_j)
//! ```
//!
//! where σz counts |1> as spin-up, so positive detuning lowers the energy
//! of |1> in both models. Pair sums count each unordered pair once.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};
use crate::register::{interaction_matrix, Register};
use crate::statevec::{QuantumState, DEFAULT_ATOM_CAP};

/// Piecewise channel data: Ω(t), δ(t) in rad/µs (or a phase in rad).
///
/// Between breakpoints a piecewise-constant waveform holds its left value;
/// a piecewise-linear waveform interpolates.
#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    Constant(f64),
    PiecewiseConstant { times: Vec<f64>, values: Vec<f64> },
    PiecewiseLinear { times: Vec<f64>, values: Vec<f64> },
}

fn check_grid(times: &[f64], values: &[f64], min_len: usize) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::invalid_argument(
            "waveform times and values differ in length",
        ));
    }
    if times.len() < min_len {
        return Err(Error::invalid_argument(format!(
            "waveform needs at least {min_len} breakpoints"
        )));
    }
    if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_argument("waveform entries must be finite"));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid_argument(
            "waveform breakpoints must be strictly increasing",
        ));
    }
    Ok(())
}

impl Waveform {
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid_argument("waveform value must be finite"));
        }
        Ok(Waveform::Constant(value))
    }

    pub fn piecewise_constant(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&times, &values, 1)?;
        Ok(Waveform::PiecewiseConstant { times, values })
    }

    pub fn piecewise_linear(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&times, &values, 2)?;
        Ok(Waveform::PiecewiseLinear { times, values })
    }

    /// Domain of definition; constant waveforms are defined everywhere and
    /// left-hold waveforms extend to +inf.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Waveform::Constant(_) => (f64::NEG_INFINITY, f64::INFINITY),
            Waveform::PiecewiseConstant { times, .. } => (times[0], f64::INFINITY),
            Waveform::PiecewiseLinear { times, .. } => (times[0], *times.last().unwrap()),
        }
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let (start, end) = self.domain();
        if t < start || t > end {
            return Err(Error::Domain { t, start, end });
        }
        Ok(match self {
            Waveform::Constant(v) => *v,
            Waveform::PiecewiseConstant { times, values } => {
                let k = times.partition_point(|&bp| bp <= t);
                values[k.saturating_sub(1)]
            }
            Waveform::PiecewiseLinear { times, values } => {
                let k = times.partition_point(|&bp| bp <= t);
                if k == 0 {
                    values[0]
                } else if k == times.len() {
                    *values.last().unwrap()
                } else {
                    let (t0, t1) = (times[k - 1], times[k]);
                    let (v0, v1) = (values[k - 1], values[k]);
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        })
    }

    /// Breakpoints strictly inside (t0, t1).
    fn breakpoints_within(&self, t0: f64, t1: f64) -> Vec<f64> {
        match self {
            Waveform::Constant(_) => Vec::new(),
            Waveform::PiecewiseConstant { times, .. }
            | Waveform::PiecewiseLinear { times, .. } => times
                .iter()
                .copied()
                .filter(|&t| t > t0 && t < t1)
                .collect(),
        }
    }

    /// True when the waveform cannot vary between breakpoints.
    fn is_left_hold(&self) -> bool {
        !matches!(self, Waveform::PiecewiseLinear { .. })
    }
}

/// Ising-model drive over a register: global Ω and δ channels plus van der
/// Waals couplings C6/r^6 between excited pairs.
#[derive(Debug, Clone)]
pub struct IsingSpec {
    pub register: Register,
    pub omega: Waveform,
    pub delta: Waveform,
    pub c6: f64,
}

impl IsingSpec {
    pub fn new(register: Register, omega: Waveform, delta: Waveform, c6: f64) -> Result<Self> {
        if !(c6 > 0.0) || !c6.is_finite() {
            return Err(Error::invalid_argument(format!(
                "c6 must be positive and finite, got {c6}"
            )));
        }
        Ok(IsingSpec {
            register,
            omega,
            delta,
            c6,
        })
    }
}

/// XY-model drive: global Ω and δ channels plus excitation exchange with
/// dipolar couplings C3/r^3.
#[derive(Debug, Clone)]
pub struct XYSpec {
    pub register: Register,
    pub omega: Waveform,
    pub delta: Waveform,
    pub c3: f64,
}

impl XYSpec {
    pub fn new(register: Register, omega: Waveform, delta: Waveform, c3: f64) -> Result<Self> {
        if c3 == 0.0 || !c3.is_finite() {
            return Err(Error::invalid_argument(format!(
                "c3 must be nonzero and finite, got {c3}"
            )));
        }
        Ok(XYSpec {
            register,
            omega,
            delta,
            c3,
        })
    }
}

/// A spin model that can produce its dense matrix at any time point.
pub trait HamiltonianModel {
    fn n_atoms(&self) -> usize;
    fn matrix(&self, t: f64) -> Result<CMat>;
    fn channel_breakpoints(&self, t0: f64, t1: f64) -> Vec<f64>;
    /// True when the generator is exactly constant between breakpoints.
    fn constant_between_breakpoints(&self) -> bool;
}

fn check_atom_count(n: usize) -> Result<usize> {
    if n > DEFAULT_ATOM_CAP {
        return Err(Error::Capacity(format!(
            "{n} atoms exceeds the dense-matrix cap of {DEFAULT_ATOM_CAP}"
        )));
    }
    Ok(1usize << n)
}

fn merged_breakpoints(a: &Waveform, b: &Waveform, t0: f64, t1: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = a
        .breakpoints_within(t0, t1)
        .into_iter()
        .chain(b.breakpoints_within(t0, t1))
        .collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    pts
}

impl HamiltonianModel for IsingSpec {
    fn n_atoms(&self) -> usize {
        self.register.len()
    }

    fn matrix(&self, t: f64) -> Result<CMat> {
        ising_matrix(self, t)
    }

    fn channel_breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        merged_breakpoints(&self.omega, &self.delta, t0, t1)
    }

    fn constant_between_breakpoints(&self) -> bool {
        self.omega.is_left_hold() && self.delta.is_left_hold()
    }
}

impl HamiltonianModel for XYSpec {
    fn n_atoms(&self) -> usize {
        self.register.len()
    }

    fn matrix(&self, t: f64) -> Result<CMat> {
        xy_matrix(self, t)
    }

    fn channel_breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        merged_breakpoints(&self.omega, &self.delta, t0, t1)
    }

    fn constant_between_breakpoints(&self) -> bool {
        self.omega.is_left_hold() && self.delta.is_left_hold()
    }
}

/// Dense Ising Hamiltonian at time t, dimension 2^n, atom 0 most
/// significant.
pub fn ising_matrix(spec: &IsingSpec, t: f64) -> Result<CMat> {
    let n = spec.register.len();
    let dim = check_atom_count(n)?;
    let omega = spec.omega.value(t)?;
    let delta = spec.delta.value(t)?;
    let couplings = interaction_matrix(&spec.register, spec.c6, 6)?;

    let mut h = CMat::zeros((dim, dim));
    for b in 0..dim {
        // −δ Σ n_j + pairwise C6/r^6 on doubly excited pairs
        let mut diag = -delta * (b.count_ones() as f64);
        for i in 0..n {
            if (b >> (n - 1 - i)) & 1 == 0 {
                continue;
            }
            for j in i + 1..n {
                if (b >> (n - 1 - j)) & 1 == 1 {
                    diag += couplings[[i, j]];
                }
            }
        }
        h[[b, b]] = C64::new(diag, 0.0);
        // Ω/2 σx couplings
        for j in 0..n {
            let flipped = b ^ (1 << (n - 1 - j));
            h[[flipped, b]] += C64::new(omega / 2.0, 0.0);
        }
    }
    Ok(h)
}

/// Dense XY Hamiltonian at time t, dimension 2^n.
pub fn xy_matrix(spec: &XYSpec, t: f64) -> Result<CMat> {
    let n = spec.register.len();
    let dim = check_atom_count(n)?;
    let omega = spec.omega.value(t)?;
    let delta = spec.delta.value(t)?;
    let couplings = interaction_matrix(&spec.register, spec.c3, 3)?;

    let mut h = CMat::zeros((dim, dim));
    for b in 0..dim {
        // −δ/2 Σ σz with σz |1> = +|1>
        let ups = b.count_ones() as f64;
        let downs = (n as u32 - b.count_ones()) as f64;
        h[[b, b]] = C64::new(-delta / 2.0 * (ups - downs), 0.0);
        for j in 0..n {
            let flipped = b ^ (1 << (n - 1 - j));
            h[[flipped, b]] += C64::new(omega / 2.0, 0.0);
        }
        // exchange: 2 C3/r^3 (σx σx + σy σy) maps |01> <-> |10> with
        // matrix element 2, so each hop carries 4 C3/r^3
        for i in 0..n {
            for j in i + 1..n {
                let bi = (b >> (n - 1 - i)) & 1;
                let bj = (b >> (n - 1 - j)) & 1;
                if bi != bj {
                    let swapped = b ^ (1 << (n - 1 - i)) ^ (1 << (n - 1 - j));
                    h[[swapped, b]] += C64::new(4.0 * couplings[[i, j]], 0.0);
                }
            }
        }
    }
    Ok(h)
}

const DT_FLOOR: f64 = 1e-12;

/// Integrate i d|ψ>/dt = H(t)|ψ> from t0 to t1.
///
/// The generator is treated as piecewise constant over sub-steps, each
/// advanced by an exact dense matrix exponential (midpoint-sampled), with
/// the step size adapted by a step-halving error estimate against `tol`.
/// Segments on which H is exactly constant (constant or left-hold
/// waveforms) advance in a single exact step. Errors if the step size
/// underflows without meeting the tolerance.
pub fn evolve<M: HamiltonianModel>(
    state: &QuantumState,
    model: &M,
    t0: f64,
    t1: f64,
    dt_max: f64,
    tol: f64,
) -> Result<QuantumState> {
    if !(t1 > t0) {
        return Err(Error::invalid_argument(format!(
            "evolution needs t1 > t0, got [{t0}, {t1}]"
        )));
    }
    if !(dt_max > 0.0) || !(tol > 0.0) {
        return Err(Error::invalid_argument(
            "dt_max and tol must be positive",
        ));
    }
    if state.dims().iter().any(|&d| d != 2) {
        return Err(Error::invalid_argument(
            "evolution requires all-qubit local dimensions",
        ));
    }
    if state.n_atoms() != model.n_atoms() {
        return Err(Error::invalid_argument(format!(
            "state has {} atoms, model has {}",
            state.n_atoms(),
            model.n_atoms()
        )));
    }

    let mut segments = vec![t0];
    segments.extend(model.channel_breakpoints(t0, t1));
    segments.push(t1);

    let total = t1 - t0;
    let mut psi = state.amplitudes().clone();
    for pair in segments.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if model.constant_between_breakpoints() {
            // exact: one exponential of the (constant) generator
            let h = model.matrix(a)?;
            psi = step(&h, b - a, &psi);
        } else {
            integrate_adaptive(model, a, b, total, dt_max, tol, &mut psi)?;
        }
    }

    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Integration(format!(
            "norm drifted to {norm} (beyond 1e-8)"
        )));
    }
    Ok(QuantumState::from_amplitudes_unchecked(
        state.dims().to_vec(),
        psi,
    ))
}

fn step(h: &CMat, dt: f64, psi: &CVec) -> CVec {
    let gen = h.mapv(|z| z * C64::new(0.0, -dt));
    linalg::expm(&gen).dot(psi)
}

fn integrate_adaptive<M: HamiltonianModel>(
    model: &M,
    a: f64,
    b: f64,
    total: f64,
    dt_max: f64,
    tol: f64,
    psi: &mut CVec,
) -> Result<()> {
    let mut t = a;
    let mut h_step = dt_max.min(b - a);
    while t < b - 1e-15 * total {
        h_step = h_step.min(b - t);
        let full = step(&model.matrix(t + h_step / 2.0)?, h_step, psi);
        let half1 = step(&model.matrix(t + h_step / 4.0)?, h_step / 2.0, psi);
        let half2 = step(
            &model.matrix(t + 3.0 * h_step / 4.0)?,
            h_step / 2.0,
            &half1,
        );
        let err: f64 = full
            .iter()
            .zip(half2.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        // proportional budget floored at roundoff so vanishing tail steps
        // can still be accepted
        let budget = (tol * h_step / total).max(1e-14);
        if err <= budget {
            *psi = half2;
            t += h_step;
            if err < budget / 16.0 {
                h_step = (h_step * 2.0).min(dt_max);
            }
        } else {
            h_step /= 2.0;
            if h_step < DT_FLOOR {
                return Err(Error::Integration(format!(
                    "step size underflowed at t = {t} with error {err:.3e} > budget {budget:.3e}"
                )));
            }
        }
    }
    Ok(())
}
