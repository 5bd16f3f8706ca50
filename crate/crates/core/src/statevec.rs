//! Dense state vectors over mixed 2- and 3-level atoms.
//!
//! Basis ordering is mixed-radix with atom 0 as the most significant digit,
//! so the two-qubit basis runs |00>, |01>, |10>, |11> and bitstring I/O is
//! atom-0-first. Local dimension 3 adds the Rydberg level |r> as digit 2.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ONE};
use crate::pauli::{PauliOp, PauliString};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

/// Default cap on qubit-only registers; keeps dense vectors desk-scale.
pub const DEFAULT_ATOM_CAP: usize = 14;
/// Cap when any atom carries the third (Rydberg) level.
pub const DEFAULT_THREE_LEVEL_CAP: usize = 9;

const NORM_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-9;
const LEAKAGE_TOL: f64 = 1e-6;

/// Normalized amplitude vector over a register of atoms with local
/// dimensions 2 (qubit) or 3 (qubit + Rydberg level).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: CVec,
    dims: Vec<usize>,
}

/// Classical readout confusion: an atom in |0> reads dark with probability
/// `p_dark_given_bright`, an atom in |1> reads bright with probability
/// `p_bright_given_dark`. Applied as independent bit flips after an ideal
/// projective measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutModel {
    pub p_dark_given_bright: f64,
    pub p_bright_given_dark: f64,
}

impl ReadoutModel {
    pub fn perfect() -> Self {
        ReadoutModel {
            p_dark_given_bright: 0.0,
            p_bright_given_dark: 0.0,
        }
    }

    /// Symmetric model from an aggregate detection efficiency, e.g. 0.986.
    pub fn from_efficiency(efficiency: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::invalid_argument(format!(
                "efficiency must be in [0, 1], got {efficiency}"
            )));
        }
        let p = 1.0 - efficiency;
        ReadoutModel::new(p, p)
    }

    pub fn new(p_dark_given_bright: f64, p_bright_given_dark: f64) -> Result<Self> {
        for (name, p) in [
            ("p_dark_given_bright", p_dark_given_bright),
            ("p_bright_given_dark", p_bright_given_dark),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid_argument(format!(
                    "{name} must be a probability, got {p}"
                )));
            }
        }
        Ok(ReadoutModel {
            p_dark_given_bright,
            p_bright_given_dark,
        })
    }
}

/// Observable accepted by [`QuantumState::expectation`].
pub enum Observable {
    Pauli(PauliString),
    Dense(CMat),
}

impl From<PauliString> for Observable {
    fn from(p: PauliString) -> Self {
        Observable::Pauli(p)
    }
}

impl From<CMat> for Observable {
    fn from(m: CMat) -> Self {
        Observable::Dense(m)
    }
}

fn validate_dims(dims: &[usize], cap: usize, cap3: usize) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::invalid_argument("state needs at least one atom"));
    }
    if dims.iter().any(|&d| d != 2 && d != 3) {
        return Err(Error::invalid_argument(
            "local dimensions must be 2 or 3",
        ));
    }
    let limit = if dims.contains(&3) { cap3 } else { cap };
    if dims.len() > limit {
        return Err(Error::Capacity(format!(
            "{} atoms exceeds the cap of {limit}",
            dims.len()
        )));
    }
    Ok(dims.iter().product())
}

impl QuantumState {
    /// All population on the all-|0> basis state.
    pub fn new(dims: &[usize]) -> Result<Self> {
        Self::with_caps(dims, DEFAULT_ATOM_CAP, DEFAULT_THREE_LEVEL_CAP)
    }

    /// Same as [`QuantumState::new`] with explicit capacity limits.
    pub fn with_caps(dims: &[usize], cap: usize, cap3: usize) -> Result<Self> {
        let dim = validate_dims(dims, cap, cap3)?;
        let mut amps = CVec::zeros(dim);
        amps[0] = ONE;
        Ok(QuantumState {
            amps,
            dims: dims.to_vec(),
        })
    }

    /// Build from explicit amplitudes; the vector must be normalized.
    pub fn from_amplitudes(dims: &[usize], amps: CVec) -> Result<Self> {
        let dim = validate_dims(dims, DEFAULT_ATOM_CAP, DEFAULT_THREE_LEVEL_CAP)?;
        if amps.len() != dim {
            return Err(Error::invalid_argument(format!(
                "amplitude vector length {} does not match dimension {dim}",
                amps.len()
            )));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid_argument(format!(
                "state norm^2 {norm2} deviates from 1 beyond {NORM_TOL}"
            )));
        }
        Ok(QuantumState {
            amps,
            dims: dims.to_vec(),
        })
    }

    pub(crate) fn from_amplitudes_unchecked(dims: Vec<usize>, amps: CVec) -> Self {
        QuantumState { amps, dims }
    }

    pub fn n_atoms(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Stride of atom k in the flattened index (atom 0 most significant).
    fn stride(&self, atom: usize) -> usize {
        self.dims[atom + 1..].iter().product()
    }

    /// Render a flattened basis index as per-atom digits.
    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    /// Apply a unitary to a subset of atoms. The operator's row/column
    /// ordering follows the order of `atoms`, first listed atom most
    /// significant. Untouched atoms keep their marginals.
    pub fn apply_operator(&self, matrix: &CMat, atoms: &[usize]) -> Result<QuantumState> {
        let n = self.n_atoms();
        if atoms.is_empty() {
            return Err(Error::invalid_argument("no target atoms given"));
        }
        let mut seen = vec![false; n];
        for &a in atoms {
            if a >= n {
                return Err(Error::invalid_argument(format!(
                    "atom index {a} out of range for {n} atoms"
                )));
            }
            if seen[a] {
                return Err(Error::invalid_argument(format!(
                    "atom index {a} repeated"
                )));
            }
            seen[a] = true;
        }
        let d: usize = atoms.iter().map(|&a| self.dims[a]).product();
        if matrix.dim() != (d, d) {
            return Err(Error::invalid_argument(format!(
                "operator is {:?}, target subspace has dimension {d}",
                matrix.dim()
            )));
        }
        if !linalg::is_unitary(matrix, UNITARY_TOL) {
            return Err(Error::InvalidOperator(
                "operator is not unitary within 1e-9".into(),
            ));
        }

        let target_strides: Vec<usize> = atoms.iter().map(|&a| self.stride(a)).collect();
        let target_dims: Vec<usize> = atoms.iter().map(|&a| self.dims[a]).collect();
        let rest: Vec<usize> = (0..n).filter(|k| !atoms.contains(k)).collect();
        let rest_strides: Vec<usize> = rest.iter().map(|&a| self.stride(a)).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&a| self.dims[a]).collect();
        let rest_dim: usize = rest_dims.iter().product();

        // offsets of every target sub-index relative to a base amplitude
        let mut sub_offsets = vec![0usize; d];
        for s in 0..d {
            let mut rem = s;
            let mut off = 0;
            for j in (0..atoms.len()).rev() {
                off += (rem % target_dims[j]) * target_strides[j];
                rem /= target_dims[j];
            }
            sub_offsets[s] = off;
        }

        let mut out = self.amps.clone();
        let mut scratch = vec![C64::new(0.0, 0.0); d];
        for r in 0..rest_dim {
            let mut rem = r;
            let mut base = 0;
            for j in (0..rest.len()).rev() {
                base += (rem % rest_dims[j]) * rest_strides[j];
                rem /= rest_dims[j];
            }
            for (s, &off) in sub_offsets.iter().enumerate() {
                scratch[s] = self.amps[base + off];
            }
            for (row, &off) in sub_offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (col, &v) in scratch.iter().enumerate() {
                    acc += matrix[[row, col]] * v;
                }
                out[base + off] = acc;
            }
        }
        Ok(QuantumState {
            amps: out,
            dims: self.dims.clone(),
        })
    }

    /// Exact expectation value of a Hermitian observable.
    pub fn expectation(&self, op: &Observable) -> Result<f64> {
        match op {
            Observable::Pauli(p) => {
                if self.dims.iter().any(|&d| d != 2) {
                    return Err(Error::invalid_argument(
                        "Pauli expectation requires all-qubit local dimensions",
                    ));
                }
                if p.len() != self.n_atoms() {
                    return Err(Error::invalid_argument(format!(
                        "Pauli string has {} factors for {} atoms",
                        p.len(),
                        self.n_atoms()
                    )));
                }
                if p.coeff.im.abs() > HERMITIAN_TOL * p.coeff.norm().max(1.0) {
                    return Err(Error::InvalidOperator(
                        "Pauli string with complex coefficient is not Hermitian".into(),
                    ));
                }
                let mut phi = self.amps.clone();
                for (atom, &op1) in p.ops.iter().enumerate() {
                    if op1 == PauliOp::I {
                        continue;
                    }
                    apply_single_qubit_in_place(&mut phi, &self.dims, atom, &op1.matrix());
                }
                let braket: C64 = self
                    .amps
                    .iter()
                    .zip(phi.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                Ok((p.coeff * braket).re)
            }
            Observable::Dense(m) => {
                let dim = self.dim();
                if m.dim() != (dim, dim) {
                    return Err(Error::invalid_argument(format!(
                        "observable is {:?}, state dimension is {dim}",
                        m.dim()
                    )));
                }
                let scale = linalg::max_abs(m).max(1.0);
                if !linalg::is_hermitian(m, HERMITIAN_TOL * scale) {
                    return Err(Error::InvalidOperator(
                        "observable is not Hermitian within 1e-9".into(),
                    ));
                }
                let phi = m.dot(&self.amps);
                let braket: C64 = self
                    .amps
                    .iter()
                    .zip(phi.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                Ok(braket.re)
            }
        }
    }

    /// Residual population outside the qubit subspace (any atom at |r>).
    pub fn rydberg_leakage(&self) -> f64 {
        if !self.dims.contains(&3) {
            return 0.0;
        }
        let mut leak = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            if self.digits(idx).iter().any(|&d| d == 2) {
                leak += amp.norm_sqr();
            }
        }
        leak
    }

    /// Project any 3-level atoms onto their qubit subspace. Errors if the
    /// discarded population exceeds 1e-6.
    pub fn project_to_qubits(&self) -> Result<QuantumState> {
        if !self.dims.contains(&3) {
            return Ok(self.clone());
        }
        let leak = self.rydberg_leakage();
        if leak > LEAKAGE_TOL {
            return Err(Error::RydbergLeakage { population: leak });
        }
        let n = self.n_atoms();
        let qdims = vec![2usize; n];
        let mut amps = CVec::zeros(1 << n);
        for (idx, amp) in self.amps.iter().enumerate() {
            let digits = self.digits(idx);
            if digits.iter().any(|&d| d == 2) {
                continue;
            }
            let mut q = 0;
            for &d in &digits {
                q = q * 2 + d;
            }
            amps[q] = *amp;
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            amps.mapv_inplace(|z| z / norm);
        }
        Ok(QuantumState { amps, dims: qdims })
    }

    /// Measure `shots` bitstrings: an ideal Born-rule draw followed by
    /// independent readout flips per bit. Deterministic given the seed.
    /// States with 3-level atoms are projected first and must carry less
    /// than 1e-6 residual |r> population.
    pub fn sample(
        &self,
        shots: usize,
        model: &ReadoutModel,
        seed: u64,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::invalid_argument("shots must be >= 1"));
        }
        let qubit_state = self.project_to_qubits()?;
        let n = qubit_state.n_atoms();
        let probs = qubit_state.probabilities();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let total = acc;

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let mut idx = cumulative.partition_point(|&c| c <= u);
            if idx >= probs.len() {
                idx = probs.len() - 1;
            }
            let mut bits = String::with_capacity(n);
            for k in 0..n {
                let bit = (idx >> (n - 1 - k)) & 1;
                let flip = if bit == 0 {
                    rng.random::<f64>() < model.p_dark_given_bright
                } else {
                    rng.random::<f64>() < model.p_bright_given_dark
                };
                let observed = if flip { 1 - bit } else { bit };
                bits.push(if observed == 1 { '1' } else { '0' });
            }
            *counts.entry(bits).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// In-place single-qubit operator application on a raw amplitude vector.
fn apply_single_qubit_in_place(amps: &mut CVec, dims: &[usize], atom: usize, m: &CMat) {
    let stride: usize = dims[atom + 1..].iter().product();
    let d = dims[atom];
    debug_assert_eq!(d, 2);
    let block = stride * d;
    let total = amps.len();
    let mut base = 0;
    while base < total {
        for off in 0..stride {
            let i0 = base + off;
            let i1 = i0 + stride;
            let a0 = amps[i0];
            let a1 = amps[i1];
            amps[i0] = m[[0, 0]] * a0 + m[[0, 1]] * a1;
            amps[i1] = m[[1, 0]] * a0 + m[[1, 1]] * a1;
        }
        base += block;
    }
}

/// Squared overlap |<a|b>|^2 of two states over identical registers.
pub fn state_fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::invalid_argument(
            "states live on different registers",
        ));
    }
    let overlap: C64 = a
        .amps
        .iter()
        .zip(b.amps.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}
