//! Pauli strings and sums over qubit registers.

use crate::error::{Error, Result};
use crate::linalg::{kron, CMat, C64, ONE, ZERO};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn matrix(self) -> CMat {
        let mut m = CMat::zeros((2, 2));
        match self {
            PauliOp::I => {
                m[[0, 0]] = ONE;
                m[[1, 1]] = ONE;
            }
            PauliOp::X => {
                m[[0, 1]] = ONE;
                m[[1, 0]] = ONE;
            }
            PauliOp::Y => {
                m[[0, 1]] = C64::new(0.0, -1.0);
                m[[1, 0]] = C64::new(0.0, 1.0);
            }
            PauliOp::Z => {
                m[[0, 0]] = ONE;
                m[[1, 1]] = -ONE;
            }
        }
        m
    }

    fn symbol(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    fn from_symbol(c: char) -> Result<Self> {
        match c {
            'I' => Ok(PauliOp::I),
            'X' => Ok(PauliOp::X),
            'Y' => Ok(PauliOp::Y),
            'Z' => Ok(PauliOp::Z),
            other => Err(Error::invalid_argument(format!(
                "unknown Pauli symbol '{other}'"
            ))),
        }
    }

    /// Single-site product `self * other` as (result, phase).
    fn mul(self, other: PauliOp) -> (PauliOp, C64) {
        use PauliOp::*;
        let i = C64::new(0.0, 1.0);
        match (self, other) {
            (I, o) => (o, ONE),
            (o, I) => (o, ONE),
            (X, X) | (Y, Y) | (Z, Z) => (I, ONE),
            (X, Y) => (Z, i),
            (Y, X) => (Z, -i),
            (Y, Z) => (X, i),
            (Z, Y) => (X, -i),
            (Z, X) => (Y, i),
            (X, Z) => (Y, -i),
        }
    }
}

/// A tensor product of single-qubit Pauli factors with a complex
/// coefficient. Factor k acts on atom k (atom 0 is the most significant
/// digit of the basis index).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coeff: C64,
    pub ops: Vec<PauliOp>,
}

impl PauliString {
    pub fn new(coeff: C64, ops: Vec<PauliOp>) -> Self {
        PauliString { coeff, ops }
    }

    pub fn identity(n: usize) -> Self {
        PauliString::new(ONE, vec![PauliOp::I; n])
    }

    /// Parse a symbol run like "ZXI" with unit coefficient.
    pub fn parse(symbols: &str) -> Result<Self> {
        let ops = symbols
            .chars()
            .map(PauliOp::from_symbol)
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::invalid_argument("empty Pauli string"));
        }
        Ok(PauliString::new(ONE, ops))
    }

    /// Single non-identity factor on `site` in a register of `n` qubits.
    pub fn single(n: usize, site: usize, op: PauliOp, coeff: C64) -> Result<Self> {
        if site >= n {
            return Err(Error::invalid_argument(format!(
                "site {site} out of range for {n} qubits"
            )));
        }
        let mut ops = vec![PauliOp::I; n];
        ops[site] = op;
        Ok(PauliString::new(coeff, ops))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dense(&self) -> CMat {
        let mut m = CMat::from_elem((1, 1), self.coeff);
        for op in &self.ops {
            m = kron(&m, &op.matrix());
        }
        m
    }

    pub fn dagger(&self) -> Self {
        // Pauli factors are self-adjoint; only the coefficient conjugates.
        PauliString::new(self.coeff.conj(), self.ops.clone())
    }

    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.len() != other.len() {
            return Err(Error::invalid_argument("Pauli string length mismatch"));
        }
        let mut coeff = self.coeff * other.coeff;
        let mut ops = Vec::with_capacity(self.len());
        for (&a, &b) in self.ops.iter().zip(&other.ops) {
            let (op, phase) = a.mul(b);
            coeff *= phase;
            ops.push(op);
        }
        Ok(PauliString::new(coeff, ops))
    }

    pub fn symbols(&self) -> String {
        self.ops.iter().map(|op| op.symbol()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.coeff.re, self.coeff.im, self.symbols())
    }
}

/// Sum of Pauli strings of equal length; zero-coefficient terms pruned.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: Vec<PauliString>,
}

const PRUNE_EPS: f64 = 1e-14;

impl PauliSum {
    pub fn new(terms: Vec<PauliString>) -> Result<Self> {
        if let Some(first) = terms.first() {
            if terms.iter().any(|t| t.len() != first.len()) {
                return Err(Error::invalid_argument(
                    "Pauli sum terms must share a length",
                ));
            }
        }
        let mut sum = PauliSum { terms };
        sum.merge();
        Ok(sum)
    }

    pub fn zero() -> Self {
        PauliSum::default()
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_qubits(&self) -> Option<usize> {
        self.terms.first().map(|t| t.len())
    }

    pub fn add(&mut self, term: PauliString) -> Result<()> {
        if let Some(n) = self.num_qubits() {
            if term.len() != n {
                return Err(Error::invalid_argument(
                    "Pauli sum terms must share a length",
                ));
            }
        }
        self.terms.push(term);
        self.merge();
        Ok(())
    }

    pub fn extend(&mut self, other: &PauliSum) -> Result<()> {
        for t in &other.terms {
            self.add(t.clone())?;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: C64) {
        for t in &mut self.terms {
            t.coeff *= factor;
        }
        self.merge();
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                out.push(a.mul(b)?);
            }
        }
        PauliSum::new(out)
    }

    pub fn dagger(&self) -> PauliSum {
        PauliSum {
            terms: self.terms.iter().map(|t| t.dagger()).collect(),
        }
    }

    /// Canonical merge: combine identical symbol runs, prune near-zeros,
    /// sort by symbols for a deterministic term order.
    fn merge(&mut self) {
        use std::collections::BTreeMap;
        let mut by_symbols: BTreeMap<String, (C64, Vec<PauliOp>)> = BTreeMap::new();
        for t in &self.terms {
            let key = t.symbols();
            let entry = by_symbols
                .entry(key)
                .or_insert_with(|| (ZERO, t.ops.clone()));
            entry.0 += t.coeff;
        }
        self.terms = by_symbols
            .into_values()
            .filter(|(c, _)| c.norm() > PRUNE_EPS)
            .map(|(c, ops)| PauliString::new(c, ops))
            .collect();
    }

    pub fn dense(&self, n_qubits: usize) -> CMat {
        let dim = 1usize << n_qubits;
        let mut m = CMat::zeros((dim, dim));
        for t in &self.terms {
            assert_eq!(t.len(), n_qubits, "term length mismatch");
            m = m + t.dense();
        }
        m
    }

    /// Hermitian iff the sum equals its adjoint term-by-term after the
    /// canonical merge (Pauli strings are an orthogonal basis).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dag = self.dagger();
        let mut diff = self.clone();
        let mut neg = dag;
        neg.scale(-ONE);
        if diff.extend(&neg).is_err() {
            return false;
        }
        diff.terms.iter().all(|t| t.coeff.norm() <= tol)
    }

    /// Export as plain text: one `coeff_re coeff_im SYMBOLS` line per term.
    pub fn export_lines(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{} {} {}\n", t.coeff.re, t.coeff.im, t.symbols()));
        }
        out
    }
}
