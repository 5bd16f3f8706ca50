//! Dense complex linear algebra used across the emulator.
//!
//! Matrices are `ndarray::Array2<Complex64>`. The sizes in play are desk
//! scale (dimension ≤ a few thousand), so everything here is direct dense
//! arithmetic: a scaling-and-squaring Padé matrix exponential, LU with
//! partial pivoting, and a cyclic Jacobi eigensolver for Hermitian matrices.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn eye(n: usize) -> CMat {
    Array2::eye(n)
}

pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = CMat::zeros((ra * rb, ca * cb));
    for ia in 0..ra {
        for ja in 0..ca {
            let f = a[[ia, ja]];
            if f == ZERO {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out[[ia * rb + ib, ja * cb + jb]] = f * b[[ib, jb]];
                }
            }
        }
    }
    out
}

/// Maximum column absolute sum.
pub fn one_norm(a: &CMat) -> f64 {
    let (_, cols) = a.dim();
    (0..cols)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.dim().0 == a.dim().1 && max_abs_diff(a, &dagger(a)) <= tol
}

pub fn is_unitary(a: &CMat, tol: f64) -> bool {
    let (r, c) = a.dim();
    if r != c {
        return false;
    }
    let prod = dagger(a).dot(a);
    max_abs_diff(&prod, &eye(r)) <= tol
}

/// Distance between two matrices modulo a global phase: the phase is chosen
/// to maximize overlap, then the max-abs entry difference is reported.
pub fn phase_aligned_distance(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let tr: C64 = dagger(b).dot(a).diag().sum();
    let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { ONE };
    let aligned = b.mapv(|z| z * phase);
    max_abs_diff(a, &aligned)
}

/// Solve `a x = b` for square `a` by LU decomposition with partial pivoting.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let n = a.dim().0;
    if a.dim().1 != n || b.dim().0 != n {
        return Err(Error::invalid_argument("solve: dimension mismatch"));
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| {
                lu[[i, k]]
                    .norm()
                    .partial_cmp(&lu[[j, k]].norm())
                    .unwrap()
            })
            .unwrap();
        if lu[[pivot, k]].norm() == 0.0 {
            return Err(Error::invalid_argument("solve: singular matrix"));
        }
        if pivot != k {
            for j in 0..n {
                lu.swap([k, j], [pivot, j]);
            }
            perm.swap(k, pivot);
        }
        let d = lu[[k, k]];
        for i in k + 1..n {
            let m = lu[[i, k]] / d;
            lu[[i, k]] = m;
            for j in k + 1..n {
                let v = lu[[k, j]];
                lu[[i, j]] -= m * v;
            }
        }
    }
    let ncols = b.dim().1;
    let mut x = CMat::zeros((n, ncols));
    for j in 0..ncols {
        for i in 0..n {
            x[[i, j]] = b[[perm[i], j]];
        }
    }
    // forward then back substitution
    for j in 0..ncols {
        for i in 1..n {
            let mut s = x[[i, j]];
            for k in 0..i {
                s -= lu[[i, k]] * x[[k, j]];
            }
            x[[i, j]] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[[i, j]];
            for k in i + 1..n {
                s -= lu[[i, k]] * x[[k, j]];
            }
            x[[i, j]] = s / lu[[i, i]];
        }
    }
    Ok(x)
}

fn is_diagonal(a: &CMat) -> bool {
    let n = a.dim().0;
    for i in 0..n {
        for j in 0..n {
            if i != j && a[[i, j]] != ZERO {
                return false;
            }
        }
    }
    true
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539398330063230e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068;
const THETA13: f64 = 5.371920351148152;

fn pade_uv(a: &CMat, powers: &[CMat], b: &[f64]) -> (CMat, CMat) {
    // powers = [A^2, A^4, ...] as needed by the order
    let n = a.dim().0;
    let mut u_poly = eye(n).mapv(|z| z * C64::new(b[1], 0.0));
    let mut v = eye(n).mapv(|z| z * C64::new(b[0], 0.0));
    for (k, p) in powers.iter().enumerate() {
        let bu = C64::new(b[2 * k + 3], 0.0);
        let bv = C64::new(b[2 * k + 2], 0.0);
        u_poly = u_poly + p.mapv(|z| z * bu);
        v = v + p.mapv(|z| z * bv);
    }
    (a.dot(&u_poly), v)
}

/// Matrix exponential by scaling-and-squaring with Padé approximants.
///
/// Diagonal matrices exponentiate elementwise. Otherwise the diagonal
/// midpoint is shifted out first to reduce the norm, the Padé order is
/// picked from the 1-norm, and for large norms the argument is scaled by
/// 2^-s and the result squared back up.
pub fn expm(a: &CMat) -> CMat {
    let n = a.dim().0;
    assert_eq!(n, a.dim().1, "expm: square matrix required");
    if is_diagonal(a) {
        let mut out = CMat::zeros((n, n));
        for i in 0..n {
            out[[i, i]] = a[[i, i]].exp();
        }
        return out;
    }
    // shift by the midpoint of the diagonal to halve the diagonal spread
    let diag: Vec<C64> = a.diag().to_vec();
    let (re_min, re_max) = diag
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
            (lo.min(z.re), hi.max(z.re))
        });
    let (im_min, im_max) = diag
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
            (lo.min(z.im), hi.max(z.im))
        });
    let mu = C64::new((re_min + re_max) / 2.0, (im_min + im_max) / 2.0);
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[[i, i]] -= mu;
    }
    let scale = mu.exp();

    let norm = one_norm(&shifted);
    let result = if norm <= THETA9 {
        let a2 = shifted.dot(&shifted);
        let (u, v) = if norm <= THETA3 {
            pade_uv(&shifted, &[a2], &PADE3)
        } else if norm <= THETA5 {
            let a4 = a2.dot(&a2);
            pade_uv(&shifted, &[a2, a4], &PADE5)
        } else if norm <= THETA7 {
            let a4 = a2.dot(&a2);
            let a6 = a2.dot(&a4);
            pade_uv(&shifted, &[a2, a4, a6], &PADE7)
        } else {
            let a4 = a2.dot(&a2);
            let a6 = a2.dot(&a4);
            let a8 = a4.dot(&a4);
            pade_uv(&shifted, &[a2, a4, a6, a8], &PADE9)
        };
        solve(&(&v - &u), &(&v + &u)).expect("expm: Padé denominator singular")
    } else {
        let s = ((norm / THETA13).log2().ceil() as i32).max(0);
        let factor = C64::new(2f64.powi(-s), 0.0);
        let scaled = shifted.mapv(|z| z * factor);
        let a2 = scaled.dot(&scaled);
        let a4 = a2.dot(&a2);
        let a6 = a2.dot(&a4);
        let b = &PADE13;
        let w1 = a6.mapv(|z| z * C64::new(b[13], 0.0))
            + a4.mapv(|z| z * C64::new(b[11], 0.0))
            + a2.mapv(|z| z * C64::new(b[9], 0.0));
        let w2 = a6.mapv(|z| z * C64::new(b[7], 0.0))
            + a4.mapv(|z| z * C64::new(b[5], 0.0))
            + a2.mapv(|z| z * C64::new(b[3], 0.0))
            + eye(n).mapv(|z| z * C64::new(b[1], 0.0));
        let u = scaled.dot(&(a6.dot(&w1) + w2));
        let z1 = a6.mapv(|z| z * C64::new(b[12], 0.0))
            + a4.mapv(|z| z * C64::new(b[10], 0.0))
            + a2.mapv(|z| z * C64::new(b[8], 0.0));
        let v = a6.dot(&z1)
            + a6.mapv(|z| z * C64::new(b[6], 0.0))
            + a4.mapv(|z| z * C64::new(b[4], 0.0))
            + a2.mapv(|z| z * C64::new(b[2], 0.0))
            + eye(n).mapv(|z| z * C64::new(b[0], 0.0));
        let mut r = solve(&(&v - &u), &(&v + &u)).expect("expm: Padé denominator singular");
        for _ in 0..s {
            r = r.dot(&r);
        }
        r
    };
    result.mapv(|z| z * scale)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching unitary of
/// column eigenvectors, so `a = V diag(w) V†`.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = a.dim().0;
    if a.dim().1 != n {
        return Err(Error::invalid_argument("eigh: square matrix required"));
    }
    if !is_hermitian(a, 1e-9 * (1.0 + max_abs(a))) {
        return Err(Error::InvalidOperator("eigh: matrix not Hermitian".into()));
    }
    let mut m = a.clone();
    let mut v = eye(n);
    let scale = max_abs(a).max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[[p, q]].norm());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let beta = apq.norm();
                if beta < tol {
                    continue;
                }
                let phase = apq / beta;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                for i in 0..n {
                    let mip = m[[i, p]];
                    let miq = m[[i, q]];
                    m[[i, p]] = mip * jpp + miq * jqp;
                    m[[i, q]] = mip * jpq + miq * jqq;
                }
                for j in 0..n {
                    let mpj = m[[p, j]];
                    let mqj = m[[q, j]];
                    m[[p, j]] = jpp.conj() * mpj + jqp.conj() * mqj;
                    m[[q, j]] = jpq.conj() * mpj + jqq.conj() * mqj;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = vip * jpp + viq * jqp;
                    v[[i, q]] = vip * jpq + viq * jqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut vs = CMat::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vs[[i, new_col]] = v[[i, old_col]];
        }
    }
    Ok((sorted, vs))
}

/// Haar-ish random unitary for tests and demos: QR-free construction via
/// the exponential of a random Hermitian generator.
pub fn random_unitary(n: usize, seed: u64) -> CMat {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut h = CMat::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if i == j {
                h[[i, j]] = C64::new(z.re, 0.0);
            } else {
                h[[i, j]] = z;
                h[[j, i]] = z.conj();
            }
        }
    }
    expm(&h.mapv(|z| z * I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Direct Taylor-series exponential; only valid for modest norms, used
    /// as an independent oracle for `expm`.
    fn expm_taylor(a: &CMat) -> CMat {
        let n = a.dim().0;
        let mut term = eye(n);
        let mut sum = eye(n);
        for k in 1..60 {
            term = term.dot(a).mapv(|z| z / C64::new(k as f64, 0.0));
            sum = sum + &term;
            if max_abs(&term) < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn expm_matches_taylor_small_norm() {
        for seed in 0..5u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let n = 6;
            let a = CMat::from_shape_fn((n, n), |_| {
                C64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))
            });
            let d = max_abs_diff(&expm(&a), &expm_taylor(&a));
            assert!(d < 1e-12, "seed {seed}: deviation {d}");
        }
    }

    #[test]
    fn expm_matches_squared_taylor_large_norm() {
        // exp(A) = exp(A/2^k)^(2^k) with the Taylor factor well-converged
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 5;
        let a = CMat::from_shape_fn((n, n), |_| {
            C64::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0))
        });
        let k = 8;
        let small = a.mapv(|z| z / C64::new(2f64.powi(k), 0.0));
        let mut oracle = expm_taylor(&small);
        for _ in 0..k {
            oracle = oracle.dot(&oracle);
        }
        let d = max_abs_diff(&expm(&a), &oracle);
        let scale = max_abs(&oracle);
        assert!(d / scale < 1e-10, "relative deviation {}", d / scale);
    }

    #[test]
    fn expm_of_skew_hermitian_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let n = 8;
        let mut h = CMat::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let z = C64::new(
                    rng.random_range(-50.0..50.0),
                    rng.random_range(-50.0..50.0),
                );
                if i == j {
                    h[[i, j]] = C64::new(z.re, 0.0);
                } else {
                    h[[i, j]] = z;
                    h[[j, i]] = z.conj();
                }
            }
        }
        let u = expm(&h.mapv(|z| z * I));
        assert!(is_unitary(&u, 1e-9));
    }

    #[test]
    fn expm_diagonal_fast_path() {
        let mut a = CMat::zeros((3, 3));
        a[[0, 0]] = C64::new(0.0, 1.0);
        a[[1, 1]] = C64::new(-2.0, 0.0);
        a[[2, 2]] = C64::new(0.0, -3000.0);
        let e = expm(&a);
        assert_abs_diff_eq!(e[[0, 0]].re, 1f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[[1, 1]].re, (-2f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[[2, 2]].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_roundtrip() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 7;
        let a = CMat::from_shape_fn((n, n), |_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let x = CMat::from_shape_fn((n, 2), |_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let b = a.dot(&x);
        let xs = solve(&a, &b).unwrap();
        assert!(max_abs_diff(&xs, &x) < 1e-10);
    }

    #[test]
    fn eigh_reconstructs_matrix() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 9;
        let mut h = CMat::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let z = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                if i == j {
                    h[[i, j]] = C64::new(z.re, 0.0);
                } else {
                    h[[i, j]] = z;
                    h[[j, i]] = z.conj();
                }
            }
        }
        let (w, v) = eigh(&h).unwrap();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        assert!(is_unitary(&v, 1e-10));
        let mut lam = CMat::zeros((n, n));
        for i in 0..n {
            lam[[i, i]] = C64::new(w[i], 0.0);
        }
        let rebuilt = v.dot(&lam).dot(&dagger(&v));
        assert!(max_abs_diff(&rebuilt, &h) < 1e-10);
    }

    #[test]
    fn eigh_known_pauli_x() {
        let mut x = CMat::zeros((2, 2));
        x[[0, 1]] = ONE;
        x[[1, 0]] = ONE;
        let (w, _) = eigh(&x).unwrap();
        assert_abs_diff_eq!(w[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let u = random_unitary(4, 19);
        let rotated = u.mapv(|z| z * C64::from_polar(1.0, 1.234));
        assert!(phase_aligned_distance(&u, &rotated) < 1e-12);
    }

    #[test]
    fn kron_dimensions_and_values() {
        let mut a = CMat::zeros((2, 2));
        a[[0, 0]] = ONE;
        a[[1, 1]] = C64::new(2.0, 0.0);
        let b = eye(3);
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (6, 6));
        assert_eq!(k[[5, 5]], C64::new(2.0, 0.0));
        assert_eq!(k[[0, 0]], ONE);
        assert_eq!(k[[0, 3]], ZERO);
    }
}
