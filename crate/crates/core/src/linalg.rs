//! Dense complex linear algebra for the fixed 2×2 and 4×4 shapes of a
//! two-qubit system.
//!
//! Everything here is stack allocated and `Copy`. The Hermitian eigensolver
//! is a cyclic complex Jacobi iteration, which is more than fast enough at
//! dimension four and converges to working precision without pivoting
//! heuristics.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative off-diagonal Frobenius norm at which Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-14;
/// Sweep budget for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Hermiticity tolerance required by [`hermitian_eigen`] and [`exp_unitary`].
pub const HERMITIAN_TOL: f64 = 1e-12;

macro_rules! square_matrix {
    ($name:ident, $n:expr) => {
        #[derive(Clone, Copy, PartialEq)]
        pub struct $name(pub [[C64; $n]; $n]);

        impl $name {
            pub const DIM: usize = $n;

            pub fn zeros() -> Self {
                Self([[ZERO; $n]; $n])
            }

            pub fn identity() -> Self {
                let mut m = Self::zeros();
                for k in 0..$n {
                    m.0[k][k] = ONE;
                }
                m
            }

            pub fn from_diag(diag: [f64; $n]) -> Self {
                let mut m = Self::zeros();
                for k in 0..$n {
                    m.0[k][k] = C64::new(diag[k], 0.0);
                }
                m
            }

            pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
                let mut m = Self::zeros();
                for i in 0..$n {
                    for j in 0..$n {
                        m.0[i][j] = f(i, j);
                    }
                }
                m
            }

            /// Conjugate transpose.
            pub fn adjoint(&self) -> Self {
                Self::from_fn(|i, j| self.0[j][i].conj())
            }

            pub fn transpose(&self) -> Self {
                Self::from_fn(|i, j| self.0[j][i])
            }

            pub fn trace(&self) -> C64 {
                (0..$n).map(|k| self.0[k][k]).sum()
            }

            pub fn scale(&self, s: C64) -> Self {
                Self::from_fn(|i, j| self.0[i][j] * s)
            }

            pub fn scale_real(&self, s: f64) -> Self {
                Self::from_fn(|i, j| self.0[i][j] * s)
            }

            /// Largest entrywise modulus of `self - other`.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                let mut worst = 0.0_f64;
                for i in 0..$n {
                    for j in 0..$n {
                        worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
                    }
                }
                worst
            }

            pub fn max_abs(&self) -> f64 {
                self.max_abs_diff(&Self::zeros())
            }

            pub fn frobenius_norm(&self) -> f64 {
                self.0
                    .iter()
                    .flat_map(|row| row.iter())
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            }

            pub fn is_finite(&self) -> bool {
                self.0
                    .iter()
                    .flat_map(|row| row.iter())
                    .all(|z| z.re.is_finite() && z.im.is_finite())
            }

            /// Entrywise deviation from Hermiticity, `max |M - M†|`.
            pub fn hermiticity_defect(&self) -> f64 {
                self.max_abs_diff(&self.adjoint())
            }

            pub fn is_hermitian(&self, tol: f64) -> bool {
                self.hermiticity_defect() <= tol
            }

            pub fn is_unitary(&self, tol: f64) -> bool {
                (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
            }

            /// `(M + M†) / 2`.
            pub fn hermitian_part(&self) -> Self {
                Self::from_fn(|i, j| (self.0[i][j] + self.0[j][i].conj()) * 0.5)
            }

            /// Commutator `[self, other]`.
            pub fn commutator(&self, other: &Self) -> Self {
                *self * *other - *other * *self
            }
        }

        impl Index<(usize, usize)> for $name {
            type Output = C64;
            fn index(&self, (i, j): (usize, usize)) -> &C64 {
                &self.0[i][j]
            }
        }

        impl IndexMut<(usize, usize)> for $name {
            fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
                &mut self.0[i][j]
            }
        }

        impl Mul for $name {
            type Output = Self;
            fn mul(self, rhs: Self) -> Self {
                let mut out = Self::zeros();
                for i in 0..$n {
                    for k in 0..$n {
                        let a = self.0[i][k];
                        if a == ZERO {
                            continue;
                        }
                        for j in 0..$n {
                            out.0[i][j] += a * rhs.0[k][j];
                        }
                    }
                }
                out
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self::from_fn(|i, j| -self.0[i][j])
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, rhs: f64) -> Self {
                self.scale_real(rhs)
            }
        }

        impl Mul<C64> for $name {
            type Output = Self;
            fn mul(self, rhs: C64) -> Self {
                self.scale(rhs)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                writeln!(f, "{}[", stringify!($name))?;
                for row in &self.0 {
                    write!(f, "  ")?;
                    for z in row {
                        write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
                    }
                    writeln!(f)?;
                }
                write!(f, "]")
            }
        }
    };
}

square_matrix!(Matrix2, 2);
square_matrix!(Matrix4, 4);

impl Matrix4 {
    /// Matrix-vector product with a column vector.
    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|k| self.0[i][k] * v[k]).sum();
        }
        out
    }

    pub fn column(&self, k: usize) -> [C64; 4] {
        [self.0[0][k], self.0[1][k], self.0[2][k], self.0[3][k]]
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[C64; 4], b: &[C64; 4]) -> Self {
        Self::from_fn(|i, j| a[i] * b[j].conj())
    }
}

/// Kronecker product, `(a ⊗ b)[2i+k][2j+l] = a[i][j]·b[k][l]`.
pub fn kron(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    Matrix4::from_fn(|r, c| a.0[r / 2][c / 2] * b.0[r % 2][c % 2])
}

/// Spectral decomposition of a Hermitian 4×4 matrix.
#[derive(Debug, Clone, Copy)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: [f64; 4],
    /// Column `k` is the normalized eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Matrix4,
}

impl EigenDecomposition {
    /// `V f(Λ) V†` for a scalar function applied to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> Matrix4 {
        let v = &self.eigenvectors;
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        Matrix4::from_fn(|i, j| {
            (0..4)
                .map(|k| v.0[i][k] * phases[k] * v.0[j][k].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> Matrix4 {
        self.map_spectrum(|l| C64::new(l, 0.0))
    }

    /// `max_k ‖M v_k − λ_k v_k‖₂`.
    pub fn residual(&self, m: &Matrix4) -> f64 {
        (0..4)
            .map(|k| {
                let v = self.eigenvectors.column(k);
                let mv = m.apply(&v);
                mv.iter()
                    .zip(v.iter())
                    .map(|(a, b)| (a - b * self.eigenvalues[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

fn off_diagonal_norm(a: &Matrix4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending; equal eigenvalues keep the column order
/// the iteration produced them in.
pub fn hermitian_eigen(m: &Matrix4) -> Result<EigenDecomposition> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }

    let mut a = m.hermitian_part();
    let mut v = Matrix4::identity();
    let threshold = JACOBI_TOL * a.frobenius_norm();

    let mut converged = off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= threshold;
    }

    let mut order = [0usize, 1, 2, 3];
    // stable: ties keep their column order
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));

    let eigenvalues = order.map(|k| a.0[k][k].re);
    let eigenvectors = Matrix4::from_fn(|i, j| v.0[i][order[j]]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Annihilates `a[p][q]` with a unitary plane rotation `J`, replacing
/// `a ← J† a J` and `v ← v J`.
fn rotate(a: &mut Matrix4, v: &mut Matrix4, p: usize, q: usize) {
    let apq = a.0[p][q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;

    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = identity except J[p][p] = J[q][q] = c, J[p][q] = s·e^{iφ}, J[q][p] = −s·e^{−iφ}
    let jpq = phase * s;
    let jqp = -phase.conj() * s;

    // a ← a J (columns p, q)
    for k in 0..4 {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * c + akq * jqp;
        a.0[k][q] = akp * jpq + akq * c;
    }
    // a ← J† a (rows p, q)
    for k in 0..4 {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = apk * c + aqk * jqp.conj();
        a.0[q][k] = apk * jpq.conj() + aqk * c;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p].im = 0.0;
    a.0[q][q].im = 0.0;

    for k in 0..4 {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * c + vkq * jqp;
        v.0[k][q] = vkp * jpq + vkq * c;
    }
}

/// Sign of the exponent in [`exp_unitary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Precomputed spectral form of a Hermitian generator, for evaluating
/// `exp(±i·h·t)` at many times without re-diagonalizing.
#[derive(Debug, Clone, Copy)]
pub struct Propagator {
    eigen: EigenDecomposition,
}

impl Propagator {
    pub fn new(h: &Matrix4) -> Result<Self> {
        Ok(Self {
            eigen: hermitian_eigen(h)?,
        })
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    /// `exp(sign·i·h·t)`.
    pub fn at(&self, t: f64, sign: Sign) -> Matrix4 {
        if t == 0.0 {
            return Matrix4::identity();
        }
        let s = sign.value();
        self.eigen.map_spectrum(|l| C64::from_polar(1.0, s * l * t))
    }

    /// Largest eigenvalue magnitude of the generator.
    pub fn spectral_radius(&self) -> f64 {
        self.eigen
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, l| acc.max(l.abs()))
    }
}

/// `exp(sign·i·h·t)` through the spectral decomposition of `h`.
pub fn exp_unitary(h: &Matrix4, t: f64, sign: Sign) -> Result<Matrix4> {
    Ok(Propagator::new(h)?.at(t, sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(k: usize) -> Matrix2 {
        match k {
            0 => Matrix2::identity(),
            1 => Matrix2([[ZERO, ONE], [ONE, ZERO]]),
            2 => Matrix2([[ZERO, -I], [I, ZERO]]),
            _ => Matrix2::from_diag([1.0, -1.0]),
        }
    }

    #[test]
    fn kron_identity_and_z() {
        assert_eq!(kron(&sigma(0), &sigma(0)), Matrix4::identity());
        assert_eq!(
            kron(&sigma(3), &sigma(0)),
            Matrix4::from_diag([1.0, 1.0, -1.0, -1.0])
        );
    }

    #[test]
    fn kron_x_y_entries() {
        // σ1 ⊗ σ2 expanded by hand
        let mut expected = Matrix4::zeros();
        expected[(0, 3)] = -I;
        expected[(1, 2)] = I;
        expected[(2, 1)] = -I;
        expected[(3, 0)] = I;
        assert_eq!(kron(&sigma(1), &sigma(2)), expected);
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = Matrix4::from_diag([3.0, 1.0, 2.0, 0.0]);
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.eigenvalues, [0.0, 1.0, 2.0, 3.0]);
        let perm = [3, 1, 2, 0];
        for (col, &row) in perm.iter().enumerate() {
            assert!((e.eigenvectors[(row, col)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eigen_of_sigma_x_doubled() {
        let e = hermitian_eigen(&kron(&sigma(1), &sigma(0))).unwrap();
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (l, x) in e.eigenvalues.iter().zip(expected) {
            assert!((l - x).abs() < 1e-14);
        }
        assert!(e.eigenvectors.is_unitary(1e-12));
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = Matrix4::zeros();
        m[(0, 1)] = ONE;
        assert!(matches!(
            hermitian_eigen(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigen_of_zero_matrix() {
        let e = hermitian_eigen(&Matrix4::zeros()).unwrap();
        assert_eq!(e.eigenvalues, [0.0; 4]);
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let h = kron(&sigma(1), &sigma(2)) + kron(&sigma(3), &sigma(3));
        let u = exp_unitary(&h, 0.0, Sign::Minus).unwrap();
        assert!(u.max_abs_diff(&Matrix4::identity()) <= 1e-14);
    }

    #[test]
    fn exp_of_diagonal_phases() {
        let h = Matrix4::from_diag([1.0, 0.0, 0.0, -1.0]);
        let u = exp_unitary(&h, std::f64::consts::PI, Sign::Minus).unwrap();
        let expected = Matrix4::from_diag([-1.0, 1.0, 1.0, -1.0]);
        assert!(u.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn exp_of_involution() {
        // (σ1⊗σ1)² = I so exp(−i t X) = cos t·I − i sin t·X
        let x = kron(&sigma(1), &sigma(1));
        for &t in &[0.3, 1.0, 2.7, -4.1] {
            let u = exp_unitary(&x, t, Sign::Minus).unwrap();
            let expected = Matrix4::identity() * t.cos() + x * C64::new(0.0, -t.sin());
            assert!(u.max_abs_diff(&expected) < 1e-13, "t = {t}");
        }
    }
}
