//! The Jacobi eigensolver against an independent route: characteristic
//! polynomial by Faddeev–LeVerrier, roots by Durand–Kerner.

use num_complex::Complex64;
use twoqubit::linalg::{exp_unitary, hermitian_eigen, Matrix4, Sign};
use twoqubit::sampling::{random_hermitian, seeded};

/// Monic characteristic polynomial coefficients `[c3, c2, c1, c0]` of
/// `λ⁴ + c3 λ³ + c2 λ² + c1 λ + c0`.
fn char_poly(a: &Matrix4) -> [Complex64; 4] {
    let mut coeffs = [Complex64::new(0.0, 0.0); 4];
    let mut m = Matrix4::zeros();
    let mut c_prev = Complex64::new(1.0, 0.0);
    for k in 1..=4 {
        m = *a * m + Matrix4::identity().scale(c_prev);
        let c = -(*a * m).trace() / k as f64;
        coeffs[k - 1] = c;
        c_prev = c;
    }
    coeffs
}

fn roots(c: &[Complex64; 4]) -> [Complex64; 4] {
    let p = |z: Complex64| (((z + c[0]) * z + c[1]) * z + c[2]) * z + c[3];
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [
        seed,
        seed * seed,
        seed * seed * seed,
        seed * seed * seed * seed,
    ];
    for _ in 0..500 {
        let prev = z;
        for i in 0..4 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            z[i] -= p(z[i]) / denom;
        }
        if (0..4).all(|i| (z[i] - prev[i]).norm() < 1e-15) {
            break;
        }
    }
    z
}

#[test]
fn eigenvalues_match_characteristic_roots() {
    let mut rng = seeded(404);
    for _ in 0..500 {
        let h = random_hermitian(&mut rng);
        let mut expected: Vec<f64> = roots(&char_poly(&h)).iter().map(|z| z.re).collect();
        expected.sort_by(f64::total_cmp);
        let got = hermitian_eigen(&h).unwrap().eigenvalues;
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-8, "{got:?} vs {expected:?}");
        }
    }
}

#[test]
fn trace_and_determinant_agree() {
    let mut rng = seeded(405);
    for _ in 0..200 {
        let h = random_hermitian(&mut rng);
        let eig = hermitian_eigen(&h).unwrap().eigenvalues;
        let c = char_poly(&h);
        assert!((eig.iter().sum::<f64>() + c[0].re).abs() < 1e-12);
        assert!((eig.iter().product::<f64>() - c[3].re).abs() < 1e-11);
    }
}

#[test]
fn residual_on_ten_thousand_random_matrices() {
    let mut rng = seeded(406);
    let worst = (0..10_000)
        .map(|_| {
            let h = random_hermitian(&mut rng);
            hermitian_eigen(&h).unwrap().residual(&h)
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-12, "worst residual {worst:e}");
}

#[test]
fn degenerate_spectra() {
    let diag = Matrix4::from_diag([1.0, 1.0, 1.0, -2.0]);
    let eig = hermitian_eigen(&diag).unwrap();
    assert_eq!(eig.eigenvalues, [-2.0, 1.0, 1.0, 1.0]);
    assert!(eig.residual(&diag) < 1e-15);
    let zero = hermitian_eigen(&Matrix4::zeros()).unwrap();
    assert_eq!(zero.eigenvalues, [0.0; 4]);
}

#[test]
fn exponential_is_unitary_and_a_group() {
    let mut rng = seeded(407);
    for _ in 0..200 {
        let h = random_hermitian(&mut rng);
        let u1 = exp_unitary(&h, 0.7, Sign::Minus).unwrap();
        let u2 = exp_unitary(&h, 1.1, Sign::Minus).unwrap();
        let u12 = exp_unitary(&h, 1.8, Sign::Minus).unwrap();
        assert!(u1.is_unitary(1e-12));
        assert!((u1 * u2).max_abs_diff(&u12) < 1e-12);
        let back = exp_unitary(&h, 0.7, Sign::Plus).unwrap();
        assert!((u1 * back).max_abs_diff(&Matrix4::identity()) < 1e-12);
    }
}
