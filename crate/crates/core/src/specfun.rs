//! Classical orthogonal polynomials by three-term recurrence.
//!
//! Parameters of the Jacobi and Laguerre families are arbitrary finite reals,
//! including negative values; only pointwise values are needed, so no
//! gamma-function normalization is applied. Hermite polynomials use the
//! physicists' convention, `H_1(z) = 2z`.
//!
//! Every family has a real path and a complex path that share one generic
//! recurrence, so a real argument embedded in the complex plane gives
//! bit-identical results.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Argument of a polynomial evaluation. Always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyArg(Complex64);

impl PolyArg {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(Self(z))
        } else {
            Err(Error::Domain(format!("polynomial argument {z} is not finite")))
        }
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// Scalars the recurrences run over.
trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self> + Div<f64, Output = Self>
{
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

fn check_params(params: &[f64]) -> Result<()> {
    match params.iter().find(|p| !p.is_finite()) {
        Some(p) => Err(Error::Domain(format!("polynomial parameter {p} is not finite"))),
        None => Ok(()),
    }
}

fn check_real(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("polynomial argument {x} is not finite")))
    }
}

/// Generalized binomial coefficient `C(x, k)` for real `x`.
fn binomial(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

fn jacobi_generic<T: Scalar>(n: usize, a: f64, b: f64, z: T) -> T {
    let one = T::from_real(1.0);
    if n == 0 {
        return one;
    }
    let p1 = (z * (a + b + 2.0) + T::from_real(a - b)) / 2.0;
    if n == 1 {
        return p1;
    }
    let mut prev = one;
    let mut cur = p1;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        // Near k + a + b = 0 or 2k + a + b = 2 the division amplifies rounding;
        // at exact zeros the recurrence is undefined. Sum directly instead.
        if (kf + a + b).abs() < 0.5 || (s - 2.0).abs() < 0.5 {
            return jacobi_explicit(n, a, b, z);
        }
        let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c2_lin = (s - 1.0) * s * (s - 2.0);
        let c2_const = (s - 1.0) * (a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let next = ((z * c2_lin + T::from_real(c2_const)) * cur - prev * c3) / c1;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_n^{(a,b)}(z) = sum_j C(n+a, n-j) C(n+b, j) ((z-1)/2)^j ((z+1)/2)^(n-j)`.
fn jacobi_explicit<T: Scalar>(n: usize, a: f64, b: f64, z: T) -> T {
    let one = T::from_real(1.0);
    let minus = (z - one) / 2.0;
    let plus = (z + one) / 2.0;
    let mut acc = T::from_real(0.0);
    for j in 0..=n {
        let mut term = T::from_real(binomial(n as f64 + a, n - j) * binomial(n as f64 + b, j));
        for _ in 0..j {
            term = term * minus;
        }
        for _ in 0..(n - j) {
            term = term * plus;
        }
        acc = acc + term;
    }
    acc
}

fn laguerre_generic<T: Scalar>(n: usize, alpha: f64, z: T) -> T {
    let one = T::from_real(1.0);
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = T::from_real(1.0 + alpha) - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((T::from_real(2.0 * kf + 1.0 + alpha) - z) * cur - prev * (kf + alpha)) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_generic<T: Scalar>(n: usize, z: T) -> T {
    let one = T::from_real(1.0);
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = z * 2.0;
    for k in 1..n {
        let next = z * cur * 2.0 - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// Jacobi polynomial `P_n^{(a,b)}(z)`.
pub fn jacobi_eval(n: usize, a: f64, b: f64, z: PolyArg) -> Result<Complex64> {
    check_params(&[a, b])?;
    Ok(jacobi_generic(n, a, b, z.value()))
}

pub fn jacobi_real(n: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    check_params(&[a, b])?;
    check_real(x)?;
    Ok(jacobi_generic(n, a, b, x))
}

/// Generalized Laguerre polynomial `L_n^{alpha}(z)`.
pub fn laguerre_eval(n: usize, alpha: f64, z: PolyArg) -> Result<Complex64> {
    check_params(&[alpha])?;
    Ok(laguerre_generic(n, alpha, z.value()))
}

pub fn laguerre_real(n: usize, alpha: f64, x: f64) -> Result<f64> {
    check_params(&[alpha])?;
    check_real(x)?;
    Ok(laguerre_generic(n, alpha, x))
}

/// Physicists' Hermite polynomial `H_n(z)`.
pub fn hermite_eval(n: usize, z: PolyArg) -> Result<Complex64> {
    Ok(hermite_generic(n, z.value()))
}

pub fn hermite_real(n: usize, x: f64) -> Result<f64> {
    check_real(x)?;
    Ok(hermite_generic(n, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> PolyArg {
        PolyArg::real(x).unwrap()
    }

    /// `P_n^{(a,b)}(z) = (a+1)_n / n! * 2F1(-n, n+a+b+1; a+1; (1-z)/2)`, summed term by term.
    fn jacobi_hypergeometric(n: usize, a: f64, b: f64, z: f64) -> f64 {
        let w = (1.0 - z) / 2.0;
        let mut prefactor = 1.0;
        for i in 0..n {
            prefactor *= (a + 1.0 + i as f64) / (i + 1) as f64;
        }
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..=n {
            sum += term;
            let kf = k as f64;
            term *= (-(n as f64) + kf) * (n as f64 + a + b + 1.0 + kf) / ((a + 1.0 + kf) * (kf + 1.0)) * w;
        }
        prefactor * sum
    }

    /// Sum of absolute values of the explicit-sum terms.
    fn term_magnitude(n: usize, a: f64, b: f64, z: f64) -> f64 {
        (0..=n)
            .map(|j| {
                (binomial(n as f64 + a, n - j) * binomial(n as f64 + b, j)).abs()
                    * ((z - 1.0) / 2.0).abs().powi(j as i32)
                    * ((z + 1.0) / 2.0).abs().powi((n - j) as i32)
            })
            .sum()
    }

    #[test]
    fn low_degree_values() {
        assert_eq!(jacobi_real(0, 3.98281, 3.049, 0.3).unwrap(), 1.0);
        let (a, b, z) = (3.98281, 3.049, 0.3);
        let p1 = jacobi_real(1, a, b, z).unwrap();
        assert!((p1 - ((a + b + 2.0) * z + (a - b)) / 2.0).abs() < 1e-15);
        assert_eq!(laguerre_real(0, 2.34, 1.7).unwrap(), 1.0);
        assert!((laguerre_real(1, 2.34, 1.7).unwrap() - (1.0 + 2.34 - 1.7)).abs() < 1e-15);
        assert!((laguerre_real(2, 0.0, 1.0).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(hermite_real(0, 0.4).unwrap(), 1.0);
        assert!((hermite_real(1, 0.4).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(hermite_real(3, 1.0).unwrap(), -4.0);
    }

    #[test]
    fn jacobi_matches_hypergeometric_series() {
        let expected = jacobi_hypergeometric(2, 1.0, 1.0, 0.5);
        let got = jacobi_real(2, 1.0, 1.0, 0.5).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-12, "{got} vs {expected}");
        for n in 0..8 {
            for &(a, b, z) in &[(3.98281, 3.049, 0.3), (0.071382, 2.96043, -0.9), (-0.4, 1.7, 0.65)] {
                let want = jacobi_hypergeometric(n, a, b, z);
                let got = jacobi_real(n, a, b, z).unwrap();
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "n={n} a={a} b={b}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn degenerate_recurrence_falls_back_to_explicit_sum() {
        // a + b = -2 makes the k = 2 leading coefficient vanish.
        let (a, b, z) = (-0.5, -1.5, 0.3);
        let got = jacobi_real(2, a, b, z).unwrap();
        let want = jacobi_explicit(2, a, b, z);
        assert_eq!(got, want);
        assert!(got.is_finite());
    }

    #[test]
    fn near_degenerate_parameters_keep_reflection() {
        // k + a + b = -0.0125 at k = 3.
        let (n, a, b, z) = (7, -1.3832782860948956, -1.6291990906888563, -0.9794778753681845);
        let lhs = jacobi_real(n, a, b, -z).unwrap();
        let rhs = -jacobi_real(n, b, a, z).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs(), "{lhs} vs {rhs}");
        let oracle = jacobi_hypergeometric(n, a, b, -z);
        assert!((lhs - oracle).abs() <= 1e-12 * term_magnitude(n, a, b, -z));
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(matches!(jacobi_real(2, f64::NAN, 1.0, 0.1), Err(Error::Domain(_))));
        assert!(matches!(laguerre_real(2, 1.0, f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(hermite_real(2, f64::NAN), Err(Error::Domain(_))));
        assert!(PolyArg::new(Complex64::new(0.0, f64::NAN)).is_err());
    }

    proptest! {
        #[test]
        fn jacobi_reflection(n in 0usize..=10, a in -2.0f64..5.0, b in -2.0f64..5.0, z in -1.0f64..=1.0) {
            let lhs = jacobi_real(n, a, b, -z).unwrap();
            let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi_real(n, b, a, z).unwrap();
            // Near roots cancellation limits relative accuracy; measure against term size.
            let scale = lhs.abs().max(term_magnitude(n, a, b, z));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{} vs {}", lhs, rhs);
        }

        #[test]
        fn jacobi_recurrence_residual(n in 2usize..=10, a in 0.0f64..5.0, b in 0.0f64..5.0, z in -1.0f64..=1.0) {
            let p = |k| jacobi_real(k, a, b, z).unwrap();
            let nf = n as f64;
            let s = 2.0 * nf + a + b;
            let lhs = 2.0 * nf * (nf + a + b) * (s - 2.0) * p(n);
            let mid = (s - 1.0) * (s * (s - 2.0) * z + a * a - b * b) * p(n - 1);
            let last = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s * p(n - 2);
            let scale = lhs.abs().max(mid.abs()).max(last.abs()).max(1e-300);
            prop_assert!((lhs - mid + last).abs() <= 1e-12 * scale);
        }

        #[test]
        fn laguerre_recurrence_residual(n in 1usize..=10, alpha in -0.9f64..5.0, z in 0.0f64..20.0) {
            let l = |k| laguerre_real(k, alpha, z).unwrap();
            let nf = n as f64;
            let lhs = (nf + 1.0) * l(n + 1);
            let mid = (2.0 * nf + 1.0 + alpha - z) * l(n);
            let last = (nf + alpha) * l(n - 1);
            let scale = lhs.abs().max(mid.abs()).max(last.abs()).max(1e-300);
            prop_assert!((lhs - mid + last).abs() <= 1e-12 * scale);
        }

        #[test]
        fn hermite_recurrence_residual(n in 1usize..=10, z in -6.0f64..6.0) {
            let h = |k| hermite_real(k, z).unwrap();
            let lhs = h(n + 1);
            let mid = 2.0 * z * h(n);
            let last = 2.0 * n as f64 * h(n - 1);
            let scale = lhs.abs().max(mid.abs()).max(last.abs()).max(1e-300);
            prop_assert!((lhs - mid + last).abs() <= 1e-12 * scale);
        }

        #[test]
        fn complex_path_matches_real_path(n in 0usize..=10, a in -2.0f64..5.0, b in -2.0f64..5.0, z in -3.0f64..3.0) {
            let jc = jacobi_eval(n, a, b, c(z)).unwrap();
            prop_assert_eq!(jc.re, jacobi_real(n, a, b, z).unwrap());
            prop_assert_eq!(jc.im, 0.0);
            let lc = laguerre_eval(n, a, c(z)).unwrap();
            prop_assert_eq!(lc.re, laguerre_real(n, a, z).unwrap());
            prop_assert_eq!(lc.im, 0.0);
            let hc = hermite_eval(n, c(z)).unwrap();
            prop_assert_eq!(hc.re, hermite_real(n, z).unwrap());
            prop_assert_eq!(hc.im, 0.0);
        }
    }
}
