//! Real-argument gamma / reciprocal gamma and the complex two-parameter
//! Mittag-Leffler family, the building blocks behind every closed-form
//! fractional rule in this crate.
//!
//! All functions here are pure and operate on value types, so they are safe
//! to call concurrently from any number of threads.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

/// Adaptive truncation threshold for the Mittag-Leffler series.
pub const ML_EPSILON: f64 = 1e-15;

/// Hard cap on the number of Mittag-Leffler series terms.
pub const ML_MAX_TERMS: usize = 2000;

/// Absolute distance to a nonpositive integer below which gamma is treated
/// as sitting on a pole.
pub const GAMMA_POLE_TOLERANCE: f64 = 1e-12;

/// Errors from special-function evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecialFunctionError {
    /// Gamma evaluated at (or within tolerance of) a nonpositive integer.
    Pole { x: f64 },
    /// The Mittag-Leffler series hit the term cap before the stopping rule
    /// fired; the argument is outside the supported convergence budget.
    ConvergenceBudgetExceeded { terms: usize },
    /// Input outside the function's domain.
    Domain(String),
}

impl fmt::Display for SpecialFunctionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pole { x } => write!(f, "gamma pole at x = {x}"),
            Self::ConvergenceBudgetExceeded { terms } => {
                write!(
                    f,
                    "Mittag-Leffler series did not settle within {terms} terms"
                )
            }
            Self::Domain(msg) => write!(f, "domain error: {msg}"),
        }
    }
}

impl std::error::Error for SpecialFunctionError {}

/// A complex scalar. Used for wave amplitudes, term coefficients and
/// Mittag-Leffler values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };
    pub const ONE: Self = Self { re: 1.0, im: 0.0 };
    /// The imaginary unit.
    pub const I: Self = Self { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    /// Complex conjugate. `|conj(z)| = |z|` holds exactly.
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// Modulus `sqrt(re^2 + im^2)`.
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    /// Complex exponential `e^self`.
    pub fn exp(self) -> Self {
        let r = self.re.exp();
        Self::new(r * self.im.cos(), r * self.im.sin())
    }

    /// Integer power by repeated multiplication (exponents here are small).
    pub fn powu(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for ComplexValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ComplexValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Neg for ComplexValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

/// Validated arguments for [`mittag_leffler`]: `E_{xi,zeta}(z)`.
///
/// The first parameter must be strictly positive; the second is restricted
/// to real values (every call generated by the solver recursion has real
/// second parameter).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLArgs {
    xi: f64,
    zeta: f64,
    z: ComplexValue,
}

impl MLArgs {
    pub fn new(xi: f64, zeta: f64, z: ComplexValue) -> Result<Self, SpecialFunctionError> {
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(SpecialFunctionError::Domain("xi must be positive".into()));
        }
        if !zeta.is_finite() || !z.is_finite() {
            return Err(SpecialFunctionError::Domain(
                "zeta and z must be finite".into(),
            ));
        }
        Ok(Self { xi, zeta, z })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn z(&self) -> ComplexValue {
        self.z
    }
}

// Lanczos approximation constants (g = 7, n = 9).
// Coefficients from Paul Godfrey / Boost / CPython.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)] // coefficients kept verbatim
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut sum = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS[1..].iter().enumerate() {
        sum += c / (z + (i + 1) as f64);
    }
    sum
}

/// Gamma for x >= 0.5. Switches to log form for large arguments to avoid
/// overflow in the intermediate power.
fn gamma_positive(x: f64) -> f64 {
    let z = x - 1.0;
    let a = lanczos_sum(z);
    let t = z + LANCZOS_G + 0.5;
    if x > 100.0 {
        let ln = 0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln();
        ln.exp()
    } else {
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
    }
}

fn nearest_nonpositive_integer(x: f64) -> Option<f64> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() <= GAMMA_POLE_TOLERANCE {
        Some(r)
    } else {
        None
    }
}

/// Euler gamma via the Lanczos approximation, with the reflection formula
/// for x < 0.5.
///
/// Relative error is below 1e-12 on [0.5, 30].
///
/// # Example
///
/// ```
/// use fracnlse::special_functions::gamma;
///
/// assert!((gamma(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-14);
/// ```
pub fn gamma(x: f64) -> Result<f64, SpecialFunctionError> {
    if !x.is_finite() {
        return Err(SpecialFunctionError::Domain(
            "gamma argument must be finite".into(),
        ));
    }
    if let Some(p) = nearest_nonpositive_integer(x) {
        return Err(SpecialFunctionError::Pole { x: p });
    }
    if x >= 0.5 {
        Ok(gamma_positive(x))
    } else {
        // Reflection: gamma(x) = pi / (sin(pi x) * gamma(1 - x))
        Ok(std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_positive(1.0 - x)))
    }
}

/// Reciprocal gamma 1/gamma(x), which is entire: it returns exactly 0 at
/// nonpositive integers instead of failing.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if nearest_nonpositive_integer(x).is_some() {
        return 0.0;
    }
    if x >= 0.5 {
        1.0 / gamma_positive(x)
    } else {
        (std::f64::consts::PI * x).sin() * gamma_positive(1.0 - x) / std::f64::consts::PI
    }
}

/// The two-parameter Mittag-Leffler function
/// `E_{xi,zeta}(z) = sum_m z^m / gamma(xi m + zeta)` by direct Taylor
/// summation.
///
/// Truncation is adaptive: summation stops once the last two term
/// magnitudes both fall below `ML_EPSILON * (1 + |sum|)`. The two-term
/// window matters because the head of the series need not be monotone when
/// `zeta <= 0`. If the cap of `ML_MAX_TERMS` terms is reached first the
/// argument is outside the supported convergence budget and an error is
/// returned.
pub fn mittag_leffler(args: MLArgs) -> Result<ComplexValue, SpecialFunctionError> {
    let xi = args.xi();
    let zeta = args.zeta();
    let z = args.z();

    let mut sum = ComplexValue::ZERO;
    let mut z_pow = ComplexValue::ONE;
    let mut prev_small = false;
    for m in 0..ML_MAX_TERMS {
        let term = z_pow.scale(reciprocal_gamma(xi * m as f64 + zeta));
        if !term.is_finite() {
            return Err(SpecialFunctionError::ConvergenceBudgetExceeded { terms: m });
        }
        sum = sum + term;
        let small = term.abs() < ML_EPSILON * (1.0 + sum.abs());
        if small && prev_small {
            return Ok(sum);
        }
        prev_small = small;
        z_pow = z_pow * z;
    }
    Err(SpecialFunctionError::ConvergenceBudgetExceeded {
        terms: ML_MAX_TERMS,
    })
}

/// The two-index helper `E(t,h,c) = t^h E_{1,h+1}(c t)`.
///
/// For `t = 0` the value is the limit: 0 when `h > 0`, `1/gamma(1)` when
/// `h = 0`, and a domain error when `h < 0` (the power factor is singular).
pub fn ml_e(t: f64, h: f64, c: ComplexValue) -> Result<ComplexValue, SpecialFunctionError> {
    if t < 0.0 {
        return Err(SpecialFunctionError::Domain("ml_e requires t >= 0".into()));
    }
    if t == 0.0 && h < 0.0 {
        return Err(SpecialFunctionError::Domain(
            "ml_e is singular at t = 0 for h < 0".into(),
        ));
    }
    let series = mittag_leffler(MLArgs::new(1.0, h + 1.0, c.scale(t))?)?;
    let value = series.scale(t.powf(h));
    if !value.is_finite() {
        return Err(SpecialFunctionError::Domain(format!(
            "ml_e({t}, {h}, {}+{}i) is not finite",
            c.re, c.im
        )));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Gamma on half-integer grid by exact recurrence from gamma(0.5).
    fn gamma_half_integer_oracle(n: u32) -> f64 {
        let mut g = std::f64::consts::PI.sqrt();
        let mut x = 0.5;
        for _ in 0..n {
            g *= x;
            x += 1.0;
        }
        g
    }

    /// Gamma at positive integers via exact u128 factorials.
    fn gamma_integer_oracle(n: u32) -> f64 {
        let mut f: u128 = 1;
        for k in 2..n as u128 {
            f *= k;
        }
        f as f64
    }

    #[test]
    fn gamma_trivial_values() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(0.5).unwrap() - 1.7724538509055159).abs() < 1e-12);
    }

    #[test]
    fn gamma_matches_recurrence_oracle() {
        // gamma(4.5) = 3.5 * 2.5 * 1.5 * gamma(1.5), built up from gamma(0.5)
        let expected = gamma_half_integer_oracle(4);
        assert!((expected - 11.63172839656745).abs() < 1e-12 * expected);
        let got = gamma(4.5).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected);

        for n in 1..=29 {
            let expected = gamma_integer_oracle(n);
            let got = gamma(n as f64).unwrap();
            assert!(
                (got - expected).abs() <= 1e-12 * expected,
                "gamma({n}) = {got}, oracle {expected}"
            );
            let expected_half = gamma_half_integer_oracle(n);
            let got_half = gamma(n as f64 + 0.5).unwrap();
            assert!(
                (got_half - expected_half).abs() <= 1e-12 * expected_half,
                "gamma({n}.5) = {got_half}, oracle {expected_half}"
            );
        }
    }

    #[test]
    fn gamma_pole_detection() {
        assert!(matches!(gamma(0.0), Err(SpecialFunctionError::Pole { .. })));
        assert!(matches!(
            gamma(-3.0),
            Err(SpecialFunctionError::Pole { .. })
        ));
        assert!(matches!(
            gamma(-2.0 + 1e-13),
            Err(SpecialFunctionError::Pole { .. })
        ));
        // just outside the tolerance is fine
        assert!(gamma(-2.0 + 1e-9).is_ok());
    }

    #[test]
    fn gamma_reflection_negative_arguments() {
        // gamma(-2.5) = pi / (sin(-2.5 pi) * gamma(3.5))
        let got = gamma(-2.5).unwrap();
        assert!((got - (-0.9453087204829419)).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_gamma_poles_and_values() {
        assert_eq!(reciprocal_gamma(0.0), 0.0);
        assert_eq!(reciprocal_gamma(-3.0), 0.0);
        assert!((reciprocal_gamma(2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_gamma_times_gamma_is_one() {
        let mut x = 0.1;
        while x <= 30.0 {
            let g = gamma(x).unwrap();
            let r = reciprocal_gamma(x);
            assert!((g * r - 1.0).abs() <= 1e-12, "x = {x}: {}", g * r);
            x += 0.173;
        }
    }

    #[test]
    fn mittag_leffler_exponential_cases() {
        // E_{1,1}(0) = 1
        let one = mittag_leffler(MLArgs::new(1.0, 1.0, ComplexValue::ZERO).unwrap()).unwrap();
        assert!((one - ComplexValue::ONE).abs() < 1e-14);

        // E_{1,1}(i) = e^i = cos 1 + i sin 1
        let ei = mittag_leffler(MLArgs::new(1.0, 1.0, ComplexValue::I).unwrap()).unwrap();
        assert!((ei.re - 0.5403023058681398).abs() < 1e-13);
        assert!((ei.im - 0.8414709848078965).abs() < 1e-13);
    }

    /// Brute-force partial sum with a fixed large term count, independent of
    /// the adaptive stopping rule.
    fn ml_brute_force(xi: f64, zeta: f64, z: ComplexValue, terms: usize) -> ComplexValue {
        let mut sum = ComplexValue::ZERO;
        let mut z_pow = ComplexValue::ONE;
        for m in 0..terms {
            sum = sum + z_pow.scale(reciprocal_gamma(xi * m as f64 + zeta));
            z_pow = z_pow * z;
        }
        sum
    }

    #[test]
    fn mittag_leffler_zeta_zero_identity() {
        // E_{1,0}(z) = z e^z; checked against brute-force summation
        let got = mittag_leffler(MLArgs::new(1.0, 0.0, ComplexValue::I).unwrap()).unwrap();
        let brute = ml_brute_force(1.0, 0.0, ComplexValue::I, 120);
        assert!((got - brute).abs() < 1e-15);
        // i * e^i = -sin 1 + i cos 1
        assert!((got.re - (-0.8414709848078965)).abs() < 1e-13);
        assert!((got.im - 0.5403023058681398).abs() < 1e-13);
    }

    #[test]
    fn mittag_leffler_budget_error() {
        let args = MLArgs::new(0.3, 1.0, ComplexValue::real(50.0)).unwrap();
        assert!(matches!(
            mittag_leffler(args),
            Err(SpecialFunctionError::ConvergenceBudgetExceeded { .. })
        ));
    }

    #[test]
    fn ml_args_rejects_nonpositive_xi() {
        assert!(MLArgs::new(0.0, 1.0, ComplexValue::ZERO).is_err());
        assert!(MLArgs::new(-1.0, 1.0, ComplexValue::ZERO).is_err());
    }

    #[test]
    fn ml_e_values() {
        // E(t,0,c) = e^{c t}
        let v = ml_e(0.7, 0.0, ComplexValue::I).unwrap();
        assert!((v.re - 0.7f64.cos()).abs() < 1e-13);
        assert!((v.im - 0.7f64.sin()).abs() < 1e-13);

        // E(t,-1,c) = c e^{c t}, from E_{1,0}(z) = z e^z; series oracle
        let v = ml_e(0.5, -1.0, ComplexValue::I).unwrap();
        let brute = ml_brute_force(1.0, 0.0, ComplexValue::I.scale(0.5), 120).scale(1.0 / 0.5);
        assert!((v - brute).abs() < 1e-13);
        assert!((v.re - (-0.5f64.sin())).abs() < 1e-13);
        assert!((v.im - 0.5f64.cos()).abs() < 1e-13);

        // t^h factor kills the value at t = 0 for h > 0
        let v = ml_e(0.0, 2.0, ComplexValue::I).unwrap();
        assert_eq!(v, ComplexValue::ZERO);

        // h = 0 at t = 0 is 1/gamma(1)
        let v = ml_e(0.0, 0.0, ComplexValue::I).unwrap();
        assert!((v - ComplexValue::ONE).abs() < 1e-14);

        assert!(matches!(
            ml_e(0.0, -1.0, ComplexValue::I),
            Err(SpecialFunctionError::Domain(_))
        ));
    }

    #[test]
    fn conjugation_preserves_modulus() {
        let z = ComplexValue::new(-1.75, 0.6);
        assert_eq!(z.conj().abs(), z.abs());
    }

    #[test]
    fn conjugation_symmetry() {
        // the series has real coefficients, so conjugation commutes exactly
        let z = ComplexValue::new(0.8, -1.3);
        let a = mittag_leffler(MLArgs::new(0.7, -0.4, z).unwrap()).unwrap();
        let b = mittag_leffler(MLArgs::new(0.7, -0.4, z.conj()).unwrap()).unwrap();
        assert!((a.conj() - b).abs() <= 1e-14 * (1.0 + a.abs()));
    }
}
