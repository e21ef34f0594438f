//! Closed-form Caputo, Riemann-Liouville-integral and conformable rules on
//! elementary functions, each paired with an independent numeric oracle.
//!
//! The quadrature and limit routines exist to cross-validate the symbolic
//! rules in [`crate::term_algebra`]; they are deliberately dependency-free
//! (composite Simpson after singularity-removing substitutions) and tuned
//! for desk-scale tolerances rather than high precision.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::special_functions::{gamma, reciprocal_gamma, ComplexValue, SpecialFunctionError};

/// Derivative sense selector shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Caputo,
    Conformable,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Caputo => write!(f, "caputo"),
            Self::Conformable => write!(f, "conformable"),
        }
    }
}

/// A fractional order tagged with its sense.
///
/// First-order operators require the value in (0, 1]; composed orders
/// (2 gamma, 2 delta) may reach 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    value: f64,
    sense: Sense,
}

impl FractionalOrder {
    /// A first-order operator order, value in (0, 1].
    pub fn first(value: f64, sense: Sense) -> Result<Self, OperatorError> {
        if !(value > 0.0 && value <= 1.0) {
            return Err(OperatorError::Domain(format!(
                "first-order fractional order must lie in (0, 1], got {value}"
            )));
        }
        Ok(Self { value, sense })
    }

    /// A composed operator order, value in (0, 2].
    pub fn composed(value: f64, sense: Sense) -> Result<Self, OperatorError> {
        if !(value > 0.0 && value <= 2.0) {
            return Err(OperatorError::Domain(format!(
                "composed fractional order must lie in (0, 2], got {value}"
            )));
        }
        Ok(Self { value, sense })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }
}

/// Errors from the operator rules and oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorError {
    Domain(String),
    Quadrature(String),
    Pole { x: f64 },
}

impl fmt::Display for OperatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Domain(msg) => write!(f, "domain error: {msg}"),
            Self::Quadrature(msg) => write!(f, "quadrature error: {msg}"),
            Self::Pole { x } => write!(f, "gamma pole at x = {x}"),
        }
    }
}

impl std::error::Error for OperatorError {}

impl From<SpecialFunctionError> for OperatorError {
    fn from(e: SpecialFunctionError) -> Self {
        match e {
            SpecialFunctionError::Pole { x } => Self::Pole { x },
            other => Self::Domain(other.to_string()),
        }
    }
}

/// An evaluable mapping from t > 0 to a complex value, with a declared
/// smoothness flag. The closure must be callable from multiple threads
/// simultaneously; by contract it performs no internal mutation.
#[derive(Clone)]
pub struct ScalarFunction {
    f: Arc<dyn Fn(f64) -> ComplexValue + Send + Sync>,
    continuously_differentiable: bool,
}

impl ScalarFunction {
    pub fn new(
        f: impl Fn(f64) -> ComplexValue + Send + Sync + 'static,
        continuously_differentiable: bool,
    ) -> Self {
        Self {
            f: Arc::new(f),
            continuously_differentiable,
        }
    }

    /// Convenience wrapper for real-valued test functions.
    pub fn from_real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(move |t| ComplexValue::real(f(t)), true)
    }

    pub fn eval(&self, t: f64) -> ComplexValue {
        (self.f)(t)
    }

    pub fn continuously_differentiable(&self) -> bool {
        self.continuously_differentiable
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field(
                "continuously_differentiable",
                &self.continuously_differentiable,
            )
            .finish_non_exhaustive()
    }
}

/// A closed-form power rule: maps `x^p` to `coefficient * x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRule {
    pub coefficient: f64,
    pub exponent: f64,
}

/// Composite Simpson over [a, b] with `panels` parabolic panels.
fn simpson(f: impl Fn(f64) -> ComplexValue, a: f64, b: f64, panels: usize) -> ComplexValue {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + f(a + j as f64 * h).scale(w);
    }
    acc.scale(h / 3.0)
}

/// Central-difference derivative estimate with the fixed step used
/// throughout the Caputo oracle; falls back to a forward difference when
/// the left sample would leave the domain.
fn derivative_estimate(h: &ScalarFunction, mu: f64, step: f64) -> ComplexValue {
    if mu > step {
        (h.eval(mu + step) - h.eval(mu - step)).scale(0.5 / step)
    } else {
        (h.eval(mu + step) - h.eval(mu.max(1e-300))).scale(1.0 / step)
    }
}

/// Numeric Caputo fractional derivative of order `order` in (0, 1]:
/// `(1/gamma(1-order)) * integral_0^t (t-mu)^(-order) h'(mu) dmu`.
///
/// The kernel singularity at `mu = t` is removed by the substitution
/// `u = (t - mu)^(1-order)` before composite Simpson quadrature; `h'` is a
/// central difference with step `1e-6 * max(1, t)`. The lower half of the
/// range is integrated by parts first so that test functions whose
/// derivative blows up at 0 (e.g. `t^0.5`) stay within desk-scale accuracy;
/// the remaining integrand is smoothed with `mu = v^2`.
pub fn caputo_quadrature(
    h: &ScalarFunction,
    order: f64,
    t: f64,
    panels: usize,
) -> Result<ComplexValue, OperatorError> {
    if !(t > 0.0) {
        return Err(OperatorError::Domain(format!(
            "caputo_quadrature requires t > 0, got {t}"
        )));
    }
    if panels < 8 {
        return Err(OperatorError::Quadrature(format!(
            "caputo_quadrature requires panels >= 8, got {panels}"
        )));
    }
    if !(order > 0.0 && order <= 1.0) {
        return Err(OperatorError::Domain(format!(
            "caputo_quadrature requires order in (0, 1], got {order}"
        )));
    }

    let step = 1e-6 * t.max(1.0);
    if (1.0 - order).abs() <= 1e-12 {
        // order 1 reduces to the classical first derivative
        return Ok(derivative_estimate(h, t, step));
    }

    let one_minus = 1.0 - order;
    let half = 0.5 * t;

    // Right piece, mu in [t/2, t]: u = (t - mu)^(1-order) removes the kernel
    // singularity; the integrand becomes h'(t - u^(1/(1-order))) / (1-order).
    let u_max = half.powf(one_minus);
    let right = simpson(
        |u| {
            let mu = (t - u.powf(1.0 / one_minus)).clamp(half, t);
            derivative_estimate(h, mu, step)
        },
        0.0,
        u_max,
        panels,
    )
    .scale(1.0 / one_minus);

    // Left piece, mu in [0, t/2]: integrate by parts to eliminate h', then
    // substitute mu = v^2 so power-law test functions stay smooth at 0.
    let h0 = h.eval((step * step).min(half));
    let boundary = h.eval(half).scale(half.powf(-order)) - h0.scale(t.powf(-order));
    let v_max = half.sqrt();
    let left_integral = simpson(
        |v| {
            let mu = v * v;
            h.eval(mu.max(1e-300))
                .scale(2.0 * v * (t - mu).powf(-order - 1.0))
        },
        0.0,
        v_max,
        2 * panels,
    );
    let left = boundary - left_integral.scale(order);

    Ok((right + left).scale(reciprocal_gamma(one_minus)))
}

/// Closed-form Caputo power rule:
/// `D^order x^p = gamma(p+1)/gamma(p+1-order) * x^(p-order)` for p > 0.
///
/// Constants (p = 0) are handled by the caller with the zero rule.
pub fn caputo_power(p: f64, order: f64) -> Result<PowerRule, OperatorError> {
    if !(p > 0.0) {
        return Err(OperatorError::Domain(format!(
            "caputo_power requires p > 0, got {p}"
        )));
    }
    if !(order > 0.0 && order <= 1.0) {
        return Err(OperatorError::Domain(format!(
            "caputo_power requires order in (0, 1], got {order}"
        )));
    }
    // p + 1 - order >= p > 0, so the denominator cannot sit on a pole;
    // guarded regardless.
    let numerator = gamma(p + 1.0)?;
    let denominator = gamma(p + 1.0 - order)?;
    Ok(PowerRule {
        coefficient: numerator / denominator,
        exponent: p - order,
    })
}

/// Riemann-Liouville fractional integral on powers:
/// `I^order x^p = gamma(p+1)/gamma(p+1+order) * x^(p+order)`.
pub fn rl_integral_power(p: f64, order: f64) -> Result<PowerRule, OperatorError> {
    if !(p >= 0.0) {
        return Err(OperatorError::Domain(format!(
            "rl_integral_power requires p >= 0, got {p}"
        )));
    }
    if !(order > 0.0) {
        return Err(OperatorError::Domain(format!(
            "rl_integral_power requires order > 0, got {order}"
        )));
    }
    let numerator = gamma(p + 1.0)?;
    Ok(PowerRule {
        coefficient: numerator * reciprocal_gamma(p + 1.0 + order),
        exponent: p + order,
    })
}

/// Limit-based conformable derivative oracle: symmetric difference quotient
/// `(h(t + eps t^(1-order)) - h(t - eps t^(1-order))) / (2 eps)` with one
/// Richardson extrapolation step (eps, eps/2).
pub fn conformable_deriv_limit(
    h: &ScalarFunction,
    order: f64,
    t: f64,
    eps: f64,
) -> Result<ComplexValue, OperatorError> {
    if !(t > 0.0) {
        return Err(OperatorError::Domain(format!(
            "conformable_deriv_limit requires t > 0, got {t}"
        )));
    }
    if !(order > 0.0 && order <= 1.0) {
        return Err(OperatorError::Domain(format!(
            "conformable_deriv_limit requires order in (0, 1], got {order}"
        )));
    }
    if !(1e-10..=1e-4).contains(&eps) {
        return Err(OperatorError::Domain(format!(
            "conformable_deriv_limit requires eps in [1e-10, 1e-4], got {eps}"
        )));
    }
    let scale = t.powf(1.0 - order);
    if t - eps * scale <= 0.0 {
        return Err(OperatorError::Domain(format!(
            "symmetric stencil leaves the domain: t = {t}, eps = {eps}"
        )));
    }
    let quotient = |e: f64| (h.eval(t + e * scale) - h.eval(t - e * scale)).scale(0.5 / e);
    let d1 = quotient(eps);
    let d2 = quotient(0.5 * eps);
    Ok((d2.scale(4.0) - d1).scale(1.0 / 3.0))
}

/// Conformable power rule `M_order(t^r) = r t^(r-order)`.
pub fn conformable_power_rule(r: f64, order: f64) -> PowerRule {
    PowerRule {
        coefficient: r,
        exponent: r - order,
    }
}

/// Conformable integral of order `order` from 0 to t:
/// `integral_0^t h(psi) psi^(order-1) dpsi`.
///
/// The substitution `u = psi^order` removes the endpoint singularity, after
/// which the integrand is `h(u^(1/order)) / order` on [0, t^order].
pub fn conformable_integral(
    h: &ScalarFunction,
    order: f64,
    t: f64,
    panels: usize,
) -> Result<ComplexValue, OperatorError> {
    if panels < 8 {
        return Err(OperatorError::Quadrature(format!(
            "conformable_integral requires panels >= 8, got {panels}"
        )));
    }
    if !(t > 0.0) {
        return Err(OperatorError::Domain(format!(
            "conformable_integral requires t > 0, got {t}"
        )));
    }
    if !(order > 0.0 && order <= 1.0) {
        return Err(OperatorError::Domain(format!(
            "conformable_integral requires order in (0, 1], got {order}"
        )));
    }
    let u_max = t.powf(order);
    Ok(simpson(
        |u| h.eval(u.powf(1.0 / order).max(1e-300)),
        0.0,
        u_max,
        panels,
    )
    .scale(1.0 / order))
}
