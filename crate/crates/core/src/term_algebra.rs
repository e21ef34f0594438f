//! A closed symbolic basis for the solver recursion: finite sums of terms
//! `coeff * x^q * exp(i k tau) * E(t, h, c)` with numeric coefficients.
//!
//! The basis carries exact rules for multiplication, conjugation, fractional
//! derivatives in x and t, and fractional integration in x. It is closed
//! under everything the decomposition recursion needs through the depths the
//! reference series reach; products that would leave the basis (two
//! Mittag-Leffler atoms in one term, mixed exponential kinds) fail loudly
//! with [`TermError::BasisOverflow`].
//!
//! Orders gamma and delta are fixed numbers by the time a sum is built, so
//! every rule is exact arithmetic on coefficients and exponents rather than
//! general symbolic rewriting.

use std::fmt;

use crate::fractional_operators::{rl_integral_power, Sense};
use crate::numfmt::format_significant_trimmed;
use crate::special_functions::{gamma, ml_e, reciprocal_gamma, ComplexValue, SpecialFunctionError};

/// Tolerance for identifying x exponents and atom parameters that arise
/// from different arithmetic paths over the same gamma, delta.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Terms with coefficient magnitude below this are pruned on normalization.
pub const COEFF_PRUNE_TOLERANCE: f64 = 1e-14;

/// Errors from term-basis operations.
#[derive(Debug, Clone, PartialEq)]
pub enum TermError {
    /// A product or rule application left the closed term basis.
    BasisOverflow(String),
    /// A derivative rule was requested on an atom of the wrong sense.
    UnsupportedAtom(String),
    /// Input outside an operation's domain.
    Domain(String),
    /// Propagated gamma pole.
    Pole { x: f64 },
    /// Propagated special-function failure during evaluation.
    SpecialFunction(SpecialFunctionError),
}

impl fmt::Display for TermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BasisOverflow(msg) => write!(f, "basis overflow: {msg}"),
            Self::UnsupportedAtom(msg) => write!(f, "unsupported atom: {msg}"),
            Self::Domain(msg) => write!(f, "domain error: {msg}"),
            Self::Pole { x } => write!(f, "gamma pole at x = {x}"),
            Self::SpecialFunction(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TermError {}

impl From<SpecialFunctionError> for TermError {
    fn from(e: SpecialFunctionError) -> Self {
        match e {
            SpecialFunctionError::Pole { x } => Self::Pole { x },
            other => Self::SpecialFunction(other),
        }
    }
}

impl From<crate::fractional_operators::OperatorError> for TermError {
    fn from(e: crate::fractional_operators::OperatorError) -> Self {
        match e {
            crate::fractional_operators::OperatorError::Pole { x } => Self::Pole { x },
            other => Self::Domain(other.to_string()),
        }
    }
}

/// Time-dependent exponential atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpAtom {
    /// `e^{k t}`
    Classical { k: ComplexValue },
    /// `e^{k t^delta / delta}`; every conformable atom in a sum carries the
    /// same delta.
    Conformable { k: ComplexValue, delta: f64 },
}

impl ExpAtom {
    fn k(&self) -> ComplexValue {
        match self {
            Self::Classical { k } | Self::Conformable { k, .. } => *k,
        }
    }

    fn conj(self) -> Self {
        match self {
            Self::Classical { k } => Self::Classical { k: k.conj() },
            Self::Conformable { k, delta } => Self::Conformable { k: k.conj(), delta },
        }
    }
}

/// Mittag-Leffler atom `E(t, h, c) = t^h E_{1,h+1}(c t)`.
///
/// These appear only in Caputo-sense sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleAtom {
    pub h: f64,
    pub c: ComplexValue,
}

/// One basis term `coeff * x^q * exp-atom * mle-atom`, with at most one
/// exponential and at most one Mittag-Leffler atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolicTerm {
    pub coeff: ComplexValue,
    pub x_exp: f64,
    pub exp_atom: Option<ExpAtom>,
    pub mle_atom: Option<MleAtom>,
}

impl SymbolicTerm {
    pub fn new(
        coeff: ComplexValue,
        x_exp: f64,
        exp_atom: Option<ExpAtom>,
        mle_atom: Option<MleAtom>,
    ) -> Self {
        Self {
            coeff,
            x_exp,
            exp_atom,
            mle_atom,
        }
    }

    pub fn constant(coeff: ComplexValue) -> Self {
        Self::new(coeff, 0.0, None, None)
    }

    fn scaled(mut self, c: ComplexValue) -> Self {
        self.coeff = self.coeff * c;
        self
    }

    /// Canonicalize atoms: conformable exponentials at delta = 1 become
    /// classical, zero frequencies drop out, and Mittag-Leffler atoms with
    /// nonpositive-integer h collapse into exponentials via
    /// `E(t, h, c) = c^{-h} e^{c t}`.
    fn reduce(&mut self) {
        if let Some(ExpAtom::Conformable { k, delta }) = self.exp_atom {
            if (delta - 1.0).abs() <= MERGE_TOLERANCE {
                self.exp_atom = Some(ExpAtom::Classical { k });
            }
        }
        if let Some(MleAtom { h, c }) = self.mle_atom {
            let r = h.round();
            if r <= 0.0 && (h - r).abs() <= MERGE_TOLERANCE {
                self.coeff = self.coeff * c.powu((-r) as u32);
                self.mle_atom = None;
                self.exp_atom = match self.exp_atom {
                    None => Some(ExpAtom::Classical { k: c }),
                    Some(ExpAtom::Classical { k }) => Some(ExpAtom::Classical { k: k + c }),
                    // conformable sums carry no Mittag-Leffler atoms by
                    // invariant; leave the term untouched if that is broken
                    Some(other) => Some(other),
                };
            }
        }
        if let Some(atom) = self.exp_atom {
            if atom.k().abs() <= MERGE_TOLERANCE {
                self.exp_atom = None;
            }
        }
        // scrub negative zeros so ordering and rendering are stable
        self.x_exp += 0.0;
        self.coeff = ComplexValue::new(self.coeff.re + 0.0, self.coeff.im + 0.0);
    }

    /// Ordering key: x exponent first, then atom structure and parameters.
    fn sort_key(&self) -> (f64, u8, f64, f64, f64, u8, f64, f64, f64) {
        let (er, kre, kim, d) = match self.exp_atom {
            None => (0u8, 0.0, 0.0, 0.0),
            Some(ExpAtom::Classical { k }) => (1, k.re, k.im, 0.0),
            Some(ExpAtom::Conformable { k, delta }) => (2, k.re, k.im, delta),
        };
        let (mr, h, cre, cim) = match self.mle_atom {
            None => (0u8, 0.0, 0.0, 0.0),
            Some(MleAtom { h, c }) => (1, h, c.re, c.im),
        };
        (self.x_exp, er, kre, kim, d, mr, h, cre, cim)
    }

    /// Like-term test with the merge tolerance on exponents and parameters.
    fn same_shape(&self, other: &Self) -> bool {
        if (self.x_exp - other.x_exp).abs() > MERGE_TOLERANCE {
            return false;
        }
        let exp_eq = match (self.exp_atom, other.exp_atom) {
            (None, None) => true,
            (Some(ExpAtom::Classical { k: a }), Some(ExpAtom::Classical { k: b })) => {
                (a - b).abs() <= MERGE_TOLERANCE
            }
            (
                Some(ExpAtom::Conformable { k: a, delta: da }),
                Some(ExpAtom::Conformable { k: b, delta: db }),
            ) => (a - b).abs() <= MERGE_TOLERANCE && (da - db).abs() <= MERGE_TOLERANCE,
            _ => false,
        };
        let mle_eq = match (self.mle_atom, other.mle_atom) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                (a.h - b.h).abs() <= MERGE_TOLERANCE && (a.c - b.c).abs() <= MERGE_TOLERANCE
            }
            _ => false,
        };
        exp_eq && mle_eq
    }
}

/// A normalized, canonically ordered sum of basis terms. Immutable after
/// construction; all operations return new sums, so values can be shared
/// and sent across threads freely.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TermSum {
    terms: Vec<SymbolicTerm>,
}

impl TermSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ComplexValue) -> Self {
        Self::from_terms(vec![SymbolicTerm::constant(c)])
    }

    /// `coeff * e^{k t}`
    pub fn exp_classical(coeff: ComplexValue, k: ComplexValue) -> Self {
        Self::from_terms(vec![SymbolicTerm::new(
            coeff,
            0.0,
            Some(ExpAtom::Classical { k }),
            None,
        )])
    }

    /// `coeff * e^{k t^delta / delta}`
    pub fn exp_conformable(coeff: ComplexValue, k: ComplexValue, delta: f64) -> Self {
        Self::from_terms(vec![SymbolicTerm::new(
            coeff,
            0.0,
            Some(ExpAtom::Conformable { k, delta }),
            None,
        )])
    }

    /// Build a normalized sum from raw terms.
    pub fn from_terms(terms: Vec<SymbolicTerm>) -> Self {
        Self {
            terms: normalize(terms),
        }
    }

    pub fn terms(&self) -> &[SymbolicTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    pub fn scale(&self, c: ComplexValue) -> Self {
        Self::from_terms(self.terms.iter().map(|t| t.scaled(c)).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(ComplexValue::real(-1.0))
    }

    /// Multiply by the monomial `coeff * x^q`.
    pub fn mul_x_power(&self, coeff: ComplexValue, q: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let mut t = t.scaled(coeff);
                    t.x_exp += q;
                    t
                })
                .collect(),
        )
    }

    /// True when no term depends on x.
    pub fn is_x_free(&self) -> bool {
        self.terms.iter().all(|t| t.x_exp.abs() <= MERGE_TOLERANCE)
    }
}

fn cmp_key(
    a: &(f64, u8, f64, f64, f64, u8, f64, f64, f64),
    b: &(f64, u8, f64, f64, f64, u8, f64, f64, f64),
) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then(a.2.total_cmp(&b.2))
        .then(a.3.total_cmp(&b.3))
        .then(a.4.total_cmp(&b.4))
        .then(a.5.cmp(&b.5))
        .then(a.6.total_cmp(&b.6))
        .then(a.7.total_cmp(&b.7))
        .then(a.8.total_cmp(&b.8))
}

/// Reduce atoms, sort canonically, merge like terms within tolerance, and
/// prune negligible coefficients. Idempotent.
fn normalize(mut terms: Vec<SymbolicTerm>) -> Vec<SymbolicTerm> {
    for t in &mut terms {
        t.reduce();
    }
    terms.sort_by(|a, b| cmp_key(&a.sort_key(), &b.sort_key()));
    let mut out: Vec<SymbolicTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(last) = out.last_mut() {
            if last.same_shape(&t) {
                last.coeff = last.coeff + t.coeff;
                continue;
            }
        }
        out.push(t);
    }
    out.retain(|t| t.coeff.abs() >= COEFF_PRUNE_TOLERANCE);
    for t in &mut out {
        t.coeff = ComplexValue::new(t.coeff.re + 0.0, t.coeff.im + 0.0);
    }
    out
}

/// Distributive product of two sums. Exponential atoms of the same kind
/// combine by frequency addition; a product with two Mittag-Leffler atoms
/// (or mixed exponential kinds) leaves the basis.
pub fn multiply(a: &TermSum, b: &TermSum) -> Result<TermSum, TermError> {
    let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
    for ta in &a.terms {
        for tb in &b.terms {
            if ta.mle_atom.is_some() && tb.mle_atom.is_some() {
                return Err(TermError::BasisOverflow(
                    "product of two Mittag-Leffler atoms".into(),
                ));
            }
            let exp_atom = match (ta.exp_atom, tb.exp_atom) {
                (None, e) | (e, None) => e,
                (Some(ExpAtom::Classical { k: k1 }), Some(ExpAtom::Classical { k: k2 })) => {
                    Some(ExpAtom::Classical { k: k1 + k2 })
                }
                (
                    Some(ExpAtom::Conformable { k: k1, delta: d1 }),
                    Some(ExpAtom::Conformable { k: k2, delta: d2 }),
                ) => {
                    if (d1 - d2).abs() > MERGE_TOLERANCE {
                        return Err(TermError::BasisOverflow(
                            "conformable exponentials with different delta".into(),
                        ));
                    }
                    Some(ExpAtom::Conformable {
                        k: k1 + k2,
                        delta: d1,
                    })
                }
                _ => {
                    return Err(TermError::BasisOverflow(
                        "product of classical and conformable exponentials".into(),
                    ))
                }
            };
            terms.push(SymbolicTerm::new(
                ta.coeff * tb.coeff,
                ta.x_exp + tb.x_exp,
                exp_atom,
                ta.mle_atom.or(tb.mle_atom),
            ));
        }
    }
    Ok(TermSum::from_terms(terms))
}

/// Complex conjugate of a sum: conjugate coefficients, exponential
/// frequencies, and Mittag-Leffler arguments (the series has real
/// coefficients and t is real, so conjugation acts componentwise).
pub fn conjugate(a: &TermSum) -> TermSum {
    TermSum::from_terms(
        a.terms
            .iter()
            .map(|t| {
                SymbolicTerm::new(
                    t.coeff.conj(),
                    t.x_exp,
                    t.exp_atom.map(ExpAtom::conj),
                    t.mle_atom.map(|m| MleAtom {
                        h: m.h,
                        c: m.c.conj(),
                    }),
                )
            })
            .collect(),
    )
}

/// Fractional t-derivative of the sum.
///
/// Caputo sense: `D^a e^{k t} = k E(t, 1-a, k)` and the shift rule
/// `E(t, h, c) -> E(t, h-a, c)`. The shift rule is applied formally for
/// every order in (0, 2], matching the convention of the derivation this
/// engine mechanizes.
///
/// Conformable sense: `e^{k t^d / d}` picks up a factor k at order d and
/// k^2 at order 2d; other orders leave the basis.
///
/// Terms with no time atom differentiate to zero in both senses.
pub fn deriv_t(a: &TermSum, order: f64, sense: Sense) -> Result<TermSum, TermError> {
    if !(order > 0.0 && order <= 2.0) {
        return Err(TermError::Domain(format!(
            "deriv_t order must lie in (0, 2], got {order}"
        )));
    }
    let mut terms = Vec::with_capacity(a.terms.len());
    for t in &a.terms {
        match sense {
            Sense::Caputo => match (t.exp_atom, t.mle_atom) {
                (None, None) => {}
                (Some(ExpAtom::Conformable { .. }), _) => {
                    return Err(TermError::UnsupportedAtom(
                        "Caputo t-derivative of a conformable exponential".into(),
                    ))
                }
                (Some(ExpAtom::Classical { k }), None) => {
                    let mut nt = *t;
                    nt.coeff = nt.coeff * k;
                    nt.exp_atom = None;
                    nt.mle_atom = Some(MleAtom {
                        h: 1.0 - order,
                        c: k,
                    });
                    terms.push(nt);
                }
                (None, Some(MleAtom { h, c })) => {
                    let mut nt = *t;
                    nt.mle_atom = Some(MleAtom { h: h - order, c });
                    terms.push(nt);
                }
                (Some(_), Some(_)) => return Err(TermError::UnsupportedAtom(
                    "t-derivative of an exponential-Mittag-Leffler product is outside the basis"
                        .into(),
                )),
            },
            Sense::Conformable => {
                if t.mle_atom.is_some() {
                    return Err(TermError::UnsupportedAtom(
                        "conformable t-derivative of a Mittag-Leffler atom".into(),
                    ));
                }
                match t.exp_atom {
                    None => {}
                    Some(atom) => {
                        let (k, delta) = match atom {
                            ExpAtom::Classical { k } => (k, 1.0),
                            ExpAtom::Conformable { k, delta } => (k, delta),
                        };
                        let factor = if (order - delta).abs() <= MERGE_TOLERANCE {
                            k
                        } else if (order - 2.0 * delta).abs() <= MERGE_TOLERANCE {
                            k * k
                        } else {
                            return Err(TermError::UnsupportedAtom(format!(
                                "conformable t-derivative of order {order} on an atom of order {delta}"
                            )));
                        };
                        terms.push(t.scaled(factor));
                    }
                }
            }
        }
    }
    Ok(TermSum::from_terms(terms))
}

/// Fractional x-derivative: the Caputo/Riemann-Liouville power rule
/// `x^q -> gamma(q+1)/gamma(q+1-order) x^(q-order)` or the conformable rule
/// `x^q -> q x^(q-order)`, applied per term. Terms constant in x vanish.
pub fn deriv_x(a: &TermSum, order: f64, sense: Sense) -> Result<TermSum, TermError> {
    if !(order > 0.0 && order <= 2.0) {
        return Err(TermError::Domain(format!(
            "deriv_x order must lie in (0, 2], got {order}"
        )));
    }
    let mut terms = Vec::with_capacity(a.terms.len());
    for t in &a.terms {
        let q = t.x_exp;
        if q.abs() <= MERGE_TOLERANCE {
            continue;
        }
        match sense {
            Sense::Caputo => {
                if q < 0.0 {
                    return Err(TermError::Domain(format!(
                        "Caputo x-derivative requires nonnegative exponents, got x^{q}"
                    )));
                }
                // gamma(q+1-order) may sit on a pole, where the derivative
                // coefficient is zero; reciprocal_gamma covers that.
                let coefficient = gamma(q + 1.0)? * reciprocal_gamma(q + 1.0 - order);
                let mut nt = t.scaled(ComplexValue::real(coefficient));
                nt.x_exp = q - order;
                terms.push(nt);
            }
            Sense::Conformable => {
                let mut nt = t.scaled(ComplexValue::real(q));
                nt.x_exp = q - order;
                terms.push(nt);
            }
        }
    }
    Ok(TermSum::from_terms(terms))
}

/// Fractional x-integration of order `order` (the recursion always passes
/// 2 gamma). Caputo sense applies the Riemann-Liouville rule; conformable
/// sense is the double conformable integral, `I x^q = x^(q+g)/(q+g)` taken
/// twice with g = order/2.
pub fn integrate_x(a: &TermSum, order: f64, sense: Sense) -> Result<TermSum, TermError> {
    if !(order > 0.0 && order <= 2.0) {
        return Err(TermError::Domain(format!(
            "integrate_x order must lie in (0, 2], got {order}"
        )));
    }
    let mut terms = Vec::with_capacity(a.terms.len());
    for t in &a.terms {
        let q = t.x_exp;
        if q < -MERGE_TOLERANCE {
            return Err(TermError::Domain(format!(
                "integrate_x requires nonnegative exponents, got x^{q}"
            )));
        }
        let q = q.max(0.0);
        match sense {
            Sense::Caputo => {
                let rule = rl_integral_power(q, order)?;
                let mut nt = t.scaled(ComplexValue::real(rule.coefficient));
                nt.x_exp = rule.exponent;
                terms.push(nt);
            }
            Sense::Conformable => {
                let g = 0.5 * order;
                let mut nt = t.scaled(ComplexValue::real(1.0 / ((q + g) * (q + 2.0 * g))));
                nt.x_exp = q + 2.0 * g;
                terms.push(nt);
            }
        }
    }
    Ok(TermSum::from_terms(terms))
}

/// Evaluate the sum at a point with x, t > 0.
pub fn evaluate(a: &TermSum, x: f64, t: f64) -> Result<ComplexValue, TermError> {
    if !(x > 0.0) || !(t > 0.0) {
        return Err(TermError::Domain(format!(
            "evaluate requires x, t > 0, got ({x}, {t})"
        )));
    }
    let mut sum = ComplexValue::ZERO;
    for term in &a.terms {
        let mut v = term.coeff.scale(x.powf(term.x_exp));
        if let Some(atom) = term.exp_atom {
            let tau = match atom {
                ExpAtom::Classical { .. } => t,
                ExpAtom::Conformable { delta, .. } => t.powf(delta) / delta,
            };
            v = v * atom.k().scale(tau).exp();
        }
        if let Some(MleAtom { h, c }) = term.mle_atom {
            v = v * ml_e(t, h, c)?;
        }
        sum = sum + v;
    }
    if !sum.is_finite() {
        return Err(TermError::Domain(format!(
            "evaluation at ({x}, {t}) produced a non-finite value"
        )));
    }
    Ok(sum)
}

// --- deterministic plain-text rendering -----------------------------------

fn fmt_number(v: f64) -> String {
    format_significant_trimmed(v, 12)
}

fn fmt_complex(c: ComplexValue) -> String {
    let re = fmt_number(c.re);
    let im = fmt_number(c.im);
    if c.im < 0.0 {
        format!("({re}{im}i)")
    } else {
        format!("({re}+{im}i)")
    }
}

fn fmt_ml_argument(c: ComplexValue) -> String {
    if c.re == 0.0 && c.im == 1.0 {
        "i".to_string()
    } else if c.re == 0.0 && c.im == -1.0 {
        "-i".to_string()
    } else {
        fmt_complex(c)
    }
}

fn fmt_exp(atom: ExpAtom) -> String {
    match atom {
        ExpAtom::Classical { k } => {
            if k.re == 0.0 {
                format!("exp(i*{}*t)", fmt_number(k.im))
            } else {
                format!("exp({}*t)", fmt_complex(k))
            }
        }
        ExpAtom::Conformable { k, delta } => {
            if k.re == 0.0 {
                format!("exp(i*{}*t^{:.2}/{:.2})", fmt_number(k.im), delta, delta)
            } else {
                format!("exp({}*t^{:.2}/{:.2})", fmt_complex(k), delta, delta)
            }
        }
    }
}

impl fmt::Display for SymbolicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_complex(self.coeff))?;
        if self.x_exp.abs() > 0.0 {
            write!(f, "*x^{:.2}", self.x_exp)?;
        }
        if let Some(atom) = self.exp_atom {
            write!(f, "*{}", fmt_exp(atom))?;
        }
        if let Some(MleAtom { h, c }) = self.mle_atom {
            write!(f, "*E(t,{:.2},{})", h, fmt_ml_argument(c))?;
        }
        Ok(())
    }
}

impl fmt::Display for TermSum {
    /// Deterministic rendering used in comparison reports and series
    /// listings, e.g. `(-1+0i)*x^0.50*exp(i*1*t)*E(t,-0.50,i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// The atom structure of a term rendered without its coefficient; this is
/// the key used when diffing two series term by term.
pub fn term_key(t: &SymbolicTerm) -> String {
    let mut parts = Vec::new();
    if t.x_exp.abs() > 0.0 {
        parts.push(format!("x^{:.2}", t.x_exp));
    }
    if let Some(atom) = t.exp_atom {
        parts.push(fmt_exp(atom));
    }
    if let Some(MleAtom { h, c }) = t.mle_atom {
        parts.push(format!("E(t,{:.2},{})", h, fmt_ml_argument(c)));
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e_it() -> TermSum {
        TermSum::exp_classical(ComplexValue::ONE, ComplexValue::I)
    }

    #[test]
    fn multiply_cancels_frequencies() {
        let a = e_it();
        let b = TermSum::exp_classical(ComplexValue::ONE, ComplexValue::I.scale(-1.0));
        let p = multiply(&a, &b).unwrap();
        assert_eq!(p.terms().len(), 1);
        let t = p.terms()[0];
        assert!(t.exp_atom.is_none() && t.mle_atom.is_none());
        assert!((t.coeff - ComplexValue::ONE).abs() < 1e-15);
    }

    #[test]
    fn multiply_combines_exp_and_ml_atom() {
        // e^{it} * (e^{it} E(t, h, i)) = e^{2it} E(t, h, i)
        let h = 1.0 - 2.0 * 0.75;
        let b = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            0.0,
            Some(ExpAtom::Classical { k: ComplexValue::I }),
            Some(MleAtom {
                h,
                c: ComplexValue::I,
            }),
        )]);
        let p = multiply(&e_it(), &b).unwrap();
        assert_eq!(p.terms().len(), 1);
        let t = p.terms()[0];
        assert_eq!(
            t.exp_atom,
            Some(ExpAtom::Classical {
                k: ComplexValue::new(0.0, 2.0)
            })
        );
        assert_eq!(
            t.mle_atom,
            Some(MleAtom {
                h,
                c: ComplexValue::I
            })
        );
    }

    #[test]
    fn multiply_rejects_mixed_conformable_orders() {
        let a = TermSum::exp_conformable(ComplexValue::ONE, ComplexValue::I, 0.5);
        let b = TermSum::exp_conformable(ComplexValue::ONE, ComplexValue::I, 0.75);
        assert!(matches!(multiply(&a, &b), Err(TermError::BasisOverflow(_))));
        let c = TermSum::exp_classical(ComplexValue::ONE, ComplexValue::I);
        assert!(matches!(multiply(&a, &c), Err(TermError::BasisOverflow(_))));
    }

    #[test]
    fn multiply_rejects_double_ml() {
        let a = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            0.0,
            None,
            Some(MleAtom {
                h: 0.3,
                c: ComplexValue::I,
            }),
        )]);
        let b = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            0.0,
            None,
            Some(MleAtom {
                h: 0.6,
                c: ComplexValue::I,
            }),
        )]);
        assert!(matches!(multiply(&a, &b), Err(TermError::BasisOverflow(_))));
    }

    #[test]
    fn conjugate_examples() {
        let c = conjugate(&e_it());
        assert_eq!(
            c.terms()[0].exp_atom,
            Some(ExpAtom::Classical {
                k: ComplexValue::new(0.0, -1.0)
            })
        );

        // i x^{0.5} E(t, -0.5, i) -> -i x^{0.5} E(t, -0.5, -i), checked numerically
        let s = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::I,
            0.5,
            None,
            Some(MleAtom {
                h: -0.5,
                c: ComplexValue::I,
            }),
        )]);
        let cs = conjugate(&s);
        assert_eq!(cs.terms()[0].coeff, ComplexValue::new(0.0, -1.0));
        assert_eq!(
            cs.terms()[0].mle_atom.unwrap().c,
            ComplexValue::new(0.0, -1.0)
        );
        for &(x, t) in &[(0.4, 0.3), (1.0, 0.9)] {
            let direct = evaluate(&s, x, t).unwrap().conj();
            let through = evaluate(&cs, x, t).unwrap();
            assert!((direct - through).abs() <= 1e-12);
        }

        // involution
        let round = conjugate(&conjugate(&s));
        assert_eq!(round, s);
    }

    #[test]
    fn deriv_t_caputo_exponential() {
        // D^d e^{it} = i E(t, 1-d, i)
        let d = deriv_t(&e_it(), 0.75, Sense::Caputo).unwrap();
        assert_eq!(d.terms().len(), 1);
        let t = d.terms()[0];
        assert!((t.coeff - ComplexValue::I).abs() < 1e-15);
        assert_eq!(t.exp_atom, None);
        let m = t.mle_atom.unwrap();
        assert!((m.h - 0.25).abs() < 1e-15);
        assert_eq!(m.c, ComplexValue::I);
    }

    #[test]
    fn deriv_t_caputo_integer_order_collapses() {
        // at order 1 the rule reduces to the classical derivative
        let d = deriv_t(&e_it(), 1.0, Sense::Caputo).unwrap();
        assert_eq!(d.terms().len(), 1);
        let t = d.terms()[0];
        assert!(
            t.mle_atom.is_none(),
            "E(t,0,i) should reduce to an exponential"
        );
        assert!((t.coeff - ComplexValue::I).abs() < 1e-15);
        assert_eq!(t.exp_atom, Some(ExpAtom::Classical { k: ComplexValue::I }));

        // at order 2: k^2 e^{kt}
        let d = deriv_t(&e_it(), 2.0, Sense::Caputo).unwrap();
        let t = d.terms()[0];
        assert!((t.coeff - ComplexValue::real(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn deriv_t_conformable_exponential() {
        let e = TermSum::exp_conformable(ComplexValue::ONE, ComplexValue::I, 0.6);
        let d = deriv_t(&e, 0.6, Sense::Conformable).unwrap();
        assert!((d.terms()[0].coeff - ComplexValue::I).abs() < 1e-15);
        let d2 = deriv_t(&e, 1.2, Sense::Conformable).unwrap();
        assert!((d2.terms()[0].coeff - ComplexValue::real(-1.0)).abs() < 1e-15);
        assert!(deriv_t(&e, 0.3, Sense::Conformable).is_err());
    }

    #[test]
    fn deriv_t_of_constant_is_zero() {
        let c = TermSum::constant(ComplexValue::ONE);
        assert!(deriv_t(&c, 0.5, Sense::Caputo).unwrap().is_zero());
        assert!(deriv_t(&c, 0.5, Sense::Conformable).unwrap().is_zero());
    }

    #[test]
    fn deriv_t_sense_mismatch() {
        let e = TermSum::exp_conformable(ComplexValue::ONE, ComplexValue::I, 0.6);
        assert!(matches!(
            deriv_t(&e, 0.6, Sense::Caputo),
            Err(TermError::UnsupportedAtom(_))
        ));
        let m = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            0.0,
            None,
            Some(MleAtom {
                h: 0.5,
                c: ComplexValue::I,
            }),
        )]);
        assert!(matches!(
            deriv_t(&m, 0.6, Sense::Conformable),
            Err(TermError::UnsupportedAtom(_))
        ));
    }

    #[test]
    fn deriv_x_power_rules() {
        let g = 0.5;
        // Caputo: x^{2g}/gamma(2g+1) -> x^g/gamma(g+1)
        let s = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::real(1.0 / gamma(2.0 * g + 1.0).unwrap()),
            2.0 * g,
            None,
            None,
        )]);
        let d = deriv_x(&s, g, Sense::Caputo).unwrap();
        let t = d.terms()[0];
        assert!((t.coeff.re - 1.0 / gamma(g + 1.0).unwrap()).abs() < 1e-13);
        assert!((t.x_exp - g).abs() < 1e-13);

        // conformable: x^{2g} -> 2g x^g
        let s = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            2.0 * g,
            None,
            None,
        )]);
        let d = deriv_x(&s, g, Sense::Conformable).unwrap();
        assert!((d.terms()[0].coeff.re - 2.0 * g).abs() < 1e-15);

        // no x dependence differentiates away
        assert!(deriv_x(&e_it(), g, Sense::Caputo).unwrap().is_zero());
        assert!(deriv_x(&e_it(), g, Sense::Conformable).unwrap().is_zero());
    }

    #[test]
    fn integrate_x_rules() {
        let one = TermSum::constant(ComplexValue::ONE);
        // order 1 single integral of 1 is x
        let i = integrate_x(&one, 1.0, Sense::Caputo).unwrap();
        assert!((i.terms()[0].coeff.re - 1.0).abs() < 1e-14);
        assert!((i.terms()[0].x_exp - 1.0).abs() < 1e-14);

        // Caputo: x^{2g}/gamma(2g+1) prefactor from integrating 1
        let g = 0.75;
        let i = integrate_x(&one, 2.0 * g, Sense::Caputo).unwrap();
        assert!((i.terms()[0].coeff.re - 1.0 / gamma(2.0 * g + 1.0).unwrap()).abs() < 1e-13);
        assert!((i.terms()[0].x_exp - 2.0 * g).abs() < 1e-13);

        // conformable: x^{2g}/(2 g^2), reducing to x^2/2 at g = 1
        let i = integrate_x(&one, 2.0 * g, Sense::Conformable).unwrap();
        assert!((i.terms()[0].coeff.re - 1.0 / (2.0 * g * g)).abs() < 1e-14);
        let i = integrate_x(&one, 2.0, Sense::Conformable).unwrap();
        assert!((i.terms()[0].coeff.re - 0.5).abs() < 1e-15);
        assert!((i.terms()[0].x_exp - 2.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        // e^{i pi} = -1
        let v = evaluate(&e_it(), 0.5, std::f64::consts::PI).unwrap();
        assert!((v - ComplexValue::real(-1.0)).abs() < 1e-12);

        // x^2 e^{it} at (2, 0.3): direct arithmetic oracle
        let s = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            2.0,
            Some(ExpAtom::Classical { k: ComplexValue::I }),
            None,
        )]);
        let v = evaluate(&s, 2.0, 0.3).unwrap();
        assert!((v.re - 4.0 * 0.3f64.cos()).abs() < 1e-12);
        assert!((v.im - 4.0 * 0.3f64.sin()).abs() < 1e-12);

        // E(t, 0, i) evaluates as e^{it} through the reduction
        let m = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            0.0,
            None,
            Some(MleAtom {
                h: 0.0,
                c: ComplexValue::I,
            }),
        )]);
        let v = evaluate(&m, 1.0, 0.7).unwrap();
        assert!((v.re - 0.7f64.cos()).abs() < 1e-13);
        assert!((v.im - 0.7f64.sin()).abs() < 1e-13);

        assert!(evaluate(&e_it(), 0.0, 1.0).is_err());
        assert!(evaluate(&e_it(), 1.0, 0.0).is_err());
    }

    #[test]
    fn normalization_merges_and_prunes() {
        let t1 = SymbolicTerm::new(ComplexValue::real(2.0), 0.5, None, None);
        let t2 = SymbolicTerm::new(ComplexValue::real(3.0), 0.5 + 1e-14, None, None);
        let t3 = SymbolicTerm::new(ComplexValue::real(1e-16), 1.0, None, None);
        let s = TermSum::from_terms(vec![t1, t2, t3]);
        assert_eq!(s.terms().len(), 1);
        assert!((s.terms()[0].coeff.re - 5.0).abs() < 1e-14);
    }

    #[test]
    fn normalization_is_idempotent() {
        let s = TermSum::from_terms(vec![
            SymbolicTerm::new(
                ComplexValue::I,
                0.5,
                Some(ExpAtom::Classical { k: ComplexValue::I }),
                None,
            ),
            SymbolicTerm::new(
                ComplexValue::ONE,
                0.0,
                None,
                Some(MleAtom {
                    h: -1.0,
                    c: ComplexValue::I,
                }),
            ),
            SymbolicTerm::new(
                ComplexValue::real(2.0),
                0.5,
                Some(ExpAtom::Classical { k: ComplexValue::I }),
                None,
            ),
        ]);
        let again = TermSum::from_terms(s.terms().to_vec());
        assert_eq!(s, again);
    }

    #[test]
    fn conformable_atom_at_delta_one_becomes_classical() {
        let s = TermSum::exp_conformable(ComplexValue::ONE, ComplexValue::I, 1.0);
        assert_eq!(
            s.terms()[0].exp_atom,
            Some(ExpAtom::Classical { k: ComplexValue::I })
        );
    }

    #[test]
    fn ml_atom_integer_h_reduction() {
        // E(t,-1,i) = i e^{it}
        let s = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            0.0,
            None,
            Some(MleAtom {
                h: -1.0,
                c: ComplexValue::I,
            }),
        )]);
        let t = s.terms()[0];
        assert!(t.mle_atom.is_none());
        assert!((t.coeff - ComplexValue::I).abs() < 1e-15);
        assert_eq!(t.exp_atom, Some(ExpAtom::Classical { k: ComplexValue::I }));

        // e^{2it} E(t,0,-i) = e^{it}
        let s = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::ONE,
            0.0,
            Some(ExpAtom::Classical {
                k: ComplexValue::new(0.0, 2.0),
            }),
            Some(MleAtom {
                h: 0.0,
                c: ComplexValue::new(0.0, -1.0),
            }),
        )]);
        let t = s.terms()[0];
        assert!(t.mle_atom.is_none());
        assert_eq!(t.exp_atom, Some(ExpAtom::Classical { k: ComplexValue::I }));
    }

    #[test]
    fn sums_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<TermSum>();
        assert_send_sync::<SymbolicTerm>();
    }

    #[test]
    fn rendering_is_deterministic() {
        let s = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::real(-1.0),
            0.5,
            Some(ExpAtom::Classical { k: ComplexValue::I }),
            Some(MleAtom {
                h: -0.5,
                c: ComplexValue::I,
            }),
        )]);
        assert_eq!(s.to_string(), "(-1+0i)*x^0.50*exp(i*1*t)*E(t,-0.50,i)");
        assert_eq!(TermSum::zero().to_string(), "0");
        let half = TermSum::from_terms(vec![SymbolicTerm::new(
            ComplexValue::real(0.5),
            2.0,
            Some(ExpAtom::Classical { k: ComplexValue::I }),
            None,
        )]);
        assert_eq!(half.to_string(), "(0.5+0i)*x^2.00*exp(i*1*t)");
    }
}
