//! Quasi-steady-state closure of the subcritical clusters and its comparison
//! with the centre-manifold expansion.
//!
//! Setting `c_j' = 0` for `2 ≤ j ≤ i` (with `β = 1`) gives the global closed forms
//! `c_j = (c_1^j + … + c_1^i) / (1 + c_1 + … + c_1^{i−1})`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::centre_manifold::{build_field, CentreManifoldExpansion};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::series::TruncatedSeries;

/// Polynomial ratio in `c_1`, coefficients by ascending power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalFunction {
    pub numerator: Vec<i64>,
    pub denominator: Vec<i64>,
}

impl RationalFunction {
    pub fn evaluate(&self, x: &Rational) -> Rational {
        let horner = |cs: &[i64]| {
            cs.iter().rev().fold(Rational::zero(), |acc, &a| acc * x + rational::int(a))
        };
        horner(&self.numerator) / horner(&self.denominator)
    }

    pub fn evaluate_f64(&self, x: f64) -> f64 {
        let horner = |cs: &[i64]| cs.iter().rev().fold(0.0, |acc, &a| acc * x + a as f64);
        horner(&self.numerator) / horner(&self.denominator)
    }

    /// MacLaurin series by exact long division.
    pub fn series(&self, order: usize) -> Result<TruncatedSeries> {
        let num = TruncatedSeries::from_i64(&self.numerator, order);
        let den = TruncatedSeries::from_i64(&self.denominator, order);
        num.div(&den)
    }
}

/// Closed form for `c_j`, `2 ≤ j ≤ i`.
pub fn closed_form(i: usize, j: usize) -> RationalFunction {
    let mut numerator = vec![0; i + 1];
    for k in 1..=i + 1 - j {
        numerator[k + j - 1] = 1;
    }
    RationalFunction { numerator, denominator: vec![1; i] }
}

/// Values of `c_2, …, c_i` on the quasi-steady state.
pub fn qssa_closed_form(i: usize, c1: &Rational) -> Result<Vec<Rational>> {
    if i < 2 {
        return Err(Error::CriticalSizeTooSmall(i));
    }
    Ok((2..=i).map(|j| closed_form(i, j).evaluate(c1)).collect())
}

/// `c_2, …, c_i` as series to order `n`, by long division.
pub fn qssa_series(i: usize, n: usize) -> Result<Vec<TruncatedSeries>> {
    if i < 2 {
        return Err(Error::CriticalSizeTooSmall(i));
    }
    if n < i + 1 {
        return Err(Error::OrderTooSmall { order: n, min: i + 1 });
    }
    (2..=i).map(|j| closed_form(i, j).series(n)).collect()
}

/// `c_1^j + Σ_k (−c_1^{ki+1} + c_1^{ki+j})` truncated at `n`.
pub fn qssa_series_formula(i: usize, j: usize, n: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::monomial(j, Rational::one(), n);
    let mut k = 1;
    while k * i + 1 <= n {
        s.set_coeff(k * i + 1, s.coeff(k * i + 1) - Rational::one());
        s.set_coeff(k * i + j, s.coeff(k * i + j) + Rational::one());
        k += 1;
    }
    s
}

/// `g_w` under the quasi-steady state: the `w`-equation `−αw + R(c_1, c_2..c_i, w)`
/// solved for its linear term with `c_j` on the closed forms and `w = 2c_1²` in `R`.
pub fn qssa_gw(i: usize, alpha: &Rational, n: usize) -> Result<TruncatedSeries> {
    if alpha.is_zero() {
        return Err(Error::ZeroPivot { variable: "g_w".into(), order: 0 });
    }
    let field = build_field(i, alpha, &Rational::one())?;
    let nvars = field.nvars();
    let f_w = field.w_component();
    let pivot = -f_w.linear_coeff(field.w_index());
    if pivot.is_zero() {
        return Err(Error::ZeroPivot { variable: "g_w".into(), order: 1 });
    }
    let remainder = f_w.add(&Poly::var(nvars, field.w_index()).scale(&pivot));

    let mut subs = vec![TruncatedSeries::monomial(1, Rational::one(), n)];
    subs.extend(qssa_series(i, n.max(i + 1))?.into_iter().map(|s| s.truncate(n)));
    subs.push(TruncatedSeries::monomial(2, rational::int(2), n));
    Ok(remainder.substitute(&subs, n).scale(&pivot.recip()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QssaExpansion {
    pub i: usize,
    pub alpha: Rational,
    pub order: usize,
    pub closed_forms: Vec<RationalFunction>,
    /// `series[j - 2]` is the expansion of `c_j`.
    pub series: Vec<TruncatedSeries>,
    pub g_w: TruncatedSeries,
    pub reduced_ode: TruncatedSeries,
}

pub fn qssa_expansion(i: usize, alpha: &Rational, n: usize) -> Result<QssaExpansion> {
    let series = qssa_series(i, n)?;
    let g_w = qssa_gw(i, alpha, n)?;
    let reduced_ode = &g_w - &TruncatedSeries::monomial(2, rational::int(2), n);
    Ok(QssaExpansion {
        i,
        alpha: alpha.clone(),
        order: n,
        closed_forms: (2..=i).map(|j| closed_form(i, j)).collect(),
        series,
        g_w,
        reduced_ode,
    })
}

impl QssaExpansion {
    pub fn to_json(&self) -> Value {
        let mut series = Map::new();
        for (k, s) in self.series.iter().enumerate() {
            series.insert(format!("g{}", k + 2), json!(s.to_strings()));
        }
        series.insert("gw".into(), json!(self.g_w.to_strings()));
        json!({
            "params": {"i": self.i, "alpha": rational::format(&self.alpha), "beta": "1", "n": self.order},
            "closed_forms": self.closed_forms,
            "series": Value::Object(series),
            "reduced_ode": self.reduced_ode.to_strings(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub power: usize,
    pub cm_coeff: String,
    pub qssa_coeff: String,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub i: usize,
    pub alpha: String,
    pub rows: Vec<DivergenceRow>,
    pub first_difference: Option<usize>,
    /// Agreement at powers `i+3`, `i+4`, `2i+3`.
    pub leading_terms_agree: bool,
}

/// Power-by-power comparison of two series of the same order.
pub fn compare_series(i: usize, alpha: &Rational, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<DivergenceReport> {
    if a.order() != b.order() {
        return Err(Error::ParameterMismatch(format!(
            "orders differ ({} vs {})",
            a.order(),
            b.order()
        )));
    }
    let rows: Vec<DivergenceRow> = (0..=a.order())
        .map(|power| {
            let (x, y) = (a.coeff(power), b.coeff(power));
            DivergenceRow {
                power,
                cm_coeff: rational::format(&x),
                qssa_coeff: rational::format(&y),
                equal: x == y,
            }
        })
        .collect();
    let first_difference = rows.iter().find(|r| !r.equal).map(|r| r.power);
    let leading_terms_agree = [i + 3, i + 4, 2 * i + 3]
        .iter()
        .all(|&p| p <= a.order() && rows[p].equal && !a.coeff(p).is_zero());
    Ok(DivergenceReport {
        i,
        alpha: rational::format(alpha),
        rows,
        first_difference,
        leading_terms_agree,
    })
}

pub fn compare_expansions(cm: &CentreManifoldExpansion, q: &QssaExpansion) -> Result<DivergenceReport> {
    if cm.i != q.i {
        return Err(Error::ParameterMismatch(format!("i differs ({} vs {})", cm.i, q.i)));
    }
    if cm.alpha != q.alpha {
        return Err(Error::ParameterMismatch(format!(
            "alpha differs ({} vs {})",
            rational::format(&cm.alpha),
            rational::format(&q.alpha)
        )));
    }
    if !cm.beta.is_one() {
        return Err(Error::ParameterMismatch(format!(
            "the comparison needs beta = 1 (got {})",
            rational::format(&cm.beta)
        )));
    }
    if cm.order != q.order {
        return Err(Error::ParameterMismatch(format!("orders differ ({} vs {})", cm.order, q.order)));
    }
    compare_series(cm.i, &cm.alpha, &cm.reduced_ode, &q.reduced_ode)
}

/// `(den·c_j')` for `j = 2..i` with the closed forms substituted, as exact
/// polynomials in `c_1`. All vanish identically.
pub fn fixed_point_residuals(i: usize) -> Vec<TruncatedSeries> {
    let order = 3 * i + 2;
    let num = |j: usize| -> TruncatedSeries {
        match j {
            1 => TruncatedSeries::from_i64(&vec![1; i], order).shift_up(1),
            j if j <= i => TruncatedSeries::from_i64(&closed_form(i, j).numerator, order),
            _ => TruncatedSeries::zero(order),
        }
    };
    let c1 = TruncatedSeries::monomial(1, Rational::one(), order);
    (2..=i)
        .map(|j| {
            let gain = &(&c1 * &num(j - 1)) + &num(j + 1);
            let loss = &(&c1 * &num(j)) + &num(j);
            &gain - &loss
        })
        .collect()
}

/// Largest coefficient magnitude, for reporting.
pub fn max_abs_coeff(s: &TruncatedSeries) -> Rational {
    s.coefficients().iter().map(|a| a.abs()).max().unwrap_or_else(Rational::zero)
}
