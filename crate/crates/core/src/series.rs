//! Dense truncated power series in one variable with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `Σ_{k=0}^{n} a_k x^k + O(x^{n+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Pads with zeros or drops terms so that the result has order `order`.
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, Rational::one(), order)
    }

    /// `coeff · x^power`, or zero when `power > order`.
    pub fn monomial(power: usize, coeff: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = coeff;
        }
        s
    }

    pub fn from_i64(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&a| rational::int(a)).collect(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient at `power`; zero beyond the order.
    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, power: usize, value: Rational) {
        if power <= self.order() {
            self.coeffs[power] = value;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|a| !a.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.iter().take(order + 1).cloned().collect(), order)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * factor).collect() }
    }

    /// Product truncated at `order` (which may be below either operand's order).
    pub fn mul_to(&self, other: &Self, order: usize) -> Self {
        let order = order.min(self.order()).min(other.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (p, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (q, b) in other.coeffs.iter().enumerate().take(order + 1 - p) {
                if !b.is_zero() {
                    out[p + q] += a * b;
                }
            }
        }
        Self { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.mul_to(self, self.order());
        }
        acc
    }

    /// Term-by-term derivative. The result is known to order `n - 1`.
    pub fn derivative(&self) -> Self {
        let order = self.order().saturating_sub(1);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a * rational::int(k as i64))
            .collect();
        Self::new(coeffs, order)
    }

    /// Multiplies by `x^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs, self.order())
    }

    /// Quotient by a series with nonzero constant term, by long division.
    pub fn div(&self, den: &Self) -> Result<Self> {
        let order = self.order().min(den.order());
        let d0 = den.coeff(0);
        if d0.is_zero() {
            return Err(Error::ZeroPivot { variable: "series constant term".into(), order: 0 });
        }
        let mut q = vec![Rational::zero(); order + 1];
        for k in 0..=order {
            let mut acc = self.coeff(k);
            for m in 1..=k {
                let dm = den.coeff(m);
                if !dm.is_zero() {
                    acc -= &dm * &q[k - m];
                }
            }
            q[k] = acc / &d0;
        }
        Ok(Self { coeffs: q })
    }

    /// Horner evaluation in exact arithmetic.
    pub fn evaluate(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, a| acc * x + a)
    }

    pub fn evaluate_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * x + rational::to_f64(a))
    }

    /// Coefficients as canonical `p/q` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational::format).collect()
    }

    /// `|a_k|^{1/k}` for `k ≥ 1`; `None` where the coefficient vanishes.
    pub fn root_sequence(&self) -> Vec<Option<f64>> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| {
                (!a.is_zero()).then(|| rational::to_f64(&a.abs()).powf(1.0 / k as f64))
            })
            .collect()
    }

    /// Human-readable form in the variable `var`, e.g. `-c1^5 + 1/2*c1^6 + O(c1^8)`.
    pub fn display_with(&self, var: &str) -> String {
        let mut out = String::new();
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let negative = a.is_negative();
            let mag = a.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let power = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&rational::format(&mag));
            } else if mag.is_one() {
                out.push_str(&power);
            } else {
                out.push_str(&format!("{}*{power}", rational::format(&mag)));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(&format!(" + O({var}^{})", self.order() + 1));
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.mul_to(rhs, self.order().min(rhs.order()))
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub name: String,
    /// `|a_k|^{1/k}` for `k = 1..=n`; `null` at vanishing coefficients.
    pub roots: Vec<Option<f64>>,
}

/// Coefficient growth of each named series. Diagnostic only.
pub fn convergence_probe<'a>(
    series: impl IntoIterator<Item = (String, &'a TruncatedSeries)>,
) -> Result<Vec<ProbeRow>> {
    series
        .into_iter()
        .map(|(name, s)| {
            if s.order() < 10 {
                return Err(Error::OrderTooSmall { order: s.order(), min: 10 });
            }
            Ok(ProbeRow { name, roots: s.root_sequence() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn arithmetic_truncates() {
        let a = TruncatedSeries::from_i64(&[1, 1], 3);
        let sq = &a * &a;
        assert_eq!(sq, TruncatedSeries::from_i64(&[1, 2, 1, 0], 3));
        let cube = a.pow(3);
        assert_eq!(cube, TruncatedSeries::from_i64(&[1, 3, 3, 1], 3));
        assert_eq!(a.pow(5).coeff(3), int(10));
        let b = TruncatedSeries::from_i64(&[0, 0, 5], 2);
        assert_eq!((&a + &b).order(), 2);
        assert_eq!(&(&a - &a), &TruncatedSeries::zero(3));
    }

    #[test]
    fn geometric_division() {
        let one = TruncatedSeries::one(6);
        let den = TruncatedSeries::from_i64(&[1, -1], 6);
        let q = one.div(&den).unwrap();
        assert_eq!(q, TruncatedSeries::from_i64(&[1; 7], 6));
        assert!(one.div(&TruncatedSeries::zero(6)).is_err());
    }

    #[test]
    fn derivative_lowers_order() {
        let s = TruncatedSeries::from_i64(&[3, 2, 1, 4], 3);
        assert_eq!(s.derivative(), TruncatedSeries::from_i64(&[2, 2, 12], 2));
    }

    #[test]
    fn evaluation() {
        let s = TruncatedSeries::monomial(2, int(2), 4);
        assert_eq!(s.evaluate(&ratio(1, 2)), ratio(1, 2));
        assert_eq!(s.evaluate_f64(0.5), 0.5);
        assert_eq!(s.evaluate(&int(0)), int(0));
    }

    #[test]
    fn display() {
        let s = TruncatedSeries::new(vec![int(0), int(0), int(2), int(0), ratio(-1, 3)], 5);
        assert_eq!(s.display_with("c1"), "2*c1^2 - 1/3*c1^4 + O(c1^6)");
        assert_eq!(TruncatedSeries::zero(1).display_with("x"), "0 + O(x^2)");
    }

    #[test]
    fn probe_of_geometric_series_is_one() {
        let g = TruncatedSeries::one(12).div(&TruncatedSeries::from_i64(&[1, -1], 12)).unwrap();
        let rows = convergence_probe([("geometric".to_string(), &g)]).unwrap();
        assert!(rows[0].roots.iter().all(|r| (r.unwrap() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn probe_of_factorials_diverges() {
        let mut f = TruncatedSeries::zero(14);
        let mut fact = int(1);
        for k in 0..=14 {
            if k > 0 {
                fact *= int(k as i64);
            }
            f.set_coeff(k, fact.clone());
        }
        let rows = convergence_probe([("factorial".to_string(), &f)]).unwrap();
        let roots: Vec<f64> = rows[0].roots.iter().map(|r| r.unwrap()).collect();
        assert!(roots.windows(2).all(|w| w[1] > w[0]));
        assert!(roots.last().unwrap() > &5.0);
        assert!(convergence_probe([("short".to_string(), &TruncatedSeries::zero(5))]).is_err());
    }
}
