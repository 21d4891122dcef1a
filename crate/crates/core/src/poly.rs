//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational, Scalar};
use crate::series::TruncatedSeries;

pub type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Terms of total degree exactly one.
    pub fn linear_part(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == 1 {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Coefficient of the linear monomial in variable `index`.
    pub fn linear_coeff(&self, index: usize) -> Rational {
        let mut e = vec![0; self.nvars];
        e[index] = 1;
        self.coeff(&e)
    }

    /// Exact quotient by variable `index`, or `None` if some term lacks it.
    pub fn div_by_var(&self, index: usize) -> Option<Self> {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[index] == 0 {
                return None;
            }
            let mut e = e.clone();
            e[index] -= 1;
            out.add_term(e, c.clone());
        }
        Some(out)
    }

    pub fn max_degree(&self, index: usize) -> u32 {
        self.terms.keys().map(|e| e[index]).max().unwrap_or(0)
    }

    pub fn evaluate<T: Scalar>(&self, point: &[T]) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut term = T::from_rational(c);
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Replaces every variable by a series and expands to `order`.
    pub fn substitute(&self, series: &[TruncatedSeries], order: usize) -> TruncatedSeries {
        debug_assert_eq!(series.len(), self.nvars);
        let powers: Vec<Vec<TruncatedSeries>> = series
            .iter()
            .enumerate()
            .map(|(v, s)| {
                let s = s.truncate(order);
                let mut list = vec![TruncatedSeries::one(order)];
                for _ in 0..self.max_degree(v) {
                    let next = list.last().unwrap().mul_to(&s, order);
                    list.push(next);
                }
                list
            })
            .collect();
        let mut acc = TruncatedSeries::zero(order);
        for (e, c) in &self.terms {
            let mut term = TruncatedSeries::monomial(0, c.clone(), order);
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul_to(&powers[v][k as usize], order);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        let mut out = String::new();
        // Highest total degree first reads more naturally.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(e, _)| std::cmp::Reverse(e.iter().sum::<u32>()));
        for (e, c) in terms {
            let negative = c.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            let monomial: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k > 0)
                .map(|(&k, n)| if k == 1 { n.to_string() } else { format!("{n}^{k}") })
                .collect();
            match (mag.is_one(), monomial.is_empty()) {
                (_, true) => out.push_str(&rational::format(&mag)),
                (true, false) => out.push_str(&monomial.join("*")),
                (false, false) => {
                    out.push_str(&format!("{}*{}", rational::format(&mag), monomial.join("*")))
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|k| format!("x{k}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.display_with(&refs))
    }
}
