//! Centre-manifold expansion of the reduced system about the origin.
//!
//! In the variables `(c_1, …, c_i, w)` with `w = v + 2βc_2 + βΣ_{k=3}^i c_k` and
//! time `τ` (`dτ = c_1 dT`), the reduced system is polynomial and the origin is a
//! rest point. The centre manifold is the graph `c_j = g_j(c_1)`, `w = g_w(c_1)`,
//! and on it `c_1' = g_w(c_1) − 2c_1²` in the original time.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::series::{self, ProbeRow, TruncatedSeries};

/// Desingularised right-hand sides, one polynomial per variable
/// `c_1, c_2, …, c_i, w`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialField {
    pub i: usize,
    pub alpha: Rational,
    pub beta: Rational,
    pub components: Vec<Poly>,
}

impl PolynomialField {
    pub fn nvars(&self) -> usize {
        self.i + 1
    }

    /// Variable index of `c_j`.
    pub fn c_index(j: usize) -> usize {
        j - 1
    }

    pub fn w_index(&self) -> usize {
        self.i
    }

    pub fn c_component(&self, j: usize) -> &Poly {
        &self.components[Self::c_index(j)]
    }

    pub fn w_component(&self) -> &Poly {
        &self.components[self.i]
    }

    pub fn variable_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.i).map(|j| format!("c{j}")).collect();
        names.push("w".into());
        names
    }

    pub fn display_component(&self, index: usize) -> String {
        let names = self.variable_names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        self.components[index].display_with(&refs)
    }

    /// Checks the structural invariants: `c_1` component is `c_1(w − 2c_1²)` and
    /// every `c_j` component is `c_1` times a polynomial linear in the `c`s.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.nvars();
        let c1 = Poly::var(n, 0);
        let w = Poly::var(n, self.i);
        let expected = c1.mul(&w.sub(&c1.mul(&c1).scale(&rational::int(2))));
        if self.components[0] != expected {
            return Err(Error::InvalidConfig("c1 component is not c1(w - 2c1^2)".into()));
        }
        for j in 2..=self.i {
            let inner = self.c_component(j).div_by_var(0).ok_or_else(|| {
                Error::InvalidConfig(format!("c{j} component is not divisible by c1"))
            })?;
            let linear_in_c = inner
                .terms()
                .all(|(e, _)| e[self.i] == 0 && e[..self.i].iter().sum::<u32>() <= 2);
            let affine_after_c1 = inner.terms().all(|(e, _)| e[1..self.i].iter().sum::<u32>() <= 1);
            if !(linear_in_c && affine_after_c1) {
                return Err(Error::InvalidConfig(format!("c{j} component is not c1 times a linear form")));
            }
        }
        Ok(())
    }

    /// Linear part of the `c_2..c_i` equations in the original time, as a matrix
    /// acting on `(c_2, …, c_i)`.
    pub fn stable_block(&self) -> Vec<Vec<Rational>> {
        (2..=self.i)
            .map(|j| {
                let original = self.c_component(j).div_by_var(0).expect("checked structure");
                (2..=self.i).map(|k| original.linear_coeff(Self::c_index(k))).collect()
            })
            .collect()
    }
}

/// Eigenvalues of a triangular matrix, or `None` if it is not triangular.
pub fn triangular_spectrum(m: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let n = m.len();
    let upper = (0..n).all(|r| (0..r).all(|c| m[r][c].is_zero()));
    let lower = (0..n).all(|r| (r + 1..n).all(|c| m[r][c].is_zero()));
    (upper || lower).then(|| (0..n).map(|k| m[k][k].clone()).collect())
}

/// Builds the desingularised field for general `i`, `α`, `β`.
pub fn build_field(i: usize, alpha: &Rational, beta: &Rational) -> Result<PolynomialField> {
    if i < 2 {
        return Err(Error::CriticalSizeTooSmall(i));
    }
    if !alpha.is_positive() {
        return Err(Error::NonPositiveRate { name: "alpha", value: rational::format(alpha) });
    }
    if !beta.is_positive() {
        return Err(Error::NonPositiveRate { name: "beta", value: rational::format(beta) });
    }
    let n = i + 1;
    let k = |r: &Rational| Poly::constant(n, r.clone());
    let two = rational::int(2);
    let c = |j: usize| {
        if j <= i {
            Poly::var(n, j - 1)
        } else {
            Poly::zero(n)
        }
    };
    let c1 = c(1);
    let w = Poly::var(n, i);
    let b = k(beta);
    let a = k(alpha);
    let c1sq = c1.mul(&c1);

    let mut higher = Poly::zero(n);
    for j in 3..=i {
        higher = higher.add(&c(j));
    }
    let v = w.sub(&b.mul(&c(2)).scale(&two)).sub(&b.mul(&higher));

    // c_1 z = α − v keeps every equation polynomial.
    let c1z = a.sub(&v);
    let eqc1 = a
        .sub(&c1sq.scale(&two))
        .add(&b.mul(&c(2)).scale(&two))
        .add(&b.mul(&higher))
        .sub(&c1z);
    let eqc: Vec<Poly> = (2..=i)
        .map(|j| {
            c1.mul(&c(j - 1))
                .sub(&c1.mul(&c(j)))
                .sub(&b.mul(&c(j)))
                .add(&b.mul(&c(j + 1)))
        })
        .collect();
    let eqz = c1sq.sub(&b.mul(&c(2)));

    let eqvs = eqc1.mul(&c1z).scale(&-Rational::one()).sub(&c1sq.mul(&eqz));
    let mut eqws = eqvs.add(&b.mul(&c1).mul(&eqc[0]).scale(&two));
    for eq in &eqc[1..] {
        eqws = eqws.add(&b.mul(&c1).mul(eq));
    }

    let mut components = vec![c1.mul(&eqc1)];
    components.extend(eqc.iter().map(|e| c1.mul(e)));
    components.push(eqws);
    Ok(PolynomialField { i, alpha: alpha.clone(), beta: beta.clone(), components })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentreManifoldExpansion {
    pub i: usize,
    pub alpha: Rational,
    pub beta: Rational,
    pub order: usize,
    /// `g[j - 2]` is `g_j`.
    pub g: Vec<TruncatedSeries>,
    pub g_w: TruncatedSeries,
    pub reduced_ode: TruncatedSeries,
}

impl CentreManifoldExpansion {
    pub fn g(&self, j: usize) -> &TruncatedSeries {
        &self.g[j - 2]
    }

    /// `c1' ~ …` with the instantiated coefficients.
    pub fn ode_string(&self) -> String {
        format!("c1' ~ {}", self.reduced_ode.display_with("c1"))
    }

    pub fn to_json(&self) -> Value {
        let mut series = Map::new();
        for j in 2..=self.i {
            series.insert(format!("g{j}"), json!(self.g(j).to_strings()));
        }
        series.insert("gw".into(), json!(self.g_w.to_strings()));
        json!({
            "params": {
                "i": self.i,
                "alpha": rational::format(&self.alpha),
                "beta": rational::format(&self.beta),
                "n": self.order,
            },
            "series": Value::Object(series),
            "reduced_ode": self.reduced_ode.to_strings(),
            "ode": self.ode_string(),
        })
    }

    pub fn convergence_probe(&self) -> Result<Vec<ProbeRow>> {
        let mut named: Vec<(String, &TruncatedSeries)> =
            (2..=self.i).map(|j| (format!("g{j}"), self.g(j))).collect();
        named.push(("gw".into(), &self.g_w));
        named.push(("reduced_ode".into(), &self.reduced_ode));
        series::convergence_probe(named)
    }
}

pub fn default_order(i: usize) -> usize {
    2 * i + 6
}

/// Per-variable record of the pivots met while solving.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PivotLog {
    pub w: Vec<String>,
    pub c: Vec<String>,
}

fn current_series(i: usize, g: &[TruncatedSeries], g_w: &TruncatedSeries) -> Vec<TruncatedSeries> {
    let order = g_w.order();
    let mut s = vec![TruncatedSeries::monomial(1, Rational::one(), order)];
    s.extend(g.iter().cloned());
    s.push(g_w.clone());
    debug_assert_eq!(s.len(), i + 1);
    s
}

/// Coefficient at `power` of `c_1(g_w − 2c_1²)·X' − F_X(c_1, g)` for variable `var`.
fn residual_coeff(
    field: &PolynomialField,
    var: usize,
    series: &[TruncatedSeries],
    power: usize,
) -> Rational {
    let order = power;
    let gw = &series[field.i];
    let c1 = TruncatedSeries::monomial(1, Rational::one(), order);
    let speed = c1.mul_to(
        &(&gw.truncate(order) - &TruncatedSeries::monomial(2, rational::int(2), order)),
        order,
    );
    let dx = series[var].derivative();
    let lhs = speed.mul_to(&TruncatedSeries::new(dx.coefficients().to_vec(), order), order);
    let rhs = field.components[var].substitute(series, order);
    lhs.coeff(power) - rhs.coeff(power)
}

/// Solves the invariance equations order by order up to `n`.
pub fn solve_centre_manifold(field: &PolynomialField, n: usize) -> Result<CentreManifoldExpansion> {
    solve_with_log(field, n).map(|(e, _)| e)
}

pub fn solve_with_log(
    field: &PolynomialField,
    n: usize,
) -> Result<(CentreManifoldExpansion, PivotLog)> {
    if n < 2 {
        return Err(Error::OrderTooSmall { order: n, min: 2 });
    }
    let i = field.i;
    // One extra order so that c_j at order n can be read off at power n + 1.
    let work = n + 1;
    let mut g = vec![TruncatedSeries::zero(work); i - 1];
    let mut g_w = TruncatedSeries::zero(work);
    let mut log = PivotLog { w: Vec::new(), c: Vec::new() };

    for k in 2..=n {
        // γ_{w,k}: the −αw term gives pivot +α at power k.
        let solve = |var: usize,
                     power: usize,
                     expected: &Rational,
                     name: String,
                     set: &mut dyn FnMut(Rational) -> Vec<TruncatedSeries>|
         -> Result<Rational> {
            let r0 = residual_coeff(field, var, &set(Rational::zero()), power);
            let r1 = residual_coeff(field, var, &set(Rational::one()), power);
            let pivot = &r1 - &r0;
            if pivot.is_zero() {
                return Err(Error::ZeroPivot { variable: name, order: k });
            }
            if &pivot != expected {
                return Err(Error::UnexpectedPivot {
                    variable: name,
                    order: k,
                    found: rational::format(&pivot),
                    expected: rational::format(expected),
                });
            }
            Ok(-r0 / pivot)
        };

        let gamma = {
            let g_ref = &g;
            let mut set = |x: Rational| {
                let mut trial = g_w.clone();
                trial.set_coeff(k, x);
                current_series(i, g_ref, &trial)
            };
            solve(i, k, &field.alpha, format!("gamma_w,{k}"), &mut set)?
        };
        g_w.set_coeff(k, gamma);
        log.w.push(rational::format(&field.alpha));

        for j in (2..=i).rev() {
            let gamma = {
                let g_w_ref = &g_w;
                let g_ref = &g;
                let mut set = |x: Rational| {
                    let mut trial = g_ref.clone();
                    trial[j - 2].set_coeff(k, x);
                    current_series(i, &trial, g_w_ref)
                };
                solve(j - 1, k + 1, &field.beta, format!("gamma_{j},{k}"), &mut set)?
            };
            g[j - 2].set_coeff(k, gamma);
            log.c.push(rational::format(&field.beta));
        }
    }

    let g: Vec<TruncatedSeries> = g.iter().map(|s| s.truncate(n)).collect();
    let g_w = g_w.truncate(n);
    let reduced_ode = &g_w - &TruncatedSeries::monomial(2, rational::int(2), n);
    let expansion = CentreManifoldExpansion {
        i,
        alpha: field.alpha.clone(),
        beta: field.beta.clone(),
        order: n,
        g,
        g_w,
        reduced_ode,
    };
    Ok((expansion, log))
}

/// `g_w − 2c_1²`.
pub fn reduced_ode(expansion: &CentreManifoldExpansion) -> TruncatedSeries {
    expansion.reduced_ode.clone()
}

/// Builds the field and solves it to `n`.
pub fn expand(i: usize, alpha: &Rational, beta: &Rational, n: usize) -> Result<CentreManifoldExpansion> {
    if n < 2 {
        return Err(Error::OrderTooSmall { order: n, min: 2 });
    }
    solve_centre_manifold(&build_field(i, alpha, beta)?, n)
}

/// Invariance residuals in the original time, one per `c_j` (`j = 2..i`) and
/// one for `w`. Each vanishes through order `n − 1` for a solved expansion.
pub fn invariance_residuals(
    field: &PolynomialField,
    e: &CentreManifoldExpansion,
) -> Vec<TruncatedSeries> {
    let n = e.order;
    let i = e.i;
    let c1 = TruncatedSeries::monomial(1, Rational::one(), n);
    let speed = &e.g_w - &TruncatedSeries::monomial(2, rational::int(2), n);
    let beta = TruncatedSeries::monomial(0, e.beta.clone(), n);
    let g_at = |j: usize| -> TruncatedSeries {
        match j {
            1 => c1.clone(),
            j if j <= i => e.g(j).clone(),
            _ => TruncatedSeries::zero(n),
        }
    };
    let mut out: Vec<TruncatedSeries> = (2..=i)
        .map(|j| {
            let lhs = TruncatedSeries::new(g_at(j).derivative().coefficients().to_vec(), n)
                .mul_to(&speed, n);
            let rhs = &(&(&c1 * &g_at(j - 1)) - &(&c1 * &g_at(j))) - &(&beta * &g_at(j));
            let rhs = &rhs + &(&beta * &g_at(j + 1));
            &lhs - &rhs
        })
        .collect();
    let series = current_series(i, &e.g, &e.g_w);
    let lhs = c1
        .mul_to(&speed, n)
        .mul_to(&TruncatedSeries::new(e.g_w.derivative().coefficients().to_vec(), n), n);
    let rhs = field.w_component().substitute(&series, n);
    out.push(&lhs - &rhs);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn series(coeffs: &[i64], n: usize) -> TruncatedSeries {
        TruncatedSeries::from_i64(coeffs, n)
    }

    #[test]
    fn field_structure() {
        for i in 2..=6 {
            let f = build_field(i, &ratio(3, 2), &ratio(5, 7)).unwrap();
            f.check_structure().unwrap();
            assert_eq!(f.w_component().linear_part(), Poly::var(i + 1, i).scale(&ratio(-3, 2)));
            let origin = vec![int(0); i + 1];
            assert!(f.components.iter().all(|p| p.evaluate(&origin).is_zero()));
        }
    }

    #[test]
    fn last_subcritical_line() {
        let f = build_field(2, &int(1), &int(1)).unwrap();
        let n = 3;
        let c1 = Poly::var(n, 0);
        let c2 = Poly::var(n, 1);
        let expected = c1.mul(&c1.mul(&c1).sub(&c1.mul(&c2)).sub(&c2));
        assert_eq!(f.c_component(2), &expected);
    }

    #[test]
    fn gj_for_i3() {
        let e = expand(3, &ratio(2, 5), &int(1), 7).unwrap();
        assert_eq!(e.g(2).truncate(6), series(&[0, 0, 1, 0, -1, 1, 0], 6));
        assert_eq!(e.g(3).truncate(6), series(&[0, 0, 0, 1, -1, 0, 1], 6));
    }

    #[test]
    fn gw_for_i3() {
        for alpha in [int(1), ratio(3, 4), int(5)] {
            let e = expand(3, &alpha, &int(1), 10).unwrap();
            let inv = alpha.recip();
            let mut expected = TruncatedSeries::zero(9);
            expected.set_coeff(2, int(2));
            expected.set_coeff(6, -inv.clone());
            expected.set_coeff(7, inv.clone());
            expected.set_coeff(9, -inv.clone());
            assert_eq!(e.g_w.truncate(9), expected);
        }
    }

    #[test]
    fn i5_unit_parameters() {
        let e = expand(5, &int(1), &int(1), 15).unwrap();
        let got: Vec<Rational> = (8..=15).map(|k| e.reduced_ode.coeff(k)).collect();
        let want: Vec<Rational> = [-1, 1, 0, 0, 0, -1, 31, -80].iter().map(|&x| int(x)).collect();
        assert_eq!(got, want);
        assert!((0..8).all(|k| e.reduced_ode.coeff(k).is_zero()));
    }

    #[test]
    fn reduced_ode_i2_and_evaluation() {
        let e = expand(2, &int(1), &int(1), 7).unwrap();
        assert_eq!(e.reduced_ode, series(&[0, 0, 0, 0, 0, -1, 1, -1], 7));
        let x = ratio(1, 10);
        let expected = -pow10(5) + pow10(6) - pow10(7);
        assert_eq!(e.reduced_ode.evaluate(&x), expected);
        assert!(e.g(2).evaluate(&int(0)).is_zero());
    }

    fn pow10(k: usize) -> Rational {
        rational::pow(&ratio(1, 10), k)
    }

    #[test]
    fn residuals_vanish() {
        for (i, alpha, beta) in [(2, ratio(1, 3), int(2)), (4, int(3), ratio(2, 5))] {
            let f = build_field(i, &alpha, &beta).unwrap();
            let e = solve_centre_manifold(&f, 12).unwrap();
            for r in invariance_residuals(&f, &e) {
                assert!((0..12).all(|k| r.coeff(k).is_zero()), "{r}");
            }
        }
    }

    #[test]
    fn pivots_are_alpha_and_beta() {
        let f = build_field(3, &ratio(7, 3), &ratio(2, 9)).unwrap();
        let (_, log) = solve_with_log(&f, 6).unwrap();
        assert!(log.w.iter().all(|p| p == "7/3"));
        assert!(log.c.iter().all(|p| p == "2/9"));
        assert_eq!(log.c.len(), 2 * 5);
    }

    #[test]
    fn order_validation() {
        assert!(matches!(expand(3, &int(1), &int(1), 1), Err(Error::OrderTooSmall { .. })));
        assert!(build_field(1, &int(1), &int(1)).is_err());
        assert!(build_field(2, &int(0), &int(1)).is_err());
    }

    #[test]
    fn stable_block_is_bidiagonal() {
        let f = build_field(4, &int(1), &ratio(3, 2)).unwrap();
        let a = f.stable_block();
        assert_eq!(a[0], vec![ratio(-3, 2), ratio(3, 2), int(0)]);
        assert_eq!(a[2], vec![int(0), int(0), ratio(-3, 2)]);
        assert_eq!(triangular_spectrum(&a).unwrap(), vec![ratio(-3, 2); 3]);
    }

    #[test]
    fn json_layout() {
        let e = expand(2, &int(1), &int(1), 6).unwrap();
        let v = e.to_json();
        assert_eq!(v["params"]["i"], 2);
        assert_eq!(v["series"]["g2"][2], "1");
        assert_eq!(v["reduced_ode"].as_array().unwrap().len(), 7);
        assert_eq!(e.ode_string(), "c1' ~ -c1^5 + c1^6 + O(c1^7)");
    }
}
