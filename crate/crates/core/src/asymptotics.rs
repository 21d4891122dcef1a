//! Leading-order large-time laws and the tools that compare simulations to them.

use serde::Serialize;
use serde_json::{json, Value};

use crate::centre_manifold::CentreManifoldExpansion;
use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::ModelParams;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "j", rename_all = "snake_case")]
pub enum Quantity {
    Monomer,
    /// `1 ≤ j ≤ i`; `j = 1` coincides with the monomer law.
    Subcritical(usize),
    /// `j > i`.
    Tail(usize),
    MeanSize,
}

/// `amplitude · t^exponent` in physical units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticLaw {
    pub quantity: Quantity,
    pub amplitude: f64,
    #[serde(serialize_with = "ser_rational")]
    pub exponent: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    rational::serde_string::serialize(r, s)
}

impl AsymptoticLaw {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.amplitude * t.powf(rational::to_f64(&self.exponent))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "quantity": self.quantity,
            "amplitude": self.amplitude,
            "exponent": rational::format(&self.exponent),
        })
    }
}

pub fn leading_law(params: &ModelParams, quantity: Quantity) -> Result<AsymptoticLaw> {
    let i = params.i;
    let ip2 = (i + 2) as f64;
    let at = params.alpha_tilde_f64();
    let b = params.beta_f64();
    let (base, power, exponent) = match quantity {
        Quantity::Monomer => {
            (at * b.powi(i as i32 - 1) / ip2, 1.0 / ip2, rational::ratio(-1, i as i64 + 2))
        }
        Quantity::Subcritical(j) => {
            if j == 0 || j > i {
                return Err(Error::OutOfRange(format!("subcritical law needs 1 ≤ j ≤ {i} (got {j})")));
            }
            let jf = j as f64;
            let beta_power = (i as f64 - 3.0 * jf + 2.0) / jf;
            (at * b.powf(beta_power) / ip2, jf / ip2, rational::ratio(-(j as i64), i as i64 + 2))
        }
        Quantity::Tail(j) => {
            if j <= i {
                return Err(Error::OutOfRange(format!("tail law needs j > {i} (got {j})")));
            }
            let beta_power = (2.0 - 2.0 * i as f64) / i as f64;
            (at * b.powf(beta_power) / ip2, i as f64 / ip2, rational::ratio(-(i as i64), i as i64 + 2))
        }
        Quantity::MeanSize => (
            at * b.powi(i as i32 - 1) / ip2,
            1.0 / ip2,
            rational::ratio(i as i64 + 1, i as i64 + 2),
        ),
    };
    Ok(AsymptoticLaw { quantity, amplitude: base.powf(power), exponent })
}

/// `Ψ(r) = (1 − r)^{−i/(i+1)}` for `r < 1`, else 0.
pub fn psi(i: usize, r: f64) -> f64 {
    if r < 1.0 {
        (1.0 - r).powf(-(i as f64) / (i as f64 + 1.0))
    } else {
        0.0
    }
}

/// `η = ((i+1)/(i+2)) β^{−(i+1)/(i+2)} j/⟨j⟩`.
pub fn eta(params: &ModelParams, j: f64, mean_size: f64) -> Result<f64> {
    if !(mean_size > 0.0) {
        return Err(Error::OutOfRange(format!("mean size must be positive (got {mean_size})")));
    }
    let i = params.i as f64;
    let prefactor = (i + 1.0) / (i + 2.0) * params.beta_f64().powf(-(i + 1.0) / (i + 2.0));
    Ok(prefactor * j / mean_size)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub j: usize,
    pub eta: f64,
    pub concentration: f64,
    /// `⟨j⟩^{i/(i+1)} C_j`.
    pub scaled: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilaritySnapshot {
    pub time: f64,
    pub mean_size: f64,
    pub points: Vec<ProfilePoint>,
}

/// Profile of `concentrations[j-1] = C_j` at `time`.
pub fn similarity_snapshot(
    params: &ModelParams,
    concentrations: &[f64],
    time: f64,
) -> Result<SimilaritySnapshot> {
    let number: f64 = concentrations.iter().sum();
    if concentrations.is_empty() || !(number > 0.0) {
        return Err(Error::EmptyState);
    }
    let mass: f64 = concentrations.iter().enumerate().map(|(k, c)| (k + 1) as f64 * c).sum();
    let mean_size = mass / number;
    let i = params.i as f64;
    let weight = mean_size.powf(i / (i + 1.0));
    let points = concentrations
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let j = k + 1;
            let e = eta(params, j as f64, mean_size)?;
            Ok(ProfilePoint { j, eta: e, concentration: c, scaled: weight * c, psi: psi(params.i, e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimilaritySnapshot { time, mean_size, points })
}

impl SimilaritySnapshot {
    /// Largest `|scaled/(factor·Ψ(η)) − 1|` over points with `η` in `[lo, hi]`.
    pub fn max_relative_deviation(&self, lo: f64, hi: f64, factor: f64) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.eta >= lo && p.eta <= hi)
            .map(|p| (p.scaled / (factor * p.psi) - 1.0).abs())
            .reduce(f64::max)
    }
}

/// Amplitude that the scaled tail carries in the scaled variables:
/// `C_j ≈ (α/(i+2))^{i/(i+1)} ⟨j⟩^{−i/(i+1)} Ψ(η)` when `β = 1`.
pub fn mass_consistent_amplitude(i: usize, alpha: f64) -> f64 {
    (alpha / (i as f64 + 2.0)).powf(i as f64 / (i as f64 + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    /// `ln` of the fitted amplitude.
    pub intercept: f64,
    pub points: usize,
}

fn window_logs(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len().to_string(),
            actual: values.len(),
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) || !(t > 0.0) {
            return Err(Error::NonPositiveValue { value: v, time: t });
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    if xs.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} points in [{}, {}], need at least 5",
            xs.len(),
            window.0,
            window.1
        )));
    }
    Ok((xs, ys))
}

/// Least-squares fit of `ln v` against `ln t` over `window`.
pub fn fit_power_law(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<PowerFit> {
    let (xs, ys) = window_logs(times, values, window)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all times in the window coincide".into()));
    }
    let slope = sxy / sxx;
    Ok(PowerFit { slope, intercept: my - slope * mx, points: xs.len() })
}

pub fn slope_fit(trajectory: &Trajectory, component: usize, window: (f64, f64)) -> Result<PowerFit> {
    let values = trajectory.component(component);
    fit_power_law(&trajectory.times, &values, window)
}

/// Geometric mean of `v·t^{−exponent}` over `window`: the amplitude with the
/// exponent held at its predicted value.
pub fn fixed_exponent_amplitude(
    times: &[f64],
    values: &[f64],
    exponent: f64,
    window: (f64, f64),
) -> Result<f64> {
    let (xs, ys) = window_logs(times, values, window)?;
    let mean = xs.iter().zip(&ys).map(|(x, y)| y - exponent * x).sum::<f64>() / xs.len() as f64;
    Ok(mean.exp())
}

/// `|c_j − g_j(c_1)| / c_1^j` for `j = 2..i`, with `c = (c_1, …)` in scaled units.
pub fn cm_distance(c: &[f64], expansion: &CentreManifoldExpansion) -> Result<Vec<f64>> {
    let i = expansion.i;
    if c.len() < i {
        return Err(Error::DimensionMismatch { expected: format!("at least {i}"), actual: c.len() });
    }
    let c1 = c[0];
    if !(c1 > 0.0) {
        return Err(Error::NonPositiveValue { value: c1, time: f64::NAN });
    }
    Ok((2..=i)
        .map(|j| (c[j - 1] - expansion.g(j).evaluate_f64(c1)).abs() / c1.powi(j as i32))
        .collect())
}

/// `c_j / c_1^j` for `j = 2..i`.
pub fn subcritical_ratios(c: &[f64], i: usize) -> Vec<f64> {
    (2..=i).map(|j| c[j - 1] / c[0].powi(j as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centre_manifold::expand;
    use crate::rational::int;

    fn unit(i: usize) -> ModelParams {
        ModelParams::scaled(i, int(1)).unwrap()
    }

    #[test]
    fn monomer_law_i2() {
        let law = leading_law(&unit(2), Quantity::Monomer).unwrap();
        assert_eq!(law.exponent, rational::ratio(-1, 4));
        assert!((law.amplitude - 0.25f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn lemma3_limits() {
        let p = ModelParams::new(4, rational::ratio(3, 2), rational::ratio(5, 3)).unwrap();
        let mono = leading_law(&p, Quantity::Monomer).unwrap();
        let sub1 = leading_law(&p, Quantity::Subcritical(1)).unwrap();
        assert!((mono.amplitude / sub1.amplitude - 1.0).abs() < 1e-14);
        let subi = leading_law(&p, Quantity::Subcritical(4)).unwrap();
        let tail = leading_law(&p, Quantity::Tail(9)).unwrap();
        assert_eq!(subi.exponent, tail.exponent);
        assert!((subi.amplitude / tail.amplitude - 1.0).abs() < 1e-14);
        assert!(leading_law(&p, Quantity::Subcritical(5)).is_err());
        assert!(leading_law(&p, Quantity::Tail(4)).is_err());
    }

    #[test]
    fn tail_amplitude_independent_of_j() {
        let p = ModelParams::new(3, int(2), int(3)).unwrap();
        let a = leading_law(&p, Quantity::Tail(4)).unwrap();
        let b = leading_law(&p, Quantity::Tail(400)).unwrap();
        assert_eq!(a.amplitude, b.amplitude);
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(2, 0.0), 1.0);
        assert_eq!(psi(2, 1.5), 0.0);
        assert_eq!(psi(2, 1.0), 0.0);
        assert!((psi(3, 15.0 / 16.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn eta_values() {
        let p = unit(2);
        assert!((eta(&p, 10.0, 10.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(eta(&p, 0.0, 10.0).unwrap(), 0.0);
        assert!(eta(&p, 1.0, 0.0).is_err());
        let a = eta(&p, 3.0, 7.0).unwrap();
        let b = eta(&p, 6.0, 7.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn snapshot_of_monomers() {
        let s = similarity_snapshot(&unit(2), &[0.3, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(s.mean_size, 1.0);
        assert!(similarity_snapshot(&unit(2), &[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn fits() {
        let times: Vec<f64> = (0..20).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
        let values: Vec<f64> = times.iter().map(|t| 3.0 * t.powf(-0.25)).collect();
        let fit = fit_power_law(&times, &values, (1.0, 1e5)).unwrap();
        assert!((fit.slope + 0.25).abs() < 1e-12);
        let amp = fixed_exponent_amplitude(&times, &values, -0.25, (1.0, 1e5)).unwrap();
        assert!((amp - 3.0).abs() < 1e-12);
        let flat = vec![2.0; times.len()];
        assert!(fit_power_law(&times, &flat, (1.0, 1e5)).unwrap().slope.abs() < 1e-12);
        assert!(fit_power_law(&times, &values, (1.0, 2.0)).is_err());
        let mut bad = values.clone();
        bad[3] = 0.0;
        assert!(matches!(fit_power_law(&times, &bad, (1.0, 1e5)), Err(Error::NonPositiveValue { .. })));
    }

    #[test]
    fn distance_to_manifold() {
        let e = expand(2, &int(1), &int(1), 10).unwrap();
        let c1 = 0.05;
        let c2 = e.g(2).evaluate_f64(c1);
        let d = cm_distance(&[c1, c2], &e).unwrap();
        assert!(d[0] < 1e-15);
        let d = cm_distance(&[c1, 2.0 * c2], &e).unwrap();
        assert!((d[0] - 1.0).abs() < 0.06);
        assert!(cm_distance(&[0.0, 0.0], &e).is_err());
    }
}
