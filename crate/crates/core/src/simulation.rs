//! Runs of the truncated and reduced systems with the bookkeeping that the
//! checks need: mass accounting, front position and truncation adequacy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{front_position, integrate, IntegrationConfig, StepStats, Trajectory};
use crate::model::{auto_n_max, observables, ModelParams, ReducedSystem, TruncatedState, TruncatedSystem};

#[derive(Debug, Clone)]
pub struct TruncatedRun {
    pub params: ModelParams,
    pub n_max: usize,
    /// States are `[c_1..c_N, overflow_count, overflow_mass]`.
    pub trajectory: Trajectory,
}

/// Integrates the truncated system from `initial_c` (padded with zeros).
/// `n_max = None` sizes the truncation from the predicted front.
pub fn simulate_truncated(
    params: &ModelParams,
    initial_c: &[f64],
    n_max: Option<usize>,
    config: &IntegrationConfig,
) -> Result<TruncatedRun> {
    let occupied = initial_c.iter().rposition(|&x| x != 0.0).map_or(0, |k| k + 1);
    let n_max = n_max.unwrap_or_else(|| auto_n_max(params, config.t_end, occupied));
    if initial_c.len() > n_max {
        return Err(Error::DimensionMismatch {
            expected: format!("at most {n_max} initial concentrations"),
            actual: initial_c.len(),
        });
    }
    let system = TruncatedSystem::new(params, n_max)?;
    let mut y0 = vec![0.0; n_max + 2];
    y0[..initial_c.len()].copy_from_slice(initial_c);
    let trajectory = integrate(&system, &y0, config)?;
    Ok(TruncatedRun { params: params.clone(), n_max, trajectory })
}

/// Integrates the reduced system from `(c_1..c_i, y)`.
pub fn simulate_reduced(params: &ModelParams, initial: &[f64], config: &IntegrationConfig) -> Result<Trajectory> {
    integrate(&ReducedSystem::new(params), initial, config)
}

impl TruncatedRun {
    pub fn state(&self, k: usize) -> TruncatedState {
        TruncatedState::from_vector(self.trajectory.times[k], &self.trajectory.states[k])
            .expect("layout fixed by the run")
    }

    pub fn final_state(&self) -> TruncatedState {
        self.state(self.trajectory.len() - 1)
    }

    /// `|mass + overflow_mass − mass(0) − αT| / (αT + 1)` per checkpoint.
    pub fn mass_residuals(&self) -> Vec<f64> {
        let alpha = self.params.alpha_f64();
        let mass = |k: usize| observables(&self.params, &self.state(k)).mass;
        let m0 = if self.trajectory.times.first() == Some(&0.0) { mass(0) } else { f64::NAN };
        (0..self.trajectory.len())
            .map(|k| {
                let t = self.trajectory.times[k];
                (mass(k) - m0 - alpha * t).abs() / (alpha * t + 1.0)
            })
            .collect()
    }

    /// Largest `j` with `c_j > threshold · c_i` in state `k`.
    pub fn largest_populated(&self, k: usize, threshold: f64) -> usize {
        let c = &self.trajectory.states[k][..self.n_max];
        let reference = c[self.params.i - 1];
        c.iter().rposition(|&x| x > threshold * reference).map_or(0, |p| p + 1)
    }

    pub fn summary(&self) -> RunSummary {
        let residuals = self.mass_residuals();
        let front = front_position(&self.trajectory, self.params.i);
        let last = self.trajectory.len() - 1;
        let final_front = front[last];
        let overflow_mass = self.final_state().overflow_mass;
        RunSummary {
            i: self.params.i,
            alpha: crate::rational::format(&self.params.alpha),
            n_max: self.n_max,
            t_end: self.trajectory.times[last],
            checkpoints: self.trajectory.len(),
            stats: self.trajectory.stats,
            max_mass_residual: residuals.iter().copied().fold(0.0, f64::max),
            front_position: final_front,
            largest_populated: self.largest_populated(last, 1e-8),
            overflow_mass,
            truncation_adequate: truncation_adequate(self.n_max, final_front, overflow_mass),
        }
    }
}

/// `N_max` should exceed the front with a buffer of `10√front + 20`, and no
/// measurable mass may have left through the boundary.
pub fn truncation_adequate(n_max: usize, front: f64, overflow_mass: f64) -> bool {
    (n_max as f64) > front + 10.0 * front.max(0.0).sqrt() + 20.0 && overflow_mass <= 1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub i: usize,
    pub alpha: String,
    pub n_max: usize,
    pub t_end: f64,
    pub checkpoints: usize,
    pub stats: StepStats,
    pub max_mass_residual: f64,
    pub front_position: f64,
    pub largest_populated: usize,
    pub overflow_mass: f64,
    pub truncation_adequate: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn short_run_conserves_mass() {
        let params = ModelParams::scaled(2, int(1)).unwrap();
        let config = IntegrationConfig::new(50.0);
        let run = simulate_truncated(&params, &[], None, &config).unwrap();
        assert!(run.mass_residuals().iter().all(|r| *r < 1e-9));
        let s = run.summary();
        assert!(s.truncation_adequate);
        assert!(s.largest_populated > 2);
    }

    #[test]
    fn zero_horizon_echoes_initial_state() {
        let params = ModelParams::scaled(3, int(1)).unwrap();
        let run = simulate_truncated(&params, &[0.5, 0.1], Some(10), &IntegrationConfig::new(0.0)).unwrap();
        assert_eq!(run.trajectory.len(), 1);
        assert_eq!(&run.trajectory.states[0][..3], &[0.5, 0.1, 0.0]);
    }

    #[test]
    fn rejects_too_small_truncation() {
        let params = ModelParams::scaled(3, int(1)).unwrap();
        assert!(simulate_truncated(&params, &[], Some(4), &IntegrationConfig::new(1.0)).is_err());
    }
}
