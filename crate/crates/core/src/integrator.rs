//! Adaptive Dormand–Prince 5(4) integration with checkpointing.
//!
//! Two quadratures ride along as extra state components so that they share the
//! error control of the dynamics: `ρ(T) = ∫ c_1` and `τ(T) = ∫ 1/c_1`, where
//! `c_1` is component 0 of the field. `τ` only starts accumulating at
//! `tau_origin`; from empty initial data `∫ 1/c_1` diverges at `T = 0`.
//!
//! Checkpoints are reached by shortening the step that would cross them, never by
//! interpolation, so repeated runs are bit-identical.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);

    /// Components that are zero in `y` and stay zero through every stage of a
    /// seven-stage step taken from `y`. The integrator skips them.
    fn dormant(&self, _y: &[f64]) -> Range<usize> {
        0..0
    }
}

/// Adapter for closures `f(t, y, dy)`.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64])> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64])> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.f)(t, y, dy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    /// Output times, ascending, inside `[0, t_end]`.
    pub checkpoints: Vec<f64>,
    pub max_steps: usize,
    pub negativity_floor: f64,
    /// Time from which `τ` accumulates when `c_1(0) = 0`.
    pub tau_origin: f64,
    pub max_step: Option<f64>,
}

impl IntegrationConfig {
    pub const DEFAULT_RTOL: f64 = 1e-8;
    pub const DEFAULT_ATOL: f64 = 1e-12;
    pub const DEFAULT_NEGATIVITY_FLOOR: f64 = 1e-12;

    /// Defaults with checkpoints at `0` and `t_end`.
    pub fn new(t_end: f64) -> Self {
        let checkpoints = if t_end > 0.0 { vec![0.0, t_end] } else { vec![0.0] };
        Self {
            rtol: Self::DEFAULT_RTOL,
            atol: Self::DEFAULT_ATOL,
            t_end,
            checkpoints,
            max_steps: 20_000_000,
            negativity_floor: Self::DEFAULT_NEGATIVITY_FLOOR,
            tau_origin: 1.0,
            max_step: None,
        }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<f64>) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad(format!("tolerances must be positive (rtol {}, atol {})", self.rtol, self.atol));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be finite and ≥ 0 (got {})", self.t_end));
        }
        if self.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return bad("checkpoints must be strictly ascending".into());
        }
        if self.checkpoints.iter().any(|&t| !(0.0..=self.t_end).contains(&t)) {
            return bad(format!("checkpoints must lie in [0, {}]", self.t_end));
        }
        if self.negativity_floor < 0.0 {
            return bad("negativity floor must be ≥ 0".into());
        }
        if self.max_step.is_some_and(|h| h <= 0.0) {
            return bad("max_step must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    /// Zero before `tau_origin`.
    pub tau: Vec<f64>,
    pub tau_origin: f64,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    /// Index of the checkpoint closest to `t`.
    pub fn nearest(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(k, _)| k)
    }
}

/// Predicted largest populated size per checkpoint: `ρ(T) + i`. In ρ-time the
/// supercritical tail advects one size per unit.
pub fn front_position(trajectory: &Trajectory, i: usize) -> Vec<f64> {
    trajectory.rho.iter().map(|r| r + i as f64).collect()
}

/// `count` geometrically spaced times from `t_start` to `t_end`, both included.
pub fn log_checkpoints(t_start: f64, t_end: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_start > 0.0 && t_end > t_start && t_end.is_finite()) {
        return Err(Error::InvalidConfig(format!("invalid range [{t_start}, {t_end}]")));
    }
    if count < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 checkpoints (got {count})")));
    }
    let lo = t_start.log10();
    let hi = t_end.log10();
    let last = count - 1;
    let mut out: Vec<f64> = (0..count)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / last as f64))
        .collect();
    out[0] = t_start;
    out[last] = t_end;
    Ok(out)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants.
const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - PI_BETA * 0.75;
const SHRINK_LIMIT: f64 = 5.0; // 1/fac1, fac1 = 0.2
const GROW_LIMIT: f64 = 0.1; // 1/fac2, fac2 = 10

/// The field plus the two quadratures.
struct Augmented<'a, F: VectorField> {
    field: &'a F,
    tau_active: bool,
}

impl<F: VectorField> Augmented<'_, F> {
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let d = self.field.dim();
        self.field.eval(t, &y[..d], &mut dy[..d]);
        dy[d] = y[0];
        dy[d + 1] = if self.tau_active { 1.0 / y[0] } else { 0.0 };
    }
}

struct Workspace {
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
            y_new: vec![0.0; n],
            err: vec![0.0; n],
        }
    }
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], rtol: f64, atol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut nan = false;
    for ((a, b), e) in y.iter().zip(y_new).zip(err) {
        let r = e.abs() / (atol + rtol * a.abs().max(b.abs()));
        nan |= r.is_nan();
        worst = worst.max(r);
    }
    if nan {
        f64::INFINITY
    } else {
        worst
    }
}

fn initial_step<F: VectorField>(
    aug: &Augmented<F>,
    t: f64,
    y: &[f64],
    f0: &[f64],
    rtol: f64,
    atol: f64,
    ws: &mut Workspace,
) -> f64 {
    let n = y.len() as f64;
    let rms = |v: &mut dyn Iterator<Item = (f64, f64)>| {
        (v.map(|(x, yk)| (x / (atol + rtol * yk.abs())).powi(2)).sum::<f64>() / n).sqrt()
    };
    let d0 = rms(&mut y.iter().map(|&x| (x, x)));
    let d1 = rms(&mut f0.iter().zip(y).map(|(&f, &yk)| (f, yk)));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    for (s, (yk, fk)) in ws.stage.iter_mut().zip(y.iter().zip(f0)) {
        *s = yk + h0 * fk;
    }
    let (k0, rest) = ws.k.split_at_mut(1);
    let _ = k0;
    aug.eval(t + h0, &ws.stage, &mut rest[0]);
    let d2 = rms(&mut rest[0].iter().zip(f0).zip(y).map(|((a, b), &yk)| ((a - b) / h0, yk)));
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(0.2) };
    (100.0 * h0).min(h1)
}

/// Integrates `field` from `initial` at `T = 0` to `config.t_end`.
pub fn integrate<F: VectorField>(
    field: &F,
    initial: &[f64],
    config: &IntegrationConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let d = field.dim();
    if initial.len() != d {
        return Err(Error::DimensionMismatch { expected: d.to_string(), actual: initial.len() });
    }
    if d == 0 {
        return Err(Error::EmptyState);
    }
    for (index, &x) in initial.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index, time: 0.0 });
        }
        if x < -config.negativity_floor {
            return Err(Error::NegativityViolation {
                index,
                value: x,
                time: 0.0,
                floor: config.negativity_floor,
            });
        }
    }

    let n = d + 2;
    let tau_origin = if initial[0] > 0.0 { 0.0 } else { config.tau_origin.max(0.0) };
    let mut aug = Augmented { field, tau_active: tau_origin == 0.0 };

    let mut y = initial.to_vec();
    y.extend([0.0, 0.0]);
    let mut t = 0.0;

    let mut trajectory = Trajectory {
        times: Vec::with_capacity(config.checkpoints.len()),
        states: Vec::with_capacity(config.checkpoints.len()),
        rho: Vec::new(),
        tau: Vec::new(),
        tau_origin,
        stats: StepStats::default(),
    };
    let record = |traj: &mut Trajectory, t: f64, y: &[f64]| {
        traj.times.push(t);
        traj.states.push(y[..d].to_vec());
        traj.rho.push(y[d]);
        traj.tau.push(y[d + 1]);
    };

    // Stops: checkpoints plus the τ switch-on time.
    let mut stops: Vec<(f64, bool)> = config.checkpoints.iter().map(|&c| (c, true)).collect();
    if !aug.tau_active && tau_origin < config.t_end {
        match stops.iter_mut().find(|s| s.0 == tau_origin) {
            Some(_) => {}
            None => stops.push((tau_origin, false)),
        }
    }
    if stops.last().map_or(true, |s| s.0 < config.t_end) {
        stops.push((config.t_end, false));
    }
    stops.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut ws = Workspace::new(n);
    let h_max = config.max_step.unwrap_or(config.t_end.max(f64::MIN_POSITIVE));
    let mut h = 0.0;
    let mut fsal_valid = false;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    for &(stop, is_checkpoint) in &stops {
        while t < stop {
            if !fsal_valid {
                aug.eval(t, &y, &mut ws.k[0]);
                trajectory.stats.evaluations += 1;
                fsal_valid = true;
            }
            if h == 0.0 {
                let k0 = ws.k[0].clone();
                h = initial_step(&aug, t, &y, &k0, config.rtol, config.atol, &mut ws).min(h_max);
                trajectory.stats.evaluations += 1;
            }
            if trajectory.stats.accepted + trajectory.stats.rejected >= config.max_steps {
                return Err(Error::StepBudgetExhausted { max_steps: config.max_steps, time: t });
            }
            let remaining = stop - t;
            let hits_stop = h >= remaining;
            let step = if hits_stop { remaining } else { h };
            if step <= t.abs() * f64::EPSILON * 4.0 && !hits_stop {
                return Err(Error::StepSizeUnderflow { time: t, step });
            }

            let dormant = field.dormant(&y[..d]);
            dopri_stages(&aug, t, step, &y, &mut ws, &dormant);
            trajectory.stats.evaluations += 6;
            let err = active_segments(n, &dormant)
                .iter()
                .map(|r| {
                    error_norm(&y[r.clone()], &ws.y_new[r.clone()], &ws.err[r.clone()], config.rtol, config.atol)
                })
                .fold(0.0, f64::max);

            let fac11 = err.powf(EXPO1);
            if err <= 1.0 {
                let fac = (fac11 / facold.powf(PI_BETA) / SAFETY).clamp(GROW_LIMIT, SHRINK_LIMIT);
                let mut h_new = step / fac;
                facold = err.max(1e-4);
                if last_rejected {
                    h_new = h_new.min(step);
                }
                last_rejected = false;
                t = if hits_stop { stop } else { t + step };
                std::mem::swap(&mut y, &mut ws.y_new);
                ws.k.swap(0, 6);
                trajectory.stats.accepted += 1;
                for r in active_segments(d, &dormant) {
                    check_state(&y[r.clone()], r.start, t, config.negativity_floor)?;
                }
                // A shortened final step says nothing about the natural step size.
                h = if hits_stop { h.max(h_new) } else { h_new }.min(h_max);
            } else {
                trajectory.stats.rejected += 1;
                last_rejected = true;
                let shrink = if err.is_finite() { (fac11 / SAFETY).min(SHRINK_LIMIT) } else { SHRINK_LIMIT };
                h = step / shrink;
            }
        }
        if !aug.tau_active && stop >= tau_origin {
            aug.tau_active = true;
            fsal_valid = false;
        }
        if is_checkpoint {
            record(&mut trajectory, stop, &y);
        }
    }
    Ok(trajectory)
}

fn check_state(y: &[f64], offset: usize, time: f64, floor: f64) -> Result<()> {
    let (lo, hi) = y.iter().fold((0.0f64, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x.abs())));
    let has_nan = y.iter().fold(false, |bad, x| bad | x.is_nan());
    if !has_nan && lo >= -floor && hi.is_finite() {
        return Ok(());
    }
    for (k, &x) in y.iter().enumerate() {
        let index = offset + k;
        if !x.is_finite() {
            return Err(Error::NonFinite { index, time });
        }
        if x < -floor {
            return Err(Error::NegativityViolation { index, value: x, time, floor });
        }
    }
    Ok(())
}

/// Index ranges outside the dormant block.
fn active_segments(n: usize, dormant: &Range<usize>) -> [Range<usize>; 2] {
    if dormant.is_empty() {
        [0..n, n..n]
    } else {
        [0..dormant.start, dormant.end..n]
    }
}

fn dopri_stages<F: VectorField>(
    aug: &Augmented<F>,
    t: f64,
    h: f64,
    y: &[f64],
    ws: &mut Workspace,
    dormant: &Range<usize>,
) {
    let Workspace { k, stage, y_new, err } = ws;
    let [k1, k2, k3, k4, k5, k6, k7] = k;
    let segments = active_segments(y.len(), dormant);
    stage[dormant.clone()].fill(0.0);
    y_new[dormant.clone()].fill(0.0);

    macro_rules! combine {
        ($out:ident, $a0:ident => $k0:ident $(, $a:ident => $k:ident)*) => {
            for r in &segments {
                let out = &mut $out[r.clone()];
                let n = out.len();
                let y = &y[r.clone()][..n];
                let $k0 = &$k0[r.clone()][..n];
                $(let $k = &$k[r.clone()][..n];)*
                for (j, o) in out.iter_mut().enumerate() {
                    *o = y[j] + h * ($a0 * $k0[j] $(+ $a * $k[j])*);
                }
            }
        };
    }

    combine!(stage, A21 => k1);
    aug.eval(t + C2 * h, stage, k2);
    combine!(stage, A31 => k1, A32 => k2);
    aug.eval(t + C3 * h, stage, k3);
    combine!(stage, A41 => k1, A42 => k2, A43 => k3);
    aug.eval(t + C4 * h, stage, k4);
    combine!(stage, A51 => k1, A52 => k2, A53 => k3, A54 => k4);
    aug.eval(t + C5 * h, stage, k5);
    combine!(stage, A61 => k1, A62 => k2, A63 => k3, A64 => k4, A65 => k5);
    aug.eval(t + h, stage, k6);
    combine!(y_new, A71 => k1, A73 => k3, A74 => k4, A75 => k5, A76 => k6);
    aug.eval(t + h, y_new, k7);
    for r in &segments {
        let err = &mut err[r.clone()];
        let n = err.len();
        let (k1, k3, k4) = (&k1[r.clone()][..n], &k3[r.clone()][..n], &k4[r.clone()][..n]);
        let (k5, k6, k7) = (&k5[r.clone()][..n], &k6[r.clone()][..n], &k7[r.clone()][..n]);
        for (j, e) in err.iter_mut().enumerate() {
            *e = h
                * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> FnField<impl Fn(f64, &[f64], &mut [f64])> {
        FnField::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0])
    }

    #[test]
    fn exponential_decay_within_tolerance() {
        let config = IntegrationConfig::new(1.0).with_tolerances(1e-9, 1e-12);
        let traj = integrate(&decay(), &[1.0], &config).unwrap();
        let c = traj.last_state().unwrap()[0];
        assert!((c - (-1.0f64).exp()).abs() <= 10.0 * 1e-9, "{c}");
        assert_eq!(traj.times, vec![0.0, 1.0]);
    }

    #[test]
    fn quadratures_follow_the_monomer_component() {
        let config = IntegrationConfig::new(1.0).with_tolerances(1e-10, 1e-13);
        let traj = integrate(&decay(), &[1.0], &config).unwrap();
        let rho = traj.rho[1];
        let tau = traj.tau[1];
        assert!((rho - (1.0 - (-1.0f64).exp())).abs() < 1e-9);
        assert!((tau - (1.0f64.exp() - 1.0)).abs() < 1e-8);
        assert_eq!(traj.tau_origin, 0.0);
    }

    #[test]
    fn constant_field_grows_linearly() {
        let field = FnField::new(1, |_t, _y: &[f64], dy: &mut [f64]| dy[0] = 2.5);
        let config = IntegrationConfig::new(40.0).with_checkpoints(vec![0.0, 3.0, 40.0]);
        let traj = integrate(&field, &[0.0], &config).unwrap();
        assert_eq!(traj.times, vec![0.0, 3.0, 40.0]);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s[0] - 2.5 * t).abs() <= 1e-12 * (1.0 + 2.5 * t));
        }
    }

    #[test]
    fn tau_waits_for_origin_from_zero_data() {
        let field = FnField::new(1, |_t, _y: &[f64], dy: &mut [f64]| dy[0] = 1.0);
        let mut config = IntegrationConfig::new(4.0).with_checkpoints(vec![0.0, 0.5, 1.0, 4.0]);
        config.tau_origin = 1.0;
        let traj = integrate(&field, &[0.0], &config).unwrap();
        assert_eq!(&traj.tau[..3], &[0.0, 0.0, 0.0]);
        // ∫_1^4 dT/T
        assert!((traj.tau[3] - 4f64.ln()).abs() < 1e-7);
        assert!((traj.rho[3] - 8.0).abs() < 1e-10);
    }

    #[test]
    fn zero_horizon_echoes_initial_state() {
        let config = IntegrationConfig::new(0.0);
        let traj = integrate(&decay(), &[0.7], &config).unwrap();
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(traj.states, vec![vec![0.7]]);
    }

    #[test]
    fn negativity_aborts() {
        let field = FnField::new(2, |_t, _y: &[f64], dy: &mut [f64]| {
            dy[0] = 0.0;
            dy[1] = -1.0;
        });
        let config = IntegrationConfig::new(2.0);
        let err = integrate(&field, &[1.0, 1.0], &config).unwrap_err();
        assert!(matches!(err, Error::NegativityViolation { index: 1, .. }), "{err:?}");
    }

    #[test]
    fn step_budget_is_enforced() {
        let mut config = IntegrationConfig::new(100.0);
        config.max_steps = 3;
        let err = integrate(&decay(), &[1.0], &config).unwrap_err();
        assert!(matches!(err, Error::StepBudgetExhausted { .. }));
    }

    #[test]
    fn non_finite_values_abort() {
        let field = FnField::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let config = IntegrationConfig::new(2.0);
        let err = integrate(&field, &[1.0], &config).unwrap_err();
        assert!(
            matches!(err, Error::NonFinite { .. } | Error::StepSizeUnderflow { .. } | Error::StepBudgetExhausted { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn config_validation() {
        let mut c = IntegrationConfig::new(1.0);
        c.rtol = 0.0;
        assert!(c.validate().is_err());
        let c = IntegrationConfig::new(1.0).with_checkpoints(vec![0.5, 0.2]);
        assert!(c.validate().is_err());
        let c = IntegrationConfig::new(1.0).with_checkpoints(vec![0.5, 2.0]);
        assert!(c.validate().is_err());
        let field = decay();
        assert!(integrate(&field, &[1.0, 2.0], &IntegrationConfig::new(1.0)).is_err());
    }

    #[test]
    fn log_grid() {
        assert_eq!(log_checkpoints(1.0, 100.0, 3).unwrap(), vec![1.0, 10.0, 100.0]);
        assert!(log_checkpoints(1.0, 1.0, 2).is_err());
        assert!(log_checkpoints(1.0, 10.0, 1).is_err());
        assert!(log_checkpoints(0.0, 10.0, 3).is_err());
        let grid = log_checkpoints(1e-2, 1e6, 9).unwrap();
        assert_eq!(grid.len(), 9);
        for (k, t) in grid.iter().enumerate() {
            let expected = 10f64.powi(k as i32 - 2);
            assert!((t / expected - 1.0).abs() < 1e-12, "{t} vs {expected}");
        }
    }

    #[test]
    fn front_is_rho_plus_i() {
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![vec![0.0], vec![0.0]],
            rho: vec![0.0, 100.0],
            tau: vec![0.0, 0.0],
            tau_origin: 0.0,
            stats: StepStats::default(),
        };
        assert_eq!(front_position(&traj, 2), vec![2.0, 102.0]);
    }
}
