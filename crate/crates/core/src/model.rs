//! Rate equations for point islands with fragmenting subcritical clusters.
//!
//! All dynamics are in scaled variables: `T = βt`, `C_j = βc_j` and
//! `α = α̃/β²`, which removes β from the equations. The truncated system keeps
//! `c_1..c_N` and routes the attachment flux out of size `N` into two overflow
//! accumulators (count and mass), so mass stays exactly balanced.
//!
//! Every right-hand side is written once over [`Scalar`] and used both with
//! `f64` (integration) and with exact rationals (identity checks).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::VectorField;
use crate::rational::{self, Rational, Scalar};
use num_traits::Signed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub i: usize,
    #[serde(with = "rational::serde_string")]
    pub alpha_tilde: Rational,
    #[serde(with = "rational::serde_string")]
    pub beta: Rational,
    #[serde(with = "rational::serde_string")]
    pub alpha: Rational,
}

impl ModelParams {
    /// Builds parameters from physical rates; `α = α̃/β²` is computed exactly.
    pub fn new(i: usize, alpha_tilde: Rational, beta: Rational) -> Result<Self> {
        if i < 2 {
            return Err(Error::CriticalSizeTooSmall(i));
        }
        for (name, value) in [("alpha_tilde", &alpha_tilde), ("beta", &beta)] {
            if !value.is_positive() {
                return Err(Error::NonPositiveRate { name, value: rational::format(value) });
            }
        }
        let alpha = &alpha_tilde / (&beta * &beta);
        Ok(Self { i, alpha_tilde, beta, alpha })
    }

    /// Parameters already in scaled form (β = 1).
    pub fn scaled(i: usize, alpha: Rational) -> Result<Self> {
        Self::new(i, alpha, rational::int(1))
    }

    /// Size from which clusters are immobile.
    pub fn n(&self) -> usize {
        self.i + 1
    }

    pub fn alpha_f64(&self) -> f64 {
        rational::to_f64(&self.alpha)
    }

    pub fn beta_f64(&self) -> f64 {
        rational::to_f64(&self.beta)
    }

    pub fn alpha_tilde_f64(&self) -> f64 {
        rational::to_f64(&self.alpha_tilde)
    }
}

/// Concentrations `c_1..c_N` plus what has left through the truncation edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedState<T = f64> {
    pub time: T,
    pub c: Vec<T>,
    pub overflow_count: T,
    pub overflow_mass: T,
}

impl<T: Scalar> TruncatedState<T> {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            time: T::zero(),
            c: vec![T::zero(); n_max],
            overflow_count: T::zero(),
            overflow_mass: T::zero(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.c.len()
    }

    /// Layout used by the integrator: `[c_1..c_N, overflow_count, overflow_mass]`.
    pub fn to_vector(&self) -> Vec<T> {
        let mut v = self.c.clone();
        v.push(self.overflow_count.clone());
        v.push(self.overflow_mass.clone());
        v
    }

    pub fn from_vector(time: T, v: &[T]) -> Result<Self> {
        if v.len() < 3 {
            return Err(Error::DimensionMismatch { expected: "at least 3".into(), actual: v.len() });
        }
        let n = v.len() - 2;
        Ok(Self {
            time,
            c: v[..n].to_vec(),
            overflow_count: v[n].clone(),
            overflow_mass: v[n + 1].clone(),
        })
    }

    /// Σ_{k>i} c_k over the retained sizes (overflow excluded).
    pub fn tail_sum(&self, i: usize) -> T {
        self.c.iter().skip(i).fold(T::zero(), |acc, x| acc + x.clone())
    }
}

/// Monomers and subcritical clusters `c_1..c_i` plus the tail number `y = Σ_{k>i} c_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedState<T = f64> {
    pub time: T,
    pub c: Vec<T>,
    pub y: T,
}

impl<T: Scalar> ReducedState<T> {
    pub fn to_vector(&self) -> Vec<T> {
        let mut v = self.c.clone();
        v.push(self.y.clone());
        v
    }

    pub fn from_vector(time: T, v: &[T]) -> Result<Self> {
        let (y, c) = v.split_last().ok_or(Error::EmptyState)?;
        Ok(Self { time, c: c.to_vec(), y: y.clone() })
    }

    /// Reduced state of a truncated one: keeps `c_1..c_i`, sums the rest into `y`.
    pub fn from_truncated(i: usize, state: &TruncatedState<T>) -> Self {
        Self { time: state.time.clone(), c: state.c[..i].to_vec(), y: state.tail_sum(i) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedRates<T> {
    pub dc: Vec<T>,
    pub overflow_count: T,
    pub overflow_mass: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables<T = f64> {
    pub mass: T,
    pub number: T,
    /// Σ_{k≥2} c_k, overflow clusters included.
    pub z: T,
    pub v: T,
    pub w: T,
    /// Rate at which the number of clusters of size ≥ 2 grows: `c_1² − c_2`.
    pub tail_rate: T,
}

/// Evaluates the truncated system in place. Returns `(overflow_count', overflow_mass')`.
///
/// `c` holds `c_1..c_N` with `N ≥ i + 2`; the caller checks the dimension.
pub fn truncated_kernel<T: Scalar>(i: usize, alpha: &T, c: &[T], dc: &mut [T]) -> (T, T) {
    let n = c.len();
    let c1 = c[0].clone();
    let two = T::from_usize(2);
    let tail = c[1..].iter().fold(T::zero(), |acc, x| acc + x.clone());
    let fragments = c[2..i].iter().fold(T::zero(), |acc, x| acc + x.clone());
    dc[0] = alpha.clone() - two.clone() * c1.clone() * c1.clone() + two * c[1].clone()
        - c1.clone() * tail
        + fragments;
    for j in 2..=n {
        let mut rate = c1.clone() * (c[j - 2].clone() - c[j - 1].clone());
        if j <= i {
            rate = rate - c[j - 1].clone();
            if j < i {
                rate = rate + c[j].clone();
            }
        }
        dc[j - 1] = rate;
    }
    let outflow = c1 * c[n - 1].clone();
    let mass = T::from_usize(n + 1) * outflow.clone();
    (outflow, mass)
}

/// [`truncated_kernel`] for `f64`, arranged so that the long loops vectorise.
pub fn truncated_kernel_f64(i: usize, alpha: f64, c: &[f64], dc: &mut [f64]) -> (f64, f64) {
    let n = c.len();
    let c1 = c[0];
    let mut lanes = [0.0; 8];
    let mut chunks = c[1..].chunks_exact(8);
    for chunk in &mut chunks {
        for (l, x) in lanes.iter_mut().zip(chunk) {
            *l += x;
        }
    }
    let tail = lanes.iter().sum::<f64>() + chunks.remainder().iter().sum::<f64>();
    let fragments: f64 = c[2..i].iter().sum();
    dc[0] = alpha - 2.0 * c1 * c1 + 2.0 * c[1] - c1 * tail + fragments;
    for j in 2..=i {
        let mut rate = c1 * (c[j - 2] - c[j - 1]) - c[j - 1];
        if j < i {
            rate += c[j];
        }
        dc[j - 1] = rate;
    }
    for (d, w) in dc[i..].iter_mut().zip(c[i - 1..].windows(2)) {
        *d = c1 * (w[0] - w[1]);
    }
    let outflow = c1 * c[n - 1];
    (outflow, (n + 1) as f64 * outflow)
}

/// Evaluates the `(i+1)`-dimensional reduced system in place; `u = (c_1..c_i, y)`.
pub fn reduced_kernel<T: Scalar>(i: usize, alpha: &T, u: &[T], du: &mut [T]) {
    let c = &u[..i];
    let y = u[i].clone();
    let c1 = c[0].clone();
    let two = T::from_usize(2);
    let subcritical = c[1..].iter().fold(T::zero(), |acc, x| acc + x.clone());
    let fragments = c[2..].iter().fold(T::zero(), |acc, x| acc + x.clone());
    du[0] = alpha.clone() - two.clone() * c1.clone() * c1.clone() + two * c[1].clone()
        - c1.clone() * subcritical
        + fragments
        - c1.clone() * y;
    for j in 2..=i {
        let mut rate = c1.clone() * (c[j - 2].clone() - c[j - 1].clone()) - c[j - 1].clone();
        if j < i {
            rate = rate + c[j].clone();
        }
        du[j - 1] = rate;
    }
    du[i] = c1 * c[i - 1].clone();
}

pub fn rhs_truncated<T: Scalar>(
    params: &ModelParams,
    state: &TruncatedState<T>,
) -> Result<TruncatedRates<T>> {
    let n = state.n_max();
    if n < params.i + 2 {
        return Err(Error::DimensionMismatch {
            expected: format!("N_max ≥ {}", params.i + 2),
            actual: n,
        });
    }
    let alpha = T::from_rational(&params.alpha);
    let mut dc = vec![T::zero(); n];
    let (overflow_count, overflow_mass) = truncated_kernel(params.i, &alpha, &state.c, &mut dc);
    Ok(TruncatedRates { dc, overflow_count, overflow_mass })
}

/// Returns `(c_1', …, c_i', y')`.
pub fn rhs_reduced<T: Scalar>(params: &ModelParams, state: &ReducedState<T>) -> Result<Vec<T>> {
    if state.c.len() != params.i {
        return Err(Error::DimensionMismatch {
            expected: format!("{} concentrations", params.i),
            actual: state.c.len(),
        });
    }
    let alpha = T::from_rational(&params.alpha);
    let u = state.to_vector();
    let mut du = vec![T::zero(); params.i + 1];
    reduced_kernel(params.i, &alpha, &u, &mut du);
    Ok(du)
}

pub fn observables<T: Scalar>(params: &ModelParams, state: &TruncatedState<T>) -> Observables<T> {
    let i = params.i;
    let alpha = T::from_rational(&params.alpha);
    let mut mass = state.overflow_mass.clone();
    let mut number = state.overflow_count.clone();
    for (k, x) in state.c.iter().enumerate() {
        mass = mass + T::from_usize(k + 1) * x.clone();
        number = number + x.clone();
    }
    let get = |k: usize| state.c.get(k - 1).cloned().unwrap_or_else(T::zero);
    let c1 = get(1);
    let c2 = get(2);
    let z = number.clone() - c1.clone();
    let v = alpha - c1.clone() * z.clone();
    let fragments = (3..=i).fold(T::zero(), |acc, k| acc + get(k));
    let w = v.clone() + T::from_usize(2) * c2.clone() + fragments;
    let tail_rate = c1.clone() * c1 - c2;
    Observables { mass, number, z, v, w, tail_rate }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitDirection {
    /// `c_j → C_j = βc_j`, `T → t = T/β`.
    ToPhysical,
    /// `C_j → c_j = C_j/β`, `t → T = βt`.
    ToScaled,
}

pub fn convert_state<T: Scalar>(
    params: &ModelParams,
    state: &TruncatedState<T>,
    direction: UnitDirection,
) -> TruncatedState<T> {
    let beta = T::from_rational(&params.beta);
    let (conc, time): (Box<dyn Fn(&T) -> T>, Box<dyn Fn(&T) -> T>) = match direction {
        UnitDirection::ToPhysical => {
            let b1 = beta.clone();
            let b2 = beta.clone();
            (Box::new(move |x| b1.clone() * x.clone()), Box::new(move |t| t.clone() / b2.clone()))
        }
        UnitDirection::ToScaled => {
            let b1 = beta.clone();
            let b2 = beta;
            (Box::new(move |x| x.clone() / b1.clone()), Box::new(move |t| b2.clone() * t.clone()))
        }
    };
    TruncatedState {
        time: time(&state.time),
        c: state.c.iter().map(|x| conc(x)).collect(),
        overflow_count: conc(&state.overflow_count),
        overflow_mass: conc(&state.overflow_mass),
    }
}

pub fn to_physical<T: Scalar>(params: &ModelParams, state: &TruncatedState<T>) -> TruncatedState<T> {
    convert_state(params, state, UnitDirection::ToPhysical)
}

pub fn to_scaled<T: Scalar>(params: &ModelParams, state: &TruncatedState<T>) -> TruncatedState<T> {
    convert_state(params, state, UnitDirection::ToScaled)
}

/// Truncated system as an `f64` vector field on `[c_1..c_N, overflow_count, overflow_mass]`.
#[derive(Debug, Clone)]
pub struct TruncatedSystem {
    pub i: usize,
    pub alpha: f64,
    pub n_max: usize,
}

impl TruncatedSystem {
    pub fn new(params: &ModelParams, n_max: usize) -> Result<Self> {
        if n_max < params.i + 2 {
            return Err(Error::DimensionMismatch {
                expected: format!("N_max ≥ {}", params.i + 2),
                actual: n_max,
            });
        }
        Ok(Self { i: params.i, alpha: params.alpha_f64(), n_max })
    }
}

impl VectorField for TruncatedSystem {
    fn dim(&self) -> usize {
        self.n_max + 2
    }

    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.n_max;
        let (count, mass) = truncated_kernel_f64(self.i, self.alpha, &y[..n], &mut dy[..n]);
        dy[n] = count;
        dy[n + 1] = mass;
    }

    fn dormant(&self, y: &[f64]) -> std::ops::Range<usize> {
        let n = self.n_max;
        // Each stage spreads the support by one size.
        let support = y[..n].iter().rposition(|&x| x != 0.0).map_or(0, |k| k + 1);
        (support + 8).min(n)..n
    }
}

/// Truncation size large enough to hold the front at `t_end`.
///
/// Uses the leading-order estimate `ρ(T) ≈ ((i+2)/(i+1)) (α/(i+2))^{1/(i+2)} T^{(i+1)/(i+2)}`
/// plus a buffer for the smeared front and the initially occupied sizes.
pub fn auto_n_max(params: &ModelParams, t_end: f64, occupied: usize) -> usize {
    let i = params.i as f64;
    let alpha = params.alpha_f64();
    let rho = (i + 2.0) / (i + 1.0)
        * (alpha / (i + 2.0)).powf(1.0 / (i + 2.0))
        * t_end.max(0.0).powf((i + 1.0) / (i + 2.0));
    let n = occupied as f64 + i + 1.0 + 1.2 * rho + 10.0 * rho.sqrt() + 50.0;
    (n.ceil() as usize).max(params.i + 2)
}

/// Reduced system as an `f64` vector field on `(c_1..c_i, y)`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub i: usize,
    pub alpha: f64,
}

impl ReducedSystem {
    pub fn new(params: &ModelParams) -> Self {
        Self { i: params.i, alpha: params.alpha_f64() }
    }
}

impl VectorField for ReducedSystem {
    fn dim(&self) -> usize {
        self.i + 1
    }

    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        reduced_kernel(self.i, &self.alpha, y, dy);
    }
}

/// True when every entry is ≥ 0 (rationals).
pub fn is_nonnegative<T: Scalar>(values: &[T]) -> bool {
    values.iter().all(|x| *x >= T::zero())
}

/// Sum helper used by callers that want `Σ_{k=a}^{b} c_k` with 1-based bounds.
pub fn partial_sum<T: Scalar>(c: &[T], from: usize, to: usize) -> T {
    if from > to || from == 0 {
        return T::zero();
    }
    c.iter()
        .skip(from - 1)
        .take(to + 1 - from)
        .fold(T::zero(), |acc, x| acc + x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use num_traits::Zero;

    fn exact_state(c: &[i64], n_max: usize) -> TruncatedState<Rational> {
        let mut s = TruncatedState::<Rational>::zeros(n_max);
        for (k, v) in c.iter().enumerate() {
            s.c[k] = int(*v);
        }
        s
    }

    #[test]
    fn params_scale_exactly() {
        let p = ModelParams::new(5, int(2), int(3)).unwrap();
        assert_eq!(p.alpha, ratio(2, 9));
        assert_eq!(p.n(), 6);
        let p = ModelParams::new(3, int(1), int(1)).unwrap();
        assert_eq!(p.alpha, int(1));
    }

    #[test]
    fn params_reject_bad_input() {
        let e = ModelParams::new(1, int(1), int(1)).unwrap_err();
        assert!(e.to_string().contains("i must be ≥ 2"));
        assert!(ModelParams::new(2, int(0), int(1)).is_err());
        assert!(ModelParams::new(2, int(1), int(-1)).is_err());
    }

    #[test]
    fn params_json_uses_rational_strings() {
        let p = ModelParams::new(5, int(2), int(3)).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"i":5,"alpha_tilde":"2","beta":"3","alpha":"2/9"}"#);
        let back: ModelParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn truncated_rhs_zero_state_deposits_only() {
        let p = ModelParams::scaled(2, int(1)).unwrap();
        let r = rhs_truncated(&p, &exact_state(&[], 6)).unwrap();
        assert_eq!(r.dc[0], int(1));
        assert!(r.dc[1..].iter().all(|x| x.is_zero()));
        assert!(r.overflow_count.is_zero() && r.overflow_mass.is_zero());
    }

    #[test]
    fn truncated_rhs_examples() {
        let p = ModelParams::scaled(2, int(1)).unwrap();
        let r = rhs_truncated(&p, &exact_state(&[1, 1, 1], 6)).unwrap();
        assert_eq!(&r.dc[..4], &[int(-1), int(-1), int(0), int(1)]);

        let p = ModelParams::scaled(3, int(1)).unwrap();
        let r = rhs_truncated(&p, &exact_state(&[1, 1, 1, 1], 7)).unwrap();
        assert_eq!(r.dc[0], int(-1));
    }

    #[test]
    fn truncated_rhs_boundary_feeds_overflow() {
        let p = ModelParams::scaled(2, int(1)).unwrap();
        let mut s = exact_state(&[2], 5);
        s.c[4] = int(3);
        let r = rhs_truncated(&p, &s).unwrap();
        assert_eq!(r.dc[4], int(-6));
        assert_eq!(r.overflow_count, int(6));
        assert_eq!(r.overflow_mass, int(36));
    }

    #[test]
    fn truncated_rhs_rejects_short_state() {
        let p = ModelParams::scaled(3, int(1)).unwrap();
        assert!(rhs_truncated(&p, &exact_state(&[], 4)).is_err());
    }

    #[test]
    fn reduced_rhs_examples() {
        let p = ModelParams::scaled(2, int(1)).unwrap();
        let s = ReducedState { time: int(0), c: vec![int(1), int(1)], y: int(0) };
        assert_eq!(rhs_reduced(&p, &s).unwrap(), vec![int(0), int(-1), int(1)]);

        let s = ReducedState { time: int(0), c: vec![int(0), int(0)], y: int(5) };
        assert_eq!(rhs_reduced(&p, &s).unwrap(), vec![int(1), int(0), int(0)]);

        let p = ModelParams::scaled(3, int(16)).unwrap();
        let s = ReducedState { time: int(0), c: vec![int(2), int(4), int(8)], y: int(0) };
        assert_eq!(rhs_reduced(&p, &s).unwrap(), vec![int(0), int(0), int(-16), int(16)]);

        let bad = ReducedState { time: int(0), c: vec![int(2)], y: int(0) };
        assert!(rhs_reduced(&p, &bad).is_err());
    }

    #[test]
    fn observables_examples() {
        let p = ModelParams::scaled(2, int(1)).unwrap();
        let o = observables(&p, &exact_state(&[1, 1], 5));
        assert_eq!((o.z, o.v, o.w, o.mass), (int(1), int(0), int(2), int(3)));

        let o = observables(&p, &exact_state(&[], 5));
        assert_eq!((o.v, o.w, o.mass), (int(1), int(1), int(0)));

        let p = ModelParams::scaled(3, ratio(7, 2)).unwrap();
        let o = observables(&p, &exact_state(&[1], 6));
        assert_eq!((o.z, o.v.clone(), o.w), (int(0), ratio(7, 2), ratio(7, 2)));
    }

    #[test]
    fn observables_count_overflow() {
        let p = ModelParams::scaled(2, int(1)).unwrap();
        let mut s = exact_state(&[1], 5);
        s.overflow_count = int(2);
        s.overflow_mass = int(14);
        let o = observables(&p, &s);
        assert_eq!(o.mass, int(15));
        assert_eq!(o.number, int(3));
        assert_eq!(o.z, int(2));
        assert_eq!(o.v, int(-1));
    }

    #[test]
    fn unit_conversion() {
        let p = ModelParams::new(2, int(1), int(1)).unwrap();
        let mut s = TruncatedState::<f64>::zeros(4);
        s.c = vec![0.3, 0.2, 0.1, 0.0];
        s.time = 7.0;
        assert_eq!(to_physical(&p, &s), s);

        let p = ModelParams::new(2, int(1), int(2)).unwrap();
        let mut s = TruncatedState::<Rational>::zeros(4);
        s.c = vec![int(1); 4];
        s.time = int(4);
        let phys = to_physical(&p, &s);
        assert!(phys.c.iter().all(|x| *x == int(2)));
        assert_eq!(phys.time, int(2));
        assert_eq!(to_scaled(&p, &phys), s);
    }

    #[test]
    fn partial_sums() {
        let c = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(partial_sum(&c, 3, 4), 7.0);
        assert_eq!(partial_sum(&c, 3, 2), 0.0);
    }
}
