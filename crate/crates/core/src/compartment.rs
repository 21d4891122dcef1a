//! Compartmental structure of the closed subcritical system.
//!
//! The closed system keeps `c_1, …, c_i` and drops conversion of `i`-mers into
//! immobile islands:
//!
//! ```text
//! c_1' = α − 2c_1² + 2c_2 − c_1 Σ_{k=2}^i c_k + Σ_{k=3}^i c_k
//! c_j' = c_1c_{j−1} − c_1c_j − c_j + c_{j+1}        1 < j < i
//! c_i' = c_1c_{i−1} − c_i
//! ```
//!
//! Compartment `j` holds the mass `j·c_j`. Monomers attaching to an `i`-mer leave
//! the system through compartment 1, which is the only outflow.

use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::integrator::VectorField;
use crate::rational::{self, Rational, Scalar};

fn validate_i(i: usize) -> Result<()> {
    if i < 2 {
        return Err(Error::CriticalSizeTooSmall(i));
    }
    Ok(())
}

/// Right-hand side of the closed system at `c = (c_1, …, c_i)`.
pub fn closed_rhs<T: Scalar>(i: usize, alpha: &T, c: &[T]) -> Result<Vec<T>> {
    validate_i(i)?;
    if c.len() != i {
        return Err(Error::DimensionMismatch { expected: i.to_string(), actual: c.len() });
    }
    let c1 = c[0].clone();
    let two = T::from_usize(2);
    let sum_from_2 = c[1..].iter().fold(T::zero(), |a, x| a + x.clone());
    let sum_from_3 = c[2..].iter().fold(T::zero(), |a, x| a + x.clone());
    let mut d = Vec::with_capacity(i);
    d.push(
        alpha.clone() - two.clone() * c1.clone() * c1.clone() + two * c[1].clone()
            - c1.clone() * sum_from_2
            + sum_from_3,
    );
    for j in 2..=i {
        let gain = c1.clone() * c[j - 2].clone();
        let v = if j < i {
            gain - c1.clone() * c[j - 1].clone() - c[j - 1].clone() + c[j].clone()
        } else {
            gain - c[j - 1].clone()
        };
        d.push(v);
    }
    Ok(d)
}

/// A flow `coefficient · Π c_k^{exponents[k]}` of mass from compartment `from`
/// into compartment `to`. `to = 0` is the environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flow {
    pub to: usize,
    pub from: usize,
    pub coefficient: i64,
    pub exponents: Vec<u32>,
}

impl Flow {
    fn new(i: usize, to: usize, from: usize, coefficient: i64, factors: &[usize]) -> Self {
        let mut exponents = vec![0; i];
        for &k in factors {
            exponents[k - 1] += 1;
        }
        Self { to, from, coefficient, exponents }
    }

    pub fn monomial(&self) -> String {
        let factors: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| if e == 1 { format!("c{}", k + 1) } else { format!("c{}^{e}", k + 1) })
            .collect();
        match self.coefficient {
            1 => factors.join("*"),
            c => format!("{c}*{}", factors.join("*")),
        }
    }

    pub fn evaluate<T: Scalar>(&self, c: &[T]) -> T {
        let mut v = T::from_rational(&rational::int(self.coefficient));
        for (x, &e) in c.iter().zip(&self.exponents) {
            for _ in 0..e {
                v = v * x.clone();
            }
        }
        v
    }

    /// `∂F/∂c_m` as a flow-shaped monomial, or `None` when it vanishes.
    pub fn partial(&self, m: usize) -> Option<(i64, Vec<u32>)> {
        let e = self.exponents[m - 1];
        (e > 0).then(|| {
            let mut exps = self.exponents.clone();
            exps[m - 1] -= 1;
            (self.coefficient * e as i64, exps)
        })
    }
}

/// All flows of the closed system, internal first, then outflows.
pub fn flow_structure(i: usize) -> Result<Vec<Flow>> {
    validate_i(i)?;
    let mut flows = vec![Flow::new(i, 2, 1, 2, &[1, 1]), Flow::new(i, 1, 2, 2, &[2])];
    for j in 3..=i {
        flows.push(Flow::new(i, j, 1, 1, &[1, j - 1]));
        flows.push(Flow::new(i, j, j - 1, j as i64 - 1, &[1, j - 1]));
        flows.push(Flow::new(i, 1, j, 1, &[j]));
        flows.push(Flow::new(i, j - 1, j, j as i64 - 1, &[j]));
    }
    flows.push(Flow::new(i, 0, 1, 1, &[1, i]));
    Ok(flows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowValue<T> {
    pub flow: Flow,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompartmentDecomposition<T> {
    pub i: usize,
    /// `inputs[j-1] = I_j`.
    pub inputs: Vec<T>,
    /// Internal flows `F_{jk}`, `j, k ≥ 1`.
    pub flows: Vec<FlowValue<T>>,
    /// `outflows[j-1] = F_{0j}`.
    pub outflows: Vec<T>,
}

pub fn decompose<T: Scalar>(i: usize, alpha: &T, c: &[T]) -> Result<CompartmentDecomposition<T>> {
    validate_i(i)?;
    if c.len() != i {
        return Err(Error::DimensionMismatch { expected: i.to_string(), actual: c.len() });
    }
    if let Some((k, x)) = c.iter().enumerate().find(|(_, x)| **x < T::zero()) {
        return Err(Error::NegativeState { index: k + 1, value: format!("{x:?}") });
    }
    let mut inputs = vec![T::zero(); i];
    inputs[0] = alpha.clone();
    let mut outflows = vec![T::zero(); i];
    let mut flows = Vec::new();
    for flow in flow_structure(i)? {
        let value = flow.evaluate(c);
        if flow.to == 0 {
            outflows[flow.from - 1] = outflows[flow.from - 1].clone() + value;
        } else {
            flows.push(FlowValue { flow, value });
        }
    }
    Ok(CompartmentDecomposition { i, inputs, flows, outflows })
}

impl<T: Scalar> CompartmentDecomposition<T> {
    /// `F_{jk}` (mass from `k` into `j`), zero when absent.
    pub fn flow(&self, to: usize, from: usize) -> T {
        self.flows
            .iter()
            .filter(|f| f.flow.to == to && f.flow.from == from)
            .fold(T::zero(), |a, f| a + f.value.clone())
    }

    /// Mass balance per compartment: `Σ_k (F_{jk} − F_{kj}) + I_j − F_{0j}`.
    pub fn mass_rates(&self) -> Vec<T> {
        (1..=self.i)
            .map(|j| {
                let mut r = self.inputs[j - 1].clone() - self.outflows[j - 1].clone();
                for f in &self.flows {
                    if f.flow.to == j {
                        r = r + f.value.clone();
                    }
                    if f.flow.from == j {
                        r = r - f.value.clone();
                    }
                }
                r
            })
            .collect()
    }

    /// Concentration derivatives `c_j' = (mass rate)/j`.
    pub fn reconstruct(&self) -> Vec<T> {
        self.mass_rates()
            .into_iter()
            .enumerate()
            .map(|(k, r)| r / T::from_usize(k + 1))
            .collect()
    }

    /// Gross mass entering each compartment, used to scale residuals.
    pub fn gross_inflow(&self) -> Vec<T> {
        (1..=self.i)
            .map(|j| {
                self.flows
                    .iter()
                    .filter(|f| f.flow.to == j)
                    .fold(self.inputs[j - 1].clone(), |a, f| a + f.value.clone())
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let mut edges: Vec<Value> = self
            .flows
            .iter()
            .map(|f| {
                json!({"from": f.flow.from, "to": f.flow.to, "monomial": f.flow.monomial(), "value": f.value.to_f64()})
            })
            .collect();
        for (k, o) in self.outflows.iter().enumerate() {
            if !o.is_zero() {
                edges.push(json!({"from": k + 1, "to": 0, "monomial": format!("c1*c{}", self.i), "value": o.to_f64()}));
            }
        }
        json!({
            "i": self.i,
            "inputs": self.inputs.iter().map(Scalar::to_f64).collect::<Vec<_>>(),
            "flows": edges,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub pass: bool,
    pub flows: Vec<(Flow, String)>,
    /// First flow with a negative partial derivative, and the variable.
    pub witness: Option<(Flow, usize)>,
}

/// Every partial derivative of every flow must be a monomial with a
/// non-negative coefficient.
pub fn monotonicity_check_flows(flows: &[Flow]) -> MonotonicityReport {
    let mut witness = None;
    'outer: for f in flows {
        for m in 1..=f.exponents.len() {
            if let Some((coeff, _)) = f.partial(m) {
                if coeff < 0 {
                    witness = Some((f.clone(), m));
                    break 'outer;
                }
            }
        }
        if f.coefficient < 0 && f.exponents.iter().all(|&e| e == 0) {
            witness = Some((f.clone(), 0));
            break;
        }
    }
    MonotonicityReport {
        pass: witness.is_none(),
        flows: flows.iter().map(|f| (f.clone(), f.monomial())).collect(),
        witness,
    }
}

pub fn monotonicity_check(i: usize) -> Result<MonotonicityReport> {
    Ok(monotonicity_check_flows(&flow_structure(i)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub values: Vec<f64>,
    /// Present when `α` is a perfect `(i+1)`-th power of a rational.
    pub exact: Option<Vec<Rational>>,
}

impl Equilibrium {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// `(α^{1/(i+1)}, α^{2/(i+1)}, …, α^{i/(i+1)})`.
pub fn equilibrium(i: usize, alpha: &Rational) -> Result<Equilibrium> {
    validate_i(i)?;
    if !alpha.is_positive() {
        return Err(Error::NonPositiveRate { name: "alpha", value: rational::format(alpha) });
    }
    let exact = rational::exact_root(alpha, (i + 1) as u32)
        .map(|root| (1..=i).map(|j| rational::pow(&root, j)).collect::<Vec<_>>());
    let values = match &exact {
        Some(v) => v.iter().map(rational::to_f64).collect(),
        None => {
            let a = rational::to_f64(alpha);
            (1..=i).map(|j| a.powf(j as f64 / (i + 1) as f64)).collect()
        }
    };
    Ok(Equilibrium { values, exact })
}

pub fn verify_equilibrium_exact(i: usize, alpha: &Rational, point: &[Rational]) -> Result<Vec<Rational>> {
    closed_rhs(i, alpha, point)
}

/// Largest residual component relative to the gross mass inflow of that compartment.
pub fn verify_equilibrium_f64(i: usize, alpha: f64, point: &[f64]) -> Result<f64> {
    let d = decompose(i, &alpha, point)?;
    let rates = d.mass_rates();
    let scale = d.gross_inflow();
    Ok(rates
        .iter()
        .zip(&scale)
        .map(|(r, s)| if *s > 0.0 { r.abs() / s } else { r.abs() })
        .fold(0.0, f64::max))
}

/// Closed system as an `f64` vector field.
#[derive(Debug, Clone)]
pub struct ClosedSystem {
    pub i: usize,
    pub alpha: f64,
}

impl VectorField for ClosedSystem {
    fn dim(&self) -> usize {
        self.i
    }

    fn eval(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let d = closed_rhs(self.i, &self.alpha, y).expect("dimension fixed by dim()");
        dy.copy_from_slice(&d);
    }
}
