//! Smooth fields on a 2-D domain that hand out order-≤4 jets at any point.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::{Domain2, DomainKind, Grid, GridValues};
use super::jet::{Jet, MAX_JET_ORDER};
use super::FieldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Sampled,
}

type EvalFn = dyn Fn(f64, f64, usize) -> Jet + Send + Sync;

/// A field `f(p, q)` evaluated through jets. `eval(p, q, k)` returns the
/// order-`k` jet for any `k ≤ order()`.
#[derive(Clone)]
pub struct JetField {
    f: Arc<EvalFn>,
    order: usize,
    provenance: Provenance,
    domain: Option<Domain2>,
    label: String,
}

impl fmt::Debug for JetField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetField")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("provenance", &self.provenance)
            .field("domain", &self.domain)
            .finish()
    }
}

fn common_domain(a: &JetField, b: &JetField) -> Result<Option<Domain2>, FieldError> {
    match (&a.domain, &b.domain) {
        (Some(x), Some(y)) if x != y => Err(FieldError::DomainMismatch),
        (Some(x), _) | (_, Some(x)) => Ok(Some(*x)),
        (None, None) => Ok(None),
    }
}

fn combined_provenance(a: &JetField, b: &JetField) -> Provenance {
    if a.provenance == Provenance::Analytic && b.provenance == Provenance::Analytic {
        Provenance::Analytic
    } else {
        Provenance::Sampled
    }
}

impl JetField {
    /// Low-level constructor from an order-aware evaluator.
    pub fn from_fn(
        label: impl Into<String>,
        order: usize,
        provenance: Provenance,
        domain: Option<Domain2>,
        f: impl Fn(f64, f64, usize) -> Jet + Send + Sync + 'static,
    ) -> Self {
        assert!(order <= MAX_JET_ORDER);
        JetField {
            f: Arc::new(f),
            order,
            provenance,
            domain,
            label: label.into(),
        }
    }

    /// Closed-form field: `f` receives the coordinate jets `p`, `q` and builds
    /// the result by jet arithmetic.
    pub fn analytic(label: impl Into<String>, f: impl Fn(Jet, Jet) -> Jet + Send + Sync + 'static) -> Self {
        Self::from_fn(label, MAX_JET_ORDER, Provenance::Analytic, None, move |p, q, k| {
            f(Jet::var_p(p, k), Jet::var_q(q, k))
        })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::analytic(format!("{c}"), move |p, _| Jet::constant(c, p.order()))
    }

    pub fn coord_p() -> Self {
        Self::analytic("p", |p, _| p)
    }

    pub fn coord_q() -> Self {
        Self::analytic("q", |_, q| q)
    }

    pub fn sin_p() -> Self {
        Self::analytic("sin(p)", |p, _| p.sin())
    }

    pub fn sin_q() -> Self {
        Self::analytic("sin(q)", |_, q| q.sin())
    }

    pub fn cos_p() -> Self {
        Self::analytic("cos(p)", |p, _| p.cos())
    }

    pub fn cos_q() -> Self {
        Self::analytic("cos(q)", |_, q| q.cos())
    }

    /// `f(p)` from a callback returning `f, f', …, f''''` at `p`.
    pub fn of_p(label: impl Into<String>, d: impl Fn(f64) -> [f64; 5] + Send + Sync + 'static) -> Self {
        Self::from_fn(label, MAX_JET_ORDER, Provenance::Analytic, None, move |p, _, k| {
            Jet::univariate_p(&d(p), k)
        })
    }

    /// `f(q)` from a callback returning `f, f', …, f''''` at `q`.
    pub fn of_q(label: impl Into<String>, d: impl Fn(f64) -> [f64; 5] + Send + Sync + 'static) -> Self {
        Self::from_fn(label, MAX_JET_ORDER, Provenance::Analytic, None, move |_, q, k| {
            Jet::univariate_q(&d(q), k)
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn domain(&self) -> Option<&Domain2> {
        self.domain.as_ref()
    }

    /// Full-order jet at `(p, q)`.
    pub fn jet(&self, p: f64, q: f64) -> Jet {
        (self.f)(p, q, self.order)
    }

    /// Jet of order `k ≤ order()`.
    pub fn jet_order(&self, p: f64, q: f64, k: usize) -> Jet {
        debug_assert!(k <= self.order);
        (self.f)(p, q, k.min(self.order))
    }

    pub fn value(&self, p: f64, q: f64) -> f64 {
        (self.f)(p, q, 0).value()
    }

    /// Samples the value on every grid node.
    pub fn sample(&self, grid: &Grid) -> Result<GridValues, FieldError> {
        self.check_grid(grid)?;
        Ok(grid.eval(|p, q| self.value(p, q)))
    }

    /// Errors if this field is tied to a domain other than the grid's.
    pub fn check_grid(&self, grid: &Grid) -> Result<(), FieldError> {
        match (&self.domain, grid.domain()) {
            (Some(a), Some(b)) if a != b => Err(FieldError::DomainMismatch),
            (Some(_), None) => Err(FieldError::DomainMismatch),
            _ => Ok(()),
        }
    }

    fn binary(
        &self,
        other: &JetField,
        label: String,
        op: impl Fn(Jet, Jet) -> Jet + Send + Sync + 'static,
    ) -> Result<JetField, FieldError> {
        let domain = common_domain(self, other)?;
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::from_fn(
            label,
            self.order.min(other.order),
            combined_provenance(self, other),
            domain,
            move |p, q, k| op((a.f)(p, q, k), (b.f)(p, q, k)),
        ))
    }

    pub fn try_add(&self, other: &JetField) -> Result<JetField, FieldError> {
        self.binary(other, format!("({} + {})", self.label, other.label), |a, b| a + b)
    }

    pub fn try_sub(&self, other: &JetField) -> Result<JetField, FieldError> {
        self.binary(other, format!("({} - {})", self.label, other.label), |a, b| a - b)
    }

    pub fn try_mul(&self, other: &JetField) -> Result<JetField, FieldError> {
        self.binary(other, format!("({} * {})", self.label, other.label), |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> JetField {
        let a = self.clone();
        Self::from_fn(
            format!("{s}*{}", self.label),
            self.order,
            self.provenance,
            self.domain,
            move |p, q, k| (a.f)(p, q, k).scale(s),
        )
    }

    pub fn neg(&self) -> JetField {
        self.scale(-1.0).with_label(format!("-{}", self.label))
    }

    /// `g ∘ self` for a univariate `g` given by `g, g', …, g''''`.
    pub fn map(&self, label: impl Into<String>, g: impl Fn(f64) -> [f64; 5] + Send + Sync + 'static) -> JetField {
        let a = self.clone();
        Self::from_fn(label, self.order, self.provenance, self.domain, move |p, q, k| {
            let j = (a.f)(p, q, k);
            j.compose(&g(j.value()))
        })
    }

    /// Poisson bracket `{self, other}` with output jet order `order_out`
    /// (defaults to one below the inputs' common order).
    pub fn poisson(&self, other: &JetField, order_out: Option<usize>) -> Result<JetField, FieldError> {
        let domain = common_domain(self, other)?;
        let avail = self.order.min(other.order);
        if avail == 0 {
            return Err(FieldError::JetOrder { needed: 1, available: 0 });
        }
        let out = order_out.unwrap_or(avail - 1);
        if out + 1 > avail {
            return Err(FieldError::JetOrder {
                needed: out + 1,
                available: avail,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::from_fn(
            format!("{{{},{}}}", self.label, other.label),
            out,
            combined_provenance(self, other),
            domain,
            move |p, q, k| (a.f)(p, q, k + 1).poisson(&(b.f)(p, q, k + 1)),
        ))
    }

    /// Field sampled on a uniform domain grid. Derivatives up to order 4 are
    /// repeated fourth-order central differences, with periodic wrap on the
    /// torus and zero extension on a rectangle; evaluation uses the nearest
    /// node.
    pub fn from_samples(domain: &Domain2, values: &GridValues, label: impl Into<String>) -> Result<JetField, FieldError> {
        let n = domain.n;
        if values.shape() != (n, n) {
            return Err(FieldError::Parse(format!(
                "sample shape {:?} does not match n = {n}",
                values.shape()
            )));
        }
        let periodic = domain.is_periodic();
        let (hp, hq) = domain.spacing();
        let base = values.data().to_vec();
        // derivs[i][j] = ∂_p^i ∂_q^j samples
        let mut derivs: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); MAX_JET_ORDER + 1]; MAX_JET_ORDER + 1];
        derivs[0][0] = base;
        for j in 0..=MAX_JET_ORDER {
            if j > 0 {
                derivs[0][j] = fd(&derivs[0][j - 1], n, hq, periodic, Axis::Q);
            }
            for i in 1..=MAX_JET_ORDER - j {
                derivs[i][j] = fd(&derivs[i - 1][j], n, hp, periodic, Axis::P);
            }
        }
        let derivs = Arc::new(derivs);
        let (p0, q0) = match domain.kind {
            DomainKind::Torus => (0.0, 0.0),
            DomainKind::Rectangle { p, q, .. } => (p.0, q.0),
        };
        let locate = move |x: f64, lo: f64, h: f64| -> Option<usize> {
            let k = ((x - lo) / h).round() as i64;
            if periodic {
                Some(k.rem_euclid(n as i64) as usize)
            } else if (0..n as i64).contains(&k) {
                Some(k as usize)
            } else {
                None
            }
        };
        Ok(Self::from_fn(
            label,
            MAX_JET_ORDER,
            Provenance::Sampled,
            Some(*domain),
            move |p, q, k| match (locate(p, p0, hp), locate(q, q0, hq)) {
                (Some(i), Some(j)) => Jet::from_partials(k, |a, b| derivs[a][b][i * n + j]),
                _ => Jet::zero(k),
            },
        ))
    }
}

#[derive(Clone, Copy)]
enum Axis {
    P,
    Q,
}

/// Fourth-order central first difference along one axis of an `n × n` array.
fn fd(v: &[f64], n: usize, h: f64, periodic: bool, axis: Axis) -> Vec<f64> {
    let at = |i: i64, j: i64| -> f64 {
        let (i, j) = if periodic {
            (i.rem_euclid(n as i64), j.rem_euclid(n as i64))
        } else if i < 0 || j < 0 || i >= n as i64 || j >= n as i64 {
            return 0.0;
        } else {
            (i, j)
        };
        v[i as usize * n + j as usize]
    };
    let mut out = vec![0.0; n * n];
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            let s = |k: i64| match axis {
                Axis::P => at(i + k, j),
                Axis::Q => at(i, j + k),
            };
            out[i as usize * n + j as usize] = (-s(2) + 8.0 * s(1) - 8.0 * s(-1) + s(-2)) / (12.0 * h);
        }
    }
    out
}
