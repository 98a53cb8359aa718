//! Domains, tensor grids and deterministic grid reductions.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FieldError;

pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    /// `[0, 2π)²` with periodic identification.
    Torus,
    /// `[p0, p1] × [q0, q1]`; fields must vanish on the outer `margin` band.
    Rectangle {
        p: (f64, f64),
        q: (f64, f64),
        margin: usize,
    },
}

/// A 2-D domain sampled on an `n × n` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain2 {
    pub kind: DomainKind,
    pub n: usize,
}

impl Domain2 {
    pub fn torus(n: usize) -> Result<Self, FieldError> {
        Self::new(DomainKind::Torus, n)
    }

    pub fn rectangle(p: (f64, f64), q: (f64, f64), n: usize, margin: usize) -> Result<Self, FieldError> {
        Self::new(DomainKind::Rectangle { p, q, margin }, n)
    }

    pub fn new(kind: DomainKind, n: usize) -> Result<Self, FieldError> {
        if n < MIN_GRID {
            return Err(FieldError::Precondition(format!("grid size n = {n} below {MIN_GRID}")));
        }
        if let DomainKind::Rectangle { p, q, margin } = kind {
            if !(p.1 > p.0 && q.1 > q.0) || !(p.0.is_finite() && p.1.is_finite() && q.0.is_finite() && q.1.is_finite()) {
                return Err(FieldError::Precondition(format!("degenerate rectangle {p:?} x {q:?}")));
            }
            if 2 * margin >= n {
                return Err(FieldError::Precondition(format!("margin {margin} too wide for n = {n}")));
            }
        }
        Ok(Self { kind, n })
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, DomainKind::Torus)
    }

    /// Grid spacing `(h_p, h_q)`.
    pub fn spacing(&self) -> (f64, f64) {
        match self.kind {
            DomainKind::Torus => (TAU / self.n as f64, TAU / self.n as f64),
            DomainKind::Rectangle { p, q, .. } => {
                let m = (self.n - 1) as f64;
                ((p.1 - p.0) / m, (q.1 - q.0) / m)
            }
        }
    }

    /// Larger of the two spacings.
    pub fn h(&self) -> f64 {
        let (a, b) = self.spacing();
        a.max(b)
    }

    pub fn nodes_p(&self) -> Vec<f64> {
        let (h, _) = self.spacing();
        let lo = match self.kind {
            DomainKind::Torus => 0.0,
            DomainKind::Rectangle { p, .. } => p.0,
        };
        (0..self.n).map(|i| lo + i as f64 * h).collect()
    }

    pub fn nodes_q(&self) -> Vec<f64> {
        let (_, h) = self.spacing();
        let lo = match self.kind {
            DomainKind::Torus => 0.0,
            DomainKind::Rectangle { q, .. } => q.0,
        };
        (0..self.n).map(|i| lo + i as f64 * h).collect()
    }

    pub fn grid(&self) -> Grid {
        let p = self.nodes_p();
        let q = self.nodes_q();
        let (wp, wq) = if self.is_periodic() {
            let (hp, hq) = self.spacing();
            (vec![hp; self.n], vec![hq; self.n])
        } else {
            (trapezoid_weights(&p), trapezoid_weights(&q))
        };
        Grid {
            p,
            q,
            wp,
            wq,
            domain: Some(*self),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DomainKind::Torus => "torus",
            DomainKind::Rectangle { .. } => "rectangle",
        }
    }
}

fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = x[i + 1] - x[i];
        w[i] += h / 2.0;
        w[i + 1] += h / 2.0;
    }
    w
}

/// A tensor-product point set with quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    p: Vec<f64>,
    q: Vec<f64>,
    wp: Vec<f64>,
    wq: Vec<f64>,
    domain: Option<Domain2>,
}

impl Grid {
    /// Nonuniform tensor grid from sorted, deduplicated node lists
    /// (trapezoid weights).
    pub fn tensor(mut p: Vec<f64>, mut q: Vec<f64>) -> Self {
        for v in [&mut p, &mut q] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let wp = trapezoid_weights(&p);
        let wq = trapezoid_weights(&q);
        Grid {
            p,
            q,
            wp,
            wq,
            domain: None,
        }
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn domain(&self) -> Option<&Domain2> {
        self.domain.as_ref()
    }

    pub fn len(&self) -> usize {
        self.p.len() * self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest spacing between consecutive nodes on either axis.
    pub fn h(&self) -> f64 {
        if let Some(d) = &self.domain {
            return d.h();
        }
        let gap = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        gap(&self.p).max(gap(&self.q))
    }

    /// Evaluates `f` at every node, rows (fixed `p`) in parallel.
    pub fn eval<F>(&self, f: F) -> GridValues
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let nq = self.q.len();
        let mut data = vec![0.0; self.len()];
        data.par_chunks_mut(nq.max(1)).enumerate().for_each(|(i, row)| {
            let p = self.p[i];
            for (x, &q) in row.iter_mut().zip(&self.q) {
                *x = f(p, q);
            }
        });
        GridValues {
            np: self.p.len(),
            nq,
            data,
        }
    }

    /// Evaluates `K` outputs per node at once.
    pub fn eval_many<const K: usize, F>(&self, f: F) -> [GridValues; K]
    where
        F: Fn(f64, f64) -> [f64; K] + Sync,
    {
        let nq = self.q.len();
        let rows: Vec<Vec<[f64; K]>> = self
            .p
            .par_iter()
            .map(|&p| self.q.iter().map(|&q| f(p, q)).collect())
            .collect();
        std::array::from_fn(|k| GridValues {
            np: self.p.len(),
            nq,
            data: rows.iter().flat_map(|r| r.iter().map(move |v| v[k])).collect(),
        })
    }

    /// `∫ f ω` by the grid's quadrature rule. Row sums run in parallel and are
    /// combined in row order, so the result does not depend on scheduling.
    pub fn integrate(&self, v: &GridValues) -> f64 {
        let nq = self.q.len();
        let rows: Vec<f64> = v
            .data
            .par_chunks(nq.max(1))
            .zip(self.wp.par_iter())
            .map(|(row, wp)| wp * row.iter().zip(&self.wq).map(|(x, w)| x * w).sum::<f64>())
            .collect();
        rows.iter().sum()
    }

    /// Errors if `v` is not identically zero on the outer margin band of a
    /// rectangle domain.
    pub fn check_margin(&self, v: &GridValues, what: &str) -> Result<(), FieldError> {
        let Some(Domain2 {
            kind: DomainKind::Rectangle { margin, .. },
            ..
        }) = self.domain
        else {
            return Ok(());
        };
        let m = margin.max(1);
        let (np, nq) = (v.np, v.nq);
        for i in 0..np {
            for j in 0..nq {
                let band = i < m || j < m || i >= np - m || j >= nq - m;
                if band && v.get(i, j) != 0.0 {
                    return Err(FieldError::Margin {
                        what: what.to_string(),
                        p: self.p[i],
                        q: self.q[j],
                        value: v.get(i, j),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Row-major samples (row `i` ↔ `p_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    np: usize,
    nq: usize,
    data: Vec<f64>,
}

impl GridValues {
    pub fn from_vec(np: usize, nq: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), np * nq);
        Self { np, nq, data }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.np, self.nq)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.nq + j]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn osc(&self) -> f64 {
        self.max() - self.min()
    }

    /// `(i, j)` of the first maximal entry.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, x) in self.data.iter().enumerate() {
            if *x > self.data[best] {
                best = k;
            }
        }
        (best / self.nq, best % self.nq)
    }

    pub fn argmin(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, x) in self.data.iter().enumerate() {
            if *x < self.data[best] {
                best = k;
            }
        }
        (best / self.nq, best % self.nq)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridValues {
        GridValues {
            np: self.np,
            nq: self.nq,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with(&self, other: &GridValues, f: impl Fn(f64, f64) -> f64) -> GridValues {
        assert_eq!(self.shape(), other.shape());
        GridValues {
            np: self.np,
            nq: self.nq,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_quadrature_is_exact_for_trig() {
        let g = Domain2::torus(32).unwrap().grid();
        let v = g.eval(|p, q| (p.cos() * q.sin()).powi(2));
        assert!((g.integrate(&v) - std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(Domain2::torus(8).is_err());
        assert!(Domain2::rectangle((0.0, 1.0), (0.0, 1.0), 16, 8).is_err());
    }

    #[test]
    fn margin_check() {
        let d = Domain2::rectangle((-1.0, 1.0), (-1.0, 1.0), 21, 2).unwrap();
        let g = d.grid();
        let inside = g.eval(|p, q| if p.abs() < 0.5 && q.abs() < 0.5 { 1.0 } else { 0.0 });
        assert!(g.check_margin(&inside, "f").is_ok());
        let all = g.eval(|_, _| 1.0);
        assert!(g.check_margin(&all, "f").is_err());
    }

    #[test]
    fn eval_many_matches_eval() {
        let g = Domain2::torus(16).unwrap().grid();
        let [a, b] = g.eval_many(|p, q| [p + q, p * q]);
        assert_eq!(a, g.eval(|p, q| p + q));
        assert_eq!(b, g.eval(|p, q| p * q));
    }
}
