//! Normalization against ideal fronts and the additive binary ε-indicator.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pareto::ParetoFront;

/// Ranges narrower than this are treated as constant objectives.
pub const DEGENERATE_RANGE_TOL: f64 = 1e-12;

/// Per-objective min/max of one scenario's ideal front.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationContext {
    pub scenario: String,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub degenerate: Vec<bool>,
}

impl NormalizationContext {
    pub fn from_points(points: &[Vec<f64>], scenario: impl Into<String>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyFront)?;
        let k = first.len();
        let mut min = first.clone();
        let mut max = first.clone();
        for p in points {
            if p.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: p.len() });
            }
            for i in 0..k {
                min[i] = min[i].min(p[i]);
                max[i] = max[i].max(p[i]);
            }
        }
        let degenerate: Vec<bool> = (0..k).map(|i| max[i] - min[i] <= DEGENERATE_RANGE_TOL).collect();
        let scenario = scenario.into();
        for (i, d) in degenerate.iter().enumerate() {
            if *d {
                warn!("objective {i} has a degenerate range in scenario `{scenario}`; normalized to 0");
            }
        }
        Ok(NormalizationContext { scenario, min, max, degenerate })
    }

    pub fn num_objectives(&self) -> usize {
        self.min.len()
    }

    pub fn range(&self, i: usize) -> f64 {
        self.max[i] - self.min[i]
    }

    pub fn normalize_point(&self, p: &[f64]) -> Vec<f64> {
        p.iter().enumerate().map(|(i, &v)| normalize(v, i, self)).collect()
    }

    pub fn normalize_all(&self, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        points.iter().map(|p| self.normalize_point(p)).collect()
    }

    /// Inverse of [`normalize`] for non-degenerate objectives.
    pub fn denormalize(&self, value: f64, i: usize) -> f64 {
        if self.degenerate[i] {
            self.min[i]
        } else {
            self.min[i] + value * self.range(i)
        }
    }
}

pub fn build_normalization(ideal_front: &ParetoFront, scenario: &str) -> Result<NormalizationContext> {
    NormalizationContext::from_points(&ideal_front.objective_vectors(), scenario)
}

pub fn normalize(value: f64, i: usize, ctx: &NormalizationContext) -> f64 {
    if ctx.degenerate[i] {
        0.0
    } else {
        (value - ctx.min[i]) / ctx.range(i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorResult {
    pub epsilon: f64,
    /// For each target point: (covering source point, binding objective).
    pub witness: Vec<(usize, usize)>,
}

impl IndicatorResult {
    /// Recomputes ε from the witness alone.
    pub fn recompute(&self, p1: &[Vec<f64>], p2: &[Vec<f64>]) -> f64 {
        self.witness
            .iter()
            .enumerate()
            .map(|(l, &(j, i))| p1[j][i] - p2[l][i])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `max_l min_j max_i (p1[j][i] - p2[l][i])`: how far `p1` must shift to
/// cover every point of `p2`. Ties resolve to the lowest indices.
pub fn eps_indicator(p1: &[Vec<f64>], p2: &[Vec<f64>]) -> Result<IndicatorResult> {
    if p1.is_empty() || p2.is_empty() {
        return Err(Error::EmptyFront);
    }
    let k = p2[0].len();
    for p in p1.iter().chain(p2) {
        if p.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: p.len() });
        }
    }
    let mut epsilon = f64::NEG_INFINITY;
    let mut witness = Vec::with_capacity(p2.len());
    for q in p2 {
        let mut best = (f64::INFINITY, 0, 0);
        for (j, p) in p1.iter().enumerate() {
            let mut m = (f64::NEG_INFINITY, 0);
            for i in 0..k {
                let d = p[i] - q[i];
                if d > m.0 {
                    m = (d, i);
                }
            }
            if m.0 < best.0 {
                best = (m.0, j, m.1);
            }
        }
        epsilon = epsilon.max(best.0);
        witness.push((best.1, best.2));
    }
    Ok(IndicatorResult { epsilon, witness })
}

/// Indicator on raw objective values, for diagnostics.
pub fn raw_eps_indicator(p1: &ParetoFront, p2: &ParetoFront) -> Result<IndicatorResult> {
    eps_indicator(&p1.objective_vectors(), &p2.objective_vectors())
}

/// Indicator with both fronts normalized by `ctx`.
pub fn normalized_eps_indicator(p1: &[Vec<f64>], p2: &[Vec<f64>], ctx: &NormalizationContext) -> Result<IndicatorResult> {
    eps_indicator(&ctx.normalize_all(p1), &ctx.normalize_all(p2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let ctx = NormalizationContext::from_points(&[vec![2.0, 10.0], vec![10.0, 2.0]], "s").unwrap();
        assert_eq!((ctx.min.clone(), ctx.max.clone()), (vec![2.0, 2.0], vec![10.0, 10.0]));
        assert_eq!(normalize(6.0, 0, &ctx), 0.5);
        assert_eq!(normalize(2.0, 1, &ctx), 0.0);

        let ctx = NormalizationContext::from_points(&[vec![1.0, 9.0], vec![4.0, 5.0], vec![6.0, 2.0]], "s").unwrap();
        assert_eq!(ctx.min, vec![1.0, 2.0]);
        assert_eq!(ctx.max, vec![6.0, 9.0]);
        assert_eq!(ctx.degenerate, vec![false, false]);
    }

    #[test]
    fn singleton_is_degenerate() {
        let ctx = NormalizationContext::from_points(&[vec![3.0, 4.0]], "s").unwrap();
        assert_eq!(ctx.degenerate, vec![true, true]);
        assert_eq!(normalize(123.0, 0, &ctx), 0.0);
        assert!(matches!(NormalizationContext::from_points(&[], "s"), Err(Error::EmptyFront)));
    }

    #[test]
    fn small_examples() {
        let r = eps_indicator(&[vec![1.0, 3.0], vec![3.0, 1.0]], &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(r.epsilon, 3.0);
        let r = eps_indicator(&[vec![0.0, 2.0], vec![2.0, 0.0]], &[vec![1.0, 1.0]]).unwrap();
        assert_eq!(r.epsilon, 1.0);
        assert_eq!(r.witness, vec![(0, 1)]);
        let p = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
        assert_eq!(eps_indicator(&p, &p).unwrap().epsilon, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(eps_indicator(&[], &[vec![1.0]]), Err(Error::EmptyFront)));
        assert!(matches!(
            eps_indicator(&[vec![1.0, 2.0, 3.0]], &[vec![1.0, 2.0]]),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}
