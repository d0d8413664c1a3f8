use serde::Serialize;

use super::{CouplingPoint, IntegrabilityGauge, MatchedCoupling, Side};
use crate::error::{usage, Error, Result};
use crate::group::GroupElement;
use crate::rng;
use crate::tiling::TilingSequence;

/// `Σ_{k ≤ K} φ(2R'_k)(ε_{k-1} − ε_k)` with `ε_{-1} = 1`, built from the
/// claimed parameters of the acting tiling (`ε`) and its partner (`R'`).
#[derive(Clone, Debug, Serialize)]
pub struct StratifiedBound {
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub value: f64,
    /// Set when the terms have stopped decreasing at the truncation level, so
    /// the truncated sum is no certificate of finiteness.
    pub diverging: bool,
}

pub fn stratified_bound(
    acting: &TilingSequence,
    partner: &TilingSequence,
    gauge: &IntegrabilityGauge,
    max_k: usize,
) -> Option<StratifiedBound> {
    let eps = |k: usize| -> Option<f64> {
        let r = acting.claimed_epsilon(k)?;
        Some(*r.numer() as f64 / *r.denom() as f64)
    };
    let mut terms = Vec::with_capacity(max_k + 1);
    let mut prev = 1.0;
    for k in 0..=max_k {
        let e = eps(k)?;
        let r = partner.claimed_radius(k)? as f64;
        terms.push(gauge.eval(2.0 * r) * (prev - e));
        prev = e;
    }
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let tail = &terms[terms.len().saturating_sub(3)..];
    let diverging = terms.iter().any(|t| !t.is_finite())
        || (tail.len() >= 2 && tail.windows(2).all(|w| w[1] >= w[0]));
    Some(StratifiedBound {
        value: *partial_sums.last().unwrap_or(&0.0),
        terms,
        partial_sums,
        diverging,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityEstimate {
    pub gauge: String,
    pub samples: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub exhausted_fraction: f64,
    pub stratified_bound: Option<f64>,
    pub diverging: Option<bool>,
}

impl MatchedCoupling {
    /// Monte Carlo mean of `φ(d_{S'}(x, γ·x))` over `samples` seeded points.
    pub fn mc_integrability(
        &self,
        side: Side,
        gamma: &GroupElement,
        gauge: &IntegrabilityGauge,
        samples: u64,
        seed: u64,
    ) -> Result<IntegrabilityEstimate> {
        if samples == 0 {
            return usage("integrability estimate needs at least one sample");
        }
        self.tiling(side).group().check(gamma)?;
        let outcomes = rng::par_samples(samples, seed, |i, _| {
            let x = CouplingPoint::random(rng::mix(seed, &[i]));
            match self.transfer_distance(side, gamma, &x) {
                Ok((d, _)) => Ok(Some(gauge.eval(d as f64))),
                Err(Error::DepthExhausted { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        });
        let outcomes: Vec<Option<f64>> = outcomes.into_iter().collect::<Result<_>>()?;
        let values: Vec<f64> = outcomes.iter().flatten().copied().collect();
        let (estimate, stderr) = rng::mean_stderr(&values);
        let bound = stratified_bound(self.tiling(side), self.tiling(side.other()), gauge, self.max_depth());
        Ok(IntegrabilityEstimate {
            gauge: gauge.to_string(),
            samples,
            estimate,
            stderr,
            exhausted_fraction: (samples as usize - values.len()) as f64 / samples as f64,
            stratified_bound: bound.as_ref().map(|b| b.value),
            diverging: bound.map(|b| b.diverging),
        })
    }
}
