use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use super::CouplingPoint;
use crate::error::{usage, Error, Result};
use crate::rng;
use crate::tiling::TilingSequence;
use crate::Rational;

/// A finite union of prefix cylinders `{x : x_0 = c_0, …, x_j = c_j}`.
/// Nested cylinders are absorbed on construction, which leaves a disjoint union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderSet {
    cylinders: Vec<Vec<u128>>,
}

impl CylinderSet {
    pub fn new(tiling: &TilingSequence, mut cylinders: Vec<Vec<u128>>) -> Result<Self> {
        for c in &cylinders {
            for (k, &i) in c.iter().enumerate() {
                if tiling.letter_size(k).is_none_or(|s| i >= s) {
                    return usage(format!("cylinder coordinate {k} = {i} is not a letter index"));
                }
            }
        }
        cylinders.sort();
        cylinders.dedup();
        let kept: Vec<Vec<u128>> = cylinders
            .iter()
            .filter(|c| !cylinders.iter().any(|d| d.len() < c.len() && c.starts_with(d)))
            .cloned()
            .collect();
        Ok(CylinderSet { cylinders: kept })
    }

    /// The whole space, as the cylinder with an empty prefix.
    pub fn everything() -> Self {
        CylinderSet { cylinders: vec![Vec::new()] }
    }

    pub fn cylinders(&self) -> &[Vec<u128>] {
        &self.cylinders
    }

    fn cylinder_measure(tiling: &TilingSequence, c: &[u128]) -> Result<Rational> {
        let size = if c.is_empty() { Some(1) } else { tiling.tile_size(c.len() - 1) };
        let size = size
            .and_then(|s| i128::try_from(s).ok())
            .ok_or_else(|| Error::ResourceExhausted {
                what: "cylinder measure".into(),
                reached: c.len() as u64,
            })?;
        Ok(Rational::new(1, size))
    }

    pub fn measure(&self, tiling: &TilingSequence) -> Result<Rational> {
        self.cylinders
            .iter()
            .try_fold(Rational::from_integer(0), |acc, c| Ok(acc + Self::cylinder_measure(tiling, c)?))
    }

    pub fn contains(&self, tiling: &TilingSequence, x: &CouplingPoint) -> bool {
        self.cylinders.iter().any(|c| {
            c.iter()
                .enumerate()
                .all(|(k, &i)| x.coordinate(k, tiling.letter_size(k).expect("level within range")) == i)
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReturnTimeReport {
    pub radius: u32,
    pub ball_size: u64,
    pub measure: f64,
    /// Estimate of `∫_{X_0} |R_{X_0}(x) ∩ B(e, n)| / V(n) dμ`.
    pub lhs: f64,
    pub stderr: f64,
    /// `2μ(X_0) − 1`.
    pub rhs: f64,
    pub exhausted_fraction: f64,
    pub holds: bool,
}

impl TilingSequence {
    /// Samples `x` uniformly from `X_0` and counts the ball elements returning it to `X_0`.
    /// Moves that exhaust `max_depth` count as non-returns.
    pub fn return_time_density(
        &self,
        set: &CylinderSet,
        radius: u32,
        samples: u64,
        seed: u64,
        max_depth: usize,
    ) -> Result<ReturnTimeReport> {
        if samples == 0 {
            return usage("return-time density needs at least one sample");
        }
        let measure_q = set.measure(self)?;
        let measure = *measure_q.numer() as f64 / *measure_q.denom() as f64;
        let rhs = 2.0 * measure - 1.0;
        let ball = self.group().ball(radius)?;
        let ball_size = ball.len() as u64;
        if set.cylinders().is_empty() {
            return Ok(ReturnTimeReport {
                radius,
                ball_size,
                measure: 0.0,
                lhs: 0.0,
                stderr: 0.0,
                rhs,
                exhausted_fraction: 0.0,
                holds: true,
            });
        }
        let weights: Vec<f64> = set
            .cylinders()
            .iter()
            .map(|c| CylinderSet::cylinder_measure(self, c).map(|r| *r.numer() as f64 / *r.denom() as f64))
            .collect::<Result<_>>()?;
        let pick = WeightedIndex::new(&weights).map_err(|e| Error::Usage(format!("cylinder weights: {e}")))?;
        let outcomes = rng::par_samples(samples, seed, |_, r| -> Result<(f64, u64)> {
            let c = &set.cylinders()[pick.sample(r)];
            let x = CouplingPoint::new(c.clone(), r.random());
            let mut returns = 0u64;
            let mut exhausted = 0u64;
            for gamma in &ball {
                match self.act(gamma, &x, max_depth) {
                    Ok((y, _)) => returns += set.contains(self, &y) as u64,
                    Err(Error::DepthExhausted { .. }) => exhausted += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok((measure * returns as f64 / ball_size as f64, exhausted))
        });
        let outcomes: Vec<(f64, u64)> = outcomes.into_iter().collect::<Result<_>>()?;
        let values: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let exhausted: u64 = outcomes.iter().map(|o| o.1).sum();
        let (lhs, stderr) = rng::mean_stderr(&values);
        Ok(ReturnTimeReport {
            radius,
            ball_size,
            measure,
            lhs,
            stderr,
            rhs,
            exhausted_fraction: exhausted as f64 / (samples * ball_size) as f64,
            holds: lhs + 3.0 * stderr >= rhs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_space_returns_always() {
        let t = TilingSequence::zn(2, 1).unwrap();
        let r = t.return_time_density(&CylinderSet::everything(), 3, 50, 1, 40).unwrap();
        assert_eq!((r.lhs, r.stderr, r.rhs), (1.0, 0.0, 1.0));
        assert!(r.holds);
    }

    #[test]
    fn nested_cylinders_are_absorbed() {
        let t = TilingSequence::zn(1, 1).unwrap();
        let s = CylinderSet::new(&t, vec![vec![0], vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(s.cylinders(), &[vec![0], vec![1, 1]]);
        assert_eq!(s.measure(&t).unwrap(), Rational::new(3, 4));
        let r = t.return_time_density(&s, 2, 10, 3, 40).unwrap();
        assert_eq!(r.rhs, 0.5);
        assert!(CylinderSet::new(&t, vec![vec![2]]).is_err());
    }
}
