use serde::Serialize;

use super::{FiniteSupportFunction, GradientSide};
use crate::coupling::{CouplingPoint, IntegrabilityGauge, MatchedCoupling, Side};
use crate::error::{usage, Error, Result};
use crate::rng;
use crate::tiling::LetterRule;

/// `E‖∇^l f^x‖_p^p` against `C ‖∇^r f‖_p^p` with `C = |S_Γ| max_s E d(s·x, s*x)^p`.
#[derive(Clone, Debug, Serialize)]
pub struct InducedGradientReport {
    pub p: f64,
    pub samples: u64,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub constant: f64,
    pub constant_stderr: f64,
    /// Whether `C` came from the exact distance law rather than sampling.
    pub constant_exact: bool,
    pub gradient_pow: f64,
    pub rhs: f64,
    pub exhausted_fraction: f64,
    pub holds: bool,
}

/// `E‖∇^l f^x‖_1 / ‖f‖_1` against `2C / φ(‖f‖_1)` for `f` scaled to `‖∇^r f‖_1 = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeGradientReport {
    pub gauge: String,
    pub samples: u64,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub constant: f64,
    pub constant_stderr: f64,
    pub constant_exact: bool,
    pub rhs: f64,
    pub exhausted_fraction: f64,
    pub holds: bool,
}

struct Fibers {
    mean: f64,
    stderr: f64,
    exhausted_fraction: f64,
}

struct Constant {
    value: f64,
    stderr: f64,
    exact: bool,
}

impl MatchedCoupling {
    /// `‖∇^l f^x‖_p^p` for the fiber function `f^x(γ) = |f(c(γ, x)^{-1})|` on the acting group.
    ///
    /// The support of `f^x` is found exactly by transferring each inverted support
    /// element of `f` back to the acting side, so nothing is truncated.
    pub fn fiber_gradient_pow(
        &self,
        acting: Side,
        f: &FiniteSupportFunction,
        p: f64,
        x: &CouplingPoint,
    ) -> Result<f64> {
        let lambda_group = self.tiling(acting.other()).group();
        let mut entries = Vec::with_capacity(f.support_size());
        for (lam, v) in f.support() {
            let gamma = self.transfer_cocycle(acting.other(), &lambda_group.inv(lam), x)?;
            entries.push((gamma, v.abs()));
        }
        let fx = FiniteSupportFunction::new(self.tiling(acting).group(), entries)?;
        Ok(fx.gradient_norm_pow(GradientSide::Left, p))
    }

    fn fibers(&self, acting: Side, f: &FiniteSupportFunction, p: f64, samples: u64, seed: u64) -> Result<Fibers> {
        let outcomes = rng::par_samples(samples, seed, |i, _| {
            let x = CouplingPoint::random(rng::mix(seed, &[i]));
            match self.fiber_gradient_pow(acting, f, p, &x) {
                Ok(v) => Ok(Some(v)),
                Err(Error::DepthExhausted { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        });
        let values: Vec<f64> = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        let exhausted_fraction = (samples as usize - values.len()) as f64 / samples as f64;
        let (mean, stderr) = if values.is_empty() { (0.0, 0.0) } else { rng::mean_stderr(&values) };
        Ok(Fibers {
            mean,
            stderr,
            exhausted_fraction,
        })
    }

    fn has_exact_law(&self) -> bool {
        matches!(
            (self.left().rule(), self.right().rule()),
            (LetterRule::ZnDyadic { .. }, LetterRule::ZnDyadic { .. })
        )
    }

    fn gradient_constant(&self, acting: Side, gauge: &IntegrabilityGauge, samples: u64, seed: u64) -> Result<Constant> {
        let gens = self.tiling(acting).group().generators();
        let mut best = Constant {
            value: 0.0,
            stderr: 0.0,
            exact: self.has_exact_law(),
        };
        for (j, s) in gens.iter().enumerate() {
            let (value, stderr) = if best.exact {
                (self.distance_law(acting, s, self.max_depth())?.expectation(gauge), 0.0)
            } else {
                let r = self.mc_integrability(acting, s, gauge, samples, rng::mix(seed, &[j as u64]))?;
                (r.estimate, r.stderr)
            };
            if value > best.value {
                best.value = value;
                best.stderr = stderr;
            }
        }
        let n = gens.len() as f64;
        Ok(Constant {
            value: n * best.value,
            stderr: n * best.stderr,
            exact: best.exact,
        })
    }

    /// Checks the `ℓ^p` induced-gradient inequality, with `f` a function on the partner group.
    pub fn induced_gradient_check(
        &self,
        acting: Side,
        f: &FiniteSupportFunction,
        p: f64,
        samples: u64,
        seed: u64,
    ) -> Result<InducedGradientReport> {
        if !(p >= 1.0 && p.is_finite()) {
            return usage(format!("induced gradients need p >= 1, got {p}"));
        }
        if samples == 0 {
            return usage("induced gradient check needs at least one sample");
        }
        if f.group() != self.tiling(acting.other()).group() {
            return usage("the function must live on the partner group");
        }
        let fib = self.fibers(acting, f, p, samples, seed)?;
        let c = self.gradient_constant(acting, &IntegrabilityGauge::Power(p), samples, rng::mix(seed, &[u64::MAX]))?;
        let gradient_pow = f.gradient_norm_pow(GradientSide::Right, p);
        let rhs = c.value * gradient_pow;
        let slack = 3.0 * (fib.stderr + c.stderr * gradient_pow);
        Ok(InducedGradientReport {
            p,
            samples,
            lhs: fib.mean,
            lhs_stderr: fib.stderr,
            constant: c.value,
            constant_stderr: c.stderr,
            constant_exact: c.exact,
            gradient_pow,
            rhs,
            exhausted_fraction: fib.exhausted_fraction,
            holds: fib.mean <= rhs * (1.0 + 1e-12) + slack,
        })
    }

    /// The `ℓ¹` version with a gauge `φ` such that `φ` and `t/φ(t)` are nondecreasing.
    pub fn induced_gauge_check(
        &self,
        acting: Side,
        f: &FiniteSupportFunction,
        gauge: &IntegrabilityGauge,
        samples: u64,
        seed: u64,
    ) -> Result<GaugeGradientReport> {
        match gauge {
            IntegrabilityGauge::Identity => {}
            IntegrabilityGauge::Power(q) if *q <= 1.0 => {}
            IntegrabilityGauge::LogPower(e) if *e == 0.0 => {}
            _ => return Err(Error::NotApplicable(format!("{gauge} does not have t/φ(t) nondecreasing"))),
        }
        if samples == 0 {
            return usage("induced gradient check needs at least one sample");
        }
        if f.group() != self.tiling(acting.other()).group() {
            return usage("the function must live on the partner group");
        }
        let grad = f.gradient_norm_pow(GradientSide::Right, 1.0);
        if grad == 0.0 {
            return Err(Error::NotApplicable("the zero function has no normalization".into()));
        }
        let g = f.scaled(1.0 / grad);
        let norm = g.norm_pow(1.0);
        let fib = self.fibers(acting, &g, 1.0, samples, seed)?;
        let c = self.gradient_constant(acting, gauge, samples, rng::mix(seed, &[u64::MAX]))?;
        let scale = 2.0 / gauge.eval(norm);
        let rhs = scale * c.value;
        let (lhs, lhs_stderr) = (fib.mean / norm, fib.stderr / norm);
        Ok(GaugeGradientReport {
            gauge: gauge.to_string(),
            samples,
            lhs,
            lhs_stderr,
            constant: c.value,
            constant_stderr: c.stderr,
            constant_exact: c.exact,
            rhs,
            exhausted_fraction: fib.exhausted_fraction,
            holds: lhs <= rhs * (1.0 + 1e-12) + 3.0 * (lhs_stderr + scale * c.stderr),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupDescriptor, GroupElement};
    use crate::tiling::TilingSequence;

    #[test]
    fn identity_coupling_is_deterministic() {
        let c = MatchedCoupling::diagonal(TilingSequence::zn(1, 1).unwrap(), 40).unwrap();
        let g = GroupDescriptor::zn(1);
        let f = FiniteSupportFunction::new(&g, [(GroupElement::Zn(vec![0]), 2.0), (GroupElement::Zn(vec![3]), -1.0)])
            .unwrap();
        let r = c.induced_gradient_check(Side::Left, &f, 1.0, 20, 4).unwrap();
        assert_eq!((r.lhs, r.lhs_stderr), (12.0, 0.0));
        // The exact law stops at depth 40, so the last 2^-40 of mass is missing.
        assert!((r.constant - 2.0).abs() < 1e-11 && (r.rhs - 24.0).abs() < 1e-10);
        assert!(r.constant_exact && r.holds);
        let delta = FiniteSupportFunction::indicator(&g, [g.identity()]).unwrap();
        let r = c.induced_gradient_check(Side::Right, &delta, 2.0, 5, 1).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert!((r.rhs - 8.0).abs() < 1e-10);
        let zero = c.induced_gradient_check(Side::Left, &FiniteSupportFunction::zero(&g), 1.0, 5, 1).unwrap();
        assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
        assert!(zero.holds);
    }

    #[test]
    fn rejects_bad_input() {
        let c = MatchedCoupling::diagonal(TilingSequence::zn(1, 1).unwrap(), 40).unwrap();
        let g = GroupDescriptor::zn(2);
        let f = FiniteSupportFunction::indicator(&g, [g.identity()]).unwrap();
        assert!(c.induced_gradient_check(Side::Left, &f, 1.0, 5, 1).is_err());
        let h = GroupDescriptor::zn(1);
        let f = FiniteSupportFunction::indicator(&h, [h.identity()]).unwrap();
        assert!(c.induced_gradient_check(Side::Left, &f, 0.5, 5, 1).is_err());
        assert!(c.induced_gauge_check(Side::Left, &f, &IntegrabilityGauge::Power(2.0), 5, 1).is_err());
    }
}
