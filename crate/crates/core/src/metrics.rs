//! Ground-manifold weight, flip-orbit balance, and distance to the Gibbs target.

use serde::{Deserialize, Serialize};

use crate::error::OperatorError;
use crate::ising::{Distribution, GroundSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub p_gs: f64,
    /// One entry per flip orbit, in [`GroundSet::orbits`] order.
    pub orbit_probs: Vec<f64>,
    /// `max - min` over `orbit_probs`.
    pub fairness_gap: f64,
    pub tvd: f64,
}

pub fn ground_state_probability(dist: &Distribution, gs: &GroundSet) -> f64 {
    gs.states.iter().map(|&s| dist.get(s)).sum()
}

/// Per-orbit probability sums; `None` when the instance has nonzero fields.
pub fn orbit_probabilities(dist: &Distribution, gs: &GroundSet) -> Option<Vec<f64>> {
    let orbits = gs.orbits.as_ref()?;
    Some(
        orbits
            .iter()
            .map(|orbit| orbit.iter().map(|&s| dist.get(s)).sum())
            .collect(),
    )
}

pub fn fairness_gap(orbit_probs: &[f64]) -> f64 {
    if orbit_probs.is_empty() {
        return 0.0;
    }
    let max = orbit_probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = orbit_probs.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// `½ Σ |a(σ) - b(σ)|`.
pub fn total_variation_distance(a: &Distribution, b: &Distribution) -> Result<f64, OperatorError> {
    if a.len() != b.len() {
        return Err(OperatorError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(0.5
        * a.probs()
            .iter()
            .zip(b.probs())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>())
}

/// All metrics of `dist` at once; orbit entries are empty when orbits are
/// undefined.
pub fn fairness_report(
    dist: &Distribution,
    gs: &GroundSet,
    reference: &Distribution,
) -> Result<FairnessReport, OperatorError> {
    let orbit_probs = orbit_probabilities(dist, gs).unwrap_or_default();
    Ok(FairnessReport {
        p_gs: ground_state_probability(dist, gs),
        fairness_gap: fairness_gap(&orbit_probs),
        orbit_probs,
        tvd: total_variation_distance(dist, reference)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{gibbs_distribution, ground_set, toy_instance, IsingInstance, SpinConfig};

    #[test]
    fn uniform_on_toy() {
        let gs = ground_set(&toy_instance()).unwrap();
        let u = Distribution::uniform(32);
        assert_eq!(ground_state_probability(&u, &gs), 0.1875);
        assert_eq!(orbit_probabilities(&u, &gs).unwrap(), vec![1.0 / 16.0; 3]);
    }

    #[test]
    fn one_hot_on_toy() {
        let gs = ground_set(&toy_instance()).unwrap();
        let d = Distribution::one_hot(32, SpinConfig::all_up(5));
        assert_eq!(ground_state_probability(&d, &gs), 1.0);
        assert_eq!(orbit_probabilities(&d, &gs).unwrap(), vec![1.0, 0.0, 0.0]);
        let r = fairness_report(&d, &gs, &d).unwrap();
        assert_eq!(r.fairness_gap, 1.0);
        assert_eq!(r.tvd, 0.0);
    }

    #[test]
    fn gibbs_on_toy() {
        let toy = toy_instance();
        let gs = ground_set(&toy).unwrap();
        let g = gibbs_distribution(&toy, 1.0).unwrap();
        let orbits = orbit_probabilities(&g.distribution, &gs).unwrap();
        assert_eq!(orbits[0], orbits[1]);
        assert_eq!(orbits[1], orbits[2]);
        assert!((orbits[0] - 0.2786).abs() < 1e-4);
        let pgs = ground_state_probability(&g.distribution, &gs);
        assert!((pgs - 0.8359).abs() < 1e-4);

        let t = total_variation_distance(&Distribution::uniform(32), &g.distribution).unwrap();
        assert!((t - 0.6484).abs() < 1e-4);
    }

    #[test]
    fn tvd_extremes() {
        let a = Distribution::one_hot(4, SpinConfig(0));
        let b = Distribution::one_hot(4, SpinConfig(3));
        assert_eq!(total_variation_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(total_variation_distance(&a, &a).unwrap(), 0.0);
        assert!(total_variation_distance(&a, &Distribution::uniform(8)).is_err());
    }

    #[test]
    fn orbits_undefined_with_fields() {
        let mut inst = IsingInstance::new(2).unwrap();
        inst.set_field(0, 0.5).unwrap();
        let gs = ground_set(&inst).unwrap();
        assert!(orbit_probabilities(&Distribution::uniform(4), &gs).is_none());
    }
}
