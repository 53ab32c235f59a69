//! `‖fg - gf‖² = ‖fg‖²(1 - ‖fg‖²)` holds for 2x2 projections but not in general.

use std::f64::consts::FRAC_PI_4;

use crate::projections::{pair_from_angles, random_pair_with_ranks, AngleSpec, ProjectionPair};

use super::{norm, TrialReport, VerifyError};

/// `(|‖fg-gf‖² - ‖fg‖²(1-‖fg‖²)|, ‖fg‖, ‖fg-gf‖)`.
pub fn eq2_violation(pair: &ProjectionPair) -> Result<(f64, f64, f64), VerifyError> {
    let fg = pair.fg();
    let a = norm(&fg)?;
    let comm = norm(&(&fg - &pair.gf()))?;
    let a2 = a * a;
    Ok(((comm * comm - a2 * (1.0 - a2)).abs(), a, comm))
}

/// The 2x2 identity; refuses pairs of any other size.
pub fn check_eq2_m2(pair: &ProjectionPair, tol: f64) -> Result<TrialReport, VerifyError> {
    if pair.dim() != 2 {
        return Err(VerifyError::InvalidArgument(format!(
            "the 2x2 identity needs dim 2, got {}",
            pair.dim()
        )));
    }
    let (violation, a, comm) = eq2_violation(pair)?;
    Ok(TrialReport::new(
        "eq2_m2",
        &pair.provenance,
        [("norm_fg", a), ("norm_comm", comm)],
        violation,
        tol,
    ))
}

fn check_counterexample_dim(dim: usize) -> Result<(), VerifyError> {
    if dim < 4 || dim % 2 != 0 {
        return Err(VerifyError::InvalidArgument(format!(
            "counterexamples need an even dim >= 4, got {dim}"
        )));
    }
    Ok(())
}

/// Cells at angles `(0, π/4, π/4, ...)`: `‖fg‖ = 1` from the first cell and
/// `‖fg - gf‖ = 1/2` from the others, so the violation is `1/4`.
pub fn eq2_counterexample(dim: usize) -> Result<(ProjectionPair, f64), VerifyError> {
    check_counterexample_dim(dim)?;
    let mut angles = vec![0.0];
    angles.resize(dim / 2, FRAC_PI_4);
    let pair = pair_from_angles(&AngleSpec::new(angles))?;
    let (violation, _, _) = eq2_violation(&pair)?;
    Ok((pair, violation))
}

#[derive(Debug, Clone)]
pub struct Eq2Search {
    pub pair: ProjectionPair,
    pub violation: f64,
    pub trials: usize,
    /// Samples whose violation exceeded `1e-8`.
    pub violating_trials: usize,
}

/// Samples rank-`dim/2` pairs with seeds `base_seed + i` and keeps the worst one.
pub fn eq2_counterexample_search(dim: usize, budget: usize, base_seed: u64) -> Result<Eq2Search, VerifyError> {
    check_counterexample_dim(dim)?;
    if budget == 0 {
        return Err(VerifyError::InvalidArgument("budget must be positive".into()));
    }
    let mut best: Option<(ProjectionPair, f64)> = None;
    let mut violating = 0;
    for i in 0..budget {
        let pair = random_pair_with_ranks(dim, dim / 2, dim / 2, base_seed.wrapping_add(i as u64))?;
        let (v, _, _) = eq2_violation(&pair)?;
        if v > 1e-8 {
            violating += 1;
        }
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((pair, v));
        }
    }
    let (pair, violation) = best.expect("budget is positive");
    Ok(Eq2Search {
        pair,
        violation,
        trials: budget,
        violating_trials: violating,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{paper_2x2_pair, random_pair};

    #[test]
    fn fixed_pair_satisfies_identity() {
        let r = check_eq2_m2(&paper_2x2_pair(), 1e-12).unwrap();
        assert!(r.pass);
        // 1/4 = (1/2)(1 - 1/2)
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn equal_pair_satisfies_identity() {
        let p = paper_2x2_pair();
        let same = ProjectionPair { g: p.f.clone(), ..p };
        assert!(check_eq2_m2(&same, 1e-12).unwrap().pass);
    }

    #[test]
    fn random_two_by_two_pairs_satisfy_identity() {
        for seed in 0..200 {
            let r = check_eq2_m2(&random_pair(2, seed).unwrap(), 1e-10).unwrap();
            assert!(r.pass, "seed {seed}: {}", r.residual);
        }
    }

    #[test]
    fn wrong_dim_is_rejected() {
        assert!(check_eq2_m2(&random_pair(3, 0).unwrap(), 1.0).is_err());
        assert!(eq2_counterexample(2).is_err());
        assert!(eq2_counterexample(5).is_err());
        assert!(eq2_counterexample_search(2, 10, 0).is_err());
    }

    #[test]
    fn deterministic_counterexample() {
        let (pair, v) = eq2_counterexample(4).unwrap();
        assert_eq!(pair.dim(), 4);
        assert!((v - 0.25).abs() < 1e-10);
        let (pair, v) = eq2_counterexample(8).unwrap();
        assert_eq!(pair.dim(), 8);
        assert!((v - 0.25).abs() < 1e-10);
    }

    #[test]
    fn random_search_finds_violations() {
        let s = eq2_counterexample_search(4, 50, 0).unwrap();
        assert!(s.violation > 0.0);
        assert!(s.violating_trials > 0, "{}", s.violating_trials);
        assert!(s.violating_trials < s.trials, "{}", s.violating_trials);
    }
}
