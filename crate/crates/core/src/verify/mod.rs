//! Executable checks of the anticommutator identity and its supporting lemmas.
//!
//! Every check returns a [`TrialReport`] whose `pass` flag is exactly
//! `residual <= tol`. Checks that compare matrices whose size grows like
//! `‖fg + gf‖^n` report residuals already divided by `max(1, ‖fg + gf‖^n)`, so the
//! same absolute `tol` applies everywhere.

mod bounds;
mod campaign;
mod eq2;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{mat_poly_eval, spectral_norm, ComplexMatrix, LinalgError};
use crate::polynomials::{f_recursive, pq_recursive, PolyError};
use crate::projections::{halmos_decompose, ProjectionError, ProjectionPair, Provenance};

pub use bounds::{bound_sequences, check_bound_sandwich, BoundRow, BoundTable, BOUND_TABLE_SLACK};
pub use campaign::{run_trials, CampaignConfig, CampaignReport, CheckKind, CheckSummary, TrialError};
pub use eq2::{check_eq2_m2, eq2_counterexample, eq2_counterexample_search, eq2_violation, Eq2Search};

/// Default absolute tolerance for campaigns.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Highest power used by the expansion and block checks.
pub const DEFAULT_N_MAX: usize = 8;
/// Highest power used by the product-power lemma check.
pub const DEFAULT_M_MAX: usize = 8;
/// Number of equispaced sample points on `[0, 1]` for the monotonicity check.
pub const MONOTONICITY_POINTS: usize = 100;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Outcome of one check on one pair.
#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub check_name: String,
    pub provenance: Provenance,
    pub quantities: BTreeMap<String, f64>,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl TrialReport {
    fn new(
        check_name: &str,
        provenance: &Provenance,
        quantities: impl IntoIterator<Item = (&'static str, f64)>,
        residual: f64,
        tol: f64,
    ) -> Self {
        Self {
            check_name: check_name.to_string(),
            provenance: provenance.clone(),
            quantities: quantities
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            residual,
            tol,
            // NaN never passes.
            pass: residual <= tol,
        }
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).copied()
    }
}

fn norm(m: &ComplexMatrix) -> Result<f64, VerifyError> {
    Ok(spectral_norm(m)?)
}

fn require(cond: bool, msg: &str) -> Result<(), VerifyError> {
    if cond {
        Ok(())
    } else {
        Err(VerifyError::InvalidArgument(msg.to_string()))
    }
}

/// `|‖fg + gf‖ - (‖fg‖ + ‖fg‖²)|`.
pub fn check_theorem(pair: &ProjectionPair, tol: f64) -> Result<TrialReport, VerifyError> {
    let fg = pair.fg();
    let gf = pair.gf();
    let a = norm(&fg)?;
    let anti = norm(&(&fg + &gf))?;
    let predicted = a + a * a;
    Ok(TrialReport::new(
        "theorem",
        &pair.provenance,
        [("norm_fg", a), ("norm_anti", anti), ("predicted", predicted)],
        (anti - predicted).abs(),
        tol,
    ))
}

/// `‖fg‖ - ‖fg‖² <= ‖fg - gf‖ <= ‖fg‖`; the residual is the larger violation, or 0.
pub fn check_corollary(pair: &ProjectionPair, tol: f64) -> Result<TrialReport, VerifyError> {
    let fg = pair.fg();
    let a = norm(&fg)?;
    let comm = norm(&(&fg - &pair.gf()))?;
    let lower = a - a * a;
    let residual = 0f64.max(lower - comm).max(comm - a);
    Ok(TrialReport::new(
        "corollary",
        &pair.provenance,
        [
            ("norm_fg", a),
            ("norm_comm", comm),
            ("lower", lower),
            ("upper", a),
        ],
        residual,
        tol,
    ))
}

/// For `m = 1..=m_max`: `‖(fg)^m‖ <= ‖fg‖^{2m-1}` and `(fg)^m = (fgf)^{m-1} fg`,
/// plus `‖fgf‖ = ‖fg‖²`.
pub fn check_lemma_product_power(
    pair: &ProjectionPair,
    m_max: usize,
    tol: f64,
) -> Result<TrialReport, VerifyError> {
    require(m_max >= 1, "m_max must be at least 1")?;
    let fg = pair.fg();
    let fgf = &fg * &pair.f;
    let a = norm(&fg)?;
    let norm_fgf = norm(&fgf)?;
    let fgf_gap = (norm_fgf - a * a).abs();

    let mut power = fg.clone();
    let mut fgf_power = ComplexMatrix::identity(pair.dim());
    let mut max_excess: f64 = 0.0;
    let mut max_identity: f64 = 0.0;
    for m in 1..=m_max {
        if m > 1 {
            power = &power * &fg;
            fgf_power = &fgf_power * &fgf;
        }
        let bound = a.powi(2 * m as i32 - 1);
        max_excess = max_excess.max(norm(&power)? - bound);
        max_identity = max_identity.max(norm(&(&power - &(&fgf_power * &fg)))?);
    }
    let residual = fgf_gap.max(max_excess).max(max_identity).max(0.0);
    Ok(TrialReport::new(
        "lemma_product_power",
        &pair.provenance,
        [
            ("norm_fg", a),
            ("norm_fgf", norm_fgf),
            ("fgf_gap", fgf_gap),
            ("max_power_excess", max_excess),
            ("max_identity_residual", max_identity),
        ],
        residual,
        tol,
    ))
}

/// `‖fg - gf‖ = ‖fg(1-f)‖ <= ‖fg‖`, with `(fg-gf)*(fg-gf) = uu* + u*u` for
/// `u = fg(1-f)` and `(uu*)(u*u) = 0`.
pub fn check_lemma_commutator(pair: &ProjectionPair, tol: f64) -> Result<TrialReport, VerifyError> {
    let fg = pair.fg();
    let comm = &fg - &pair.gf();
    let u = &fg - &(&fg * &pair.f);
    let a = norm(&fg)?;
    let norm_comm = norm(&comm)?;
    let norm_u = norm(&u)?;
    let uu = &u * &u.adjoint();
    let utu = &u.adjoint() * &u;

    let equality = (norm_comm - norm_u).abs();
    let bound = (norm_comm - a).max(0.0);
    let reconstruction = norm(&(&(&comm.adjoint() * &comm) - &(&uu + &utu)))?;
    let orthogonality = norm(&(&uu * &utu))?;
    let residual = equality.max(bound).max(reconstruction).max(orthogonality);
    Ok(TrialReport::new(
        "lemma_commutator",
        &pair.provenance,
        [
            ("norm_fg", a),
            ("norm_comm", norm_comm),
            ("norm_u", norm_u),
            ("reconstruction_residual", reconstruction),
            ("orthogonality_residual", orthogonality),
        ],
        residual,
        tol,
    ))
}

/// `(fg + gf)^n = P_n(fg) + P_n(gf) + Q_n(fgf) + Q_n(gfg)` for `n = 1..=n_max`.
pub fn check_power_expansion(
    pair: &ProjectionPair,
    n_max: usize,
    tol: f64,
) -> Result<TrialReport, VerifyError> {
    require(n_max >= 1, "n_max must be at least 1")?;
    let fg = pair.fg();
    let gf = pair.gf();
    let fgf = &fg * &pair.f;
    let gfg = &gf * &pair.g;
    let anti = &fg + &gf;
    let anti_norm = norm(&anti)?;

    let mut power = anti.clone();
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        if n > 1 {
            power = &power * &anti;
        }
        let (p, q) = pq_recursive(n)?;
        let expansion = &(&mat_poly_eval(&p, &fg)? + &mat_poly_eval(&p, &gf)?)
            + &(&mat_poly_eval(&q, &fgf)? + &mat_poly_eval(&q, &gfg)?);
        let scale = anti_norm.powi(n as i32).max(1.0);
        worst = worst.max(norm(&(&power - &expansion))? / scale);
    }
    Ok(TrialReport::new(
        "power_expansion",
        &pair.provenance,
        [("norm_anti", anti_norm), ("n_max", n_max as f64)],
        worst,
        tol,
    ))
}

/// In the block basis of `range(f)`, the top row of `(fg + gf)^n` is
/// `[F_n(D), F_{n-1}(D) V]`; also checks that each `F_n` increases on `[0, 1]`.
pub fn check_nw_block(pair: &ProjectionPair, n_max: usize, tol: f64) -> Result<TrialReport, VerifyError> {
    require(n_max >= 1, "n_max must be at least 1")?;
    let blocks = halmos_decompose(pair, tol)?;
    let (dim, r) = (pair.dim(), blocks.rank());
    let anti = &pair.fg() + &pair.gf();
    let anti_norm = norm(&anti)?;

    let mut power = anti.clone();
    let mut worst_nw: f64 = 0.0;
    let mut worst_ne: f64 = 0.0;
    let mut worst_drop: f64 = 0.0;
    let mut f_prev = f_recursive(0);
    for n in 1..=n_max {
        if n > 1 {
            power = &power * &anti;
        }
        let f_n = f_recursive(n);
        let in_basis = blocks.to_basis(&power);
        let scale = anti_norm.powi(n as i32).max(1.0);

        let nw = in_basis.block(0, 0, r, r);
        let ne = in_basis.block(0, r, r, dim - r);
        worst_nw = worst_nw.max(norm(&(&nw - &mat_poly_eval(&f_n, &blocks.d)?))? / scale);
        let predicted_ne = &mat_poly_eval(&f_prev, &blocks.d)? * &blocks.v;
        worst_ne = worst_ne.max(norm(&(&ne - &predicted_ne))? / scale);
        worst_drop = worst_drop.max(monotonicity_drop(&f_n));
        f_prev = f_n;
    }
    let residual = worst_nw.max(worst_ne).max(worst_drop);
    Ok(TrialReport::new(
        "nw_block",
        &pair.provenance,
        [
            ("rank_f", r as f64),
            ("norm_anti", anti_norm),
            ("norm_d", blocks.norm_d),
            ("nw_residual", worst_nw),
            ("ne_residual", worst_ne),
            ("monotonicity_drop", worst_drop),
        ],
        residual,
        tol,
    ))
}

/// Largest decrease between consecutive samples of `p` on an equispaced grid over
/// `[0, 1]`; 0 when `p` is strictly increasing there, and `+∞` when it is merely flat
/// somewhere.
pub fn monotonicity_drop(p: &crate::polynomials::IntPolynomial) -> f64 {
    let last = (MONOTONICITY_POINTS - 1) as f64;
    let values: Vec<f64> = (0..MONOTONICITY_POINTS)
        .map(|i| p.eval_f64(i as f64 / last))
        .collect();
    let mut drop: f64 = 0.0;
    for w in values.windows(2) {
        if w[1] <= w[0] {
            drop = drop.max(w[0] - w[1]).max(f64::MIN_POSITIVE);
        }
    }
    drop
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::IntPolynomial;
    use crate::projections::{pair_from_angles, paper_2x2_pair, random_pair, AngleSpec, PROJ_TOL};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn equal_rank_one_pair() -> ProjectionPair {
        pair_from_angles(&AngleSpec::new(vec![0.0])).unwrap()
    }

    #[test]
    fn theorem_idempotent_case() {
        let r = check_theorem(&equal_rank_one_pair(), 1e-12).unwrap();
        assert!(r.pass);
        assert!((r.quantity("norm_anti").unwrap() - 2.0).abs() < 1e-14);
        assert!((r.quantity("predicted").unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn theorem_orthogonal_case() {
        let pair = pair_from_angles(&AngleSpec::new(vec![FRAC_PI_2])).unwrap();
        let r = check_theorem(&pair, 1e-12).unwrap();
        assert!(r.pass);
        assert!(r.quantity("norm_anti").unwrap() < 1e-15);
    }

    #[test]
    fn theorem_fixed_pair() {
        let r = check_theorem(&paper_2x2_pair(), 1e-12).unwrap();
        // Direct oracle: ab + ba = [[1, 1/2], [1/2, 0]] has top eigenvalue (1 + √2)/2.
        let oracle = (1.0 + 2f64.sqrt()) / 2.0;
        assert!((r.quantity("norm_anti").unwrap() - oracle).abs() < 1e-15);
        assert!((r.quantity("norm_anti").unwrap() - 1.2071067811865476).abs() < 1e-15);
        assert!(r.pass);
    }

    #[test]
    fn pass_flag_tracks_residual() {
        let mut r = check_theorem(&paper_2x2_pair(), 0.0).unwrap();
        assert_eq!(r.pass, r.residual <= 0.0);
        r = TrialReport::new("x", &Provenance::Paper2x2, [], f64::NAN, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn corollary_examples() {
        let r = check_corollary(&equal_rank_one_pair(), 1e-12).unwrap();
        assert!(r.pass);
        assert!(r.quantity("norm_comm").unwrap() < 1e-15);

        let pair = pair_from_angles(&AngleSpec::new(vec![FRAC_PI_4])).unwrap();
        let r = check_corollary(&pair, 1e-12).unwrap();
        assert!(r.pass);
        assert!((r.quantity("lower").unwrap() - (FRAC_1_SQRT_2 - 0.5)).abs() < 1e-15);
        assert!((r.quantity("norm_comm").unwrap() - 0.5).abs() < 1e-15);
        assert!((r.quantity("upper").unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn product_power_on_angle_cell_is_tight() {
        let theta = 0.9f64;
        let pair = pair_from_angles(&AngleSpec::new(vec![theta])).unwrap();
        let r = check_lemma_product_power(&pair, 6, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
        // In one cell the bound is attained: ‖(fg)^m‖ = cos^{2m-1}θ.
        let fg = pair.fg();
        for m in 1..=6 {
            let got = spectral_norm(&fg.pow(m).unwrap()).unwrap();
            assert!((got - theta.cos().powi(2 * m as i32 - 1)).abs() < 1e-14);
        }
    }

    #[test]
    fn commutator_lemma_examples() {
        let r = check_lemma_commutator(&equal_rank_one_pair(), 1e-12).unwrap();
        assert!(r.pass);
        assert!(r.quantity("norm_comm").unwrap() < 1e-15);
        let r = check_lemma_commutator(&paper_2x2_pair(), 1e-12).unwrap();
        assert!(r.pass);
        assert!((r.quantity("norm_comm").unwrap() - 0.5).abs() < 1e-15);
        assert!((r.quantity("norm_u").unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn power_expansion_small_cases() {
        let pair = paper_2x2_pair();
        assert!(check_power_expansion(&pair, 1, 0.0).unwrap().pass);
        let r = check_power_expansion(&pair, 2, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
        // Brute-force oracle for n = 2 on the explicit matrices.
        let anti = &pair.fg() + &pair.gf();
        let sq = &anti * &anti;
        let expected = ComplexMatrix::from_real(2, 2, &[1.25, 0.5, 0.5, 0.25]);
        assert!((&sq - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn nw_block_small_cases() {
        let pair = pair_from_angles(&AngleSpec::new(vec![FRAC_PI_4])).unwrap();
        let r = check_nw_block(&pair, 2, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
        // F_2(cos²θ) = 3cos⁴θ + cos²θ = 1.25 at θ = π/4, the (0,0) entry of (fg+gf)².
        let anti = &pair.fg() + &pair.gf();
        let sq = &anti * &anti;
        assert!((sq[(0, 0)].re - 1.25).abs() < 1e-15);
        assert!((f_recursive(2).eval_f64(0.5) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn random_pairs_pass_every_check() {
        for seed in 0..10 {
            let pair = random_pair(9, seed).unwrap();
            for r in [
                check_theorem(&pair, 1e-9).unwrap(),
                check_corollary(&pair, 1e-9).unwrap(),
                check_lemma_product_power(&pair, 8, 1e-9).unwrap(),
                check_lemma_commutator(&pair, 1e-9).unwrap(),
                check_power_expansion(&pair, 8, 1e-9).unwrap(),
                check_nw_block(&pair, 8, 1e-9).unwrap(),
            ] {
                assert!(r.pass, "seed {seed}: {r:?}");
            }
        }
    }

    #[test]
    fn zero_product_pair_runs_without_special_cases() {
        let pair = pair_from_angles(&AngleSpec {
            angles: vec![FRAC_PI_2, FRAC_PI_2],
            extra_f_dims: 1,
            extra_g_dims: 0,
        })
        .unwrap();
        assert!(check_theorem(&pair, PROJ_TOL).unwrap().pass);
        assert!(check_nw_block(&pair, 4, PROJ_TOL).unwrap().pass);
        assert!(check_power_expansion(&pair, 4, PROJ_TOL).unwrap().pass);
    }

    #[test]
    fn monotonicity_detects_decreasing_polynomials() {
        for n in 1..=8 {
            assert_eq!(monotonicity_drop(&f_recursive(n)), 0.0);
        }
        let decreasing = IntPolynomial::from_i64(&[1, -1]);
        assert!(monotonicity_drop(&decreasing) > 0.0);
        let flat = IntPolynomial::from_i64(&[1]);
        assert!(monotonicity_drop(&flat) > 0.0);
    }

    #[test]
    fn zero_powers_are_invalid() {
        let pair = paper_2x2_pair();
        assert!(check_power_expansion(&pair, 0, 1.0).is_err());
        assert!(check_nw_block(&pair, 0, 1.0).is_err());
        assert!(check_lemma_product_power(&pair, 0, 1.0).is_err());
    }
}
