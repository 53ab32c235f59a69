//! Pre-limit bounds on `‖fg + gf‖` in terms of `a = ‖fg‖`.
//!
//! Upper, from the norm of the `2N`-th power:
//! `2^{1/2N} a (1+a)^{1 - 1/2N}`.
//! Lower, from the corner block of the `n`-th power:
//! `2^{-1/n} a (1+a)^{1 + 1/n} [1 - ((a-1)/(a+1))^{n+1}]^{1/n}`.
//! Both converge to `a + a²`.

use serde::Serialize;

use crate::projections::ProjectionPair;

use super::{norm, TrialReport, VerifyError};

/// Slack allowed by the table invariants `upper >= limit` and `lower <= limit`.
pub const BOUND_TABLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    /// `N` for the upper bound and `n` for the lower bound.
    pub n: usize,
    pub upper: f64,
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTable {
    pub a: f64,
    pub rows: Vec<BoundRow>,
    pub limit: f64,
}

impl BoundTable {
    pub fn invariants_hold(&self) -> bool {
        self.rows.iter().all(|r| {
            r.upper >= self.limit - BOUND_TABLE_SLACK && r.lower <= self.limit + BOUND_TABLE_SLACK
        })
    }

    /// `upper - limit` on the last row.
    pub fn final_upper_gap(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.upper - self.limit)
    }

    /// `limit - lower` on the last row.
    pub fn final_lower_gap(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| self.limit - r.lower)
    }
}

pub fn upper_bound(a: f64, big_n: usize) -> f64 {
    let e = 1.0 / (2 * big_n) as f64;
    2f64.powf(e) * a * (1.0 + a).powf(1.0 - e)
}

pub fn lower_bound(a: f64, n: usize) -> f64 {
    let e = 1.0 / n as f64;
    let c = (a - 1.0) / (a + 1.0);
    let tail = 1.0 - c.powi(n as i32 + 1);
    2f64.powf(-e) * a * (1.0 + a).powf(1.0 + e) * tail.powf(e)
}

/// Rows `1..=n_max` of both bound sequences at `a`.
pub fn bound_sequences(a: f64, n_max: usize) -> Result<BoundTable, VerifyError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(VerifyError::InvalidArgument(format!(
            "a = {a} is not in [0, 1]"
        )));
    }
    if n_max == 0 {
        return Err(VerifyError::InvalidArgument("n_max must be at least 1".into()));
    }
    let rows = (1..=n_max)
        .map(|n| BoundRow {
            n,
            upper: upper_bound(a, n),
            lower: lower_bound(a, n),
        })
        .collect();
    let table = BoundTable {
        a,
        rows,
        limit: a + a * a,
    };
    debug_assert!(table.invariants_hold(), "bound table invariant broken at a = {a}");
    Ok(table)
}

/// `lower_n <= ‖fg + gf‖ <= upper_N` for every row, with `a` the measured `‖fg‖`.
///
/// The measured norm may exceed 1 by rounding; it is clamped into `[0, 1]`.
pub fn check_bound_sandwich(pair: &ProjectionPair, n_max: usize, tol: f64) -> Result<TrialReport, VerifyError> {
    let fg = pair.fg();
    let measured_a = norm(&fg)?;
    let anti = norm(&(&fg + &pair.gf()))?;
    let a = measured_a.clamp(0.0, 1.0);
    let table = bound_sequences(a, n_max)?;
    let residual = table
        .rows
        .iter()
        .map(|r| (r.lower - anti).max(anti - r.upper))
        .fold(0.0, f64::max);
    Ok(TrialReport::new(
        "bound_sandwich",
        &pair.provenance,
        [
            ("norm_fg", measured_a),
            ("norm_anti", anti),
            ("limit", table.limit),
        ],
        residual,
        tol,
    ))
}
