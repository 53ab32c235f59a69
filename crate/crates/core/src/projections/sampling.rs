//! Seeded random projections.
//!
//! The generator is ChaCha8 seeded through `seed_from_u64`, whose output stream is fixed
//! by the algorithm and independent of platform and thread count. A trial with index
//! `i` in a campaign uses seed `base_seed + i` (wrapping).

use std::f64::consts::TAU;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{ComplexMatrix, C64};

use super::{ProjectionError, ProjectionPair, Provenance};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in the open interval (0, 1) from the top 53 bits of one word.
fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Complex standard normal by Box–Muller: both outputs of one transform become the
/// independent real and imaginary parts.
pub fn complex_gaussian(rng: &mut impl RngCore) -> C64 {
    let u1 = open_unit(rng);
    let u2 = open_unit(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    C64::new(r * c, r * s)
}

/// Orthonormal basis for the column span of `a` (`rows >= cols`) by Householder QR.
///
/// Returns the first `cols` columns of `Q`, so `Q* Q = I`.
pub fn householder_orthonormalize(a: &ComplexMatrix) -> ComplexMatrix {
    let (m, k) = (a.rows(), a.cols());
    assert!(m >= k, "need at least as many rows as columns");
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(k);

    for j in 0..k {
        let norm: f64 = (j..m).map(|i| r[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        let mut v: Vec<C64> = (j..m).map(|i| r[(i, j)]).collect();
        if norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // alpha = -phase * ‖x‖ keeps v[0] = x0 - alpha free of cancellation.
        v[0] = x0 + phase * norm;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        apply_reflector(&mut r, &v, j, j);
        reflectors.push(v);
    }

    let mut q = ComplexMatrix::from_fn(m, k, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    for (j, v) in reflectors.iter().enumerate().rev() {
        if !v.is_empty() {
            apply_reflector(&mut q, v, j, 0);
        }
    }
    q
}

/// `A[row0.., col0..] <- (I - 2 v v*) A[row0.., col0..]`.
fn apply_reflector(a: &mut ComplexMatrix, v: &[C64], row0: usize, col0: usize) {
    for c in col0..a.cols() {
        let dot: C64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| vi.conj() * a[(row0 + i, c)])
            .sum();
        let w = dot * 2.0;
        for (i, vi) in v.iter().enumerate() {
            a[(row0 + i, c)] -= vi * w;
        }
    }
}

fn projection_from_rng(dim: usize, rank: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    if rank == 0 {
        return ComplexMatrix::zeros(dim, dim);
    }
    if rank == dim {
        return ComplexMatrix::identity(dim);
    }
    let mut cols = ComplexMatrix::zeros(dim, rank);
    for i in 0..dim {
        for j in 0..rank {
            cols[(i, j)] = complex_gaussian(rng);
        }
    }
    let q = householder_orthonormalize(&cols);
    // Q Q* = (Q*)* (Q*), assembled to be exactly Hermitian.
    q.adjoint().gram()
}

fn check_rank(dim: usize, rank: usize) -> Result<(), ProjectionError> {
    if dim == 0 {
        return Err(ProjectionError::EmptyDimension);
    }
    if rank > dim {
        return Err(ProjectionError::RankOutOfRange { dim, rank });
    }
    Ok(())
}

/// Orthogonal projection onto the span of `rank` Gaussian columns.
///
/// Rank 0 and rank `dim` return the exact zero and identity matrices.
pub fn random_projection(dim: usize, rank: usize, seed: u64) -> Result<ComplexMatrix, ProjectionError> {
    check_rank(dim, rank)?;
    Ok(projection_from_rng(dim, rank, &mut rng_from_seed(seed)))
}

/// Random pair with ranks drawn independently and uniformly from `[1, dim-1]`
/// (`[0, dim]` when `dim < 2`), all from one stream seeded by `seed`.
pub fn random_pair(dim: usize, seed: u64) -> Result<ProjectionPair, ProjectionError> {
    if dim == 0 {
        return Err(ProjectionError::EmptyDimension);
    }
    let mut rng = rng_from_seed(seed);
    let (lo, hi) = if dim >= 2 { (1, dim - 1) } else { (0, dim) };
    let rank_f = rng.gen_range(lo..=hi);
    let rank_g = rng.gen_range(lo..=hi);
    build_pair(dim, rank_f, rank_g, seed, &mut rng)
}

/// Random pair with prescribed ranks.
pub fn random_pair_with_ranks(
    dim: usize,
    rank_f: usize,
    rank_g: usize,
    seed: u64,
) -> Result<ProjectionPair, ProjectionError> {
    check_rank(dim, rank_f)?;
    check_rank(dim, rank_g)?;
    let mut rng = rng_from_seed(seed);
    build_pair(dim, rank_f, rank_g, seed, &mut rng)
}

fn build_pair(
    dim: usize,
    rank_f: usize,
    rank_g: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ProjectionPair, ProjectionError> {
    let f = projection_from_rng(dim, rank_f, rng);
    let g = projection_from_rng(dim, rank_g, rng);
    ProjectionPair::new(
        f,
        g,
        Provenance::Random {
            seed,
            dim,
            rank_f,
            rank_g,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{validate_projection, PROJ_TOL};

    #[test]
    fn extreme_ranks_are_exact() {
        assert_eq!(random_projection(4, 0, 9).unwrap(), ComplexMatrix::zeros(4, 4));
        assert_eq!(random_projection(4, 4, 9).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn rank_out_of_range_is_an_error() {
        assert!(matches!(
            random_projection(4, 5, 0),
            Err(ProjectionError::RankOutOfRange { dim: 4, rank: 5 })
        ));
        assert!(random_projection(0, 0, 0).is_err());
    }

    #[test]
    fn trace_equals_rank() {
        let p = random_projection(8, 3, 42).unwrap();
        assert!((p.trace().re - 3.0).abs() < 1e-10);
        assert!(p.trace().im.abs() < 1e-12);
        assert!(validate_projection(&p, PROJ_TOL).pass);
    }

    #[test]
    fn same_seed_same_bits() {
        let a = random_projection(16, 7, 1234).unwrap();
        let b = random_projection(16, 7, 1234).unwrap();
        let bits = |m: &ComplexMatrix| -> Vec<(u64, u64)> {
            m.as_slice().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(a, random_projection(16, 7, 1235).unwrap());
    }

    #[test]
    fn householder_columns_are_orthonormal() {
        let mut rng = rng_from_seed(5);
        let a = ComplexMatrix::from_fn(10, 4, |_, _| complex_gaussian(&mut rng));
        let q = householder_orthonormalize(&a);
        let qtq = q.adjoint().try_mul(&q).unwrap();
        assert!((&qtq - &ComplexMatrix::identity(4)).max_abs() < 1e-14);
        // Span is preserved: the projector fixes the original columns.
        let p = q.try_mul(&q.adjoint()).unwrap();
        let pa = p.try_mul(&a).unwrap();
        assert!((&pa - &a).max_abs() < 1e-12);
    }

    #[test]
    fn gaussian_moments_are_plausible() {
        let mut rng = rng_from_seed(77);
        let n = 20_000;
        let (mut mean, mut var) = (C64::new(0.0, 0.0), 0.0);
        for _ in 0..n {
            let z = complex_gaussian(&mut rng);
            mean += z;
            var += z.norm_sqr();
        }
        mean /= n as f64;
        var /= n as f64;
        assert!(mean.norm() < 0.05);
        assert!((var - 2.0).abs() < 0.1);
    }

    #[test]
    fn random_pair_ranks_stay_in_policy() {
        for seed in 0..50 {
            let pair = random_pair(5, seed).unwrap();
            match pair.provenance {
                Provenance::Random { rank_f, rank_g, .. } => {
                    assert!((1..=4).contains(&rank_f));
                    assert!((1..=4).contains(&rank_g));
                }
                _ => unreachable!(),
            }
        }
    }
}
