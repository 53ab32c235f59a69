//! Projection pairs: validation, the fixed examples, angle-cell constructions,
//! random sampling, and the block decomposition relative to `range(f)`.

mod halmos;
mod io;
mod sampling;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{spectral_norm, ComplexMatrix, LinalgError, C64};

pub use halmos::{halmos_decompose, HalmosBlocks, RelationResiduals, RANGE_REJECT_BAND};
pub use io::{pair_from_json_str, pair_to_json_string, read_pair_json, write_pair_json, PairFile};
pub use sampling::{
    complex_gaussian, householder_orthonormalize, random_pair, random_pair_with_ranks,
    random_projection, rng_from_seed,
};

/// Tolerance for constructed projections.
pub const PROJ_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { dim: usize, rank: usize },
    #[error("angle {angle} is outside [0, pi/2]")]
    AngleOutOfRange { angle: f64 },
    #[error("angle spec is empty: no angles and no extra dimensions")]
    EmptyAngleSpec,
    #[error("grid size must be at least 1")]
    EmptyGrid,
    #[error("members have different shapes: f is {f_rows}x{f_cols}, g is {g_rows}x{g_cols}")]
    ShapeMismatch {
        f_rows: usize,
        f_cols: usize,
        g_rows: usize,
        g_cols: usize,
    },
    #[error("{member} is not a projection: ‖P²-P‖ = {idempotence:e}, ‖P-P*‖ = {hermitian:e}, tol {tol:e}")]
    NotAProjection {
        member: &'static str,
        idempotence: f64,
        hermitian: f64,
        tol: f64,
    },
    #[error("f has eigenvalue {eigenvalue} inside the rejection band [0.25, 0.75]")]
    IllSeparatedSpectrum { eigenvalue: f64 },
    #[error("block relations fail: {residuals}")]
    RelationsViolated { residuals: RelationResiduals },
    #[error("malformed pair file: {0}")]
    Format(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Residuals of the two projection identities for one matrix.
///
/// Residuals are Frobenius norms, which bound the operator norms from above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionValidation {
    /// `‖P² - P‖_F`
    pub idempotence: f64,
    /// `‖P - P*‖_F`
    pub hermitian: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn validate_projection(p: &ComplexMatrix, tol: f64) -> ProjectionValidation {
    if !p.is_square() || p.check_finite().is_err() {
        return ProjectionValidation {
            idempotence: f64::INFINITY,
            hermitian: f64::INFINITY,
            tol,
            pass: false,
        };
    }
    let idempotence = (&(p * p) - p).frobenius_norm();
    let hermitian = p.hermitian_residual();
    ProjectionValidation {
        idempotence,
        hermitian,
        tol,
        pass: idempotence <= tol && hermitian <= tol,
    }
}

/// Where a pair came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Random {
        seed: u64,
        dim: usize,
        rank_f: usize,
        rank_g: usize,
    },
    Angles {
        angles: Vec<f64>,
        extra_f_dims: usize,
        extra_g_dims: usize,
    },
    Paper2x2,
    UniversalGrid {
        grid_size: usize,
    },
    File {
        path: String,
    },
}

/// Two validated projections of the same dimension.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    pub f: ComplexMatrix,
    pub g: ComplexMatrix,
    pub provenance: Provenance,
}

impl ProjectionPair {
    /// Validates both members at `PROJ_TOL`.
    pub fn new(f: ComplexMatrix, g: ComplexMatrix, provenance: Provenance) -> Result<Self, ProjectionError> {
        Self::with_tol(f, g, provenance, PROJ_TOL)
    }

    pub fn with_tol(
        f: ComplexMatrix,
        g: ComplexMatrix,
        provenance: Provenance,
        tol: f64,
    ) -> Result<Self, ProjectionError> {
        if f.rows() != g.rows() || f.cols() != g.cols() || !f.is_square() || f.rows() == 0 {
            return Err(ProjectionError::ShapeMismatch {
                f_rows: f.rows(),
                f_cols: f.cols(),
                g_rows: g.rows(),
                g_cols: g.cols(),
            });
        }
        for (member, m) in [("f", &f), ("g", &g)] {
            let v = validate_projection(m, tol);
            if !v.pass {
                return Err(ProjectionError::NotAProjection {
                    member,
                    idempotence: v.idempotence,
                    hermitian: v.hermitian,
                    tol,
                });
            }
        }
        Ok(Self { f, g, provenance })
    }

    pub fn dim(&self) -> usize {
        self.f.rows()
    }

    pub fn fg(&self) -> ComplexMatrix {
        &self.f * &self.g
    }

    pub fn gf(&self) -> ComplexMatrix {
        &self.g * &self.f
    }

    pub fn swapped(&self) -> ProjectionPair {
        ProjectionPair {
            f: self.g.clone(),
            g: self.f.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Principal-angle description of a pair as a direct sum of 2x2 cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSpec {
    pub angles: Vec<f64>,
    /// Dimensions where only `f` acts.
    pub extra_f_dims: usize,
    /// Dimensions where only `g` acts.
    pub extra_g_dims: usize,
}

impl AngleSpec {
    pub fn new(angles: Vec<f64>) -> Self {
        Self {
            angles,
            extra_f_dims: 0,
            extra_g_dims: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ProjectionError> {
        if let Some(&angle) = self
            .angles
            .iter()
            .find(|&&t| !(0.0..=FRAC_PI_2).contains(&t))
        {
            return Err(ProjectionError::AngleOutOfRange { angle });
        }
        if self.angles.is_empty() && self.extra_f_dims + self.extra_g_dims == 0 {
            return Err(ProjectionError::EmptyAngleSpec);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.angles.len() + self.extra_f_dims + self.extra_g_dims
    }
}

/// `(f, g)` blocks of one angle cell: `f = [[1,0],[0,0]]`, `g` the projection onto
/// `(cos θ, sin θ)`.
pub fn angle_cell(theta: f64) -> (ComplexMatrix, ComplexMatrix) {
    let (s, c) = theta.sin_cos();
    let f = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let g = ComplexMatrix::from_real(2, 2, &[c * c, c * s, c * s, s * s]);
    (f, g)
}

/// Dense direct sum of angle cells followed by the extra `f`-only and `g`-only dimensions.
pub fn pair_from_angles(spec: &AngleSpec) -> Result<ProjectionPair, ProjectionError> {
    spec.validate()?;
    let n = spec.dim();
    let mut f = ComplexMatrix::zeros(n, n);
    let mut g = ComplexMatrix::zeros(n, n);
    for (i, &theta) in spec.angles.iter().enumerate() {
        let (cf, cg) = angle_cell(theta);
        f.set_block(2 * i, 2 * i, &cf);
        g.set_block(2 * i, 2 * i, &cg);
    }
    let base = 2 * spec.angles.len();
    for k in 0..spec.extra_f_dims {
        f[(base + k, base + k)] = C64::new(1.0, 0.0);
    }
    let base = base + spec.extra_f_dims;
    for k in 0..spec.extra_g_dims {
        g[(base + k, base + k)] = C64::new(1.0, 0.0);
    }
    ProjectionPair::new(
        f,
        g,
        Provenance::Angles {
            angles: spec.angles.clone(),
            extra_f_dims: spec.extra_f_dims,
            extra_g_dims: spec.extra_g_dims,
        },
    )
}

/// `a = [[1,0],[0,0]]`, `b = ½[[1,1],[1,1]]`.
pub fn paper_2x2_pair() -> ProjectionPair {
    ProjectionPair {
        f: ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        g: ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]),
        provenance: Provenance::Paper2x2,
    }
}

/// A pair kept as its list of 2x2 angle cells, so norms are computed per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSum {
    pub angles: Vec<f64>,
    pub provenance: Provenance,
}

/// Norms of the product, commutator and anticommutator of a cell sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellSumNorms {
    pub norm_fg: f64,
    pub norm_comm: f64,
    pub norm_anti: f64,
}

impl CellSum {
    /// Maximum over cells of each norm; a direct sum's norm is the largest block norm.
    pub fn norms(&self) -> Result<CellSumNorms, ProjectionError> {
        let mut out = CellSumNorms {
            norm_fg: 0.0,
            norm_comm: 0.0,
            norm_anti: 0.0,
        };
        for &theta in &self.angles {
            let (f, g) = angle_cell(theta);
            let fg = &f * &g;
            let gf = &g * &f;
            out.norm_fg = out.norm_fg.max(spectral_norm(&fg)?);
            out.norm_comm = out.norm_comm.max(spectral_norm(&(&fg - &gf))?);
            out.norm_anti = out.norm_anti.max(spectral_norm(&(&fg + &gf))?);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        2 * self.angles.len()
    }

    /// Dense pair; only sensible for small grids.
    pub fn to_pair(&self) -> Result<ProjectionPair, ProjectionError> {
        let mut pair = pair_from_angles(&AngleSpec::new(self.angles.clone()))?;
        pair.provenance = self.provenance.clone();
        Ok(pair)
    }
}

/// Finite stand-in for the universal pair: cells at `θ_k = k/(K+1) · π/2`, `k = 1..K`,
/// with `π/4` added when the grid misses it.
pub fn universal_pair_approx(grid_size: usize) -> Result<CellSum, ProjectionError> {
    if grid_size == 0 {
        return Err(ProjectionError::EmptyGrid);
    }
    let denom = (grid_size + 1) as f64;
    let mut angles: Vec<f64> = (1..=grid_size)
        .map(|k| (k as f64 / denom) * FRAC_PI_2)
        .collect();
    if (grid_size + 1) % 2 != 0 {
        let pos = angles.partition_point(|&t| t < FRAC_PI_4);
        angles.insert(pos, FRAC_PI_4);
    }
    Ok(CellSum {
        angles,
        provenance: Provenance::UniversalGrid { grid_size },
    })
}
