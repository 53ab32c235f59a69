//! Block form of `g` relative to `range(f) ⊕ range(f)^⊥`.
//!
//! In a basis whose first `r` vectors span `range(f)`,
//! `f = [[I, 0], [0, 0]]` and `g = [[D, V], [V*, D']]`, and idempotence of `g` forces
//! `D - D² = V V*`, `D V + V D' = V`, `D' - D'² = V* V`.

use std::fmt;

use serde::Serialize;

use crate::linalg::{hermitian_eigen, spectral_norm, ComplexMatrix};

use super::{ProjectionError, ProjectionPair};

/// Eigenvalues of `f` inside this closed band are neither 0 nor 1.
pub const RANGE_REJECT_BAND: (f64, f64) = (0.25, 0.75);

/// Operator-norm residuals of the three block relations and of `‖fg‖² = ‖D‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResiduals {
    /// `‖D - D² - V V*‖`
    pub d_relation: f64,
    /// `‖D V + V D' - V‖`
    pub v_relation: f64,
    /// `‖D' - D'² - V* V‖`
    pub d_prime_relation: f64,
    /// `|‖fg‖² - ‖D‖|`
    pub norm_identity: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.d_relation
            .max(self.v_relation)
            .max(self.d_prime_relation)
            .max(self.norm_identity)
    }
}

impl fmt::Display for RelationResiduals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "D-D²-VV* = {:e}, DV+VD'-V = {:e}, D'-D'²-V*V = {:e}, |‖fg‖²-‖D‖| = {:e}",
            self.d_relation, self.v_relation, self.d_prime_relation, self.norm_identity
        )
    }
}

#[derive(Debug, Clone)]
pub struct HalmosBlocks {
    /// `r x r`, `r = rank f`.
    pub d: ComplexMatrix,
    /// `(dim - r) x (dim - r)`.
    pub d_prime: ComplexMatrix,
    /// `r x (dim - r)`.
    pub v: ComplexMatrix,
    /// Unitary; the first `r` columns span `range(f)`.
    pub basis: ComplexMatrix,
    pub norm_fg: f64,
    pub norm_d: f64,
    pub residuals: RelationResiduals,
}

impl HalmosBlocks {
    pub fn rank(&self) -> usize {
        self.d.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// `[[D, V], [V*, D']]` in the decomposition basis.
    pub fn g_in_basis(&self) -> ComplexMatrix {
        let (n, r) = (self.dim(), self.rank());
        let mut m = ComplexMatrix::zeros(n, n);
        m.set_block(0, 0, &self.d);
        m.set_block(0, r, &self.v);
        m.set_block(r, 0, &self.v.adjoint());
        m.set_block(r, r, &self.d_prime);
        m
    }

    /// `basis · [[D, V], [V*, D']] · basis*`.
    pub fn reassemble_g(&self) -> ComplexMatrix {
        &(&self.basis * &self.g_in_basis()) * &self.basis.adjoint()
    }

    /// `basis · [[I, 0], [0, 0]] · basis*`.
    pub fn reassemble_f(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut e = ComplexMatrix::zeros(n, n);
        e.set_block(0, 0, &ComplexMatrix::identity(self.rank()));
        &(&self.basis * &e) * &self.basis.adjoint()
    }

    /// `basis* · A · basis`.
    pub fn to_basis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis.adjoint() * a) * &self.basis
    }
}

/// Splits `g` into blocks over `range(f) ⊕ range(f)^⊥`.
///
/// The basis is the eigenvector matrix of `f`; eigenvalues above 0.5 mark `range(f)`.
/// Fails if any eigenvalue of `f` falls in `RANGE_REJECT_BAND`, or if a relation
/// residual (or the `‖fg‖² = ‖D‖` gap) exceeds `tol`.
pub fn halmos_decompose(pair: &ProjectionPair, tol: f64) -> Result<HalmosBlocks, ProjectionError> {
    let eig = hermitian_eigen(&pair.f)?;
    if let Some(&eigenvalue) = eig
        .eigenvalues
        .iter()
        .find(|&&l| (RANGE_REJECT_BAND.0..=RANGE_REJECT_BAND.1).contains(&l))
    {
        return Err(ProjectionError::IllSeparatedSpectrum { eigenvalue });
    }
    let n = pair.dim();
    // Eigenvalues are sorted descending, so range(f) comes first.
    let r = eig.eigenvalues.iter().take_while(|&&l| l > 0.5).count();
    let basis = eig.eigenvectors;
    let g_b = &(&basis.adjoint() * &pair.g) * &basis;

    let d = g_b.block(0, 0, r, r);
    let v = g_b.block(0, r, r, n - r);
    let d_prime = g_b.block(r, r, n - r, n - r);

    let vv = &v * &v.adjoint();
    let vtv = &v.adjoint() * &v;
    let d_relation = spectral_norm(&(&(&d - &(&d * &d)) - &vv))?;
    let v_relation = spectral_norm(&(&(&(&d * &v) + &(&v * &d_prime)) - &v))?;
    let d_prime_relation = spectral_norm(&(&(&d_prime - &(&d_prime * &d_prime)) - &vtv))?;
    let norm_fg = spectral_norm(&pair.fg())?;
    let norm_d = spectral_norm(&d)?;
    let residuals = RelationResiduals {
        d_relation,
        v_relation,
        d_prime_relation,
        norm_identity: (norm_fg * norm_fg - norm_d).abs(),
    };
    if !(residuals.max() <= tol) {
        return Err(ProjectionError::RelationsViolated { residuals });
    }
    Ok(HalmosBlocks {
        d,
        d_prime,
        v,
        basis,
        norm_fg,
        norm_d,
        residuals,
    })
}
