//! Stinespring dilations between spin triples and the Pauli triple.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::matcore::{kron, CMatrix};
use crate::order_iso::{choi_of_triple_map, pauli_basis};
use crate::spin_construct::SpinTuple;

/// An isometry `V` with `xⱼ = V*·(yⱼ⊗1_ℓ)·V` for each generator.
///
/// The dilation space is ordered big-factor-first: `ℂ^k ⊗ ℂ^ℓ` with the
/// multiplicity index running fastest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dilation {
    pub isometry: CMatrix,
    pub ell: usize,
    /// `‖V*·(yⱼ⊗1_ℓ)·V − xⱼ‖_F` per generator.
    pub residuals: Vec<f64>,
    /// `‖V*V − 1‖_F`
    pub isometry_residual: f64,
}

impl Dilation {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// `V*·(y⊗1_ℓ)·V`.
    pub fn compress(&self, y: &CMatrix) -> CMatrix {
        let big = kron(y, &CMatrix::identity(self.ell));
        self.isometry.adjoint().matmul(&big).matmul(&self.isometry)
    }
}

/// `V[(i,k), r] = conj(factor_k[r, i])`, so that `V*(y⊗1)V = Σ Fₖ·y·Fₖ*`.
fn stack_isometry(factors: &[CMatrix]) -> CMatrix {
    let ell = factors.len();
    let (inner, outer) = (factors[0].rows(), factors[0].cols());
    CMatrix::from_fn(outer * ell, inner, |row, r| {
        let (i, k) = (row / ell, row % ell);
        factors[k][(r, i)].conj()
    })
}

fn finish(isometry: CMatrix, ell: usize, big: &[CMatrix], small: &[CMatrix]) -> Dilation {
    let mut d = Dilation {
        isometry_residual: isometry.isometry_residual(),
        isometry,
        ell,
        residuals: Vec::new(),
    };
    d.residuals = big
        .iter()
        .zip(small)
        .map(|(y, x)| d.compress(y).distance(x))
        .collect();
    d
}

fn require_triple(t: &SpinTuple) -> Result<()> {
    if t.arity() != 3 {
        return Err(SpinError::ArityMismatch {
            expected: 3,
            found: t.arity(),
        });
    }
    Ok(())
}

/// `uⱼ = V*·(σⱼ⊗1_ℓ)·V` with `V: ℂ^d → ℂ²⊗ℂ^ℓ`, ℓ the Choi rank.
pub fn dilate_triple(t: &SpinTuple) -> Result<Dilation> {
    require_triple(t)?;
    let cp = choi_of_triple_map(t)?;
    let kraus = cp.kraus.expect("extracted by choi_of_triple_map");
    let ell = kraus.len();
    let paulis = pauli_basis();
    Ok(finish(
        stack_isometry(&kraus),
        ell,
        &paulis[1..],
        t.unitaries(),
    ))
}

/// `σⱼ = V*·(uⱼ⊗1_ℓ)·V` with `V: ℂ² → ℂ^d⊗ℂ^ℓ`, built from the inverse map
/// `ψ(z) = (2/d)·Σ Aₖ*·z·Aₖ`.
pub fn reverse_dilate(t: &SpinTuple) -> Result<Dilation> {
    require_triple(t)?;
    let cp = choi_of_triple_map(t)?;
    let scale = (2.0 / t.dim() as f64).sqrt();
    let factors: Vec<CMatrix> = cp
        .kraus
        .expect("extracted by choi_of_triple_map")
        .iter()
        .map(|a| a.adjoint().scale_re(scale))
        .collect();
    let ell = factors.len();
    let paulis = pauli_basis();
    Ok(finish(
        stack_isometry(&factors),
        ell,
        t.unitaries(),
        &paulis[1..],
    ))
}
