//! Structural predicates on spin tuples: the axioms and trace identities,
//! linear independence, commutants, irreducibility, generated-algebra
//! dimension and unitary intertwiners.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::matcore::{
    complex_gaussian, eigvalsh, hs_inner, joint_null_space, kron, polar_unitary, rng_from_seed,
    sigma_z, vdot, vnorm, CMatrix, C64, I, RANK_TOL, ZERO,
};
use crate::spin_construct::{canonical_spin, SpinTuple};

/// Residuals and elementary facts for a candidate spin tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// `max ‖uⱼ − uⱼ*‖_F`
    pub selfadjoint_residual: f64,
    /// `max ‖uⱼ*uⱼ − 1‖_F`
    pub unitarity_residual: f64,
    /// `max_{i≠j} ‖uᵢuⱼ + uⱼuᵢ‖_F`
    pub anticommute_residual: f64,
    /// `|tr uⱼ|` per element.
    pub traces: Vec<f64>,
    /// `|tr(uⱼ* uᵢ)|` for `i < j`, row by row.
    pub pairwise_hs: Vec<f64>,
    /// Smallest eigenvalue of the HS Gram matrix of `{1, u₁, …, u_m}`, divided by `d`.
    pub gram_min_eig: f64,
    pub independent: bool,
    pub dim_parity_ok: bool,
}

impl VerifyReport {
    /// All residuals within `tol` and the structural flags set.
    pub fn passes(&self, tol: f64) -> bool {
        self.selfadjoint_residual <= tol
            && self.unitarity_residual <= tol
            && self.anticommute_residual <= tol
            && self.traces.iter().all(|&t| t <= tol)
            && self.pairwise_hs.iter().all(|&t| t <= tol)
            && self.independent
            && self.dim_parity_ok
    }
}

/// Validates a raw tuple; failures are carried in the report.
pub fn verify_spin(s: &SpinTuple, tol: f64) -> VerifyReport {
    let d = s.dim();
    let us = s.unitaries();
    let id = CMatrix::identity(d);

    let selfadjoint_residual = us
        .iter()
        .map(CMatrix::hermitian_residual)
        .fold(0.0, f64::max);
    let unitarity_residual = us
        .iter()
        .map(CMatrix::unitarity_residual)
        .fold(0.0, f64::max);
    let mut anticommute_residual: f64 = 0.0;
    let mut pairwise_hs = Vec::new();
    for i in 0..us.len() {
        for j in i + 1..us.len() {
            anticommute_residual =
                anticommute_residual.max(us[i].anticommutator(&us[j]).frobenius_norm());
            pairwise_hs.push(hs_inner(&us[i], &us[j]).expect("equal shapes").norm());
        }
    }
    let traces = us.iter().map(|u| u.trace().norm()).collect();

    let mut family = Vec::with_capacity(us.len() + 1);
    family.push(id);
    family.extend(us.iter().cloned());
    let k = family.len();
    let gram = CMatrix::from_fn(k, k, |a, b| {
        hs_inner(&family[b], &family[a]).expect("equal shapes") / d as f64
    });
    let gram_min_eig = eigvalsh(&gram.hermitian_part(), f64::INFINITY)
        .map(|v| v[0])
        .unwrap_or(f64::NAN);

    VerifyReport {
        selfadjoint_residual,
        unitarity_residual,
        anticommute_residual,
        traces,
        pairwise_hs,
        gram_min_eig,
        independent: gram_min_eig > tol,
        dim_parity_ok: d.is_multiple_of(2),
    }
}

/// Basis of the commutant `{z : z·xⱼ = xⱼ·z ∀j}` of a family of `dim × dim` matrices.
#[derive(Clone, Debug)]
pub struct Commutant {
    pub dim: usize,
    /// HS-orthonormal basis.
    pub basis: Vec<CMatrix>,
}

fn unvec(v: &[C64], d: usize) -> CMatrix {
    CMatrix::from_vec(d, d, v.to_vec()).expect("length d²")
}

/// Commutant of `xs` inside `M_dim`, via the joint null space of
/// `vec(z) ↦ vec(z·xⱼ − xⱼ·z) = (1 ⊗ xⱼᵀ − xⱼ ⊗ 1)·vec(z)`.
pub fn commutant(xs: &[CMatrix], dim: usize) -> Result<Commutant> {
    for x in xs {
        if x.rows() != dim || x.cols() != dim {
            return Err(SpinError::ShapeMismatch(format!(
                "expected {dim}x{dim}, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
    }
    let id = CMatrix::identity(dim);
    let blocks: Vec<CMatrix> = xs
        .iter()
        .map(|x| &kron(&id, &x.transpose()) - &kron(x, &id))
        .collect();
    let ns = joint_null_space(&blocks, dim * dim, RANK_TOL);
    Ok(Commutant {
        dim: ns.basis.len(),
        basis: ns.basis.iter().map(|v| unvec(v, dim)).collect(),
    })
}

/// Dimension of the commutant.
pub fn commutant_dim(xs: &[CMatrix], dim: usize) -> Result<usize> {
    Ok(commutant(xs, dim)?.dim)
}

/// Trivial commutant.
pub fn is_irreducible(s: &SpinTuple) -> bool {
    commutant_dim(s.unitaries(), s.dim()) == Ok(1)
}

/// Appends `v` to an orthonormal family unless it lies in its span.
/// Modified Gram–Schmidt with one re-orthogonalization pass.
fn try_extend(basis: &mut Vec<Vec<C64>>, mut v: Vec<C64>) -> bool {
    let norm0 = vnorm(&v);
    if norm0 == 0.0 {
        return false;
    }
    for _pass in 0..2 {
        for b in basis.iter() {
            let r = vdot(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= r * bi;
            }
        }
    }
    let n = vnorm(&v);
    if n <= RANK_TOL * norm0 {
        return false;
    }
    basis.push(v.into_iter().map(|z| z / n).collect());
    true
}

/// Dimension of the unital *-algebra generated by `xs`.
///
/// Seeds with `{1, xⱼ, xⱼ*}` and adjoins pairwise products of basis elements
/// until a round adds nothing. Each round only forms products that involve an
/// element added in the previous round.
pub fn algebra_dim(xs: &[CMatrix], cap: usize) -> Result<usize> {
    let d = xs
        .first()
        .ok_or_else(|| SpinError::ShapeMismatch("empty generator list".into()))?
        .rows();
    for x in xs {
        if x.rows() != d || x.cols() != d {
            return Err(SpinError::ShapeMismatch(format!(
                "expected {d}x{d}, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    try_extend(&mut basis, CMatrix::identity(d).vec());
    for x in xs {
        try_extend(&mut basis, x.vec());
        try_extend(&mut basis, x.adjoint().vec());
    }

    let mut fresh_from = 0;
    for _round in 0..cap {
        let before = basis.len();
        let mats: Vec<CMatrix> = basis.iter().map(|v| unvec(v, d)).collect();
        for i in 0..before {
            for j in 0..before {
                if i < fresh_from && j < fresh_from {
                    continue;
                }
                try_extend(&mut basis, mats[i].matmul(&mats[j]).vec());
                if basis.len() == d * d {
                    return Ok(d * d);
                }
            }
        }
        if basis.len() == before {
            return Ok(before);
        }
        fresh_from = before;
    }
    Err(SpinError::CapExceeded { cap })
}

/// `‖⊗₁ᵏ σ_Z − i^{−k}·∏ⱼ w_{2j−1}·w_{2j}‖_F` over the elements of `canonical_spin(2k)`.
pub fn envelope_product_identity(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(SpinError::BadArity("k must be >= 1".into()));
    }
    let w = canonical_spin(2 * k)?;
    let mut z_tensor = sigma_z();
    for _ in 1..k {
        z_tensor = kron(&z_tensor, &sigma_z());
    }
    let mut prod = CMatrix::identity(w.dim());
    for j in 0..k {
        prod = prod.matmul(&w.get(2 * j).matmul(w.get(2 * j + 1)));
    }
    let phase = (-I).powu(k as u32);
    Ok(z_tensor.distance(&prod.scale(phase)))
}

/// Unitary `q` with `q*·uⱼ·q = vⱼ` for every `j`, if one exists.
///
/// Solves `uⱼ·z = z·vⱼ` as a joint null space, takes a generic element of
/// it and returns its unitary polar factor. Returns `None` when the null
/// space is zero or the polar factor fails to intertwine.
pub fn intertwiner(u: &SpinTuple, v: &SpinTuple) -> Result<Option<CMatrix>> {
    if u.dim() != v.dim() {
        return Err(SpinError::ShapeMismatch(format!(
            "dimensions differ: {} vs {}",
            u.dim(),
            v.dim()
        )));
    }
    if u.arity() != v.arity() {
        return Err(SpinError::ArityMismatch {
            expected: u.arity(),
            found: v.arity(),
        });
    }
    let d = u.dim();
    let id = CMatrix::identity(d);
    let blocks: Vec<CMatrix> = u
        .unitaries()
        .iter()
        .zip(v.unitaries())
        .map(|(a, b)| &kron(a, &id) - &kron(&id, &b.transpose()))
        .collect();
    let ns = joint_null_space(&blocks, d * d, RANK_TOL);
    if ns.basis.is_empty() {
        return Ok(None);
    }
    // A fixed generic combination is invertible whenever some element of the
    // null space is.
    let mut rng = rng_from_seed(0x1e7e_7717);
    let mut z = vec![ZERO; d * d];
    for b in &ns.basis {
        let c = complex_gaussian(&mut rng);
        for (zi, bi) in z.iter_mut().zip(b) {
            *zi += c * bi;
        }
    }
    let Some(q) = polar_unitary(&unvec(&z, d), 1e-10) else {
        return Ok(None);
    };
    let qa = q.adjoint();
    let ok = q.unitarity_residual() <= 1e-8
        && u.unitaries()
            .iter()
            .zip(v.unitaries())
            .all(|(a, b)| qa.matmul(a).matmul(&q).distance(b) <= 1e-8);
    Ok(ok.then_some(q))
}
