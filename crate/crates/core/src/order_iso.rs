//! Matrix-level positivity over spin operator systems, the unital maps between
//! realizations, and Choi/Kraus analysis of Pauli-triple maps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::matcore::{
    complex_gaussian, hermitian_eig, hs_inner, is_psd, kron, random_hermitian, rng_from_seed,
    sigma_x, sigma_y, sigma_z, CMatrix, PsdVerdict, C64, I, ONE, ZERO,
};
use crate::spin_construct::SpinTuple;

/// Hermitian tolerance for pencil coefficients.
pub const COEFF_HERMITIAN_TOL: f64 = 1e-10;
/// Choi eigenvalues below this are treated as a genuine failure of complete positivity.
pub const CHOI_FAIL_TOL: f64 = 1e-6;
/// Relative eigenvalue cut for Kraus factors.
pub const KRAUS_RANK_CUT: f64 = 1e-10;
/// Relative residual above which a matrix is reported outside the span.
pub const SPAN_TOL: f64 = 1e-8;

/// Coefficients `(b₀, b₁, …, b_m)` of the level-`n` element `b₀⊗1 + Σ bⱼ⊗uⱼ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HermitianPencil {
    level: usize,
    coeffs: Vec<CMatrix>,
}

#[derive(Deserialize)]
struct PencilRepr {
    coeffs: Vec<CMatrix>,
}

impl<'de> Deserialize<'de> for HermitianPencil {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = PencilRepr::deserialize(deserializer)?;
        HermitianPencil::new(repr.coeffs).map_err(serde::de::Error::custom)
    }
}

impl HermitianPencil {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| {
            SpinError::BadArity("a pencil needs at least the constant term".into())
        })?;
        let level = first.rows();
        for b in &coeffs {
            if b.rows() != level || b.cols() != level {
                return Err(SpinError::ShapeMismatch(format!(
                    "pencil coefficient is {}x{}, expected {level}x{level}",
                    b.rows(),
                    b.cols()
                )));
            }
            let residual = b.hermitian_residual();
            if residual > COEFF_HERMITIAN_TOL {
                return Err(SpinError::NotHermitian { residual });
            }
        }
        Ok(Self { level, coeffs })
    }

    /// Scalar pencil `β₀·1 + Σ βⱼ·uⱼ`.
    pub fn scalar(betas: &[f64]) -> Result<Self> {
        Self::new(
            betas
                .iter()
                .map(|&b| CMatrix::from_real(1, 1, &[b]))
                .collect(),
        )
    }

    /// Random pencil with `b₀ = shift·1 + G₀` and Gaussian Hermitian `bⱼ`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, level: usize, arity: usize, shift: f64) -> Self {
        let mut coeffs = Vec::with_capacity(arity + 1);
        let b0 = &random_hermitian(rng, level, 1.0) + &CMatrix::identity(level).scale_re(shift);
        coeffs.push(b0);
        for _ in 0..arity {
            coeffs.push(random_hermitian(rng, level, 1.0));
        }
        Self { level, coeffs }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of non-constant terms.
    pub fn arity(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }
}

/// `b₀⊗1_d + Σ bⱼ⊗uⱼ`.
pub fn assemble(p: &HermitianPencil, s: &SpinTuple) -> Result<CMatrix> {
    if p.arity() != s.arity() {
        return Err(SpinError::ArityMismatch {
            expected: s.arity(),
            found: p.arity(),
        });
    }
    let mut out = kron(&p.coeffs[0], &CMatrix::identity(s.dim()));
    for (b, u) in p.coeffs[1..].iter().zip(s.unitaries()) {
        out = &out + &kron(b, u);
    }
    Ok(out.hermitian_part())
}

pub fn pencil_psd(p: &HermitianPencil, s: &SpinTuple, tol: f64) -> Result<PsdVerdict> {
    is_psd(&assemble(p, s)?, tol)
}

// ---------------------------------------------------------------------------
// Maps between spans
// ---------------------------------------------------------------------------

/// The unital map `1 ↦ 1`, `uⱼ ↦ vⱼ` on `span{1, u₁, …, u_m}`.
#[derive(Clone, Debug)]
pub struct SpanMap {
    src: SpinTuple,
    dst: SpinTuple,
}

/// `ucp_between(src, dst)`.
pub fn ucp_between(src: &SpinTuple, dst: &SpinTuple) -> Result<SpanMap> {
    if src.arity() != dst.arity() {
        return Err(SpinError::ArityMismatch {
            expected: src.arity(),
            found: dst.arity(),
        });
    }
    Ok(SpanMap {
        src: src.clone(),
        dst: dst.clone(),
    })
}

impl SpanMap {
    pub fn source(&self) -> &SpinTuple {
        &self.src
    }

    pub fn target(&self) -> &SpinTuple {
        &self.dst
    }

    /// Coordinates `(α₀, α₁, …)` of `x` in the orthogonal basis `{1, u₁, …}`,
    /// with the residual `‖x − Σ αⱼuⱼ‖_F`.
    pub fn coordinates(&self, x: &CMatrix) -> Result<(Vec<C64>, f64)> {
        let d = self.src.dim();
        if x.rows() != d || x.cols() != d {
            return Err(SpinError::ShapeMismatch(format!(
                "input is {}x{}, source dimension is {d}",
                x.rows(),
                x.cols()
            )));
        }
        let scale = 1.0 / d as f64;
        let mut alphas = vec![x.trace() * scale];
        let mut rebuilt = CMatrix::identity(d).scale(alphas[0]);
        for u in self.src.unitaries() {
            let a = hs_inner(x, u)? * scale;
            rebuilt = &rebuilt + &u.scale(a);
            alphas.push(a);
        }
        Ok((alphas, x.distance(&rebuilt)))
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let (alphas, residual) = self.coordinates(x)?;
        if residual > SPAN_TOL * x.frobenius_norm().max(1.0) {
            return Err(SpinError::NotInSpan { residual });
        }
        let mut out = CMatrix::identity(self.dst.dim()).scale(alphas[0]);
        for (v, a) in self.dst.unitaries().iter().zip(&alphas[1..]) {
            out = &out + &v.scale(*a);
        }
        Ok(out)
    }

    /// `id_n ⊗ φ` applied to an `(n·d_src)`-square matrix block by block.
    pub fn amplify(&self, x: &CMatrix) -> Result<CMatrix> {
        apply_blockwise(x, self.src.dim(), self.dst.dim(), |b| self.apply(b))
    }

    /// Largest `‖back(forth(x)) − x‖_F` over the basis `{1, u₁, …}`.
    pub fn round_trip_residual(&self, back: &SpanMap) -> Result<f64> {
        let mut basis = vec![CMatrix::identity(self.src.dim())];
        basis.extend(self.src.unitaries().iter().cloned());
        let mut worst: f64 = 0.0;
        for x in &basis {
            let y = back.apply(&self.apply(x)?)?;
            worst = worst.max(y.distance(x));
        }
        Ok(worst)
    }
}

/// Apply a map on `k×k` blocks of an `(n·k)`-square matrix.
pub fn apply_blockwise(
    x: &CMatrix,
    in_dim: usize,
    out_dim: usize,
    mut f: impl FnMut(&CMatrix) -> Result<CMatrix>,
) -> Result<CMatrix> {
    if x.rows() != x.cols() || !x.rows().is_multiple_of(in_dim) {
        return Err(SpinError::ShapeMismatch(format!(
            "{}x{} is not a square grid of {in_dim}x{in_dim} blocks",
            x.rows(),
            x.cols()
        )));
    }
    let n = x.rows() / in_dim;
    let mut out = CMatrix::zeros(n * out_dim, n * out_dim);
    for i in 0..n {
        for j in 0..n {
            let image = f(&x.block(i * in_dim, j * in_dim, in_dim, in_dim))?;
            out.set_block(i * out_dim, j * out_dim, &image);
        }
    }
    Ok(out)
}

/// Extends a spin pair `(u, v)` to the triple `(u, v, −i·u·v)`, oriented so
/// that `(σ_X, σ_Y)` completes to the Pauli triple.
pub fn complete_to_pauli_triple(pair: &SpinTuple) -> Result<SpinTuple> {
    if pair.arity() != 2 {
        return Err(SpinError::InvariantViolation(format!(
            "expected a spin pair, got arity {}",
            pair.arity()
        )));
    }
    let (u, v) = (pair.get(0), pair.get(1));
    let t = u.matmul(v).scale(-I).hermitian_part();
    SpinTuple::new(vec![u.clone(), v.clone(), t])
        .map_err(|e| SpinError::InvariantViolation(format!("completed triple is not spin: {e}")))
}

// ---------------------------------------------------------------------------
// Choi / Kraus
// ---------------------------------------------------------------------------

/// A completely positive map `M_in → M_out` given by its Choi matrix
/// `C = Σ eᵢⱼ⊗Φ(eᵢⱼ)` (source index left) and, when extracted, Kraus factors
/// `Aₖ` (out×in) with `Φ(y) = Σ Aₖ·y·Aₖ*`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CpMap {
    pub in_dim: usize,
    pub out_dim: usize,
    pub choi: CMatrix,
    pub kraus: Option<Vec<CMatrix>>,
    /// `‖Φ(1) − 1‖_F`
    pub unital_residual: f64,
    pub choi_min_eig: f64,
    /// Largest `‖Σ Aₖ·eᵢⱼ·Aₖ* − Φ(eᵢⱼ)‖_F` over matrix units.
    pub kraus_residual: Option<f64>,
}

fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n, n);
    e[(i, j)] = ONE;
    e
}

impl CpMap {
    /// Builds the Choi matrix from the images of the matrix units and
    /// extracts Kraus factors. Fails with `ChoiNotPsd` below `−1e-6`.
    pub fn from_unit_images(
        in_dim: usize,
        out_dim: usize,
        image: impl Fn(usize, usize) -> CMatrix,
    ) -> Result<Self> {
        let mut choi = CMatrix::zeros(in_dim * out_dim, in_dim * out_dim);
        let mut unit_image = CMatrix::zeros(out_dim, out_dim);
        for i in 0..in_dim {
            for j in 0..in_dim {
                let b = image(i, j);
                if i == j {
                    unit_image = &unit_image + &b;
                }
                choi.set_block(i * out_dim, j * out_dim, &b);
            }
        }
        let choi = choi.hermitian_part();
        let unital_residual = unit_image.distance(&CMatrix::identity(out_dim));
        let eig = hermitian_eig(&choi, 1e-8)?;
        let choi_min_eig = eig.values.first().copied().unwrap_or(0.0);
        if choi_min_eig < -CHOI_FAIL_TOL {
            return Err(SpinError::ChoiNotPsd {
                min_eig: choi_min_eig,
            });
        }
        let cut = KRAUS_RANK_CUT * choi.trace().re.abs();
        let mut kraus = Vec::new();
        for (k, &lambda) in eig.values.iter().enumerate().rev() {
            if lambda <= cut {
                continue;
            }
            let s = lambda.sqrt();
            kraus.push(CMatrix::from_fn(out_dim, in_dim, |r, i| {
                eig.vectors[(i * out_dim + r, k)] * s
            }));
        }
        let mut map = Self {
            in_dim,
            out_dim,
            choi,
            kraus: Some(kraus),
            unital_residual,
            choi_min_eig,
            kraus_residual: None,
        };
        let mut worst: f64 = 0.0;
        for i in 0..in_dim {
            for j in 0..in_dim {
                let e = matrix_unit(in_dim, i, j);
                let via_kraus = map.apply_kraus(&e).expect("kraus present");
                worst = worst.max(via_kraus.distance(&map.choi_block(i, j)));
            }
        }
        map.kraus_residual = Some(worst);
        Ok(map)
    }

    /// `Φ(eᵢⱼ)`, read off the Choi matrix.
    pub fn choi_block(&self, i: usize, j: usize) -> CMatrix {
        self.choi.block(
            i * self.out_dim,
            j * self.out_dim,
            self.out_dim,
            self.out_dim,
        )
    }

    /// `Φ(y) = Σ yᵢⱼ·Φ(eᵢⱼ)`.
    pub fn apply(&self, y: &CMatrix) -> Result<CMatrix> {
        self.check_input(y)?;
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                if y[(i, j)] != ZERO {
                    out = &out + &self.choi_block(i, j).scale(y[(i, j)]);
                }
            }
        }
        Ok(out)
    }

    /// `Σ Aₖ·y·Aₖ*`, if Kraus factors are present.
    pub fn apply_kraus(&self, y: &CMatrix) -> Option<CMatrix> {
        let kraus = self.kraus.as_ref()?;
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for a in kraus {
            out = &out + &a.matmul(y).matmul(&a.adjoint());
        }
        Some(out)
    }

    /// Number of retained Kraus factors.
    pub fn kraus_rank(&self) -> usize {
        self.kraus.as_ref().map_or(0, Vec::len)
    }

    fn check_input(&self, y: &CMatrix) -> Result<()> {
        if y.rows() != self.in_dim || y.cols() != self.in_dim {
            return Err(SpinError::ShapeMismatch(format!(
                "map input is {}x{}, expected {}x{}",
                y.rows(),
                y.cols(),
                self.in_dim,
                self.in_dim
            )));
        }
        Ok(())
    }
}

/// `(1, σ_X, σ_Y, σ_Z)`.
pub fn pauli_basis() -> [CMatrix; 4] {
    [CMatrix::identity(2), sigma_x(), sigma_y(), sigma_z()]
}

/// Image of `y ∈ M₂` under `1 ↦ 1`, `σ_X ↦ u`, `σ_Y ↦ v`, `σ_Z ↦ w`.
pub fn triple_map_apply(dst: &SpinTuple, y: &CMatrix) -> CMatrix {
    let basis = pauli_basis();
    let images = [
        CMatrix::identity(dst.dim()),
        dst.get(0).clone(),
        dst.get(1).clone(),
        dst.get(2).clone(),
    ];
    let mut out = CMatrix::zeros(dst.dim(), dst.dim());
    for (p, img) in basis.iter().zip(&images) {
        // αᵢ = tr(σᵢ·y)/2
        let alpha = p.matmul(y).trace() * 0.5;
        out = &out + &img.scale(alpha);
    }
    out
}

/// Choi matrix and Kraus factors of the Pauli-triple map onto `dst`.
pub fn choi_of_triple_map(dst: &SpinTuple) -> Result<CpMap> {
    if dst.arity() != 3 {
        return Err(SpinError::ArityMismatch {
            expected: 3,
            found: dst.arity(),
        });
    }
    CpMap::from_unit_images(2, dst.dim(), |i, j| {
        triple_map_apply(dst, &matrix_unit(2, i, j))
    })
}

/// Residuals of the inverse-map and trace identities.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InverseMapReport {
    /// Largest `‖ψ(Φ(x)) − x‖_F` over `x ∈ {1, σ_X, σ_Y, σ_Z}`.
    pub identity_residual: f64,
    /// Largest `|tr(Φ(x)Φ(y)) − (d/2)·tr(xy)|` over random span pairs.
    pub trace_identity_residual: f64,
}

/// `ψ(z) = (2/d)·Σ Aₖ*·z·Aₖ`, the inverse of `Φ` on its range.
pub fn inverse_map_apply(kraus: &[CMatrix], z: &CMatrix) -> CMatrix {
    let d = z.rows();
    let mut out = CMatrix::zeros(2, 2);
    for a in kraus {
        out = &out + &a.adjoint().matmul(z).matmul(a);
    }
    out.scale_re(2.0 / d as f64)
}

fn kraus_apply(kraus: &[CMatrix], y: &CMatrix) -> CMatrix {
    let d = kraus[0].rows();
    let mut out = CMatrix::zeros(d, d);
    for a in kraus {
        out = &out + &a.matmul(y).matmul(&a.adjoint());
    }
    out
}

/// Checks `ψ∘Φ = id` on `M₂` and the trace identity on `pairs` random pairs.
pub fn inverse_map_check(
    dst: &SpinTuple,
    kraus: &[CMatrix],
    pairs: usize,
    seed: u64,
) -> Result<InverseMapReport> {
    let d = dst.dim();
    if kraus.is_empty() || kraus.iter().any(|a| a.rows() != d || a.cols() != 2) {
        return Err(SpinError::ShapeMismatch(format!(
            "expected a non-empty list of {d}x2 Kraus factors"
        )));
    }
    let mut identity_residual: f64 = 0.0;
    for x in pauli_basis() {
        let back = inverse_map_apply(kraus, &kraus_apply(kraus, &x));
        identity_residual = identity_residual.max(back.distance(&x));
    }
    let mut rng = rng_from_seed(seed);
    let basis = pauli_basis();
    let random_element = |rng: &mut rand_chacha::ChaCha8Rng| {
        basis.iter().fold(CMatrix::zeros(2, 2), |acc, p| {
            &acc + &p.scale(complex_gaussian(rng))
        })
    };
    let ratio = d as f64 / 2.0;
    let mut trace_identity_residual: f64 = 0.0;
    for _ in 0..pairs {
        let x = random_element(&mut rng);
        let y = random_element(&mut rng);
        let lhs = kraus_apply(kraus, &x)
            .matmul(&kraus_apply(kraus, &y))
            .trace();
        let rhs = x.matmul(&y).trace() * ratio;
        trace_identity_residual = trace_identity_residual.max((lhs - rhs).norm());
    }
    Ok(InverseMapReport {
        identity_residual,
        trace_identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::haar_unitary;
    use crate::spin_construct::{canonical_spin, conjugate, inflate, pair_from_witness, pauli};
    use crate::spin_verify::verify_spin;

    fn single(u: CMatrix) -> SpinTuple {
        SpinTuple::new(vec![u]).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let p = HermitianPencil::scalar(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            assemble(&p, &canonical_spin(4).unwrap()).unwrap(),
            CMatrix::identity(4)
        );

        let p = HermitianPencil::scalar(&[1.0, 1.0]).unwrap();
        let v = pencil_psd(&p, &single(sigma_x()), 1e-9).unwrap();
        assert!(v.psd && v.min_eig.abs() < 1e-12);

        let p = HermitianPencil::new(vec![CMatrix::identity(2), sigma_x()]).unwrap();
        let v = pencil_psd(&p, &single(sigma_x()), 1e-9).unwrap();
        assert!(v.psd && v.min_eig.abs() < 1e-12);
    }

    #[test]
    fn arity_mismatch() {
        let p = HermitianPencil::scalar(&[1.0, 0.5]).unwrap();
        let err = assemble(&p, &pauli()).unwrap_err();
        assert_eq!(
            err,
            SpinError::ArityMismatch {
                expected: 3,
                found: 1
            }
        );
    }

    #[test]
    fn non_hermitian_coefficient_is_rejected() {
        let err = HermitianPencil::new(vec![CMatrix::identity(2), sigma_y().scale(I)]).unwrap_err();
        assert!(matches!(err, SpinError::NotHermitian { .. }));
    }

    #[test]
    fn scalar_pencil_on_pauli() {
        for (beta, expect) in [
            (0.5, true),
            (1.0, true),
            (1.2, false),
            (-0.99, true),
            (-1.01, false),
        ] {
            let p = HermitianPencil::scalar(&[1.0, beta, 0.0, 0.0]).unwrap();
            assert_eq!(
                pencil_psd(&p, &pauli(), 1e-9).unwrap().psd,
                expect,
                "beta={beta}"
            );
        }
    }

    #[test]
    fn span_map_identity_and_conjugation() {
        let s = canonical_spin(4).unwrap();
        let map = ucp_between(&s, &s).unwrap();
        for u in s.unitaries() {
            assert!(map.apply(u).unwrap().distance(u) < 1e-14);
        }
        let q = haar_unitary(4, 12);
        let t = conjugate(&s, &q).unwrap();
        let map = ucp_between(&s, &t).unwrap();
        let x = &s.get(1).scale_re(0.3) + &s.get(3).scale(C64::new(0.1, -2.0));
        let expected = q.adjoint().matmul(&x).matmul(&q);
        assert!(map.apply(&x).unwrap().distance(&expected) < 1e-12);
        let back = ucp_between(&t, &s).unwrap();
        assert!(map.round_trip_residual(&back).unwrap() < 1e-9);
    }

    #[test]
    fn span_map_rejects_outside() {
        let s = pauli();
        let map = ucp_between(&s, &s).unwrap();
        // every 2×2 matrix is in span{1, σ_X, σ_Y, σ_Z}; use a pair instead
        let pair = s.truncate(2).unwrap();
        let map2 = ucp_between(&pair, &pair).unwrap();
        assert!(map.apply(&sigma_z()).is_ok());
        assert!(matches!(
            map2.apply(&sigma_z()),
            Err(SpinError::NotInSpan { .. })
        ));
    }

    #[test]
    fn completion_orientation() {
        let t = complete_to_pauli_triple(&pauli().truncate(2).unwrap()).unwrap();
        assert!(t.get(2).distance(&sigma_z()) < 1e-15);
        let zx = SpinTuple::new(vec![sigma_z(), sigma_x()]).unwrap();
        let t = complete_to_pauli_triple(&zx).unwrap();
        assert!(t.get(2).distance(&sigma_y()) < 1e-15);
    }

    #[test]
    fn completion_in_m8() {
        let p = pair_from_witness(4, &haar_unitary(4, 2), &haar_unitary(8, 3)).unwrap();
        let t = complete_to_pauli_triple(&p).unwrap();
        let r = verify_spin(&t, 1e-9);
        assert!(r.passes(1e-9));
        assert!(choi_of_triple_map(&t).unwrap().choi_min_eig >= -1e-9);
    }

    #[test]
    fn choi_of_identity_channel() {
        let c = choi_of_triple_map(&pauli()).unwrap();
        // 2 × projector onto (e₀⊗e₀ + e₁⊗e₁)/√2
        let mut omega = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            omega[(i, j)] = ONE;
        }
        assert!(c.choi.distance(&omega) < 1e-14);
        assert_eq!(c.kraus_rank(), 1);
        assert!(c.kraus_residual.unwrap() < 1e-12);
        assert!(c.unital_residual < 1e-15);
    }

    #[test]
    fn choi_of_inflated_pauli() {
        let t = conjugate(&inflate(&pauli(), 2).unwrap(), &haar_unitary(4, 9)).unwrap();
        let c = choi_of_triple_map(&t).unwrap();
        assert!(c.choi_min_eig >= -1e-9);
        assert!(c.kraus_residual.unwrap() <= 1e-8);
        assert!(c.apply(&sigma_y()).unwrap().distance(t.get(1)) < 1e-12);
        assert!(c.apply_kraus(&sigma_z()).unwrap().distance(t.get(2)) < 1e-8);
    }

    #[test]
    fn reversed_orientation_is_not_cp() {
        let t = SpinTuple::new(vec![sigma_x(), sigma_y(), -&sigma_z()]).unwrap();
        assert!(matches!(
            choi_of_triple_map(&t),
            Err(SpinError::ChoiNotPsd { .. })
        ));
    }

    #[test]
    fn inverse_map_identities() {
        let c = choi_of_triple_map(&pauli()).unwrap();
        let r = inverse_map_check(&pauli(), c.kraus.as_ref().unwrap(), 20, 1).unwrap();
        assert!(r.identity_residual <= 1e-10 && r.trace_identity_residual <= 1e-10);

        let t = inflate(&pauli(), 3).unwrap();
        let c = choi_of_triple_map(&t).unwrap();
        let r = inverse_map_check(&t, c.kraus.as_ref().unwrap(), 20, 1).unwrap();
        assert!(r.identity_residual <= 1e-8 && r.trace_identity_residual <= 1e-8);
    }

    #[test]
    fn trace_identity_on_sigma_x() {
        let t = inflate(&pauli(), 3).unwrap();
        let u = t.get(0);
        assert!((u.matmul(u).trace().re - 6.0).abs() < 1e-12);
        assert!((sigma_x().matmul(&sigma_x()).trace().re * 3.0 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn blockwise_amplification() {
        let s = pauli();
        let q = haar_unitary(2, 5);
        let t = conjugate(&s, &q).unwrap();
        let map = ucp_between(&s, &t).unwrap();
        let p = HermitianPencil::random(&mut rng_from_seed(3), 2, 3, 2.0);
        let x = assemble(&p, &s).unwrap();
        let y = map.amplify(&x).unwrap();
        assert!(y.distance(&assemble(&p, &t).unwrap()) < 1e-12);
    }
}
