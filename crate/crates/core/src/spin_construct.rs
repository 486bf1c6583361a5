//! Constructors for spin systems: the Pauli triple, the iterated irreducible
//! tower, and derived realizations (conjugation, inflation, pair from witness).

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::matcore::{kron, sigma_x, sigma_y, sigma_z, CMatrix};

/// Residual bound for `u = u*` and `u² = 1`.
pub const SELFADJOINT_TOL: f64 = 1e-10;
/// Residual bound for `uv + vu = 0`.
pub const ANTICOMMUTE_TOL: f64 = 1e-9;
/// Residual bound when a caller-supplied matrix must be unitary.
pub const UNITARY_TOL: f64 = 1e-9;

/// Ordered tuple of selfadjoint, pairwise anticommuting unitaries acting on `ℂ^dim`.
///
/// [`SpinTuple::new`] enforces the spin axioms. [`SpinTuple::unchecked`]
/// only requires equal square shapes, so raw input can be handed to
/// [`crate::spin_verify::verify_spin`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinTuple {
    dim: usize,
    unitaries: Vec<CMatrix>,
}

#[derive(Deserialize)]
struct SpinTupleRepr {
    dim: usize,
    unitaries: Vec<CMatrix>,
}

impl<'de> Deserialize<'de> for SpinTuple {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = SpinTupleRepr::deserialize(deserializer)?;
        let t = SpinTuple::unchecked(repr.unitaries).map_err(serde::de::Error::custom)?;
        if t.dim != repr.dim {
            return Err(serde::de::Error::custom(format!(
                "declared dim {} but matrices are {}x{}",
                repr.dim, t.dim, t.dim
            )));
        }
        Ok(t)
    }
}

impl SpinTuple {
    /// Validated constructor.
    pub fn new(unitaries: Vec<CMatrix>) -> Result<Self> {
        let t = Self::unchecked(unitaries)?;
        t.validate()?;
        Ok(t)
    }

    /// Shape-checked constructor without the spin axioms.
    pub fn unchecked(unitaries: Vec<CMatrix>) -> Result<Self> {
        let first = unitaries
            .first()
            .ok_or_else(|| SpinError::BadArity("a spin tuple needs at least one element".into()))?;
        let dim = first.rows();
        for (j, u) in unitaries.iter().enumerate() {
            if u.rows() != dim || u.cols() != dim {
                return Err(SpinError::ShapeMismatch(format!(
                    "element {j} is {}x{}, expected {dim}x{dim}",
                    u.rows(),
                    u.cols()
                )));
            }
        }
        Ok(Self { dim, unitaries })
    }

    /// Checks the spin axioms, reporting the first failure.
    pub fn validate(&self) -> Result<()> {
        let id = CMatrix::identity(self.dim);
        if !self.dim.is_multiple_of(2) {
            return Err(SpinError::InvariantViolation(format!(
                "ambient dimension {} is odd",
                self.dim
            )));
        }
        for (j, u) in self.unitaries.iter().enumerate() {
            let sa = u.hermitian_residual();
            if sa > SELFADJOINT_TOL {
                return Err(SpinError::InvariantViolation(format!(
                    "element {j} is not selfadjoint (residual {sa:.3e})"
                )));
            }
            let sq = u.matmul(u).distance(&id);
            if sq > SELFADJOINT_TOL {
                return Err(SpinError::InvariantViolation(format!(
                    "element {j} does not square to the identity (residual {sq:.3e})"
                )));
            }
        }
        for i in 0..self.unitaries.len() {
            for j in i + 1..self.unitaries.len() {
                let r = self.unitaries[i]
                    .anticommutator(&self.unitaries[j])
                    .frobenius_norm();
                if r > ANTICOMMUTE_TOL {
                    return Err(SpinError::InvariantViolation(format!(
                        "elements {i} and {j} do not anticommute (residual {r:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn get(&self, j: usize) -> &CMatrix {
        &self.unitaries[j]
    }

    /// First `m` elements.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.arity() {
            return Err(SpinError::BadArity(format!(
                "cannot take {m} elements from a tuple of arity {}",
                self.arity()
            )));
        }
        Ok(Self {
            dim: self.dim,
            unitaries: self.unitaries[..m].to_vec(),
        })
    }
}

/// `(σ_X, σ_Y, σ_Z)` in `M₂`.
pub fn pauli() -> SpinTuple {
    SpinTuple {
        dim: 2,
        unitaries: vec![sigma_x(), sigma_y(), sigma_z()],
    }
}

/// From an irreducible spin `m`-tuple in `M_d`, the `(m + 2)`-tuple in `M_{2d}`
///
/// `u₁⊗1₂, …, u_{m−1}⊗1₂, u_m⊗σ_X, u_m⊗σ_Y, u_m⊗σ_Z`
///
/// in exactly this order.
pub fn extend_by_one(s: &SpinTuple) -> Result<SpinTuple> {
    s.validate()?;
    let id2 = CMatrix::identity(2);
    let (last, head) = s.unitaries.split_last().expect("non-empty tuple");
    let mut out: Vec<CMatrix> = head.iter().map(|u| kron(u, &id2)).collect();
    out.push(kron(last, &sigma_x()));
    out.push(kron(last, &sigma_y()));
    out.push(kron(last, &sigma_z()));
    SpinTuple::new(out)
}

/// Irreducible spin `m`-tuple in dimension `2^k`, `m ∈ {2k, 2k+1}`.
///
/// Builds the `(2k+1)`-element tower by iterating [`extend_by_one`] from the
/// Pauli triple; for even `m` the last element is dropped.
pub fn canonical_spin(m: usize) -> Result<SpinTuple> {
    if m < 2 {
        return Err(SpinError::BadArity(format!(
            "canonical spin tuples need m >= 2, got {m}"
        )));
    }
    let k = m / 2;
    let mut q = pauli();
    for _ in 1..k {
        q = extend_by_one(&q)?;
    }
    q.truncate(m)
}

/// `(q*·uⱼ·q)`.
pub fn conjugate(s: &SpinTuple, q: &CMatrix) -> Result<SpinTuple> {
    if q.rows() != s.dim || q.cols() != s.dim {
        return Err(SpinError::ShapeMismatch(format!(
            "conjugating unitary is {}x{}, tuple dimension is {}",
            q.rows(),
            q.cols(),
            s.dim
        )));
    }
    let residual = q.unitarity_residual();
    if residual > UNITARY_TOL {
        return Err(SpinError::NotUnitary { residual });
    }
    let qa = q.adjoint();
    let unitaries = s
        .unitaries
        .iter()
        // symmetrize to keep the output exactly selfadjoint
        .map(|u| qa.matmul(u).matmul(q).hermitian_part())
        .collect();
    Ok(SpinTuple {
        dim: s.dim,
        unitaries,
    })
}

/// `(uⱼ ⊗ 1_r)`; reducible for `r ≥ 2`.
pub fn inflate(s: &SpinTuple, r: usize) -> Result<SpinTuple> {
    if r == 0 {
        return Err(SpinError::InvalidData(
            "inflation multiplicity must be >= 1".into(),
        ));
    }
    let id = CMatrix::identity(r);
    Ok(SpinTuple {
        dim: s.dim * r,
        unitaries: s.unitaries.iter().map(|u| kron(u, &id)).collect(),
    })
}

/// The spin pair `u = y*·diag(1_n, −1_n)·y`, `v = y*·[0 w; w* 0]·y`.
pub fn pair_from_witness(n: usize, w: &CMatrix, y: &CMatrix) -> Result<SpinTuple> {
    if w.rows() != n || w.cols() != n || y.rows() != 2 * n || y.cols() != 2 * n {
        return Err(SpinError::ShapeMismatch(format!(
            "expected w {n}x{n} and y {0}x{0}",
            2 * n
        )));
    }
    for m in [w, y] {
        let residual = m.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(SpinError::NotUnitary { residual });
        }
    }
    let id = CMatrix::identity(n);
    let signs = id.direct_sum(&(-&id));
    let mut flip = CMatrix::zeros(2 * n, 2 * n);
    flip.set_block(0, n, w);
    flip.set_block(n, 0, &w.adjoint());
    let ya = y.adjoint();
    let u = ya.matmul(&signs).matmul(y).hermitian_part();
    let v = ya.matmul(&flip).matmul(y).hermitian_part();
    SpinTuple::new(vec![u, v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{haar_unitary, C64, I, ONE};

    #[test]
    fn pauli_relations() {
        let p = pauli();
        let xy = p.get(0).matmul(p.get(1));
        assert!(xy.distance(&p.get(2).scale(I)) < 1e-15);
        assert_eq!(p.get(1).trace(), C64::new(0.0, 0.0));
        assert_eq!(p.get(2).matmul(p.get(2)), CMatrix::identity(2));
        p.validate().unwrap();
    }

    #[test]
    fn canonical_three_is_pauli() {
        assert_eq!(canonical_spin(3).unwrap(), pauli());
    }

    #[test]
    fn canonical_five_matches_tower_display() {
        let q = canonical_spin(5).unwrap();
        let id = CMatrix::identity(2);
        let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
        let expected = [
            kron(&x, &id),
            kron(&y, &id),
            kron(&z, &x),
            kron(&z, &y),
            kron(&z, &z),
        ];
        assert_eq!(q.dim(), 4);
        for (a, b) in q.unitaries().iter().zip(&expected) {
            assert_eq!(a, b);
        }
        let q4 = canonical_spin(4).unwrap();
        assert_eq!(q4.unitaries(), &expected[..4]);
    }

    #[test]
    fn canonical_rejects_small_arity() {
        assert!(matches!(canonical_spin(1), Err(SpinError::BadArity(_))));
        assert!(matches!(canonical_spin(0), Err(SpinError::BadArity(_))));
    }

    #[test]
    fn extend_arity_count() {
        let q = extend_by_one(&pauli()).unwrap();
        assert_eq!(q.arity(), (3 - 1) + 3);
        assert_eq!(q.dim(), 4);
    }

    #[test]
    fn extend_rejects_invalid_input() {
        let bad = SpinTuple::unchecked(vec![sigma_x(), sigma_x()]).unwrap();
        assert!(matches!(
            extend_by_one(&bad),
            Err(SpinError::InvariantViolation(_))
        ));
    }

    #[test]
    fn conjugate_by_identity_is_identity() {
        let p = pauli();
        assert_eq!(conjugate(&p, &CMatrix::identity(2)).unwrap(), p);
    }

    #[test]
    fn conjugate_rejects_non_unitary() {
        let q = CMatrix::identity(2).scale_re(2.0);
        assert!(matches!(
            conjugate(&pauli(), &q),
            Err(SpinError::NotUnitary { .. })
        ));
    }

    #[test]
    fn conjugated_pauli_stays_spin() {
        let t = conjugate(&pauli(), &haar_unitary(2, 17)).unwrap();
        t.validate().unwrap();
        for u in t.unitaries() {
            assert!(u.trace().norm() <= 1e-10);
        }
    }

    #[test]
    fn inflate_once_is_unchanged() {
        assert_eq!(inflate(&pauli(), 1).unwrap(), pauli());
        let t = inflate(&pauli(), 3).unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.dim(), 6);
    }

    #[test]
    fn witness_examples() {
        let one = CMatrix::scalar(ONE);
        let id2 = CMatrix::identity(2);
        let p = pair_from_witness(1, &one, &id2).unwrap();
        assert_eq!(p.get(0), &sigma_z());
        assert_eq!(p.get(1), &sigma_x());

        let minus_i = CMatrix::scalar(-I);
        let p = pair_from_witness(1, &minus_i, &id2).unwrap();
        assert_eq!(p.get(1), &sigma_y());
    }

    #[test]
    fn random_witness_pair_anticommutes() {
        let p = pair_from_witness(3, &haar_unitary(3, 1), &haar_unitary(6, 2)).unwrap();
        assert!(p.get(0).anticommutator(p.get(1)).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&pauli()).unwrap();
        assert!(s.starts_with("{\"dim\":2,\"unitaries\":[{\"rows\":2"));
        let back: SpinTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pauli());
        let bad = s.replacen("\"dim\":2", "\"dim\":4", 1);
        assert!(serde_json::from_str::<SpinTuple>(&bad).is_err());
    }
}
