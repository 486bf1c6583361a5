//! Spin pairs: the block canonical form of an anticommuting pair and the
//! structure of the nilpotent `x = u + iv`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::matcore::{
    eigvalsh, hermitian_eig, kron, random_unit_vector, rng_from_seed, sigma_z, vdot, CMatrix, C64,
    I, ONE,
};
use crate::spin_construct::SpinTuple;

/// Bound on the diagonal blocks of `y·v·y*` before the pair is rejected.
pub const BLOCK_TOL: f64 = 1e-8;

/// `y·u·y* = diag(1_n, −1_n)` and `y·v·y* = [0 w; w* 0]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairCanonicalForm {
    pub n: usize,
    pub y: CMatrix,
    pub w: CMatrix,
    /// `‖y·u·y* − diag(1_n, −1_n)‖_F`
    pub u_residual: f64,
    /// `‖y·v·y* − [0 w; w* 0]‖_F`
    pub v_residual: f64,
    /// `‖w*w − 1_n‖_F`
    pub w_unitarity_residual: f64,
}

/// Unitary reduction of `x = u + iv` to `⊕₁ⁿ g`, `g = [0 2; 0 0]`.
///
/// `h` already includes the canonicalizing unitary, so `h*·x·h = [0 −2; 0 0] ⊗ 1_n`
/// directly. Conjugating further by `σ_Z ⊗ 1_n` and by the perfect-shuffle
/// permutation gives `1_n ⊗ g`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NilpotentReduction {
    pub h: CMatrix,
    /// Column `j` of the shuffle permutation matrix is `e_{shuffle[j]}`.
    pub shuffle: Vec<usize>,
    pub block_count: usize,
    /// Unitarity residual of the block matrix `√½·[1 −1; iw* iw*]`.
    pub h_unitarity_residual: f64,
    /// `‖h*·x·h − [0 −2; 0 0] ⊗ 1_n‖_F`
    pub pre_shuffle_residual: f64,
    /// `‖H*·x·H − ⊕₁ⁿ g‖_F` for the full reducing unitary `H`.
    pub reduction_residual: f64,
}

impl NilpotentReduction {
    /// The full reducing unitary `H = h·(σ_Z ⊗ 1_n)·P`.
    pub fn reducing_unitary(&self) -> CMatrix {
        let n = self.block_count;
        let flip = kron(&sigma_z(), &CMatrix::identity(n));
        self.h
            .matmul(&flip)
            .matmul(&permutation_matrix(&self.shuffle))
    }
}

/// Norm, nilpotency and reduction data for `x = u + iv`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XAnalysis {
    /// Largest singular value of `x`.
    pub norm: f64,
    /// `‖x²‖_F`
    pub nilpotency_residual: f64,
    /// Largest distance of an eigenvalue of `x*x` from `{0, 4}`.
    pub gram_spectrum_residual: f64,
    pub reduction: NilpotentReduction,
}

/// Numerical-range sampling summary.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DiscCheck {
    pub max_abs: f64,
    pub coverage_gap: f64,
}

/// `g = [0 2; 0 0]`.
pub fn nilpotent_g() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0])
}

fn validate_pair(u: &CMatrix, v: &CMatrix) -> Result<usize> {
    let pair = SpinTuple::new(vec![u.clone(), v.clone()])?;
    Ok(pair.dim() / 2)
}

/// Block canonical form of a spin pair.
pub fn canonicalize_pair(u: &CMatrix, v: &CMatrix) -> Result<PairCanonicalForm> {
    let n = validate_pair(u, v)?;
    let d = 2 * n;
    let eig = hermitian_eig(u, 1e-9)?;
    let positives = eig.values.iter().filter(|&&l| l > 0.0).count();
    if positives != n {
        return Err(SpinError::InvariantViolation(format!(
            "u has {positives} positive eigenvalues, expected {n}"
        )));
    }
    // +1 eigenvectors first; eigenvalues come sorted ascending
    let order: Vec<usize> = (n..d).chain(0..n).collect();
    let basis = CMatrix::from_fn(d, d, |i, j| eig.vectors[(i, order[j])]);
    let y = basis.adjoint();
    let ya = basis;

    let id = CMatrix::identity(n);
    let signs = id.direct_sum(&(-&id));
    let u_residual = y.matmul(u).matmul(&ya).distance(&signs);

    let m = y.matmul(v).matmul(&ya);
    let top = m.block(0, 0, n, n).frobenius_norm();
    let bottom = m.block(n, n, n, n).frobenius_norm();
    if top > BLOCK_TOL || bottom > BLOCK_TOL {
        return Err(SpinError::InvariantViolation(format!(
            "diagonal blocks of y·v·y* are not zero ({top:.3e}, {bottom:.3e})"
        )));
    }
    let w = m.block(0, n, n, n);
    let mut flip = CMatrix::zeros(d, d);
    flip.set_block(0, n, &w);
    flip.set_block(n, 0, &w.adjoint());
    let v_residual = m.distance(&flip);
    let w_unitarity_residual = w.unitarity_residual();

    Ok(PairCanonicalForm {
        n,
        y,
        w,
        u_residual,
        v_residual,
        w_unitarity_residual,
    })
}

/// Perfect shuffle taking `A ⊗ B` (A 2×2, B n×n) to `B ⊗ A` under `P*·(·)·P`.
pub fn perfect_shuffle(n: usize) -> Vec<usize> {
    let mut shuffle = vec![0; 2 * n];
    for b in 0..n {
        for a in 0..2 {
            shuffle[b * 2 + a] = a * n + b;
        }
    }
    shuffle
}

pub fn permutation_matrix(shuffle: &[usize]) -> CMatrix {
    let d = shuffle.len();
    let mut p = CMatrix::zeros(d, d);
    for (j, &i) in shuffle.iter().enumerate() {
        p[(i, j)] = ONE;
    }
    p
}

/// Norm, nilpotency and the unitary reduction of `x = u + iv` to `⊕ g`.
pub fn analyze_x(u: &CMatrix, v: &CMatrix) -> Result<XAnalysis> {
    let cf = canonicalize_pair(u, v)?;
    let n = cf.n;
    let x = u + &v.scale(I);
    let norm = x.op_norm();
    let nilpotency_residual = x.matmul(&x).frobenius_norm();
    let gram = x.adjoint().matmul(&x).hermitian_part();
    let gram_spectrum_residual = eigvalsh(&gram, 1e-9)?
        .into_iter()
        .map(|l| l.abs().min((l - 4.0).abs()))
        .fold(0.0, f64::max);

    // √½·[1 −1; iw* iw*]
    let id = CMatrix::identity(n);
    let iw = cf.w.adjoint().scale(I);
    let block = CMatrix::from_blocks(&[vec![id.clone(), -&id], vec![iw.clone(), iw]])
        .scale_re(std::f64::consts::FRAC_1_SQRT_2);
    let h_unitarity_residual = block.unitarity_residual();
    let h = cf.y.adjoint().matmul(&block);

    let g_neg = CMatrix::from_real(2, 2, &[0.0, -2.0, 0.0, 0.0]);
    let pre_target = kron(&g_neg, &id);
    let pre_shuffle_residual = h.adjoint().matmul(&x).matmul(&h).distance(&pre_target);

    let reduction = NilpotentReduction {
        h,
        shuffle: perfect_shuffle(n),
        block_count: n,
        h_unitarity_residual,
        pre_shuffle_residual,
        reduction_residual: 0.0,
    };
    let big_h = reduction.reducing_unitary();
    let reduced = big_h.adjoint().matmul(&x).matmul(&big_h);
    let reduction_residual = reduced.distance(&kron(&id, &nilpotent_g()));

    Ok(XAnalysis {
        norm,
        nilpotency_residual,
        gram_spectrum_residual,
        reduction: NilpotentReduction {
            reduction_residual,
            ..reduction
        },
    })
}

// ---------------------------------------------------------------------------
// Numerical range of x
// ---------------------------------------------------------------------------

type Pt = (f64, f64);

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise convex hull (monotone chain).
pub(crate) fn convex_hull(mut pts: Vec<Pt>) -> Vec<Pt> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Pt> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Pt> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn segment_distance(p: Pt, a: Pt, b: Pt) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// Distance from `p` to a counter-clockwise convex polygon (zero inside).
pub(crate) fn hull_distance(hull: &[Pt], p: Pt) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => ((p.0 - hull[0].0).powi(2) + (p.1 - hull[0].1).powi(2)).sqrt(),
        _ => {
            let k = hull.len();
            let inside = k >= 3 && (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], p) >= 0.0);
            if inside {
                0.0
            } else {
                (0..k)
                    .map(|i| segment_distance(p, hull[i], hull[(i + 1) % k]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Largest distance from the closed disc of `radius` to the hull of `pts`,
/// tested on a grid of the given resolution plus the boundary circle.
pub fn disc_coverage_gap(pts: &[Pt], radius: f64, resolution: f64) -> f64 {
    let hull = convex_hull(pts.to_vec());
    let mut gap: f64 = 0.0;
    let steps = (2.0 * radius / resolution).ceil() as i64;
    for i in 0..=steps {
        for j in 0..=steps {
            let p = (
                -radius + i as f64 * resolution,
                -radius + j as f64 * resolution,
            );
            if p.0 * p.0 + p.1 * p.1 <= radius * radius {
                gap = gap.max(hull_distance(&hull, p));
            }
        }
    }
    let arcs = (2.0 * std::f64::consts::PI * radius / resolution).ceil() as usize;
    for k in 0..arcs {
        let t = 2.0 * std::f64::consts::PI * k as f64 / arcs as f64;
        gap = gap.max(hull_distance(&hull, (radius * t.cos(), radius * t.sin())));
    }
    gap
}

/// `⟨x·ξ, ξ⟩ = ξ*·x·ξ`.
pub fn quadratic_form(x: &CMatrix, xi: &[C64]) -> C64 {
    vdot(xi, &x.matvec(xi))
}

/// Samples `⟨xξ, ξ⟩` on random unit vectors and compares with the unit disc.
pub fn disc_numerical_range_check(x: &CMatrix, samples: usize, seed: u64) -> DiscCheck {
    let mut rng = rng_from_seed(seed);
    let d = x.rows();
    let mut pts = Vec::with_capacity(samples);
    let mut max_abs: f64 = 0.0;
    for _ in 0..samples {
        let xi = random_unit_vector(&mut rng, d);
        let z = quadratic_form(x, &xi);
        max_abs = max_abs.max(z.norm());
        pts.push((z.re, z.im));
    }
    DiscCheck {
        max_abs,
        coverage_gap: disc_coverage_gap(&pts, 1.0, 0.05),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{haar_unitary, sigma_x, sigma_y, ZERO};
    use crate::spin_construct::pair_from_witness;

    fn unit(d: usize, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; d];
        v[i] = ONE;
        v
    }

    #[test]
    fn canonical_pair_is_fixed() {
        let cf = canonicalize_pair(&sigma_z(), &sigma_x()).unwrap();
        assert_eq!(cf.n, 1);
        assert!((cf.w[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(cf.u_residual < 1e-12 && cf.v_residual < 1e-12);
    }

    #[test]
    fn z_y_pair_reads_minus_i_up_to_phase() {
        let cf = canonicalize_pair(&sigma_z(), &sigma_y()).unwrap();
        // y is diagonal with unit phases; w = −i·(phase ratio)
        let y = &cf.y;
        let expected = -I * y[(0, 0)] * y[(1, 1)].conj();
        assert!((cf.w[(0, 0)] - expected).norm() < 1e-12);
        assert!(cf.v_residual < 1e-12);
    }

    #[test]
    fn witness_round_trip() {
        let w0 = haar_unitary(3, 31);
        let y0 = haar_unitary(6, 32);
        let p = pair_from_witness(3, &w0, &y0).unwrap();
        let cf = canonicalize_pair(p.get(0), p.get(1)).unwrap();
        assert!(cf.u_residual <= 1e-8 && cf.v_residual <= 1e-8);
        assert!(cf.w_unitarity_residual <= 1e-9);
        let again = pair_from_witness(3, &cf.w, &cf.y).unwrap();
        assert!(again.get(0).distance(p.get(0)) <= 1e-8);
        assert!(again.get(1).distance(p.get(1)) <= 1e-8);
    }

    #[test]
    fn non_pair_is_rejected() {
        let err = canonicalize_pair(&sigma_z(), &sigma_z()).unwrap_err();
        assert!(matches!(err, SpinError::InvariantViolation(_)));
    }

    #[test]
    fn pauli_x_is_g() {
        let x = &sigma_x() + &sigma_y().scale(I);
        assert_eq!(x, nilpotent_g());
        let a = analyze_x(&sigma_x(), &sigma_y()).unwrap();
        assert!((a.norm - 2.0).abs() < 1e-12);
        assert!(a.nilpotency_residual < 1e-14);
        assert!(a.reduction.reduction_residual < 1e-12);
    }

    #[test]
    fn pair_in_m6() {
        let p = pair_from_witness(3, &haar_unitary(3, 4), &haar_unitary(6, 8)).unwrap();
        let a = analyze_x(p.get(0), p.get(1)).unwrap();
        assert!((a.norm - 2.0).abs() <= 1e-9);
        assert!(a.nilpotency_residual <= 1e-9);
        assert!(a.gram_spectrum_residual <= 1e-8);
        assert!(a.reduction.h_unitarity_residual <= 1e-12);
        assert!(a.reduction.pre_shuffle_residual <= 1e-8);
        assert!(a.reduction.reduction_residual <= 1e-8);
        assert!(a.reduction.reducing_unitary().unitarity_residual() <= 1e-10);
    }

    #[test]
    fn shuffle_swaps_kron_factors() {
        let n = 3;
        let a = CMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = haar_unitary(n, 1);
        let p = permutation_matrix(&perfect_shuffle(n));
        let lhs = p.adjoint().matmul(&kron(&a, &b)).matmul(&p);
        assert!(lhs.distance(&kron(&b, &a)) < 1e-14);
    }

    #[test]
    fn g_on_first_basis_vector() {
        assert_eq!(quadratic_form(&nilpotent_g(), &unit(2, 0)), ZERO);
    }

    #[test]
    fn g_boundary_parametrization() {
        // ξ = (cos t, e^{iδ} sin t): ⟨gξ,ξ⟩ = 2·e^{iδ}·sin t·cos t, modulus 1 at t = π/4
        let g = nilpotent_g();
        for k in 0..16 {
            let delta = k as f64 * 0.4;
            let t = std::f64::consts::FRAC_PI_4;
            let xi = vec![C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), delta)];
            let z = quadratic_form(&g, &xi);
            assert!((z.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn disc_sampling_of_g() {
        let r = disc_numerical_range_check(&nilpotent_g(), 10_000, 3);
        assert!(r.max_abs <= 1.0 + 1e-9);
        assert!(r.coverage_gap <= 0.05);
    }

    #[test]
    fn hull_distance_basics() {
        let sq = convex_hull(vec![
            (0.0, 0.0),
            (1.0, 0.0),
            (1.0, 1.0),
            (0.0, 1.0),
            (0.5, 0.5),
        ]);
        assert_eq!(sq.len(), 4);
        assert_eq!(hull_distance(&sq, (0.5, 0.5)), 0.0);
        assert!((hull_distance(&sq, (2.0, 0.5)) - 1.0).abs() < 1e-15);
    }
}
