//! Free spectrahedra, the spin ball, numerical ranges, and the Ando-type
//! certificate behind max-ball membership for pairs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::matcore::{
    hermitian_eig, is_psd, kron, max_eig, min_eig, random_hermitian, random_unit_vector,
    rng_from_seed, sigma_z, vdot, CMatrix, C64, I, PSD_TOL,
};
use crate::order_iso::{apply_blockwise, CpMap};
use crate::spin_construct::canonical_spin;

/// Hermitian tolerance for tuple entries.
pub const TUPLE_HERMITIAN_TOL: f64 = 1e-10;
/// Default `θ` grid for the numerical radius.
pub const RADIUS_GRID: usize = 720;
/// Default iteration cap of the Ando solver.
pub const ANDO_MAX_ITER: usize = 20_000;
/// Convergence threshold of the Ando solver.
pub const ANDO_TOL: f64 = 1e-7;
/// Above this residual at the iteration cap the instance is declared infeasible.
pub const ANDO_GIVE_UP: f64 = 1e-6;
/// PSD tolerance for transferred pencils and certificate invariants.
pub const CERT_TOL: f64 = 1e-7;

/// Tuple `(h₁, …, h_m)` of Hermitian `n×n` matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfadjointTuple {
    level: usize,
    mats: Vec<CMatrix>,
}

#[derive(Deserialize)]
struct TupleRepr {
    mats: Vec<CMatrix>,
}

impl<'de> Deserialize<'de> for SelfadjointTuple {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = TupleRepr::deserialize(deserializer)?;
        SelfadjointTuple::new(repr.mats).map_err(serde::de::Error::custom)
    }
}

impl SelfadjointTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| SpinError::BadArity("a tuple needs at least one entry".into()))?;
        let level = first.rows();
        for h in &mats {
            if h.rows() != level || h.cols() != level {
                return Err(SpinError::ShapeMismatch(format!(
                    "tuple entry is {}x{}, expected {level}x{level}",
                    h.rows(),
                    h.cols()
                )));
            }
            let residual = h.hermitian_residual();
            if residual > TUPLE_HERMITIAN_TOL {
                return Err(SpinError::NotHermitian { residual });
            }
        }
        Ok(Self { level, mats })
    }

    pub fn zeros(level: usize, arity: usize) -> Self {
        Self {
            level,
            mats: vec![CMatrix::zeros(level, level); arity],
        }
    }

    /// Level-1 tuple of real scalars.
    pub fn scalars(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&v| CMatrix::from_real(1, 1, &[v]))
                .collect(),
        )
    }

    /// Gaussian Hermitian entries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, level: usize, arity: usize) -> Self {
        Self {
            level,
            mats: (0..arity)
                .map(|_| random_hermitian(rng, level, 1.0))
                .collect(),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            level: self.level,
            mats: self.mats.iter().map(|h| h.scale_re(t)).collect(),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn arity(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }
}

fn check_arity(a: &SelfadjointTuple, h: &SelfadjointTuple) -> Result<()> {
    if a.arity() != h.arity() {
        return Err(SpinError::ArityMismatch {
            expected: a.arity(),
            found: h.arity(),
        });
    }
    Ok(())
}

/// `Σ hⱼ⊗aⱼ`.
fn pencil_sum(a: &SelfadjointTuple, h: &SelfadjointTuple) -> CMatrix {
    let mut out = CMatrix::zeros(h.level * a.level, h.level * a.level);
    for (hj, aj) in h.mats.iter().zip(&a.mats) {
        out = &out + &kron(hj, aj);
    }
    out.hermitian_part()
}

/// `L_a(h) = 1_n⊗1_d − Σ hⱼ⊗aⱼ`.
pub fn pencil_value(a: &SelfadjointTuple, h: &SelfadjointTuple) -> Result<CMatrix> {
    check_arity(a, h)?;
    Ok(&CMatrix::identity(h.level * a.level) - &pencil_sum(a, h))
}

pub fn pencil_min_eig(a: &SelfadjointTuple, h: &SelfadjointTuple) -> Result<f64> {
    min_eig(&pencil_value(a, h)?)
}

pub fn in_spectrahedron(a: &SelfadjointTuple, h: &SelfadjointTuple, tol: f64) -> Result<bool> {
    Ok(is_psd(&pencil_value(a, h)?, tol)?.psd)
}

/// Largest `t` with `L_a(t·h) ⪰ 0`, i.e. `1/λ_max(Σ hⱼ⊗aⱼ)`; infinite when
/// the sum has no positive eigenvalue.
pub fn boundary_scale(a: &SelfadjointTuple, h: &SelfadjointTuple) -> Result<f64> {
    check_arity(a, h)?;
    let top = max_eig(&pencil_sum(a, h))?;
    Ok(if top <= 0.0 { f64::INFINITY } else { 1.0 / top })
}

/// A defining tuple for the spin ball of arity `m`: `(σ_Z)` for `m = 1`,
/// the canonical realization otherwise.
pub fn spin_ball_tuple(m: usize) -> Result<SelfadjointTuple> {
    match m {
        0 => Err(SpinError::BadArity("the spin ball needs m >= 1".into())),
        1 => SelfadjointTuple::new(vec![sigma_z()]),
        _ => SelfadjointTuple::new(canonical_spin(m)?.unitaries().to_vec()),
    }
}

pub fn in_spin_ball(m: usize, h: &SelfadjointTuple, tol: f64) -> Result<bool> {
    if h.arity() != m {
        return Err(SpinError::ArityMismatch {
            expected: m,
            found: h.arity(),
        });
    }
    in_spectrahedron(&spin_ball_tuple(m)?, h, tol)
}

/// `1 ± h ⪰ 0`, the level-`n` condition for a single spin unitary. The
/// verdict does not depend on `u_dim`.
pub fn matrix_range_membership_single(u_dim: usize, h: &CMatrix) -> Result<bool> {
    let _ = u_dim;
    let id = CMatrix::identity(h.rows());
    Ok(is_psd(&(&id + h), PSD_TOL)?.psd && is_psd(&(&id - h), PSD_TOL)?.psd)
}

// ---------------------------------------------------------------------------
// Numerical ranges
// ---------------------------------------------------------------------------

fn real_part_top(y: &CMatrix, theta: f64) -> f64 {
    let rotated = y.scale(C64::from_polar(1.0, theta)).hermitian_part();
    max_eig(&rotated).expect("Hermitian part is Hermitian")
}

/// `max_θ λ_max(Re(e^{iθ}·y))` by grid search and golden-section refinement.
pub fn numerical_radius(y: &CMatrix, grid: usize) -> f64 {
    assert!(y.is_square(), "numerical radius of a non-square matrix");
    let grid = grid.max(3);
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let (best_k, best) = (0..grid)
        .map(|k| (k, real_part_top(y, k as f64 * step)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, p| if p.1 > acc.1 { p } else { acc },
        );

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best_k as f64 * step - step, best_k as f64 * step + step);
    let mut c = hi - golden * (hi - lo);
    let mut d = lo + golden * (hi - lo);
    let (mut fc, mut fd) = (real_part_top(y, c), real_part_top(y, d));
    while hi - lo > 1e-10 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - golden * (hi - lo);
            fc = real_part_top(y, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + golden * (hi - lo);
            fd = real_part_top(y, d);
        }
    }
    best.max(fc).max(fd)
}

/// Samples `(⟨x₁ξ,ξ⟩, …, ⟨x_mξ,ξ⟩)` over uniformly random unit vectors.
pub fn joint_numerical_range_sample(
    xs: &[CMatrix],
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<C64>>> {
    let d = match xs.first() {
        Some(x) => x.rows(),
        None => return Err(SpinError::ShapeMismatch("no matrices to sample".into())),
    };
    if let Some(x) = xs.iter().find(|x| x.rows() != d || x.cols() != d) {
        return Err(SpinError::ShapeMismatch(format!(
            "matrix is {}x{}, expected {d}x{d}",
            x.rows(),
            x.cols()
        )));
    }
    let mut rng = rng_from_seed(seed);
    Ok((0..samples)
        .map(|_| {
            let xi = random_unit_vector(&mut rng, d);
            xs.iter().map(|x| vdot(&xi, &x.matvec(&xi))).collect()
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Ando certificate
// ---------------------------------------------------------------------------

/// `b` with `0 ⪯ b ⪯ 1` and `[[b, y], [y*, 1−b]] ⪰ 0`, `y = (a₁ + i·a₂)/2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AndoCertificate {
    pub b: CMatrix,
    pub y: CMatrix,
    /// `max(0, −λ_min([[b, y], [y*, 1−b]]))`
    pub feasibility_residual: f64,
    pub iterations: usize,
}

impl AndoCertificate {
    /// `[[b, y], [y*, 1−b]]`.
    pub fn block_matrix(&self) -> CMatrix {
        ando_block(&self.b, &self.y)
    }

    /// Unital map on `M₂` with Choi matrix [`Self::block_matrix`]:
    /// `e₁₁ ↦ b`, `e₁₂ ↦ y`, `e₂₁ ↦ y*`, `e₂₂ ↦ 1−b`.
    pub fn to_map(&self) -> Result<CpMap> {
        let m = self.block_matrix();
        let l = self.b.rows();
        CpMap::from_unit_images(2, l, |i, j| m.block(i * l, j * l, l, l))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AndoOutcome {
    Feasible(AndoCertificate),
    Infeasible { residual: f64, iterations: usize },
}

impl AndoOutcome {
    pub fn certificate(&self) -> Option<&AndoCertificate> {
        match self {
            AndoOutcome::Feasible(c) => Some(c),
            AndoOutcome::Infeasible { .. } => None,
        }
    }
}

fn ando_block(b: &CMatrix, y: &CMatrix) -> CMatrix {
    let one_minus = &CMatrix::identity(b.rows()) - b;
    CMatrix::from_blocks(&[vec![b.clone(), y.clone()], vec![y.adjoint(), one_minus]])
}

/// Projection onto `{[[X₁₁, y], [y*, X₂₂]] : X₁₁ + X₂₂ = 1}`.
fn project_affine(x: &CMatrix, y: &CMatrix) -> CMatrix {
    let l = y.rows();
    let x11 = x.block(0, 0, l, l);
    let x22 = x.block(l, l, l, l);
    let excess = (&(&x11 + &x22) - &CMatrix::identity(l)).scale_re(0.5);
    let mut out = CMatrix::zeros(2 * l, 2 * l);
    out.set_block(0, 0, &(&x11 - &excess).hermitian_part());
    out.set_block(0, l, y);
    out.set_block(l, 0, &y.adjoint());
    out.set_block(l, l, &(&x22 - &excess).hermitian_part());
    out
}

/// Projection onto the PSD cone by clipping eigenvalues.
fn project_psd(x: &CMatrix) -> CMatrix {
    let eig = hermitian_eig(&x.hermitian_part(), f64::INFINITY).expect("symmetrized input");
    let n = x.rows();
    let v = &eig.vectors;
    let scaled = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * eig.values[j].max(0.0));
    scaled.matmul(&v.adjoint()).hermitian_part()
}

fn certificate_from(x: &CMatrix, y: &CMatrix, iterations: usize) -> AndoCertificate {
    let l = y.rows();
    let b = project_affine(x, y).block(0, 0, l, l);
    let m = ando_block(&b, y);
    let lowest = min_eig(&m).expect("block matrix is Hermitian");
    AndoCertificate {
        b,
        y: y.clone(),
        feasibility_residual: (-lowest).max(0.0),
        iterations,
    }
}

/// Dykstra alternating projections for `[[b, y], [y*, 1−b]] ⪰ 0`.
pub fn ando_certificate(a1: &CMatrix, a2: &CMatrix, max_iter: usize) -> Result<AndoOutcome> {
    for a in [a1, a2] {
        if !a.is_square() {
            return Err(SpinError::ShapeMismatch(format!(
                "{}x{} is not square",
                a.rows(),
                a.cols()
            )));
        }
        let residual = a.hermitian_residual();
        if residual > TUPLE_HERMITIAN_TOL * a.frobenius_norm().max(1.0) {
            return Err(SpinError::NotHermitian { residual });
        }
    }
    if a1.rows() != a2.rows() {
        return Err(SpinError::ShapeMismatch("a1 and a2 differ in size".into()));
    }
    let l = a1.rows();
    let y = (a1 + &a2.scale(I)).scale_re(0.5);
    let half = CMatrix::identity(l).scale_re(0.5);
    let mut x = ando_block(&half, &y);
    let mut p = CMatrix::zeros(2 * l, 2 * l);
    let mut q = CMatrix::zeros(2 * l, 2 * l);
    for iter in 1..=max_iter {
        let z = project_affine(&(&x + &p), &y);
        p = &(&x + &p) - &z;
        let next = project_psd(&(&z + &q));
        q = &(&z + &q) - &next;
        x = next;

        let on_affine = project_affine(&x, &y);
        if x.distance(&on_affine) <= ANDO_TOL {
            let cert = certificate_from(&x, &y, iter);
            if cert.feasibility_residual <= ANDO_TOL {
                return Ok(AndoOutcome::Feasible(cert));
            }
        }
    }
    let cert = certificate_from(&x, &y, max_iter);
    // b is the certificate, whatever the gap between the last iterates
    let residual = cert.feasibility_residual;
    if residual <= ANDO_GIVE_UP {
        Ok(AndoOutcome::Feasible(cert))
    } else {
        Ok(AndoOutcome::Infeasible {
            residual,
            iterations: max_iter,
        })
    }
}

// ---------------------------------------------------------------------------
// Max ball for pairs
// ---------------------------------------------------------------------------

/// A defining pair with `W(a₁ + i·a₂) ≤ 1` and its certified ucp map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifiedPair {
    pub a: SelfadjointTuple,
    pub radius: f64,
    pub certificate: AndoCertificate,
    pub map: CpMap,
    /// `max(‖ψ(σ_X) − a₁‖_F, ‖ψ(σ_Y) − a₂‖_F)`
    pub span_residual: f64,
}

/// Certification result for one trial pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialCertification {
    pub radius: f64,
    pub certified: Option<CertifiedPair>,
}

/// Certifies each trial: numerical radius of `a₁ + i·a₂` at most 1, an Ando
/// certificate, and the ucp map whose Choi matrix it is.
pub fn certify_trials(
    trials: &[SelfadjointTuple],
    max_iter: usize,
) -> Result<Vec<TrialCertification>> {
    trials
        .iter()
        .map(|a| {
            if a.arity() != 2 {
                return Err(SpinError::ArityMismatch {
                    expected: 2,
                    found: a.arity(),
                });
            }
            let (a1, a2) = (&a.mats[0], &a.mats[1]);
            let radius = numerical_radius(&(a1 + &a2.scale(I)), RADIUS_GRID);
            if radius > 1.0 {
                return Ok(TrialCertification {
                    radius,
                    certified: None,
                });
            }
            let certified = match ando_certificate(a1, a2, max_iter)? {
                AndoOutcome::Feasible(certificate) => {
                    let map = certificate.to_map()?;
                    let span_residual = map
                        .apply(&crate::matcore::sigma_x())?
                        .distance(a1)
                        .max(map.apply(&crate::matcore::sigma_y())?.distance(a2));
                    Some(CertifiedPair {
                        a: a.clone(),
                        radius,
                        certificate,
                        map,
                        span_residual,
                    })
                }
                AndoOutcome::Infeasible { .. } => None,
            };
            Ok(TrialCertification { radius, certified })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub radius: f64,
    pub certified: bool,
    pub ando_residual: Option<f64>,
    pub map_unital_residual: Option<f64>,
    pub map_choi_min_eig: Option<f64>,
    pub map_span_residual: Option<f64>,
    /// `λ_min(L_a(h))`
    pub pencil_min_eig: Option<f64>,
    /// `‖(id⊗ψ)(L_spin(h)) − L_a(h)‖_F`
    pub transfer_residual: Option<f64>,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaxBallReport {
    pub in_spin_ball: bool,
    /// `λ_min(1⊗1 − h₁⊗σ_X − h₂⊗σ_Y)`
    pub spin_min_eig: f64,
    pub trials: Vec<TrialOutcome>,
    pub violations: usize,
}

/// Evaluates `h` against already certified trials.
pub fn maxball_check_m2_certified(
    h: &SelfadjointTuple,
    certs: &[TrialCertification],
) -> Result<MaxBallReport> {
    let spin = spin_ball_tuple(2)?;
    let spin_pencil = pencil_value(&spin, h)?;
    let verdict = is_psd(&spin_pencil, CERT_TOL)?;
    let mut trials = Vec::with_capacity(certs.len());
    for cert in certs {
        let Some(c) = &cert.certified else {
            trials.push(TrialOutcome {
                radius: cert.radius,
                certified: false,
                ando_residual: None,
                map_unital_residual: None,
                map_choi_min_eig: None,
                map_span_residual: None,
                pencil_min_eig: None,
                transfer_residual: None,
                violated: false,
            });
            continue;
        };
        let direct = pencil_value(&c.a, h)?;
        let transferred = apply_blockwise(&spin_pencil, 2, c.a.level, |blk| c.map.apply(blk))?;
        let lowest = min_eig(&direct)?;
        trials.push(TrialOutcome {
            radius: cert.radius,
            certified: true,
            ando_residual: Some(c.certificate.feasibility_residual),
            map_unital_residual: Some(c.map.unital_residual),
            map_choi_min_eig: Some(c.map.choi_min_eig),
            map_span_residual: Some(c.span_residual),
            pencil_min_eig: Some(lowest),
            transfer_residual: Some(transferred.distance(&direct)),
            violated: verdict.psd && lowest < -CERT_TOL,
        });
    }
    let violations = trials.iter().filter(|t| t.violated).count();
    Ok(MaxBallReport {
        in_spin_ball: verdict.psd,
        spin_min_eig: verdict.min_eig,
        trials,
        violations,
    })
}

/// Spin-ball verdict for `h` and, for each certified trial pair `a`, the
/// positivity of `L_a(h)` both directly and through the ucp transfer.
pub fn maxball_check_m2(
    h: &SelfadjointTuple,
    trials: &[SelfadjointTuple],
    max_iter: usize,
) -> Result<MaxBallReport> {
    if h.arity() != 2 {
        return Err(SpinError::ArityMismatch {
            expected: 2,
            found: h.arity(),
        });
    }
    maxball_check_m2_certified(h, &certify_trials(trials, max_iter)?)
}

// ---------------------------------------------------------------------------
// Matrix convexity
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// `‖Σ γₗ*γₗ − 1_n‖_F`
    pub partition_residual: f64,
    pub combined: SelfadjointTuple,
    pub combined_min_eig: f64,
    pub inside: bool,
}

/// Forms `Σ γₗ*·Λₗ·γₗ` and tests membership in `𝒟_{a,n}`.
pub fn matrix_convexity_probe(
    a: &SelfadjointTuple,
    members: &[SelfadjointTuple],
    isometries: &[CMatrix],
    tol: f64,
) -> Result<ConvexityReport> {
    if members.len() != isometries.len() || members.is_empty() {
        return Err(SpinError::ShapeMismatch(format!(
            "{} members but {} maps",
            members.len(),
            isometries.len()
        )));
    }
    let n = isometries[0].cols();
    let mut partition = CMatrix::zeros(n, n);
    let mut combined = vec![CMatrix::zeros(n, n); a.arity()];
    for (member, gamma) in members.iter().zip(isometries) {
        check_arity(a, member)?;
        if gamma.cols() != n || gamma.rows() != member.level {
            return Err(SpinError::ShapeMismatch(format!(
                "map is {}x{}, expected {}x{n}",
                gamma.rows(),
                gamma.cols(),
                member.level
            )));
        }
        let ga = gamma.adjoint();
        partition = &partition + &ga.matmul(gamma);
        for (acc, lam) in combined.iter_mut().zip(&member.mats) {
            *acc = &*acc + &ga.matmul(lam).matmul(gamma);
        }
    }
    let partition_residual = partition.distance(&CMatrix::identity(n));
    if partition_residual > 1e-9 {
        return Err(SpinError::PartitionOfUnityViolated {
            residual: partition_residual,
        });
    }
    let combined =
        SelfadjointTuple::new(combined.into_iter().map(|m| m.hermitian_part()).collect())?;
    let verdict = is_psd(&pencil_value(a, &combined)?, tol)?;
    Ok(ConvexityReport {
        partition_residual,
        combined,
        combined_min_eig: verdict.min_eig,
        inside: verdict.psd,
    })
}
