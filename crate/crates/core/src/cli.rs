//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 usage or input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::checks::{self, SuiteConfig};
use crate::dilation::{dilate_triple, reverse_dilate};
use crate::error::SpinError;
use crate::matcore::{
    haar_unitary_from, max_eig, random_unit_vector_real, rng_from_seed, CMatrix, I,
};
use crate::order_iso::{
    choi_of_triple_map, complete_to_pauli_triple, inverse_map_check, pencil_psd, HermitianPencil,
};
use crate::spectrahedra::{
    ando_certificate, certify_trials, in_spin_ball, joint_numerical_range_sample,
    maxball_check_m2_certified, numerical_radius, pencil_min_eig, spin_ball_tuple, AndoOutcome,
    SelfadjointTuple, ANDO_MAX_ITER, RADIUS_GRID,
};
use crate::spin_construct::{canonical_spin, conjugate, inflate, SpinTuple};
use crate::spin_pairs::{analyze_x, canonicalize_pair};
use crate::spin_verify::{commutant_dim, verify_spin};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Margin below which pencil verdicts are not compared.
const BOUNDARY_MARGIN: f64 = 1e-6;
/// Largest dimension for which `verify` also reports the commutant.
const COMMUTANT_DIM_LIMIT: usize = 16;

#[derive(Parser, Debug)]
#[command(
    name = "spinsys",
    version,
    about = "Spin systems: construction, verification, order structure, dilations and spectrahedra"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "SPINSYS_SEED", default_value_t = 2024)]
    pub seed: u64,
    /// Tolerance override; each command documents its default.
    #[arg(long, global = true, env = "SPINSYS_TOL")]
    pub tol: Option<f64>,
    /// Output file (stdout if absent).
    #[arg(long, global = true, env = "SPINSYS_OUT")]
    pub out: Option<PathBuf>,
    /// Sample count for randomized commands.
    #[arg(long, global = true, env = "SPINSYS_SAMPLES")]
    pub samples: Option<usize>,
    /// Iteration cap of the Ando solver.
    #[arg(long, global = true, env = "SPINSYS_MAX_ITER", default_value_t = ANDO_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the canonical spin tuple of arity m, optionally inflated and conjugated.
    Construct {
        #[arg(long)]
        m: usize,
        /// Inflate by 1_r.
        #[arg(long, default_value_t = 1)]
        inflate: usize,
        /// Conjugate by a seeded Haar unitary.
        #[arg(long)]
        conjugate: bool,
    },
    /// Check the spin axioms of a tuple (default tol 1e-9).
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Block canonical form of a spin pair and the reduction of u + iv.
    CanonicalizePair {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    /// Positivity of one pencil against several realizations (default tol 1e-9).
    PencilCheck {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long = "spin", required = true, num_args = 1..)]
        spins: Vec<PathBuf>,
    },
    /// Choi matrix and Kraus factors of the Pauli-triple map (pairs are completed first).
    Choi {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Stinespring dilation of a spin triple (default tol 1e-8).
    Dilate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Dilate the Pauli triple into the given triple instead.
        #[arg(long)]
        reverse: bool,
    },
    /// Free spectrahedra and numerical ranges.
    #[command(subcommand)]
    Spectra(SpectraCommand),
    /// Run the acceptance checks.
    Suite {
        /// Reduced sample counts.
        #[arg(long)]
        quick: bool,
        /// Run only the named checks (full name or numeric prefix).
        #[arg(long)]
        only: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpectraCommand {
    /// Membership of h in the spectrahedron of a (default tol 1e-9).
    Member {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Membership of h in the spin ball of its arity (default tol 1e-9).
    Spinball {
        #[arg(long)]
        h: PathBuf,
    },
    /// Max-ball test for a pair h against certified defining pairs.
    Maxball2 {
        #[arg(long)]
        h: PathBuf,
        /// JSON list of defining pairs; seeded random pairs if absent.
        #[arg(long)]
        trials: Option<PathBuf>,
        /// Number of random trial pairs.
        #[arg(long, default_value_t = 10)]
        random_trials: usize,
    },
    /// Necessary-condition scan for arity >= 3 over a library of defining tuples.
    Maxscan {
        #[arg(long)]
        h: PathBuf,
        /// JSON list of defining tuples.
        #[arg(long)]
        library: PathBuf,
    },
    /// CSV sample of the joint numerical range of the given matrices.
    Nrange {
        #[arg(long = "x", required = true, num_args = 1..)]
        xs: Vec<PathBuf>,
    },
    /// Ando certificate for a Hermitian pair.
    Ando {
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
    },
}

/// Command failure classes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
}

impl From<SpinError> for Failure {
    fn from(e: SpinError) -> Self {
        match e {
            SpinError::InvalidData(_)
            | SpinError::ShapeMismatch(_)
            | SpinError::ArityMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

/// Rendered output and whether the command's checks passed.
struct Outcome {
    body: String,
    passed: bool,
}

fn json_outcome<T: Serialize>(value: &T, passed: bool) -> CmdResult {
    let mut body =
        serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    body.push('\n');
    Ok(Outcome { body, passed })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("invalid JSON in {}: {e}", path.display())))
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = dispatch(&cli);
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.global, &outcome.body) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            EXIT_FAILURE
        }
    }
}

fn emit(g: &GlobalOpts, body: &str) -> std::io::Result<()> {
    match &g.out {
        Some(path) => std::fs::write(path, body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body.as_bytes())
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Construct {
            m,
            inflate: r,
            conjugate: conj,
        } => construct(g, *m, *r, *conj),
        Command::Verify { input } => verify(g, input),
        Command::CanonicalizePair { u, v } => canonical_pair(u, v),
        Command::PencilCheck { pencil, spins } => pencil_check(g, pencil, spins),
        Command::Choi { input } => choi(g, input),
        Command::Dilate { input, reverse } => dilate(g, input, *reverse),
        Command::Spectra(sub) => spectra(g, sub),
        Command::Suite { quick, only } => suite(g, *quick, only),
    }
}

fn construct(g: &GlobalOpts, m: usize, r: usize, conj: bool) -> CmdResult {
    let mut s = canonical_spin(m)?;
    if r != 1 {
        s = inflate(&s, r)?;
    }
    if conj {
        let q = haar_unitary_from(&mut rng_from_seed(g.seed), s.dim());
        s = conjugate(&s, &q)?;
    }
    json_outcome(&s, true)
}

fn verify(g: &GlobalOpts, input: &Path) -> CmdResult {
    let s: SpinTuple = read_json(input)?;
    let tol = g.tol.unwrap_or(1e-9);
    let report = verify_spin(&s, tol);
    let passed = report.passes(tol);
    let commutant = if s.dim() <= COMMUTANT_DIM_LIMIT {
        Some(commutant_dim(s.unitaries(), s.dim())?)
    } else {
        None
    };
    json_outcome(
        &json!({
            "dim": s.dim(),
            "arity": s.arity(),
            "tol": tol,
            "passes": passed,
            "report": report,
            "commutant_dim": commutant,
        }),
        passed,
    )
}

fn canonical_pair(u: &Path, v: &Path) -> CmdResult {
    let u: CMatrix = read_json(u)?;
    let v: CMatrix = read_json(v)?;
    let form = canonicalize_pair(&u, &v)?;
    let analysis = analyze_x(&u, &v)?;
    json_outcome(
        &json!({ "canonical_form": form, "analysis": analysis }),
        true,
    )
}

fn pencil_check(g: &GlobalOpts, pencil: &Path, spins: &[PathBuf]) -> CmdResult {
    let p: HermitianPencil = read_json(pencil)?;
    let tol = g.tol.unwrap_or(1e-9);
    let mut rows = Vec::new();
    let mut decided: Vec<bool> = Vec::new();
    for path in spins {
        let s: SpinTuple = read_json(path)?;
        s.validate()?;
        let v = pencil_psd(&p, &s, tol)?;
        if v.min_eig.abs() >= BOUNDARY_MARGIN {
            decided.push(v.psd);
        }
        rows.push(json!({
            "realization": path.display().to_string(),
            "dim": s.dim(),
            "psd": v.psd,
            "min_eig": v.min_eig,
        }));
    }
    let consistent = decided.windows(2).all(|w| w[0] == w[1]);
    json_outcome(
        &json!({
            "level": p.level(),
            "arity": p.arity(),
            "tol": tol,
            "boundary_margin": BOUNDARY_MARGIN,
            "consistent": consistent,
            "realizations": rows,
        }),
        consistent,
    )
}

fn choi(g: &GlobalOpts, input: &Path) -> CmdResult {
    let s: SpinTuple = read_json(input)?;
    s.validate()?;
    let triple = if s.arity() == 2 {
        complete_to_pauli_triple(&s)?
    } else {
        s
    };
    let map = choi_of_triple_map(&triple)?;
    let kraus = map.kraus.clone().unwrap_or_default();
    let inverse = inverse_map_check(&triple, &kraus, g.samples.unwrap_or(50), g.seed)?;
    let tol = g.tol.unwrap_or(1e-8);
    let passed = map.choi_min_eig >= -1e-9
        && map.kraus_residual.is_some_and(|r| r <= tol)
        && inverse.identity_residual <= tol;
    json_outcome(
        &json!({ "map": map, "kraus_rank": kraus.len(), "inverse": inverse, "tol": tol }),
        passed,
    )
}

fn dilate(g: &GlobalOpts, input: &Path, reverse: bool) -> CmdResult {
    let s: SpinTuple = read_json(input)?;
    s.validate()?;
    let d = if reverse {
        reverse_dilate(&s)?
    } else {
        dilate_triple(&s)?
    };
    let tol = g.tol.unwrap_or(1e-8);
    let passed = d.max_residual() <= tol && d.isometry_residual <= 1e-9;
    json_outcome(
        &json!({ "reverse": reverse, "tol": tol, "dilation": d }),
        passed,
    )
}

fn spectra(g: &GlobalOpts, sub: &SpectraCommand) -> CmdResult {
    let tol = g.tol.unwrap_or(1e-9);
    match sub {
        SpectraCommand::Member { a, h } => {
            let a: SelfadjointTuple = read_json(a)?;
            let h: SelfadjointTuple = read_json(h)?;
            let lowest = pencil_min_eig(&a, &h)?;
            let inside = crate::spectrahedra::in_spectrahedron(&a, &h, tol)?;
            json_outcome(
                &json!({ "inside": inside, "min_eig": lowest, "tol": tol }),
                true,
            )
        }
        SpectraCommand::Spinball { h } => {
            let h: SelfadjointTuple = read_json(h)?;
            let m = h.arity();
            let inside = in_spin_ball(m, &h, tol)?;
            let lowest = pencil_min_eig(&spin_ball_tuple(m)?, &h)?;
            json_outcome(
                &json!({ "m": m, "inside": inside, "min_eig": lowest, "tol": tol }),
                true,
            )
        }
        SpectraCommand::Maxball2 {
            h,
            trials,
            random_trials,
        } => {
            let h: SelfadjointTuple = read_json(h)?;
            let trials: Vec<SelfadjointTuple> = match trials {
                Some(path) => read_json(path)?,
                None => {
                    let mut rng = rng_from_seed(g.seed);
                    (0..*random_trials)
                        .map(|k| {
                            use rand::Rng;
                            let radius = rng.random_range(0.3..0.95);
                            checks::random_pair_with_radius(&mut rng, 2 + k % 2, radius)
                        })
                        .collect()
                }
            };
            if h.arity() != 2 {
                return Err(Failure::Usage(format!(
                    "maxball2 needs a pair, got arity {}",
                    h.arity()
                )));
            }
            let certs = certify_trials(&trials, g.max_iter)?;
            let report = maxball_check_m2_certified(&h, &certs)?;
            let passed = report.violations == 0;
            json_outcome(&report, passed)
        }
        SpectraCommand::Maxscan { h, library } => {
            let h: SelfadjointTuple = read_json(h)?;
            let library: Vec<SelfadjointTuple> = read_json(library)?;
            let mut rng = rng_from_seed(g.seed);
            let directions = g.samples.unwrap_or(2000);
            let mut rows = Vec::new();
            let mut all = true;
            for a in &library {
                // sampled support function of the scalar range; evidence only
                let mut support: f64 = f64::NEG_INFINITY;
                for _ in 0..directions {
                    let c = random_unit_vector_real(&mut rng, a.arity());
                    let combo = a
                        .mats()
                        .iter()
                        .zip(&c)
                        .fold(CMatrix::zeros(a.level(), a.level()), |acc, (m, &w)| {
                            &acc + &m.scale_re(w)
                        });
                    support = support.max(max_eig(&combo)?);
                }
                let lowest = pencil_min_eig(a, &h)?;
                all &= lowest >= -tol;
                rows.push(json!({ "sampled_support_max": support, "pencil_min_eig": lowest }));
            }
            json_outcome(
                &json!({
                    "kind": "necessary condition only; library tuples are not certified",
                    "passes_library": all,
                    "tuples": rows,
                }),
                true,
            )
        }
        SpectraCommand::Nrange { xs } => {
            let mats: Vec<CMatrix> = xs.iter().map(|p| read_json(p)).collect::<Result<_, _>>()?;
            let samples = g.samples.unwrap_or(10_000);
            let pts = joint_numerical_range_sample(&mats, samples, g.seed)?;
            let mut body = String::new();
            let header: Vec<String> = (1..=mats.len())
                .flat_map(|j| [format!("re_{j}"), format!("im_{j}")])
                .collect();
            body.push_str(&header.join(","));
            body.push('\n');
            for p in &pts {
                let cells: Vec<String> = p
                    .iter()
                    .flat_map(|z| [format!("{:e}", z.re), format!("{:e}", z.im)])
                    .collect();
                let _ = writeln!(body, "{}", cells.join(","));
            }
            Ok(Outcome { body, passed: true })
        }
        SpectraCommand::Ando { a1, a2 } => {
            let a1: CMatrix = read_json(a1)?;
            let a2: CMatrix = read_json(a2)?;
            let outcome = ando_certificate(&a1, &a2, g.max_iter)?;
            let radius = numerical_radius(&(&a1 + &a2.scale(I)), RADIUS_GRID);
            let feasible = matches!(outcome, AndoOutcome::Feasible(_));
            json_outcome(
                &json!({ "numerical_radius": radius, "outcome": outcome }),
                feasible,
            )
        }
    }
}

fn suite(g: &GlobalOpts, quick: bool, only: &[String]) -> CmdResult {
    let cfg = SuiteConfig {
        seed: g.seed,
        quick,
        max_iter: g.max_iter,
    };
    let results = if only.is_empty() {
        checks::run_suite(&cfg)
    } else {
        let mut rs = Vec::new();
        for name in only {
            match checks::run_check(name, &cfg) {
                Some(r) => rs.push(r),
                None => {
                    return Err(Failure::Usage(format!(
                        "unknown check '{name}' (see --help)"
                    )))
                }
            }
        }
        rs.sort_by(|a, b| a.name.cmp(&b.name));
        rs
    };
    for r in &results {
        eprintln!("{}", r.summary());
    }
    let passed = results.iter().all(|r| r.passed && r.within_budget());
    json_outcome(
        &json!({ "seed": g.seed, "quick": quick, "passed": passed, "checks": results }),
        passed,
    )
}
