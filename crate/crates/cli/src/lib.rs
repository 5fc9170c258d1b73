//! The `symmwave` command set: every numerical suite in this workspace behind
//! one binary, reading plain-text root-system spec files and writing CSV or
//! JSON artifacts plus pass/fail verification reports.
//!
//! Exit status is 0 when a command succeeds (and, for verification commands,
//! every check passes), 1 when a verification criterion fails, and 2 on usage
//! errors, which carry a one-line diagnostic on standard error.  All sampling
//! derives from `--seed`, threaded sweeps merge in input order, and reports
//! carry no timestamps, so reruns are byte-identical; long sweeps print
//! progress to standard error only, keeping the data streams clean.

// Flag validation uses `!(x > 0.0)` deliberately: unlike `x <= 0.0` it also
// rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod io;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use symmwave_core::chamber::{
    dual_basis, support_properties_check, ChamberError, Partition,
};
use symmwave_core::geom::Vector;
use symmwave_core::kernels::{
    decay_fit, oscillatory_i, poisson_kernel, wave_kernel_infty, wave_kernel_tilde0,
    EvalContext, KernelError, KernelQuery, QuadratureResult, Regime,
};
use symmwave_core::parametrix::{
    a_tau_leading, cancellation_check, lemma_b1_spotcheck, lemma_b2_check, transport_residual,
    uk_recursion, ParametrixError, RadialGrid,
};
use symmwave_core::plancherel::{PlancherelDensity, PlancherelError};
use symmwave_core::rootsys::{dims, half_sum_rho, weyl_group, RootSysError, RootSystem};
use symmwave_core::sampling::{rng_for, shell_vector};
use symmwave_core::strichartz::{
    exponent_family, is_admissible, sigma_pq, sigma_required, StrichartzError,
};

use io::{csv, emit, fmt_full, load_system, log_spaced, parallel_map};

/// A usage-level failure: one-line diagnostic on standard error, exit 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! usage_from {
    ($($ty:ty),* $(,)?) => {$(
        impl From<$ty> for UsageError {
            fn from(e: $ty) -> Self {
                UsageError(e.to_string())
            }
        }
    )*};
}
usage_from!(
    RootSysError,
    ChamberError,
    PlancherelError,
    KernelError,
    ParametrixError,
    StrichartzError,
    std::io::Error,
);

#[derive(Debug, Parser)]
#[command(
    name = "symmwave",
    version,
    about = "Wave kernels, Strichartz exponents, and verification suites on noncompact symmetric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Root-system inspection
    #[command(subcommand)]
    Rootsys(RootsysCmd),
    /// Chamber partition of unity and its constants ledger
    #[command(subcommand)]
    Chamber(ChamberCmd),
    /// Plancherel density evaluation
    #[command(subcommand)]
    Plancherel(PlancherelCmd),
    /// Subordinated wave kernels and decay-rate fits
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Hadamard parametrix tables and transport/cutoff identity checks
    #[command(subcommand)]
    Parametrix(ParametrixCmd),
    /// Admissible pairs and the data-regularity exponent σ(p, q)
    #[command(subcommand)]
    Strichartz(StrichartzCmd),
    /// Global well-posedness exponent calculators
    #[command(subcommand)]
    Gwp(GwpCmd),
    /// Verification suites
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Debug, Args)]
struct SystemArgs {
    /// Root-system spec: a file path or an inline `CATALOG[:MULTS]` descriptor
    #[arg(long)]
    system: String,
    /// Output file (atomic overwrite); standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output file (atomic overwrite); standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum RootsysCmd {
    /// JSON summary: dimensions, ρ, Weyl order, positive roots
    Info(SystemArgs),
}

#[derive(Debug, Subcommand)]
enum ChamberCmd {
    /// JSON report: constants ledger, dual basis, partition residual, support sampling
    Verify {
        #[command(flatten)]
        sys: SystemArgs,
        /// Partition residual samples (support sampling uses the same count per system)
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum PlancherelCmd {
    /// CSV of |c(λ)|⁻² and its per-root factors; repeat --lambda for more rows
    Eval {
        #[command(flatten)]
        sys: SystemArgs,
        /// λ coordinates, comma-separated; repeatable
        #[arg(long, required = true, allow_hyphen_values = true)]
        lambda: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelKind {
    /// Poisson kernel at τ = s − it
    Poisson,
    /// damped oscillatory integral I(s, t, x⁺)
    I,
    /// subordinated piece ω̃^{σ,0}
    Tilde0,
    /// subordinated piece ω^{σ,∞}
    Infty,
}

impl KernelKind {
    fn as_str(self) -> &'static str {
        match self {
            KernelKind::Poisson => "poisson",
            KernelKind::I => "i",
            KernelKind::Tilde0 => "tilde0",
            KernelKind::Infty => "infty",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Minus,
    Plus,
    Full,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Minus => Regime::Minus,
            RegimeArg::Plus => Regime::Plus,
            RegimeArg::Full => Regime::Full,
        }
    }
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[command(flatten)]
    sys: SystemArgs,
    /// Which kernel to evaluate
    #[arg(long, value_enum)]
    kind: KernelKind,
    /// σ as `re` or `re,im` (kinds tilde0 and infty)
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Damping s > 0 (kind i), or Re τ (kind poisson)
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    /// Radial position x⁺, comma-separated coordinates (default: origin)
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Klein–Gordon shift κ replacing the wave value |ρ| (kinds tilde0/infty)
    #[arg(long)]
    kappa: Option<f64>,
    /// Frequency regime for kind i
    #[arg(long, value_enum, default_value_t = RegimeArg::Full)]
    regime: RegimeArg,
    #[arg(long, default_value_t = 0.05)]
    t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    /// Number of logarithmically spaced t samples
    #[arg(long, default_value_t = 12)]
    points: usize,
    /// Inversion constant C₀ multiplying the kernel
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    /// Integrand evaluation cap per point
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Relative quadrature tolerance per point
    #[arg(long, default_value_t = 1e-6)]
    quad_tol: f64,
}

#[derive(Debug, Subcommand)]
enum KernelCmd {
    /// CSV sweep over t: columns t, re, im, abs, abs_error
    Eval(KernelArgs),
    /// Same sweep plus a log-log decay fit; appends a JSON footer and
    /// exits 1 when |exponent − target| > tol
    Decay {
        #[command(flatten)]
        args: KernelArgs,
        /// Expected decay exponent of |kernel| in t
        #[arg(long, allow_negative_numbers = true)]
        target: f64,
        /// Allowed deviation of the fitted exponent
        #[arg(long, default_value_t = 0.15)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
enum ParametrixCmd {
    /// CSV of ω and U₀…U_K along a chamber ray: columns h_i, omega, u_k
    Table {
        #[command(flatten)]
        sys: SystemArgs,
        /// Truncation order (K ≥ 1 needs a rank-one system)
        #[arg(long = "K", value_name = "K")]
        k: usize,
        /// Radial grid as `h:n` — spacing h, n nodes at radii (i+½)h
        #[arg(long)]
        grid: String,
        /// Ray direction, comma-separated (default: chamber interior direction)
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
    },
    /// JSON report: cancellation sums, transport residual (rank one),
    /// cutoff-lemma identities, Poisson cross-check (H³)
    Checks {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Integrand evaluation cap for the Poisson cross-check
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

#[derive(Debug, Subcommand)]
enum StrichartzCmd {
    /// Is (p, q) an admissible pair in dimension d?  Single-line JSON
    Admissible {
        #[arg(long)]
        d: u32,
        /// Time exponent p ∈ [2, ∞]; pass `inf` for ∞
        #[arg(long)]
        p: f64,
        /// Space exponent q ∈ [2, ∞)
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Data regularity σ(p, q) on the extended square; single-line JSON
    Sigma {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Subcommand)]
enum GwpCmd {
    /// The exponent family γ_c, γ₀, γ₁, γ₂, γ₃; single-line JSON
    Exponents {
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Regularity threshold σ(γ) of the well-posedness table; single-line JSON
    Sigma {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// Run the full acceptance suite (criteria 1–13) and report pass/fail
    All {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Integrand evaluation cap for the kernel criteria
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

/// Parse argv and execute; returns the process exit status.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("symmwave: {msg}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, UsageError> {
    match cli.command {
        Command::Rootsys(RootsysCmd::Info(a)) => rootsys_info(&a),
        Command::Chamber(ChamberCmd::Verify { sys, samples, seed }) => {
            chamber_verify(&sys, samples, seed)
        }
        Command::Plancherel(PlancherelCmd::Eval { sys, lambda }) => {
            plancherel_eval(&sys, &lambda)
        }
        Command::Kernel(KernelCmd::Eval(args)) => kernel_eval(&args),
        Command::Kernel(KernelCmd::Decay { args, target, tol }) => {
            kernel_decay(&args, target, tol)
        }
        Command::Parametrix(ParametrixCmd::Table {
            sys,
            k,
            grid,
            direction,
        }) => parametrix_table(&sys, k, &grid, direction.as_deref()),
        Command::Parametrix(ParametrixCmd::Checks { sys, seed, budget }) => {
            parametrix_checks(&sys, seed, budget)
        }
        Command::Strichartz(StrichartzCmd::Admissible { d, p, q, out }) => {
            strichartz_admissible(d, p, q, out.out.as_deref())
        }
        Command::Strichartz(StrichartzCmd::Sigma { d, p, q, out }) => {
            strichartz_sigma(d, p, q, out.out.as_deref())
        }
        Command::Gwp(GwpCmd::Exponents { d, out }) => gwp_exponents(d, out.out.as_deref()),
        Command::Gwp(GwpCmd::Sigma { d, gamma, out }) => gwp_sigma(d, gamma, out.out.as_deref()),
        Command::Verify(VerifyCmd::All { seed, budget, out }) => {
            verify_all(seed, budget, out.out.as_deref())
        }
    }
}

// ---------------------------------------------------------------------------
// shared parsing and serialization helpers
// ---------------------------------------------------------------------------

fn to_json<T: Serialize>(v: &T) -> Result<String, UsageError> {
    serde_json::to_string(v).map_err(|e| UsageError(format!("JSON encoding failed: {e}")))
}

fn parse_vector(spec: &str, rank: usize) -> Result<Vector, UsageError> {
    let coords: Result<Vec<f64>, _> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect();
    match coords {
        Ok(c) if c.len() == rank && c.iter().all(|x| x.is_finite()) => Ok(Vector::new(c)),
        Ok(c) => Err(UsageError(format!(
            "vector {spec:?} has {} coordinates, the system has rank {rank}",
            c.len()
        ))),
        Err(e) => Err(UsageError(format!("cannot parse vector {spec:?}: {e}"))),
    }
}

fn parse_complex(spec: &str) -> Result<Complex64, UsageError> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = |e: std::num::ParseFloatError| UsageError(format!("cannot parse {spec:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.parse().map_err(bad)?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.parse().map_err(bad)?,
            im.parse().map_err(bad)?,
        )),
        _ => Err(UsageError(format!(
            "complex number {spec:?} must be `re` or `re,im`"
        ))),
    }
}

fn parse_grid(spec: &str) -> Result<(f64, usize), UsageError> {
    let err = || {
        UsageError(format!(
            "grid {spec:?} must be `h:n` (spacing and node count), e.g. 1e-3:2000"
        ))
    };
    let (h, n) = spec.split_once(':').ok_or_else(err)?;
    let h: f64 = h.trim().parse().map_err(|_| err())?;
    let n: usize = n.trim().parse().map_err(|_| err())?;
    Ok((h, n))
}

/// Finite numbers stay numbers; infinities serialize as the string "inf",
/// which plain JSON cannot carry as a number.
#[derive(Serialize)]
#[serde(untagged)]
enum JsonExponent {
    Finite(f64),
    Infinite(&'static str),
}

fn json_exponent(x: f64) -> JsonExponent {
    if x.is_finite() {
        JsonExponent::Finite(x)
    } else {
        JsonExponent::Infinite("inf")
    }
}

// ---------------------------------------------------------------------------
// rootsys info
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RootJson {
    vector: Vec<f64>,
    mult: u32,
    reduced: bool,
}

#[derive(Serialize)]
struct RootsysInfoJson {
    label: String,
    catalog: String,
    rank: usize,
    dimension: u32,
    pseudo_dimension: u32,
    rho: Vec<f64>,
    rho_norm: f64,
    weyl_order: usize,
    simple_roots: Vec<Vec<f64>>,
    positive_roots: Vec<RootJson>,
}

fn rootsys_info(a: &SystemArgs) -> Result<i32, UsageError> {
    let rs = load_system(&a.system)?;
    let (d, big_d) = dims(&rs);
    let rho = half_sum_rho(&rs);
    let w = weyl_group(&rs)?;
    let info = RootsysInfoJson {
        label: rs.label.clone(),
        catalog: rs.catalog.to_string(),
        rank: rs.rank,
        dimension: d,
        pseudo_dimension: big_d,
        rho: rho.coords.clone(),
        rho_norm: rho.norm(),
        weyl_order: w.order(),
        simple_roots: rs
            .simple_roots()
            .iter()
            .map(|v| v.coords.clone())
            .collect(),
        positive_roots: rs
            .positive_roots
            .iter()
            .map(|r| RootJson {
                vector: r.vector.coords.clone(),
                mult: r.mult,
                reduced: r.is_reduced,
            })
            .collect(),
    };
    emit(a.out.as_deref(), &(to_json(&info)? + "\n"))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// chamber verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ConstantsJson {
    c1: f64,
    c2: f64,
    c3: f64,
    c3_raw: f64,
    c4: f64,
    c5: f64,
    c_sigma: f64,
    l1: u32,
    l2: f64,
    m1: f64,
    m2: f64,
}

#[derive(Serialize)]
struct LedgerJson {
    c4_positive: bool,
    c5_positive: bool,
    c1_below_c2: bool,
    c_sigma_exact: bool,
    pass: bool,
}

#[derive(Serialize)]
struct ResidualJson {
    samples: usize,
    max_residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SupportJson {
    samples_per_tile: usize,
    checked: usize,
    attempts: usize,
    violations: usize,
    pass: bool,
}

#[derive(Serialize)]
struct ChamberReportJson {
    system: String,
    constants: ConstantsJson,
    ledger: LedgerJson,
    dual_basis: ResidualJson,
    partition: ResidualJson,
    support: SupportJson,
    pass: bool,
}

fn chamber_verify(a: &SystemArgs, samples: usize, seed: u64) -> Result<i32, UsageError> {
    let rs = load_system(&a.system)?;
    let p = Partition::new(&rs)?;
    let c = &p.consts;

    let ledger = {
        let exact = c.c_sigma == (c.c5 / (2.0 * c.m2)).min(0.5);
        let (c4p, c5p, c12) = (c.c4 > 0.0, c.c5 > 0.0, c.c1 < c.c2);
        LedgerJson {
            c4_positive: c4p,
            c5_positive: c5p,
            c1_below_c2: c12,
            c_sigma_exact: exact,
            pass: c4p && c5p && c12 && exact,
        }
    };

    let db = dual_basis(&rs)?;
    let mut db_res = 0.0f64;
    for (j, alpha) in rs.simple_roots().iter().enumerate() {
        for (k, l) in db.lambdas.iter().enumerate() {
            let want = if j == k { 1.0 } else { 0.0 };
            db_res = db_res.max((alpha.dot(l) - want).abs());
        }
    }
    let dual = ResidualJson {
        samples: rs.rank * rs.rank,
        max_residual: db_res,
        tolerance: 1e-12,
        pass: db_res <= 1e-12,
    };

    let mut rng = rng_for(seed, &format!("chamber-verify-{}", rs.label));
    let mut part_res = 0.0f64;
    for _ in 0..samples {
        let lam = shell_vector(&mut rng, rs.rank, 0.1, 10.0);
        let sum: f64 = p
            .tiles()
            .map(|t| p.chi(t, &lam).expect("valid tile"))
            .sum();
        part_res = part_res.max((sum - 1.0).abs());
    }
    let partition = ResidualJson {
        samples,
        max_residual: part_res,
        tolerance: 1e-10,
        pass: part_res <= 1e-10,
    };

    let tiles: Vec<_> = p.tiles().collect();
    let per_tile = samples.div_ceil(tiles.len()).max(1);
    let reports = parallel_map(&tiles, |&tile| {
        support_properties_check(&p, tile, per_tile, seed)
    });
    let support = SupportJson {
        samples_per_tile: per_tile,
        checked: reports.iter().map(|r| r.checked).sum(),
        attempts: reports.iter().map(|r| r.attempts).sum(),
        violations: reports.iter().map(|r| r.violations.len()).sum(),
        pass: reports.iter().all(|r| r.violations.is_empty()),
    };

    let pass = ledger.pass && dual.pass && partition.pass && support.pass;
    let report = ChamberReportJson {
        system: rs.label.clone(),
        constants: ConstantsJson {
            c1: c.c1,
            c2: c.c2,
            c3: c.c3,
            c3_raw: c.c3_raw,
            c4: c.c4,
            c5: c.c5,
            c_sigma: c.c_sigma,
            l1: c.l1,
            l2: c.l2,
            m1: c.m1,
            m2: c.m2,
        },
        ledger,
        dual_basis: dual,
        partition,
        support,
        pass,
    };
    emit(a.out.as_deref(), &(to_json(&report)? + "\n"))?;
    Ok(if pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// plancherel eval
// ---------------------------------------------------------------------------

fn plancherel_eval(a: &SystemArgs, lambdas: &[String]) -> Result<i32, UsageError> {
    let rs = load_system(&a.system)?;
    let pd = PlancherelDensity::new(&rs)?;
    let nf = pd.factors().len();
    let mut header: Vec<String> = (1..=rs.rank).map(|i| format!("lambda_{i}")).collect();
    header.push("density".into());
    header.extend((1..=nf).map(|i| format!("factor_{i}")));
    let mut rows = Vec::with_capacity(lambdas.len());
    for spec in lambdas {
        let lam = parse_vector(spec, rs.rank)?;
        let mut row: Vec<String> = lam.coords.iter().copied().map(fmt_full).collect();
        row.push(fmt_full(pd.density(&lam)));
        for (idx, f) in pd.factors().iter().enumerate() {
            row.push(fmt_full(pd.c_alpha_inv_sq(idx, f.root.dot(&lam))));
        }
        rows.push(row);
    }
    emit(a.out.as_deref(), &csv(&header, &rows))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// kernel eval / decay
// ---------------------------------------------------------------------------

fn kernel_sweep(args: &KernelArgs) -> Result<(Vec<f64>, Vec<QuadratureResult>), UsageError> {
    let rs = load_system(&args.sys.system)?;
    let pd = PlancherelDensity::new(&rs)?;
    let ctx = EvalContext {
        c0: args.c0,
        budget: args.budget,
        rel_tol: args.quad_tol,
    };
    let x = match &args.x {
        Some(s) => parse_vector(s, rs.rank)?,
        None => Vector::zeros(rs.rank),
    };
    if !(args.t_min > 0.0) || !(args.t_max >= args.t_min) || args.points == 0 {
        return Err(UsageError(format!(
            "need 0 < --t-min ≤ --t-max and --points ≥ 1, got [{}, {}] × {}",
            args.t_min, args.t_max, args.points
        )));
    }
    let sigma = match &args.sigma {
        Some(s) => Some(parse_complex(s)?),
        None => None,
    };
    if matches!(args.kind, KernelKind::Tilde0 | KernelKind::Infty) && sigma.is_none() {
        return Err(UsageError(format!(
            "kernel kind {} needs --sigma",
            args.kind.as_str()
        )));
    }
    let ts = log_spaced(args.t_min, args.t_max, args.points);
    let n = ts.len();
    let done = AtomicUsize::new(0);
    let results: Vec<Result<QuadratureResult, UsageError>> = parallel_map(&ts, |&t| {
        let r = match args.kind {
            KernelKind::Poisson => {
                poisson_kernel(&rs, &pd, &ctx, Complex64::new(args.s, -t), &x)
                    .map_err(UsageError::from)
            }
            KernelKind::I => oscillatory_i(&rs, &pd, &ctx, args.s, t, &x, args.regime.into())
                .map_err(UsageError::from),
            KernelKind::Tilde0 | KernelKind::Infty => {
                let q = KernelQuery {
                    sigma: sigma.expect("checked above"),
                    t,
                    x_plus: x.clone(),
                    kg_kappa: args.kappa,
                };
                match args.kind {
                    KernelKind::Tilde0 => wave_kernel_tilde0(&rs, &pd, &ctx, &q),
                    _ => wave_kernel_infty(&rs, &pd, &ctx, &q),
                }
                .map_err(UsageError::from)
            }
        };
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if n >= 8 {
            eprintln!("kernel {}: {k}/{n} points done", args.kind.as_str());
        }
        r
    });
    let mut vals = Vec::with_capacity(n);
    for r in results {
        vals.push(r?);
    }
    Ok((ts, vals))
}

fn kernel_csv(ts: &[f64], vals: &[QuadratureResult]) -> String {
    let header: Vec<String> = ["t", "re", "im", "abs", "abs_error"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = ts
        .iter()
        .zip(vals)
        .map(|(&t, v)| {
            vec![
                fmt_full(t),
                fmt_full(v.value.re),
                fmt_full(v.value.im),
                fmt_full(v.value.norm()),
                fmt_full(v.abs_error_estimate),
            ]
        })
        .collect();
    csv(&header, &rows)
}

fn kernel_eval(args: &KernelArgs) -> Result<i32, UsageError> {
    let (ts, vals) = kernel_sweep(args)?;
    emit(args.sys.out.as_deref(), &kernel_csv(&ts, &vals))?;
    Ok(0)
}

#[derive(Serialize)]
struct DecayFooter {
    exponent: f64,
    r2: f64,
    target: f64,
    tolerance: f64,
    pass: bool,
}

fn kernel_decay(args: &KernelArgs, target: f64, tol: f64) -> Result<i32, UsageError> {
    let (ts, vals) = kernel_sweep(args)?;
    let series: Vec<(f64, f64)> = ts
        .iter()
        .zip(&vals)
        .map(|(&t, v)| (t, v.value.norm()))
        .collect();
    let fit = decay_fit(&series)?;
    let footer = DecayFooter {
        exponent: fit.exponent,
        r2: fit.r_squared,
        target,
        tolerance: tol,
        pass: (fit.exponent - target).abs() <= tol,
    };
    let content = kernel_csv(&ts, &vals) + &to_json(&footer)? + "\n";
    emit(args.sys.out.as_deref(), &content)?;
    Ok(if footer.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// parametrix table / checks
// ---------------------------------------------------------------------------

fn parametrix_table(
    a: &SystemArgs,
    k: usize,
    grid: &str,
    direction: Option<&str>,
) -> Result<i32, UsageError> {
    let rs = load_system(&a.system)?;
    let (h, n) = parse_grid(grid)?;
    let dir = match direction {
        Some(s) => parse_vector(s, rs.rank)?,
        None => rs.chamber_interior_direction(),
    };
    let grid = RadialGrid::along_ray(&rs, &dir, h, n)?;
    let table = uk_recursion(&rs, &grid, k)?;
    let mut header: Vec<String> = (1..=rs.rank).map(|i| format!("h_{i}")).collect();
    header.push("omega".into());
    header.extend((0..=table.k_max).map(|kk| format!("u_{kk}")));
    let rows: Vec<Vec<String>> = table
        .grid
        .radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let pt = table.grid.direction.scale(r);
            let mut row: Vec<String> = pt.coords.iter().copied().map(fmt_full).collect();
            row.push(fmt_full(table.omega[i]));
            row.extend((0..=table.k_max).map(|kk| fmt_full(table.u[kk][i])));
            row
        })
        .collect();
    emit(a.out.as_deref(), &csv(&header, &rows))?;
    Ok(0)
}

#[derive(Serialize)]
struct CancellationJson {
    points: usize,
    max_abs: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TransportJson {
    h: f64,
    residual: f64,
    tolerance: f64,
    refined_residual: f64,
    halving_ratio: f64,
    pass: bool,
}

#[derive(Serialize)]
struct LemmaB2Json {
    pairs: usize,
    max_rel_gap: f64,
    tolerance: f64,
    exact_at_one: bool,
    pass: bool,
}

#[derive(Serialize)]
struct LemmaB1Json {
    cases: usize,
    min_ratio: f64,
    max_ratio: f64,
    window: (f64, f64),
    pass: bool,
}

#[derive(Serialize)]
struct ATauJson {
    tau: (f64, f64),
    radius: f64,
    rel_gap: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ParametrixChecksJson {
    system: String,
    cancellations: CancellationJson,
    transport: Option<TransportJson>,
    lemma_b2: LemmaB2Json,
    lemma_b1: LemmaB1Json,
    poisson_cross_check: Option<ATauJson>,
    pass: bool,
}

/// Seeded interior chamber point: rejection-sample a shell vector until every
/// positive root pairs above the margin.
fn chamber_point(
    rs: &RootSystem,
    rng: &mut symmwave_core::sampling::ChaCha12Rng,
    margin: f64,
) -> Vector {
    loop {
        let h = shell_vector(rng, rs.rank, 0.5, 5.0);
        if rs
            .positive_roots
            .iter()
            .all(|r| r.vector.dot(&h) >= margin)
        {
            return h;
        }
    }
}

fn parametrix_checks(a: &SystemArgs, seed: u64, budget: u64) -> Result<i32, UsageError> {
    let rs = load_system(&a.system)?;

    let mut rng = rng_for(seed, &format!("parametrix-checks-{}", rs.label));
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let h = chamber_point(&rs, &mut rng, 1e-2);
        let (r1, r2) = cancellation_check(&rs, &h)?;
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    let cancellations = CancellationJson {
        points: 100,
        max_abs: worst,
        tolerance: 1e-9,
        pass: worst <= 1e-9,
    };

    let transport = if rs.rank == 1 {
        let dir = rs.chamber_interior_direction();
        let res_at = |h: f64| -> Result<f64, UsageError> {
            let n = (2.0 / h).round() as usize;
            let grid = RadialGrid::along_ray(&rs, &dir, h, n)?;
            let table = uk_recursion(&rs, &grid, 1)?;
            Ok(transport_residual(&rs, &table, 0)?)
        };
        let coarse = res_at(1e-3)?;
        let fine = res_at(5e-4)?;
        let ratio = coarse / fine;
        // the ≈4× halving window only applies while the residual still
        // carries an h² signal; below the roundoff floor (H³: ω and the U_k
        // are constants, the identity holds to machine precision) refinement
        // measures noise
        let ratio_applies = coarse > 1e-9;
        Some(TransportJson {
            h: 1e-3,
            residual: coarse,
            tolerance: 1e-4,
            refined_residual: fine,
            halving_ratio: ratio,
            pass: coarse <= 1e-4 && (!ratio_applies || (2.5..=6.5).contains(&ratio)),
        })
    } else {
        None
    };

    let mut b2_rng = rng_for(seed, "parametrix-checks-b2");
    let mut max_gap = 0.0f64;
    let mut exact = true;
    for _ in 0..20 {
        let z = Complex64::new(
            shell_vector(&mut b2_rng, 1, 0.1, 2.0).coords[0].abs(),
            shell_vector(&mut b2_rng, 1, 0.01, 1.5).coords[0],
        );
        let u = shell_vector(&mut b2_rng, 1, 0.01, 3.0).coords[0];
        let (lhs, rhs) = lemma_b2_check(z, u, 0.5)?;
        max_gap = max_gap.max((lhs - rhs).norm() / rhs.norm());
        let (l1, r1) = lemma_b2_check(z, u, 1.0)?;
        exact &= l1 == r1;
    }
    let lemma_b2 = LemmaB2Json {
        pairs: 20,
        max_rel_gap: max_gap,
        tolerance: 1e-6,
        exact_at_one: exact,
        pass: max_gap <= 1e-6 && exact,
    };

    // envelope spot checks across the three case branches of the lemma
    let b1_cases = [
        (Complex64::new(0.3, 0.8), 2.0, 1.0, 5.0),
        (Complex64::new(0.5, 0.5), 3.0, 1.0, 4.0),
        (Complex64::new(1.0, 0.0), 2.0, 2.0, 3.0),
        (Complex64::new(0.12, 0.99), 2.0, 2.0, 3.0),
    ];
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    for &(z, n, gamma, t_big) in &b1_cases {
        let (integral, envelope) = lemma_b1_spotcheck(z, n, gamma, t_big)?;
        let ratio = integral / envelope;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    let window = (0.05, 20.0);
    let lemma_b1 = LemmaB1Json {
        cases: b1_cases.len(),
        min_ratio,
        max_ratio,
        window,
        pass: min_ratio >= window.0 && max_ratio <= window.1,
    };

    // a_τ leading term against the spherical-transform Poisson kernel: the
    // inversion constant C₀ = 1/(4π²) is pinned for H³ only
    let (d, _) = dims(&rs);
    let is_h3 = rs.rank == 1 && d == 3 && rs.positive_roots.len() == 1;
    let poisson_cross_check = if is_h3 {
        let grid = RadialGrid::along_ray(&rs, &Vector::new(vec![1.0]), 1e-3, 1200)?;
        let table = uk_recursion(&rs, &grid, 1)?;
        let tau = Complex64::new(0.5, -0.5);
        let at = a_tau_leading(&rs, &table, tau, &Vector::new(vec![1.0]))?;
        let pd = PlancherelDensity::new(&rs)?;
        let ctx = EvalContext {
            c0: 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI),
            budget,
            rel_tol: 1e-8,
        };
        let pk = poisson_kernel(&rs, &pd, &ctx, tau, &Vector::new(vec![1.0]))?.value;
        let rel_gap = (at - pk).norm() / pk.norm();
        Some(ATauJson {
            tau: (tau.re, tau.im),
            radius: 1.0,
            rel_gap,
            tolerance: 0.2,
            pass: rel_gap <= 0.2,
        })
    } else {
        None
    };

    let pass = cancellations.pass
        && transport.as_ref().is_none_or(|t| t.pass)
        && lemma_b2.pass
        && lemma_b1.pass
        && poisson_cross_check.as_ref().is_none_or(|p| p.pass);
    let report = ParametrixChecksJson {
        system: rs.label.clone(),
        cancellations,
        transport,
        lemma_b2,
        lemma_b1,
        poisson_cross_check,
        pass,
    };
    emit(a.out.as_deref(), &(to_json(&report)? + "\n"))?;
    Ok(if pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// strichartz / gwp
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AdmissibleJson {
    d: u32,
    p: JsonExponent,
    q: f64,
    admissible: bool,
}

fn strichartz_admissible(d: u32, p: f64, q: f64, out: Option<&Path>) -> Result<i32, UsageError> {
    let report = AdmissibleJson {
        d,
        p: json_exponent(p),
        q,
        admissible: is_admissible(d, p, q),
    };
    emit(out, &(to_json(&report)? + "\n"))?;
    Ok(0)
}

#[derive(Serialize)]
struct SigmaPqJson {
    d: u32,
    p: JsonExponent,
    q: JsonExponent,
    sigma: f64,
}

fn strichartz_sigma(d: u32, p: f64, q: f64, out: Option<&Path>) -> Result<i32, UsageError> {
    let sigma = sigma_pq(d, p, q)?;
    let report = SigmaPqJson {
        d,
        p: json_exponent(p),
        q: json_exponent(q),
        sigma,
    };
    emit(out, &(to_json(&report)? + "\n"))?;
    Ok(0)
}

#[derive(Serialize)]
struct ExponentsJson {
    d: u32,
    gamma_c: f64,
    gamma_0: f64,
    gamma_1: f64,
    gamma_2: f64,
    gamma_3: f64,
    low_dimension_warning: bool,
}

fn gwp_exponents(d: u32, out: Option<&Path>) -> Result<i32, UsageError> {
    let ef = exponent_family(d)?;
    let report = ExponentsJson {
        d: ef.d,
        gamma_c: ef.gamma_c,
        gamma_0: ef.gamma_0,
        gamma_1: ef.gamma_1,
        gamma_2: ef.gamma_2,
        gamma_3: ef.gamma_3,
        low_dimension_warning: ef.low_dimension_warning,
    };
    emit(out, &(to_json(&report)? + "\n"))?;
    Ok(0)
}

#[derive(Serialize)]
struct GwpSigmaJson {
    d: u32,
    gamma: f64,
    sigma: f64,
    attained: bool,
    case: &'static str,
}

fn gwp_sigma(d: u32, gamma: f64, out: Option<&Path>) -> Result<i32, UsageError> {
    let th = sigma_required(d, gamma)?;
    let report = GwpSigmaJson {
        d,
        gamma,
        sigma: th.sigma,
        attained: th.attained,
        case: th.case.as_str(),
    };
    emit(out, &(to_json(&report)? + "\n"))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify all
// ---------------------------------------------------------------------------

fn verify_all(seed: u64, budget: u64, out: Option<&Path>) -> Result<i32, UsageError> {
    let outcomes = criteria::suite(seed, budget);
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let all = passed == outcomes.len();
    let mut report = String::new();
    report.push_str("symmwave verification report\n");
    report.push_str(&format!("seed: {seed}\n"));
    for o in &outcomes {
        report.push_str(&criteria::report_line(o));
        report.push('\n');
    }
    report.push_str(&format!(
        "result: {} ({passed}/{} criteria)\n",
        if all { "PASS" } else { "FAIL" },
        outcomes.len()
    ));
    emit(out, &report)?;
    Ok(if all { 0 } else { 1 })
}
