mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shellbound::bounds::{bound_fs, BoundReport};
use shellbound::caratheodory::Family;
use shellbound::classes::{ClassSpec, ClassTag};
use shellbound::search::{
    fekete_sweep, grid_oracle, mu_grid, probe, probe_records, GRID_ALPHAS, GRID_GAMMAS,
    GRID_LAMBDAS, GRID_MUS,
};
use shellbound::shell::{curve_sample, lucas, ptilde_coeffs};
use shellbound::verify::{run_all, VerifyConfig, DOMINANCE_TOL};
use shellbound::Error;

use output::{num, open, write_csv, write_json};

const SEED_ENV: &str = "SHELLBOUND_SEED";

#[derive(Parser)]
#[command(
    name = "shellbound",
    version,
    about = "Coefficient bounds for shell-like bi-univalent classes"
)]
struct Cli {
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Wsl,
    Rsl,
    Slb,
    Psl,
}

impl From<ClassArg> for ClassTag {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Wsl => ClassTag::Wsl,
            ClassArg::Rsl => ClassTag::Rsl,
            ClassArg::Slb => ClassTag::Slb,
            ClassArg::Psl => ClassTag::Psl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Rotation,
    QuadraticBlaschke,
    BodyDirect,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Rotation => Family::Rotation,
            FamilyArg::QuadraticBlaschke => Family::QuadraticBlaschke,
            FamilyArg::BodyDirect => Family::BodyDirect,
        }
    }
}

#[derive(Args, Clone)]
struct SpecArgs {
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    /// Only for wsl and rsl.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Only for wsl.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
}

impl SpecArgs {
    fn spec(&self) -> Result<ClassSpec, Failure> {
        let tag: ClassTag = self
            .class
            .ok_or_else(|| Failure::usage("--class is required"))?
            .into();
        let spec = ClassSpec::new(tag, self.gamma.unwrap_or(1.0), self.lambda, self.alpha);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Taylor coefficients of the generator: n, u(n-1)+u(n+1), coefficient.
    Ptilde {
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Image of the circle |z| = r under the generator.
    Curve {
        #[arg(long, short, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 4096)]
        count: usize,
    },
    /// Closed-form bounds for one spec, or for the whole parameter grid.
    Bounds {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        /// Tabulate every grid spec; `--class` restricts to one class.
        #[arg(long)]
        grid: bool,
    },
    /// Random or grid search for the largest coefficients.
    Probe {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Overridden by the SHELLBOUND_SEED environment variable.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "body-direct")]
        family: FamilyArg,
        /// Run the deterministic grid oracle with this many steps per axis.
        #[arg(long)]
        grid_steps: Option<usize>,
        /// Per-sample CSV (index, a2, a3, fs).
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Fekete–Szegő bound and grid maximum along a range of mu.
    Fekete {
        #[command(flatten)]
        spec: SpecArgs,
        /// A single mu; overrides the range.
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        mu_min: f64,
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        mu_max: f64,
        #[arg(long, default_value_t = 0.01)]
        mu_step: f64,
        /// Grid-oracle resolution for the achieved column; 0 leaves it empty.
        #[arg(long, default_value_t = 8)]
        grid_steps: usize,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2_000)]
        samples: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: msg.into(),
        }
    }

    fn invariant(msg: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateDenominator { .. } => 3,
            Error::InvalidSpec(_)
            | Error::InvalidArgument(_)
            | Error::InvalidPair(_)
            | Error::OrderTooLarge(_)
            | Error::OverflowGuard(_)
            | Error::PoleProximity(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn seed_or_env(seed: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{SEED_ENV}='{s}' is not an unsigned integer"))),
        Err(_) => Ok(seed),
    }
}

#[derive(Serialize)]
struct BoundsEntry {
    #[serde(flatten)]
    spec: ClassSpec,
    #[serde(flatten)]
    report: Option<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn grid_specs(only: Option<ClassTag>) -> Vec<ClassSpec> {
    let mut v = Vec::new();
    for tag in ClassTag::ALL {
        if only.is_some_and(|t| t != tag) {
            continue;
        }
        let gammas: &[f64] = if tag.has_gamma() {
            &GRID_GAMMAS
        } else {
            &[1.0]
        };
        let alphas: &[f64] = if tag == ClassTag::Wsl {
            &GRID_ALPHAS
        } else {
            &[0.0]
        };
        for &g in gammas {
            for &l in &GRID_LAMBDAS {
                for &a in alphas {
                    let spec = ClassSpec::new(tag, g, l, a);
                    if spec.validate().is_ok() {
                        v.extend(GRID_MUS.iter().map(|&mu| spec.with_mu(mu)));
                    }
                }
            }
        }
    }
    v
}

fn bounds_row(e: &BoundsEntry) -> Vec<String> {
    let s = &e.spec;
    let mut row = vec![
        s.tag.to_string(),
        num(s.gamma),
        num(s.lambda),
        num(s.alpha),
        num(s.mu),
    ];
    match &e.report {
        Some(r) => row.extend([
            num(r.a2_bound),
            num(r.a3_bound),
            num(r.fs_bound),
            num(r.h_mu),
            num(r.threshold),
            r.branch.to_string(),
            num(r.denominator),
            num(r.m),
            String::new(),
        ]),
        None => {
            row.extend(std::iter::repeat_n(String::new(), 8));
            row.push(e.error.clone().unwrap_or_default());
        }
    }
    row
}

const BOUNDS_HEADER: [&str; 14] = [
    "class",
    "gamma",
    "lambda",
    "alpha",
    "mu",
    "a2_bound",
    "a3_bound",
    "fs_bound",
    "h_mu",
    "threshold",
    "branch",
    "denominator",
    "M",
    "error",
];

fn emit_bounds(
    out: Box<dyn Write>,
    fmt: Format,
    entries: &[BoundsEntry],
    single: bool,
) -> Result<(), Failure> {
    match fmt {
        Format::Json if single => write_json(out, &entries[0])?,
        Format::Json => write_json(out, entries)?,
        Format::Csv => write_csv(
            out,
            &BOUNDS_HEADER,
            &entries.iter().map(bounds_row).collect::<Vec<_>>(),
        )?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let path = cli.output.as_deref();
    match cli.command {
        Command::Ptilde { order } => {
            if order == 0 {
                return Err(Failure::usage("--order must be at least 1"));
            }
            let p = ptilde_coeffs(order)?;
            let rows: Vec<(usize, u64, f64)> = (1..=order)
                .map(|n| Ok((n, lucas(n as u32)?, p.coeff(n).re)))
                .collect::<Result<_, Error>>()?;
            let out = open(path)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => write_csv(
                    out,
                    &["n", "lucas", "coefficient"],
                    &rows
                        .iter()
                        .map(|(n, l, c)| vec![n.to_string(), l.to_string(), num(*c)])
                        .collect::<Vec<_>>(),
                )?,
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        n: usize,
                        lucas: u64,
                        coefficient: f64,
                    }
                    let rows: Vec<Row> = rows
                        .into_iter()
                        .map(|(n, lucas, coefficient)| Row {
                            n,
                            lucas,
                            coefficient,
                        })
                        .collect();
                    write_json(out, &rows)?
                }
            }
        }
        Command::Curve { radius, count } => {
            let pts = curve_sample(radius, count)?;
            let out = open(path)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = pts
                        .iter()
                        .map(|p| {
                            vec![
                                num(p.t),
                                num(p.r),
                                num(p.w.re),
                                num(p.w.im),
                                p.residual.map(num).unwrap_or_default(),
                            ]
                        })
                        .collect();
                    write_csv(out, &["t", "r", "re", "im", "residual"], &rows)?
                }
                Format::Json => write_json(out, &pts)?,
            }
        }
        Command::Bounds { spec, mu, grid } => {
            let fmt = cli.format.unwrap_or(Format::Json);
            if grid {
                let entries: Vec<BoundsEntry> = grid_specs(spec.class.map(Into::into))
                    .into_iter()
                    .map(|s| match bound_fs(&s, s.mu) {
                        Ok(r) => BoundsEntry {
                            spec: s,
                            report: Some(r),
                            error: None,
                        },
                        Err(e) => BoundsEntry {
                            spec: s,
                            report: None,
                            error: Some(e.to_string()),
                        },
                    })
                    .collect();
                emit_bounds(open(path)?, fmt, &entries, false)?;
            } else {
                let s = spec.spec()?.with_mu(mu);
                let report = bound_fs(&s, mu)?;
                let entry = BoundsEntry {
                    spec: s,
                    report: Some(report),
                    error: None,
                };
                emit_bounds(open(path)?, fmt, std::slice::from_ref(&entry), true)?;
            }
        }
        Command::Probe {
            spec,
            mu,
            samples,
            seed,
            family,
            grid_steps,
            dump,
        } => {
            let s = spec.spec()?.with_mu(mu);
            let seed = seed_or_env(seed)?;
            let result = match grid_steps {
                Some(steps) => grid_oracle(&s, steps)?,
                None => probe(&s, samples, seed, family.into())?,
            };
            if let Some(dump) = dump {
                if grid_steps.is_some() {
                    return Err(Failure::usage("--dump applies to random probes only"));
                }
                let rows: Vec<Vec<String>> = probe_records(&s, samples, seed, family.into())?
                    .iter()
                    .map(|r| vec![r.index.to_string(), num(r.a2), num(r.a3), num(r.fs)])
                    .collect();
                write_csv(open(Some(&dump))?, &["index", "a2", "a3", "fs"], &rows)?;
            }
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => write_json(open(path)?, &result)?,
                Format::Csv => write_csv(
                    open(path)?,
                    &[
                        "class", "gamma", "lambda", "alpha", "mu", "samples", "max_a2", "max_a3",
                        "max_fs", "ratio_a2", "ratio_a3", "ratio_fs",
                    ],
                    &[vec![
                        s.tag.to_string(),
                        num(s.gamma),
                        num(s.lambda),
                        num(s.alpha),
                        num(s.mu),
                        result.samples.to_string(),
                        num(result.max_a2),
                        num(result.max_a3),
                        num(result.max_fs),
                        num(result.ratio_a2),
                        num(result.ratio_a3),
                        num(result.ratio_fs),
                    ]],
                )?,
            }
            if result.max_ratio() > 1.0 + DOMINANCE_TOL {
                return Err(Failure::invariant(format!(
                    "achieved value exceeds the bound (ratio {:.12})",
                    result.max_ratio()
                )));
            }
        }
        Command::Fekete {
            spec,
            mu,
            mu_min,
            mu_max,
            mu_step,
            grid_steps,
        } => {
            let s = spec.spec()?;
            let mus = match mu {
                Some(m) => vec![m],
                None => mu_grid(mu_min, mu_max, mu_step)?,
            };
            let rows = fekete_sweep(&s, &mus, grid_steps)?;
            let out = open(path)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => write_csv(
                    out,
                    &["mu", "h_mu", "branch", "fs_bound", "achieved"],
                    &rows
                        .iter()
                        .map(|r| {
                            vec![
                                num(r.mu),
                                num(r.h_mu),
                                r.branch.to_string(),
                                num(r.fs_bound),
                                num(r.achieved),
                            ]
                        })
                        .collect::<Vec<_>>(),
                )?,
                Format::Json => write_json(out, &rows)?,
            }
            if let Some(r) = rows
                .iter()
                .find(|r| r.achieved > r.fs_bound + DOMINANCE_TOL)
            {
                return Err(Failure::invariant(format!(
                    "grid maximum {} exceeds the bound {} at mu = {}",
                    r.achieved, r.fs_bound, r.mu
                )));
            }
        }
        Command::Verify { seed, samples } => {
            let cfg = VerifyConfig {
                seed: seed_or_env(seed)?,
                samples,
                ..VerifyConfig::default()
            };
            let outcomes = run_all(&cfg);
            let mut out = open(path)?;
            match cli.format {
                Some(Format::Json) => write_json(out, &outcomes)?,
                Some(Format::Csv) => write_csv(
                    out,
                    &["check", "passed", "detail"],
                    &outcomes
                        .iter()
                        .map(|o| vec![o.name.clone(), o.passed.to_string(), o.detail.clone()])
                        .collect::<Vec<_>>(),
                )?,
                None => {
                    for o in &outcomes {
                        writeln!(
                            out,
                            "[{}] {}: {}",
                            if o.passed { "ok" } else { "FAIL" },
                            o.name,
                            o.detail
                        )?;
                    }
                    out.flush()?;
                }
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(Failure::invariant(format!(
                    "{failed} of {} checks failed",
                    outcomes.len()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("shellbound: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
