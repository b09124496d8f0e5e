use clap::{Args, Parser, Subcommand, ValueEnum};
use pgt_core::cache::RecordCache;
use pgt_core::classgroup::Mutation;
use pgt_core::report::{self, Format};
use pgt_core::theta::{self, Caps, NoStore, RecordStore, ThetaQuery, ThetaResult, WeightMode};
use pgt_core::validate::{self, Level};
use pgt_core::{CubicPoly, Error};
use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pgt",
    version,
    about = "Class numbers and regulators of totally real cubic orders weighted over the Weyl chamber"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Working precision of root enclosures, in bits.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Record cache directory.
    #[arg(long, global = true, env = "CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Human)]
    format: Fmt,
    /// Limits as key=value: vertices, unit-index, direct-ideals, factor-bound, box.
    #[arg(long, global = true, value_delimiter = ',')]
    caps: Vec<String>,
    /// Run the direct class count on orders with |disc| up to this.
    #[arg(long, global = true)]
    direct_disc: Option<i128>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Exit 0 even when some polynomials were flagged.
    #[arg(long, global = true)]
    allow_flagged: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Csv,
    Human,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Format {
        match f {
            Fmt::Json => Format::Json,
            Fmt::Csv => Format::Csv,
            Fmt::Human => Format::Human,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Weight {
    Theta,
    Index,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    ConductorFormula,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute θ(T1, T2) and its ratio to (16/√3)·T1·T2.
    Theta {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        /// Leave the per-polynomial table out of the report.
        #[arg(long)]
        summary: bool,
    },
    /// Full dossier of one polynomial x³ + ax² + bx + c.
    Inspect {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
        #[arg(allow_hyphen_values = true)]
        c: i64,
    },
    /// Dirichlet series partial sums over nested chamber boxes.
    Dirichlet {
        /// Box sizes T (square boxes), increasing.
        #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 20.0, 40.0])]
        boxes: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        j: u32,
        #[arg(long, default_value_t = 3.0)]
        s1: f64,
        #[arg(long, default_value_t = 3.0)]
        s2: f64,
        #[arg(long, value_enum, default_value_t = Weight::Theta)]
        weight: Weight,
        /// Flat volume used by the index weight.
        #[arg(long, default_value_t = 1.0)]
        lambda_flat: f64,
    },
    /// Abel transform checks on the built-in test functions.
    AbelSelftest {
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
    /// Run the validation suites.
    Validate {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
        /// Break a component on purpose; the run must then fail.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
    },
}

enum Failure {
    Invalid(String),
    Cap(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::CapExceeded(_) | Error::BoxTooLarge { .. } | Error::Incomplete { .. } => {
                Failure::Cap(e.to_string())
            }
            Error::InvalidInput(_)
            | Error::NotUnit(_)
            | Error::Reducible
            | Error::NotTotallyReal(_) => Failure::Invalid(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn parse_caps(items: &[String]) -> Result<Caps, Failure> {
    let mut caps = Caps::default();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Invalid(format!("cap {item:?} is not key=value")))?;
        let n: u64 = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            Failure::Invalid(format!("cap {k} needs a positive integer, got {v:?}"))
        })?;
        match k {
            "vertices" => caps.vertices = n as usize,
            "unit-index" => caps.unit_index = n,
            "direct-ideals" => caps.direct_ideals = n,
            "factor-bound" => caps.factor_bound = n,
            "box" => caps.box_size = n,
            _ => return Err(Failure::Invalid(format!("unknown cap {k:?}"))),
        }
    }
    Ok(caps)
}

fn query(g: &Global, t1: f64, t2: f64) -> Result<ThetaQuery, Failure> {
    let mut q = ThetaQuery::new(t1, t2);
    q.precision = g.precision;
    q.threads = g.threads;
    q.caps = parse_caps(&g.caps)?;
    q.direct_check_disc = g.direct_disc;
    q.validate()?;
    Ok(q)
}

fn open_cache(g: &Global) -> Result<Option<RecordCache>, Failure> {
    g.cache_dir
        .as_ref()
        .map(|d| {
            RecordCache::open(d)
                .map_err(|e| Failure::Invalid(format!("cache directory {}: {e}", d.display())))
        })
        .transpose()
}

fn run_theta(g: &Global, q: &ThetaQuery) -> Result<ThetaResult, Failure> {
    let cache = open_cache(g)?;
    let store: &dyn RecordStore = match &cache {
        Some(c) => c,
        None => &NoStore,
    };
    let res = theta::theta(q, store)?;
    if let Some(c) = &cache {
        for &i in &res.fresh {
            if let Err(e) = c.store(&res.records[i]) {
                log::warn!("could not cache {}: {e}", res.records[i].poly);
            }
        }
    }
    for w in &res.warnings {
        log::warn!("{w}");
    }
    Ok(res)
}

fn check_flagged(g: &Global, res: &ThetaResult) -> Result<(), Failure> {
    if !res.flagged.is_empty() && !g.allow_flagged {
        return Err(Failure::Cap(format!(
            "{} polynomial(s) flagged, first {}: {} (rerun with --allow-flagged to accept)",
            res.flagged.len(),
            res.flagged[0].poly,
            res.flagged[0].reason
        )));
    }
    Ok(())
}

fn color() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn mark(ok: bool) -> String {
    let word = if ok { "PASS" } else { "FAIL" };
    if color() {
        format!("\x1b[{}m{word}\x1b[0m", if ok { 32 } else { 31 })
    } else {
        word.to_string()
    }
}

fn inspect(g: &Global, p: CubicPoly) -> Result<(), Failure> {
    let disc = p.discriminant();
    if p.c.abs() != 1 {
        return Err(Failure::Invalid(format!(
            "{p}: constant coefficient {} is not ±1, so not a unit",
            p.c
        )));
    }
    if disc <= 0 {
        return Err(Failure::Invalid(format!(
            "{p}: not totally real (disc = {disc})"
        )));
    }
    if p.eval(1) == 0 || p.eval(-1) == 0 {
        return Err(Failure::Invalid(format!("{p}: reducible (root at ±1)")));
    }
    if p.has_opposite_roots() {
        return Err(Failure::Invalid(format!(
            "{p}: two roots of equal absolute value, not split regular"
        )));
    }
    let mut q = query(g, 2.0, 2.0)?;
    q.direct_check_disc = g.direct_disc;
    let r = theta::build_record(&p, &q)?;
    print!("{}", report::record_report(&r, g.format.into()));
    if matches!(g.format, Fmt::Human) {
        let (a1, a2) = r.alphas();
        if a1 <= 1.0 || a2 <= 1.0 {
            println!(
                "note: alpha1 = {a1:.4}, alpha2 = {a2:.4}; admissible but outside the chamber for every T"
            );
        }
        if !p.is_canonical() {
            println!("note: enumerations use the mirror {} instead", p.mirror());
        }
    }
    Ok(())
}

fn dirichlet(
    g: &Global,
    boxes: &[f64],
    j: u32,
    s1: f64,
    s2: f64,
    mode: WeightMode,
) -> Result<(), Failure> {
    if boxes.is_empty() || boxes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Invalid(
            "boxes must be a nonempty increasing list".into(),
        ));
    }
    let t_max = *boxes.last().expect("nonempty");
    let q = query(g, t_max, t_max)?;
    let res = run_theta(g, &q)?;
    check_flagged(g, &res)?;
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for &t in boxes {
        let sub = theta::restrict(&res.records, t, t, q.precision)?;
        let s = theta::dirichlet_partial(&sub, j, s1, s2, mode)?;
        rows.push((t, sub.len(), s, prev.map(|p| s - p)));
        prev = Some(s);
    }
    match g.format {
        Fmt::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(t, n, s, d)| serde_json::json!({"t": t, "terms": n, "partial_sum": s, "difference": d}))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(
                    &serde_json::json!({"j": j, "s1": s1, "s2": s2, "boxes": v})
                )
                .expect("serializes")
            );
        }
        Fmt::Csv => {
            println!("t,terms,partial_sum,difference");
            for (t, n, s, d) in rows {
                println!("{t},{n},{s},{}", d.map_or(String::new(), |d| d.to_string()));
            }
        }
        Fmt::Human => {
            println!("j = {j}, s = ({s1}, {s2})");
            for (t, n, s, d) in rows {
                println!(
                    "T = {t:>8}  terms {n:>6}  sum {s:.12e}  diff {}",
                    d.map_or("-".to_string(), |d| format!("{d:.3e}"))
                );
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Theta { t1, t2, summary } => {
            let q = query(g, t1, t2)?;
            let res = run_theta(g, &q)?;
            print!("{}", report::theta_report(&res, g.format.into(), !summary));
            if matches!(g.format, Fmt::Json) {
                println!();
            }
            check_flagged(g, &res)
        }
        Cmd::Inspect { a, b, c } => inspect(g, CubicPoly::new(a, b, c)),
        Cmd::Dirichlet {
            boxes,
            j,
            s1,
            s2,
            weight,
            lambda_flat,
        } => {
            let mode = match weight {
                Weight::Theta => WeightMode::Theta,
                Weight::Index => WeightMode::Index { lambda_flat },
            };
            dirichlet(g, &boxes, j, s1, s2, mode)
        }
        Cmd::AbelSelftest { grid } => {
            let (fwd, e1, e2) = validate::abel_errors(grid.max(1))?;
            let ok = fwd <= 1e-8 && e1 <= 1e-6 && e2 <= 1e-6;
            println!("forward  e^-x vs sqrt(pi) e^-y on [0,10]: {fwd:.3e} (≤ 1e-8)");
            println!("inverse  e^-x round trip:                 {e1:.3e} (≤ 1e-6)");
            println!("inverse  (1+x)^-3 round trip:             {e2:.3e} (≤ 1e-6)");
            println!("{}", mark(ok));
            if ok {
                Ok(())
            } else {
                Err(Failure::Validation(
                    "Abel round trip outside tolerance".into(),
                ))
            }
        }
        Cmd::Validate {
            quick: _,
            full,
            mutate,
        } => {
            let level = if full { Level::Full } else { Level::Quick };
            let mutation = mutate.map(|MutationArg::ConductorFormula| Mutation::ConductorFormula);
            let outcomes = validate::run_suites(level, g.seed, g.threads, mutation);
            for o in &outcomes {
                println!(
                    "{} {:<36} {:>8.2}s  {}",
                    mark(o.passed),
                    o.name,
                    o.elapsed.as_secs_f64(),
                    o.detail
                );
            }
            match outcomes.iter().find(|o| !o.passed) {
                Some(o) => Err(Failure::Validation(format!("{}: {}", o.name, o.detail))),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CAP)
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
