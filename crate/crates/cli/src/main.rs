use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use flagforge::buildings::{build, sphericality_suite, BuildingKind};
use flagforge::complexes::parse_simplicial;
use flagforge::dlss;
use flagforge::ffield::{prime_power, Elem, Field, Subspace};
use flagforge::ghomology::{bar_homology_capped, coinvariants, stable_elements_homology, DEFAULT_BAR_COLUMNS};
use flagforge::glgroup::{gl, gl_order, group_make, SubgroupKind, SubgroupSpec};
use flagforge::steinberg::{steinberg, GModule, SteinbergWhich};
use flagforge::verify::{run_suite, Config, SuiteParams, SuiteSpec, SUITES};

#[derive(Parser)]
#[command(name = "flagforge", version, about = "Buildings, Steinberg modules and group homology over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate a subgroup of GL_n(F_q) and print its order.
    Group(GroupArgs),
    /// Reduced Betti numbers of a simplicial complex file.
    Betti(BettiArgs),
    /// Build a (relative, split) building and report its homology.
    Building(BuildingArgs),
    /// Steinberg-type module dimensions and coinvariants.
    Steinberg(SteinbergArgs),
    /// Group homology H_d(GL_n(F_q); M) for trivial or Steinberg coefficients.
    Ghom(GhomArgs),
    /// Dyer–Lashof tables, expressions, E³ windows and Tor.
    Dl {
        #[command(subcommand)]
        cmd: DlCmd,
    },
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Space {
    /// Field order (a prime power).
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// Dimension of the ambient space.
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupKind {
    Full,
    Borel,
    Unitriangular,
    Permutations,
    FixW,
    PresW,
    PresWFixQuot,
    BlockDiagonal,
    BlockUpper,
}

#[derive(Args)]
struct GroupArgs {
    #[command(flatten)]
    space: Space,
    #[arg(long, value_enum, default_value = "full")]
    kind: GroupKind,
    /// Subspace rows, e.g. "1,0,0;0,1,0" (for fix-w, pres-w, pres-w-fix-quot).
    #[arg(long)]
    w: Option<String>,
    /// Block sizes, e.g. "1,2" (for block-diagonal, block-upper).
    #[arg(long)]
    blocks: Option<String>,
}

#[derive(Args)]
struct BettiArgs {
    /// One simplex per line: dimension then vertex indices.
    #[arg(long)]
    complex: PathBuf,
    /// Coefficient prime.
    #[arg(long, default_value_t = 2)]
    coeff: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tits,
    RelTits,
    DualRelTits,
    Split,
    RelSplit,
}

#[derive(Args)]
struct BuildingArgs {
    #[command(flatten)]
    space: Space,
    #[arg(long, value_enum, default_value = "tits")]
    kind: Kind,
    /// Subspace rows for the relative kinds, e.g. "1,0,0".
    #[arg(long)]
    w: Option<String>,
    /// Coefficient prime (defaults to the characteristic).
    #[arg(long)]
    coeff: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    St,
    E1,
}

#[derive(Args)]
struct SteinbergArgs {
    #[command(flatten)]
    space: Space,
    #[arg(long, value_enum, default_value = "st")]
    which: Which,
    /// Coefficient prime ℓ (defaults to the characteristic).
    #[arg(long)]
    coeff: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Coefficients {
    Trivial,
    St,
    E1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bar,
    StableElements,
}

#[derive(Args)]
struct GhomArgs {
    #[command(flatten)]
    space: Space,
    #[arg(long, value_enum, default_value = "trivial")]
    module: Coefficients,
    /// Coefficient prime (defaults to the characteristic).
    #[arg(long)]
    coeff: Option<u32>,
    #[arg(long, default_value_t = 2)]
    d_max: usize,
    #[arg(long, value_enum, default_value = "bar")]
    method: Method,
    /// Cap on the number of bar basis columns.
    #[arg(long, default_value_t = DEFAULT_BAR_COLUMNS)]
    max_columns: usize,
}

#[derive(Subcommand)]
enum DlCmd {
    /// Admissible monomials on σ (and τ) in a window.
    Table {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 5)]
        d_max: u32,
        /// Omit τ.
        #[arg(long)]
        sigma_only: bool,
    },
    /// Normalize an expression such as "Q[2](sigma*Q[1](sigma))".
    Apply {
        expr: String,
        /// Extra generators as name:rank:degree:filtration.
        #[arg(long = "gen")]
        gens: Vec<String>,
    },
    /// E³ of the quotient page in a window.
    SsE3 {
        #[arg(long, default_value_t = 9)]
        n_max: u32,
        #[arg(long, default_value_t = 6)]
        d_max: u32,
    },
    /// Tor of Quillen's ring against the closed form.
    Tor {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, default_value_t = 3)]
        ell: u32,
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        #[arg(long, default_value_t = 6)]
        d_max: u32,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: Option<String>,
    /// List the suites and exit.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    max_q: Option<u32>,
    #[arg(long)]
    max_n: Option<usize>,
    /// Wall-clock budget per suite in seconds.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Include the GL_4(F_2) stable-elements checks.
    #[arg(long)]
    heavy: bool,
    /// TOML config with [defaults] and per-suite sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write JSON lines here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn field(q: u32) -> Result<Field> {
    let (p, r) = prime_power(q as u64).ok_or_else(|| anyhow!("{q} is not a prime power"))?;
    Ok(Field::new(p as u32, r)?)
}

fn parse_rows(text: &str) -> Result<Vec<Vec<Elem>>> {
    text.split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse::<Elem>().with_context(|| format!("bad entry `{x}`"))).collect())
        .collect()
}

fn subspace(f: &Field, n: usize, w: &Option<String>) -> Result<Subspace> {
    let rows = parse_rows(w.as_deref().ok_or_else(|| anyhow!("--w is required for this kind"))?)?;
    if rows.iter().any(|r| r.len() != n) {
        bail!("--w rows must have {n} entries");
    }
    Ok(Subspace::span(f, n, &rows))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print(v: serde_json::Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
}

fn group(a: GroupArgs) -> Result<()> {
    let f = field(a.space.q)?;
    let n = a.space.n;
    let blocks = || -> Result<Vec<usize>> {
        let text = a.blocks.as_deref().ok_or_else(|| anyhow!("--blocks is required for this kind"))?;
        text.split(',').map(|x| x.trim().parse::<usize>().context("bad block size")).collect()
    };
    let kind = match a.kind {
        GroupKind::Full => SubgroupKind::Full,
        GroupKind::Borel => SubgroupKind::Borel,
        GroupKind::Unitriangular => SubgroupKind::UpperUnitriangular,
        GroupKind::Permutations => SubgroupKind::Permutations,
        GroupKind::FixW => SubgroupKind::FixW(subspace(&f, n, &a.w)?),
        GroupKind::PresW => SubgroupKind::PresW(subspace(&f, n, &a.w)?),
        GroupKind::PresWFixQuot => SubgroupKind::PresWFixQuot(subspace(&f, n, &a.w)?),
        GroupKind::BlockDiagonal => SubgroupKind::BlockDiagonal(blocks()?),
        GroupKind::BlockUpper => SubgroupKind::BlockUpper(blocks()?),
    };
    let g = group_make(&SubgroupSpec::new(&f, n, kind))?;
    print(json!({
        "label": g.label(),
        "q": a.space.q,
        "n": n,
        "order": g.order(),
        "gl_order": gl_order(a.space.q as u64, n).to_string(),
        "generators": g.generators().len(),
    }));
    Ok(())
}

fn betti(a: BettiArgs) -> Result<()> {
    let text = fs::read_to_string(&a.complex).with_context(|| format!("reading {}", a.complex.display()))?;
    let c = parse_simplicial(&text, &Field::new(a.coeff, 1)?)?;
    let b = c.betti()?;
    // dims and betti both start at degree −1
    print(json!({ "dims": c.dims(), "betti": b.betti }));
    Ok(())
}

fn building(a: BuildingArgs) -> Result<()> {
    let f = field(a.space.q)?;
    let n = a.space.n;
    let kind = match a.kind {
        Kind::Tits => BuildingKind::Tits,
        Kind::Split => BuildingKind::Split,
        Kind::RelTits => BuildingKind::RelTits(subspace(&f, n, &a.w)?),
        Kind::DualRelTits => BuildingKind::DualRelTits(subspace(&f, n, &a.w)?),
        Kind::RelSplit => BuildingKind::RelSplit(subspace(&f, n, &a.w)?),
    };
    let coeff = Field::new(a.coeff.unwrap_or(f.p()), 1)?;
    let r = sphericality_suite(&f, n, &kind, &coeff)?;
    let size = build(&f, n, &kind)?.len();
    print(json!({ "report": r, "elements": size, "betti_from_degree": -1 }));
    Ok(())
}

fn module(q: u32, n: usize, which: Option<Which>, ell: Option<u32>) -> Result<GModule> {
    let f = field(q)?;
    let k = Field::new(ell.unwrap_or(f.p()), 1)?;
    let g = Arc::new(gl(&f, n)?);
    Ok(match which {
        None => GModule::trivial(g, &k, 1),
        Some(Which::St) => steinberg(&f, n, &SteinbergWhich::St, g, &k)?.module,
        Some(Which::E1) => steinberg(&f, n, &SteinbergWhich::E1, g, &k)?.module,
    })
}

fn steinberg_cmd(a: SteinbergArgs) -> Result<()> {
    let m = module(a.space.q, a.space.n, Some(a.which), a.coeff)?;
    let c = coinvariants(&m)?;
    print(json!({ "q": a.space.q, "n": a.space.n, "dim": m.dim(), "coinvariants": c.dim }));
    Ok(())
}

fn ghom(a: GhomArgs) -> Result<()> {
    let which = match a.module {
        Coefficients::Trivial => None,
        Coefficients::St => Some(Which::St),
        Coefficients::E1 => Some(Which::E1),
    };
    let report = match a.method {
        Method::Bar => {
            let m = module(a.space.q, a.space.n, which, a.coeff)?;
            bar_homology_capped(&m, a.d_max, a.max_columns)?
        }
        Method::StableElements => {
            if which.is_some() {
                bail!("stable elements supports trivial coefficients only");
            }
            let f = field(a.space.q)?;
            let p = a.coeff.unwrap_or(f.p());
            stable_elements_homology(&gl(&f, a.space.n)?, p, a.d_max)?
        }
    };
    print(json!(report));
    Ok(())
}

fn parse_gen(s: &str) -> Result<dlss::GenRef> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        bail!("--gen expects name:rank:degree:filtration");
    }
    let num = |x: &str| x.parse::<u32>().with_context(|| format!("bad number `{x}`"));
    Ok(dlss::gen(parts[0], num(parts[1])?, num(parts[2])?, num(parts[3])?))
}

fn dl(cmd: DlCmd) -> Result<()> {
    match cmd {
        DlCmd::Table { n_max, d_max, sigma_only } => {
            let mut gens = vec![dlss::sigma()];
            if !sigma_only {
                gens.push(dlss::tau());
            }
            let rows: Vec<_> = dlss::dl_generators_table(&gens, n_max, d_max)
                .iter()
                .map(|m| json!({ "generator": m.to_string(), "rank": m.rank(), "degree": m.degree(), "filtration": m.filtration() }))
                .collect();
            print(json!(rows));
        }
        DlCmd::Apply { expr, gens } => {
            let extra = gens.iter().map(|g| parse_gen(g)).collect::<Result<Vec<_>>>()?;
            let p = dlss::parse_expression(&expr, &extra)?;
            let terms: Vec<_> = p.terms().map(|t| json!({ "term": t.to_string(), "tridegree": t.tridegree() })).collect();
            print(json!({ "normal_form": p.to_string(), "terms": terms }));
        }
        DlCmd::SsE3 { n_max, d_max } => print(json!(dlss::e3_vanishing(dlss::Window { n_max, d_max })?)),
        DlCmd::Tor { q, ell, n_max, d_max } => {
            let ring = dlss::quillen_ring(q, ell, dlss::Window { n_max, d_max })?;
            print(json!(dlss::tor_bigraded(&ring)?));
        }
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    if a.list {
        for (name, what) in SUITES {
            emit(&format!("{name:<16} {what}\n"));
        }
        return Ok(ExitCode::SUCCESS);
    }
    let name = a.suite.ok_or_else(|| anyhow!("a suite name is required (see --list)"))?;
    let config = match &a.config {
        Some(p) => Config::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => Config::default(),
    };
    let flags = SuiteParams {
        max_q: a.max_q,
        max_n: a.max_n,
        budget_seconds: a.budget,
        heavy: a.heavy.then_some(true),
        threads: a.threads,
    };
    let spec = SuiteSpec::with(&name, config.resolve(&name, &flags));
    let report = run_suite(&spec)?;
    match &a.json {
        Some(p) => fs::write(p, report.to_json_lines()).with_context(|| format!("writing {}", p.display()))?,
        None => emit(&report.to_json_lines()),
    }
    if let Some(p) = &a.csv {
        fs::write(p, report.to_csv()?).with_context(|| format!("writing {}", p.display()))?;
    }
    eprint!("{}", report.summary_table());
    report.status()?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Group(a) => group(a).map(|_| ExitCode::SUCCESS),
        Cmd::Betti(a) => betti(a).map(|_| ExitCode::SUCCESS),
        Cmd::Building(a) => building(a).map(|_| ExitCode::SUCCESS),
        Cmd::Steinberg(a) => steinberg_cmd(a).map(|_| ExitCode::SUCCESS),
        Cmd::Ghom(a) => ghom(a).map(|_| ExitCode::SUCCESS),
        Cmd::Dl { cmd } => dl(cmd).map(|_| ExitCode::SUCCESS),
        Cmd::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
