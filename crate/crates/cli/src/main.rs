//! `lpmq`: build and inspect the quotient order on lattice path matroids.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use lpmq_core::perm::{self, Perm};
use lpmq_core::shelling::{self, Linearization, ShellingOutcome};
use lpmq_core::whitney::{self, WhitneyDual};
use lpmq_core::{Error, Limits, Lpm, QuotientPoset};

const POSET_CAP: usize = 8;
const WHITNEY_CAP: usize = 4;
const FALLING_CAP: usize = 9;
const SHELL_CAP: usize = 5;
const EL_CAP: usize = 6;
const TABLES_CAP: usize = 8;
/// Largest `n` for which `mobius` compares all three methods.
const MOBIUS_CROSS_CHECK_N: usize = 5;

#[derive(Parser)]
#[command(
    name = "lpmq",
    version,
    about = "Quotient order on lattice path matroids"
)]
struct Cli {
    /// Worker threads (falls back to LPMQ_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Allow sizes above the default cap of the subcommand.
    #[arg(long, global = true)]
    force: bool,
    /// New size cap; only honoured together with --force.
    #[arg(long, global = true, requires = "force")]
    cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build P_N and print a summary; optionally export JSON and DOT.
    Poset {
        #[arg(long, required_unless_present = "input")]
        n: Option<usize>,
        /// Read the poset from a JSON export instead of building it.
        #[arg(long, conflicts_with = "n")]
        input: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Möbius function of an interval (default: the whole poset).
    Mobius {
        #[arg(long)]
        n: usize,
        /// Lower end, e.g. "M[1,2;2,3]" ("-" for the empty set).
        #[arg(long, requires = "to")]
        from: Option<String>,
        #[arg(long, requires = "from")]
        to: Option<String>,
    },
    /// Count or list falling maximal chains.
    Falling {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        list: bool,
        /// Restrict to chains whose lower labels are this permutation.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Verify the EL conditions (all intervals for N <= 4, 0̂-rooted above).
    ElCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Lin::Lower)]
        linearization: Lin,
        /// Write per-interval findings as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify the EW conditions.
    EwCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check that the lexicographic facet order of the order complex is a shelling.
    ShellCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Lin::Lower)]
        linearization: Lin,
    },
    /// Build the Whitney dual Q and verify the exchange of Whitney numbers.
    Whitney {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Falling-chain and maximal-chain counts for n = 1..=MAX_N.
    Tables {
        #[arg(long)]
        max_n: usize,
    },
    /// |C_σ|, with the closed form when σ = s_i w_0.
    Csigma {
        #[arg(long)]
        perm: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Lin {
    Lower,
    Upper,
}

impl From<Lin> for Linearization {
    fn from(l: Lin) -> Self {
        match l {
            Lin::Lower => Linearization::LowerFirst,
            Lin::Upper => Linearization::UpperFirst,
        }
    }
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. }
            | Error::Parse(_)
            | Error::InvalidLpm(_)
            | Error::InvalidPermutation(_)
            | Error::Incomparable(..)
            | Error::NotAMember { .. }
            | Error::SizeMismatch(..)
            | Error::GroundSetMismatch(..) => Failure::Usage(e.to_string()),
            other => Failure::Verification(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Caps {
    force: bool,
    cap: Option<usize>,
}

impl Caps {
    fn check(&self, what: &str, n: usize, default: usize) -> Outcome {
        let cap = if self.force {
            self.cap.unwrap_or(usize::MAX)
        } else {
            default
        };
        if n == 0 || n > cap {
            let hint = if self.force {
                String::new()
            } else {
                format!("; pass --force --cap {n} to override")
            };
            return Err(Failure::Usage(format!(
                "{what}: n = {n} is outside 1..={cap}{hint}"
            )));
        }
        Ok(())
    }

    /// Library limits lifted to `n` when forced.
    fn limits(&self, n: usize) -> Limits {
        let mut l = Limits::default();
        if self.force {
            l.poset_max_n = l.poset_max_n.max(n);
            l.falling_max_n = l.falling_max_n.max(n);
            l.chain_poset_max_n = l.chain_poset_max_n.max(n);
            l.shelling_max_facets = usize::MAX;
        }
        l
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn build(n: usize, caps: &Caps) -> Result<QuotientPoset, Failure> {
    if n >= 8 {
        eprintln!("building P_{n} ...");
    }
    Ok(QuotientPoset::build_with(n, &caps.limits(n))?)
}

fn parse_perm(s: &str) -> Result<Perm, Failure> {
    Ok(s.parse::<Perm>()?)
}

fn cmd_poset(
    n: Option<usize>,
    input: Option<PathBuf>,
    json: Option<PathBuf>,
    dot: Option<PathBuf>,
    caps: &Caps,
) -> Outcome {
    let p = match (n, input) {
        (_, Some(path)) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            QuotientPoset::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))?
        }
        (Some(n), None) => {
            caps.check("poset", n, POSET_CAP)?;
            build(n, caps)?
        }
        (None, None) => unreachable!("clap requires --n or --input"),
    };
    println!(
        "P_{}: {} elements, {} covers",
        p.n(),
        p.len(),
        p.covers().len()
    );
    println!("rank polynomial: {}", p.rank_polynomial());
    println!(
        "characteristic polynomial: {}",
        p.characteristic_polynomial()
    );
    println!("maximal chains: {}", p.count_maximal_chains());
    if let Some(path) = json {
        write_file(&path, &p.to_json())?;
    }
    if let Some(path) = dot {
        write_file(&path, &p.to_dot())?;
    }
    Ok(())
}

fn cmd_mobius(n: usize, from: Option<String>, to: Option<String>, caps: &Caps) -> Outcome {
    caps.check("mobius", n, POSET_CAP)?;
    let p = build(n, caps)?;
    let locate = |s: &str| -> Result<usize, Failure> {
        let m = Lpm::parse(n, s)?;
        p.index_of(&m)
            .ok_or_else(|| Failure::Usage(format!("{m} is not an element of P_{n}")))
    };
    let (x, y) = match (from, to) {
        (Some(a), Some(b)) => (locate(&a)?, locate(&b)?),
        _ => (p.bottom(), p.top()),
    };
    let mu = p.mobius(x, y)?;
    if n > MOBIUS_CROSS_CHECK_N {
        println!("mu = {mu} (|mu| = {})", mu.abs());
        return Ok(());
    }
    let hall = p.mobius_hall(x, y)?;
    let falling = shelling::mobius_via_falling(&p, x, y)?;
    if mu == hall && mu == falling {
        println!("mu = {mu} (|mu| = {}), methods agree", mu.abs());
        Ok(())
    } else {
        println!("mu = {mu} (|mu| = {})", mu.abs());
        Err(Failure::Verification(format!(
            "methods disagree: recursion {mu}, chain counting {hall}, falling chains {falling}"
        )))
    }
}

fn cmd_falling(n: usize, list: bool, sigma: Option<String>, caps: &Caps) -> Outcome {
    caps.check("falling", n, FALLING_CAP)?;
    if n >= 9 {
        eprintln!("enumerating falling chains for n = {n} ...");
    }
    match sigma {
        Some(s) => {
            let sigma = parse_perm(&s)?;
            if sigma.len() != n {
                return Err(Failure::Usage(format!(
                    "--sigma has length {}, expected {n}",
                    sigma.len()
                )));
            }
            let taus = perm::list_c_sigma(&sigma);
            if list {
                for tau in &taus {
                    println!("{sigma}|{tau}");
                }
            } else {
                println!("{}", taus.len());
            }
        }
        None if list => {
            for pair in perm::list_falling_with(n, &caps.limits(n))? {
                println!("{pair}");
            }
        }
        None => println!("{}", perm::count_falling_with(n, &caps.limits(n))?),
    }
    Ok(())
}

fn finish_report(
    name: &str,
    n: usize,
    report: &shelling::Report,
    path: Option<PathBuf>,
) -> Outcome {
    if let Some(path) = path {
        write_file(&path, &report.to_json())?;
    }
    let bad: Vec<_> = report.violations().collect();
    println!(
        "{name} n={n}: {} findings, {} violations",
        report.len(),
        bad.len()
    );
    for f in &bad {
        println!("  [{}, {}] {}", f.interval[0], f.interval[1], f.detail);
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{name} failed")))
    }
}

fn cmd_el_check(n: usize, lin: Lin, report: Option<PathBuf>, caps: &Caps) -> Outcome {
    caps.check("el-check", n, EL_CAP)?;
    let p = build(n, caps)?;
    let r = if n <= 4 {
        shelling::verify_el(&p, lin.into())
    } else {
        eprintln!("checking 0̂-rooted intervals of P_{n} ...");
        shelling::verify_el_rooted(&p, lin.into())
    };
    finish_report("el-check", n, &r, report)
}

fn cmd_ew_check(n: usize, report: Option<PathBuf>, caps: &Caps) -> Outcome {
    caps.check("ew-check", n, WHITNEY_CAP)?;
    let p = build(n, caps)?;
    let r = whitney::verify_ew(&p);
    finish_report("ew-check", n, &r, report)
}

fn cmd_shell_check(n: usize, lin: Lin, caps: &Caps) -> Outcome {
    caps.check("shell-check", n, SHELL_CAP)?;
    let p = build(n, caps)?;
    let facets = shelling::order_complex_facets(&p, lin.into());
    if facets.len() > 500 {
        eprintln!("checking {} facets ...", facets.len());
    }
    let limits = caps.limits(n);
    match shelling::shelling_check_with(&facets, limits.shelling_max_facets)? {
        ShellingOutcome::Shelling => {
            println!("shell-check n={n}: {} facets, shelling", facets.len());
            Ok(())
        }
        ShellingOutcome::Failure(f) => {
            println!(
                "shell-check n={n}: {} facets, not a shelling at facet {} (earlier facet {}, shared {:?})",
                facets.len(),
                f.facet,
                f.earlier,
                f.shared
            );
            Err(Failure::Verification("shell-check failed".into()))
        }
    }
}

fn cmd_whitney(n: usize, json: Option<PathBuf>, dot: Option<PathBuf>, caps: &Caps) -> Outcome {
    caps.check("whitney", n, WHITNEY_CAP)?;
    let p = build(n, caps)?;
    let q = WhitneyDual::build_with(&p, &caps.limits(n))?;
    println!(
        "Q_{n}: {} classes of {} chains, {} covers",
        q.len(),
        q.chains().len(),
        q.covers().len()
    );
    println!("rank polynomial: {}", q.rank_polynomial());
    println!(
        "characteristic polynomial: {}",
        q.characteristic_polynomial()
    );
    if let Some(path) = json {
        write_file(&path, &q.to_json())?;
    }
    if let Some(path) = dot {
        write_file(&path, &q.to_dot())?;
    }
    if whitney::verify_whitney_duality(&p, &q) {
        println!("whitney duality: ok");
        Ok(())
    } else {
        println!("whitney duality: FAILED");
        Err(Failure::Verification(
            "Whitney numbers are not exchanged".into(),
        ))
    }
}

fn cmd_tables(max_n: usize, caps: &Caps) -> Outcome {
    caps.check("tables", max_n, TABLES_CAP)?;
    let mut falling = Vec::new();
    let mut chains = Vec::new();
    for n in 1..=max_n {
        if n >= 8 {
            eprintln!("n = {n} ...");
        }
        falling.push(perm::count_falling_with(n, &caps.limits(n))?.to_string());
        chains.push(build(n, caps)?.count_maximal_chains().to_string());
    }
    println!("falling: {}", falling.join(" "));
    println!("chains: {}", chains.join(" "));
    Ok(())
}

fn cmd_csigma(s: &str, caps: &Caps) -> Outcome {
    let sigma = parse_perm(s)?;
    caps.check("csigma", sigma.len(), FALLING_CAP)?;
    let count = perm::count_c_sigma(&sigma);
    println!("|C_{sigma}| = {count}");
    let n = sigma.len();
    match sigma.as_siw0() {
        Some(i) if (2..n).contains(&i) => {
            let closed = perm::closed_form_siw0(n, i)?;
            if closed == count as i128 {
                println!("s_{i} w_0: closed form {closed}, agrees");
                Ok(())
            } else {
                println!("s_{i} w_0: closed form {closed}, DISAGREES");
                Err(Failure::Verification("closed form mismatch".into()))
            }
        }
        _ => Ok(()),
    }
}

fn threads(cli: Option<usize>) -> Result<Option<usize>, Failure> {
    if cli.is_some() {
        return Ok(cli);
    }
    match std::env::var("LPMQ_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("LPMQ_THREADS={v:?} is not a number"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(k) = threads(cli.threads)? {
        if k == 0 {
            return Err(Failure::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let caps = Caps {
        force: cli.force,
        cap: cli.cap,
    };
    match cli.command {
        Command::Poset {
            n,
            input,
            json,
            dot,
        } => cmd_poset(n, input, json, dot, &caps),
        Command::Mobius { n, from, to } => cmd_mobius(n, from, to, &caps),
        Command::Falling { n, list, sigma } => cmd_falling(n, list, sigma, &caps),
        Command::ElCheck {
            n,
            linearization,
            report,
        } => cmd_el_check(n, linearization, report, &caps),
        Command::EwCheck { n, report } => cmd_ew_check(n, report, &caps),
        Command::ShellCheck { n, linearization } => cmd_shell_check(n, linearization, &caps),
        Command::Whitney { n, json, dot } => cmd_whitney(n, json, dot, &caps),
        Command::Tables { max_n } => cmd_tables(max_n, &caps),
        Command::Csigma { perm } => cmd_csigma(&perm, &caps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => Cli::command().error(ErrorKind::ValueValidation, msg).exit(),
    }
}
