use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weightlab_cli::sweep::{corpus, generate, sweep, Family};
use weightlab_cli::{exit_code, load, run_command, CliError, Command, OrbitSpec, Params, Report};
use weightlab_core::psi::PsiMode;
use weightlab_core::scat::{parse_subset, Subset};

#[derive(Parser)]
#[command(name = "weightlab", version, about = "Exact checks for nilpotent orbits and their weight complexes")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct CheckArgs {
    /// Orbit spec (JSON).
    orbit: PathBuf,
    /// Index subset J, e.g. 1,2.
    #[arg(long)]
    subset: Option<String>,
    /// Weight index r.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<i64>,
    /// Index subset K, e.g. 1,2.
    #[arg(short = 'K', value_name = "K")]
    k: Option<String>,
    /// Multiplicities n_i, e.g. 1,2.
    #[arg(long)]
    multiplicities: Option<String>,
    /// Weight convention for the nearby-cycles complex.
    #[arg(long, value_parser = ["kernel", "cokernel"])]
    mode: Option<String>,
    /// Write the full JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Test hook: damage one weight filtration so the sweep must fail.
    #[arg(long, hide = true)]
    corrupt_filtration: bool,
}

#[derive(Args)]
struct GenArgs {
    /// jordan or tensor
    family: String,
    /// Block or factor sizes, e.g. 2,2.
    sizes: String,
    /// Conjugate by a random basis change with this seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    multiplicities: Option<String>,
    /// Write the spec here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weight filtrations W^J with axiom, relativity and coefficient checks.
    Weight(CheckArgs),
    /// Decomposition checks for the filtrations W^J, J ⊆ A (A from --subset).
    Keylemma(CheckArgs),
    /// Compare the logarithmic complex with the Koszul complex.
    Omega(CheckArgs),
    /// Graded pieces of the weight filtration against the C-complexes.
    Graded(CheckArgs),
    /// Purity of the C-complexes.
    Purity(CheckArgs),
    /// Graded decomposition, T-embeddings and elementary complexes.
    Decompose(CheckArgs),
    /// W_-1 against the intersection complex.
    Ic(CheckArgs),
    /// Build the nearby-cycles model and check its weight structure.
    PsiBuild(CheckArgs),
    /// Monodromy weight filtration checks.
    PsiMonodromy(CheckArgs),
    /// Acyclicity of the A-complexes.
    PsiAcyclic(CheckArgs),
    /// Every check above.
    All(CheckArgs),
    /// Run `all` over the generated corpus.
    Sweep(SweepArgs),
    /// Print an orbit spec from a generator.
    Gen(GenArgs),
}

fn parse_list<T: std::str::FromStr>(text: &str, flag: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| CliError::Input(format!("{flag}: cannot parse {s:?}"))))
        .collect()
}

fn subset(text: &Option<String>, n: usize, flag: &str) -> Result<Option<Subset>, CliError> {
    text.as_deref()
        .map(|t| parse_subset(t, n).map_err(|e| CliError::Input(format!("{flag}: {e}"))))
        .transpose()
}

fn write_report(report: &Report, path: &Option<PathBuf>) -> Result<(), CliError> {
    for r in &report.records {
        println!("{}", r.summary());
    }
    let failed = report.records.iter().filter(|r| !r.passed()).count();
    println!("{} records, {failed} failed, digest {}", report.records.len(), report.digest);
    if let Some(p) = path {
        std::fs::write(p, report.to_json()).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn check(command: Command, a: &CheckArgs) -> Result<i32, CliError> {
    let parsed = load(&a.orbit)?;
    let n = parsed.orbit.n_indices();
    let params = Params {
        subset: subset(&a.subset, n, "--subset")?,
        r: a.r,
        k: subset(&a.k, n, "-K")?,
        multiplicities: a.multiplicities.as_deref().map(|m| parse_list(m, "--multiplicities")).transpose()?,
        mode: a.mode.as_deref().map(|m| m.parse::<PsiMode>()).transpose()?,
        seed: a.seed,
        corrupt_filtration: false,
    };
    let records = run_command(command, &parsed.orbit, parsed.multiplicities.as_deref(), &params)?;
    let report = Report::new(command.name(), OrbitSpec::digest(&parsed), records);
    write_report(&report, &a.report)?;
    Ok(exit_code(&report))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (command, args) = match cli.command {
        Cmd::Weight(a) => (Command::Weight, a),
        Cmd::Keylemma(a) => (Command::KeyLemma, a),
        Cmd::Omega(a) => (Command::Omega, a),
        Cmd::Graded(a) => (Command::Graded, a),
        Cmd::Purity(a) => (Command::Purity, a),
        Cmd::Decompose(a) => (Command::Decompose, a),
        Cmd::Ic(a) => (Command::Ic, a),
        Cmd::PsiBuild(a) => (Command::PsiBuild, a),
        Cmd::PsiMonodromy(a) => (Command::PsiMonodromy, a),
        Cmd::PsiAcyclic(a) => (Command::PsiAcyclic, a),
        Cmd::All(a) => (Command::All, a),
        Cmd::Sweep(a) => {
            let params = Params { seed: a.seed, corrupt_filtration: a.corrupt_filtration, ..Params::default() };
            let report = sweep(&corpus(a.seed)?, &params)?;
            write_report(&report, &a.report)?;
            return Ok(exit_code(&report));
        }
        Cmd::Gen(a) => {
            let family: Family = a.family.parse()?;
            let sizes: Vec<usize> = parse_list(&a.sizes, "sizes")?;
            let orbit = generate(family, &sizes, a.seed)?;
            let mults = a.multiplicities.as_deref().map(|m| parse_list(m, "--multiplicities")).transpose()?;
            let text = OrbitSpec::from_orbit(&orbit, mults).to_json() + "\n";
            match &a.out {
                Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
                None => print!("{text}"),
            }
            return Ok(0);
        }
    };
    check(command, &args)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("weightlab: {e}");
            ExitCode::from(2)
        }
    }
}
