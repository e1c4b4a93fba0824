use clap::{Arg, ArgMatches, Args, Command, FromArgMatches};
use mollify::harness::fixtures::{import_table, ingest_fixtures};
use mollify::harness::{Budgets, HarnessError, Registry, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Flags shared by every suite; each mirrors a key of the TOML config.
#[derive(Args, Debug, Default)]
struct Common {
    /// TOML file with the same keys as these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `Q` or `Q(sqrtD)`.
    #[arg(long)]
    field: Option<String>,
    /// Level norms, comma separated.
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Hecke indices for petersson-check.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// Mollifier exponent as a rational, e.g. `1/2`.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Polynomial coefficients from degree 0, e.g. `0,0,1,-1/6`.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// `plain` or `derivative`.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    /// `key=value` list: modulus_cap, prime_norm, box_norm, kloosterman_c,
    /// modulus_norm, instances, t_max.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra newform fixture file.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

impl Common {
    fn into_config(self) -> Result<RunConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.field {
            cfg.field = v;
        }
        if !self.q.is_empty() {
            cfg.q = self.q;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if !self.n.is_empty() {
            cfg.n = self.n;
        }
        cfg.delta = self.delta.or(cfg.delta);
        cfg.poly = self.poly.or(cfg.poly);
        cfg.alpha = self.alpha.or(cfg.alpha);
        cfg.kind = self.kind.or(cfg.kind);
        cfg.degree = self.degree.or(cfg.degree);
        if let Some(b) = self.budget {
            cfg.budget.overlay(&Budgets::parse(&b)?);
        }
        cfg.tol = self.tol.or(cfg.tol);
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.out = self.out.or(cfg.out);
        cfg.fixtures = self.fixtures.or(cfg.fixtures);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn cli(registry: &Registry) -> Command {
    let mut cmd = Command::new("mollify")
        .about("Desk checks for mollified moments of Hilbert modular L-functions")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about) in registry.describe() {
        cmd = cmd.subcommand(Common::augment_args(Command::new(name).about(about)));
    }
    cmd.subcommand(Common::augment_args(
        Command::new("run").about("run a suite by name").arg(Arg::new("suite").required(true)),
    ))
    .subcommand(Command::new("list").about("list the registered suites"))
    .subcommand(
        Command::new("ingest")
            .about("validate a newform fixture file")
            .arg(Arg::new("path").required(true).value_parser(clap::value_parser!(PathBuf))),
    )
    .subcommand(
        Command::new("import")
            .about("convert a `label level weight sign a_2 a_3 ...` table into fixture lines")
            .arg(Arg::new("input").required(true).value_parser(clap::value_parser!(PathBuf)))
            .arg(Arg::new("out").long("out").value_parser(clap::value_parser!(PathBuf))),
    )
}

fn run_named(registry: &Registry, name: &str, sub: &ArgMatches) -> Result<bool, HarnessError> {
    let common = Common::from_arg_matches(sub).map_err(|e| HarnessError::Config(e.to_string()))?;
    let cfg = common.into_config()?;
    let start = Instant::now();
    let report = registry.run(name, &cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
            report.write_csv(std::io::BufWriter::new(file), true)?;
        }
        None => report.write_csv(std::io::stdout().lock(), true)?,
    }
    eprintln!(
        "{name}: {} rows, {} failed, {:.2} s",
        report.rows.len(),
        report.failures(),
        start.elapsed().as_secs_f64()
    );
    Ok(report.passed())
}

fn dispatch(registry: &Registry, m: &ArgMatches) -> Result<bool, HarnessError> {
    match m.subcommand() {
        Some(("list", _)) => {
            for (name, about) in registry.describe() {
                println!("{name:<18} {about}");
            }
            Ok(true)
        }
        Some(("ingest", sub)) => {
            let path = sub.get_one::<PathBuf>("path").expect("required");
            let recs = ingest_fixtures(path)?;
            let mut ok = true;
            for r in &recs {
                let flags = if r.ramanujan_violations.is_empty() {
                    String::new()
                } else {
                    format!(" ramanujan-violations={}", r.ramanujan_violations.join(";"))
                };
                ok &= r.sign_consistent && r.ramanujan_violations.is_empty();
                println!(
                    "line {}: {} level {} weight {:?} sign {} (computed {}){flags}",
                    r.line,
                    r.form.label(),
                    r.form.record.level,
                    r.form.record.weight,
                    r.form.record.sign,
                    r.computed_sign
                );
            }
            Ok(ok)
        }
        Some(("import", sub)) => {
            let input = sub.get_one::<PathBuf>("input").expect("required");
            let text = std::fs::read_to_string(input).map_err(|e| HarnessError::Io(format!("{}: {e}", input.display())))?;
            let json = import_table(&text, &input.display().to_string())?;
            match sub.get_one::<PathBuf>("out") {
                Some(p) => std::fs::write(p, json).map_err(|e| HarnessError::Io(format!("{}: {e}", p.display())))?,
                None => print!("{json}"),
            }
            Ok(true)
        }
        Some(("run", sub)) => {
            let name = sub.get_one::<String>("suite").expect("required").clone();
            run_named(registry, &name, sub)
        }
        Some((name, sub)) => run_named(registry, name, sub),
        None => unreachable!("subcommand required"),
    }
}

fn main() -> ExitCode {
    let registry = Registry::standard();
    let matches = cli(&registry).get_matches();
    match dispatch(&registry, &matches) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
