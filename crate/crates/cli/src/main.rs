//! `bgg`: BGG maps, bundle cohomology and dimension tables from the command line.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use bgg_core::report::{self, DimensionTable, Format, TableRow};
use bgg_core::weyl::DEFAULT_ENUM_BUDGET;
use bgg_core::{BggComplex, BggSetup, CartanType, CohomologyEngine, ModuleSpec, Weight, WeightModule};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "bgg", version, about = "Explicit BGG resolutions and flag-variety cohomology")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Run the jobs of a TOML file (one `[[job]]` table per job).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Suppress progress lines on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Print every Verma module map of the BGG resolution of L(λ).
    Maps(MapsArgs),
    /// Compute H^•(G/P, E) as a sum of irreducibles.
    Cohomology(CohomologyArgs),
    /// Tabulate dim H^0(G/P, ∧^k T) over k and parabolics.
    Table(TableArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Cartan type, e.g. A3, B2, G2.
    #[arg(long = "type", short = 't')]
    cartan_type: String,

    /// Output format: json, csv, latex or text.
    #[arg(long, short, default_value = "text")]
    format: String,

    /// Seed of the sign assignment.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Largest Weyl group that will be enumerated.
    #[arg(long, env = "BGG_ENUM_BUDGET", default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: usize,
}

#[derive(Args, Debug, Clone)]
struct MapsArgs {
    #[command(flatten)]
    common: Common,

    /// Dominant weight in simple-root coordinates, e.g. 2,3.
    #[arg(long, short, allow_hyphen_values = true)]
    lambda: String,

    /// Only print maps that are not a single monomial.
    #[arg(long)]
    nontrivial: bool,
}

#[derive(Args, Debug, Clone)]
struct CohomologyArgs {
    #[command(flatten)]
    common: Common,

    /// Module spec, e.g. "wedge(u,2)" or "tensor(u,3)".
    #[arg(long, short)]
    module: String,

    /// Levi simple roots of the parabolic, e.g. 1,3. Empty for G/B.
    #[arg(long, short, default_value = "")]
    parabolic: String,

    /// Worker threads; 0 uses all cores.
    #[arg(long, short, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug, Clone)]
struct TableArgs {
    #[command(flatten)]
    common: Common,

    /// A row's parabolic (repeatable); `-` is the full flag variety.
    /// Defaults to every proper subset of the simple roots.
    #[arg(long, short, allow_hyphen_values = true)]
    parabolic: Vec<String>,

    /// Module with `k` as the exterior power placeholder.
    #[arg(long, short, default_value = "wedge(u,k)")]
    module: String,

    /// Worker threads; 0 uses all cores.
    #[arg(long, short, default_value_t = 0)]
    jobs: usize,

    /// Largest k; by default k runs until the module vanishes.
    #[arg(long)]
    kmax: Option<usize>,
}

/// A `[[job]]` table of a config file.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct Job {
    command: String,
    #[serde(rename = "type")]
    cartan_type: String,
    #[serde(default)]
    module: Option<String>,
    #[serde(default)]
    lambda: Option<String>,
    /// For `cohomology` a single subset; for `table` a list of rows.
    #[serde(default)]
    parabolic: Option<toml::Value>,
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    jobs: Option<usize>,
    #[serde(default)]
    budget: Option<usize>,
    #[serde(default)]
    nontrivial: Option<bool>,
    #[serde(default)]
    kmax: Option<usize>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    job: Vec<Job>,
}

/// Errors that map to a distinct exit status.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Verification(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<i64>> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    if t.trim().is_empty() || t.trim() == "-" {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .with_context(|| format!("invalid {what} `{s}`: `{}` is not an integer", x.trim()))
        })
        .collect()
}

fn parse_parabolic(s: &str, rank: usize) -> Result<Vec<usize>> {
    let mut v = Vec::new();
    for i in parse_list(s, "parabolic")? {
        if i < 1 || i as usize > rank {
            bail!("parabolic entry {i} is not a simple root index in 1..={rank}");
        }
        v.push(i as usize);
    }
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn setup(c: &Common) -> Result<(Arc<BggSetup>, Format), Failure> {
    let t: CartanType = c.cartan_type.parse().map_err(|e| Failure::Usage(anyhow!("{e}")))?;
    let format: Format = c.format.parse().map_err(|e: String| Failure::Usage(anyhow!(e)))?;
    info!("setting up {t}");
    let s = BggSetup::new(t, c.budget, c.seed).map_err(|e| Failure::Other(e.into()))?;
    info!(
        "{t}: |W| = {}, {} edges, {} squares",
        s.weyl.len(),
        s.graph.edges.len(),
        s.graph.squares.len()
    );
    Ok((Arc::new(s), format))
}

fn cmd_maps(a: &MapsArgs) -> Result<String, Failure> {
    let (s, format) = setup(&a.common)?;
    let coords = parse_list(&a.lambda, "λ").map_err(Failure::Usage)?;
    let coords: Vec<i32> = coords.into_iter().map(|x| x as i32).collect();
    let lambda = Weight::from_slice(&coords);
    let mut c = BggComplex::new(s.clone(), lambda.clone()).map_err(|e| Failure::Usage(e.into()))?;
    c.compute_all_maps().map_err(|e| Failure::Other(e.into()))?;
    let comm = c.verify_commutation();
    let d2 = c.verify_d_squared();
    if !comm.passed() || !d2.passed() {
        return Err(Failure::Verification(format!(
            "verification failed for λ = {lambda}: commutation {comm:?}, d² {d2:?}"
        )));
    }
    info!("{} squares commute and d² = 0", d2.squares_checked);
    let mut records = c.map_records().map_err(|e| Failure::Other(e.into()))?;
    if a.nontrivial {
        records.retain(|r| r.terms > 1);
    }
    Ok(report::render_maps(
        &s.rs.cartan_type.to_string(),
        &lambda.to_string(),
        &records,
        format,
    ))
}

fn build_module(s: &BggSetup, spec: &str, levi: &[usize]) -> Result<WeightModule, Failure> {
    let spec: ModuleSpec = spec.parse().map_err(|e| Failure::Usage(anyhow!("{e}")))?;
    WeightModule::build(&s.rs, &s.consts, &spec, levi).map_err(|e| Failure::Usage(anyhow!("{e}")))
}

fn cmd_cohomology(a: &CohomologyArgs) -> Result<String, Failure> {
    let (s, format) = setup(&a.common)?;
    let levi = parse_parabolic(&a.parabolic, s.rs.rank()).map_err(Failure::Usage)?;
    let m = build_module(&s, &a.module, &levi)?;
    info!("module {} has dimension {}", m.spec, m.dim());
    let r = CohomologyEngine::new(s.clone(), Arc::new(m), levi)
        .with_jobs(a.jobs)
        .full_cohomology()
        .map_err(|e| Failure::Other(e.into()))?;
    if let Some(l) = r.per_lambda.iter().find(|l| !l.euler_characteristic_holds()) {
        return Err(Failure::Verification(format!("Euler characteristic fails at λ = {}", l.lambda)));
    }
    Ok(report::render_cohomology(&r, format))
}

/// Proper subsets of the simple roots, by size then lexicographically.
fn all_parabolics(rank: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..(1 << rank) - 1)
        .map(|mask| (1..=rank).filter(|i| mask >> (i - 1) & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn cmd_table(a: &TableArgs) -> Result<String, Failure> {
    let (s, format) = setup(&a.common)?;
    if !a.module.contains('k') {
        return Err(Failure::Usage(anyhow!("the table module must contain the placeholder `k`")));
    }
    let rows: Vec<Vec<usize>> = if a.parabolic.is_empty() {
        all_parabolics(s.rs.rank())
    } else {
        a.parabolic
            .iter()
            .map(|p| parse_parabolic(p, s.rs.rank()))
            .collect::<Result<_>>()
            .map_err(Failure::Usage)?
    };
    let mut table = DimensionTable {
        cartan_type: s.rs.cartan_type.to_string(),
        module: a.module.clone(),
        rows: Vec::new(),
    };
    for levi in rows {
        let mut dims = Vec::new();
        let mut higher_vanish = true;
        for k in 0..=a.kmax.unwrap_or(usize::MAX) {
            // the placeholder is the only standalone `k` in the spec
            let spec = substitute_k(&a.module, k);
            let m = build_module(&s, &spec, &levi)?;
            if m.dim() == 0 {
                break;
            }
            let r = CohomologyEngine::new(s.clone(), Arc::new(m), levi.clone())
                .with_jobs(a.jobs)
                .full_cohomology()
                .map_err(|e| Failure::Other(e.into()))?;
            if let Some(l) = r.per_lambda.iter().find(|l| !l.euler_characteristic_holds()) {
                return Err(Failure::Verification(format!("Euler characteristic fails at λ = {}", l.lambda)));
            }
            if r.dims_by_degree[1..].iter().any(|&d| d > 0) {
                higher_vanish = false;
                log::warn!("{spec} on P({levi:?}) has higher cohomology {:?}", r.dims_by_degree);
            }
            info!("{} P({levi:?}) k={k}: {:?}", s.rs.cartan_type, r.dims_by_degree);
            dims.push(r.dims_by_degree[0]);
        }
        // trailing zero columns are omitted
        while dims.last() == Some(&0) {
            dims.pop();
        }
        table.rows.push(TableRow {
            parabolic: levi,
            dims,
            higher_vanish,
        });
    }
    Ok(report::render_table(&table, format))
}

fn substitute_k(spec: &str, k: usize) -> String {
    let chars: Vec<char> = spec.chars().collect();
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let word = |j: Option<&char>| j.is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
        if c == 'k' && !word(i.checked_sub(1).and_then(|j| chars.get(j))) && !word(chars.get(i + 1)) {
            out.push_str(&k.to_string());
        } else {
            out.push(c);
        }
    }
    out
}

fn job_to_command(j: &Job) -> Result<Command> {
    let common = Common {
        cartan_type: j.cartan_type.clone(),
        format: j.format.clone().unwrap_or_else(|| "text".into()),
        seed: j.seed.unwrap_or(0),
        budget: j.budget.unwrap_or_else(|| {
            std::env::var("BGG_ENUM_BUDGET")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(DEFAULT_ENUM_BUDGET)
        }),
    };
    let subset = |v: &toml::Value| -> Result<String> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Array(a) => {
                let parts: Result<Vec<String>> = a
                    .iter()
                    .map(|x| x.as_integer().map(|i| i.to_string()).ok_or_else(|| anyhow!("parabolic entries must be integers")))
                    .collect();
                Ok(parts?.join(","))
            }
            _ => bail!("parabolic must be a string or an array"),
        }
    };
    Ok(match j.command.as_str() {
        "maps" => Command::Maps(MapsArgs {
            common,
            lambda: j.lambda.clone().ok_or_else(|| anyhow!("maps job needs `lambda`"))?,
            nontrivial: j.nontrivial.unwrap_or(false),
        }),
        "cohomology" => Command::Cohomology(CohomologyArgs {
            common,
            module: j.module.clone().ok_or_else(|| anyhow!("cohomology job needs `module`"))?,
            parabolic: j.parabolic.as_ref().map(subset).transpose()?.unwrap_or_default(),
            jobs: j.jobs.unwrap_or(0),
        }),
        "table" => {
            let parabolic = match &j.parabolic {
                None => Vec::new(),
                Some(toml::Value::Array(rows)) if rows.iter().all(|r| r.is_array() || r.is_str()) => {
                    rows.iter().map(subset).collect::<Result<_>>()?
                }
                Some(v) => vec![subset(v)?],
            };
            let parabolic = parabolic
                .into_iter()
                .map(|p| if p.is_empty() { "-".to_string() } else { p })
                .collect();
            Command::Table(TableArgs {
                common,
                parabolic,
                module: j.module.clone().unwrap_or_else(|| "wedge(u,k)".into()),
                jobs: j.jobs.unwrap_or(0),
                kmax: j.kmax,
            })
        }
        other => bail!("unknown command `{other}`; expected maps, cohomology or table"),
    })
}

fn run_command(c: &Command) -> Result<String, Failure> {
    match c {
        Command::Maps(a) => cmd_maps(a),
        Command::Cohomology(a) => cmd_cohomology(a),
        Command::Table(a) => cmd_table(a),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut commands = Vec::new();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::Usage)?;
        let cfg: ConfigFile = toml::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(Failure::Usage)?;
        for (i, j) in cfg.job.iter().enumerate() {
            commands.push(job_to_command(j).with_context(|| format!("job {}", i + 1)).map_err(Failure::Usage)?);
        }
    }
    if let Some(c) = &cli.command {
        commands.push(c.clone());
    }
    if commands.is_empty() {
        return Err(Failure::Usage(anyhow!("nothing to do: give a subcommand or --config")));
    }
    for c in &commands {
        print!("{}", run_command(c)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_parabolics() {
        assert_eq!(parse_list("2,-1", "λ").unwrap(), vec![2, -1]);
        assert_eq!(parse_list("[1, 2]", "λ").unwrap(), vec![1, 2]);
        assert!(parse_list("1,x", "λ").is_err());
        assert_eq!(parse_parabolic("3,1,1", 3).unwrap(), vec![1, 3]);
        assert_eq!(parse_parabolic("-", 3).unwrap(), Vec::<usize>::new());
        assert!(parse_parabolic("4", 3).is_err());
        assert_eq!(all_parabolics(2), vec![vec![], vec![1], vec![2]]);
        assert_eq!(all_parabolics(3).len(), 7);
    }

    #[test]
    fn placeholder_substitution() {
        assert_eq!(substitute_k("wedge(u,k)", 3), "wedge(u,3)");
        assert_eq!(substitute_k("wedge(u_p[1],k) * sym(n,k)", 2), "wedge(u_p[1],2) * sym(n,2)");
    }

    #[test]
    fn config_jobs() {
        let cfg: ConfigFile = toml::from_str(
            r#"
            [[job]]
            command = "table"
            type = "B2"
            parabolic = [[], [1], "2"]
            format = "csv"

            [[job]]
            command = "cohomology"
            type = "G2"
            module = "wedge(u,2)"
            parabolic = [1]
            "#,
        )
        .unwrap();
        match job_to_command(&cfg.job[0]).unwrap() {
            Command::Table(t) => assert_eq!(t.parabolic, vec!["-", "1", "2"]),
            other => panic!("{other:?}"),
        }
        match job_to_command(&cfg.job[1]).unwrap() {
            Command::Cohomology(c) => assert_eq!(c.parabolic, "1"),
            other => panic!("{other:?}"),
        }
    }
}
