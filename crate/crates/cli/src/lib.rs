//! Command-line front end for the `multbasis` library.
//!
//! [`run`] parses arguments (optionally merged with a `--config` TOML file),
//! loads every referenced file, calls the library and renders the result.
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use multbasis::catalog::{self, ConstructionName};
use multbasis::integer_sets::{MultiplicativeSystem, SetDescription};
use multbasis::primes;
use multbasis::ramsey::{self, Coloring};
use multbasis::repcount::{self, CountOptions};
use multbasis::set_partitions::{self, FamilyDescription};
use multbasis::squarefree_map;
use multbasis::witness::{self, SearchBudget, Strategy, WitnessOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    SquarefreeRich,
    ExhaustiveScan,
    Hybrid,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::SquarefreeRich => Strategy::SquarefreeRich,
            StrategyArg::ExhaustiveScan => Strategy::ExhaustiveScan,
            StrategyArg::Hybrid => Strategy::Hybrid,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "multbasis",
    version,
    about = "Multiplicative representation counts, named constructions and finite Ramsey extraction"
)]
struct Cli {
    /// TOML run configuration supplying the command and its arguments
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized modes
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Command>,
}

/// Systems are either a shorthand (`fundamental:h=2`, `one-t:h=2,t=3`,
/// `one-inf:h=2`, `s-inf:h=3,s=2`, `naturals:h=2`) or a TOML file path.
#[derive(Subcommand, Debug)]
enum Command {
    /// Representation count of one integer, with the first tuples
    Count {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = repcount::DEFAULT_TUPLE_CAP)]
        tuple_cap: usize,
        #[arg(long, default_value_t = primes::DEFAULT_TRIAL_BOUND)]
        trial_bound: u64,
    },
    /// Counts over a window [lo, hi] and their extremes
    Window {
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 2)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Closed form against brute force for a named construction
    CatalogVerify {
        #[arg(long)]
        construction: String,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
    /// Realisable (liminf, limsup) pairs with their constructions
    MhTable {
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 3)]
        t_max: u64,
    },
    /// Search for an integer with at least `target` representations
    Witness {
        #[arg(long)]
        system: String,
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = SearchBudget::default().max_n)]
        max_n: u64,
        #[arg(long, default_value_t = SearchBudget::default().max_candidates)]
        max_candidates: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Hybrid)]
        strategy: StrategyArg,
    },
    /// Homogeneous subset (--m) or iterated chain (--sizes)
    Ramsey {
        /// Coloring file; repeat once per level k = 0..K with --sizes
        #[arg(long)]
        coloring: Vec<PathBuf>,
        /// Random colorings on {1..N} instead of files
        #[arg(long)]
        random_ground: Option<u64>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        colors: u32,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = ramsey::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Ordered factorizations of a squarefree q, or ordered covers of a set
    Partitions {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 2)]
        h: usize,
        #[arg(long, value_delimiter = ',')]
        set: Vec<u64>,
        /// `card:K[,K...]`, once per slot
        #[arg(long)]
        family: Vec<String>,
        /// TOML file with `families = [...]`
        #[arg(long)]
        families: Option<PathBuf>,
        /// Covers listed (the count is always exact)
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// Compare g(q) with the cover count of its prime set
    Correspond {
        #[arg(long)]
        system: String,
        #[arg(long)]
        q: u64,
        /// Universe of primes up to this bound (default: the primes of q)
        #[arg(long)]
        universe_max: Option<u64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    command: String,
    format: Option<Format>,
    seed: Option<u64>,
    #[serde(default)]
    args: toml::Table,
}

/// Exit status and the text written to each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Library(multbasis::Error),
}

impl From<multbasis::Error> for Failure {
    fn from(e: multbasis::Error) -> Self {
        Failure::Library(e)
    }
}

type Res<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Output {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match execute(cli) {
        Ok((code, stdout)) => Output {
            code,
            stdout,
            stderr: if code == 1 {
                "verification failed\n".into()
            } else {
                String::new()
            },
        },
        Err(Failure::Usage(msg)) => Output {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Library(e)) => Output {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn toml_to_arg(key: &str, value: &toml::Value, out: &mut Vec<String>) -> Res<()> {
    let flag = format!("--{}", key.replace('_', "-"));
    match value {
        toml::Value::Boolean(true) => out.push(flag),
        toml::Value::Boolean(false) => {}
        toml::Value::Array(items) => {
            for item in items {
                toml_to_arg(key, item, out)?;
            }
        }
        toml::Value::String(s) => out.extend([flag, s.clone()]),
        toml::Value::Integer(i) => out.extend([flag, i.to_string()]),
        other => {
            return Err(usage(format!(
                "config argument {key}: unsupported value {other}"
            )))
        }
    }
    Ok(())
}

/// Merges the config file (if any) with the command line; command-line
/// `--format` and `--seed` take precedence.
fn resolve(cli: Cli) -> Res<(Command, Format, u64)> {
    let Some(path) = cli.config else {
        let command = cli
            .command
            .ok_or_else(|| usage("no command given; see --help"))?;
        return Ok((
            command,
            cli.format.unwrap_or(Format::Text),
            cli.seed.unwrap_or(0),
        ));
    };
    if cli.command.is_some() {
        return Err(usage(
            "give the command either in --config or on the command line, not both",
        ));
    }
    let text = read(&path)?;
    let config: RunConfig =
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut argv = vec!["multbasis".to_string(), config.command.clone()];
    for (key, value) in &config.args {
        toml_to_arg(key, value, &mut argv)?;
    }
    let parsed = Cli::try_parse_from(&argv)
        .map_err(|e| usage(format!("{}: {}", path.display(), e.render())))?;
    let command = parsed
        .command
        .ok_or_else(|| usage("config has no command"))?;
    let format = cli.format.or(config.format).unwrap_or(Format::Text);
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    Ok((command, format, seed))
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_system(arg: &str) -> Res<MultiplicativeSystem> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        return toml::from_str(&text).map_err(|e| usage(format!("{arg}: {e}")));
    }
    if let Some(params) = arg.strip_prefix("naturals:") {
        let h = params
            .strip_prefix("h=")
            .and_then(|h| h.parse::<usize>().ok())
            .ok_or_else(|| usage(format!("expected naturals:h=<order>, got {arg:?}")))?;
        return Ok(MultiplicativeSystem::basis(SetDescription::AllNaturals, h)?);
    }
    let name: ConstructionName = arg.parse().map_err(|e| {
        usage(format!(
            "system {arg:?} is neither a file nor a shorthand: {e}"
        ))
    })?;
    Ok(catalog::build(name)?.system)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamiliesFile {
    families: Vec<FamilyDescription>,
}

fn parse_family(arg: &str) -> Res<FamilyDescription> {
    let sizes = arg
        .strip_prefix("card:")
        .ok_or_else(|| usage(format!("family {arg:?}: expected card:K[,K...]")))?;
    let sizes = sizes
        .split(',')
        .map(|k| k.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("family {arg:?}: {e}")))?;
    Ok(FamilyDescription::by_cardinality(sizes))
}

fn csv_string<R: Serialize>(
    rows: impl IntoIterator<Item = R>,
    header: Option<&[&str]>,
) -> Res<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(header.is_none())
        .from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).map_err(|e| usage(e.to_string()))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn tuple_text(t: &[u64]) -> String {
    let items: Vec<String> = t.iter().map(u64::to_string).collect();
    format!("({})", items.join(", "))
}

fn set_text(s: &[u64]) -> String {
    let items: Vec<String> = s.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn block_header(h: usize) -> Vec<String> {
    (1..=h).map(|i| format!("block_{i}")).collect()
}

fn execute(cli: Cli) -> Res<(i32, String)> {
    let (command, format, seed) = resolve(cli)?;
    match command {
        Command::Count {
            system,
            n,
            tuple_cap,
            trial_bound,
        } => {
            let system = load_system(&system)?;
            let opts = CountOptions {
                tuple_cap,
                trial_bound,
            };
            let w = repcount::count_system_reps_with(&system, n, &opts)?;
            let out = match format {
                Format::Json => json_string(&w),
                Format::Csv => csv_string([(w.n, w.count)], Some(&["n", "count"]))?,
                Format::Text => {
                    let mut s = format!("system = {system}\nn = {}\ncount = {}\n", w.n, w.count);
                    if !w.tuples.is_empty() {
                        let more = if w.truncated { " (truncated)" } else { "" };
                        writeln!(s, "tuples{more}:").unwrap();
                        for t in &w.tuples {
                            writeln!(s, "  {}", tuple_text(t)).unwrap();
                        }
                    }
                    s
                }
            };
            Ok((0, out))
        }
        Command::Window { system, lo, hi } => {
            let system = load_system(&system)?;
            let out = match format {
                Format::Csv => {
                    let counts = repcount::scan_counts(&system, lo, hi)?;
                    csv_string(counts, Some(&["n", "count"]))?
                }
                Format::Json => json_string(&repcount::window_stats(&system, lo, hi)?),
                Format::Text => {
                    let w = repcount::window_stats(&system, lo, hi)?;
                    format!(
                        "system = {system}\nwindow evidence [{}, {}]: min {} at n={}, max {} at n={}\n",
                        w.lo, w.hi, w.min_count, w.argmin, w.max_count, w.argmax
                    )
                }
            };
            Ok((0, out))
        }
        Command::CatalogVerify {
            construction,
            n_max,
        } => {
            let name: ConstructionName = construction.parse()?;
            let report = catalog::verify(&catalog::build(name)?, n_max)?;
            let out = match format {
                Format::Text => report.to_text(),
                Format::Csv => csv_string(&report.rows, None)?,
                Format::Json => json_string(&report),
            };
            Ok((if report.passed() { 0 } else { 1 }, out))
        }
        Command::MhTable { h, t_max } => {
            let rows = catalog::mh_table(h, t_max)?;
            let out = match format {
                Format::Json => json_string(&rows),
                Format::Csv => csv_string(
                    rows.iter()
                        .map(|r| (r.s, r.t.to_string(), r.construction.to_string())),
                    Some(&["s", "t", "construction"]),
                )?,
                Format::Text => {
                    let mut s = String::new();
                    for r in &rows {
                        writeln!(s, "({}, {})  {}", r.s, r.t, r.construction).unwrap();
                    }
                    s
                }
            };
            Ok((0, out))
        }
        Command::Witness {
            system,
            target,
            max_n,
            max_candidates,
            strategy,
        } => {
            let system = load_system(&system)?;
            let budget = SearchBudget {
                max_candidates,
                max_n,
                strategy: strategy.into(),
            };
            let outcome = witness::find_witness(&system, target, &budget)?;
            let out = match format {
                Format::Json => json_string(&outcome),
                Format::Csv => match &outcome {
                    WitnessOutcome::Found {
                        witness,
                        candidates_tried,
                        ..
                    } => csv_string(
                        [(true, witness.n, witness.count, candidates_tried)],
                        Some(&["found", "n", "count", "candidates_tried"]),
                    )?,
                    WitnessOutcome::NotFound {
                        candidates_tried,
                        max_count_seen,
                        argmax,
                    } => csv_string(
                        [(false, argmax, max_count_seen, candidates_tried)],
                        Some(&["found", "n", "count", "candidates_tried"]),
                    )?,
                },
                Format::Text => match &outcome {
                    WitnessOutcome::Found {
                        witness,
                        candidates_tried,
                        guarantee,
                    } => format!(
                        "found n = {} with count {} (target {target})\ncandidates tried: {candidates_tried}\nguarantee: {guarantee:?}\n",
                        witness.n, witness.count
                    ),
                    WitnessOutcome::NotFound {
                        candidates_tried,
                        max_count_seen,
                        argmax,
                    } => format!(
                        "none (target {target})\ncandidates tried: {candidates_tried}\nmax count seen: {max_count_seen}{}\n",
                        argmax.map(|n| format!(" at n = {n}")).unwrap_or_default()
                    ),
                },
            };
            Ok((0, out))
        }
        Command::Ramsey {
            coloring,
            random_ground,
            k,
            colors,
            m,
            sizes,
            budget,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let levels: Vec<Coloring> = match (random_ground, coloring.is_empty()) {
                (Some(_), false) => return Err(usage("give either --coloring or --random-ground")),
                (None, true) => return Err(usage("give --coloring or --random-ground")),
                (None, false) => coloring
                    .iter()
                    .map(|p| Coloring::parse(&read(p)?).map_err(Failure::from))
                    .collect::<Res<_>>()?,
                (Some(n), true) => {
                    let ground: Vec<u64> = (1..=n).collect();
                    let ks: Vec<usize> = if sizes.is_empty() {
                        vec![k]
                    } else {
                        (0..sizes.len()).collect()
                    };
                    ks.into_iter()
                        .map(|k| {
                            Coloring::random(ground.clone(), k, colors, &mut rng)
                                .map_err(Failure::from)
                        })
                        .collect::<Res<_>>()?
                }
            };
            match (m, sizes.is_empty()) {
                (Some(m), true) => {
                    let [c] = levels.as_slice() else {
                        return Err(usage("--m takes exactly one coloring"));
                    };
                    let found = ramsey::find_homogeneous_within(c, c.ground(), m, budget)?;
                    if let Some(h) = &found {
                        if ramsey::homogeneous_color(c, &h.subset) != Some(h.color) {
                            return Ok((1, "checker rejected the subset\n".into()));
                        }
                    }
                    let out = match (format, &found) {
                        (Format::Json, _) => json_string(&found),
                        (Format::Csv, Some(h)) => csv_string(
                            [(set_text(&h.subset), h.color)],
                            Some(&["subset", "color"]),
                        )?,
                        (Format::Csv, None) => "subset,color\n".into(),
                        (Format::Text, Some(h)) => {
                            format!("subset: {}\ncolor: {}\n", set_text(&h.subset), h.color)
                        }
                        (Format::Text, None) => "none\n".into(),
                    };
                    Ok((0, out))
                }
                (None, false) => {
                    let chain = ramsey::iterated_chain_with_budget(&levels, &sizes, budget)?;
                    if let Some(c) = &chain {
                        if !ramsey::verify_chain(&levels, c) {
                            return Ok((1, "checker rejected the chain\n".into()));
                        }
                    }
                    let out = match (format, &chain) {
                        (Format::Json, _) => json_string(&chain),
                        (Format::Csv, Some(c)) => csv_string(
                            c.subsets
                                .iter()
                                .zip(&c.epsilons)
                                .enumerate()
                                .map(|(k, (x, e))| (k, set_text(x), e)),
                            Some(&["k", "subset", "epsilon"]),
                        )?,
                        (Format::Csv, None) => "k,subset,epsilon\n".into(),
                        (Format::Text, Some(c)) => {
                            let mut s = String::new();
                            for (k, (x, e)) in c.subsets.iter().zip(&c.epsilons).enumerate() {
                                writeln!(s, "X_{k} = {}  epsilon_{k} = {e}", set_text(x)).unwrap();
                            }
                            s
                        }
                        (Format::Text, None) => "none\n".into(),
                    };
                    Ok((0, out))
                }
                _ => Err(usage("give exactly one of --m or --sizes")),
            }
        }
        Command::Partitions {
            q,
            h,
            set,
            family,
            families,
            cap,
        } => match q {
            Some(q) => {
                if !set.is_empty() || !family.is_empty() || families.is_some() {
                    return Err(usage("--q cannot be combined with --set or families"));
                }
                let parts = squarefree_map::factorizations_as_partitions(q, h)?;
                let rows: Vec<Vec<String>> = parts
                    .iter()
                    .map(|t| t.iter().map(|b| b.to_string()).collect())
                    .collect();
                let out = match format {
                    Format::Json => json_string(&parts),
                    Format::Csv => {
                        let header = block_header(h);
                        let header: Vec<&str> = header.iter().map(String::as_str).collect();
                        csv_string(&rows, Some(&header))?
                    }
                    Format::Text => {
                        let mut s =
                            format!("q = {q}, h = {h}: {} ordered factorizations\n", rows.len());
                        for r in &rows {
                            writeln!(s, "  ({})", r.join(", ")).unwrap();
                        }
                        s
                    }
                };
                Ok((0, out))
            }
            None => {
                let fams: Vec<FamilyDescription> = match (families, family.is_empty()) {
                    (Some(path), true) => {
                        let text = read(&path)?;
                        toml::from_str::<FamiliesFile>(&text)
                            .map_err(|e| usage(format!("{}: {e}", path.display())))?
                            .families
                    }
                    (None, false) => family.iter().map(|f| parse_family(f)).collect::<Res<_>>()?,
                    _ => return Err(usage("give either --family (repeated) or --families")),
                };
                let count = set_partitions::count_ordered_covers(&set, &fams)?;
                let listed = set_partitions::list_ordered_covers(&set, &fams, cap)?;
                let out = match format {
                    Format::Json => {
                        json_string(&serde_json::json!({ "count": count, "covers": listed }))
                    }
                    Format::Csv => {
                        let header = block_header(fams.len());
                        let header: Vec<&str> = header.iter().map(String::as_str).collect();
                        csv_string(
                            listed
                                .iter()
                                .map(|t| t.iter().map(|b| set_text(b)).collect::<Vec<_>>()),
                            Some(&header),
                        )?
                    }
                    Format::Text => {
                        let mut s = format!("set = {}: {count} ordered covers\n", set_text(&set));
                        for t in &listed {
                            let blocks: Vec<String> = t.iter().map(|b| set_text(b)).collect();
                            writeln!(s, "  ({})", blocks.join(", ")).unwrap();
                        }
                        if (listed.len() as u64) < count {
                            writeln!(s, "  ... {} more", count - listed.len() as u64).unwrap();
                        }
                        s
                    }
                };
                Ok((0, out))
            }
        },
        Command::Correspond {
            system,
            q,
            universe_max,
        } => {
            let system = load_system(&system)?;
            let universe = match universe_max {
                Some(u) => primes::sieve(u),
                None => squarefree_map::phi(q)?.primes().to_vec(),
            };
            let c = set_partitions::verify_correspondence(&system, q, &universe)?;
            let out = match format {
                Format::Json => json_string(&c),
                Format::Csv => csv_string([c], None)?,
                Format::Text => format!(
                    "q = {}\ng(q) = {}\nordered covers of phi(q) = {}\nequal: {}\n",
                    c.q, c.system_count, c.cover_count, c.equal
                ),
            };
            Ok((if c.equal { 0 } else { 1 }, out))
        }
    }
}
