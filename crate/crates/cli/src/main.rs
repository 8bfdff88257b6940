//! Batch driver: dimension and cover computations, composition, seeded
//! verification suites, and probe reports, with deterministic CSV/JSON
//! artifacts.
//!
//! Exit codes: 0 success, 1 configuration error, 2 a checked inequality was
//! violated (a genuine finding), 3 a budget or cap was exceeded (partial
//! results are still emitted, flagged).

mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use shatter_core::affine::{halfspace_union_shatter_search, UnionSearchConfig};
use shatter_core::bounds::{bound_report, BoundId, MaxInstance};
use shatter_core::class::{Measure, PartialClass};
use shatter_core::compose::{k_fold_max, MaxMode, MaxSpec};
use shatter_core::covering::{
    affine_cover_bound_probe, covering_number_with_cap, maurey_cover, maurey_size_bound,
    net_distance, CoverMethod, MetricSpec, PNorm,
};
use shatter_core::dims::{faat_dim_with_budget, fat_dim_with_budget, vc_dim_partial_with_budget};
use shatter_core::disambig::{
    greedy_disambiguation, min_vc_disambiguation_exact, singleton_disambiguation,
    ExactDisambigLimits,
};
use shatter_core::generate::{rng_for_instance, rng_from_seed};
use shatter_core::{Error, SampledClass, SearchBudget};

const GENERATOR: &str = concat!("shatter ", env!("CARGO_PKG_VERSION"));

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "shatter",
    version,
    about = "Exact combinatorial dimensions and covers of finite function classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest subset size the exact search examines.
    #[arg(long, default_value_t = 20)]
    max_subset: usize,
    /// Node cap for the exact search.
    #[arg(long, default_value_t = 10_000_000)]
    budget_nodes: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_subset: self.max_subset,
            max_nodes: self.budget_nodes,
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Exact shifted-margin dimension of a class file.
    Fat {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact zero-shift margin dimension of a class file.
    Faat {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// VC dimension of a partial class file.
    Vc {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Covering number of a class file.
    Cover {
        #[arg(long)]
        input: PathBuf,
        /// Norm index (>= 1) or "inf".
        #[arg(long)]
        p: String,
        #[arg(long)]
        t: f64,
        /// Measure file; uniform when omitted.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long, default_value_t = 20)]
        exact_cap: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Pointwise maximum over one function from each input class.
    Max {
        /// Component class files (shared domain).
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// Full cross-product cap.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        /// Draw this many tuples without replacement instead of the full
        /// product (requires --seed).
        #[arg(long)]
        sample_count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Disambiguate a partial class file.
    Disambiguate {
        #[arg(long)]
        input: PathBuf,
        /// exact, greedy, or singleton.
        #[arg(long, default_value = "exact")]
        method: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the seeded property suites; any violation exits with code 2.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: u64,
        /// Instances per randomized check.
        #[arg(long, default_value_t = 25)]
        trials: usize,
    },
    /// Slack report for the conjectured composition bound; never asserted.
    ProbeConjecture {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Search for sets shattered by unions of halfspaces.
    LowerBoundSearch {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        m_max: usize,
        #[arg(long, default_value_t = 500_000)]
        budget: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Build the sparse-average net for the basis of R^m and check coverage.
    Maurey {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::BudgetExceeded(_)) | Some(Error::CapExceeded(_)) => EXIT_BUDGET,
                _ => EXIT_CONFIG,
            };
            ExitCode::from(code)
        }
    }
}

fn write_output(out: &OutArgs, json: serde_json::Value, csv: Option<String>) -> anyhow::Result<()> {
    let text = match out.format {
        Format::Json => serde_json::to_string_pretty(&json)? + "\n",
        Format::Csv => csv
            .ok_or_else(|| anyhow::anyhow!("this subcommand has no CSV form; use --format json"))?,
    };
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_pnorm(p: &str) -> anyhow::Result<PNorm> {
    if p == "inf" {
        return Ok(PNorm::Infinity);
    }
    let value: f64 = p
        .parse()
        .map_err(|_| anyhow::anyhow!("bad norm index {p}"))?;
    Ok(PNorm::new(value)?)
}

fn dim_command(result: shatter_core::DimResult, kind: &str, out: &OutArgs) -> anyhow::Result<u8> {
    let json = json!({
        "generator": GENERATOR,
        "kind": kind,
        "dimension": result.dimension,
        "exact": result.exact,
        "certificate": result.certificate,
        "stats": result.stats,
    });
    let csv = format!(
        "# generator={GENERATOR}\nkind,dimension,exact,subset\n{kind},{},{},{}\n",
        result.dimension,
        result.exact,
        result
            .certificate
            .as_ref()
            .map(|c| c
                .subset
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(";"))
            .unwrap_or_default()
    );
    write_output(out, json, Some(csv))?;
    Ok(if result.exact { EXIT_OK } else { EXIT_BUDGET })
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Fat {
            input,
            gamma,
            budget,
            out,
        } => {
            let class = SampledClass::load(&input)?;
            let result = fat_dim_with_budget(&class, gamma, &budget.budget())?;
            dim_command(result, "fat", &out)
        }
        Command::Faat {
            input,
            gamma,
            budget,
            out,
        } => {
            let class = SampledClass::load(&input)?;
            let result = faat_dim_with_budget(&class, gamma, &budget.budget())?;
            dim_command(result, "faat", &out)
        }
        Command::Vc { input, budget, out } => {
            let class = PartialClass::load(&input)?;
            let result = vc_dim_partial_with_budget(&class, &budget.budget())?;
            dim_command(result, "vc", &out)
        }
        Command::Cover {
            input,
            p,
            t,
            measure,
            method,
            exact_cap,
            out,
        } => {
            let class = SampledClass::load(&input)?;
            let measure = match measure {
                Some(path) => Measure::load(&path)?,
                None => Measure::uniform(class.n_points()),
            };
            let metric = MetricSpec {
                p: parse_pnorm(&p)?,
                measure,
            };
            let method = match method.as_str() {
                "exact" => CoverMethod::Exact,
                "greedy" => CoverMethod::Greedy,
                other => anyhow::bail!("unknown cover method {other}"),
            };
            let report = covering_number_with_cap(&class, &metric, t, method, exact_cap)?;
            let class_id = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let csv = format!(
                "# generator={GENERATOR}\nclass_id,p,t,size,exact,members\n{class_id},{},{},{},{},{}\n",
                report.p,
                report.radius,
                report.size,
                report.exact,
                report.members.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"),
            );
            let json = json!({ "generator": GENERATOR, "class_id": class_id, "report": report });
            write_output(&out, json, Some(csv))?;
            Ok(EXIT_OK)
        }
        Command::Max {
            inputs,
            cap,
            sample_count,
            seed,
            out,
        } => {
            let classes: Vec<SampledClass> = inputs
                .iter()
                .map(|p| SampledClass::load(p))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&SampledClass> = classes.iter().collect();
            let mode = match sample_count {
                Some(count) => {
                    let seed =
                        seed.ok_or_else(|| anyhow::anyhow!("--sample-count requires --seed"))?;
                    MaxMode::Sampled { count, seed }
                }
                None => MaxMode::Full { cap },
            };
            let mut composed = k_fold_max(&refs, &MaxSpec { mode })?;
            if let Some(meta) = composed.metadata.as_mut() {
                meta.generator = meta.generator.take().map(|g| format!("{GENERATOR} {g}"));
            }
            let json = serde_json::to_value(&composed)?;
            write_output(&out, json, None)?;
            Ok(EXIT_OK)
        }
        Command::Disambiguate { input, method, out } => {
            let class = PartialClass::load(&input)?;
            let (dis, vc) = match method.as_str() {
                "exact" => min_vc_disambiguation_exact(&class, &ExactDisambigLimits::default())?,
                "greedy" => {
                    let d = greedy_disambiguation(&class);
                    let vc = d.vc()?;
                    (d, vc)
                }
                "singleton" => {
                    let d = singleton_disambiguation(&class)?;
                    (d, 0)
                }
                other => anyhow::bail!("unknown disambiguation method {other}"),
            };
            let json = json!({ "generator": GENERATOR, "vc": vc, "disambiguation": dis });
            write_output(&out, json, None)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            seed,
            trials,
        } => verify::run_suites(&suite, seed, trials),
        Command::ProbeConjecture {
            k,
            trials,
            seed,
            gamma,
            out,
        } => probe_conjecture(k, trials, seed, gamma, &out),
        Command::LowerBoundSearch {
            d,
            k,
            m_max,
            budget,
            seed,
            out,
        } => {
            let mut cfg = UnionSearchConfig::new(d, k, m_max);
            cfg.budget = budget;
            cfg.seed = seed;
            let result = halfspace_union_shatter_search(&cfg)?;
            let json = json!({ "generator": GENERATOR, "seed": seed, "result": result });
            let csv = format!(
                "# generator={GENERATOR} seed={seed}\nd,k,m_max,best_size,budget_exhausted,oracle_calls\n{d},{k},{m_max},{},{},{}\n",
                result.best_size, result.budget_exhausted, result.oracle_calls
            );
            write_output(&out, json, Some(csv))?;
            Ok(if result.budget_exhausted {
                EXIT_BUDGET
            } else {
                EXIT_OK
            })
        }
        Command::Maurey {
            m,
            r,
            t,
            samples,
            seed,
            out,
        } => {
            let basis: Vec<Vec<f64>> = (0..m)
                .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            let net = maurey_cover(&basis, r, t)?;
            let bound = maurey_size_bound(m, r, t, 3.0);
            let mut rng = rng_from_seed(seed);
            let mut max_dist = 0f64;
            for _ in 0..samples {
                let raw: Vec<f64> = (0..m)
                    .map(|_| rand::Rng::gen_range(&mut rng, 0.0..1.0))
                    .collect();
                let total: f64 = raw.iter().sum();
                let scale: f64 = rand::Rng::gen_range(&mut rng, 0.0..1.0);
                let mut target = vec![0.0; m];
                for (i, g) in basis.iter().enumerate() {
                    let sign = if rand::Rng::gen_bool(&mut rng, 0.5) {
                        1.0
                    } else {
                        -1.0
                    };
                    for c in 0..m {
                        target[c] += r * sign * scale * raw[i] / total * g[c];
                    }
                }
                max_dist = max_dist.max(net_distance(&net, &target));
            }
            let covered = max_dist <= t + 1e-12;
            // Probe the two closed-form log variants of the affine cover
            // bound across domain sizes; reported, not compared.
            let log_probe: Vec<serde_json::Value> = [8usize, 64, 512]
                .iter()
                .map(|&n| {
                    let (coarse, sharp) = affine_cover_bound_probe(n, m, r, t, 1.0);
                    json!({ "n": n, "log_n_form": coarse, "log_m_form": sharp })
                })
                .collect();
            let json = json!({
                "generator": GENERATOR,
                "seed": seed,
                "m": m, "r": r, "t": t,
                "net_size": net.size,
                "terms": net.terms,
                "size_bound_c3": bound,
                "sampled_targets": samples,
                "max_distance": max_dist,
                "covered": covered,
                "log_form_probe": log_probe,
            });
            let csv = format!(
                "# generator={GENERATOR} seed={seed}\nm,r,t,net_size,terms,size_bound,max_distance,covered\n{m},{r},{t},{},{},{bound},{max_dist},{covered}\n",
                net.size, net.terms
            );
            write_output(&out, json, Some(csv))?;
            Ok(if covered { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

fn probe_conjecture(
    k: usize,
    trials: usize,
    seed: u64,
    gamma: f64,
    out: &OutArgs,
) -> anyhow::Result<u8> {
    if k < 1 || k > 4 {
        anyhow::bail!("k must lie in 1..=4 for exact composition");
    }
    let instances: Vec<MaxInstance> = (0..trials)
        .into_par_iter()
        .map(|idx| -> anyhow::Result<MaxInstance> {
            let mut rng = rng_for_instance(seed, idx as u64);
            let cols = rand::Rng::gen_range(&mut rng, 2..=4usize);
            let components: Vec<SampledClass> = (0..k)
                .map(|_| {
                    let rows = rand::Rng::gen_range(&mut rng, 2..=3usize);
                    shatter_core::generate::random_grid_class(&mut rng, rows, cols, -2, 2)
                })
                .collect();
            let refs: Vec<&SampledClass> = components.iter().collect();
            let fmax = k_fold_max(&refs, &MaxSpec::default())?;
            let fat_components: Vec<usize> = components
                .iter()
                .map(|c| Ok(fat_dim_with_budget(c, gamma, &SearchBudget::default())?.dimension))
                .collect::<anyhow::Result<_>>()?;
            let fat_max = fat_dim_with_budget(&fmax, gamma, &SearchBudget::default())?.dimension;
            Ok(MaxInstance {
                id: format!("probe_{idx:04}"),
                gamma,
                fat_components,
                fat_max,
                fat_is_lower_bound: false,
                d: None,
                radius_list: None,
            })
        })
        .collect::<anyhow::Result<_>>()?;

    let rows = bound_report(&instances, &[BoundId::Thm1], 0.3, 1.0, 1.0)?;
    let mut csv = format!("# generator={GENERATOR} seed={seed}\n");
    csv.push_str(
        "instance_id,k,d,gamma,fat_max,fat_components,dim_sum,certified,rhs_THM1,slack_THM1,probe_conjecture,probe_ratio,flag\n",
    );
    for row in &rows {
        let dim_sum: usize = row.fat_components.iter().sum();
        let rhs_thm1 = row.rhs.iter().find(|(n, _)| n == "THM1").map(|(_, v)| *v);
        let slack_thm1 = row.slack.iter().find(|(n, _)| n == "THM1").map(|(_, v)| *v);
        let ratio = row.fat_max as f64 / row.probe_conjecture.max(f64::MIN_POSITIVE);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},PROBE\n",
            row.id,
            row.k,
            row.d.map(|d| d.to_string()).unwrap_or_default(),
            row.gamma,
            row.fat_max,
            row.fat_components
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            dim_sum,
            row.certified,
            rhs_thm1.map(|v| v.to_string()).unwrap_or_default(),
            slack_thm1.map(|v| v.to_string()).unwrap_or_default(),
            row.probe_conjecture,
            ratio,
        ));
    }
    let json = json!({ "generator": GENERATOR, "seed": seed, "rows": rows });
    write_output(out, json, Some(csv))?;
    Ok(EXIT_OK)
}
