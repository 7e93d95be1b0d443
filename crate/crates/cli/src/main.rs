use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use placement_core::analysis::{
    check_conjecture_chain, cost_estimate, sweep, verify_cor41, verify_counterexample,
    verify_prop51, verify_thm41, verify_thm42, PlaneRegion, SweepConfig, VerificationReport,
    DEFAULT_BUDGET,
};
use placement_core::partitions::hardy_ramanujan_estimate;
use placement_core::{
    admissible_placements, chain_sort, compare, enumerate_partitions, error_probability,
    evaluate_all, is_chain, simulate, ChainCheck, Optimum, Placement, SensorModel, TieRule,
};

mod output;

use output::{emit, json};

#[derive(Debug, Parser)]
#[command(
    name = "placement",
    version,
    about = "Optimal binary-sensor placement for intruder localization"
)]
struct Cli {
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Write the result here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Refuse searches estimated to need more likelihood evaluations.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact error probability of one placement.
    Pe(PlacementArgs),
    /// Exhaustive search for the optimal placement.
    Optimal(ModelArgs),
    /// Integer partitions of M.
    Partitions {
        #[arg(long)]
        m: usize,
    },
    /// Majorization verdict for two placements, or chain check for more.
    Majorize {
        /// Dash-joined placements with equal totals.
        #[arg(required = true, num_args = 2..)]
        placements: Vec<String>,
    },
    /// Optimal placement at every node of a grid over (p_f, p_d).
    Sweep {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        /// Cover the whole square instead of p_d >= p_f.
        #[arg(long)]
        full: bool,
        /// Restrict to pf_lo,pf_hi,pd_lo,pd_hi.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        window: Option<Vec<f64>>,
    },
    /// Monte Carlo estimate of the error probability.
    Simulate {
        #[command(flatten)]
        placement: PlacementArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Ties::Uniform)]
        ties: Ties,
    },
    /// Grid checks of the structural results.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ties {
    Uniform,
    Lowest,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    pd: f64,
    #[arg(long)]
    pf: f64,
}

#[derive(Debug, Args)]
struct PlacementArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Dash-joined sensor counts, e.g. 2-1-1; trailing zeros optional.
    #[arg(long)]
    placement: String,
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Uniform never beats (2,1,...,1) when M = N.
    Thm41 {
        #[arg(long, default_value_t = 5)]
        max_m: usize,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
    },
    /// Differences scale with N once N > M.
    Thm42 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// An extra point adds only the uniform placement.
    Cor41 {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
    },
    /// Monotonicity on the placement scale for small M.
    Prop51 {
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Seven sensors on eight points break monotonicity.
    Counterexample {
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Optimal placements can be chosen to form a chain.
    Conjecture {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
    },
}

/// Bad input: reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

enum Outcome {
    Done,
    VerificationFailed,
}

impl ModelArgs {
    fn model(&self) -> anyhow::Result<SensorModel> {
        Ok(SensorModel::new(self.pd, self.pf)?)
    }
}

impl PlacementArgs {
    fn placement(&self) -> anyhow::Result<Placement> {
        let p = Placement::parse(&self.placement, self.model.n)?;
        if p.m() != self.model.m {
            return Err(usage(format!(
                "placement {} holds {} sensors but --m is {}",
                self.placement,
                p.m(),
                self.model.m
            )));
        }
        Ok(p)
    }
}

#[derive(Serialize)]
struct PeOut {
    m: usize,
    n: usize,
    p_d: f64,
    p_f: f64,
    placement: Placement,
    pe: f64,
}

#[derive(Serialize)]
struct Valued {
    placement: Placement,
    pe: f64,
}

#[derive(Serialize)]
struct OptimalOut {
    m: usize,
    n: usize,
    p_d: f64,
    p_f: f64,
    #[serde(flatten)]
    optimum: Optimum,
    values: Vec<Valued>,
}

#[derive(Serialize)]
struct PartitionsOut {
    m: usize,
    count: usize,
    estimate: f64,
    partitions: Vec<String>,
}

#[derive(Serialize)]
struct SimulateOut {
    m: usize,
    n: usize,
    p_d: f64,
    p_f: f64,
    placement: Placement,
    tie_rule: TieRule,
    #[serde(flatten)]
    result: placement_core::SimResult,
    pe: f64,
    z_score: f64,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if cli.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()?;
    if cli.budget.is_nan() || cli.budget <= 0.0 {
        return Err(usage("--budget must be positive"));
    }
    let out = cli.out.as_deref();
    let json_only = |name: &str| -> anyhow::Result<()> {
        if cli.format == Some(Format::Csv) {
            return Err(usage(format!(
                "{name} has no CSV output; use --format json"
            )));
        }
        Ok(())
    };

    match &cli.command {
        Command::Pe(args) => {
            json_only("pe")?;
            let placement = args.placement()?;
            let model = args.model.model()?;
            let pe = error_probability(&placement, &model, args.model.n)?.value;
            let body = PeOut {
                m: args.model.m,
                n: args.model.n,
                p_d: model.p_d(),
                p_f: model.p_f(),
                placement,
                pe,
            };
            emit(&json("pe", body)?, out)?;
        }
        Command::Optimal(args) => {
            let model = args.model()?;
            let placements = admissible_placements(args.m, args.n)?;
            let estimate = cost_estimate(args.m, 1, placements.len());
            if estimate > cli.budget {
                return Err(placement_core::Error::BudgetExceeded {
                    estimate,
                    budget: cli.budget,
                }
                .into());
            }
            let values = evaluate_all(&placements, &model);
            let optimum = Optimum::from_values(&placements, &values);
            let text = if cli.format == Some(Format::Csv) {
                let mut s = String::from("placement,pe,best\n");
                for (p, v) in placements.iter().zip(&values) {
                    s.push_str(&format!("{p},{v:.12},{}\n", optimum.contains(p.counts())));
                }
                s
            } else {
                let values = placements
                    .into_iter()
                    .zip(values)
                    .map(|(placement, pe)| Valued { placement, pe })
                    .collect();
                json(
                    "optimal",
                    OptimalOut {
                        m: args.m,
                        n: args.n,
                        p_d: model.p_d(),
                        p_f: model.p_f(),
                        optimum,
                        values,
                    },
                )?
            };
            emit(&text, out)?;
        }
        Command::Partitions { m } => {
            let set = enumerate_partitions(*m)?;
            let names: Vec<String> = set.iter().map(placement_core::model::dashed).collect();
            let text = if cli.format == Some(Format::Csv) {
                let mut s = String::from("partition\n");
                for name in &names {
                    s.push_str(name);
                    s.push('\n');
                }
                s
            } else {
                json(
                    "partitions",
                    PartitionsOut {
                        m: *m,
                        count: names.len(),
                        estimate: hardy_ramanujan_estimate(*m),
                        partitions: names,
                    },
                )?
            };
            emit(&text, out)?;
        }
        Command::Majorize { placements } => {
            json_only("majorize")?;
            let parsed = placements
                .iter()
                .map(|text| {
                    let p = Placement::parse(text, usize::MAX)?;
                    Placement::new(p.counts(), p.m())
                })
                .collect::<Result<Vec<_>, _>>()?;
            let text = if let [x, y] = parsed.as_slice() {
                let verdict = compare(x, y)?;
                json(
                    "majorize",
                    serde_json::json!({
                        "x": x,
                        "y": y,
                        "verdict": verdict.code().to_string(),
                        "relation": format!("{verdict:?}"),
                    }),
                )?
            } else {
                let check = is_chain(&parsed)?;
                let (chain, broken) = match &check {
                    ChainCheck::Chain => (Some(chain_sort(&parsed)?.to_string()), None),
                    ChainCheck::Broken(a, b) => (None, Some([a.to_string(), b.to_string()])),
                };
                json(
                    "majorize",
                    serde_json::json!({
                        "is_chain": check.holds(),
                        "chain": chain,
                        "incomparable": broken,
                    }),
                )?
            };
            emit(&text, out)?;
        }
        Command::Sweep {
            m,
            n,
            step,
            full,
            window,
        } => {
            let region = if *full {
                PlaneRegion::Full
            } else {
                PlaneRegion::PdGePf
            };
            let mut config = SweepConfig::new(*step).region(region).budget(cli.budget);
            if let Some(w) = window {
                config = config.window(w[0], w[1], w[2], w[3]);
            }
            let map = sweep(*m, *n, &config)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => map.to_csv(),
                Format::Json => json("sweep", &map)?,
            };
            emit(&text, out)?;
        }
        Command::Simulate {
            placement,
            trials,
            seed,
            ties,
        } => {
            json_only("simulate")?;
            let p = placement.placement()?;
            let model = placement.model.model()?;
            let n = placement.model.n;
            let tie_rule = match ties {
                Ties::Uniform => TieRule::UniformRandom,
                Ties::Lowest => TieRule::LowestIndex,
            };
            let result = simulate(&p, &model, n, *trials, *seed, tie_rule)?;
            let pe = error_probability(&p, &model, n)?.value;
            let body = SimulateOut {
                m: p.m(),
                n,
                p_d: model.p_d(),
                p_f: model.p_f(),
                placement: p,
                tie_rule,
                result,
                pe,
                z_score: result.z_score(pe),
            };
            emit(&json("simulate", body)?, out)?;
        }
        Command::Verify(v) => {
            json_only("verify")?;
            return run_verify(v, out);
        }
    }
    Ok(Outcome::Done)
}

fn run_verify(v: &Verify, out: Option<&std::path::Path>) -> anyhow::Result<Outcome> {
    let report = |r: &VerificationReport| -> anyhow::Result<Outcome> {
        eprintln!("{}", r.summary());
        emit(&json("verify", r)?, out)?;
        Ok(if r.pass {
            Outcome::Done
        } else {
            Outcome::VerificationFailed
        })
    };
    match *v {
        Verify::Thm41 { max_m, step } => {
            if max_m < 2 {
                return Err(usage("--max-m must be at least 2"));
            }
            report(&verify_thm41(max_m, step)?)
        }
        Verify::Thm42 { m, n1, n2, step } => report(&verify_thm42(m, n1, n2, step)?),
        Verify::Cor41 { m, step } => {
            let (r, sets) = verify_cor41(m, step)?;
            eprintln!(
                "strict optima: N=M {{{}}}, N=M+1 {{{}}}",
                sets.equal_points.join(", "),
                sets.extra_point.join(", ")
            );
            report(&r)
        }
        Verify::Prop51 { step } => report(&verify_prop51(step)?),
        Verify::Counterexample { step } => {
            let ev = verify_counterexample(step)?;
            for p in &ev.probes {
                eprintln!(
                    "p_f={:.2} p_d={:.2}: optimum ({}), expected ({}){}",
                    p.p_f,
                    p.p_d,
                    p.optimum.first(),
                    p.expected,
                    if p.reproduced { "" } else { " MISMATCH" }
                );
            }
            eprintln!("{}", ev.along_pf.summary());
            eprintln!("{}", ev.along_pd.summary());
            emit(
                &json(
                    "verify",
                    serde_json::json!({
                        "claim": "counterexample",
                        "pass": ev.pass,
                        "evidence": ev,
                    }),
                )?,
                out,
            )?;
            Ok(if ev.pass {
                Outcome::Done
            } else {
                Outcome::VerificationFailed
            })
        }
        Verify::Conjecture { m, n, step } => {
            let map = placement_core::analysis::sweep_plane(m, n, step, PlaneRegion::PdGePf)?;
            let ev = check_conjecture_chain(&map)?;
            if let Some(chain) = &ev.chain {
                eprintln!("chain: {chain}");
            }
            report(&ev.report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<Usage>() || err.is::<placement_core::Error>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
