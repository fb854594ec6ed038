use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leaklab::estimators::{
    exact_bayes_error, exact_chernoff, exact_mi, exact_tv, prior_entropy, DiscreteChannel,
};
use leaklab::harness::{self, output, OracleSettings, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "leaklab", version, about = "Side-channel leakage experiments on simulated encrypted traffic")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Master seed; overrides the scenario file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per label (or channels for `oracle`); overrides the scenario file.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Directory receiving the output files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Format of the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Structured)]
    format: Format,
    /// Also write layers.csv with every layer of the first trials.
    #[arg(long, global = true)]
    dump_layers: bool,
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario: result.csv and report.txt.
    Run(ScenarioArg),
    /// Defense grid sweep: pareto.csv.
    Sweep(ScenarioArg),
    /// Per-layer mutual information series: dpi.csv.
    Dpi(ScenarioArg),
    /// Accuracy against the number of sessions: sessions.csv, plus
    /// oracle_sessions.csv when the scenario has an [oracle] section.
    Multisession(ScenarioArg),
    /// Inequality suite on random discrete channels: oracle.csv.
    Oracle {
        /// Report exact quantities of this channel file instead.
        #[arg(long)]
        channel: Option<PathBuf>,
    },
    /// Empirical Lipschitz certificates: certificates.csv.
    Certify {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Sampled pairs per statistic and sampler.
        #[arg(long, default_value_t = 2000)]
        pairs: usize,
    },
}

#[derive(Args, Debug)]
struct ScenarioArg {
    /// Scenario file; the built-in video-vs-web scenario when omitted.
    config: Option<PathBuf>,
}

enum Outcome {
    Ok,
    Violation(String),
}

fn load(arg: &ScenarioArg, g: &Global) -> leaklab::Result<ScenarioConfig> {
    let mut cfg = match &arg.config {
        Some(p) => ScenarioConfig::from_path(p)?,
        None => ScenarioConfig::video_vs_web(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(dir: &Path, name: &str, text: &str) -> leaklab::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn emit(g: &Global, csv: &str, structured: &str) {
    match g.format {
        Format::Csv => print!("{csv}"),
        Format::Structured => print!("{structured}"),
    }
}

fn dump_layers(cfg: &ScenarioConfig, g: &Global) -> leaklab::Result<()> {
    if g.dump_layers {
        write(&g.out_dir, "layers.csv", &output::layers_csv(&cfg.bundle()?, cfg.dump_trials)?)?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> leaklab::Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Run(arg) => {
            let cfg = load(arg, g)?;
            let r = harness::run_scenario(&cfg)?;
            let (csv, text) = (output::result_csv(&r), output::report_text(&r));
            write(&g.out_dir, "result.csv", &csv)?;
            write(&g.out_dir, "report.txt", &text)?;
            dump_layers(&cfg, g)?;
            emit(g, &csv, &text);
            let v = r.soundness.violations();
            Ok(if v == 0 {
                Outcome::Ok
            } else {
                Outcome::Violation(format!("{v} soundness violation(s)"))
            })
        }
        Command::Sweep(arg) => {
            let cfg = load(arg, g)?;
            let o = harness::defense_sweep(&cfg)?;
            let csv = output::pareto_csv(&o);
            write(&g.out_dir, "pareto.csv", &csv)?;
            dump_layers(&cfg, g)?;
            let summary = match (o.optimal, o.nearest_infeasible) {
                (Some(i), _) => format!(
                    "optimal point {i} ({} = {})\n",
                    o.objective.as_str(),
                    o.points[i].objective(o.objective)
                ),
                (None, Some(i)) => format!("no feasible point; nearest infeasible point {i}\n"),
                (None, None) => "no points\n".to_string(),
            };
            emit(g, &csv, &summary);
            Ok(Outcome::Ok)
        }
        Command::Dpi(arg) => {
            let cfg = load(arg, g)?;
            let s = harness::dpi_check(&cfg)?;
            let csv = output::dpi_csv(&s);
            write(&g.out_dir, "dpi.csv", &csv)?;
            dump_layers(&cfg, g)?;
            let mut text = String::new();
            for l in &s.layers {
                text.push_str(&format!("{} = {}  # bits, 99% CI [{}, {}]\n", l.layer, l.mi.bits, l.mi.lo, l.mi.hi));
            }
            text.push_str(&format!("nonincreasing = {}\n", s.nonincreasing));
            emit(g, &csv, &text);
            Ok(if s.nonincreasing {
                Outcome::Ok
            } else {
                Outcome::Violation("MI increased along the chain beyond CI tolerance".into())
            })
        }
        Command::Multisession(arg) => {
            let cfg = load(arg, g)?;
            let rows = harness::multi_session_experiment(&cfg)?;
            let mut csv = output::sessions_csv(&rows);
            write(&g.out_dir, "sessions.csv", &csv)?;
            if let Some(spec) = &cfg.oracle {
                let exact = harness::oracle_sessions(spec, &cfg.sessions)?;
                let o = output::oracle_sessions_csv(&exact);
                write(&g.out_dir, "oracle_sessions.csv", &o)?;
                csv.push('\n');
                csv.push_str(&o);
            }
            dump_layers(&cfg, g)?;
            emit(g, &csv, &csv);
            Ok(Outcome::Ok)
        }
        Command::Oracle { channel: Some(path) } => {
            let ch = DiscreteChannel::from_text(&fs::read_to_string(path)?)?;
            let mut csv = String::from("x,x2,tv,chernoff_nats\n");
            for x in 0..ch.inputs() {
                for y in x + 1..ch.inputs() {
                    let c = exact_chernoff(ch.row(x), ch.row(y), 1e-10)?.nats();
                    csv.push_str(&format!("{x},{y},{},{c}\n", exact_tv(&ch, x, y)?));
                }
            }
            let text = format!(
                "mi_bits = {}\nprior_entropy_bits = {}\nbayes_error = {}\n{csv}",
                exact_mi(&ch),
                prior_entropy(&ch),
                exact_bayes_error(&ch)
            );
            write(&g.out_dir, "channel.csv", &csv)?;
            emit(g, &csv, &text);
            Ok(Outcome::Ok)
        }
        Command::Oracle { channel: None } => {
            let mut settings = OracleSettings::default();
            if let Some(s) = g.seed {
                settings.seed = s;
            }
            if let Some(t) = g.trials {
                settings.channels = t;
            }
            let s = harness::oracle_suite(settings)?;
            let csv = output::oracle_csv(&s);
            write(&g.out_dir, "oracle.csv", &csv)?;
            let mut text = csv.clone();
            for v in s.violations.iter().take(20) {
                text.push_str(&format!("violation {} on channel {}: {}\n", v.check, v.channel, v.detail));
            }
            emit(g, &csv, &text);
            Ok(if s.passed() {
                Outcome::Ok
            } else {
                Outcome::Violation(format!("{} oracle violation(s)", s.violations.len()))
            })
        }
        Command::Certify { scenario, pairs } => {
            let cfg = load(scenario, g)?;
            let rows = harness::certify(&cfg, *pairs)?;
            let csv = harness::certificates_csv(&rows);
            write(&g.out_dir, "certificates.csv", &csv)?;
            emit(g, &csv, &csv);
            Ok(if rows.iter().all(|r| r.certificate.passes) {
                Outcome::Ok
            } else {
                Outcome::Violation("a declared Lipschitz constant was exceeded".into())
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
