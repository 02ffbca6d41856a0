//! `pps`: load models, print statistics and classicality reports, play the
//! box game.

use std::fmt::Display;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pps_core::classicality::ClassicalityReport;
use pps_core::format::{self, ModelFile};
use pps_core::game::{self, BobStrategy, Choice, Game, GameTranscript, TRANSCRIPT_SCHEMA_VERSION};
use pps_core::validation::ValidationReport;
use pps_core::zoo::{self, NamedModel};
use pps_core::{rational, Error};
use serde_json::json;

const FIXTURE_ENV: &str = "PPS_FIXTURE_DIR";

#[derive(Debug, Parser)]
#[command(name = "pps", version)]
#[command(about = "Pre- and post-selection paradox toolkit: three boxes, ontic models, classicality checks")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Write the main output here instead of stdout. For `game` this is the
    /// transcript (CSV if the name ends in .csv, JSON otherwise).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for the game RNG.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model file for normalization and reference errors
    Validate {
        /// Model file, fixture name or built-in model name.
        model: String,
    },

    /// Print a sequence distribution, or the joint tables when no sequence is given
    Stats {
        model: String,
        #[arg(long)]
        prep: Option<String>,
        /// Comma-separated measurement labels, e.g. "M1,MA". An empty string
        /// is the empty sequence.
        #[arg(long)]
        seq: Option<String>,
    },

    /// Classicality report; exits 1 when the model shows non-classical behavior
    Check {
        model: String,
        #[arg(long)]
        prep: Option<String>,
    },

    /// Play the box game between Bob and a post-selecting Alice
    Game {
        model: String,
        #[arg(long)]
        prep: Option<String>,
        #[arg(long, value_enum, default_value_t = StrategyKind::RandomBox)]
        strategy: StrategyKind,
        #[arg(long, default_value_t = 1000)]
        rounds: usize,
        /// Stakes Bob collects when Alice loses a bet, e.g. "3/2".
        #[arg(long, default_value = "2")]
        odds: String,
        /// random-box: probability of opening the first box.
        #[arg(long, default_value_t = 0.5)]
        p_first: f64,
        /// random-box: probability of a control round.
        #[arg(long, default_value_t = 0.0)]
        p_control: f64,
        /// fixed: the choice every round, e.g. "M1", "N" or "M1,M2".
        #[arg(long)]
        choice: Option<String>,
        /// cheat-check: probability of looking in both boxes.
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Prompt for Bob's choice each round.
        #[arg(long)]
        interactive: bool,
    },

    /// Write a model in the JSON model format
    Export {
        /// Model to export, or "all" for every built-in model (needs --out DIR).
        model: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyKind {
    RandomBox,
    Fixed,
    CheatCheck,
}

enum Failure {
    Input(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Validate { model } => validate(cli, model),
        Command::Stats { model, prep, seq } => stats(cli, model, prep.as_deref(), seq.as_deref()),
        Command::Check { model, prep } => check(cli, model, prep.as_deref()),
        Command::Game {
            model,
            prep,
            strategy,
            rounds,
            odds,
            p_first,
            p_control,
            choice,
            q,
            interactive,
        } => {
            let loaded = load(model)?.0;
            let odds = rational::parse(odds)?;
            if *interactive {
                return interactive_game(cli, &loaded, prep.as_deref(), *rounds, &odds);
            }
            let strategy = match strategy {
                StrategyKind::RandomBox => BobStrategy::RandomBox {
                    p_first: *p_first,
                    p_control: *p_control,
                },
                StrategyKind::Fixed => {
                    let c = choice
                        .as_deref()
                        .ok_or_else(|| Failure::Input("--strategy fixed needs --choice".into()))?;
                    BobStrategy::Fixed {
                        choice: Choice::parse(c, &loaded.roles)?,
                    }
                }
                StrategyKind::CheatCheck => BobStrategy::CheatCheck { q: *q },
            };
            game(cli, &loaded, prep.as_deref(), &strategy, *rounds, &odds)
        }
        Command::Export { model } => export(cli, model),
    }
}

fn fixture_dir() -> PathBuf {
    std::env::var_os(FIXTURE_ENV).map_or_else(|| PathBuf::from("fixtures"), PathBuf::from)
}

/// A path, then `<fixture dir>/<name>.json`, then a built-in name.
fn resolve(target: &str) -> Option<PathBuf> {
    let direct = Path::new(target);
    if direct.is_file() {
        return Some(direct.to_path_buf());
    }
    let fixture = fixture_dir().join(format!("{target}.json"));
    fixture.is_file().then_some(fixture)
}

fn load(target: &str) -> Result<(NamedModel, ValidationReport), Failure> {
    match resolve(target) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            format::import(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => match zoo::by_name(target) {
            Ok(m) => Ok((m, ValidationReport::default())),
            Err(_) => Err(Failure::Input(format!(
                "{target:?} is neither a model file, a fixture in {}, nor a built-in model ({})",
                fixture_dir().display(),
                zoo::MODEL_NAMES.join(", ")
            ))),
        },
    }
}

fn emit(cli: &Cli, text: &str) -> CmdResult {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(cli: &Cli, value: &serde_json::Value) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    emit(cli, &(text + "\n"))
}

fn validate(cli: &Cli, target: &str) -> CmdResult {
    let (model, report) = load(target)?;
    // Built-ins skip the file path, so run them through the format checks too.
    let report = if resolve(target).is_none() {
        ModelFile::from_named(&model).into_named()?.1
    } else {
        report
    };
    let expected = if report.is_valid() {
        Some(zoo::matches_expected(&model)?)
    } else {
        None
    };
    let ok = report.is_valid() && expected != Some(false);
    if cli.json {
        emit_json(
            cli,
            &json!({
                "model": model.name,
                "valid": ok,
                "violations": report.violations,
                "expected_stats_match": expected,
            }),
        )?;
    } else {
        let mut text = format!("model {}\n", model.name);
        if report.is_valid() {
            text += "no violations\n";
        } else {
            text += &report.to_string();
        }
        match expected {
            Some(true) => text += "expected statistics reproduced\n",
            Some(false) => text += "expected statistics NOT reproduced\n",
            None => {}
        }
        emit(cli, &text)?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn parse_seq(seq: &str) -> Vec<&str> {
    seq.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn stats(cli: &Cli, target: &str, prep: Option<&str>, seq: Option<&str>) -> CmdResult {
    let model = load(target)?.0;
    let prep_name = prep.unwrap_or(&model.default_preparation).to_string();
    match seq {
        Some(seq) => {
            let seq = parse_seq(seq);
            let dist = model.sequence(prep, &seq)?;
            if cli.json {
                emit_json(
                    cli,
                    &json!({
                        "model": model.name,
                        "preparation": prep_name,
                        "sequence": seq,
                        "distribution": dist,
                    }),
                )
            } else {
                let header = format!("{} / {} / ({})\n", model.name, prep_name, seq.join(","));
                emit(cli, &(header + &dist.to_string()))
            }
        }
        None => {
            let stats = model.stats(prep)?;
            if cli.json {
                emit_json(cli, &json!({ "model": model.name, "preparation": prep_name, "stats": stats }))
            } else {
                emit(cli, &format!("{} / {}\n{stats}", model.name, prep_name))
            }
        }
    }
}

fn check(cli: &Cli, target: &str, prep: Option<&str>) -> CmdResult {
    let model = load(target)?.0;
    let report = ClassicalityReport::for_model(&model, prep)?;
    if cli.json {
        emit_json(cli, &json!(report))?;
    } else {
        emit(cli, &report.to_string())?;
    }
    if report.passes() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn write_transcript(path: &Path, t: &GameTranscript) -> CmdResult {
    let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        t.to_csv()
    } else {
        t.to_json()
    };
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn summarize(cli: &Cli, t: &GameTranscript, odds: &rational::Prob) -> CmdResult {
    let ledger = game::settle_bets(t, odds)?;
    let umpire = game::umpire_frequencies(t).ok();
    if let Some(path) = &cli.out {
        write_transcript(path, t)?;
    }
    if cli.json {
        let value = json!({
            "model": t.model,
            "preparation": t.preparation,
            "seed": t.seed,
            "strategy": t.strategy,
            "ledger": ledger,
            "umpire": umpire,
        });
        println!("{}", serde_json::to_string_pretty(&value).map_err(|e| Failure::Input(e.to_string()))?);
    } else {
        println!("{} / {} / seed {}", t.model, t.preparation, t.seed);
        print!("{ledger}");
        if let Some(u) = umpire {
            print!("{u}");
        }
    }
    Ok(())
}

fn game(
    cli: &Cli,
    model: &NamedModel,
    prep: Option<&str>,
    strategy: &BobStrategy,
    rounds: usize,
    odds: &rational::Prob,
) -> CmdResult {
    if rounds == 0 {
        return Err(Failure::Input("--rounds must be at least 1".into()));
    }
    let t = Game::new(model, prep)?.play(strategy, rounds, cli.seed)?;
    summarize(cli, &t, odds)
}

fn describe_round(r: &game::Round) -> String {
    let mut s = if r.bob_outcomes.is_empty() {
        "bob left the boxes shut".to_string()
    } else {
        format!("bob saw {}", r.bob_outcomes.join(", "))
    };
    if let Some(w) = r.immediate_win {
        s += &format!("; round over, {w} wins");
    }
    if let Some(a) = &r.alice_outcome {
        s += &format!("; alice got {a}");
    }
    match r.alice_won {
        Some(true) => s += "; bet placed, alice wins",
        Some(false) => s += "; bet placed, bob wins",
        None if r.alice_outcome.is_some() => s += "; no bet",
        None => {}
    }
    s
}

fn prompt(text: impl Display) -> io::Result<()> {
    let mut out = io::stdout().lock();
    write!(out, "{text}")?;
    out.flush()
}

fn interactive_game(
    cli: &Cli,
    model: &NamedModel,
    prep: Option<&str>,
    max_rounds: usize,
    odds: &rational::Prob,
) -> CmdResult {
    let g = Game::new(model, prep)?;
    let roles = &model.roles;
    let (a, b) = (&roles.first.measurement, &roles.second.measurement);
    println!("choices: {} (nothing), {a}, {b}, {a},{b} (look twice); q quits", roles.nothing);
    let mut t = GameTranscript {
        schema_version: TRANSCRIPT_SCHEMA_VERSION,
        model: model.name.clone(),
        preparation: prep.unwrap_or(&model.default_preparation).to_string(),
        seed: cli.seed,
        post_selection: roles.post.hit.clone(),
        strategy: None,
        rounds: Vec::new(),
    };
    let mut lines = io::stdin().lock().lines();
    while t.rounds.len() < max_rounds {
        let index = t.rounds.len() as u64;
        prompt(format_args!("round {}> ", index + 1))?;
        let Some(line) = lines.next().transpose()? else { break };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if matches!(line, "q" | "quit" | "exit") {
            break;
        }
        let choice = match Choice::parse(line, roles) {
            Ok(c) => c,
            Err(e) => {
                println!("{e}");
                continue;
            }
        };
        let round = g.play_round(choice, cli.seed, index)?;
        println!("{}", describe_round(&round));
        t.rounds.push(round);
    }
    println!();
    if t.rounds.is_empty() {
        return Ok(());
    }
    summarize(cli, &t, odds)
}

fn export(cli: &Cli, target: &str) -> CmdResult {
    if target != "all" {
        let model = load(target)?.0;
        return emit(cli, &format::export(&model));
    }
    let dir = cli
        .out
        .as_ref()
        .ok_or_else(|| Failure::Input("export all needs --out DIR".into()))?;
    std::fs::create_dir_all(dir)?;
    for model in zoo::all_models() {
        let path = dir.join(format!("{}.json", model.name));
        std::fs::write(&path, format::export(&model))?;
        if !cli.json {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
