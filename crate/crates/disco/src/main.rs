//! `disco` — verification toolkit for budget-constrained coalition
//! strategies with discounted costs.
//!
//! Exit codes: 0 success / property true, 1 property false or proof
//! invalid, 2 unknown, 3 usage or input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use disco_core::checker::{check, oracle_check, CheckContext, CheckLimits, Truth};
use disco_core::formula::parse as parse_formula;
use disco_core::game::{discounted_cost, simulate, AdversaryPolicy, State};
use disco_core::proof::{parse_script, verify_script};
use disco_core::rational::{parse_rat, render_rat, Rat};

use disco::formats::{load_game, load_strategy, render_costs, save_strategy};
use disco::reproduce;

#[derive(Parser)]
#[command(
    name = "disco",
    version,
    about = "Budget-constrained coalition logic toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a game file.
    Validate { game: PathBuf },
    /// Model-check a formula at a state.
    Check {
        game: PathBuf,
        #[arg(long)]
        state: String,
        /// Discount factor in (0,1), as "num/den".
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Write the witness strategy of a TRUE verdict to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Use the bounded-horizon brute-force oracle instead.
        #[arg(long, value_name = "HORIZON")]
        oracle: Option<usize>,
    },
    /// Replay a strategy against the deterministic adversary.
    Simulate {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(long)]
        start: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        gamma: String,
    },
    /// Verify a proof script.
    Prove { script: PathBuf },
    /// Re-run the worked-example suite on the corpus.
    Reproduce {
        /// Override the per-figure discount factors.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

const EXIT_FALSE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.command {
        Cmd::Validate { game } => cmd_validate(&game),
        Cmd::Check {
            game,
            state,
            gamma,
            formula,
            max_depth,
            witness,
            oracle,
        } => cmd_check(
            &game,
            &state,
            &gamma,
            &formula,
            max_depth,
            witness.as_deref(),
            oracle,
        ),
        Cmd::Simulate {
            game,
            strategy,
            start,
            depth,
            gamma,
        } => cmd_simulate(&game, &strategy, &start, depth, &gamma),
        Cmd::Prove { script } => cmd_prove(&script),
        Cmd::Reproduce { gamma, corpus } => cmd_reproduce(gamma.as_deref(), corpus.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn parse_gamma(text: &str) -> Result<Rat, Usage> {
    use num_traits::{One, Zero};
    let gamma = parse_rat(text)?;
    if gamma <= Rat::zero() || gamma >= Rat::one() {
        return Err(Usage(format!(
            "E-GAMMA: discount factor {text} is not strictly between 0 and 1"
        )));
    }
    Ok(gamma)
}

fn limits(max_depth: Option<usize>) -> Result<CheckLimits, Usage> {
    let mut limits = CheckLimits::default();
    if let Some(depth) = max_depth {
        limits.max_depth = depth;
    }
    if let Ok(text) = std::env::var("DISCO_MAX_GOALS") {
        limits.max_goals = text
            .parse()
            .map_err(|_| Usage(format!("DISCO_MAX_GOALS is not a number: `{text}`")))?;
    }
    Ok(limits)
}

fn cmd_validate(game_path: &Path) -> Result<u8, Usage> {
    let game = load_game(game_path)?;
    println!(
        "ok: {} states, {} transitions",
        game.states().len(),
        game.transition_count()
    );
    Ok(0)
}

fn truth_exit(truth: Truth) -> u8 {
    match truth {
        Truth::True => 0,
        Truth::False => EXIT_FALSE,
        Truth::Unknown => EXIT_UNKNOWN,
    }
}

fn cmd_check(
    game_path: &Path,
    state: &str,
    gamma: &str,
    formula: &str,
    max_depth: Option<usize>,
    witness_path: Option<&Path>,
    oracle: Option<usize>,
) -> Result<u8, Usage> {
    let game = load_game(game_path)?;
    let gamma = parse_gamma(gamma)?;
    let formula = parse_formula(formula)?;
    let state = State::new(state);
    if let Some(horizon) = oracle {
        let truth = oracle_check(&game, &state, &formula, &gamma, horizon)?;
        println!("{truth}");
        return Ok(truth_exit(truth));
    }
    let ctx = CheckContext {
        gamma,
        limits: limits(max_depth)?,
    };
    let verdict = check(&game, &state, &formula, &ctx)?;
    match &verdict.reason {
        Some(reason) => println!("{} {reason}", verdict.status),
        None => println!("{}", verdict.status),
    }
    if let Some(path) = witness_path {
        match &verdict.witness {
            Some(strategy) => save_strategy(path, strategy)?,
            None => {
                if verdict.status == Truth::True {
                    eprintln!("warning: no witness available for this verdict");
                }
            }
        }
    }
    Ok(truth_exit(verdict.status))
}

fn cmd_simulate(
    game_path: &Path,
    strategy_path: &Path,
    start: &str,
    depth: usize,
    gamma: &str,
) -> Result<u8, Usage> {
    let game = load_game(game_path)?;
    let strategy = load_strategy(strategy_path)?;
    let gamma = parse_gamma(gamma)?;
    let play = simulate(
        &game,
        &strategy,
        AdversaryPolicy::Lexicographic,
        depth,
        &State::new(start),
    )?;
    let mut trace = play.start.to_string();
    for step in &play.steps {
        trace.push_str(&format!(" -> {}", step.to));
    }
    println!("play: {trace}");
    for (i, step) in play.steps.iter().enumerate() {
        println!(
            "step {}: {} ; cost {} ; to {}",
            i + 1,
            step.profile.key(),
            render_costs(game.agents().iter(), &step.costs),
            step.to
        );
    }
    let cost = discounted_cost(&play, &gamma)?;
    println!("cost: {}", render_costs(game.agents().iter(), &cost));
    Ok(0)
}

fn cmd_prove(script_path: &Path) -> Result<u8, Usage> {
    let text = std::fs::read_to_string(script_path)?;
    let script = parse_script(&text)?;
    if script.lines.is_empty() {
        return Err(Usage("script has no lines".to_string()));
    }
    let report = verify_script(&script);
    match report.first_error {
        None => {
            println!("VALID");
            Ok(0)
        }
        Some((line, code, message)) => {
            println!("line {line}: {code}: {message}");
            Ok(EXIT_FALSE)
        }
    }
}

fn cmd_reproduce(gamma: Option<&str>, corpus: Option<&Path>) -> Result<u8, Usage> {
    let gamma = gamma.map(parse_gamma).transpose()?;
    let corpus = corpus
        .map(Path::to_path_buf)
        .unwrap_or_else(disco::default_corpus_dir);
    let outcomes = reproduce::run(&corpus, gamma.as_ref(), limits(None)?)?;
    let mut all_ok = true;
    for outcome in &outcomes {
        let mark = if outcome.passed() { "PASS" } else { "FAIL" };
        all_ok &= outcome.passed();
        println!(
            "{} @ {} ({}, gamma={}): expected {}, got {} {mark}",
            outcome.claim.formula,
            outcome.claim.state,
            outcome.claim.game_file,
            render_rat(&outcome.claim.gamma),
            outcome.claim.expected,
            outcome.computed
        );
    }
    Ok(if all_ok { 0 } else { EXIT_FALSE })
}
