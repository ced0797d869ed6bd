//! JSON file formats for games and strategies.
//!
//! Both formats allow `#` comment lines (stripped before JSON parsing).
//! Rationals are strings `"num/den"` or `"int"`; the terminal destination
//! is spelled `"#t"`; absent profile agents and the explicit `"*"` both
//! mean a wildcard; absent costs default to zero.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use disco_core::formula::Agent;
use disco_core::game::{
    validate_game, ActionName, Dest, Game, GameSpec, Mem, Profile, State, StrategyAutomaton,
    TransitionSpec, TERMINAL_NAME,
};
use disco_core::rational::{parse_rat, render_rat};

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Game(disco_core::game::GameError),
    #[error("invalid file: {0}")]
    Invalid(String),
}

impl From<disco_core::game::GameError> for FileError {
    fn from(e: disco_core::game::GameError) -> FileError {
        FileError::Game(e)
    }
}

fn invalid(message: impl Into<String>) -> FileError {
    FileError::Invalid(message.into())
}

/// Drops `#` comment lines so the remainder is plain JSON.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|line| !line.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

// ---------------------------------------------------------------------------
// Game files
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize, Serialize)]
struct GameFileTransition {
    from: String,
    #[serde(default)]
    profile: BTreeMap<String, String>,
    #[serde(default)]
    costs: BTreeMap<String, String>,
    to: String,
}

#[derive(Debug, Deserialize, Serialize)]
struct GameFile {
    agents: Vec<String>,
    states: Vec<String>,
    actions: Vec<String>,
    epsilon: String,
    transitions: Vec<GameFileTransition>,
    valuation: BTreeMap<String, Vec<String>>,
}

/// Parses game-file text (comments allowed) into a validated game.
pub fn parse_game(text: &str) -> Result<Game, FileError> {
    let file: GameFile = serde_json::from_str(&strip_comments(text))?;
    let transitions = file
        .transitions
        .into_iter()
        .map(|t| {
            let costs = t
                .costs
                .into_iter()
                .map(|(agent, value)| {
                    let value = parse_rat(&value).map_err(invalid)?;
                    Ok((agent, value))
                })
                .collect::<Result<_, FileError>>()?;
            Ok(TransitionSpec {
                from: t.from,
                profile: t.profile,
                costs,
                to: t.to,
            })
        })
        .collect::<Result<_, FileError>>()?;
    let spec = GameSpec {
        agents: file.agents,
        states: file.states,
        actions: file.actions,
        epsilon: file.epsilon,
        transitions,
        valuation: file.valuation,
    };
    Ok(validate_game(&spec)?)
}

pub fn load_game(path: &Path) -> Result<Game, FileError> {
    parse_game(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Strategy files
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize, Serialize)]
struct StrategyFile {
    coalition: Vec<String>,
    memory: Vec<String>,
    init: String,
    /// `"mem,agent"` -> action.
    act: BTreeMap<String, String>,
    /// `"mem|profileHash|to"` -> mem, where profileHash is the sorted
    /// `agent=action` list and `to` may be the terminal `#t`.
    update: BTreeMap<String, String>,
}

fn parse_dest(text: &str) -> Dest {
    if text == TERMINAL_NAME {
        Dest::Terminal
    } else {
        Dest::State(State::new(text))
    }
}

fn render_dest(dest: &Dest) -> String {
    match dest {
        Dest::Terminal => TERMINAL_NAME.to_string(),
        Dest::State(s) => s.as_str().to_string(),
    }
}

fn parse_profile_hash(hash: &str) -> Result<Profile, FileError> {
    let mut entries = BTreeMap::new();
    if !hash.is_empty() {
        for part in hash.split(',') {
            let (agent, action) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("malformed profile hash `{hash}`")))?;
            let agent = Agent::new(agent).map_err(|e| invalid(e.to_string()))?;
            entries.insert(agent, ActionName::new(action));
        }
    }
    Ok(Profile(entries))
}

/// Parses strategy-file text (comments allowed).
pub fn parse_strategy(text: &str) -> Result<StrategyAutomaton, FileError> {
    let file: StrategyFile = serde_json::from_str(&strip_comments(text))?;
    let coalition = file
        .coalition
        .iter()
        .map(|a| Agent::new(a).map_err(|e| invalid(e.to_string())))
        .collect::<Result<_, _>>()?;
    let memory: std::collections::BTreeSet<Mem> = file.memory.iter().map(|m| Mem::new(m)).collect();
    let init = Mem::new(&file.init);
    if !memory.contains(&init) {
        return Err(invalid(format!(
            "init `{}` is not a memory state",
            file.init
        )));
    }
    let mut act = BTreeMap::new();
    for (key, action) in &file.act {
        let (mem, agent) = key
            .split_once(',')
            .ok_or_else(|| invalid(format!("malformed act key `{key}`")))?;
        let mem = Mem::new(mem);
        if !memory.contains(&mem) {
            return Err(invalid(format!(
                "act key `{key}` uses unknown memory state"
            )));
        }
        let agent = Agent::new(agent).map_err(|e| invalid(e.to_string()))?;
        act.insert((mem, agent), ActionName::new(action));
    }
    let mut update = BTreeMap::new();
    for (key, next) in &file.update {
        let mut parts = key.splitn(3, '|');
        let (Some(mem), Some(hash), Some(to)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(invalid(format!("malformed update key `{key}`")));
        };
        let mem = Mem::new(mem);
        let next = Mem::new(next);
        if !memory.contains(&mem) || !memory.contains(&next) {
            return Err(invalid(format!(
                "update key `{key}` uses unknown memory state"
            )));
        }
        update.insert((mem, parse_profile_hash(hash)?, parse_dest(to)), next);
    }
    Ok(StrategyAutomaton {
        coalition,
        memory,
        init,
        act,
        update,
    })
}

pub fn load_strategy(path: &Path) -> Result<StrategyAutomaton, FileError> {
    parse_strategy(&std::fs::read_to_string(path)?)
}

/// Renders a strategy in the strategy-file format.
pub fn render_strategy(strategy: &StrategyAutomaton) -> String {
    let file = StrategyFile {
        coalition: strategy
            .coalition
            .iter()
            .map(|a| a.as_str().to_string())
            .collect(),
        memory: strategy
            .memory
            .iter()
            .map(|m| m.as_str().to_string())
            .collect(),
        init: strategy.init.as_str().to_string(),
        act: strategy
            .act
            .iter()
            .map(|((mem, agent), action)| (format!("{mem},{agent}"), action.as_str().to_string()))
            .collect(),
        update: strategy
            .update
            .iter()
            .map(|((mem, profile, dest), next)| {
                (
                    format!("{mem}|{}|{}", profile.key(), render_dest(dest)),
                    next.as_str().to_string(),
                )
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain maps serialize");
    out.push('\n');
    out
}

pub fn save_strategy(path: &Path, strategy: &StrategyAutomaton) -> Result<(), FileError> {
    Ok(std::fs::write(path, render_strategy(strategy))?)
}

/// Renders a cost vector as `a: 1, b: 5/8` over the given agents.
pub fn render_costs<'a>(
    agents: impl Iterator<Item = &'a Agent>,
    costs: &disco_core::game::CostVector,
) -> String {
    agents
        .map(|a| format!("{a}: {}", render_rat(&costs.get(a))))
        .collect::<Vec<_>>()
        .join(", ")
}
