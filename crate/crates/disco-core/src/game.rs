//! Finite concurrent games, plays, finite-state strategies and simulation.
//!
//! A game has a finite state set plus a reserved terminal `#t`, a finite
//! action set with a designated zero-cost action, a nondeterministic serial
//! mechanism of `(state, complete profile, cost vector, destination)`
//! quadruples, and a valuation of propositional variables. Raw descriptions
//! ([`GameSpec`]) may use per-agent wildcards in transition profiles;
//! [`validate_game`] expands them (most specific entry wins), fills missing
//! costs with zero, and checks the mechanism invariants exhaustively.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::formula::Agent;
use crate::rational::Rat;

/// Reserved name of the terminal state in raw descriptions.
pub const TERMINAL_NAME: &str = "#t";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(String);

impl State {
    pub fn new(name: &str) -> State {
        State(name.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl core::fmt::Display for State {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionName(String);

impl ActionName {
    pub fn new(name: &str) -> ActionName {
        ActionName(name.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl core::fmt::Display for ActionName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Destination of a transition: a game state or the terminal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dest {
    State(State),
    Terminal,
}

impl core::fmt::Display for Dest {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Dest::State(s) => f.write_str(s.as_str()),
            Dest::Terminal => f.write_str(TERMINAL_NAME),
        }
    }
}

/// Complete action profile: one action per agent of the game.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Profile(pub BTreeMap<Agent, ActionName>);

impl Profile {
    pub fn get(&self, agent: &Agent) -> Option<&ActionName> {
        self.0.get(agent)
    }

    /// Canonical key `a=act,b=act` in agent order, used by strategy files.
    pub fn key(&self) -> String {
        let mut out = String::new();
        for (i, (agent, action)) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(agent.as_str());
            out.push('=');
            out.push_str(action.as_str());
        }
        out
    }
}

/// Total nonnegative cost assignment, one entry per agent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct CostVector(pub BTreeMap<Agent, Rat>);

impl CostVector {
    pub fn zero(agents: &BTreeSet<Agent>) -> CostVector {
        CostVector(agents.iter().map(|a| (a.clone(), Rat::zero())).collect())
    }

    pub fn get(&self, agent: &Agent) -> Rat {
        self.0.get(agent).cloned().unwrap_or_else(Rat::zero)
    }
}

/// One raw transition: partial profile with `"*"` wildcards (absent agents
/// count as wildcards), partial costs (absent agents pay zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSpec {
    pub from: String,
    pub profile: BTreeMap<String, String>,
    pub costs: BTreeMap<String, Rat>,
    pub to: String,
}

/// Raw game description prior to validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GameSpec {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub epsilon: String,
    pub transitions: Vec<TransitionSpec>,
    pub valuation: BTreeMap<String, Vec<String>>,
}

/// Validated game with the mechanism fully expanded per complete profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    agents: BTreeSet<Agent>,
    states: BTreeSet<State>,
    actions: BTreeSet<ActionName>,
    epsilon: ActionName,
    mechanism: BTreeMap<(State, Profile), BTreeSet<(CostVector, Dest)>>,
    valuation: BTreeMap<String, BTreeSet<State>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameError {
    /// E-EPSILON-COST: a transition charges an agent that plays epsilon.
    EpsilonCost {
        state: State,
        agent: Agent,
        cost: Rat,
    },
    /// E-SERIAL: no outcome for this state and complete profile.
    Serial { state: State, profile: Profile },
    /// E-BAD-REF: unknown state, agent or action (or other ill-formed field).
    BadRef(String),
    /// E-GAMMA: discount factor outside (0,1).
    Gamma,
}

impl core::fmt::Display for GameError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GameError::EpsilonCost { state, agent, cost } => write!(
                f,
                "E-EPSILON-COST: at state {state}, agent {agent} plays epsilon but is charged {}",
                crate::rational::render_rat(cost)
            ),
            GameError::Serial { state, profile } => write!(
                f,
                "E-SERIAL: no outcome at state {state} for profile {}",
                profile.key()
            ),
            GameError::BadRef(what) => write!(f, "E-BAD-REF: {what}"),
            GameError::Gamma => write!(f, "E-GAMMA: discount factor must be in (0,1)"),
        }
    }
}

impl Game {
    pub fn agents(&self) -> &BTreeSet<Agent> {
        &self.agents
    }

    pub fn states(&self) -> &BTreeSet<State> {
        &self.states
    }

    pub fn actions(&self) -> &BTreeSet<ActionName> {
        &self.actions
    }

    pub fn epsilon(&self) -> &ActionName {
        &self.epsilon
    }

    pub fn transition_count(&self) -> usize {
        self.mechanism.values().map(|v| v.len()).sum()
    }

    pub fn holds(&self, var: &str, state: &State) -> bool {
        self.valuation.get(var).is_some_and(|s| s.contains(state))
    }

    pub fn valuation(&self, var: &str) -> BTreeSet<State> {
        self.valuation.get(var).cloned().unwrap_or_default()
    }

    /// All mechanism outcomes for a state and complete profile.
    pub fn successors(
        &self,
        state: &State,
        profile: &Profile,
    ) -> Result<&BTreeSet<(CostVector, Dest)>, GameError> {
        if !self.states.contains(state) {
            return Err(GameError::BadRef(format!("unknown state {state}")));
        }
        for (agent, action) in &profile.0 {
            if !self.agents.contains(agent) {
                return Err(GameError::BadRef(format!("unknown agent {agent}")));
            }
            if !self.actions.contains(action) {
                return Err(GameError::BadRef(format!("unknown action {action}")));
            }
        }
        if profile.0.len() != self.agents.len() {
            return Err(GameError::BadRef("profile is not complete".to_owned()));
        }
        self.mechanism
            .get(&(state.clone(), profile.clone()))
            .ok_or_else(|| GameError::BadRef(format!("unknown profile at {state}")))
    }

    /// Largest single-step cost charged to the agent anywhere in the
    /// mechanism.
    pub fn max_step_cost(&self, agent: &Agent) -> Rat {
        let mut max = Rat::zero();
        for outcomes in self.mechanism.values() {
            for (costs, _) in outcomes {
                let c = costs.get(agent);
                if c > max {
                    max = c;
                }
            }
        }
        max
    }

    /// All complete profiles extending the fixed partial assignment, in
    /// lexicographic order.
    pub fn completions(&self, fixed: &BTreeMap<Agent, ActionName>) -> Vec<Profile> {
        let free: Vec<&Agent> = self
            .agents
            .iter()
            .filter(|a| !fixed.contains_key(a))
            .collect();
        let actions: Vec<&ActionName> = self.actions.iter().collect();
        let mut out = Vec::new();
        let mut picks = alloc::vec![0usize; free.len()];
        loop {
            let mut profile = fixed.clone();
            for (i, agent) in free.iter().enumerate() {
                profile.insert((*agent).clone(), actions[picks[i]].clone());
            }
            out.push(Profile(profile));
            // odometer over the free agents
            let mut i = free.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                picks[i] += 1;
                if picks[i] < actions.len() {
                    break;
                }
                picks[i] = 0;
            }
        }
    }

    /// All action profiles of a coalition, in lexicographic order.
    pub fn coalition_profiles(
        &self,
        coalition: &BTreeSet<Agent>,
    ) -> Vec<BTreeMap<Agent, ActionName>> {
        let members: Vec<&Agent> = coalition.iter().collect();
        let actions: Vec<&ActionName> = self.actions.iter().collect();
        let mut out = Vec::new();
        let mut picks = alloc::vec![0usize; members.len()];
        loop {
            let profile: BTreeMap<Agent, ActionName> = members
                .iter()
                .enumerate()
                .map(|(i, a)| ((*a).clone(), actions[picks[i]].clone()))
                .collect();
            out.push(profile);
            let mut i = members.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                picks[i] += 1;
                if picks[i] < actions.len() {
                    break;
                }
                picks[i] = 0;
            }
        }
    }
}

/// Expands wildcards and verifies the mechanism invariants: epsilon moves
/// are free for the agent playing them, and every state has at least one
/// outcome under every complete profile.
pub fn validate_game(spec: &GameSpec) -> Result<Game, GameError> {
    let mut agents = BTreeSet::new();
    for name in &spec.agents {
        let agent =
            Agent::new(name).map_err(|_| GameError::BadRef(format!("bad agent name `{name}`")))?;
        if !agents.insert(agent) {
            return Err(GameError::BadRef(format!("duplicate agent {name}")));
        }
    }
    if agents.is_empty() {
        return Err(GameError::BadRef(
            "game needs at least one agent".to_owned(),
        ));
    }

    let mut states = BTreeSet::new();
    for name in &spec.states {
        if name == TERMINAL_NAME {
            return Err(GameError::BadRef(format!(
                "`{TERMINAL_NAME}` is reserved for the terminal state"
            )));
        }
        if !states.insert(State::new(name)) {
            return Err(GameError::BadRef(format!("duplicate state {name}")));
        }
    }
    if states.is_empty() {
        return Err(GameError::BadRef(
            "game needs at least one state".to_owned(),
        ));
    }

    let mut actions = BTreeSet::new();
    for name in &spec.actions {
        if !actions.insert(ActionName::new(name)) {
            return Err(GameError::BadRef(format!("duplicate action {name}")));
        }
    }
    let epsilon = ActionName::new(&spec.epsilon);
    if !actions.contains(&epsilon) {
        return Err(GameError::BadRef(format!(
            "epsilon action `{}` is not in the action set",
            spec.epsilon
        )));
    }

    // Reference checks on the raw transitions.
    for t in &spec.transitions {
        if !states.contains(&State::new(&t.from)) {
            return Err(GameError::BadRef(format!("unknown state {}", t.from)));
        }
        if t.to != TERMINAL_NAME && !states.contains(&State::new(&t.to)) {
            return Err(GameError::BadRef(format!("unknown state {}", t.to)));
        }
        for (agent, action) in &t.profile {
            if !agents.contains(
                &Agent::new(agent)
                    .map_err(|_| GameError::BadRef(format!("bad agent name `{agent}`")))?,
            ) {
                return Err(GameError::BadRef(format!("unknown agent {agent}")));
            }
            if action != "*" && !actions.contains(&ActionName::new(action)) {
                return Err(GameError::BadRef(format!("unknown action {action}")));
            }
        }
        for (agent, cost) in &t.costs {
            if !agents.contains(
                &Agent::new(agent)
                    .map_err(|_| GameError::BadRef(format!("bad agent name `{agent}`")))?,
            ) {
                return Err(GameError::BadRef(format!("unknown agent {agent}")));
            }
            if cost < &Rat::zero() {
                return Err(GameError::BadRef(format!(
                    "negative cost for agent {agent}"
                )));
            }
        }
    }

    let mut valuation: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    for (var, names) in &spec.valuation {
        let mut set = BTreeSet::new();
        for name in names {
            let state = State::new(name);
            if !states.contains(&state) {
                return Err(GameError::BadRef(format!(
                    "valuation of {var} targets unknown state {name}"
                )));
            }
            set.insert(state);
        }
        valuation.insert(var.clone(), set);
    }

    // Expand wildcards over every complete profile: the most specific raw
    // entries (fewest wildcards) win, ties stay as nondeterminism.
    let game_shell = Game {
        agents: agents.clone(),
        states: states.clone(),
        actions: actions.clone(),
        epsilon: epsilon.clone(),
        mechanism: BTreeMap::new(),
        valuation: valuation.clone(),
    };
    let all_profiles = game_shell.completions(&BTreeMap::new());

    let mut mechanism: BTreeMap<(State, Profile), BTreeSet<(CostVector, Dest)>> = BTreeMap::new();
    for state in &states {
        for profile in &all_profiles {
            let mut best_specificity: Option<usize> = None;
            let mut outcomes = BTreeSet::new();
            for t in &spec.transitions {
                if t.from != state.as_str() {
                    continue;
                }
                let mut specificity = 0usize;
                let mut matched = true;
                for (agent, action) in &t.profile {
                    if action == "*" {
                        continue;
                    }
                    specificity += 1;
                    let agent = Agent::new(agent).expect("checked above");
                    if profile.get(&agent).map(|a| a.as_str()) != Some(action.as_str()) {
                        matched = false;
                        break;
                    }
                }
                if !matched {
                    continue;
                }
                match best_specificity {
                    Some(best) if specificity < best => continue,
                    Some(best) if specificity > best => outcomes.clear(),
                    _ => {}
                }
                best_specificity =
                    Some(best_specificity.map_or(specificity, |b| b.max(specificity)));
                let mut costs = CostVector::zero(&agents);
                for (agent, cost) in &t.costs {
                    costs
                        .0
                        .insert(Agent::new(agent).expect("checked above"), cost.clone());
                }
                let dest = if t.to == TERMINAL_NAME {
                    Dest::Terminal
                } else {
                    Dest::State(State::new(&t.to))
                };
                outcomes.insert((costs, dest));
            }
            if outcomes.is_empty() {
                return Err(GameError::Serial {
                    state: state.clone(),
                    profile: profile.clone(),
                });
            }
            // Epsilon plays must be free.
            for (costs, _) in &outcomes {
                for agent in &agents {
                    if profile.get(agent) == Some(&epsilon) && !costs.get(agent).is_zero() {
                        return Err(GameError::EpsilonCost {
                            state: state.clone(),
                            agent: agent.clone(),
                            cost: costs.get(agent),
                        });
                    }
                }
            }
            mechanism.insert((state.clone(), profile.clone()), outcomes);
        }
    }

    Ok(Game {
        agents,
        states,
        actions,
        epsilon,
        mechanism,
        valuation,
    })
}

// ---------------------------------------------------------------------------
// Plays
// ---------------------------------------------------------------------------

/// One step of a play.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub profile: Profile,
    pub costs: CostVector,
    pub to: Dest,
}

/// Alternating sequence of states, complete profiles and cost vectors. Only
/// the last position may be the terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub start: State,
    pub steps: Vec<Step>,
}

impl Play {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The state visited before step `i` (the start for `i == 0`).
    fn state_before(&self, i: usize) -> Option<&State> {
        if i == 0 {
            Some(&self.start)
        } else {
            match &self.steps[i - 1].to {
                Dest::State(s) => Some(s),
                Dest::Terminal => None,
            }
        }
    }
}

/// Checks the play conditions: all intermediate states non-terminal and
/// every step quadruple in the mechanism.
pub fn is_play(game: &Game, play: &Play) -> bool {
    if !game.states().contains(&play.start) {
        return false;
    }
    for (i, step) in play.steps.iter().enumerate() {
        let Some(from) = play.state_before(i) else {
            return false; // a step departs from the terminal
        };
        match game.successors(from, &step.profile) {
            Ok(outcomes) => {
                if !outcomes.contains(&(step.costs.clone(), step.to.clone())) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mem(String);

impl Mem {
    pub fn new(name: &str) -> Mem {
        Mem(name.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl core::fmt::Display for Mem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Finite presentation of a perfect-recall strategy: a memory automaton
/// whose update reads the observed step (profile and destination).
///
/// An update entry missing for an observed step leaves the memory unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyAutomaton {
    pub coalition: BTreeSet<Agent>,
    pub memory: BTreeSet<Mem>,
    pub init: Mem,
    pub act: BTreeMap<(Mem, Agent), ActionName>,
    pub update: BTreeMap<(Mem, Profile, Dest), Mem>,
}

impl StrategyAutomaton {
    pub fn next_mem(&self, mem: &Mem, profile: &Profile, to: &Dest) -> Mem {
        self.update
            .get(&(mem.clone(), profile.clone(), to.clone()))
            .cloned()
            .unwrap_or_else(|| mem.clone())
    }
}

/// True iff every coalition member follows the automaton at every step of
/// the play (replaying the prefix through the update function).
pub fn play_satisfies(game: &Game, play: &Play, strategy: &StrategyAutomaton) -> bool {
    debug_assert!(is_play(game, play));
    let mut mem = strategy.init.clone();
    for step in &play.steps {
        for agent in &strategy.coalition {
            let expected = strategy.act.get(&(mem.clone(), agent.clone()));
            if step.profile.get(agent) != expected {
                return false;
            }
        }
        mem = strategy.next_mem(&mem, &step.profile, &step.to);
    }
    true
}

/// Exact per-agent discounted total `sum_i u_i(a) * gamma^i`.
pub fn discounted_cost(play: &Play, gamma: &Rat) -> Result<CostVector, GameError> {
    if gamma <= &Rat::zero() || gamma >= &Rat::one() {
        return Err(GameError::Gamma);
    }
    let mut totals: BTreeMap<Agent, Rat> = BTreeMap::new();
    let mut factor = Rat::one();
    for step in &play.steps {
        for (agent, cost) in &step.costs.0 {
            let entry = totals.entry(agent.clone()).or_insert_with(Rat::zero);
            *entry += cost * &factor;
        }
        factor *= gamma;
    }
    Ok(CostVector(totals))
}

/// Deterministic rule completing the coalition's profile and resolving
/// mechanism nondeterminism during simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AdversaryPolicy {
    /// Lexicographically smallest completion, then lexicographically
    /// smallest transition (by cost vector, then destination).
    #[default]
    Lexicographic,
}

/// Runs the strategy against the adversary for at most `depth` steps,
/// stopping early at the terminal.
pub fn simulate(
    game: &Game,
    strategy: &StrategyAutomaton,
    adversary: AdversaryPolicy,
    depth: usize,
    start: &State,
) -> Result<Play, GameError> {
    let AdversaryPolicy::Lexicographic = adversary;
    if !game.states().contains(start) {
        return Err(GameError::BadRef(format!("unknown state {start}")));
    }
    if !strategy.coalition.is_subset(game.agents()) {
        return Err(GameError::BadRef(
            "strategy coalition is not a subset of the game's agents".to_owned(),
        ));
    }
    let smallest_action = game
        .actions()
        .iter()
        .next()
        .expect("validated game has actions")
        .clone();
    let mut play = Play {
        start: start.clone(),
        steps: Vec::new(),
    };
    let mut current = start.clone();
    let mut mem = strategy.init.clone();
    for _ in 0..depth {
        let mut assignment = BTreeMap::new();
        for agent in game.agents() {
            let action = if strategy.coalition.contains(agent) {
                strategy
                    .act
                    .get(&(mem.clone(), agent.clone()))
                    .ok_or_else(|| {
                        GameError::BadRef(format!("strategy has no action for agent {agent}"))
                    })?
                    .clone()
            } else {
                smallest_action.clone()
            };
            if !game.actions().contains(&action) {
                return Err(GameError::BadRef(format!("unknown action {action}")));
            }
            assignment.insert(agent.clone(), action);
        }
        let profile = Profile(assignment);
        let (costs, to) = game
            .successors(&current, &profile)?
            .iter()
            .next()
            .expect("seriality")
            .clone();
        play.steps.push(Step {
            profile: profile.clone(),
            costs,
            to: to.clone(),
        });
        match to {
            Dest::Terminal => break,
            Dest::State(next) => {
                mem = strategy.next_mem(&mem, &profile, &Dest::State(next.clone()));
                current = next;
            }
        }
    }
    Ok(play)
}
