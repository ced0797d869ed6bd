//! Three-valued model checking of the maintenance modality.
//!
//! The maintenance goal `(w, C, b, f)` holds iff `w` satisfies `f` and the
//! coalition has a profile whose every compatible outcome `(u, w')` fits the
//! budget (`u <= b` on `C`) and leads to the terminal or to the rescaled goal
//! `(w', C, (b-u)/gamma, f/gamma)`. Maintenance is a greatest fixed point, so
//! the proof search accepts a goal that exactly reproduces a pending goal
//! (coinductive cycle rule); budget entries that reach the per-agent
//! saturation bound are replaced by a symbolic infinity, and an all-infinite
//! goal with a division-stable body reduces to a budget-free safety-region
//! test. Everything that exceeds the depth or goal limits comes back
//! `Unknown` with a reason instead of not terminating.
//!
//! [`oracle_check`] is an independent bounded-horizon brute-force decision
//! procedure used to cross-check the main search; it shares no code with it
//! beyond the game accessors.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::One;

use crate::formula::{self, Agent, Budget, Formula};
use crate::game::{ActionName, CostVector, Dest, Game, Mem, Profile, State, StrategyAutomaton};
use crate::rational::Rat;

/// Three-valued verdict status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Truth {
    False,
    Unknown,
    True,
}

impl Truth {
    pub fn as_str(self) -> &'static str {
        match self {
            Truth::True => "TRUE",
            Truth::False => "FALSE",
            Truth::Unknown => "UNKNOWN",
        }
    }
}

impl core::fmt::Display for Truth {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Work bounds for one check invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLimits {
    pub max_depth: usize,
    pub max_goals: usize,
}

impl Default for CheckLimits {
    fn default() -> CheckLimits {
        CheckLimits {
            max_depth: 64,
            max_goals: 1_000_000,
        }
    }
}

/// Discount factor plus work bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckContext {
    pub gamma: Rat,
    pub limits: CheckLimits,
}

impl CheckContext {
    pub fn new(gamma: Rat) -> CheckContext {
        CheckContext {
            gamma,
            limits: CheckLimits::default(),
        }
    }
}

/// Result of a check: status, optional witness strategy (True modal goals
/// only) and an optional diagnostic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Truth,
    pub witness: Option<StrategyAutomaton>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckError {
    /// E-GAMMA: discount factor outside (0,1).
    Gamma,
    /// E-BAD-REF: unknown state or agent, or mismatched coalition.
    BadRef(String),
    /// E-LIMITS: invalid limits, or the oracle's hard node budget exceeded.
    Limits(String),
}

impl core::fmt::Display for CheckError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CheckError::Gamma => {
                f.write_str("E-GAMMA: discount factor must be strictly between 0 and 1")
            }
            CheckError::BadRef(what) => write!(f, "E-BAD-REF: {what}"),
            CheckError::Limits(what) => write!(f, "E-LIMITS: {what}"),
        }
    }
}

fn gamma_ok(gamma: &Rat) -> Result<(), CheckError> {
    use num_traits::Zero;
    if gamma <= &Rat::zero() || gamma >= &Rat::one() {
        return Err(CheckError::Gamma);
    }
    Ok(())
}

/// `U_a / (1 - gamma)`: the largest discounted total the agent can ever be
/// charged. A budget entry at or above it never constrains.
pub fn saturation_bound(game: &Game, agent: &Agent, gamma: &Rat) -> Result<Rat, CheckError> {
    gamma_ok(gamma)?;
    if !game.agents().contains(agent) {
        return Err(CheckError::BadRef(format!("unknown agent {agent}")));
    }
    Ok(game.max_step_cost(agent) / (Rat::one() - gamma))
}

/// Largest `Z ⊆ target` such that from every state of `Z` the coalition has
/// a profile whose every outcome lands back in `Z` or in the terminal.
pub fn safety_region(
    game: &Game,
    coalition: &BTreeSet<Agent>,
    target: &BTreeSet<State>,
) -> Result<BTreeSet<State>, CheckError> {
    for agent in coalition {
        if !game.agents().contains(agent) {
            return Err(CheckError::BadRef(format!("unknown agent {agent}")));
        }
    }
    for state in target {
        if !game.states().contains(state) {
            return Err(CheckError::BadRef(format!("unknown state {state}")));
        }
    }
    Ok(safety_region_inner(game, coalition, target))
}

fn safety_region_inner(
    game: &Game,
    coalition: &BTreeSet<Agent>,
    target: &BTreeSet<State>,
) -> BTreeSet<State> {
    let mut region = target.clone();
    loop {
        let mut kept = BTreeSet::new();
        for state in &region {
            if region_profile(game, coalition, &region, state).is_some() {
                kept.insert(state.clone());
            }
        }
        if kept == region {
            return region;
        }
        region = kept;
    }
}

/// Smallest coalition profile keeping every outcome from `state` inside the
/// region (or the terminal), if one exists.
fn region_profile(
    game: &Game,
    coalition: &BTreeSet<Agent>,
    region: &BTreeSet<State>,
    state: &State,
) -> Option<BTreeMap<Agent, ActionName>> {
    'alpha: for alpha in game.coalition_profiles(coalition) {
        for delta in game.completions(&alpha) {
            let outcomes = game
                .successors(state, &delta)
                .expect("validated game is serial");
            for (_, dest) in outcomes {
                if let Dest::State(s) = dest {
                    if !region.contains(s) {
                        continue 'alpha;
                    }
                }
            }
        }
        return Some(alpha);
    }
    None
}

// ---------------------------------------------------------------------------
// Proof search
// ---------------------------------------------------------------------------

/// A budget entry in current-step money, or the saturation marker.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Entry {
    Fin(Rat),
    Inf,
}

/// One maintenance goal: a state, the coalition's remaining budget in
/// current money, and the rescaled body. Exact rationals make goal identity
/// decidable, which is what the coinductive cycle rule relies on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Goal {
    state: State,
    budget: BTreeMap<Agent, Entry>,
    body: Formula,
}

/// Winning move recorded for a proved goal: the coalition profile and, per
/// observed step, the successor goal.
#[derive(Clone, Debug)]
struct TableEntry {
    alpha: BTreeMap<Agent, ActionName>,
    next: BTreeMap<(Profile, Dest), Goal>,
}

const NO_LINK: usize = usize::MAX;

struct Search<'g> {
    game: &'g Game,
    gamma: Rat,
    max_depth: usize,
    max_goals: usize,
    bounds: BTreeMap<Agent, Rat>,
    memo: BTreeMap<Goal, Truth>,
    path: Vec<Goal>,
    table: BTreeMap<Goal, TableEntry>,
    goals_created: usize,
    depth_hit: bool,
    cap_hit: bool,
}

impl<'g> Search<'g> {
    fn new(game: &'g Game, ctx: &CheckContext) -> Search<'g> {
        let bounds = game
            .agents()
            .iter()
            .map(|a| {
                let bound = game.max_step_cost(a) / (Rat::one() - &ctx.gamma);
                (a.clone(), bound)
            })
            .collect();
        Search {
            game,
            gamma: ctx.gamma.clone(),
            max_depth: ctx.limits.max_depth,
            max_goals: ctx.limits.max_goals,
            bounds,
            memo: BTreeMap::new(),
            path: Vec::new(),
            table: BTreeMap::new(),
            goals_created: 0,
            depth_hit: false,
            cap_hit: false,
        }
    }

    fn bound(&self, agent: &Agent) -> &Rat {
        self.bounds
            .get(agent)
            .expect("agent validated against game")
    }

    /// Caps every modal budget entry at the agent's saturation bound. Any
    /// entry at or above the bound never constrains, so the cap preserves
    /// meaning while making division-stability of bodies detectable.
    fn clamp_formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::Var(p) => Formula::Var(p.clone()),
            Formula::Not(g) => Formula::not(self.clamp_formula(g)),
            Formula::Implies(a, b) => {
                Formula::implies(self.clamp_formula(a), self.clamp_formula(b))
            }
            Formula::Modal(budget, body) => {
                let entries: BTreeMap<Agent, Rat> = budget
                    .iter()
                    .map(|(agent, value)| {
                        let bound = self.bound(agent);
                        let capped = if value > bound {
                            bound.clone()
                        } else {
                            value.clone()
                        };
                        (agent.clone(), capped)
                    })
                    .collect();
                let budget = Budget::new(entries).expect("capped entries stay nonnegative");
                Formula::modal(budget, self.clamp_formula(body))
            }
        }
    }

    /// Builds the goal for a modality at `state`: entries at or above the
    /// bound become the saturation marker, the body is capped.
    fn make_goal(&self, state: &State, budget: &Budget, body: &Formula) -> Goal {
        let entries = budget
            .iter()
            .map(|(agent, value)| {
                let entry = if value >= self.bound(agent) {
                    Entry::Inf
                } else {
                    Entry::Fin(value.clone())
                };
                (agent.clone(), entry)
            })
            .collect();
        Goal {
            state: state.clone(),
            budget: entries,
            body: self.clamp_formula(body),
        }
    }

    /// The successor goal after paying `costs` and moving to `to`: budgets
    /// update by `b ↦ (b-u)/gamma` in current money, the body is divided by
    /// gamma and re-capped. Callers must have checked `u <= b` first.
    fn step_goal(&self, goal: &Goal, costs: &CostVector, to: &State) -> Goal {
        let budget = goal
            .budget
            .iter()
            .map(|(agent, entry)| {
                let next = match entry {
                    Entry::Inf => Entry::Inf,
                    Entry::Fin(b) => {
                        let left = (b - costs.get(agent)) / &self.gamma;
                        if &left >= self.bound(agent) {
                            Entry::Inf
                        } else {
                            Entry::Fin(left)
                        }
                    }
                };
                (agent.clone(), next)
            })
            .collect();
        let body = self.clamp_formula(&formula::divide_unchecked(&goal.body, &self.gamma));
        Goal {
            state: to.clone(),
            budget,
            body,
        }
    }

    /// Kleene three-valued evaluation. Modal subformulas open their own
    /// proof search on a fresh pending path, so cycle acceptance never
    /// crosses an evaluation boundary.
    fn eval(&mut self, state: &State, f: &Formula) -> Truth {
        match f {
            Formula::Var(p) => {
                if self.game.holds(p, state) {
                    Truth::True
                } else {
                    Truth::False
                }
            }
            Formula::Not(g) => match self.eval(state, g) {
                Truth::True => Truth::False,
                Truth::False => Truth::True,
                Truth::Unknown => Truth::Unknown,
            },
            Formula::Implies(a, b) => match (self.eval(state, a), self.eval(state, b)) {
                (Truth::False, _) | (_, Truth::True) => Truth::True,
                (Truth::True, Truth::False) => Truth::False,
                _ => Truth::Unknown,
            },
            Formula::Modal(budget, body) => {
                let goal = self.make_goal(state, budget, body);
                let saved = core::mem::take(&mut self.path);
                let (truth, _) = self.solve(&goal);
                self.path = saved;
                truth
            }
        }
    }

    /// Core search. Returns the truth value and, for `True`, the smallest
    /// pending-path index the proof leans on (`NO_LINK` when the proof is
    /// self-contained). Only self-contained `True` results are memoized;
    /// `False` is always definitive; `Unknown` is never cached.
    fn solve(&mut self, goal: &Goal) -> (Truth, usize) {
        if let Some(truth) = self.memo.get(goal) {
            return (*truth, NO_LINK);
        }
        if let Some(index) = self.path.iter().position(|g| g == goal) {
            // Coinductive acceptance: the goal reproduces a pending goal.
            return (Truth::True, index);
        }
        if self.path.len() >= self.max_depth {
            self.depth_hit = true;
            return (Truth::Unknown, NO_LINK);
        }
        self.goals_created += 1;
        if self.goals_created > self.max_goals {
            self.cap_hit = true;
            return (Truth::Unknown, NO_LINK);
        }

        let body_truth = self.eval(&goal.state, &goal.body);
        if body_truth == Truth::False {
            self.memo.insert(goal.clone(), Truth::False);
            return (Truth::False, NO_LINK);
        }

        let all_saturated = goal.budget.values().all(|e| matches!(e, Entry::Inf));
        if all_saturated {
            let rescaled = self.clamp_formula(&formula::divide_unchecked(&goal.body, &self.gamma));
            if rescaled == goal.body {
                return (self.solve_saturated(goal), NO_LINK);
            }
        }

        self.path.push(goal.clone());
        let coalition: BTreeSet<Agent> = goal.budget.keys().cloned().collect();
        let mut maintain = Truth::False;
        let mut win_link = NO_LINK;
        let mut winner: Option<TableEntry> = None;
        'alpha: for alpha in self.game.coalition_profiles(&coalition) {
            let mut saw_unknown = false;
            let mut link = NO_LINK;
            let mut next = BTreeMap::new();
            for delta in self.game.completions(&alpha) {
                let outcomes = self
                    .game
                    .successors(&goal.state, &delta)
                    .expect("validated game is serial")
                    .clone();
                for (costs, dest) in outcomes {
                    for (agent, entry) in &goal.budget {
                        if let Entry::Fin(b) = entry {
                            if &costs.get(agent) > b {
                                continue 'alpha; // the budget cannot pay this step
                            }
                        }
                    }
                    let Dest::State(to) = &dest else { continue };
                    let child = self.step_goal(goal, &costs, to);
                    let (truth, child_link) = self.solve(&child);
                    match truth {
                        Truth::False => continue 'alpha,
                        Truth::Unknown => saw_unknown = true,
                        Truth::True => {
                            link = link.min(child_link);
                            next.insert((delta.clone(), dest.clone()), child);
                        }
                    }
                }
            }
            if saw_unknown {
                maintain = maintain.max(Truth::Unknown);
            } else {
                maintain = Truth::True;
                win_link = link;
                winner = Some(TableEntry { alpha, next });
                break;
            }
        }
        self.path.pop();

        let status = match (body_truth, maintain) {
            (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        };
        match status {
            Truth::False => {
                self.memo.insert(goal.clone(), Truth::False);
                (Truth::False, NO_LINK)
            }
            Truth::True => {
                self.table
                    .insert(goal.clone(), winner.expect("winner set with True"));
                if win_link == NO_LINK || win_link >= self.path.len() {
                    // The proof does not lean on any still-pending ancestor.
                    self.memo.insert(goal.clone(), Truth::True);
                    (Truth::True, NO_LINK)
                } else {
                    (Truth::True, win_link)
                }
            }
            Truth::Unknown => (Truth::Unknown, NO_LINK),
        }
    }

    /// All budget entries saturated and the body stable under rescaling:
    /// the goal reduces to membership in a budget-free safety region. The
    /// pessimistic region (body definitely true) certifies True for every
    /// member state; falling outside the optimistic region (body possibly
    /// true) refutes the goal.
    fn solve_saturated(&mut self, goal: &Goal) -> Truth {
        let coalition: BTreeSet<Agent> = goal.budget.keys().cloned().collect();
        let mut pess_target = BTreeSet::new();
        let mut opt_target = BTreeSet::new();
        for state in self.game.states().clone() {
            match self.eval(&state, &goal.body) {
                Truth::True => {
                    pess_target.insert(state.clone());
                    opt_target.insert(state);
                }
                Truth::Unknown => {
                    opt_target.insert(state);
                }
                Truth::False => {}
            }
        }
        let pess = safety_region_inner(self.game, &coalition, &pess_target);
        if pess.contains(&goal.state) {
            for state in &pess {
                let member = Goal {
                    state: state.clone(),
                    budget: goal.budget.clone(),
                    body: goal.body.clone(),
                };
                if !self.table.contains_key(&member) {
                    let entry = self.region_entry(&member, &pess, &coalition);
                    self.table.insert(member.clone(), entry);
                }
                self.memo.insert(member, Truth::True);
            }
            return Truth::True;
        }
        let opt = safety_region_inner(self.game, &coalition, &opt_target);
        if !opt.contains(&goal.state) {
            self.memo.insert(goal.clone(), Truth::False);
            return Truth::False;
        }
        Truth::Unknown
    }

    /// Table entry for a safety-region member: the smallest region-keeping
    /// profile, with every non-terminal outcome looping to the sibling goal.
    fn region_entry(
        &self,
        goal: &Goal,
        region: &BTreeSet<State>,
        coalition: &BTreeSet<Agent>,
    ) -> TableEntry {
        let alpha = region_profile(self.game, coalition, region, &goal.state)
            .expect("region member has a keeping profile");
        let mut next = BTreeMap::new();
        for delta in self.game.completions(&alpha) {
            let outcomes = self
                .game
                .successors(&goal.state, &delta)
                .expect("validated game is serial");
            for (_, dest) in outcomes {
                if let Dest::State(to) = dest {
                    let child = Goal {
                        state: to.clone(),
                        budget: goal.budget.clone(),
                        body: goal.body.clone(),
                    };
                    next.insert((delta.clone(), dest.clone()), child);
                }
            }
        }
        TableEntry { alpha, next }
    }

    /// Rebuilds a strategy automaton from the proof table, breadth-first
    /// from the root goal. Every edge is re-verified against the mechanism
    /// (budget feasibility and closure of the goal graph), so a returned
    /// automaton is self-supporting by construction.
    fn extract_witness(&self, root: &Goal) -> Option<StrategyAutomaton> {
        let coalition: BTreeSet<Agent> = root.budget.keys().cloned().collect();
        let mut ids: BTreeMap<Goal, Mem> = BTreeMap::new();
        let mut order = 0usize;
        let mut queue = VecDeque::new();
        ids.insert(root.clone(), Mem::new("m0"));
        queue.push_back(root.clone());
        let mut act = BTreeMap::new();
        let mut update = BTreeMap::new();
        while let Some(goal) = queue.pop_front() {
            let mem = ids.get(&goal).cloned().expect("queued goals are named");
            let entry = self.table.get(&goal)?;
            for (agent, action) in &entry.alpha {
                act.insert((mem.clone(), agent.clone()), action.clone());
            }
            for delta in self.game.completions(&entry.alpha) {
                let outcomes = self.game.successors(&goal.state, &delta).ok()?;
                for (costs, dest) in outcomes {
                    for (agent, budget_entry) in &goal.budget {
                        if let Entry::Fin(b) = budget_entry {
                            if &costs.get(agent) > b {
                                return None; // table entry cannot pay this step
                            }
                        }
                    }
                    let Dest::State(_) = dest else { continue };
                    let child = entry.next.get(&(delta.clone(), dest.clone()))?;
                    let child_mem = match ids.get(child) {
                        Some(m) => m.clone(),
                        None => {
                            order += 1;
                            let m = Mem::new(&format!("m{order}"));
                            ids.insert(child.clone(), m.clone());
                            queue.push_back(child.clone());
                            m
                        }
                    };
                    update.insert((mem.clone(), delta.clone(), dest.clone()), child_mem);
                }
            }
        }
        Some(StrategyAutomaton {
            coalition,
            memory: ids.values().cloned().collect(),
            init: Mem::new("m0"),
            act,
            update,
        })
    }
}

fn validate_inputs(
    game: &Game,
    state: &State,
    f: &Formula,
    ctx: &CheckContext,
) -> Result<(), CheckError> {
    gamma_ok(&ctx.gamma)?;
    if ctx.limits.max_depth == 0 || ctx.limits.max_goals == 0 {
        return Err(CheckError::Limits("limits must be positive".to_string()));
    }
    if !game.states().contains(state) {
        return Err(CheckError::BadRef(format!("unknown state {state}")));
    }
    for agent in f.agents() {
        if !game.agents().contains(&agent) {
            return Err(CheckError::BadRef(format!("unknown agent {agent}")));
        }
    }
    Ok(())
}

/// Checks whether the formula holds at the state. Propositional connectives
/// are evaluated exactly (three-valued only through modal subgoals); a True
/// modal verdict carries a witness automaton.
pub fn check(
    game: &Game,
    state: &State,
    f: &Formula,
    ctx: &CheckContext,
) -> Result<Verdict, CheckError> {
    validate_inputs(game, state, f, ctx)?;
    let mut search = Search::new(game, ctx);
    let capped = search.clamp_formula(f);
    let (status, witness) = match &capped {
        Formula::Modal(budget, body) => {
            let goal = search.make_goal(state, budget, body);
            let (truth, _) = search.solve(&goal);
            let witness = if truth == Truth::True {
                search.extract_witness(&goal)
            } else {
                None
            };
            (truth, witness)
        }
        _ => (search.eval(state, &capped), None),
    };
    let reason = match status {
        Truth::Unknown if search.cap_hit => Some("goal cap exceeded".to_string()),
        Truth::Unknown if search.depth_hit => Some("depth limit reached".to_string()),
        Truth::Unknown => Some("undetermined".to_string()),
        _ => None,
    };
    Ok(Verdict {
        status,
        witness,
        reason,
    })
}

/// Checks the maintenance goal directly. The budget's domain must be
/// exactly the coalition.
pub fn check_maintain(
    game: &Game,
    state: &State,
    coalition: &BTreeSet<Agent>,
    budget: &Budget,
    body: &Formula,
    ctx: &CheckContext,
) -> Result<Verdict, CheckError> {
    if &budget.coalition_set() != coalition {
        return Err(CheckError::BadRef(
            "budget domain does not match the coalition".to_string(),
        ));
    }
    check(
        game,
        state,
        &Formula::modal(budget.clone(), body.clone()),
        ctx,
    )
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

const ORACLE_NODE_CAP: usize = 2_000_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Over-approximation: obligations beyond the horizon are waived.
    Opt,
    /// Under-approximation: every non-terminal leaf must be fully
    /// saturated and inside the safety region of the body's target.
    Pess,
}

impl Mode {
    fn flip(self) -> Mode {
        match self {
            Mode::Opt => Mode::Pess,
            Mode::Pess => Mode::Opt,
        }
    }
}

struct Oracle<'g> {
    game: &'g Game,
    gamma: Rat,
    bounds: BTreeMap<Agent, Rat>,
    nodes: usize,
    region_cache: BTreeMap<(BTreeSet<Agent>, Formula), BTreeSet<State>>,
}

impl<'g> Oracle<'g> {
    fn tick(&mut self) -> Result<(), CheckError> {
        self.nodes += 1;
        if self.nodes > ORACLE_NODE_CAP {
            return Err(CheckError::Limits(
                "oracle node budget exceeded".to_string(),
            ));
        }
        Ok(())
    }

    fn sat(
        &mut self,
        state: &State,
        f: &Formula,
        mode: Mode,
        horizon: usize,
    ) -> Result<bool, CheckError> {
        self.tick()?;
        match f {
            Formula::Var(p) => Ok(self.game.holds(p, state)),
            Formula::Not(g) => Ok(!self.sat(state, g, mode.flip(), horizon)?),
            Formula::Implies(a, b) => {
                Ok(!self.sat(state, a, mode.flip(), horizon)?
                    || self.sat(state, b, mode, horizon)?)
            }
            Formula::Modal(budget, body) => {
                let entries: BTreeMap<Agent, Rat> =
                    budget.iter().map(|(a, v)| (a.clone(), v.clone())).collect();
                self.maintain(state, &entries, body, mode, horizon)
            }
        }
    }

    fn maintain(
        &mut self,
        state: &State,
        budget: &BTreeMap<Agent, Rat>,
        body: &Formula,
        mode: Mode,
        depth: usize,
    ) -> Result<bool, CheckError> {
        self.tick()?;
        if !self.sat(state, body, mode, depth)? {
            return Ok(false);
        }
        if depth == 0 {
            return match mode {
                Mode::Opt => Ok(true),
                Mode::Pess => {
                    for (agent, value) in budget {
                        let bound = self.bounds.get(agent).expect("agent validated");
                        if value < bound {
                            return Ok(false);
                        }
                    }
                    let coalition: BTreeSet<Agent> = budget.keys().cloned().collect();
                    let region = self.pess_region(&coalition, body)?;
                    Ok(region.contains(state))
                }
            };
        }
        let coalition: BTreeSet<Agent> = budget.keys().cloned().collect();
        'alpha: for alpha in self.game.coalition_profiles(&coalition) {
            for delta in self.game.completions(&alpha) {
                let outcomes = self
                    .game
                    .successors(state, &delta)
                    .expect("validated game is serial")
                    .clone();
                for (costs, dest) in outcomes {
                    for (agent, value) in budget {
                        if &costs.get(agent) > value {
                            continue 'alpha;
                        }
                    }
                    if let Dest::State(to) = &dest {
                        let next: BTreeMap<Agent, Rat> = budget
                            .iter()
                            .map(|(a, v)| (a.clone(), (v - costs.get(a)) / &self.gamma))
                            .collect();
                        let next_body = formula::divide_unchecked(body, &self.gamma);
                        if !self.maintain(to, &next, &next_body, mode, depth - 1)? {
                            continue 'alpha;
                        }
                    }
                }
            }
            return Ok(true);
        }
        Ok(false)
    }

    /// Safety region of the states where the body pessimistically holds.
    fn pess_region(
        &mut self,
        coalition: &BTreeSet<Agent>,
        body: &Formula,
    ) -> Result<BTreeSet<State>, CheckError> {
        let key = (coalition.clone(), body.clone());
        if let Some(region) = self.region_cache.get(&key) {
            return Ok(region.clone());
        }
        let mut target = BTreeSet::new();
        for state in self.game.states().clone() {
            if self.sat(&state, body, Mode::Pess, 0)? {
                target.insert(state);
            }
        }
        let region = safety_region_inner(self.game, coalition, &target);
        self.region_cache.insert(key, region.clone());
        Ok(region)
    }
}

/// Independent bounded-horizon decision procedure: enumerates coalition
/// strategy trees of the given depth. Returns True if the pessimistic mode
/// succeeds, False if the optimistic mode fails, Unknown otherwise.
pub fn oracle_check(
    game: &Game,
    state: &State,
    f: &Formula,
    gamma: &Rat,
    horizon: usize,
) -> Result<Truth, CheckError> {
    gamma_ok(gamma)?;
    if horizon == 0 {
        return Err(CheckError::Limits("horizon must be positive".to_string()));
    }
    if !game.states().contains(state) {
        return Err(CheckError::BadRef(format!("unknown state {state}")));
    }
    for agent in f.agents() {
        if !game.agents().contains(&agent) {
            return Err(CheckError::BadRef(format!("unknown agent {agent}")));
        }
    }
    let bounds = game
        .agents()
        .iter()
        .map(|a| (a.clone(), game.max_step_cost(a) / (Rat::one() - gamma)))
        .collect();
    let mut oracle = Oracle {
        game,
        gamma: gamma.clone(),
        bounds,
        nodes: 0,
        region_cache: BTreeMap::new(),
    };
    if oracle.sat(state, f, Mode::Pess, horizon)? {
        return Ok(Truth::True);
    }
    if !oracle.sat(state, f, Mode::Opt, horizon)? {
        return Ok(Truth::False);
    }
    Ok(Truth::Unknown)
}
