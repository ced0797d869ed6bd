//! End-to-end acceptance suite. Each criterion is one test that prints a
//! single `criterion N: PASS — …` line on success (run with `--nocapture`
//! to see them); any violation panics with the failing instance.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use disco_core::checker::{check, oracle_check, CheckContext, CheckLimits, Truth, Verdict};
use disco_core::formula::{self, parse, render, Agent, Budget, Formula};
use disco_core::game::{
    validate_game, Dest, Game, GameSpec, Mem, State, StrategyAutomaton, TransitionSpec,
};
use disco_core::proof::{
    divide_script, gen_superdistributivity, gen_supermonotonicity, parse_script, verify_script,
    Script,
};
use disco_core::rational::{rat, Rat};

use disco::formats::load_game;
use disco::reproduce::{claims, Claim};

fn agent(name: &str) -> Agent {
    Agent::new(name).unwrap()
}

fn agents(names: &[&str]) -> BTreeSet<Agent> {
    names.iter().map(|n| agent(n)).collect()
}

fn budget(entries: &[(&str, Rat)]) -> Budget {
    Budget::new(entries.iter().map(|(a, v)| (agent(a), v.clone())).collect()).unwrap()
}

fn corpus_game(file: &str) -> Game {
    load_game(&disco::default_corpus_dir().join(file)).unwrap()
}

fn verdict(game: &Game, state: &str, f: &Formula, gamma: &Rat, limits: &CheckLimits) -> Verdict {
    let ctx = CheckContext {
        gamma: gamma.clone(),
        limits: limits.clone(),
    };
    check(game, &State::new(state), f, &ctx).unwrap()
}

/// Runs the reproduction claims for one corpus file, asserting every
/// verdict and returning the elapsed time and the TRUE-claim witnesses.
fn run_figure(file: &str) -> (Duration, Vec<(Claim, StrategyAutomaton)>) {
    let game = corpus_game(file);
    let limits = CheckLimits::default();
    let mut witnesses = Vec::new();
    let start = Instant::now();
    for claim in claims(None).into_iter().filter(|c| c.game_file == file) {
        let f = parse(&claim.formula).unwrap();
        let v = verdict(&game, claim.state, &f, &claim.gamma, &limits);
        assert_eq!(
            v.status, claim.expected,
            "{file}: {} at {} expected {}",
            claim.formula, claim.state, claim.expected
        );
        if v.status == Truth::True {
            let w = v
                .witness
                .unwrap_or_else(|| panic!("{file}: no witness for {}", claim.formula));
            witnesses.push((claim, w));
        }
    }
    (start.elapsed(), witnesses)
}

#[test]
fn criterion_1_figure_1_costs() {
    let game = corpus_game("fig1.game");
    let limits = CheckLimits::default();
    let gamma = rat(1, 2);
    for (text, expected) in [
        ("[a:4] p", Truth::True),
        ("[a:2] p", Truth::True),
        ("[a:199/100] p", Truth::False),
    ] {
        let start = Instant::now();
        let v = verdict(&game, "w", &parse(text).unwrap(), &gamma, &limits);
        let elapsed = start.elapsed();
        assert_eq!(v.status, expected, "{text}");
        assert!(elapsed < Duration::from_secs(1), "{text} took {elapsed:?}");
    }
    println!("criterion 1: PASS — figure 1 verdicts exact, each under 1s");
}

#[test]
fn criterion_2_figure_2_claims() {
    let (elapsed, _) = run_figure("fig2.game");
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 2: PASS — figure 2 verdicts exact in {elapsed:?}");
}

#[test]
fn criterion_3_figure_3_perfect_recall() {
    let (elapsed, _) = run_figure("fig3.game");
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 3: PASS — figure 3 verdicts exact in {elapsed:?}");
}

// ---------------------------------------------------------------------------
// Random game generation
// ---------------------------------------------------------------------------

/// A random validated two-agent game with at most `max_states` states and
/// `max_actions` actions (the first action is the free one). Every state
/// gets a zero-cost wildcard transition, so the mechanism is serial;
/// duplicate (from, profile, to) triples are skipped so outcomes stay
/// unambiguous.
fn random_game(rng: &mut ChaCha8Rng, max_states: usize, max_actions: usize) -> Game {
    let nstates = rng.gen_range(2..=max_states);
    let states: Vec<String> = (0..nstates).map(|i| format!("s{i}")).collect();
    let nactions = rng.gen_range(2..=max_actions);
    let actions: Vec<String> = ["e", "x", "y"][..nactions]
        .iter()
        .map(|a| a.to_string())
        .collect();
    let agents = vec!["a".to_string(), "b".to_string()];
    let dest = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.2) {
            "#t".to_string()
        } else {
            states[rng.gen_range(0..nstates)].clone()
        }
    };
    let mut transitions = Vec::new();
    let mut seen = BTreeSet::new();
    for s in &states {
        let to = dest(rng);
        seen.insert((s.clone(), Vec::new(), to.clone()));
        transitions.push(TransitionSpec {
            from: s.clone(),
            profile: BTreeMap::new(),
            costs: BTreeMap::new(),
            to,
        });
    }
    let cost_pool = [rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1)];
    for _ in 0..rng.gen_range(0..=3 * nstates) {
        let from = states[rng.gen_range(0..nstates)].clone();
        let mut profile = BTreeMap::new();
        let mut costs = BTreeMap::new();
        for ag in &agents {
            if rng.gen_bool(0.7) {
                let action = actions[rng.gen_range(0..nactions)].clone();
                if action != "e" && rng.gen_bool(0.7) {
                    costs.insert(ag.clone(), cost_pool[rng.gen_range(0..4)].clone());
                }
                profile.insert(ag.clone(), action);
            }
        }
        let to = dest(rng);
        let key = (
            from.clone(),
            profile
                .iter()
                .map(|(a, x)| (a.clone(), x.clone()))
                .collect::<Vec<_>>(),
            to.clone(),
        );
        if profile.is_empty() || !seen.insert(key) {
            continue;
        }
        transitions.push(TransitionSpec {
            from,
            profile,
            costs,
            to,
        });
    }
    let mut valuation = BTreeMap::new();
    for var in ["p", "q"] {
        valuation.insert(
            var.to_string(),
            states
                .iter()
                .filter(|_| rng.gen_bool(0.6))
                .cloned()
                .collect(),
        );
    }
    validate_game(&GameSpec {
        agents,
        states,
        actions,
        epsilon: "e".to_string(),
        transitions,
        valuation,
    })
    .expect("generated games are well-formed")
}

fn random_body(rng: &mut ChaCha8Rng) -> Formula {
    let p = Formula::var("p");
    let q = Formula::var("q");
    match rng.gen_range(0..5) {
        0 => p,
        1 => q,
        2 => Formula::not(p),
        3 => Formula::implies(p, q),
        _ => Formula::implies(q, p),
    }
}

fn random_budget(rng: &mut ChaCha8Rng, coalition: &[&str]) -> Budget {
    let pool = [rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1), rat(4, 1)];
    budget(
        &coalition
            .iter()
            .map(|a| (*a, pool[rng.gen_range(0..pool.len())].clone()))
            .collect::<Vec<_>>(),
    )
}

fn random_state(rng: &mut ChaCha8Rng, game: &Game) -> State {
    let states: Vec<&State> = game.states().iter().collect();
    states[rng.gen_range(0..states.len())].clone()
}

#[test]
fn criterion_4_axiom_soundness_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let gammas = [rat(1, 3), rat(1, 2), rat(2, 3)];
    let limits = CheckLimits {
        max_depth: 24,
        max_goals: 20_000,
    };
    let mut total = 0usize;
    let mut decisive = 0usize;
    let mut v = |game: &Game, state: &State, f: &Formula, gamma: &Rat| {
        let out = verdict(game, state.as_str(), f, gamma, &limits).status;
        total += 1;
        if out != Truth::Unknown {
            decisive += 1;
        }
        out
    };
    for round in 0..210 {
        let game = random_game(&mut rng, 4, 3);
        let gamma = &gammas[round % 3];
        let w = random_state(&mut rng, &game);
        let body = random_body(&mut rng);
        let coalition = *[&["a"][..], &["b"][..], &["a", "b"][..]]
            .choose(&mut rng)
            .unwrap();
        let x = random_budget(&mut rng, coalition);
        let boxed = Formula::modal(x.clone(), body.clone());

        if v(&game, &w, &boxed, gamma) == Truth::True {
            // (a) Reflexivity.
            assert_ne!(
                v(&game, &w, &body, gamma),
                Truth::False,
                "reflexivity violated at {w} for {}",
                render(&boxed)
            );
            // (b) Monotonicity: raise each entry.
            let bump = [rat(0, 1), rat(1, 2), rat(1, 1)];
            let y = Budget::new(
                x.iter()
                    .map(|(a, val)| (a.clone(), val + &bump[rng.gen_range(0..3)]))
                    .collect(),
            )
            .unwrap();
            let raised = Formula::modal(y, body.clone());
            assert_ne!(
                v(&game, &w, &raised, gamma),
                Truth::False,
                "monotonicity violated at {w}: {} but not {}",
                render(&boxed),
                render(&raised)
            );
            // (d) Transitivity.
            let nested = Formula::modal(x.clone(), boxed.clone());
            assert_ne!(
                v(&game, &w, &nested, gamma),
                Truth::False,
                "transitivity violated at {w} for {}",
                render(&boxed)
            );
        }

        // (c) Cooperation with disjoint singletons.
        let phi = random_body(&mut rng);
        let psi = random_body(&mut rng);
        let xa = random_budget(&mut rng, &["a"]);
        let yb = random_budget(&mut rng, &["b"]);
        let left = Formula::modal(xa.clone(), Formula::implies(phi.clone(), psi.clone()));
        let right = Formula::modal(yb.clone(), phi.clone());
        if v(&game, &w, &left, gamma) == Truth::True && v(&game, &w, &right, gamma) == Truth::True {
            let joint = Formula::modal(xa.disjoint_union(&yb).unwrap(), psi);
            assert_ne!(
                v(&game, &w, &joint, gamma),
                Truth::False,
                "cooperation violated at {w}: {} and {}",
                render(&left),
                render(&right)
            );
        }
    }
    println!(
        "criterion 4: PASS — axiom soundness over 210 random games, 0 violations \
         (decisive verdicts: {decisive}/{total})"
    );
}

#[test]
fn criterion_5_oracle_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let limits = CheckLimits::default();
    let mut instances: Vec<(Game, State, Formula, Rat)> = Vec::new();
    let gammas = [rat(1, 3), rat(1, 2), rat(2, 3)];
    for round in 0..100 {
        let game = random_game(&mut rng, 3, 2);
        let w = random_state(&mut rng, &game);
        let coalition = *[&["a"][..], &["b"][..]].choose(&mut rng).unwrap();
        let pool = [rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 1)];
        let x = budget(&[(coalition[0], pool[rng.gen_range(0..4)].clone())]);
        let f = Formula::modal(x, random_body(&mut rng));
        instances.push((game, w, f, gammas[round % 3].clone()));
    }
    for claim in claims(None) {
        instances.push((
            corpus_game(claim.game_file),
            State::new(claim.state),
            parse(&claim.formula).unwrap(),
            claim.gamma,
        ));
    }
    let mut horizons_run = 0usize;
    for (game, w, f, gamma) in &instances {
        let checked = verdict(game, w.as_str(), f, gamma, &limits).status;
        let clock = Instant::now();
        for horizon in 1..=6 {
            // The horizon-h tree dominates all shorter ones, so stop once
            // an instance gets expensive or exhausts the oracle node cap.
            if clock.elapsed() > Duration::from_millis(300) {
                break;
            }
            let Ok(oracle) = oracle_check(game, w, f, gamma, horizon) else {
                break;
            };
            horizons_run += 1;
            assert!(
                !(checked == Truth::True && oracle == Truth::False),
                "checker TRUE but oracle FALSE at horizon {horizon} for {} at {w}",
                render(f)
            );
            assert!(
                !(oracle == Truth::True && checked != Truth::True),
                "oracle TRUE at horizon {horizon} but checker {checked} for {} at {w}",
                render(f)
            );
        }
    }
    println!(
        "criterion 5: PASS — oracle sandwich holds on {} instances ({horizons_run} horizon runs)",
        instances.len()
    );
}

// ---------------------------------------------------------------------------
// Proof kernel
// ---------------------------------------------------------------------------

/// The generated derivations exercised by the kernel criterion.
fn kernel_scripts() -> Vec<Script> {
    let premise1 = parse_script("hyp: p\n1: p ; hyp 1\n").unwrap();
    let premise2 = parse_script(
        "hyp: p\n\
         hyp: p -> q\n\
         1: p ; hyp 1\n\
         2: p -> q ; hyp 2\n\
         3: q ; mp 1 2\n",
    )
    .unwrap();
    let premise3 = parse_script(
        "hyp: p\n\
         hyp: q\n\
         hyp: p -> (q -> r)\n\
         1: p ; hyp 1\n\
         2: q ; hyp 2\n\
         3: p -> (q -> r) ; hyp 3\n\
         4: q -> r ; mp 1 3\n\
         5: r ; mp 2 4\n",
    )
    .unwrap();
    let one = |a: &str, n: i64, d: i64| budget(&[(a, rat(n, d))]);
    let mut scripts = vec![
        gen_superdistributivity(&premise1, &[agents(&["a"])], &[one("a", 1, 1)]).unwrap(),
        gen_superdistributivity(
            &premise2,
            &[agents(&["a"]), agents(&["b"])],
            &[one("a", 3, 2), one("b", 2, 1)],
        )
        .unwrap(),
        gen_superdistributivity(
            &premise3,
            &[agents(&["a"]), agents(&["b"]), agents(&["c"])],
            &[one("a", 1, 1), one("b", 0, 1), one("c", 5, 3)],
        )
        .unwrap(),
        gen_supermonotonicity(
            &agents(&["a"]),
            &one("a", 1, 1),
            &agents(&["a", "b"]),
            &budget(&[("a", rat(2, 1)), ("b", rat(5, 1))]),
            &parse("p").unwrap(),
        )
        .unwrap(),
        gen_supermonotonicity(
            &agents(&["a"]),
            &one("a", 3, 2),
            &agents(&["a"]),
            &one("a", 3, 2),
            &parse("p -> q").unwrap(),
        )
        .unwrap(),
        gen_supermonotonicity(
            &agents(&["a", "b"]),
            &budget(&[("a", rat(1, 1)), ("b", rat(0, 1))]),
            &agents(&["a", "b", "c"]),
            &budget(&[("a", rat(1, 1)), ("b", rat(1, 2)), ("c", rat(4, 1))]),
            &parse("!p").unwrap(),
        )
        .unwrap(),
    ];
    let divided: Vec<Script> = scripts
        .iter()
        .map(|s| divide_script(s, &rat(3, 2)).unwrap())
        .collect();
    scripts.extend(divided);
    scripts
}

/// Replaces a line's formula with `formula -> z`, `z` a variable unused by
/// any script here. The change breaks every justification: a tautology
/// gains a falsifiable consequent, axiom schemas and Hyp/MP/Nec shapes all
/// stop matching.
fn mutate(script: &Script, line: usize) -> Script {
    let mut out = script.clone();
    let old = out.lines[line].formula.clone();
    out.lines[line].formula = Formula::implies(old, Formula::var("z"));
    out
}

#[test]
fn criterion_6_proof_kernel() {
    let scripts = kernel_scripts();
    for (i, script) in scripts.iter().enumerate() {
        let report = verify_script(script);
        assert!(report.ok, "script {i}: {:?}", report.first_error);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for _ in 0..120 {
        let script = scripts.choose(&mut rng).unwrap();
        let line = rng.gen_range(0..script.lines.len());
        let report = verify_script(&mutate(script, line));
        assert!(!report.ok, "mutation of line {} went undetected", line + 1);
    }
    // Necessitation is restricted to theorem lines: boxing a
    // hypothesis-dependent line must be rejected.
    let nec_on_hyp = parse_script(
        "hyp: p\n\
         1: p ; hyp 1\n\
         2: [a:1] p ; nec [a:1] 1\n",
    )
    .unwrap();
    let report = verify_script(&nec_on_hyp);
    assert_eq!(
        report.first_error.as_ref().map(|e| (e.0, e.1)),
        Some((2, "E-NEC-SCOPE"))
    );
    println!(
        "criterion 6: PASS — {} generated scripts valid, 120 mutations rejected, \
         Nec scope enforced",
        scripts.len()
    );
}

// ---------------------------------------------------------------------------
// Formula algebra
// ---------------------------------------------------------------------------

fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| Formula::var(["p", "q", "r"][rng.gen_range(0..3)]);
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..8) {
        0 | 1 => leaf(rng),
        2 | 3 => Formula::not(random_formula(rng, depth - 1)),
        4 | 5 => Formula::implies(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        _ => {
            let coalition = *[&["a"][..], &["b"][..], &["a", "b"][..]]
                .choose(rng)
                .unwrap();
            let entries = coalition
                .iter()
                .map(|a| (agent(a), rat(rng.gen_range(0..=6), rng.gen_range(1..=3))))
                .collect();
            Formula::modal(
                Budget::new(entries).unwrap(),
                random_formula(rng, depth - 1),
            )
        }
    }
}

#[test]
fn criterion_7_formula_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let one = rat(1, 1);
    for i in 0..1000 {
        let f = random_formula(&mut rng, 4);
        let text = render(&f);
        assert_eq!(parse(&text).unwrap(), f, "round-trip failed on `{text}`");
        assert_eq!(
            formula::divide(&f, &one).unwrap(),
            f,
            "divide by 1 moved `{text}`"
        );
        let g = rat(rng.gen_range(1..=4), rng.gen_range(1..=4));
        let g2 = rat(rng.gen_range(1..=4), rng.gen_range(1..=4));
        let stepwise = formula::divide(&formula::divide(&f, &g).unwrap(), &g2).unwrap();
        let joint = formula::divide(&f, &(&g * &g2)).unwrap();
        assert_eq!(
            stepwise, joint,
            "composition failed on `{text}` (iteration {i})"
        );
    }
    println!("criterion 7: PASS — 1000 formulas: round-trip, unit and composed rescaling exact");
}

// ---------------------------------------------------------------------------
// Witness replay
// ---------------------------------------------------------------------------

/// Exhaustive replay: the per-agent maximum discounted cost over all
/// adversary completions and nondeterministic outcomes for `depth` steps,
/// also recording every reachable state. Costs are nonnegative, so this
/// maximum dominates the cost of every play prefix.
struct Replay<'g> {
    game: &'g Game,
    strategy: &'g StrategyAutomaton,
    gamma: Rat,
    visited: BTreeSet<State>,
    memo: HashMap<(State, Mem, usize), BTreeMap<Agent, Rat>>,
}

impl<'g> Replay<'g> {
    fn max_costs(&mut self, state: &State, mem: &Mem, depth: usize) -> BTreeMap<Agent, Rat> {
        self.visited.insert(state.clone());
        let zeroes: BTreeMap<Agent, Rat> = self
            .game
            .agents()
            .iter()
            .map(|a| (a.clone(), rat(0, 1)))
            .collect();
        if depth == 0 {
            return zeroes;
        }
        let key = (state.clone(), mem.clone(), depth);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut fixed = BTreeMap::new();
        for a in &self.strategy.coalition {
            let action = self
                .strategy
                .act
                .get(&(mem.clone(), a.clone()))
                .unwrap_or_else(|| panic!("no action for {a} in memory {mem}"));
            fixed.insert(a.clone(), action.clone());
        }
        let mut worst = zeroes;
        for profile in self.game.completions(&fixed) {
            for (costs, dest) in self.game.successors(state, &profile).unwrap() {
                let tail = match dest {
                    Dest::Terminal => BTreeMap::new(),
                    Dest::State(next) => {
                        let next_mem = self
                            .strategy
                            .update
                            .get(&(mem.clone(), profile.clone(), dest.clone()))
                            .unwrap_or_else(|| {
                                panic!("no memory update for {mem} | {} | {next}", profile.key())
                            })
                            .clone();
                        self.max_costs(next, &next_mem, depth - 1)
                    }
                };
                for (a, acc) in worst.iter_mut() {
                    let here = costs.get(a)
                        + tail
                            .get(a)
                            .map(|t| &self.gamma * t)
                            .unwrap_or_else(|| rat(0, 1));
                    if here > *acc {
                        *acc = here;
                    }
                }
            }
        }
        self.memo.insert(key, worst.clone());
        worst
    }
}

#[test]
fn criterion_8_witness_replay() {
    let mut replayed = 0usize;
    for file in ["fig1.game", "fig2.game", "fig3.game"] {
        let game = corpus_game(file);
        let (_, witnesses) = run_figure(file);
        assert!(!witnesses.is_empty());
        for (claim, strategy) in witnesses {
            let Formula::Modal(stated, _) = parse(&claim.formula).unwrap() else {
                panic!("claim formula is not a maintenance modality");
            };
            let mut replay = Replay {
                game: &game,
                strategy: &strategy,
                gamma: claim.gamma.clone(),
                visited: BTreeSet::new(),
                memo: HashMap::new(),
            };
            let init = strategy.init.clone();
            let worst = replay.max_costs(&State::new(claim.state), &init, 24);
            for (a, x) in stated.iter() {
                assert!(
                    &worst[a] <= x,
                    "{file}: witness for {} charges {a} up to {}",
                    claim.formula,
                    worst[a]
                );
            }
            for state in &replay.visited {
                assert!(
                    game.holds("p", state),
                    "{file}: witness for {} reaches ¬p state {state}",
                    claim.formula
                );
            }
            replayed += 1;
        }
    }
    assert_eq!(replayed, 7);
    println!("criterion 8: PASS — 7 witnesses replayed to depth 24: budgets kept, p maintained");
}
