//! The example-reproduction suite: the numeric claims about the corpus
//! games, stated through their closed forms so an overridden discount
//! factor rescales every budget consistently.

use std::path::Path;

use disco_core::checker::{check, CheckContext, CheckLimits, Truth};
use disco_core::formula::parse;
use disco_core::game::State;
use disco_core::rational::{rat, render_rat, Rat};
use num_traits::One;

use crate::formats::{load_game, FileError};

/// One claim: a formula expected to hold (or fail) at a state of a corpus
/// game under a given discount factor.
#[derive(Clone, Debug)]
pub struct Claim {
    pub game_file: &'static str,
    pub state: &'static str,
    pub gamma: Rat,
    pub formula: String,
    pub expected: Truth,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub claim: Claim,
    pub computed: Truth,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.computed == self.claim.expected
    }
}

/// `value - eps`, floored at zero so budgets stay well-formed for extreme
/// discount factors.
fn just_below(value: &Rat, eps: &Rat) -> Rat {
    use num_traits::Zero;
    let out = value - eps;
    if out < Rat::zero() {
        rat(0, 1)
    } else {
        out
    }
}

/// The claims, with budgets computed from the closed forms. The default
/// discount factor is 1/2 for fig1/fig2 and 2/3 for fig3; an override
/// applies to all three.
pub fn claims(gamma_override: Option<&Rat>) -> Vec<Claim> {
    let cent = rat(1, 100);
    let one = Rat::one();
    let mut out = Vec::new();

    // fig1: loops costing 2 (via u) and 1 (via v) per step.
    let g = gamma_override.cloned().unwrap_or_else(|| rat(1, 2));
    let expensive = rat(2, 1) / (&one - &g);
    let cheap = &one / (&one - &g);
    let mut claim = |state: &'static str, file, gamma: &Rat, formula: String, expected| {
        out.push(Claim {
            game_file: file,
            state,
            gamma: gamma.clone(),
            formula,
            expected,
        });
    };
    claim(
        "w",
        "fig1.game",
        &g,
        format!("[a:{}] p", render_rat(&expensive)),
        Truth::True,
    );
    claim(
        "w",
        "fig1.game",
        &g,
        format!("[a:{}] p", render_rat(&cheap)),
        Truth::True,
    );
    claim(
        "w",
        "fig1.game",
        &g,
        format!("[a:{}] p", render_rat(&just_below(&cheap, &cent))),
        Truth::False,
    );

    // fig2: a alone loops at 100 per step; b alone is forced through v;
    // together they alternate through u.
    let solo_a = rat(100, 1) / (&one - &g);
    let one_minus_sq = &one - &g * &g;
    let solo_b = rat(200, 1) * &g / &one_minus_sq;
    let pair_a = &one / &one_minus_sq;
    let pair_b = &g / &one_minus_sq;
    claim(
        "w",
        "fig2.game",
        &g,
        format!("[a:{}] p", render_rat(&solo_a)),
        Truth::True,
    );
    claim(
        "w",
        "fig2.game",
        &g,
        format!("[a:{}] p", render_rat(&just_below(&solo_a, &one))),
        Truth::False,
    );
    claim(
        "w",
        "fig2.game",
        &g,
        format!("[b:{}] p", render_rat(&solo_b)),
        Truth::True,
    );
    claim(
        "w",
        "fig2.game",
        &g,
        format!("[a:{}, b:{}] p", render_rat(&pair_a), render_rat(&pair_b)),
        Truth::True,
    );
    claim(
        "w",
        "fig2.game",
        &g,
        format!(
            "[a:{}, b:{}] p",
            render_rat(&pair_a),
            render_rat(&just_below(&pair_b, &cent))
        ),
        Truth::False,
    );

    // fig3: the opponent picks who pays the 4/3 entry fee; the payer's
    // counterpart then sustains a loop at 1 per step, so each of a and b
    // needs the larger of the entry and loop costs.
    let g = gamma_override.cloned().unwrap_or_else(|| rat(2, 3));
    let entry = rat(4, 3) * &g;
    let loop_cost = &g * &g * &g / (&one - &g);
    let needed = entry.clone().max(loop_cost.clone());
    let ample = &entry + &loop_cost;
    claim(
        "w1",
        "fig3.game",
        &g,
        format!("[a:{n}, b:{n}, d:0] p", n = render_rat(&needed)),
        Truth::True,
    );
    claim(
        "w1",
        "fig3.game",
        &g,
        format!(
            "[a:{}, b:{}, d:0] p",
            render_rat(&just_below(&needed, &cent)),
            render_rat(&needed)
        ),
        Truth::False,
    );
    claim(
        "w1",
        "fig3.game",
        &g,
        format!("[a:{n}, b:{n}, d:0] p", n = render_rat(&ample)),
        Truth::True,
    );
    out
}

/// Runs every claim against the corpus. IO and parse failures are errors;
/// verdict mismatches are reported in the outcomes.
pub fn run(
    corpus_dir: &Path,
    gamma_override: Option<&Rat>,
    limits: CheckLimits,
) -> Result<Vec<Outcome>, FileError> {
    let mut outcomes = Vec::new();
    for claim in claims(gamma_override) {
        let game = load_game(&corpus_dir.join(claim.game_file))?;
        let formula = parse(&claim.formula).map_err(|e| FileError::Invalid(e.to_string()))?;
        let ctx = CheckContext {
            gamma: claim.gamma.clone(),
            limits: limits.clone(),
        };
        let verdict = check(&game, &State::new(claim.state), &formula, &ctx)
            .map_err(|e| FileError::Invalid(e.to_string()))?;
        outcomes.push(Outcome {
            claim,
            computed: verdict.status,
        });
    }
    Ok(outcomes)
}
