//! Hilbert-style proof kernel and script generators.
//!
//! The calculus has four modal axiom schemata on top of propositional
//! tautologies:
//!
//! - Reflexivity: `[C]_x f -> f`
//! - Cooperation: `[C]_x (f -> g) -> ([D]_y f -> [C∪D]_{x∪y} g)` for
//!   disjoint `C`, `D`
//! - Monotonicity: `[C]_x f -> [C]_y f` where `x <= y` pointwise
//! - Transitivity: `[C]_x f -> [C]_x [C]_x f`
//!
//! and two rules, Modus Ponens and Necessitation. A derivation from
//! hypotheses may use Modus Ponens only; Necessitation applies solely to
//! lines derivable with no hypothesis ancestry. The kernel tracks this with
//! a computed per-line theorem flag, so one checker covers both plain
//! theoremhood and derivations from hypotheses.
//!
//! The generators produce verifying scripts for three derived facts:
//! superdistributivity (lifting `f1,…,fn ⊢ g` through disjoint coalition
//! modalities), budget rescaling of a whole derivation, and
//! supermonotonicity (`[C]_x f -> [D]_y f` for `C ⊆ D`, `x <= y` on `C`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::Signed;

use crate::formula::{self, Agent, Budget, Formula, FormulaError};
use crate::rational::{render_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AxiomName {
    Refl,
    Coop,
    Mono,
    Trans,
}

impl AxiomName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxiomName::Refl => "Refl",
            AxiomName::Coop => "Coop",
            AxiomName::Mono => "Mono",
            AxiomName::Trans => "Trans",
        }
    }

    // Option-returning lookup rather than the fallible `FromStr` trait.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Option<AxiomName> {
        match text {
            "Refl" => Some(AxiomName::Refl),
            "Coop" => Some(AxiomName::Coop),
            "Mono" => Some(AxiomName::Mono),
            "Trans" => Some(AxiomName::Trans),
            _ => None,
        }
    }
}

/// Justification of one script line. Line references are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Just {
    Taut,
    Axiom(AxiomName),
    Hyp(usize),
    /// `Mp(i, j)`: line `i` is the antecedent, line `j` the implication.
    Mp(usize, usize),
    /// `Nec(budget, i)`: wraps line `i` in the modality of this budget.
    Nec(Budget, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub index: usize,
    pub formula: Formula,
    pub just: Just,
}

/// A derivation: ordered hypotheses, then numbered lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub hypotheses: Vec<Formula>,
    pub lines: Vec<Line>,
}

impl Script {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

/// Verification result. `theorem_flags[i]` is true iff line `i+1` is
/// derivable with no hypothesis ancestry (flags are computed up to the
/// first error).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub ok: bool,
    pub first_error: Option<(usize, &'static str, String)>,
    pub theorem_flags: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofError {
    /// E-TOO-MANY-ATOMS: truth table would exceed the 20-atom cap.
    TooManyAtoms(usize),
    /// E-NOT-VALID: an input script fails verification.
    NotValid(String),
    /// E-NO-SUCH-HYP
    NoSuchHyp,
    /// E-OVERLAP: coalitions are not pairwise disjoint.
    Overlap,
    /// E-NOT-SUBSET
    NotSubset,
    /// E-BUDGET-ORDER
    BudgetOrder,
    /// E-SYNTAX in the script text format.
    Syntax {
        line: usize,
        message: String,
    },
    Formula(FormulaError),
}

impl core::fmt::Display for ProofError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProofError::TooManyAtoms(n) => {
                write!(
                    f,
                    "E-TOO-MANY-ATOMS: {n} distinct atoms exceed the cap of 20"
                )
            }
            ProofError::NotValid(what) => write!(f, "E-NOT-VALID: {what}"),
            ProofError::NoSuchHyp => {
                f.write_str("E-NO-SUCH-HYP: formula is not the last hypothesis")
            }
            ProofError::Overlap => f.write_str("E-OVERLAP: coalitions are not pairwise disjoint"),
            ProofError::NotSubset => f.write_str("E-NOT-SUBSET: coalition is not a subset"),
            ProofError::BudgetOrder => {
                f.write_str("E-BUDGET-ORDER: budgets are not pointwise ordered")
            }
            ProofError::Syntax { line, message } => {
                write!(f, "E-SYNTAX: script line {line}: {message}")
            }
            ProofError::Formula(e) => write!(f, "{e}"),
        }
    }
}

impl From<FormulaError> for ProofError {
    fn from(e: FormulaError) -> ProofError {
        ProofError::Formula(e)
    }
}

// ---------------------------------------------------------------------------
// Tautology checking
// ---------------------------------------------------------------------------

const MAX_ATOMS: usize = 20;

fn collect_atoms(f: &Formula, out: &mut BTreeSet<Formula>) {
    match f {
        // Maximal modal subformulas are opaque atoms.
        Formula::Var(_) | Formula::Modal(..) => {
            out.insert(f.clone());
        }
        Formula::Not(g) => collect_atoms(g, out),
        Formula::Implies(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

fn eval_assignment(f: &Formula, atoms: &[Formula], mask: u32) -> bool {
    match f {
        Formula::Var(_) | Formula::Modal(..) => {
            let i = atoms.binary_search(f).expect("atom was collected");
            mask & (1 << i) != 0
        }
        Formula::Not(g) => !eval_assignment(g, atoms, mask),
        Formula::Implies(a, b) => {
            !eval_assignment(a, atoms, mask) || eval_assignment(b, atoms, mask)
        }
    }
}

/// Truth-table decision treating maximal modal subformulas as opaque atoms.
pub fn is_tautology(f: &Formula) -> Result<bool, ProofError> {
    let mut set = BTreeSet::new();
    collect_atoms(f, &mut set);
    if set.len() > MAX_ATOMS {
        return Err(ProofError::TooManyAtoms(set.len()));
    }
    let atoms: Vec<Formula> = set.into_iter().collect();
    for mask in 0..(1u32 << atoms.len()) {
        if !eval_assignment(f, &atoms, mask) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Axiom schemata
// ---------------------------------------------------------------------------

/// True iff the formula is an instance of the named schema, including its
/// side conditions.
pub fn verify_axiom_instance(name: AxiomName, f: &Formula) -> bool {
    match name {
        AxiomName::Refl => {
            // [C]_x f -> f
            let Formula::Implies(lhs, rhs) = f else {
                return false;
            };
            let Formula::Modal(_, body) = &**lhs else {
                return false;
            };
            **body == **rhs
        }
        AxiomName::Coop => {
            // [C]_x (f -> g) -> ([D]_y f -> [C∪D]_{x∪y} g), C∩D = ∅
            let Formula::Implies(lhs, rhs) = f else {
                return false;
            };
            let Formula::Modal(x, prem) = &**lhs else {
                return false;
            };
            let Formula::Implies(body_f, body_g) = &**prem else {
                return false;
            };
            let Formula::Implies(mid, out) = &**rhs else {
                return false;
            };
            let Formula::Modal(y, f2) = &**mid else {
                return false;
            };
            let Formula::Modal(z, g2) = &**out else {
                return false;
            };
            if **f2 != **body_f || **g2 != **body_g {
                return false;
            }
            match x.disjoint_union(y) {
                Ok(union) => union == *z,
                Err(_) => false,
            }
        }
        AxiomName::Mono => {
            // [C]_x f -> [C]_y f, x <= y pointwise on the same coalition
            let Formula::Implies(lhs, rhs) = f else {
                return false;
            };
            let Formula::Modal(x, a) = &**lhs else {
                return false;
            };
            let Formula::Modal(y, b) = &**rhs else {
                return false;
            };
            **a == **b && x.coalition_set() == y.coalition_set() && x.le_on_domain(y)
        }
        AxiomName::Trans => {
            // [C]_x f -> [C]_x [C]_x f
            let Formula::Implies(lhs, rhs) = f else {
                return false;
            };
            let Formula::Modal(x, a) = &**lhs else {
                return false;
            };
            let Formula::Modal(x2, inner) = &**rhs else {
                return false;
            };
            let Formula::Modal(x3, b) = &**inner else {
                return false;
            };
            x == x2 && x == x3 && **a == **b
        }
    }
}

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

/// Checks every line of the script and computes the theorem flags.
pub fn verify_script(s: &Script) -> Report {
    let mut flags: Vec<bool> = Vec::with_capacity(s.lines.len());
    let fail = |idx: usize, code: &'static str, message: String, flags: Vec<bool>| Report {
        ok: false,
        first_error: Some((idx, code, message)),
        theorem_flags: flags,
    };
    for (pos, line) in s.lines.iter().enumerate() {
        let idx = pos + 1;
        if line.index != idx {
            return fail(
                idx,
                "E-FWD-REF",
                format!("line numbered {} at position {idx}", line.index),
                flags,
            );
        }
        let earlier = |k: usize| k >= 1 && k <= pos;
        let flag = match &line.just {
            Just::Taut => match is_tautology(&line.formula) {
                Ok(true) => true,
                Ok(false) => {
                    return fail(
                        idx,
                        "E-TAUT",
                        "not a propositional tautology".to_string(),
                        flags,
                    )
                }
                Err(e) => return fail(idx, "E-TAUT", e.to_string(), flags),
            },
            Just::Axiom(name) => {
                if !verify_axiom_instance(*name, &line.formula) {
                    return fail(
                        idx,
                        "E-AXIOM",
                        format!("not an instance of {}", name.as_str()),
                        flags,
                    );
                }
                true
            }
            Just::Hyp(k) => {
                if *k < 1 || *k > s.hypotheses.len() {
                    return fail(idx, "E-HYP-RANGE", format!("no hypothesis {k}"), flags);
                }
                if s.hypotheses[k - 1] != line.formula {
                    return fail(
                        idx,
                        "E-HYP-RANGE",
                        format!("formula differs from hypothesis {k}"),
                        flags,
                    );
                }
                false
            }
            Just::Mp(i, j) => {
                if !earlier(*i) || !earlier(*j) {
                    return fail(
                        idx,
                        "E-FWD-REF",
                        format!("mp cites lines {i} and {j}"),
                        flags,
                    );
                }
                let expected =
                    Formula::implies(s.lines[i - 1].formula.clone(), line.formula.clone());
                if s.lines[j - 1].formula != expected {
                    return fail(
                        idx,
                        "E-MP-SHAPE",
                        format!("line {j} is not (line {i} -> line {idx})"),
                        flags,
                    );
                }
                flags[i - 1] && flags[j - 1]
            }
            Just::Nec(budget, i) => {
                if !earlier(*i) {
                    return fail(idx, "E-FWD-REF", format!("nec cites line {i}"), flags);
                }
                if !flags[i - 1] {
                    return fail(
                        idx,
                        "E-NEC-SCOPE",
                        format!("line {i} depends on a hypothesis"),
                        flags,
                    );
                }
                let expected = Formula::modal(budget.clone(), s.lines[i - 1].formula.clone());
                if line.formula != expected {
                    return fail(
                        idx,
                        "E-NEC-SCOPE",
                        format!("formula is not line {i} under the cited modality"),
                        flags,
                    );
                }
                true
            }
        };
        flags.push(flag);
    }
    Report {
        ok: true,
        first_error: None,
        theorem_flags: flags,
    }
}

fn push(lines: &mut Vec<Line>, formula: Formula, just: Just) -> usize {
    let index = lines.len() + 1;
    lines.push(Line {
        index,
        formula,
        just,
    });
    index
}

/// Deduction lemma as a script transformation: turns a derivation of `g`
/// from `X, h` into a derivation of `h -> g` from `X`.
///
/// Theorem lines are kept verbatim (so Necessitation premises survive) and
/// additionally weakened to `h -> ·`; hypothesis and Modus Ponens lines are
/// replaced by the standard tautology-instance combinators.
pub fn deduction_transform(s: &Script, h: &Formula) -> Result<Script, ProofError> {
    let report = verify_script(s);
    if !report.ok {
        let (idx, code, msg) = report.first_error.expect("not ok implies an error");
        return Err(ProofError::NotValid(format!("line {idx}: {code}: {msg}")));
    }
    if s.hypotheses.last() != Some(h) {
        return Err(ProofError::NoSuchHyp);
    }
    let last_hyp = s.hypotheses.len();
    let mut lines: Vec<Line> = Vec::new();
    // Per original line: its verbatim copy (theorem lines only) and its
    // weakened form `h -> formula`.
    let mut asis: BTreeMap<usize, usize> = BTreeMap::new();
    let mut weak: BTreeMap<usize, usize> = BTreeMap::new();
    for (pos, line) in s.lines.iter().enumerate() {
        let i = pos + 1;
        let phi = &line.formula;
        let weakened = Formula::implies(h.clone(), phi.clone());
        if report.theorem_flags[pos] {
            let just = match &line.just {
                Just::Mp(a, b) => Just::Mp(asis[a], asis[b]),
                Just::Nec(budget, a) => Just::Nec(budget.clone(), asis[a]),
                other => other.clone(),
            };
            let copy = push(&mut lines, phi.clone(), just);
            asis.insert(i, copy);
            let taut = push(
                &mut lines,
                Formula::implies(phi.clone(), weakened.clone()),
                Just::Taut,
            );
            let w = push(&mut lines, weakened, Just::Mp(copy, taut));
            weak.insert(i, w);
            continue;
        }
        match &line.just {
            Just::Hyp(k) if *k == last_hyp => {
                let w = push(&mut lines, weakened, Just::Taut); // h -> h
                weak.insert(i, w);
            }
            Just::Hyp(k) => {
                let kept = push(&mut lines, phi.clone(), Just::Hyp(*k));
                let taut = push(
                    &mut lines,
                    Formula::implies(phi.clone(), weakened.clone()),
                    Just::Taut,
                );
                let w = push(&mut lines, weakened, Just::Mp(kept, taut));
                weak.insert(i, w);
            }
            Just::Mp(a, b) => {
                // From h -> chi and h -> (chi -> phi), conclude h -> phi.
                let chi = &s.lines[a - 1].formula;
                let wa = weak[a];
                let wb = weak[b];
                let lift_a = Formula::implies(h.clone(), chi.clone());
                let lift_b =
                    Formula::implies(h.clone(), Formula::implies(chi.clone(), phi.clone()));
                let frege =
                    Formula::implies(lift_a, Formula::implies(lift_b.clone(), weakened.clone()));
                let taut = push(&mut lines, frege, Just::Taut);
                let mid = push(
                    &mut lines,
                    Formula::implies(lift_b, weakened.clone()),
                    Just::Mp(wa, taut),
                );
                let w = push(&mut lines, weakened, Just::Mp(wb, mid));
                weak.insert(i, w);
            }
            // Taut, Axiom and Nec lines always carry the theorem flag.
            _ => unreachable!("non-theorem line must be Hyp or Mp"),
        }
    }
    Ok(Script {
        hypotheses: s.hypotheses[..last_hyp - 1].to_vec(),
        lines,
    })
}

/// Lifts `f1,…,fn ⊢ g` to `[C1]_{x1}f1,…,[Cn]_{xn}fn ⊢ [C1∪…∪Cn]_{x1∪…∪xn}g`
/// for pairwise disjoint coalitions: the hypotheses are discharged by the
/// deduction lemma, the resulting theorem is boxed with the empty-coalition
/// modality by Necessitation, and the hypotheses are re-attached one by one
/// through Cooperation and Modus Ponens.
pub fn gen_superdistributivity(
    premise: &Script,
    coalitions: &[BTreeSet<Agent>],
    budgets: &[Budget],
) -> Result<Script, ProofError> {
    let n = premise.hypotheses.len();
    if coalitions.len() != n || budgets.len() != n {
        return Err(ProofError::NotValid(format!(
            "{n} hypotheses but {} coalitions and {} budgets",
            coalitions.len(),
            budgets.len()
        )));
    }
    for (coalition, budget) in coalitions.iter().zip(budgets) {
        if budget.coalition_set() != *coalition {
            return Err(ProofError::NotValid(
                "budget domain does not match its coalition".to_string(),
            ));
        }
    }
    for (i, c) in coalitions.iter().enumerate() {
        for d in &coalitions[i + 1..] {
            if c.intersection(d).next().is_some() {
                return Err(ProofError::Overlap);
            }
        }
    }
    let report = verify_script(premise);
    if !report.ok {
        let (idx, code, msg) = report.first_error.expect("not ok implies an error");
        return Err(ProofError::NotValid(format!("line {idx}: {code}: {msg}")));
    }

    // Discharge every hypothesis, last first.
    let phis = premise.hypotheses.clone();
    let mut derivation = premise.clone();
    for h in phis.iter().rev() {
        derivation = deduction_transform(&derivation, h)?;
    }
    let mut lines = derivation.lines;
    let chained = lines
        .last()
        .expect("premise has a conclusion")
        .formula
        .clone();

    // Box the chained implication with the empty-coalition modality.
    let mut current = Formula::modal(Budget::empty(), chained.clone());
    let chained_idx = lines.len();
    let mut current_idx = push(
        &mut lines,
        current.clone(),
        Just::Nec(Budget::empty(), chained_idx),
    );

    let mut acc = Budget::empty();
    let mut hypotheses = Vec::with_capacity(n);
    for (i, phi) in phis.iter().enumerate() {
        let Formula::Modal(_, body) = &current else {
            unreachable!("current is always a modality")
        };
        let Formula::Implies(head, rest) = &**body else {
            unreachable!("body chains the remaining hypotheses")
        };
        debug_assert_eq!(&**head, phi);
        let rest = (**rest).clone();
        let boxed_phi = Formula::modal(budgets[i].clone(), phi.clone());
        let union = acc
            .disjoint_union(&budgets[i])
            .map_err(|_| ProofError::Overlap)?;
        let boxed_rest = Formula::modal(union.clone(), rest);
        let coop = Formula::implies(
            current.clone(),
            Formula::implies(boxed_phi.clone(), boxed_rest.clone()),
        );
        let coop_idx = push(&mut lines, coop, Just::Axiom(AxiomName::Coop));
        let mid_idx = push(
            &mut lines,
            Formula::implies(boxed_phi.clone(), boxed_rest.clone()),
            Just::Mp(current_idx, coop_idx),
        );
        let hyp_idx = push(&mut lines, boxed_phi.clone(), Just::Hyp(i + 1));
        current_idx = push(&mut lines, boxed_rest.clone(), Just::Mp(hyp_idx, mid_idx));
        current = boxed_rest;
        acc = union;
        hypotheses.push(boxed_phi);
    }
    Ok(Script { hypotheses, lines })
}

/// Rescales a whole derivation: every hypothesis, line formula and
/// Necessitation budget is divided by `mu`. A valid script stays valid —
/// tautologies keep their skeleton and the axiom side conditions are
/// preserved by uniform positive scaling.
pub fn divide_script(s: &Script, mu: &Rat) -> Result<Script, ProofError> {
    if !mu.is_positive() {
        return Err(ProofError::Formula(FormulaError::NonPosScale));
    }
    let hypotheses = s
        .hypotheses
        .iter()
        .map(|h| formula::divide(h, mu))
        .collect::<Result<Vec<_>, _>>()?;
    let lines = s
        .lines
        .iter()
        .map(|line| {
            Ok(Line {
                index: line.index,
                formula: formula::divide(&line.formula, mu)?,
                just: match &line.just {
                    Just::Nec(budget, i) => Just::Nec(budget.divide(mu), *i),
                    other => other.clone(),
                },
            })
        })
        .collect::<Result<Vec<_>, ProofError>>()?;
    Ok(Script { hypotheses, lines })
}

/// Generates `⊢ [C]_x body -> [D]_y body` for `C ⊆ D` and `x <= y` on `C`:
/// Cooperation with `[D∖C]` over the tautology `body -> body`, then
/// Monotonicity, chained propositionally.
pub fn gen_supermonotonicity(
    c: &BTreeSet<Agent>,
    x: &Budget,
    d: &BTreeSet<Agent>,
    y: &Budget,
    body: &Formula,
) -> Result<Script, ProofError> {
    if x.coalition_set() != *c || y.coalition_set() != *d {
        return Err(ProofError::NotValid(
            "budget domain does not match its coalition".to_string(),
        ));
    }
    if !c.is_subset(d) {
        return Err(ProofError::NotSubset);
    }
    if !x.le_on_domain(y) {
        return Err(ProofError::BudgetOrder);
    }
    // y restricted to D∖C.
    let rest_budget = Budget::new(
        y.iter()
            .filter(|(agent, _)| !c.contains(agent))
            .map(|(agent, value)| (agent.clone(), value.clone()))
            .collect(),
    )?;
    let taut = Formula::implies(body.clone(), body.clone());
    let boxed_taut = Formula::modal(rest_budget.clone(), taut.clone());
    let lhs = Formula::modal(x.clone(), body.clone());
    let union = rest_budget
        .disjoint_union(x)
        .map_err(|_| ProofError::Overlap)?;
    let mid = Formula::modal(union, body.clone());
    let rhs = Formula::modal(y.clone(), body.clone());
    let first_leg = Formula::implies(lhs.clone(), mid.clone());
    let second_leg = Formula::implies(mid.clone(), rhs.clone());
    let goal = Formula::implies(lhs, rhs);

    let mut lines = Vec::new();
    let l1 = push(&mut lines, taut, Just::Taut);
    let l2 = push(&mut lines, boxed_taut.clone(), Just::Nec(rest_budget, l1));
    let l3 = push(
        &mut lines,
        Formula::implies(boxed_taut, first_leg.clone()),
        Just::Axiom(AxiomName::Coop),
    );
    let l4 = push(&mut lines, first_leg.clone(), Just::Mp(l2, l3));
    let l5 = push(&mut lines, second_leg.clone(), Just::Axiom(AxiomName::Mono));
    let l6 = push(
        &mut lines,
        Formula::implies(
            first_leg,
            Formula::implies(second_leg.clone(), goal.clone()),
        ),
        Just::Taut,
    );
    let l7 = push(
        &mut lines,
        Formula::implies(second_leg, goal.clone()),
        Just::Mp(l4, l6),
    );
    push(&mut lines, goal, Just::Mp(l5, l7));
    Ok(Script {
        hypotheses: Vec::new(),
        lines,
    })
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

fn render_budget(budget: &Budget) -> String {
    let mut out = String::from("[");
    for (i, (agent, value)) in budget.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(agent.as_str());
        out.push(':');
        out.push_str(&render_rat(value));
    }
    out.push(']');
    out
}

/// Renders the script in its text format: `hyp:` lines, then
/// `N: <formula> ; <justification>` lines.
pub fn render_script(s: &Script) -> String {
    let mut out = String::new();
    for h in &s.hypotheses {
        out.push_str("hyp: ");
        out.push_str(&formula::render(h));
        out.push('\n');
    }
    for line in &s.lines {
        out.push_str(&format!("{}: ", line.index));
        out.push_str(&formula::render(&line.formula));
        out.push_str(" ; ");
        match &line.just {
            Just::Taut => out.push_str("taut"),
            Just::Axiom(name) => out.push_str(&format!("axiom {}", name.as_str())),
            Just::Hyp(k) => out.push_str(&format!("hyp {k}")),
            Just::Mp(i, j) => out.push_str(&format!("mp {i} {j}")),
            Just::Nec(budget, i) => out.push_str(&format!("nec {} {i}", render_budget(budget))),
        }
        out.push('\n');
    }
    out
}

/// Parses the text format. `#` starts a comment line; `hyp:` lines must
/// precede the numbered lines.
pub fn parse_script(text: &str) -> Result<Script, ProofError> {
    let syntax = |line: usize, message: &str| ProofError::Syntax {
        line,
        message: message.to_string(),
    };
    let mut hypotheses = Vec::new();
    let mut lines: Vec<Line> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("hyp:") {
            if !lines.is_empty() {
                return Err(syntax(no, "hypotheses must precede the numbered lines"));
            }
            hypotheses.push(formula::parse(rest)?);
            continue;
        }
        let Some((head, rest)) = trimmed.split_once(':') else {
            return Err(syntax(no, "expected `N:` or `hyp:`"));
        };
        let index: usize = head
            .trim()
            .parse()
            .map_err(|_| syntax(no, "malformed line number"))?;
        let Some((formula_text, just_text)) = rest.rsplit_once(';') else {
            return Err(syntax(no, "expected `; <justification>`"));
        };
        let formula = formula::parse(formula_text)?;
        let just = parse_just(just_text.trim(), no)?;
        lines.push(Line {
            index,
            formula,
            just,
        });
    }
    Ok(Script { hypotheses, lines })
}

fn parse_just(text: &str, no: usize) -> Result<Just, ProofError> {
    let syntax = |message: &str| ProofError::Syntax {
        line: no,
        message: message.to_string(),
    };
    let mut words = text.split_whitespace();
    let head = words
        .next()
        .ok_or_else(|| syntax("missing justification"))?;
    let parse_ref = |w: Option<&str>| -> Result<usize, ProofError> {
        w.and_then(|t| t.parse().ok())
            .ok_or_else(|| syntax("expected a line number"))
    };
    let just = match head {
        "taut" => Just::Taut,
        "axiom" => {
            let name = words.next().ok_or_else(|| syntax("missing axiom name"))?;
            let name = AxiomName::from_str(name).ok_or_else(|| syntax("unknown axiom name"))?;
            Just::Axiom(name)
        }
        "hyp" => Just::Hyp(parse_ref(words.next())?),
        "mp" => {
            let i = parse_ref(words.next())?;
            let j = parse_ref(words.next())?;
            Just::Mp(i, j)
        }
        "nec" => {
            let rest = text.strip_prefix("nec").expect("matched above").trim();
            let Some((budget_text, index_text)) = rest.rsplit_once(char::is_whitespace) else {
                return Err(syntax("expected `nec [..] N`"));
            };
            // Reuse the formula parser for the budget notation.
            let probe = format!("{budget_text} p0");
            let Formula::Modal(budget, _) = formula::parse(&probe)? else {
                return Err(syntax("malformed budget"));
            };
            let index = index_text
                .parse()
                .map_err(|_| syntax("expected a line number"))?;
            return Ok(Just::Nec(budget, index));
        }
        _ => return Err(syntax("unknown justification")),
    };
    if words.next().is_some() {
        return Err(syntax("trailing tokens after justification"));
    }
    Ok(just)
}
