//! Abstract syntax, concrete grammar and the budget-rescaling operator for
//! the modal language.
//!
//! Concrete grammar (whitespace insignificant, `->` right-associative):
//!
//! ```text
//! formula := imp
//! imp     := or ('->' imp)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '!' unary | '[' agent ':' rat (',' agent ':' rat)* ']' unary
//!          | '(' formula ')' | ident | 'true' | 'false'
//! rat     := integer | integer '/' positive-integer
//! ```
//!
//! `&`, `|`, `true` and `false` are sugar expanded at parse time; the core
//! syntax has only variables, negation, implication and the coalition
//! modality. `true` is the fixed tautology `(p0 -> p0)` over the reserved
//! variable `p0`.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use crate::rational::{render_rat, Rat};

/// Reserved variable used to spell the fixed tautology `true`.
pub const TOP_VAR: &str = "p0";

/// Agent name: nonempty token of letters, digits and underscores, compared
/// and printed in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent(String);

impl Agent {
    pub fn new(name: &str) -> Result<Agent, FormulaError> {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(FormulaError::BadAgent(name.to_owned()));
        }
        Ok(Agent(name.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl core::fmt::Display for Agent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Finite mapping from a coalition's members to nonnegative rational
/// budgets. The domain *is* the coalition of the enclosing modality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Budget(BTreeMap<Agent, Rat>);

impl Budget {
    pub fn empty() -> Budget {
        Budget(BTreeMap::new())
    }

    pub fn new(entries: BTreeMap<Agent, Rat>) -> Result<Budget, FormulaError> {
        for (agent, value) in &entries {
            if value.is_negative() {
                return Err(FormulaError::NegBudget(agent.clone()));
            }
        }
        Ok(Budget(entries))
    }

    /// The coalition: the budget's domain.
    pub fn coalition(&self) -> impl Iterator<Item = &Agent> {
        self.0.keys()
    }

    pub fn coalition_set(&self) -> BTreeSet<Agent> {
        self.0.keys().cloned().collect()
    }

    pub fn get(&self, agent: &Agent) -> Option<&Rat> {
        self.0.get(agent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Agent, &Rat)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise `self(a) <= other(a)` over `self`'s domain.
    pub fn le_on_domain(&self, other: &Budget) -> bool {
        self.0
            .iter()
            .all(|(a, v)| other.get(a).is_some_and(|w| v <= w))
    }

    /// Union of budgets with disjoint domains.
    pub fn disjoint_union(&self, other: &Budget) -> Result<Budget, FormulaError> {
        let mut entries = self.0.clone();
        for (agent, value) in &other.0 {
            if entries.insert(agent.clone(), value.clone()).is_some() {
                return Err(FormulaError::DupAgent(agent.clone()));
            }
        }
        Ok(Budget(entries))
    }

    pub fn divide(&self, mu: &Rat) -> Budget {
        Budget(self.0.iter().map(|(a, v)| (a.clone(), v / mu)).collect())
    }
}

/// Formulas of the language: `p | !f | (f -> f) | [C]_x f`.
///
/// The modality stores only the budget; its coalition is the budget's
/// domain, so the domain invariant holds by construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Modal(Budget, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_owned())
    }

    // Constructor, not the `ops::Not` trait: it consumes the body.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn modal(budget: Budget, body: Formula) -> Formula {
        Formula::Modal(budget, Box::new(body))
    }

    /// The fixed tautology `(p0 -> p0)`.
    pub fn top() -> Formula {
        Formula::implies(Formula::var(TOP_VAR), Formula::var(TOP_VAR))
    }

    /// All agents mentioned in any modality.
    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<Agent>) {
        match self {
            Formula::Var(_) => {}
            Formula::Not(f) => f.collect_agents(out),
            Formula::Implies(a, b) => {
                a.collect_agents(out);
                b.collect_agents(out);
            }
            Formula::Modal(budget, body) => {
                out.extend(budget.coalition().cloned());
                body.collect_agents(out);
            }
        }
    }

    /// True when the formula contains no modality, so `f / mu == f` for
    /// every scale.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Var(_) => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::Implies(a, b) => a.is_propositional() && b.is_propositional(),
            Formula::Modal(..) => false,
        }
    }
}

/// Budget rescaling `f / mu`: variables are untouched, connectives are
/// mapped through, every modal budget entry becomes `value / mu`.
pub fn divide(f: &Formula, mu: &Rat) -> Result<Formula, FormulaError> {
    if !mu.is_positive() {
        return Err(FormulaError::NonPosScale);
    }
    Ok(divide_unchecked(f, mu))
}

pub(crate) fn divide_unchecked(f: &Formula, mu: &Rat) -> Formula {
    if mu.is_one() {
        return f.clone();
    }
    match f {
        Formula::Var(p) => Formula::Var(p.clone()),
        Formula::Not(g) => Formula::not(divide_unchecked(g, mu)),
        Formula::Implies(a, b) => {
            Formula::implies(divide_unchecked(a, mu), divide_unchecked(b, mu))
        }
        Formula::Modal(budget, body) => {
            Formula::modal(budget.divide(mu), divide_unchecked(body, mu))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaError {
    /// E-SYNTAX: byte position and what was expected there.
    Syntax {
        pos: usize,
        expected: String,
    },
    /// E-NEG-BUDGET
    NegBudget(Agent),
    /// E-DUP-AGENT
    DupAgent(Agent),
    /// E-NONPOS-SCALE
    NonPosScale,
    BadAgent(String),
}

impl core::fmt::Display for FormulaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FormulaError::Syntax { pos, expected } => {
                write!(f, "E-SYNTAX: at position {pos}: expected {expected}")
            }
            FormulaError::NegBudget(a) => {
                write!(f, "E-NEG-BUDGET: negative budget for agent {a}")
            }
            FormulaError::DupAgent(a) => {
                write!(f, "E-DUP-AGENT: agent {a} repeated inside one modality")
            }
            FormulaError::NonPosScale => write!(f, "E-NONPOS-SCALE: scale must be positive"),
            FormulaError::BadAgent(name) => write!(f, "E-SYNTAX: bad agent name `{name}`"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Slash,
    Ident(String),
    Number(String),
}

struct Lexer<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
}

fn lex(src: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                tokens.push((i, Token::Bang));
                i += 1;
            }
            '&' => {
                tokens.push((i, Token::Amp));
                i += 1;
            }
            '|' => {
                tokens.push((i, Token::Pipe));
                i += 1;
            }
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            '[' => {
                tokens.push((i, Token::LBracket));
                i += 1;
            }
            ']' => {
                tokens.push((i, Token::RBracket));
                i += 1;
            }
            ',' => {
                tokens.push((i, Token::Comma));
                i += 1;
            }
            ':' => {
                tokens.push((i, Token::Colon));
                i += 1;
            }
            '/' => {
                tokens.push((i, Token::Slash));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((i, Token::Arrow));
                    i += 2;
                } else if bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) {
                    let start = i;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    tokens.push((start, Token::Number(src[start..i].to_owned())));
                } else {
                    return Err(FormulaError::Syntax {
                        pos: i,
                        expected: "`->` or a number".to_owned(),
                    });
                }
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                tokens.push((start, Token::Number(src[start..i].to_owned())));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Token::Ident(src[start..i].to_owned())));
            }
            _ => {
                return Err(FormulaError::Syntax {
                    pos: i,
                    expected: "a formula token".to_owned(),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.lexer.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.lexer
            .tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.lexer.src.len())
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.lexer.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), FormulaError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn err(&self, expected: &str) -> FormulaError {
        FormulaError::Syntax {
            pos: self.here(),
            expected: expected.to_owned(),
        }
    }

    fn imp(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let rhs = self.imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Token::Pipe) {
            self.pos += 1;
            let rhs = self.and()?;
            // a | b  ==  !a -> b
            lhs = Formula::implies(Formula::not(lhs), rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::Amp) {
            self.pos += 1;
            let rhs = self.unary()?;
            // a & b  ==  !(a -> !b)
            lhs = Formula::not(Formula::implies(lhs, Formula::not(rhs)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(Token::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Token::LBracket) => {
                let budget = self.budget()?;
                Ok(Formula::modal(budget, self.unary()?))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.imp()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                match name.as_str() {
                    "true" => Ok(Formula::top()),
                    "false" => Ok(Formula::not(Formula::top())),
                    _ => Ok(Formula::Var(name)),
                }
            }
            _ => Err(self.err("a formula")),
        }
    }

    fn budget(&mut self) -> Result<Budget, FormulaError> {
        self.expect(Token::LBracket, "`[`")?;
        let mut entries = BTreeMap::new();
        if self.peek() == Some(&Token::RBracket) {
            // `[]` is the empty-coalition modality used by proof scripts.
            self.pos += 1;
            return Ok(Budget::empty());
        }
        loop {
            let agent = match self.bump() {
                Some(Token::Ident(name)) => Agent::new(&name)?,
                _ => return Err(self.err("an agent name")),
            };
            self.expect(Token::Colon, "`:`")?;
            let value = self.rat()?;
            if value.is_negative() {
                return Err(FormulaError::NegBudget(agent));
            }
            if entries.insert(agent.clone(), value).is_some() {
                return Err(FormulaError::DupAgent(agent));
            }
            match self.bump() {
                Some(Token::Comma) => continue,
                Some(Token::RBracket) => break,
                _ => return Err(self.err("`,` or `]`")),
            }
        }
        Budget::new(entries)
    }

    fn rat(&mut self) -> Result<Rat, FormulaError> {
        let numer = match self.bump() {
            Some(Token::Number(n)) => n,
            _ => return Err(self.err("a rational")),
        };
        let text = if self.peek() == Some(&Token::Slash) {
            self.pos += 1;
            match self.bump() {
                Some(Token::Number(d)) => format!("{numer}/{d}"),
                _ => return Err(self.err("a denominator")),
            }
        } else {
            numer
        };
        crate::rational::parse_rat(&text).map_err(|_| self.err("a rational"))
    }
}

/// Parses the concrete grammar into a [`Formula`].
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        lexer: Lexer { src: text, tokens },
        pos: 0,
    };
    let formula = parser.imp()?;
    if parser.pos != parser.lexer.tokens.len() {
        return Err(parser.err("end of input"));
    }
    Ok(formula)
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

/// Canonical text: agents sorted, rationals in lowest terms, implications
/// always parenthesized. `parse(render(f))` is structurally equal to `f`.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    render_into(f, &mut out);
    out
}

fn render_into(f: &Formula, out: &mut String) {
    match f {
        Formula::Var(p) => out.push_str(p),
        Formula::Not(g) => {
            out.push('!');
            if matches!(**g, Formula::Modal(..)) {
                out.push('(');
                render_into(g, out);
                out.push(')');
            } else {
                render_into(g, out);
            }
        }
        Formula::Implies(a, b) => {
            out.push('(');
            render_into(a, out);
            out.push_str(" -> ");
            render_into(b, out);
            out.push(')');
        }
        Formula::Modal(budget, body) => {
            out.push('[');
            for (i, (agent, value)) in budget.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(agent.as_str());
                out.push(':');
                out.push_str(&render_rat(value));
            }
            out.push_str("] ");
            render_into(body, out);
        }
    }
}
