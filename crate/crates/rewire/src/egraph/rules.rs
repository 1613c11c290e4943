//! Named rewrite rules and the rule file format.
//!
//! One rule per line: `name: LHS => RHS` for a directed rule or
//! `name: LHS <=> RHS` for a bidirectional one, patterns in s-expression
//! syntax with `?var` variables. `#` starts a comment.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::TermParseError;

use super::pattern::{parse_pattern, Pattern};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub name: String,
    pub lhs: Pattern,
    pub rhs: Pattern,
    pub bidirectional: bool,
}

impl Rewrite {
    pub fn directed(
        name: impl Into<String>,
        lhs: Pattern,
        rhs: Pattern,
    ) -> Result<Rewrite, RuleError> {
        Rewrite::new(name, lhs, rhs, false)
    }

    pub fn bidirectional(
        name: impl Into<String>,
        lhs: Pattern,
        rhs: Pattern,
    ) -> Result<Rewrite, RuleError> {
        Rewrite::new(name, lhs, rhs, true)
    }

    fn new(
        name: impl Into<String>,
        lhs: Pattern,
        rhs: Pattern,
        bidirectional: bool,
    ) -> Result<Rewrite, RuleError> {
        let name = name.into();
        let lhs_vars: BTreeSet<_> = lhs.vars().into_iter().collect();
        let rhs_vars: BTreeSet<_> = rhs.vars().into_iter().collect();
        if let Some(v) = rhs_vars.difference(&lhs_vars).next() {
            return Err(RuleError::UnboundVariable {
                rule: name,
                var: v.clone(),
            });
        }
        if bidirectional {
            // The reverse direction instantiates the lhs from an rhs match.
            if let Some(v) = lhs_vars.difference(&rhs_vars).next() {
                return Err(RuleError::UnboundVariable {
                    rule: name,
                    var: v.clone(),
                });
            }
        }
        Ok(Rewrite {
            name,
            lhs,
            rhs,
            bidirectional,
        })
    }
}

impl fmt::Display for Rewrite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.bidirectional { "<=>" } else { "=>" };
        write!(f, "{}: {} {} {}", self.name, self.lhs, arrow, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("rule line {line}: {err}")]
    Pattern { line: usize, err: TermParseError },
    #[error("rule `{rule}`: variable ?{var} is not bound on the matching side")]
    UnboundVariable { rule: String, var: String },
    #[error("duplicate rule name `{0}`")]
    DuplicateName(String),
}

/// Parse a rule file.
pub fn parse_rules(text: &str) -> Result<Vec<Rewrite>, RuleError> {
    let mut rules = Vec::new();
    let mut names = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(idx) => &raw[..idx],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (name, rest) = line.split_once(':').ok_or_else(|| RuleError::Malformed {
            line: line_no,
            msg: "expected `name: LHS => RHS`".to_string(),
        })?;
        let name = name.trim();
        if name.is_empty() {
            return Err(RuleError::Malformed {
                line: line_no,
                msg: "empty rule name".to_string(),
            });
        }
        let (lhs_text, rhs_text, bidirectional) = if let Some((l, r)) = rest.split_once("<=>") {
            (l, r, true)
        } else if let Some((l, r)) = rest.split_once("=>") {
            (l, r, false)
        } else {
            return Err(RuleError::Malformed {
                line: line_no,
                msg: "expected `=>` or `<=>`".to_string(),
            });
        };
        let parse = |s: &str| {
            parse_pattern(s.trim()).map_err(|err| RuleError::Pattern {
                line: line_no,
                err,
            })
        };
        let rule = Rewrite::new(name, parse(lhs_text)?, parse(rhs_text)?, bidirectional)?;
        if !names.insert(rule.name.clone()) {
            return Err(RuleError::DuplicateName(rule.name));
        }
        rules.push(rule);
    }
    Ok(rules)
}

/// The shipped Boolean-algebra rule set (`rules/bool.rules`):
/// commutativity, associativity, identity, annihilator, idempotence, double
/// negation and De Morgan over the primitive gates.
pub fn bool_rules() -> Vec<Rewrite> {
    parse_rules(include_str!("../../rules/bool.rules")).expect("shipped bool.rules parses")
}

/// Render rules in the file format, one per line.
pub fn write_rules(rules: &[Rewrite]) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}
