//! Refutation certificates and their exact replay.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::interval::{self, BoxTree, Interval, VarBound};
use super::system::{self, PolySystem, State};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// `factor * E_equation` inside a combination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplier {
    pub equation: usize,
    pub factor: Poly,
}

/// Which σ-branch of a polytope a certificate belongs to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum BranchLabel {
    Sigma { sigma: u32 },
    PerfectPower { p: u32, t: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    /// Equation `c u + rest` with constant `c`; replaces `u` by `expression`.
    SubstituteLinear {
        equation: usize,
        unknown: usize,
        expression: Poly,
    },
    /// Appends `sum factor_i E_i` as a new equation.
    Combine { terms: Vec<Multiplier> },
    /// `sum factor_i E_i` is a nonzero polynomial that cannot vanish on the domain.
    PositivityContradiction { terms: Vec<Multiplier> },
    /// A side constraint reduced to something that is never positive.
    ConstraintViolated { constraint: usize },
    /// Every live unknown is bounded and each box of the subdivision
    /// violates an equation or constraint.
    IntervalExclusion { bounds: Vec<VarBound>, tree: BoxTree },
    /// Every admissible branch of a polytope is refuted.
    SigmaExhausted { branches: Vec<BranchLabel> },
}

impl Step {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, Step::SubstituteLinear { .. } | Step::Combine { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub steps: Vec<Step>,
}

fn combination(state: &State, nvars: usize, terms: &[Multiplier]) -> Result<Poly> {
    let pairs: Vec<(usize, Poly)> = terms.iter().map(|m| (m.equation, m.factor.clone())).collect();
    system::combine(&state.equations, nvars, &pairs)
        .ok_or_else(|| Error::MalformedCertificate("combination references a missing equation".into()))
}

/// Applies a non-terminal step; `Ok(false)` if its claim does not hold.
pub fn apply_step(state: &mut State, nvars: usize, step: &Step) -> Result<bool> {
    match step {
        Step::SubstituteLinear {
            equation,
            unknown,
            expression,
        } => {
            let e = state
                .equations
                .get(*equation)
                .ok_or_else(|| Error::MalformedCertificate(format!("no equation {equation}")))?;
            if *unknown >= nvars || expression.nvars() != nvars {
                return Err(Error::MalformedCertificate("unknown out of range".into()));
            }
            match system::solve_linear(e, *unknown) {
                Some(sol) if sol == *expression => {
                    state.substitute(*unknown, expression);
                    Ok(true)
                }
                _ => Ok(false),
            }
        }
        Step::Combine { terms } => {
            let c = combination(state, nvars, terms)?;
            state.equations.push(c);
            Ok(true)
        }
        _ => Err(Error::MalformedCertificate("terminal step applied as a rewrite".into())),
    }
}

/// Checks a terminal step against the current state.
pub fn check_terminal(state: &State, nvars: usize, step: &Step) -> Result<bool> {
    let positive = state.positive_vars();
    match step {
        Step::PositivityContradiction { terms } => {
            let c = combination(state, nvars, terms)?;
            Ok(system::is_sign_definite(&c, &positive))
        }
        Step::ConstraintViolated { constraint } => {
            let c = state
                .constraints
                .get(*constraint)
                .ok_or_else(|| Error::MalformedCertificate(format!("no constraint {constraint}")))?;
            Ok(system::is_nonpositive(c, &positive))
        }
        Step::IntervalExclusion { bounds, tree } => {
            let mut bx: BTreeMap<usize, Interval> = BTreeMap::new();
            for b in bounds {
                let valid = interval::check_bound(
                    b.var,
                    &b.upper,
                    b.source,
                    &state.equations,
                    &state.constraints,
                    &positive,
                );
                let lower_ok = if positive.contains(&b.var) {
                    b.lower.is_zero()
                } else {
                    b.lower == -b.upper.clone()
                };
                if !valid || !lower_ok || bx.contains_key(&b.var) {
                    return Ok(false);
                }
                bx.insert(b.var, Interval::new(b.lower.clone(), b.upper.clone()));
            }
            if state.live_vars().iter().any(|v| !bx.contains_key(v)) {
                return Ok(false);
            }
            Ok(interval::check_tree(tree, &bx, &state.equations, &state.constraints))
        }
        _ => Err(Error::MalformedCertificate("expected a terminal step".into())),
    }
}

/// Re-checks a certificate by exact arithmetic. True iff every rewrite
/// holds and the final step is a valid contradiction.
pub fn replay_certificate(system: &PolySystem, cert: &Certificate) -> Result<bool> {
    let Some((last, rewrites)) = cert.steps.split_last() else {
        return Ok(false);
    };
    if matches!(last, Step::SigmaExhausted { .. }) {
        return Err(Error::MalformedCertificate(
            "branch exhaustion belongs to a polytope certificate".into(),
        ));
    }
    if !last.is_terminal() || rewrites.iter().any(Step::is_terminal) {
        return Err(Error::MalformedCertificate(
            "only the final step may conclude".into(),
        ));
    }
    let nvars = system.nvars();
    let mut state = system.initial_state();
    for step in rewrites {
        if !apply_step(&mut state, nvars, step)? {
            return Ok(false);
        }
    }
    check_terminal(&state, nvars, last)
}
