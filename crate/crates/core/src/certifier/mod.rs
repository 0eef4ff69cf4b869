//! Coefficient-matching systems for the Einstein identity on a polytope's
//! kernel, a staged exact/numeric solver, and replayable refutations.
//!
//! Branches: every integer exponent `sigma` in `0..2n`, plus one probe per
//! lattice divisor `p` of the polytope and admissible `t`, covering the
//! fractional exponents `2n - (2n - t)/p` in lowest terms. A fractional
//! exponent with denominator `q` forces `K` to be a `q`-th power, so these
//! branches exhaust the positive Einstein constants.

pub mod certificate;
pub mod interval;
pub mod newton;
pub mod search;
pub mod system;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use certificate::{replay_certificate, BranchLabel, Certificate, Multiplier, Step};
pub use system::{Equation, PolySystem, SystemKind};

use crate::error::{Error, Result};
use crate::io::{rat, rat_map};
use crate::kernel::{kernel_from_polytope, unknown_name, Kernel};
use crate::ma;
use crate::poly::{Monomial, Poly};
use crate::polytope::Polytope;
use crate::rational::{int, ratio};
use crate::Rational;

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Wall-clock safety net per branch.
    pub budget_ms: u64,
    /// Largest coefficient bound accepted for box subdivision.
    pub amax: Rational,
    pub seed: u64,
    pub newton_starts: usize,
    pub newton_iterations: usize,
    pub max_denominator: u64,
    pub max_boxes: usize,
    pub min_width: Rational,
    /// Restricts the run to one integer exponent, without probes.
    pub sigma: Option<u32>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            budget_ms: 60_000,
            amax: int(10_000),
            seed: 0,
            newton_starts: 200,
            newton_iterations: 200,
            max_denominator: 1_000_000,
            max_boxes: 200_000,
            min_width: Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 12)),
            sigma: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub points: usize,
    pub positive: bool,
}

/// Values of the root's unknowns when `K = L^p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSolution {
    pub p: u32,
    #[serde(with = "rat_map")]
    pub assignment: BTreeMap<String, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    /// Values of the kernel's unknowns.
    #[serde(with = "rat_map")]
    pub assignment: BTreeMap<String, Rational>,
    #[serde(with = "rat")]
    pub sigma: Rational,
    #[serde(with = "rat")]
    pub lambda: Rational,
    pub positivity: PositivityReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub root: Option<RootSolution>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CertificationResult {
    Solved(Solution),
    Refuted {
        certificate: Certificate,
    },
    Unknown {
        reason: String,
        remaining: Vec<String>,
        steps: Vec<Step>,
        surviving_boxes: usize,
    },
}

impl CertificationResult {
    pub fn verdict(&self) -> Verdict {
        match self {
            CertificationResult::Solved(_) => Verdict::Solved,
            CertificationResult::Refuted { .. } => Verdict::Refuted,
            CertificationResult::Unknown { .. } => Verdict::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Solved,
    Refuted,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Solved => 0,
            Verdict::Refuted => 1,
            Verdict::Unknown => 2,
        }
    }
}

/// Kernel template the equations were expanded from.
#[derive(Clone, Debug)]
enum Origin {
    Direct { kernel: Kernel },
    PerfectPower { root: Kernel, target: Kernel },
}

/// A system together with what is needed to re-verify a solution.
#[derive(Clone, Debug)]
pub struct Branch {
    pub label: BranchLabel,
    pub system: PolySystem,
    origin: Origin,
}

fn equations_from(n: usize, residual: &Poly) -> Vec<Equation> {
    let mut eqs: Vec<Equation> = residual
        .split_leading(n)
        .into_iter()
        .filter(|(m, e)| !(m.is_one() && e.is_zero()))
        .map(|(m, expr)| Equation {
            monomial: m.to_u32(),
            expr,
        })
        .collect();
    eqs.sort_by(|a, b| {
        Monomial::from_exponents(a.monomial.iter().copied())
            .deglex_cmp(&Monomial::from_exponents(b.monomial.iter().copied()))
    });
    eqs
}

/// Shared expansion of `det B(K)` for every integer exponent.
pub struct SystemBuilder {
    n: usize,
    kernel: Kernel,
    flat: Poly,
    det: Poly,
}

impl SystemBuilder {
    pub fn new(p: &Polytope) -> Result<Self> {
        let kernel = kernel_from_polytope(p)?;
        let flat = kernel.to_poly();
        let n = p.dim();
        let det = ma::det_b_of_poly(n, &flat)?;
        Ok(SystemBuilder { n, kernel, flat, det })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn branch(&self, sigma: u32) -> Branch {
        let residual = &self.det - &self.flat.pow(sigma);
        let k = self.kernel.unknowns().len();
        let sigma_q = int(sigma as i64);
        Branch {
            label: BranchLabel::Sigma { sigma },
            system: PolySystem {
                n: self.n,
                unknowns: self.kernel.unknowns().to_vec(),
                equations: equations_from(self.n, &residual),
                constraints: (0..k).map(|j| Poly::var(k, j)).collect(),
                lambda: ma::einstein_constant(self.n, &sigma_q),
                sigma: sigma_q,
                kind: SystemKind::Direct,
            },
            origin: Origin::Direct {
                kernel: self.kernel.clone(),
            },
        }
    }
}

/// Root template `L = 1 + sum x_i/p + sum b_m x^m` over the lattice points
/// of `polytope / p`, with the expansion of `p^n det B(L)`.
pub struct ProbeBuilder {
    n: usize,
    p: u32,
    root: Kernel,
    flat: Poly,
    scaled_det: Poly,
    target: Kernel,
    constraints: Vec<Poly>,
}

impl ProbeBuilder {
    pub fn new(polytope: &Polytope, p: u32) -> Result<Self> {
        let n = polytope.dim();
        let shrunk = polytope.shrink(p)?;
        let points = shrunk.lattice_points()?;
        let is_fixed = |m: &[u32]| m.iter().sum::<u32>() <= 1;
        let unknowns: Vec<String> = points
            .iter()
            .filter(|m| !is_fixed(m))
            .map(|m| unknown_name(m).replacen('a', "b", 1))
            .collect();
        let k = unknowns.len();
        let inv_p = ratio(1, p as i64);
        let mut next = 0;
        let mut terms = Vec::new();
        for m in &points {
            let c = match m.iter().sum::<u32>() {
                0 => Poly::one(k),
                1 => Poly::constant(k, inv_p.clone()),
                _ => {
                    next += 1;
                    Poly::var(k, next - 1)
                }
            };
            terms.push((m.clone(), c));
        }
        let root = Kernel::new(n, unknowns, terms)?;
        let flat = root.to_poly();
        let scale = Rational::from_integer(num_bigint::BigInt::from(p).pow(n as u32));
        let scaled_det = ma::det_b_of_poly(n, &flat)?.scale(&scale);

        // K = L^p must carry positive coefficients on every lattice point
        let target = kernel_from_polytope(polytope)?;
        let power = Kernel::from_poly(n, root.unknowns().to_vec(), &flat.pow(p))?;
        let constraints = target
            .support()
            .iter()
            .filter(|m| !is_fixed(m))
            .map(|m| power.coefficient(m))
            .collect();
        Ok(ProbeBuilder {
            n,
            p,
            root,
            flat,
            scaled_det,
            target,
            constraints,
        })
    }

    /// Admissible `t`: `0 <= t < 2n` with `gcd(2n - t, p) = 1`.
    pub fn exponents(n: usize, p: u32) -> Vec<u32> {
        (0..2 * n as u32)
            .filter(|t| (2 * n as u32 - t).gcd(&p) == 1)
            .collect()
    }

    pub fn branch(&self, t: u32) -> Branch {
        let residual = &self.scaled_det - &self.flat.pow(t);
        let two_n = int(2 * self.n as i64);
        let sigma = &two_n - (&two_n - int(t as i64)) / int(self.p as i64);
        Branch {
            label: BranchLabel::PerfectPower { p: self.p, t },
            system: PolySystem {
                n: self.n,
                unknowns: self.root.unknowns().to_vec(),
                equations: equations_from(self.n, &residual),
                constraints: self.constraints.clone(),
                lambda: ma::einstein_constant(self.n, &sigma),
                sigma,
                kind: SystemKind::PerfectPower { p: self.p, t },
            },
            origin: Origin::PerfectPower {
                root: self.root.clone(),
                target: self.target.clone(),
            },
        }
    }
}

/// Coefficient-matching system for one integer exponent.
pub fn build_system(p: &Polytope, sigma: u32) -> Result<PolySystem> {
    Ok(SystemBuilder::new(p)?.branch(sigma).system)
}

/// Every branch of a normalized polytope, integer exponents first.
pub fn branches(p: &Polytope) -> Result<Vec<Branch>> {
    let builder = SystemBuilder::new(p)?;
    let n = p.dim();
    let mut out: Vec<Branch> = (0..2 * n as u32).map(|s| builder.branch(s)).collect();
    for d in p.lattice_divisors() {
        let probe = ProbeBuilder::new(p, d)?;
        out.extend(ProbeBuilder::exponents(n, d).into_iter().map(|t| probe.branch(t)));
    }
    Ok(out)
}

fn sample_points(n: usize) -> Vec<Vec<Rational>> {
    [ratio(1, 10), ratio(1, 2), int(1), int(2), int(10)]
        .into_iter()
        .map(|t| vec![t; n])
        .collect()
}

fn values_of(assignment: &BTreeMap<usize, Rational>, names: &[String]) -> BTreeMap<String, Rational> {
    assignment
        .iter()
        .map(|(k, v)| (names[*k].clone(), v.clone()))
        .collect()
}

/// Independent re-verification of a candidate from the kernel template.
fn verify_solution(branch: &Branch, values: &BTreeMap<String, Rational>) -> Result<Option<Solution>> {
    let s = &branch.system;
    let (kernel, root) = match &branch.origin {
        Origin::Direct { kernel } => {
            let k = kernel.substitute(values)?;
            let sigma = s.sigma.to_integer();
            let sigma: u32 = sigma.try_into().map_err(|_| Error::Invalid("exponent".into()))?;
            if !ma::residual(&k, sigma)?.is_zero() {
                return Ok(None);
            }
            (k, None)
        }
        Origin::PerfectPower { root, target } => {
            let SystemKind::PerfectPower { p, .. } = s.kind else {
                unreachable!("probe branch without probe kind")
            };
            let l = root.substitute(values)?.numeric_poly()?;
            let k_poly = l.pow(p);
            let k = Kernel::from_poly(s.n, Vec::new(), &k_poly)?;
            if k.support() != target.support() {
                return Ok(None);
            }
            // det B(K) = L^(p sigma), expanded directly
            let exponent = (&s.sigma * int(p as i64)).to_integer();
            let exponent: u32 = exponent.try_into().map_err(|_| Error::Invalid("exponent".into()))?;
            if ma::det_b_of_poly(s.n, &k_poly)? != l.pow(exponent) {
                return Ok(None);
            }
            (
                k,
                Some(RootSolution {
                    p,
                    assignment: values.clone(),
                }),
            )
        }
    };
    let coeffs = kernel.numeric_coefficients()?;
    if coeffs.values().any(|c| !c.is_positive()) {
        return Ok(None);
    }
    if !s.lambda.is_positive() {
        return Ok(None);
    }
    let assignment: BTreeMap<String, Rational> = coeffs
        .iter()
        .filter(|(m, _)| m.iter().sum::<u32>() > 1)
        .map(|(m, c)| (unknown_name(m), c.clone()))
        .collect();
    let points = sample_points(s.n);
    let positive = ma::metric_positivity_sample(&kernel, &points)?;
    Ok(Some(Solution {
        assignment,
        sigma: s.sigma.clone(),
        lambda: s.lambda.clone(),
        positivity: PositivityReport {
            points: points.len(),
            positive,
        },
        root,
    }))
}

fn branch_seed(seed: u64, label: &BranchLabel) -> u64 {
    let tag = match label {
        BranchLabel::Sigma { sigma } => *sigma as u64,
        BranchLabel::PerfectPower { p, t } => (1 << 32) | ((*p as u64) << 16) | *t as u64,
    };
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs the stages in order: propagation, exact combination search,
/// numeric multi-start, and box subdivision.
pub fn solve_or_refute(branch: &Branch, opts: &CertifyOptions) -> Result<CertificationResult> {
    let s = &branch.system;
    let nvars = s.nvars();
    let deadline = Instant::now() + Duration::from_millis(opts.budget_ms);
    let mut engine = search::Engine::new(nvars, s.initial_state(), Some(deadline));
    let unknown = |engine: &search::Engine, reason: String, boxes: usize| {
        let remaining = engine.state.live_vars().into_iter().map(|v| s.unknowns[v].clone()).collect();
        CertificationResult::Unknown {
            reason,
            remaining,
            steps: engine.steps.clone(),
            surviving_boxes: boxes,
        }
    };
    match engine.run() {
        search::Progress::Refuted => {
            return Ok(CertificationResult::Refuted {
                certificate: Certificate {
                    steps: engine.steps,
                },
            })
        }
        search::Progress::OutOfTime => {
            return Ok(unknown(&engine, "time budget exhausted during exact stages".into(), 0))
        }
        search::Progress::Stuck => {}
    }

    let live: Vec<usize> = engine.state.live_vars().into_iter().collect();
    let state = &engine.state;
    let full_values = |local: &BTreeMap<usize, Rational>| -> Option<BTreeMap<usize, Rational>> {
        let subs: Vec<(usize, Rational)> = local.iter().map(|(k, v)| (*k, v.clone())).collect();
        let eqs_ok = state.equations.iter().all(|e| e.substitute_values(&subs).is_zero());
        let cons_ok = state
            .constraints
            .iter()
            .all(|c| c.substitute_values(&subs).as_constant().is_some_and(|v| v.is_positive()));
        if !(eqs_ok && cons_ok) {
            return None;
        }
        search::back_substitute(&state.eliminated, nvars, local.clone())
    };

    let candidate = if live.is_empty() {
        full_values(&BTreeMap::new())
    } else {
        let positive = state.positive_vars();
        let cfg = newton::NewtonConfig {
            starts: opts.newton_starts,
            iterations: opts.newton_iterations,
            max_denominator: opts.max_denominator,
            seed: branch_seed(opts.seed, &branch.label),
        };
        newton::multistart(&state.equations, &live, &positive, &cfg, |c| full_values(c).is_some())
            .and_then(|(_, local)| full_values(&local))
    };
    if let Some(values) = candidate {
        let named = values_of(&values, &s.unknowns);
        if let Some(sol) = verify_solution(branch, &named)? {
            return Ok(CertificationResult::Solved(sol));
        }
        return Ok(unknown(
            &engine,
            "candidate satisfied the reduced system but failed re-verification".into(),
            0,
        ));
    }
    if live.is_empty() {
        return Ok(unknown(&engine, "no unknowns left but system not satisfied".into(), 0));
    }

    // box subdivision over a derived bounded region
    let positive = state.positive_vars();
    let mut bounds = Vec::new();
    let mut root = BTreeMap::new();
    for &v in &live {
        let Some((b, source)) = interval::derive_bound(v, &state.equations, &state.constraints, &positive) else {
            return Ok(unknown(
                &engine,
                format!("no rational solution found and no bound derived for {}", s.unknowns[v]),
                0,
            ));
        };
        if b > opts.amax {
            return Ok(unknown(
                &engine,
                format!("bound {} for {} exceeds the cap", crate::rational::format(&b), s.unknowns[v]),
                0,
            ));
        }
        let lower = if positive.contains(&v) { Rational::zero() } else { -b.clone() };
        root.insert(v, interval::Interval::new(lower.clone(), b.clone()));
        bounds.push(interval::VarBound {
            var: v,
            lower,
            upper: b,
            source,
        });
    }
    let search = interval::Search {
        equations: &state.equations,
        constraints: &state.constraints,
        min_width: opts.min_width.clone(),
        max_boxes: opts.max_boxes,
        deadline: Some(deadline),
    };
    match search.run(root) {
        interval::SearchOutcome::Excluded(tree) => {
            let mut steps = engine.steps.clone();
            steps.push(Step::IntervalExclusion { bounds, tree });
            Ok(CertificationResult::Refuted {
                certificate: Certificate { steps },
            })
        }
        interval::SearchOutcome::Survivors { boxes, reason } => Ok(unknown(
            &engine,
            format!("no rational solution found; subdivision inconclusive: {reason}"),
            boxes,
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchReport {
    pub label: BranchLabel,
    #[serde(with = "rat")]
    pub sigma: Rational,
    #[serde(with = "rat")]
    pub lambda: Rational,
    pub unknowns: usize,
    pub equations: usize,
    pub result: CertificationResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCertificate {
    pub label: BranchLabel,
    pub steps: Vec<Step>,
}

/// Refutation of every branch, closed by a `SigmaExhausted` step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeCertificate {
    pub branches: Vec<BranchCertificate>,
    pub conclusion: Step,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeReport {
    pub dim: usize,
    pub verdict: Verdict,
    pub branches: Vec<BranchReport>,
    /// Index into `branches` of the reported solution.
    pub solved_branch: Option<usize>,
    pub certificate: Option<PolytopeCertificate>,
}

impl PolytopeReport {
    pub fn solution(&self) -> Option<&Solution> {
        let b = &self.branches[self.solved_branch?];
        match &b.result {
            CertificationResult::Solved(s) => Some(s),
            _ => None,
        }
    }
}

fn prepare(p: &Polytope) -> Result<Polytope> {
    let (ok, witness) = p.is_delzant();
    if !ok {
        return Err(Error::NotDelzant(witness.to_string()));
    }
    Ok(p.normalized()?.0)
}

/// Certifies every branch (or only `opts.sigma`) of a Delzant polytope.
pub fn certify(p: &Polytope, opts: &CertifyOptions) -> Result<PolytopeReport> {
    let p = prepare(p)?;
    let n = p.dim();
    let all = match opts.sigma {
        Some(s) => {
            if s >= 2 * n as u32 {
                return Err(Error::Invalid(format!(
                    "sigma must be below {} for a positive Einstein constant",
                    2 * n
                )));
            }
            vec![SystemBuilder::new(&p)?.branch(s)]
        }
        None => branches(&p)?,
    };
    let results: Vec<Result<CertificationResult>> =
        all.par_iter().map(|b| solve_or_refute(b, opts)).collect();
    let mut reports = Vec::with_capacity(all.len());
    for (b, r) in all.iter().zip(results) {
        reports.push(BranchReport {
            label: b.label.clone(),
            sigma: b.system.sigma.clone(),
            lambda: b.system.lambda.clone(),
            unknowns: b.system.nvars(),
            equations: b.system.equations.len(),
            result: r?,
        });
    }
    let solved_branch = reports.iter().position(|r| r.result.verdict() == Verdict::Solved);
    let all_refuted = reports.iter().all(|r| r.result.verdict() == Verdict::Refuted);
    let verdict = if solved_branch.is_some() {
        Verdict::Solved
    } else if all_refuted {
        Verdict::Refuted
    } else {
        Verdict::Unknown
    };
    let certificate = (all_refuted && opts.sigma.is_none()).then(|| PolytopeCertificate {
        branches: reports
            .iter()
            .map(|r| BranchCertificate {
                label: r.label.clone(),
                steps: match &r.result {
                    CertificationResult::Refuted { certificate } => certificate.steps.clone(),
                    _ => unreachable!("all branches refuted"),
                },
            })
            .collect(),
        conclusion: Step::SigmaExhausted {
            branches: reports.iter().map(|r| r.label.clone()).collect(),
        },
    });
    Ok(PolytopeReport {
        dim: n,
        verdict,
        branches: reports,
        solved_branch,
        certificate,
    })
}

/// Rebuilds every branch and replays each refutation; the conclusion must
/// list exactly the admissible branches.
pub fn replay_polytope_certificate(p: &Polytope, cert: &PolytopeCertificate) -> Result<bool> {
    let p = prepare(p)?;
    let all = branches(&p)?;
    let expected: BTreeSet<BranchLabel> = all.iter().map(|b| b.label.clone()).collect();
    let Step::SigmaExhausted { branches: listed } = &cert.conclusion else {
        return Err(Error::MalformedCertificate("conclusion must be branch exhaustion".into()));
    };
    let listed_set: BTreeSet<BranchLabel> = listed.iter().cloned().collect();
    let provided: BTreeSet<BranchLabel> = cert.branches.iter().map(|b| b.label.clone()).collect();
    if listed_set != expected || provided != expected || cert.branches.len() != expected.len() {
        return Ok(false);
    }
    let checks: Vec<Result<bool>> = cert
        .branches
        .par_iter()
        .map(|bc| {
            let branch = all.iter().find(|b| b.label == bc.label).expect("label checked");
            replay_certificate(
                &branch.system,
                &Certificate {
                    steps: bc.steps.clone(),
                },
            )
        })
        .collect();
    for c in checks {
        if !c? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Re-verifies every claim in a report by exact arithmetic: the reported
/// solution, each refuted branch, and the closing certificate if present.
pub fn replay_report(p: &Polytope, report: &PolytopeReport) -> Result<bool> {
    let p = prepare(p)?;
    let builder = SystemBuilder::new(&p)?;
    let all = branches(&p)?;
    let find = |label: &BranchLabel| -> Option<Branch> {
        match label {
            BranchLabel::Sigma { sigma } if (*sigma as usize) < 2 * p.dim() => Some(builder.branch(*sigma)),
            _ => all.iter().find(|b| &b.label == label).cloned(),
        }
    };
    for r in &report.branches {
        let Some(branch) = find(&r.label) else {
            return Ok(false);
        };
        let ok = match &r.result {
            CertificationResult::Solved(sol) => {
                let values = match &sol.root {
                    Some(root) => root.assignment.clone(),
                    None => sol.assignment.clone(),
                };
                verify_solution(&branch, &values)?.as_ref() == Some(sol)
            }
            CertificationResult::Refuted { certificate } => replay_certificate(&branch.system, certificate)?,
            CertificationResult::Unknown { .. } => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    let verdict_ok = match report.verdict {
        Verdict::Solved => report.solution().is_some(),
        Verdict::Refuted => match &report.certificate {
            Some(cert) => replay_polytope_certificate(&p, cert)?,
            None => report.branches.iter().all(|b| b.result.verdict() == Verdict::Refuted),
        },
        Verdict::Unknown => report.branches.iter().all(|b| b.result.verdict() != Verdict::Solved),
    };
    Ok(verdict_ok)
}
