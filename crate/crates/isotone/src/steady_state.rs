//! Existence decision, dominant fixed point, stability certificate,
//! spectral relations between fixed points, reducible cascade solving,
//! the 1-D closed form, brute-force enumeration for small n, and basin
//! probing.
//!
//! The quantities Δ_i = k_i² − 4 M_ii and, when 0 < k and 0 ≤ Δ,
//! y^min = (k − √Δ)/2 and y^max = (k + √Δ)/2 bracket every fixed point:
//! Φ ⊂ [y^min, y^max] ⊂ [0, k]. Iteration from y^max (all diagonal entries
//! positive) is antitone, and the first iterate whose image drops below
//! y^min certifies nonexistence; convergence to a positive limit produces
//! the dominant fixed point, which dominates every other fixed point.

use crate::error::{Error, Result};
use crate::iteration::{iterate, IterationTrace, Problem, TraceStatus};
use crate::order::{PositiveVector, Vector};

/// Residual targeted by Newton polishing of certified outputs.
pub const POLISH_RESIDUAL: f64 = 1e-12;
/// Band half-width for classifying a certificate as marginal.
pub const CERT_CLASS_TOL: f64 = 1e-8;
/// A converged probe limit within `BASIN_MATCH_FACTOR * tol` of the
/// dominant point counts as converging to it.
pub const BASIN_MATCH_FACTOR: f64 = 1e3;
/// Default per-axis grid for [`enumerate_small`].
pub const ENUM_GRID_DEFAULT: usize = 64;
/// Smallest accepted per-axis grid.
pub const ENUM_GRID_MIN: usize = 16;
/// Largest dimension [`enumerate_small`] supports.
pub const ENUM_MAX_DIM: usize = 3;
/// Roots closer than `DEDUP_FACTOR * tol` in sup norm are merged.
pub const DEDUP_FACTOR: f64 = 100.0;

/// Δ, and the fixed-point bracket [y^min, y^max] when it exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    delta: Vector,
    necessary_ok: bool,
    y_min: Option<Vector>,
    y_max: Option<Vector>,
}

impl Bounds {
    pub fn delta(&self) -> &Vector {
        &self.delta
    }

    /// False means fixed points are impossible (k has a nonpositive
    /// component or some Δ_i < 0).
    pub fn necessary_ok(&self) -> bool {
        self.necessary_ok
    }

    pub fn y_min(&self) -> Option<&Vector> {
        self.y_min.as_ref()
    }

    pub fn y_max(&self) -> Option<&Vector> {
        self.y_max.as_ref()
    }
}

/// Computes Δ_i = k_i² − 4 M_ii exactly and, when 0 < k and 0 ≤ Δ, the
/// bracket endpoints y^min = (k − √Δ)/2, y^max = (k + √Δ)/2.
pub fn bounds(p: &Problem) -> Bounds {
    let n = p.dim();
    let k = p.offset();
    let delta: Vec<f64> = (0..n).map(|i| k[i] * k[i] - 4.0 * p.matrix().get(i, i)).collect();
    let ok = k.is_positive() && delta.iter().all(|d| *d >= 0.0);
    let delta = Vector::new(delta).expect("finite by construction");
    if !ok {
        return Bounds { delta, necessary_ok: false, y_min: None, y_max: None };
    }
    let y_min: Vec<f64> = (0..n).map(|i| (k[i] - delta[i].sqrt()) / 2.0).collect();
    let y_max: Vec<f64> = (0..n).map(|i| (k[i] + delta[i].sqrt()) / 2.0).collect();
    Bounds {
        delta,
        necessary_ok: true,
        y_min: Some(Vector::new(y_min).expect("finite")),
        y_max: Some(Vector::new(y_max).expect("finite")),
    }
}

/// Three-valued existence decision with witness data.
#[derive(Debug, Clone)]
pub enum ExistenceVerdict {
    /// A positive fixed point exists; `dominant` is the limit of the
    /// decision iteration (unpolished).
    Exists { dominant: PositiveVector },
    /// No positive fixed point. `witness_step` = −1 flags failed necessary
    /// conditions (the witness then carries Δ); otherwise the witness is
    /// the iterate that dropped below y^min or left the positive orthant.
    NotExists { witness_step: i64, witness: Vector },
    /// Budget exhausted before a verdict; the trace documents the run.
    Indeterminate { trace: IterationTrace },
}

/// Relative offset lifting the fallback start strictly above k when some
/// diagonal entry of M is zero.
const ZERO_DIAG_START_LIFT: f64 = 1e-9;

/// Decides whether the problem has a positive fixed point.
///
/// All diagonal entries positive: iterate from y^max; the trajectory is
/// antitone, every image must stay above y^min, and the first violation
/// certifies nonexistence. Some zero diagonal entry: iterate from
/// k·(1 + 1e−9); a domain exit certifies nonexistence. Convergence to a
/// positive limit certifies existence either way.
pub fn decide_existence(p: &Problem, tol: f64, budget: usize) -> Result<ExistenceVerdict> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { field: "tol".into(), reason: "must be > 0".into() });
    }
    if budget < 1 {
        return Err(Error::InvalidParameter { field: "budget".into(), reason: "must be >= 1".into() });
    }
    let b = bounds(p);
    if !b.necessary_ok() {
        return Ok(ExistenceVerdict::NotExists { witness_step: -1, witness: b.delta().clone() });
    }
    let n = p.dim();
    let all_diag_positive = (0..n).all(|i| p.matrix().get(i, i) > 0.0);

    if all_diag_positive {
        let y_min = b.y_min().expect("necessary_ok").clone();
        let y_max = b.y_max().expect("necessary_ok").clone();
        let start = y_max.clone().into_positive().expect("y_max > 0 when diag > 0");
        let mut current = start.clone();
        for step in 1..=budget {
            let next = match p.apply(&current) {
                Ok(v) => v,
                // overflow below y^min for sure; the last finite iterate is the witness
                Err(Error::NonFinite { .. }) => {
                    return Ok(ExistenceVerdict::NotExists {
                        witness_step: step as i64,
                        witness: current.as_vector().clone(),
                    })
                }
                Err(e) => return Err(e),
            };
            if !y_min.leq(&next)? {
                return Ok(ExistenceVerdict::NotExists { witness_step: step as i64, witness: next });
            }
            let moved = next.sup_distance(current.as_vector())?;
            // y^min > 0 here, so next is strictly positive
            current = next.into_positive().expect("bounded below by positive y_min");
            if moved < tol {
                return Ok(ExistenceVerdict::Exists { dominant: current });
            }
        }
        let trace = iterate(p, &start, tol, budget)?;
        Ok(ExistenceVerdict::Indeterminate { trace })
    } else {
        let k = p.offset();
        let start = PositiveVector::new(
            k.as_slice().iter().map(|x| x * (1.0 + ZERO_DIAG_START_LIFT)).collect(),
        )
        .expect("k > 0 when necessary_ok");
        let mut current = start.clone();
        for step in 1..=budget {
            let next = match p.apply(&current) {
                Ok(v) => v,
                Err(Error::NonFinite { .. }) => {
                    return Ok(ExistenceVerdict::NotExists {
                        witness_step: step as i64,
                        witness: current.as_vector().clone(),
                    })
                }
                Err(e) => return Err(e),
            };
            if !next.is_positive() {
                return Ok(ExistenceVerdict::NotExists { witness_step: step as i64, witness: next });
            }
            let moved = next.sup_distance(current.as_vector())?;
            current = next.into_positive().expect("checked positive");
            if moved < tol {
                return Ok(ExistenceVerdict::Exists { dominant: current });
            }
        }
        let trace = iterate(p, &start, tol, budget)?;
        Ok(ExistenceVerdict::Indeterminate { trace })
    }
}

/// Stability classification of the dominant fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    /// rho < 1: asymptotically stable for the fixed-point iteration.
    AsymptoticallyStable,
    /// |rho − 1| within the classification band.
    Marginal,
    /// rho > 1, which a certified dominant point never exhibits.
    Violation,
}

impl StabilityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityClass::AsymptoticallyStable => "asymptotically_stable",
            StabilityClass::Marginal => "marginal",
            StabilityClass::Violation => "violation",
        }
    }
}

/// The spectral radius rho(M diag(1/(y□ ∘ y□))) and its classification.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCertificate {
    pub rho: f64,
    pub classification: StabilityClass,
}

/// rho of the scaled matrix M diag(1/(y ∘ ybar)).
pub fn pair_spectral_radius(
    p: &Problem,
    y: &PositiveVector,
    ybar: &PositiveVector,
    tol: f64,
) -> Result<f64> {
    let scale = y.hadamard(ybar)?.reciprocal();
    p.matrix().scale_columns(&scale)?.spectral_radius(tol)
}

/// Certificate at a candidate fixed point, classified with the
/// [`CERT_CLASS_TOL`] band.
pub fn certificate(p: &Problem, point: &PositiveVector, tol: f64) -> Result<StabilityCertificate> {
    let rho = pair_spectral_radius(p, point, point, tol)?;
    let classification = if (rho - 1.0).abs() <= CERT_CLASS_TOL {
        StabilityClass::Marginal
    } else if rho < 1.0 {
        StabilityClass::AsymptoticallyStable
    } else {
        StabilityClass::Violation
    };
    Ok(StabilityCertificate { rho, classification })
}

/// Newton polishing of a near-root of F(y) = y − k + M(1/y).
///
/// The Jacobian is J_F = I − M diag(1/(y ∘ y)). Steps that would leave the
/// positive orthant or worsen the residual are discarded, so the result is
/// never worse than the input.
pub fn newton_polish(p: &Problem, start: &PositiveVector, max_steps: usize) -> PositiveVector {
    let n = p.dim();
    let mut best = start.clone();
    let mut best_res = p.residual(&best).unwrap_or(f64::INFINITY);
    let mut y = start.clone();
    for _ in 0..max_steps {
        if best_res < POLISH_RESIDUAL {
            break;
        }
        let t = match p.apply(&y) {
            Ok(t) => t,
            Err(_) => break,
        };
        let f: Vec<f64> = (0..n).map(|i| y[i] - t[i]).collect();
        let mut jac = nalgebra::DMatrix::<f64>::identity(n, n);
        for i in 0..n {
            for j in 0..n {
                jac[(i, j)] -= p.matrix().get(i, j) / (y[j] * y[j]);
            }
        }
        let rhs = nalgebra::DVector::from_iterator(n, f.iter().map(|x| -x));
        let step = match jac.lu().solve(&rhs) {
            Some(s) => s,
            None => break,
        };
        let candidate: Vec<f64> = (0..n).map(|i| y[i] + step[i]).collect();
        let candidate = match PositiveVector::new(candidate) {
            Ok(c) => c,
            Err(_) => break,
        };
        let res = p.residual(&candidate).unwrap_or(f64::INFINITY);
        if res < best_res {
            best = candidate.clone();
            best_res = res;
        }
        y = candidate;
    }
    best
}

/// Computes the dominant fixed point y□ with its stability certificate.
///
/// Re-verifies existence; the returned point is Newton-polished to a
/// residual below [`POLISH_RESIDUAL`] whenever the Jacobian allows. The
/// dominant point dominates every other fixed point componentwise.
pub fn dominant_fixed_point(
    p: &Problem,
    tol: f64,
    budget: usize,
) -> Result<(PositiveVector, StabilityCertificate)> {
    match decide_existence(p, tol, budget)? {
        ExistenceVerdict::Exists { dominant } => {
            let polished = newton_polish(p, &dominant, 50);
            let cert = certificate(p, &polished, crate::matrix::SPECTRAL_TOL)?;
            Ok((polished, cert))
        }
        ExistenceVerdict::NotExists { witness_step, witness } => {
            Err(Error::NoFixedPoint { step: witness_step, witness })
        }
        ExistenceVerdict::Indeterminate { .. } => Err(Error::Undecided),
    }
}

/// Order relation between two supplied fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOrder {
    Less,
    Greater,
    Incomparable,
    Equal,
}

impl PairOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            PairOrder::Less => "less",
            PairOrder::Greater => "greater",
            PairOrder::Incomparable => "incomparable",
            PairOrder::Equal => "equal",
        }
    }
}

fn classify_pair(a: &Vector, b: &Vector) -> Result<PairOrder> {
    Ok(if a == b {
        PairOrder::Equal
    } else if a.leq(b)? {
        PairOrder::Less
    } else if b.leq(a)? {
        PairOrder::Greater
    } else {
        PairOrder::Incomparable
    })
}

/// Spectral radius of M diag(1/(y_i ∘ y_j)) for one pair of points.
#[derive(Debug, Clone)]
pub struct PairRelation {
    pub i: usize,
    pub j: usize,
    pub rho: f64,
    pub order: PairOrder,
}

/// Pairwise and diagonal spectral data over a set of fixed points, with the
/// relations the theory demands checked against a tolerance.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub pairs: Vec<PairRelation>,
    pub self_rho: Vec<f64>,
    /// Index of the point dominating all others, when one exists.
    pub dominant: Option<usize>,
    /// Human-readable descriptions of violated relations (empty = all hold).
    pub violations: Vec<String>,
}

/// For every pair of distinct supplied fixed points computes
/// rho(M diag(1/(y ∘ ȳ))) and checks: rho >= 1 for every distinct pair;
/// rho = 1 (within tol) for comparable pairs; rho >= 1 at (y, y) for
/// non-dominant y; and, when M is irreducible with at least two points,
/// rho < 1 at the dominant and rho > 1 at every other point.
pub fn spectral_relations(
    p: &Problem,
    points: &[PositiveVector],
    tol: f64,
) -> Result<SpectralReport> {
    for (i, y) in points.iter().enumerate() {
        let res = p.residual(y)?;
        if !(res < tol) {
            return Err(Error::ResidualTooLarge { index: i, residual: res, tol });
        }
    }
    let spectral_tol = crate::matrix::SPECTRAL_TOL;
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let rho = pair_spectral_radius(p, &points[i], &points[j], spectral_tol)?;
            let order = classify_pair(points[i].as_vector(), points[j].as_vector())?;
            pairs.push(PairRelation { i, j, rho, order });
        }
    }
    let mut self_rho = Vec::with_capacity(points.len());
    for y in points {
        self_rho.push(pair_spectral_radius(p, y, y, spectral_tol)?);
    }
    let mut dominant = None;
    'outer: for (i, y) in points.iter().enumerate() {
        for z in points {
            if !z.as_vector().leq(y.as_vector())? {
                continue 'outer;
            }
        }
        dominant = Some(i);
        break;
    }

    let mut violations = Vec::new();
    for pr in &pairs {
        if pr.order != PairOrder::Equal && pr.rho < 1.0 - tol {
            violations.push(format!(
                "pair ({}, {}): rho = {} but distinct fixed points require rho >= 1",
                pr.i, pr.j, pr.rho
            ));
        }
        if matches!(pr.order, PairOrder::Less | PairOrder::Greater) && (pr.rho - 1.0).abs() > tol {
            violations.push(format!(
                "comparable pair ({}, {}): rho = {} but comparable fixed points require rho = 1",
                pr.i, pr.j, pr.rho
            ));
        }
    }
    for (i, rho) in self_rho.iter().enumerate() {
        if dominant != Some(i) && *rho < 1.0 - tol {
            violations.push(format!(
                "non-dominant point {i}: rho = {rho} but requires rho >= 1"
            ));
        }
    }
    if p.matrix().is_irreducible() && points.len() >= 2 {
        if let Some(d) = dominant {
            if self_rho[d] >= 1.0 {
                violations.push(format!(
                    "dominant point {d}: rho = {} but an irreducible system with two or more fixed points requires rho < 1",
                    self_rho[d]
                ));
            }
            for (i, rho) in self_rho.iter().enumerate() {
                if i != d && *rho <= 1.0 {
                    violations.push(format!(
                        "non-dominant point {i}: rho = {rho} but irreducibility requires rho > 1"
                    ));
                }
            }
        }
    }

    Ok(SpectralReport { pairs, self_rho, dominant, violations })
}

/// Solves through the irreducible normal form: blocks bottom-up, each with
/// its offset adjusted by the already-solved lower blocks, then un-permutes.
/// Works for irreducible M too (single block).
pub fn solve_reducible(p: &Problem, tol: f64, budget: usize) -> Result<PositiveVector> {
    let nf = p.matrix().normal_form();
    let kp = nf.permutation().permute(p.offset())?;
    let s = nf.block_count();
    let permuted = nf.permuted();

    let mut solved: Vec<Option<PositiveVector>> = vec![None; s];
    for b in (0..s).rev() {
        let range = nf.block_range(b);
        let mut adjusted: Vec<f64> = range.clone().map(|i| kp[i]).collect();
        for j in (b + 1)..s {
            let below = nf.block_range(j);
            let y_j = solved[j].as_ref().expect("solved bottom-up");
            let recip = y_j.reciprocal();
            for (bi, i) in range.clone().enumerate() {
                for (bj, jj) in below.clone().enumerate() {
                    adjusted[bi] -= permuted.get(i, jj) * recip[bj];
                }
            }
        }
        let adjusted = Vector::new(adjusted).map_err(|_| Error::BlockNoFixedPoint { block: b })?;
        let sub = Problem::new(adjusted, nf.diagonal_block(b))?;
        match dominant_fixed_point(&sub, tol, budget) {
            Ok((y, _)) => solved[b] = Some(y),
            Err(Error::NoFixedPoint { .. }) => return Err(Error::BlockNoFixedPoint { block: b }),
            Err(e) => return Err(e),
        }
    }

    let mut assembled = Vec::with_capacity(p.dim());
    for y in solved.into_iter() {
        assembled.extend_from_slice(y.expect("all blocks solved").as_slice());
    }
    let assembled = Vector::new(assembled)?;
    nf.permutation().unpermute(&assembled)?.into_positive()
}

/// Closed-form 1-D fixed points of T(y) = k − M/y, dominant first.
///
/// M = 0: {k} when k > 0, empty otherwise. M > 0: empty when k < 2√M,
/// otherwise {(k ± √(k² − 4M))/2} (a single double root at the boundary).
pub fn solve_1d(k: f64, m: f64) -> Vec<f64> {
    assert!(m >= 0.0 && m.is_finite(), "M must be finite and nonnegative");
    if m == 0.0 {
        return if k > 0.0 { vec![k] } else { vec![] };
    }
    let delta = k * k - 4.0 * m;
    if k <= 0.0 || delta < 0.0 {
        return vec![];
    }
    let hi = (k + delta.sqrt()) / 2.0;
    let lo = (k - delta.sqrt()) / 2.0;
    if hi == lo {
        vec![hi]
    } else {
        vec![hi, lo]
    }
}

/// Brute-force enumeration of all fixed points for n <= 3.
///
/// Samples the bracket box on a mid-cell lattice of `grid` points per axis
/// and runs Newton on F(y) = y − k + M(1/y) from each sample; positive
/// roots with residual below `tol` are kept and merged within
/// `100 · tol`. Results are sorted lexicographically descending, so a
/// dominant point comes first.
pub fn enumerate_small(p: &Problem, grid: usize, tol: f64) -> Result<Vec<PositiveVector>> {
    let n = p.dim();
    if n > ENUM_MAX_DIM {
        return Err(Error::UnsupportedSize { what: "enumerate_small", n, max: ENUM_MAX_DIM });
    }
    if grid < ENUM_GRID_MIN {
        return Err(Error::InvalidParameter {
            field: "grid".into(),
            reason: format!("must be >= {ENUM_GRID_MIN}"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { field: "tol".into(), reason: "must be > 0".into() });
    }
    let b = bounds(p);
    if !b.necessary_ok() {
        return Ok(Vec::new());
    }
    let y_min = b.y_min().expect("ok");
    let y_max = b.y_max().expect("ok");

    let mut roots: Vec<PositiveVector> = Vec::new();
    let mut dedup_push = |candidate: PositiveVector| {
        let radius = DEDUP_FACTOR * tol;
        for r in &roots {
            if r.as_vector().sup_distance(candidate.as_vector()).unwrap_or(f64::INFINITY) <= radius {
                return;
            }
        }
        roots.push(candidate);
    };

    let mut index = vec![0usize; n];
    loop {
        let start: Vec<f64> = (0..n)
            .map(|i| {
                let t = (index[i] as f64 + 0.5) / grid as f64;
                y_min[i] + t * (y_max[i] - y_min[i])
            })
            .collect();
        if let Ok(start) = PositiveVector::new(start) {
            let candidate = newton_polish(p, &start, 60);
            if p.residual(&candidate)? < tol {
                dedup_push(candidate);
            }
        }
        // odometer over the lattice
        let mut axis = 0;
        loop {
            if axis == n {
                break;
            }
            index[axis] += 1;
            if index[axis] < grid {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
        if axis == n {
            break;
        }
    }

    roots.sort_by(|a, b| {
        b.as_slice()
            .iter()
            .zip(a.as_slice())
            .map(|(x, y)| x.partial_cmp(y).expect("finite"))
            .find(|o| *o != std::cmp::Ordering::Equal)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

/// Where a start lands under the iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum BasinClass {
    ConvergesToDominant,
    ConvergesToOther { limit: Vector },
    Exits,
    Undecided,
}

impl BasinClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasinClass::ConvergesToDominant => "converges_to_dominant",
            BasinClass::ConvergesToOther { .. } => "converges_to_other",
            BasinClass::Exits => "exits",
            BasinClass::Undecided => "undecided",
        }
    }
}

/// Classifies starts against a dominant point computed once up front.
/// Probes are pure and independent, so a grid of them can fan out.
pub struct BasinProber<'a> {
    problem: &'a Problem,
    dominant: Option<PositiveVector>,
    tol: f64,
    budget: usize,
}

impl<'a> BasinProber<'a> {
    pub fn new(problem: &'a Problem, tol: f64, budget: usize) -> Result<Self> {
        let dominant = match dominant_fixed_point(problem, tol, budget) {
            Ok((y, _)) => Some(y),
            Err(Error::NoFixedPoint { .. }) | Err(Error::Undecided) => None,
            Err(e) => return Err(e),
        };
        Ok(BasinProber { problem, dominant, tol, budget })
    }

    pub fn dominant(&self) -> Option<&PositiveVector> {
        self.dominant.as_ref()
    }

    /// Runs the iteration from `y0` and classifies the outcome. A converged
    /// limit within `1e3 · tol` of the dominant point counts as dominant.
    pub fn probe(&self, y0: &PositiveVector) -> Result<(BasinClass, usize)> {
        let trace = iterate(self.problem, y0, self.tol, self.budget)?;
        let steps = trace.total_steps();
        let class = match trace.status() {
            TraceStatus::Converged { limit } => match &self.dominant {
                Some(d)
                    if limit.sup_distance(d.as_vector())? <= BASIN_MATCH_FACTOR * self.tol =>
                {
                    BasinClass::ConvergesToDominant
                }
                _ => BasinClass::ConvergesToOther { limit: limit.clone() },
            },
            TraceStatus::DomainExit { .. } => BasinClass::Exits,
            TraceStatus::BudgetExhausted => BasinClass::Undecided,
        };
        Ok((class, steps))
    }
}

/// One-off probe; computes the dominant point internally.
pub fn basin_probe(p: &Problem, y0: &PositiveVector, tol: f64, budget: usize) -> Result<BasinClass> {
    Ok(BasinProber::new(p, tol, budget)?.probe(y0)?.0)
}
