//! The map T(y) = k - M(1/y) and its fixed-point iteration sequences.
//!
//! An iteration run records the sequence y_{r+1} = T(y_r) together with its
//! terminal status and a monotonicity classification. The sequence leaves
//! the domain as soon as an iterate has a component <= 0 (the positive
//! orthant is open), which makes the run finite.

use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;
use crate::order::{PositiveVector, Vector};

/// Default convergence tolerance on the sup-norm of successive differences.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default iteration budget.
pub const DEFAULT_BUDGET: usize = 10_000;
/// Default cap on fully recorded iterates; past it only every 10th iterate
/// plus the final two are retained.
pub const DEFAULT_RECORD_CAP: usize = 1_000;

/// The pair (k, M) defining T(y) = k - M(1/y) on the positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    offset: Vector,
    matrix: NonnegMatrix,
}

impl Problem {
    pub fn new(offset: Vector, matrix: NonnegMatrix) -> Result<Self> {
        if offset.dim() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                found: offset.dim(),
            });
        }
        Ok(Problem { offset, matrix })
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn matrix(&self) -> &NonnegMatrix {
        &self.matrix
    }

    /// Evaluates T(y) = k - M(1/y). The image lies in R^n: it may well have
    /// nonpositive components. Overflow to non-finite values is an error the
    /// iteration engine converts into a domain exit.
    pub fn apply(&self, y: &PositiveVector) -> Result<Vector> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.dim() });
        }
        let my = self.matrix.mul_slice(y.reciprocal().as_slice());
        let out: Vec<f64> = self
            .offset
            .iter()
            .zip(&my)
            .map(|(k, m)| k - m)
            .collect();
        Vector::new(out)
    }

    /// Sup-norm fixed-point residual `max_i |y_i - T(y)_i|`; infinite when
    /// T(y) overflows.
    pub fn residual(&self, y: &PositiveVector) -> Result<f64> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.dim() });
        }
        match self.apply(y) {
            Ok(t) => y.as_vector().sup_distance(&t),
            Err(Error::NonFinite { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }
}

/// Terminal status of a recorded iteration run.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceStatus {
    /// Successive difference dropped below tolerance; `limit` is the last
    /// iterate.
    Converged { limit: Vector },
    /// The iterate at `step` left the positive orthant (some component <= 0),
    /// or evaluating that step overflowed to a non-finite value.
    DomainExit { step: usize },
    /// Budget ran out with no verdict.
    BudgetExhausted,
}

/// Monotonicity of the whole recorded sequence under the componentwise
/// order, classified over every consecutive pair. Classification precedence
/// is strict classes first; a constant sequence classifies `Isotone`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    StronglyIsotone,
    Isotone,
    StronglyAntitone,
    Antitone,
    NonMonotone,
}

impl Monotonicity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Monotonicity::StronglyIsotone => "strongly_isotone",
            Monotonicity::Isotone => "isotone",
            Monotonicity::StronglyAntitone => "strongly_antitone",
            Monotonicity::Antitone => "antitone",
            Monotonicity::NonMonotone => "non_monotone",
        }
    }
}

/// A recorded fixed-point iteration sequence.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    start: PositiveVector,
    records: Vec<(usize, Vector)>,
    status: TraceStatus,
    monotonicity: Monotonicity,
    total_steps: usize,
}

impl IterationTrace {
    pub fn start(&self) -> &PositiveVector {
        &self.start
    }

    /// Recorded iterates as (step, value) pairs in increasing step order.
    /// All steps are present up to the record cap; beyond it every 10th
    /// step plus the final two are kept.
    pub fn records(&self) -> &[(usize, Vector)] {
        &self.records
    }

    pub fn status(&self) -> &TraceStatus {
        &self.status
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    /// Number of applications of T performed.
    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn last(&self) -> &(usize, Vector) {
        self.records.last().expect("trace holds at least the start")
    }
}

/// Knobs for the iteration engine.
#[derive(Debug, Clone, Copy)]
pub struct IterationSettings {
    pub tol: f64,
    pub budget: usize,
    pub record_cap: usize,
}

impl Default for IterationSettings {
    fn default() -> Self {
        IterationSettings {
            tol: DEFAULT_TOL,
            budget: DEFAULT_BUDGET,
            record_cap: DEFAULT_RECORD_CAP,
        }
    }
}

impl IterationSettings {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                field: "tol".into(),
                reason: "must be > 0".into(),
            });
        }
        if self.budget < 1 {
            return Err(Error::InvalidParameter {
                field: "budget".into(),
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// Tracks monotonicity flags across consecutive iterate pairs.
#[derive(Debug, Clone, Copy)]
struct MonotoneFlags {
    pairs: usize,
    all_le: bool,
    all_ge: bool,
    all_lt: bool,
    all_gt: bool,
}

impl MonotoneFlags {
    fn new() -> Self {
        MonotoneFlags { pairs: 0, all_le: true, all_ge: true, all_lt: true, all_gt: true }
    }

    fn update(&mut self, prev: &Vector, next: &Vector) {
        self.pairs += 1;
        let le = next.leq(prev).expect("equal dims");
        let ge = prev.leq(next).expect("equal dims");
        let lt = next.lt_strict(prev).expect("equal dims");
        let gt = prev.lt_strict(next).expect("equal dims");
        self.all_le &= le;
        self.all_ge &= ge;
        self.all_lt &= lt;
        self.all_gt &= gt;
    }

    fn classify(&self) -> Monotonicity {
        if self.pairs > 0 && self.all_gt {
            Monotonicity::StronglyIsotone
        } else if self.pairs > 0 && self.all_lt {
            Monotonicity::StronglyAntitone
        } else if self.all_ge {
            Monotonicity::Isotone
        } else if self.all_le {
            Monotonicity::Antitone
        } else {
            Monotonicity::NonMonotone
        }
    }
}

/// Runs the fixed-point iteration from `y0` with default record retention.
pub fn iterate(p: &Problem, y0: &PositiveVector, tol: f64, budget: usize) -> Result<IterationTrace> {
    iterate_with(p, y0, IterationSettings { tol, budget, record_cap: DEFAULT_RECORD_CAP })
}

/// Runs the fixed-point iteration from `y0`.
///
/// Stops with `DomainExit` at the first iterate with a component <= 0 (that
/// iterate is recorded last) or when evaluating T overflows; stops with
/// `Converged` when the sup-norm step drops below `tol`; otherwise exhausts
/// the budget. Monotonicity is classified over all consecutive pairs.
pub fn iterate_with(
    p: &Problem,
    y0: &PositiveVector,
    settings: IterationSettings,
) -> Result<IterationTrace> {
    settings.validate()?;
    if y0.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: y0.dim() });
    }

    let mut records: Vec<(usize, Vector)> = vec![(0, y0.as_vector().clone())];
    let keep = |step: usize| step <= settings.record_cap || step % 10 == 0;

    let mut flags = MonotoneFlags::new();
    let mut prev_pair: Option<(usize, Vector)> = None; // second-to-last iterate
    let mut current = y0.clone();
    let mut current_step = 0usize;

    let status = loop {
        let step = current_step + 1;
        let next = match p.apply(&current) {
            Ok(v) => v,
            Err(Error::NonFinite { .. }) => break TraceStatus::DomainExit { step },
            Err(e) => return Err(e),
        };
        flags.update(current.as_vector(), &next);

        prev_pair = Some((current_step, current.as_vector().clone()));
        if keep(step) {
            records.push((step, next.clone()));
        }
        current_step = step;

        if !next.is_positive() {
            if !keep(step) {
                records.push((step, next.clone()));
            }
            break TraceStatus::DomainExit { step };
        }
        let moved = next.sup_distance(current.as_vector())?;
        let next_pos = PositiveVector::new(next.into_vec()).expect("checked positive");
        if moved < settings.tol {
            current = next_pos;
            break TraceStatus::Converged { limit: current.as_vector().clone() };
        }
        current = next_pos;
        if step >= settings.budget {
            break TraceStatus::BudgetExhausted;
        }
    };

    // Make sure the last two computed iterates are present.
    if let Some((s, v)) = prev_pair {
        ensure_recorded(&mut records, s, v);
    }
    ensure_recorded(&mut records, current_step, current.as_vector().clone());

    Ok(IterationTrace {
        start: y0.clone(),
        records,
        status,
        monotonicity: flags.classify(),
        total_steps: current_step,
    })
}

fn ensure_recorded(records: &mut Vec<(usize, Vector)>, step: usize, value: Vector) {
    match records.binary_search_by_key(&step, |(s, _)| *s) {
        Ok(_) => {}
        Err(pos) => records.insert(pos, (step, value)),
    }
}

/// Runs both sequences side by side for `steps` applications and reports
/// whether y_r <= z_r held at every step where both stayed in the domain.
/// Requires y0 <= z0.
pub fn order_preservation_check(
    p: &Problem,
    y0: &PositiveVector,
    z0: &PositiveVector,
    steps: usize,
) -> Result<bool> {
    if !y0.as_vector().leq(z0.as_vector())? {
        return Err(Error::InvalidParameter {
            field: "y0".into(),
            reason: "must satisfy y0 <= z0 componentwise".into(),
        });
    }
    let mut y = y0.clone();
    let mut z = z0.clone();
    for _ in 0..steps {
        let ny = p.apply(&y)?;
        let nz = p.apply(&z)?;
        if !ny.leq(&nz)? {
            return Ok(false);
        }
        match (ny.into_positive(), nz.into_positive()) {
            (Ok(a), Ok(b)) => {
                y = a;
                z = b;
            }
            _ => return Ok(true), // a sequence left the domain; comparison held so far
        }
    }
    Ok(true)
}
