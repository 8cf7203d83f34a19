//! Construction of problems from physical circuit descriptions.
//!
//! The two-CPL ladder: a source E feeds two constant-power loads P1, P2
//! through line resistances r1, r2. Its steady states solve
//! y = (E, E) - [[r1 P1, r1 P2], [r1 P1, (r1+r2) P2]] (1/y). The general
//! form takes an impedance matrix M̄ and load powers P, assembling
//! M = M̄ diag(P).

use crate::error::{Error, Result};
use crate::iteration::Problem;
use crate::matrix::NonnegMatrix;
use crate::order::Vector;

fn require_positive(field: &str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter {
            field: field.into(),
            reason: format!("must be a positive finite number, got {value}"),
        });
    }
    Ok(())
}

/// Builds the two-CPL ladder problem: k = (E, E),
/// M = [[r1·P1, r1·P2], [r1·P1, (r1+r2)·P2]].
pub fn build_two_cpl(e: f64, r1: f64, r2: f64, p1: f64, p2: f64) -> Result<Problem> {
    require_positive("E", e)?;
    require_positive("r1", r1)?;
    require_positive("r2", r2)?;
    require_positive("P1", p1)?;
    require_positive("P2", p2)?;
    let m = NonnegMatrix::from_rows(vec![
        vec![r1 * p1, r1 * p2],
        vec![r1 * p1, (r1 + r2) * p2],
    ])?;
    Problem::new(Vector::new(vec![e, e])?, m)
}

/// Builds a problem from M̄, load powers P, and offset k with
/// M = M̄ diag(P) (column j of M̄ scaled by P_j). The assembled M must be
/// nonnegative; a negative entry is rejected.
pub fn build_general(mbar: &[Vec<f64>], powers: &Vector, k: Vector) -> Result<Problem> {
    let n = mbar.len();
    if n == 0 {
        return Err(Error::InvalidParameter {
            field: "Mbar".into(),
            reason: "must have at least one row".into(),
        });
    }
    if powers.dim() != n {
        return Err(Error::InvalidParameter {
            field: "P".into(),
            reason: format!("expected {n} entries, got {}", powers.dim()),
        });
    }
    if k.dim() != n {
        return Err(Error::InvalidParameter {
            field: "k".into(),
            reason: format!("expected {n} entries, got {}", k.dim()),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for (i, row) in mbar.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidParameter {
                field: "Mbar".into(),
                reason: format!("row {i} has {} entries, expected {n}", row.len()),
            });
        }
        let scaled: Vec<f64> = row.iter().zip(powers.iter()).map(|(m, p)| m * p).collect();
        rows.push(scaled);
    }
    let m = NonnegMatrix::from_rows(rows).map_err(|e| match e {
        Error::NegativeEntry { row, col, value } => Error::InvalidParameter {
            field: "Mbar".into(),
            reason: format!(
                "assembled M has negative entry ({row},{col}) = {value}; M must be nonnegative"
            ),
        },
        other => other,
    })?;
    Problem::new(k, m)
}

/// A circuit description: either the two-CPL ladder (E, r_1, r_2, P_1, P_2)
/// or, when `mbar` and `offset` are both given, the general M̄ diag(P) form.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub source_voltage: f64,
    pub resistances: Vec<f64>,
    pub powers: Vec<f64>,
    pub mbar: Option<Vec<Vec<f64>>>,
    pub offset: Option<Vec<f64>>,
}

impl CircuitSpec {
    /// Two-CPL ladder description.
    pub fn two_cpl(e: f64, r1: f64, r2: f64, p1: f64, p2: f64) -> Self {
        CircuitSpec {
            source_voltage: e,
            resistances: vec![r1, r2],
            powers: vec![p1, p2],
            mbar: None,
            offset: None,
        }
    }

    pub fn build(&self) -> Result<Problem> {
        if let (Some(mbar), Some(k)) = (&self.mbar, &self.offset) {
            let powers = Vector::new(self.powers.clone()).map_err(|_| Error::InvalidParameter {
                field: "P".into(),
                reason: "must be a non-empty list of finite numbers".into(),
            })?;
            return build_general(mbar, &powers, Vector::new(k.clone())?);
        }
        if self.resistances.len() != 2 || self.powers.len() != 2 {
            return Err(Error::InvalidParameter {
                field: "circuit".into(),
                reason: format!(
                    "the ladder form takes exactly 2 resistances and 2 powers, got {} and {}",
                    self.resistances.len(),
                    self.powers.len()
                ),
            });
        }
        build_two_cpl(
            self.source_voltage,
            self.resistances[0],
            self.resistances[1],
            self.powers[0],
            self.powers[1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cpl_case_i_matrix() {
        let p = build_two_cpl(24.0, 0.04, 0.06, 500.0, 450.0).unwrap();
        assert_eq!(p.offset().as_slice(), &[24.0, 24.0]);
        let m = p.matrix();
        assert_eq!(
            [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)],
            [20.0, 18.0, 20.0, 45.0]
        );
    }

    #[test]
    fn two_cpl_case_ii_matrix() {
        let p = build_two_cpl(24.0, 0.04, 0.06, 3000.0, 1000.0).unwrap();
        let m = p.matrix();
        assert_eq!(
            [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)],
            [120.0, 40.0, 120.0, 100.0]
        );
    }

    #[test]
    fn two_cpl_symmetric_limit_is_rank_one() {
        // equal powers with a vanishing second resistance
        let p = build_two_cpl(10.0, 0.5, 1e-12, 8.0, 8.0).unwrap();
        let m = p.matrix();
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(0, 1), 4.0);
        assert_eq!(m.get(1, 0), 4.0);
        assert!((m.get(1, 1) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn two_cpl_rejects_nonpositive_parameters_by_name() {
        for (field, args) in [
            ("E", (0.0, 1.0, 1.0, 1.0, 1.0)),
            ("r1", (1.0, -1.0, 1.0, 1.0, 1.0)),
            ("r2", (1.0, 1.0, 0.0, 1.0, 1.0)),
            ("P1", (1.0, 1.0, 1.0, 0.0, 1.0)),
            ("P2", (1.0, 1.0, 1.0, 1.0, -3.0)),
        ] {
            match build_two_cpl(args.0, args.1, args.2, args.3, args.4) {
                Err(Error::InvalidParameter { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected {field} rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn general_identity_times_unit_powers() {
        let p = build_general(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &Vector::new(vec![1.0, 1.0]).unwrap(),
            Vector::new(vec![5.0, 5.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(p.matrix(), &NonnegMatrix::identity(2).unwrap());
    }

    #[test]
    fn general_reproduces_two_cpl_exactly() {
        let (e, r1, r2, p1, p2) = (24.0, 0.04, 0.06, 500.0, 450.0);
        let ladder = build_two_cpl(e, r1, r2, p1, p2).unwrap();
        let general = build_general(
            &[vec![r1, r1], vec![r1, r1 + r2]],
            &Vector::new(vec![p1, p2]).unwrap(),
            Vector::new(vec![e, e]).unwrap(),
        )
        .unwrap();
        assert_eq!(ladder, general);
    }

    #[test]
    fn general_rejects_negative_assembled_entries() {
        let err = build_general(
            &[vec![1.0, -0.5], vec![0.0, 1.0]],
            &Vector::new(vec![1.0, 2.0]).unwrap(),
            Vector::new(vec![5.0, 5.0]).unwrap(),
        );
        match err {
            Err(Error::InvalidParameter { field, reason }) => {
                assert_eq!(field, "Mbar");
                assert!(reason.contains("nonnegative"));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn general_power_scaling_scales_columns() {
        let mbar = vec![vec![1.5, 2.0], vec![0.25, 3.0]];
        let k = Vector::new(vec![5.0, 5.0]).unwrap();
        let base = build_general(&mbar, &Vector::new(vec![1.0, 3.0]).unwrap(), k.clone()).unwrap();
        // doubling P doubles every column exactly (dyadic factor)
        let scaled =
            build_general(&mbar, &Vector::new(vec![2.0, 6.0]).unwrap(), k).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(scaled.matrix().get(i, j), 2.0 * base.matrix().get(i, j));
            }
        }
    }

    #[test]
    fn circuit_spec_dispatches() {
        let ladder = CircuitSpec::two_cpl(24.0, 0.04, 0.06, 500.0, 450.0);
        assert_eq!(
            ladder.build().unwrap(),
            build_two_cpl(24.0, 0.04, 0.06, 500.0, 450.0).unwrap()
        );
        let general = CircuitSpec {
            source_voltage: 0.0,
            resistances: vec![],
            powers: vec![1.0, 1.0],
            mbar: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            offset: Some(vec![5.0, 5.0]),
        };
        assert!(general.build().is_ok());
        let bad = CircuitSpec {
            source_voltage: 10.0,
            resistances: vec![1.0],
            powers: vec![1.0, 1.0],
            mbar: None,
            offset: None,
        };
        assert!(bad.build().is_err());
    }
}
