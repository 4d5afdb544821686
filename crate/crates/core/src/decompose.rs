//! Splitting the whole-lattice convolution across hypercube faces.
//!
//! Fixing an axis splits the `n`-cube into two `(n-1)`-cube faces, and the
//! signed sum over the whole lattice splits into the two face sums under a
//! single ambient sign convention. Each face sum is itself expressible as a
//! reference-anchored operator term in `2^(n-1)` ways: any face vertex may
//! serve as the reference, paired with its face-opposite vertex as the
//! argument.

use crate::function::LatticeFunction;
use crate::mask::{full_mask, LatticeError, Mask};
use crate::transform::naive_convolve;
use crate::SignConvention;
use serde::Serialize;

/// One way of writing a face sum as a reference-anchored operator term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitExpression {
    /// Reference vertex anchoring the operator.
    pub reference: Mask,
    /// Argument vertex; the geodesic interval between the two spans the face.
    pub argument: Mask,
}

/// A face of an axis split together with all its operator expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceTerm {
    /// Whether the split axis bit is set on this face.
    pub axis_bit_set: bool,
    /// Bottom vertex of the face.
    pub bottom: Mask,
    /// Top vertex of the face.
    pub top: Mask,
    /// The `2^(n-1)` equivalent operator expressions for the face sum.
    pub expressions: Vec<SplitExpression>,
}

/// One axis split of the `n`-cube into two `(n-1)`-cube faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionSpec {
    pub n: usize,
    /// Variable index whose bit separates the two faces.
    pub split_axis: usize,
    /// The two faces: axis bit clear first, then axis bit set.
    pub faces: [FaceTerm; 2],
}

impl DecompositionSpec {
    /// Count of distinct single-level operator expressions this split yields.
    pub fn expression_count(&self) -> u64 {
        self.faces
            .iter()
            .map(|f| f.expressions.len() as u64)
            .product()
    }
}

fn face_term(n: usize, axis: usize, axis_bit_set: bool) -> FaceTerm {
    let axis_mask = 1u32 << axis;
    let rest = full_mask(n) ^ axis_mask;
    let base = if axis_bit_set { axis_mask } else { 0 };
    let mut expressions = Vec::new();
    // Submasks of `rest` in increasing order.
    let mut s: Mask = 0;
    loop {
        expressions.push(SplitExpression {
            reference: base | s,
            argument: base | (rest ^ s),
        });
        s = s.wrapping_sub(rest) & rest;
        if s == 0 {
            break;
        }
    }
    FaceTerm {
        axis_bit_set,
        bottom: base,
        top: base | rest,
        expressions,
    }
}

/// Enumerates every axis split of the `n`-cube, `2 <= n <= 6`.
pub fn enumerate_cube_splits(n: usize) -> Result<Vec<DecompositionSpec>, LatticeError> {
    if !(2..=6).contains(&n) {
        return Err(LatticeError::SizeOutOfRange { n, min: 2, max: 6 });
    }
    Ok((0..n)
        .map(|axis| DecompositionSpec {
            n,
            split_axis: axis,
            faces: [face_term(n, axis, false), face_term(n, axis, true)],
        })
        .collect())
}

fn checked_pow(base: u128, exp: u32, n: usize) -> Result<u128, LatticeError> {
    base.checked_pow(exp)
        .ok_or(LatticeError::CountOverflow { n })
}

/// Closed-form count of recursive decompositions of the full `n`-cube
/// convolution: `3^(2^(n-2) - 1) * 4^(2^(n-2))`. Overflow is an error, never
/// a wrap.
pub fn decomposition_count_formula(n: usize) -> Result<u128, LatticeError> {
    if n < 2 {
        return Err(LatticeError::SizeOutOfRange { n, min: 2, max: 31 });
    }
    let e = u32::try_from(1u64 << (n - 2)).map_err(|_| LatticeError::CountOverflow { n })?;
    let threes = checked_pow(3, e - 1, n)?;
    let fours = checked_pow(4, e, n)?;
    threes
        .checked_mul(fours)
        .ok_or(LatticeError::CountOverflow { n })
}

/// Recursive decomposition count with a fixed branching of three splits at
/// every level, squares contributing four expressions each. Agrees with
/// [`decomposition_count_formula`].
pub fn fixed_split_recurrence_count(n: usize) -> Result<u128, LatticeError> {
    if n < 2 {
        return Err(LatticeError::SizeOutOfRange { n, min: 2, max: 31 });
    }
    let mut count: u128 = 4;
    for level in 3..=n {
        count = count
            .checked_mul(count)
            .and_then(|c| c.checked_mul(3))
            .ok_or(LatticeError::CountOverflow { n: level })?;
    }
    Ok(count)
}

/// Recursive decomposition count where a `k`-cube actually offers `k` axis
/// splits rather than a fixed three. Coincides with the fixed-branching count
/// at `n = 3` and diverges from it at `n >= 4`.
pub fn axis_split_recurrence_count(n: usize) -> Result<u128, LatticeError> {
    if n < 2 {
        return Err(LatticeError::SizeOutOfRange { n, min: 2, max: 31 });
    }
    let mut count: u128 = 4;
    for level in 3..=n {
        count = count
            .checked_mul(count)
            .and_then(|c| c.checked_mul(level as u128))
            .ok_or(LatticeError::CountOverflow { n: level })?;
    }
    Ok(count)
}

/// Evaluates one face term of a split on a concrete lattice function, under
/// the ambient codimension-parity signs.
pub fn face_sum(
    f: &LatticeFunction,
    expression: &SplitExpression,
) -> Result<f64, LatticeError> {
    naive_convolve(
        f,
        expression.argument,
        expression.reference,
        SignConvention::CodimParity,
    )
}

/// Largest deviation between the whole-lattice signed sum and the two face
/// sums, over every pair of face expressions of the split.
pub fn split_residual(f: &LatticeFunction, spec: &DecompositionSpec) -> Result<f64, LatticeError> {
    let whole = naive_convolve(f, f.full(), 0, SignConvention::CodimParity)?;
    let mut worst = 0.0f64;
    for lower in &spec.faces[0].expressions {
        let low = face_sum(f, lower)?;
        for upper in &spec.faces[1].expressions {
            let up = face_sum(f, upper)?;
            worst = worst.max((whole - (low + up)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_counts_per_width() {
        assert_eq!(enumerate_cube_splits(2).unwrap().len(), 2);
        assert_eq!(enumerate_cube_splits(3).unwrap().len(), 3);
        assert!(enumerate_cube_splits(1).is_err());
        assert!(enumerate_cube_splits(7).is_err());
    }

    #[test]
    fn three_cube_has_48_single_level_expressions() {
        let splits = enumerate_cube_splits(3).unwrap();
        let total: u64 = splits.iter().map(DecompositionSpec::expression_count).sum();
        assert_eq!(total, 48);
        for spec in &splits {
            for face in &spec.faces {
                assert_eq!(face.expressions.len(), 4);
            }
        }
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(decomposition_count_formula(2).unwrap(), 4);
        assert_eq!(decomposition_count_formula(3).unwrap(), 48);
        assert_eq!(decomposition_count_formula(4).unwrap(), 6912);
        assert_eq!(decomposition_count_formula(5).unwrap(), 143_327_232);
    }

    #[test]
    fn recurrences_match_and_diverge_where_expected() {
        for n in 2..=7 {
            assert_eq!(
                fixed_split_recurrence_count(n).unwrap(),
                decomposition_count_formula(n).unwrap()
            );
        }
        assert_eq!(axis_split_recurrence_count(3).unwrap(), 48);
        assert_eq!(axis_split_recurrence_count(4).unwrap(), 9216);
        assert_ne!(
            axis_split_recurrence_count(4).unwrap(),
            fixed_split_recurrence_count(4).unwrap()
        );
    }

    #[test]
    fn overflow_is_detected_not_wrapped() {
        assert!(decomposition_count_formula(7).is_ok());
        assert_eq!(
            decomposition_count_formula(8),
            Err(LatticeError::CountOverflow { n: 8 })
        );
        assert!(fixed_split_recurrence_count(8).is_err());
    }

    #[test]
    fn every_expression_pair_reassembles_the_whole_sum() {
        for n in 2..=4usize {
            let f = LatticeFunction::random(n, 500 + n as u64).unwrap();
            for spec in enumerate_cube_splits(n).unwrap() {
                assert!(split_residual(&f, &spec).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn literal_three_variable_split_instance() {
        // Splitting on the middle variable: the whole-cube sum equals the
        // upper-face sum anchored at {2} plus the lower-face sum over the
        // {1,3} face, all under the ambient sign convention.
        for seed in 0..20 {
            let f = LatticeFunction::random(3, 900 + seed).unwrap();
            let whole = naive_convolve(&f, 0b111, 0, SignConvention::CodimParity).unwrap();
            let upper = naive_convolve(&f, 0b111, 0b010, SignConvention::CodimParity).unwrap();
            let lower = naive_convolve(&f, 0b101, 0, SignConvention::CodimParity).unwrap();
            assert!((whole - (upper + lower)).abs() < 1e-12);
        }
    }

    #[test]
    fn face_expressions_all_denote_the_same_interval_sum() {
        let f = LatticeFunction::random(3, 77).unwrap();
        for spec in enumerate_cube_splits(3).unwrap() {
            for face in &spec.faces {
                let first = face_sum(&f, &face.expressions[0]).unwrap();
                for expr in &face.expressions {
                    assert!((face_sum(&f, expr).unwrap() - first).abs() < 1e-12);
                }
            }
        }
    }
}
