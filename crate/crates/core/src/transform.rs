//! Signed subset convolutions: the brute-force interval sum and the
//! `O(n 2^n)` in-place transforms it certifies.
//!
//! Every fast path here factors into independent 2x2 updates, one per bit
//! position, so the kernels are generic over the scalar: `f64` for lattice
//! functions, `i64` for exact operator matrices.

use crate::function::{LatticeFunction, SignConvention};
use crate::mask::{check_mask, geodesic_interval, LatticeError, Mask};
use std::ops::{Add, Neg, Sub};

/// Which end of the lattice anchors the convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Sum over subsets of the argument (reference: empty set).
    Down,
    /// Sum over supersets of the argument (reference: full set).
    Up,
}

pub(crate) trait Cell: Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {}
impl<T: Copy + Add<Output = T> + Sub<Output = T> + Neg<Output = T>> Cell for T {}

fn subset_sums<T: Cell>(w: &mut [T]) {
    let len = w.len();
    let mut bit = 1;
    while bit < len {
        for m in 0..len {
            if m & bit != 0 {
                w[m] = w[m] + w[m ^ bit];
            }
        }
        bit <<= 1;
    }
}

fn superset_sums<T: Cell>(w: &mut [T]) {
    let len = w.len();
    let mut bit = 1;
    while bit < len {
        for m in 0..len {
            if m & bit == 0 {
                w[m] = w[m] + w[m | bit];
            }
        }
        bit <<= 1;
    }
}

fn negate_odd_cardinality<T: Cell>(w: &mut [T]) {
    for (m, v) in w.iter_mut().enumerate() {
        if m.count_ones() % 2 == 1 {
            *v = -*v;
        }
    }
}

fn negate_all<T: Cell>(w: &mut [T]) {
    for v in w.iter_mut() {
        *v = -*v;
    }
}

/// In-place signed transform. The sign of each convention is folded into a
/// parity pre-pass, the plain subset/superset dynamic program runs, and a
/// post-pass restores the convention's global or argument-dependent factor.
pub(crate) fn signed_transform_in_place<T: Cell>(
    w: &mut [T],
    n: usize,
    direction: Direction,
    convention: SignConvention,
) {
    negate_odd_cardinality(w);
    match direction {
        Direction::Down => subset_sums(w),
        Direction::Up => superset_sums(w),
    }
    match convention {
        SignConvention::SizeParity => negate_all(w),
        SignConvention::CodimParity => {
            if n % 2 == 1 {
                negate_all(w);
            }
        }
        SignConvention::PlainMobius => negate_odd_cardinality(w),
    }
}

/// In-place reference-anchored transform with codimension-parity signs.
/// Bits of `reference` run the superset-type 2x2 block `[[-1,1],[0,1]]`,
/// the remaining bits the subset-type block `[[-1,0],[-1,1]]`; both blocks
/// square to the identity, so the whole transform is an involution.
pub(crate) fn interval_transform_in_place<T: Cell>(w: &mut [T], reference: Mask) {
    let len = w.len();
    let mut bit = 1usize;
    while bit < len {
        let anchored_up = reference & (bit as Mask) != 0;
        for m in 0..len {
            if m & bit == 0 {
                let z = w[m];
                let o = w[m | bit];
                if anchored_up {
                    w[m] = o - z;
                } else {
                    w[m] = -z;
                    w[m | bit] = o - z;
                }
            }
        }
        bit <<= 1;
    }
}

/// Brute-force signed sum over the geodesic interval between `tau` and
/// `reference`. This is the oracle every fast transform is checked against.
pub fn naive_convolve(
    f: &LatticeFunction,
    tau: Mask,
    reference: Mask,
    convention: SignConvention,
) -> Result<f64, LatticeError> {
    check_mask(tau, f.n)?;
    check_mask(reference, f.n)?;
    let mut acc = 0.0;
    for zeta in geodesic_interval(tau, reference) {
        let w = convention.weight(zeta, tau, f.n);
        if w > 0 {
            acc += f.value(zeta);
        } else {
            acc -= f.value(zeta);
        }
    }
    Ok(acc)
}

/// Fast signed transform of a whole lattice function; matches
/// [`naive_convolve`] with reference `0` (down) or the full set (up) at every
/// mask.
pub fn fast_signed_transform(
    f: &LatticeFunction,
    direction: Direction,
    convention: SignConvention,
) -> LatticeFunction {
    let mut values = f.values.clone();
    signed_transform_in_place(&mut values, f.n, direction, convention);
    LatticeFunction {
        n: f.n,
        labels: f.labels.clone(),
        role: f.role.clone(),
        values,
    }
}

/// Fast reference-anchored transform; matches [`naive_convolve`] with the
/// given reference under [`SignConvention::CodimParity`] at every mask.
pub fn interval_transform(
    f: &LatticeFunction,
    reference: Mask,
) -> Result<LatticeFunction, LatticeError> {
    check_mask(reference, f.n)?;
    let mut values = f.values.clone();
    interval_transform_in_place(&mut values, reference);
    Ok(LatticeFunction {
        n: f.n,
        labels: f.labels.clone(),
        role: f.role.clone(),
        values,
    })
}
