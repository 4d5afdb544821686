//! Subset masks: the elements of the Boolean lattice.
//!
//! A subset of `n` variables is packed into the low bits of a `u32`; bit `i`
//! set means variable `i` is a member. Mask `0` is the empty set and
//! `full_mask(n)` is the whole variable set. The lattice order is bitwise
//! inclusion.

use thiserror::Error;

/// A subset of lattice variables encoded as a bitmask.
pub type Mask = u32;

/// Hard ceiling on lattice width imposed by the `u32` mask encoding.
pub const MAX_LATTICE_BITS: usize = 31;

/// Errors raised by lattice-level operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("mask {mask:#b} is out of range for a {n}-variable lattice")]
    MaskOutOfRange { mask: Mask, n: usize },
    #[error("mask {sub:#b} is not a subset of {sup:#b}")]
    NotASubset { sub: Mask, sup: Mask },
    #[error("lattice width {n} exceeds the configured cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("value table has {got} entries, expected {expected} for {n} variables")]
    WrongLength { n: usize, expected: usize, got: usize },
    #[error("lattice width {n} is outside the supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("decomposition count overflows a 128-bit integer at n = {n}")]
    CountOverflow { n: usize },
    #[error("operator matrix for n = {n} exceeds the n <= {max} size guard")]
    MatrixTooLarge { n: usize, max: usize },
    #[error("operand width mismatch: {left} vs {right} variables")]
    SizeMismatch { left: usize, right: usize },
    #[error("variable index {index} is out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),
    #[error("lattice values must be finite, found {value} at mask {mask:#b}")]
    NonFiniteValue { mask: Mask, value: f64 },
}

/// Number of variables in the subset (popcount).
pub fn cardinality(mask: Mask) -> u32 {
    mask.count_ones()
}

/// The mask holding all `n` variables.
pub fn full_mask(n: usize) -> Mask {
    debug_assert!(n <= MAX_LATTICE_BITS);
    ((1u64 << n) - 1) as Mask
}

/// Checks that `mask` addresses a subset of an `n`-variable lattice.
pub fn check_mask(mask: Mask, n: usize) -> Result<(), LatticeError> {
    if n > MAX_LATTICE_BITS || u64::from(mask) >= (1u64 << n) {
        return Err(LatticeError::MaskOutOfRange { mask, n });
    }
    Ok(())
}

/// Set complement within the `n`-variable lattice.
pub fn complement(mask: Mask, n: usize) -> Result<Mask, LatticeError> {
    check_mask(mask, n)?;
    Ok(full_mask(n) ^ mask)
}

/// The Möbius function of the inclusion order: `(-1)^(|nu| - |tau|)` for
/// `tau` a subset of `nu`.
pub fn mobius_mu(nu: Mask, tau: Mask) -> Result<i32, LatticeError> {
    if tau & !nu != 0 {
        return Err(LatticeError::NotASubset { sub: tau, sup: nu });
    }
    Ok(if (cardinality(nu) - cardinality(tau)) % 2 == 0 {
        1
    } else {
        -1
    })
}

/// Removes position `bit` from the mask, shifting higher bits down: maps a
/// subset of an `n`-variable lattice that avoids `bit` onto the
/// `(n-1)`-variable lattice over the remaining positions.
pub fn collapse_bit(mask: Mask, bit: usize) -> Mask {
    let low = mask & ((1 << bit) - 1);
    let high = (mask >> (bit + 1)) << bit;
    low | high
}

/// Inverse of [`collapse_bit`]: re-inserts position `bit` (cleared) into a
/// reduced mask.
pub fn expand_bit(reduced: Mask, bit: usize) -> Mask {
    let low = reduced & ((1 << bit) - 1);
    let high = (reduced >> bit) << (bit + 1);
    low | high
}

/// Vertices lying on some shortest hypercube path between `tau` and `eta`:
/// exactly the interval `[tau & eta, tau | eta]`, each mask yielded once, in
/// increasing order. `2^hamming(tau, eta)` masks in total.
pub fn geodesic_interval(tau: Mask, eta: Mask) -> GeodesicInterval {
    GeodesicInterval {
        meet: tau & eta,
        free: tau ^ eta,
        state: Some(0),
    }
}

/// Iterator over a lattice interval; see [`geodesic_interval`].
#[derive(Clone, Debug)]
pub struct GeodesicInterval {
    meet: Mask,
    free: Mask,
    state: Option<Mask>,
}

impl GeodesicInterval {
    /// Number of masks in the interval.
    pub fn count_masks(&self) -> u64 {
        1u64 << cardinality(self.free)
    }
}

impl Iterator for GeodesicInterval {
    type Item = Mask;

    fn next(&mut self) -> Option<Mask> {
        let sub = self.state?;
        let out = self.meet | sub;
        // Enumerates submasks of `free` in increasing order.
        let next = sub.wrapping_sub(self.free) & self.free;
        self.state = if next == 0 { None } else { Some(next) };
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_counts_bits() {
        assert_eq!(cardinality(0b000), 0);
        assert_eq!(cardinality(0b111), 3);
        assert_eq!(cardinality(0b101), 2);
    }

    #[test]
    fn complement_flips_within_width() {
        assert_eq!(complement(0b001, 3).unwrap(), 0b110);
        assert_eq!(complement(0b000, 3).unwrap(), 0b111);
        assert_eq!(complement(0b1010, 4).unwrap(), 0b0101);
    }

    #[test]
    fn complement_rejects_out_of_range_mask() {
        assert_eq!(
            complement(0b1000, 3),
            Err(LatticeError::MaskOutOfRange { mask: 0b1000, n: 3 })
        );
    }

    #[test]
    fn mobius_mu_signs() {
        assert_eq!(mobius_mu(0b111, 0b001).unwrap(), 1);
        assert_eq!(mobius_mu(0b111, 0b011).unwrap(), -1);
        assert_eq!(mobius_mu(0b1011, 0b1011).unwrap(), 1);
        assert!(mobius_mu(0b011, 0b100).is_err());
    }

    #[test]
    fn interval_between_disjoint_masks_spans_their_union() {
        // {1} vs {2,3}: meet is empty, join is the full 3-set.
        let got: Vec<Mask> = geodesic_interval(0b001, 0b110).collect();
        assert_eq!(got, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn interval_to_empty_set_is_the_down_set() {
        let got: Vec<Mask> = geodesic_interval(0b101, 0).collect();
        assert_eq!(got, vec![0b000, 0b001, 0b100, 0b101]);
    }

    #[test]
    fn degenerate_interval_is_a_single_mask() {
        let got: Vec<Mask> = geodesic_interval(0b011, 0b011).collect();
        assert_eq!(got, vec![0b011]);
    }

    #[test]
    fn interval_to_full_set_is_the_up_set() {
        let got: Vec<Mask> = geodesic_interval(0b010, 0b111).collect();
        assert_eq!(got, vec![0b010, 0b011, 0b110, 0b111]);
    }

    #[test]
    fn bit_collapse_and_expand_are_inverse() {
        assert_eq!(collapse_bit(0b1101, 1), 0b111);
        assert_eq!(expand_bit(0b111, 1), 0b1101);
        for reduced in 0..16u32 {
            for bit in 0..5 {
                assert_eq!(collapse_bit(expand_bit(reduced, bit), bit), reduced);
                assert_eq!(expand_bit(reduced, bit) & (1 << bit), 0);
            }
        }
    }
}
