//! Discrete joint probability tables over named variables.
//!
//! Probabilities are stored densely over the product space, variable 0
//! fastest: the table index of an assignment `(v_0, ..., v_{n-1})` is
//! `v_0 + c_0 * (v_1 + c_1 * (v_2 + ...))` with `c_i` the cardinalities.

use crate::mask::Mask;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Tolerance for the total-probability check at construction.
const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("variable {index} appears in its own conditioning set")]
    ConditioningOnTarget { index: usize },
    #[error("ordering {0:?} is not a permutation of the variables")]
    NotAPermutation(Vec<usize>),
    #[error("probability table with {size} cells exceeds the {limit}-cell limit")]
    TableTooLarge { size: u128, limit: u64 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("maximum degree {degree} out of range 1..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("no rows available: {0}")]
    EmptyData(String),
    #[error(transparent)]
    Lattice(#[from] crate::mask::LatticeError),
}

/// Largest dense probability table we are willing to materialize.
pub const TABLE_CELL_LIMIT: u64 = 1 << 26;

/// A discrete joint distribution over named variables.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    names: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Builds a distribution, validating shape, nonnegativity, and
    /// normalization.
    pub fn new(
        names: Vec<String>,
        cards: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<Self, MeasureError> {
        if names.len() != cards.len() {
            return Err(MeasureError::InvalidDistribution(format!(
                "{} names but {} cardinalities",
                names.len(),
                cards.len()
            )));
        }
        if cards.contains(&0) {
            return Err(MeasureError::InvalidDistribution(
                "zero cardinality".into(),
            ));
        }
        let size: u128 = cards.iter().map(|&c| c as u128).product();
        if size > u128::from(TABLE_CELL_LIMIT) {
            return Err(MeasureError::TableTooLarge {
                size,
                limit: TABLE_CELL_LIMIT,
            });
        }
        if probs.len() as u128 != size {
            return Err(MeasureError::InvalidDistribution(format!(
                "{} probabilities for a {size}-cell table",
                probs.len()
            )));
        }
        let mut total = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(MeasureError::InvalidDistribution(format!(
                    "probability {p} is negative or non-finite"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(MeasureError::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointDistribution { names, cards, probs })
    }

    /// Builds from nonnegative weights, normalizing them.
    pub fn from_weights(
        names: Vec<String>,
        cards: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self, MeasureError> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(MeasureError::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Self::new(
            names,
            cards,
            weights.into_iter().map(|w| w / total).collect(),
        )
    }

    /// Empirical distribution from a dense count table.
    pub fn from_counts(
        names: Vec<String>,
        cards: Vec<usize>,
        counts: &[u64],
    ) -> Result<Self, MeasureError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(MeasureError::EmptyData("count table is all zero".into()));
        }
        Self::new(
            names,
            cards,
            counts.iter().map(|&c| c as f64 / total as f64).collect(),
        )
    }

    pub fn variable_count(&self) -> usize {
        self.cards.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = Vec::with_capacity(self.cards.len());
        let mut s = 1;
        for &c in &self.cards {
            strides.push(s);
            s *= c;
        }
        strides
    }

    /// Shannon entropy in nats, with `0 ln 0 = 0`.
    pub fn entropy_nats(&self) -> f64 {
        let mut acc = 0.0;
        for &p in &self.probs {
            if p > 0.0 {
                acc += p * p.ln();
            }
        }
        if acc == 0.0 {
            0.0
        } else {
            -acc
        }
    }

    /// Marginal over the variables of `mask`, preserving their order.
    pub fn marginal(&self, mask: Mask) -> JointDistribution {
        let n = self.variable_count();
        debug_assert!(u64::from(mask) < (1u64 << n));
        let kept: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let strides = self.strides();
        let out_cards: Vec<usize> = kept.iter().map(|&i| self.cards[i]).collect();
        let out_names: Vec<String> = kept.iter().map(|&i| self.names[i].clone()).collect();
        let out_size: usize = out_cards.iter().product::<usize>().max(1);
        let mut out = vec![0.0; out_size];
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut out_idx = 0;
            let mut out_stride = 1;
            for (k, &i) in kept.iter().enumerate() {
                let v = (idx / strides[i]) % self.cards[i];
                out_idx += v * out_stride;
                out_stride *= out_cards[k];
            }
            out[out_idx] += p;
        }
        JointDistribution {
            names: out_names,
            cards: out_cards,
            probs: out,
        }
    }

    /// Conditions on `var = value`, returning the slice weight and the
    /// renormalized distribution over the remaining variables. `None` when
    /// the slice has zero probability.
    pub fn condition_on(&self, var: usize, value: usize) -> Option<(f64, JointDistribution)> {
        let n = self.variable_count();
        assert!(var < n && value < self.cards[var]);
        let strides = self.strides();
        let rest: Vec<usize> = (0..n).filter(|&i| i != var).collect();
        let rest_cards: Vec<usize> = rest.iter().map(|&i| self.cards[i]).collect();
        let rest_size: usize = rest_cards.iter().product::<usize>().max(1);
        let mut slice = vec![0.0; rest_size];
        let mut weight = 0.0;
        for (idx, &p) in self.probs.iter().enumerate() {
            if (idx / strides[var]) % self.cards[var] != value {
                continue;
            }
            weight += p;
            if p == 0.0 {
                continue;
            }
            let mut out_idx = 0;
            let mut out_stride = 1;
            for (k, &i) in rest.iter().enumerate() {
                let v = (idx / strides[i]) % self.cards[i];
                out_idx += v * out_stride;
                out_stride *= rest_cards[k];
            }
            slice[out_idx] += p;
        }
        if weight <= 0.0 {
            return None;
        }
        for q in slice.iter_mut() {
            *q /= weight;
        }
        Some((
            weight,
            JointDistribution {
                names: rest.iter().map(|&i| self.names[i].clone()).collect(),
                cards: rest_cards,
                probs: slice,
            },
        ))
    }

    fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("X{i}")).collect()
    }

    /// `n` independent fair binary variables.
    pub fn independent_fair_bits(n: usize) -> JointDistribution {
        let size = 1usize << n;
        JointDistribution {
            names: Self::default_names(n),
            cards: vec![2; n],
            probs: vec![1.0 / size as f64; size],
        }
    }

    /// `n` binary variables all equal to one fair bit.
    pub fn copied_fair_bit(n: usize) -> JointDistribution {
        let size = 1usize << n;
        let mut probs = vec![0.0; size];
        probs[0] = 0.5;
        probs[size - 1] = 0.5;
        JointDistribution {
            names: Self::default_names(n),
            cards: vec![2; n],
            probs,
        }
    }

    /// `n - 1` independent fair bits plus a last variable equal to their
    /// parity. At `n = 3` this is the classic three-variable parity table
    /// with four equally likely outcomes.
    pub fn parity_bits(n: usize) -> JointDistribution {
        assert!(n >= 2);
        let size = 1usize << n;
        let mass = 1.0 / (1u64 << (n - 1)) as f64;
        let mut probs = vec![0.0; size];
        for idx in 0..size {
            let free = idx & ((1 << (n - 1)) - 1);
            let parity = (free as u32).count_ones() as usize % 2;
            if idx >> (n - 1) == parity {
                probs[idx] = mass;
            }
        }
        JointDistribution {
            names: Self::default_names(n),
            cards: vec![2; n],
            probs,
        }
    }

    /// Seeded random distribution: each variable's cardinality drawn from
    /// `{2, 3}`, cell weights uniform in `(0, 1)`, normalized.
    pub fn random(n: usize, seed: u64) -> JointDistribution {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=3)).collect();
        let size: usize = cards.iter().product();
        let weights: Vec<f64> = (0..size).map(|_| rng.gen_range(1e-6..1.0)).collect();
        JointDistribution::from_weights(Self::default_names(n), cards, weights)
            .expect("random weights normalize")
    }

    /// Seeded random distribution with every variable binary.
    pub fn random_binary(n: usize, seed: u64) -> JointDistribution {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = 1usize << n;
        let weights: Vec<f64> = (0..size).map(|_| rng.gen_range(1e-6..1.0)).collect();
        JointDistribution::from_weights(Self::default_names(n), vec![2; n], weights)
            .expect("random weights normalize")
    }
}

/// Shannon entropy of a distribution in nats.
pub fn entropy(dist: &JointDistribution) -> f64 {
    dist.entropy_nats()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn fair_bit_entropy_is_ln2() {
        let d = JointDistribution::independent_fair_bits(1);
        assert_abs_diff_eq!(entropy(&d), LN2, epsilon = 1e-15);
    }

    #[test]
    fn deterministic_variable_has_zero_entropy() {
        let d = JointDistribution::new(vec!["X1".into()], vec![2], vec![1.0, 0.0]).unwrap();
        assert_eq!(entropy(&d), 0.0);
    }

    #[test]
    fn parity_triple_entropy_is_two_ln2() {
        let d = JointDistribution::parity_bits(3);
        assert_abs_diff_eq!(entropy(&d), 2.0 * LN2, epsilon = 1e-15);
        // Every pair marginal is uniform on four outcomes.
        for mask in [0b011u32, 0b101, 0b110] {
            let m = d.marginal(mask);
            assert_abs_diff_eq!(entropy(&m), 2.0 * LN2, epsilon = 1e-15);
        }
        for mask in [0b001u32, 0b010, 0b100] {
            assert_abs_diff_eq!(entropy(&d.marginal(mask)), LN2, epsilon = 1e-15);
        }
    }

    #[test]
    fn marginals_stay_normalized() {
        let d = JointDistribution::random(4, 11);
        for mask in 0..16u32 {
            let m = d.marginal(mask);
            let total: f64 = m.probabilities().iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn conditioning_weights_sum_to_one() {
        let d = JointDistribution::random(3, 5);
        let mut total = 0.0;
        for v in 0..d.cardinalities()[1] {
            if let Some((w, cond)) = d.condition_on(1, v) {
                total += w;
                let s: f64 = cond.probabilities().iter().sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
                assert_eq!(cond.variable_count(), 2);
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_tables_are_rejected() {
        assert!(JointDistribution::new(vec!["a".into()], vec![2], vec![0.7, 0.7]).is_err());
        assert!(JointDistribution::new(vec!["a".into()], vec![2], vec![-0.5, 1.5]).is_err());
        assert!(JointDistribution::new(vec!["a".into()], vec![3], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn copied_bit_marginals_are_fair() {
        let d = JointDistribution::copied_fair_bit(3);
        for mask in 1..8u32 {
            assert_abs_diff_eq!(entropy(&d.marginal(mask)), LN2, epsilon = 1e-15);
        }
    }
}
