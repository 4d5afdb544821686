//! The information measures generated by the operator algebra: entropy
//! lattices, interaction information and its chain-rule oracle, deltas,
//! multi-information, and conditional log-likelihoods.

use crate::distribution::{JointDistribution, MeasureError};
use crate::function::{LatticeFunction, LogBase, SignConvention, DEFAULT_N_CAP};
use crate::mask::{full_mask, LatticeError, Mask};
use crate::transform::{fast_signed_transform, Direction};

/// Marginal-entropy lattice of a distribution: `values[mask]` is the entropy
/// of the marginal over the subset `mask`, in the requested base. Role
/// `"entropy"`.
pub fn entropy_lattice(
    dist: &JointDistribution,
    base: LogBase,
) -> Result<LatticeFunction, MeasureError> {
    entropy_lattice_capped(dist, base, DEFAULT_N_CAP)
}

/// [`entropy_lattice`] with an explicit lattice-width cap.
pub fn entropy_lattice_capped(
    dist: &JointDistribution,
    base: LogBase,
    cap: usize,
) -> Result<LatticeFunction, MeasureError> {
    let n = dist.variable_count();
    if n > cap {
        return Err(MeasureError::Lattice(LatticeError::CapExceeded { n, cap }));
    }
    let scale = base.scale();
    let mut values = vec![0.0; 1usize << n];
    for mask in 1..(1u32 << n) {
        values[mask as usize] = dist.marginal(mask).entropy_nats() * scale;
    }
    let f = LatticeFunction::with_cap(n, values, cap)?
        .with_role("entropy")
        .with_labels(dist.names().to_vec())?;
    Ok(f)
}

/// Interaction information of every subset: the down-set transform of the
/// entropy lattice under the default size-parity signs. At pairs this is
/// mutual information; it can be negative from three variables up.
///
/// The role tag is advisory: any lattice function is accepted and
/// transformed, entropy lattice or not.
pub fn interaction_information(h: &LatticeFunction) -> LatticeFunction {
    let mut g = fast_signed_transform(h, Direction::Down, SignConvention::SizeParity);
    g.role = "interaction".into();
    g
}

fn local_order_after_removal(order: &[usize], removed: usize) -> Vec<usize> {
    order
        .iter()
        .filter(|&&i| i != removed)
        .map(|&i| if i > removed { i - 1 } else { i })
        .collect()
}

fn chain_recursion(dist: &JointDistribution, order: &[usize]) -> f64 {
    let k = order.len();
    if k == 1 {
        return dist.marginal(1 << order[0]).entropy_nats();
    }
    let split = order[k - 1];
    let head = &order[..k - 1];
    let head_mask: Mask = head.iter().fold(0, |m, &i| m | (1 << i));
    // Rank of each head variable inside the marginal over the head set.
    let head_local: Vec<usize> = head
        .iter()
        .map(|&i| (0..i).filter(|j| head_mask & (1 << j) != 0).count())
        .collect();
    let base = chain_recursion(&dist.marginal(head_mask), &head_local);

    let cond_order = local_order_after_removal(head, split);
    let mut conditional = 0.0;
    for value in 0..dist.cardinalities()[split] {
        if let Some((weight, cond)) = dist.condition_on(split, value) {
            conditional += weight * chain_recursion(&cond, &cond_order);
        }
    }
    base - conditional
}

/// Interaction information of the whole variable set computed purely through
/// the chain-rule recursion: the value for one variable is its entropy, and
/// each added variable subtracts the expected conditional value over its
/// outcomes. Independent of the lattice transforms, and must agree with them
/// for every variable ordering.
pub fn interaction_chain_oracle(
    dist: &JointDistribution,
    order: &[usize],
) -> Result<f64, MeasureError> {
    let n = dist.variable_count();
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(MeasureError::NotAPermutation(order.to_vec()));
        }
        seen[i] = true;
    }
    if order.len() != n || n == 0 {
        return Err(MeasureError::NotAPermutation(order.to_vec()));
    }
    Ok(chain_recursion(dist, order))
}

/// The dependence increment of singling out variable `x`: the up-set
/// transform of the entropy lattice evaluated at the singleton `{x}`.
/// Equals the interaction information of the full set minus that of the set
/// without `x`.
pub fn delta(h: &LatticeFunction, x: usize) -> Result<f64, MeasureError> {
    if x >= h.n {
        return Err(MeasureError::VariableOutOfRange { index: x, n: h.n });
    }
    let up = fast_signed_transform(h, Direction::Up, SignConvention::SizeParity);
    Ok(up.value(1 << x))
}

/// Sign handling for [`symmetric_delta`]. Both forms appear in print; the
/// plain product is the default, the negated product is kept as an explicit
/// mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetricDeltaMode {
    Product,
    NegatedProduct,
}

/// Product over every variable of its delta; a permutation-symmetric
/// dependence measure. Zero as soon as any one variable is independent of
/// the rest.
pub fn symmetric_delta(
    h: &LatticeFunction,
    mode: SymmetricDeltaMode,
) -> Result<f64, MeasureError> {
    if h.n < 2 {
        return Err(MeasureError::VariableOutOfRange { index: 1, n: h.n });
    }
    let up = fast_signed_transform(h, Direction::Up, SignConvention::SizeParity);
    let product: f64 = (0..h.n).map(|x| up.value(1 << x)).product();
    Ok(match mode {
        SymmetricDeltaMode::Product => product,
        SymmetricDeltaMode::NegatedProduct => -product,
    })
}

/// Entropy increment of adjoining variable `x`: a function on the subsets of
/// the remaining variables, `value(t) = H(t + {x}) - H(t)`. This equals the
/// conditional entropy of `x` given the subset, which is also the expected
/// conditional negative log-likelihood. Role `"cll"`.
pub fn differential_entropy(
    h: &LatticeFunction,
    x: usize,
) -> Result<LatticeFunction, MeasureError> {
    if x >= h.n {
        return Err(MeasureError::VariableOutOfRange { index: x, n: h.n });
    }
    let m = h.n - 1;
    let mut values = vec![0.0; 1usize << m];
    for reduced in 0..(1u32 << m) {
        let tau = crate::mask::expand_bit(reduced, x);
        values[reduced as usize] = h.value(tau | (1 << x)) - h.value(tau);
    }
    let mut out = LatticeFunction::new(m, values)?.with_role("cll");
    if let Some(labels) = &h.labels {
        let kept: Vec<String> = labels
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != x)
            .map(|(_, l)| l.clone())
            .collect();
        out = out.with_labels(kept)?;
    }
    Ok(out)
}

/// Total correlation of every subset: the sum of its singleton entropies
/// minus its joint entropy. Nonnegative, zero exactly under independence,
/// and zero on the empty set and singletons. Role `"multi-information"`.
pub fn multi_information(h: &LatticeFunction) -> LatticeFunction {
    let mut values = vec![0.0; h.len()];
    for mask in 0..h.len() as u32 {
        let singles: f64 = (0..h.n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| h.value(1 << i))
            .sum();
        values[mask as usize] = singles - h.value(mask);
    }
    LatticeFunction {
        n: h.n,
        labels: h.labels.clone(),
        role: "multi-information".into(),
        values,
    }
}

/// Expected conditional negative log-likelihood of `x` given the variables
/// of `cond`: the conditional entropy `H(x | cond)` in the requested base,
/// computed from the distribution's marginals.
pub fn cll(
    dist: &JointDistribution,
    x: usize,
    cond: Mask,
    base: LogBase,
) -> Result<f64, MeasureError> {
    let n = dist.variable_count();
    if x >= n {
        return Err(MeasureError::VariableOutOfRange { index: x, n });
    }
    if cond & (1 << x) != 0 {
        return Err(MeasureError::ConditioningOnTarget { index: x });
    }
    if u64::from(cond) >= (1u64 << n) {
        return Err(MeasureError::Lattice(LatticeError::MaskOutOfRange {
            mask: cond,
            n,
        }));
    }
    let joint = dist.marginal(cond | (1 << x)).entropy_nats();
    let given = if cond == 0 {
        0.0
    } else {
        dist.marginal(cond).entropy_nats()
    };
    Ok((joint - given) * base.scale())
}

/// Sum of the singleton deltas' defining identity: convenience accessor for
/// the interaction information at the full set.
pub fn interaction_at_full(h: &LatticeFunction) -> f64 {
    interaction_information(h).value(full_mask(h.n))
}

/// Mutual information of a pair of variables straight from the entropy
/// lattice.
pub fn pair_mutual_information(h: &LatticeFunction, i: usize, j: usize) -> f64 {
    debug_assert!(i != j && i < h.n && j < h.n);
    let pair = (1 << i) | (1 << j);
    h.value(1 << i) + h.value(1 << j) - h.value(pair)
}
