//! Predictor search: pick the conditioning subset that best predicts a
//! target column, by brute-force enumeration of subsets up to a degree cap.
//!
//! The score of a candidate subset is the plug-in conditional entropy of the
//! target given the subset on the training rows, which is the expected
//! conditional negative log-likelihood; minimizing it maximizes the expected
//! conditional log-likelihood. The raw plug-in score never increases as the
//! subset grows, so the report keeps the best candidate of every size and
//! optionally a holdout score rather than inventing a penalty term.

use crate::distribution::MeasureError;
use crate::function::LogBase;
use crate::ingest::Dataset;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Candidates whose scores differ by no more than this are treated as tied,
/// letting the tie-breakers (smaller subset, then smaller mask) act on
/// float-noise-level differences.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Options for [`predict`].
#[derive(Clone, Debug)]
pub struct PredictOptions {
    /// Largest conditioning-subset size to consider (at least 1).
    pub max_degree: usize,
    /// Fraction of rows held out for scoring; 0 disables the holdout.
    pub holdout_fraction: f64,
    /// Seed for the holdout split.
    pub seed: u64,
    pub base: LogBase,
}

impl Default for PredictOptions {
    fn default() -> Self {
        PredictOptions {
            max_degree: 2,
            holdout_fraction: 0.0,
            seed: 0,
            base: LogBase::Nats,
        }
    }
}

/// One scored conditioning subset.
#[derive(Clone, Debug, Serialize)]
pub struct PredictorCandidate {
    /// Conditioning column names, in dataset order.
    pub variables: Vec<String>,
    /// Bitmask over dataset columns (the target bit is never set).
    pub mask: u64,
    /// Expected conditional negative log-likelihood of the target given the
    /// subset on the training rows, in the requested base: the plug-in
    /// conditional entropy.
    pub expected_cll: f64,
    /// The same quantity in nats, regardless of the requested base.
    pub conditional_entropy_nats: f64,
    /// Training rows the estimate is based on.
    pub sample_count: usize,
}

/// Best candidate of each subset size.
#[derive(Clone, Debug, Serialize)]
pub struct PerSizeBest {
    pub size: usize,
    pub variables: Vec<String>,
    pub expected_cll: f64,
}

/// One row of the selected subset's conditional probability table.
#[derive(Clone, Debug, Serialize)]
pub struct CptRow {
    /// Decoded values of the conditioning variables.
    pub given: Vec<String>,
    /// Training rows matching this configuration.
    pub count: u64,
    /// `probabilities[k]` is the estimated probability of target code `k`.
    pub probabilities: Vec<f64>,
}

/// Outcome of the predictor search.
#[derive(Clone, Debug, Serialize)]
pub struct PredictorReport {
    pub target: String,
    pub log_base: LogBase,
    pub max_degree: usize,
    pub train_rows: usize,
    pub holdout_rows: usize,
    /// Every candidate, sorted by subset size then mask.
    pub candidates: Vec<PredictorCandidate>,
    pub per_size_best: Vec<PerSizeBest>,
    /// Conditioning variables of the selected candidate.
    pub selected: Vec<String>,
    pub selected_mask: u64,
    pub selected_expected_cll: f64,
    /// Mean negative log-likelihood of the target on holdout rows under the
    /// training table; absent when no holdout was requested or a holdout
    /// configuration was never seen in training.
    pub holdout_cll: Option<f64>,
    /// Holdout events with zero estimated probability.
    pub holdout_unseen: usize,
    /// Target codes, decoded, indexing the probability entries of the table.
    pub target_levels: Vec<String>,
    pub cpt: Vec<CptRow>,
}

fn subsets_up_to(columns: &[usize], max_degree: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for subset in &frontier {
            for &c in columns {
                if subset.last().is_some_and(|&l| c <= l) {
                    continue;
                }
                let mut grown = subset.clone();
                grown.push(c);
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn mask_of(subset: &[usize]) -> u64 {
    subset.iter().fold(0u64, |m, &c| m | (1u64 << c))
}

/// Plug-in conditional entropy of `target` given `subset` over the given
/// rows, in nats: `(sum_s c_s ln c_s - sum_{s,t} c_st ln c_st) / N`.
fn conditional_entropy_nats(
    data: &Dataset,
    rows: &[usize],
    subset: &[usize],
    target: usize,
) -> f64 {
    let mut joint: BTreeMap<(Vec<u32>, u32), u64> = BTreeMap::new();
    let mut given: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for &r in rows {
        let key: Vec<u32> = subset.iter().map(|&c| data.columns[c][r]).collect();
        *joint
            .entry((key.clone(), data.columns[target][r]))
            .or_insert(0) += 1;
        *given.entry(key).or_insert(0) += 1;
    }
    let n = rows.len() as f64;
    let sum_given: f64 = given.values().map(|&c| (c as f64) * (c as f64).ln()).sum();
    let sum_joint: f64 = joint.values().map(|&c| (c as f64) * (c as f64).ln()).sum();
    let h = (sum_given - sum_joint) / n;
    if h <= 0.0 {
        0.0
    } else {
        h
    }
}

/// Brute-force predictor search for `target`, deterministic given the seed
/// and invariant under row shuffling of the dataset.
pub fn predict(
    data: &Dataset,
    target: &str,
    opts: &PredictOptions,
) -> Result<PredictorReport, MeasureError> {
    let target_col = data
        .column_index(target)
        .ok_or_else(|| MeasureError::UnknownVariable(target.to_string()))?;
    let others: Vec<usize> = (0..data.names.len()).filter(|&c| c != target_col).collect();
    if opts.max_degree < 1 || opts.max_degree > others.len() {
        return Err(MeasureError::DegreeOutOfRange {
            degree: opts.max_degree,
            max: others.len(),
        });
    }
    if data.row_count == 0 {
        return Err(MeasureError::EmptyData("dataset has no rows".into()));
    }
    if !(0.0..1.0).contains(&opts.holdout_fraction) {
        return Err(MeasureError::InvalidDistribution(format!(
            "holdout fraction {} outside [0, 1)",
            opts.holdout_fraction
        )));
    }

    // Canonical row order, so the split depends only on the data content.
    let mut order: Vec<usize> = (0..data.row_count).collect();
    order.sort_by_key(|&r| {
        data.columns
            .iter()
            .map(|col| col[r])
            .collect::<Vec<u32>>()
    });
    let holdout_len = (opts.holdout_fraction * data.row_count as f64).floor() as usize;
    let (holdout_rows, train_rows): (Vec<usize>, Vec<usize>) = if holdout_len > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        order.shuffle(&mut rng);
        (
            order[..holdout_len].to_vec(),
            order[holdout_len..].to_vec(),
        )
    } else {
        (Vec::new(), order)
    };
    if train_rows.is_empty() {
        return Err(MeasureError::EmptyData(
            "holdout fraction leaves no training rows".into(),
        ));
    }

    let scale = opts.base.scale();
    let mut candidates = Vec::new();
    for subset in subsets_up_to(&others, opts.max_degree) {
        let nats = conditional_entropy_nats(data, &train_rows, &subset, target_col);
        candidates.push(PredictorCandidate {
            variables: subset.iter().map(|&c| data.names[c].clone()).collect(),
            mask: mask_of(&subset),
            expected_cll: nats * scale,
            conditional_entropy_nats: nats,
            sample_count: train_rows.len(),
        });
    }
    candidates.sort_by(|a, b| {
        (a.mask.count_ones(), a.mask).cmp(&(b.mask.count_ones(), b.mask))
    });

    let best_score = candidates
        .iter()
        .map(|c| c.expected_cll)
        .fold(f64::INFINITY, f64::min);
    let selected = candidates
        .iter()
        .filter(|c| c.expected_cll <= best_score + TIE_TOLERANCE)
        .min_by(|a, b| (a.mask.count_ones(), a.mask).cmp(&(b.mask.count_ones(), b.mask)))
        .expect("at least the empty candidate exists")
        .clone();

    let mut per_size_best = Vec::new();
    for size in 0..=opts.max_degree {
        if let Some(best) = candidates
            .iter()
            .filter(|c| c.mask.count_ones() as usize == size)
            .min_by(|a, b| {
                a.expected_cll
                    .partial_cmp(&b.expected_cll)
                    .unwrap()
                    .then(a.mask.cmp(&b.mask))
            })
        {
            per_size_best.push(PerSizeBest {
                size,
                variables: best.variables.clone(),
                expected_cll: best.expected_cll,
            });
        }
    }

    // Conditional probability table of the selected subset on training rows.
    let selected_cols: Vec<usize> = (0..data.names.len())
        .filter(|&c| selected.mask & (1u64 << c) != 0)
        .collect();
    let target_card = data.cardinality(target_col);
    let mut table: BTreeMap<Vec<u32>, Vec<u64>> = BTreeMap::new();
    for &r in &train_rows {
        let key: Vec<u32> = selected_cols.iter().map(|&c| data.columns[c][r]).collect();
        let entry = table.entry(key).or_insert_with(|| vec![0u64; target_card]);
        entry[data.columns[target_col][r] as usize] += 1;
    }
    let cpt: Vec<CptRow> = table
        .iter()
        .map(|(key, counts)| {
            let total: u64 = counts.iter().sum();
            CptRow {
                given: key
                    .iter()
                    .zip(selected_cols.iter())
                    .map(|(&code, &c)| data.decode(c, code).to_string())
                    .collect(),
                count: total,
                probabilities: counts
                    .iter()
                    .map(|&c| c as f64 / total as f64)
                    .collect(),
            }
        })
        .collect();

    // Holdout score under the training table.
    let mut holdout_cll = None;
    let mut holdout_unseen = 0usize;
    if !holdout_rows.is_empty() {
        let mut acc = 0.0;
        let mut scored = 0usize;
        for &r in &holdout_rows {
            let key: Vec<u32> = selected_cols.iter().map(|&c| data.columns[c][r]).collect();
            let t = data.columns[target_col][r] as usize;
            match table.get(&key) {
                Some(counts) if counts[t] > 0 => {
                    let total: u64 = counts.iter().sum();
                    acc -= (counts[t] as f64 / total as f64).ln() * scale;
                    scored += 1;
                }
                _ => holdout_unseen += 1,
            }
        }
        if holdout_unseen == 0 && scored > 0 {
            holdout_cll = Some(acc / scored as f64);
        }
    }

    Ok(PredictorReport {
        target: target.to_string(),
        log_base: opts.base,
        max_degree: opts.max_degree,
        train_rows: train_rows.len(),
        holdout_rows: holdout_rows.len(),
        candidates,
        per_size_best,
        selected: selected.variables.clone(),
        selected_mask: selected.mask,
        selected_expected_cll: selected.expected_cll,
        holdout_cll,
        holdout_unseen,
        target_levels: (0..target_card as u32)
            .map(|c| data.decode(target_col, c).to_string())
            .collect(),
        cpt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{encode, EncodeOptions, RawTable};
    use rand::Rng;

    const LN2: f64 = std::f64::consts::LN_2;

    fn xor_dataset(rows: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table_rows = Vec::with_capacity(rows);
        for _ in 0..rows {
            let b: u8 = rng.gen_range(0..2);
            let c: u8 = rng.gen_range(0..2);
            let a = b ^ c;
            table_rows.push(vec![a.to_string(), b.to_string(), c.to_string()]);
        }
        let raw = RawTable {
            headers: vec!["X1".into(), "X2".into(), "X3".into()],
            rows: table_rows,
        };
        encode(&raw, &EncodeOptions::default()).unwrap()
    }

    /// Exactly balanced design: the target is empirically independent of the
    /// other two columns.
    fn balanced_independent_dataset() -> Dataset {
        let mut rows = Vec::new();
        for t in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    for _ in 0..5 {
                        rows.push(vec![t.to_string(), a.to_string(), b.to_string()]);
                    }
                }
            }
        }
        let raw = RawTable {
            headers: vec!["T".into(), "A".into(), "B".into()],
            rows,
        };
        encode(&raw, &EncodeOptions::default()).unwrap()
    }

    #[test]
    fn xor_target_needs_both_parents() {
        let data = xor_dataset(10_000, 42);
        let report = predict(&data, "X1", &PredictOptions::default()).unwrap();
        assert_eq!(report.selected, vec!["X2", "X3"]);
        assert!(report.selected_expected_cll < 0.01);
        // No single column predicts the parity target.
        let singles: Vec<&PredictorCandidate> = report
            .candidates
            .iter()
            .filter(|c| c.mask.count_ones() == 1)
            .collect();
        for c in singles {
            assert!((c.expected_cll - LN2).abs() < 0.05, "{c:?}");
        }
    }

    #[test]
    fn max_degree_one_on_xor_reports_ln2_best_singleton() {
        let data = xor_dataset(10_000, 7);
        let report = predict(
            &data,
            "X1",
            &PredictOptions {
                max_degree: 1,
                ..PredictOptions::default()
            },
        )
        .unwrap();
        let best1 = report
            .per_size_best
            .iter()
            .find(|b| b.size == 1)
            .unwrap();
        assert!((best1.expected_cll - LN2).abs() < 0.05);
    }

    #[test]
    fn independent_target_selects_the_empty_subset() {
        let data = balanced_independent_dataset();
        let report = predict(&data, "T", &PredictOptions::default()).unwrap();
        assert!(report.selected.is_empty());
        assert!((report.selected_expected_cll - LN2).abs() < 1e-12);
    }

    #[test]
    fn selection_is_invariant_under_row_shuffling() {
        let data = xor_dataset(400, 3);
        let mut shuffled = data.clone();
        let mut perm: Vec<usize> = (0..data.row_count).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        perm.shuffle(&mut rng);
        for col in shuffled.columns.iter_mut() {
            let orig = col.clone();
            for (new_row, &old_row) in perm.iter().enumerate() {
                col[new_row] = orig[old_row];
            }
        }
        let opts = PredictOptions {
            holdout_fraction: 0.25,
            seed: 5,
            ..PredictOptions::default()
        };
        let a = predict(&data, "X1", &opts).unwrap();
        let b = predict(&shuffled, "X1", &opts).unwrap();
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.selected_expected_cll, b.selected_expected_cll);
        assert_eq!(a.holdout_cll, b.holdout_cll);
    }

    #[test]
    fn cpt_rows_are_normalized() {
        let data = xor_dataset(1_000, 11);
        let report = predict(&data, "X1", &PredictOptions::default()).unwrap();
        assert!(!report.cpt.is_empty());
        for row in &report.cpt {
            let s: f64 = row.probabilities.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn holdout_score_is_reported_for_predictable_targets() {
        let data = xor_dataset(2_000, 13);
        let report = predict(
            &data,
            "X1",
            &PredictOptions {
                holdout_fraction: 0.2,
                seed: 17,
                ..PredictOptions::default()
            },
        )
        .unwrap();
        assert_eq!(report.holdout_rows, 400);
        assert_eq!(report.train_rows, 1_600);
        let holdout = report.holdout_cll.expect("all configurations seen");
        assert!(holdout < 0.01);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let data = xor_dataset(100, 1);
        assert!(matches!(
            predict(&data, "nope", &PredictOptions::default()),
            Err(MeasureError::UnknownVariable(_))
        ));
        assert!(matches!(
            predict(
                &data,
                "X1",
                &PredictOptions {
                    max_degree: 3,
                    ..PredictOptions::default()
                }
            ),
            Err(MeasureError::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn subset_enumeration_is_complete_and_canonical() {
        let subsets = subsets_up_to(&[1, 2, 4], 2);
        assert_eq!(
            subsets,
            vec![
                vec![],
                vec![1],
                vec![2],
                vec![4],
                vec![1, 2],
                vec![1, 4],
                vec![2, 4]
            ]
        );
    }
}
