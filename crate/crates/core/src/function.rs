//! Real-valued functions on the subset lattice and the sign conventions of
//! the signed convolutions that act on them.

use crate::mask::{cardinality, full_mask, LatticeError, Mask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Default ceiling on lattice width; dense storage needs `2^n` values.
pub const DEFAULT_N_CAP: usize = 24;

/// Sign weight attached to each term of a signed lattice convolution.
///
/// Published definitions of these transforms disagree on where the sign
/// lives, and the disagreement is a global factor of `(-1)^(n+1)`, so the
/// weight is kept as an explicit first-class choice:
///
/// * [`SizeParity`]: `(-1)^(|z|+1)`, positive on odd-cardinality subsets.
///   The involutive form whose two-variable down-transform of an entropy
///   lattice is mutual information. Default, and the form the operator
///   group table is built on.
/// * [`CodimParity`]: `(-1)^(n-|z|)`, positive when the codimension is even.
///   The involutive form used by the reference-anchored interval operators.
/// * [`PlainMobius`]: `(-1)^(|t|-|z|)`, the classic Möbius-function weight
///   relative to the argument. Not an involution as a single transform.
///
/// [`SizeParity`]: SignConvention::SizeParity
/// [`CodimParity`]: SignConvention::CodimParity
/// [`PlainMobius`]: SignConvention::PlainMobius
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignConvention {
    #[default]
    #[serde(rename = "size-parity")]
    SizeParity,
    #[serde(rename = "codim-parity")]
    CodimParity,
    #[serde(rename = "plain-mobius")]
    PlainMobius,
}

impl SignConvention {
    /// All conventions, in canonical order.
    pub const ALL: [SignConvention; 3] = [
        SignConvention::SizeParity,
        SignConvention::CodimParity,
        SignConvention::PlainMobius,
    ];

    /// Sign applied to the value at `zeta` when convolving at argument `tau`
    /// on an `n`-variable lattice.
    pub fn weight(self, zeta: Mask, tau: Mask, n: usize) -> i32 {
        let parity = match self {
            SignConvention::SizeParity => cardinality(zeta) + 1,
            SignConvention::CodimParity => n as u32 - cardinality(zeta),
            SignConvention::PlainMobius => cardinality(tau).abs_diff(cardinality(zeta)),
        };
        if parity % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Whether the signed transform under this convention is its own inverse.
    pub fn is_involutive(self) -> bool {
        !matches!(self, SignConvention::PlainMobius)
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SignConvention::SizeParity => "size-parity",
            SignConvention::CodimParity => "codim-parity",
            SignConvention::PlainMobius => "plain-mobius",
        };
        f.write_str(name)
    }
}

impl FromStr for SignConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "size-parity" => Ok(SignConvention::SizeParity),
            "codim-parity" => Ok(SignConvention::CodimParity),
            "plain-mobius" => Ok(SignConvention::PlainMobius),
            other => Err(format!(
                "unknown sign convention `{other}` (expected size-parity, codim-parity or plain-mobius)"
            )),
        }
    }
}

/// Logarithm base for entropy-valued quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Nats,
    #[serde(rename = "2")]
    Bits,
}

impl LogBase {
    /// Factor converting a value in nats to this base.
    pub fn scale(self) -> f64 {
        match self {
            LogBase::Nats => 1.0,
            LogBase::Bits => std::f64::consts::LOG2_E,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Nats => "e",
            LogBase::Bits => "2",
        })
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "e" | "nats" => Ok(LogBase::Nats),
            "2" | "bits" => Ok(LogBase::Bits),
            other => Err(format!("unknown log base `{other}` (expected e or 2)")),
        }
    }
}

/// A real-valued function on all `2^n` subsets of `n` variables.
///
/// `values[k]` is the value at mask `k`; bit `i` of the mask corresponds to
/// variable `i` (the `i`-th entry of `labels` when labels are present).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeFunction {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub role: String,
    pub values: Vec<f64>,
}

impl LatticeFunction {
    /// Builds a function over `n` variables, enforcing the default width cap.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, LatticeError> {
        Self::with_cap(n, values, DEFAULT_N_CAP)
    }

    /// Builds a function with an explicit width cap.
    pub fn with_cap(n: usize, values: Vec<f64>, cap: usize) -> Result<Self, LatticeError> {
        if n > cap || cap > crate::mask::MAX_LATTICE_BITS {
            return Err(LatticeError::CapExceeded { n, cap });
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(LatticeError::WrongLength {
                n,
                expected,
                got: values.len(),
            });
        }
        for (mask, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(LatticeError::NonFiniteValue {
                    mask: mask as Mask,
                    value: v,
                });
            }
        }
        Ok(LatticeFunction {
            n,
            labels: None,
            role: String::new(),
            values,
        })
    }

    /// Constant-zero function.
    pub fn zeros(n: usize) -> Result<Self, LatticeError> {
        Self::new(n, vec![0.0; 1usize << n])
    }

    pub fn with_role(mut self, role: impl Into<String>) -> Self {
        self.role = role.into();
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, LatticeError> {
        if labels.len() != self.n {
            return Err(LatticeError::WrongLength {
                n: self.n,
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Value at a subset mask.
    pub fn value(&self, mask: Mask) -> f64 {
        self.values[mask as usize]
    }

    /// The mask of the full variable set.
    pub fn full(&self) -> Mask {
        full_mask(self.n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Uniformly random values in `[-1, 1]`, reproducible from the seed.
    pub fn random(n: usize, seed: u64) -> Result<Self, LatticeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self::new(n, values).map(|f| f.with_role("random"))
    }

    /// Random small-integer values, useful where exact float arithmetic is
    /// wanted.
    pub fn random_integer(n: usize, seed: u64) -> Result<Self, LatticeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..1usize << n)
            .map(|_| f64::from(rng.gen_range(-8i32..=8)))
            .collect();
        Self::new(n, values).map(|f| f.with_role("random"))
    }

    /// Checks the extra constraints an entropy lattice must satisfy: zero at
    /// the empty set, nonnegative values, and monotonicity under inclusion.
    /// Small float slack is allowed.
    pub fn validate_entropy_shape(&self) -> Result<(), String> {
        if self.values[0] != 0.0 {
            return Err(format!(
                "entropy lattice must vanish at the empty set, found {}",
                self.values[0]
            ));
        }
        for (mask, &v) in self.values.iter().enumerate() {
            if v < -1e-12 {
                return Err(format!("negative entropy {v} at mask {mask:#b}"));
            }
        }
        for mask in 0..self.values.len() {
            for bit in 0..self.n {
                let with_bit = mask | (1 << bit);
                if with_bit != mask && self.values[mask] > self.values[with_bit] + 1e-9 {
                    return Err(format!(
                        "entropy not monotone under inclusion: value at {mask:#b} exceeds value at {with_bit:#b}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Serializes to the canonical JSON file format.
    pub fn to_json_string(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    /// Parses the JSON file format and validates shape under the default cap.
    pub fn from_json_str(s: &str) -> Result<Self, String> {
        Self::from_json_str_with_cap(s, DEFAULT_N_CAP)
    }

    /// Parses with an explicit width cap.
    pub fn from_json_str_with_cap(s: &str, cap: usize) -> Result<Self, String> {
        let parsed: LatticeFunction = serde_json::from_str(s).map_err(|e| e.to_string())?;
        let rebuilt = LatticeFunction::with_cap(parsed.n, parsed.values, cap)
            .map_err(|e| e.to_string())?
            .with_role(parsed.role);
        match parsed.labels {
            Some(labels) => rebuilt.with_labels(labels).map_err(|e| e.to_string()),
            None => Ok(rebuilt),
        }
    }
}
