//! Multi-index linearization, Kronecker extension of index sets and
//! uniform sampling without replacement.
//!
//! All indices handed across the public API are 1-based. Linearization is
//! first-index-fastest: `(j_1, .., j_k)` over `(n_1, .., n_k)` maps to
//! `1 + sum_k (j_k - 1) * prod_{l<k} n_l`. Every unfolding, interface matrix
//! and Kronecker extension in the crate uses this one convention.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mode sizes `n_1..n_d` of a tensor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Domain("shape must have at least one mode".into()));
        }
        if let Some(k) = dims.iter().position(|&n| n == 0) {
            return Err(Error::Domain(format!("mode {} has size 0", k + 1)));
        }
        Ok(Shape(dims))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Product of all mode sizes, or `None` on overflow.
    pub fn numel(&self) -> Option<usize> {
        self.0.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n))
    }

    /// Product of the mode sizes in the 0-based half-open range `range`.
    pub fn span(&self, range: std::ops::Range<usize>) -> usize {
        self.0[range].iter().product()
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Shape::new(v)
    }
}

impl From<Shape> for Vec<usize> {
    fn from(s: Shape) -> Self {
        s.0
    }
}

/// Map a 1-based multi-index to its 1-based linear position.
pub fn linearize(multi: &[usize], shape: &Shape) -> Result<usize> {
    let dims = shape.dims();
    if multi.len() != dims.len() {
        return Err(Error::Domain(format!(
            "multi-index has {} components, shape has {} modes",
            multi.len(),
            dims.len()
        )));
    }
    let mut linear = 0usize;
    let mut stride = 1usize;
    for (k, (&j, &n)) in multi.iter().zip(dims).enumerate() {
        if j == 0 || j > n {
            return Err(Error::Domain(format!(
                "index {j} out of range [1, {n}] in mode {}",
                k + 1
            )));
        }
        linear += (j - 1) * stride;
        stride *= n;
    }
    Ok(linear + 1)
}

/// Inverse of [`linearize`].
pub fn delinearize(linear: usize, shape: &Shape) -> Result<Vec<usize>> {
    let total = shape
        .numel()
        .ok_or_else(|| Error::Domain("shape size overflows usize".into()))?;
    if linear == 0 || linear > total {
        return Err(Error::Domain(format!(
            "linear index {linear} out of range [1, {total}]"
        )));
    }
    let mut rest = linear - 1;
    Ok(shape
        .dims()
        .iter()
        .map(|&n| {
            let j = rest % n;
            rest /= n;
            j + 1
        })
        .collect())
}

/// A sorted set of distinct 1-based indices drawn from `[1, domain]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    indices: Vec<usize>,
    domain: usize,
}

impl IndexSet {
    /// Build from arbitrary-order indices; rejects duplicates and out-of-range entries.
    pub fn new(mut indices: Vec<usize>, domain: usize) -> Result<Self> {
        if domain == 0 {
            return Err(Error::Domain("index domain must be positive".into()));
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("duplicate index {}", w[0])));
        }
        if let (Some(&lo), Some(&hi)) = (indices.first(), indices.last()) {
            if lo == 0 || hi > domain {
                return Err(Error::Domain(format!(
                    "index out of range [1, {domain}]: {}",
                    if lo == 0 { lo } else { hi }
                )));
            }
        }
        Ok(IndexSet { indices, domain })
    }

    /// `{1, .., domain}`.
    pub fn full(domain: usize) -> Self {
        assert!(domain > 0, "index domain must be positive");
        IndexSet {
            indices: (1..=domain).collect(),
            domain,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.domain
    }

    /// Fraction `|I| / domain`.
    pub fn fraction(&self) -> f64 {
        self.indices.len() as f64 / self.domain as f64
    }

    pub fn contains(&self, x: usize) -> bool {
        self.indices.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.domain == other.domain && self.indices.iter().all(|&x| other.contains(x))
    }

    /// 0-based row positions, for gathering matrix rows.
    pub fn zero_based(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.indices.iter().map(|&x| x - 1)
    }
}

/// `prefix ⊗ [n]`: all `q + (j - 1) * P` with `q` in the prefix and `j` in `[n]`.
///
/// The prefix varies fastest, so row `q + (j-1)P` of the next unfolding is
/// the multi-index `(delinearize(q), j)`.
pub fn kron_extend(prefix: &IndexSet, n: usize) -> IndexSet {
    assert!(n > 0, "extension size must be positive");
    let p = prefix.domain;
    let mut indices = Vec::with_capacity(prefix.len() * n);
    for j in 0..n {
        indices.extend(prefix.indices.iter().map(|&q| q + j * p));
    }
    // Blocks for increasing j are disjoint and increasing, so already sorted.
    IndexSet {
        indices,
        domain: p * n,
    }
}

/// Repeated [`kron_extend`], left to right over `sizes`.
pub fn kron_extend_all(prefix: &IndexSet, sizes: &[usize]) -> IndexSet {
    sizes
        .iter()
        .fold(prefix.clone(), |acc, &n| kron_extend(&acc, n))
}

/// Draw `m` distinct elements of `pool`, uniformly over all m-subsets.
///
/// Partial Fisher-Yates over pool positions; untouched positions are kept
/// implicit so the cost is O(m) beyond the pool itself.
pub fn sample_without_replacement<R: Rng + ?Sized>(
    pool: &IndexSet,
    m: usize,
    rng: &mut R,
) -> Result<IndexSet> {
    let n = pool.len();
    if m > n {
        return Err(Error::Sampling {
            requested: m,
            available: n,
        });
    }
    let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * m);
    let mut picked = Vec::with_capacity(m);
    for k in 0..m {
        let j = rng.random_range(k..n);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_k = *swapped.get(&k).unwrap_or(&k);
        swapped.insert(j, at_k);
        picked.push(pool.indices[at_j]);
    }
    picked.sort_unstable();
    Ok(IndexSet {
        indices: picked,
        domain: pool.domain,
    })
}

/// Counter-based seed derivation: a splitmix64 chain over `master` and `tags`.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    tags.iter().fold(mix(master), |acc, &t| mix(acc ^ mix(t)))
}
