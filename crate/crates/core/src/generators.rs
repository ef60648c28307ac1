//! Random TT tensors with i.i.d. core entries: standard Gaussian, ±1
//! (Rademacher) and uniform on [0, 1].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{derive_seed, Shape};
use crate::tt::{TtCore, TtTensor};

pub const DEFAULT_MAX_REGEN: usize = 10;

const REGEN_TAG: u64 = 0x7265_6765_6e;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Gaussian,
    Hadamard,
    Uniform,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [
        GeneratorKind::Gaussian,
        GeneratorKind::Hadamard,
        GeneratorKind::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Gaussian => "gaussian",
            GeneratorKind::Hadamard => "hadamard",
            GeneratorKind::Uniform => "uniform",
        }
    }

    /// Stable numeric tag for seed derivation.
    pub fn tag(self) -> u64 {
        match self {
            GeneratorKind::Gaussian => 1,
            GeneratorKind::Hadamard => 2,
            GeneratorKind::Uniform => 3,
        }
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            GeneratorKind::Gaussian => rng.sample(StandardNormal),
            GeneratorKind::Hadamard => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            GeneratorKind::Uniform => rng.random::<f64>(),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(GeneratorKind::Gaussian),
            "hadamard" => Ok(GeneratorKind::Hadamard),
            "uniform" => Ok(GeneratorKind::Uniform),
            other => Err(Error::Config(format!("unknown generator '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub shape: Shape,
    pub ranks: Vec<usize>,
    pub seed: u64,
    pub max_regen: usize,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, shape: Shape, ranks: Vec<usize>, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            shape,
            ranks,
            seed,
            max_regen: DEFAULT_MAX_REGEN,
        }
    }

    /// Checks `r_i <= min(r_{i-1} n_i, r_{i+1} n_{i+1})` at every junction.
    pub fn validate(&self) -> Result<()> {
        validate_ranks(&self.shape, &self.ranks)
    }
}

pub fn validate_ranks(shape: &Shape, ranks: &[usize]) -> Result<()> {
    let dims = shape.dims();
    let d = dims.len();
    if d < 2 {
        return Err(Error::Config("tensor order must be at least 2".into()));
    }
    if ranks.len() != d - 1 {
        return Err(Error::Config(format!(
            "{} modes need {} ranks, got {}",
            d,
            d - 1,
            ranks.len()
        )));
    }
    let full: Vec<usize> = std::iter::once(1)
        .chain(ranks.iter().copied())
        .chain(std::iter::once(1))
        .collect();
    for i in 1..d {
        let r = full[i];
        let bound = (full[i - 1] * dims[i - 1]).min(full[i + 1] * dims[i]);
        if r == 0 || r > bound {
            return Err(Error::Config(format!(
                "rank r_{i} = {r} infeasible (must lie in [1, {bound}])"
            )));
        }
    }
    Ok(())
}

/// Draw cores from one stream: cores in order, entries `a` fastest, then `j`, then `b`.
pub fn sample_cores(kind: GeneratorKind, shape: &Shape, ranks: &[usize], seed: u64) -> Result<TtTensor> {
    validate_ranks(shape, ranks)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = shape.dims();
    let d = dims.len();
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let rl = if k == 0 { 1 } else { ranks[k - 1] };
        let rr = if k == d - 1 { 1 } else { ranks[k] };
        cores.push(TtCore::from_fn(rl, dims[k], rr, |_, _, _| kind.draw(&mut rng))?);
    }
    TtTensor::new(cores)
}

/// A generated tensor with the seed that produced it.
#[derive(Clone, Debug)]
pub struct Generated {
    pub tensor: TtTensor,
    pub seed_used: u64,
    /// Number of regenerations after the first draw.
    pub regenerations: usize,
}

/// Draw a tensor whose numerical TT-rank equals `spec.ranks`, regenerating from
/// derived seeds up to `spec.max_regen` times.
pub fn generate(spec: &GeneratorSpec, rank_tol: f64) -> Result<Generated> {
    spec.validate()?;
    let mut last = Vec::new();
    for attempt in 0..=spec.max_regen {
        let seed = if attempt == 0 {
            spec.seed
        } else {
            derive_seed(spec.seed, &[REGEN_TAG, attempt as u64])
        };
        let tensor = sample_cores(spec.kind, &spec.shape, &spec.ranks, seed)?;
        match tensor.tt_rank_numerical(rank_tol) {
            Ok(r) if r == spec.ranks => {
                return Ok(Generated {
                    tensor,
                    seed_used: seed,
                    regenerations: attempt,
                })
            }
            Ok(r) => last = r,
            Err(Error::RankZero) => last = vec![0],
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation {
        attempts: spec.max_regen + 1,
        detail: format!("last numerical TT-rank {last:?}, wanted {:?}", spec.ranks),
    })
}
