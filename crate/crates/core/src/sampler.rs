//! Rosenbluth sampling of weighted walks.
//!
//! Steps are drawn from `D` itself, so each sample's importance weight is the
//! interaction product `prod_{s<t} (1 - U(w_s - w_t))` and its mean is an
//! unbiased estimate of `c_n`. Sample `i` draws from ChaCha8 stream `i` of
//! the seed, so batches do not depend on how samples are split over threads.

use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::exec::{Executor, Sequential};
use crate::model::{dist_sq, Contact, Model};

pub const RNG_NAME: &str = "ChaCha8 (seed_from_u64, stream = sample index)";

/// Samples per reduction block.
const BLOCK: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct SampleBatch {
    pub n: usize,
    pub count: u64,
    pub cn_estimate: f64,
    pub cn_std_error: f64,
    /// Weight-averaged `|w_n|^2`; `None` when every weight is zero.
    pub msd_estimate: Option<f64>,
    /// Kish effective sample size `(sum w)^2 / sum w^2`.
    pub effective_samples: f64,
    pub nonzero_samples: u64,
    pub seed: u64,
    pub rng: &'static str,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    w: f64,
    w2: f64,
    wr2: f64,
    nonzero: u64,
}

impl Moments {
    fn plus(self, o: Moments) -> Moments {
        Moments {
            w: self.w + o.w,
            w2: self.w2 + o.w2,
            wr2: self.wr2 + o.wr2,
            nonzero: self.nonzero + o.nonzero,
        }
    }
}

fn pairwise(items: &[Moments]) -> Moments {
    match items.len() {
        0 => Moments::default(),
        1 => items[0],
        len => pairwise(&items[..len / 2]).plus(pairwise(&items[len / 2..])),
    }
}

/// Weight and squared end-to-end distance of sample `index`.
fn one_sample(model: &Model<f64>, picker: &WeightedIndex<f64>, n: usize, seed: u64, index: u64, path: &mut Vec<i32>) -> (f64, f64) {
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    path.clear();
    path.resize(d * (n + 1), 0);
    let mut weight = 1.0;
    for t in 1..=n {
        let step = model.step_coords(picker.sample(&mut rng));
        for k in 0..d {
            path[t * d + k] = path[(t - 1) * d + k] + step[k];
        }
        let (before, site) = path.split_at(t * d);
        let site = &site[..d];
        for s in 0..t {
            match model.potential().contact_sq(dist_sq(&before[s * d..(s + 1) * d], site)) {
                Contact::Overlap => return (0.0, 0.0),
                Contact::Adjacent => weight *= *model.one_plus_kappa(),
                Contact::Apart => {}
            }
        }
    }
    let end = &path[n * d..];
    (weight, end.iter().map(|&c| (c as f64) * (c as f64)).sum())
}

pub fn sample_walks(model: &Model<f64>, n: usize, count: u64, seed: u64) -> Result<SampleBatch, Error> {
    sample_walks_with(&Sequential, model, n, count, seed)
}

pub fn sample_walks_with<E: Executor>(exec: &E, model: &Model<f64>, n: usize, count: u64, seed: u64) -> Result<SampleBatch, Error> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let weights: Vec<f64> = model.steps().map(|(_, &w)| w).collect();
    let picker = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(alloc::format!("step weights: {e}")))?;
    let blocks = count.div_ceil(BLOCK as u64) as usize;
    let partials = exec.map(blocks, |b| {
        let start = b as u64 * BLOCK as u64;
        let end = (start + BLOCK as u64).min(count);
        let mut path = Vec::new();
        let per: Vec<Moments> = (start..end)
            .map(|i| {
                let (w, r2) = one_sample(model, &picker, n, seed, i, &mut path);
                Moments {
                    w,
                    w2: w * w,
                    wr2: w * r2,
                    nonzero: u64::from(w > 0.0),
                }
            })
            .collect();
        pairwise(&per)
    });
    let total = pairwise(&partials);
    let c = count as f64;
    let mean = total.w / c;
    let var = if count > 1 {
        ((total.w2 / c - mean * mean) * c / (c - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SampleBatch {
        n,
        count,
        cn_estimate: mean,
        cn_std_error: libm::sqrt(var / c),
        msd_estimate: (total.w > 0.0).then(|| total.wr2 / total.w),
        effective_samples: if total.w2 > 0.0 { total.w * total.w / total.w2 } else { 0.0 },
        nonzero_samples: total.nonzero,
        seed,
        rng: RNG_NAME,
    })
}
