//! Monte Carlo estimation of outage probability and DPSK BER.
//!
//! Trials are split into fixed-size chunks. Chunk `k` draws from a ChaCha8
//! stream seeded with the master seed and stream id `k`, so results depend
//! only on `(cfg, opts)` and never on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::Metric;
use crate::channels::{SnrDistribution, SnrSampler};
use crate::error::{Error, Result};
use crate::linkmodel::{end_to_end_snr, end_to_end_snr_min_approx, Relay, SystemConfig};
use crate::scalar::KahanSum;
use crate::Real;

pub const DEFAULT_CHUNK_SIZE: u64 = 65_536;

/// How the adaptive-gain relay SNR is formed. Ignored for fixed gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CombiningMode {
    /// γ_F γ_R / (γ_F + γ_R + 1)
    #[default]
    Exact,
    /// min(γ_F, γ_R)
    MinApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub trials: u64,
    pub master_seed: u64,
    pub chunk_size: u64,
    pub combining_mode: CombiningMode,
    /// Thread count; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl McOptions {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
            combining_mode: CombiningMode::Exact,
            workers: None,
        }
    }

    pub fn with_mode(mut self, mode: CombiningMode) -> Self {
        self.combining_mode = mode;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidParameter("chunk_size must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub trials: u64,
    pub estimate: T,
    pub std_error: T,
    pub master_seed: u64,
    pub metric_kind: Metric,
}

impl<T: Real> McEstimate<T> {
    /// Half-width of the normal-approximation interval at `z` standard errors.
    pub fn half_width(&self, z: T) -> T {
        z * self.std_error
    }
}

#[derive(Clone, Copy)]
struct ChunkStats<T> {
    n: u64,
    sum: T,
    sum_sq: T,
}

fn chunk_rng(master_seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `trials` evaluations of `kernel`, which maps a chunk-local RNG to one
/// trial value in [0, 1], and reduces them in chunk order.
fn run_chunks<T, K>(opts: &McOptions, metric: Metric, kernel: K) -> Result<McEstimate<T>>
where
    T: Real,
    K: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    opts.validate()?;
    let n_chunks = opts.trials.div_ceil(opts.chunk_size);
    let work = |k: u64| {
        let n = opts.chunk_size.min(opts.trials - k * opts.chunk_size);
        let mut rng = chunk_rng(opts.master_seed, k);
        let mut sum = KahanSum::new();
        let mut sum_sq = KahanSum::new();
        for _ in 0..n {
            let v = kernel(&mut rng);
            sum.add(v);
            sum_sq.add(v * v);
        }
        ChunkStats {
            n,
            sum: sum.value(),
            sum_sq: sum_sq.value(),
        }
    };
    let stats: Vec<ChunkStats<T>> = match opts.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| (0..n_chunks).into_par_iter().map(work).collect())
        }
        None => (0..n_chunks).into_par_iter().map(work).collect(),
    };
    let mut sum = KahanSum::new();
    let mut sum_sq = KahanSum::new();
    let mut n = 0u64;
    for s in &stats {
        sum.add(s.sum);
        sum_sq.add(s.sum_sq);
        n += s.n;
    }
    let nt = T::from_u64(n).unwrap();
    let mean = sum.value() / nt;
    let var = if n > 1 {
        ((sum_sq.value() - nt * mean * mean) / (nt - T::one())).max(T::zero())
    } else {
        T::zero()
    };
    let std_error = match metric {
        // binomial form for indicator trials
        Metric::Outage => (mean * (T::one() - mean) / nt).max(T::zero()).sqrt(),
        Metric::Ber => (var / nt).sqrt(),
    };
    Ok(McEstimate {
        trials: n,
        estimate: mean.max(T::zero()).min(T::one()),
        std_error,
        master_seed: opts.master_seed,
        metric_kind: metric,
    })
}

struct LinkSampler<T: Real> {
    rf: SnrSampler<T>,
    fso: SnrSampler<T>,
    n: usize,
    relay: Relay<T>,
    mode: CombiningMode,
}

impl<T: Real> LinkSampler<T> {
    fn new(cfg: &SystemConfig<T>, mode: CombiningMode) -> Self {
        Self {
            rf: cfg.rf().sampler(),
            fso: cfg.fso().sampler(),
            n: cfg.n_users(),
            relay: *cfg.relay(),
            mode,
        }
    }

    #[inline]
    fn gamma_end<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let mut best = self.rf.sample(rng);
        for _ in 1..self.n {
            best = best.max(self.rf.sample(rng));
        }
        let g_fso = self.fso.sample(rng);
        match (self.relay, self.mode) {
            (Relay::AdaptiveGain, CombiningMode::MinApprox) => end_to_end_snr_min_approx(g_fso, best),
            _ => end_to_end_snr(&self.relay, g_fso, best),
        }
    }
}

/// Outage test hook: estimates Pr(γ_end ≤ γ_th) for an arbitrary per-trial
/// SNR generator.
pub fn outage_mc_with<T, G>(gamma_th: T, opts: &McOptions, gamma_end: G) -> Result<McEstimate<T>>
where
    T: Real,
    G: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    run_chunks(opts, Metric::Outage, |rng| {
        if gamma_end(rng) <= gamma_th {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// BER test hook: averages 0.5·e^{−γ_end} over an arbitrary generator.
pub fn ber_mc_with<T, G>(opts: &McOptions, gamma_end: G) -> Result<McEstimate<T>>
where
    T: Real,
    G: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    run_chunks(opts, Metric::Ber, |rng| T::lit(0.5) * (-gamma_end(rng)).exp())
}

/// Fraction of trials with γ_end ≤ γ_th.
pub fn run_outage_mc<T: Real>(cfg: &SystemConfig<T>, opts: &McOptions) -> Result<McEstimate<T>> {
    let link = LinkSampler::new(cfg, opts.combining_mode);
    outage_mc_with(cfg.gamma_th(), opts, |rng| link.gamma_end(rng))
}

/// Semi-analytic DPSK BER: mean of the conditional error 0.5·e^{−γ_end}.
pub fn run_ber_mc<T: Real>(cfg: &SystemConfig<T>, opts: &McOptions) -> Result<McEstimate<T>> {
    let link = LinkSampler::new(cfg, opts.combining_mode);
    ber_mc_with(opts, |rng| link.gamma_end(rng))
}

/// Dispatches on `metric`.
pub fn run_mc<T: Real>(cfg: &SystemConfig<T>, metric: Metric, opts: &McOptions) -> Result<McEstimate<T>> {
    match metric {
        Metric::Outage => run_outage_mc(cfg, opts),
        Metric::Ber => run_ber_mc(cfg, opts),
    }
}
