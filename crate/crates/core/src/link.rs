//! Slot-level OOK link: received-count statistics under each hypothesis and
//! a Monte-Carlo simulator with exact binomial arrivals.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::Serialize;

use crate::channel::TapVector;
use crate::error::{Error, Result};
use crate::geometry::Far;
use crate::rng::{par_map, stream};
use crate::scenario::Scenario;

/// Trials per random stream; fixed so output is independent of threading.
const TRIALS_PER_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Receiver {
    Single(Far),
    /// Sum of both receivers' counts.
    Joint,
}

/// Mean and variance of the received count in slot `slot` given the current
/// bit is 0 or 1, averaged over the earlier bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisStats {
    pub mu0: f64,
    pub var0: f64,
    pub mu1: f64,
    pub var1: f64,
    pub slot: usize,
    pub receiver: Receiver,
}

impl HypothesisStats {
    pub fn sigma0(&self) -> f64 {
        self.var0.sqrt()
    }

    pub fn sigma1(&self) -> f64 {
        self.var1.sqrt()
    }

    pub fn ensure_nondegenerate(&self) -> Result<()> {
        if !(self.var0 > 0.0) {
            return Err(Error::DegenerateStats("var0 must be > 0"));
        }
        if !(self.var1 > 0.0) {
            return Err(Error::DegenerateStats("var1 must be > 0"));
        }
        Ok(())
    }
}

fn check_slot(taps: &TapVector, slot: usize) -> Result<()> {
    if slot < 1 || taps.len() < slot {
        return Err(Error::Index { slot, len: taps.len() });
    }
    Ok(())
}

pub fn hypothesis_stats(taps: &TapVector, scenario: &Scenario, slot: usize) -> Result<HypothesisStats> {
    check_slot(taps, slot)?;
    let n = scenario.molecules_per_bit as f64;
    let q1 = scenario.bit_prior;
    let q0 = scenario.bit_prior_zero();
    let h = &taps.taps;
    // Earlier slots k = 1..l−1 reach slot l through tap h[l−k], i.e. h[1..l].
    let isi = &h[1..slot];
    let mu0 = n * q1 * isi.iter().sum::<f64>() + scenario.noise_mean;
    let var0 = n * q1 * isi.iter().map(|&x| x * (1.0 - x) + n * q0 * x * x).sum::<f64>()
        + scenario.noise_var;
    let h0 = h[0];
    Ok(HypothesisStats {
        mu0,
        var0,
        mu1: n * h0 + mu0,
        var1: n * h0 * (1.0 - h0) + var0,
        slot,
        receiver: Receiver::Single(taps.far),
    })
}

/// Statistics of the summed count of both receivers.
pub fn joint_stats(s1: &HypothesisStats, s2: &HypothesisStats) -> Result<HypothesisStats> {
    if s1.slot != s2.slot {
        return Err(Error::MismatchedSlot(s1.slot, s2.slot));
    }
    Ok(HypothesisStats {
        mu0: s1.mu0 + s2.mu0,
        var0: s1.var0 + s2.var0,
        mu1: s1.mu1 + s2.mu1,
        var1: s1.var1 + s2.var1,
        slot: s1.slot,
        receiver: Receiver::Joint,
    })
}

/// One simulated slot: the bit sent in it and the received statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkSample {
    pub true_bit: u8,
    pub y: f64,
}

/// One simulated slot seen by both receivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointSample {
    pub true_bit: u8,
    pub y1: f64,
    pub y2: f64,
}

impl JointSample {
    pub fn receiver(&self, rx: Receiver) -> LinkSample {
        let y = match rx {
            Receiver::Single(Far::First) => self.y1,
            Receiver::Single(Far::Second) => self.y2,
            Receiver::Joint => self.y1 + self.y2,
        };
        LinkSample { true_bit: self.true_bit, y }
    }
}

fn binomial<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    Binomial::new(n, p.min(1.0)).expect("p in [0, 1]").sample(rng)
}

fn noise(scenario: &Scenario) -> Normal<f64> {
    Normal::new(scenario.noise_mean, scenario.noise_var.max(0.0).sqrt()).expect("finite noise")
}

fn blocks<T: Send>(
    n_trials: usize,
    seed: u64,
    trial: impl Fn(&mut rand_chacha::ChaCha8Rng) -> T + Sync + Send,
    threads: Option<usize>,
) -> Vec<T> {
    let n_blocks = n_trials.div_ceil(TRIALS_PER_BLOCK);
    par_map(n_blocks, threads, |b| {
        let mut rng = stream(seed, b as u64);
        let len = TRIALS_PER_BLOCK.min(n_trials - b * TRIALS_PER_BLOCK);
        (0..len).map(|_| trial(&mut rng)).collect::<Vec<T>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Simulates `n_trials` independent slots `slot` at one receiver. Bits of the
/// current and earlier slots are i.i.d. Bernoulli(q1); arrivals are exact
/// binomials and the noise is Gaussian.
pub fn simulate_link(
    taps: &TapVector,
    scenario: &Scenario,
    slot: usize,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<LinkSample>> {
    simulate_link_on(taps, scenario, slot, n_trials, seed, None)
}

pub fn simulate_link_on(
    taps: &TapVector,
    scenario: &Scenario,
    slot: usize,
    n_trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<LinkSample>> {
    check_slot(taps, slot)?;
    let n = scenario.molecules_per_bit;
    let q1 = scenario.bit_prior;
    let h = &taps.taps[..slot];
    let noise = noise(scenario);
    Ok(blocks(
        n_trials,
        seed,
        |rng| {
            let current = rng.random_bool(q1);
            let mut y = binomial(rng, if current { n } else { 0 }, h[0]);
            for &tap in &h[1..] {
                if rng.random_bool(q1) {
                    y += binomial(rng, n, tap);
                }
            }
            LinkSample {
                true_bit: current as u8,
                y: y as f64 + noise.sample(rng),
            }
        },
        threads,
    ))
}

/// Simulates both receivers observing the same bit sequence. Molecules of
/// one emission are split multinomially between the two receivers and the
/// rest of space; each receiver has its own noise draw.
pub fn simulate_joint_link(
    taps1: &TapVector,
    taps2: &TapVector,
    scenario: &Scenario,
    slot: usize,
    n_trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<JointSample>> {
    check_slot(taps1, slot)?;
    check_slot(taps2, slot)?;
    let n = scenario.molecules_per_bit;
    let q1 = scenario.bit_prior;
    let (h1, h2) = (&taps1.taps[..slot], &taps2.taps[..slot]);
    let noise = noise(scenario);
    let split = |rng: &mut rand_chacha::ChaCha8Rng, count: u64, p1: f64, p2: f64| {
        let x1 = binomial(rng, count, p1);
        let rest = 1.0 - p1;
        let x2 = if rest > 0.0 { binomial(rng, count - x1, p2 / rest) } else { 0 };
        (x1, x2)
    };
    Ok(blocks(
        n_trials,
        seed,
        |rng| {
            let current = rng.random_bool(q1);
            let (mut y1, mut y2) = if current { split(rng, n, h1[0], h2[0]) } else { (0, 0) };
            for k in 1..slot {
                if rng.random_bool(q1) {
                    let (a, b) = split(rng, n, h1[k], h2[k]);
                    y1 += a;
                    y2 += b;
                }
            }
            JointSample {
                true_bit: current as u8,
                y1: y1 as f64 + noise.sample(rng),
                y2: y2 as f64 + noise.sample(rng),
            }
        },
        threads,
    ))
}

/// Sample moments of one class with standard errors of the mean and of the
/// variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMoments {
    pub count: usize,
    pub mean: f64,
    pub var: f64,
    pub se_mean: f64,
    pub se_var: f64,
}

pub fn class_moments(samples: &[LinkSample], bit: u8) -> Option<ClassMoments> {
    let ys: Vec<f64> = samples.iter().filter(|s| s.true_bit == bit).map(|s| s.y).collect();
    let count = ys.len();
    if count < 2 {
        return None;
    }
    let n = count as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let (m2, m4) = ys.iter().fold((0.0, 0.0), |(m2, m4), y| {
        let d = (y - mean) * (y - mean);
        (m2 + d, m4 + d * d)
    });
    let var = m2 / (n - 1.0);
    let m4 = m4 / n;
    Some(ClassMoments {
        count,
        mean,
        var,
        se_mean: (var / n).sqrt(),
        se_var: ((m4 - var * var).max(0.0) / n).sqrt(),
    })
}
