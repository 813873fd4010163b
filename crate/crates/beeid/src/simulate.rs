//! Monte Carlo estimation of the identification-failure probability, with
//! Wilson confidence intervals and optional analytical bounds alongside.
//!
//! Trials are keyed by `(seed, trial_index)` substreams, so the failure
//! count is a pure reduction over trial indices: any worker count, any
//! scheduling, same result. That determinism is a hard requirement (the CSV
//! output must be byte-identical across machines and thread counts).

use std::fmt;
use std::thread;

use beeid_core::channels::{bec_transmit, bsc_transmit, ChannelKind};
use beeid_core::codes::{Codebook, MatchStrategy};
use beeid_core::estimation::{self, Channel, EstimationError};
use beeid_core::identifiers::{jedi, jldi, jmdi, Outcome};

/// Which decoder the trial loop runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderSpec {
    Jedi,
    Jmdi,
    Jldi { radius: usize },
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoderSpec::Jedi => write!(f, "jedi"),
            DecoderSpec::Jmdi => write!(f, "jmdi"),
            DecoderSpec::Jldi { radius } => write!(f, "jldi(R={radius})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    ParamRange { name: &'static str, value: f64 },
    ZeroTrials,
    /// jedi needs a BEC; jmdi/jldi need a BSC.
    Incompatible { decoder: String, channel: String },
    Estimation(EstimationError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::ParamRange { name, value } => write!(f, "{name} = {value} out of range"),
            SimError::ZeroTrials => write!(f, "need at least one trial"),
            SimError::Incompatible { decoder, channel } => {
                write!(f, "decoder {decoder} cannot run on channel {channel}")
            }
            SimError::Estimation(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimError {}

/// One (code, channel, p) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub code: String,
    pub channel: ChannelKind,
    pub p: f64,
    pub trials: u64,
    /// JEDI: non-unique outcomes; JMDI/JLDI: wrong or infeasible outcomes.
    pub failures: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub bound_lower: Option<f64>,
    pub bound_upper: Option<f64>,
    pub seed: u64,
}

impl SimResult {
    /// CSV header, fixed by the output contract.
    pub const CSV_HEADER: &'static str =
        "code,channel,p,trials,failures,rate,wilson_lo,wilson_hi,bound_lower,bound_upper,seed";

    pub fn csv_row(&self) -> String {
        let channel = match self.channel {
            ChannelKind::Bec(_) => "bec",
            ChannelKind::Bsc(_) => "bsc",
        };
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.code,
            channel,
            self.p,
            self.trials,
            self.failures,
            self.rate,
            self.wilson_lo,
            self.wilson_hi,
            opt(self.bound_lower),
            opt(self.bound_upper),
            self.seed
        )
    }
}

/// 95% Wilson score interval; well-behaved at rates near zero, where these
/// experiments live.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let phat = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = phat + z2 / (2.0 * n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    // the boundary cases are exact; spare them the rounding noise
    let lo = if failures == 0 { 0.0 } else { ((center - half) / denom).max(0.0) };
    let hi = if failures == trials { 1.0 } else { ((center + half) / denom).min(1.0) };
    (lo, hi)
}

fn is_failure(cb: &Codebook, channel: ChannelKind, decoder: DecoderSpec, seed: u64, trial: u64) -> bool {
    match (channel, decoder) {
        (ChannelKind::Bec(p), DecoderSpec::Jedi) => {
            let rec = bec_transmit(cb, p, seed, trial);
            let res = jedi(cb, &rec.outputs, MatchStrategy::Auto).expect("simulated outputs are well formed");
            match res.outcome {
                Outcome::Identified { assignment, .. } => {
                    // a unique matching must be the truth; checked every trial
                    debug_assert_eq!(assignment.sigma(), rec.truth.sigma());
                    false
                }
                _ => true,
            }
        }
        (ChannelKind::Bsc(p), DecoderSpec::Jmdi) => {
            let rec = bsc_transmit(cb, p, seed, trial);
            let res = jmdi(cb, &rec.outputs).expect("simulated outputs are well formed");
            match res.outcome {
                Outcome::Identified { assignment, .. } => assignment.sigma() != rec.truth.sigma(),
                _ => true,
            }
        }
        (ChannelKind::Bsc(p), DecoderSpec::Jldi { radius }) => {
            let rec = bsc_transmit(cb, p, seed, trial);
            let res = jldi(cb, &rec.outputs, radius, false).expect("simulated outputs are well formed");
            match res.outcome {
                Outcome::Identified { assignment, .. } => assignment.sigma() != rec.truth.sigma(),
                // infeasible counts as failure (conservative)
                _ => true,
            }
        }
        _ => unreachable!("compatibility checked before the trial loop"),
    }
}

fn check_compat(channel: ChannelKind, decoder: DecoderSpec) -> Result<(), SimError> {
    let ok = matches!(
        (channel, decoder),
        (ChannelKind::Bec(_), DecoderSpec::Jedi)
            | (ChannelKind::Bsc(_), DecoderSpec::Jmdi)
            | (ChannelKind::Bsc(_), DecoderSpec::Jldi { .. })
    );
    if ok {
        let (name, p, hi) = match channel {
            ChannelKind::Bec(p) => ("bec p", p, 1.0),
            ChannelKind::Bsc(p) => ("bsc p", p, 0.5),
        };
        if !(0.0..=hi).contains(&p) {
            return Err(SimError::ParamRange { name, value: p });
        }
        Ok(())
    } else {
        let channel_name = match channel {
            ChannelKind::Bec(_) => "bec",
            ChannelKind::Bsc(_) => "bsc",
        };
        Err(SimError::Incompatible {
            decoder: format!("{decoder}"),
            channel: channel_name.into(),
        })
    }
}

/// Runs `trials` independent transmissions and counts decoder failures.
/// `workers` caps the thread fan-out; the counts are identical for every
/// worker count because trials are keyed by index, not by scheduling.
pub fn run_trials(
    cb: &Codebook,
    code_name: &str,
    channel: ChannelKind,
    trials: u64,
    seed: u64,
    decoder: DecoderSpec,
    workers: usize,
) -> Result<SimResult, SimError> {
    if trials == 0 {
        return Err(SimError::ZeroTrials);
    }
    check_compat(channel, decoder)?;
    let workers = workers.clamp(1, trials.min(1 << 16) as usize);
    let failures: u64 = if workers == 1 {
        (0..trials).filter(|&t| is_failure(cb, channel, decoder, seed, t)).count() as u64
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let cb = &*cb;
                    scope.spawn(move || {
                        (w as u64..trials)
                            .step_by(workers)
                            .filter(|&t| is_failure(cb, channel, decoder, seed, t))
                            .count() as u64
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
        })
    };
    let (wilson_lo, wilson_hi) = wilson_interval(failures, trials);
    let p = match channel {
        ChannelKind::Bec(p) | ChannelKind::Bsc(p) => p,
    };
    Ok(SimResult {
        code: code_name.to_string(),
        channel,
        p,
        trials,
        failures,
        rate: failures as f64 / trials as f64,
        wilson_lo,
        wilson_hi,
        bound_lower: None,
        bound_upper: None,
        seed,
    })
}

/// Analytical bounds for one (code, channel, p), with each side skipped
/// independently when its size guard trips (U needs M <= 30, V needs
/// M <= 14).
pub fn bounds_for(
    cb: &Codebook,
    channel: ChannelKind,
) -> Result<(Option<f64>, Option<f64>), SimError> {
    let (family, p) = match channel {
        ChannelKind::Bec(p) => (Channel::Bec, p),
        ChannelKind::Bsc(p) => (Channel::Bsc, p),
    };
    let u = match estimation::estimate_u(cb, p, family) {
        Ok(u) => u,
        Err(EstimationError::SizeGuard { .. }) => return Ok((None, None)),
        Err(e) => return Err(SimError::Estimation(e)),
    };
    match estimation::estimate_v(cb, p, family) {
        Ok(v) => {
            let b = estimation::error_bounds(&u, Some(&v)).map_err(SimError::Estimation)?;
            Ok((Some(b.lower), Some(b.upper)))
        }
        Err(EstimationError::SizeGuard { .. }) => {
            let b = estimation::error_bounds(&u, None).map_err(SimError::Estimation)?;
            Ok((None, Some(b.upper)))
        }
        Err(e) => Err(SimError::Estimation(e)),
    }
}

/// One [`run_trials`] per grid point, with bounds attached when requested.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    cb: &Codebook,
    code_name: &str,
    channel_family: fn(f64) -> ChannelKind,
    p_grid: &[f64],
    trials: u64,
    seed: u64,
    decoder: DecoderSpec,
    with_bounds: bool,
    workers: usize,
) -> Result<Vec<SimResult>, SimError> {
    let mut out = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let channel = channel_family(p);
        let mut res = run_trials(cb, code_name, channel, trials, seed, decoder, workers)?;
        if with_bounds {
            let (lo, hi) = bounds_for(cb, channel)?;
            res.bound_lower = lo;
            res.bound_upper = hi;
        }
        out.push(res);
    }
    Ok(out)
}
