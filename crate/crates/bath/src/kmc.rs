use std::collections::BTreeMap;

use hfine_adiabatic::{FlipDirection, NuclearConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::FieldDistribution;
use crate::error::{BathError, Result};
use crate::layout::{moved, BathLayout};
use crate::master::RateProvider;

/// Stopping point of a trajectory: whichever limit is hit first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmcHorizon {
    pub max_time: f64,
    pub max_events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmcOptions {
    pub horizon: KmcHorizon,
    /// Events discarded before the histogram starts.
    pub burn_in_events: u64,
    pub n_traj: usize,
    pub seed: u64,
    pub record_events: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmcEvent {
    pub time: f64,
    pub nucleus: usize,
    pub direction: FlipDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmcTrajectory {
    pub final_config: NuclearConfig,
    pub n_events: u64,
    pub elapsed: f64,
    /// Total rate hit zero before the horizon.
    pub absorbed: bool,
    pub events: Vec<KmcEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmcResult {
    pub trajectories: Vec<KmcTrajectory>,
    /// Residence-time histogram of `h` over the post-burn-in segments, each
    /// trajectory weighted equally.
    pub histogram: FieldDistribution,
    pub total_events: u64,
}

/// Uniformly random starting configurations.
pub fn random_configs(layout: &BathLayout, n: usize, seed: u64) -> Vec<NuclearConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let m = layout.twice_spins().iter().map(|&s| -(s as i32) + 2 * rng.random_range(0..=s as i32)).collect();
            NuclearConfig::from_twice(m)
        })
        .collect()
}

fn field_key(h: f64) -> i64 {
    (h / 1e-9).round() as i64
}

/// Residence-time sampling of the bath master equation. Trajectory `i`
/// starts from `initial[i % len]` and draws from stream `i` of the seed.
pub fn kmc_sample(
    layout: &BathLayout,
    provider: &dyn RateProvider,
    initial: &[NuclearConfig],
    options: &KmcOptions,
) -> Result<KmcResult> {
    if initial.is_empty() || options.n_traj == 0 {
        return Err(BathError::InvalidParams("need at least one trajectory and one initial configuration".into()));
    }
    if initial.iter().any(|c| !layout.contains(c)) {
        return Err(BathError::InvalidParams("initial configuration outside the spin ranges".into()));
    }
    let h = options.horizon;
    if !(h.max_time > 0.0) || (h.max_time.is_infinite() && h.max_events == u64::MAX) {
        return Err(BathError::InvalidParams("horizon must be positive and finite in time or events".into()));
    }
    let runs: Vec<(KmcTrajectory, BTreeMap<i64, (f64, f64)>)> = (0..options.n_traj)
        .into_par_iter()
        .map(|i| run_one(layout, provider, initial[i % initial.len()].clone(), i as u64, options))
        .collect::<Result<_>>()?;

    let mut merged: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    let mut trajectories = Vec::with_capacity(runs.len());
    let mut total_events = 0;
    for (traj, hist) in runs {
        let dwell: f64 = hist.values().map(|v| v.1).sum();
        for (k, (field, t)) in hist {
            merged.entry(k).or_insert((field, 0.0)).1 += if dwell.is_infinite() {
                if t.is_infinite() { 1.0 } else { 0.0 }
            } else {
                t / dwell
            };
        }
        total_events += traj.n_events;
        trajectories.push(traj);
    }
    let (grid, weights): (Vec<f64>, Vec<f64>) = merged.into_values().unzip();
    Ok(KmcResult { trajectories, histogram: FieldDistribution::new(grid, weights)?, total_events })
}

fn run_one(
    layout: &BathLayout,
    provider: &dyn RateProvider,
    mut config: NuclearConfig,
    stream: u64,
    options: &KmcOptions,
) -> Result<(KmcTrajectory, BTreeMap<i64, (f64, f64)>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(stream);
    let mut field = layout.field(&config);
    let mut hist: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    let mut events = Vec::new();
    let (mut t, mut n_events, mut absorbed) = (0.0, 0u64, false);
    let mut moves: Vec<(usize, FlipDirection, f64)> = Vec::with_capacity(2 * layout.n_nuclei());
    let burn_in = options.burn_in_events;
    let max_time = options.horizon.max_time;

    // Histogram window starts after the burn-in events.
    let record = |hist: &mut BTreeMap<i64, (f64, f64)>, field: f64, dt: f64, n: u64| {
        if n >= burn_in && dt > 0.0 {
            hist.entry(field_key(field)).or_insert((field, 0.0)).1 += dt;
        }
    };

    while n_events < options.horizon.max_events {
        moves.clear();
        let mut total = 0.0;
        for k in 0..layout.n_nuclei() {
            for dir in [FlipDirection::Raise, FlipDirection::Lower] {
                if !layout.can_flip(&config, k, dir) {
                    continue;
                }
                let r = provider.flip_rate(k, dir, &config, field);
                if !r.is_finite() || r < 0.0 {
                    return Err(BathError::BadRate { field, rate: r });
                }
                if r > 0.0 {
                    total += r;
                    moves.push((k, dir, r));
                }
            }
        }
        if total == 0.0 {
            absorbed = true;
            record(&mut hist, field, max_time - t, n_events.max(burn_in));
            t = max_time;
            break;
        }
        let wait = -(1.0 - rng.random::<f64>()).ln() / total;
        if t + wait >= max_time {
            record(&mut hist, field, max_time - t, n_events);
            t = max_time;
            break;
        }
        record(&mut hist, field, wait, n_events);
        t += wait;
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = moves[moves.len() - 1];
        for &m in &moves {
            if pick < m.2 {
                chosen = m;
                break;
            }
            pick -= m.2;
        }
        let (k, dir, _) = chosen;
        config = moved(&config, k, dir);
        field += layout.field_step(k, dir);
        n_events += 1;
        if options.record_events {
            events.push(KmcEvent { time: t, nucleus: k, direction: dir });
        }
    }
    if hist.is_empty() {
        // Nothing after burn-in: fall back to the final state.
        hist.insert(field_key(field), (field, 1.0));
    }
    let traj = KmcTrajectory { final_config: config, n_events, elapsed: t, absorbed, events };
    Ok((traj, hist))
}
