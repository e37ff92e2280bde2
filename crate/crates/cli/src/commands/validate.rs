use hfine_adiabatic::{relaxation_generator, FlipDirection, NuclearConfig, Transition};
use hfine_bath::{kmc_sample, random_configs, BathLayout, BirthDeathChain, Horizon, KmcHorizon, KmcOptions};
use hfine_lindblad::units::{angular_to_mhz, mhz_to_angular};
use hfine_lindblad::{build_liouvillian, evolve, Complex64, DensityMatrix};
use hfine_nv::{chi_factors, nv_model_at, nv_system, NvState};

use super::{nv_steady, CommandOutput, RunInput};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::output::{render_text_table, Column, OutputFile};

const TRACE_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-9;
const SPLIT_TOL: f64 = 1e-12;
const BALANCE_TOL: f64 = 1e-9;
const KMC_CARBONS: usize = 12;
const MASTER_CARBONS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation seen, NaN when the check could not run.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

fn check(name: &'static str, tolerance: f64, run: impl FnOnce() -> Result<(f64, String)>) -> CheckResult {
    match run() {
        Ok((value, detail)) => CheckResult { name, passed: value <= tolerance, value, tolerance, detail },
        Err(e) => CheckResult { name, passed: false, value: f64::NAN, tolerance, detail: e.to_string() },
    }
}

fn trace_and_hermiticity(cfg: &ScenarioConfig) -> Result<(f64, String)> {
    let p = cfg.nv_params();
    let l = build_liouvillian(&nv_model_at(&p, p.zeeman)?, None)?;
    let rho0 = DensityMatrix::basis_state(l.basis(), NvState::Zero.index());
    let times = [0.0, 0.01, 0.1, 1.0, 10.0];
    let states = evolve(&l, &rho0, &times)?;
    let mut worst = 0.0f64;
    for rho in &states {
        let op = rho.as_operator();
        worst = worst.max((op.trace() - Complex64::new(1.0, 0.0)).norm()).max(op.hermitian_deviation());
    }
    Ok((worst, format!("{} times up to {} us", times.len(), times[times.len() - 1])))
}

fn steady_positivity(cfg: &ScenarioConfig) -> Result<(f64, String)> {
    let p = cfg.nv_params();
    let grid = cfg.run.delta_m_mhz.values()?;
    let picks: Vec<f64> = (0..5).map(|i| grid[i * (grid.len() - 1) / 4]).chain([angular_to_mhz(p.zeeman)]).collect();
    let mut worst = 0.0f64;
    for d in &picks {
        let rho = nv_steady(&p, mhz_to_angular(*d)).map_err(|e| e.context(format!("delta_m = {d} MHz")))?;
        let tr = (rho.as_operator().trace() - Complex64::new(1.0, 0.0)).norm();
        worst = worst.max(tr).max(-rho.min_eigenvalue());
    }
    Ok((worst, format!("{} detunings", picks.len())))
}

/// `golden + coherent = perturbative` for every NV flip block.
fn rate_split(cfg: &ScenarioConfig) -> Result<(f64, String)> {
    let p = cfg.nv_params();
    let carbons = cfg.carbon_sites()?;
    let (sys, blocks) = nv_system(&p, &cfg.nitrogen_site(), &carbons)?;
    let mut worst = 0.0f64;
    for b in &blocks {
        let twice: Vec<i32> = (0..=carbons.len())
            .map(|k| match (k, b.nucleus == k && b.direction == FlipDirection::Raise) {
                (0, _) => 0,
                (_, true) => -1,
                _ => 1,
            })
            .collect();
        let r = sys.transition_rate_perturbative(b, &NuclearConfig::from_twice(twice))?;
        let split = r.golden_part.unwrap_or(f64::NAN) + r.coherent_part.unwrap_or(f64::NAN);
        let scale = r.value.abs().max(f64::MIN_POSITIVE);
        worst = worst.max((split - r.value).abs() / scale);
    }
    Ok((worst, format!("{} blocks, relative error", blocks.len())))
}

/// Stationary state of the ¹⁴N chain built from the closed-form rates.
fn nitrogen_generator(cfg: &ScenarioConfig) -> Result<(f64, String)> {
    let p = cfg.nv_params();
    let site = cfg.nitrogen_site();
    let chi = chi_factors(&p)?;
    let coupling = site.ground.powi(2) * chi.ground + site.excited.powi(2) * chi.excited_sum();
    let mut transitions = Vec::new();
    for m0 in -1i32..=1 {
        let delta = p.zeeman + site.ground * m0 as f64;
        let ey = nv_steady(&p, delta)?.population(NvState::Ey.index());
        let w = coupling * ey + cfg.gamma_n();
        let from = (m0 + 1) as usize;
        if m0 > -1 {
            transitions.push(Transition { from, to: from - 1, rate: w });
        }
        if m0 < 1 {
            transitions.push(Transition { from, to: from + 1, rate: w });
        }
    }
    let pop = relaxation_generator(3, &transitions)?.stationary()?;
    let total: f64 = pop.iter().sum();
    let negative = pop.iter().fold(0.0f64, |a, &q| a.max(-q));
    Ok(((total - 1.0).abs().max(negative), format!("populations {pop:.6?}")))
}

fn detailed_balance(cfg: &ScenarioConfig) -> Result<(f64, String)> {
    let params = cfg.narrowing_params()?;
    let chain = BirthDeathChain::new(params.n_spins, params.a_par, |h| params.rate_at(h))?;
    let w = chain.steady_weights();
    let mut worst = 0.0f64;
    for k in 0..params.n_spins {
        let forward = w[k] * chain.up_rate(k);
        let backward = w[k + 1] * chain.down_rate(k + 1);
        let scale = forward.max(backward);
        if scale > 0.0 {
            worst = worst.max((forward - backward).abs() / scale);
        }
    }
    Ok((worst, format!("{} links", params.n_spins)))
}

fn kmc_determinism(cfg: &ScenarioConfig, seed: u64) -> Result<(f64, String)> {
    let params = cfg.narrowing_params()?;
    let layout = BathLayout::uniform_carbons(params.n_spins.min(KMC_CARBONS), params.a_par);
    let provider = |_: usize, _: FlipDirection, _: &NuclearConfig, h: f64| params.rate_at(h);
    let options = KmcOptions {
        horizon: KmcHorizon { max_time: f64::INFINITY, max_events: 2000 },
        burn_in_events: 100,
        n_traj: 4,
        seed,
        record_events: true,
    };
    let initial = random_configs(&layout, options.n_traj, seed);
    let a = kmc_sample(&layout, &provider, &initial, &options)?;
    let b = kmc_sample(&layout, &provider, &initial, &options)?;
    let differs = if a == b { 0.0 } else { 1.0 };
    Ok((differs, format!("{} events per run", a.total_events)))
}

/// Probability conservation of the enumerated bath master equation.
fn master_conservation(cfg: &ScenarioConfig) -> Result<(f64, String)> {
    let params = cfg.narrowing_params()?;
    let site = cfg.nitrogen_site();
    let mut coefficients = vec![site.ground];
    coefficients.extend([params.a_par; MASTER_CARBONS]);
    let mut spins = vec![2];
    spins.extend([1; MASTER_CARBONS]);
    let layout = BathLayout::new(coefficients, spins)?;
    let provider = |_: usize, _: FlipDirection, _: &NuclearConfig, h: f64| params.rate_at(h);
    let me = hfine_bath::ConfigurationMasterEquation::new(&layout, &provider)?;
    let n = me.configs().len();
    let mut initial = vec![0.0; n];
    initial[0] = 1.0;
    let t = 1.0 / params.rate_at(0.0).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for horizon in [Horizon::Time { initial, t }, Horizon::Steady] {
        let pops = me.solve(&horizon)?;
        let total: f64 = pops.probabilities.iter().sum();
        let negative = pops.probabilities.iter().fold(0.0f64, |a, &q| a.max(-q));
        worst = worst.max((total - 1.0).abs()).max(negative);
    }
    Ok((worst, format!("{n} configurations")))
}

pub fn validation_checks(cfg: &ScenarioConfig, seed: u64) -> Vec<CheckResult> {
    vec![
        check("trace_hermiticity", TRACE_TOL, || trace_and_hermiticity(cfg)),
        check("steady_state_positivity", POSITIVITY_TOL, || steady_positivity(cfg)),
        check("golden_plus_coherent", SPLIT_TOL, || rate_split(cfg)),
        check("nitrogen_generator", TRACE_TOL, || nitrogen_generator(cfg)),
        check("birth_death_detailed_balance", BALANCE_TOL, || detailed_balance(cfg)),
        check("kmc_determinism", 0.0, || kmc_determinism(cfg, seed)),
        check("master_equation_conservation", TRACE_TOL, || master_conservation(cfg)),
    ]
}

/// Runs every invariant on the scenario; any failure marks the run failed.
pub fn validate(input: &RunInput<'_>) -> Result<CommandOutput> {
    let results = validation_checks(input.config, input.seed);
    let columns = [
        Column::new("check", "-", "invariant name"),
        Column::new("status", "-", "PASS or FAIL"),
        Column::new("value", "1", "worst deviation found"),
        Column::new("tolerance", "1", "largest accepted deviation"),
        Column::new("detail", "-", "what was checked or the error raised"),
    ];
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.name.to_string(),
                if r.passed { "PASS" } else { "FAIL" }.to_string(),
                format!("{:e}", r.value),
                format!("{:e}", r.tolerance),
                r.detail.clone(),
            ]
        })
        .collect();
    let mut out = CommandOutput::default();
    let failed: Vec<String> =
        results.iter().filter(|r| !r.passed).map(|r| format!("{}: {}", r.name, r.detail)).collect();
    out.summary.insert("checks_passed".into(), (results.len() - failed.len()) as f64);
    out.summary.insert("checks_failed".into(), failed.len() as f64);
    out.files.push(OutputFile {
        name: "validate.csv".into(),
        contents: render_text_table(&input.provenance("validate"), "invariant checks", &columns, &rows),
    });
    if !failed.is_empty() {
        out.failure = Some(failed.join("; "));
    }
    Ok(out)
}
