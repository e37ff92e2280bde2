use hfine_bath::{
    analytic_distribution, birth_death_steady, kmc_sample, narrowing_metrics, optimal_narrowing, random_configs,
    BathLayout, FieldDistribution, KmcHorizon, KmcOptions, NarrowingSweep,
};
use hfine_lindblad::units::{angular_to_mhz, mhz_to_angular};

use super::{CommandOutput, RunInput};
use crate::config::BathModel;
use crate::error::{CliError, Result};
use crate::output::{Column, OutputFile, Provenance, Table};

fn distribution_file(name: &str, title: &str, dist: &FieldDistribution, prov: &Provenance<'_>) -> OutputFile {
    let mut t = Table::new(vec![
        Column::new("h_MHz", "MHz", "nuclear field"),
        Column::new("probability", "1", "probability mass at this field"),
    ]);
    for (h, q) in dist.grid().iter().zip(dist.probabilities()) {
        t.push(vec![angular_to_mhz(*h), *q]);
    }
    OutputFile { name: name.into(), contents: t.render(prov, title) }
}

/// Narrowed bath distribution in closed form, from the birth–death chain and
/// optionally by kinetic Monte Carlo, with the optimal-drive scan.
pub fn narrowing(input: &RunInput<'_>) -> Result<CommandOutput> {
    let cfg = input.config;
    let params = cfg.narrowing_params()?;
    let prov = input.provenance("narrowing");
    let mut out = CommandOutput::default();

    let analytic = analytic_distribution(&params)?;
    let lattice = birth_death_steady(&params)?;
    out.files.push(distribution_file("narrowing_analytic.csv", "continuum narrowed distribution", &analytic, &prov));
    out.files.push(distribution_file("narrowing_birth_death.csv", "birth-death steady state", &lattice, &prov));

    let chosen = match cfg.run.bath_model {
        BathModel::Continuum => &analytic,
        BathModel::Lattice => &lattice,
    };
    let mut report = narrowing_metrics(chosen, &params);
    out.summary.insert("sigma_ratio".into(), report.ratio);
    out.summary.insert("sigma_ratio_analytic".into(), analytic.sigma() / params.sigma_eq());
    out.summary.insert("sigma_ratio_birth_death".into(), lattice.sigma() / params.sigma_eq());
    out.summary.insert("sigma_eq_MHz".into(), angular_to_mhz(params.sigma_eq()));
    out.summary.insert("delta_s_MHz".into(), angular_to_mhz(params.delta_s()));
    out.summary.insert("delta0_MHz".into(), angular_to_mhz(params.delta0));
    out.summary.insert("rate_ratio".into(), params.flip_rate / params.gamma_dep());

    if cfg.run.kmc_events > 0 {
        let n_traj = cfg.run.kmc_trajectories.max(1);
        let layout = BathLayout::uniform_carbons(params.n_spins, params.a_par);
        let provider = |_: usize, _: hfine_adiabatic::FlipDirection, _: &hfine_adiabatic::NuclearConfig, h: f64| {
            params.rate_at(h)
        };
        let options = KmcOptions {
            horizon: KmcHorizon { max_time: f64::INFINITY, max_events: cfg.run.kmc_events.div_ceil(n_traj as u64) },
            burn_in_events: cfg.run.kmc_burn_in_events,
            n_traj,
            seed: input.seed,
            record_events: false,
        };
        let initial = random_configs(&layout, n_traj, input.seed);
        let kmc = kmc_sample(&layout, &provider, &initial, &options)?;
        out.summary.insert("kmc_events".into(), kmc.total_events as f64);
        out.summary.insert("kmc_tv_vs_birth_death".into(), kmc.histogram.total_variation(&lattice, 1e-9 * params.a_par));
        out.summary.insert("sigma_ratio_kmc".into(), kmc.histogram.sigma() / params.sigma_eq());
        out.files.push(distribution_file("narrowing_kmc.csv", "kinetic Monte Carlo residence histogram", &kmc.histogram, &prov));
    }

    if let Some(grid) = &cfg.run.optimal_omega_a_mhz {
        let mut rabi: Vec<f64> = grid.values()?.into_iter().map(mhz_to_angular).collect();
        rabi.sort_by(f64::total_cmp);
        let sweep = NarrowingSweep {
            n_spins: params.n_spins,
            a_par: params.a_par,
            a_perp: params.a_perp,
            gamma_c: params.gamma_c,
            gamma_n: params.gamma_n,
        };
        let opt = optimal_narrowing(&cfg.nv_params(), &sweep, &rabi).map_err(|e| CliError::from(e).context("optimal scan"))?;
        let mut t = Table::new(vec![
            Column::new("Omega_A_MHz", "MHz", "Lambda-laser Rabi frequency"),
            Column::new("delta0_MHz", "MHz", "dip half width"),
            Column::new("sigma_ratio", "1", "sigma / sigma_eq of the continuum distribution"),
        ]);
        for s in &opt.scan {
            t.push(vec![angular_to_mhz(s.rabi_a), angular_to_mhz(s.delta0), s.ratio]);
        }
        out.files.push(OutputFile { name: "narrowing_optimal.csv".into(), contents: t.render(&prov, "optimal drive scan") });
        out.summary.insert("optimal_Omega_A_MHz".into(), angular_to_mhz(opt.best.rabi_a));
        out.summary.insert("optimal_sigma_ratio".into(), opt.best.ratio);
        out.summary.insert("optimal_sigma_ratio_formula".into(), opt.analytic_ratio);
        out.summary.insert("optimal_delta0_MHz".into(), angular_to_mhz(opt.best.delta0));
        out.summary.insert("optimal_delta0_formula_MHz".into(), angular_to_mhz(opt.analytic_delta0));
        out.summary.insert("optimal_scan_unimodal".into(), if opt.is_unimodal() { 1.0 } else { 0.0 });
        report.optimum = Some((opt.best.rabi_a, opt.best.delta0));
    }

    out.files.push(OutputFile { name: "narrowing_report.txt".into(), contents: report.to_key_value() });
    Ok(out)
}
