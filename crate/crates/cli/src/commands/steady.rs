use hfine_lindblad::units::{angular_to_mhz, mhz_to_angular};
use hfine_nv::{analytic_steady_state, fit_cpt_dip, NvState};
use rayon::prelude::*;

use super::{nv_steady, CommandOutput, RunInput};
use crate::error::Result;
use crate::output::{Column, OutputFile, Table};

const NUMERIC: [(NvState, &str); 7] = [
    (NvState::Ey, "P_Ey"),
    (NvState::Zero, "P_0state"),
    (NvState::Dark, "P_d"),
    (NvState::Bright, "P_b"),
    (NvState::Singlet, "P_S"),
    (NvState::A1, "P_A1"),
    (NvState::A2, "P_A2"),
];

/// NV populations against the two-photon detuning `δ_m`, numeric and closed form.
pub fn steady_scan(input: &RunInput<'_>) -> Result<CommandOutput> {
    let cfg = input.config;
    let p = cfg.nv_params();
    let deltas = cfg.run.delta_m_mhz.values()?;
    // The closed form needs zero strain and both drives on; NaN otherwise.
    let analytic = analytic_steady_state(&p).ok();

    let rows: Vec<Vec<f64>> = deltas
        .par_iter()
        .map(|&d_mhz| {
            let d = mhz_to_angular(d_mhz);
            let rho = nv_steady(&p, d).map_err(|e| e.context(format!("delta_m = {d_mhz} MHz")))?;
            let mut row = vec![d_mhz];
            row.extend(NUMERIC.iter().map(|(s, _)| rho.population(s.index())));
            match &analytic {
                Some(a) => {
                    let q = a.populations(d);
                    row.extend([q.ey, q.zero, q.dark, q.singlet, q.a1, q.a2]);
                }
                None => row.extend([f64::NAN; 6]),
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut columns = vec![Column::new("delta_m_MHz", "MHz", "two-photon detuning including the nuclear field")];
    for (s, name) in NUMERIC {
        columns.push(Column::new(name, "1", format!("numeric steady-state population of {}", s.label())));
    }
    for name in ["P_Ey", "P_0state", "P_d", "P_S", "P_A1", "P_A2"] {
        columns.push(Column::new(format!("{name}_analytic"), "1", "closed form with the off-resonant correction"));
    }
    let table = Table { columns, rows };

    let mut out = CommandOutput::default();
    let ey: Vec<f64> = table.rows.iter().map(|r| r[1]).collect();
    let grid: Vec<f64> = deltas.iter().map(|&d| mhz_to_angular(d)).collect();
    if let Some(fit) = fit_cpt_dip(&grid, &ey) {
        out.summary.insert("fit_p0".into(), fit.p0);
        out.summary.insert("fit_delta0_MHz".into(), angular_to_mhz(fit.delta0));
        out.summary.insert("fit_offset".into(), fit.offset);
        out.summary.insert("fit_max_residual".into(), fit.max_residual);
    }
    if let Some(a) = &analytic {
        out.summary.insert("analytic_p0".into(), a.p0);
        out.summary.insert("analytic_delta0_MHz".into(), angular_to_mhz(a.delta0));
    }
    let argmin = ey.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| deltas[i]);
    if let Some(d) = argmin {
        out.summary.insert("argmin_delta_m_MHz".into(), d);
    }
    out.files.push(OutputFile {
        name: "steady_scan.csv".into(),
        contents: table.render(&input.provenance("steady-scan"), "NV steady-state populations"),
    });
    Ok(out)
}
