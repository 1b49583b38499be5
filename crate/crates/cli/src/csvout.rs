//! Deterministic CSV emission for the diagnostic series and field exports.
//!
//! Floats use Rust's shortest round-trip formatting, which is
//! locale-independent; identical series produce identical bytes.

use nsf_core::diagnostics::DiagnosticSeries;
use crate::snapshot::StateBundle;

/// Fixed column order of the diagnostics CSV.
pub const DIAGNOSTIC_COLUMNS: &str = "time,mass,kinetic,internal,total_energy,g_total,entropy_total,theta_gamma_norm,conduction_dissipation,velocity_dissipation_weighted,phi_theta,rho_gamma_a";

/// Renders the series, one row per sample time.
pub fn diagnostics_csv(series: &DiagnosticSeries) -> String {
    let mut out = String::new();
    out.push_str(DIAGNOSTIC_COLUMNS);
    out.push('\n');
    for k in 0..series.times.len() {
        let row = [
            series.times[k],
            series.mass[k],
            series.kinetic[k],
            series.internal[k],
            series.total_energy[k],
            series.g_total[k],
            series.entropy_total[k],
            series.theta_gamma_norm[k],
            series.conduction_dissipation[k],
            series.velocity_dissipation_weighted[k],
            series.phi_theta[k],
            series.rho_gamma_a[k],
        ];
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Renders one state bundle as a per-cell CSV.
pub fn state_csv(bundle: &StateBundle) -> String {
    let grid = bundle.grid;
    let mut out = String::new();
    if grid.dim == 1 {
        out.push_str("x,rho,m_x,g,theta\n");
    } else {
        out.push_str("x,y,rho,m_x,m_y,g,theta\n");
    }
    for c in 0..grid.cells() {
        let x = grid.coord(c, 0);
        if grid.dim == 1 {
            out.push_str(&format!(
                "{x},{},{},{},{}\n",
                bundle.rho.values[c], bundle.m.comps[0][c], bundle.g.values[c], bundle.theta.values[c]
            ));
        } else {
            let y = grid.coord(c, 1);
            out.push_str(&format!(
                "{x},{y},{},{},{},{},{}\n",
                bundle.rho.values[c],
                bundle.m.comps[0][c],
                bundle.m.comps[1][c],
                bundle.g.values[c],
                bundle.theta.values[c]
            ));
        }
    }
    out
}

/// Renders an MMS convergence table.
pub fn mms_csv(rows: &[nsf_core::mms::MmsRow]) -> String {
    let mut out = String::from("n,error,observed_order\n");
    for row in rows {
        match row.order {
            Some(order) => out.push_str(&format!("{},{},{}\n", row.n, row.error, order)),
            None => out.push_str(&format!("{},{},\n", row.n, row.error)),
        }
    }
    out
}
