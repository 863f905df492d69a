//! Serialization helpers for reports and plot data.

use crate::wavefront::WavefrontReport;
use serde::Serializer;
use std::io::Write;

/// Writes infinite orders as the string "inf".
pub fn ser_order<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

pub fn ser_opt_order<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_order(x, s),
        None => s.serialize_none(),
    }
}

/// One CSV of `log_a,log_eta,log_sup` per cone estimate, for gnuplot.
pub fn write_plot_csv<W: Write>(report: &WavefrontReport, cone: usize, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "log_a,log_eta,log_sup")?;
    if let Some(est) = report.estimates.get(cone) {
        for s in &est.samples {
            writeln!(w, "{},{},{}", s.a.ln(), s.eta.max(1e-300).ln(), s.sup.max(1e-300).ln())?;
        }
    }
    Ok(())
}
