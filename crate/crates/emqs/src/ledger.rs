//! CSV serialization of the per-step energy ledger.
//!
//! Fixed column order (one header row, '.' decimal, RFC-4180 style):
//! step, t, h_quadratic, h_fieldwise, dissipation, port_power,
//! balance_residual, gauge_residual, lambda_max, flux_residual.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use emqs_core::integrator::LedgerRow;

pub const COLUMNS: [&str; 10] = [
    "step",
    "t",
    "h_quadratic",
    "h_fieldwise",
    "dissipation",
    "port_power",
    "balance_residual",
    "gauge_residual",
    "lambda_max",
    "flux_residual",
];

/// Writes the rows whose step index is a multiple of `stride` (step 0
/// included), yielding steps/stride + 1 rows plus the header.
pub fn write_csv<W: Write>(mut w: W, ledger: &[LedgerRow], stride: usize) -> io::Result<()> {
    writeln!(w, "{}", COLUMNS.join(","))?;
    for row in ledger.iter().filter(|r| r.step % stride == 0) {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            row.step,
            row.t,
            row.h_quadratic,
            row.h_fieldwise,
            row.dissipation,
            row.port_power,
            row.balance_residual,
            row.gauge_residual,
            row.lambda_max,
            row.flux_residual
        )?;
    }
    Ok(())
}

pub fn write_csv_file(path: &Path, ledger: &[LedgerRow], stride: usize) -> io::Result<()> {
    let mut f = BufWriter::new(fs::File::create(path)?);
    write_csv(&mut f, ledger, stride)?;
    f.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(step: usize) -> LedgerRow {
        LedgerRow {
            step,
            t: step as f64 * 0.5,
            h_quadratic: 1.25,
            h_fieldwise: 1.25,
            dissipation: 0.0,
            port_power: 0.0,
            balance_residual: 0.0,
            gauge_residual: 0.0,
            lambda_max: 0.0,
            flux_residual: 0.0,
        }
    }

    #[test]
    fn row_count_is_steps_over_stride_plus_one() {
        let ledger: Vec<LedgerRow> = (0..=10).map(row).collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &ledger, 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 10 / 2 + 1);
        assert_eq!(lines[0], COLUMNS.join(","));
        assert!(lines[1].starts_with("0,0,1.25,"));
        assert!(lines.last().unwrap().starts_with("10,5,"));
    }
}
