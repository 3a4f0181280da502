use std::fmt::Write as _;
use std::path::Path;

use super::run::ResultRow;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "experiment,algorithm,x_value,sinr_db_mean,sinr_db_std,trials";

fn sorted(rows: &[ResultRow]) -> Result<Vec<&ResultRow>> {
    if rows.is_empty() {
        return Err(Error::Domain("no result rows to write".into()));
    }
    let mut v: Vec<&ResultRow> = rows.iter().collect();
    v.sort_by(|a, b| {
        a.algorithm
            .cmp(&b.algorithm)
            .then(a.x_value.total_cmp(&b.x_value))
    });
    Ok(v)
}

/// CSV text, one line per row, ordered by algorithm then x.
pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_HEADER}");
    for r in sorted(rows)? {
        let _ = writeln!(
            out,
            "{},{},{:?},{:?},{:?},{}",
            r.experiment, r.algorithm, r.x_value, r.sinr_db_mean, r.sinr_db_std, r.trials
        );
    }
    Ok(out)
}

pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, csv_string(rows)?)?;
    Ok(())
}

/// A standalone matplotlib script that reads `csv_path` and draws one curve
/// per algorithm.
pub fn plot_script(rows: &[ResultRow], csv_path: &str, x_label: &str) -> Result<String> {
    let rows = sorted(rows)?;
    let title = rows[0].experiment.clone();
    Ok(format!(
        r#"#!/usr/bin/env python3
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path:?}
curves = defaultdict(list)
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        curves[row["algorithm"]].append(
            (float(row["x_value"]), float(row["sinr_db_mean"]), float(row["sinr_db_std"]))
        )

fig, ax = plt.subplots()
for name, points in sorted(curves.items()):
    points.sort()
    xs = [p[0] for p in points]
    ax.plot(xs, [p[1] for p in points], marker="." if len(xs) < 30 else None, label=name)
ax.set_xlabel({x_label:?})
ax.set_ylabel("SINR (dB)")
ax.set_title({title:?})
ax.grid(True)
ax.legend()
out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
"#
    ))
}

pub fn emit_plot_script(
    rows: &[ResultRow],
    csv_path: &str,
    x_label: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, plot_script(rows, csv_path, x_label)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: &str, x: f64) -> ResultRow {
        ResultRow {
            experiment: "sinr-vs-snr".into(),
            algorithm: alg.into(),
            x_value: x,
            sinr_db_mean: -1.5,
            sinr_db_std: 0.25,
            trials: 7,
        }
    }

    #[test]
    fn empty_rows_are_an_error() {
        assert!(csv_string(&[]).is_err());
        assert!(plot_script(&[], "a.csv", "x").is_err());
    }

    #[test]
    fn one_row_gives_two_lines() {
        let s = csv_string(&[row("optimal", 0.0)]).unwrap();
        assert_eq!(s, format!("{CSV_HEADER}\nsinr-vs-snr,optimal,0.0,-1.5,0.25,7\n"));
        assert_eq!(s.lines().count(), 2);
    }

    #[test]
    fn rows_are_ordered_by_algorithm_then_x() {
        let mut rows = Vec::new();
        for x in (0..10).rev() {
            for alg in ["wc-cmv", "optimal", "loaded-smi", "wc-ccm"] {
                rows.push(row(alg, x as f64 * 2.5));
            }
        }
        let s = csv_string(&rows).unwrap();
        let lines: Vec<&str> = s.lines().skip(1).collect();
        assert_eq!(lines.len(), 40);
        assert!(lines[0].starts_with("sinr-vs-snr,loaded-smi,0.0,"));
        assert!(lines[9].starts_with("sinr-vs-snr,loaded-smi,22.5,"));
        assert!(lines[39].starts_with("sinr-vs-snr,wc-cmv,22.5,"));
    }

    #[test]
    fn plot_script_mentions_inputs() {
        let s = plot_script(&[row("wc-ccm", 1.0)], "out.csv", "SNR (dB)").unwrap();
        assert!(s.starts_with("#!/usr/bin/env python3"));
        assert!(s.contains("\"out.csv\"") && s.contains("\"SNR (dB)\""));
    }
}
