//! Run reports and file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::SolverError;

/// Cell-center values of every output variable at one time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub x: Vec<f64>,
    /// One column per output variable, parallel to `RunReport::var_names`.
    pub columns: Vec<Vec<f64>>,
}

/// Per-step detector statistics of a limited run.
#[derive(Debug, Clone)]
pub struct StepStats {
    pub step: usize,
    pub time: f64,
    pub n_cad: usize,
    pub n_pad: usize,
    pub n_nad: usize,
    /// Cells per cascade rank at the end of the step.
    pub rank_counts: Vec<usize>,
    pub unresolved: usize,
}

#[derive(Debug, Clone, Default)]
pub struct MoodRunStats {
    pub per_step: Vec<StepStats>,
    pub total_demotions: usize,
    pub max_unresolved: usize,
}

/// Everything one solver run produces.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub test_name: String,
    pub scheme_label: String,
    pub n_cells: usize,
    pub var_names: Vec<String>,
    pub snapshots: Vec<Snapshot>,
    /// Reference solution at the final time, when the case has one.
    pub reference: Option<Snapshot>,
    /// L1 error per output variable against the reference:
    /// `dx * sum_i |v_i - v_ref(x_i)|` over interior cells.
    pub l1_errors: Option<Vec<f64>>,
    pub steps: usize,
    /// Wall-clock seconds of the time loop only (no IO).
    pub cpu_seconds: f64,
    /// `sum_i u_i * dx` per conserved component at t = 0 and t_final.
    pub initial_integrals: Vec<f64>,
    pub final_integrals: Vec<f64>,
    /// All interior values stayed finite after every accepted step.
    pub finite_throughout: bool,
    /// Every accepted step satisfied the physical admissibility check.
    pub admissible_throughout: bool,
    pub mood: Option<MoodRunStats>,
}

impl RunReport {
    /// Largest relative drift of the conserved integrals.
    pub fn mass_drift(&self) -> f64 {
        self.initial_integrals
            .iter()
            .zip(&self.final_integrals)
            .map(|(a, b)| (b - a).abs() / a.abs().max(1e-300))
            .fold(0.0, f64::max)
    }

    /// Min/max of one output variable in the final snapshot.
    pub fn final_range(&self, var: usize) -> (f64, f64) {
        let col = &self.snapshots.last().expect("run has no snapshots").columns[var];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in col {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// One row of a mesh-refinement study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub l1_error: f64,
    /// `log(e_coarse / e_fine) / log(N_fine / N_coarse)`; blank on the
    /// first row or when an error vanishes.
    pub order: Option<f64>,
    pub cpu_seconds: f64,
}

fn sci(v: f64) -> String {
    format!("{v:.12e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), SolverError> {
    let mut file = fs::File::create(path).map_err(|source| SolverError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(contents.as_bytes())
        .map_err(|source| SolverError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn snapshot_csv(var_names: &[String], snap: &Snapshot) -> String {
    let mut out = String::from("x");
    for name in var_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..snap.x.len() {
        out.push_str(&sci(snap.x[i]));
        for col in &snap.columns {
            out.push(',');
            out.push_str(&sci(col[i]));
        }
        out.push('\n');
    }
    out
}

/// Write solution CSVs (one per snapshot), the reference CSV, the
/// convergence table, the optional demotion log, and a gnuplot script
/// tying them together. Returns the written paths.
pub fn emit_outputs(
    report: &RunReport,
    convergence: Option<&[ConvergenceRow]>,
    out_dir: &Path,
    log_demotions: bool,
) -> Result<Vec<PathBuf>, SolverError> {
    fs::create_dir_all(out_dir).map_err(|source| SolverError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let mut plot_lines: Vec<String> = Vec::new();

    if report.snapshots.is_empty() {
        // Header-only file so downstream tooling still finds the schema.
        let path = out_dir.join("solution.csv");
        let mut header = String::from("x");
        for name in &report.var_names {
            header.push(',');
            header.push_str(name);
        }
        header.push('\n');
        write_file(&path, &header)?;
        written.push(path);
    }
    for snap in &report.snapshots {
        let name = format!("solution_t{:.6}.csv", snap.time);
        let path = out_dir.join(&name);
        write_file(&path, &snapshot_csv(&report.var_names, snap))?;
        plot_lines.push(format!(
            "'{}' using 1:2 with linespoints title '{} {} t={:.6}'",
            name, report.scheme_label, report.var_names[0], snap.time
        ));
        written.push(path);
    }
    if let Some(reference) = &report.reference {
        let path = out_dir.join("reference.csv");
        write_file(&path, &snapshot_csv(&report.var_names, reference))?;
        plot_lines.push(format!(
            "'reference.csv' using 1:2 with lines title 'reference {}'",
            report.var_names[0]
        ));
        written.push(path);
    }

    if let Some(rows) = convergence {
        let mut csv = String::from("N,L1_error,order,cpu_seconds\n");
        for row in rows {
            let order = row.order.map(|o| format!("{o:.3}")).unwrap_or_default();
            csv.push_str(&format!(
                "{},{},{},{}\n",
                row.n_cells,
                sci(row.l1_error),
                order,
                sci(row.cpu_seconds)
            ));
        }
        let path = out_dir.join("convergence.csv");
        write_file(&path, &csv)?;
        written.push(path);
    }

    if log_demotions {
        if let Some(mood) = &report.mood {
            let ranks = mood
                .per_step
                .first()
                .map(|s| s.rank_counts.len().saturating_sub(1))
                .unwrap_or(2);
            let mut csv = String::from("step,time,n_cad,n_pad,n_nad");
            for r in 1..=ranks {
                csv.push_str(&format!(",n_rank{r}"));
            }
            csv.push('\n');
            for s in &mood.per_step {
                csv.push_str(&format!(
                    "{},{},{},{},{}",
                    s.step,
                    sci(s.time),
                    s.n_cad,
                    s.n_pad,
                    s.n_nad
                ));
                for r in 1..=ranks {
                    csv.push_str(&format!(",{}", s.rank_counts.get(r).copied().unwrap_or(0)));
                }
                csv.push('\n');
            }
            let path = out_dir.join("demotions.csv");
            write_file(&path, &csv)?;
            written.push(path);
        }
    }

    let mut script = String::from(
        "# gnuplot script for side-by-side scheme/reference comparison\n\
         set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'x'\n",
    );
    if plot_lines.is_empty() {
        script.push_str("# no solution files were produced by this run\n");
    } else {
        script.push_str("plot \\\n  ");
        script.push_str(&plot_lines.join(", \\\n  "));
        script.push('\n');
    }
    let path = out_dir.join("plot.gp");
    write_file(&path, &script)?;
    written.push(path);

    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare_report() -> RunReport {
        RunReport {
            test_name: "t".into(),
            scheme_label: "s".into(),
            n_cells: 4,
            var_names: vec!["rho".into(), "u".into(), "p".into()],
            snapshots: vec![],
            reference: None,
            l1_errors: None,
            steps: 0,
            cpu_seconds: 0.0,
            initial_integrals: vec![1.0, 0.5],
            final_integrals: vec![1.0 + 3e-13, 0.5],
            finite_throughout: true,
            admissible_throughout: true,
            mood: None,
        }
    }

    #[test]
    fn empty_snapshot_list_writes_header_only_csv() {
        let dir = std::env::temp_dir().join(format!("catmood-empty-{}", std::process::id()));
        let files = emit_outputs(&bare_report(), None, &dir, false).unwrap();
        let solution = files.iter().find(|p| p.ends_with("solution.csv")).unwrap();
        assert_eq!(fs::read_to_string(solution).unwrap(), "x,rho,u,p\n");
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn mass_drift_is_the_worst_component() {
        let report = bare_report();
        let drift = report.mass_drift();
        assert!(drift > 2e-13 && drift < 4e-13, "drift {drift:e}");
    }
}
