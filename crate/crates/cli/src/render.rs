//! Table, JSON and CSV renderings of command results.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::document::{fmt17, AnalysisDocument, SettingsF};
use crate::error::{CliError, Result};
use crate::input::StateFile;
use crate::simulate::SimulationReport;
use crate::sweep::SweepRow;
use crate::verify::VerifySummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl Format {
    /// `.json` and `.csv` paths pick their format; anything else uses `fallback`.
    pub fn for_path(path: &Path, fallback: Format) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            _ => fallback,
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::input(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::input(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn vec3(v: &[f64; 3]) -> String {
    format!("({:+.6}, {:+.6}, {:+.6})", v[0], v[1], v[2])
}

fn describe_input(input: &StateFile) -> String {
    match (&input.family, &input.params) {
        (Some(f), Some(p)) => format!("{f} {}", serde_json::Value::Object(p.clone())),
        (Some(f), None) => f.clone(),
        _ => "explicit matrix".to_string(),
    }
}

pub fn analysis(doc: &AnalysisDocument, format: Format) -> Result<String> {
    match format {
        Format::Json => json(doc),
        Format::Csv => {
            let fields = doc.csv_fields();
            let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            csv_text(&header, &[fields.into_iter().map(|(_, v)| v).collect()])
        }
        Format::Table => {
            let r = &doc.report;
            let mut s = String::new();
            let _ = writeln!(s, "state           {}", describe_input(&doc.input));
            let _ = writeln!(s, "u               {}", vec3(&doc.bloch.u));
            let _ = writeln!(s, "v               {}", vec3(&doc.bloch.v));
            for (i, row) in doc.bloch.beta.iter().enumerate() {
                let label = if i == 0 { "beta_M" } else { "" };
                let _ = writeln!(s, "{label:<16}{}", vec3(row));
            }
            let _ = writeln!(s, "F_max           {:.12}", r.f_max);
            let _ = writeln!(s, "G_max           {:.12}", r.g_max);
            let _ = writeln!(s, "P_E             {:.12}", r.p_e);
            let sv = r.singular_values;
            let _ = writeln!(s, "singular values {:.12} {:.12} {:.12}", sv[0], sv[1], sv[2]);
            let _ = writeln!(s, "|beta|          {:.12}", r.beta_norm);
            let _ = writeln!(s, "gamma delta eta {:.9} {:.9} {:.9}", r.gamma, r.delta, r.eta);
            let _ = writeln!(s, "X = n x n'      {}  |X| = {:.9}", vec3(&r.x_vec), r.x_norm);
            let _ = writeln!(s, "Y = m x m'      {}  |Y| = {:.9}", vec3(&r.y_vec), r.y_norm);
            let _ = writeln!(s, "rank beta_M     {}", r.beta_rank);
            let _ = writeln!(s, "entangled       {}", r.entangled);
            let _ = writeln!(s, "CHSH |F| <= 2   {}", if r.chsh_violation { "violated" } else { "holds" });
            let _ = writeln!(
                s,
                "|F| <= G_max    {}",
                if r.generalized_violation { "violated" } else { "holds" }
            );
            match r.identity_residuals {
                Some([a, b]) => {
                    let _ = writeln!(s, "|X||Y| identity residuals {a:.3e} {b:.3e}");
                }
                None => {
                    let _ = writeln!(s, "|X||Y| identity undefined (F_max = 0)");
                }
            }
            write_settings(&mut s, &r.settings_f);
            let _ = writeln!(s, "l, h            {} {}", vec3(&r.settings_g.l), vec3(&r.settings_g.h));
            if let Some(o) = &doc.oracle {
                let _ = writeln!(
                    s,
                    "oracle          F {:.12} (delta {:.3e})  G {:.12} (delta {:.3e})  restarts {}",
                    o.f_max, o.delta_f, o.g_max, o.delta_g, o.restarts
                );
            }
            if let Some(sh) = &doc.shots {
                let _ = writeln!(
                    s,
                    "shots           {:.6} +/- {:.6} ({} per term, analytic {:.6})",
                    sh.estimate, sh.standard_error, sh.shots_per_term, sh.analytic
                );
            }
            Ok(s)
        }
    }
}

fn write_settings(s: &mut String, f: &SettingsF) {
    let _ = writeln!(s, "n, n'           {} {}", vec3(&f.n), vec3(&f.n_prime));
    let _ = writeln!(s, "m, m'           {} {}", vec3(&f.m), vec3(&f.m_prime));
}

pub fn sweep(rows: &[SweepRow], param: &str, format: Format) -> Result<String> {
    let with_bound = rows.iter().any(|r| r.separable_per_cited_bound.is_some());
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut header = vec![param, "f_max", "g_max", "p_e", "beta_rank", "entangled"];
            if with_bound {
                header.push("separable_per_cited_bound");
            }
            let data: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![
                        fmt17(r.param),
                        fmt17(r.f_max),
                        fmt17(r.g_max),
                        fmt17(r.p_e),
                        r.beta_rank.to_string(),
                        r.entangled.to_string(),
                    ];
                    if let Some(b) = r.separable_per_cited_bound {
                        row.push(b.to_string());
                    }
                    row
                })
                .collect();
            csv_text(&header, &data)
        }
        Format::Table => {
            let mut s = format!(
                "{param:>8} {:>14} {:>14} {:>14} {:>4} {:>9}",
                "f_max", "g_max", "p_e", "rank", "entangled"
            );
            if with_bound {
                s.push_str("  separable_per_cited_bound");
            }
            s.push('\n');
            for r in rows {
                let _ = write!(
                    s,
                    "{:>8.4} {:>14.10} {:>14.10} {:>14.10} {:>4} {:>9}",
                    r.param, r.f_max, r.g_max, r.p_e, r.beta_rank, r.entangled
                );
                if let Some(b) = r.separable_per_cited_bound {
                    let _ = write!(s, "  {b}");
                }
                s.push('\n');
            }
            Ok(s)
        }
    }
}

pub fn verify(summary: &VerifySummary, format: Format) -> Result<String> {
    match format {
        Format::Json => json(summary),
        Format::Csv => {
            let rows: Vec<Vec<String>> = summary
                .worst
                .iter()
                .map(|w| vec![w.check.name().to_string(), fmt17(w.delta), w.state_seed.to_string()])
                .collect();
            csv_text(&["check", "worst_delta", "state_seed"], &rows)
        }
        Format::Table => {
            let mut s = format!(
                "verified {} random states (seeds {}..{}) at tolerance {:e}\n",
                summary.count,
                summary.seed,
                summary.seed.wrapping_add(summary.count as u64),
                summary.tolerance
            );
            for w in &summary.worst {
                let _ = writeln!(s, "  {:<20} worst delta {:.3e}  (state seed {})", w.check.name(), w.delta, w.state_seed);
            }
            if summary.passed() {
                s.push_str("PASS\n");
            } else {
                let _ = writeln!(s, "FAIL: {} check(s) above tolerance", summary.failures.len());
                for f in summary.failures.iter().take(20) {
                    let _ = writeln!(s, "  state seed {:<8} {:<20} delta {:.3e}", f.state_seed, f.check.name(), f.delta);
                }
                if summary.failures.len() > 20 {
                    let _ = writeln!(s, "  ... {} more", summary.failures.len() - 20);
                }
            }
            Ok(s)
        }
    }
}

const TERM_LABELS: [&str; 4] = ["E(A,B)", "E(A,B')", "E(A',B)", "E(A',B')"];

pub fn simulation(report: &SimulationReport, format: Format) -> Result<String> {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut header: Vec<&str> = TERM_LABELS.to_vec();
            header.extend(["estimate", "standard_error", "analytic", "shots_per_term", "seed"]);
            let mut row: Vec<String> = report.terms.iter().map(|&x| fmt17(x)).collect();
            row.extend([
                fmt17(report.estimate),
                fmt17(report.standard_error),
                fmt17(report.analytic),
                report.shots_per_term.to_string(),
                report.seed.to_string(),
            ]);
            csv_text(&header, &[row])
        }
        Format::Table => {
            let mut s = format!("state           {}\n", describe_input(&report.input));
            write_settings(&mut s, &report.settings);
            for ((label, mean), se) in TERM_LABELS.iter().zip(report.terms).zip(report.term_standard_errors) {
                let _ = writeln!(s, "{label:<16}{mean:+.6} +/- {se:.6}");
            }
            let _ = writeln!(
                s,
                "CHSH estimate   {:.6} +/- {:.6}  ({} shots per term, seed {})",
                report.estimate, report.standard_error, report.shots_per_term, report.seed
            );
            let _ = writeln!(s, "analytic F      {:.6}", report.analytic);
            let _ = writeln!(s, "P_E             {:.6}", report.p_e);
            let verdict = if report.estimate > 2.0 { "violates" } else { "does not violate" };
            let _ = writeln!(s, "estimate {verdict} |F| <= 2");
            Ok(s)
        }
    }
}
