use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::report::{AnalysisReport, JsonMatrix, MetricSection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

pub fn emit_report(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Markdown => markdown(report),
    }
}

/// `x` with 12 significant digits; scientific outside `[1e-5, 1e12)`.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn complex(z: [f64; 2]) -> String {
    let im = sig12(z[1].abs());
    let sign = if z[1].is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{im}i", sig12(z[0]))
}

fn matrix(out: &mut String, m: &JsonMatrix) {
    let n = m.len();
    let _ = writeln!(out, "|{}", " |".repeat(n));
    let _ = writeln!(out, "|{}", "---|".repeat(n));
    for row in m {
        let cells: Vec<String> = row.iter().map(|&z| complex(z)).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out.push('\n');
}

fn metric(out: &mut String, title: &str, m: &MetricSection) {
    let _ = writeln!(out, "### {title}\n");
    if let Some(choice) = &m.choice {
        let _ = writeln!(out, "choice: {choice}");
    }
    let f = &m.flags;
    let _ = writeln!(
        out,
        "flags: hermitian={} involutory={} unitary={} real_symmetric={} simple={} positive_definite={}",
        f.hermitian, f.involutory, f.unitary, f.real_symmetric, f.simple, f.positive_definite
    );
    let _ = writeln!(out, "pseudo-Hermiticity residual: {}\n", sig12(m.residual));
    matrix(out, &m.matrix);
}

fn markdown(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Analysis report\n");
    let _ = writeln!(out, "dimension: {}", r.input.n);
    let _ = writeln!(
        out,
        "tolerance: abs={} rel={}\n",
        sig12(r.input.tol_abs),
        sig12(r.input.tol_rel)
    );
    let _ = writeln!(out, "### H\n");
    matrix(&mut out, &r.input.h);

    out.push_str("## Spectrum\n\n");
    match &r.spectrum {
        None => out.push_str("not computed\n\n"),
        Some(s) => {
            let _ = writeln!(out, "class: {}\n", s.class);
            for (k, z) in s.eigenvalues.iter().enumerate() {
                let sign = s
                    .signs
                    .as_ref()
                    .map(|v| format!(" (eta-norm sign {:+})", v[k]))
                    .unwrap_or_default();
                let _ = writeln!(out, "- E_{k} = {}{sign}", complex(*z));
            }
            if let Some(c) = s.condition {
                let _ = writeln!(out, "\ncondition number of D: {}", sig12(c));
            }
            out.push('\n');
        }
    }

    out.push_str("## Metrics\n\n");
    match &r.metrics {
        None => out.push_str("not computed\n\n"),
        Some(m) => {
            let dim = m.family.as_ref().map_or(0, |f| f.dimension);
            let _ = writeln!(out, "metric family dimension: {dim}\n");
            if let Some(f) = &m.family {
                for (k, b) in f.basis.iter().enumerate() {
                    let _ = writeln!(out, "### family basis {k}\n");
                    matrix(&mut out, b);
                }
            }
            if let Some(x) = &m.fundamental {
                metric(&mut out, "fundamental metric eta", x);
            }
            if let Some(x) = &m.eta_plus {
                metric(&mut out, "positive metric eta_+", x);
            }
            if let Some(x) = &m.eta_bar {
                metric(&mut out, "conjugate-pair metric eta_bar", x);
            }
        }
    }

    out.push_str("## Symmetry suite\n\n");
    match &r.suite {
        None => out.push_str("not computed\n\n"),
        Some(s) => {
            for name in ["P", "T", "C", "PT", "CPT"] {
                if let Some(op) = s.operators.get(name) {
                    let k0 = if op.antilinear { " (antilinear, times K0)" } else { "" };
                    let _ = writeln!(out, "### {name}{k0}\n");
                    matrix(&mut out, &op.matrix);
                }
            }
            let _ = writeln!(
                out,
                "Gram condition holds: {} (defect {}); T^2 = P^2: {} (distance {})\n",
                s.p2_t2.condition_holds,
                sig12(s.p2_t2.condition_defect),
                s.p2_t2.t2_equals_p2,
                sig12(s.p2_t2.t2_p2_distance)
            );
        }
    }

    out.push_str("## Inner products\n\n");
    match &r.products {
        None => out.push_str("not computed\n\n"),
        Some(p) => {
            for (name, g) in p {
                let _ = writeln!(
                    out,
                    "### {name}\n\nreal-definite: {} (max |Im| {}); diagonal: [{}]\n",
                    g.real_definite,
                    sig12(g.max_imag),
                    g.diagonal_signs.join(", ")
                );
                matrix(&mut out, &g.values);
            }
        }
    }

    out.push_str("## Residuals\n\n| check | value | bound | required | pass |\n|---|---|---|---|---|\n");
    for (name, e) in &r.residuals {
        let _ = writeln!(
            out,
            "| {name} | {} | {} | {} | {} |",
            sig12(e.value),
            sig12(e.bound),
            e.must_pass,
            e.passed()
        );
    }
    out.push('\n');

    out.push_str("## Verdict\n\n");
    let _ = writeln!(out, "all required checks pass: {}", r.verdicts.all_pass);
    if let Some(f) = &r.verdicts.failure {
        let _ = writeln!(out, "stopped at {}: {} ({:?})", f.stage, f.message, f.class);
    }
    out
}
