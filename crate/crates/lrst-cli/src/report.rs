//! Test-result report: a stable JSON payload and a human-readable renderer.

use std::collections::BTreeMap;

use lrst_core::{BonferroniResult, LrstResult, PValueMethod, TrialDataset};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ArmSummary {
    pub label: String,
    pub n_subjects: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentSummary {
    pub dose: String,
    /// Standardized z-score (unit variance under the null).
    pub z: f64,
    /// Mean relative treatment effect over all visits and outcomes.
    pub theta_bar: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparatorBlock {
    /// One-sided univariate p-value per dose label.
    pub per_dose_p: BTreeMap<String, f64>,
    /// Bonferroni threshold α/A.
    pub threshold: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsBlock {
    pub correlation_repaired: bool,
    pub correlation_clamped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub alpha: f64,
    pub n_visits: usize,
    pub outcomes: Vec<String>,
    pub control: ArmSummary,
    pub doses: Vec<ArmSummary>,
    pub n_total: usize,
    pub components: Vec<ComponentSummary>,
    /// max_a z_a on the standard-normal scale.
    pub statistic: f64,
    /// The same statistic divided by the visit count (the time-averaged
    /// reporting convention).
    pub statistic_per_visit: f64,
    /// A×A estimated component correlation matrix, row-major.
    pub correlation: Vec<Vec<f64>>,
    pub p_value: f64,
    pub p_value_method: String,
    pub mc_std_error: Option<f64>,
    pub decision: String,
    pub selected_dose: String,
    /// θ̂ per dose label: T×K matrix as rows over visits.
    pub theta: BTreeMap<String, Vec<Vec<f64>>>,
    pub comparator: ComparatorBlock,
    pub diagnostics: DiagnosticsBlock,
}

fn method_name(m: PValueMethod) -> &'static str {
    match m {
        PValueMethod::ClosedFormNormal => "closed_form_normal",
        PValueMethod::ClosedFormMax2 => "closed_form_max2",
        PValueMethod::MonteCarlo => "monte_carlo",
    }
}

pub fn build_test_report(
    ds: &TrialDataset,
    result: &LrstResult,
    comparator: &BonferroniResult,
    alpha: f64,
) -> TestReport {
    let dose_labels: Vec<String> = ds.doses().iter().map(|a| a.label().to_string()).collect();

    let components = result
        .components
        .iter()
        .zip(&dose_labels)
        .zip(&result.per_pair)
        .map(|((&z, label), pair)| ComponentSummary {
            dose: label.clone(),
            z,
            theta_bar: pair.theta_bar,
        })
        .collect();

    let correlation = (0..result.correlation.rows())
        .map(|i| {
            (0..result.correlation.cols())
                .map(|j| result.correlation[(i, j)])
                .collect()
        })
        .collect();

    let theta = dose_labels
        .iter()
        .zip(&result.per_pair)
        .map(|(label, pair)| {
            let rows = (0..pair.theta.rows())
                .map(|t| (0..pair.theta.cols()).map(|k| pair.theta[(t, k)]).collect())
                .collect();
            (label.clone(), rows)
        })
        .collect();

    let per_dose_p = dose_labels
        .iter()
        .cloned()
        .zip(comparator.per_dose_p.iter().copied())
        .collect();

    TestReport {
        alpha,
        n_visits: ds.n_visits(),
        outcomes: ds.outcome_names().to_vec(),
        control: ArmSummary {
            label: ds.control().label().to_string(),
            n_subjects: ds.control().n_subjects(),
        },
        doses: ds
            .doses()
            .iter()
            .map(|a| ArmSummary {
                label: a.label().to_string(),
                n_subjects: a.n_subjects(),
            })
            .collect(),
        n_total: ds.total_subjects(),
        components,
        statistic: result.statistic,
        statistic_per_visit: result.statistic_per_visit,
        correlation,
        p_value: result.p_value,
        p_value_method: method_name(result.p_value_method).to_string(),
        mc_std_error: result.mc_std_error,
        decision: if result.p_value < alpha {
            "reject".to_string()
        } else {
            "fail_to_reject".to_string()
        },
        selected_dose: dose_labels[result.selected_dose].clone(),
        theta,
        comparator: ComparatorBlock {
            per_dose_p,
            threshold: comparator.threshold,
            rejected: comparator.rejected,
        },
        diagnostics: DiagnosticsBlock {
            correlation_repaired: result.diagnostics.correlation_repaired,
            correlation_clamped: result.diagnostics.correlation_clamped,
        },
    }
}

pub fn render_pretty(r: &TestReport) -> String {
    let mut s = String::new();
    s.push_str("Multi-arm longitudinal rank-sum test\n");
    s.push_str(&format!(
        "  arms: {} (n={}) vs {}\n",
        r.control.label,
        r.control.n_subjects,
        r.doses
            .iter()
            .map(|d| format!("{} (n={})", d.label, d.n_subjects))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    s.push_str(&format!(
        "  panel: {} visits x {} outcomes ({}), N = {}\n",
        r.n_visits,
        r.outcomes.len(),
        r.outcomes.join(", "),
        r.n_total
    ));
    s.push_str("  components (z, theta_bar):\n");
    for c in &r.components {
        s.push_str(&format!(
            "    {:<12} z = {:>8.4}   theta_bar = {:>8.4}\n",
            c.dose, c.z, c.theta_bar
        ));
    }
    s.push_str(&format!(
        "  statistic: max z = {:.4} (per-visit scale {:.4})\n",
        r.statistic, r.statistic_per_visit
    ));
    s.push_str(&format!(
        "  p-value: {:.6} [{}{}]\n",
        r.p_value,
        r.p_value_method,
        r.mc_std_error
            .map(|se| format!(", mc se {se:.2e}"))
            .unwrap_or_default()
    ));
    s.push_str(&format!(
        "  decision at alpha {}: {}\n",
        r.alpha,
        r.decision.replace('_', " ")
    ));
    s.push_str(&format!("  selected dose: {}\n", r.selected_dose));
    s.push_str(&format!(
        "  comparator (univariate, threshold {:.4}): {}\n",
        r.comparator.threshold,
        if r.comparator.rejected {
            "reject"
        } else {
            "fail to reject"
        }
    ));
    for (dose, p) in &r.comparator.per_dose_p {
        s.push_str(&format!("    {dose:<12} p = {p:.6}\n"));
    }
    if r.diagnostics.correlation_repaired {
        s.push_str("  note: correlation matrix required eigenvalue-floor repair\n");
    }
    if r.diagnostics.correlation_clamped {
        s.push_str("  note: a component correlation was clamped to +/-0.999\n");
    }
    s
}
