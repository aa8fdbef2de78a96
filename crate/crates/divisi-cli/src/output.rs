//! Fixed six-decimal table rendering, mirroring the published layout.

use divisi_core::channels::UnitalityReport;
use divisi_core::divisibility::{Metric, StepReport, StepVerdict, Theorem2Report, WitnessResult};

fn metric_label(metric: Metric) -> &'static str {
    match metric {
        Metric::TraceNorm => "trace distance",
        Metric::HilbertSchmidt => "Hilbert-Schmidt (squared) distance",
    }
}

fn verdict_label(v: StepVerdict) -> &'static str {
    match v {
        StepVerdict::PDivisibleStep => "P-divisible",
        StepVerdict::PIndivisibleStep => "P-indivisible",
    }
}

fn hold_label(flag: bool) -> &'static str {
    if flag {
        "holds"
    } else {
        "violated"
    }
}

pub fn print_report_table(
    step: &StepReport,
    theorem2: &Theorem2Report,
    system_channel: &UnitalityReport,
) {
    let label = metric_label(step.metric);
    println!("System input {label}: {:.6}", step.d_sys_in);
    println!("System output {label}: {:.6}", step.d_sys_out);
    println!("Environment input {label}: {:.6}", step.d_env_in);
    println!("Environment output {label}: {:.6}", step.d_env_out);
    println!("Full input state {label}: {:.6}", step.d_full_in);
    println!("Full output state {label}: {:.6}", step.d_full_out);
    println!();
    println!("System evolution at this step: {}", verdict_label(step.sys_verdict));
    println!("Environment evolution at this step: {}", verdict_label(step.env_verdict));
    println!("Full evolution at this step: {}", verdict_label(step.full_verdict));
    println!(
        "System channel: {} (deviation {:.3e})",
        if system_channel.unital { "unital" } else { "non-unital" },
        system_channel.deviation
    );
    println!();
    println!("Joint/marginal ledger (Hilbert-Schmidt surrogate):");
    println!("  gamma (input pair):  {:.6}", theorem2.gamma);
    println!("  gamma (output pair): {:.6}", theorem2.gamma_out);
    println!("  alpha_S: {:.6}   alpha_E: {:.6}", theorem2.alpha_s, theorem2.alpha_e);
    println!("  beta_S:  {:.6}   beta_E:  {:.6}", theorem2.beta_s, theorem2.beta_e);
    println!(
        "  alpha_S*alpha_E <= gamma: {} (slack {:.6})",
        hold_label(theorem2.product_bound_in),
        theorem2.product_bound_in_slack
    );
    println!(
        "  beta_S*beta_E <= gamma: {} (slack {:.6})",
        hold_label(theorem2.product_bound_out),
        theorem2.product_bound_out_slack
    );
    println!(
        "  T_S*T_E <= T_SE: {} (slack {:.6})",
        hold_label(theorem2.ts_te_bound),
        theorem2.ts_te_slack
    );
    println!("  eq6 lhs (beta_S*beta_E - alpha_S*alpha_E): {:.6}", theorem2.eq6_lhs);
    println!("  eq7 lhs: {:.6}", theorem2.eq7_lhs);
    println!("  eq8 lhs: {:.6}", theorem2.eq8_lhs);
}

pub fn print_witness_table(result: &WitnessResult, correlated: bool) {
    println!(
        "Best system-distance growth: {:.6} ({} inputs)",
        result.growth,
        if correlated { "correlated" } else { "product" }
    );
    println!("Found at restart {} after {} evaluations (seed {})", result.restart, result.iterations, result.seed);
}
