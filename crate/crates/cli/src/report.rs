//! Deterministic report rendering: a JSON document with fixed key order and
//! floats at 17 significant digits, so identical configurations produce
//! byte-identical files.

use qreps::ktheory::InvariantReport;
use std::fmt::Write as _;

use crate::matio::format_f64;
use crate::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

fn opt_num(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_else(|| "null".to_string())
}

pub fn render_report(config: &RunConfig, report: &InvariantReport) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "{{");
    let _ = writeln!(o, "  \"schema_version\": {SCHEMA_VERSION},");
    let _ = writeln!(o, "  \"config\": {{");
    let _ = writeln!(o, "    \"genus\": {},", config.genus);
    let _ = writeln!(o, "    \"family\": \"{}\",", config.family_name());
    let _ = writeln!(o, "    \"dim\": {},", config.dim);
    let _ = writeln!(o, "    \"p\": {},", config.p);
    let _ = writeln!(o, "    \"magnitude\": {},", format_f64(config.magnitude));
    let _ = writeln!(o, "    \"seed\": {},", config.seed);
    let _ = writeln!(o, "    \"tol_sw\": {},", format_f64(config.tol_sw));
    let _ = writeln!(o, "    \"tol_kw\": {},", format_f64(config.tol_kw));
    let _ = writeln!(o, "    \"quad_tol\": {},", format_f64(config.quad_tol));
    let _ = writeln!(o, "    \"bundle_samples\": {}", config.bundle_samples);
    let _ = writeln!(o, "  }},");
    let _ = writeln!(o, "  \"genus\": {},", report.genus);
    let _ = writeln!(o, "  \"dim\": {},", report.dim);
    let _ = writeln!(o, "  \"defect\": {},", format_f64(report.defect));
    let _ = writeln!(o, "  \"winding\": {},", format_f64(report.winding));
    let _ = writeln!(
        o,
        "  \"winding_imag_residual\": {},",
        format_f64(report.winding_imag_residual)
    );
    let _ = writeln!(o, "  \"simplicial\": {},", format_f64(report.simplicial));
    let _ = writeln!(
        o,
        "  \"kappa\": {},",
        opt_num(report.kappa.as_ref().map(|k| k.value))
    );
    let _ = writeln!(
        o,
        "  \"kappa_int\": {},",
        report
            .kappa
            .as_ref()
            .map(|k| k.rounded.to_string())
            .unwrap_or_else(|| "null".to_string())
    );
    let _ = writeln!(
        o,
        "  \"kappa_residual\": {},",
        opt_num(report.kappa.as_ref().map(|k| k.rounding_residual))
    );
    let _ = writeln!(
        o,
        "  \"kappa_gap\": {},",
        opt_num(report.kappa.as_ref().map(|k| k.gap))
    );
    let _ = writeln!(
        o,
        "  \"kappa_undefined_gap\": {},",
        opt_num(report.kappa_undefined_gap)
    );
    let _ = writeln!(o, "  \"per_simplex_terms\": [");
    let count = report.per_simplex_terms.len();
    for (i, term) in report.per_simplex_terms.iter().enumerate() {
        let comma = if i + 1 == count { "" } else { "," };
        let _ = writeln!(
            o,
            "    [{}, {}, {}]{}",
            term.triangle,
            term.sign,
            format_f64(term.value),
            comma
        );
    }
    let _ = writeln!(o, "  ],");
    let _ = writeln!(
        o,
        "  \"bundle_max_idempotency_residual\": {},",
        opt_num(report.bundle.map(|b| b.max_idempotency_residual))
    );
    let _ = writeln!(
        o,
        "  \"bundle_max_rank_deviation\": {},",
        opt_num(report.bundle.map(|b| b.max_rank_deviation))
    );
    let _ = writeln!(
        o,
        "  \"boundary_residual_max\": {},",
        opt_num(report.boundary_residual_max)
    );
    let v = &report.verdicts;
    let _ = writeln!(o, "  \"verdicts\": {{");
    let _ = writeln!(o, "    \"sw_error\": {},", format_f64(v.sw_error));
    let _ = writeln!(o, "    \"sw_ok\": {},", v.sw_ok);
    let _ = writeln!(o, "    \"tol_sw\": {},", format_f64(v.tol_sw));
    let _ = writeln!(o, "    \"kw_error\": {},", opt_num(v.kw_error));
    let _ = writeln!(
        o,
        "    \"kw_ok\": {},",
        v.kw_ok
            .map(|b| b.to_string())
            .unwrap_or_else(|| "null".to_string())
    );
    let _ = writeln!(o, "    \"tol_kw\": {},", format_f64(v.tol_kw));
    let _ = writeln!(o, "    \"quant_error\": {},", format_f64(v.quant_error));
    let _ = writeln!(o, "    \"quant_ok\": {},", v.quant_ok);
    let _ = writeln!(o, "    \"tol_quant\": {},", format_f64(v.tol_quant));
    let _ = writeln!(o, "    \"all_pass\": {}", v.all_pass());
    let _ = writeln!(o, "  }}");
    let _ = writeln!(o, "}}");
    o
}

/// Machine-readable error object for failed runs.
pub fn render_error(kind: &str, message: &str) -> String {
    format!(
        "{{\n  \"schema_version\": {SCHEMA_VERSION},\n  \"error\": {{\n    \"kind\": \"{}\",\n    \"message\": \"{}\"\n  }}\n}}\n",
        kind,
        message.replace('\\', "\\\\").replace('"', "\\\""),
    )
}
