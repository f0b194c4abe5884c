use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::json;

use super::{CliError, Command, OutputFormat, RunConfig, EXIT_FAILED, EXIT_INTERNAL, EXIT_OK};
use crate::amplitude::{
    amplitude_squared, best_constant, extremal_series_truncated, factor_amplitude, factor_amplitude_direct,
    second_derivative_at_zero, CenterExtremum, CenterStatus, ProblemSpec,
};
use crate::certify::{
    certify_global_center_max, stages, CertificationReport, CertifyOptions, EnvelopeFixture, SmallRSelection,
    StageStatus, Verdict,
};
use crate::exactmath::decimal::{sqrt_to_decimal, to_decimal, Rounding};
use crate::exactmath::{format_rational, int, rat, Poly, Rational};
use crate::oracle::{argmax_scan, oracle_amplitude_squared};

pub(super) struct Output {
    pub body: String,
    pub code: i32,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: EXIT_OK }
    }
}

pub(super) fn dispatch(config: &RunConfig, stderr: &mut dyn Write) -> Result<Output, CliError> {
    match &config.command {
        Command::Amplitude { spec, xs } => amplitude(config, *spec, xs),
        Command::Lambda { spec, points } => lambda(config, *spec, *points),
        Command::Certify { k, fixture, quick, mesh_multiplier, max_r } => {
            let options = CertifyOptions {
                small_r: if *quick { SmallRSelection::Quick { stride: 10 } } else { SmallRSelection::Full },
                mesh_multiplier: *mesh_multiplier,
                lambda_r_max: *max_r,
                digits: config.precision,
                ..CertifyOptions::default()
            };
            certify(config, *k, fixture.as_deref(), &options, stderr)
        }
        Command::Scan { spec, points } => scan(config, *spec, *points),
        Command::Selftest { max_r, fixture } => selftest(config, *max_r, fixture.as_deref()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// `(c0 + c1 v + ...)/d` with integer coefficients in ascending order.
pub fn integer_form(p: &Poly, var: &str) -> String {
    let (numers, denominator) = p.integer_form();
    let mut body = String::new();
    for (i, c) in numers.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if body.is_empty() {
            if c.is_negative() {
                body.push('-');
            }
        } else {
            body.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let coeff = if mag.is_one() && i > 0 { String::new() } else { mag.to_string() };
        match i {
            0 => body.push_str(&coeff),
            1 => write!(body, "{coeff}{var}").unwrap(),
            _ => write!(body, "{coeff}{var}^{i}").unwrap(),
        }
    }
    if body.is_empty() {
        return "0".to_string();
    }
    if denominator.is_one() {
        body
    } else if numers.len() == 1 {
        format!("{body}/{denominator}")
    } else {
        format!("({body})/{denominator}")
    }
}

fn coefficient_strings(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

fn amplitude(config: &RunConfig, spec: ProblemSpec, xs: &[Rational]) -> Result<Output, CliError> {
    let f = factor_amplitude_direct(spec)?;
    let digits = config.precision;
    let values: Vec<(Rational, Rational)> = xs
        .iter()
        .map(|x| {
            let t = x * x;
            let value = f.p_poly.eval(&t) * num_traits::pow(Rational::one() - &t, f.exponent as usize);
            (x.clone(), value)
        })
        .collect();
    let body = match config.format {
        OutputFormat::Json => to_json(&json!({
            "r": spec.r(),
            "k": spec.k(),
            "exponent": f.exponent,
            "p_poly": coefficient_strings(&f.p_poly),
            "p_poly_display": integer_form(&f.p_poly, "t"),
            "p1_poly": coefficient_strings(&f.p1_poly),
            "p1_poly_display": integer_form(&f.p1_poly, "t"),
            "values": values.iter().map(|(x, v)| json!({
                "x": format_rational(x),
                "amplitude_squared": format_rational(v),
                "amplitude_squared_decimal": to_decimal(v, digits, Rounding::Nearest),
            })).collect::<Vec<_>>(),
        })),
        OutputFormat::Csv => {
            let mut s = String::from("x,amplitude_squared,amplitude_squared_decimal\n");
            for (x, v) in &values {
                writeln!(s, "{},{},{}", format_rational(x), format_rational(v), to_decimal(v, digits, Rounding::Nearest))
                    .unwrap();
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            writeln!(s, "r = {}, k = {}", spec.r(), spec.k()).unwrap();
            writeln!(s, "A^2(x) = P(x^2) (1 - x^2)^m with m = {}", f.exponent).unwrap();
            writeln!(s, "P(t)  = {}", integer_form(&f.p_poly, "t")).unwrap();
            writeln!(s, "P1(t) = {}", integer_form(&f.p1_poly, "t")).unwrap();
            for (x, v) in &values {
                writeln!(
                    s,
                    "A^2({}) = {} ~ {}",
                    format_rational(x),
                    format_rational(v),
                    to_decimal(v, digits, Rounding::Nearest)
                )
                .unwrap();
            }
            s
        }
    };
    Ok(Output::ok(body))
}

fn lambda(config: &RunConfig, spec: ProblemSpec, points: usize) -> Result<Output, CliError> {
    if spec.k_is_odd() {
        let scan = argmax_scan(spec, points, 1e-12);
        let lambda = 1.0 / scan.amplitude;
        let body = match config.format {
            OutputFormat::Json => to_json(&json!({
                "r": spec.r(),
                "k": spec.k(),
                "certified": false,
                "method": "scan",
                "lambda": lambda,
                "x_star": scan.x_star,
                "amplitude_squared": scan.amplitude_squared,
                "grid_points": scan.grid_points,
            })),
            OutputFormat::Csv => format!("r,k,lambda,x_star\n{},{},{lambda:.15e},{:.15e}\n", spec.r(), spec.k(), scan.x_star),
            OutputFormat::Text => format!(
                "r = {}, k = {} (odd k: the extremal is not symmetric)\nlambda ~ {lambda:.9} from a {}-point scan, not certified\nx* ~ +-{:.9}\n",
                spec.r(),
                spec.k(),
                scan.grid_points,
                scan.x_star
            ),
        };
        return Ok(Output::ok(body));
    }
    let best = best_constant(spec, config.precision)?;
    let status_text = match best.center_status {
        CenterStatus::Cited => "center is the global maximum by a published result",
        CenterStatus::Certified if spec.k() == 4 => {
            "certified with the amended envelope (`certify --k 4 --fixture k4-amended`); the published k = 4 envelope fails"
        }
        CenterStatus::Certified => "certified (`certify --k 6`)",
        CenterStatus::Conditional => "conditional: valid if the center is the global maximum",
    };
    let body = match config.format {
        OutputFormat::Json => to_json(&json!({
            "result": best,
            "status_note": status_text,
        })),
        OutputFormat::Csv => {
            let mut s = String::from("r,k,lambda_squared,lambda,center_status\n");
            writeln!(s, "{},{},{},{},{:?}", spec.r(), spec.k(), best.lambda_squared, best.lambda, best.center_status)
                .unwrap();
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            writeln!(s, "r = {}, k = {}", spec.r(), spec.k()).unwrap();
            writeln!(s, "A^2(0)   = {}", best.amplitude_squared_at_center).unwrap();
            writeln!(s, "lambda^2 = {}", best.lambda_squared).unwrap();
            writeln!(s, "lambda   = {} (rounded down, {} digits)", best.lambda, best.digits).unwrap();
            writeln!(s, "status   : {status_text}").unwrap();
            if let Some(printed) = &best.printed_formula {
                writeln!(
                    s,
                    "printed closed form: lambda^2 = {}, lambda = {}; ratio to the value above {}",
                    printed.value_squared, printed.value_decimal, printed.discrepancy_ratio
                )
                .unwrap();
                writeln!(s, "the printed closed form disagrees with 1/A(0); see the notes of `certify --k {}`", spec.k())
                    .unwrap();
            }
            s
        }
    };
    Ok(Output::ok(body))
}

fn load_fixture(k: u32, fixture: Option<&str>) -> Result<EnvelopeFixture, CliError> {
    let loaded = match fixture {
        Some(name) => EnvelopeFixture::resolve(name)?,
        None => EnvelopeFixture::builtin(k)?,
    };
    if loaded.k != k {
        return Err(CliError::usage(format!("fixture is for k = {}, not k = {k}", loaded.k)));
    }
    Ok(loaded)
}

fn certify(
    config: &RunConfig,
    k: u32,
    fixture: Option<&str>,
    options: &CertifyOptions,
    stderr: &mut dyn Write,
) -> Result<Output, CliError> {
    let fixture = load_fixture(k, fixture)?;
    let started = Instant::now();
    let report = certify_global_center_max(&fixture, options);
    let _ = writeln!(stderr, "certification finished in {:.1?}", started.elapsed());
    let body = match config.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => {
            let mut s = String::from("stage,status,margin_exact,margin_decimal\n");
            for stage in &report.stages {
                let (exact, decimal) =
                    stage.margin.as_ref().map(|m| (m.exact.as_str(), m.decimal.as_str())).unwrap_or(("", ""));
                writeln!(s, "{},{},{exact},{decimal}", stage.name, status_word(stage.status)).unwrap();
            }
            s
        }
        OutputFormat::Text => certify_text(&report),
    };
    let code = match report.verdict {
        Verdict::Proven => EXIT_OK,
        Verdict::Failed => EXIT_FAILED,
        Verdict::InternalError => EXIT_INTERNAL,
    };
    Ok(Output { body, code })
}

fn status_word(status: StageStatus) -> &'static str {
    match status {
        StageStatus::Proven => "proven",
        StageStatus::Failed => "failed",
        StageStatus::InternalError => "internal_error",
    }
}

fn certify_text(report: &CertificationReport) -> String {
    let mut s = String::new();
    writeln!(s, "k = {}", report.k).unwrap();
    for stage in &report.stages {
        let margin = stage.margin.as_ref().map(|m| format!("  margin {}", m.decimal)).unwrap_or_default();
        writeln!(s, "  {:<20} {:<14}{margin}", stage.name, status_word(stage.status)).unwrap();
        if let Some(w) = &stage.witness {
            writeln!(s, "      witness: {w}").unwrap();
        }
    }
    if let Some(t) = &report.table_comparison {
        writeln!(s, "  reference tables: {} ({})", status_word(t.status), t.detail).unwrap();
    }
    writeln!(s, "verdict: {:?}; covered: {}", report.verdict, report.covered_r).unwrap();
    for row in &report.lambda_table {
        writeln!(s, "  r = {:>3}  lambda^2 = {}  lambda = {}", row.r, row.lambda_squared, row.lambda).unwrap();
    }
    for note in &report.notes {
        writeln!(s, "note: {note}").unwrap();
    }
    s
}

fn scan(config: &RunConfig, spec: ProblemSpec, points: usize) -> Result<Output, CliError> {
    let f = factor_amplitude_direct(spec)?;
    let steps = (points - 1) as i64;
    let rows: Vec<(Rational, Rational, String)> = (0..points as i64)
        .map(|i| {
            let x = int(-1) + rat(2 * i, steps);
            let t = &x * &x;
            let value = f.p_poly.eval(&t) * num_traits::pow(Rational::one() - &t, f.exponent as usize);
            let amp = sqrt_to_decimal(&value, config.precision, Rounding::Nearest);
            (x, value, amp)
        })
        .collect();
    let body = match config.format {
        OutputFormat::Json => to_json(
            &rows
                .iter()
                .map(|(x, v, a)| json!({"x": format_rational(x), "amplitude_squared": format_rational(v), "amplitude": a}))
                .collect::<Vec<_>>(),
        ),
        OutputFormat::Csv => {
            let mut s = String::from("x,amplitude_squared,amplitude\n");
            for (x, v, a) in &rows {
                writeln!(s, "{},{},{a}", format_rational(x), format_rational(v)).unwrap();
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for (x, v, a) in &rows {
                writeln!(s, "{:>12}  {:>28}  {a}", format_rational(x), format_rational(v)).unwrap();
            }
            s
        }
    };
    Ok(Output::ok(body))
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    internal: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, internal: false, detail: detail.into() }
    }
}

fn selftest(config: &RunConfig, max_r: u32, fixture: Option<&str>) -> Result<Output, CliError> {
    let mut checks = Vec::new();
    let points = [rat(0, 1), rat(1, 4), rat(-1, 4), rat(1, 2), rat(-1, 2), rat(3, 4), rat(-3, 4)];

    let mut bad = Vec::new();
    for r in 1..=max_r.min(10) {
        for k in 0..r {
            let spec = ProblemSpec::new(r, k)?;
            let poly = amplitude_squared(spec);
            if points.iter().any(|x| poly.eval(x) != oracle_amplitude_squared(spec, x)) {
                bad.push((r, k));
            }
        }
    }
    checks.push(Check::new("oracle_equivalence", bad.is_empty(), format!("r <= {}; mismatches {bad:?}", max_r.min(10))));

    let mut bad = Vec::new();
    for r in 1..=max_r {
        for k in 0..r {
            let spec = ProblemSpec::new(r, k)?;
            match second_derivative_at_zero(spec) {
                Ok(b) => {
                    let expected = if k % 2 == 1 { b.second_derivative.is_positive() } else { k == 0 || b.second_derivative.is_negative() };
                    let verdict_ok = (b.verdict == CenterExtremum::LocalMin) == (k % 2 == 1);
                    if !expected || (k > 0 && !verdict_ok) {
                        bad.push((r, k));
                    }
                }
                Err(_) => bad.push((r, k)),
            }
        }
    }
    checks.push(Check::new("sign_law", bad.is_empty(), format!("r <= {max_r}; violations {bad:?}")));

    let mut bad = Vec::new();
    for r in 1..=max_r {
        for k in 0..r {
            let spec = ProblemSpec::new(r, k)?;
            match (factor_amplitude(spec), factor_amplitude_direct(spec)) {
                (Ok(a), Ok(b)) if a == b && a.expand() == amplitude_squared(spec) => {}
                _ => bad.push((r, k)),
            }
        }
    }
    checks.push(Check::new("factorization_identity", bad.is_empty(), format!("r <= {max_r}; violations {bad:?}")));

    let mut bad = Vec::new();
    for r in 1..=max_r.min(8) {
        for k in 0..r {
            let f = extremal_series_truncated(ProblemSpec::new(r, k)?, &Rational::zero(), r + 6);
            let wrong = if k % 2 == 0 { 1 } else { 0 };
            if !f.coeffs().iter().skip(wrong).step_by(2).all(Zero::is_zero) {
                bad.push((r, k));
            }
        }
    }
    checks.push(Check::new("series_parity", bad.is_empty(), format!("r <= {}; violations {bad:?}", max_r.min(8))));

    let fixtures: Vec<(String, Result<EnvelopeFixture, String>)> = match fixture {
        Some(name) => vec![(name.to_string(), EnvelopeFixture::resolve(name).map_err(|e| e.to_string()))],
        None => ["k4", "k6"]
            .iter()
            .map(|n| (n.to_string(), EnvelopeFixture::resolve(n).map_err(|e| e.to_string())))
            .collect(),
    };
    for (name, loaded) in fixtures {
        let fixture = match loaded {
            Ok(f) => f,
            Err(e) => {
                checks.push(Check::new(format!("{name}: fixture_load"), false, e));
                continue;
            }
        };
        checks.extend(fixture_checks(&name, &fixture));
    }

    let passed = checks.iter().all(|c| c.passed);
    let internal = checks.iter().any(|c| c.internal);
    let body = match config.format {
        OutputFormat::Json => to_json(&json!({ "passed": passed, "checks": checks })),
        OutputFormat::Csv => {
            let mut s = String::from("check,passed,detail\n");
            for c in &checks {
                writeln!(s, "{},{},\"{}\"", c.name, c.passed, c.detail.replace('"', "'")).unwrap();
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for c in &checks {
                writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
            }
            writeln!(s, "{}", if passed { "selftest passed" } else { "selftest FAILED" }).unwrap();
            s
        }
    };
    let code = if passed {
        EXIT_OK
    } else if internal {
        EXIT_INTERNAL
    } else {
        EXIT_FAILED
    };
    Ok(Output { body, code })
}

/// Structural stages of the certificate plus the first fixed-`r` mesh.
fn fixture_checks(name: &str, fixture: &EnvelopeFixture) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut push = |stage: crate::certify::StageResult| {
        let detail = stage.witness.clone().unwrap_or_else(|| stage.detail.clone());
        checks.push(Check {
            name: format!("{name}: {}", stage.name),
            passed: stage.is_proven(),
            internal: stage.status == StageStatus::InternalError,
            detail,
        });
    };
    let invariants = stages::fixture_invariants(fixture);
    let ok = invariants.is_proven();
    push(invariants);
    if !ok {
        return checks;
    }
    match stages::lift_all(fixture) {
        Ok(families) => {
            push(stages::lift_report(&families));
            push(stages::ptilde_dominance(fixture, &families));
            push(stages::root_bracket(fixture));
            push(stages::qtilde_dominance(fixture, &families));
        }
        Err(e) => checks.push(Check {
            name: format!("{name}: lift_coefficients"),
            passed: false,
            internal: e.is_internal(),
            detail: e.to_string(),
        }),
    }
    let options = CertifyOptions { small_r: SmallRSelection::Explicit(vec![fixture.k + 1]), ..CertifyOptions::default() };
    let mut stage = stages::small_r_mesh(fixture, &options, &[fixture.k + 1]);
    stage.name = format!("small_r_mesh at r = {}", fixture.k + 1);
    let detail = stage.witness.clone().unwrap_or_else(|| stage.detail.clone());
    checks.push(Check {
        name: format!("{name}: {}", stage.name),
        passed: stage.is_proven(),
        internal: stage.status == StageStatus::InternalError,
        detail,
    });
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_form_rendering() {
        let p = Poly::new(vec![rat(9, 128), rat(-36, 128), rat(294, 128), rat(-644, 128), rat(441, 128)]);
        assert_eq!(integer_form(&p, "t"), "(9 - 36t + 294t^2 - 644t^3 + 441t^4)/128");
        assert_eq!(integer_form(&Poly::from_ints(&[0, -1, 2]), "t"), "-t + 2t^2");
        assert_eq!(integer_form(&Poly::zero(), "t"), "0");
        assert_eq!(integer_form(&Poly::constant(rat(-1, 2)), "t"), "-1/2");
    }
}
