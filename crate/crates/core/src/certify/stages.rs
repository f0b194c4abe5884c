use num_traits::{One, Signed, Zero};

use super::lift::{default_sample_rs, lift_coefficients_in_r, positive_ratio, target_at, CoefficientInR, LiftTarget};
use super::mesh::LargeRMajorant;
use super::{
    small_r_outcomes, CertifyError, CertifyOptions, EnvelopeFixture, LambdaRow, StageEntry, StageResult, StageStatus,
    ExactMargin,
};
use crate::amplitude::{
    amplitude_squared_at_zero, best_constant, factor_amplitude, factor_amplitude_direct, printed_lambda_squared,
    sign_left_of_one, ProblemSpec,
};
use crate::exactmath::{format_rational, int, positivity_on_ray, positivity_outside_interval, Poly, Positivity, Rational, Witness};
use crate::oracle::oracle_amplitude_squared;

/// Lifted coefficient families of `-P1` (scaled), `Q+` and `Q-`.
#[derive(Debug, Clone)]
pub struct LiftedFamilies {
    pub minus_p1: Vec<CoefficientInR>,
    pub q_plus: Vec<CoefficientInR>,
    pub q_minus: Vec<CoefficientInR>,
    pub minus_p1_constant: Rational,
}

fn describe_witness(w: &Witness) -> String {
    match w {
        Witness::NonPositiveAt { point } => format!("non-positive at {}", format_rational(point)),
        Witness::RootBracket { lo, hi } => {
            format!("root in [{}, {}]", format_rational(lo), format_rational(hi))
        }
    }
}

pub fn fixture_invariants(fixture: &EnvelopeFixture) -> StageResult {
    let violations = fixture.violations();
    if violations.is_empty() {
        StageResult::new(
            "fixture_invariants",
            StageStatus::Proven,
            format!(
                "k = {}, [c1, c2] = [{}, {}], r0 = {}, alpha = {} <= 2 - (2k+1)/r0",
                fixture.k,
                format_rational(&fixture.c1),
                format_rational(&fixture.c2),
                fixture.r0,
                format_rational(&fixture.alpha)
            ),
        )
    } else {
        StageResult::new("fixture_invariants", StageStatus::Failed, violations.join("; "))
    }
}

pub fn lift_all(fixture: &EnvelopeFixture) -> Result<LiftedFamilies, CertifyError> {
    let k = fixture.k;
    let samples = default_sample_rs(k);
    let constant = fixture.ptilde.coeff(0);
    Ok(LiftedFamilies {
        minus_p1: lift_coefficients_in_r(k, LiftTarget::MinusP1, &samples, &constant)?,
        q_plus: lift_coefficients_in_r(k, LiftTarget::QPlus, &samples, &constant)?,
        q_minus: lift_coefficients_in_r(k, LiftTarget::QMinus, &samples, &constant)?,
        minus_p1_constant: constant,
    })
}

pub fn lift_report(families: &LiftedFamilies) -> StageResult {
    let mut stage = StageResult::new(
        "lift_coefficients",
        StageStatus::Proven,
        "every coefficient interpolated in r and confirmed at 3 held-out values",
    );
    for (name, family) in [("minus_p1", &families.minus_p1), ("q_plus", &families.q_plus), ("q_minus", &families.q_minus)]
    {
        for c in family {
            stage.entries.push(StageEntry {
                label: format!("{name} x^{}", c.degree_in_x),
                status: StageStatus::Proven,
                margin: None,
                detail: c.poly_in_r.to_string(),
            });
        }
    }
    stage
}

pub fn appendix_fidelity(fixture: &EnvelopeFixture, families: &LiftedFamilies) -> StageResult {
    let name = "appendix_fidelity";
    let Some(tables) = &fixture.tables else {
        return StageResult::new(name, StageStatus::Proven, "fixture carries no reference tables; nothing to compare");
    };
    let k = fixture.k;
    let evaluate = |rows: &[Poly], r: &Rational| Poly::new(rows.iter().map(|p| p.eval(r)).collect());
    let mut stage = StageResult::new(name, StageStatus::Proven, "");
    let mut mismatches = Vec::new();
    for r in k + 1..=k + 8 {
        let rr = int(r as i64);
        let result = (|| -> Result<String, CertifyError> {
            let canonical = -&factor_amplitude(ProblemSpec::new(r, k)?)?.p1_poly;
            let table = evaluate(&tables.minus_p1, &rr);
            let ratio = positive_ratio(&canonical, &table);
            let q_plus = target_at(k, LiftTarget::QPlus, r, &families.minus_p1_constant)?;
            let q_minus = target_at(k, LiftTarget::QMinus, r, &families.minus_p1_constant)?;
            let q_ok = q_plus == evaluate(&tables.q_plus, &rr) && q_minus == evaluate(&tables.q_minus, &rr);
            match (ratio, q_ok) {
                (Some(ratio), true) => Ok(format!("table / canonical -P1 = {}", format_rational(&ratio))),
                (None, _) => Err(CertifyError::LiftMismatch { k, detail: "-P1 not proportional to table".into() }),
                (_, false) => Err(CertifyError::LiftMismatch { k, detail: "Q+/Q- differ from table".into() }),
            }
        })();
        let (status, detail) = match result {
            Ok(d) => (StageStatus::Proven, d),
            Err(e) => {
                mismatches.push(r);
                (StageStatus::Failed, e.to_string())
            }
        };
        stage.entries.push(StageEntry { label: format!("r = {r}"), status, margin: None, detail });
    }
    let mut coefficient_mismatches = Vec::new();
    for (name, family, table) in [
        ("minus_p1", &families.minus_p1, &tables.minus_p1),
        ("q_plus", &families.q_plus, &tables.q_plus),
        ("q_minus", &families.q_minus, &tables.q_minus),
    ] {
        let zero = Poly::zero();
        for i in 0..family.len().max(table.len()) {
            let lifted = family.iter().find(|c| c.degree_in_x == i).map_or(&zero, |c| &c.poly_in_r);
            let printed = table.get(i).unwrap_or(&zero);
            if lifted != printed {
                let detail = format!("computed {lifted}, table {printed}");
                coefficient_mismatches.push(format!("{name} x^{i}"));
                stage.entries.push(StageEntry {
                    label: format!("{name} x^{i}"),
                    status: StageStatus::Failed,
                    margin: None,
                    detail,
                });
            }
        }
    }
    let lifted_match = coefficient_mismatches.is_empty();
    if mismatches.is_empty() && lifted_match {
        stage.detail = format!(
            "-P1 proportional with a positive ratio and Q+/Q- equal at r = {}..={}; lifted polynomials equal the tables",
            k + 1,
            k + 8
        );
    } else {
        stage.status = StageStatus::Failed;
        stage.detail = format!(
            "table differs at r = {mismatches:?}; coefficients differing from the table: {coefficient_mismatches:?}"
        );
    }
    stage
}

/// `D_i(r) >= 0` for `r >= threshold`, accepting `D_i` identically zero.
fn nonnegative_on_ray(d: &Poly, threshold: &Rational) -> Result<&'static str, String> {
    if d.is_zero() {
        return Ok("identically zero");
    }
    match positivity_on_ray(d, threshold) {
        Positivity::Proven { method } => Ok(match method {
            crate::exactmath::roots::ProofMethod::ShiftedCoefficients => "shifted coefficients",
            crate::exactmath::roots::ProofMethod::Sturm => "Sturm count",
        }),
        Positivity::Disproven { witness } => Err(describe_witness(&witness)),
    }
}

fn dominance_stage(name: &str, checks: Vec<(String, Poly)>, threshold: u32, summary: &str) -> StageResult {
    let t = int(threshold as i64);
    let mut stage = StageResult::new(name, StageStatus::Proven, summary);
    for (label, d) in checks {
        let (status, detail) = match nonnegative_on_ray(&d, &t) {
            Ok(how) => (StageStatus::Proven, format!("{d} >= 0 ({how})")),
            Err(w) => {
                if stage.witness.is_none() {
                    stage.witness = Some(format!("{label}: {d} {w}"));
                }
                stage.status = StageStatus::Failed;
                (StageStatus::Failed, format!("{d}: {w}"))
            }
        };
        stage.entries.push(StageEntry { label, status, margin: None, detail });
    }
    stage
}

pub fn ptilde_dominance(fixture: &EnvelopeFixture, families: &LiftedFamilies) -> StageResult {
    let checks = families
        .minus_p1
        .iter()
        .map(|c| {
            let i = c.degree_in_x;
            let envelope = Poly::monomial(fixture.ptilde.coeff(i), i);
            (format!("x^{i}"), &c.poly_in_r - &envelope)
        })
        .collect();
    dominance_stage(
        "ptilde_dominance",
        checks,
        fixture.k + 1,
        &format!("coefficients of -P1 dominate ptilde(r x) for every r >= {}", fixture.k + 1),
    )
}

pub fn qtilde_dominance(fixture: &EnvelopeFixture, families: &LiftedFamilies) -> StageResult {
    let mut checks = Vec::new();
    for c in &families.q_plus {
        let i = c.degree_in_x;
        let envelope = Poly::monomial(fixture.qtilde_plus.coeff(i), i);
        checks.push((format!("q_plus x^{i}"), &envelope - &c.poly_in_r));
    }
    for c in &families.q_minus {
        let i = c.degree_in_x;
        let envelope = Poly::monomial(fixture.qtilde_minus.coeff(i), i);
        checks.push((format!("q_minus x^{i}"), &c.poly_in_r - &envelope));
    }
    dominance_stage(
        "qtilde_dominance",
        checks,
        fixture.r0 + 1,
        &format!("Q+ <= Q~+(r x) and Q- >= Q~-(r x) coefficientwise for every r >= {}", fixture.r0 + 1),
    )
}

pub fn root_bracket(fixture: &EnvelopeFixture) -> StageResult {
    let name = "root_bracket";
    let k = fixture.k;
    let mut stage = match positivity_outside_interval(&fixture.ptilde, &fixture.c1, &fixture.c2) {
        Positivity::Proven { .. } => StageResult::new(
            name,
            StageStatus::Proven,
            format!(
                "ptilde > 0 on [0, {}] and [{}, inf), so every root of P1 with t >= 0 lies in (c1/r, c2/r)",
                format_rational(&fixture.c1),
                format_rational(&fixture.c2)
            ),
        ),
        Positivity::Disproven { witness } => {
            return StageResult::new(name, StageStatus::Failed, "ptilde is not positive outside [c1, c2]")
                .with_witness(describe_witness(&witness));
        }
    };
    let mut sampled: Vec<u32> = (k + 1..=k + 8).collect();
    sampled.extend([fixture.r0, fixture.r0 + 1]);
    for r in sampled {
        let checked = ProblemSpec::new(r, k)
            .and_then(factor_amplitude_direct)
            .map(|f| (f.p1_poly.coeff(0).is_negative(), sign_left_of_one(&f.p1_poly) < 0));
        let (status, detail) = match checked {
            Ok((true, true)) => (StageStatus::Proven, "P1(0) < 0 and P1 < 0 left of t = 1".to_string()),
            Ok((at0, near1)) => (StageStatus::Failed, format!("P1(0) < 0: {at0}, P1 < 0 left of 1: {near1}")),
            Err(e) => (StageStatus::InternalError, e.to_string()),
        };
        if status != StageStatus::Proven && stage.status == StageStatus::Proven {
            stage.status = status;
            stage.witness = Some(format!("r = {r}: {detail}"));
        }
        stage.entries.push(StageEntry { label: format!("r = {r}"), status, margin: None, detail });
    }
    stage
}

fn mesh_statistics(stage: &mut StageResult, outcome: &super::MeshOutcome) {
    stage.statistics.insert("initial_cells".into(), outcome.initial_cells);
    stage.statistics.insert("evaluations".into(), outcome.evaluations);
    stage.statistics.insert("refined_cells".into(), outcome.refined_cells);
    stage.statistics.insert("max_depth".into(), outcome.max_depth as u64);
}

pub fn large_r_mesh(fixture: &EnvelopeFixture, options: &CertifyOptions) -> StageResult {
    let name = "large_r_mesh";
    let majorant = LargeRMajorant::from_fixture(fixture);
    let cells = fixture.large_r_cells * options.mesh_multiplier.max(1);
    let outcome = majorant.certify(fixture, cells, options.depth_cap);
    let mut stage = match &outcome.failure {
        None => StageResult::new(
            name,
            StageStatus::Proven,
            format!(
                "(Q~+(y) - Q~-(y)) e^(-alpha y) <= 1 - margin on [c1, c2] with {cells} uniform cells; covers every r > {}",
                fixture.r0
            ),
        )
        .with_margin(outcome.margin()),
        Some(cell) => StageResult::new(name, StageStatus::Failed, "depth cap reached").with_witness(cell.describe()),
    };
    mesh_statistics(&mut stage, &outcome);
    stage
}

pub fn small_r_mesh(fixture: &EnvelopeFixture, options: &CertifyOptions, rs: &[u32]) -> StageResult {
    let name = "small_r_mesh";
    let results = small_r_outcomes(fixture, rs, options);
    let mut stage = StageResult::new(name, StageStatus::Proven, "");
    let mut total = super::MeshOutcome {
        max_bound: Rational::zero(),
        initial_cells: 0,
        evaluations: 0,
        refined_cells: 0,
        max_depth: 0,
        failure: None,
    };
    let mut failed = Vec::new();
    for (r, result) in results {
        let entry = match result {
            Ok(outcome) => {
                let status = if outcome.is_certified() { StageStatus::Proven } else { StageStatus::Failed };
                let detail = match &outcome.failure {
                    None => format!(
                        "{} cells, {} refined, depth {}",
                        outcome.initial_cells, outcome.refined_cells, outcome.max_depth
                    ),
                    Some(cell) => cell.describe(),
                };
                if status == StageStatus::Failed {
                    failed.push(r);
                    if stage.witness.is_none() {
                        stage.witness = Some(format!("r = {r}: {detail}"));
                    }
                }
                let margin = outcome.is_certified().then(|| ExactMargin::new(&outcome.margin()));
                total = total.merge(outcome);
                StageEntry { label: format!("r = {r}"), status, margin, detail }
            }
            Err(e) => {
                let status = if e.is_internal() { StageStatus::InternalError } else { StageStatus::Failed };
                failed.push(r);
                StageEntry { label: format!("r = {r}"), status, margin: None, detail: e.to_string() }
            }
        };
        if entry.status == StageStatus::InternalError {
            stage.status = StageStatus::InternalError;
        }
        stage.entries.push(entry);
    }
    mesh_statistics(&mut stage, &total);
    stage.statistics.insert("r_values".into(), rs.len() as u64);
    if failed.is_empty() {
        stage.detail = format!(
            "(R+ - R-)(t) (1 - t)^(2(r-k)-1) <= 1 - margin on [c1/r, min(c2/r, 1)] for {} values of r",
            rs.len()
        );
        stage = stage.with_margin(total.margin());
    } else {
        if stage.status == StageStatus::Proven {
            stage.status = StageStatus::Failed;
        }
        stage.detail = format!("not certified at r = {failed:?}");
    }
    stage
}

pub fn lambda_consistency(
    fixture: &EnvelopeFixture,
    options: &CertifyOptions,
) -> (StageResult, Vec<LambdaRow>) {
    let k = fixture.k;
    let mut stage = StageResult::new(
        "lambda_consistency",
        StageStatus::Proven,
        format!(
            "lambda^2 = 1/A^2(0) agrees across closed form, reduced factorization and projection for r = {}..={}",
            k + 1,
            options.lambda_r_max
        ),
    );
    let mut rows = Vec::new();
    for r in k + 1..=options.lambda_r_max.max(k + 1) {
        let row = (|| -> Result<LambdaRow, CertifyError> {
            let spec = ProblemSpec::new(r, k)?;
            let best = best_constant(spec, options.digits)?;
            let center = amplitude_squared_at_zero(spec);
            let reduced = factor_amplitude_direct(spec)?.p_poly.coeff(0);
            let projected = oracle_amplitude_squared(spec, &Rational::zero());
            let routes_agree = center == reduced
                && center == projected
                && (&center * &best.lambda_squared_exact).is_one();
            let printed = printed_lambda_squared(spec);
            Ok(LambdaRow {
                r,
                lambda_squared: best.lambda_squared.clone(),
                lambda: best.lambda.clone(),
                routes_agree,
                certified: false,
                printed_ratio: printed.as_ref().map(|p| format_rational(&(&best.lambda_squared_exact / p))),
                printed_lambda_squared: printed.as_ref().map(format_rational),
                lambda_squared_exact: best.lambda_squared_exact,
            })
        })();
        match row {
            Ok(row) => {
                if !row.routes_agree {
                    stage.status = StageStatus::InternalError;
                    stage.witness.get_or_insert_with(|| format!("r = {r}: routes disagree"));
                }
                rows.push(row);
            }
            Err(e) => {
                stage.status =
                    if e.is_internal() { StageStatus::InternalError } else { StageStatus::Failed };
                stage.witness.get_or_insert_with(|| format!("r = {r}: {e}"));
            }
        }
    }
    (stage, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    #[test]
    fn k4_dominance_and_bracket() {
        let fixture = EnvelopeFixture::builtin(4).unwrap();
        let families = lift_all(&fixture).unwrap();
        assert!(ptilde_dominance(&fixture, &families).is_proven());
        assert!(root_bracket(&fixture).is_proven());
        assert!(qtilde_dominance(&fixture, &families).is_proven());
        let fidelity = appendix_fidelity(&fixture, &families);
        assert!(fidelity.is_proven(), "{fidelity:#?}");
    }

    #[test]
    fn sabotaged_leading_coefficient_fails() {
        let mut fixture = EnvelopeFixture::builtin(4).unwrap();
        let families = lift_all(&fixture).unwrap();
        fixture.ptilde = Poly::from_ints(&[45, -350, 112, -228, 17]);
        let stage = ptilde_dominance(&fixture, &families);
        assert_eq!(stage.status, StageStatus::Failed);
        assert!(stage.witness.unwrap().starts_with("x^4"));
    }

    #[test]
    fn shrunk_bracket_fails() {
        let mut fixture = EnvelopeFixture::builtin(4).unwrap();
        fixture.c2 = int(60);
        let stage = root_bracket(&fixture);
        assert_eq!(stage.status, StageStatus::Failed);
        assert!(stage.witness.is_some());
        assert!(fixture.ptilde.eval(&int(70)).is_negative());
    }
}
