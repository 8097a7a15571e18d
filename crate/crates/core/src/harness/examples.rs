//! The three worked vaccination examples, recomputed.

use serde_json::json;

use super::table::{fmt_bool, fmt_f64, fmt_opt};
use super::{ExperimentConfig, ExperimentOutput, ResultTable};
use crate::analytics::{
    poisson_vaccination_derivative, summarize, uniform_mixing_limit, vaccinated_summary,
    EpidemicParameters,
};
use crate::distributions::{DegreeModel, InfectiousPeriodModel};
use crate::error::Result;

/// Poisson mean of the first example.
pub const EXAMPLE1_LAMBDA: f64 = 3.0;
/// Step of the central difference of `c q~*_c`.
const FD_STEP: f64 = 1e-5;
/// Contact rate `β′` and coverage of the second example.
pub const EXAMPLE2_BETA_PRIME: f64 = 2.0;
pub const EXAMPLE2_COVERAGE: f64 = 0.8;
/// Cutoff used for the third example and the sensitivity rows.
pub const EXAMPLE3_CUTOFF: f64 = 1000.0;
const EXAMPLE3_SENSITIVITY: [f64; 4] = [10.0, 100.0, 1000.0, 10_000.0];

struct Checks {
    table: ResultTable,
    hash: String,
    seed: String,
    failures: usize,
}

impl Checks {
    fn add(&mut self, example: &str, check: &str, value: f64, reference: f64, tolerance: f64) {
        let pass = (value - reference).abs() <= tolerance;
        self.push(
            example,
            check,
            value,
            Some(reference),
            Some(tolerance),
            pass,
        );
    }

    fn push(
        &mut self,
        example: &str,
        check: &str,
        value: f64,
        reference: Option<f64>,
        tolerance: Option<f64>,
        pass: bool,
    ) {
        self.failures += !pass as usize;
        self.table.push(vec![
            self.hash.clone(),
            self.seed.clone(),
            example.into(),
            check.into(),
            fmt_f64(value),
            fmt_opt(reference),
            fmt_opt(tolerance),
            fmt_bool(pass),
        ]);
    }
}

/// Table degree law and exponential-with-cutoff period of the third example.
pub fn example3_parameters(cutoff: f64) -> Result<EpidemicParameters> {
    let degree = DegreeModel::table([(1, 100.0 / 201.0), (2, 100.0 / 201.0), (100, 1.0 / 201.0)])?;
    EpidemicParameters::new(
        degree,
        InfectiousPeriodModel::exponential_cutoff(0.01, cutoff)?,
        0.99,
    )
}

/// Poisson(3) degrees, Exp(1) periods and `β = 1`, so `λψ = 3/2`.
pub fn example1_parameters() -> Result<EpidemicParameters> {
    EpidemicParameters::new(
        DegreeModel::poisson(EXAMPLE1_LAMBDA)?,
        InfectiousPeriodModel::exponential(1.0)?,
        1.0,
    )
}

/// Coverage grid of the first example, all with `cλψ > 1`.
pub fn example1_grid() -> Vec<f64> {
    (28..=40).map(|i| i as f64 / 40.0).collect()
}

fn example1(checks: &mut Checks) -> Result<ResultTable> {
    let p = example1_parameters()?;
    let mut table = ResultTable::new(
        "example1.csv",
        &[
            "coverage",
            "qtilde_star",
            "alpha_prime",
            "alpha_star",
            "duration_constant",
            "derivative_formula",
            "derivative_fd",
        ],
    );
    // Thinning Poisson(λ) at c gives Poisson(cλ); using it directly lets the
    // difference step past c = 1.
    let cq = |c: f64| -> Result<f64> {
        let thinned = p.with_degree(DegreeModel::poisson(c * EXAMPLE1_LAMBDA)?);
        Ok(c * summarize(&thinned)?.qtilde_star)
    };
    let mut rows = Vec::new();
    let mut max_fd_error = 0.0f64;
    for c in example1_grid() {
        let s = vaccinated_summary(&p, c)?;
        let formula = poisson_vaccination_derivative(EXAMPLE1_LAMBDA, s.psi, c, s.qtilde_star);
        let fd = (cq(c + FD_STEP)? - cq(c - FD_STEP)?) / (2.0 * FD_STEP);
        max_fd_error = max_fd_error.max((formula - fd).abs());
        table.push(vec![
            fmt_f64(c),
            fmt_f64(s.qtilde_star),
            fmt_opt(s.alpha_prime),
            fmt_opt(s.alpha_star),
            fmt_opt(s.duration_constant),
            fmt_f64(formula),
            fmt_f64(fd),
        ]);
        rows.push(s);
    }
    let increasing = |f: &dyn Fn(&crate::analytics::EpidemicSummary) -> f64| {
        rows.windows(2).all(|w| f(&w[1]) > f(&w[0]))
    };
    let growth_up = increasing(&|s| s.alpha_prime.unwrap_or(f64::NAN));
    let decay_up = increasing(&|s| s.alpha_star.map_or(f64::NAN, f64::abs));
    let duration_down = increasing(&|s| -s.duration_constant.unwrap_or(f64::NAN));
    checks.push(
        "1",
        "derivative_max_abs_error",
        max_fd_error,
        Some(0.0),
        Some(1e-6),
        max_fd_error <= 1e-6,
    );
    checks.push(
        "1",
        "alpha_prime_increasing",
        growth_up as u8 as f64,
        None,
        None,
        growth_up,
    );
    checks.push(
        "1",
        "abs_alpha_star_increasing",
        decay_up as u8 as f64,
        None,
        None,
        decay_up,
    );
    checks.push(
        "1",
        "duration_decreasing",
        duration_down as u8 as f64,
        None,
        None,
        duration_down,
    );
    Ok(table)
}

fn example2(checks: &mut Checks) -> Result<ResultTable> {
    let period = InfectiousPeriodModel::exponential(1.0)?;
    let c = EXAMPLE2_COVERAGE;
    let limit = uniform_mixing_limit(EXAMPLE2_BETA_PRIME, &period, c)?;
    let mut table = ResultTable::new(
        "example2.csv",
        &[
            "lambda",
            "qtilde_star",
            "alpha_prime",
            "alpha_star",
            "limit_qtilde_star",
            "limit_alpha_prime",
            "limit_alpha_star",
            "relative_gap_qtilde",
        ],
    );
    for lambda in [10.0, 100.0, 1e3, 1e4] {
        let p = EpidemicParameters::new(
            DegreeModel::poisson(lambda)?,
            period.clone(),
            EXAMPLE2_BETA_PRIME / lambda,
        )?;
        let s = vaccinated_summary(&p, c)?;
        let gap = (s.qtilde_star - limit.qtilde_star).abs() / limit.qtilde_star;
        table.push(vec![
            fmt_f64(lambda),
            fmt_f64(s.qtilde_star),
            fmt_opt(s.alpha_prime),
            fmt_opt(s.alpha_star),
            fmt_f64(limit.qtilde_star),
            fmt_f64(limit.alpha_prime.value),
            fmt_f64(limit.alpha_star.value),
            fmt_f64(gap),
        ]);
        if lambda == 1e3 {
            checks.add("2", "relative_gap_qtilde_lambda_1e3", gap, 0.0, 1e-2);
        }
        if lambda == 1e4 {
            checks.add(
                "2",
                "abs_gap_qtilde_lambda_1e4",
                (s.qtilde_star - limit.qtilde_star).abs(),
                0.0,
                1e-3,
            );
            checks.add("2", "relative_gap_qtilde_lambda_1e4", gap, 0.0, 1e-3);
        }
    }
    Ok(table)
}

fn example3(checks: &mut Checks) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        "example3.csv",
        &[
            "cutoff",
            "coverage",
            "psi",
            "r0",
            "alpha_prime",
            "alpha_star",
            "duration_constant",
            "tail_condition",
        ],
    );
    for cutoff in EXAMPLE3_SENSITIVITY {
        let p = example3_parameters(cutoff)?;
        for c in [1.0, 0.99] {
            let s = if c == 1.0 {
                summarize(&p)?
            } else {
                vaccinated_summary(&p, c)?
            };
            table.push(vec![
                fmt_f64(cutoff),
                fmt_f64(c),
                fmt_f64(s.psi),
                fmt_f64(s.r0),
                fmt_opt(s.alpha_prime),
                fmt_opt(s.alpha_star),
                fmt_opt(s.duration_constant),
                s.tail_condition.map(fmt_bool).unwrap_or_default(),
            ]);
            if cutoff == EXAMPLE3_CUTOFF {
                let d = s.duration_constant.unwrap_or(f64::NAN);
                let (name, reference) = if c == 1.0 {
                    ("duration_unvaccinated", 2.04)
                } else {
                    ("duration_coverage_0.99", 2.021)
                };
                checks.add("3", name, d, reference, 0.02);
            }
        }
    }
    Ok(table)
}

/// Recomputes the three examples. `results.csv` lists every check with its
/// reference, tolerance and verdict; the per-example tables hold the numbers.
pub fn example_suite(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut checks = Checks {
        table: ResultTable::new(
            "results.csv",
            &[
                "config_hash",
                "seed",
                "example",
                "check",
                "value",
                "reference",
                "tolerance",
                "pass",
            ],
        ),
        hash: config.hash(),
        seed: config.base_seed.to_string(),
        failures: 0,
    };
    let t1 = example1(&mut checks)?;
    let t2 = example2(&mut checks)?;
    let t3 = example3(&mut checks)?;
    let total = checks.table.rows.len();
    let failures = checks.failures;
    Ok(ExperimentOutput {
        tables: vec![checks.table, t1, t2, t3],
        documents: Vec::new(),
        summary: json!({ "checks": total, "failures": failures }),
        partial: false,
    })
}
