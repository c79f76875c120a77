//! Subcommand bodies. Each returns a [`Report`] and an exit code
//! (0 success, 3 domain-negative result); input problems surface as
//! [`CliError`] and map to exit code 2.

use std::path::{Path, PathBuf};

use bellctx_core::generators::{random_pr_mixture, random_quad};
use bellctx_core::hidden::{best_lhv_fit, delta_grid, hv_chsh_with, Method};
use bellctx_core::inequalities::{bchs_all_variants, bchs_variants, BchsSummary, ExperimentQuartet};
use bellctx_core::joint::{check_consistency, joint_exists, witness_error, FeasibilityResult};
use bellctx_core::macrostate::{
    attempt_quad_construction, context_quads_from_quartet, contextual_values_demo_with,
};
use bellctx_core::povm::{quad_probabilities, ArmConfig, ExperimentConfig};
use bellctx_core::quantum::projective_bivariate;
use bellctx_core::relaxation::{relaxation_sweep_with, DEMO_WINDOWS};
use bellctx_core::rng::{chunk_rng, point_seed};
use bellctx_core::{Outcome, PairSelector, QuadrivariateDistribution};
use serde::de::DeserializeOwned;

use crate::error::CliError;
use crate::output::{Cell, Report, Table};
use crate::parallel::RayonExecutor;
use crate::schema::{ExperimentSpec, HvModelSpec, MacroModelSpec, QuartetSpec, RelaxationSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

/// Options shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn executor(&self) -> RayonExecutor {
        RayonExecutor::new(self.threads)
    }

    fn load<T: DeserializeOwned + Default>(&self) -> Result<T, CliError> {
        match &self.input {
            None => Ok(T::default()),
            Some(path) => read_json(path),
        }
    }

    fn describe_input(&self, report: &mut Report) {
        let src = self.input.as_ref().map_or("builtin default".to_string(), |p| p.display().to_string());
        report.param("input", src);
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn outcome_cell(o: Outcome) -> Cell {
    Cell::Text(o.symbol().to_string())
}

fn quad_table(name: &str, quad: &QuadrivariateDistribution) -> Table {
    let mut t = Table::new(name, &["a1", "b1", "a2", "b2", "probability"]);
    for (idx, &p) in quad.atoms().iter().enumerate() {
        let [a1, b1, a2, b2] = QuadrivariateDistribution::outcomes(idx);
        t.push(vec![outcome_cell(a1), outcome_cell(b1), outcome_cell(a2), outcome_cell(b2), p.into()]);
    }
    t
}

fn quartet_table(name: &str, q: &ExperimentQuartet) -> Table {
    let mut t = Table::new(name, &["pair", "p_pp", "p_pm", "p_mp", "p_mm", "correlation"]);
    for pair in PairSelector::ALL {
        let b = q.get(pair);
        let [[pp, pm], [mp, mm]] = b.table();
        t.push(vec![pair.name().into(), pp.into(), pm.into(), mp.into(), mm.into(), b.correlation().into()]);
    }
    t
}

fn bchs_table(summary: &BchsSummary) -> Table {
    let mut t = Table::new("bchs", &["variant", "swap_sides", "swap_first", "swap_second", "flips", "value"]);
    for (k, (v, value)) in bchs_variants().iter().zip(&summary.values).enumerate() {
        let flips: String = v.flips.iter().map(|&f| if f { '1' } else { '0' }).collect();
        t.push(vec![
            k.into(),
            v.swap_sides.into(),
            v.swap_first.into(),
            v.swap_second.into(),
            flips.into(),
            (*value).into(),
        ]);
    }
    t
}

fn feasibility_word(r: &FeasibilityResult) -> &'static str {
    if r.is_feasible() { "feasible" } else { "infeasible" }
}

fn push_feasibility(report: &mut Report, r: &FeasibilityResult, quartet: &ExperimentQuartet) {
    report.value("joint exists", feasibility_word(r));
    report.value("lp_residual", r.residual);
    if let Some(w) = &r.witness {
        report.value("witness_max_error", witness_error(w, quartet));
        report.tables.push(quad_table("witness", w));
    }
    if let Some(c) = &r.certificate {
        report.value("certificate_variant", c.variant);
        report.value("certificate_value", c.value);
    }
}

/// One generalized Aspect experiment: quad, its pair marginals, Bell and BCHS.
pub fn aspect(cfg: &RunConfig) -> Result<(Report, i32), CliError> {
    let spec: ExperimentSpec = cfg.load()?;
    let experiment = spec.build()?;
    let settings = spec.settings()?;
    let mut report = Report::new("aspect", cfg.seed);
    cfg.describe_input(&mut report);
    report.param("gamma1", crate::output::fmt_g(experiment.arm1.gamma()));
    report.param("gamma2", crate::output::fmt_g(experiment.arm2.gamma()));

    let quad = quad_probabilities(&experiment);
    let marginals = ExperimentQuartet::from_quad(&quad);
    let bchs = bchs_all_variants(&marginals)?;
    let joint = joint_exists(&marginals)?;
    let standard = ExperimentQuartet::from_fn(|p| {
        let (t1, t2) = settings.for_pair(p);
        projective_bivariate(experiment.state(), t1, t2)
    });

    report.value("bell_lhs", marginals.bell_lhs());
    report.value("standard_bell_lhs", standard.bell_lhs());
    report.value("bchs_worst_low", bchs.worst_low);
    report.value("bchs_worst_high", bchs.worst_high);
    report.value("bchs_satisfied", bchs.satisfied);
    report.value("joint exists", feasibility_word(&joint));
    report.tables.push(quad_table("quad", &quad));
    report.tables.push(quartet_table("pair_marginals", &marginals));
    report.tables.push(quartet_table("standard_pairs", &standard));
    report.tables.push(bchs_table(&bchs));
    Ok((report, EXIT_OK))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Input(format!("not a number: {x:?}"))))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err(CliError::Input("empty list".into()));
    }
    Ok(v)
}

/// Bell value and joint feasibility over a γ₁ × γ₂ grid.
pub fn gamma_sweep(cfg: &RunConfig, gammas: &[f64]) -> Result<(Report, i32), CliError> {
    if gammas.is_empty() {
        return Err(CliError::Input("γ grid must be non-empty".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(CliError::Input(format!("γ = {g} outside [0, 1]")));
    }
    let spec: ExperimentSpec = cfg.load()?;
    let settings = spec.settings()?;
    let state = spec.state.build()?;
    let mut report = Report::new("gamma-sweep", cfg.seed);
    cfg.describe_input(&mut report);
    report.param("gammas", gammas.iter().map(|g| crate::output::fmt_g(*g)).collect::<Vec<_>>().join(";"));

    let points: Vec<(f64, f64)> = gammas.iter().flat_map(|&g1| gammas.iter().map(move |&g2| (g1, g2))).collect();
    let rows = cfg.executor().map(&points, |&(g1, g2)| -> Result<Vec<Cell>, CliError> {
        let exp = ExperimentConfig::new(
            ArmConfig::new(g1, settings.a1, settings.b1)?,
            ArmConfig::new(g2, settings.a2, settings.b2)?,
            state.clone(),
        )?;
        let q = ExperimentQuartet::from_quad(&quad_probabilities(&exp));
        let b = bchs_all_variants(&q)?;
        let joint = joint_exists(&q)?;
        Ok(vec![
            g1.into(),
            g2.into(),
            q.bell_lhs().into(),
            b.worst_low.into(),
            b.worst_high.into(),
            feasibility_word(&joint).into(),
        ])
    });
    let mut t = Table::new("sweep", &["gamma1", "gamma2", "bell_lhs", "bchs_worst_low", "bchs_worst_high", "joint"]);
    for r in rows {
        t.push(r?);
    }
    report.value("rows", t.rows.len());
    report.tables.push(t);
    Ok((report, EXIT_OK))
}

/// Joint-existence decision for a quartet (default: the quantum optimal one).
pub fn joint(cfg: &RunConfig) -> Result<(Report, i32), CliError> {
    let quartet = match &cfg.input {
        Some(p) => read_json::<QuartetSpec>(p)?.build()?,
        None => MacroModelSpec::default().build()?.0.quartet()?,
    };
    let mut report = Report::new("joint", cfg.seed);
    cfg.describe_input(&mut report);
    let consistency = check_consistency(&quartet);
    report.value("max_single_discrepancy", consistency.max_discrepancy);
    if !consistency.passed {
        return Err(CliError::Core(bellctx_core::Error::InconsistentQuartet {
            discrepancy: consistency.max_discrepancy,
        }));
    }
    let r = joint_exists(&quartet)?;
    report.value("bell_lhs", quartet.bell_lhs());
    push_feasibility(&mut report, &r, &quartet);
    report.tables.push(quartet_table("quartet", &quartet));
    report.tables.push(bchs_table(&bchs_all_variants(&quartet)?));
    Ok((report, if r.is_feasible() { EXIT_OK } else { EXIT_NEGATIVE }))
}

/// Hidden-variables model: quartet, CHSH and the fit against `cos 2Δ`.
pub fn hv_run(cfg: &RunConfig, samples: Option<u64>) -> Result<(Report, i32), CliError> {
    let spec: HvModelSpec = cfg.load()?;
    let (model, settings) = spec.build()?;
    let method = match samples {
        None => Method::ExactSum,
        Some(n) => Method::MonteCarlo { seed: cfg.seed, samples: n },
    };
    let mut report = Report::new("hv-run", cfg.seed);
    cfg.describe_input(&mut report);
    report.param("method", match method {
        Method::ExactSum => "exact".to_string(),
        Method::MonteCarlo { samples, .. } => format!("monte-carlo samples={samples}"),
    });
    let est = hv_chsh_with(&cfg.executor(), &model, &settings, method)?;
    report.value("chsh", est.value);
    report.value("sigma", est.sigma);
    report.value("bell_satisfied", est.value <= 2.0 + 3.0 * est.sigma + 1e-9);
    let fits = delta_grid(91).into_iter().map(|d| (d, (2.0 * d).cos())).collect::<Vec<_>>();
    // tabulated responses only know their own settings
    if let Ok(fit) = best_lhv_fit(&model, &fits) {
        report.value("cos2delta_max_deviation", fit.max_deviation);
        report.value("cos2delta_worst_delta", fit.at_delta);
    }
    report.tables.push(quartet_table("quartet", &est.quartet));
    Ok((report, EXIT_OK))
}

/// Macrostate model: quartet, Bell value, the quad construction and the
/// contextual value-assignment demo.
pub fn macro_run(cfg: &RunConfig, rounds: u64) -> Result<(Report, i32), CliError> {
    let spec: MacroModelSpec = cfg.load()?;
    let (model, _) = spec.build()?;
    let mut report = Report::new("macro-run", cfg.seed);
    cfg.describe_input(&mut report);
    report.param("rounds", rounds);
    let quartet = model.quartet()?;
    report.value("bell_lhs", quartet.bell_lhs());
    report.value("context_independent", model.is_context_independent());
    let r = attempt_quad_construction(&model)?;
    push_feasibility(&mut report, &r, &quartet);
    let demo = contextual_values_demo_with(&cfg.executor(), &context_quads_from_quartet(&quartet), rounds, cfg.seed)?;
    report.value("assignment_rounds", demo.rounds);
    report.value("assignment_consistent_rounds", demo.consistent_rounds);
    report.value("assignment_inconsistent_fraction", demo.inconsistent_fraction());
    report.value("remote_dependence_rounds", demo.remote_pattern_rounds);
    report.value("local_dependence_rounds", demo.local_pattern_rounds);
    report.tables.push(quartet_table("quartet", &quartet));
    Ok((report, EXIT_OK))
}

/// CHSH against averaging window for the relaxation toy.
pub fn relax_sweep(cfg: &RunConfig, windows: Option<&[f64]>, samples: Option<u64>) -> Result<(Report, i32), CliError> {
    let mut spec: RelaxationSpec = cfg.load()?;
    if let Some(n) = samples {
        spec.samples = n;
    }
    let params = spec.build(cfg.seed)?;
    let windows: Vec<f64> = match windows {
        Some(w) => w.to_vec(),
        None if params.tau.is_finite() => DEMO_WINDOWS.iter().map(|w| w * params.tau).collect(),
        None => DEMO_WINDOWS.to_vec(),
    };
    let mut report = Report::new("relax-sweep", cfg.seed);
    cfg.describe_input(&mut report);
    report.param("tau", crate::output::fmt_g(params.tau));
    report.param("diffusion", crate::output::fmt_g(params.diffusion));
    report.param("samples", params.samples);
    let points = relaxation_sweep_with(&cfg.executor(), &params, &windows)?;
    let mut t = Table::new(
        "curve",
        &["window", "window_over_tau", "chsh", "sigma", "e_a1a2", "e_a1b2", "e_b1a2", "e_b1b2"],
    );
    for p in &points {
        let c = p.correlations;
        t.push(vec![
            p.window.into(),
            p.window_over_tau.into(),
            p.chsh.into(),
            p.sigma.into(),
            c.e_a1a2.into(),
            c.e_a1b2.into(),
            c.e_b1a2.into(),
            c.e_b1b2.into(),
        ]);
    }
    let equilibrium = params.equilibrium.quartet()?.bell_lhs();
    report.value("equilibrium_chsh", equilibrium);
    let crosses = points.windows(2).any(|w| (w[0].chsh - 2.0) * (w[1].chsh - 2.0) < 0.0);
    report.value("crosses_two", crosses);
    report.tables.push(t);
    Ok((report, EXIT_OK))
}

/// LP feasibility against all-variant BCHS on generated quartets. Point `i`
/// of a family draws from its own seed derived from the base seed.
pub fn fine_check(cfg: &RunConfig, count: usize) -> Result<(Report, i32), CliError> {
    if count == 0 {
        return Err(CliError::Input("count must be at least 1".into()));
    }
    let mut report = Report::new("fine-check", cfg.seed);
    report.param("count_per_family", count);
    let exec = cfg.executor();
    let mut t = Table::new("families", &["family", "quartets", "feasible", "agreements"]);
    let mut all_agree = true;
    for (lane, family) in [(0u32, "random_quad"), (1, "pr_mixture")] {
        let idx: Vec<usize> = (0..count).collect();
        let results = exec.map(&idx, |&i| -> Result<(bool, bool), CliError> {
            let mut rng = chunk_rng(point_seed(cfg.seed, i as u64), lane, 0);
            let q = if lane == 0 { ExperimentQuartet::from_quad(&random_quad(&mut rng)) } else { random_pr_mixture(&mut rng) };
            let lp = joint_exists(&q)?.is_feasible();
            Ok((lp, lp == bchs_all_variants(&q)?.satisfied))
        });
        let mut feasible = 0usize;
        let mut agree = 0usize;
        for r in results {
            let (f, a) = r?;
            feasible += usize::from(f);
            agree += usize::from(a);
        }
        all_agree &= agree == count;
        t.push(vec![family.into(), count.into(), feasible.into(), agree.into()]);
    }
    report.value("all_agree", all_agree);
    report.tables.push(t);
    Ok((report, if all_agree { EXIT_OK } else { EXIT_NEGATIVE }))
}
