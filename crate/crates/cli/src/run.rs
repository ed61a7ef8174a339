//! Execution glue: configs in, records and trajectories out.

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

use neqcoh::dynamics::{default_dt, evolve_with_stride, Trajectory};
use neqcoh::flux::{
    bath_flux, build_coupled_tls_parts, internal_flux, CoupledTlsGenerators, CoupledTlsModel,
};
use neqcoh::generator::{build_nonsecular, Superoperator};
use neqcoh::model::{born_markov_warning, transitions_of, SystemKind, SystemSpec, TransitionSet};
use neqcoh::rates::{dissipation_rates, DissipationRates};
use neqcoh::steady::{
    build_bloch_lambda, build_bloch_vee, det_formula, steady_nullspace, zero_coherence_condition,
    zero_coherence_condition_vee, SteadyState, ZeroCoherenceCheck,
};
use neqcoh::{CMatrix, DensityMatrix};

use crate::config::{InitialState, NamedState, RunConfig, SolverMethod};
use crate::output::Value;

/// One output record: ordered (column, value) pairs.
#[derive(Debug, Clone)]
pub struct Record {
    pub fields: Vec<(String, Value)>,
}

impl Record {
    fn push(&mut self, name: impl Into<String>, value: f64) {
        self.fields.push((name.into(), Value::Number(value)));
    }

    fn push_complex(&mut self, stem: &str, z: Complex64) {
        self.push(format!("{stem}_re"), z.re);
        self.push(format!("{stem}_im"), z.im);
        self.push(format!("{stem}_abs"), z.norm());
    }

    pub fn columns(&self) -> Vec<String> {
        self.fields.iter().map(|(c, _)| c.clone()).collect()
    }
}

/// The assembled problem behind one config (three-level or coupled pair).
#[allow(clippy::large_enum_variant)]
pub enum Problem {
    ThreeLevel {
        system: SystemSpec,
        transitions: TransitionSet,
        rates: DissipationRates,
        generator: Superoperator,
    },
    Coupled {
        model: CoupledTlsModel,
        generators: CoupledTlsGenerators,
    },
}

impl Problem {
    pub fn build(config: &RunConfig) -> Result<Self> {
        let baths = config.bath_specs()?;
        match &config.system {
            SystemSpec::CoupledTls { omega1, omega2, g } => {
                let (model, generators) =
                    build_coupled_tls_parts(*omega1, *omega2, *g, &baths[0], &baths[1])
                        .context("building coupled-pair generator")?;
                Ok(Problem::Coupled { model, generators })
            }
            system => {
                let transitions = transitions_of(system)?;
                let rates = dissipation_rates(&baths, &transitions)?;
                let generator = build_nonsecular(system, &rates)?;
                Ok(Problem::ThreeLevel {
                    system: system.clone(),
                    transitions,
                    rates,
                    generator,
                })
            }
        }
    }

    pub fn generator(&self) -> &Superoperator {
        match self {
            Problem::ThreeLevel { generator, .. } => generator,
            Problem::Coupled { generators, .. } => &generators.total,
        }
    }

    pub fn dim(&self) -> usize {
        self.generator().dim()
    }

    pub fn level_labels(&self) -> Vec<&'static str> {
        match self {
            Problem::ThreeLevel { system, .. } => system.level_labels(),
            Problem::Coupled { .. } => vec!["G", "E1", "E2", "D"],
        }
    }

    pub fn energies(&self) -> Vec<f64> {
        match self {
            Problem::ThreeLevel { system, .. } => system.energies(),
            Problem::Coupled { model, .. } => model.energies.to_vec(),
        }
    }

    pub fn max_frequency(&self) -> f64 {
        match self {
            Problem::ThreeLevel { transitions, .. } => {
                transitions.frequencies().into_iter().fold(0.0f64, f64::max)
            }
            Problem::Coupled { model, .. } => model
                .transition_frequencies()
                .into_iter()
                .fold(0.0f64, f64::max),
        }
    }

    /// Weak-coupling advisory, if any.
    pub fn warning(&self, config: &RunConfig) -> Option<String> {
        match self {
            Problem::ThreeLevel { transitions, .. } => {
                let baths = config.bath_specs().ok()?;
                born_markov_warning(&baths, transitions)
            }
            Problem::Coupled { .. } => None,
        }
    }
}

fn solve_steady(config: &RunConfig, problem: &Problem) -> Result<SteadyState> {
    match (config.solver.method, problem) {
        (SolverMethod::Nullspace, _) => {
            Ok(steady_nullspace(problem.generator()).context("null-space solve")?)
        }
        (
            SolverMethod::Bloch,
            Problem::ThreeLevel {
                system,
                transitions,
                rates,
                ..
            },
        ) => {
            let bloch = match system.kind() {
                SystemKind::Lambda => build_bloch_lambda(rates, transitions)?,
                SystemKind::Vee => build_bloch_vee(rates, transitions)?,
                other => bail!("bloch solver supports lambda and vee systems, not {other:?}"),
            };
            Ok(bloch.solve()?.state)
        }
        (SolverMethod::Bloch, Problem::Coupled { .. }) => {
            bail!("bloch solver supports lambda and vee systems, not the coupled pair")
        }
    }
}

/// Column names of a steady record, fixed by the system kind alone so
/// every record of a sweep shares one header, failures included.
pub fn steady_columns(config: &RunConfig) -> Vec<String> {
    let system = &config.system;
    let labels = system.level_labels();
    let d = system.dim();
    let mut columns = Vec::new();
    for label in &labels {
        columns.push(format!("pop_{label}"));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            for part in ["re", "im", "abs"] {
                columns.push(format!("rho_{}_{}_{part}", labels[i], labels[j]));
            }
        }
    }
    columns.push("unique".into());
    columns.push("residual".into());
    match system.kind() {
        SystemKind::Lambda | SystemKind::Vee => {
            for part in ["re", "im", "abs"] {
                columns.push(format!("det_{part}"));
            }
            for part in ["re", "im", "abs"] {
                columns.push(format!("zero_cond_{part}"));
            }
            columns.push("zero_cond_satisfied".into());
        }
        SystemKind::Xi => {}
        SystemKind::CoupledTls => {
            columns.push("flux_internal".into());
            columns.push("flux_bath1".into());
        }
    }
    columns.push("status".into());
    columns
}

/// Compute a steady record; solver trouble is reported in the `status`
/// column (with NaN data cells) instead of failing the whole run.
pub fn steady_record(config: &RunConfig, axis_values: &[(String, f64)]) -> Record {
    let mut record = Record { fields: Vec::new() };
    for (name, value) in axis_values {
        record.push(name.clone(), *value);
    }
    match steady_record_inner(config, &mut record) {
        Ok(()) => {
            record
                .fields
                .push(("status".into(), Value::Text("ok".into())));
            debug_assert_eq!(
                record
                    .fields
                    .iter()
                    .skip(axis_values.len())
                    .map(|(c, _)| c.clone())
                    .collect::<Vec<_>>(),
                steady_columns(config),
                "record layout drifted from steady_columns"
            );
        }
        Err(e) => {
            let mut failed = Record { fields: Vec::new() };
            for (name, value) in axis_values {
                failed.push(name.clone(), *value);
            }
            for column in steady_columns(config) {
                if column == "status" {
                    failed
                        .fields
                        .push((column, Value::Text(format!("error: {e:#}"))));
                } else {
                    failed.fields.push((column, Value::Number(f64::NAN)));
                }
            }
            record = failed;
        }
    }
    record
}

fn steady_record_inner(config: &RunConfig, record: &mut Record) -> Result<()> {
    let problem = Problem::build(config)?;
    let steady = solve_steady(config, &problem)?;
    let labels = problem.level_labels();
    let d = problem.dim();
    for (i, label) in labels.iter().enumerate() {
        record.push(format!("pop_{label}"), steady.rho.population(i));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            record.push_complex(
                &format!("rho_{}_{}", labels[i], labels[j]),
                steady.rho.coherence(i, j),
            );
        }
    }
    record.push("unique", if steady.unique { 1.0 } else { 0.0 });
    record.push("residual", steady.residual);

    if let Problem::ThreeLevel {
        system,
        transitions,
        rates,
        ..
    } = &problem
    {
        match system.kind() {
            SystemKind::Lambda => {
                record.push_complex("det", det_formula(rates, transitions.delta12()));
                push_zero_condition(record, zero_coherence_condition(rates));
            }
            SystemKind::Vee => {
                let bloch = build_bloch_vee(rates, transitions)?;
                record.push_complex("det", bloch.det_formula);
                push_zero_condition(record, zero_coherence_condition_vee(rates));
            }
            _ => {}
        }
    }
    if let Problem::Coupled { model, generators } = &problem {
        record.push("flux_internal", internal_flux(model, &steady.rho));
        record.push(
            "flux_bath1",
            bath_flux(model, &generators.total, &steady.rho),
        );
    }
    Ok(())
}

fn push_zero_condition(
    record: &mut Record,
    check: std::result::Result<ZeroCoherenceCheck, neqcoh::steady::SteadyError>,
) {
    match check {
        Ok(check) => {
            record.push_complex("zero_cond", check.lhs);
            record.push(
                "zero_cond_satisfied",
                if check.satisfied { 1.0 } else { 0.0 },
            );
        }
        Err(_) => {
            // division guard (all-zero upward rates): report as unsatisfied
            record.push_complex("zero_cond", Complex64::new(f64::NAN, f64::NAN));
            record.push("zero_cond_satisfied", f64::NAN);
        }
    }
}

pub fn initial_state(config: &RunConfig, problem: &Problem) -> Result<DensityMatrix> {
    let evolve = config
        .evolve
        .as_ref()
        .context("config has no `evolve` section")?;
    let d = problem.dim();
    Ok(match &evolve.initial {
        InitialState::Named(NamedState::Ground) => {
            let energies = problem.energies();
            let lowest = (0..d)
                .min_by(|&a, &b| energies[a].partial_cmp(&energies[b]).unwrap())
                .unwrap();
            DensityMatrix::ground(d, lowest)
        }
        InitialState::Named(NamedState::MaximallyMixed) => DensityMatrix::maximally_mixed(d),
        InitialState::Explicit { matrix } => {
            let m = CMatrix::from_fn(d, d, |i, j| {
                let (re, im) = matrix[i][j];
                Complex64::new(re, im)
            });
            DensityMatrix::new(m).context("evolve.initial.matrix")?
        }
    })
}

/// Trajectory columns: t, populations, headline coherence, trace,
/// min-eigenvalue, and (coupled pair only) the flux pair.
pub fn trajectory_records(config: &RunConfig) -> Result<(Vec<String>, Vec<Vec<Value>>)> {
    let problem = Problem::build(config)?;
    let evolve_cfg = config
        .evolve
        .as_ref()
        .context("config has no `evolve` section")?;
    let rho0 = initial_state(config, &problem)?;
    let dt = evolve_cfg
        .dt
        .unwrap_or_else(|| default_dt(problem.max_frequency()));
    let steps = (evolve_cfg.t_end / dt).ceil().max(1.0) as usize;
    let stride = evolve_cfg.sample_stride.unwrap_or((steps / 2000).max(1));
    let traj = evolve_with_stride(problem.generator(), &rho0, evolve_cfg.t_end, dt, stride)
        .context("time evolution")?;

    let labels = problem.level_labels();
    let d = problem.dim();
    let (ci, cj) = match &problem {
        Problem::ThreeLevel { system, .. } => system.coherence_pair(),
        Problem::Coupled { .. } => (1, 2),
    };
    let mut columns = vec!["t".to_string()];
    columns.extend(labels.iter().map(|l| format!("pop_{l}")));
    columns.push(format!("rho_{}_{}_re", labels[ci], labels[cj]));
    columns.push(format!("rho_{}_{}_im", labels[ci], labels[cj]));
    columns.push("trace".into());
    columns.push("min_eigenvalue".into());
    let coupled = matches!(problem, Problem::Coupled { .. });
    if coupled {
        columns.push("flux_internal".into());
        columns.push("flux_bath1".into());
    }

    let mut rows = Vec::with_capacity(traj.len());
    for (k, state) in traj.states.iter().enumerate() {
        let mut row = vec![Value::Number(traj.times[k])];
        for i in 0..d {
            row.push(Value::Number(state.population(i)));
        }
        let coh = state.coherence(ci, cj);
        row.push(Value::Number(coh.re));
        row.push(Value::Number(coh.im));
        row.push(Value::Number(state.trace().re));
        row.push(Value::Number(traj.min_eigenvalues[k]));
        if let Problem::Coupled { model, generators } = &problem {
            row.push(Value::Number(internal_flux(model, state)));
            row.push(Value::Number(bath_flux(model, &generators.total, state)));
        }
        rows.push(row);
    }
    report_positivity(&traj);
    Ok((columns, rows))
}

fn report_positivity(traj: &Trajectory) {
    if traj.positivity_warning {
        let worst = traj
            .min_eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        eprintln!(
            "warning: transient positivity violation observed (min eigenvalue {worst:.3e}); \
             reported, not clamped"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_config(method: &str) -> RunConfig {
        serde_json::from_str(&format!(
            r#"{{
                "system": {{"kind": "lambda", "e_g1": 0.0, "e_g2": 0.01, "e_e": 1.005}},
                "baths": {{
                    "L": {{"temperature": 1.0,
                           "spectrum": {{"type": "flat", "gamma11": 0.01, "gamma22": 0.02}}}},
                    "R": {{"temperature": 2.0,
                           "spectrum": {{"type": "flat", "gamma11": 0.02, "gamma22": 0.01}}}}
                }},
                "solver": {{"method": "{method}"}}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn steady_record_has_stable_columns_and_methods_agree() {
        let nullspace = steady_record(&lambda_config("nullspace"), &[]);
        let bloch = steady_record(&lambda_config("bloch"), &[]);
        assert_eq!(nullspace.columns(), bloch.columns());
        assert!(nullspace.columns().contains(&"pop_g1".to_string()));
        assert!(nullspace.columns().contains(&"rho_g1_g2_abs".to_string()));
        assert!(nullspace.columns().contains(&"det_re".to_string()));
        for ((ca, va), (cb, vb)) in nullspace.fields.iter().zip(&bloch.fields) {
            assert_eq!(ca, cb);
            if let (Value::Number(a), Value::Number(b)) = (va, vb) {
                if ca != "residual" {
                    assert!((a - b).abs() < 1e-9, "{ca}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn coupled_record_carries_fluxes() {
        let config: RunConfig = serde_json::from_str(
            r#"{
                "system": {"kind": "coupled_tls", "omega1": 1.05, "omega2": 0.95, "g": 0.05},
                "baths": {
                    "L": {"temperature": 0.5,
                          "spectrum": {"type": "flat", "gamma11": 0.01, "gamma22": 0.01}},
                    "R": {"temperature": 1.5,
                          "spectrum": {"type": "flat", "gamma11": 0.01, "gamma22": 0.01}}
                }
            }"#,
        )
        .unwrap();
        let record = steady_record(&config, &[]);
        let get = |name: &str| {
            record
                .fields
                .iter()
                .find(|(c, _)| c == name)
                .and_then(|(_, v)| match v {
                    Value::Number(x) => Some(*x),
                    _ => None,
                })
                .unwrap()
        };
        let j = get("flux_internal");
        assert!(j.abs() > 1e-5);
        assert!((get("flux_bath1") + j).abs() < 1e-9);
    }

    #[test]
    fn trajectory_zero_time_is_single_row() {
        let mut config = lambda_config("nullspace");
        config.evolve = Some(crate::config::EvolveConfig {
            initial: InitialState::Named(NamedState::MaximallyMixed),
            t_end: 0.0,
            dt: None,
            sample_stride: None,
        });
        let (columns, rows) = trajectory_records(&config).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(columns[0], "t");
        // populations of the maximally mixed initial state
        if let Value::Number(p) = rows[0][1] {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        } else {
            panic!("expected number");
        }
    }
}
