//! The six subcommands. Each writes one CSV named `<command>_<label>.csv`
//! plus `summary.txt` into the output directory and reports failures through
//! the exit-code taxonomy in `main`.

use std::path::PathBuf;

use sofc_cathode::benchmark::{run_accuracy_study, BenchmarkCase};
use sofc_cathode::constants::kelvin_from_celsius;
use sofc_cathode::dual::solve_fixed_delta;
use sofc_cathode::solver::{current_fraction_thicknesses, solve};
use sofc_cathode::sweep::{map_points, run_sweep, SweepRequest};
use sofc_cathode::{OperatingPoint, SolverSettings};

use crate::config::Config;
use crate::output::{num, write_csv, Summary};
use crate::CliError;

pub struct Context {
    pub config: Config,
    pub settings: SolverSettings,
    pub out: PathBuf,
    pub config_dir: PathBuf,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let geometry = ctx.config.geometry();
    let operating = ctx.config.operating();
    let materials = ctx.config.material_model().resolve(operating.temperature);
    let solution = solve(&geometry, &materials, &operating, &ctx.settings)?;

    let f = &solution.fields;
    let y = solution.y(&geometry);
    let j_ion = solution.j_ion();
    let j_o2 = solution.j_o2_flux();
    let rows: Vec<Vec<String>> = (0..f.len())
        .map(|i| {
            vec![
                num(f.z[i]),
                num(y[i]),
                num(f.phi_el[i]),
                num(f.phi_ion[i]),
                num(f.c_o2[i]),
                num(f.eta_act[i]),
                num(f.eta_conc[i]),
                num(f.i_ct[i]),
                num(f.lambda[i]),
                num(j_ion[i]),
                num(j_o2[i]),
            ]
        })
        .collect();
    write_csv(
        &ctx.out,
        "run_profiles",
        &[
            "z",
            "y_m",
            "phi_el_v",
            "phi_ion_v",
            "c_o2",
            "eta_act_v",
            "eta_conc_v",
            "i_ct_a_per_m3",
            "j_el_a_per_m2",
            "j_ion_a_per_m2",
            "j_o2_kg_per_m2_s",
        ],
        &rows,
    )?;

    let mut summary = Summary::default();
    summary.kv("command", "run");
    summary.kv("delta_c_m", num(solution.delta_c));
    summary.kv("v_b_v", num(solution.v_b));
    summary.kv("phi_b_v", num(solution.phi_b));
    summary.kv("c_o2_b", num(solution.c_o2_b));
    summary.kv("c_o2_bulk", num(solution.c_o2_bulk));
    summary.kv("sigma_eta_v", num(solution.total_overpotential()));
    summary.kv("iterations", solution.iterations);
    summary.kv("final_residual", num(solution.final_residual));
    if !solution.is_equilibrium() {
        for cf in current_fraction_thicknesses(&solution, &ctx.config.sweep.current_fractions)? {
            summary.kv(
                &format!("k_{}", cf.fraction),
                format!("{} (thickness {} m)", num(cf.k), num(cf.thickness)),
            );
        }
    }
    summary.write(&ctx.out)
}

pub fn sweep(ctx: &Context) -> Result<(), CliError> {
    let fractions = ctx.config.sweep.current_fractions.clone();
    let request = SweepRequest {
        geometry: ctx.config.geometry(),
        materials: ctx.config.material_model(),
        operating: ctx.config.operating(),
        settings: ctx.settings,
        temperatures: ctx
            .config
            .sweep
            .temperatures_c
            .iter()
            .map(|t| kelvin_from_celsius(*t))
            .collect(),
        current_densities: ctx.config.sweep.current_densities_a_per_m2.clone(),
        fractions: fractions.clone(),
    };
    let rows = run_sweep(&request);

    let mut header = vec![
        "temperature_c".to_string(),
        "j_cell_a_per_m2".to_string(),
        "status".to_string(),
        "delta_c_m".to_string(),
        "sigma_eta_v".to_string(),
        "c_o2_min".to_string(),
        "iterations".to_string(),
        "final_residual".to_string(),
    ];
    for f in &fractions {
        header.push(format!("k_{f}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    // Rows are in row-major (T, j) order; recover the configured °C values by
    // index instead of back-converting Kelvin (which would not round-trip).
    let n_j = ctx.config.sweep.current_densities_a_per_m2.len();
    let mut failed = 0usize;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut cells = vec![
                num(ctx.config.sweep.temperatures_c[i / n_j]),
                num(row.point.j_cell),
            ];
            match &row.outcome {
                Ok(s) => {
                    cells.push("ok".to_string());
                    cells.push(num(s.delta_c));
                    cells.push(num(s.total_overpotential));
                    cells.push(num(s.c_o2_min));
                    cells.push(s.iterations.to_string());
                    cells.push(num(s.final_residual));
                    for cf in &s.current_fractions {
                        cells.push(num(cf.k));
                    }
                }
                Err(e) => {
                    cells.push(e.error.to_string());
                    for _ in 0..5 + fractions.len() {
                        cells.push(String::new());
                    }
                }
            }
            cells
        })
        .collect();
    for row in &rows {
        if row.outcome.is_err() {
            failed += 1;
        }
    }
    write_csv(&ctx.out, "sweep_grid", &header_refs, &csv_rows)?;

    let mut summary = Summary::default();
    summary.kv("command", "sweep");
    summary.kv("points", rows.len());
    summary.kv("failed_points", failed);
    summary.line("failed points are rows with a non-ok status; they delimit the feasible envelope");
    summary.write(&ctx.out)
}

pub fn verify(ctx: &Context) -> Result<(), CliError> {
    let section = &ctx.config.verify;
    if section.node_counts.is_empty() {
        return Err(CliError::Input("verify.node_counts is empty".to_string()));
    }
    let operating = ctx.config.operating();
    let materials = ctx.config.material_model().resolve(operating.temperature);
    let case = BenchmarkCase::new(section.alpha, ctx.config.geometry(), materials, operating)?;
    let study = run_accuracy_study(&case, &section.node_counts)?;

    let rows: Vec<Vec<String>> = study
        .rows
        .iter()
        .map(|r| {
            vec![
                r.nodes.to_string(),
                num(r.phi_el.max_rel),
                num(r.phi_el.mean_rel),
                num(r.phi_ion.max_rel),
                num(r.phi_ion.mean_rel),
                num(r.c_o2.max_rel),
                num(r.c_o2.mean_rel),
                num(r.j_el.max_rel),
                num(r.j_el.mean_rel),
                num(r.delta_c_rel),
                r.iterations.to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out,
        "verify_convergence",
        &[
            "nodes",
            "phi_el_max_rel",
            "phi_el_mean_rel",
            "phi_ion_max_rel",
            "phi_ion_mean_rel",
            "c_o2_max_rel",
            "c_o2_mean_rel",
            "j_el_max_rel",
            "j_el_mean_rel",
            "delta_c_rel",
            "iterations",
        ],
        &rows,
    )?;

    let mut summary = Summary::default();
    summary.kv("command", "verify");
    summary.kv("alpha", num(section.alpha));
    summary.kv("delta_c_exact_m", num(case.delta_c_exact));
    if study.rows.len() < 2 {
        summary.line("warning: single node count, convergence trend not checked");
    } else {
        for pair in study.rows.windows(2) {
            if pair[1].worst() >= pair[0].worst() {
                summary.line("convergence trend violated");
                summary.write(&ctx.out)?;
                return Err(CliError::Assertion(format!(
                    "worst error did not decrease from N={} to N={}",
                    pair[0].nodes, pair[1].nodes
                )));
            }
        }
        summary.line("convergence trend holds: worst error strictly decreases");
    }
    summary.write(&ctx.out)
}

pub fn crosscheck(ctx: &Context) -> Result<(), CliError> {
    let operating = ctx.config.operating();
    if operating.j_cell <= 0.0 {
        return Err(CliError::Input(
            "crosscheck needs a positive cell current; the dual formulation is undefined at zero"
                .to_string(),
        ));
    }
    let geometry = ctx.config.geometry();
    let materials = ctx.config.material_model().resolve(operating.temperature);
    let primal = solve(&geometry, &materials, &operating, &ctx.settings)?;
    let dual = solve_fixed_delta(&geometry, &materials, &operating, primal.delta_c, &ctx.settings)?;

    let scale = |values: &[f64]| {
        values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300)
    };
    let p = &primal.fields;
    let d = &dual.solution.fields;
    let p_j_ion = primal.j_ion();
    let d_j_ion = dual.solution.j_ion();
    let p_j_o2 = primal.j_o2_flux();
    let d_j_o2 = dual.solution.j_o2_flux();
    let scales = [
        scale(&p.phi_el),
        scale(&p.phi_ion),
        scale(&p.lambda),
        scale(&p_j_ion),
        scale(&p.c_o2),
        scale(&p_j_o2),
    ];
    let mut worst = 0.0f64;
    let rows: Vec<Vec<String>> = (0..p.len())
        .map(|i| {
            let devs = [
                (d.phi_el[i] - p.phi_el[i]).abs() / scales[0],
                (d.phi_ion[i] - p.phi_ion[i]).abs() / scales[1],
                (d.lambda[i] - p.lambda[i]).abs() / scales[2],
                (d_j_ion[i] - p_j_ion[i]).abs() / scales[3],
                (d.c_o2[i] - p.c_o2[i]).abs() / scales[4],
                (d_j_o2[i] - p_j_o2[i]).abs() / scales[5],
            ];
            worst = devs.iter().fold(worst, |m, v| m.max(*v));
            let mut row = vec![num(p.z[i])];
            row.extend(devs.iter().map(|v| num(*v)));
            row
        })
        .collect();
    write_csv(
        &ctx.out,
        "crosscheck_deviations",
        &[
            "z",
            "dev_phi_el",
            "dev_phi_ion",
            "dev_j_el",
            "dev_j_ion",
            "dev_c_o2",
            "dev_j_o2",
        ],
        &rows,
    )?;

    let recovery = (dual.c_o2_bulk - primal.c_o2_bulk).abs() / primal.c_o2_bulk;
    let mut summary = Summary::default();
    summary.kv("command", "crosscheck");
    summary.kv("delta_c_m", num(primal.delta_c));
    summary.kv("c_o2_bulk_primal", num(primal.c_o2_bulk));
    summary.kv("c_o2_bulk_recovered", num(dual.c_o2_bulk));
    summary.kv("c_o2_bulk_recovery_rel_error", num(recovery));
    summary.kv("worst_field_deviation", num(worst));
    summary.write(&ctx.out)?;
    if worst > 1e-4 || recovery > 1e-4 {
        return Err(CliError::Assertion(format!(
            "primal/dual deviation above 1e-4 (fields {worst:.3e}, bulk recovery {recovery:.3e})"
        )));
    }
    Ok(())
}

pub fn sensitivity(ctx: &Context) -> Result<(), CliError> {
    let compositions = ctx.config.sensitivity.x_o2_bulk.clone();
    if compositions.is_empty() {
        return Err(CliError::Input("sensitivity.x_o2_bulk is empty".to_string()));
    }
    let geometry = ctx.config.geometry();
    let operating = ctx.config.operating();
    let materials = ctx.config.material_model().resolve(operating.temperature);
    let settings = ctx.settings;
    let outcomes = map_points(&compositions, |&x| {
        let point = OperatingPoint {
            x_o2_bulk: x,
            ..operating
        };
        solve(&geometry, &materials, &point, &settings)
    });

    let mut rows = Vec::with_capacity(compositions.len());
    let mut deltas = Vec::new();
    for (x, outcome) in compositions.iter().zip(&outcomes) {
        match outcome {
            Ok(s) => {
                deltas.push(s.delta_c);
                rows.push(vec![
                    num(*x),
                    "ok".to_string(),
                    num(s.delta_c),
                    num(s.total_overpotential()),
                    s.iterations.to_string(),
                ]);
            }
            Err(e) => rows.push(vec![
                num(*x),
                e.name().to_string(),
                String::new(),
                String::new(),
                String::new(),
            ]),
        }
    }
    write_csv(
        &ctx.out,
        "sensitivity_composition",
        &["x_o2_bulk", "status", "delta_c_m", "sigma_eta_v", "iterations"],
        &rows,
    )?;

    let mut summary = Summary::default();
    summary.kv("command", "sensitivity");
    summary.kv("points", compositions.len());
    if deltas.len() > 1 {
        let min = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = deltas.iter().cloned().fold(0.0f64, f64::max);
        summary.kv("delta_c_relative_span", num((max - min) / min));
    }
    summary.write(&ctx.out)
}

struct Measurement {
    j_cell: f64,
    sigma_eta: f64,
    temperature: Option<f64>,
    x_o2_bulk: Option<f64>,
}

fn read_measurements(path: &PathBuf) -> Result<Vec<Measurement>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let index = |name: &str| headers.iter().position(|h| h == name);
    let j_col = index("j_cell_a_per_m2")
        .ok_or_else(|| CliError::Input("measurement CSV lacks column j_cell_a_per_m2".into()))?;
    let eta_col = index("sigma_eta_v")
        .ok_or_else(|| CliError::Input("measurement CSV lacks column sigma_eta_v".into()))?;
    let t_col = index("temperature_c");
    let x_col = index("x_o2_bulk");

    let parse = |field: &str, row: usize| {
        field.trim().parse::<f64>().map_err(|_| {
            CliError::Input(format!("measurement row {row}: cannot parse '{field}'"))
        })
    };
    let mut measurements = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        measurements.push(Measurement {
            j_cell: parse(&record[j_col], k)?,
            sigma_eta: parse(&record[eta_col], k)?,
            temperature: t_col
                .map(|c| parse(&record[c], k).map(kelvin_from_celsius))
                .transpose()?,
            x_o2_bulk: x_col.map(|c| parse(&record[c], k)).transpose()?,
        });
    }
    Ok(measurements)
}

pub fn compare(ctx: &Context) -> Result<(), CliError> {
    let relative = ctx.config.compare.measured_csv.clone().ok_or_else(|| {
        CliError::Input("compare needs compare.measured_csv in the config".to_string())
    })?;
    let path = ctx.config_dir.join(relative);
    let measurements = read_measurements(&path)?;

    let geometry = ctx.config.geometry();
    let template = ctx.config.operating();
    let model = ctx.config.material_model();
    let mut rows = Vec::with_capacity(measurements.len());
    let mut squared = 0.0f64;
    let mut solved = 0usize;
    for m in &measurements {
        let operating = OperatingPoint {
            j_cell: m.j_cell,
            temperature: m.temperature.unwrap_or(template.temperature),
            x_o2_bulk: m.x_o2_bulk.unwrap_or(template.x_o2_bulk),
            ..template
        };
        let materials = model.resolve(operating.temperature);
        match solve(&geometry, &materials, &operating, &ctx.settings) {
            Ok(s) => {
                let modeled = s.total_overpotential();
                squared += (modeled - m.sigma_eta).powi(2);
                solved += 1;
                rows.push(vec![
                    num(m.j_cell),
                    num(m.sigma_eta),
                    "ok".to_string(),
                    num(modeled),
                    num(modeled - m.sigma_eta),
                ]);
            }
            Err(e) => rows.push(vec![
                num(m.j_cell),
                num(m.sigma_eta),
                e.name().to_string(),
                String::new(),
                String::new(),
            ]),
        }
    }
    write_csv(
        &ctx.out,
        "compare_overlay",
        &[
            "j_cell_a_per_m2",
            "sigma_eta_measured_v",
            "status",
            "sigma_eta_model_v",
            "deviation_v",
        ],
        &rows,
    )?;

    let mut summary = Summary::default();
    summary.kv("command", "compare");
    summary.kv("measurements", measurements.len());
    if measurements.is_empty() {
        summary.line("warning: measurement file has no data rows; overlay is empty");
    }
    if solved > 0 {
        summary.kv("rms_deviation_v", num((squared / solved as f64).sqrt()));
    }
    summary.write(&ctx.out)
}
