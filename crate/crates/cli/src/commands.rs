use std::fs;
use std::path::{Path, PathBuf};

use duhamel::asymptotics::{fixed_point_check, translation_sweep, verify_bound};
use duhamel::config::ExperimentConfig;
use duhamel::evolution::{increment_identity, weak_residual, weak_residual_with};
use duhamel::format::fmt_f64;
use duhamel::oracle::{quadrature_duhamel, step_modal, ModalValue};
use duhamel::trajectory::{mollifier_pair, sample_trajectory, write_trajectory_csv, Side, Trajectory};
use duhamel::transform::synthesize_field;
use duhamel::{Complex64, EvolutionProblem, Mode, SpectralMeasure};
use serde_json::{json, Value};

use crate::error::CliError;

type CliResult<T> = std::result::Result<T, CliError>;

/// Collects artifacts under one output directory.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io { path, source })?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_json(&mut self, name: &str, v: &Value) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(v).expect("json values always serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn trajectory_outputs(cfg: &ExperimentConfig, mode: Mode, out: &mut Output, command: &str) -> CliResult<()> {
    let traj = Trajectory::new(cfg.problem_for(mode)?, mode)?;
    let rows = sample_trajectory(&traj, &cfg.functionals, &cfg.time_grid)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&rows, &mut csv).expect("writing to memory");
    out.write("trajectory.csv", &csv)?;

    if let Some((grid, times)) = &cfg.spatial_grid {
        for (k, &t) in times.iter().enumerate() {
            let field = synthesize_field(&traj.eval(t)?, grid, t)?;
            let mut buf = Vec::new();
            field.write_csv(&mut buf).expect("writing to memory");
            out.write(&format!("field_{k:03}.csv"), &buf)?;
        }
    }

    let (lo, hi) = grid_range(&cfg.time_grid);
    let jumps: Vec<Value> = traj
        .schedule()
        .iter()
        .filter(|&&t| t >= lo && t <= hi)
        .map(|&t| num(t))
        .collect();
    let files = out.files().to_vec();
    out.write_json(
        "summary.json",
        &json!({
            "command": command,
            "mode": mode.as_str(),
            "jump_times": jumps,
            "files": files,
            "config": cfg.normalized_json(),
        }),
    )
}

fn grid_range(grid: &[f64]) -> (f64, f64) {
    (grid[0], grid[grid.len() - 1])
}

pub fn solve(cfg: &ExperimentConfig, out: &mut Output) -> CliResult<()> {
    trajectory_outputs(cfg, cfg.mode, out, "solve")
}

pub fn steady(cfg: &ExperimentConfig, out: &mut Output) -> CliResult<()> {
    trajectory_outputs(cfg, Mode::Steady, out, "steady")
}

struct Check {
    name: &'static str,
    functional: Option<String>,
    value: f64,
    tolerance: f64,
    skipped: Option<String>,
}

impl Check {
    fn pass(&self) -> bool {
        self.skipped.is_some() || self.value <= self.tolerance
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "name": self.name,
            "value": num(self.value),
            "tolerance": num(self.tolerance),
            "pass": self.pass(),
        });
        if let Some(id) = &self.functional {
            v["functional"] = json!(id);
        }
        if let Some(why) = &self.skipped {
            v["skipped"] = json!(why);
        }
        v
    }
}

fn inputs_hermitian(prob: &EvolutionProblem, tol: f64) -> bool {
    let real_profile = |p: &duhamel::TemporalProfile| {
        p.atoms().iter().all(|a| a.mass.im == 0.0) && p.segments().iter().all(|s| s.rate.im == 0.0)
    };
    let herm = |m: &SpectralMeasure| m.is_hermitian(tol);
    let pts = prob.support_points();
    let symbol_ok = prob.symbol().check_hermitian(&pts, tol).is_ok_and(|r| r.pass);
    symbol_ok
        && prob
            .source()
            .terms()
            .iter()
            .all(|t| herm(&t.spatial) && real_profile(&t.temporal))
        && prob.initial().is_none_or(herm)
        && prob.time_homogeneous_source().is_none_or(herm)
}

pub fn verify(cfg: &ExperimentConfig, out: &mut Output) -> CliResult<()> {
    let mode = cfg.mode;
    let prob = cfg.problem_for(mode)?;
    prob.check_mode(mode)?;
    let opts = &cfg.verify;
    let (from, to) = grid_range(&cfg.time_grid);
    let lo = from.max(0.0);
    // Cauchy test bumps must stay clear of the initial jump at t = 0.
    let residual_lo = if mode == Mode::Cauchy && lo == 0.0 { 1e-3 * to } else { lo };
    let mut checks = Vec::new();

    for (id, f) in &cfg.functionals {
        let value = if to > residual_lo {
            let report = if opts.corrupt_scale == 1.0 {
                weak_residual(&prob, mode, f, (residual_lo, to), opts.n_test)?
            } else {
                let scale = Complex64::new(opts.corrupt_scale, 0.0);
                weak_residual_with(
                    &prob,
                    mode,
                    |t| Ok(prob.snapshot(mode, t)?.scale(scale)),
                    f,
                    (residual_lo, to),
                    opts.n_test,
                )?
            };
            Some(report.max_residual)
        } else {
            None
        };
        checks.push(Check {
            name: "weak_residual",
            functional: Some(id.clone()),
            value: value.unwrap_or(0.0),
            tolerance: opts.residual_tol,
            skipped: value.is_none().then(|| "time grid has no positive extent".to_string()),
        });
    }

    let times: Vec<f64> = cfg.time_grid.iter().copied().filter(|&t| t >= 0.0).collect();
    for (id, f) in &cfg.functionals {
        let mut worst: f64 = 0.0;
        for w in times.windows(2) {
            worst = worst.max(increment_identity(&prob, mode, f, w[0], w[1])?.relative_defect);
        }
        checks.push(Check {
            name: "increment_identity",
            functional: Some(id.clone()),
            value: worst,
            tolerance: opts.increment_tol,
            skipped: (times.len() < 2).then(|| "fewer than two nonnegative sample times".to_string()),
        });
    }

    let traj = Trajectory::new(prob.clone(), mode)?;
    let mut scale: f64 = 1.0;
    for (t, _) in traj.jumps((lo, to))? {
        scale = scale.max(traj.eval(t)?.total_variation());
    }
    checks.push(Check {
        name: "jump_consistency",
        functional: None,
        value: traj.jump_consistency((lo, to))? / scale,
        tolerance: 1e-12,
        skipped: None,
    });

    let herm_check = match &cfg.spatial_grid {
        None => Check {
            name: "hermitian_field",
            functional: None,
            value: 0.0,
            tolerance: opts.hermitian_tol,
            skipped: Some("no spatial grid configured".into()),
        },
        Some(_) if !inputs_hermitian(&prob, 1e-12) => Check {
            name: "hermitian_field",
            functional: None,
            value: 0.0,
            tolerance: opts.hermitian_tol,
            skipped: Some("symbol or measures are not Hermitian".into()),
        },
        Some((grid, field_times)) => {
            let mut worst: f64 = 0.0;
            for &t in field_times.iter().filter(|&&t| t >= 0.0) {
                let field = synthesize_field(&traj.eval(t)?, grid, t)?;
                let m = field.max_abs();
                if m > 0.0 {
                    worst = worst.max(field.max_abs_imag() / m);
                }
            }
            Check {
                name: "hermitian_field",
                functional: None,
                value: worst,
                tolerance: opts.hermitian_tol,
                skipped: None,
            }
        }
    };
    checks.push(herm_check);

    let full = cfg.problem()?;
    let fixed_point = if full.check_mode(Mode::Steady).is_ok() && !times.is_empty() {
        Check {
            name: "fixed_point",
            functional: None,
            value: fixed_point_check(&full, &times)?.max_tv_discrepancy,
            tolerance: 1e-10,
            skipped: None,
        }
    } else {
        Check {
            name: "fixed_point",
            functional: None,
            value: 0.0,
            tolerance: 1e-10,
            skipped: Some("no steady solution: effective_kappa is not positive".into()),
        }
    };
    checks.push(fixed_point);

    let pass = checks.iter().all(Check::pass);
    out.write_json(
        "verify.json",
        &json!({
            "command": "verify",
            "mode": mode.as_str(),
            "pass": pass,
            "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "config": cfg.normalized_json(),
        }),
    )?;
    if pass {
        Ok(())
    } else {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.pass())
            .map(|c| match &c.functional {
                Some(id) => format!("{}[{id}] = {:e} > {:e}", c.name, c.value, c.tolerance),
                None => format!("{} = {:e} > {:e}", c.name, c.value, c.tolerance),
            })
            .collect();
        Err(CliError::Verification(failed.join("; ")))
    }
}

pub fn asymptotics(cfg: &ExperimentConfig, out: &mut Output) -> CliResult<()> {
    let prob = cfg.problem()?;
    prob.check_mode(Mode::Steady)?;
    let times = &cfg.time_grid;
    let mut summaries = Vec::new();
    let mut total_violations = 0usize;
    for (id, f) in &cfg.functionals {
        let report = verify_bound(&prob, f, times)?;
        let t_eps = report.t_epsilon(cfg.epsilon)?;
        let t_eps_ok = report
            .times
            .iter()
            .zip(&report.gaps)
            .all(|(t, g)| *t < t_eps || *g < cfg.epsilon);
        let mut sweep_max: f64 = 0.0;
        let mut sweep_violations = 0usize;
        if !cfg.shifts.is_empty() {
            for (t, b) in times.iter().zip(&report.bounds) {
                let g = translation_sweep(&prob, f, &cfg.shifts, *t)?;
                sweep_max = sweep_max.max(g);
                if g > b * (1.0 + duhamel::asymptotics::BOUND_SLACK) {
                    sweep_violations += 1;
                }
            }
        }
        let mut csv = String::from("t,gap,bound\n");
        for ((t, g), b) in report.times.iter().zip(&report.gaps).zip(&report.bounds) {
            csv.push_str(&format!("{},{},{}\n", fmt_f64(*t), fmt_f64(*g), fmt_f64(*b)));
        }
        out.write(&format!("asymptotics_{id}.csv"), csv.as_bytes())?;
        total_violations += report.bound_violations + sweep_violations + usize::from(!t_eps_ok);
        summaries.push(json!({
            "id": id,
            "c_phi": num(report.c_phi),
            "kappa_declared": num(report.kappa_declared),
            "kappa_effective": num(report.kappa_effective),
            "kappa_fitted": report.kappa_fitted.map_or(Value::Null, num),
            "violations": report.bound_violations,
            "t_epsilon": num(t_eps),
            "t_epsilon_holds": t_eps_ok,
            "translation_max_gap": num(sweep_max),
            "translation_violations": sweep_violations,
        }));
    }
    let fp = fixed_point_check(&prob, times)?;
    out.write_json(
        "asymptotics.json",
        &json!({
            "command": "asymptotics",
            "epsilon": num(cfg.epsilon),
            "functionals": summaries,
            "fixed_point": {"max_tv_discrepancy": num(fp.max_tv_discrepancy)},
            "config": cfg.normalized_json(),
        }),
    )?;
    if total_violations > 0 {
        return Err(CliError::Verification(format!("{total_violations} asymptotic bound violations")));
    }
    Ok(())
}

fn comparison_csv(d: usize, closed: &SpectralMeasure, reference: &[ModalValue]) -> (String, f64) {
    let mut csv = String::new();
    for k in 1..=d {
        csv.push_str(&format!("xi{k},"));
    }
    csv.push_str("closed_re,closed_im,oracle_re,oracle_im,abs_err\n");
    let mut worst: f64 = 0.0;
    for m in reference {
        let c = closed.mass_at(&m.xi);
        let err = (c - m.value).norm();
        worst = worst.max(err);
        for x in &m.xi {
            csv.push_str(&fmt_f64(*x));
            csv.push(',');
        }
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(c.re),
            fmt_f64(c.im),
            fmt_f64(m.value.re),
            fmt_f64(m.value.im),
            fmt_f64(err)
        ));
    }
    (csv, worst)
}

pub fn oracle_compare(cfg: &ExperimentConfig, out: &mut Output) -> CliResult<()> {
    let prob = cfg.problem_for(cfg.mode)?;
    let mode = if prob.initial().is_some() { Mode::Cauchy } else { Mode::Duhamel };
    let t_end = cfg.stepper.t_end;
    let closed = prob.snapshot(mode, t_end)?;
    let stepped = step_modal(&prob, &cfg.stepper)?;
    let quad = quadrature_duhamel(&prob, t_end, cfg.n_panels)?;
    let (csv, err_step) = comparison_csv(cfg.dimension, &closed, &stepped);
    out.write("oracle.csv", csv.as_bytes())?;
    let (csv, err_quad) = comparison_csv(cfg.dimension, &closed, &quad);
    out.write("quadrature.csv", csv.as_bytes())?;
    out.write_json(
        "oracle.json",
        &json!({
            "command": "oracle-compare",
            "mode": mode.as_str(),
            "method": cfg.stepper.method.as_str(),
            "dt": num(cfg.stepper.dt),
            "t_end": num(t_end),
            "n_panels": cfg.n_panels,
            "max_abs_err_stepper": num(err_step),
            "max_abs_err_quadrature": num(err_quad),
            "config": cfg.normalized_json(),
        }),
    )
}

pub fn mollifier(cfg: &ExperimentConfig, out: &mut Output) -> CliResult<()> {
    let traj = Trajectory::new(cfg.problem_for(cfg.mode)?, cfg.mode)?;
    let (lo, hi) = grid_range(&cfg.time_grid);
    let times: Vec<f64> = match &cfg.mollifier_times {
        Some(ts) => ts.clone(),
        None => traj.schedule().iter().copied().filter(|&t| t >= lo && t <= hi).collect(),
    };
    let mut entries = Vec::new();
    for (id, f) in &cfg.functionals {
        for side in [Side::Left, Side::Right] {
            let params = cfg.mollifier_params(side)?;
            let mut csv = String::from("t,a_n,re,im\n");
            for &t in &times {
                let seq = mollifier_pair(&traj, f, t, &params)?;
                let target = match side {
                    Side::Left => traj.left_limit(t)?,
                    Side::Right => traj.eval(t)?,
                }
                .pair(f)?;
                for (a, v) in &seq {
                    csv.push_str(&format!("{},{},{},{}\n", fmt_f64(t), fmt_f64(*a), fmt_f64(v.re), fmt_f64(v.im)));
                }
                let last = seq.last().expect("nonempty widths").1;
                entries.push(json!({
                    "functional": id,
                    "side": side.as_str(),
                    "t": num(t),
                    "target": [num(target.re), num(target.im)],
                    "final": [num(last.re), num(last.im)],
                    "final_error": num((last - target).norm()),
                }));
            }
            out.write(&format!("mollifier_{id}_{}.csv", side.as_str()), csv.as_bytes())?;
        }
    }
    out.write_json(
        "mollifier.json",
        &json!({
            "command": "mollifier",
            "mode": cfg.mode.as_str(),
            "depth": cfg.mollifier_depth,
            "entries": entries,
            "config": cfg.normalized_json(),
        }),
    )
}
