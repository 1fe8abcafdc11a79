use std::path::Path;

use anyhow::anyhow;
use serde::Serialize;
use serde_json::{json, Value};
use stenzel_spin7::coframe::So3Bracket;
use stenzel_spin7::geometry::{cal_p, cal_q, cy_residual, r_to_t, Stenzel};
use stenzel_spin7::ivp::{integrate, Classification, EventKind, SolveOptions, Trajectory};
use stenzel_spin7::moduli::comparison::{t_blowup_a0, threshold_r, threshold_r_limit};
use stenzel_spin7::moduli::{b_nu, b_nu_blowup_time, critical_x, survey};

use crate::grid::Grid;
use crate::output::{emit, json_doc, num, opt_num, sidecar_path, Csv};
use crate::{verify, Command, Failure};

/// Everything that shaped an output file.
#[derive(Serialize)]
struct RunConfig<'a> {
    #[serde(flatten)]
    command: &'a Command,
    solve_options: Option<SolveOptions>,
    format: &'static str,
    out: Option<&'a Path>,
}

pub fn run(cmd: &Command, out: Option<&Path>, json: bool) -> Result<(), Failure> {
    let solve_options = match cmd {
        Command::Solve { numerics, .. } | Command::Survey { numerics, .. } | Command::Critical { numerics, .. } => {
            let o = numerics.options();
            o.validate()?;
            Some(o)
        }
        _ => None,
    };
    let cfg = RunConfig { command: cmd, solve_options, format: if json { "json" } else { "csv" }, out };
    match cmd {
        Command::Verify { flip_bracket_sign } => cmd_verify(&cfg, *flip_bracket_sign, out, json),
        Command::Geometry { grid, threshold } => cmd_geometry(&cfg, *grid, *threshold, out, json),
        Command::Solve { a0, grid, .. } => cmd_solve(&cfg, *a0, *grid, out, json),
        Command::Survey { grid, .. } => cmd_survey(&cfg, grid, out, json),
        Command::Critical { tol, .. } => cmd_critical(&cfg, *tol, out),
        Command::Family { nu, grid, t_grid } => cmd_family(&cfg, nu, *grid, t_grid, out, json),
    }
}

fn opts(cfg: &RunConfig) -> SolveOptions {
    cfg.solve_options.clone().expect("validated above")
}

fn cmd_verify(cfg: &RunConfig, flip: bool, out: Option<&Path>, json: bool) -> Result<(), Failure> {
    let br = if flip { So3Bracket::STANDARD.flipped() } else { So3Bracket::STANDARD };
    let checks = verify::run(br)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    let text = if json {
        json_doc(cfg, json!({ "checks": checks, "failed": failed }))?
    } else {
        let mut s = String::new();
        for c in &checks {
            let rel = match c.sense {
                verify::Sense::Below => "<=",
                verify::Sense::Above => ">",
            };
            s.push_str(&format!(
                "{:<20} {}  {:>10.3e} {rel} {:<8.1e} {}\n",
                c.id,
                if c.pass { "PASS" } else { "FAIL" },
                c.value,
                c.bound,
                c.identity
            ));
        }
        s.push_str(&format!("{} of {} identities hold\n", checks.len() - failed, checks.len()));
        s
    };
    emit(out, &text)?;
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} identity check(s) failed")));
    }
    Ok(())
}

fn cmd_geometry(cfg: &RunConfig, grid: Option<Grid>, threshold: bool, out: Option<&Path>, json: bool) -> Result<(), Failure> {
    if threshold {
        let g = grid.unwrap_or(Grid { lo: 0.05, hi: 20.0, n: 400 });
        let mut rows = vec![];
        for t in g.points() {
            rows.push((t, threshold_r(t)?));
        }
        let text = if json {
            let pts: Vec<Value> = rows.iter().map(|(t, r)| json!({ "t": t, "threshold": r })).collect();
            json_doc(cfg, json!({ "asymptote": threshold_r_limit(), "points": pts }))?
        } else {
            let mut c = Csv::new(cfg, &["t", "threshold", "asymptote"])?;
            for (t, r) in rows {
                c.row(&[num(t), num(r), num(threshold_r_limit())]);
            }
            c.into_string()
        };
        return Ok(emit(out, &text)?);
    }
    let g = grid.unwrap_or(Grid { lo: 1.001, hi: 10.0, n: 100 });
    let header = ["r", "t", "P", "Q", "calP", "calQ", "g_rr", "g_11", "g_22", "g_55", "cy_residual"];
    let mut rows: Vec<[f64; 11]> = vec![];
    for r in g.points() {
        let s = Stenzel::at(r)?;
        let t = r_to_t(r)?;
        let m = s.metric();
        rows.push([r, t, s.p.v, s.q.v, cal_p(t), cal_q(t), m.g[0].v, m.g[1].v, m.g[2].v, m.g[5].v, cy_residual(r)?]);
    }
    let text = if json {
        let pts: Vec<Value> = rows
            .iter()
            .map(|row| Value::Object(header.iter().zip(row).map(|(k, v)| (k.to_string(), json!(v))).collect()))
            .collect();
        json_doc(cfg, json!({ "rows": pts }))?
    } else {
        let mut c = Csv::new(cfg, &header)?;
        for row in rows {
            c.row(&row.map(num));
        }
        c.into_string()
    };
    Ok(emit(out, &text)?)
}

fn solve_summary(tr: &Trajectory) -> anyhow::Result<Value> {
    let cert = tr.certificate();
    let cert_bound = cert.filter(|e| e.kind == EventKind::BlowupCertificate).map(|e| e.value);
    // the a-priori bound from the slope is valid alongside the certificate
    let a_priori = t_blowup_a0(tr.a0)?;
    let blowup_upper_bound = match tr.classification {
        Classification::BlowupCertified => cert_bound.map(|b| b.min(a_priori)),
        _ => None,
    }
    .filter(|b| b.is_finite());
    Ok(json!({
        "a0": tr.a0,
        "classification": tr.classification.as_str(),
        "t_cert": cert.map(|e| e.t),
        "certificate": cert,
        "blowup_upper_bound": blowup_upper_bound,
        "a_priori_blowup_bound": a_priori.is_finite().then_some(a_priori),
        "divergence_time": tr.divergence_time(),
        "t_end": tr.t_end,
        "handoff_discrepancy": tr.handoff_discrepancy,
        "events": tr.events,
        "series": { "a_odd": tr.series.a_odd(), "b_even": tr.series.b_even() },
    }))
}

fn cmd_solve(cfg: &RunConfig, a0: f64, grid: Option<Grid>, out: Option<&Path>, json: bool) -> Result<(), Failure> {
    let mut o = opts(cfg);
    let times = match grid {
        Some(g) => g.points(),
        None => (1..=(o.horizon * 10.0).floor() as usize).map(|k| k as f64 / 10.0).collect(),
    };
    o.sample_times = Some(times);
    let tr = integrate(a0, &o)?;
    let summary = solve_summary(&tr)?;
    if json {
        let samples: Vec<Value> = tr
            .samples
            .iter()
            .map(|s| json!({ "t": s.t, "a": s.a, "b": s.b, "dadt": s.dadt, "dbdt": s.dbdt, "b_minus_crit": s.b - 1.0 / cal_p(s.t) }))
            .collect();
        let mut body = summary;
        body["samples"] = Value::Array(samples);
        return Ok(emit(out, &json_doc(cfg, body)?)?);
    }
    let mut c = Csv::new(cfg, &["t", "a", "b", "dadt", "dbdt", "b_minus_crit"])?;
    for s in &tr.samples {
        c.row(&[num(s.t), num(s.a), num(s.b), num(s.dadt), num(s.dbdt), num(s.b - 1.0 / cal_p(s.t))]);
    }
    emit(out, &c.into_string())?;
    if let Some(p) = out {
        emit(Some(&sidecar_path(p)), &json_doc(cfg, summary)?)?;
    }
    Ok(())
}

fn cmd_survey(cfg: &RunConfig, grid: &Grid, out: Option<&Path>, json: bool) -> Result<(), Failure> {
    let pts = survey(&grid.points(), &opts(cfg))?;
    let text = if json {
        json_doc(cfg, json!({ "points": pts }))?
    } else {
        let mut c = Csv::new(cfg, &["a0", "classification", "t_cert", "blowup_bound"])?;
        for p in &pts {
            c.row(&[num(p.a0), p.classification.as_str().to_string(), opt_num(p.t_cert), opt_num(p.blowup_bound)]);
        }
        c.into_string()
    };
    Ok(emit(out, &text)?)
}

fn cmd_critical(cfg: &RunConfig, tol: f64, out: Option<&Path>) -> Result<(), Failure> {
    let b = critical_x(tol, &opts(cfg))?;
    let certificates: Vec<Value> = b
        .probes
        .iter()
        .map(|p| {
            json!({
                "a0": p.a0,
                "classification": p.classification.as_str(),
                "t_cert": p.t_cert,
                "blowup_bound": p.blowup_bound,
            })
        })
        .collect();
    let body = json!({
        "x_lo": b.x_lo,
        "x_hi": b.x_hi,
        "tol": b.tol,
        "status": b.status,
        "horizon_used": b.horizon_used,
        "certificates": certificates,
    });
    Ok(emit(out, &json_doc(cfg, body)?)?)
}

fn cmd_family(
    cfg: &RunConfig,
    nus: &[f64],
    grid: Option<Grid>,
    t_grid: &Grid,
    out: Option<&Path>,
    json: bool,
) -> Result<(), Failure> {
    let mut values = nus.to_vec();
    if let Some(g) = grid {
        values.extend(g.points());
    }
    if values.is_empty() {
        return Err(Failure::Usage(anyhow!("family needs --nu or --grid")));
    }
    if let Some(t) = t_grid.points().into_iter().find(|&t| !(t > 0.0)) {
        return Err(Failure::Usage(anyhow!("time grid must be positive, got t = {t}")));
    }
    // (ν, t, b or None past the pole, blowup time)
    let mut rows = vec![];
    for &nu in &values {
        let tb = b_nu_blowup_time(nu);
        for t in t_grid.points() {
            let b = match b_nu(nu, t) {
                Ok(b) => Some(b),
                Err(stenzel_spin7::Error::Pole(_)) => None,
                Err(e) => return Err(e.into()),
            };
            rows.push((nu, t, b, tb));
        }
    }
    let text = if json {
        let pts: Vec<Value> = rows.iter().map(|(nu, t, b, tb)| json!({ "nu": nu, "t": t, "b": b, "t_blowup": tb })).collect();
        json_doc(cfg, json!({ "rows": pts }))?
    } else {
        let mut c = Csv::new(cfg, &["nu", "t", "b", "t_blowup"])?;
        for (nu, t, b, tb) in rows {
            c.row(&[num(nu), num(t), opt_num(b), opt_num(tb)]);
        }
        c.into_string()
    };
    Ok(emit(out, &text)?)
}
