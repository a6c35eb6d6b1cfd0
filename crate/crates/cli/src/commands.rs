//! The five subcommands. Each renders all of its files in memory; nothing is
//! written here.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use timebin_qwalk_core::analysis::{
    calibrate_drift_sigma, classical_rw_distribution, distance, fidelity, growth_exponent,
    linear_to_db, loss_budget, stability_run, variance,
};
use timebin_qwalk_core::kerr::{calibrate_pump, read_out, DelayScan, PumpPulse, TemporalTrace};
use timebin_qwalk_core::operators::{evolve_with, step_matrix, DenseMatrix};
use timebin_qwalk_core::{prepare, Distribution, Error, Polarization, WalkerState};

use crate::config::RunConfig;
use crate::landscape::landscape;
use crate::output::{fmt_f64, OutputFile, Table};
use crate::plot::{bar_chart, line_chart, scatter_log_x, ScatterPoint, Series};

/// Files to write plus a human-readable summary for stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outputs {
    pub files: Vec<OutputFile>,
    pub report: String,
}

fn svg(name: String, contents: String) -> OutputFile {
    OutputFile { name, contents }
}

/// Delays are sums of float steps; trim the accumulated noise for display.
fn fmt_delay(ps: f64) -> String {
    fmt_f64((ps * 1e9).round() / 1e9)
}

fn history(cfg: &RunConfig) -> Result<(WalkerState, Vec<WalkerState>)> {
    let input = prepare(&cfg.input, cfg.grid()).context("preparing the input state")?;
    let history =
        evolve_with(&input, &cfg.schedule, cfg.tolerances).context("evolving the walk")?;
    Ok((input, history))
}

/// Highest bin reachable after each step count.
fn reach(cfg: &RunConfig) -> Vec<usize> {
    let last = cfg.grid().bin_count() - 1;
    let mut bins = vec![cfg.input.max_bin().min(last)];
    for step in cfg.schedule.steps() {
        let prev = *bins.last().expect("non-empty");
        bins.push(if step.shift_enabled {
            (prev + 1).min(last)
        } else {
            prev
        });
    }
    bins
}

pub fn walk(cfg: &RunConfig) -> Result<Outputs> {
    let grid = cfg.grid();
    let (input, history) = history(cfg)?;
    let reach = reach(cfg);

    let mut evolution = Table::new(&["step", "bin", "polarization", "probability"]);
    let mut fid = Table::new(&["step", "fidelity"]);
    let mut plots = Vec::new();
    let mut oracle = DenseMatrix::identity(grid.dimension());
    let mut last_fidelity = 1.0;

    for (n, state) in history.iter().enumerate() {
        let probs = state.probabilities();
        for bin in 0..=reach[n] {
            for pol in Polarization::ALL {
                evolution.row([
                    n.to_string(),
                    bin.to_string(),
                    pol.to_string(),
                    fmt_f64(probs.get(bin, pol)),
                ]);
            }
        }

        if n > 0 {
            oracle = step_matrix(&cfg.schedule.steps()[n - 1], grid).matmul(&oracle);
        }
        let expected: Vec<f64> = oracle
            .apply(input.amplitudes())
            .iter()
            .map(|a| a.norm_sqr())
            .collect();
        let expected = Distribution::from_vector(grid, expected)?.normalized()?;
        last_fidelity = fidelity(&probs.normalized()?, &expected, reach[n])?;
        fid.row([n.to_string(), fmt_f64(last_fidelity)]);

        if cfg.emit_plots {
            let h: Vec<f64> = (0..=reach[n])
                .map(|m| probs.get(m, Polarization::H))
                .collect();
            let v: Vec<f64> = (0..=reach[n])
                .map(|m| probs.get(m, Polarization::V))
                .collect();
            plots.push(svg(
                format!("walk_step_{n:02}.svg"),
                bar_chart(&format!("step {n}"), &h, &v),
            ));
        }
    }

    let final_state = history.last().expect("evolve returns the input at least");
    let mut report = String::new();
    let _ = writeln!(
        report,
        "walk: {} steps on {} bins",
        cfg.schedule.len(),
        grid.bin_count()
    );
    let _ = writeln!(
        report,
        "final norm squared: {}",
        fmt_f64(final_state.norm_squared())
    );
    let _ = writeln!(
        report,
        "final fidelity vs dense oracle: {}",
        fmt_f64(last_fidelity)
    );
    if let Some(mu) = cfg.mean_photon_number {
        let _ = writeln!(
            report,
            "mean photon number (recorded only): {}",
            fmt_f64(mu)
        );
    }

    let mut files = vec![
        evolution.finish("evolution.csv"),
        fid.finish("fidelity.csv"),
    ];
    files.extend(plots);
    Ok(Outputs { files, report })
}

fn trace_table(trace: &TemporalTrace, name: &str) -> OutputFile {
    let mut t = Table::new(&["delay_ps", "intensity"]);
    for &(d, v) in trace.samples() {
        t.row([fmt_delay(d), fmt_f64(v)]);
    }
    t.finish(name)
}

pub fn trace(cfg: &RunConfig) -> Result<Outputs> {
    let grid = cfg.grid();
    let (_, history) = history(cfg)?;
    let dist = history.last().expect("non-empty").probabilities();

    let pump = match cfg.pump.peak_intensity {
        Some(peak) => PumpPulse::new(peak, cfg.pump.fwhm_ps, cfg.pump.shape)?,
        None => calibrate_pump(&cfg.gate, cfg.pump.shape, cfg.pump.fwhm_ps)
            .context("calibrating the pump")?,
    };
    let spacing = grid.spacing_ps();
    let start = cfg.scan.start_ps.unwrap_or(-spacing);
    let stop = cfg
        .scan
        .stop_ps
        .unwrap_or(grid.bin_count() as f64 * spacing);
    let scan =
        DelayScan::uniform(start, stop, cfg.scan.step_ps).context("building the delay scan")?;
    let r =
        read_out(&dist, &cfg.gate, &pump, &cfg.signal, &scan).context("reading out the walk")?;

    let mut readout = Table::new(&["bin", "delay_ps", "polarization", "probability"]);
    for bin in 0..grid.bin_count() {
        for pol in Polarization::ALL {
            readout.row([
                bin.to_string(),
                fmt_delay(grid.delay_ps(bin)),
                pol.to_string(),
                fmt_f64(r.distribution.get(bin, pol)),
            ]);
        }
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "trace: {} delays from {} ps to {} ps",
        scan.delays().len(),
        fmt_delay(start),
        fmt_delay(stop)
    );
    let _ = writeln!(
        report,
        "pump peak intensity: {}",
        fmt_f64(pump.peak_intensity)
    );
    if r.distribution.total() > 0.0 {
        let tv = distance(&r.distribution, &dist.normalized()?)?;
        let _ = writeln!(
            report,
            "readout vs direct distribution, total-variation distance: {}",
            fmt_f64(tv)
        );
    } else {
        let _ = writeln!(report, "the gate passes no light; readout is all zero");
    }

    let mut files = vec![
        trace_table(&r.trace_h, "trace_H.csv"),
        trace_table(&r.trace_v, "trace_V.csv"),
        readout.finish("readout.csv"),
    ];
    if cfg.emit_plots {
        let series = [
            Series {
                name: "H",
                points: r.trace_h.samples().to_vec(),
            },
            Series {
                name: "V",
                points: r.trace_v.samples().to_vec(),
            },
        ];
        files.push(svg(
            "trace.svg".into(),
            line_chart(
                "Gated signal vs pump delay",
                "delay (ps)",
                "intensity",
                &series,
                None,
            ),
        ));
    }
    Ok(Outputs { files, report })
}

pub fn variance_cmd(cfg: &RunConfig) -> Result<Outputs> {
    let (_, history) = history(cfg)?;
    let mut table = Table::new(&["step", "variance_quantum", "variance_classical"]);
    let mut quantum = Vec::with_capacity(history.len());
    let mut classical = Vec::with_capacity(history.len());
    for (n, state) in history.iter().enumerate() {
        let q = variance(&state.probabilities().normalized()?)?;
        let c = variance(&classical_rw_distribution(n))?;
        table.row([n.to_string(), fmt_f64(q), fmt_f64(c)]);
        quantum.push((n, q));
        classical.push((n, c));
    }

    let fit_min = cfg.variance.fit_min;
    let fit_max = cfg.variance.fit_max.unwrap_or(cfg.schedule.len());
    let mut fit = Table::new(&["series", "exponent", "fit_min", "fit_max"]);
    let mut report = String::new();
    let _ = writeln!(report, "variance: steps 0..={}", cfg.schedule.len());
    for (name, points) in [("quantum", &quantum), ("classical", &classical)] {
        let exponent = match growth_exponent(points, fit_min, fit_max) {
            Ok(e) => Some(e),
            Err(Error::InsufficientPoints { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let shown = exponent.map(fmt_f64).unwrap_or_default();
        fit.row([
            name.to_owned(),
            shown.clone(),
            fit_min.to_string(),
            fit_max.to_string(),
        ]);
        match exponent {
            Some(_) => {
                let _ = writeln!(
                    report,
                    "{name} growth exponent over steps {fit_min}..={fit_max}: {shown}"
                );
            }
            None => {
                let _ = writeln!(
                    report,
                    "{name} growth exponent: too few steps in {fit_min}..={fit_max} to fit"
                );
            }
        }
    }

    let mut files = vec![table.finish("variance.csv"), fit.finish("variance_fit.csv")];
    if cfg.emit_plots {
        let to_points = |v: &[(usize, f64)]| v.iter().map(|&(n, x)| (n as f64, x)).collect();
        let series = [
            Series {
                name: "quantum",
                points: to_points(&quantum),
            },
            Series {
                name: "classical",
                points: to_points(&classical),
            },
        ];
        files.push(svg(
            "variance.svg".into(),
            line_chart(
                "Variance per step",
                "step",
                "variance (bins²)",
                &series,
                None,
            ),
        ));
    }
    Ok(Outputs { files, report })
}

pub fn stability(cfg: &RunConfig) -> Result<Outputs> {
    let mut model = cfg.drift.model;
    let mut report = String::new();
    if cfg.drift.calibrate {
        let seeds: Vec<u64> = (0..cfg.drift.calibration_seeds as u64)
            .map(|i| cfg.seed.wrapping_add(i))
            .collect();
        model.sigma_gamma =
            calibrate_drift_sigma(&cfg.schedule, &cfg.input, &model, cfg.drift.target, &seeds)
                .context("calibrating the drift")?;
        let _ = writeln!(
            report,
            "calibrated sigma_gamma: {} deg per sample (mean endpoint fidelity {} over {} seeds)",
            fmt_f64(model.sigma_gamma.to_degrees()),
            fmt_f64(cfg.drift.target),
            seeds.len()
        );
    }
    let series =
        stability_run(&cfg.schedule, &cfg.input, &model).context("running the drift model")?;

    let mut table = Table::new(&["time_h", "fidelity_H", "fidelity_V"]);
    for s in &series {
        table.row([
            fmt_f64(s.time_h),
            fmt_f64(s.fidelity_h),
            fmt_f64(s.fidelity_v),
        ]);
    }
    let min_h = series.iter().map(|s| s.fidelity_h).fold(1.0, f64::min);
    let min_v = series.iter().map(|s| s.fidelity_v).fold(1.0, f64::min);
    let _ = writeln!(
        report,
        "stability: {} samples, seed {}",
        series.len(),
        model.seed
    );
    let _ = writeln!(
        report,
        "minimum fidelity: H {}, V {}",
        fmt_f64(min_h),
        fmt_f64(min_v)
    );

    let mut files = vec![table.finish("stability.csv")];
    if cfg.emit_plots {
        let lines = [
            Series {
                name: "H",
                points: series.iter().map(|s| (s.time_h, s.fidelity_h)).collect(),
            },
            Series {
                name: "V",
                points: series.iter().map(|s| (s.time_h, s.fidelity_v)).collect(),
            },
        ];
        let floor = min_h.min(min_v).min(0.9);
        files.push(svg(
            "stability.svg".into(),
            line_chart(
                "Fidelity under coin drift",
                "time (h)",
                "fidelity",
                &lines,
                Some((floor, 1.0)),
            ),
        ));
    }
    Ok(Outputs { files, report })
}

pub fn budget(cfg: &RunConfig) -> Result<Outputs> {
    let b = loss_budget(&cfg.budget)?;
    let mut table = Table::new(&[
        "component",
        "loss_db",
        "count",
        "subtotal_db",
        "transmission",
    ]);
    let mut report = String::new();
    let _ = writeln!(
        report,
        "{:<36} {:>9} {:>6} {:>12}",
        "component", "dB each", "count", "subtotal dB"
    );
    for c in &cfg.budget {
        let sub = c.subtotal_db();
        table.row([
            c.name.clone(),
            fmt_f64(c.loss_db),
            c.count.to_string(),
            fmt_f64(sub),
            fmt_f64(10f64.powf(sub / 10.0)),
        ]);
        let _ = writeln!(
            report,
            "{:<36} {:>9.3} {:>6} {:>12.3}",
            c.name, c.loss_db, c.count, sub
        );
    }
    table.row([
        "total".to_owned(),
        String::new(),
        String::new(),
        fmt_f64(b.total_db),
        fmt_f64(b.efficiency),
    ]);
    let _ = writeln!(
        report,
        "total: {:.3} dB, efficiency {:.4} ({:.1}%)",
        b.total_db,
        b.efficiency,
        100.0 * b.efficiency
    );

    let mut files = vec![table.finish("budget.csv")];
    if cfg.emit_plots {
        let rows = landscape();
        let mut points: Vec<ScatterPoint> = rows
            .iter()
            .filter_map(|r| {
                Some(ScatterPoint {
                    x: r.steps as f64,
                    y: r.loss_db_per_step?,
                    shade: r.fidelity.map(|f| (f - 0.75) / 0.25),
                    triangle: r.photons > 1,
                    label: &r.reference,
                })
            })
            .collect();
        let n = cfg.schedule.len();
        let per_step = if n > 0 {
            Some(
                cfg.schedule
                    .steps()
                    .iter()
                    .map(|s| linear_to_db(s.transmission))
                    .sum::<f64>()
                    / n as f64,
            )
        } else {
            None
        };
        if let Some(y) = per_step {
            points.push(ScatterPoint {
                x: n as f64,
                y,
                shade: None,
                triangle: false,
                label: "this configuration",
            });
        }
        files.push(svg(
            "landscape.svg".into(),
            scatter_log_x(
                "Loss per step vs number of steps",
                "steps",
                "loss per step (dB)",
                &points,
            ),
        ));
    }
    Ok(Outputs { files, report })
}
