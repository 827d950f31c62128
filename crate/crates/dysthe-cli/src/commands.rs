//! Subcommand execution: resolve each option as flag, then config key, then
//! default; run the experiment; serialize the artifact.

use clap::ValueEnum;
use num_complex::Complex64;

use dysthe_core::dynamics::{
    energy_functional_i, illposedness_data, illposedness_experiment, illposedness_sweep,
    third_picard_iterate, viscous_solve, vn_energy_closed_form, vn_family, PicardMethod,
    PicardReport, ViscousParams,
};
use dysthe_core::field::SpectralField;
use dysthe_core::random::{spatial_field, RandomFieldSpec};
use dysthe_core::resonance::{count_bruteforce, count_divisor, ResonanceQuery};
use dysthe_core::verify::{
    bilinear_z_report, dyadic_bilinear_sweep, l4_ratio_report, l4_spread_report,
    lr_strichartz_report, strichartz_l6_report, trilinear_report, BilinearVariant, RatioReport,
};

use crate::config::FileConfig;
use crate::output::{fmt_f, json_array, Csv, JsonObj};
use crate::{CliError, Command, MethodArg, OutputFormat, VariantArg};

pub struct CommandOutput {
    pub artifact: String,
    pub plot: Vec<(f64, f64)>,
    pub plot_labels: (&'static str, &'static str),
    pub exit: u8,
}

impl CommandOutput {
    fn new(artifact: String) -> Self {
        Self {
            artifact,
            plot: Vec::new(),
            plot_labels: ("x", "y"),
            exit: 0,
        }
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this subcommand")))
}

fn require_seed(flag: Option<u64>, cfg: &FileConfig) -> Result<u64, CliError> {
    flag.or_else(|| cfg.u64("seed"))
        .ok_or_else(|| CliError::Usage("--seed is required for randomized runs".into()))
}

fn ratio_report_output(rep: &RatioReport, format: OutputFormat) -> CommandOutput {
    let artifact = match format {
        OutputFormat::Json => {
            let trend: Vec<String> = rep
                .trend
                .iter()
                .map(|&(size, r)| JsonObj::new().num("size", size).num("max_ratio", r).build())
                .collect();
            let mut s = JsonObj::new()
                .text("estimate_id", &rep.estimate_id)
                .uint("seed", rep.seed)
                .uint("samples", rep.samples as u64)
                .num("max_ratio", rep.max_ratio)
                .num("mean_ratio", rep.mean_ratio)
                .raw("trend", &json_array(&trend))
                .build();
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut csv = Csv::new("estimate_id,size_param,max_ratio");
            for &(size, r) in &rep.trend {
                csv.row(&[rep.estimate_id.clone(), fmt_f(size), fmt_f(r)]);
            }
            csv.build()
        }
    };
    CommandOutput {
        artifact,
        plot: rep.trend.clone(),
        plot_labels: ("size_param", "max_ratio"),
        exit: 0,
    }
}

fn picard_report_json(rep: &PicardReport) -> String {
    let slope = match rep.fitted_slope {
        Some(v) => fmt_f(v),
        None => "null".to_string(),
    };
    JsonObj::new()
        .int("m", rep.m)
        .num("s", rep.s)
        .num("t", rep.t)
        .int("peak_mode", rep.peak_mode)
        .num("peak_abs", rep.peak_abs)
        .num("cubic_abs", rep.cubic_abs)
        .num("closed_form_abs", rep.closed_form_abs)
        .num("rel_dev", rep.rel_dev)
        .raw("fitted_slope", &slope)
        .build()
}

fn picard_report_csv_row(rep: &PicardReport) -> Vec<String> {
    vec![
        rep.m.to_string(),
        fmt_f(rep.s),
        fmt_f(rep.t),
        rep.peak_mode.to_string(),
        fmt_f(rep.peak_abs),
        fmt_f(rep.cubic_abs),
        fmt_f(rep.closed_form_abs),
        fmt_f(rep.rel_dev),
    ]
}

pub fn dispatch(
    cmd: Command,
    cfg: &FileConfig,
    format: OutputFormat,
) -> Result<CommandOutput, CliError> {
    match cmd {
        Command::Resonance {
            bandlimit,
            n,
            j,
            method,
        } => {
            let bandlimit = require(bandlimit.or_else(|| cfg.i64("N")), "N")?;
            let n = require(n.or_else(|| cfg.i64("n")), "n")?;
            let j = require(j.or_else(|| cfg.i64("j")), "j")?;
            let method = method
                .or_else(|| {
                    cfg.text("method")
                        .and_then(|s| MethodArg::from_str(s, true).ok())
                })
                .unwrap_or(MethodArg::Both);
            let query = ResonanceQuery::new(bandlimit, n, j)?;

            let mut results = Vec::new();
            if matches!(method, MethodArg::Brute | MethodArg::Both) {
                results.push(count_bruteforce(&query)?);
            }
            if matches!(method, MethodArg::Divisor | MethodArg::Both) {
                results.push(count_divisor(&query)?);
            }
            let agree = results.windows(2).all(|w| w[0].solutions == w[1].solutions);

            let artifact = match format {
                OutputFormat::Json => {
                    let entries: Vec<String> = results
                        .iter()
                        .map(|r| {
                            JsonObj::new()
                                .text("method", r.method.name())
                                .uint("count", r.count() as u64)
                                .build()
                        })
                        .collect();
                    let mut s = JsonObj::new()
                        .int("N", bandlimit)
                        .int("n", n)
                        .int("j", j)
                        .raw("results", &json_array(&entries))
                        .flag("solutions_match", agree)
                        .build();
                    s.push('\n');
                    s
                }
                OutputFormat::Csv => {
                    let mut csv = Csv::new("N,n,j,method,count");
                    for r in &results {
                        csv.row(&[
                            bandlimit.to_string(),
                            n.to_string(),
                            j.to_string(),
                            r.method.name().to_string(),
                            r.count().to_string(),
                        ]);
                    }
                    csv.build()
                }
            };
            let mut out = CommandOutput::new(artifact);
            out.exit = if agree { 0 } else { 1 };
            Ok(out)
        }

        Command::StrichartzL6 {
            seed,
            eps,
            trials,
            sizes,
            alpha,
        } => {
            let seed = require_seed(seed, cfg)?;
            let eps = eps.or_else(|| cfg.f64("eps")).unwrap_or(0.1);
            let trials = trials.or_else(|| cfg.usize("trials")).unwrap_or(50);
            let sizes = sizes
                .or_else(|| cfg.i64_list("sizes"))
                .unwrap_or_else(|| vec![4, 8, 16]);
            let alpha = alpha.or_else(|| cfg.f64("alpha")).unwrap_or(0.0);
            let spec = RandomFieldSpec::new(1, alpha, 0, seed)?;
            let rep = strichartz_l6_report(&spec, eps, trials, &sizes)?;
            Ok(ratio_report_output(&rep, format))
        }

        Command::StrichartzLr {
            seed,
            r,
            eps,
            trials,
            sizes,
            alpha,
        } => {
            let seed = require_seed(seed, cfg)?;
            let r = r.or_else(|| cfg.u64("r").map(|v| v as u32)).unwrap_or(8);
            let eps = eps.or_else(|| cfg.f64("eps")).unwrap_or(0.1);
            let trials = trials.or_else(|| cfg.usize("trials")).unwrap_or(50);
            let sizes = sizes
                .or_else(|| cfg.i64_list("sizes"))
                .unwrap_or_else(|| vec![4, 8, 16]);
            let alpha = alpha.or_else(|| cfg.f64("alpha")).unwrap_or(0.0);
            let spec = RandomFieldSpec::new(1, alpha, 0, seed)?;
            let rep = lr_strichartz_report(&spec, r, eps, trials, &sizes)?;
            Ok(ratio_report_output(&rep, format))
        }

        Command::L4 {
            seed,
            trials,
            sizes,
            spreads,
            alpha,
            spread,
            bandlimit,
        } => {
            let seed = require_seed(seed, cfg)?;
            let trials = trials.or_else(|| cfg.usize("trials")).unwrap_or(50);
            let alpha = alpha.or_else(|| cfg.f64("alpha")).unwrap_or(0.0);
            let spread = spread.or_else(|| cfg.i64("spread")).unwrap_or(4);
            let spreads = spreads.or_else(|| cfg.i64_list("spreads"));
            let rep = if let Some(spreads) = spreads {
                let bandlimit = bandlimit.or_else(|| cfg.i64("bandlimit")).unwrap_or(4);
                let spec = RandomFieldSpec::new(bandlimit, alpha, 0, seed)?;
                l4_spread_report(&spec, trials, &spreads)?
            } else {
                let sizes = sizes
                    .or_else(|| cfg.i64_list("sizes"))
                    .unwrap_or_else(|| vec![4, 8, 16]);
                let spec = RandomFieldSpec::new(1, alpha, spread, seed)?;
                l4_ratio_report(&spec, trials, &sizes)?
            };
            Ok(ratio_report_output(&rep, format))
        }

        Command::Dyadic {
            seed,
            fields,
            j_max,
            k_max,
            bandlimit,
            per_level,
            max_ratio,
        } => {
            let seed = require_seed(seed, cfg)?;
            let fields = fields.or_else(|| cfg.usize("fields")).unwrap_or(20);
            let j_max = j_max
                .or_else(|| cfg.u64("j_max").map(|v| v as u32))
                .unwrap_or(5);
            let k_max = k_max
                .or_else(|| cfg.u64("k_max").map(|v| v as u32))
                .unwrap_or(5);
            let bandlimit = bandlimit.or_else(|| cfg.i64("bandlimit")).unwrap_or(8);
            let per_level = per_level.or_else(|| cfg.usize("per_level")).unwrap_or(4);
            let limit = max_ratio.or_else(|| cfg.f64("max_ratio")).unwrap_or(4.0);
            if limit <= 0.0 {
                return Err(CliError::Usage("--max-ratio must be positive".into()));
            }
            let sweep = dyadic_bilinear_sweep(fields, j_max, k_max, bandlimit, per_level, seed)?;
            let within = sweep.max_ratio <= limit;

            let artifact = match format {
                OutputFormat::Json => {
                    let per_gap: Vec<String> = sweep
                        .per_gap_max
                        .iter()
                        .map(|&(k, r)| {
                            JsonObj::new()
                                .uint("k", k as u64)
                                .num("max_ratio", r)
                                .build()
                        })
                        .collect();
                    let rows: Vec<String> = sweep
                        .rows
                        .iter()
                        .map(|r| {
                            JsonObj::new()
                                .uint("field", r.field_index as u64)
                                .uint("j", r.j as u64)
                                .uint("k", r.k as u64)
                                .num("lhs", r.lhs)
                                .num("bound", r.bound)
                                .num("ratio", r.ratio)
                                .build()
                        })
                        .collect();
                    let mut s = JsonObj::new()
                        .uint("seed", sweep.seed)
                        .num("max_ratio", sweep.max_ratio)
                        .num("limit", limit)
                        .flag("within_limit", within)
                        .raw("per_gap", &json_array(&per_gap))
                        .raw("rows", &json_array(&rows))
                        .build();
                    s.push('\n');
                    s
                }
                OutputFormat::Csv => {
                    let mut csv = Csv::new("field,j,k,lhs,bound,ratio");
                    for r in &sweep.rows {
                        csv.row(&[
                            r.field_index.to_string(),
                            r.j.to_string(),
                            r.k.to_string(),
                            fmt_f(r.lhs),
                            fmt_f(r.bound),
                            fmt_f(r.ratio),
                        ]);
                    }
                    csv.build()
                }
            };
            let plot = sweep
                .per_gap_max
                .iter()
                .map(|&(k, r)| (k as f64, r))
                .collect();
            Ok(CommandOutput {
                artifact,
                plot,
                plot_labels: ("gap", "max_ratio"),
                exit: if within { 0 } else { 1 },
            })
        }

        Command::Bilinear {
            seed,
            s,
            variant,
            trials,
            sizes,
            alpha,
            spread,
        } => {
            let seed = require_seed(seed, cfg)?;
            let s = s.or_else(|| cfg.f64("s")).unwrap_or(0.5);
            let variant = variant
                .or_else(|| {
                    cfg.text("variant")
                        .and_then(|v| VariantArg::from_str(v, true).ok())
                })
                .unwrap_or(VariantArg::Projected);
            let trials = trials.or_else(|| cfg.usize("trials")).unwrap_or(20);
            let sizes = sizes
                .or_else(|| cfg.i64_list("sizes"))
                .unwrap_or_else(|| vec![2, 4, 8]);
            let alpha = alpha.or_else(|| cfg.f64("alpha")).unwrap_or(0.0);
            let spread = spread.or_else(|| cfg.i64("spread")).unwrap_or(2);
            let variant = match variant {
                VariantArg::Projected => BilinearVariant::Projected,
                VariantArg::Unprojected => BilinearVariant::Unprojected,
                VariantArg::ProductX => BilinearVariant::ProductX,
                VariantArg::ProductZ => BilinearVariant::ProductZ,
            };
            let spec = RandomFieldSpec::new(1, alpha, spread, seed)?;
            let rep = bilinear_z_report(&spec, s, variant, trials, &sizes)?;
            Ok(ratio_report_output(&rep, format))
        }

        Command::Trilinear {
            seed,
            s,
            scales,
            trials,
            bandlimit,
            alpha,
            spread,
        } => {
            let seed = require_seed(seed, cfg)?;
            let s = s.or_else(|| cfg.f64("s")).unwrap_or(0.5);
            let scales = scales
                .or_else(|| cfg.f64_list("scales"))
                .unwrap_or_else(|| vec![0.5, 0.25, 0.125]);
            let trials = trials.or_else(|| cfg.usize("trials")).unwrap_or(6);
            let bandlimit = bandlimit.or_else(|| cfg.i64("bandlimit")).unwrap_or(4);
            let alpha = alpha.or_else(|| cfg.f64("alpha")).unwrap_or(0.5);
            let spread = spread.or_else(|| cfg.i64("spread")).unwrap_or(2);
            let spec = RandomFieldSpec::new(bandlimit, alpha, spread, seed)?;
            let rep = trilinear_report(&spec, s, &scales, trials)?;
            Ok(ratio_report_output(&rep, format))
        }

        Command::Picard {
            m,
            s,
            t,
            quadrature,
            tol,
        } => {
            let m = m.or_else(|| cfg.i64("m")).unwrap_or(8);
            let s = s.or_else(|| cfg.f64("s")).unwrap_or(-0.5);
            let t = t.or_else(|| cfg.f64("t")).unwrap_or(0.1 / m as f64);
            let nodes = quadrature
                .or_else(|| cfg.usize("quadrature"))
                .unwrap_or(2000);
            let tol = tol.or_else(|| cfg.f64("tol")).unwrap_or(1e-6);
            if tol <= 0.0 {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            let data = illposedness_data(m, s)?;
            let exact = third_picard_iterate(&data, t, PicardMethod::Exact)?;
            let quad = third_picard_iterate(&data, t, PicardMethod::Quadrature(nodes))?;
            let scale = exact.l2_sum().sqrt();
            let rel = exact
                .sum(&quad.scale(Complex64::new(-1.0, 0.0)))
                .l2_sum()
                .sqrt()
                / scale;
            let (peak_mode, peak_abs) = exact
                .modes()
                .map(|(n, c)| (n, c.norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((0, 0.0));
            let within = rel <= tol;

            let artifact = match format {
                OutputFormat::Json => {
                    let mut out = JsonObj::new()
                        .int("m", m)
                        .num("s", s)
                        .num("t", t)
                        .int("peak_mode", peak_mode)
                        .num("peak_abs", peak_abs)
                        .uint("quadrature_nodes", nodes as u64)
                        .num("quadrature_rel_diff", rel)
                        .num("tol", tol)
                        .flag("within_tol", within)
                        .build();
                    out.push('\n');
                    out
                }
                OutputFormat::Csv => {
                    let mut csv =
                        Csv::new("m,s,t,peak_mode,peak_abs,quadrature_nodes,quadrature_rel_diff");
                    csv.row(&[
                        m.to_string(),
                        fmt_f(s),
                        fmt_f(t),
                        peak_mode.to_string(),
                        fmt_f(peak_abs),
                        nodes.to_string(),
                        fmt_f(rel),
                    ]);
                    csv.build()
                }
            };
            let mut out = CommandOutput::new(artifact);
            out.exit = if within { 0 } else { 1 };
            Ok(out)
        }

        Command::Illposed {
            m,
            s,
            t_factor,
            sweep,
            tol,
        } => {
            let s = s.or_else(|| cfg.f64("s")).unwrap_or(-0.5);
            let t_factor = t_factor.or_else(|| cfg.f64("t_factor")).unwrap_or(0.1);
            let tol = tol.or_else(|| cfg.f64("tol")).unwrap_or(0.1);
            if tol <= 0.0 {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            let sweep = sweep.or_else(|| cfg.i64_list("sweep"));

            let (reports, slope) = match sweep {
                Some(heights) => {
                    let sw = illposedness_sweep(&heights, s, t_factor)?;
                    let slope = sw.fitted_slope;
                    (sw.reports, Some(slope))
                }
                None => {
                    let m = m.or_else(|| cfg.i64("m")).unwrap_or(16);
                    (vec![illposedness_experiment(m, s, t_factor)?], None)
                }
            };
            let within = reports.iter().all(|r| r.rel_dev <= tol);

            let artifact = match format {
                OutputFormat::Json => {
                    let mut out = if reports.len() == 1 && slope.is_none() {
                        picard_report_json(&reports[0])
                    } else {
                        let items: Vec<String> = reports.iter().map(picard_report_json).collect();
                        JsonObj::new()
                            .raw("reports", &json_array(&items))
                            .num("fitted_slope", slope.unwrap_or(f64::NAN))
                            .build()
                    };
                    out.push('\n');
                    out
                }
                OutputFormat::Csv => {
                    let mut csv =
                        Csv::new("m,s,t,peak_mode,peak_abs,cubic_abs,closed_form_abs,rel_dev");
                    for r in &reports {
                        csv.row(&picard_report_csv_row(r));
                    }
                    csv.build()
                }
            };
            let plot = reports
                .iter()
                .map(|r| {
                    (
                        (r.m as f64).ln(),
                        ((r.m as f64).powf(r.s) * r.peak_abs).ln(),
                    )
                })
                .collect();
            Ok(CommandOutput {
                artifact,
                plot,
                plot_labels: ("log_height", "log_scaled_peak"),
                exit: if within { 0 } else { 1 },
            })
        }

        Command::Viscous {
            mu,
            dt,
            steps,
            cutoff,
            linear,
            seed,
            bandlimit,
            alpha,
        } => {
            let mu = mu.or_else(|| cfg.f64("mu")).unwrap_or(0.5);
            let dt = dt.or_else(|| cfg.f64("dt")).unwrap_or(0.025);
            let steps = steps.or_else(|| cfg.usize("steps")).unwrap_or(8);
            let cutoff = cutoff.or_else(|| cfg.i64("cutoff"));
            let linear = linear || cfg.flag("linear").unwrap_or(false);
            let seed = seed.or_else(|| cfg.u64("seed"));

            let data = match seed {
                Some(seed) => {
                    let bandlimit = bandlimit.or_else(|| cfg.i64("bandlimit")).unwrap_or(2);
                    let alpha = alpha.or_else(|| cfg.f64("alpha")).unwrap_or(0.0);
                    spatial_field(&RandomFieldSpec::new(bandlimit, alpha, 0, seed)?)
                }
                None => SpectralField::from_modes(&[
                    (-1, Complex64::new(0.1, 0.05)),
                    (0, Complex64::new(0.2, -0.1)),
                    (1, Complex64::new(-0.15, 0.1)),
                ]),
            };
            let mut params = ViscousParams::new(mu, dt, steps)?;
            if let Some(limit) = cutoff {
                params = params.with_cutoff(limit);
            }
            if linear {
                params = params.linear_only();
            }
            let traj = viscous_solve(&data, &params)?;

            let artifact = match format {
                OutputFormat::Json => {
                    let rows: Vec<String> = traj
                        .rows
                        .iter()
                        .map(|r| {
                            JsonObj::new()
                                .uint("step", r.step as u64)
                                .num("time", r.time)
                                .num("h2_norm", r.h2_norm)
                                .num("i_value", r.i_value)
                                .build()
                        })
                        .collect();
                    let cutoff_json = match cutoff {
                        Some(v) => v.to_string(),
                        None => "null".to_string(),
                    };
                    let final_h2 = traj.rows.last().map(|r| r.h2_norm).unwrap_or(0.0);
                    let mut out = JsonObj::new()
                        .num("mu", mu)
                        .num("dt", dt)
                        .uint("steps", steps as u64)
                        .raw("cutoff", &cutoff_json)
                        .flag("nonlinear", !linear)
                        .raw("rows", &json_array(&rows))
                        .num("final_h2", final_h2)
                        .build();
                    out.push('\n');
                    out
                }
                OutputFormat::Csv => {
                    let mut csv = Csv::new("step,time,h2_norm,i_value");
                    for r in &traj.rows {
                        csv.row(&[
                            r.step.to_string(),
                            fmt_f(r.time),
                            fmt_f(r.h2_norm),
                            fmt_f(r.i_value),
                        ]);
                    }
                    csv.build()
                }
            };
            let plot = traj.rows.iter().map(|r| (r.time, r.h2_norm)).collect();
            Ok(CommandOutput {
                artifact,
                plot,
                plot_labels: ("time", "h2_norm"),
                exit: 0,
            })
        }

        Command::Energy { n, f } => {
            let n = require(n.or_else(|| cfg.i64("n")), "n")?;
            let f = require(f.or_else(|| cfg.i64("f")), "f")?;
            let pairing = energy_functional_i(&vn_family(n, f)?)?;
            let series = vn_energy_closed_form(n, f);
            let artifact = match format {
                OutputFormat::Json => {
                    let mut out = JsonObj::new()
                        .int("n", n)
                        .int("f", f)
                        .num("value", pairing.value)
                        .num("imaginary_residue", pairing.imaginary_residue)
                        .num("series_value", series)
                        .num("ratio_to_f", pairing.value / f as f64)
                        .build();
                    out.push('\n');
                    out
                }
                OutputFormat::Csv => {
                    let mut csv = Csv::new("n,f,value,imaginary_residue,series_value,ratio_to_f");
                    csv.row(&[
                        n.to_string(),
                        f.to_string(),
                        fmt_f(pairing.value),
                        fmt_f(pairing.imaginary_residue),
                        fmt_f(series),
                        fmt_f(pairing.value / f as f64),
                    ]);
                    csv.build()
                }
            };
            Ok(CommandOutput::new(artifact))
        }
    }
}
