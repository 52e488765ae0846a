//! `difforge` command-line front end.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use difforge::autocorr::{eberlein_study, EberleinConfig};
use difforge::classify::{
    default_catalog, measure_verdict, solution_class_survey, ClassifyConfig, SurveyOptions,
};
use difforge::fit::polyfit;
use difforge::lfamily::{build, Named};
use difforge::phase::{construct, verify_realization, PhaseForm};
use difforge::{Execution, TemperedObject};
use serde_json::json;

use input::{
    load_catalog, load_json, load_object, load_spectrum, parse_list, parse_window, probes,
};
use output::{Format, Meta, Table};

#[derive(Parser)]
#[command(
    name = "difforge",
    version,
    about = "Diffraction solution classes of pure point diffraction measures on the line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Omit the generation time so identical jobs give identical bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

/// Object parameters shared by every command that builds a named object.
#[derive(Args, Clone, Debug)]
struct Build {
    /// ε for builtin objects of the ε-family.
    #[arg(long)]
    eps: Option<f64>,
    /// Cap every tower at this many layers.
    #[arg(long)]
    truncation: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the object with diffraction `--spectrum` and phase `--phase`.
    Construct {
        #[arg(long)]
        spectrum: String,
        #[arg(long)]
        phase: PathBuf,
        #[command(flatten)]
        build: Build,
    },
    /// Check an object's diffraction against a spectrum; exits 4 on FAIL.
    Verify {
        #[arg(long)]
        object: String,
        #[arg(long)]
        spectrum: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        build: Build,
    },
    /// Pairings of γ̂_ε, ω^ε and σ_ε across ε with their limits.
    Sweep {
        #[arg(long, default_value = "1,0.3,0.1,0.03")]
        eps: String,
        #[arg(long)]
        truncation: Option<u32>,
    },
    /// Construct, verify and classify every phase form of a catalog.
    Survey {
        #[arg(long)]
        spectrum: String,
        /// JSON array of {"id", "phase"}; a default catalog otherwise.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random aperiodic phases in the default catalog.
        #[arg(long, default_value_t = 5)]
        random: usize,
        /// Half-width of the random sign window.
        #[arg(long, default_value_t = 64)]
        window: u32,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        build: Build,
    },
    /// List the atoms of an object's direct part on a window.
    Enumerate {
        #[arg(long)]
        object: String,
        /// `lo,hi` or a radius `R` for `[-R, R]`.
        #[arg(long)]
        window: String,
        #[command(flatten)]
        build: Build,
    },
    /// Measure / non-measure verdict with its certificate.
    Classify {
        #[arg(long)]
        object: String,
        #[command(flatten)]
        build: Build,
    },
    /// Windowed autocorrelation estimates against the closed form.
    Autocorr {
        #[arg(long)]
        object: String,
        #[arg(long, default_value = "50,100,200")]
        radius: String,
        #[command(flatten)]
        build: Build,
    },
}

/// Failures that map to fixed exit codes.
#[derive(Debug, thiserror::Error)]
#[error("diffraction verification failed")]
struct VerificationFailed;

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerificationFailed>().is_some() {
        return 4;
    }
    if e.downcast_ref::<std::io::Error>().is_some()
        || e.downcast_ref::<serde_json::Error>().is_some()
    {
        return 2;
    }
    match e.downcast_ref::<difforge::Error>() {
        Some(difforge::Error::Spectrum(_)) => 3,
        Some(
            difforge::Error::InvalidPhase(_)
            | difforge::Error::InvalidParameter(_)
            | difforge::Error::Parse(_)
            | difforge::Error::Json(_)
            | difforge::Error::WindowReversed { .. }
            | difforge::Error::WindowTooSmall { .. },
        ) => 2,
        Some(_) => 1,
        None if e.to_string().starts_with("invalid input") => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Construct {
            spectrum,
            phase,
            build,
        } => {
            let out = common
                .out
                .as_ref()
                .context("invalid input: construct needs --out for the realization JSON")?;
            let spec = load_spectrum(spectrum, build.eps, build.truncation)?;
            let a: PhaseForm = load_json(phase)?;
            let obj = construct(&spec, &a)?;
            let mut meta = Meta::new("construct", common.no_timestamp);
            meta.param("spectrum", spectrum)
                .param("phase", phase.display())
                .param("pairing_tol", "1e-12");
            meta.param("certification_window", &spec.window);
            meta.params_from(build);
            let doc = json!({
                "metadata": meta,
                "phase": a,
                "amplitude": obj.amplitude,
                "amplitude_check": obj.amplitude_check,
                "realization": obj.realization,
            });
            output::write(Some(out), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            let mut table = Table::new(&["probe", "re", "im", "error_bound"]);
            for (i, f) in probes()?.iter().enumerate() {
                let p = obj.realization.pair(f, 1e-12)?;
                table.row([
                    i.to_string(),
                    p.value.re.to_string(),
                    p.value.im.to_string(),
                    p.error_bound.to_string(),
                ]);
            }
            output::write(
                Some(&output::sibling(out, "pairings.csv")),
                &table.csv(&meta)?,
            )?;
        }
        Command::Verify {
            object,
            spectrum,
            tol,
            build,
        } => {
            let obj = load_object(object, build.eps, build.truncation)?;
            let spec = load_spectrum(spectrum, build.eps, build.truncation)?;
            let report = verify_realization(&obj, &spec, &probes()?, *tol, Execution::Parallel)?;
            let mut meta = Meta::new("verify", common.no_timestamp);
            meta.param("object", object)
                .param("spectrum", spectrum)
                .param("tol", format!("{tol:e}"));
            meta.param("certification_window", &spec.window);
            meta.params_from(build);
            let verdict = if report.pass { "PASS" } else { "FAIL" };
            let body = match common.format {
                Format::Json => {
                    serde_json::to_string_pretty(
                        &json!({ "metadata": meta, "verdict": verdict, "report": report }),
                    )? + "\n"
                }
                Format::Csv => {
                    let mut t = Table::new(&[
                        "verdict",
                        "residual",
                        "realization_residual",
                        "spectral_residual",
                        "tol",
                        "pairs",
                        "period",
                        "samples",
                    ]);
                    t.row([
                        verdict.to_string(),
                        report.residual().to_string(),
                        report
                            .realization_residual
                            .map(|r| r.to_string())
                            .unwrap_or_default(),
                        report.spectral_residual.to_string(),
                        tol.to_string(),
                        report.pairs.to_string(),
                        report.period.map(|p| p.to_string()).unwrap_or_default(),
                        report.samples.map(|m| m.to_string()).unwrap_or_default(),
                    ]);
                    t.csv(&meta)?
                }
            };
            output::write(common.out.as_ref(), &body)?;
            eprintln!(
                "{verdict}: max residual {:.3e} (tol {tol:e})",
                report.residual()
            );
            if !report.pass {
                return Err(VerificationFailed.into());
            }
        }
        Command::Sweep { eps, truncation } => {
            let eps: Vec<f64> = parse_list(eps)?;
            let mut meta = Meta::new("sweep", common.no_timestamp);
            meta.param("eps", format!("{eps:?}"))
                .param("pairing_tol", "1e-12");
            meta.param(
                "truncation",
                truncation
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| "none".into()),
            );
            output::write(common.out.as_ref(), &sweep(&eps, *truncation, &meta)?)?;
        }
        Command::Survey {
            spectrum,
            catalog,
            seed,
            random,
            window,
            tol,
            build,
        } => {
            let spec = load_spectrum(spectrum, build.eps, build.truncation)?;
            let catalog = match catalog {
                Some(p) => load_catalog(p)?,
                None => default_catalog(&spec, *seed, *random, *window)?,
            };
            let opts = SurveyOptions {
                probes: probes()?,
                tol: *tol,
                exec: Execution::Parallel,
                classify: ClassifyConfig::default(),
            };
            let rows = solution_class_survey(&spec, &catalog, &opts)?;
            let mut meta = Meta::new("survey", common.no_timestamp);
            meta.param("spectrum", spectrum)
                .param("tol", format!("{tol:e}"))
                .param("seed", seed)
                .param("random_window", window);
            meta.param("certification_window", &spec.window);
            meta.params_from(build);
            let body = match common.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({ "metadata": meta, "rows": rows }))? + "\n"
                }
                Format::Csv => {
                    let mut t = Table::new(&[
                        "phase_id",
                        "diffraction_residual",
                        "verdict",
                        "certificate",
                        "notes",
                    ]);
                    for r in &rows {
                        let mut notes =
                            format!("diffraction {}", if r.pass { "PASS" } else { "FAIL" });
                        if !r.notes.is_empty() {
                            notes = format!("{notes}; {}", r.notes);
                        }
                        t.row([
                            r.phase_id.clone(),
                            r.diffraction_residual.to_string(),
                            r.verdict.as_str().to_string(),
                            serde_json::to_string(&r.certificate)?,
                            notes,
                        ]);
                    }
                    t.csv(&meta)?
                }
            };
            output::write(common.out.as_ref(), &body)?;
        }
        Command::Enumerate {
            object,
            window,
            build,
        } => {
            let obj = load_object(object, build.eps, build.truncation)?;
            let w = parse_window(window)?;
            let atoms = obj.direct.enumerate(&w)?;
            let mut meta = Meta::new("enumerate", common.no_timestamp);
            meta.param("object", object).param("window", &w);
            meta.params_from(build);
            if obj.has_dual() || !obj.ac.is_zero() {
                meta.param("scope", "direct part only");
            }
            let body = match common.format {
                Format::Json => {
                    let rows: Vec<_> = atoms
                        .iter()
                        .map(|(x, v)| json!({ "pos": difforge::rational::format(x), "w": [v.re, v.im] }))
                        .collect();
                    serde_json::to_string_pretty(&json!({ "metadata": meta, "atoms": rows }))?
                        + "\n"
                }
                Format::Csv => {
                    let mut t = Table::new(&["position", "weight_re", "weight_im"]);
                    for (x, v) in &atoms {
                        t.row([
                            difforge::rational::format(x),
                            v.re.to_string(),
                            v.im.to_string(),
                        ]);
                    }
                    t.csv(&meta)?
                }
            };
            output::write(common.out.as_ref(), &body)?;
        }
        Command::Classify { object, build } => {
            let obj = load_object(object, build.eps, build.truncation)?;
            let cfg = ClassifyConfig::default();
            let v = measure_verdict(&obj, &cfg)?;
            let mut meta = Meta::new("classify", common.no_timestamp);
            meta.param("object", object)
                .param("max_period", cfg.max_period)
                .param("window", cfg.window);
            meta.param("tv_window", &cfg.tv_window)
                .param("slope_threshold", cfg.threshold());
            meta.params_from(build);
            let body = match common.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({ "metadata": meta, "verdict": v }))? + "\n"
                }
                Format::Csv => {
                    let mut t = Table::new(&["verdict", "certificate", "tv_bound", "notes"]);
                    t.row([
                        v.label.as_str().to_string(),
                        serde_json::to_string(&v.certificate)?,
                        v.tv_bound.map(|b| b.to_string()).unwrap_or_default(),
                        v.notes.join("; "),
                    ]);
                    t.csv(&meta)?
                }
            };
            output::write(common.out.as_ref(), &body)?;
        }
        Command::Autocorr {
            object,
            radius,
            build,
        } => {
            let obj = load_object(object, build.eps, build.truncation)?;
            if obj.has_dual() || !obj.ac.is_zero() {
                bail!("invalid input: autocorrelation needs a point weighting without dual or continuous parts");
            }
            let radii: Vec<f64> = parse_list(radius)?;
            let study = eberlein_study(
                &obj.direct,
                &obj.direct,
                &radii,
                &probes()?,
                1e-12,
                &EberleinConfig::default(),
            )?;
            let mut meta = Meta::new("autocorr", common.no_timestamp);
            meta.param("object", object)
                .param("radii", format!("{radii:?}"))
                .param("pairing_tol", "1e-12");
            meta.param(
                "fitted_C",
                study
                    .fitted_constant()
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "n/a".into()),
            );
            meta.params_from(build);
            let body = match common.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({ "metadata": meta, "rows": study.rows }))?
                        + "\n"
                }
                Format::Csv => {
                    let mut t = Table::new(&[
                        "radius",
                        "probe",
                        "estimate_re",
                        "estimate_im",
                        "symbolic_re",
                        "symbolic_im",
                        "residual",
                    ]);
                    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                    for r in &study.rows {
                        t.row([
                            r.radius.to_string(),
                            r.probe.to_string(),
                            r.estimate_re.to_string(),
                            r.estimate_im.to_string(),
                            opt(r.symbolic_re),
                            opt(r.symbolic_im),
                            opt(r.residual),
                        ]);
                    }
                    t.csv(&meta)?
                }
            };
            output::write(common.out.as_ref(), &body)?;
        }
    }
    Ok(())
}

/// One row per (ε, probe) plus a limit row per probe fitted across ε.
fn sweep(eps: &[f64], truncation: Option<u32>, meta: &Meta) -> Result<String> {
    if let Some(e) = eps.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
        bail!("invalid input: eps must be non-negative, got {e}");
    }
    let tol = 1e-12;
    let probes = probes()?;
    let delta_z = TemperedObject::direct(difforge::PointWeighting::lattice(1.into(), 0.into()));
    let omega0 = build(Named::Omega0, None, None)?.object;
    let mut t = Table::new(&[
        "kind",
        "eps",
        "probe",
        "gamma_hat_re",
        "gamma_hat_im",
        "omega_re",
        "omega_im",
        "sigma_re",
        "sigma_im",
        "d_gamma_hat",
        "d_omega",
        "d_sigma",
        "note",
    ]);
    // distances per probe and object, in ε order
    let mut dist: Vec<[Vec<(f64, f64)>; 3]> = vec![Default::default(); probes.len()];
    for &e in eps {
        let gamma = build(Named::GammaHat, Some(e), truncation)?.object;
        let (omega, sigma, note) = if e > 0.0 {
            (
                Some(build(Named::Omega, Some(e), truncation)?.object),
                Some(build(Named::Sigma, Some(e), truncation)?.object),
                String::new(),
            )
        } else {
            (
                Some(omega0.clone()),
                None,
                "eps=0: omega column is the dual-side limit omega_0; sigma needs eps > 0"
                    .to_string(),
            )
        };
        for (i, f) in probes.iter().enumerate() {
            let zf = delta_z.pair(f, tol)?.value;
            let g = gamma.pair(f, tol)?.value;
            let o = omega
                .as_ref()
                .map(|o| o.pair(f, tol))
                .transpose()?
                .map(|p| p.value);
            let s = sigma
                .as_ref()
                .map(|s| s.pair(f, tol))
                .transpose()?
                .map(|p| p.value);
            let o0 = omega0.pair(f, tol)?.value;
            let ds = [
                Some((g - zf).norm()),
                o.map(|v| (v - o0).norm()),
                s.map(|v| (v - zf).norm()),
            ];
            for (k, d) in ds.iter().enumerate() {
                if let Some(d) = d {
                    dist[i][k].push((e, *d));
                }
            }
            let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            t.row([
                "member".into(),
                e.to_string(),
                i.to_string(),
                g.re.to_string(),
                g.im.to_string(),
                num(o.map(|v| v.re)),
                num(o.map(|v| v.im)),
                num(s.map(|v| v.re)),
                num(s.map(|v| v.im)),
                num(ds[0]),
                num(ds[1]),
                num(ds[2]),
                note.clone(),
            ]);
        }
    }
    let names = ["gamma_hat", "omega", "sigma"];
    // a trend needs at least three members
    let trend_rows = if eps.len() >= 3 { dist.len() } else { 0 };
    for (i, per) in dist.iter().enumerate().take(trend_rows) {
        let mut limits = [String::new(), String::new(), String::new()];
        let mut notes = Vec::new();
        for k in 0..3 {
            let mut pts = per[k].clone();
            pts.sort_by(|a, b| b.0.total_cmp(&a.0));
            let degree = match pts.len() {
                n if n >= 4 => 2,
                3 => 1,
                _ => {
                    notes.push(format!("{}: too few eps values", names[k]));
                    continue;
                }
            };
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let fit = polyfit(&xs, &ys, degree)?;
            let (lim, se) = (fit.intercept(), fit.std_errors[0]);
            let monotone = ys.windows(2).all(|w| w[1] <= w[0]);
            let to_zero = lim.abs() <= 3.0 * se + 1e-9;
            limits[k] = lim.to_string();
            let verdict = match (monotone, to_zero) {
                _ if ys.iter().all(|y| *y < 1e-9) => "below the 1e-9 noise floor",
                (true, true) => "monotone, limit 0 within fit error",
                (false, true) => "limit 0 within fit error, not monotone",
                (_, false) => "limit away from 0",
            };
            notes.push(format!("{}: {verdict} (se {se:.2e})", names[k]));
        }
        let [a, b, c] = limits;
        t.row([
            "limit".into(),
            "0".into(),
            i.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            a,
            b,
            c,
            notes.join("; "),
        ]);
    }
    t.csv(meta)
}
