//! Subcommand bodies. Each returns the process exit status.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use nls_scatter::{run_sweep_with, scatter_energy, unitarity_defect, Execution, SweepTableF64};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::fixtures::{figure_config, figure_json, FIGURES};
use crate::plot::plot_script;
use crate::table::{fmt_sig, write_csv};
use crate::verify::{run_verify, VerifyOptions};

fn report_error(err: &CliError) -> u8 {
    eprintln!("error: {err}");
    err.exit_code()
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn run_table(cfg: &RunConfig, exec: Execution) -> Result<SweepTableF64, CliError> {
    Ok(run_sweep_with(&cfg.sweep_spec(), exec)?)
}

pub fn print_summary(table: &SweepTableF64, out: &mut impl Write) -> io::Result<()> {
    let s = &table.summary;
    writeln!(
        out,
        "points: {} (failed {}, unconverged {})",
        table.rows.len(),
        s.failed_points,
        s.unconverged_points
    )?;
    let mut line = |label: &str, v: f64| writeln!(out, "  {label:<26} {}", fmt_sig(v));
    line("max |R_left - R_right|", s.max_reflectivity_gap)?;
    line("max |T_left - T_right|", s.max_transmissivity_gap)?;
    line("max |R_left + T_left - 1|", s.max_defect_left)?;
    line("max |R_right + T_right - 1|", s.max_defect_right)?;
    if let Some(g) = s.max_wronskian_gap {
        line("max |W1 - W2|", g)?;
    }
    line("max |W - 1|", s.max_wronskian_drift)?;
    if let Some(shift) = table
        .rows
        .iter()
        .filter_map(|r| r.refinement_shift)
        .reduce(f64::max)
    {
        line("max refinement shift", shift)?;
    }
    if let Some(report) = &table.report {
        write!(out, "{report}")?;
    }
    Ok(())
}

fn write_table(table: &SweepTableF64, path: &Path) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    write_file(path, &buf)
}

pub fn cmd_sweep(config: &Path, out: Option<&Path>, exec: Execution) -> u8 {
    let run = || -> Result<(), CliError> {
        let cfg = RunConfig::load(config)?;
        let out: PathBuf = out
            .map(Path::to_path_buf)
            .or_else(|| cfg.output.clone())
            .ok_or_else(|| CliError::Validation {
                key: "output".into(),
                message: "no output path: pass --out or set `output` in the config".into(),
            })?;
        let table = run_table(&cfg, exec)?;
        write_table(&table, &out)?;
        print_summary(&table, &mut io::stdout().lock()).ok();
        println!("wrote {}", out.display());
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err(e) => report_error(&e),
    }
}

pub fn cmd_figure(n: u8, out_dir: Option<&Path>, show_config: bool, exec: Execution) -> u8 {
    let (Some(cfg), Some(json)) = (figure_config(n), figure_json(n)) else {
        eprintln!(
            "error: invalid figure number {n}; expected {}..={}",
            FIGURES.start(),
            FIGURES.end()
        );
        return 2;
    };
    if show_config {
        print!("{json}");
    }
    let Some(dir) = out_dir else {
        if show_config {
            return 0;
        }
        eprintln!("error: --out-dir is required unless --show-config is given");
        return 2;
    };
    let run = || -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        let table = run_table(&cfg, exec)?;
        let csv_name = format!("figure{n}.csv");
        write_table(&table, &dir.join(&csv_name))?;
        let script = dir.join(format!("figure{n}_plot.py"));
        write_file(
            &script,
            plot_script(&csv_name, &format!("figure {n}")).as_bytes(),
        )?;
        println!("figure {n}");
        print_summary(&table, &mut io::stdout().lock()).ok();
        println!(
            "wrote {} and {}",
            dir.join(&csv_name).display(),
            script.display()
        );
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err(e) => report_error(&e),
    }
}

pub fn cmd_point(config: &Path, energy: f64) -> u8 {
    let run = || -> Result<(), CliError> {
        let cfg = RunConfig::load(config)?;
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(CliError::Validation {
                key: "energy".into(),
                message: format!("must be > 0, got {energy}"),
            });
        }
        let sc = cfg.scatter_config();
        let r = scatter_energy(&sc, energy)?;
        let defect = unitarity_defect(&r.endpoint, r.k)?;
        let c = |z: num_complex::Complex<f64>| format!("{} {}", fmt_sig(z.re), fmt_sig(z.im));
        let rows: Vec<(&str, String)> = vec![
            ("E", fmt_sig(energy)),
            ("k", fmt_sig(r.k)),
            ("r_left", c(r.r_left)),
            ("r_right", c(r.r_right)),
            ("t_left", c(r.t_left)),
            ("t_right", c(r.t_right)),
            ("R_left", fmt_sig(r.reflectivity_left)),
            ("R_right", fmt_sig(r.reflectivity_right)),
            ("T_left", fmt_sig(r.transmissivity_left)),
            ("T_right", fmt_sig(r.transmissivity_right)),
            ("sum_left", fmt_sig(r.sum_left)),
            ("sum_right", fmt_sig(r.sum_right)),
            ("W1", fmt_sig(r.endpoint.w1())),
            ("W2", r.endpoint.w2().map(fmt_sig).unwrap_or_default()),
            ("unitarity_defect", fmt_sig(defect)),
        ];
        for (k, v) in rows {
            println!("{k:<17} {v}");
        }
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err(e) => report_error(&e),
    }
}

pub fn cmd_verify(linear: bool) -> u8 {
    let opts = match VerifyOptions::from_env(linear) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    if let Some(t) = opts.tolerance {
        println!("integrator tolerance overridden: {}", fmt_sig(t));
    }
    if opts.linear {
        println!("nonlinearity disabled (gamma = 0)");
    }
    let results = run_verify(&opts);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!("{} checks, {} failed", results.len(), failed);
    u8::from(failed > 0)
}
