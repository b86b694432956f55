//! Command-line driver for the rectenna toolkit.
//!
//! Subcommands cover combiner design, microstrip synthesis, rectifier
//! simulation, input-impedance probing, matching, the chain sweeps and a
//! single chain run. Outputs are deterministic CSV files (6 significant
//! digits); SVG plots are opt-in via `--plot`.

// Validation uses `!(x > 0.0)` instead of `x <= 0.0` so NaN fails too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use rectenna_core::chain::{
    self, run_chain, sweep_input_power, sweep_load, ChainError, SweepResult,
};
use rectenna_core::circuit::{
    extract_steady_state_with_tol, netlist_to_text, run_transient_with, CircuitError,
};
use rectenna_core::combiner::{
    design_wilkinson, microstrip_synthesis, sparams, write_touchstone, CombinerError,
    WilkinsonDesign,
};
use rectenna_core::matching::MatchReport;
use rectenna_core::rectifier::{
    build_doubler_ladder, estimate_input_impedance_with, RectifierError,
};
use rectenna_core::si::{format_sig, parse_si};

use config::{ConfigError, RunConfig};
use plot::{line_plot, PlotSpec};

/// Simulation and design toolkit for RF energy-harvesting chains.
#[derive(Parser)]
#[command(name = "rectenna", version, about)]
struct Cli {
    /// Config file (sectioned key = value text; SI suffixes allowed).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for generated files (overrides `[output] directory`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also emit SVG plots next to the CSV outputs.
    #[arg(long, global = true)]
    plot: bool,
    /// Document determinism: the toolkit uses no randomness. Accepted and
    /// ignored.
    #[arg(long, global = true)]
    seedless: bool,
    /// Output format; only `csv` exists.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

fn si_arg(s: &str) -> Result<f64, String> {
    parse_si(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct CombinerArgs {
    /// Number of split ports N.
    #[arg(long)]
    ways: Option<usize>,
    /// Common-port impedance R_S, ohms.
    #[arg(long, value_parser = si_arg)]
    source_ohms: Option<f64>,
    /// Split-port impedance R_L, ohms.
    #[arg(long, value_parser = si_arg)]
    load_ohms: Option<f64>,
    /// Center frequency, Hz.
    #[arg(long, value_parser = si_arg)]
    f0: Option<f64>,
}

#[derive(Args)]
struct MicrostripArgs {
    /// Target characteristic impedance, ohms.
    #[arg(long, value_parser = si_arg)]
    z0: Option<f64>,
    /// Substrate relative permittivity.
    #[arg(long, value_parser = si_arg)]
    eps_r: Option<f64>,
    /// Substrate height, meters.
    #[arg(long, value_parser = si_arg)]
    height: Option<f64>,
    /// Design frequency, Hz.
    #[arg(long, value_parser = si_arg)]
    f0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Design a Wilkinson combiner and export its ideal S-parameters.
    DesignCombiner(CombinerArgs),
    /// Synthesize a microstrip quarter-wave section.
    Microstrip(MicrostripArgs),
    /// Transient-simulate the voltage-doubler ladder and export waveforms.
    SimulateRectifier,
    /// Probe the rectifier's fundamental-frequency input impedance.
    Zin,
    /// Choose the matching resistor for the converter input impedance.
    Match,
    /// Sweep incident RF power through the full chain.
    SweepPower,
    /// Sweep the rectifier load through the full chain.
    SweepLoad,
    /// Run the full chain once and print the power ledger.
    Chain,
}

enum CliError {
    /// Bad configuration or arguments -> exit 2.
    Config(String),
    /// Solver / numeric failure -> exit 3.
    Solver(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<CombinerError> for CliError {
    fn from(e: CombinerError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::NonConvergence { .. } | CircuitError::Singular { .. } => {
                Self::Solver(e.to_string())
            }
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<RectifierError> for CliError {
    fn from(e: RectifierError) -> Self {
        match e {
            RectifierError::InvalidConfig(_) => Self::Config(e.to_string()),
            RectifierError::Circuit(inner) => inner.into(),
            RectifierError::ProbeNotSettled { .. } | RectifierError::NoInputCurrent => {
                Self::Solver(e.to_string())
            }
        }
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        match e {
            ChainError::Stage { .. } => Self::Solver(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when a pipe reader (head, less) hangs up instead of
    // panicking on the failed print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::Builder::from_env(env_logger::Env::new().filter("RECTENNA_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Solver(message)) => {
            eprintln!("solver error: {message}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.format != "csv" {
        return Err(CliError::Config(format!(
            "unsupported --format '{}': only csv is available",
            cli.format
        )));
    }
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    log::debug!("resolved configuration:\n{}", config.serialize());
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| config.output_directory.clone());
    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Config(format!(
            "cannot create output directory '{}': {e}",
            out_dir.display()
        ))
    })?;
    log::info!("outputs -> {}", out_dir.display());

    match &cli.command {
        Command::DesignCombiner(args) => design_combiner(&config, args, &out_dir),
        Command::Microstrip(args) => microstrip(&config, args, &out_dir),
        Command::SimulateRectifier => simulate_rectifier(&config, &out_dir),
        Command::Zin => zin(&config, &out_dir),
        Command::Match => match_command(&config, &out_dir),
        Command::SweepPower => sweep_power_command(cli, &config, &out_dir),
        Command::SweepLoad => sweep_load_command(cli, &config, &out_dir),
        Command::Chain => chain_command(&config, &out_dir),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Config(format!("cannot write '{}': {e}", path.display())))?;
    Ok(path)
}

fn design_table(design: &WilkinsonDesign) -> String {
    let mut out = String::from("parameter,value\n");
    out.push_str(&format!("n_ways,{}\n", design.n_ways));
    out.push_str(&format!(
        "source_impedance_ohm,{}\n",
        format_sig(design.source_impedance, 6)
    ));
    out.push_str(&format!(
        "load_impedance_ohm,{}\n",
        format_sig(design.load_impedance, 6)
    ));
    out.push_str(&format!(
        "quarter_wave_impedance_ohm,{}\n",
        format_sig(design.quarter_wave_impedance, 6)
    ));
    out.push_str(&format!(
        "isolation_resistor_ohm,{}\n",
        format_sig(design.isolation_resistor, 6)
    ));
    out.push_str(&format!(
        "center_frequency_hz,{}\n",
        format_sig(design.center_frequency, 6)
    ));
    out
}

fn design_combiner(
    config: &RunConfig,
    args: &CombinerArgs,
    out_dir: &Path,
) -> Result<(), CliError> {
    let ways = args.ways.unwrap_or(2);
    let design = design_wilkinson(
        ways,
        args.source_ohms.unwrap_or(config.combiner_source_ohms),
        args.load_ohms.unwrap_or(config.combiner_load_ohms),
        args.f0.unwrap_or(config.frequency),
    )?;
    let table = design_table(&design);
    print!("{table}");
    write_file(out_dir, "design_combiner.csv", &table)?;

    if design.n_ways == 2 {
        let f0 = design.center_frequency;
        let matrices: Vec<_> = (1..=81)
            .map(|k| sparams(&design, f0 * 0.025 * k as f64))
            .collect::<Result<_, _>>()?;
        let touchstone = write_touchstone(
            &matrices,
            design.source_impedance,
            &["two-way wilkinson combiner, ideal lines", "port 1 = common"],
        );
        let path = write_file(out_dir, "wilkinson_sparams.s3p", &touchstone)?;
        println!("s-parameters written to {}", path.display());
    } else {
        log::info!("s-parameter export skipped: evaluation supports 2-way only");
    }
    Ok(())
}

fn microstrip(config: &RunConfig, args: &MicrostripArgs, out_dir: &Path) -> Result<(), CliError> {
    let f0 = args
        .f0
        .or(config.microstrip_f0)
        .unwrap_or(config.frequency);
    let line = microstrip_synthesis(
        args.z0.unwrap_or(config.microstrip_z0),
        args.eps_r.unwrap_or(config.microstrip_eps_r),
        args.height.unwrap_or(config.microstrip_height),
        f0,
    )?;
    let mut table = String::from("parameter,value\n");
    table.push_str(&format!("width_m,{}\n", format_sig(line.width, 6)));
    table.push_str(&format!(
        "effective_eps,{}\n",
        format_sig(line.effective_eps, 6)
    ));
    table.push_str(&format!(
        "quarter_wave_length_m,{}\n",
        format_sig(line.quarter_wave_length, 6)
    ));
    print!("{table}");
    write_file(out_dir, "microstrip.csv", &table)?;
    Ok(())
}

fn simulate_rectifier(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let doubler = config.doubler_config();
    if config.simulate_periods < 3 {
        return Err(CliError::Config(
            "[rectifier] simulate_periods: need at least 3 periods".to_string(),
        ));
    }
    let netlist = build_doubler_ladder(&doubler)?;
    write_file(out_dir, "rectifier.net", &netlist_to_text(&netlist))?;

    let period = doubler.period();
    let dt = period / config.samples_per_period as f64;
    let t_end = config.simulate_periods as f64 * period;
    let waveform = run_transient_with(&netlist, dt, t_end, &config.solver)?;
    let steady = extract_steady_state_with_tol(
        &waveform,
        &doubler.output_node(),
        period,
        config.settle_rel_tol,
    )?;
    println!("output node   : {}", doubler.output_node());
    println!("dc_V          : {}", format_sig(steady.dc, 6));
    println!("ripple_V      : {}", format_sig(steady.ripple, 6));
    println!("settled       : {}", steady.settled);
    let path = write_file(out_dir, "rectifier_waveform.csv", &waveform.to_csv())?;
    println!("waveform written to {}", path.display());
    Ok(())
}

fn probe_zin(config: &RunConfig) -> Result<Complex64, CliError> {
    let doubler = config.doubler_config();
    Ok(estimate_input_impedance_with(
        &doubler,
        config.probe_amplitude,
        &config.probe_config(),
    )?)
}

fn zin(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let z = probe_zin(config)?;
    println!(
        "zin_ohm : {} {} {}j",
        format_sig(z.re, 6),
        if z.im < 0.0 { "-" } else { "+" },
        format_sig(z.im.abs(), 6)
    );
    let csv = format!(
        "zin_re_ohm,zin_im_ohm\n{},{}\n",
        format_sig(z.re, 6),
        format_sig(z.im, 6)
    );
    write_file(out_dir, "zin.csv", &csv)?;
    Ok(())
}

fn match_command(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let z = match config.match_zin {
        Some((re, im)) => Complex64::new(re, im),
        None => probe_zin(config)?,
    };
    let report = MatchReport::new(z).map_err(|e| CliError::Config(e.to_string()))?;
    println!("{report}");
    let csv = format!("{}\n{}\n", MatchReport::CSV_HEADER, report.to_csv_row());
    write_file(out_dir, "match.csv", &csv)?;
    Ok(())
}

fn write_sweep_outputs(
    cli_plot: bool,
    sweep: &SweepResult,
    out_dir: &Path,
    stem: &str,
    x_label: &str,
    log_x: bool,
) -> Result<(), CliError> {
    let csv_path = write_file(out_dir, &format!("{stem}.csv"), &sweep.to_csv())?;
    println!("{} rows written to {}", sweep.rows.len(), csv_path.display());
    if let Some(x) = sweep.argmax_x {
        println!("best efficiency at x = {}", format_sig(x, 6));
    }
    if cli_plot {
        for (column, y_label) in [("v_dc", "DC output (V)"), ("efficiency", "efficiency (%)")] {
            let points: Vec<(f64, f64)> = sweep
                .rows
                .iter()
                .map(|r| {
                    (
                        r.x,
                        if column == "v_dc" {
                            r.v_dc
                        } else {
                            r.efficiency_pct
                        },
                    )
                })
                .collect();
            let spec = PlotSpec {
                title: stem,
                x_label,
                y_label,
                log_x,
            };
            write_file(
                out_dir,
                &format!("{stem}_{column}.svg"),
                &line_plot(&spec, &points),
            )?;
        }
    }
    Ok(())
}

fn sweep_power_command(cli: &Cli, config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let chain_config = config.chain_config()?;
    let sweep = sweep_input_power(
        &chain_config,
        config.sweep_from_dbm,
        config.sweep_to_dbm,
        config.sweep_step_db,
    )?;
    write_sweep_outputs(
        cli.plot,
        &sweep,
        out_dir,
        "sweep_power",
        "incident power (dBm)",
        false,
    )
}

fn sweep_load_command(cli: &Cli, config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let chain_config = config.chain_config()?;
    let sweep = sweep_load(&chain_config, &config.sweep_loads)?;
    write_sweep_outputs(
        cli.plot,
        &sweep,
        out_dir,
        "sweep_load",
        "load resistance (ohm)",
        true,
    )
}

fn chain_command(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let chain_config = config.chain_config()?;
    let run = run_chain(&chain_config)?;
    println!("v_dc_V              : {}", format_sig(run.v_dc, 6));
    println!(
        "efficiency_pct      : {}",
        format_sig(run.efficiency_pct, 6)
    );
    println!("settled             : {}", run.settled);
    println!(
        "converter_zin_ohm   : {} {} {}j",
        format_sig(run.converter_impedance.re, 6),
        if run.converter_impedance.im < 0.0 { "-" } else { "+" },
        format_sig(run.converter_impedance.im.abs(), 6)
    );
    println!(
        "mounted_resistor_ohm: {}",
        format_sig(run.mounted_resistor, 6)
    );
    println!(
        "delivered_fraction  : {}",
        format_sig(run.delivered_fraction, 6)
    );
    println!(
        "drive_amplitude_V   : {}",
        format_sig(run.drive_amplitude, 6)
    );
    println!("power ledger:");
    print!("{}", run.ledger.to_csv());

    let mut summary = String::from("quantity,value\n");
    summary.push_str(&format!("v_dc_V,{}\n", format_sig(run.v_dc, 6)));
    summary.push_str(&format!(
        "efficiency_pct,{}\n",
        format_sig(run.efficiency_pct, 6)
    ));
    summary.push_str(&format!("settled,{}\n", run.settled));
    summary.push_str(&format!(
        "reference_power_dbm,{}\n",
        format_sig(run.reference_power_dbm, 6)
    ));
    summary.push_str(&format!(
        "config_fingerprint,{:016x}\n",
        chain::config_fingerprint(&chain_config)
    ));
    write_file(out_dir, "chain_summary.csv", &summary)?;
    write_file(out_dir, "chain_ledger.csv", &run.ledger.to_csv())?;
    Ok(())
}
