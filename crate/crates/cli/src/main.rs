use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fgbeam::config::{BcChoice, ScenarioConfig};
use fgbeam::csv::{fmt_num, CsvTable};
use fgbeam::q4ref::q4_solve;
use fgbeam::recovery::fibres;
use fgbeam::tables::{self, TableOptions};
use fgbeam::{solve, ElementKind, Error, Result};

/// Static analysis of functionally graded beams.
#[derive(Debug, Parser)]
#[command(name = "fgbeam", version)]
struct Cli {
    /// Scenario file (TOML). Built-in defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving CSV output.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Element formulation: cf, c or dts.
    #[arg(long, global = true)]
    formulation: Option<ElementKind>,
    /// Number of beam elements.
    #[arg(long, global = true)]
    mesh: Option<usize>,
    /// Power-law index.
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Boundary conditions: ss or cc.
    #[arg(long, global = true)]
    bc: Option<String>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "FGBEAM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-section matrices and through-thickness profiles.
    Section,
    /// Solve the beam and write nodal displacements.
    Solve,
    /// Stress profiles at the configured stations.
    Stress,
    /// Solve the plane-stress reference model.
    Q4,
    /// Reproduce one of the nine benchmark tables (exit code 1 on any failed check).
    Table {
        id: u8,
        /// Skip the continuum reference columns.
        #[arg(long)]
        no_q4: bool,
    },
    /// Mid-span deflection against mesh size.
    Converge {
        /// Comma-separated even element counts.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16, 32, 64, 128])]
        meshes: Vec<usize>,
    },
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(k) = cli.formulation {
        cfg.model.formulation = k;
    }
    if let Some(n) = cli.mesh {
        cfg.model.n_elements = n;
    }
    if let Some(p) = cli.p {
        cfg.material.p = p;
    }
    if let Some(bc) = &cli.bc {
        cfg.model.bc = match bc.to_ascii_lowercase().as_str() {
            "ss" => BcChoice::Ss,
            "cc" => BcChoice::Cc,
            other => return Err(Error::Config(format!("unknown boundary condition '{other}' (expected ss or cc)"))),
        };
    }
    Ok(cfg)
}

fn write(table: &CsvTable, dir: &Path, name: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    table.write(&path)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn run_section(cli: &Cli, cfg: &ScenarioConfig) -> Result<()> {
    let section = cfg.beam_model().section()?;
    write(&tables::section_matrices_csv(&section), &cli.out, "section_matrices.csv")?;
    write(&tables::section_profiles_csv(&section, cfg.output.points), &cli.out, "section_profiles.csv")?;
    println!("Dt =\n{}", section.dt);
    Ok(())
}

fn run_solve(cli: &Cli, cfg: &ScenarioConfig) -> Result<()> {
    let model = cfg.beam_model();
    let sol = solve(&model)?;
    let le = model.element_length();
    let mut t = CsvTable::new(["node", "x", "u", "u_x", "w", "w_x", "theta", "theta_x", "phi", "phi_x"]);
    t.comment(format!(
        "{} elements, formulation {}, bc {}, type {} p = {}",
        model.n_elements,
        model.kind,
        model.bc.label(),
        model.law.kind,
        model.law.p
    ));
    t.comment("lengths in mm; rotations and stretching amplitudes dimensionless");
    for node in 0..model.n_nodes() {
        let mut row = vec![node.to_string(), fmt_num(node as f64 * le)];
        row.extend((0..8).map(|k| fmt_num(sol.node_dof(node, k))));
        t.push(row);
    }
    write(&t, &cli.out, "solve.csv")?;
    if model.n_elements.is_multiple_of(2) {
        println!(
            "mid-span deflection ({:?}): {:.6} mm",
            cfg.model.deflection,
            sol.midspan_deflection(cfg.model.deflection)?
        );
    }
    println!("transverse reaction: {:.6} N", sol.transverse_reaction());
    println!("relative residual: {:.3e}; backward error {:.2e}", sol.residual, sol.backward_error);
    Ok(())
}

fn run_stress(cli: &Cli, cfg: &ScenarioConfig) -> Result<()> {
    let samples = tables::run_profile(cfg, &cfg.output.stations, &[cfg.model.formulation])?;
    write(&tables::stress_csv(&samples), &cli.out, "stress.csv")?;
    if cfg.output.gnuplot {
        let path = cli.out.join("stress.gp");
        std::fs::write(&path, tables::gnuplot_script("stress.csv"))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_q4(cli: &Cli, cfg: &ScenarioConfig) -> Result<()> {
    let model = cfg.q4_model();
    let started = std::time::Instant::now();
    let sol = q4_solve(&model)?;
    println!(
        "{} x {} mesh solved in {:.2?}; backward error {:.2e}",
        model.mx,
        model.my,
        started.elapsed(),
        sol.backward_error
    );
    println!("u_y(L/2, 0): {:.6} mm", sol.midspan_deflection()?);
    let mut samples = Vec::new();
    for &x in &cfg.output.stations {
        for y in fibres(cfg.geometry.depth, cfg.output.points) {
            samples.push(("q4".to_string(), sol.stress(x, y)?));
        }
    }
    write(&tables::stress_csv(&samples), &cli.out, "q4_stress.csv")?;
    Ok(())
}

fn run_table(cli: &Cli, id: u8, no_q4: bool) -> Result<bool> {
    let opts = TableOptions {
        with_q4: !no_q4,
        ..TableOptions::default()
    };
    let report = tables::run_table(id, &opts)?;
    write(&report.to_csv(), &cli.out, &format!("table{id}.csv"))?;
    let failures = report.failures();
    for c in &failures {
        eprintln!(
            "check failed: row {} column {}: {} vs {} ({:+.3}%)",
            c.row,
            c.column,
            fmt_num(c.computed),
            c.reference.map(fmt_num).unwrap_or_default(),
            c.deviation_pct().unwrap_or(f64::NAN)
        );
    }
    println!("table {id}: {} of {} checks passed", report.cells.iter().filter(|c| c.passed() == Some(true)).count(), report.cells.iter().filter(|c| c.passed().is_some()).count());
    Ok(failures.is_empty())
}

fn run_converge(cli: &Cli, cfg: &ScenarioConfig, meshes: &[usize]) -> Result<()> {
    let kinds: Vec<ElementKind> = match cli.formulation {
        Some(k) => vec![k],
        None => ElementKind::ALL.to_vec(),
    };
    let rows = tables::run_converge(cfg, meshes, &kinds)?;
    write(&tables::convergence_csv(&rows), &cli.out, "converge.csv")?;
    for k in kinds {
        match tables::first_converged_mesh(&rows, k) {
            Some(n) => println!("{k}: converged from {n} elements"),
            None => println!("{k}: not converged over the given meshes"),
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }
    let cfg = scenario(cli)?;
    match &cli.command {
        Command::Section => run_section(cli, &cfg)?,
        Command::Solve => run_solve(cli, &cfg)?,
        Command::Stress => run_stress(cli, &cfg)?,
        Command::Q4 => run_q4(cli, &cfg)?,
        Command::Table { id, no_q4 } => return run_table(cli, *id, *no_q4),
        Command::Converge { meshes } => run_converge(cli, &cfg, meshes)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
