//! Command-line front end: canned reproductions and config-driven
//! experiments, all emitting deterministic CSV plus a run manifest.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vortex_lab::analysis::{
    boundary_time, divergence_curve, lyapunov_time_capped, rps_threshold, LYAPUNOV_HORIZON,
};
use vortex_lab::config::{self, CoeffConfig, LyapunovConfig, SimulateConfig, VolumeConfig};
use vortex_lab::dynamics::{primal_of_dual, simulate, Dynamic, StepSchedule};
use vortex_lab::error::Error;
use vortex_lab::games::{matching_pennies, triviality_gap, Game};
use vortex_lab::report::{
    boundary_csv, divergence_csv, fmt_f, hull_csv, manifest_json, snapshot_csv, trajectory_csv,
    OutputTracker,
};
use vortex_lab::volume::{
    epsilon_threshold_zero_sum, evolve_ensemble, growth_rate_bound, second_order_coeff, Ensemble,
    GrowthKind,
};

#[derive(Parser)]
#[command(name = "vortex-lab", version, about = "Volume-expansion laboratory for learning dynamics in games")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a single trajectory and write it as CSV.
    Simulate(CommonArgs),
    /// Reproduce the Matching Pennies point-cloud evolution figure.
    Figure1 {
        /// Cloud center: at the equilibrium or offset from it.
        #[arg(long, value_enum)]
        variant: Figure1Variant,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit the table of RPS escape levels over the payoff ratio.
    RpsTable {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pointwise report: second-order coefficient, triviality gap,
    /// step-size thresholds and growth bounds.
    Coeff(CommonArgs),
    /// Divergence curves and doubling times over a step-size sweep.
    Lyapunov(CommonArgs),
    /// Evolve a point cloud, tracking volume multipliers and hulls.
    Volume(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Echoed into the manifest; reserved for randomized initial clouds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure1Variant {
    NearNe,
    OffNe,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.cmd {
        Cmd::Simulate(args) => run_tracked(&args.out, |tr| cmd_simulate(&args, tr)),
        Cmd::Figure1 { variant, ref out, seed } => {
            run_tracked(out, |tr| cmd_figure1(variant, seed, tr))
        }
        Cmd::RpsTable { ref out, seed } => run_tracked(out, |tr| cmd_rps_table(seed, tr)),
        Cmd::Coeff(args) => run_tracked(&args.out, |tr| cmd_coeff(&args, tr)),
        Cmd::Lyapunov(args) => run_tracked(&args.out, |tr| cmd_lyapunov(&args, tr)),
        Cmd::Volume(args) => run_tracked(&args.out, |tr| cmd_volume(&args, tr)),
    };
    match result {
        Ok(()) => {
            eprintln!("completed in {:.3}s", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = match e {
                Error::Validation(_) => "validation",
                Error::Numeric(_) => "numeric",
                Error::Domain(_) => "domain",
                Error::Unsupported(_) => "unsupported",
                Error::Io(_) => "io",
                Error::Config(_) => "config",
            };
            let doc = serde_json::json!({ "error": { "kind": kind, "message": e.to_string() } });
            eprintln!("{doc}");
            match e {
                Error::Validation(_) | Error::Config(_) | Error::Unsupported(_) => {
                    ExitCode::from(2)
                }
                Error::Numeric(_) | Error::Domain(_) | Error::Io(_) => ExitCode::from(3),
            }
        }
    }
}

/// Run a command with partial-output cleanup on failure.
fn run_tracked(
    out: &PathBuf,
    f: impl FnOnce(&mut OutputTracker) -> Result<(), Error>,
) -> Result<(), Error> {
    let mut tracker = OutputTracker::new(out)?;
    match f(&mut tracker) {
        Ok(()) => Ok(()),
        Err(e) => {
            tracker.discard();
            Err(e)
        }
    }
}

fn cmd_simulate(args: &CommonArgs, tr: &mut OutputTracker) -> Result<(), Error> {
    let cfg: SimulateConfig = config::load(&args.config)?;
    let (game, r0) = cfg.build()?;
    let traj = simulate(&game, &r0, &cfg.schedule, cfg.horizon, &cfg.dynamic, cfg.stride)?;
    tr.write("trajectory.csv", &trajectory_csv(&traj))?;
    tr.write("manifest.json", &manifest_json("simulate", &cfg, args.seed)?)?;
    Ok(())
}

fn cmd_figure1(
    variant: Figure1Variant,
    seed: u64,
    tr: &mut OutputTracker,
) -> Result<(), Error> {
    let (center, times): ((f64, f64), Vec<u64>) = match variant {
        Figure1Variant::NearNe => ((0.0, 0.0), (0..=6).map(|i| i * 500).collect()),
        Figure1Variant::OffNe => ((0.2, 0.15), (0..=6).map(|i| i * 300).collect()),
    };
    let horizon = *times.last().unwrap();
    let game = Game::Bimatrix(matching_pennies());
    let schedule = StepSchedule::Constant { eps: 0.1 };
    let ensemble = Ensemble::grid_cloud_2x2(center, 0.05, 41)?;
    let out = evolve_ensemble(&game, &ensemble, &schedule, horizon, &Dynamic::Mwu, &times)?;

    let mut snapshot_files = Vec::new();
    for snap in &out.snapshots {
        let name = format!("snapshot_{:06}.csv", snap.t);
        tr.write(&name, &snapshot_csv(snap))?;
        snapshot_files.push((snap.t, name));
    }
    tr.write("hull.csv", &hull_csv(&out)?)?;
    tr.write("plot.gp", &figure1_plot_script(&snapshot_files))?;
    let cfg = serde_json::json!({
        "variant": match variant {
            Figure1Variant::NearNe => "near-ne",
            Figure1Variant::OffNe => "off-ne",
        },
        "game": "matching-pennies",
        "eps": 0.1,
        "grid": { "center": [center.0, center.1], "radius": 0.05, "resolution": 41 },
        "snapshot_times": times,
    });
    tr.write("manifest.json", &manifest_json("figure1", &cfg, seed)?)?;
    Ok(())
}

/// Gnuplot script rendering the snapshot regions in the canonical colors.
fn figure1_plot_script(files: &[(u64, String)]) -> String {
    const COLORS: [&str; 7] = ["dark-green", "orange", "purple", "lime", "pink", "blue", "red"];
    let mut s = String::new();
    s.push_str("# Snapshot regions in reduced coordinates (f, g).\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set size ratio -1\n");
    s.push_str("set xlabel 'f'\nset ylabel 'g'\n");
    s.push_str("set key outside\n");
    s.push_str("plot \\\n");
    let lines: Vec<String> = files
        .iter()
        .zip(COLORS.iter().cycle())
        .map(|((t, name), color)| {
            // Pivot the long-format CSV into (f, g) pairs per point id.
            format!(
                "  \"< awk -F, 'NR>1 && $3==0 {{f[$2]=$4}} NR>1 && $3==1 {{print f[$2], $4}}' {name}\" \
                 using 1:2 with points pt 7 ps 0.4 lc rgb '{color}' title 't={t}'"
            )
        })
        .collect();
    s.push_str(&lines.join(", \\\n"));
    s.push('\n');
    s
}

fn cmd_rps_table(seed: u64, tr: &mut OutputTracker) -> Result<(), Error> {
    let ratios = [0.5, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 2.0];
    let mut csv = String::from("r,threshold\n");
    for r in ratios {
        csv.push_str(&format!("{},{}\n", fmt_f(r), fmt_f(rps_threshold(r))));
    }
    tr.write("rps_table.csv", &csv)?;
    let cfg = serde_json::json!({ "ratios": ratios });
    tr.write("manifest.json", &manifest_json("rps-table", &cfg, seed)?)?;
    Ok(())
}

fn cmd_coeff(args: &CommonArgs, tr: &mut OutputTracker) -> Result<(), Error> {
    let cfg: CoeffConfig = config::load(&args.config)?;
    let (game, r) = cfg.build()?;
    let xs = primal_of_dual(&r);
    let c = second_order_coeff(&game, &xs[0], &xs[1])?;
    let c_a = triviality_gap(&game.a)?;
    let trivial = c_a <= 1e-7;

    let mut csv = String::from("delta,eps_threshold,growth_bound\n");
    let mut rows = Vec::new();
    for &delta in &cfg.deltas {
        let eps = epsilon_threshold_zero_sum(delta, game.n(), game.m(), c_a);
        let bound = growth_rate_bound(&GrowthKind::ZeroSum { delta, c_a }, eps);
        csv.push_str(&format!("{},{},{}\n", fmt_f(delta), fmt_f(eps), fmt_f(bound)));
        rows.push(serde_json::json!({
            "delta": delta,
            "eps_threshold": eps,
            "growth_bound": bound,
        }));
    }
    let report = serde_json::json!({
        "second_order_coeff": c,
        "triviality_gap": c_a,
        "trivial": trivial,
        "note": if trivial { "trivial — no chaos guarantee" } else { "non-trivial" },
        "thresholds": rows,
    });
    println!("C(r) = {}", fmt_f(c));
    println!("c(A) = {}{}", fmt_f(c_a), if trivial { "  (trivial — no chaos guarantee)" } else { "" });
    for &delta in &cfg.deltas {
        let eps = epsilon_threshold_zero_sum(delta, game.n(), game.m(), c_a);
        println!("delta = {delta}: eps_threshold = {}", fmt_f(eps));
    }
    tr.write("thresholds.csv", &csv)?;
    tr.write(
        "coeff.json",
        &serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    tr.write("manifest.json", &manifest_json("coeff", &cfg, args.seed)?)?;
    Ok(())
}

fn cmd_lyapunov(args: &CommonArgs, tr: &mut OutputTracker) -> Result<(), Error> {
    let cfg: LyapunovConfig = config::load(&args.config)?;
    let (game, r0) = cfg.build()?;
    let horizon = cfg.horizon.unwrap_or(LYAPUNOV_HORIZON);
    let mut entries = Vec::new();
    let mut times: Vec<Option<u64>> = Vec::new();
    for (i, &eps) in cfg.eps_list.iter().enumerate() {
        let rep = lyapunov_time_capped(&game, &r0, cfg.radius, eps, &cfg.dynamic, cfg.factor, horizon)?;
        // Curve up to the divergence time, or a bounded prefix when the
        // search exhausted the horizon.
        let t_curve = rep.time.unwrap_or_else(|| horizon.min(10_000));
        let curve = divergence_curve(&game, &r0, cfg.radius, eps, &cfg.dynamic, t_curve)?;
        tr.write(&format!("divergence_{i}.csv"), &divergence_csv(&curve))?;
        let summary_line = match rep.time {
            Some(t) => format!("diverged at t = {t}"),
            None => format!("no divergence within horizon {horizon}"),
        };
        entries.push(serde_json::json!({
            "eps": eps,
            "time": rep.time,
            "horizon": rep.horizon,
            "summary": summary_line,
        }));
        times.push(rep.time);
    }
    let ratios: Vec<Option<f64>> = times
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) if a > 0 => Some(b as f64 / a as f64),
            _ => None,
        })
        .collect();
    let summary = serde_json::json!({ "entries": entries, "time_ratios": ratios });
    for e in summary["entries"].as_array().unwrap() {
        println!("eps = {}: {}", e["eps"], e["summary"].as_str().unwrap());
    }
    tr.write(
        "summary.json",
        &serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    tr.write("manifest.json", &manifest_json("lyapunov", &cfg, args.seed)?)?;
    Ok(())
}

fn cmd_volume(args: &CommonArgs, tr: &mut OutputTracker) -> Result<(), Error> {
    let cfg: VolumeConfig = config::load(&args.config)?;
    let (game, ensemble) = cfg.build()?;
    let out = evolve_ensemble(
        &game,
        &ensemble,
        &cfg.schedule,
        cfg.horizon,
        &cfg.dynamic,
        &cfg.snapshot_times,
    )?;
    for snap in &out.snapshots {
        tr.write(&format!("snapshot_{:06}.csv", snap.t), &snapshot_csv(snap))?;
    }
    let two_d = out
        .snapshots
        .first()
        .map(|s| s.coords[0].1.len() == 2)
        .unwrap_or(false);
    if two_d {
        tr.write("hull.csv", &hull_csv(&out)?)?;
    }
    let mut mult_csv = String::from("point_id,multiplier\n");
    for p in &out.points {
        mult_csv.push_str(&format!("{},{}\n", p.id, fmt_f(p.multiplier)));
    }
    tr.write("multipliers.csv", &mult_csv)?;

    if let Some(b) = &cfg.boundary {
        let eps = match cfg.schedule {
            StepSchedule::Constant { eps } => eps,
            StepSchedule::Diminishing { .. } => unreachable!("rejected at config build"),
        };
        let bimatrix = match &game {
            Game::Bimatrix(g) => g,
            Game::Graphical(_) => {
                return Err(Error::Unsupported(
                    "boundary-time certificates cover bimatrix games only".into(),
                ))
            }
        };
        let c_a = triviality_gap(&bimatrix.a)?;
        let bt = boundary_time(b.vol0, b.delta, c_a, eps, bimatrix.n(), bimatrix.m(), b.gamma)?;
        tr.write("boundary.csv", &boundary_csv(&bt))?;
    }
    tr.write("manifest.json", &manifest_json("volume", &cfg, args.seed)?)?;
    Ok(())
}
