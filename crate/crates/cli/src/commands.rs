use std::path::Path;

use rayon::prelude::*;
use vacuumfront::acceptance::{run_criterion, CriterionResult, Fault, CRITERIA};
use vacuumfront::affine::{barenblatt_affine, conserved_quantity, integrate_affine, integrate_correction};
use vacuumfront::diagnostics::{
    boundary_asymptotics, center_of_mass_law, radius_asymptotics, resampled_fit, shift_theta0, AsymptoticsReport,
};
use vacuumfront::num::{fit_rate, RateFit};
use vacuumfront::solver1d::{eulerian_mass, reconstructed_density, run, Grid1D};
use vacuumfront::solver3d::{eulerian_mass3, reconstructed_density3, run3, Grid3D};
use vacuumfront::state::FlowState;
use vacuumfront::{BarenblattProfile, Dim};

use crate::config::RunConfig;
use crate::csv;
use crate::CliError;

fn profile(cfg: &RunConfig, fault: Option<Fault>) -> Result<BarenblattProfile, CliError> {
    let p = BarenblattProfile::solve(cfg.gamma, cfg.mass, cfg.dim)?;
    Ok(match fault {
        None => p,
        Some(Fault::PerturbB) => BarenblattProfile::with_constants(p.gamma, p.mass, p.dim, p.a, 1.1 * p.b)?,
    })
}

pub fn barenblatt(cfg: &RunConfig, out: &Path, fault: Option<Fault>) -> Result<(), CliError> {
    let p = profile(cfg, fault)?;
    let mut times = vec![0.0];
    times.extend(cfg.snapshot_ladder.times(cfg.t_end));
    let n = cfg.grid_n;
    let mut rows = Vec::new();
    for &t in &times {
        let r = p.boundary_radius(t);
        for i in 0..=n {
            let x = match p.dim {
                Dim::One => -r + 2.0 * r * i as f64 / n as f64,
                Dim::Three => r * i as f64 / n as f64,
            };
            let rho = p.density(x, t);
            let mut row = vec![t, x, rho, p.velocity(x, t)];
            if p.dim == Dim::Three {
                row.push(4.0 * std::f64::consts::PI * x * x * rho);
            }
            rows.push(row);
        }
    }
    let header: &[&str] = match p.dim {
        Dim::One => &["t", "x", "rho", "u"],
        Dim::Three => &["t", "x", "rho", "u", "four_pi_r2_rho"],
    };
    csv::write(&out.join("profile.csv"), &csv::table(header, rows))?;
    let recomputed = p.mass_at(0.0, 1e-12 * p.mass)?;
    let constants = format!(
        "gamma={}\nmass={}\ndim={}\nk={}\nA={}\nB={}\nradius={}\nmass_recomputed={}\nmass_error={}\n",
        csv::number(p.gamma),
        csv::number(p.mass),
        p.dim,
        csv::number(p.k),
        csv::number(p.a),
        csv::number(p.b),
        csv::number(p.initial_radius()),
        csv::number(recomputed),
        csv::number(recomputed - p.mass),
    );
    csv::write(&out.join("constants.txt"), &constants)?;
    println!("A = {:.12}, B = {:.12}, k = {}, mass error {:.3e}", p.a, p.b, p.k, recomputed - p.mass);
    Ok(())
}

pub fn affine(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let p = profile(cfg, None)?;
    let init = barenblatt_affine(&p, 0.0);
    let traj = integrate_affine(init, p.gamma, p.dim, cfg.t_end, cfg.ode_tol)?;
    let q0 = conserved_quantity(&init, p.gamma, p.dim);
    let mut drift: f64 = 0.0;
    let rows: Vec<Vec<f64>> = traj
        .states()
        .map(|s| {
            let bar = barenblatt_affine(&p, s.t);
            let q = conserved_quantity(&s, p.gamma, p.dim);
            drift = drift.max((q / q0 - 1.0).abs());
            vec![s.t, s.a, s.b, s.e, bar.a, bar.b, bar.e, q]
        })
        .collect();
    csv::write(
        &out.join("affine.csv"),
        &csv::table(&["t", "a", "b", "e", "abar", "bbar", "ebar", "conserved"], rows),
    )?;
    println!("{} samples, conserved quantity drift {drift:.3e}", traj.len());
    Ok(())
}

const RATE_HEADER: &str = "quantity,exponent,amplitude,window_lo,window_hi,residual_rms\n";

fn rate_row(name: &str, fit: Option<RateFit>) -> String {
    match fit {
        Some(f) => format!(
            "{name},{},{},{},{},{}\n",
            csv::number(f.exponent),
            csv::number(f.amplitude),
            csv::number(f.window.0),
            csv::number(f.window.1),
            csv::number(f.residual_rms)
        ),
        None => format!("{name},NaN,NaN,NaN,NaN,NaN\n"),
    }
}

fn correction_fits(cfg: &RunConfig) -> Result<String, CliError> {
    let c = integrate_correction(cfg.gamma, cfg.dim, cfg.t_end, cfg.ode_tol)?;
    let h: Vec<(f64, f64)> = c.samples().map(|(t, h, _)| (t, h)).collect();
    let h_log: Vec<(f64, f64)> = h.iter().map(|&(t, v)| (t, v / (2.0 + t).ln())).collect();
    let w = cfg.rate_window;
    let mut s = rate_row("h", resampled_fit(&h, w));
    s.push_str(&rate_row("h_over_log", resampled_fit(&h_log, w)));
    Ok(s)
}

pub fn correction(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = integrate_correction(cfg.gamma, cfg.dim, cfg.t_end, cfg.ode_tol)?;
    let rows = c
        .samples()
        .map(|(t, h, ht)| Ok(vec![t, h, ht, c.bar_eta_x(t), c.tilde_eta_x(t)?]))
        .collect::<Result<Vec<_>, vacuumfront::Error>>()?;
    csv::write(
        &out.join("correction.csv"),
        &csv::table(&["t", "h", "ht", "eta_bar_x", "tilde_eta_x"], rows),
    )?;
    let rates = correction_fits(cfg)?;
    csv::write(&out.join("rates.csv"), &format!("{RATE_HEADER}{rates}"))?;
    print!("{rates}");
    Ok(())
}

struct Fits {
    boundary: Option<RateFit>,
    density: Option<RateFit>,
    velocity: Option<RateFit>,
    energy: Option<RateFit>,
}

fn fits(rep: &AsymptoticsReport, window: (f64, f64)) -> Fits {
    let snap = |v: Vec<(f64, f64)>| fit_rate(&v, window).ok();
    Fits {
        boundary: resampled_fit(&rep.boundary_residuals, window),
        density: snap(rep.field_errors.iter().map(|f| (f.t, f.density)).collect()),
        velocity: snap(rep.field_errors.iter().map(|f| (f.t, f.velocity)).collect()),
        energy: snap(rep.energies.iter().map(|e| (e.t, e.total)).collect()),
    }
}

fn fit_rows(f: &Fits) -> String {
    [
        rate_row("boundary_residual", f.boundary),
        rate_row("density_error", f.density),
        rate_row("velocity_error", f.velocity),
        rate_row("energy", f.energy),
    ]
    .concat()
}

/// Everything `simulate` writes, built in memory first.
struct Simulation {
    files: Vec<(String, String)>,
    fits: Fits,
    summary: Vec<(&'static str, f64)>,
}

fn snapshot_table(s: &FlowState, nodes: &[f64], rho: &[f64], tilde: (f64, f64)) -> String {
    let rows = (0..nodes.len()).map(|i| {
        let x = nodes[i];
        vec![
            x,
            s.eta[i],
            s.eta_t[i],
            rho[i],
            s.eta_t[i],
            s.eta[i] - x * tilde.0,
            s.eta_t[i] - x * tilde.1,
        ]
    });
    csv::table(&["x", "eta", "eta_t", "rho", "u", "w", "w_t"], rows)
}

fn energy_table(rep: &AsymptoticsReport) -> String {
    let rows = rep
        .energies
        .iter()
        .map(|e| vec![e.t, e.e[0], e.e[1], e.e[2], e.e01, e.e02, e.e11, e.l2, e.total, e.tilde_total()]);
    csv::table(
        &["t", "e0", "e1", "e2", "e01", "e02", "e11", "l2", "total", "tilde_total"],
        rows,
    )
}

fn field_table(rep: &AsymptoticsReport) -> String {
    let rows = rep.field_errors.iter().map(|f| vec![f.t, f.density, f.velocity]);
    csv::table(&["t", "density", "velocity"], rows)
}

fn energy_ratio(rep: &AsymptoticsReport) -> f64 {
    let e0 = rep.energies.first().map_or(0.0, |e| e.total);
    if e0 > 0.0 {
        rep.energies.iter().map(|e| e.total / e0).fold(0.0, f64::max)
    } else {
        f64::NAN
    }
}

fn simulate_run(cfg: &RunConfig) -> Result<Simulation, CliError> {
    let p = profile(cfg, None)?;
    let c = integrate_correction(cfg.gamma, cfg.dim, cfg.t_end, cfg.ode_tol)?;
    let opts = cfg.run_options();
    let radius = p.initial_radius();
    let mut files = Vec::new();
    let mut index = Vec::new();
    let mut summary = Vec::new();
    let rep = match cfg.dim {
        Dim::One => {
            let g = Grid1D::uniform(&p, cfg.grid_n)?;
            let out = run(&g, &c, &cfg.perturbation, cfg.t_end, &opts)?;
            let theta0 = shift_theta0(&out.snapshots[0], &g)?;
            let rep = boundary_asymptotics(&out, &g, &c, theta0)?;
            let rows = out
                .boundary
                .iter()
                .zip(&rep.boundary_residuals)
                .map(|(&(t, xm, xp), &(_, res))| Ok(vec![t, xm, xp, res, radius * c.h(t)?]))
                .collect::<Result<Vec<_>, vacuumfront::Error>>()?;
            files.push((
                "boundary.csv".into(),
                csv::table(&["t", "xminus", "xplus", "residual", "baseline"], rows),
            ));
            for (i, s) in out.snapshots.iter().enumerate() {
                let tilde = (c.tilde_eta_x(s.t)?, c.tilde_eta_xt(s.t)?);
                let rho = reconstructed_density(s, &g);
                files.push((format!("snapshots/snap_{i:05}.csv"), snapshot_table(s, &g.nodes, &rho, tilde)));
                index.push(vec![i as f64, s.t]);
            }
            let last = out.snapshots.last().expect("run returns the initial state");
            summary.push(("theta0", theta0));
            summary.push(("reconstructed_mass_error", eulerian_mass(last, &g) - p.mass));
            summary.push(("center_of_mass_max_deviation", center_of_mass_law(&out, &g).max_deviation));
            summary.push(("steps", (out.boundary.len() - 1) as f64));
            rep
        }
        Dim::Three => {
            let g = Grid3D::uniform(&p, cfg.grid_n)?;
            let out = run3(&g, &c, &cfg.perturbation, cfg.t_end, &opts)?;
            let rep = radius_asymptotics(&out, &g, &c)?;
            let rows = out
                .radius
                .iter()
                .zip(&rep.boundary_residuals)
                .map(|(&(t, r), &(_, res))| Ok(vec![t, r, res, radius * c.h(t)?]))
                .collect::<Result<Vec<_>, vacuumfront::Error>>()?;
            files.push(("boundary.csv".into(), csv::table(&["t", "R", "residual", "baseline"], rows)));
            for (i, s) in out.snapshots.iter().enumerate() {
                let tilde = (c.tilde_eta_x(s.t)?, c.tilde_eta_xt(s.t)?);
                let rho = reconstructed_density3(s, &g);
                files.push((format!("snapshots/snap_{i:05}.csv"), snapshot_table(s, &g.nodes, &rho, tilde)));
                index.push(vec![i as f64, s.t]);
            }
            let last = out.snapshots.last().expect("run returns the initial state");
            summary.push(("reconstructed_mass_error", eulerian_mass3(last, &g) - p.mass));
            summary.push(("steps", (out.radius.len() - 1) as f64));
            rep
        }
    };
    let fits = fits(&rep, cfg.rate_window);
    let last_residual = rep.boundary_residuals.last().map_or(f64::NAN, |r| r.1);
    summary.push(("t_end", cfg.t_end));
    summary.push(("final_boundary_residual", last_residual));
    summary.push(("final_baseline", radius * c.h(cfg.t_end)?));
    summary.push(("energy_max_ratio", energy_ratio(&rep)));
    for (name, fit) in [
        ("boundary_exponent", fits.boundary),
        ("density_exponent", fits.density),
        ("velocity_exponent", fits.velocity),
        ("energy_exponent", fits.energy),
    ] {
        summary.push((name, fit.map_or(f64::NAN, |f| f.exponent)));
    }
    files.push(("snapshots/index.csv".into(), csv::table(&["index", "t"], index)));
    files.push(("energy.csv".into(), energy_table(&rep)));
    files.push(("fields.csv".into(), field_table(&rep)));
    files.push(("report.csv".into(), csv::key_values(&summary)));
    files.push(("plot.gp".into(), plot_script(cfg.dim)));
    Ok(Simulation { files, fits, summary })
}

fn plot_script(dim: Dim) -> String {
    let boundary = match dim {
        Dim::One => "|x+ - xbar+ - theta0|",
        Dim::Three => "|R - Rbar|",
    };
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale xy\n\
         set xlabel 't'\n\
         set terminal pngcairo size 900,600\n\
         set output 'boundary_residual.png'\n\
         set title 'boundary residual {boundary}'\n\
         plot 'boundary.csv' using 1:(abs(column('residual'))) with lines title 'residual', \\\n\
         \x20    'boundary.csv' using 1:'baseline' with lines title 'sqrt(A/B) h'\n\
         set output 'energy.png'\n\
         set title 'perturbation energy'\n\
         plot 'energy.csv' using 1:'total' with linespoints, \\\n\
         \x20    'energy.csv' using 1:'tilde_total' with linespoints\n\
         set output 'field_errors.png'\n\
         set title 'weighted field errors'\n\
         plot 'fields.csv' using 1:'density' with linespoints, \\\n\
         \x20    'fields.csv' using 1:'velocity' with linespoints\n"
    )
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let sim = simulate_run(cfg)?;
    for (name, contents) in &sim.files {
        csv::write(&out.join(name), contents)?;
    }
    for (k, v) in &sim.summary {
        println!("{k:<30} {v:.6e}");
    }
    Ok(())
}

pub fn rates(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let sim = simulate_run(cfg)?;
    let rows = format!("{}{}", correction_fits(cfg)?, fit_rows(&sim.fits));
    csv::write(&out.join("rates.csv"), &format!("{RATE_HEADER}{rows}"))?;
    print!("{rows}");
    Ok(())
}

/// Runs every criterion, in parallel, and returns them in order.
pub fn verify(fault: Option<Fault>) -> Vec<CriterionResult> {
    CRITERIA.par_iter().map(|c| run_criterion(c.0, fault)).collect()
}
