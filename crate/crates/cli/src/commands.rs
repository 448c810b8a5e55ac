//! The four subcommands: bandedges, deform, verify, sweep.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::RunConfig;
use crate::CliError;
use lamebic::{
    band_edge_states, hill_discriminant_scan, lame_chain, lame_potential,
    normalized_shape_deviation, verify_chain, DeformationChain, Error, SampledFunction,
    StateSample,
};

/// 17 significant digits, enough to reproduce the f64 bit pattern; all file
/// output goes through this so identical configs give byte-identical files.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn header_common(out: &mut String, cfg: &RunConfig, command: &str) {
    let _ = writeln!(out, "# lamebic {command}");
    let _ = writeln!(out, "# j = {}", cfg.j);
    let _ = writeln!(out, "# m = {}", fmt17(cfg.m));
    let _ = writeln!(out, "# lambda = {}", fmt17(cfg.lambda));
    let _ = writeln!(out, "# lambda1 = {}", fmt17(cfg.lambda1));
    let _ = writeln!(out, "# x_max = {}", fmt17(cfg.x_max));
    let _ = writeln!(out, "# n = {}", cfg.n);
    let _ = writeln!(out, "# h = {}", fmt17(cfg.grid().spacing()));
}

/// Two- or three-column CSV with the shared metadata header.
fn write_series(
    cfg: &RunConfig,
    command: &str,
    name: &str,
    columns: &str,
    series: &SampledFunction,
    undeformed: Option<&SampledFunction>,
) -> Result<(), CliError> {
    let grid = series.grid;
    let mut out = String::new();
    header_common(&mut out, cfg, command);
    let _ = writeln!(out, "# columns: {columns}");
    for i in 0..grid.len() {
        match undeformed {
            Some(u) => {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt17(grid.point(i)),
                    fmt17(series.values[i]),
                    fmt17(u.values[i])
                );
            }
            None => {
                let _ = writeln!(out, "{},{}", fmt17(grid.point(i)), fmt17(series.values[i]));
            }
        }
    }
    write_file(&cfg.out, name, &out)
}

pub fn cmd_bandedges(cfg: &RunConfig) -> Result<i32, CliError> {
    let lame = cfg.lame();
    let grid = cfg.grid();
    let states = band_edge_states(&lame);

    println!("band-edge energies (j = {}, m = {}):", cfg.j, fmt17(cfg.m));
    for s in &states {
        println!(
            "E{} = {}  [{}]",
            s.index,
            fmt17(s.energy),
            if s.vanishes_at_origin {
                "psi(0) = 0, half-line seed"
            } else {
                "psi(0) != 0"
            }
        );
    }

    let mut out = String::new();
    header_common(&mut out, cfg, "bandedges");
    for s in &states {
        let _ = writeln!(out, "# E{} = {}", s.index, fmt17(s.energy));
    }
    let labels: Vec<String> = states.iter().map(|s| s.label.clone()).collect();
    let _ = writeln!(out, "# columns: x,V,{}", labels.join(","));
    for i in 0..grid.len() {
        let x = grid.point(i);
        let _ = write!(out, "{},{}", fmt17(x), fmt17(lame_potential(&lame, x)));
        for s in &states {
            let _ = write!(out, ",{}", fmt17(s.psi(x)));
        }
        out.push('\n');
    }
    write_file(&cfg.out, "bandedges.csv", &out)?;
    println!("wrote {}", cfg.out.join("bandedges.csv").display());
    Ok(0)
}

fn build_chain(cfg: &RunConfig, steps: u32) -> Result<DeformationChain, CliError> {
    let lambda1 = if steps == 2 { Some(cfg.lambda1) } else { None };
    lame_chain(&cfg.lame(), cfg.grid(), cfg.lambda, lambda1).map_err(CliError::Compute)
}

pub fn cmd_deform(cfg: &RunConfig, steps: u32) -> Result<i32, CliError> {
    if !(steps == 1 || steps == 2) {
        return Err(CliError::Config(format!("steps must be 1 or 2, got {steps}")));
    }
    let chain = build_chain(cfg, steps)?;
    let v = &chain.base_potential;
    let first = &chain.steps[0];

    write_series(cfg, "deform", "I0.csv", "x,I0", &first.running_integral, None)?;
    write_series(cfg, "deform", "V_tilde.csv", "x,V_tilde,V", &first.v_out, Some(v))?;
    write_series(
        cfg,
        "deform",
        "psi2_tilde.csv",
        "x,psi2_tilde,psi2",
        &first.state_bound.psi,
        Some(&first.seed.psi),
    )?;
    write_series(
        cfg,
        "deform",
        "psi3_tilde.csv",
        "x,psi3_tilde,psi3",
        &first.state_partner_out.psi,
        Some(&first.partner.psi),
    )?;
    let mut written = 4;

    if steps == 2 {
        let second = &chain.steps[1];
        write_series(cfg, "deform", "I1.csv", "x,I1", &second.running_integral, None)?;
        write_series(
            cfg,
            "deform",
            "V_tildetilde.csv",
            "x,V_tildetilde,V",
            &second.v_out,
            Some(v),
        )?;
        // the second step seeds with psi3~, so its bound output is psi3~~
        write_series(
            cfg,
            "deform",
            "psi3_tt.csv",
            "x,psi3_tt,psi3",
            &second.state_bound.psi,
            Some(&first.partner.psi),
        )?;
        write_series(
            cfg,
            "deform",
            "psi2_tt.csv",
            "x,psi2_tt,psi2",
            &second.state_partner_out.psi,
            Some(&first.seed.psi),
        )?;
        written += 4;
    }
    println!("wrote {written} files to {}", cfg.out.display());
    Ok(0)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<i32, CliError> {
    let lame = cfg.lame();
    let period = lame.period();
    let chain = build_chain(cfg, 2)?;

    let mut report = String::new();
    let kv = |out: &mut String, k: &str, v: &str| {
        let _ = writeln!(out, "{k}={v}");
    };
    kv(&mut report, "command", "verify");
    kv(&mut report, "j", &cfg.j.to_string());
    kv(&mut report, "m", &fmt17(cfg.m));
    kv(&mut report, "lambda", &fmt17(cfg.lambda));
    kv(&mut report, "lambda1", &fmt17(cfg.lambda1));
    kv(&mut report, "x_max", &fmt17(cfg.x_max));
    kv(&mut report, "n", &cfg.n.to_string());
    kv(&mut report, "period", &fmt17(period));

    let spectral = match verify_chain(&chain, period) {
        Ok(r) => r,
        Err(e @ Error::DomainTooShort { .. }) => {
            println!("warning[spectral]: {e}");
            println!("verify: INCONCLUSIVE");
            kv(&mut report, "inconclusive", "domain_too_short");
            kv(&mut report, "pass", "false");
            write_file(&cfg.out, "report.txt", &report)?;
            return Ok(1);
        }
        Err(e) => return Err(CliError::Compute(e)),
    };

    for (i, s) in spectral.states.iter().enumerate() {
        let p = format!("state.{i}");
        kv(&mut report, &format!("{p}.step"), &s.step.to_string());
        kv(&mut report, &format!("{p}.label"), &s.label);
        kv(&mut report, &format!("{p}.energy"), &fmt17(s.energy));
        kv(
            &mut report,
            &format!("{p}.residual_analytic"),
            &fmt17(s.residual_analytic),
        );
        kv(&mut report, &format!("{p}.residual_fd"), &fmt17(s.residual_fd));
        kv(&mut report, &format!("{p}.tail_ratio"), &fmt17(s.tail_ratio));
        kv(
            &mut report,
            &format!("{p}.classification"),
            &s.classification.to_string(),
        );
        kv(
            &mut report,
            &format!("{p}.expected"),
            if s.expect_bound { "bound" } else { "extended" },
        );
        println!(
            "{} (step {}, E = {}): residual_analytic = {:.3e}, residual_fd = {:.3e}, \
             tail_ratio = {:.3e}, {}",
            s.label, s.step, s.energy, s.residual_analytic, s.residual_fd, s.tail_ratio,
            s.classification
        );
    }

    // independent band-structure check from the potential alone
    let energies: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
    let scan = hill_discriminant_scan(|x| lame_potential(&lame, x), period, &energies)
        .map_err(CliError::Compute)?;
    let analytic = band_edge_states(&lame);
    kv(&mut report, "scan.edge_count", &scan.edges.len().to_string());
    let mut edges_ok = scan.edges.len() == analytic.len();
    for (i, s) in analytic.iter().enumerate() {
        let found = scan
            .edges
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - s.energy).abs().partial_cmp(&(b - s.energy).abs()).unwrap()
            })
            .unwrap_or(f64::NAN);
        let delta = (found - s.energy).abs();
        edges_ok &= delta < 1e-6;
        kv(&mut report, &format!("scan.edge.{i}.analytic"), &fmt17(s.energy));
        kv(&mut report, &format!("scan.edge.{i}.found"), &fmt17(found));
        kv(&mut report, &format!("scan.edge.{i}.delta"), &fmt17(delta));
        println!(
            "band edge E{}: analytic = {}, scan = {}, delta = {:.3e}",
            i,
            fmt17(s.energy),
            fmt17(found),
            delta
        );
    }
    kv(
        &mut report,
        "scan.edges_match_analytic",
        if edges_ok { "true" } else { "false" },
    );
    kv(&mut report, "residual_limit", &fmt17(spectral.residual_limit));

    let pass = spectral.pass && edges_ok;
    kv(&mut report, "pass", if pass { "true" } else { "false" });
    write_file(&cfg.out, "report.txt", &report)?;
    println!("wrote {}", cfg.out.join("report.txt").display());
    if pass {
        println!("verify: PASS");
        Ok(0)
    } else {
        println!("verify: FAIL");
        Ok(1)
    }
}

pub fn cmd_sweep(cfg: &RunConfig, lambdas: &[f64]) -> Result<i32, CliError> {
    if lambdas.is_empty() {
        return Err(CliError::Config("sweep needs at least one lambda".into()));
    }
    if let Some(&bad) = lambdas.iter().find(|&&l| !l.is_finite() || l <= 0.0) {
        return Err(CliError::Config(format!(
            "all sweep lambda values must be positive, got {bad}"
        )));
    }
    let mut lambdas = lambdas.to_vec();
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lambdas.dedup();

    let lame = cfg.lame();
    let grid = cfg.grid();
    // comparison window: [0, 4K(m)], both deformations and originals are
    // normalized to unit sup norm there (the potential by sup|V|)
    let window = ((2.0 * lame.period()) / grid.spacing()).floor() as usize;
    let states = band_edge_states(&lame);
    let seeds = lamebic::half_line_seeds(&states).map_err(CliError::Compute)?;
    if seeds.len() < 2 {
        return Err(CliError::Compute(Error::NeedTwoSeeds(seeds.len())));
    }
    let psi2 = StateSample::from_band_edge(&seeds[0], grid);
    let psi3 = StateSample::from_band_edge(&seeds[1], grid);

    let mut out = String::new();
    header_common(&mut out, cfg, "sweep");
    let _ = writeln!(out, "# window: [0, 4K] = [0, {}]", fmt17(2.0 * lame.period()));
    let _ = writeln!(out, "# columns: lambda,max_dev_potential,max_dev_psi2,max_dev_psi3");
    for &lambda in &lambdas {
        let chain =
            lame_chain(&lame, grid, lambda, Some(lambda)).map_err(CliError::Compute)?;
        let v = &chain.base_potential;
        let v_final = chain.final_potential();
        let v_sup = v.values[..=window]
            .iter()
            .fold(0.0f64, |acc, y| acc.max(y.abs()));
        let dev_v = (0..=window)
            .map(|i| (v_final.values[i] - v.values[i]).abs())
            .fold(0.0, f64::max)
            / v_sup;
        let (bound, partner_out) = chain.final_states();
        // the second step's bound output is psi3~~; the partner is psi2~~
        let dev_psi3 = normalized_shape_deviation(&bound.psi, &psi3.psi, window)
            .map_err(CliError::Compute)?;
        let dev_psi2 = normalized_shape_deviation(&partner_out.psi, &psi2.psi, window)
            .map_err(CliError::Compute)?;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt17(lambda),
            fmt17(dev_v),
            fmt17(dev_psi2),
            fmt17(dev_psi3)
        );
        println!(
            "lambda = {lambda}: dev_V = {dev_v:.6}, dev_psi2 = {dev_psi2:.6}, dev_psi3 = {dev_psi3:.6}"
        );
    }
    write_file(&cfg.out, "sweep.csv", &out)?;
    println!("wrote {}", cfg.out.join("sweep.csv").display());
    Ok(0)
}
