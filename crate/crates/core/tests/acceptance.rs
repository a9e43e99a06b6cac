//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit status
//! if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use eit::dof::{los_channel_dof, pswf_modes, LosOptions};
use eit::geometry::{uniform_grid, Region};
use eit::kernels::WaveParams;
use eit::mutual_info::{
    eit_mi, mimo_equivalent, mimo_mi, noise_divergence_experiment, ScenarioConfig,
};
use eit::nearfield::{beam_correlation, farfield_steering, ldma_sweep, UniformLinearArray};
use eit::operators::{eig_hermitian, fredholm_logdet, DiscretizedOperator};
use eit::planewave::{
    empirical_correlation, helmholtz_residual, isotropic_correlation, sample_planewave_realization,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(String, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_eit"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "eit {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok((
        String::from_utf8_lossy(&out.stdout).trim().to_string(),
        elapsed,
    ))
}

fn csv_column(path: &Path, col: usize) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    text.lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .nth(col)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| format!("bad CSV line `{l}`"))
        })
        .collect()
}

fn pswf_dof(dir: &Path) -> Outcome {
    let (summary, t) = run_cli(dir, &["pswf", "--T", "2", "--W", "2", "--grid", "512"])?;
    let values = csv_column(&dir.join("pswf.csv"), 1)?;
    let count = values.iter().filter(|&&v| v >= 0.5 * values[0]).count();
    ensure(count == 8 && summary.starts_with("dof=8"), || {
        format!("count {count}, summary `{summary}`")
    })?;
    let dense = pswf_modes(2.0, 2.0, 2048)
        .map_err(|e| e.to_string())?
        .values;
    ensure(values[0] > 0.999 && dense[0] > 0.999, || {
        format!("λ0 = {} (dense {})", values[0], dense[0])
    })?;
    ensure(values[12] < 0.01 && dense[12] < 0.01, || {
        format!("λ12 = {} (dense {})", values[12], dense[12])
    })?;
    let gap = values
        .iter()
        .zip(&dense)
        .take(13)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(gap < 1e-4, || format!("512 vs 2048 grid differ by {gap:e}"))?;
    ensure(t < Duration::from_secs(5), || format!("runtime {t:?}"))?;
    Ok(format!(
        "dof=8, λ0={:.6}, λ12={:.2e}, dense-grid gap {gap:.1e}, {:.2} s",
        values[0],
        values[12],
        t.as_secs_f64()
    ))
}

fn mi_convergence(dir: &Path) -> Outcome {
    let (_, t) = run_cli(dir, &["mi-converge"])?;
    let mi = csv_column(&dir.join("mi-converge.csv"), 1)?;
    let reference = csv_column(&dir.join("mi-converge.csv"), 2)?[0];
    let last = *mi.last().ok_or("empty curve")?;
    let gap = (last - reference).abs() / reference;
    ensure(gap <= 0.01, || format!("final relative gap {gap:e}"))?;
    let worst = mi
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(worst <= 1e-3, || {
        format!("curve drops by {worst:e} relative")
    })?;
    ensure(t < Duration::from_secs(60), || format!("runtime {t:?}"))?;
    Ok(format!(
        "final {last:.6} vs reference {reference:.6} bits (gap {gap:.1e}), largest relative drop {:.1e}, {:.2} s",
        worst.max(0.0),
        t.as_secs_f64()
    ))
}

fn noise_divergence() -> Outcome {
    let cfg = ScenarioConfig::default();
    let d = noise_divergence_experiment(&cfg).map_err(|e| e.to_string())?;
    let counts = &d.white.sample_counts;
    let white = &d.white.mi_values;
    let corr = &d.correlated.mi_values;
    let sc = cfg.build().map_err(|e| e.to_string())?;
    let half = eit::geometry::halfwavelength_count(&sc.rx_region, cfg.wavelength)
        .map_err(|e| e.to_string())?;
    let mut min_step = f64::INFINITY;
    for i in 1..counts.len() {
        let step = white[i] - white[i - 1];
        ensure(step > 0.0, || {
            format!("white curve not increasing at N={}", counts[i])
        })?;
        if counts[i - 1] >= half {
            min_step = min_step.min(step);
        }
    }
    ensure(min_step > 0.1, || {
        format!("white doubling gain {min_step} bits")
    })?;
    let n = corr.len();
    let change = (corr[n - 1] - corr[n - 2]).abs() / corr[n - 2];
    ensure(change <= 0.01, || {
        format!("correlated final doubling changes MI by {change:e}")
    })?;
    Ok(format!(
        "white {:.3} -> {:.3} bits (min gain {min_step:.3} per doubling past N={half}), correlated final change {change:.1e}",
        white[0],
        white[n - 1]
    ))
}

fn los_area_product() -> Outcome {
    let wave = WaveParams::new(1.0).map_err(|e| e.to_string())?;
    let opts = LosOptions::default();
    let square = |l: f64| Region::rectangle(l, l).map_err(|e| e.to_string());
    let base = los_channel_dof(&square(4.0)?, &square(4.0)?, 8.0, &wave, &opts)
        .map_err(|e| e.to_string())?;
    let p = base.prediction.unwrap_or(f64::NAN);
    ensure((base.count as f64 - p).abs() <= 1.0, || {
        format!("count {} vs prediction {p}", base.count)
    })?;
    let side = 4.0 * 2f64.sqrt();
    let big = los_channel_dof(&square(side)?, &square(side)?, 8.0, &wave, &opts)
        .map_err(|e| e.to_string())?;
    ensure((big.count as f64 - 4.0 * p).abs() <= 1.0, || {
        format!("doubled-area count {} vs {}", big.count, 4.0 * p)
    })?;
    Ok(format!(
        "L=4λ: {} (prediction {p:.0}); doubled areas: {} (target {:.0})",
        base.count,
        big.count,
        4.0 * p
    ))
}

fn cross_path() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let (model, rx) = random_segment_model(seed, 12, 8 + (seed as usize % 17));
        let direct = eit_mi(&model, &rx).map_err(|e| e.to_string())?.bits;
        let m = mimo_equivalent(&model, &rx).map_err(|e| e.to_string())?;
        let via = mimo_mi(m.h.as_ref(), m.rx.as_ref(), m.rn.as_ref()).map_err(|e| e.to_string())?;
        worst = worst.max((direct - via).abs());
    }
    ensure(worst <= 1e-9, || format!("paths differ by {worst:e} bits"))?;
    Ok(format!("100 seeds, max difference {worst:.1e} bits"))
}

fn waterfill_suite() -> Outcome {
    let mut r = rng(2024);
    for i in 0..1000 {
        let n = r.random_range(1..16);
        let mut gains: Vec<f64> = (0..n)
            .map(|_| {
                if r.random::<f64>() < 0.15 {
                    0.0
                } else {
                    3.0 * r.random::<f64>()
                }
            })
            .collect();
        if gains.iter().all(|&g| g == 0.0) {
            gains[0] = 1.0;
        }
        let noise: Vec<f64> = (0..n).map(|_| 0.01 + 2.0 * r.random::<f64>()).collect();
        let power = 10f64.powf(r.random_range(-3.0..3.0));
        check_waterfill(&gains, &noise, power).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok("1000 instances: budget, water level and bisection capacity within 1e-9".into())
}

fn planewave_grf() -> Outcome {
    let k0 = 2.0 * std::f64::consts::PI;
    let mut worst = 0.0f64;
    for (i, d) in [0.1, 0.25, 0.4, 0.7, 1.3].into_iter().enumerate() {
        let c = empirical_correlation(&[0.0; 3], &[d, 0.0, 0.0], k0, 32, 10_000, i as u64)
            .map_err(|e| e.to_string())?;
        worst = worst.max((c - eit::C64::new(isotropic_correlation(k0, d), 0.0)).norm());
    }
    ensure(worst <= 0.05, || format!("autocorrelation error {worst}"))?;
    let spacings: [f64; 3] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];
    let mut res = Vec::new();
    // One fixed wavelength-sized cube, so every spacing samples the same field.
    let cube = Region::cuboid(1.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    for &h in &spacings {
        let n = (1.0 / h).round() as usize;
        let grid = uniform_grid(&cube, &[n, n, n]).map_err(|e| e.to_string())?;
        let f = sample_planewave_realization(&grid, k0, 64, 1, 0).map_err(|e| e.to_string())?;
        res.push(helmholtz_residual(&f, h).map_err(|e| e.to_string())?);
    }
    let ratios: Vec<f64> = res.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(ratios.iter().all(|q| (q - 4.0).abs() <= 0.5), || {
        format!("ratios {ratios:?}")
    })?;
    Ok(format!(
        "max autocorrelation error {worst:.3}, residual ratios {:.3}, {:.3}",
        ratios[0], ratios[1]
    ))
}

fn ldma() -> Outcome {
    let lambda = 0.01;
    let k = 2.0 * std::f64::consts::PI / lambda;
    let array = UniformLinearArray::half_wavelength(1024, lambda).map_err(|e| e.to_string())?;
    // The far-field model has no distance input: users at 5 m and 20 m on
    // the same bearing share one vector.
    let ff = farfield_steering(&array, k, 0.3).map_err(|e| e.to_string())?;
    let ff_corr = beam_correlation(&ff, &ff.clone()).map_err(|e| e.to_string())?;
    ensure((ff_corr - 1.0).abs() <= 1e-12, || {
        format!("far-field correlation {ff_corr}")
    })?;
    let pts = ldma_sweep(&[64, 1024], k, 0.0, 5.0, 20.0).map_err(|e| e.to_string())?;
    ensure(pts[1].correlation < pts[0].correlation, || {
        format!(
            "N=1024 {} not below N=64 {}",
            pts[1].correlation, pts[0].correlation
        )
    })?;
    ensure(
        pts.iter()
            .all(|p| (p.farfield_correlation - 1.0).abs() <= 1e-12),
        || "far-field column".into(),
    )?;
    let same = ldma_sweep(&[1, 64, 1024], k, 0.0, 5.0, 5.0).map_err(|e| e.to_string())?;
    ensure(
        same.iter().all(|p| (p.correlation - 1.0).abs() <= 1e-12),
        || "r1 = r2 not 1".into(),
    )?;
    Ok(format!(
        "near-field correlation N=64: {:.4}, N=1024: {:.4}; far-field and r1=r2 give 1",
        pts[0].correlation, pts[1].correlation
    ))
}

fn operator_algebra() -> Outcome {
    let mut r = rng(99);
    let mut worst_rec = 0.0f64;
    for n in [4, 16, 64, 128] {
        let a = random_hermitian(&mut r, n);
        let s = eig_hermitian(&DiscretizedOperator::from_matrix(a.clone()))
            .map_err(|e| e.to_string())?;
        let rec = eit::CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|m| s.left_modes[(i, m)] * s.values[m] * s.left_modes[(j, m)].conj())
                .sum::<eit::C64>()
        });
        worst_rec = worst_rec.max(frobenius(&(rec - &a)) / frobenius(&a));
    }
    ensure(worst_rec <= 1e-10, || {
        format!("reconstruction {worst_rec:e}")
    })?;

    let mut worst_scale = 0.0f64;
    for _ in 0..20 {
        let te = random_psd(&mut r, 12, 12, 0.0);
        let tn = random_psd(&mut r, 12, 12, 0.5);
        let alpha = 10f64.powf(r.random_range(-3.0..3.0));
        let a = fredholm_logdet(
            &DiscretizedOperator::from_matrix(te.clone()),
            &DiscretizedOperator::from_matrix(tn.clone()),
        )
        .map_err(|e| e.to_string())?;
        let b = fredholm_logdet(
            &DiscretizedOperator::from_matrix(te).scaled(alpha),
            &DiscretizedOperator::from_matrix(tn).scaled(alpha),
        )
        .map_err(|e| e.to_string())?;
        worst_scale = worst_scale.max((a - b).abs());
    }
    ensure(worst_scale <= 1e-10, || {
        format!("scale invariance {worst_scale:e} bits")
    })?;

    let n = 10;
    let tn = DiscretizedOperator::from_matrix(random_psd(&mut r, n, n, 0.3));
    let mut te = random_psd(&mut r, n, 2, 0.0);
    let mut last = fredholm_logdet(&DiscretizedOperator::from_matrix(te.clone()), &tn)
        .map_err(|e| e.to_string())?;
    for step in 0..100 {
        te = hermitize(
            &(te + random_psd(&mut r, n, 1, 0.0) * faer::Scale(eit::C64::new(0.05, 0.0))),
        );
        let next = fredholm_logdet(&DiscretizedOperator::from_matrix(te.clone()), &tn)
            .map_err(|e| e.to_string())?;
        ensure(next >= last - 1e-12, || {
            format!("decrease at increment {step}: {next} < {last}")
        })?;
        last = next;
    }
    Ok(format!(
        "reconstruction {worst_rec:.1e}, scale invariance {worst_scale:.1e} bits, 100 PSD increments monotone"
    ))
}

fn determinism(dir: &Path) -> Outcome {
    for e in eit::cli::Experiment::ALL {
        let name = e.name();
        let mut files = Vec::new();
        for run in 0..2 {
            let out = dir.join(format!("{name}-{run}.csv"));
            run_cli(dir, &[name, "--out", out.to_str().ok_or("path")?])?;
            files.push(std::fs::read(&out).map_err(|err| err.to_string())?);
        }
        ensure(files[0] == files[1], || {
            format!("{name} output differs between runs")
        })?;
    }
    Ok("all 8 subcommands byte-identical across repeated runs".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let dir = dir.path();
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("PSWF functional DoF", Box::new(|| pswf_dof(dir))),
        (
            "MI convergence to the continuous aperture",
            Box::new(|| mi_convergence(dir)),
        ),
        (
            "white vs correlated noise divergence",
            Box::new(noise_divergence),
        ),
        ("LoS area-product DoF", Box::new(los_area_product)),
        (
            "continuous vs discrete MI cross-path identity",
            Box::new(cross_path),
        ),
        ("water-filling KKT suite", Box::new(waterfill_suite)),
        ("plane-wave random field", Box::new(planewave_grf)),
        ("near-field distance orthogonality", Box::new(ldma)),
        ("operator algebra", Box::new(operator_algebra)),
        ("CLI determinism", Box::new(|| determinism(dir))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
