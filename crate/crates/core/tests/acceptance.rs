//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use fiadi::adi::{fadi, fi_adi, FiAdiConfig};
use fiadi::bounds::{bound_disk, eps_rank_bound, mu1, triangular_indices, BoundGeometry, BoundParams};
use fiadi::oracle::{kronecker_solve, sylvester_dense};
use fiadi::poisson::{poisson_direct, poisson_lowrank, PoissonProblem, RhsFunction};
use fiadi::spectra::{elliptic_k, jacobi};
use fiadi::spectra::{mu2, optimal_shifts, zolotarev_disk_bound, zolotarev_interval_bound, SpectralSet};

use fiadi::structured::{
    antidiagonal_approximant, appendix_build, appendix_closed_form, appendix_xt, cauchy, ctilde, ctilde_problem, hadamard_solve, PointSets,
};
use fiadi::suite::{fiadi_suite, normal_problem, SetKind};
use fiadi::svd::{eps_rank, singular_values, spectral_norm};
use fiadi::{CMat, Result, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) -> Outcome {
    let start = Instant::now();
    let mut o = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
    let elapsed = start.elapsed();
    o.detail = format!("{}; {:.2}s", o.detail, elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {}s", o.detail, limit.as_secs());
        }
    }
    o
}

fn cauchy_decay() -> Result<Outcome> {
    let p = PointSets::sample_disks(100, 100, 30.0, 10.0, 1)?;
    let s = singular_values(&cauchy(&p)?)?;
    let mu = mu1(30.0, 10.0);
    // At k > 9 the bound is below rounding, hence the EPS term.
    let worst = (0..100)
        .map(|k| s[k] / s[0] / (mu.powi(-(k as i32)) + f64::EPSILON))
        .fold(0.0, f64::max);
    outcome(worst <= 10.0, format!("max σ_(k+1)/(‖C‖(μ₁^-k + u)) = {worst:.3e}, slack 10"))
}

fn ctilde_sandwich() -> Result<Outcome> {
    let n = 200;
    let p = PointSets::sample_disks(n, n, 30.0, 10.0, 7)?;
    let ct = ctilde(&p)?;
    let s = singular_values(&ct)?;
    let prob = ctilde_problem(&p)?;
    let ts = triangular_indices(n);
    let bound = bound_disk(&BoundParams::new(BoundGeometry::Disk { z0: 30.0, eta: 10.0 }, n), &ts)?;
    let mut bad = Vec::new();
    let mut floored = 0;
    // Computed singular values and errors cannot resolve below O(u ‖C̃‖).
    let floor = 10.0 * f64::EPSILON;
    for (k, (t, b)) in (1..).zip(ts.iter().zip(&bound.entries)) {
        floored += usize::from(b.value < floor);
        let x = antidiagonal_approximant(&prob, k)?;
        let err = spectral_norm(&(x.materialize() - &ct))? / s[0];
        let lower = s[*t] / s[0];
        if x.rank() > *t || lower > err * (1.0 + 1e-10) + 1e-15 || err > b.value.max(floor) {
            bad.push(*t);
        }
    }
    outcome(bad.is_empty(), format!("{} triangular t checked ({floored} with bound below 10u), violations at {bad:?}", ts.len()))
}

fn fadi_interval() -> Result<Outcome> {
    let p = normal_problem(SetKind::Interval, 64, 64, 3, 3)?;
    let x = sylvester_dense(&p.a.to_dense(), &p.b.to_dense(), &p.rhs.materialize())?;
    let nx = spectral_norm(&x)?;
    let mu = mu2(1.0, 100.0);
    let mut worst: f64 = 0.0;
    for k in 1..=12 {
        let xk = fadi(&p, &optimal_shifts(k, &p.a_set, &p.b_set)?)?;
        let err = spectral_norm(&(xk.materialize() - &x))? / nx;
        worst = worst.max(err / (4.0 * mu.powi(-(k as i32))));
    }
    outcome(worst <= 1.0, format!("max ‖X-X_k‖/(4μ₂^-k ‖X‖) = {worst:.3e} over k=1..12"))
}

fn fiadi_contract() -> Result<Outcome> {
    let suite = fiadi_suite(64, 100)?;
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for sp in &suite {
        let p = &sp.problem;
        let x = sylvester_dense(&p.a.to_dense(), &p.b.to_dense(), &p.rhs.materialize())?;
        let nx = spectral_norm(&x)?;
        for eps in [1e-4, 1e-8, 1e-12] {
            let a = fi_adi(p, &FiAdiConfig::new(eps))?;
            let r = spectral_norm(&(a.materialize() - &x))? / (eps * nx);
            worst = worst.max(r);
            if r > 2.0 {
                failed.push(format!("{}@{eps:e}", sp.name));
            }
        }
    }
    outcome(
        failed.is_empty(),
        format!("{} problems × 3 ε, max ‖X-X̃‖/(ε‖X‖) = {worst:.3}, failures {failed:?}", suite.len()),
    )
}

fn appendix_sharpness() -> Result<Outcome> {
    let p = appendix_build(12, 2.0)?;
    let x = sylvester_dense(&p.a, &(-p.a.transpose()), &p.f)?;
    let d = appendix_closed_form(&p);
    let scale = d.iter().cloned().fold(0.0, f64::max);
    let mut off: f64 = 0.0;
    let mut diag_err: f64 = 0.0;
    for i in 0..p.n {
        for j in 0..p.n {
            if i == j {
                diag_err = diag_err.max((x[(i, i)] - C64::new(d[i], 0.0)).norm() / scale);
            } else {
                off = off.max(x[(i, j)].norm() / scale);
            }
        }
    }
    let mut s = d.clone();
    s.sort_by(|a, b| b.total_cmp(a));
    let xd = CMat::from_diagonal(&nalgebra::DVector::from_iterator(p.n, d.iter().map(|&v| C64::new(v, 0.0))));
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (k, t) in (1..=12).zip(triangular_indices(79)) {
        let xt = appendix_xt(&p, k)?;
        let ratio = spectral_norm(&(&xd - xt.materialize()))? / s[t];
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let pass = off <= 1e-11 && diag_err <= 1e-11 && lo >= 1.0 - 1e-12 && hi <= 4.0;
    outcome(pass, format!("offdiag {off:.1e}, closed-form {diag_err:.1e}, ratio ∈ [{lo:.4}, {hi:.4}] for t ≤ 78"))
}

fn hadamard_closed_form() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let kind = if seed % 2 == 0 { SetKind::Disk } else { SetKind::Interval };
        let p = normal_problem(kind, 32, 32, 4, 500 + seed)?;
        let h = hadamard_solve(&p)?;
        let k = kronecker_solve(&p.a.to_dense(), &p.b.to_dense(), &p.rhs.materialize())?;
        worst = worst.max((&h - &k).norm() / k.norm());
    }
    outcome(worst <= 1e-11, format!("max relative difference {worst:.2e} over 10 problems"))
}

fn shift_quality() -> Result<Outcome> {
    let e = SpectralSet::disk(C64::new(30.0, 0.0), 10.0)?;
    let g = e.negate();
    let (ia, ib) = (SpectralSet::interval(-100.0, -1.0)?, SpectralSet::interval(1.0, 100.0)?);
    let mut disk_dev: f64 = 0.0;
    let mut interval_ratio: f64 = 0.0;
    for k in 1..=10 {
        let z = zolotarev_disk_bound(k, &e)?;
        disk_dev = disk_dev.max((optimal_shifts(k, &e, &g)?.sampled_ratio(&e, &g, 1000) / z - 1.0).abs());
        let zi = zolotarev_interval_bound(k, 1.0, 100.0)?;
        interval_ratio = interval_ratio.max(optimal_shifts(k, &ia, &ib)?.sampled_ratio(&ia, &ib, 1000) / zi);
    }
    outcome(
        disk_dev <= 0.01 && interval_ratio <= 1.0,
        format!("disk max |ratio/μ₁^-k - 1| = {disk_dev:.2e}, interval max ratio/(4μ₂^-k) = {interval_ratio:.3}"),
    )
}

fn poisson_accuracy() -> Result<Outcome> {
    let n = 256;
    let func = RhsFunction::Smooth10;
    let rhs = func.factored(n, 1e-14)?;
    let p = PoissonProblem::factored(rhs.clone())?;
    let x = poisson_direct(&p)?;
    let a = poisson_lowrank(&p, 1e-10)?;
    let err = spectral_norm(&(a.materialize() - &x))? / spectral_norm(&x)?;
    outcome(err <= 2e-10, format!("{} rhs rank {}, solution rank {}, relative error {err:.2e}", func.name(), rhs.rank(), a.rank()))
}

fn poisson_scaling() -> Result<Outcome> {
    let mut times = Vec::new();
    for n in [512, 1024] {
        let p = PoissonProblem::factored(RhsFunction::Smooth10.factored(n, 1e-14)?)?;
        let start = Instant::now();
        poisson_lowrank(&p, 1e-10)?;
        times.push(start.elapsed().as_secs_f64());
    }
    let ratio = times[1] / times[0];
    outcome(ratio <= 5.0, format!("t(1024)/t(512) = {ratio:.2} ({:.3}s, {:.3}s)", times[0], times[1]))
}

fn eps_rank_check() -> Result<Outcome> {
    let n = 200;
    let p = PointSets::sample_disks(n, n, 30.0, 10.0, 7)?;
    let s = singular_values(&ctilde(&p)?)?;
    let mut rows = Vec::new();
    let mut pass = true;
    for eps in [1e-4, 1e-8, 1e-12] {
        let (r, b) = (eps_rank(&s, eps)?, eps_rank_bound(eps, n, 30.0, 10.0)?);
        pass &= r <= b;
        rows.push(format!("ε={eps:e}: {r} ≤ {b}"));
    }
    outcome(pass, rows.join(", "))
}

fn elliptic_accuracy() -> Result<Outcome> {
    // Γ(1/4)
    let gamma_quarter = 3.625_609_908_221_908_3_f64;
    let exact = gamma_quarter * gamma_quarter / (4.0 * PI.sqrt());
    let k_err = (elliptic_k(FRAC_1_SQRT_2)? - exact).abs() / exact;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let kappa = 0.05 + 0.0994 * j as f64;
            let u = -4.0 + 0.8 * i as f64 + 0.013 * j as f64;
            let f = jacobi(u, kappa)?;
            let kp2 = 1.0 - kappa * kappa;
            worst = worst
                .max((f.dn * f.dn + kappa * kappa * f.sn * f.sn - 1.0).abs())
                .max((f.dn * f.dn - kappa * kappa * f.cn * f.cn - kp2).abs())
                .max((f.sn * f.sn + f.cn * f.cn - 1.0).abs());
        }
        let kappa = 0.1 * (i + 1) as f64 - 0.05;
        let kk = elliptic_k(kappa)?;
        worst = worst.max((jacobi(kk, kappa)?.dn - (1.0 - kappa * kappa).sqrt()).abs());
    }
    outcome(k_err <= 1e-12 && worst <= 1e-11, format!("K(1/√2) relative error {k_err:.1e}, max identity residual {worst:.1e}"))
}

fn main() {
    let s = Duration::from_secs;
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("1 cauchy decay", Box::new(|| timed(Some(s(5)), cauchy_decay))),
        ("2 ctilde sandwich", Box::new(|| timed(Some(s(30)), ctilde_sandwich))),
        ("3 fadi interval convergence", Box::new(|| timed(Some(s(10)), fadi_interval))),
        ("4 fi-adi error contract", Box::new(|| timed(None, fiadi_contract))),
        ("5 circulant sharpness", Box::new(|| timed(Some(s(20)), appendix_sharpness))),
        ("6 hadamard closed form", Box::new(|| timed(None, hadamard_closed_form))),
        ("7 zolotarev shift quality", Box::new(|| timed(None, shift_quality))),
        ("8 poisson correctness", Box::new(|| timed(None, poisson_accuracy))),
        ("9 eps-rank bound", Box::new(|| timed(None, eps_rank_check))),
        ("10 elliptic accuracy", Box::new(|| timed(None, elliptic_accuracy))),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let o = run();
        failures += usize::from(!o.pass);
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    // Informational only: wall-clock ratios are machine dependent.
    let o = timed(None, poisson_scaling);
    println!("{} 8 poisson scaling (informational): {}", if o.pass { "PASS" } else { "WARN" }, o.detail);
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
