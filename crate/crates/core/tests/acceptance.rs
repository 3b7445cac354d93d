//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.
//!
//! Run with `cargo test --release --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use affine_halfline::analytic::{
    landau_integral, normalization_constant, AnalyticEigenstate, Branch,
};
use affine_halfline::eigensolve::{
    build_hamiltonian, halving_ladder, model_grid, refine_spectrum, solve_spectrum, sweep_b,
};
use affine_halfline::model::{HalfLineGrid, PhysicalParams, SpikedPotential, Wavefunction};
use affine_halfline::output::csv_data_body;
use affine_halfline::specfun::bessel_j1_zero;
use affine_halfline::verify::{
    closure_bump, closure_check, commutator_report, identity_deviation, lemma_report,
    orthonormality_matrix, CLOSURE_BUMP_ID, CLOSURE_WINDOW,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn unit() -> PhysicalParams {
    PhysicalParams::default()
}

fn max_rel(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    pairs
        .into_iter()
        .map(|(got, want)| ((got - want) / want).abs())
        .fold(0.0, f64::max)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn half_ho_spectrum() -> Outcome {
    let p = unit();
    let pot = SpikedPotential::half_oscillator(&p);
    let exact: Vec<f64> = (0..5).map(|n| 2.0 * (n as f64 + 1.0)).collect();

    let (single, elapsed) = timed(|| {
        let grid = model_grid(&pot, 12.0, 8000)?;
        solve_spectrum(&build_hamiltonian(&pot, &grid)?, 5, false)
    });
    let single = single.map_err(|e| e.to_string())?;
    let coarse = max_rel(
        single
            .eigenvalues
            .iter()
            .map(|&e| p.to_physical_energy(e))
            .zip(exact.iter().copied()),
    );

    let ladder = halving_ladder(HalfLineGrid::new(12.0, 8000).unwrap(), 3);
    let refined = refine_spectrum(&pot, 5, &ladder).map_err(|e| e.to_string())?;
    let extrapolated = max_rel(
        refined
            .extrapolated
            .iter()
            .map(|&e| p.to_physical_energy(e))
            .zip(exact),
    );

    verdict(
        coarse < 1e-3 && extrapolated < 1e-6 && elapsed < Duration::from_secs(10),
        format!("max rel err {coarse:.2e} (< 1e-3), Richardson {extrapolated:.2e} (< 1e-6), {elapsed:.2?} (< 10 s)"),
    )
}

fn free_particle() -> Outcome {
    let p = unit();
    let pot = SpikedPotential::free_affine();
    let (spec, elapsed) = timed(|| {
        let grid = model_grid(&pot, 1.0, 8000)?;
        solve_spectrum(&build_hamiltonian(&pot, &grid)?, 5, false)
    });
    let spec = spec.map_err(|e| e.to_string())?;
    let mut pairs = Vec::new();
    for (m, &eps) in spec.eigenvalues.iter().enumerate() {
        let j = bessel_j1_zero(m as u32 + 1).map_err(|e| e.to_string())?;
        // ħ²(j_m/X_max)²/2m with ħ = m = 1, X_max = 1
        pairs.push((p.to_physical_energy(eps), j * j / 2.0));
    }
    let err = max_rel(pairs);
    verdict(
        err < 1e-3 && elapsed < Duration::from_secs(10),
        format!("max rel err {err:.2e} (< 1e-3), {elapsed:.2?} (< 10 s)"),
    )
}

fn lemma() -> Outcome {
    let (report, elapsed) = timed(|| lemma_report(10, 2.0, 1.0, 128));
    let report = report.map_err(|e| e.to_string())?;
    // γ = 2, r = 1: the diagonal collapses to n!·1/(2(n+1)!) = 1/(2(n+1))
    let mut closed = 0.0_f64;
    for n in 0..=10u32 {
        for m in 0..=10u32 {
            let want = if n == m { 0.5 / (n as f64 + 1.0) } else { 0.0 };
            let got = landau_integral(n, m, 2.0, 1.0).map_err(|e| e.to_string())?;
            closed = closed.max((got - want).abs());
        }
    }
    let ok = report.entries.len() == 121 && report.max_abs_diff < 1e-10 && closed < 1e-15;
    verdict(
        ok && elapsed < Duration::from_secs(1),
        format!(
            "max |closed − quadrature| {:.2e} (< 1e-10), closed form vs 1/(2(n+1)) {closed:.1e}, {elapsed:.2?} (< 1 s)",
            report.max_abs_diff
        ),
    )
}

fn constants() -> Outcome {
    let mut worst = 0.0_f64;
    for params in [unit(), PhysicalParams::new(2.0, 1.5, 0.7).unwrap()] {
        for n in 0..=10u32 {
            let root = (2.0 * (n as f64 + 1.0)).sqrt();
            let a = normalization_constant(n, Branch::FirstCondition, &params)
                .map_err(|e| e.to_string())?;
            let b = normalization_constant(n, Branch::SecondCondition, &params)
                .map_err(|e| e.to_string())?;
            let lambda = params.mass() * params.omega() / params.hbar();
            worst = worst.max(((a - lambda * root) / (lambda * root)).abs());
            worst = worst.max(((b - root) / root).abs());
        }
    }
    verdict(worst < 1e-12, format!("max rel diff {worst:.2e} (< 1e-12)"))
}

fn branches() -> Outcome {
    let mut worst = 0.0_f64;
    for (p, n) in [unit(), PhysicalParams::new(2.0, 1.5, 0.7).unwrap()]
        .into_iter()
        .flat_map(|p| (0..=10u32).map(move |n| (p, n)))
    {
        let first =
            AnalyticEigenstate::new(n, Branch::FirstCondition, &p).map_err(|e| e.to_string())?;
        let second =
            AnalyticEigenstate::new(n, Branch::SecondCondition, &p).map_err(|e| e.to_string())?;
        for i in 1..=1000 {
            let x = 12.0 / p.lambda().sqrt() * i as f64 / 1000.0;
            let d = (first.eval(x).unwrap() - second.eval(x).unwrap()).abs();
            worst = worst.max(d);
        }
    }
    verdict(
        worst < 1e-14,
        format!("max pointwise diff {worst:.2e} (< 1e-14), n ≤ 10, λ ∈ {{1, 30/7}}"),
    )
}

fn orthonormality() -> Outcome {
    let gram = orthonormality_matrix(10, &unit()).map_err(|e| e.to_string())?;
    let dev = identity_deviation(&gram);
    verdict(dev < 1e-8, format!("‖G − I‖_max {dev:.2e} (< 1e-8)"))
}

fn commutator() -> Outcome {
    let report =
        commutator_report(&[1000, 2000, 4000], 12.0, &unit()).map_err(|e| e.to_string())?;
    let ok = report.orders.len() == 2 && report.orders.iter().all(|p| (p - 2.0).abs() <= 0.3);
    verdict(
        ok,
        format!(
            "observed orders {:?} (2.0 ± 0.3)",
            report
                .orders
                .iter()
                .map(|p| format!("{p:.4}"))
                .collect::<Vec<_>>()
        ),
    )
}

fn closure() -> Outcome {
    let report = closure_check(
        closure_bump,
        CLOSURE_BUMP_ID,
        &[10.0, 40.0],
        12.0,
        CLOSURE_WINDOW,
    )
    .map_err(|e| e.to_string())?;
    let gain = report.improvement();
    verdict(
        gain >= 10.0,
        format!(
            "error K=10 {:.2e}, K=40 {:.2e}, improvement {gain:.1}× (≥ 10×)",
            report.error_curve[0].1, report.error_curve[1].1
        ),
    )
}

fn b_sweep() -> Outcome {
    let p = unit();
    let bvalues = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0];
    let (rows, elapsed) = timed(|| sweep_b(&bvalues, 1, &p, 12.0, 8000));
    let rows = rows.map_err(|e| e.to_string())?;
    let e0: Vec<f64> = rows
        .iter()
        .map(|r| r.energies[0] / (p.hbar() * p.omega()))
        .collect();
    let at_zero = ((e0[0] - 2.0) / 2.0).abs();
    let at_ten = ((e0[5] - 0.5) / 0.5).abs();
    let monotone = e0.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        at_zero < 1e-3 && at_ten < 0.02 && monotone && elapsed < Duration::from_secs(60),
        format!(
            "E_0 = {:?}, b=0 rel {at_zero:.1e}, b=10 rel {at_ten:.2e} (< 2%), monotone {monotone}, {elapsed:.2?}",
            e0.iter().map(|e| format!("{e:.5}")).collect::<Vec<_>>()
        ),
    )
}

fn nodes() -> Outcome {
    let p = unit();
    let pot = SpikedPotential::half_oscillator(&p);
    let grid = model_grid(&pot, 12.0, 8000).map_err(|e| e.to_string())?;
    let spec = solve_spectrum(&build_hamiltonian(&pot, &grid).unwrap(), 7, true)
        .map_err(|e| e.to_string())?;
    let vectors = spec.eigenvectors.ok_or("no eigenvectors")?;
    let mut counts = Vec::new();
    let mut ok = true;
    for n in 0..=6u32 {
        let state = AnalyticEigenstate::new(n, Branch::FirstCondition, &p).unwrap();
        let analytic = Wavefunction::from_fn(grid, |x| state.eval(x).unwrap());
        let a = analytic.sign_changes(1e-8);
        let v = vectors[n as usize].sign_changes(1e-8);
        ok &= a == n as usize && v == n as usize;
        counts.push((a, v));
    }
    verdict(
        ok,
        format!("(analytic, numeric) sign changes for n = 0..6: {counts:?}"),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_affine-halfline");
    let runs: [&[&str]; 6] = [
        &["spectrum", "--npoints", "2000", "--count", "4"],
        &[
            "spectrum",
            "--model",
            "free",
            "--xmax",
            "1",
            "--npoints",
            "2000",
            "--count",
            "3",
            "--output",
            "json",
        ],
        &[
            "eigenfunc",
            "--n",
            "3",
            "--npoints",
            "2000",
            "--samples",
            "50",
        ],
        &[
            "sweep-b",
            "--bvalues",
            "0,1,5",
            "--npoints",
            "1000",
            "--count",
            "2",
        ],
        &["verify", "lemma"],
        &["verify", "commutator"],
    ];
    for args in runs {
        let bodies: Vec<String> = (0..2)
            .map(|_| {
                let out = Command::new(bin).args(args).output().expect("binary runs");
                csv_data_body(&String::from_utf8_lossy(&out.stdout))
            })
            .collect();
        if bodies[0].is_empty() || bodies[0] != bodies[1] {
            return Err(format!("data bodies differ for {args:?}"));
        }
    }
    Ok(format!(
        "{} commands byte-identical across two runs",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("half-oscillator spectrum", half_ho_spectrum),
        ("free particle on truncated domain", free_particle),
        ("lemma vs quadrature", lemma),
        ("normalization constants", constants),
        ("branch equivalence", branches),
        ("orthonormality", orthonormality),
        ("commutator order", commutator),
        ("closure relation", closure),
        ("b-sweep", b_sweep),
        ("node counts", nodes),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
