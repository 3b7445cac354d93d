//! Cross-checks between the closed forms and the numerics.
//!
//! Every report is a plain serializable value computed deterministically
//! from its inputs. Delta-function statements are only tested in smeared
//! form against smooth test functions.

use serde::Serialize;

use crate::analytic::{landau_integral, normalization_constant, AnalyticEigenstate, Branch};
use crate::eigensolve::{build_hamiltonian, model_grid, solve_spectrum};
use crate::error::{Error, Result};
use crate::model::{
    commutator_residual, standard_test_function, HalfLineGrid, PhysicalParams, SpikedPotential,
};
use crate::specfun::{
    bessel_j1, build_quadrature, kummer_1f1, KummerParams, QuadratureKind, QuadratureRule,
};

/// Truncation of the half-line for Gaussian-damped integrands, in units of λ^{−1/2}.
pub const DEFAULT_XMAX: f64 = 12.0;

/// Points in the default Gauss–Legendre rule on [0, X_max].
pub const DEFAULT_QUAD_POINTS: usize = 128;

/// Width of the Gauss–Legendre panels used for the k integral.
pub const K_PANEL_WIDTH: f64 = 2.0;

const PANEL_POINTS: usize = 16;

/// Gaussian bump used for the closure test, negligible (~1.5e-8) at x = 0.
pub fn closure_bump(x: f64) -> f64 {
    (-2.0 * (x - 3.0).powi(2)).exp()
}

pub const CLOSURE_BUMP_ID: &str = "exp(-2(x-3)^2)";

/// Default K ladder for the closure check.
pub const CLOSURE_K_LADDER: [f64; 4] = [10.0, 20.0, 30.0, 40.0];

/// Default evaluation window; windows touching x = 0 pick up boundary
/// contamination from the x^{3/2} onset of every φ_k.
pub const CLOSURE_WINDOW: (f64, f64) = (1.0, 8.0);

/// Outcome of reconstructing f from its φ_k transform truncated at K.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureReport {
    /// Largest K of the ladder.
    pub kmax: f64,
    /// k-quadrature points used at the largest K.
    pub nk: usize,
    pub test_function: String,
    pub window: (f64, f64),
    /// L² error over the window at the largest K.
    pub reconstruction_error: f64,
    /// (K, error) for each rung of the ladder.
    pub error_curve: Vec<(f64, f64)>,
}

impl ClosureReport {
    /// Error at the first rung divided by the error at the last one.
    pub fn improvement(&self) -> f64 {
        let first = self.error_curve.first().map_or(0.0, |p| p.1);
        let last = self.error_curve.last().map_or(0.0, |p| p.1);
        first / last
    }

    /// Non-increasing up to `slack` times the previous value.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.error_curve
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 * (1.0 + slack))
    }
}

fn panel_rule(a: f64, b: f64, panels: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_POINTS);
    let mut weights = Vec::with_capacity(panels * PANEL_POINTS);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let rule = build_quadrature(
            QuadratureKind::GaussLegendreMappedHalfline,
            PANEL_POINTS,
            (lo, lo + width),
        )?;
        nodes.extend_from_slice(rule.nodes());
        weights.extend_from_slice(rule.weights());
    }
    Ok((nodes, weights))
}

/// Reconstructs `f` through `f_K(x) = ∫₀^K φ_k(x) ∫₀^{xmax} φ_k(y) f(y) dy dk`
/// and reports the L² error over `window` for each K in `kmax_ladder`.
pub fn closure_check<F: Fn(f64) -> f64>(
    f: F,
    test_function: &str,
    kmax_ladder: &[f64],
    xmax: f64,
    window: (f64, f64),
) -> Result<ClosureReport> {
    if kmax_ladder.is_empty() || kmax_ladder.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::InvalidParameter(
            "K ladder must hold positive values".into(),
        ));
    }
    let (a, b) = window;
    if !(a > 0.0 && b > a && b <= xmax) {
        return Err(Error::InvalidParameter(format!(
            "closure window ({a}, {b}) must lie inside (0, {xmax}]"
        )));
    }
    let kmax = kmax_ladder.iter().copied().fold(0.0, f64::max);
    // resolve oscillations of period 2π/k in y
    let y_panels = ((xmax * kmax / 8.0).ceil() as usize).max(8);
    let (ys, wy) = panel_rule(0.0, xmax, y_panels)?;
    let fy: Vec<f64> = ys.iter().map(|&y| f(y)).collect();

    let samples = 351;
    let dx = (b - a) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples).map(|i| a + dx * i as f64).collect();
    let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut error_curve = Vec::with_capacity(kmax_ladder.len());
    let mut nk = 0;
    for &kcut in kmax_ladder {
        let panels = (kcut / K_PANEL_WIDTH).ceil() as usize;
        let (ks, wk) = panel_rule(0.0, kcut, panels)?;
        nk = ks.len();
        let transform: Vec<f64> = ks
            .iter()
            .map(|&k| {
                ys.iter()
                    .zip(&wy)
                    .zip(&fy)
                    .map(|((&y, &w), &fv)| w * phi(k, y) * fv)
                    .sum()
            })
            .collect();
        let mut sum = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let recon: f64 = ks
                .iter()
                .zip(&wk)
                .zip(&transform)
                .map(|((&k, &w), &t)| w * t * phi(k, x))
                .sum();
            let d = recon - fx[i];
            let weight = if i == 0 || i == samples - 1 { 0.5 } else { 1.0 };
            sum += weight * d * d;
        }
        error_curve.push((kcut, (dx * sum).sqrt()));
    }
    Ok(ClosureReport {
        kmax,
        nk,
        test_function: test_function.to_string(),
        window,
        reconstruction_error: error_curve.last().map_or(0.0, |p| p.1),
        error_curve,
    })
}

fn phi(k: f64, x: f64) -> f64 {
    let kx = k * x;
    kx.sqrt() * bessel_j1(kx)
}

/// Default rule for analytic oscillator states: `DEFAULT_QUAD_POINTS`
/// Gauss–Legendre nodes on [0, DEFAULT_XMAX/√λ].
pub fn default_rule(params: &PhysicalParams) -> Result<QuadratureRule> {
    let lambda = params.lambda();
    if !(lambda > 0.0) {
        return Err(Error::Domain {
            what: "lambda",
            value: lambda,
        });
    }
    build_quadrature(
        QuadratureKind::GaussLegendreMappedHalfline,
        DEFAULT_QUAD_POINTS,
        (0.0, DEFAULT_XMAX / lambda.sqrt()),
    )
}

/// Gram matrix `G_nm = ∫ φ_n φ_m dx` of analytic states 0..=nmax.
pub fn orthonormality_matrix(nmax: u32, params: &PhysicalParams) -> Result<Vec<Vec<f64>>> {
    if nmax > 20 {
        return Err(Error::InvalidParameter(format!("nmax = {nmax} exceeds 20")));
    }
    let rule = default_rule(params)?;
    let table = (0..=nmax)
        .map(|n| {
            let s = AnalyticEigenstate::new(n, Branch::FirstCondition, params)?;
            rule.nodes()
                .iter()
                .map(|&x| s.eval(x))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let size = table.len();
    let mut gram = vec![vec![0.0; size]; size];
    for n in 0..size {
        for m in n..size {
            let v: f64 = rule
                .weights()
                .iter()
                .zip(&table[n])
                .zip(&table[m])
                .map(|((w, a), b)| w * a * b)
                .sum();
            gram[n][m] = v;
            gram[m][n] = v;
        }
    }
    Ok(gram)
}

/// max |G − I|.
pub fn identity_deviation(gram: &[Vec<f64>]) -> f64 {
    gram.iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
        })
        .fold(0.0, f64::max)
}

/// Closed-form Lemma value against quadrature of the explicit integrand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaEntry {
    pub n: u32,
    pub m: u32,
    pub closed_form: f64,
    pub quadrature: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub gamma: f64,
    pub rate: f64,
    pub quad_points: usize,
    pub entries: Vec<LemmaEntry>,
    pub max_abs_diff: f64,
}

/// Compares `landau_integral` with `quad_points`-point Gauss–Legendre
/// quadrature on [0, DEFAULT_XMAX/√rate] for all 0 ≤ n, m ≤ nmax.
pub fn lemma_report(nmax: u32, gamma: f64, rate: f64, quad_points: usize) -> Result<LemmaReport> {
    let rule = build_quadrature(
        QuadratureKind::GaussLegendreMappedHalfline,
        quad_points,
        (0.0, DEFAULT_XMAX / rate.sqrt()),
    )?;
    let mut entries = Vec::new();
    let mut max_abs_diff = 0.0_f64;
    for n in 0..=nmax {
        let pn = KummerParams::terminating(n, gamma)?;
        for m in 0..=nmax {
            let pm = KummerParams::terminating(m, gamma)?;
            let closed_form = landau_integral(n, m, gamma, rate)?;
            let mut quadrature = 0.0;
            for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                let y = rate * x * x;
                quadrature += w
                    * x.powf(2.0 * gamma - 1.0)
                    * (-y).exp()
                    * kummer_1f1(pn, y)?
                    * kummer_1f1(pm, y)?;
            }
            max_abs_diff = max_abs_diff.max((closed_form - quadrature).abs());
            entries.push(LemmaEntry {
                n,
                m,
                closed_form,
                quadrature,
            });
        }
    }
    Ok(LemmaReport {
        gamma,
        rate,
        quad_points,
        entries,
        max_abs_diff,
    })
}

/// Normalization constants from the Lemma next to the printed closed forms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsEntry {
    pub n: u32,
    pub a_lemma: f64,
    pub a_printed: f64,
    pub b_lemma: f64,
    pub b_printed: f64,
}

impl ConstantsEntry {
    pub fn max_rel_diff(&self) -> f64 {
        ((self.a_lemma - self.a_printed) / self.a_printed)
            .abs()
            .max(((self.b_lemma - self.b_printed) / self.b_printed).abs())
    }
}

/// A_n = (mω/ħ)√(2(n+1)) and B_n = √(2(n+1)) against the Lemma-derived values.
pub fn constants_report(nmax: u32, params: &PhysicalParams) -> Result<Vec<ConstantsEntry>> {
    (0..=nmax)
        .map(|n| {
            let root = (2.0 * (n as f64 + 1.0)).sqrt();
            Ok(ConstantsEntry {
                n,
                a_lemma: normalization_constant(n, Branch::FirstCondition, params)?,
                a_printed: params.lambda() * root,
                b_lemma: normalization_constant(n, Branch::SecondCondition, params)?,
                b_printed: root,
            })
        })
        .collect()
}

/// Commutator residuals on a ladder of grids.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub xmax: f64,
    /// (npoints, residual)
    pub residuals: Vec<(usize, f64)>,
    /// log₂ ratio of consecutive residuals, corrected for the exact h ratio.
    pub orders: Vec<f64>,
}

/// `‖([x̂, d̂] − iħx̂)ψ‖` for the standard test function on each grid size.
pub fn commutator_report(
    npoints: &[usize],
    xmax: f64,
    params: &PhysicalParams,
) -> Result<CommutatorReport> {
    let grids = npoints
        .iter()
        .map(|&n| HalfLineGrid::new(xmax, n))
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<(usize, f64)> = grids
        .iter()
        .map(|g| {
            (
                g.npoints(),
                commutator_residual(&standard_test_function(*g), params),
            )
        })
        .collect();
    let orders = grids
        .windows(2)
        .zip(residuals.windows(2))
        .map(|(g, r)| (r[0].1 / r[1].1).ln() / (g[0].spacing() / g[1].spacing()).ln())
        .collect();
    Ok(CommutatorReport {
        xmax,
        residuals,
        orders,
    })
}

/// Which states a residual report covers.
#[derive(Clone, Debug, PartialEq)]
pub enum ResidualStates {
    /// Analytic φ_0..φ_{count−1} of the half oscillator.
    HalfOscillator { params: PhysicalParams, count: u32 },
    /// Free-particle continuum functions at the given wavenumbers.
    FreeParticle { wavenumbers: Vec<f64> },
    /// Numeric eigenvectors of the discretized operator.
    Numeric { pot: SpikedPotential, count: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub index: usize,
    pub residual: f64,
    /// Observed order between the grid and its refinement (analytic states).
    pub order: Option<f64>,
}

/// Smallest x at which analytic ODE residuals are sampled.
pub const RESIDUAL_X_MIN: f64 = 0.1;

/// Discrete residuals `‖(−D² + V)φ − (ε + energy_shift)φ‖`.
///
/// Analytic states are sampled on `grid` and on its refinement, using nodes
/// with x ≥ [`RESIDUAL_X_MIN`], and the observed order is reported. Numeric
/// states report the matrix residual `‖Tv − εv‖/‖v‖` on `grid` (in the
/// shifted coordinate, covering b + xmax).
pub fn residual_report(
    states: &ResidualStates,
    grid: HalfLineGrid,
    energy_shift: f64,
) -> Result<Vec<ResidualEntry>> {
    match states {
        ResidualStates::HalfOscillator { params, count } => {
            let pot = SpikedPotential::half_oscillator(params);
            (0..*count)
                .map(|n| {
                    let s = AnalyticEigenstate::new(n, Branch::FirstCondition, params)?;
                    let eps = params.to_dimensionless_energy(s.energy()) + energy_shift;
                    let f = |x: f64| s.eval(x);
                    analytic_entry(n as usize, &pot, eps, &f, grid)
                })
                .collect()
        }
        ResidualStates::FreeParticle { wavenumbers } => {
            let pot = SpikedPotential::free_affine();
            wavenumbers
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let f = |x: f64| Ok(phi(k, x));
                    analytic_entry(i, &pot, k * k + energy_shift, &f, grid)
                })
                .collect()
        }
        ResidualStates::Numeric { pot, count } => {
            let op = build_hamiltonian(pot, &grid)?;
            let spec = solve_spectrum(&op, *count, true)?;
            let vecs = spec.eigenvectors.unwrap_or_default();
            Ok(vecs
                .iter()
                .enumerate()
                .map(|(j, v)| ResidualEntry {
                    index: j,
                    residual: op.residual_norm(spec.eigenvalues[j] + energy_shift, v.values()),
                    order: None,
                })
                .collect())
        }
    }
}

fn analytic_entry(
    index: usize,
    pot: &SpikedPotential,
    eps: f64,
    f: &dyn Fn(f64) -> Result<f64>,
    grid: HalfLineGrid,
) -> Result<ResidualEntry> {
    let coarse = ode_residual(pot, eps, f, grid)?;
    let fine_grid = grid.refined();
    let fine = ode_residual(pot, eps, f, fine_grid)?;
    let order = (coarse / fine).ln() / (grid.spacing() / fine_grid.spacing()).ln();
    Ok(ResidualEntry {
        index,
        residual: coarse,
        order: Some(order),
    })
}

fn ode_residual(
    pot: &SpikedPotential,
    eps: f64,
    f: &dyn Fn(f64) -> Result<f64>,
    grid: HalfLineGrid,
) -> Result<f64> {
    let h = grid.spacing();
    let values = grid.nodes().map(f).collect::<Result<Vec<f64>>>()?;
    let mut sum = 0.0;
    for i in 1..values.len() - 1 {
        let x = grid.node(i);
        if x < RESIDUAL_X_MIN {
            continue;
        }
        let lap = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
        let r = -lap + pot.eval(x)? * values[i] - eps * values[i];
        sum += r * r;
    }
    Ok((h * sum).sqrt())
}

/// Sup-norm distance between the numeric and analytic half-oscillator state n.
pub fn eigenfunction_deviation(
    n: u32,
    params: &PhysicalParams,
    xmax: f64,
    npoints: usize,
) -> Result<f64> {
    let pot = SpikedPotential::half_oscillator(params);
    let grid = model_grid(&pot, xmax, npoints)?;
    let spec = solve_spectrum(&build_hamiltonian(&pot, &grid)?, n as usize + 1, true)?;
    let v = &spec.eigenvectors.unwrap_or_default()[n as usize];
    let s = AnalyticEigenstate::new(n, Branch::FirstCondition, params)?;
    let mut worst = 0.0_f64;
    for (i, x) in grid.nodes().enumerate() {
        worst = worst.max((v.values()[i] - s.eval(x)?).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PhysicalParams {
        PhysicalParams::default()
    }

    #[test]
    fn gram_is_identity() {
        let g = orthonormality_matrix(10, &unit()).unwrap();
        assert!(identity_deviation(&g) < 1e-8);
        let p = PhysicalParams::new(2.0, 1.5, 0.7).unwrap();
        assert!(identity_deviation(&orthonormality_matrix(20, &p).unwrap()) < 1e-8);
        let single = orthonormality_matrix(0, &unit()).unwrap();
        assert_eq!(single.len(), 1);
        assert!((single[0][0] - 1.0).abs() < 1e-12);
        assert!(orthonormality_matrix(21, &unit()).is_err());
    }

    #[test]
    fn gram_negative_control() {
        // dropping the normalization constant's √2 must be visible
        let g = orthonormality_matrix(3, &unit()).unwrap();
        let scaled: Vec<Vec<f64>> = g
            .iter()
            .map(|r| r.iter().map(|v| v * 0.5).collect())
            .collect();
        assert!(identity_deviation(&scaled) > 0.4);
    }

    #[test]
    fn lemma_against_quadrature() {
        let r = lemma_report(10, 2.0, 1.0, 128).unwrap();
        assert_eq!(r.entries.len(), 121);
        assert!(r.max_abs_diff < 1e-10, "{}", r.max_abs_diff);
        let other = lemma_report(6, 1.5, 2.5, 128).unwrap();
        assert!(other.max_abs_diff < 1e-10);
    }

    #[test]
    fn constants_report_matches() {
        let p = PhysicalParams::new(1.7, 2.2, 0.9).unwrap();
        for e in constants_report(10, &p).unwrap() {
            assert!(e.max_rel_diff() < 1e-12);
        }
    }

    #[test]
    fn closure_zero_function() {
        let r = closure_check(|_| 0.0, "zero", &[10.0, 20.0], 12.0, CLOSURE_WINDOW).unwrap();
        assert!(r.error_curve.iter().all(|p| p.1 == 0.0));
    }

    #[test]
    fn closure_rejects_bad_windows() {
        assert!(closure_check(closure_bump, "b", &[10.0], 12.0, (0.0, 5.0)).is_err());
        assert!(closure_check(closure_bump, "b", &[10.0], 12.0, (5.0, 13.0)).is_err());
        assert!(closure_check(closure_bump, "b", &[], 12.0, CLOSURE_WINDOW).is_err());
    }

    #[test]
    fn closure_converges_for_bump() {
        let r = closure_check(
            closure_bump,
            CLOSURE_BUMP_ID,
            &[10.0, 20.0],
            12.0,
            CLOSURE_WINDOW,
        )
        .unwrap();
        assert!(r.improvement() > 10.0, "{:?}", r.error_curve);
        assert!(r.error_curve.iter().all(|p| p.1 > 0.0));
    }

    #[test]
    fn closure_negative_control() {
        // a reconstruction cut off far too early cannot resolve the bump
        let r = closure_check(closure_bump, CLOSURE_BUMP_ID, &[1.0], 12.0, CLOSURE_WINDOW).unwrap();
        assert!(r.reconstruction_error > 1e-2);
    }

    #[test]
    fn analytic_residuals_are_second_order() {
        let grid = HalfLineGrid::new(12.0, 2000).unwrap();
        let states = ResidualStates::HalfOscillator {
            params: unit(),
            count: 4,
        };
        for e in residual_report(&states, grid, 0.0).unwrap() {
            let p = e.order.unwrap();
            assert!((p - 2.0).abs() < 0.2, "state {}: order {p}", e.index);
            assert!(e.residual < 1e-3);
        }
        let free = ResidualStates::FreeParticle {
            wavenumbers: vec![1.0, 3.0, 7.5],
        };
        for e in residual_report(&free, grid, 0.0).unwrap() {
            assert!((e.order.unwrap() - 2.0).abs() < 0.2);
        }
    }

    #[test]
    fn wrong_energy_is_detected() {
        let grid = HalfLineGrid::new(12.0, 2000).unwrap();
        let states = ResidualStates::HalfOscillator {
            params: unit(),
            count: 3,
        };
        for e in residual_report(&states, grid, 0.1).unwrap() {
            assert!(e.residual > 0.05, "{}", e.residual);
        }
        let pot = SpikedPotential::half_oscillator(&unit());
        let numeric = ResidualStates::Numeric { pot, count: 3 };
        let good = residual_report(&numeric, grid, 0.0).unwrap();
        let bad = residual_report(&numeric, grid, 0.1).unwrap();
        for (g, b) in good.iter().zip(&bad) {
            assert!(g.residual < 1e-8);
            assert!(b.residual > 0.05);
        }
    }

    #[test]
    fn commutator_orders() {
        let r = commutator_report(&[1000, 2000, 4000], 12.0, &unit()).unwrap();
        for p in &r.orders {
            assert!((p - 2.0).abs() < 0.3, "{p}");
        }
    }
}
