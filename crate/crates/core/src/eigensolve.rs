//! Finite-difference spectrum of `−d²/du² + α/u² + λ²(u−b)²` on (0, U) with
//! Dirichlet ends.
//!
//! The shifted problem on the physical interval x ∈ (−b, X_max) is solved in
//! the coordinate u = x + b ∈ (0, b + X_max), so the singular point always
//! sits at the left end of the grid and b = 0 is the half oscillator.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a pivoted tridiagonal LU.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{HalfLineGrid, PhysicalParams, SpikedPotential, Wavefunction};

/// Inverse-iteration sweeps per eigenvalue.
const INVERSE_ITERATIONS: usize = 3;

/// Eigenvalues closer than this fraction of ‖T‖ are treated as a cluster and
/// their vectors re-orthogonalized.
const CLUSTER_FRACTION: f64 = 1e-3;

/// Symmetric tridiagonal matrix `diag_i = 2/h² + V(u_i)`, `off_i = −1/h²`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalOperator {
    diagonal: Vec<f64>,
    offdiagonal: Vec<f64>,
    grid: HalfLineGrid,
    model: SpikedPotential,
}

impl TridiagonalOperator {
    /// Operator from explicit diagonals, for solver-level tests.
    pub fn from_parts(
        diagonal: Vec<f64>,
        offdiagonal: Vec<f64>,
        grid: HalfLineGrid,
        model: SpikedPotential,
    ) -> Result<Self> {
        if diagonal.len() != grid.npoints() || offdiagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidParameter(format!(
                "diagonal lengths {} / {} do not fit a {}-point grid",
                diagonal.len(),
                offdiagonal.len(),
                grid.npoints()
            )));
        }
        Ok(Self {
            diagonal,
            offdiagonal,
            grid,
            model,
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn offdiagonal(&self) -> &[f64] {
        &self.offdiagonal
    }

    pub fn grid(&self) -> &HalfLineGrid {
        &self.grid
    }

    pub fn model(&self) -> &SpikedPotential {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Dense (i, j) entry; the single off-diagonal array makes this symmetric.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diagonal[i]
        } else if i + 1 == j {
            self.offdiagonal[i]
        } else if j + 1 == i {
            self.offdiagonal[j]
        } else {
            0.0
        }
    }

    /// Tv.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diagonal[i] * v[i];
                if i > 0 {
                    acc += self.offdiagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiagonal[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// ‖Tv − εv‖ / ‖v‖ in the Euclidean norm.
    pub fn residual_norm(&self, eps: f64, v: &[f64]) -> f64 {
        let tv = self.apply(v);
        let num: f64 = tv.iter().zip(v).map(|(a, b)| (a - eps * b).powi(2)).sum();
        let den: f64 = v.iter().map(|b| b * b).sum();
        (num / den).sqrt()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiagonal[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiagonal[i].abs();
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        let (lo, hi) = self.gershgorin_bounds();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `lambda`, from the signs of the
    /// LDLᵀ pivots of T − λI.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let guard = f64::MIN_POSITIVE.sqrt() * self.norm_inf().max(1.0);
        let mut count = 0;
        let mut q = self.diagonal[0] - lambda;
        for i in 0..self.dim() {
            if i > 0 {
                let e = self.offdiagonal[i - 1];
                q = (self.diagonal[i] - lambda) - e * e / q;
            }
            if q == 0.0 {
                q = -guard;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Grid covering u ∈ (0, b + xmax) for the given potential.
pub fn model_grid(pot: &SpikedPotential, xmax: f64, npoints: usize) -> Result<HalfLineGrid> {
    HalfLineGrid::new(pot.b + xmax, npoints)
}

/// Three-point Laplacian plus the potential on the interior nodes.
///
/// `grid` is in the shifted coordinate u = x + b.
pub fn build_hamiltonian(
    pot: &SpikedPotential,
    grid: &HalfLineGrid,
) -> Result<TridiagonalOperator> {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let mut diagonal = Vec::with_capacity(grid.npoints());
    for u in grid.nodes() {
        let v = pot.eval_shifted(u)?;
        if !v.is_finite() {
            return Err(Error::Domain {
                what: "potential on grid node",
                value: u,
            });
        }
        diagonal.push(2.0 * inv_h2 + v);
    }
    let offdiagonal = vec![-inv_h2; grid.npoints() - 1];
    Ok(TridiagonalOperator {
        diagonal,
        offdiagonal,
        grid: *grid,
        model: *pot,
    })
}

/// Lowest eigenvalues of one operator, optionally with eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    /// Dimensionless eigenvalues ε_j, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors normalized to unit trapezoidal norm with a nonnegative
    /// first component.
    pub eigenvectors: Option<Vec<Wavefunction>>,
    pub npoints: usize,
    /// Right end of the grid in the shifted coordinate (b + X_max).
    pub xmax: f64,
    pub h: f64,
    pub model: SpikedPotential,
}

/// The `count` smallest eigenvalues (and vectors if requested).
pub fn solve_spectrum(
    op: &TridiagonalOperator,
    count: usize,
    want_vectors: bool,
) -> Result<SpectrumResult> {
    let n = op.dim();
    if count > n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenvalues from a {n}-dimensional operator"
        )));
    }
    let (glo, ghi) = op.gershgorin_bounds();
    let pad = f64::EPSILON * op.norm_inf().max(1.0) * n as f64;
    let (glo, ghi) = (glo - pad, ghi + pad);

    let mut eigenvalues = Vec::with_capacity(count);
    for j in 0..count {
        eigenvalues.push(bisect_eigenvalue(op, j, glo, ghi)?);
    }

    let eigenvectors = if want_vectors {
        Some(inverse_iteration(op, &eigenvalues)?)
    } else {
        None
    };

    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        npoints: n,
        xmax: op.grid.xmax(),
        h: op.grid.spacing(),
        model: op.model,
    })
}

/// j-th eigenvalue (0-based) by bisection on the Sturm count, down to the
/// resolution of f64 around it.
fn bisect_eigenvalue(op: &TridiagonalOperator, j: usize, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if op.sturm_count(lo) > j || op.sturm_count(hi) <= j {
        return Err(Error::Solver(format!(
            "bisection bracket [{lo}, {hi}] does not isolate eigenvalue {j}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if op.sturm_count(mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn inverse_iteration(op: &TridiagonalOperator, eigenvalues: &[f64]) -> Result<Vec<Wavefunction>> {
    let n = op.dim();
    let tnorm = op.norm_inf().max(1.0);
    let cluster_gap = CLUSTER_FRACTION * tnorm;
    let tiny = f64::EPSILON * tnorm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());

    for (j, &ev) in eigenvalues.iter().enumerate() {
        let lu = ShiftedLu::factor(op, ev, tiny);
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        normalize(&mut v);
        for _ in 0..INVERSE_ITERATIONS {
            v = lu.solve(v);
            for (k, prev) in vectors.iter().enumerate() {
                if (eigenvalues[k] - ev).abs() < cluster_gap {
                    let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
                }
            }
            if !normalize(&mut v) {
                return Err(Error::Solver(format!(
                    "inverse iteration collapsed for eigenvalue {j} ({ev})"
                )));
            }
        }
        let lead = v.iter().copied().find(|x| *x != 0.0).unwrap_or(0.0);
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        vectors.push(v);
    }

    let scale = 1.0 / op.grid.spacing().sqrt();
    vectors
        .into_iter()
        .map(|v| Wavefunction::new(op.grid, v.into_iter().map(|x| x * scale).collect()))
        .collect()
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// LU factorization of T − σI with partial pivoting (the layout used by
/// LAPACK's `gttrf`): after a row swap the upper factor gains a second
/// super-diagonal.
struct ShiftedLu {
    diag: Vec<f64>,
    upper1: Vec<f64>,
    upper2: Vec<f64>,
    lower: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(op: &TridiagonalOperator, sigma: f64, tiny: f64) -> Self {
        let n = op.dim();
        let mut diag: Vec<f64> = op.diagonal.iter().map(|d| d - sigma).collect();
        let mut upper1 = op.offdiagonal.clone();
        let mut lower = op.offdiagonal.clone();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] == 0.0 {
                    diag[i] = tiny;
                }
                let fact = lower[i] / diag[i];
                lower[i] = fact;
                diag[i + 1] -= fact * upper1[i];
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper1[i];
                upper1[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper1[i + 1];
                    upper1[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        Self {
            diag,
            upper1,
            upper2,
            lower,
            swapped,
        }
    }

    fn solve(&self, mut rhs: Vec<f64>) -> Vec<f64> {
        let n = rhs.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = rhs[i];
                rhs[i] = rhs[i + 1];
                rhs[i + 1] = temp - self.lower[i] * rhs[i];
            } else {
                rhs[i + 1] -= self.lower[i] * rhs[i];
            }
        }
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= self.upper1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                acc -= self.upper2[i] * rhs[i + 2];
            }
            rhs[i] = acc / self.diag[i];
        }
        rhs
    }
}

/// Spectra on a ladder of grids plus their Richardson extrapolation.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedSpectrum {
    pub levels: Vec<SpectrumResult>,
    /// Richardson tableau diagonal, assuming an error expansion in h², h⁴, …
    pub extrapolated: Vec<f64>,
    /// log₂ of successive difference ratios on the three finest grids.
    pub observed_order: Vec<Option<f64>>,
    /// False where successive levels do not move monotonically.
    pub monotone: Vec<bool>,
}

impl RefinedSpectrum {
    /// Indices whose convergence was flagged as non-monotone.
    pub fn flagged(&self) -> Vec<usize> {
        self.monotone
            .iter()
            .enumerate()
            .filter_map(|(i, ok)| (!ok).then_some(i))
            .collect()
    }
}

/// Ladder of `levels` grids starting at `base`, each halving h.
pub fn halving_ladder(base: HalfLineGrid, levels: usize) -> Vec<HalfLineGrid> {
    std::iter::successors(Some(base), |g| Some(g.refined()))
        .take(levels)
        .collect()
}

/// Solves on every grid of the ladder and extrapolates each eigenvalue.
pub fn refine_spectrum(
    pot: &SpikedPotential,
    count: usize,
    ladder: &[HalfLineGrid],
) -> Result<RefinedSpectrum> {
    if ladder.len() < 2 {
        return Err(Error::InvalidParameter(
            "refinement needs at least two grids".into(),
        ));
    }
    for pair in ladder.windows(2) {
        let ratio = pair[0].spacing() / pair[1].spacing();
        if (ratio - 2.0).abs() > 1e-9 || pair[0].xmax() != pair[1].xmax() {
            return Err(Error::InvalidParameter(format!(
                "ladder grids must halve h on a fixed domain (ratio {ratio})"
            )));
        }
    }
    let levels = ladder
        .par_iter()
        .map(|g| solve_spectrum(&build_hamiltonian(pot, g)?, count, false))
        .collect::<Result<Vec<_>>>()?;

    let mut extrapolated = Vec::with_capacity(count);
    let mut observed_order = Vec::with_capacity(count);
    let mut monotone = Vec::with_capacity(count);
    for j in 0..count {
        let seq: Vec<f64> = levels.iter().map(|l| l.eigenvalues[j]).collect();
        extrapolated.push(richardson(&seq));
        let diffs: Vec<f64> = seq.windows(2).map(|w| w[1] - w[0]).collect();
        monotone.push(diffs.iter().all(|d| *d > 0.0) || diffs.iter().all(|d| *d < 0.0));
        observed_order.push(if diffs.len() >= 2 {
            let (d1, d2) = (diffs[diffs.len() - 2], diffs[diffs.len() - 1]);
            let r = d1 / d2;
            (r > 0.0 && r.is_finite()).then(|| r.log2())
        } else {
            None
        });
    }
    Ok(RefinedSpectrum {
        levels,
        extrapolated,
        observed_order,
        monotone,
    })
}

/// Richardson extrapolation of values on halving h, with error terms in even
/// powers of h.
pub fn richardson(values: &[f64]) -> f64 {
    let mut row = values.to_vec();
    let mut factor = 4.0;
    while row.len() > 1 {
        row = row
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    row[0]
}

/// One row of a b-sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub b: f64,
    /// Dimensionless eigenvalues ε_j.
    pub eigenvalues: Vec<f64>,
    /// Physical energies E_j = ε_j ħ²/(2m).
    pub energies: Vec<f64>,
}

/// Spectra of `(3/4)/(x+b)² + λ²x²` on x ∈ (−b, xmax) for each b.
///
/// Distinct b values are solved in parallel; the output keeps input order.
pub fn sweep_b(
    bvalues: &[f64],
    count: usize,
    params: &PhysicalParams,
    xmax: f64,
    npoints: usize,
) -> Result<Vec<SweepRow>> {
    if bvalues.iter().any(|b| !(*b >= 0.0)) {
        return Err(Error::InvalidParameter(
            "b values must be nonnegative".into(),
        ));
    }
    if bvalues.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("b values must be sorted".into()));
    }
    bvalues
        .par_iter()
        .map(|&b| {
            let solve = || -> Result<SweepRow> {
                let pot = SpikedPotential::shifted_oscillator(params, b);
                let grid = model_grid(&pot, xmax, npoints)?;
                let spec = solve_spectrum(&build_hamiltonian(&pot, &grid)?, count, false)?;
                let energies = spec
                    .eigenvalues
                    .iter()
                    .map(|&e| params.to_physical_energy(e))
                    .collect();
                Ok(SweepRow {
                    b,
                    eigenvalues: spec.eigenvalues,
                    energies,
                })
            };
            solve().map_err(|e| Error::Sweep {
                b,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn box_potential() -> SpikedPotential {
        SpikedPotential::new(0.0, 0.0, 0.0).unwrap()
    }

    fn small_op(diagonal: Vec<f64>, offdiagonal: Vec<f64>) -> TridiagonalOperator {
        // the grid only supplies bookkeeping here; pad to the minimum size
        let n = diagonal.len();
        let mut d = diagonal;
        let mut e = offdiagonal;
        d.extend((0..16 - n).map(|i| 1e6 + i as f64));
        e.extend(std::iter::repeat_n(0.0, 16 - n));
        let grid = HalfLineGrid::new(1.0, 16).unwrap();
        TridiagonalOperator::from_parts(d, e, grid, box_potential()).unwrap()
    }

    #[test]
    fn two_by_two_closed_form() {
        let op = small_op(vec![2.0, -1.0], vec![3.0]);
        let spec = solve_spectrum(&op, 2, true).unwrap();
        let mean = 0.5;
        let rad = (1.5_f64.powi(2) + 9.0).sqrt();
        assert!((spec.eigenvalues[0] - (mean - rad)).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - (mean + rad)).abs() < 1e-14);
    }

    #[test]
    fn three_by_three_closed_form() {
        // tridiag(−1, 2, −1) of size 3: 2 − √2, 2, 2 + √2
        let op = small_op(vec![2.0, 2.0, 2.0], vec![-1.0, -1.0]);
        let spec = solve_spectrum(&op, 3, false).unwrap();
        let s2 = 2.0_f64.sqrt();
        for (got, want) in spec.eigenvalues.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn discrete_laplacian_exact_spectrum() {
        let grid = HalfLineGrid::new(PI, 99).unwrap();
        let op = build_hamiltonian(&box_potential(), &grid).unwrap();
        let spec = solve_spectrum(&op, 10, true).unwrap();
        let h = grid.spacing();
        for (j, ev) in spec.eigenvalues.iter().enumerate() {
            let k = (j + 1) as f64;
            let exact = (2.0 - 2.0 * (k * h).cos()) / (h * h);
            assert!(
                (ev - exact).abs() < 1e-12 * exact.max(1.0) * 1e3,
                "{j}: {ev} vs {exact}"
            );
        }
    }

    #[test]
    fn box_ground_state_tends_to_one() {
        let grid = HalfLineGrid::new(PI, 4000).unwrap();
        let op = build_hamiltonian(&box_potential(), &grid).unwrap();
        let spec = solve_spectrum(&op, 1, false).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hamiltonian_is_symmetric() {
        let pot = SpikedPotential::new(0.75, 1.0, 2.0).unwrap();
        let grid = model_grid(&pot, 12.0, 64).unwrap();
        let op = build_hamiltonian(&pot, &grid).unwrap();
        for i in 0..op.dim() {
            for j in 0..op.dim() {
                assert_eq!(op.entry(i, j), op.entry(j, i));
            }
        }
        let h = grid.spacing();
        assert_eq!(op.offdiagonal()[0], -1.0 / (h * h));
        let u = grid.node(3);
        let want = 2.0 / (h * h) + 0.75 / (u * u) + (u - 2.0).powi(2);
        assert_eq!(op.diagonal()[3], want);
    }

    #[test]
    fn full_line_oscillator_via_shift() {
        // α = 0 and b = L turns the half-line grid into the symmetric interval (−L, L)
        let pot = SpikedPotential::new(0.0, 1.0, 8.0).unwrap();
        let grid = model_grid(&pot, 8.0, 4000).unwrap();
        let spec = solve_spectrum(&build_hamiltonian(&pot, &grid).unwrap(), 5, true).unwrap();
        for (n, ev) in spec.eigenvalues.iter().enumerate() {
            assert!((ev - (2 * n + 1) as f64).abs() < 1e-4, "{n}: {ev}");
        }
        // parity about the symmetry point shows up in the vectors
        let vecs = spec.eigenvectors.unwrap();
        let v1 = vecs[1].values();
        let n = v1.len();
        assert!((v1[n / 4] + v1[n - 1 - n / 4]).abs() < 1e-8);
    }

    #[test]
    fn eigen_residuals_orthogonality_and_nodes() {
        let params = PhysicalParams::default();
        let pot = SpikedPotential::half_oscillator(&params);
        let grid = model_grid(&pot, 12.0, 3000).unwrap();
        let op = build_hamiltonian(&pot, &grid).unwrap();
        let spec = solve_spectrum(&op, 7, true).unwrap();
        let vecs = spec.eigenvectors.as_ref().unwrap();
        assert!(spec.eigenvalues.windows(2).all(|w| w[1] > w[0]));
        for (j, v) in vecs.iter().enumerate() {
            assert!((v.norm_sq() - 1.0).abs() < 1e-12);
            assert!(v.values()[0] >= 0.0);
            assert!(op.residual_norm(spec.eigenvalues[j], v.values()) < 1e-8);
            assert_eq!(v.sign_changes(1e-8), j);
            for w in &vecs[..j] {
                let dot: f64 = v.values().iter().zip(w.values()).map(|(a, b)| a * b).sum();
                assert!((dot * grid.spacing()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn count_bounds() {
        let grid = HalfLineGrid::new(1.0, 16).unwrap();
        let op = build_hamiltonian(&box_potential(), &grid).unwrap();
        assert!(solve_spectrum(&op, 17, false).is_err());
        assert_eq!(
            solve_spectrum(&op, 16, false).unwrap().eigenvalues.len(),
            16
        );
    }

    #[test]
    fn sturm_count_brackets_spectrum() {
        let grid = HalfLineGrid::new(1.0, 40).unwrap();
        let op = build_hamiltonian(&box_potential(), &grid).unwrap();
        let (lo, hi) = op.gershgorin_bounds();
        assert_eq!(op.sturm_count(lo - 1.0), 0);
        assert_eq!(op.sturm_count(hi + 1.0), 40);
    }

    #[test]
    fn richardson_removes_quadratic_and_quartic_terms() {
        let f = |h: f64| 3.0 + 0.7 * h * h - 0.2 * h.powi(4);
        let vals = [f(0.1), f(0.05), f(0.025)];
        assert!((richardson(&vals) - 3.0).abs() < 1e-14);
        assert!((richardson(&vals[..2]) - 3.0).abs() < 1e-5);
    }

    #[test]
    fn box_extrapolation() {
        let xmax = 2.0;
        let base = HalfLineGrid::new(xmax, 199).unwrap();
        let refined = refine_spectrum(&box_potential(), 3, &halving_ladder(base, 3)).unwrap();
        let exact = (PI / xmax).powi(2);
        assert!((refined.extrapolated[0] - exact).abs() < 1e-9);
        let p = refined.observed_order[0].unwrap();
        assert!((p - 2.0).abs() < 0.2, "order {p}");
        assert!(refined.flagged().is_empty());
    }

    #[test]
    fn ladder_validation() {
        let g = HalfLineGrid::new(1.0, 100).unwrap();
        assert!(refine_spectrum(&box_potential(), 1, &[g]).is_err());
        let bad = HalfLineGrid::new(1.0, 150).unwrap();
        assert!(refine_spectrum(&box_potential(), 1, &[g, bad]).is_err());
    }

    #[test]
    fn sweep_validates_input_and_keeps_order() {
        let p = PhysicalParams::default();
        assert!(sweep_b(&[1.0, 0.5], 1, &p, 12.0, 200).is_err());
        assert!(sweep_b(&[-1.0], 1, &p, 12.0, 200).is_err());
        let rows = sweep_b(&[0.0, 1.0, 3.0], 2, &p, 12.0, 400).unwrap();
        assert_eq!(
            rows.iter().map(|r| r.b).collect::<Vec<_>>(),
            vec![0.0, 1.0, 3.0]
        );
        for r in &rows {
            assert!((r.energies[0] - 0.5 * r.eigenvalues[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn sweep_error_names_offending_b() {
        let p = PhysicalParams::default();
        let err = sweep_b(&[0.0, 2.0], 50, &p, 12.0, 20).unwrap_err();
        match err {
            Error::Sweep { b, .. } => assert!(b == 0.0 || b == 2.0),
            other => panic!("unexpected error {other}"),
        }
    }
}
