//! Physical parameters, the spiked potential family, half-line grids and the
//! affine operators x̂ and d̂ acting on sampled wavefunctions.
//!
//! Spectral work is done in dimensionless form: the eigenproblem
//! `[−d²/dx² + α/(x+b)² + λ²x²] φ = ε φ` with `λ = mω/ħ` and `ε = 2mE/ħ²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient of the x⁻² term produced by affinely quantizing p²/2m.
pub const AFFINE_ALPHA: f64 = 0.75;

/// Mass, angular frequency and reduced Planck constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    mass: f64,
    omega: f64,
    hbar: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain {
                what: "mass",
                value: mass,
            });
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::Domain {
                what: "omega",
                value: omega,
            });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Domain {
                what: "hbar",
                value: hbar,
            });
        }
        Ok(Self { mass, omega, hbar })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// λ = mω/ħ.
    pub fn lambda(&self) -> f64 {
        self.mass * self.omega / self.hbar
    }

    /// ħω.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.omega
    }

    /// E = ε ħ²/(2m).
    pub fn to_physical_energy(&self, eps: f64) -> f64 {
        eps * self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// ε = 2mE/ħ².
    pub fn to_dimensionless_energy(&self, energy: f64) -> f64 {
        2.0 * self.mass * energy / (self.hbar * self.hbar)
    }
}

/// `V(x) = alpha/(x+b)² + lambda2·x²`, defined for x > −b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpikedPotential {
    pub alpha: f64,
    pub lambda2: f64,
    pub b: f64,
}

impl SpikedPotential {
    pub fn new(alpha: f64, lambda2: f64, b: f64) -> Result<Self> {
        if !(lambda2 >= 0.0 && lambda2.is_finite()) {
            return Err(Error::Domain {
                what: "lambda2",
                value: lambda2,
            });
        }
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Domain {
                what: "shift b",
                value: b,
            });
        }
        if !alpha.is_finite() {
            return Err(Error::Domain {
                what: "alpha",
                value: alpha,
            });
        }
        Ok(Self { alpha, lambda2, b })
    }

    /// Free affine particle: `(3/4)/x²`.
    pub fn free_affine() -> Self {
        Self {
            alpha: AFFINE_ALPHA,
            lambda2: 0.0,
            b: 0.0,
        }
    }

    /// Half harmonic oscillator: `(3/4)/x² + λ²x²`.
    pub fn half_oscillator(params: &PhysicalParams) -> Self {
        Self::shifted_oscillator(params, 0.0)
    }

    /// Shifted oscillator `(3/4)/(x+b)² + λ²x²` on x > −b.
    pub fn shifted_oscillator(params: &PhysicalParams, b: f64) -> Self {
        let lambda = params.lambda();
        Self {
            alpha: AFFINE_ALPHA,
            lambda2: lambda * lambda,
            b,
        }
    }

    /// V at the physical coordinate x.
    pub fn eval(&self, x: f64) -> Result<f64> {
        eval_potential(self, x)
    }

    /// V at the grid coordinate u = x + b, where the singular point sits at u = 0.
    pub fn eval_shifted(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::Domain {
                what: "shifted coordinate u = x + b",
                value: u,
            });
        }
        let x = u - self.b;
        Ok(self.alpha / (u * u) + self.lambda2 * x * x)
    }
}

/// `α/(x+b)² + λ²x²`; requires x + b > 0.
pub fn eval_potential(pot: &SpikedPotential, x: f64) -> Result<f64> {
    let u = x + pot.b;
    if !(u > 0.0) {
        return Err(Error::Domain {
            what: "potential argument x + b",
            value: u,
        });
    }
    Ok(pot.alpha / (u * u) + pot.lambda2 * x * x)
}

/// Uniform interior grid on (0, xmax): nodes `x_i = i·h`, `i = 1..=npoints`,
/// with `h = xmax/(npoints+1)`. Both endpoints carry implicit Dirichlet zeros.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfLineGrid {
    xmax: f64,
    npoints: usize,
}

impl HalfLineGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(xmax: f64, npoints: usize) -> Result<Self> {
        if !(xmax > 0.0 && xmax.is_finite()) {
            return Err(Error::Domain {
                what: "grid xmax",
                value: xmax,
            });
        }
        if npoints < Self::MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} interior points, got {npoints}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { xmax, npoints })
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }

    pub fn spacing(&self) -> f64 {
        self.xmax / (self.npoints + 1) as f64
    }

    /// Interior node `i` in `0..npoints` (so `node(0) = h`).
    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.npoints).map(move |i| self.node(i))
    }

    /// Grid with the spacing halved: `npoints' + 1 = 2(npoints + 1)`.
    pub fn refined(&self) -> Self {
        Self {
            xmax: self.xmax,
            npoints: 2 * (self.npoints + 1) - 1,
        }
    }
}

/// Real samples of ψ on the interior nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    grid: HalfLineGrid,
    values: Vec<f64>,
}

impl Wavefunction {
    pub fn new(grid: HalfLineGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.npoints() {
            return Err(Error::InvalidParameter(format!(
                "wavefunction has {} samples for a {}-point grid",
                values.len(),
                grid.npoints()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: HalfLineGrid, f: F) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: HalfLineGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.npoints()],
        }
    }

    pub fn grid(&self) -> &HalfLineGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Trapezoidal ∫|ψ|²dx; the boundary samples are zero so this is h·Σψᵢ².
    pub fn norm_sq(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Copy scaled to unit trapezoidal norm. A zero function is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v / n).collect(),
        }
    }

    /// ψ at an arbitrary x by four-point cubic Lagrange interpolation over the
    /// samples padded with the boundary zeros; zero outside [0, xmax].
    pub fn interpolate(&self, x: f64) -> f64 {
        let h = self.grid.spacing();
        let last = self.grid.npoints() + 1;
        if !(0.0..=self.grid.xmax()).contains(&x) {
            return 0.0;
        }
        let sample = |j: usize| -> f64 {
            if j == 0 || j == last {
                0.0
            } else {
                self.values[j - 1]
            }
        };
        let t = x / h;
        let base = (t.floor() as usize).saturating_sub(1).min(last - 3);
        let mut acc = 0.0;
        for a in 0..4 {
            let ja = base + a;
            let mut weight = 1.0;
            for c in 0..4 {
                if c != a {
                    let jc = (base + c) as f64;
                    weight *= (t - jc) / (ja as f64 - jc);
                }
            }
            acc += weight * sample(ja);
        }
        acc
    }

    /// Number of sign changes between consecutive samples, ignoring samples
    /// smaller than `tol·max|ψ|`.
    pub fn sign_changes(&self, tol: f64) -> usize {
        count_sign_changes(&self.values, tol)
    }
}

pub(crate) fn count_sign_changes(values: &[f64], tol: f64) -> usize {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cut = tol * scale;
    let mut last_sign = 0.0;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= cut {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            changes += 1;
        }
        last_sign = s;
    }
    changes
}

/// Complex samples stored as separate real and imaginary grids.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexWavefunction {
    pub re: Wavefunction,
    pub im: Wavefunction,
}

impl ComplexWavefunction {
    pub fn from_real(psi: Wavefunction) -> Self {
        let im = Wavefunction::zeros(*psi.grid());
        Self { re: psi, im }
    }

    pub fn norm(&self) -> f64 {
        (self.re.norm_sq() + self.im.norm_sq()).sqrt()
    }
}

/// Unitary dilation `(U(s)ψ)(x) = e^{s/2} ψ(e^s x)`.
pub fn dilation_apply(psi: &Wavefunction, s: f64) -> Wavefunction {
    if s == 0.0 {
        return psi.clone();
    }
    let scale = s.exp();
    let amp = (0.5 * s).exp();
    Wavefunction::from_fn(*psi.grid(), |x| amp * psi.interpolate(scale * x))
}

/// `x ψ'(x) + ψ(x)/2` with centered differences and second-order one-sided
/// stencils at the first and last interior nodes.
fn scaling_derivative(values: &[f64], grid: &HalfLineGrid) -> Vec<f64> {
    let n = values.len();
    let h = grid.spacing();
    let deriv = |i: usize| -> f64 {
        if i == 0 {
            (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
        } else if i == n - 1 {
            (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
        } else {
            (values[i + 1] - values[i - 1]) / (2.0 * h)
        }
    };
    (0..n)
        .map(|i| grid.node(i) * deriv(i) + 0.5 * values[i])
        .collect()
}

/// d̂ψ = −iħ(xψ′ + ψ/2) for a real ψ; the result is purely imaginary.
pub fn dilation_generator_apply(
    psi: &Wavefunction,
    params: &PhysicalParams,
) -> ComplexWavefunction {
    let grid = *psi.grid();
    let g = scaling_derivative(psi.values(), &grid);
    ComplexWavefunction {
        re: Wavefunction::zeros(grid),
        im: Wavefunction {
            grid,
            values: g.into_iter().map(|v| -params.hbar() * v).collect(),
        },
    }
}

/// d̂ applied to a complex ψ, by linearity over its real and imaginary parts.
pub fn dilation_generator_apply_complex(
    psi: &ComplexWavefunction,
    params: &PhysicalParams,
) -> ComplexWavefunction {
    let grid = *psi.re.grid();
    let hbar = params.hbar();
    let g_re = scaling_derivative(psi.re.values(), &grid);
    let g_im = scaling_derivative(psi.im.values(), &grid);
    // −iħ(g_re + i g_im) = ħ g_im − iħ g_re
    ComplexWavefunction {
        re: Wavefunction {
            grid,
            values: g_im.into_iter().map(|v| hbar * v).collect(),
        },
        im: Wavefunction {
            grid,
            values: g_re.into_iter().map(|v| -hbar * v).collect(),
        },
    }
}

fn position_apply(psi: &ComplexWavefunction) -> ComplexWavefunction {
    let grid = *psi.re.grid();
    let mul = |w: &Wavefunction| Wavefunction {
        grid,
        values: w
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| grid.node(i) * v)
            .collect(),
    };
    ComplexWavefunction {
        re: mul(&psi.re),
        im: mul(&psi.im),
    }
}

/// L² norm of `([x̂, d̂] − iħx̂)ψ` built from the discrete operators.
///
/// Only meaningful for ψ that vanish near both ends of the grid: the
/// one-sided boundary stencils are not designed to reproduce the
/// commutator there.
pub fn commutator_residual(psi: &Wavefunction, params: &PhysicalParams) -> f64 {
    commutator_defect(psi, params, 1.0)
}

/// L² norm of `([x̂, d̂] − c·iħx̂)ψ`; `c = 1` is the affine commutation relation.
pub fn commutator_defect(psi: &Wavefunction, params: &PhysicalParams, c: f64) -> f64 {
    let psi = ComplexWavefunction::from_real(psi.clone());
    let x_psi = position_apply(&psi);
    let x_d_psi = position_apply(&dilation_generator_apply_complex(&psi, params));
    let d_x_psi = dilation_generator_apply_complex(&x_psi, params);
    let hbar = c * params.hbar();
    // i ħ x ψ = −ħ Im(xψ) + iħ Re(xψ)
    let grid = *psi.re.grid();
    let h = grid.spacing();
    let mut sum = 0.0;
    for i in 0..grid.npoints() {
        let re = x_d_psi.re.values[i] - d_x_psi.re.values[i] + hbar * x_psi.im.values[i];
        let im = x_d_psi.im.values[i] - d_x_psi.im.values[i] - hbar * x_psi.re.values[i];
        sum += re * re + im * im;
    }
    (h * sum).sqrt()
}

/// Smooth test function vanishing at both ends of the grid:
/// `x²(xmax−x)² exp(−(x − xmax/2)²/8)`, normalized to unit L² norm.
pub fn standard_test_function(grid: HalfLineGrid) -> Wavefunction {
    let xmax = grid.xmax();
    let centre = 0.5 * xmax;
    Wavefunction::from_fn(grid, |x| {
        let d = x - centre;
        x * x * (xmax - x) * (xmax - x) * (-d * d / 8.0).exp()
    })
    .normalized()
}
