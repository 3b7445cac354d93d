//! Closed-form eigenstates of the affinely quantized free particle and half
//! harmonic oscillator.
//!
//! The free particle has the continuum `φ_k(x) = (kx)^{1/2} J₁(kx)`. The
//! oscillator is reduced to Kummer's equation through the ansatz
//! `φ = x^{β+1} e^{−λx²/2} v(λx²)` with `α = β(β+1) = 3/4`; requiring the
//! ₁F₁ series to terminate gives `E_n = 2(n+1)ħω` on both admissible branches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PhysicalParams, AFFINE_ALPHA};
use crate::specfun::{bessel_j1, gamma_fn, kummer_1f1, pochhammer, KummerParams};

/// Free-particle continuum state with wavenumber k > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringState {
    k: f64,
    energy: f64,
}

impl ScatteringState {
    pub fn new(k: f64, params: &PhysicalParams) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain {
                what: "wavenumber k",
                value: k,
            });
        }
        Ok(Self {
            k,
            energy: free_energy(k, params),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn eval(&self, x: f64) -> f64 {
        free_eigenfunction(self.k, x)
    }
}

/// φ_k(x) = (kx)^{1/2} J₁(kx).
pub fn free_eigenfunction(k: f64, x: f64) -> f64 {
    debug_assert!(k > 0.0 && x >= 0.0);
    let kx = k * x;
    kx.sqrt() * bessel_j1(kx)
}

/// E_k = k²ħ²/(2m).
pub fn free_energy(k: f64, params: &PhysicalParams) -> f64 {
    params.to_physical_energy(k * k)
}

/// E_n = 2(n+1)ħω.
pub fn ho_energy(n: u32, params: &PhysicalParams) -> f64 {
    2.0 * (n as f64 + 1.0) * params.energy_scale()
}

/// Which termination condition produced the eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Regular Kummer solution terminates: `½(β+3/2) − ½μ = −n`, with β = +1/2.
    FirstCondition,
    /// Irregular Kummer solution terminates: `½(−β+1/2) − ½μ = −n`, with β = −3/2.
    SecondCondition,
}

impl Branch {
    /// The ansatz exponent for which this branch gives a well-defined ₁F₁.
    pub fn admissible_beta(self) -> f64 {
        match self {
            Branch::FirstCondition => 0.5,
            Branch::SecondCondition => -1.5,
        }
    }

    fn check(self, beta: f64) -> Result<()> {
        if beta == self.admissible_beta() {
            Ok(())
        } else {
            Err(Error::InadmissibleBranch(format!(
                "{self:?} with beta = {beta} leads to an undefined 1F1"
            )))
        }
    }
}

/// Roots of β(β+1) = α, larger first. For α = 3/4 these are +1/2 and −3/2.
pub fn ansatz_exponents(alpha: f64) -> (f64, f64) {
    let disc = (1.0 + 4.0 * alpha).sqrt();
    (0.5 * (-1.0 + disc), 0.5 * (-1.0 - disc))
}

/// Parameters of the Kummer equation obtained from the ansatz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KummerReduction {
    /// Ansatz exponent β.
    pub beta: f64,
    /// μ = k²/(2λ) with k² the dimensionless eigenvalue.
    pub mu: f64,
    /// Second Kummer parameter of the regular solution, β + 3/2.
    pub gamma_c: f64,
}

impl KummerReduction {
    pub fn new(beta: f64, eps: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain {
                what: "lambda",
                value: lambda,
            });
        }
        let alpha = beta * (beta + 1.0);
        if (alpha - AFFINE_ALPHA).abs() > 1e-15 {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} gives alpha = {alpha}, not 3/4"
            )));
        }
        Ok(Self {
            beta,
            mu: eps / (2.0 * lambda),
            gamma_c: beta + 1.5,
        })
    }

    /// First parameter of the regular solution ₁F₁(a, β+3/2, y).
    pub fn regular_a(&self) -> f64 {
        0.5 * self.gamma_c - 0.5 * self.mu
    }

    /// Parameters of the irregular solution y^{−(β+1/2)} ₁F₁(a', 1/2−β, y).
    pub fn irregular_params(&self) -> (f64, f64) {
        (0.5 * (-self.beta + 0.5) - 0.5 * self.mu, 0.5 - self.beta)
    }

    /// μ at which the chosen branch's series terminates with degree n.
    pub fn terminating_mu(branch: Branch, beta: f64, n: u32) -> f64 {
        let n = n as f64;
        match branch {
            Branch::FirstCondition => 2.0 * n + beta + 1.5,
            Branch::SecondCondition => 2.0 * n - beta + 0.5,
        }
    }
}

/// ∫₀^∞ x^{2γ−1} e^{−r x²} ₁F₁(−n;γ;r x²) ₁F₁(−m;γ;r x²) dx
/// = ½ n! Γ(γ) / (r^γ (γ)_n) δ_nm.
pub fn landau_integral(n: u32, m: u32, gamma: f64, rate: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain {
            what: "gamma",
            value: gamma,
        });
    }
    if !(rate > 0.0) {
        return Err(Error::Domain {
            what: "rate",
            value: rate,
        });
    }
    if n != m {
        return Ok(0.0);
    }
    let n_fact = gamma_fn(n as f64 + 1.0)?;
    Ok(0.5 * n_fact * gamma_fn(gamma)? / (rate.powf(gamma) * pochhammer(gamma, n)?))
}

/// A_n (first branch) or B_n (second branch), obtained from the
/// normalization integral with γ = 2 and rate λ.
pub fn normalization_constant(n: u32, branch: Branch, params: &PhysicalParams) -> Result<f64> {
    let lambda = params.lambda();
    let integral = landau_integral(n, n, 2.0, lambda)?;
    let inv_sqrt = 1.0 / integral.sqrt();
    Ok(match branch {
        Branch::FirstCondition => inv_sqrt,
        // the second-branch wavefunction carries an explicit λ^{−(β+1/2)} = λ
        Branch::SecondCondition => inv_sqrt / lambda,
    })
}

/// Bound state of the half harmonic oscillator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticEigenstate {
    n: u32,
    branch: Branch,
    beta: f64,
    norm_constant: f64,
    energy: f64,
    lambda: f64,
}

impl AnalyticEigenstate {
    pub fn new(n: u32, branch: Branch, params: &PhysicalParams) -> Result<Self> {
        let beta = branch.admissible_beta();
        let energy = quantization_energies(branch, beta, n as usize + 1, params)?[n as usize];
        Ok(Self {
            n,
            branch,
            beta,
            norm_constant: normalization_constant(n, branch, params)?,
            energy,
            lambda: params.lambda(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// φ_n(x) for x > 0, assembled from the branch's own closed form.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain {
                what: "eigenfunction argument",
                value: x,
            });
        }
        let y = self.lambda * x * x;
        let gauss = (-0.5 * y).exp();
        match self.branch {
            Branch::FirstCondition => {
                let p = KummerParams::terminating(self.n, self.beta + 1.5)?;
                Ok(self.norm_constant * x.powf(self.beta + 1.0) * gauss * kummer_1f1(p, y)?)
            }
            Branch::SecondCondition => {
                let p = KummerParams::terminating(self.n, 0.5 - self.beta)?;
                let prefactor = self.lambda.powf(-(self.beta + 0.5));
                Ok(self.norm_constant * prefactor * x.powf(-self.beta) * gauss * kummer_1f1(p, y)?)
            }
        }
    }
}

/// φ_n(x) of the half oscillator on the chosen branch.
pub fn ho_eigenfunction(n: u32, branch: Branch, params: &PhysicalParams, x: f64) -> Result<f64> {
    AnalyticEigenstate::new(n, branch, params)?.eval(x)
}

/// The lowest `count` energies allowed by the branch's termination condition.
pub fn quantization_energies(
    branch: Branch,
    beta: f64,
    count: usize,
    params: &PhysicalParams,
) -> Result<Vec<f64>> {
    branch.check(beta)?;
    // E = μħω since ε = 2λμ and E = ε ħ²/(2m)
    Ok((0..count as u32)
        .map(|n| KummerReduction::terminating_mu(branch, beta, n) * params.energy_scale())
        .collect())
}
