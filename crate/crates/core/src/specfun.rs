//! Special functions and quadrature used by the closed-form eigenstates.
//!
//! Everything here is real-argument and restricted to what the half-line
//! models need: Γ on the positive axis, rising factorials, J₁ and its zeros,
//! terminating Kummer series, associated Laguerre polynomials and
//! Gauss–Legendre rules.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Argument above which [`bessel_j1`] switches from the power series to the
/// Hankel asymptotic expansion.
pub const J1_CROSSOVER: f64 = 12.0;

/// Largest Gauss–Legendre rule for which node iteration is guaranteed.
pub const MAX_GAUSS_POINTS: usize = 512;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for z > 0.
///
/// Positive integers up to 171 are returned as exact factorial products;
/// everything else goes through a fixed-coefficient Lanczos sum, with the
/// upward recurrence Γ(z) = Γ(z+1)/z for z < 1/2.
pub fn gamma_fn(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            what: "gamma_fn argument",
            value: z,
        });
    }
    if z.fract() == 0.0 && z <= 171.0 {
        let n = z as u64;
        return Ok((1..n).fold(1.0, |acc, k| acc * k as f64));
    }
    if z < 0.5 {
        return Ok(lanczos(z + 1.0) / z);
    }
    Ok(lanczos(z))
}

fn lanczos(z: f64) -> f64 {
    let z = z - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
}

/// Rising factorial (g)_n = g(g+1)…(g+n−1) = Γ(g+n)/Γ(g).
pub fn pochhammer(g: f64, n: u32) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::Domain {
            what: "pochhammer base",
            value: g,
        });
    }
    Ok((0..n).fold(1.0, |acc, k| acc * (g + k as f64)))
}

/// Bessel function of the first kind of order one, for x ≥ 0.
pub fn bessel_j1(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "bessel_j1 is only defined here for x >= 0");
    if x < J1_CROSSOVER {
        bessel_j1_series(x)
    } else {
        bessel_j1_asymptotic(x)
    }
}

/// Ascending power series Σ (−1)^k (x/2)^{2k+1} / (k!(k+1)!).
pub fn bessel_j1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-2 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion, truncated just before its smallest term.
pub fn bessel_j1_asymptotic(x: f64) -> f64 {
    // a_k(1)/x^k with a_k = Π_{j=1..k} (4 − (2j−1)²) / (k! 8^k)
    let mut terms = [0.0_f64; 64];
    terms[0] = 1.0;
    let mut cut = terms.len();
    for k in 1..terms.len() {
        let odd = (2 * k - 1) as f64;
        terms[k] = terms[k - 1] * (4.0 - odd * odd) / (k as f64 * 8.0 * x);
        if terms[k].abs() >= terms[k - 1].abs() {
            cut = k;
            break;
        }
    }
    let mut p = 0.0;
    let mut q = 0.0;
    for (k, t) in terms.iter().enumerate().take(cut) {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// j-th positive zero of J₁ (j ≥ 1), to about 1e-14 absolute.
///
/// McMahon's estimate seeds a bracket that is then bisected on [`bessel_j1`].
pub fn bessel_j1_zero(j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidParameter(
            "bessel_j1_zero index starts at 1".into(),
        ));
    }
    let beta = (j as f64 + 0.25) * PI;
    let guess = beta - 3.0 / (8.0 * beta);
    let mut lo = guess - 0.5;
    let mut hi = guess + 0.5;
    let mut flo = bessel_j1(lo);
    let fhi = bessel_j1(hi);
    if flo.signum() == fhi.signum() {
        return Err(Error::Solver(format!(
            "no sign change bracketing J1 zero #{j}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-15 * hi {
            break;
        }
        let fmid = bessel_j1(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parameters of ₁F₁(a; c; y).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KummerParams {
    a: f64,
    c: f64,
    terminating: bool,
}

impl KummerParams {
    /// General parameters; `terminating` is set when `a` is a non-positive integer.
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if c <= 0.0 && c.fract() == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Kummer parameter c = {c} is zero or a negative integer"
            )));
        }
        let terminating = a <= 0.0 && a.fract() == 0.0;
        Ok(Self { a, c, terminating })
    }

    /// Parameters (−n; c), whose series is a polynomial of degree n.
    pub fn terminating(n: u32, c: f64) -> Result<Self> {
        Self::new(-(n as f64), c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_terminating(&self) -> bool {
        self.terminating
    }

    /// Polynomial degree n when terminating.
    pub fn degree(&self) -> Option<u32> {
        self.terminating.then(|| (-self.a) as u32)
    }
}

/// Terminating confluent hypergeometric series ₁F₁(−n; c; y).
///
/// Evaluated in nested Horner form
/// 1 + (a/c)·y·(1 + (a+1)/(2(c+1))·y·(1 + …)), which has n+1 terms. The
/// alternating terms cancel heavily for large y, so the recurrence runs in
/// double-double arithmetic and is rounded once at the end.
pub fn kummer_1f1(p: KummerParams, y: f64) -> Result<f64> {
    let n = p.degree().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "non-terminating 1F1 (a = {}) is not supported",
            p.a
        ))
    })?;
    let one = DoubleDouble::from(1.0);
    let y = DoubleDouble::from(y);
    let mut acc = one;
    for k in (0..n).rev() {
        let kf = k as f64;
        let num = DoubleDouble::from(p.a + kf);
        let den = DoubleDouble::from(p.c)
            .add(DoubleDouble::from(kf))
            .mul(DoubleDouble::from(kf + 1.0));
        acc = one.add(num.div(den).mul(y).mul(acc));
    }
    Ok(acc.hi + acc.lo)
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        Self::quick_two_sum(s.hi, s.lo + self.lo + other.lo)
    }

    fn sub(self, other: Self) -> Self {
        self.add(Self {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p);
        Self::quick_two_sum(p, e + (self.hi * other.lo + self.lo * other.hi))
    }

    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Self::from(q1)));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul(Self::from(q2)));
        let q3 = r.hi / other.hi;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }
}

/// Associated Laguerre polynomial L_n^{(alpha)}(y) by the three-term recurrence.
pub fn laguerre_assoc(n: u32, alpha: f64, y: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - y;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - y) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    /// Gauss–Legendre nodes mapped affinely onto a finite interval,
    /// typically the truncated half-line [0, X_max].
    GaussLegendreMappedHalfline,
    /// Composite trapezoid on equally spaced nodes, endpoints included.
    TruncatedUniform,
}

/// Immutable set of nodes and positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: QuadratureKind,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ wᵢ f(xᵢ).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds an `npoints` rule of the given kind on `domain = (a, b)`.
pub fn build_quadrature(
    kind: QuadratureKind,
    npoints: usize,
    domain: (f64, f64),
) -> Result<QuadratureRule> {
    let (a, b) = domain;
    if npoints < 2 {
        return Err(Error::InvalidParameter(format!(
            "quadrature needs at least 2 points, got {npoints}"
        )));
    }
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidParameter(format!(
            "quadrature domain ({a}, {b}) must be finite and non-empty"
        )));
    }
    let (nodes, weights) = match kind {
        QuadratureKind::GaussLegendreMappedHalfline => {
            let (x, w) = gauss_legendre(npoints)?;
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            (
                x.iter().map(|t| mid + half * t).collect(),
                w.iter().map(|v| half * v).collect(),
            )
        }
        QuadratureKind::TruncatedUniform => {
            let h = (b - a) / (npoints - 1) as f64;
            let nodes = (0..npoints).map(|i| a + h * i as f64).collect();
            let weights = (0..npoints)
                .map(|i| {
                    if i == 0 || i == npoints - 1 {
                        0.5 * h
                    } else {
                        h
                    }
                })
                .collect();
            (nodes, weights)
        }
    };
    Ok(QuadratureRule {
        nodes,
        weights,
        kind,
    })
}

/// Nodes (ascending) and weights of the n-point Gauss–Legendre rule on [−1, 1].
fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert!(
        n <= MAX_GAUSS_POINTS,
        "Gauss-Legendre rule limited to {MAX_GAUSS_POINTS} points"
    );
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                converged = true;
                break;
            }
        }
        let (p, deriv) = legendre_with_derivative(n, x);
        if !converged && p.abs() > 1e-13 {
            return Err(Error::Solver(format!(
                "Gauss-Legendre node {i} of {n} failed to converge"
            )));
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
