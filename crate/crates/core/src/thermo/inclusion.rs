use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{entropy, lyapunov, maximizer, phi, MovedSystem, ProbabilityVector};
use crate::error::{finite, Error, Result};
use crate::geometry::{Disk, Interval};

/// Margins at or above this count as inside.
pub const INCLUSION_TOL: f64 = 1e-9;

/// The disk with real diameter `[-|λ|²/ρ², 1]`.
pub fn apu_disk(lambda: Complex64, rho: f64) -> Disk {
    let s = lambda.norm_sqr() / (rho * rho);
    Disk::from_real_diameter(Interval { lo: -s, hi: 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApuPoint {
    pub lambda: Complex64,
    pub phi: Complex64,
    /// `radius - |Φ - center|`; negative outside.
    pub margin: f64,
    pub inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApuReport {
    pub rho: f64,
    pub points: Vec<ApuPoint>,
    pub worst_margin: f64,
    pub violations: usize,
}

/// Check `Φ(λ)` against the disk with real diameter `[-|λ|²/ρ², 1]` at every sampled `λ`.
pub fn apu_check(sys: &MovedSystem, p: &ProbabilityVector, rho: f64, lambdas: &[Complex64]) -> Result<ApuReport> {
    let rho = finite(rho, "rho")?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho = {rho} is outside (0, 1)")));
    }
    if let Some(l) = lambdas.iter().find(|l| l.norm() >= rho) {
        return Err(Error::Domain(format!("lambda {l} is outside the disk of radius {rho}")));
    }
    let points = lambdas
        .iter()
        .map(|&lambda| {
            let f = phi(sys, p, lambda)?;
            let margin = apu_disk(lambda, rho).margin(f);
            Ok(ApuPoint {
                lambda,
                phi: f,
                margin,
                inside: margin >= -INCLUSION_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst_margin = points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    let violations = points.iter().filter(|p| !p.inside).count();
    Ok(ApuReport {
        rho,
        points,
        worst_margin,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TechniReport {
    pub k: f64,
    pub rho: f64,
    pub delta: f64,
    pub r_term: f64,
    /// `(k/ρ)² + r_term`.
    pub s: f64,
    /// `Σ (a r_j)^δ`, required to be at least 1.
    pub scaled_sum: f64,
    pub lyapunov_0: Complex64,
    pub lyapunov_k: Complex64,
    /// `Λ_p(k) / Λ_p(0)`.
    pub ratio: Complex64,
    /// `Re(I_p / Λ_p(k)) - (1 - s)`.
    pub lower_bound_margin: f64,
    /// Best margin of `ratio` over the disks `b·B̄(1/(1-s²), s/(1-s²))`, `b ∈ [δ, 1]`.
    pub membership_margin: f64,
    pub witness_b: f64,
    pub inside: bool,
}

fn scaled_margin(z: Complex64, b: f64, s: f64) -> f64 {
    let denom = 1.0 - s * s;
    b * s / denom - (z - b / denom).norm()
}

/// Maximize the concave margin `b ↦ b·R - |z - b·C|` over `[lo, 1]`.
fn best_b(z: Complex64, lo: f64, s: f64) -> (f64, f64) {
    if lo >= 1.0 {
        return (1.0, scaled_margin(z, 1.0, s));
    }
    let (mut a, mut b) = (lo, 1.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let m1 = b - g * (b - a);
        let m2 = a + g * (b - a);
        if scaled_margin(z, m1, s) < scaled_margin(z, m2, s) {
            a = m1;
        } else {
            b = m2;
        }
    }
    let mid = 0.5 * (a + b);
    [lo, mid, 1.0]
        .into_iter()
        .map(|b| (b, scaled_margin(z, b, s)))
        .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Lower bound `Re(I_p/Λ_p(k)) ≥ 1 - s` and membership of `Λ_p(k)/Λ_p(0)` in
/// `⋃_{b∈[δ,1]} b·B̄(1/(1-s²), s/(1-s²))` for the maximizer `p` at `δ`.
pub fn techni_check(sys: &MovedSystem, k: f64, rho: f64, delta: f64, r_term: f64) -> Result<TechniReport> {
    let k = finite(k, "k")?;
    let rho = finite(rho, "rho")?;
    let r_term = finite(r_term, "R-term")?;
    if !(0.0 <= k && k < rho && rho < 1.0) {
        return Err(Error::Domain(format!("need 0 <= k < rho < 1, got k = {k}, rho = {rho}")));
    }
    let scaled_sum = sys.base().scaled_sum(delta);
    // a = 1/Σr_j lands a few ulps under 1 at δ = 1
    if scaled_sum < 1.0 - 1e-12 {
        return Err(Error::Precondition(format!(
            "sum of (a r_j)^delta is {scaled_sum}, below 1"
        )));
    }
    let s = (k / rho).powi(2) + r_term;
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} is outside [0, 1)")));
    }
    let p = maximizer(sys, delta)?;
    let l0 = lyapunov(sys, &p, Complex64::new(0.0, 0.0))?;
    let lk = lyapunov(sys, &p, Complex64::new(k, 0.0))?;
    if lk.norm() == 0.0 || l0.norm() == 0.0 {
        return Err(Error::Singular("Lyapunov exponent vanishes".into()));
    }
    let ratio = lk / l0;
    let lower_bound_margin = (entropy(&p) / lk).re - (1.0 - s);
    let (witness_b, membership_margin) = best_b(ratio, delta, s);
    Ok(TechniReport {
        k,
        rho,
        delta,
        r_term,
        s,
        scaled_sum,
        lyapunov_0: l0,
        lyapunov_k: lk,
        ratio,
        lower_bound_margin,
        membership_margin,
        witness_b,
        inside: membership_margin >= -INCLUSION_TOL,
    })
}
