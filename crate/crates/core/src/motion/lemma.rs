use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Radii of the circles on which the disk constraint is verified.
pub const VERIFICATION_RADII: [f64; 8] = [1.0 / 64.0, 1.0 / 16.0, 0.125, 0.25, 0.375, 0.5, 0.75, 1.0];
pub const VERIFICATION_ANGLES: usize = 256;
const CONSTRAINT_TOL: f64 = 1e-12;
const BOUNDARY_POINTS: usize = 512;
const MAX_DEGREE: usize = 6;
const SCHWARZ_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchwarzStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwarzVerdict {
    pub status: SchwarzStatus,
    /// `|g(k)|`.
    pub value: f64,
    /// `k²`.
    pub bound: f64,
    pub reason: Option<String>,
}

/// For `g: 𝔻 → 𝔻̄` with `g(0) = g'(0) = 0`, check `|g(k)| ≤ k²`. Inputs
/// violating the hypotheses on the sample grid are skipped, not failed.
pub fn schwarz_check(g: &dyn Fn(Complex64) -> Complex64, k: f64) -> Result<SchwarzVerdict> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("k = {k} is outside (0, 1)")));
    }
    let bound = k * k;
    let skip = |reason: String| SchwarzVerdict {
        status: SchwarzStatus::Skipped,
        value: f64::NAN,
        bound,
        reason: Some(reason),
    };
    for &r in &[0.25, 0.5, 0.75, 0.9, 0.99] {
        for j in 0..64 {
            let w = g(Complex64::from_polar(r, TAU * j as f64 / 64.0));
            if !(w.norm() <= 1.0 + CONSTRAINT_TOL) {
                return Ok(skip(format!("|g| = {} > 1 on |z| = {r}", w.norm())));
            }
        }
    }
    let g0 = g(Complex64::new(0.0, 0.0)).norm();
    if g0 >= 1e-10 {
        return Ok(skip(format!("|g(0)| = {g0:e}")));
    }
    // first Fourier coefficient on |z| = 1/2 divided by the radius
    let n = 64;
    let r = 0.5;
    let d0 = (0..n)
        .map(|j| {
            let u = Complex64::from_polar(1.0, TAU * j as f64 / n as f64);
            g(u * r) * u.conj()
        })
        .sum::<Complex64>()
        / (n as f64 * r);
    if d0.norm() >= 1e-6 {
        return Ok(skip(format!("|g'(0)| = {:e}", d0.norm())));
    }
    let value = g(Complex64::new(k, 0.0)).norm();
    Ok(SchwarzVerdict {
        status: if value <= bound + SCHWARZ_TOL {
            SchwarzStatus::Pass
        } else {
            SchwarzStatus::Fail
        },
        value,
        bound,
        reason: None,
    })
}

/// `|f(z) - (1 - |z|²)/2| ≤ (1 + |z|²)/2` on the verification circles, i.e.
/// `f(z)` lies in the disk with real diameter `[-|z|², 1]`.
pub fn constraint_holds(f: &dyn Fn(Complex64) -> Complex64) -> bool {
    VERIFICATION_RADII.iter().all(|&r| {
        let r2 = r * r;
        let center = 0.5 * (1.0 - r2);
        let radius = 0.5 * (1.0 + r2);
        (0..VERIFICATION_ANGLES).all(|j| {
            let w = f(Complex64::from_polar(r, TAU * j as f64 / VERIFICATION_ANGLES as f64));
            (w - center).norm() <= radius + CONSTRAINT_TOL
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma31Params {
    pub epsilons: Vec<f64>,
    pub k: f64,
    pub candidates: usize,
    pub seed: u64,
    /// Envelope `k² + envelope_factor·ε`.
    pub envelope_factor: f64,
}

impl Default for Lemma31Params {
    fn default() -> Self {
        Self {
            epsilons: vec![0.1, 0.03, 0.01],
            k: 0.5,
            candidates: 10_000,
            seed: 0,
            envelope_factor: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Row {
    pub epsilon: f64,
    pub candidates: usize,
    /// Accepted at this level, including those accepted at smaller levels.
    pub accepted: usize,
    /// `max |f(k)|` over accepted functions; `None` when nothing was accepted.
    pub max_abs: Option<f64>,
    pub source: String,
    pub envelope: f64,
    pub within_envelope: bool,
    pub inconclusive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Table {
    pub k: f64,
    pub seed: u64,
    pub rows: Vec<Lemma31Row>,
    /// Envelope non-increasing as `ε` decreases.
    pub monotone: bool,
    /// `z²` was accepted at every level and reaches `k²`.
    pub witness_found: bool,
}

fn disk_point<R: Rng>(rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm_sqr() < 1.0 {
            return z;
        }
    }
}

/// `e^{iθ}(z - a)/(1 - ā z)`.
#[derive(Clone, Copy, Debug)]
struct Automorphism {
    a: Complex64,
    rot: Complex64,
}

impl Automorphism {
    fn apply(&self, z: Complex64) -> Complex64 {
        self.rot * (z - self.a) / (1.0 - self.a.conj() * z)
    }
}

/// `S ∘ P ∘ A` with `P` a polynomial scaled into the unit disk and `S` an
/// automorphism sending `P(A(0))` to `eta`.
#[derive(Clone, Debug)]
struct Candidate {
    coef: Vec<Complex64>,
    pre: Option<Automorphism>,
    from: Complex64,
    eta: Complex64,
}

impl Candidate {
    fn inner(&self, z: Complex64) -> Complex64 {
        let z = self.pre.map_or(z, |a| a.apply(z));
        self.coef.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let w = self.inner(z);
        let u = (w - self.from) / (1.0 - self.from.conj() * w);
        (u + self.eta) / (1.0 + self.eta.conj() * u)
    }

    fn draw(rng: &mut ChaCha8Rng, epsilon: f64) -> Option<Self> {
        let degree = rng.gen_range(0..=MAX_DEGREE);
        let coef: Vec<Complex64> = (0..=degree).map(|_| disk_point(rng)).collect();
        let pre = if rng.gen_bool(0.5) {
            Some(Automorphism {
                a: disk_point(rng) * 0.9,
                rot: Complex64::from_polar(1.0, rng.gen_range(0.0..TAU)),
            })
        } else {
            None
        };
        let eta = disk_point(rng) * epsilon;
        let mut c = Self {
            coef,
            pre,
            from: Complex64::new(0.0, 0.0),
            eta,
        };
        let sup = (0..BOUNDARY_POINTS)
            .map(|j| c.inner(Complex64::from_polar(1.0, TAU * j as f64 / BOUNDARY_POINTS as f64)).norm())
            .fold(0.0, f64::max);
        if !(sup > 0.0 && sup.is_finite()) {
            return None;
        }
        // a little headroom for the gap between the grid sup and the true sup
        let scale = 1.0 / (sup * 1.001);
        c.coef.iter_mut().for_each(|v| *v *= scale);
        c.from = c.inner(Complex64::new(0.0, 0.0));
        if c.from.norm() >= 1.0 {
            return None;
        }
        Some(c)
    }
}

/// Empirical lower envelope of `sup |f(k)|` over holomorphic `f: 𝔻 → 𝔻` with
/// `|f(0)| ≤ ε` whose values satisfy the disk constraint on the verification circles.
pub fn lemma31_experiment(params: &Lemma31Params) -> Result<Lemma31Table> {
    let k = params.k;
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("k = {k} is outside (0, 1)")));
    }
    if params.epsilons.is_empty() {
        return Err(Error::Domain("empty epsilon grid".into()));
    }
    if let Some(e) = params.epsilons.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::Domain(format!("epsilon {e} is outside (0, 1)")));
    }
    let kz = Complex64::new(k, 0.0);
    let square = |z: Complex64| z * z;
    let witness_ok = constraint_holds(&square);

    // best (value, label) among accepted candidates per level
    let mut per_level: Vec<(usize, Option<(f64, String)>)> = Vec::new();
    for (level, &eps) in params.epsilons.iter().enumerate() {
        let found: Vec<Option<f64>> = (0..params.candidates)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(((level as u64) << 32) | i as u64);
                let c = Candidate::draw(&mut rng, eps)?;
                if c.eval(Complex64::new(0.0, 0.0)).norm() > eps || !constraint_holds(&|z| c.eval(z)) {
                    return None;
                }
                Some(c.eval(kz).norm())
            })
            .collect();
        let mut count = 0;
        let mut best: Option<(f64, String)> = None;
        let mut offer = |v: f64, label: String| {
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, label));
            }
        };
        for (i, v) in found.iter().enumerate() {
            if let Some(v) = v {
                count += 1;
                offer(*v, format!("random eps={eps} #{i}"));
            }
        }
        let constant = move |_: Complex64| Complex64::new(eps, 0.0);
        if constraint_holds(&constant) {
            count += 1;
            offer(eps, "constant".into());
        }
        if witness_ok {
            count += 1;
            offer(square(kz).norm(), "z^2".into());
        }
        per_level.push((count, best));
    }

    // F_ε grows with ε, so a level also keeps everything accepted at smaller levels
    let mut order: Vec<usize> = (0..params.epsilons.len()).collect();
    order.sort_by(|&a, &b| params.epsilons[a].total_cmp(&params.epsilons[b]));
    let mut rows: Vec<Option<Lemma31Row>> = vec![None; order.len()];
    let mut acc_count = 0;
    let mut acc_best: Option<(f64, String)> = None;
    for &idx in &order {
        let (count, best) = &per_level[idx];
        acc_count += count;
        if let Some(b) = best {
            if acc_best.as_ref().is_none_or(|a| b.0 > a.0) {
                acc_best = Some(b.clone());
            }
        }
        let eps = params.epsilons[idx];
        let envelope = k * k + params.envelope_factor * eps;
        rows[idx] = Some(Lemma31Row {
            epsilon: eps,
            candidates: params.candidates,
            accepted: acc_count,
            max_abs: acc_best.as_ref().map(|b| b.0),
            source: acc_best.as_ref().map_or(String::new(), |b| b.1.clone()),
            envelope,
            within_envelope: acc_best.as_ref().is_none_or(|b| b.0 <= envelope),
            inconclusive: acc_count == 0,
        });
    }
    let rows: Vec<Lemma31Row> = rows.into_iter().map(|r| r.expect("every level filled")).collect();
    let monotone = order
        .windows(2)
        .all(|w| rows[w[0]].max_abs.unwrap_or(f64::NEG_INFINITY) <= rows[w[1]].max_abs.unwrap_or(f64::NEG_INFINITY));
    let witness_found = witness_ok && rows.iter().all(|r| r.max_abs.is_some_and(|m| m >= k * k - 1e-15));
    Ok(Lemma31Table {
        k,
        seed: params.seed,
        rows,
        monotone,
        witness_found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn schwarz_examples() {
        let v = schwarz_check(&|z| z * z, 0.5).unwrap();
        assert_eq!(v.status, SchwarzStatus::Pass);
        assert_relative_eq!(v.value, 0.25, epsilon = 1e-16);
        let v = schwarz_check(&|_| c(0.0, 0.0), 0.3).unwrap();
        assert_eq!(v.status, SchwarzStatus::Pass);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn schwarz_skips_on_hypothesis_failure() {
        assert_eq!(schwarz_check(&|z| z, 0.5).unwrap().status, SchwarzStatus::Skipped);
        assert_eq!(schwarz_check(&|z| z * z + 0.1, 0.5).unwrap().status, SchwarzStatus::Skipped);
        assert_eq!(schwarz_check(&|z| 2.0 * z * z, 0.5).unwrap().status, SchwarzStatus::Skipped);
    }

    #[test]
    fn constraint_on_witnesses() {
        assert!(constraint_holds(&|z| z * z));
        assert!(constraint_holds(&|_| c(0.05, 0.0)));
        assert!(!constraint_holds(&|z| z));
        assert!(!constraint_holds(&|_| c(-0.01, 0.0)));
    }

    #[test]
    fn candidate_draw_is_reproducible_and_bounded() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let ca = Candidate::draw(&mut a, 0.1).unwrap();
        let cb = Candidate::draw(&mut b, 0.1).unwrap();
        for j in 0..100 {
            let z = Complex64::from_polar(0.99, j as f64 * 0.0628);
            assert_eq!(ca.eval(z), cb.eval(z));
            assert!(ca.eval(z).norm() <= 1.0);
        }
        assert!((ca.eval(c(0.0, 0.0)) - ca.eta).norm() < 1e-14);
    }

    #[test]
    fn small_experiment_table() {
        let params = Lemma31Params {
            candidates: 200,
            ..Default::default()
        };
        let t = lemma31_experiment(&params).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.monotone);
        assert!(t.witness_found);
        assert!(t.rows.iter().all(|r| r.accepted >= 2));
        assert_eq!(t, lemma31_experiment(&params).unwrap());
    }
}
