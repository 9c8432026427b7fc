//! Floating-point evaluation of Hilbert theta functions
//! `ϑ[γ̃₁,γ̃₂](z,u) = Σ_{x ∈ 𝔬^∨ + γ̃₁/2} e(tr(½x²z + x(u + γ̃₂/2)))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::group::PseudoMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_RADIUS: f64 = 6.0;
pub const TAIL_TARGET: f64 = 1e-13;
const MAX_RADIUS: f64 = 80.0;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThetaValue {
    pub re: f64,
    pub im: f64,
    /// Bound on the omitted part of the lattice sum.
    pub tail_bound: f64,
    pub terms: usize,
}

impl ThetaValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn e(w: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * w).exp()
}

fn check_point(z: &[Complex64; 2], u: &[Complex64; 2]) -> Result<()> {
    for i in 0..2 {
        if z[i].im.is_nan() || z[i].im <= 0.0 || !z[i].is_finite() || !u[i].is_finite() {
            return Err(Error::NonConvergent(format!(
                "need Im z > 0 and finite input, got z={z:?} u={u:?}"
            )));
        }
    }
    Ok(())
}

/// Bound for `Σ_{x ∈ x₀ + hZ, |x−c| > r} exp(−πy(x−c)²)`.
fn gaussian_tail(r: f64, h: f64, y: f64) -> f64 {
    2.0 * (-PI * y * r * r).exp() / (1.0 - (-2.0 * PI * y * r * h).exp())
}

/// Bound for the full sum over a coset of `hZ`.
fn gaussian_total(h: f64, y: f64) -> f64 {
    1.0 + 1.0 / (h * y.sqrt())
}

fn tail_bound(d: u64, z: &[Complex64; 2], u: &[Complex64; 2], r: f64) -> f64 {
    let h = [1.0, 1.0 / d as f64];
    let y = [z[0].im, z[1].im];
    let peak = (PI * (u[0].im * u[0].im / y[0] + u[1].im * u[1].im / y[1])).exp();
    peak * (gaussian_tail(r, h[0], y[0]) * gaussian_total(h[1], y[1])
        + gaussian_total(h[0], y[0]) * gaussian_tail(r, h[1], y[1]))
}

/// Truncated sum over `x` with `|x^{(i)} − c_i| ≤ radius`, where `c_i`
/// centres the Gaussian factor. Characteristics are taken as integer
/// vectors, not reduced mod 2.
pub fn theta_series(
    g1: [i64; 2],
    g2: [i64; 2],
    d: u64,
    z: [Complex64; 2],
    u: [Complex64; 2],
    radius: f64,
) -> Result<ThetaValue> {
    check_point(&z, &u)?;
    let df = d as f64;
    let c = [-u[0].im / z[0].im, -u[1].im / z[1].im];
    let g2t = [g2[0] as f64, (g2[0] + d as i64 * g2[1]) as f64];
    let (s1, s2) = (g1[0] as f64 / 2.0, g1[1] as f64 / 2.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    // x'' = v₂/d with v₂ ∈ Z + γ₁₂/2, and x' = v₁ − x'' with v₁ ∈ Z + γ₁₁/2.
    let k_lo = (df * (c[1] - radius) - s2).ceil() as i64;
    let k_hi = (df * (c[1] + radius) - s2).floor() as i64;
    for k in k_lo..=k_hi {
        let x2 = (k as f64 + s2) / df;
        let j_lo = (c[0] - radius + x2 - s1).ceil() as i64;
        let j_hi = (c[0] + radius + x2 - s1).floor() as i64;
        for j in j_lo..=j_hi {
            let x1 = j as f64 + s1 - x2;
            let w = 0.5 * (x1 * x1 * z[0] + x2 * x2 * z[1]) + x1 * (u[0] + g2t[0] / 2.0) + x2 * (u[1] + g2t[1] / 2.0);
            sum += e(w);
            terms += 1;
        }
    }
    Ok(ThetaValue {
        re: sum.re,
        im: sum.im,
        tail_bound: tail_bound(d, &z, &u, radius),
        terms,
    })
}

/// Evaluates with the smallest radius (at least the default) whose tail
/// bound is below [`TAIL_TARGET`].
pub fn theta(g1: [i64; 2], g2: [i64; 2], d: u64, z: [Complex64; 2], u: [Complex64; 2]) -> Result<ThetaValue> {
    check_point(&z, &u)?;
    let mut r = DEFAULT_RADIUS;
    while tail_bound(d, &z, &u, r) > TAIL_TARGET {
        r += 1.0;
        if r > MAX_RADIUS {
            return Err(Error::NonConvergent(format!(
                "tail bound above {TAIL_TARGET} at radius {MAX_RADIUS} for z={z:?}"
            )));
        }
    }
    theta_series(g1, g2, d, z, u, r)
}

/// The same function evaluated as a Siegel theta series
/// `Σ_{n ∈ Z² + γ₁/2} e(½ n Z nᵀ + n(Au + ½γ₂ᵀ))` with `Z = A z* Aᵀ`,
/// summed over a box of half-width `box_radius` in `n`.
pub fn siegel_theta(
    g1: [i64; 2],
    g2: [i64; 2],
    d: u64,
    z: [Complex64; 2],
    u: [Complex64; 2],
    box_radius: i64,
) -> Complex64 {
    let df = d as f64;
    // A = [[1, 0], [−1/d, 1/d]]; Z = A diag(z) Aᵀ.
    let a = [[1.0, 0.0], [-1.0 / df, 1.0 / df]];
    let mut zm = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            zm[i][j] = a[i][0] * a[j][0] * z[0] + a[i][1] * a[j][1] * z[1];
        }
    }
    let v = [a[0][0] * u[0] + a[0][1] * u[1], a[1][0] * u[0] + a[1][1] * u[1]];
    let mut sum = Complex64::new(0.0, 0.0);
    for n1 in -box_radius..=box_radius {
        for n2 in -box_radius * d as i64..=box_radius * d as i64 {
            let n = [n1 as f64 + g1[0] as f64 / 2.0, n2 as f64 + g1[1] as f64 / 2.0];
            let mut w = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    w += 0.5 * n[i] * zm[i][j] * n[j];
                }
                w += n[i] * (v[i] + g2[i] as f64 / 2.0);
            }
            sum += e(w);
        }
    }
    sum
}

/// A point of `H² × C²` with `Im z_i ∈ [im_min, im_min + 1]`, `|Re| ≤ ½`
/// and `|Im u_i| ≤ ¼`.
pub fn random_point<R: Rng>(rng: &mut R, im_min: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let mut c = |lo: f64, hi: f64, ilo: f64, ihi: f64| Complex64::new(rng.gen_range(lo..hi), rng.gen_range(ilo..ihi));
    let z = [c(-0.5, 0.5, im_min, im_min + 1.0), c(-0.5, 0.5, im_min, im_min + 1.0)];
    let u = [c(-0.5, 0.5, -0.25, 0.25), c(-0.5, 0.5, -0.25, 0.25)];
    (z, u)
}

/// The quotient
/// `ϑ[Mγ](Mz, (cz+e)⁻¹u) / (ϑ[γ](z,u) · Π(c_i z_i + e_i)^{1/2} · e(½ tr(cu²/(cz+e))))`,
/// which is the multiplier of `M` when the weight and index are right.
pub fn multiplier_quotient(
    m: &PseudoMatrix,
    g1: [i64; 2],
    g2: [i64; 2],
    d: u64,
    z: [Complex64; 2],
    u: [Complex64; 2],
) -> Result<Complex64> {
    let s = m.verify(d)?;
    let (h1, h2) = s.act(g1, g2);
    let mut mz = [Complex64::new(0.0, 0.0); 2];
    let mut mu = mz;
    let mut factor = Complex64::new(1.0, 0.0);
    let mut index_phase = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        let [[a, b], [c, ee]] = m.component(i);
        let j = c * z[i] + ee;
        mz[i] = (a * z[i] + b) / j;
        mu[i] = u[i] / j;
        factor *= j.sqrt();
        index_phase += 0.5 * c * u[i] * u[i] / j;
    }
    let lhs = theta(h1, h2, d, mz, mu)?.value();
    let rhs = theta(g1, g2, d, z, u)?.value() * factor * e(index_phase);
    Ok(lhs / rhs)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformationCheck {
    pub element: String,
    pub characteristic: ([i64; 2], [i64; 2]),
    /// Largest `||R| − 1|` over the sample points.
    pub modulus_residual: f64,
    /// Largest `|R − R₀|` over the sample points.
    pub spread: f64,
    /// `|R₀⁸ − 1|`.
    pub root_residual: f64,
}

impl TransformationCheck {
    pub fn max_residual(&self) -> f64 {
        self.modulus_residual.max(self.spread).max(self.root_residual)
    }
}

pub fn transformation_check(
    m: &PseudoMatrix,
    g1: [i64; 2],
    g2: [i64; 2],
    d: u64,
    points: &[([Complex64; 2], [Complex64; 2])],
) -> Result<TransformationCheck> {
    let ratios = points
        .iter()
        .map(|&(z, u)| multiplier_quotient(m, g1, g2, d, z, u))
        .collect::<Result<Vec<_>>>()?;
    let r0 = *ratios
        .first()
        .ok_or_else(|| Error::InvalidParameters("no sample points".into()))?;
    Ok(TransformationCheck {
        element: m.to_string(),
        characteristic: (g1, g2),
        modulus_residual: ratios.iter().map(|r| (r.norm() - 1.0).abs()).fold(0.0, f64::max),
        spread: ratios.iter().map(|r| (r - r0).norm()).fold(0.0, f64::max),
        root_residual: (r0.powu(8) - 1.0).norm(),
    })
}

/// Residual of the elliptic law
/// `ϑ(z,u) = ϑ(z, u + z r₁ + r₂) · e(½ tr(r₁²z + 2r₁u)) · e(tr(γ̃₁r₂ − γ̃₂r₁)/2)`
/// for `r₁ = (p/d, −p/d) + (0, −q)` in `𝔬^∨` and `r₂ = (s, s) + (0, dt)` in `𝔬`.
pub fn elliptic_residual(
    g1: [i64; 2],
    g2: [i64; 2],
    d: u64,
    z: [Complex64; 2],
    u: [Complex64; 2],
    r: [i64; 4],
) -> Result<f64> {
    let df = d as f64;
    let [p, q, s, t] = r.map(|x| x as f64);
    let r1 = [p / df, -p / df - q];
    let r2 = [s, s + df * t];
    let t1 = [g1[0] as f64 - g1[1] as f64 / df, g1[1] as f64 / df];
    let t2 = [g2[0] as f64, (g2[0] + d as i64 * g2[1]) as f64];
    let shifted = [u[0] + z[0] * r1[0] + r2[0], u[1] + z[1] * r1[1] + r2[1]];
    let mut w = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        w += 0.5 * (r1[i] * r1[i] * z[i] + 2.0 * r1[i] * u[i]);
        w += 0.5 * (t1[i] * r2[i] - t2[i] * r1[i]);
    }
    let lhs = theta(g1, g2, d, z, u)?.value();
    let rhs = theta(g1, g2, d, z, shifted)?.value() * e(w);
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{random_element, ThetaCharacteristic};
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn odd_constants_vanish() {
        let z = [c(0.1, 1.2), c(-0.3, 0.9)];
        let u = [c(0.0, 0.0); 2];
        for ch in ThetaCharacteristic::all() {
            let v = theta(ch.g1_i64(), ch.g2_i64(), 5, z, u).unwrap();
            if ch.is_odd() {
                assert!(v.value().norm() < 1e-12, "{ch} {v:?}");
            } else {
                assert!(v.value().norm() > 1e-6, "{ch} {v:?}");
            }
        }
    }

    #[test]
    fn reflection_sign_is_parity() {
        let z = [c(0.2, 1.0), c(0.4, 1.3)];
        let u = [c(0.13, 0.05), c(-0.21, 0.1)];
        let neg = [-u[0], -u[1]];
        for ch in ThetaCharacteristic::all() {
            let a = theta(ch.g1_i64(), ch.g2_i64(), 3, z, u).unwrap().value();
            let b = theta(ch.g1_i64(), ch.g2_i64(), 3, z, neg).unwrap().value();
            let sign = crate::theta::parity_sign(&ch) as f64;
            assert!((a - sign * b).norm() < 1e-10, "{ch}");
        }
    }

    #[test]
    fn radius_convergence_and_siegel_route() {
        let z = [c(0.3, 0.5), c(-0.1, 0.6)];
        let u = [c(0.2, 0.1), c(0.05, -0.1)];
        for d in [3u64, 4, 7] {
            let a = theta_series([1, 1], [0, 1], d, z, u, DEFAULT_RADIUS).unwrap();
            let b = theta_series([1, 1], [0, 1], d, z, u, DEFAULT_RADIUS + 2.0).unwrap();
            assert!(a.tail_bound < 1e-12);
            assert!((a.value() - b.value()).norm() <= a.tail_bound.max(1e-14));
            let s = siegel_theta([1, 1], [0, 1], d, z, u, 12);
            assert!((a.value() - s).norm() < 1e-10, "d={d}");
        }
    }

    #[test]
    fn non_convergent_input() {
        let z = [c(0.0, -1.0), c(0.0, 1.0)];
        assert!(theta([0, 0], [0, 0], 3, z, [c(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn transformation_law_on_generators_and_words() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for d in [3u64, 4, 5] {
            let mut elements = crate::theta::elementary_generators(d);
            elements.push(random_element(d, &mut rng, 3));
            for m in &elements {
                let pts: Vec<_> = (0..3).map(|_| random_point(&mut rng, 1.0)).collect();
                for ch in [
                    ThetaCharacteristic::invariant(),
                    ThetaCharacteristic::new([1, 0], [1, 0]),
                ] {
                    let chk = transformation_check(m, ch.g1_i64(), ch.g2_i64(), d, &pts).unwrap();
                    assert!(chk.max_residual() < 1e-8, "{chk:?}");
                }
            }
        }
    }

    #[test]
    fn elliptic_law() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for ch in ThetaCharacteristic::all() {
            let (z, u) = random_point(&mut rng, 1.0);
            let r = [
                rng.gen_range(-1..=1),
                rng.gen_range(-1..=1),
                rng.gen_range(-2..=2),
                rng.gen_range(-1..=1),
            ];
            assert!(elliptic_residual(ch.g1_i64(), ch.g2_i64(), 3, z, u, r).unwrap() < 1e-9);
        }
    }
}
