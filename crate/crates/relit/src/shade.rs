//! Pointwise Phong shading in SH form, plus the brute-force reflectance
//! integral used as its oracle.
//!
//! View convention: `view` points from the camera toward the surface, so the
//! mirror direction ω_r = d − 2(d·n)n points away from it. The SH fast path
//! fixes the shininess exponent at α = 1, which lets the specular term reuse
//! the same irradiance environment map evaluated at ω_r instead of n.

use crate::error::{Error, Result};
use crate::math::{Direction, Rgb};
use crate::quadrature::SphereGrid;
use crate::sh::{eval_irradiance, EnvMap, IrradianceSH};

/// Surface material of one shading point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// Diffuse reflectance per channel, in [0, 1].
    pub k_d: Rgb,
    /// Specular reflectance coefficient, in [0, 1].
    pub k_s: f64,
    /// Shininess exponent; the SH path assumes 1.
    pub alpha: f64,
}

impl Material {
    pub fn new(k_d: Rgb, k_s: f64, alpha: f64) -> Result<Self> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(in_unit(k_d.r) && in_unit(k_d.g) && in_unit(k_d.b)) {
            return Err(Error::InvalidScene {
                reason: format!("diffuse reflectance out of [0,1]: {k_d:?}"),
            });
        }
        if !in_unit(k_s) {
            return Err(Error::InvalidScene { reason: format!("specular coefficient out of [0,1]: {k_s}") });
        }
        if !(alpha >= 0.0) {
            return Err(Error::InvalidScene { reason: format!("negative shininess: {alpha}") });
        }
        Ok(Material { k_d, k_s, alpha })
    }
}

/// Mirror of the view direction about the normal: d − 2(d·n)n.
pub fn reflect(d: Direction, n: Direction) -> Direction {
    let dn = d.dot(n);
    Direction::new_unchecked(d.vector() - n.vector() * (2.0 * dn))
}

/// Diffuse term c_d = k_d ⊙ Σ_k l_k H_k(n) without the non-negativity clamp.
pub fn shade_diffuse_unclamped(k_d: Rgb, n: Direction, env: &IrradianceSH) -> Rgb {
    k_d.mul_componentwise(eval_irradiance(env, n))
}

/// Diffuse term, clamped at zero (order-2 SH reconstruction can dip negative).
pub fn shade_diffuse(k_d: Rgb, n: Direction, env: &IrradianceSH) -> Rgb {
    shade_diffuse_unclamped(k_d, n, env).clamp_non_negative()
}

/// Specular term c_s = k_s Σ_k l_k H_k(ω_r) without the clamp.
pub fn shade_specular_unclamped(k_s: f64, omega_r: Direction, env: &IrradianceSH) -> Rgb {
    eval_irradiance(env, omega_r) * k_s
}

/// Specular term, clamped at zero.
pub fn shade_specular(k_s: f64, omega_r: Direction, env: &IrradianceSH) -> Rgb {
    shade_specular_unclamped(k_s, omega_r, env).clamp_non_negative()
}

/// Full shading c = c_d + c_s with ω_r derived from the view direction.
pub fn shade(mat: &Material, n: Direction, view: Direction, env: &IrradianceSH) -> Rgb {
    shade_diffuse(mat.k_d, n, env) + shade_specular(mat.k_s, reflect(view, n), env)
}

/// Same composition with the clamps disabled; exactly linear in the
/// environment coefficients.
pub fn shade_unclamped(mat: &Material, n: Direction, view: Direction, env: &IrradianceSH) -> Rgb {
    shade_diffuse_unclamped(mat.k_d, n, env)
        + shade_specular_unclamped(mat.k_s, reflect(view, n), env)
}

/// Cosine-lobe handling in the reference integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosineKernel {
    /// max(·, 0) lobes — the physical hemisphere integral the SH path models.
    Clamped,
    /// Signed lobes over the full sphere, for literal reproduction of the
    /// unclamped reflectance equation.
    Raw,
}

/// Brute-force reflectance integral
/// ∫ (k_d ⊙ (n·ω) L(ω) + k_s (ω_r·ω)^α L(ω)) dω
/// by deterministic spherical quadrature. Used only as an oracle for the SH
/// shading path (which it matches when L is order-2 bandlimited and α = 1).
pub fn phong_reference<E: EnvMap + ?Sized>(
    mat: &Material,
    n: Direction,
    view: Direction,
    env: &E,
    quad_samples: usize,
    kernel: CosineKernel,
) -> Rgb {
    let omega_r = reflect(view, n);
    let grid = SphereGrid::with_min_nodes(quad_samples);
    grid.integrate_rgb(|w| {
        let mut cos_n = n.vector().dot(w.vector());
        let mut cos_r = omega_r.vector().dot(w.vector());
        if kernel == CosineKernel::Clamped {
            cos_n = cos_n.max(0.0);
            cos_r = cos_r.max(0.0);
        }
        let radiance = env.radiance(w);
        let diffuse = mat.k_d.mul_componentwise(radiance) * cos_n;
        let specular = radiance * (mat.k_s * signed_pow(cos_r, mat.alpha));
        diffuse + specular
    })
}

/// x^α that keeps the sign for odd-like raw-kernel usage; for clamped input
/// (x ≥ 0) this is the ordinary power.
fn signed_pow(x: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        x
    } else if x >= 0.0 {
        x.powf(alpha)
    } else {
        -(-x).powf(alpha)
    }
}
