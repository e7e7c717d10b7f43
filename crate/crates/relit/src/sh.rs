//! Real spherical harmonics up to band l = 2: basis evaluation, environment
//! projection, Lambertian pre-integration into irradiance coefficients, and
//! the half-sphere light-probe visualization.
//!
//! Convention: real, orthonormal over the sphere, no Condon–Shortley phase,
//! coefficient ordering (l, m) =
//! (0,0), (1,-1), (1,0), (1,1), (2,-2), (2,-1), (2,0), (2,1), (2,2).
//! With this basis the clamped-cosine kernel has the band constants
//! Â = (π, 2π/3, π/4), so converting a radiance projection into an
//! irradiance map is a per-band scale.

use crate::image::Image;
use crate::math::{Direction, Rgb};
use crate::quadrature::SphereGrid;

/// √(1/4π)
const SH_C0: f64 = 0.282_094_791_773_878_14;
/// √(3/4π)
const SH_C1: f64 = 0.488_602_511_902_919_9;
/// √(15/4π), for the xy / yz / xz terms
const SH_C2: f64 = 1.092_548_430_592_079_2;
/// √(5/16π), for the 3z² − 1 term
const SH_C2_ZZ: f64 = 0.315_391_565_252_520_05;
/// √(15/16π), for the x² − y² term
const SH_C2_XY: f64 = 0.546_274_215_296_039_6;

/// Clamped-cosine (Lambertian) kernel constants per band l = 0, 1, 2.
pub const LAMBERTIAN_BAND_FACTORS: [f64; 3] = [
    std::f64::consts::PI,
    2.0 * std::f64::consts::PI / 3.0,
    std::f64::consts::PI / 4.0,
];

/// Band index l of each of the 9 coefficients.
pub const BAND_OF_COEFF: [usize; 9] = [0, 1, 1, 1, 2, 2, 2, 2, 2];

/// The 9 real SH basis values at one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShVector9(pub [f64; 9]);

/// Evaluates the order-2 real SH basis at a unit direction.
pub fn sh_basis(n: Direction) -> ShVector9 {
    let (x, y, z) = (n.x(), n.y(), n.z());
    ShVector9([
        SH_C0,
        SH_C1 * y,
        SH_C1 * z,
        SH_C1 * x,
        SH_C2 * x * y,
        SH_C2 * y * z,
        SH_C2_ZZ * (3.0 * z * z - 1.0),
        SH_C2 * x * z,
        SH_C2_XY * (x * x - y * y),
    ])
}

/// Raw SH projection of an environment's radiance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadianceSH {
    pub coeffs: [Rgb; 9],
}

/// SH coefficients of a pre-integrated irradiance environment map.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IrradianceSH {
    pub coeffs: [Rgb; 9],
}

impl RadianceSH {
    pub fn zero() -> Self {
        Self::default()
    }
}

impl IrradianceSH {
    pub fn zero() -> Self {
        Self::default()
    }

    /// DC-only environment whose irradiance is `value` for every normal.
    pub fn uniform(value: Rgb) -> Self {
        let mut sh = Self::zero();
        sh.coeffs[0] = value * (1.0 / SH_C0);
        sh
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        for c in &mut out.coeffs {
            *c = *c * s;
        }
        out
    }

    pub fn add(&self, other: &IrradianceSH) -> Self {
        let mut out = *self;
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += *o;
        }
        out
    }

    /// Linear interpolation in coefficient space; `t` = 0 gives `self`.
    pub fn lerp(&self, other: &IrradianceSH, t: f64) -> Self {
        self.scaled(1.0 - t).add(&other.scaled(t))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// An environment map: RGB radiance as a function of incident direction.
pub trait EnvMap: Sync {
    fn radiance(&self, dir: Direction) -> Rgb;
}

impl<F: Fn(Direction) -> Rgb + Sync> EnvMap for F {
    fn radiance(&self, dir: Direction) -> Rgb {
        self(dir)
    }
}

/// Order-2 bandlimited environment synthesized from SH coefficients,
/// L(ω) = Σ_k c_k H_k(ω).
#[derive(Debug, Clone, Copy)]
pub struct BandlimitedEnv {
    pub sh: RadianceSH,
}

impl EnvMap for BandlimitedEnv {
    fn radiance(&self, dir: Direction) -> Rgb {
        let h = sh_basis(dir);
        let mut out = Rgb::BLACK;
        for (c, hk) in self.sh.coeffs.iter().zip(h.0) {
            out += *c * hk;
        }
        out
    }
}

/// Projects an environment onto the 9 SH basis functions,
/// coeffs[k] = ∫ L(ω) H_k(ω) dω, with a deterministic equal-area grid of at
/// least `quad_samples` nodes.
pub fn project_environment<E: EnvMap + ?Sized>(env: &E, quad_samples: usize) -> RadianceSH {
    let grid = SphereGrid::with_min_nodes(quad_samples);
    let weight = grid.node_weight();
    let mut coeffs = [Rgb::BLACK; 9];
    for dir in grid.nodes() {
        let radiance = env.radiance(dir);
        let h = sh_basis(dir);
        for (c, hk) in coeffs.iter_mut().zip(h.0) {
            *c += radiance * hk;
        }
    }
    for c in &mut coeffs {
        *c = *c * weight;
    }
    RadianceSH { coeffs }
}

/// Scales each band of a radiance projection by the clamped-cosine kernel
/// constants, turning it into an irradiance environment map: afterwards
/// `eval_irradiance(out, n) ≈ ∫ max(n·ω, 0) L(ω) dω`.
pub fn convolve_lambertian(raw: &RadianceSH) -> IrradianceSH {
    let mut coeffs = raw.coeffs;
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c = *c * LAMBERTIAN_BAND_FACTORS[BAND_OF_COEFF[k]];
    }
    IrradianceSH { coeffs }
}

/// E(n) = Σ_k l_k H_k(n). Linear in the coefficients; may go negative for
/// strongly directional maps (order-2 truncation), callers clamp as needed.
pub fn eval_irradiance(env: &IrradianceSH, n: Direction) -> Rgb {
    let h = sh_basis(n);
    let mut out = Rgb::BLACK;
    for (c, hk) in env.coeffs.iter().zip(h.0) {
        out += *c * hk;
    }
    out
}

/// Renders a front-facing unit hemisphere probe: each pixel inside the disk
/// shows the irradiance for the sphere normal at that point (clamped at
/// zero for display), background stays black. With `normalize` the image is
/// scaled so its brightest sample is 1.
pub fn render_light_sphere(env: &IrradianceSH, resolution: usize, normalize: bool) -> Image {
    let mut image = Image::new(resolution, resolution, 3);
    let mut max = 0.0f64;
    for py in 0..resolution {
        for px in 0..resolution {
            let u = (px as f64 + 0.5) / resolution as f64 * 2.0 - 1.0;
            let v = 1.0 - (py as f64 + 0.5) / resolution as f64 * 2.0;
            let rr = u * u + v * v;
            if rr > 1.0 {
                continue;
            }
            let n = Direction::new_unchecked(crate::math::Vec3::new(u, v, (1.0 - rr).sqrt()));
            let c = eval_irradiance(env, n).clamp_non_negative();
            max = max.max(c.max_component());
            image.set_rgb(px, py, c);
        }
    }
    if normalize && max > 0.0 {
        let inv = 1.0 / max;
        for py in 0..resolution {
            for px in 0..resolution {
                let c = image.rgb_at(px, py);
                image.set_rgb(px, py, c * inv);
            }
        }
    }
    image
}
