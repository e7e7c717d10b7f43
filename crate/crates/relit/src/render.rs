//! Pinhole camera, ray generation, and emission–absorption volume rendering
//! of color, feature, depth and opacity images.
//!
//! The ray span [t_near, t_far] is split into N equal segments; each segment
//! contributes α_i = 1 − exp(−σ_i δ) attenuated by the accumulated
//! transmittance T_i = Π_{j<i} (1 − α_j). Color, features and expected
//! termination depth are the α-weighted sums of the per-sample values.
//! Pixels are fully independent, so images are identical for any worker
//! count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldScratch, TriPlaneField};
use crate::image::Image;
use crate::math::{Direction, Rgb, Vec3};
use crate::rng::SplitMix64;
use crate::sh::IrradianceSH;
use crate::shade;

/// Camera-space convention: x right, y down, z forward (rays leave through
/// +z). `rotation` holds the camera axes as world-space columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub rotation: [Vec3; 3],
    pub position: Vec3,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub t_near: f64,
    pub t_far: f64,
}

impl Camera {
    /// Validates invariants: positive focal lengths, 0 < t_near < t_far,
    /// orthonormal rotation (within 1e-6), non-degenerate image size.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidCamera { reason: "image size must be at least 1x1".into() });
        }
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::InvalidCamera { reason: format!("focal lengths must be positive ({}, {})", self.fx, self.fy) });
        }
        if !(self.t_near > 0.0 && self.t_near < self.t_far) {
            return Err(Error::InvalidCamera {
                reason: format!("need 0 < t_near < t_far, got ({}, {})", self.t_near, self.t_far),
            });
        }
        for i in 0..3 {
            if (self.rotation[i].norm() - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidCamera { reason: format!("rotation column {i} is not unit length") });
            }
            for j in (i + 1)..3 {
                if self.rotation[i].dot(self.rotation[j]).abs() > 1e-6 {
                    return Err(Error::InvalidCamera {
                        reason: format!("rotation columns {i} and {j} are not orthogonal"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Orbit camera: positioned at `distance` from `center`, yaw about the
    /// world y axis (0 = looking from +z), pitch raising the camera above the
    /// equator, looking back at the center. `fov_deg` is the full horizontal
    /// field of view.
    #[allow(clippy::too_many_arguments)]
    pub fn orbit(
        center: Vec3,
        yaw_rad: f64,
        pitch_rad: f64,
        distance: f64,
        fov_deg: f64,
        width: usize,
        height: usize,
        t_near: f64,
        t_far: f64,
    ) -> Result<Camera> {
        if !(distance > 0.0) {
            return Err(Error::InvalidCamera { reason: format!("orbit distance must be positive, got {distance}") });
        }
        if !(fov_deg > 0.0 && fov_deg < 180.0) {
            return Err(Error::InvalidCamera { reason: format!("field of view out of (0, 180): {fov_deg}") });
        }
        let offset = Vec3::new(
            yaw_rad.sin() * pitch_rad.cos(),
            pitch_rad.sin(),
            yaw_rad.cos() * pitch_rad.cos(),
        );
        let position = center + offset * distance;
        let forward = Direction::normalized(center - position)?.vector();
        let up = if forward.y.abs() > 0.999 { Vec3::new(0.0, 0.0, 1.0) } else { Vec3::new(0.0, 1.0, 0.0) };
        let right = Direction::normalized(forward.cross(up))?.vector();
        let down = forward.cross(right);
        let fx = 0.5 * width as f64 / (fov_deg.to_radians() / 2.0).tan();
        let camera = Camera {
            rotation: [right, down, forward],
            position,
            fx,
            fy: fx,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            width,
            height,
            t_near,
            t_far,
        };
        camera.validate()?;
        Ok(camera)
    }

    /// The ray through the center of pixel (x, y).
    pub fn ray_for_pixel(&self, x: usize, y: usize) -> Ray {
        let dx = (x as f64 + 0.5 - self.cx) / self.fx;
        let dy = (y as f64 + 0.5 - self.cy) / self.fy;
        let world = self.rotation[0] * dx + self.rotation[1] * dy + self.rotation[2];
        Ray {
            origin: self.position,
            direction: Direction::new_unchecked(world / world.norm()),
        }
    }

    /// One ray per pixel, row-major.
    pub fn generate_rays(&self) -> Vec<Ray> {
        let mut rays = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                rays.push(self.ray_for_pixel(x, y));
            }
        }
        rays
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Direction,
}

impl Ray {
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction.vector() * t
    }
}

/// How sample positions are placed inside each ray segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Segment midpoints; the default, fully deterministic.
    Midpoint,
    /// Per-segment jitter from a seeded per-pixel stream.
    Stratified { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub samples_per_ray: usize,
    pub sampling: Sampling,
    /// Render k_d directly — the constant-illumination albedo image,
    /// independent of the environment.
    pub albedo_mode: bool,
    /// Multiplier on the decoded specular coefficient (0 = pure diffuse).
    pub specular_scale: f64,
    /// Clamp shaded colors at zero. Disabled only for linearity analysis.
    pub clamp_shading: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            samples_per_ray: 64,
            sampling: Sampling::Midpoint,
            albedo_mode: false,
            specular_scale: 1.0,
            clamp_shading: true,
        }
    }
}

impl RenderOptions {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_ray == 0 {
            return Err(Error::InvalidScene { reason: "samples_per_ray must be at least 1".into() });
        }
        if !(self.specular_scale >= 0.0) {
            return Err(Error::InvalidScene {
                reason: format!("specular_scale must be non-negative, got {}", self.specular_scale),
            });
        }
        Ok(())
    }
}

/// Per-sample emission handed to the compositor.
#[derive(Debug, Clone)]
pub struct PointEmission {
    pub sigma: f64,
    pub color: Rgb,
    pub features: Vec<f64>,
}

/// Integration result for one ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySample {
    pub color: Rgb,
    pub features: Vec<f64>,
    pub depth: f64,
    pub opacity: f64,
}

/// Discrete emission–absorption quadrature over [t_near, t_far] with N
/// segments. `sample_at` fills σ, color and features for a given t. Depth is
/// the opacity-normalized expected termination when opacity > 1e-6.
pub fn composite_ray<F>(
    t_near: f64,
    t_far: f64,
    samples: usize,
    feature_len: usize,
    mut jitter: Option<SplitMix64>,
    mut sample_at: F,
) -> Result<RaySample>
where
    F: FnMut(f64, &mut PointEmission) -> Result<()>,
{
    let delta = (t_far - t_near) / samples as f64;
    let mut emission = PointEmission {
        sigma: 0.0,
        color: Rgb::BLACK,
        features: vec![0.0; feature_len],
    };
    let mut color = Rgb::BLACK;
    let mut features = vec![0.0; feature_len];
    let mut depth = 0.0;
    let mut opacity = 0.0;
    let mut transmittance = 1.0;
    for i in 0..samples {
        let offset = match &mut jitter {
            None => 0.5,
            Some(rng) => rng.next_f64(),
        };
        let t = t_near + (i as f64 + offset) * delta;
        sample_at(t, &mut emission)?;
        if !emission.sigma.is_finite() || !emission.color.is_finite() {
            return Err(Error::NonFinite { context: format!("ray sample at t = {t}") });
        }
        let alpha = 1.0 - (-emission.sigma * delta).exp();
        let weight = transmittance * alpha;
        color += emission.color * weight;
        for (acc, f) in features.iter_mut().zip(&emission.features) {
            *acc += weight * f;
        }
        depth += weight * t;
        opacity += weight;
        transmittance *= 1.0 - alpha;
    }
    if opacity > 1e-6 {
        depth /= opacity;
    }
    Ok(RaySample { color, features, depth, opacity })
}

/// Shades one decoded field point under the render options.
fn shade_sample(
    scratch: &FieldScratch,
    view: Direction,
    env: &IrradianceSH,
    opt: &RenderOptions,
) -> Rgb {
    if opt.albedo_mode {
        return scratch.k_d;
    }
    let k_s = scratch.k_s * opt.specular_scale;
    let omega_r = shade::reflect(view, scratch.normal);
    if opt.clamp_shading {
        shade::shade_diffuse(scratch.k_d, scratch.normal, env)
            + shade::shade_specular(k_s, omega_r, env)
    } else {
        shade::shade_diffuse_unclamped(scratch.k_d, scratch.normal, env)
            + shade::shade_specular_unclamped(k_s, omega_r, env)
    }
}

/// Integrates one ray through the field. `pixel_salt` decorrelates the
/// stratified jitter streams of different pixels; pass 0 for a lone ray.
pub fn integrate_ray(
    field: &TriPlaneField,
    env: &IrradianceSH,
    ray: &Ray,
    t_near: f64,
    t_far: f64,
    opt: &RenderOptions,
    pixel_salt: u64,
) -> Result<RaySample> {
    let jitter = match opt.sampling {
        Sampling::Midpoint => None,
        Sampling::Stratified { seed } => Some(SplitMix64::fork(seed, pixel_salt)),
    };
    let mut scratch = FieldScratch::default();
    composite_ray(t_near, t_far, opt.samples_per_ray, field.feature_channels(), jitter, |t, out| {
        field.decode_point(ray.at(t), &mut scratch)?;
        out.sigma = scratch.sigma;
        out.color = shade_sample(&scratch, ray.direction, env, opt);
        out.features.copy_from_slice(scratch.w());
        Ok(())
    })
}

/// Color I_c, features I_w, expected-termination depth and opacity images.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub color: Image,
    pub features: Image,
    pub depth: Image,
    pub opacity: Image,
}

/// Renders every pixel of `cam` through the field. Pixels are distributed
/// over the current rayon pool; output does not depend on the schedule.
pub fn render_image(
    field: &TriPlaneField,
    env: &IrradianceSH,
    cam: &Camera,
    opt: &RenderOptions,
) -> Result<RenderOutput> {
    cam.validate()?;
    opt.validate()?;
    if !env.is_finite() {
        return Err(Error::NonFinite { context: "lighting coefficients".into() });
    }
    let (w, h) = (cam.width, cam.height);
    let results: Vec<Result<RaySample>> = (0..w * h)
        .into_par_iter()
        .map(|idx| {
            let ray = cam.ray_for_pixel(idx % w, idx / w);
            integrate_ray(field, env, &ray, cam.t_near, cam.t_far, opt, idx as u64)
        })
        .collect();

    let n_w = field.feature_channels();
    let mut out = RenderOutput {
        color: Image::new(w, h, 3),
        features: Image::new(w, h, n_w.max(1)),
        depth: Image::new(w, h, 1),
        opacity: Image::new(w, h, 1),
    };
    for (idx, result) in results.into_iter().enumerate() {
        let (x, y) = (idx % w, idx / w);
        let sample = result.map_err(|e| Error::NonFinite { context: format!("pixel ({x}, {y}): {e}") })?;
        out.color.set_rgb(x, y, sample.color);
        if n_w > 0 {
            out.features.pixel_mut(x, y).copy_from_slice(&sample.features);
        }
        out.depth.pixel_mut(x, y)[0] = sample.depth;
        out.opacity.pixel_mut(x, y)[0] = sample.opacity;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{DecoderWeights, DIFFUSE_FIXED_OUTPUTS, DIFFUSE_HIDDEN, SPECULAR_HIDDEN};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn looking_down_z() -> Camera {
        Camera {
            rotation: [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
            position: Vec3::ZERO,
            fx: 50.0,
            fy: 50.0,
            cx: 2.5,
            cy: 2.5,
            width: 5,
            height: 5,
            t_near: 0.1,
            t_far: 2.0,
        }
    }

    /// Field with constant density softplus(sigma_bias) and constant heads.
    fn constant_field(sigma_bias: f32) -> TriPlaneField {
        let (r, c) = (2, 2);
        let mut diffuse = DecoderWeights::zeros(c, DIFFUSE_HIDDEN, DIFFUSE_FIXED_OUTPUTS + 2);
        diffuse.layers[1].bias[6] = sigma_bias;
        diffuse.layers[1].bias[5] = 5.0; // normal → +z
        diffuse.layers[1].bias[7] = 0.25; // feature channel 0
        TriPlaneField::new(
            r,
            c,
            2,
            2.0,
            [vec![0.0; r * r * c], vec![0.0; r * r * c], vec![0.0; r * r * c]],
            diffuse,
            DecoderWeights::zeros(c, SPECULAR_HIDDEN, 1),
        )
        .unwrap()
    }

    #[test]
    fn camera_validation_catches_bad_setups() {
        let mut cam = looking_down_z();
        assert!(cam.validate().is_ok());
        cam.t_near = 3.0;
        assert!(cam.validate().is_err());
        let mut cam = looking_down_z();
        cam.fx = -1.0;
        assert!(cam.validate().is_err());
        let mut cam = looking_down_z();
        cam.rotation[0] = Vec3::new(1.0, 0.5, 0.0);
        assert!(cam.validate().is_err());
    }

    #[test]
    fn principal_point_ray_runs_along_forward_axis() {
        let cam = looking_down_z();
        let ray = cam.ray_for_pixel(2, 2); // pixel center (2.5, 2.5) = principal point
        assert_relative_eq!(ray.direction.z(), 1.0, epsilon = 1e-12);
        assert_eq!(ray.origin, Vec3::ZERO);
    }

    #[test]
    fn corner_rays_mirror_about_the_forward_axis() {
        let cam = looking_down_z();
        let rays = cam.generate_rays();
        assert_eq!(rays.len(), 25);
        let left = rays[0].direction;
        let right = rays[4].direction;
        assert_relative_eq!(left.x(), -right.x(), epsilon = 1e-12);
        assert_relative_eq!(left.y(), right.y(), epsilon = 1e-12);
        assert_relative_eq!(left.z(), right.z(), epsilon = 1e-12);
    }

    #[test]
    fn orbit_camera_looks_at_the_center() {
        let cam = Camera::orbit(Vec3::ZERO, 0.3, -0.2, 2.5, 40.0, 32, 32, 0.5, 4.5).unwrap();
        cam.validate().unwrap();
        let forward = cam.rotation[2];
        let to_center = Direction::normalized(Vec3::ZERO - cam.position).unwrap().vector();
        assert!((forward - to_center).norm() < 1e-12);
        assert_relative_eq!(cam.position.norm(), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn empty_space_integrates_to_zero() {
        let sample = composite_ray(0.1, 2.0, 32, 0, None, |_, out| {
            out.sigma = 0.0;
            out.color = Rgb::WHITE;
            Ok(())
        })
        .unwrap();
        assert_eq!(sample.color, Rgb::BLACK);
        assert_eq!(sample.opacity, 0.0);
        assert_eq!(sample.depth, 0.0);
    }

    #[test]
    fn homogeneous_medium_matches_closed_form_at_any_sample_count() {
        // Constant σ and color over the whole span telescope exactly:
        // color = c₀ (1 − e^{−σ L}).
        let c0 = Rgb::new(0.8, 0.5, 0.25);
        for &n in &[1usize, 7, 64, 1024] {
            let sample = composite_ray(1.0, 2.0, n, 0, None, |_, out| {
                out.sigma = 1.0;
                out.color = c0;
                Ok(())
            })
            .unwrap();
            let expected = 1.0 - (-1.0f64).exp(); // 0.632121...
            assert_relative_eq!(sample.color.r, c0.r * expected, epsilon = 1e-12);
            assert_relative_eq!(sample.color.g, c0.g * expected, epsilon = 1e-12);
            assert_relative_eq!(sample.opacity, expected, epsilon = 1e-12);
            assert_relative_eq!(expected, 0.632121, epsilon = 1e-6);
            // Expected termination of a homogeneous slab seen from t=1.
            assert!(sample.depth > 1.0 && sample.depth < 2.0);
        }
    }

    #[test]
    fn halving_density_strictly_lowers_opacity() {
        let profile = [0.9, 0.1, 1.7, 0.4, 2.2, 0.05, 1.1, 0.6];
        let run = |scale: f64| {
            composite_ray(0.5, 3.5, profile.len(), 0, None, |t, out| {
                let i = ((t - 0.5) / 3.0 * profile.len() as f64) as usize;
                out.sigma = profile[i.min(profile.len() - 1)] * scale;
                out.color = Rgb::WHITE;
                Ok(())
            })
            .unwrap()
            .opacity
        };
        let (full, half) = (run(1.0), run(0.5));
        assert!(half < full, "{half} !< {full}");
        assert!((0.0..=1.0).contains(&full));
    }

    #[test]
    fn non_finite_emission_is_a_numeric_error() {
        let r = composite_ray(0.1, 1.0, 4, 0, None, |t, out| {
            out.sigma = if t > 0.5 { f64::NAN } else { 1.0 };
            out.color = Rgb::WHITE;
            Ok(())
        });
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn near_empty_field_renders_black() {
        let field = constant_field(-60.0); // σ = softplus(-60) ≈ 9e-27
        let cam = looking_down_z();
        let out = render_image(&field, &IrradianceSH::uniform(Rgb::WHITE), &cam, &RenderOptions::default()).unwrap();
        assert!(out.color.max_value() < 1e-12);
        assert!(out.opacity.max_value() < 1e-12);
    }

    #[test]
    fn doubling_the_environment_doubles_the_image_bitwise() {
        let field = constant_field(1.0);
        let cam = looking_down_z();
        let mut env = IrradianceSH::uniform(Rgb::new(0.7, 0.4, 0.2));
        env.coeffs[2] = Rgb::new(0.3, -0.1, 0.2);
        let opt = RenderOptions { clamp_shading: false, ..Default::default() };
        let once = render_image(&field, &env, &cam, &opt).unwrap();
        let twice = render_image(&field, &env.scaled(2.0), &cam, &opt).unwrap();
        for (a, b) in once.color.data().iter().zip(twice.color.data()) {
            assert_eq!((a * 2.0).to_bits(), b.to_bits());
        }
        // Geometry outputs are unaffected by lighting.
        assert!(once.depth.bit_equal(&twice.depth));
        assert!(once.opacity.bit_equal(&twice.opacity));
    }

    #[test]
    fn albedo_mode_ignores_the_environment() {
        let field = constant_field(0.5);
        let cam = looking_down_z();
        let opt = RenderOptions { albedo_mode: true, ..Default::default() };
        let a = render_image(&field, &IrradianceSH::uniform(Rgb::WHITE), &cam, &opt).unwrap();
        let b = render_image(&field, &IrradianceSH::uniform(Rgb::new(3.0, 0.1, 0.7)), &cam, &opt).unwrap();
        assert!(a.color.bit_equal(&b.color));
        assert!(a.color.max_value() > 0.0);
    }

    #[test]
    fn specular_scale_zero_is_pure_diffuse() {
        let mut field = constant_field(0.8);
        // Give the specular decoder a non-trivial coefficient.
        let spec = DecoderWeights::zeros(2, SPECULAR_HIDDEN, 1);
        let _ = spec;
        field = {
            let mut spec = DecoderWeights::zeros(2, SPECULAR_HIDDEN, 1);
            spec.layers[1].bias[0] = 1.2;
            TriPlaneField::new(
                2,
                2,
                2,
                2.0,
                field.planes().clone(),
                field.diffuse_weights().clone(),
                spec,
            )
            .unwrap()
        };
        let cam = looking_down_z();
        let env = IrradianceSH::uniform(Rgb::new(0.9, 0.8, 0.7));
        let zero_scale = RenderOptions { specular_scale: 0.0, ..Default::default() };
        let with_spec = RenderOptions::default();
        let a = render_image(&field, &env, &cam, &zero_scale).unwrap();
        let b = render_image(&field, &env, &cam, &with_spec).unwrap();
        assert!(a.color.max_abs_diff(&b.color) > 1e-3, "specular term should matter");

        // A field whose decoder emits k_s = 0 must match specular_scale = 0 bitwise.
        let mut squash = DecoderWeights::zeros(2, SPECULAR_HIDDEN, 1);
        squash.layers[1].bias[0] = -800.0; // logistic(-800) underflows to exactly 0
        let diffuse_only = TriPlaneField::new(
            2,
            2,
            2,
            2.0,
            field.planes().clone(),
            field.diffuse_weights().clone(),
            squash,
        )
        .unwrap();
        let c = render_image(&diffuse_only, &env, &cam, &with_spec).unwrap();
        assert!(a.color.bit_equal(&c.color));
    }

    /// Field whose density varies along z, so sample placement matters.
    fn z_ramp_field() -> TriPlaneField {
        let (r, c) = (8, 2);
        let mut yz = vec![0.0f32; r * r * c];
        for j in 0..r {
            for i in 0..r {
                let z = (j as f32 / (r - 1) as f32 - 0.5) * 2.0;
                yz[(j * r + i) * c] = z;
            }
        }
        let mut diffuse = DecoderWeights::zeros(c, DIFFUSE_HIDDEN, DIFFUSE_FIXED_OUTPUTS + 2);
        *diffuse.layers[0].weight_mut(0, 0) = 1.0;
        *diffuse.layers[0].weight_mut(1, 0) = -1.0;
        *diffuse.layers[1].weight_mut(6, 0) = 2.0;
        *diffuse.layers[1].weight_mut(6, 1) = -2.0;
        diffuse.layers[1].bias[6] = 0.5;
        diffuse.layers[1].bias[5] = 5.0;
        TriPlaneField::new(
            r,
            c,
            2,
            2.0,
            [vec![0.0; r * r * c], yz, vec![0.0; r * r * c]],
            diffuse,
            DecoderWeights::zeros(c, SPECULAR_HIDDEN, 1),
        )
        .unwrap()
    }

    #[test]
    fn stratified_sampling_is_seed_deterministic() {
        let field = z_ramp_field();
        let cam = looking_down_z();
        let env = IrradianceSH::uniform(Rgb::WHITE);
        let opt = |seed| RenderOptions {
            sampling: Sampling::Stratified { seed },
            ..Default::default()
        };
        let a = render_image(&field, &env, &cam, &opt(7)).unwrap();
        let b = render_image(&field, &env, &cam, &opt(7)).unwrap();
        let c = render_image(&field, &env, &cam, &opt(8)).unwrap();
        assert!(a.color.bit_equal(&b.color));
        assert!(!a.color.bit_equal(&c.color));
    }

    #[test]
    fn worker_count_does_not_change_the_image() {
        let field = constant_field(0.7);
        let cam = looking_down_z();
        let env = IrradianceSH::uniform(Rgb::new(0.8, 0.6, 0.4));
        let opt = RenderOptions::default();
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool2 = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let a = pool1.install(|| render_image(&field, &env, &cam, &opt)).unwrap();
        let b = pool2.install(|| render_image(&field, &env, &cam, &opt)).unwrap();
        assert!(a.color.bit_equal(&b.color));
        assert!(a.features.bit_equal(&b.features));
        assert!(a.depth.bit_equal(&b.depth));
        assert!(a.opacity.bit_equal(&b.opacity));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Opacity stays in [0, 1] and depth lands inside the span whenever
        /// the ray absorbed anything.
        #[test]
        fn opacity_bounded_and_depth_in_span(
            bias in -2.0f32..3.0,
            n in 1usize..128,
            t_near in 0.05f64..1.0,
            span in 0.1f64..4.0,
        ) {
            let field = constant_field(bias);
            let ray = Ray { origin: Vec3::new(0.1, -0.2, 0.0), direction: Direction::POS_Z };
            let env = IrradianceSH::uniform(Rgb::WHITE);
            let opt = RenderOptions { samples_per_ray: n, ..Default::default() };
            let t_far = t_near + span;
            let s = integrate_ray(&field, &env, &ray, t_near, t_far, &opt, 0).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s.opacity));
            if s.opacity > 1e-6 {
                prop_assert!(s.depth >= t_near && s.depth <= t_far);
            }
        }
    }
}
