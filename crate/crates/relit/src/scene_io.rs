//! Scene and lighting persistence, plus deterministic synthetic scenes.
//!
//! Scene file (magic `FLIT`, all integers little-endian, version 1):
//!
//! ```text
//! offset size field
//! 0      4    magic "FLIT"
//! 4      4    u32 version
//! 8      4    u32 plane resolution R
//! 12     4    u32 plane channels C
//! 16     4    u32 feature channels n_w
//! 20     4    f32 bounds (world cube side length)
//! 24     4    u32 diffuse decoder layer count
//! 28     4    u32 specular decoder layer count
//! 32     -    plane payloads XY, YZ, XZ: each R·R·C f32, row-major
//!        -    decoder payloads, diffuse then specular: per layer the
//!             weight matrix (out·in f32, row-major) then the biases (out)
//! ```
//!
//! Layer shapes are implied by the counts: the first layer maps C to the
//! fixed hidden width (64 diffuse / 32 specular), interior layers stay at the
//! hidden width, and the last layer maps to the head width (7 + n_w diffuse,
//! 1 specular). A count of 1 is the degenerate linear decoder.
//!
//! Lighting files are JSON: `{"sh": [[r,g,b] × 9]}` in coefficient order,
//! interpreted as a pre-integrated irradiance map.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    DecoderWeights, DenseLayer, TriPlaneField, DIFFUSE_FIXED_OUTPUTS, DIFFUSE_HIDDEN,
    SPECULAR_HIDDEN,
};
use crate::math::{logit, Rgb, Vec3};
use crate::rng::SplitMix64;
use crate::sh::IrradianceSH;

pub const SCENE_MAGIC: [u8; 4] = *b"FLIT";
pub const SCENE_VERSION: u32 = 1;

// Sanity caps so a corrupt header cannot demand absurd allocations.
const MAX_RESOLUTION: u32 = 8192;
const MAX_CHANNELS: u32 = 4096;
const MAX_LAYERS: u32 = 16;

/// Layer dimensions implied by the header for one decoder.
fn layer_dims(count: usize, input: usize, hidden: usize, output: usize) -> Vec<(usize, usize)> {
    (0..count)
        .map(|i| {
            let in_dim = if i == 0 { input } else { hidden };
            let out_dim = if i == count - 1 { output } else { hidden };
            (in_dim, out_dim)
        })
        .collect()
}

/// Writes a scene in the `FLIT` format.
pub fn save_scene(field: &TriPlaneField, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(&SCENE_MAGIC)?;
    f.write_all(&SCENE_VERSION.to_le_bytes())?;
    f.write_all(&(field.resolution() as u32).to_le_bytes())?;
    f.write_all(&(field.channels() as u32).to_le_bytes())?;
    f.write_all(&(field.feature_channels() as u32).to_le_bytes())?;
    f.write_all(&field.bounds().to_le_bytes())?;
    f.write_all(&(field.diffuse_weights().layers.len() as u32).to_le_bytes())?;
    f.write_all(&(field.specular_weights().layers.len() as u32).to_le_bytes())?;
    for plane in field.planes() {
        for v in plane {
            f.write_all(&v.to_le_bytes())?;
        }
    }
    for decoder in [field.diffuse_weights(), field.specular_weights()] {
        for layer in &decoder.layers {
            for v in &layer.weights {
                f.write_all(&v.to_le_bytes())?;
            }
            for v in &layer.bias {
                f.write_all(&v.to_le_bytes())?;
            }
        }
    }
    f.flush()?;
    Ok(())
}

/// Reads a scene written by [`save_scene`]; load(save(f)) is bit-exact.
pub fn load_scene(path: &Path) -> Result<TriPlaneField> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 32 {
        return Err(Error::Truncated { section: "scene header", missing: 32 - bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != SCENE_MAGIC {
        return Err(Error::BadMagic { expected: SCENE_MAGIC, found: magic });
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != SCENE_VERSION {
        return Err(Error::UnsupportedVersion { found: version, supported: SCENE_VERSION });
    }
    let resolution = u32_at(8);
    let channels = u32_at(12);
    let n_w = u32_at(16);
    let bounds = f32::from_le_bytes(bytes[20..24].try_into().unwrap());
    let diffuse_layers = u32_at(24);
    let specular_layers = u32_at(28);
    if resolution == 0
        || resolution > MAX_RESOLUTION
        || channels == 0
        || channels > MAX_CHANNELS
        || n_w > MAX_CHANNELS
        || diffuse_layers == 0
        || diffuse_layers > MAX_LAYERS
        || specular_layers == 0
        || specular_layers > MAX_LAYERS
    {
        return Err(Error::InvalidScene {
            reason: format!(
                "implausible header: R={resolution} C={channels} n_w={n_w} layers={diffuse_layers}/{specular_layers}"
            ),
        });
    }
    let (r, c, n_w) = (resolution as usize, channels as usize, n_w as usize);
    let diffuse_dims = layer_dims(diffuse_layers as usize, c, DIFFUSE_HIDDEN, DIFFUSE_FIXED_OUTPUTS + n_w);
    let specular_dims = layer_dims(specular_layers as usize, c, SPECULAR_HIDDEN, 1);

    let plane_floats = r as u64 * r as u64 * c as u64;
    let decoder_floats: u64 = diffuse_dims
        .iter()
        .chain(&specular_dims)
        .map(|&(i, o)| (i as u64 + 1) * o as u64)
        .sum();
    let expected = 32 + (3 * plane_floats + decoder_floats) * 4;
    if (bytes.len() as u64) < expected {
        return Err(Error::Truncated {
            section: "scene payload",
            missing: (expected - bytes.len() as u64) as usize,
        });
    }
    if bytes.len() as u64 > expected {
        return Err(Error::SizeMismatch {
            section: "scene payload",
            expected: expected as usize,
            got: bytes.len(),
        });
    }

    let mut off = 32usize;
    let mut take_floats = |n: usize| -> Vec<f32> {
        let out = bytes[off..off + 4 * n]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        off += 4 * n;
        out
    };
    let planes = [
        take_floats(plane_floats as usize),
        take_floats(plane_floats as usize),
        take_floats(plane_floats as usize),
    ];
    let mut read_decoder = |dims: &[(usize, usize)]| -> Result<DecoderWeights> {
        let mut layers = Vec::with_capacity(dims.len());
        for &(in_dim, out_dim) in dims {
            let weights = take_floats(in_dim * out_dim);
            let bias = take_floats(out_dim);
            layers.push(DenseLayer::new(in_dim, out_dim, weights, bias)?);
        }
        Ok(DecoderWeights::new(layers))
    };
    let diffuse = read_decoder(&diffuse_dims)?;
    let specular = read_decoder(&specular_dims)?;
    TriPlaneField::new(r, c, n_w, bounds, planes, diffuse, specular)
}

#[derive(Serialize, Deserialize)]
struct LightingFile {
    sh: Vec<[f64; 3]>,
}

/// Reads a lighting JSON file into irradiance coefficients.
pub fn load_lighting(path: &Path) -> Result<IrradianceSH> {
    let file = File::open(path)?;
    let parsed: LightingFile = serde_json::from_reader(file)?;
    if parsed.sh.len() != 9 {
        return Err(Error::BadCoefficientCount { found: parsed.sh.len() });
    }
    let mut out = IrradianceSH::zero();
    for (c, v) in out.coeffs.iter_mut().zip(&parsed.sh) {
        *c = Rgb::new(v[0], v[1], v[2]);
    }
    if !out.is_finite() {
        return Err(Error::NonFinite { context: "lighting coefficients".into() });
    }
    Ok(out)
}

/// Writes lighting coefficients as JSON; values survive a round trip exactly.
pub fn save_lighting(env: &IrradianceSH, path: &Path) -> Result<()> {
    let file = LightingFile {
        sh: env.coeffs.iter().map(|c| [c.r, c.g, c.b]).collect(),
    };
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, &file)?;
    f.flush()?;
    Ok(())
}

/// Geometry of the analytic sphere fixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    pub center: Vec3,
    pub radius: f64,
    /// Constant diffuse reflectance, strictly inside (0, 1) per channel.
    pub albedo: Rgb,
    /// Peak density at the sphere center.
    pub density_scale: f64,
    /// Constant specular coefficient, strictly inside (0, 1).
    pub specular: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneKind {
    /// Planes and decoder weights drawn from the seeded stream at scale 0.1.
    RandomWeights,
    /// A solid sphere with known geometry: density falls off as
    /// softplus(g·(r² − |x−c|²)), decoded normals are exactly radial,
    /// reflectances are constant.
    AnalyticSphere(SphereParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSceneSpec {
    pub kind: SceneKind,
    pub seed: u64,
    pub resolution: usize,
    pub channels: usize,
    pub feature_channels: usize,
    pub bounds: f32,
}

impl SyntheticSceneSpec {
    /// Random-weights scene exercising the full pipeline on arbitrary fields.
    pub fn random(seed: u64) -> Self {
        SyntheticSceneSpec {
            kind: SceneKind::RandomWeights,
            seed,
            resolution: 32,
            channels: 16,
            feature_channels: 32,
            bounds: 2.0,
        }
    }

    /// The default sphere oracle scene: radius 0.8 centered in a 3-unit cube.
    pub fn sphere() -> Self {
        SyntheticSceneSpec {
            kind: SceneKind::AnalyticSphere(SphereParams {
                center: Vec3::ZERO,
                radius: 0.8,
                albedo: Rgb::new(0.75, 0.55, 0.45),
                density_scale: 5000.0,
                specular: 0.3,
            }),
            seed: 0,
            resolution: 64,
            channels: 8,
            feature_channels: 8,
            bounds: 3.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.resolution < 2 || self.channels == 0 {
            return Err(Error::InvalidScene { reason: "need resolution >= 2 and channels >= 1".into() });
        }
        if !(self.bounds > 0.0) {
            return Err(Error::InvalidScene { reason: format!("bounds must be positive, got {}", self.bounds) });
        }
        if let SceneKind::AnalyticSphere(p) = &self.kind {
            if self.channels < 4 {
                return Err(Error::InvalidScene { reason: "sphere scene needs at least 4 channels".into() });
            }
            if !(p.radius > 0.0) {
                return Err(Error::InvalidScene { reason: format!("sphere radius must be positive, got {}", p.radius) });
            }
            let half = self.bounds as f64 / 2.0;
            for (name, c) in [("x", p.center.x), ("y", p.center.y), ("z", p.center.z)] {
                if c.abs() + p.radius > half {
                    return Err(Error::InvalidScene {
                        reason: format!("sphere leaves the volume along {name}: |{c}| + {} > {half}", p.radius),
                    });
                }
            }
            let open_unit = |v: f64| v > 0.0 && v < 1.0;
            if !(open_unit(p.albedo.r) && open_unit(p.albedo.g) && open_unit(p.albedo.b) && open_unit(p.specular)) {
                return Err(Error::InvalidScene {
                    reason: "albedo and specular must lie strictly inside (0, 1)".into(),
                });
            }
            if !(p.density_scale > 0.0) {
                return Err(Error::InvalidScene { reason: "density_scale must be positive".into() });
            }
        }
        Ok(())
    }
}

/// Builds a scene from a spec; a pure function of the spec.
pub fn generate_synthetic_scene(spec: &SyntheticSceneSpec) -> Result<TriPlaneField> {
    spec.validate()?;
    match &spec.kind {
        SceneKind::RandomWeights => generate_random(spec),
        SceneKind::AnalyticSphere(params) => generate_sphere(spec, params),
    }
}

fn generate_random(spec: &SyntheticSceneSpec) -> Result<TriPlaneField> {
    const SCALE: f64 = 0.1;
    let (r, c) = (spec.resolution, spec.channels);
    let mut planes: [Vec<f32>; 3] = Default::default();
    for (i, plane) in planes.iter_mut().enumerate() {
        let mut rng = SplitMix64::fork(spec.seed, i as u64 + 1);
        *plane = (0..r * r * c).map(|_| (rng.next_signed() * SCALE) as f32).collect();
    }
    let fill = |decoder: &mut DecoderWeights, stream: u64| {
        let mut rng = SplitMix64::fork(spec.seed, stream);
        for layer in &mut decoder.layers {
            for w in &mut layer.weights {
                *w = (rng.next_signed() * SCALE) as f32;
            }
            for b in &mut layer.bias {
                *b = (rng.next_signed() * SCALE) as f32;
            }
        }
    };
    let mut diffuse = DecoderWeights::zeros(c, DIFFUSE_HIDDEN, DIFFUSE_FIXED_OUTPUTS + spec.feature_channels);
    let mut specular = DecoderWeights::zeros(c, SPECULAR_HIDDEN, 1);
    fill(&mut diffuse, 10);
    fill(&mut specular, 20);
    TriPlaneField::new(r, c, spec.feature_channels, spec.bounds, planes, diffuse, specular)
}

/// Sphere construction. Plane channels encode, after tri-plane summation:
/// ch0 = x, ch1 = y, ch2 = z (exact: bilinear interpolation reproduces
/// linear functions), ch3 = |x − c|² (texel-exact, interpolated between).
/// The hidden layer turns each channel t into the pair
/// softplus(t), softplus(−t) whose difference is exactly t, so the heads
/// read linear functions of position through the softplus layer:
/// raw normal = x − c, raw σ = g·(radius² − |x − c|²) with g chosen so the
/// density at the center is `density_scale`.
fn generate_sphere(spec: &SyntheticSceneSpec, p: &SphereParams) -> Result<TriPlaneField> {
    let (r, c) = (spec.resolution, spec.channels);
    let coord = |i: usize| (i as f64 / (r - 1) as f64 - 0.5) * spec.bounds as f64;
    let mut planes: [Vec<f32>; 3] = [
        vec![0.0; r * r * c],
        vec![0.0; r * r * c],
        vec![0.0; r * r * c],
    ];
    for j in 0..r {
        for i in 0..r {
            let at = (j * r + i) * c;
            // XY plane, indexed (u=x, v=y)
            let (x, y) = (coord(i), coord(j));
            planes[0][at] = x as f32;
            planes[0][at + 1] = y as f32;
            planes[0][at + 3] = ((x - p.center.x).powi(2) + (y - p.center.y).powi(2)) as f32;
            // YZ plane, indexed (u=y, v=z)
            let z = coord(j);
            planes[1][at + 2] = z as f32;
            planes[1][at + 3] = (z - p.center.z).powi(2) as f32;
            // XZ plane contributes nothing.
        }
    }

    let n_out = DIFFUSE_FIXED_OUTPUTS + spec.feature_channels;
    let mut diffuse = DecoderWeights::zeros(c, DIFFUSE_HIDDEN, n_out);
    // Pass-through pairs for channels 0..4.
    for t in 0..4 {
        *diffuse.layers[0].weight_mut(2 * t, t) = 1.0;
        *diffuse.layers[0].weight_mut(2 * t + 1, t) = -1.0;
    }
    // Albedo head: constant via bias.
    for (ch, a) in [p.albedo.r, p.albedo.g, p.albedo.b].into_iter().enumerate() {
        diffuse.layers[1].bias[ch] = logit(a) as f32;
    }
    // Normal head: x − center, exactly radial after normalization.
    for (t, center) in [p.center.x, p.center.y, p.center.z].into_iter().enumerate() {
        *diffuse.layers[1].weight_mut(3 + t, 2 * t) = 1.0;
        *diffuse.layers[1].weight_mut(3 + t, 2 * t + 1) = -1.0;
        diffuse.layers[1].bias[3 + t] = -center as f32;
    }
    // Density head: g·(radius² − |x−c|²), peaking at density_scale.
    let gain = p.density_scale / (p.radius * p.radius);
    *diffuse.layers[1].weight_mut(6, 6) = -gain as f32;
    *diffuse.layers[1].weight_mut(6, 7) = gain as f32;
    diffuse.layers[1].bias[6] = (gain * p.radius * p.radius) as f32;

    let mut specular = DecoderWeights::zeros(c, SPECULAR_HIDDEN, 1);
    specular.layers[1].bias[0] = logit(p.specular) as f32;

    TriPlaneField::new(r, c, spec.feature_channels, spec.bounds, planes, diffuse, specular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bit_equal(a: &TriPlaneField, b: &TriPlaneField) -> bool {
        let floats = |f: &TriPlaneField| -> Vec<u32> {
            let mut out: Vec<u32> = f.planes().iter().flatten().map(|v| v.to_bits()).collect();
            for d in [f.diffuse_weights(), f.specular_weights()] {
                for l in &d.layers {
                    out.extend(l.weights.iter().map(|v| v.to_bits()));
                    out.extend(l.bias.iter().map(|v| v.to_bits()));
                }
            }
            out
        };
        a.resolution() == b.resolution()
            && a.channels() == b.channels()
            && a.feature_channels() == b.feature_channels()
            && a.bounds().to_bits() == b.bounds().to_bits()
            && floats(a) == floats(b)
    }

    #[test]
    fn scene_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.flit");
        let field = generate_synthetic_scene(&SyntheticSceneSpec::random(99)).unwrap();
        save_scene(&field, &path).unwrap();
        let loaded = load_scene(&path).unwrap();
        assert!(bit_equal(&field, &loaded));

        // Bytes written from the reloaded scene are identical too.
        let path2 = dir.path().join("scene2.flit");
        save_scene(&loaded, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.flit");
        let field = generate_synthetic_scene(&SyntheticSceneSpec::random(1)).unwrap();
        save_scene(&field, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0..4].copy_from_slice(b"XXXX");
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_scene(&path), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.flit");
        let field = generate_synthetic_scene(&SyntheticSceneSpec::random(1)).unwrap();
        save_scene(&field, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4..8].copy_from_slice(&7u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_scene(&path),
            Err(Error::UnsupportedVersion { found: 7, supported: SCENE_VERSION })
        ));
    }

    #[test]
    fn truncation_reports_missing_byte_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.flit");
        let field = generate_synthetic_scene(&SyntheticSceneSpec::random(1)).unwrap();
        save_scene(&field, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 10);
        std::fs::write(&path, &bytes).unwrap();
        match load_scene(&path) {
            Err(Error::Truncated { missing, .. }) => assert_eq!(missing, 10),
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_is_a_size_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.flit");
        let field = generate_synthetic_scene(&SyntheticSceneSpec::random(1)).unwrap();
        save_scene(&field, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.extend_from_slice(&[0u8; 5]);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_scene(&path), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn non_finite_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.flit");
        let field = generate_synthetic_scene(&SyntheticSceneSpec::random(1)).unwrap();
        save_scene(&field, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[40..44].copy_from_slice(&f32::NAN.to_le_bytes()); // inside plane XY
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_scene(&path), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn lighting_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("light.json");
        let mut env = IrradianceSH::zero();
        for (k, c) in env.coeffs.iter_mut().enumerate() {
            *c = Rgb::new(0.1 * k as f64, -0.739846243, 1.0 / (k as f64 + 3.0));
        }
        save_lighting(&env, &path).unwrap();
        let back = load_lighting(&path).unwrap();
        for (a, b) in env.coeffs.iter().zip(&back.coeffs) {
            assert_eq!(a.r.to_bits(), b.r.to_bits());
            assert_eq!(a.g.to_bits(), b.g.to_bits());
            assert_eq!(a.b.to_bits(), b.b.to_bits());
        }

        std::fs::write(&path, r#"{"sh": [[1,1,1],[0,0,0]]}"#).unwrap();
        assert!(matches!(load_lighting(&path), Err(Error::BadCoefficientCount { found: 2 })));

        std::fs::write(&path, r#"{"sh": [[1,"x",1]]}"#).unwrap();
        assert!(matches!(load_lighting(&path), Err(Error::Json(_))));
    }

    #[test]
    fn dc_white_lighting_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("light.json");
        std::fs::write(
            &path,
            r#"{"sh": [[1,1,1],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0]]}"#,
        )
        .unwrap();
        let env = load_lighting(&path).unwrap();
        assert_eq!(env.coeffs[0], Rgb::WHITE);
        for k in 1..9 {
            assert_eq!(env.coeffs[k], Rgb::BLACK);
        }
    }

    #[test]
    fn same_seed_scenes_are_bit_identical() {
        let a = generate_synthetic_scene(&SyntheticSceneSpec::random(1234)).unwrap();
        let b = generate_synthetic_scene(&SyntheticSceneSpec::random(1234)).unwrap();
        assert!(bit_equal(&a, &b));
        let c = generate_synthetic_scene(&SyntheticSceneSpec::random(1235)).unwrap();
        assert!(!bit_equal(&a, &c));
    }

    #[test]
    fn sphere_density_contrast_and_normals() {
        let spec = SyntheticSceneSpec::sphere();
        let SceneKind::AnalyticSphere(p) = spec.kind else { unreachable!() };
        let field = generate_synthetic_scene(&spec).unwrap();

        let center = field.sample_point(p.center).unwrap();
        let outside = field
            .sample_point(p.center + Vec3::new(2.0 * p.radius, 0.0, 0.0))
            .unwrap();
        assert!(
            center.sigma >= 50.0 * outside.sigma.max(1e-300),
            "σ(center) = {}, σ(2r) = {}",
            center.sigma,
            outside.sigma
        );
        // Bilinear interpolation of the squared-distance channel overshoots
        // slightly between texels, so the peak sits just under density_scale.
        assert_relative_eq!(center.sigma, p.density_scale, max_relative = 0.01);

        // Surface normal at (r, 0, 0) + center is radial.
        let surface = field
            .sample_point(p.center + Vec3::new(p.radius, 0.0, 0.0))
            .unwrap();
        let n = surface.normal.vector();
        assert!((n - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-2, "normal {n:?}");

        // Constant reflectances.
        assert_relative_eq!(center.k_d.r, p.albedo.r, epsilon = 1e-6);
        assert_relative_eq!(outside.k_d.g, p.albedo.g, epsilon = 1e-6);
        assert_relative_eq!(center.k_s, p.specular, epsilon = 1e-6);
        assert_relative_eq!(outside.k_s, p.specular, epsilon = 1e-6);
    }

    #[test]
    fn sphere_normals_are_radial_all_over_the_shell() {
        let spec = SyntheticSceneSpec::sphere();
        let SceneKind::AnalyticSphere(p) = spec.kind else { unreachable!() };
        let field = generate_synthetic_scene(&spec).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..32 {
            let v = Vec3::new(rng.next_signed(), rng.next_signed(), rng.next_signed());
            if v.norm() < 1e-3 {
                continue;
            }
            let radial = v / v.norm();
            let point = p.center + radial * p.radius;
            let n = field.sample_point(point).unwrap().normal.vector();
            assert!((n - radial).norm() < 1e-2, "{n:?} vs {radial:?}");
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = SyntheticSceneSpec::sphere();
        let SceneKind::AnalyticSphere(mut p) = spec.kind else { unreachable!() };
        p.radius = 0.0;
        spec.kind = SceneKind::AnalyticSphere(p);
        assert!(generate_synthetic_scene(&spec).is_err());

        p.radius = 2.0; // pokes out of the 3-unit cube
        spec.kind = SceneKind::AnalyticSphere(p);
        assert!(generate_synthetic_scene(&spec).is_err());

        p.radius = 0.8;
        p.albedo = Rgb::new(1.0, 0.5, 0.5); // logit(1) undefined
        spec.kind = SceneKind::AnalyticSphere(p);
        assert!(generate_synthetic_scene(&spec).is_err());

        let mut r = SyntheticSceneSpec::random(1);
        r.resolution = 1;
        assert!(generate_synthetic_scene(&r).is_err());
    }
}
