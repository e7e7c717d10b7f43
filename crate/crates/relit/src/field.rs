//! Tri-plane feature field with diffuse/specular decoders.
//!
//! A point x is featurized by projecting it onto three axis-aligned planes
//! (XY, YZ, XZ), bilinearly interpolating each R×R×C grid and summing the
//! three results. The diffuse decoder maps the summed features through one
//! softplus hidden layer of width 64 to diffuse reflectance, a normal,
//! density and a raw feature vector; the specular decoder uses a width-32
//! hidden layer and yields a single reflectance coefficient.
//!
//! Head activations: logistic for k_d and k_s, softplus for σ, explicit
//! L2 normalization for the normal. Grids and weights are stored as f32
//! (the interchange precision); all arithmetic runs in f64.

use crate::error::{Error, Result};
use crate::math::{logistic, softplus, Direction, Rgb, Vec3};

pub const DIFFUSE_HIDDEN: usize = 64;
pub const SPECULAR_HIDDEN: usize = 32;
/// k_d (3) + raw normal (3) + σ (1); the feature vector w follows.
pub const DIFFUSE_FIXED_OUTPUTS: usize = 7;

/// One fully connected layer, weights row-major (out_dim rows of in_dim).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

impl DenseLayer {
    pub fn new(in_dim: usize, out_dim: usize, weights: Vec<f32>, bias: Vec<f32>) -> Result<Self> {
        if weights.len() != in_dim * out_dim {
            return Err(Error::ShapeMismatch {
                context: "dense layer weights",
                expected: in_dim * out_dim,
                got: weights.len(),
            });
        }
        if bias.len() != out_dim {
            return Err(Error::ShapeMismatch {
                context: "dense layer bias",
                expected: out_dim,
                got: bias.len(),
            });
        }
        if !weights.iter().chain(&bias).all(|v| v.is_finite()) {
            return Err(Error::NonFinite { context: "dense layer parameters".into() });
        }
        Ok(DenseLayer { in_dim, out_dim, weights, bias })
    }

    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
        }
    }

    pub fn weight_mut(&mut self, row: usize, col: usize) -> &mut f32 {
        &mut self.weights[row * self.in_dim + col]
    }

    fn apply(&self, input: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(input.len(), self.in_dim);
        out.clear();
        for r in 0..self.out_dim {
            let row = &self.weights[r * self.in_dim..(r + 1) * self.in_dim];
            let mut acc = self.bias[r] as f64;
            for (w, x) in row.iter().zip(input) {
                acc += *w as f64 * x;
            }
            out.push(acc);
        }
    }
}

/// Feed-forward decoder: softplus after every layer except the last.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderWeights {
    pub layers: Vec<DenseLayer>,
}

impl DecoderWeights {
    pub fn new(layers: Vec<DenseLayer>) -> Self {
        DecoderWeights { layers }
    }

    /// Default-architecture decoder with all parameters zero.
    pub fn zeros(input_dim: usize, hidden: usize, output_dim: usize) -> Self {
        DecoderWeights {
            layers: vec![
                DenseLayer::zeros(input_dim, hidden),
                DenseLayer::zeros(hidden, output_dim),
            ],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_dim)
    }

    /// Checks the layer chain against the fixed architecture: `input_dim` in,
    /// `hidden`-wide interior, `output_dim` out.
    fn validate(
        &self,
        name: &'static str,
        input_dim: usize,
        hidden: usize,
        output_dim: usize,
    ) -> Result<()> {
        let n = self.layers.len();
        if n == 0 {
            return Err(Error::ShapeMismatch { context: name, expected: 1, got: 0 });
        }
        for (i, layer) in self.layers.iter().enumerate() {
            let want_in = if i == 0 { input_dim } else { hidden };
            let want_out = if i == n - 1 { output_dim } else { hidden };
            if layer.in_dim != want_in {
                return Err(Error::ShapeMismatch { context: name, expected: want_in, got: layer.in_dim });
            }
            if layer.out_dim != want_out {
                return Err(Error::ShapeMismatch { context: name, expected: want_out, got: layer.out_dim });
            }
        }
        Ok(())
    }

    /// Runs the network; the result is left in `a`.
    fn forward(&self, input: &[f64], a: &mut Vec<f64>, b: &mut Vec<f64>) -> Result<()> {
        let first = self.layers.first().ok_or(Error::ShapeMismatch {
            context: "decoder layers",
            expected: 1,
            got: 0,
        })?;
        if input.len() != first.in_dim {
            return Err(Error::ShapeMismatch {
                context: "decoder input",
                expected: first.in_dim,
                got: input.len(),
            });
        }
        a.clear();
        a.extend_from_slice(input);
        let n = self.layers.len();
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(a, b);
            if i + 1 < n {
                for v in b.iter_mut() {
                    *v = softplus(*v);
                }
            }
            std::mem::swap(a, b);
        }
        Ok(())
    }
}

/// Index of each plane in [`TriPlaneField::planes`], named by the two world
/// axes it is indexed with (in order: plane u axis, plane v axis).
pub const PLANE_XY: usize = 0;
pub const PLANE_YZ: usize = 1;
pub const PLANE_XZ: usize = 2;

/// The complete renderable scene: three feature planes plus two decoders.
///
/// The world cube [-bounds/2, +bounds/2]³ maps linearly onto texel
/// coordinates [0, R-1] on each plane; out-of-bounds points clamp to the
/// border texel. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TriPlaneField {
    resolution: usize,
    channels: usize,
    feature_channels: usize,
    bounds: f32,
    planes: [Vec<f32>; 3],
    diffuse: DecoderWeights,
    specular: DecoderWeights,
}

impl TriPlaneField {
    pub fn new(
        resolution: usize,
        channels: usize,
        feature_channels: usize,
        bounds: f32,
        planes: [Vec<f32>; 3],
        diffuse: DecoderWeights,
        specular: DecoderWeights,
    ) -> Result<Self> {
        if resolution == 0 || channels == 0 {
            return Err(Error::InvalidScene {
                reason: "resolution and channels must be positive".into(),
            });
        }
        if !(bounds > 0.0) || !bounds.is_finite() {
            return Err(Error::InvalidScene { reason: format!("bounds must be positive, got {bounds}") });
        }
        let texels = resolution * resolution * channels;
        for (i, plane) in planes.iter().enumerate() {
            if plane.len() != texels {
                return Err(Error::ShapeMismatch {
                    context: "plane grid",
                    expected: texels,
                    got: plane.len(),
                });
            }
            if !plane.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { context: format!("plane {i} grid") });
            }
        }
        diffuse.validate(
            "diffuse decoder",
            channels,
            DIFFUSE_HIDDEN,
            DIFFUSE_FIXED_OUTPUTS + feature_channels,
        )?;
        specular.validate("specular decoder", channels, SPECULAR_HIDDEN, 1)?;
        Ok(TriPlaneField {
            resolution,
            channels,
            feature_channels,
            bounds,
            planes,
            diffuse,
            specular,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn feature_channels(&self) -> usize {
        self.feature_channels
    }

    pub fn bounds(&self) -> f32 {
        self.bounds
    }

    pub fn planes(&self) -> &[Vec<f32>; 3] {
        &self.planes
    }

    pub fn diffuse_weights(&self) -> &DecoderWeights {
        &self.diffuse
    }

    pub fn specular_weights(&self) -> &DecoderWeights {
        &self.specular
    }

    pub(crate) fn diffuse_weights_mut(&mut self) -> &mut DecoderWeights {
        &mut self.diffuse
    }

    /// Resolution-aware finite-difference step, bounds / (4R).
    pub fn default_fd_step(&self) -> f64 {
        self.bounds as f64 / (4.0 * self.resolution as f64)
    }

    /// World coordinate → texel coordinate in [0, R-1], clamped at borders.
    fn texel_coord(&self, w: f64) -> f64 {
        let u = (w / self.bounds as f64 + 0.5) * (self.resolution - 1) as f64;
        u.clamp(0.0, (self.resolution - 1) as f64)
    }

    /// Adds one plane's bilinear sample to `out`.
    fn accumulate_plane(&self, plane: usize, u: f64, v: f64, out: &mut [f64]) {
        let r = self.resolution;
        let c = self.channels;
        let (u, v) = (self.texel_coord(u), self.texel_coord(v));
        let i0 = (u.floor() as usize).min(r.saturating_sub(2));
        let j0 = (v.floor() as usize).min(r.saturating_sub(2));
        let (i1, j1) = ((i0 + 1).min(r - 1), (j0 + 1).min(r - 1));
        let fu = u - i0 as f64;
        let fv = v - j0 as f64;
        let data = &self.planes[plane];
        let texel = |i: usize, j: usize| &data[(j * r + i) * c..(j * r + i + 1) * c];
        let (t00, t10, t01, t11) = (texel(i0, j0), texel(i1, j0), texel(i0, j1), texel(i1, j1));
        let (w00, w10) = ((1.0 - fu) * (1.0 - fv), fu * (1.0 - fv));
        let (w01, w11) = ((1.0 - fu) * fv, fu * fv);
        for k in 0..c {
            out[k] +=
                w00 * t00[k] as f64 + w10 * t10[k] as f64 + w01 * t01[k] as f64 + w11 * t11[k] as f64;
        }
    }

    /// f(x) = f_XY(x, y) + f_YZ(y, z) + f_XZ(x, z), written into `out`.
    pub fn sample_features_into(&self, p: Vec3, out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.channels, 0.0);
        self.accumulate_plane(PLANE_XY, p.x, p.y, out);
        self.accumulate_plane(PLANE_YZ, p.y, p.z, out);
        self.accumulate_plane(PLANE_XZ, p.x, p.z, out);
    }

    /// Aggregated tri-plane features at a point.
    pub fn sample_triplane(&self, p: Vec3) -> Vec<f64> {
        let mut out = Vec::new();
        self.sample_features_into(p, &mut out);
        out
    }

    /// Runs the diffuse decoder and splits its heads.
    pub fn decode_diffuse(&self, features: &[f64]) -> Result<DiffuseDecode> {
        let mut s = FieldScratch::default();
        self.decode_diffuse_scratch(features, &mut s)?;
        Ok(DiffuseDecode {
            k_d: s.k_d,
            normal: s.normal,
            sigma: s.sigma,
            features: s.w().to_vec(),
        })
    }

    /// Runs the specular decoder: a single coefficient in (0, 1).
    pub fn decode_specular(&self, features: &[f64]) -> Result<f64> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        self.specular.forward(features, &mut a, &mut b)?;
        Ok(logistic(a[0]))
    }

    /// Density alone (diffuse decoder σ head).
    pub fn density_at(&self, p: Vec3, scratch: &mut FieldScratch) -> Result<f64> {
        self.sample_features_into(p, &mut scratch.features);
        let features = std::mem::take(&mut scratch.features);
        let r = self.diffuse.forward(&features, &mut scratch.head, &mut scratch.hidden);
        scratch.features = features;
        r?;
        Ok(softplus(scratch.head[6]))
    }

    /// Full decode of one point, reusing the caller's scratch buffers.
    pub fn decode_point(&self, p: Vec3, scratch: &mut FieldScratch) -> Result<()> {
        self.sample_features_into(p, &mut scratch.features);
        let features = std::mem::take(&mut scratch.features);
        let r = self.decode_diffuse_scratch(&features, scratch).and_then(|_| {
            self.specular
                .forward(&features, &mut scratch.spec_head, &mut scratch.hidden)?;
            scratch.k_s = logistic(scratch.spec_head[0]);
            Ok(())
        });
        scratch.features = features;
        r
    }

    /// Owned-value decode of one point.
    pub fn sample_point(&self, p: Vec3) -> Result<ShadingSample> {
        let mut s = FieldScratch::default();
        self.decode_point(p, &mut s)?;
        Ok(ShadingSample {
            k_d: s.k_d,
            normal: s.normal,
            sigma: s.sigma,
            k_s: s.k_s,
            features: s.w().to_vec(),
        })
    }

    fn decode_diffuse_scratch(&self, features: &[f64], s: &mut FieldScratch) -> Result<()> {
        self.diffuse.forward(features, &mut s.head, &mut s.hidden)?;
        let o = &s.head;
        s.k_d = Rgb::new(logistic(o[0]), logistic(o[1]), logistic(o[2]));
        s.normal = normalize_with_guard(Vec3::new(o[3], o[4], o[5]));
        s.sigma = softplus(o[6]);
        Ok(())
    }

    /// Central finite difference of the density per axis:
    /// (σ(x + h·e_i) − σ(x − h·e_i)) / 2h.
    pub fn density_gradient_fd(&self, p: Vec3, h: f64) -> Result<Vec3> {
        assert!(h > 0.0, "finite-difference step must be positive");
        let mut s = FieldScratch::default();
        let mut g = [0.0f64; 3];
        for (axis, slot) in g.iter_mut().enumerate() {
            let mut e = Vec3::ZERO;
            match axis {
                0 => e.x = h,
                1 => e.y = h,
                _ => e.z = h,
            }
            let hi = self.density_at(p + e, &mut s)?;
            let lo = self.density_at(p - e, &mut s)?;
            *slot = (hi - lo) / (2.0 * h);
        }
        Ok(Vec3::new(g[0], g[1], g[2]))
    }
}

/// Raw L2 normalization with an ε = 1e-8 guard; a degenerate raw normal
/// falls back to +z so the unit invariant holds for every input.
fn normalize_with_guard(v: Vec3) -> Direction {
    let norm = v.norm();
    if norm < 1e-8 {
        Direction::POS_Z
    } else {
        Direction::new_unchecked(v / norm)
    }
}

/// Diffuse decoder outputs at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffuseDecode {
    pub k_d: Rgb,
    pub normal: Direction,
    pub sigma: f64,
    pub features: Vec<f64>,
}

/// Everything decoded at one shading point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadingSample {
    pub k_d: Rgb,
    pub normal: Direction,
    pub sigma: f64,
    pub k_s: f64,
    pub features: Vec<f64>,
}

/// Reusable buffers plus the decoded values of the most recent point.
#[derive(Debug, Clone)]
pub struct FieldScratch {
    features: Vec<f64>,
    hidden: Vec<f64>,
    head: Vec<f64>,
    spec_head: Vec<f64>,
    pub k_d: Rgb,
    pub normal: Direction,
    pub sigma: f64,
    pub k_s: f64,
}

impl Default for FieldScratch {
    fn default() -> Self {
        FieldScratch {
            features: Vec::new(),
            hidden: Vec::new(),
            head: Vec::new(),
            spec_head: Vec::new(),
            k_d: Rgb::BLACK,
            normal: Direction::POS_Z,
            sigma: 0.0,
            k_s: 0.0,
        }
    }
}

impl FieldScratch {
    /// Raw feature vector w of the most recent diffuse decode.
    pub fn w(&self) -> &[f64] {
        &self.head[DIFFUSE_FIXED_OUTPUTS..]
    }
}

/// What the decoded normal is compared against in the consistency loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientTarget {
    /// −∇σ / ‖∇σ‖ — outward-pointing and unit-comparable.
    #[default]
    NegatedNormalized,
    /// The literal raw spatial gradient ∇σ.
    Raw,
}

/// Mean L1 distance between the decoded normal and the (processed) density
/// gradient over a probe set: the normal-regularization loss.
pub fn normal_consistency_loss(
    field: &TriPlaneField,
    points: &[Vec3],
    h: f64,
    target: GradientTarget,
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut scratch = FieldScratch::default();
    let mut total = 0.0;
    for &p in points {
        let g = field.density_gradient_fd(p, h)?;
        let t = match target {
            GradientTarget::Raw => g,
            GradientTarget::NegatedNormalized => -g / g.norm().max(1e-12),
        };
        field.decode_point(p, &mut scratch)?;
        let n = scratch.normal.vector();
        total += (n.x - t.x).abs() + (n.y - t.y).abs() + (n.z - t.z).abs();
    }
    Ok(total / points.len() as f64)
}
