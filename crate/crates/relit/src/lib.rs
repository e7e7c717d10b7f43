//! Relightable tri-plane neural-field renderer.
//!
//! The pipeline: a [`field::TriPlaneField`] stores three 2D feature grids and
//! two small decoders. Sampling a 3D point yields diffuse reflectance, a
//! normal, density, a specular coefficient and a feature vector; shading
//! combines those with an order-2 spherical-harmonic irradiance environment
//! ([`sh::IrradianceSH`]) under a simplified Phong model ([`shade`]); and the
//! [`render`] module integrates shaded samples along camera rays into color,
//! feature, depth and opacity images. [`scene_io`] persists scenes and
//! lighting; [`validate`] packages the brute-force oracles that check every
//! simplification the fast path makes.

pub mod error;
pub mod field;
pub mod image;
pub mod math;
pub mod quadrature;
pub mod render;
pub mod rng;
pub mod scene_io;
pub mod sh;
pub mod shade;
pub mod validate;

pub use error::{Error, Result};
