//! Deterministic quadrature rules used by the projection code and by every
//! brute-force oracle in the test/validation suites.
//!
//! The sphere rule is an equal-area midpoint grid: uniform in z = cos θ and
//! uniform in azimuth, so every node carries the same solid angle
//! 4π / node_count. It is seedless, which keeps all integrals reproducible
//! bit-for-bit.

use std::f64::consts::PI;

use crate::math::{Direction, Rgb, Vec3};

/// Equal-area sphere grid with `n_z` bands of `2·n_z` azimuthal cells.
#[derive(Debug, Clone, Copy)]
pub struct SphereGrid {
    n_z: usize,
    n_phi: usize,
}

impl SphereGrid {
    /// Smallest grid of this family holding at least `min_nodes` nodes.
    pub fn with_min_nodes(min_nodes: usize) -> Self {
        let mut n_z = ((min_nodes as f64 / 2.0).sqrt().ceil() as usize).max(1);
        while 2 * n_z * n_z < min_nodes {
            n_z += 1;
        }
        SphereGrid { n_z, n_phi: 2 * n_z }
    }

    pub fn node_count(&self) -> usize {
        self.n_z * self.n_phi
    }

    /// Solid angle carried by each node.
    pub fn node_weight(&self) -> f64 {
        4.0 * PI / self.node_count() as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = Direction> + '_ {
        let dz = 2.0 / self.n_z as f64;
        let dphi = 2.0 * PI / self.n_phi as f64;
        (0..self.n_z).flat_map(move |i| {
            let z = -1.0 + (i as f64 + 0.5) * dz;
            let sin_theta = (1.0 - z * z).max(0.0).sqrt();
            (0..self.n_phi).map(move |j| {
                let phi = (j as f64 + 0.5) * dphi;
                Direction::new_unchecked(Vec3::new(
                    sin_theta * phi.cos(),
                    sin_theta * phi.sin(),
                    z,
                ))
            })
        })
    }

    /// ∫ f(ω) dω over the whole sphere.
    pub fn integrate<F: FnMut(Direction) -> f64>(&self, mut f: F) -> f64 {
        let w = self.node_weight();
        self.nodes().map(|d| f(d)).sum::<f64>() * w
    }

    /// ∫ f(ω) dω for an RGB-valued integrand.
    pub fn integrate_rgb<F: FnMut(Direction) -> Rgb>(&self, mut f: F) -> Rgb {
        let w = self.node_weight();
        let mut acc = Rgb::BLACK;
        for d in self.nodes() {
            acc += f(d);
        }
        acc * w
    }
}

/// Midpoint rule for ∫ f(u) du over [a, b].
pub fn integrate_1d<F: FnMut(f64) -> f64>(a: f64, b: f64, nodes: usize, mut f: F) -> f64 {
    let h = (b - a) / nodes as f64;
    (0..nodes).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}
