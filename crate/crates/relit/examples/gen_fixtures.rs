//! Writes a set of ready-to-render fixture files: the analytic sphere scene,
//! a random-weights scene, and a few lighting environments.
//!
//! Usage: cargo run --release -p relit --example gen_fixtures -- [OUT_DIR]

use std::path::PathBuf;

use relit::math::Rgb;
use relit::scene_io::{generate_synthetic_scene, save_lighting, save_scene, SyntheticSceneSpec};
use relit::sh::IrradianceSH;

fn main() -> relit::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;

    let sphere = generate_synthetic_scene(&SyntheticSceneSpec::sphere())?;
    save_scene(&sphere, &dir.join("sphere.flit"))?;

    let random = generate_synthetic_scene(&SyntheticSceneSpec::random(7))?;
    save_scene(&random, &dir.join("random.flit"))?;

    save_lighting(&IrradianceSH::uniform(Rgb::WHITE), &dir.join("white.json"))?;

    let mut warm = IrradianceSH::uniform(Rgb::new(0.9, 0.75, 0.6));
    warm.coeffs[3] = Rgb::new(0.5, 0.3, 0.15); // arriving from +x
    save_lighting(&warm, &dir.join("warm_side.json"))?;

    let mut cool = IrradianceSH::uniform(Rgb::new(0.55, 0.65, 0.9));
    cool.coeffs[1] = Rgb::new(0.1, 0.2, 0.4); // arriving from above (+y)
    save_lighting(&cool, &dir.join("cool_top.json"))?;

    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
