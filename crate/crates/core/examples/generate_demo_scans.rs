//! Regenerates `data/scans_demo.dat`: thirty synthetic force scans over a
//! 62-350 nm grid, drawn from the rough-averaged tabulated-gold force
//! curve with a -0.3 nm separation offset and 14.5 pN Gaussian noise
//! (seeded, so the file is reproducible).
//!
//! Run from the workspace root: `cargo run --example generate_demo_scans`

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use casimir::constants::DEFAULT_SPHERE_RADIUS;
use casimir::lifshitz::ForceCurve;
use casimir::optics::{load_optical_table, DrudeParams, PermittivityModel};
use casimir::roughness;

fn main() {
    let table = load_optical_table(
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/gold_nk.dat"),
        DrudeParams::gold(),
    )
    .unwrap();
    let model = PermittivityModel::tabulated(table);
    let grid: Vec<f64> = (0..70)
        .map(|i| 30e-9 * (380.0f64 / 30.0).powf(i as f64 / 69.0))
        .collect();
    let curve = ForceCurve::build(DEFAULT_SPHERE_RADIUS, &model, 0.0, &grid).unwrap();
    let hist = roughness::measured_gold_histogram();

    let rough = |z: f64| {
        roughness::force_rough_averaged(z, &hist, &hist, |s| curve.interpolate(s)).unwrap()
    };

    let n_scans = 30;
    let n_points = 289;
    let offset = -0.3e-9; // true separations sit 0.3 nm below the nominal grid
    let noise_pn = 14.5;

    let mut rng = ChaCha8Rng::seed_from_u64(0x0ca51713);
    let mut out = String::new();
    out.push_str("# Synthetic demonstration scans: rough-averaged tabulated-gold force\n");
    out.push_str("# with a -0.3 nm separation offset and 14.5 pN Gaussian noise.\n");
    out.push_str("# Regenerate with: cargo run --example generate_demo_scans\n");
    out.push_str("z_nm");
    for k in 1..=n_scans {
        let _ = write!(out, ", scan_{k}");
    }
    out.push('\n');

    for i in 0..n_points {
        let z = 62e-9 + (350e-9 - 62e-9) * i as f64 / (n_points - 1) as f64;
        let truth = rough(z + offset);
        let _ = write!(out, "{:.3}", z * 1e9);
        for _ in 0..n_scans {
            // Box-Muller
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            let f_pn = truth * 1e12 + noise_pn * g;
            let _ = write!(out, ", {f_pn:.3}");
        }
        out.push('\n');
    }

    std::fs::write(
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/scans_demo.dat"),
        out,
    )
    .unwrap();
    println!("wrote data/scans_demo.dat ({n_points} points x {n_scans} scans)");
}
