//! Pointwise Kähler geometry of an immersion from its Weierstrass data:
//! the induced metric in the real coordinate frame, the block identities
//! forced by conformality, positivity, J-invariance, and the circularity
//! of the second fundamental form with its per-direction mean curvature.
//!
//! Run with: `cargo run --example geometry_report`

use pluriminimal::checks::sample_polydisk;
use pluriminimal::family::{family_data, FamilyInput};
use pluriminimal::geometry::geometry_report;
use pluriminimal::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points = sample_polydisk(2, 20, 2.0, &mut rng);
    let data = family_data(&FamilyInput::parse("exp(z1)", "z1^2").unwrap(), &points).unwrap();

    let z = [C64::new(0.3, -0.4), C64::new(-0.2, 0.5)];
    let directions: Vec<Vec<C64>> = (0..10)
        .map(|_| {
            (0..2)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let report = geometry_report(&data, &z, &directions).unwrap();

    println!("at z = {z:?}:");
    println!("  conformality residual      {:.3e}", report.conformality_residual);
    println!("  jacobian rank              {}", report.jacobian_rank);
    println!("  smallest singular value    {:.3e}", report.smallest_singular_value);
    println!("  ‖AᵀB + BᵀA‖               {:.3e}", report.blocks.cross_block_residual());
    println!("  ‖AᵀA − BᵀB‖               {:.3e}", report.blocks.diag_block_residual());
    println!("  metric min eigenvalue      {:.3e}", report.blocks.min_eigenvalue());
    println!("  J-invariance residual      {:.3e}", report.blocks.j_invariance_residual());
    println!("  circularity residual       {:.3e}", report.circularity_residual);
    let worst_h = report.mean_curvature_norms.iter().cloned().fold(0.0, f64::max);
    println!("  worst ‖B(v,v)+B(Jv,Jv)‖   {:.3e} over {} directions", worst_h, directions.len());
}
