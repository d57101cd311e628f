//! Export a minimal-surface slice of a pluriminimal immersion as an
//! OBJ-style text mesh. The restriction of the immersion to any
//! holomorphic curve in the domain is a classical minimal surface; this
//! samples the diagonal curve z = (t, t) of the Furuhata immersion and
//! writes the projection to three target coordinates.
//!
//! Run with: `cargo run --example mesh_export`

use pluriminimal::checks::sample_polydisk;
use pluriminimal::expr::HoloExpr;
use pluriminimal::family::{family_data, FamilyInput};
use pluriminimal::mesh::{harmonicity_residual, mesh_surface, MeshSlice};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let points = sample_polydisk(2, 20, 2.0, &mut rng);
    let data = family_data(&FamilyInput::parse("z1^3", "0").unwrap(), &points).unwrap();

    let slice = MeshSlice {
        curve: vec![HoloExpr::parse("z1", 1).unwrap(), HoloExpr::parse("z1", 1).unwrap()],
        resolution: 33,
        projection: [0, 1, 3],
    };

    // Each coordinate of the slice is the real part of a holomorphic
    // function of t, so the five-point discrete Laplacian is the mean
    // curvature oracle for the exported surface.
    let residual = harmonicity_residual(&data, &slice).unwrap();
    println!("discrete harmonicity residual: {residual:.3e}");

    let mesh = mesh_surface(&data, &slice).unwrap();
    let path = std::env::temp_dir().join("furuhata_slice.obj");
    std::fs::write(&path, &mesh).unwrap();
    println!(
        "wrote {} vertices, {} faces to {}",
        mesh.lines().filter(|l| l.starts_with("v ")).count(),
        mesh.lines().filter(|l| l.starts_with("f ")).count(),
        path.display()
    );
}
