//! Build the C² → R⁶ family from a pair of entire functions and verify
//! every condition of the representation theorem: closed holomorphic
//! forms, vanishing conformality tensor, and maximal-rank coefficient
//! matrix, plus the finite-difference minimality probe on complex-line
//! restrictions.
//!
//! Run with: `cargo run --example family_verify`

use pluriminimal::checks::{check_closed, check_rank, conformality_residual, sample_polydisk};
use pluriminimal::checks::{CLOSED_TOL, CONFORMALITY_TOL, RANK_REL_TOL};
use pluriminimal::family::{family_data, FamilyInput};
use pluriminimal::geometry::line_restriction_mean_curvature;
use pluriminimal::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points = sample_polydisk(2, 100, 2.0, &mut rng);

    for (f, g) in [("z1^3", "0"), ("exp(z1)", "sin(z1)"), ("z1^2 - z1", "0.125*z1^4")] {
        let input = FamilyInput::parse(f, g).expect("entire functions");
        let data = family_data(&input, &points).expect("relation holds by construction");
        println!("f = {f}, g = {g}: {} forms on C^2", data.n());

        let closed = check_closed(&data, &points, CLOSED_TOL).unwrap();
        println!("  closedness residual  {:.3e} (pass: {})", closed.worst_residual, closed.pass);

        let conf = conformality_residual(&data, &points).unwrap();
        println!("  conformality residual {:.3e} (pass: {})", conf, conf < CONFORMALITY_TOL);

        let rank = check_rank(&data, &points, RANK_REL_TOL).unwrap();
        println!("  coefficient rank {} of {} (pass: {})", rank.worst_rank, rank.required_rank, rank.pass);

        let mut worst = 0.0f64;
        for z in points.iter().take(10) {
            let v: Vec<C64> = (0..2)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            worst = worst.max(line_restriction_mean_curvature(&data, z, &v, 1e-4).unwrap());
        }
        println!("  line-restriction mean curvature (FD) {:.3e} (pass: {})", worst, worst < 1e-6);
    }
}
