//! Locate and certify a self-intersection of the Furuhata immersion
//! (the family member with f(t) = t³, g = 0), demonstrating that this
//! pluriminimal immersion is not an embedding.
//!
//! Run with: `cargo run --release --example furuhata_intersection`

use pluriminimal::checks::sample_polydisk;
use pluriminimal::family::{family_data, FamilyInput};
use pluriminimal::immerse::immerse;
use pluriminimal::intersect::{self_intersect, SearchConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let points = sample_polydisk(2, 20, 2.0, &mut rng);
    let data = family_data(&FamilyInput::parse("z1^3", "0").unwrap(), &points).unwrap();

    let config = SearchConfig::default();
    println!("searching with {} starts, seed {}", config.starts, config.seed);
    match self_intersect(&data, &config).unwrap() {
        Some(hit) => {
            println!("self-intersection found:");
            println!("  p = {:?}", hit.p);
            println!("  q = {:?}", hit.q);
            println!("  domain separation        {:.6}", hit.separation);
            println!("  certified image distance {:.3e}", hit.distance);
            println!("  f(p) = {:?}", immerse(&data, &hit.p).unwrap());
            println!("  f(q) = {:?}", immerse(&data, &hit.q).unwrap());
        }
        None => println!("no pair found within the budget"),
    }

    // The holomorphic graph (f = g = 0) is injective: coordinates 3 and 4
    // of the image recover the domain point, so the same search finds
    // nothing.
    let graph = family_data(&FamilyInput::parse("0", "0").unwrap(), &points).unwrap();
    let none = self_intersect(&graph, &SearchConfig { starts: 16, ..config }).unwrap();
    println!("trivial graph search: {:?}", none.map(|h| h.distance));
}
