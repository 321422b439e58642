//! Increment and Haar–Schauder paths, and how far a subsampled path strays.

use wiener_sausage::brownian::{haar_schauder_path, sample_increment_path, subsample_path};
use wiener_sausage::geometry::hausdorff_polyline;
use wiener_sausage::montecarlo::derive_stream;

fn main() -> wiener_sausage::Result<()> {
    let fine = sample_increment_path(4096, 1.0, &mut derive_stream(1, 0))?;
    println!("4096 steps: end {:?}, diameter {:.4}", fine.vertices().last().unwrap(), fine.diameter());
    for k in [64, 256, 1024] {
        let coarse = subsample_path(&fine, 4096 / k)?;
        let gap = fine
            .times()
            .iter()
            .zip(fine.vertices())
            .map(|(&t, &v)| coarse.position_at(t).dist(v))
            .fold(0.0, f64::max);
        println!("k = {k:4}: hausdorff {:.4}  sup gap {gap:.4}", hausdorff_polyline(&coarse, &fine));
    }
    let haar = haar_schauder_path(10, &mut derive_stream(1, 0))?;
    println!("haar level 10: {} vertices, horizon {}", haar.len(), haar.horizon());
    Ok(())
}
