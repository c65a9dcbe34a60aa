//! Clusters three well separated Gaussian blobs and prints how the inertia
//! falls over the Lloyd iterations.

use plagdet::rng::seeded;
use plagdet::vecindex::KMeans;
use rand::Rng;

fn main() -> plagdet::Result<()> {
    let centers = [[0.0f32, 0.0], [5.0, 5.0], [-5.0, 4.0]];
    let mut rng = seeded(3);
    let mut data = Vec::new();
    for c in &centers {
        for _ in 0..200 {
            data.push(c[0] + rng.gen_range(-1.0..1.0));
            data.push(c[1] + rng.gen_range(-1.0..1.0));
        }
    }

    let model = KMeans::new(3, 42).fit(&data, 2)?;
    println!("converged {} after {} iterations", model.converged, model.iterations);
    for (i, inertia) in model.inertia_history.iter().enumerate() {
        println!("  iter {i:>2}: inertia {inertia:.3}");
    }
    for c in 0..model.k {
        let p = model.centroid(c);
        println!("centroid {c}: ({:.2}, {:.2})", p[0], p[1]);
    }
    let (cluster, dist) = model.assign(&[4.6, 5.3]);
    println!("(4.6, 5.3) -> cluster {cluster} at squared distance {dist:.3}");
    Ok(())
}
