//! Builds flat, IVF and IVF-PQ indexes over random unit vectors and compares
//! their answers for one query. Also round-trips the compressed index through
//! a file.

use plagdet::rng::seeded;
use plagdet::vecindex::{FlatIndex, IvfConfig, IvfPqIndex, Metric, PqParams, VectorSearch};
use rand::Rng;

const DIM: usize = 128;

fn unit_rows(n: usize, seed: u64) -> Vec<f32> {
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(n * DIM);
    for _ in 0..n {
        let row: Vec<f32> = (0..DIM).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        let norm = row.iter().map(|x| x * x).sum::<f32>().sqrt();
        out.extend(row.iter().map(|x| x / norm));
    }
    out
}

fn main() -> plagdet::Result<()> {
    let n = 5000;
    let data = unit_rows(n, 1);
    let ids: Vec<u64> = (0..n as u64).collect();
    // a slightly perturbed copy of row 1234
    let mut query = data[1234 * DIM..1235 * DIM].to_vec();
    query.iter_mut().zip(unit_rows(1, 2)).for_each(|(q, e)| *q += 0.2 * e);

    let flat = FlatIndex::from_rows(DIM, Metric::InnerProduct, &ids, &data)?;
    let ivf_cfg = IvfConfig {
        nlist: 64,
        nprobe: 8,
        seed: 5,
        ..IvfConfig::default()
    };
    let ivf = IvfPqIndex::build(&ivf_cfg, DIM, &ids, &data)?;
    let pq_cfg = IvfConfig {
        pq: Some(PqParams::with_dsub(DIM, 8, 256)?),
        ..ivf_cfg
    };
    let ivf_pq = IvfPqIndex::build(&pq_cfg, DIM, &ids, &data)?;

    let indexes: [(&str, &dyn VectorSearch); 3] = [("flat", &flat), ("ivf", &ivf), ("ivf_pq", &ivf_pq)];
    for (name, index) in indexes {
        let res = index.search(&query, 5, None)?;
        println!(
            "{name:>6} ({:>3} bytes/vector): {:?}",
            index.stored_bytes_per_vector(),
            res.ids()
        );
    }

    let path = std::env::temp_dir().join("plagdet_example.ssix");
    ivf_pq.save(&path)?;
    let loaded = IvfPqIndex::load(&path)?;
    assert_eq!(loaded.search(&query, 5, 8)?, ivf_pq.search(&query, 5, 8)?);
    println!(
        "reloaded {} ({} bytes) and got the same hits",
        path.display(),
        std::fs::metadata(&path)?.len()
    );
    std::fs::remove_file(path)?;
    Ok(())
}
