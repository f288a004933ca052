//! Prints crisp cluster sizes of fuzzy c-means fits on a ratings file, for a
//! few seeds and one or more fuzzifier values.
//!
//! cargo run --release -p hybridrec --example cluster_sizes -- data/ml-100k/u.data 2.0 1.1

use hybridrec::{fit_fcm, load_movielens, FcmConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .ok_or("usage: cluster_sizes <u.data> [fuzzifier...]")?;
    let matrix = load_movielens(path)?;
    let mut fuzzifiers = args.map(|a| a.parse()).collect::<Result<Vec<f64>, _>>()?;
    if fuzzifiers.is_empty() {
        fuzzifiers.push(FcmConfig::default().fuzzifier);
    }
    for fuzzifier in fuzzifiers {
        for seed in 0..3 {
            let config = FcmConfig {
                seed,
                fuzzifier,
                ..FcmConfig::default()
            };
            let model = fit_fcm(&matrix, config)?;
            let sizes = (0..model.cluster_count())
                .map(|k| model.cluster_members(k).map(|m| m.len()))
                .collect::<Result<Vec<_>, _>>()?;
            let peak = model
                .memberships
                .iter()
                .map(|u| u.iter().cloned().fold(0.0, f64::max))
                .sum::<f64>()
                / model.memberships.len() as f64;
            println!(
                "m={fuzzifier} seed {seed}: sizes {sizes:?}, iterations {}, converged {}, mean peak membership {peak:.4}",
                model.iterations, model.converged
            );
        }
    }
    Ok(())
}
