//! Progressive edge carving: how much of an edge map survives each level.
//!
//! cargo run --example carve_edges -- [out_dir]

use epsmap::ablation::{carve_edges, carve_threshold};
use epsmap::imagecore::save_png;
use epsmap::synth::{label_boundaries, street_scene};

fn main() -> epsmap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into());
    std::fs::create_dir_all(&out).map_err(|e| epsmap::Error::io(&out, e))?;

    let edges = label_boundaries(&street_scene(512, 288, 5));
    for level in 0..=4 {
        let carved = carve_edges(&edges, level)?;
        let kept = carve_threshold(&carved).data().iter().filter(|&&v| v > 0).count();
        save_png(&carved, format!("{out}/carve_{level}.png"))?;
        println!("level {level}: {kept} pixels above threshold");
    }
    Ok(())
}
