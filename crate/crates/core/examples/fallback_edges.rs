//! Sobel edges with hysteresis at a few threshold pairs.
//!
//! cargo run --example fallback_edges -- [out_dir]

use epsmap::eps::{detect_edges_fallback, sobel_magnitude};
use epsmap::imagecore::save_png;
use epsmap::synth::{render_photo, street_scene};
use epsmap::Palette;

fn main() -> epsmap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into());
    std::fs::create_dir_all(&out).map_err(|e| epsmap::Error::io(&out, e))?;

    let labels = street_scene(512, 288, 11);
    let photo = render_photo(&labels, &Palette::cityscapes(), "kitti", 11);
    save_png(&sobel_magnitude(&photo), format!("{out}/sobel_magnitude.png"))?;

    for (low, high) in [(0.05, 0.15), (0.1, 0.3), (0.2, 0.5)] {
        let edges = detect_edges_fallback(&photo, low, high)?;
        let on = edges.data().iter().filter(|&&v| v > 0).count();
        let path = format!("{out}/edges_{low}_{high}.png");
        save_png(&edges, &path)?;
        println!("{path}: {:.1}% edge pixels", 100.0 * on as f64 / edges.data().len() as f64);
    }
    Ok(())
}
