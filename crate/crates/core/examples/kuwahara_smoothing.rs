//! Kuwahara smoothing at increasing radii.
//!
//! cargo run --example kuwahara_smoothing -- [out_dir]

use epsmap::ablation::PerturbationSpec;
use epsmap::imagecore::save_png;
use epsmap::synth::{render_photo, street_scene};
use epsmap::Palette;

fn main() -> epsmap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into());
    std::fs::create_dir_all(&out).map_err(|e| epsmap::Error::io(&out, e))?;

    let labels = street_scene(512, 288, 3);
    let photo = render_photo(&labels, &Palette::cityscapes(), "fcav", 3);
    for radius in [0, 2, 4, 8] {
        let smoothed = PerturbationSpec::smooth(radius).apply_raster(&photo)?;
        let path = format!("{out}/smooth_{radius}.png");
        save_png(&smoothed, &path)?;
        println!("{path}");
    }
    Ok(())
}
