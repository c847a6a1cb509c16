//! The fixed 128x72 .. 1024x576 pyramid from an arbitrarily sized image.
//!
//! cargo run --example resolution_pyramid -- [out_dir]

use epsmap::augment::resolution_pyramid;
use epsmap::imagecore::save_png;
use epsmap::synth::{render_photo, street_scene};
use epsmap::Palette;

fn main() -> epsmap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into());
    std::fs::create_dir_all(&out).map_err(|e| epsmap::Error::io(&out, e))?;

    // KITTI-like aspect ratio
    let labels = street_scene(1242, 375, 4);
    let photo = render_photo(&labels, &Palette::cityscapes(), "kitti", 4);
    for level in resolution_pyramid(&photo) {
        let path = format!("{out}/pyramid_{}x{}.png", level.width(), level.height());
        save_png(&level, &path)?;
        println!("{path}");
    }
    Ok(())
}
