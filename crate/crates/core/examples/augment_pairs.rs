//! Random rotate/crop/scale applied identically to a photo and its labels.
//!
//! cargo run --example augment_pairs -- [out_dir]

use epsmap::augment::{augment_pair, AugmentSpec};
use epsmap::imagecore::{labels_to_color, save_png};
use epsmap::seed::derive_seed;
use epsmap::synth::{render_photo, street_scene};
use epsmap::Palette;

fn main() -> epsmap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into());
    std::fs::create_dir_all(&out).map_err(|e| epsmap::Error::io(&out, e))?;

    let palette = Palette::cityscapes();
    let labels = street_scene(512, 288, 8);
    let photo = render_photo(&labels, &palette, "cityscapes", 8);
    for k in 0..4 {
        let spec = AugmentSpec::default().with_seed(derive_seed(2024, "scene", 0, k));
        let params = spec.sample()?;
        let (image, seg) = augment_pair(&photo, &labels, &spec)?;
        save_png(&image, format!("{out}/augment_{k}.png"))?;
        save_png(&labels_to_color(&seg, &palette)?, format!("{out}/augment_{k}_seg.png"))?;
        println!("variant {k}: {:?} -> {}x{}", params, image.width(), image.height());
    }
    Ok(())
}
