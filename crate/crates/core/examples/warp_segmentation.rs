//! Warp a segmentation at several levels and score it against the original.
//!
//! cargo run --release --example warp_segmentation -- [out_dir]

use epsmap::ablation::warp_labels;
use epsmap::imagecore::{labels_to_color, save_png};
use epsmap::metrics::{confusion, iou_from_confusion};
use epsmap::synth::street_scene;
use epsmap::Palette;

fn main() -> epsmap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into());
    std::fs::create_dir_all(&out).map_err(|e| epsmap::Error::io(&out, e))?;

    let palette = Palette::cityscapes();
    let labels = street_scene(1024, 576, 21);
    for level in [0, 2, 4, 8, 16] {
        let warped = warp_labels(&labels, level, 42);
        let iou = iou_from_confusion(&confusion(&labels, &warped, None)?)?;
        save_png(&labels_to_color(&warped, &palette)?, format!("{out}/warp_{level}.png"))?;
        println!("level {level:>2}: mean IoU {:.4}", iou.mean_iou);
    }
    Ok(())
}
