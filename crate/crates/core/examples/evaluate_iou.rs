//! Per-image IoU, per-class distributions and the CSV table.
//!
//! cargo run --example evaluate_iou

use epsmap::ablation::warp_labels;
use epsmap::metrics::{confusion, dataset_distribution, iou_from_confusion, write_distribution_csv, CSV_HEADER};
use epsmap::synth::street_scene;
use epsmap::Palette;

fn main() -> epsmap::Result<()> {
    let palette = Palette::cityscapes();
    let names: Vec<String> = palette.entries().iter().map(|e| e.name.clone()).collect();

    let mut matrices = Vec::new();
    for seed in 0..8 {
        let reference = street_scene(256, 144, seed);
        let candidate = warp_labels(&reference, 4, seed);
        let m = confusion(&reference, &candidate, None)?;
        println!("image {seed}: mean IoU {:.3}", iou_from_confusion(&m)?.mean_iou);
        matrices.push(m);
    }
    let dist = dataset_distribution(&matrices)?;
    println!(
        "overall: mean IoU {:.3}, pixel accuracy {:.3}",
        dist.overall.mean_iou, dist.overall.pixel_accuracy
    );
    let mut csv = csv::Writer::from_writer(std::io::stdout());
    csv.write_record(CSV_HEADER)?;
    write_distribution_csv(&mut csv, "warp4", &dist, &names)?;
    csv.flush().map_err(|e| epsmap::Error::io("stdout", e))?;
    Ok(())
}
