//! Build an EPS map from a segmentation and an edge map, then write it out.
//!
//! cargo run --example compose_eps -- [out_dir]

use epsmap::eps::{compose_eps_with_gain, detect_edges_fallback};
use epsmap::imagecore::{labels_to_color, save_png};
use epsmap::synth::{render_photo, street_scene};
use epsmap::Palette;

fn main() -> epsmap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/examples-out".into());
    std::fs::create_dir_all(&out).map_err(|e| epsmap::Error::io(&out, e))?;

    let palette = Palette::cityscapes();
    let labels = street_scene(512, 288, 7);
    let photo = render_photo(&labels, &palette, "cityscapes", 7);
    let edges = detect_edges_fallback(&photo, 0.1, 0.3)?;

    for gain in [0.5, 1.0] {
        let eps = compose_eps_with_gain(&edges, &labels, &palette, gain)?.with_provenance("sobel", "synthetic");
        let path = format!("{out}/eps_gain_{gain}.png");
        save_png(&eps.raster, &path)?;
        println!("{path} (edges: {}, segmentation: {})", eps.provenance.edge_source, eps.provenance.segmentation_source);
    }
    save_png(&labels_to_color(&labels, &palette)?, format!("{out}/segmentation.png"))?;
    save_png(&photo, format!("{out}/photo.png"))?;
    Ok(())
}
