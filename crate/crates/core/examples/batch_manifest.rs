//! Write a small dataset and manifest, then run batch jobs over it.
//!
//! cargo run --example batch_manifest -- [work_dir]

use std::path::PathBuf;

use epsmap::batch::{run, Command, DatasetManifest, EdgeOptions, JobConfig, ManifestEntry};
use epsmap::imagecore::{save_labels_png, save_png};
use epsmap::synth::{render_photo, street_scene, SOURCES};
use epsmap::{LabelEncoding, Palette};

fn main() -> epsmap::Result<()> {
    let work = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/examples-out/batch".into()));
    std::fs::create_dir_all(&work).map_err(|e| epsmap::Error::io(&work, e))?;

    let palette = Palette::cityscapes();
    let mut entries = Vec::new();
    for (i, source) in SOURCES.iter().enumerate() {
        let id = format!("{source}_000");
        let labels = street_scene(256, 144, i as u64);
        save_png(&render_photo(&labels, &palette, source, i as u64), work.join(format!("{id}.png")))?;
        save_labels_png(&labels, LabelEncoding::Color, &palette, work.join(format!("{id}_seg.png")))?;
        let mut entry = ManifestEntry::new(id.clone());
        entry.image = Some(format!("{id}.png").into());
        entry.segmentation = Some(format!("{id}_seg.png").into());
        entry.tags = vec![source.to_string()];
        entries.push(entry);
    }
    let manifest_path = work.join("manifest.json");
    DatasetManifest::new(entries, 2024).save(&manifest_path)?;
    let manifest = DatasetManifest::load(&manifest_path)?;

    let jobs = [
        Command::Compose {
            fallback_edges: true,
            edge_gain: 1.0,
            edges: EdgeOptions::default(),
        },
        Command::Warp { levels: vec![0, 4, 16] },
        Command::Smooth { radii: vec![2] },
    ];
    for command in jobs {
        let out = work.join(command.name());
        let report = run(&manifest, &JobConfig::new(command, &out))?;
        println!(
            "{}: {} entries, {} failed -> {}",
            report.command,
            report.entries.len(),
            report.failed(),
            out.display()
        );
    }
    Ok(())
}
