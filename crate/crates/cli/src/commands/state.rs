use anyhow::{Context, Result};
use std::path::Path;

pub fn show(
    photons: usize,
    target: &str,
    bad_mode: Option<usize>,
    out: Option<&Path>,
    cache: &Path,
) -> Result<()> {
    let target = crate::spec::parse_target(photons, target, bad_mode, cache)?;
    let doc = serde_json::json!({
        "photons": photons,
        "modes": target.state.modes(),
        "target": target.name,
        "purity": target.state.purity(),
        "blocks": target.state.to_json(),
    });
    let rendered = format!("{}\n", serde_json::to_string_pretty(&doc)?);
    match out {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}
