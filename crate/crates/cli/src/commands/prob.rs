use crate::{OutputFormat, ProbArgs};
use anyhow::{Context, Result};
use lodis::scattering::outcome_table;
use std::io::Write;

pub fn run(args: &ProbArgs) -> Result<()> {
    let cache = args.cache.resolve();
    let target = crate::spec::parse_target(args.photons, &args.target, args.bad_mode, &cache)?;
    let modes = target.state.modes();
    let u = crate::spec::parse_network(modes, &args.network)?;
    let transform = crate::spec::load_transform(&cache, args.photons, modes)?;
    let table = outcome_table(&target.state, &u, &transform, false)?;

    // per-irrep columns: the irreps carrying target weight, canonical order
    let shapes: Vec<_> = target.state.parts().iter().map(|p| p.shape.clone()).collect();
    let rendered = match args.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            let headers: Vec<String> = shapes
                .iter()
                .map(|s| {
                    s.rows().iter().map(|r| r.to_string()).collect::<Vec<_>>().join(".")
                })
                .collect();
            out.push_str(&format!("outcome,p_total,{}\n", headers.join(",")));
            for row in &table {
                let cells: Vec<String> = shapes
                    .iter()
                    .map(|s| format!("{:.12}", row.irrep_contribution(s)))
                    .collect();
                out.push_str(&format!(
                    "{},{:.12},{}\n",
                    row.occupation.display(),
                    row.total,
                    cells.join(",")
                ));
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = table
                .iter()
                .map(|row| {
                    let per: serde_json::Map<String, serde_json::Value> = shapes
                        .iter()
                        .map(|s| {
                            (s.display(), serde_json::json!(row.irrep_contribution(s)))
                        })
                        .collect();
                    serde_json::json!({
                        "outcome": row.occupation.display(),
                        "p_total": row.total,
                        "per_irrep": per,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "photons": args.photons,
                "modes": modes,
                "target": target.name,
                "network": args.network,
                "outcomes": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(())
}
