//! Parsing of target-state and network specifications shared by the
//! subcommands.

use anyhow::{bail, Context, Result};
use lodis::optics::{from_reck, qft, Interferometer, InterferometerJson, ReckParams};
use lodis::schur_weyl::SchurWeylTransform;
use lodis::states::{
    rho_completely, rho_from_fock_array, rho_indistinguishable, rho_singly, rho_singly_in_mode,
    rho_singly_mixed, FockArray, ReducedState,
};
use std::path::Path;

pub struct TargetSpec {
    pub state: ReducedState,
    pub name: String,
    /// Label occupation when known (drives the general bound).
    pub label_occupation: Option<lodis::combinatorics::Occupation>,
}

pub fn load_transform(cache: &Path, photons: usize, modes: usize) -> Result<SchurWeylTransform> {
    SchurWeylTransform::load_or_build(Some(cache), photons, modes)
        .with_context(|| format!("obtaining the Schur-Weyl transform for N={photons}, d={modes}"))
}

/// Parse `i | s | d | sm | fock:<file>` into a reduced state.
pub fn parse_target(
    photons: usize,
    spec: &str,
    bad_mode: Option<usize>,
    cache: &Path,
) -> Result<TargetSpec> {
    let coincident_label = |bad: usize| {
        let mut counts = vec![0usize; 2];
        counts[0] = photons - 1;
        counts[1] = 1;
        let _ = bad;
        lodis::combinatorics::Occupation::new(counts)
    };
    match spec {
        "i" => Ok(TargetSpec {
            state: rho_indistinguishable(photons),
            name: "indistinguishable".into(),
            label_occupation: Some(lodis::combinatorics::Occupation::bunched(photons, 2.max(1), 0)),
        }),
        "s" => {
            let bad = bad_mode.unwrap_or(photons);
            let state = if bad == photons {
                rho_singly(photons)?
            } else {
                let t = load_transform(cache, photons, photons)?;
                rho_singly_in_mode(photons, bad, &t)?
            };
            Ok(TargetSpec {
                state,
                name: format!("singly distinguishable (bad mode {bad})"),
                label_occupation: Some(coincident_label(bad)),
            })
        }
        "d" => Ok(TargetSpec {
            state: rho_completely(photons),
            name: "completely distinguishable".into(),
            label_occupation: Some(lodis::combinatorics::Occupation::coincident(photons)),
        }),
        "sm" => Ok(TargetSpec {
            state: rho_singly_mixed(photons)?,
            name: "singly distinguishable mixture".into(),
            label_occupation: Some(coincident_label(photons)),
        }),
        other => {
            let Some(path) = other.strip_prefix("fock:") else {
                bail!("unknown target {other:?}; expected i, s, d, sm or fock:<file>");
            };
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading Fock array {path}"))?;
            let counts: Vec<Vec<usize>> =
                serde_json::from_str(&text).context("Fock array must be a JSON integer matrix")?;
            let array = FockArray::new(counts)?;
            if array.total() != photons {
                bail!("Fock array holds {} photons, --n says {photons}", array.total());
            }
            let ts = load_transform(cache, photons, array.system_modes())?;
            let tl = load_transform(cache, photons, array.label_modes())?;
            let label_occupation = array.label_occupation();
            let coincident_rows = array.system_occupation().counts().iter().all(|&c| c == 1);
            Ok(TargetSpec {
                state: rho_from_fock_array(&array, &ts, &tl)?,
                name: format!("fock array {path}"),
                label_occupation: coincident_rows.then_some(label_occupation),
            })
        }
    }
}

/// Parse `qft | table1 | reck:<file> | json:<file>` into an interferometer
/// on `modes` modes.
pub fn parse_network(modes: usize, spec: &str) -> Result<Interferometer> {
    match spec {
        "qft" => Ok(qft(modes)),
        "table1" => Ok(lodis::tables::best_known_network(modes)?),
        other => {
            if let Some(path) = other.strip_prefix("reck:") {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading Reck parameters {path}"))?;
                let params: ReckParams = serde_json::from_str(&text)
                    .context("Reck file must be JSON {d, thetas, omegas}")?;
                if params.d != modes {
                    bail!("Reck parameters are for d={}, expected {modes}", params.d);
                }
                Ok(from_reck(&params)?)
            } else if let Some(path) = other.strip_prefix("json:") {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading interferometer {path}"))?;
                let json: InterferometerJson = serde_json::from_str(&text)
                    .context("interferometer file must be JSON {d, entries}")?;
                if json.d != modes {
                    bail!("interferometer is for d={}, expected {modes}", json.d);
                }
                Ok(Interferometer::from_json(&json)?)
            } else {
                bail!("unknown network {other:?}; expected qft, table1, reck:<file> or json:<file>");
            }
        }
    }
}
