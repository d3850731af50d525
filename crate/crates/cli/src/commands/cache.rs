use anyhow::{bail, Result};
use lodis::combinatorics::{sym_dim, unitary_dim};
use lodis::schur_weyl::SchurWeylTransform;
use std::path::Path;

/// Verification failures above this are treated as build errors.
const VERIFY_TOL: f64 = 1e-9;

fn print_dimension_table(photons: usize, modes: usize) {
    println!("irrep dimensions for N={photons}, d={modes}:");
    println!("{:<12} {:>10} {:>12} {:>14}", "partition", "copies", "irrep dim", "basis states");
    let mut total = 0u64;
    for shape in lodis::combinatorics::enumerate_partitions(photons, modes) {
        let copies = sym_dim(&shape);
        let dim = unitary_dim(&shape, modes);
        total += copies * dim;
        println!("{:<12} {:>10} {:>12} {:>14}", shape.display(), copies, dim, copies * dim);
    }
    println!("total basis states: {total}");
}

pub fn build(photons: usize, modes: usize, trials: usize, seed: u64, dir: &Path) -> Result<()> {
    let transform = SchurWeylTransform::build(photons, modes)?;
    print_dimension_table(photons, modes);
    let report = transform.verify_random(trials, seed);
    println!(
        "verification over {} random unitaries: unitarity {:.3e}, off-block {:.3e}, copy mismatch {:.3e}",
        report.trials, report.unitarity, report.off_block, report.copy_mismatch
    );
    if report.max_deviation() > VERIFY_TOL {
        bail!("verification failed: max deviation {:.3e}", report.max_deviation());
    }
    let path = transform.save_cache(dir)?;
    println!("cached at {}", path.display());
    Ok(())
}

pub fn verify(photons: usize, modes: usize, trials: usize, seed: u64, dir: &Path) -> Result<()> {
    let transform = SchurWeylTransform::load_cache(dir, photons, modes)?;
    let report = transform.verify_random(trials, seed);
    println!(
        "verification over {} random unitaries: unitarity {:.3e}, weight preservation {:.3e}, off-block {:.3e}, copy mismatch {:.3e}",
        report.trials,
        report.unitarity,
        report.weight_preservation,
        report.off_block,
        report.copy_mismatch
    );
    if report.max_deviation() > VERIFY_TOL {
        bail!("verification failed: max deviation {:.3e}", report.max_deviation());
    }
    println!("ok");
    Ok(())
}
