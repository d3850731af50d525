//! Photon-counting outcome probabilities.
//!
//! Two independent pathways are kept deliberately. The irrep pathway is
//! primary: probabilities come from the irreducible action of the
//! interferometer on each block of a [`ReducedState`], exposing the
//! per-irrep contributions the discrimination machinery needs. The oracle
//! pathway is a plain second-quantised calculation — full transfer matrix
//! `U ⊗ 1l` over System and Label modes, permanents over every Label output —
//! sharing nothing with the Schur-Weyl machinery. The two must agree, and
//! the oracle is also the only route above the dense transform budget.

use crate::combinatorics::{Occupation, Partition};
use crate::optics::{occupation_submatrix, permanent, Interferometer};
use crate::schur_weyl::{irrep_basis_labels, SchurWeylTransform};
use crate::states::{FockArray, ReducedState};
use crate::{C64, Error, Result};
use ndarray::Array2;

/// The second-quantised oracle enumerates permanents over Label outputs;
/// above this photon number it is refused.
pub const ORACLE_PHOTON_CAP: usize = 8;

/// Contributions below this magnitude are treated as rounding and floored
/// to zero; anything more negative raises an internal-consistency error.
const NEGATIVE_ROUNDING: f64 = -1e-12;

/// Probability of one photon-counting outcome, split by irrep.
#[derive(Clone, Debug)]
pub struct OutcomeProbability {
    pub occupation: Occupation,
    pub total: f64,
    /// Contribution of each irrep with nonzero state weight.
    pub per_irrep: Vec<(Partition, f64)>,
}

impl OutcomeProbability {
    pub fn irrep_contribution(&self, shape: &Partition) -> f64 {
        self.per_irrep
            .iter()
            .find(|(s, _)| s == shape)
            .map_or(0.0, |(_, c)| *c)
    }

    /// Contribution of everything outside the symmetric irrep.
    pub fn nonsymmetric(&self) -> f64 {
        let sym = Partition::symmetric(self.occupation.total());
        self.per_irrep
            .iter()
            .filter(|(s, _)| *s != sym)
            .map(|(_, c)| c)
            .sum()
    }
}

/// All occupations of `n` photons over `d` modes in canonical order,
/// optionally without the fully bunched patterns.
pub use crate::combinatorics::enumerate_occupations as enumerate_outcomes;

fn check_compatible(
    rho: &ReducedState,
    u: &Interferometer,
    transform: &SchurWeylTransform,
) -> Result<()> {
    if rho.photons() != transform.photons() || rho.modes() != transform.modes() {
        return Err(Error::TransformMismatch {
            t_photons: transform.photons(),
            t_modes: transform.modes(),
            photons: rho.photons(),
            modes: rho.modes(),
        });
    }
    if u.modes() != transform.modes() {
        return Err(Error::TransformMismatch {
            t_photons: transform.photons(),
            t_modes: transform.modes(),
            photons: transform.photons(),
            modes: u.modes(),
        });
    }
    Ok(())
}

/// Probabilities of every outcome at once through the irrep pathway, in
/// canonical outcome order.
pub fn outcome_table(
    rho: &ReducedState,
    u: &Interferometer,
    transform: &SchurWeylTransform,
    exclude_bunched: bool,
) -> Result<Vec<OutcomeProbability>> {
    check_compatible(rho, u, transform)?;
    let (n, d) = (rho.photons(), rho.modes());
    let outcomes = enumerate_outcomes(n, d, exclude_bunched);
    let mut totals: Vec<Vec<(Partition, f64)>> = vec![Vec::new(); outcomes.len()];
    let outcome_pos: std::collections::HashMap<&[usize], usize> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| (o.counts(), i))
        .collect();

    for part in rho.parts() {
        if part.weight == 0.0 {
            continue;
        }
        let labels = irrep_basis_labels(&part.shape, d);
        // support of the block: canonical positions with any mass
        let support: Vec<usize> = (0..labels.len())
            .filter(|&i| {
                part.block.row(i).iter().any(|z| z.norm() > 0.0)
                    || part.block.column(i).iter().any(|z| z.norm() > 0.0)
            })
            .collect();
        if support.is_empty() {
            continue;
        }
        // columns ⟨(n̄,r)| U^λ |support⟩, one irrep action per support weight
        let mut a = Array2::<C64>::zeros((labels.len(), support.len()));
        let support_weights: Vec<&Occupation> = {
            let mut ws: Vec<&Occupation> = support.iter().map(|&i| &labels[i].0).collect();
            ws.dedup();
            ws.sort();
            ws.dedup();
            ws
        };
        for w in support_weights {
            let cols = transform.irrep_action_columns(u.matrix(), &part.shape, w)?;
            // canonical positions of (w, r) in column order r = 1, 2, ...
            let positions: Vec<usize> = labels
                .iter()
                .enumerate()
                .filter_map(|(i, (lw, _))| (lw == w).then_some(i))
                .collect();
            for (r, &pos) in positions.iter().enumerate() {
                if let Some(k) = support.iter().position(|&s| s == pos) {
                    a.column_mut(k).assign(&cols.column(r));
                }
            }
        }
        // diag(A ρ A†) row by row
        let rho_sub = Array2::from_shape_fn((support.len(), support.len()), |(i, j)| {
            part.block[(support[i], support[j])]
        });
        let b = a.dot(&rho_sub);
        for (row, (w, _)) in labels.iter().enumerate() {
            let mut acc = 0.0;
            for s in 0..support.len() {
                acc += (b[(row, s)] * a[(row, s)].conj()).re;
            }
            if let Some(&oi) = outcome_pos.get(w.counts()) {
                let v = part.weight * acc;
                match totals[oi].iter_mut().find(|(s, _)| s == &part.shape) {
                    Some((_, c)) => *c += v,
                    None => totals[oi].push((part.shape.clone(), v)),
                }
            }
        }
    }

    outcomes
        .into_iter()
        .zip(totals)
        .map(|(occupation, mut per_irrep)| {
            let mut total = 0.0;
            for (shape, c) in per_irrep.iter_mut() {
                if *c < NEGATIVE_ROUNDING {
                    return Err(Error::Internal(format!(
                        "negative probability {c:.3e} for λ={} at {}",
                        shape.display(),
                        occupation.display()
                    )));
                }
                *c = c.max(0.0);
                total += *c;
            }
            Ok(OutcomeProbability { occupation, total, per_irrep })
        })
        .collect()
}

/// Probability of a single outcome through the irrep pathway.
pub fn outcome_probability(
    rho: &ReducedState,
    u: &Interferometer,
    outcome: &Occupation,
    transform: &SchurWeylTransform,
) -> Result<OutcomeProbability> {
    if outcome.num_modes() != rho.modes() || outcome.total() != rho.photons() {
        return Err(Error::DimensionMismatch(format!(
            "outcome {} does not match N={}, d={}",
            outcome.display(),
            rho.photons(),
            rho.modes()
        )));
    }
    let table = outcome_table(rho, u, transform, false)?;
    table
        .into_iter()
        .find(|o| &o.occupation == outcome)
        .ok_or_else(|| Error::Internal("outcome missing from canonical enumeration".into()))
}

/// Second-quantised probability of detecting the System occupation
/// `outcome` when the Fock array `array` is sent through `u`.
///
/// Fully independent of the Schur-Weyl machinery: the transfer matrix
/// `U ⊗ 1l` acts on all System×Label modes and the Label output is summed
/// over. Probability of each joint output `O` is `|per(M)|² / (A!·O!)` with
/// `M` the transfer submatrix repeating columns per `A` and rows per `O`.
pub fn outcome_probability_oracle(
    array: &FockArray,
    u: &Interferometer,
    outcome: &Occupation,
) -> Result<f64> {
    let n = array.total();
    if n > ORACLE_PHOTON_CAP {
        return Err(Error::SizeCap { what: "oracle photon number", size: n, cap: ORACLE_PHOTON_CAP });
    }
    let ds = array.system_modes();
    if u.modes() != ds {
        return Err(Error::DimensionMismatch(format!(
            "interferometer has {} modes, array has {} system modes",
            u.modes(),
            ds
        )));
    }
    if outcome.num_modes() != ds || outcome.total() != n {
        return Err(Error::DimensionMismatch(format!(
            "outcome {} does not match the array",
            outcome.display()
        )));
    }
    // input columns: joint mode (s, l) repeated A[s][l] times
    let in_cols: Vec<(usize, usize)> = array
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(s, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(l, &c)| std::iter::repeat((s, l)).take(c))
        })
        .collect();
    let label_occ = array.label_occupation();
    let in_norm = array.entry_factorial() as f64;

    // joint outputs: d_S × d_L tables with row sums `outcome` and column
    // sums equal to the conserved Label occupation
    let tables = contingency_tables(outcome.counts(), label_occ.counts());
    let mut prob = 0.0;
    for table in tables {
        let out_rows: Vec<(usize, usize)> = table
            .iter()
            .enumerate()
            .flat_map(|(t, row)| {
                row.iter()
                    .enumerate()
                    .flat_map(move |(l, &c)| std::iter::repeat((t, l)).take(c))
            })
            .collect();
        let m = Array2::from_shape_fn((n, n), |(i, j)| {
            let (t, lo) = out_rows[i];
            let (s, li) = in_cols[j];
            if lo == li {
                u.matrix()[(t, s)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let out_norm: f64 = table
            .iter()
            .flatten()
            .map(|&c| crate::combinatorics::factorial(c) as f64)
            .product();
        prob += permanent(&m)?.norm_sqr() / (in_norm * out_norm);
    }
    Ok(prob)
}

/// All non-negative integer matrices with the given row and column sums.
fn contingency_tables(row_sums: &[usize], col_sums: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut table = vec![vec![0usize; col_sums.len()]; row_sums.len()];
    let mut col_left = col_sums.to_vec();
    fn rec(
        row: usize,
        row_sums: &[usize],
        col_left: &mut Vec<usize>,
        table: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if row == row_sums.len() {
            if col_left.iter().all(|&c| c == 0) {
                out.push(table.clone());
            }
            return;
        }
        // fill this row cell by cell
        fn fill(
            row: usize,
            col: usize,
            left: usize,
            row_sums: &[usize],
            col_left: &mut Vec<usize>,
            table: &mut Vec<Vec<usize>>,
            out: &mut Vec<Vec<Vec<usize>>>,
        ) {
            if col == col_left.len() {
                if left == 0 {
                    rec(row + 1, row_sums, col_left, table, out);
                }
                return;
            }
            let max = left.min(col_left[col]);
            for v in 0..=max {
                table[row][col] = v;
                col_left[col] -= v;
                fill(row, col + 1, left - v, row_sums, col_left, table, out);
                col_left[col] += v;
            }
            table[row][col] = 0;
        }
        fill(row, 0, row_sums[row], row_sums, col_left, table, out);
    }
    rec(0, row_sums, &mut col_left, &mut table, &mut out);
    out
}

/// Classical (completely distinguishable) outcome probability:
/// `per(|U_in^out|²) / out!`. The fast pathway for ρ_d at any N within the
/// permanent cap.
pub fn classical_probability(
    u: &Interferometer,
    input: &Occupation,
    output: &Occupation,
) -> Result<f64> {
    let sub = occupation_submatrix(u, input, output)?;
    let sq = sub.mapv(|z| z.norm_sqr());
    Ok(permanent(&sq)? / output.factorial() as f64)
}

/// Probability that a pure indistinguishable input `input` scatters to
/// `output`: `|per(U_in^out)|² / (in!·out!)`. The closed form behind the
/// symmetric irrep.
pub fn indistinguishable_probability(
    u: &Interferometer,
    input: &Occupation,
    output: &Occupation,
) -> Result<f64> {
    let sub = occupation_submatrix(u, input, output)?;
    Ok(permanent(&sub)?.norm_sqr() / (input.factorial() * output.factorial()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::qft;
    use crate::states::{
        rho_completely, rho_from_fock_array, rho_indistinguishable, rho_singly, rho_singly_mixed,
    };
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn occ(counts: &[usize]) -> Occupation {
        Occupation::new(counts.to_vec())
    }

    fn transform(n: usize, d: usize) -> SchurWeylTransform {
        SchurWeylTransform::build(n, d).unwrap()
    }

    #[test]
    fn hom_dip() {
        let t = transform(2, 2);
        let q2 = qft(2);
        let dip = outcome_probability(&rho_indistinguishable(2), &q2, &occ(&[1, 1]), &t).unwrap();
        assert!(dip.total < 1e-14, "HOM coincidence must vanish");
        let coincidence =
            outcome_probability(&rho_completely(2), &q2, &occ(&[1, 1]), &t).unwrap();
        assert_abs_diff_eq!(coincidence.total, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn tritter_two_one_outcomes() {
        let t = transform(3, 3);
        let q3 = qft(3);
        let p = outcome_probability(&rho_completely(3), &q3, &occ(&[2, 1, 0]), &t).unwrap();
        assert_abs_diff_eq!(p.total, 1.0 / 9.0, epsilon = 1e-12);
        // suppression of the same outcome for indistinguishable photons
        let p = outcome_probability(&rho_indistinguishable(3), &q3, &occ(&[2, 1, 0]), &t).unwrap();
        assert!(p.total < 1e-12);
    }

    #[test]
    fn oracle_basic_cases() {
        let q2 = qft(2);
        let hom = FockArray::indistinguishable(2);
        assert!(outcome_probability_oracle(&hom, &q2, &occ(&[1, 1])).unwrap() < 1e-14);
        let dist = FockArray::completely_distinguishable(2);
        assert_abs_diff_eq!(
            outcome_probability_oracle(&dist, &q2, &occ(&[2, 0])).unwrap(),
            0.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            outcome_probability_oracle(&dist, &q2, &occ(&[1, 1])).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn normalization_over_all_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=4 {
            let t = transform(n, n);
            let states = vec![
                rho_indistinguishable(n),
                rho_singly(n).unwrap(),
                rho_completely(n),
                rho_singly_mixed(n).unwrap(),
            ];
            let trials = if n < 4 { 10 } else { 3 };
            for _ in 0..trials {
                let u = Interferometer::random(n, &mut rng);
                for rho in &states {
                    let table = outcome_table(rho, &u, &t, false).unwrap();
                    let sum: f64 = table.iter().map(|o| o.total).sum();
                    assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn oracle_agrees_with_irrep_pathway_exhaustively() {
        // every 3x3 Fock array of three photons, every outcome
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let n = 3;
        let ts = transform(n, n);
        let tl = transform(n, n);
        let outcomes = enumerate_outcomes(n, n, false);
        let mut arrays = Vec::new();
        for mask in contingency_like_arrays(n) {
            arrays.push(FockArray::new(mask).unwrap());
        }
        assert!(arrays.len() > 100, "expected the full enumeration");
        let us: Vec<Interferometer> =
            (0..2).map(|_| Interferometer::random(n, &mut rng)).collect();
        for array in &arrays {
            let rho = rho_from_fock_array(array, &ts, &tl).unwrap();
            for u in &us {
                let table = outcome_table(&rho, u, &ts, false).unwrap();
                for (o, row) in outcomes.iter().zip(&table) {
                    let oracle = outcome_probability_oracle(array, u, o).unwrap();
                    assert!(
                        (row.total - oracle).abs() < 1e-8,
                        "array {:?} outcome {} irrep {} oracle {}",
                        array.counts(),
                        o.display(),
                        row.total,
                        oracle
                    );
                }
            }
        }
    }

    /// All 3x3 non-negative matrices with total n.
    fn contingency_like_arrays(n: usize) -> Vec<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let cells = 9;
        let mut flat = vec![0usize; cells];
        fn rec(idx: usize, left: usize, flat: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
            if idx == flat.len() {
                if left == 0 {
                    out.push(vec![
                        flat[0..3].to_vec(),
                        flat[3..6].to_vec(),
                        flat[6..9].to_vec(),
                    ]);
                }
                return;
            }
            for v in 0..=left {
                flat[idx] = v;
                rec(idx + 1, left - v, flat, out);
            }
            flat[idx] = 0;
        }
        rec(0, n, &mut flat, &mut out);
        out
    }

    #[test]
    fn oracle_agrees_at_four_photons() {
        // spot checks against the named constructors
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        let t = transform(n, n);
        let u = Interferometer::random(n, &mut rng);
        let outcomes = [occ(&[1, 1, 1, 1]), occ(&[2, 1, 1, 0]), occ(&[2, 2, 0, 0]), occ(&[3, 0, 1, 0])];
        let singly = FockArray::singly_distinguishable(n, n);
        let rho_s = rho_singly(n).unwrap();
        let dist = FockArray::completely_distinguishable(n);
        let rho_d = rho_completely(n);
        for o in &outcomes {
            let irrep = outcome_probability(&rho_s, &u, o, &t).unwrap().total;
            let oracle = outcome_probability_oracle(&singly, &u, o).unwrap();
            assert!((irrep - oracle).abs() < 1e-8, "singly at {}", o.display());
            let irrep = outcome_probability(&rho_d, &u, o, &t).unwrap().total;
            let oracle = outcome_probability_oracle(&dist, &u, o).unwrap();
            assert!((irrep - oracle).abs() < 1e-8, "completely at {}", o.display());
        }
    }

    #[test]
    fn classical_matches_completely_distinguishable() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 2..=4 {
            let t = transform(n, n);
            let rho = rho_completely(n);
            let coin = Occupation::coincident(n);
            for _ in 0..if n < 4 { 5 } else { 2 } {
                let u = Interferometer::random(n, &mut rng);
                let table = outcome_table(&rho, &u, &t, false).unwrap();
                for row in &table {
                    let classical = classical_probability(&u, &coin, &row.occupation).unwrap();
                    assert!(
                        (row.total - classical).abs() < 1e-9,
                        "N={n} outcome {}",
                        row.occupation.display()
                    );
                }
            }
        }
    }

    #[test]
    fn classical_basic_values() {
        assert_abs_diff_eq!(
            classical_probability(&qft(2), &occ(&[1, 1]), &occ(&[1, 1])).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            classical_probability(&Interferometer::identity(3), &occ(&[1, 1, 1]), &occ(&[1, 1, 1]))
                .unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            classical_probability(&qft(3), &occ(&[1, 1, 1]), &occ(&[2, 1, 0])).unwrap(),
            1.0 / 9.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn irrep_mass_is_unitary_invariant() {
        // Σ_n̄ per-irrep contribution is independent of U
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 3;
        let t = transform(n, n);
        let rho_s = rho_singly(n).unwrap();
        let mixed = Partition::new(vec![2, 1]).unwrap();
        for _ in 0..10 {
            let u = Interferometer::random(n, &mut rng);
            let table = outcome_table(&rho_s, &u, &t, false).unwrap();
            let mass: f64 = table.iter().map(|o| o.irrep_contribution(&mixed)).sum();
            assert_abs_diff_eq!(mass, 2.0 / 3.0, epsilon = 1e-10);
            let anti: f64 = table
                .iter()
                .map(|o| o.irrep_contribution(&Partition::new(vec![1, 1, 1]).unwrap()))
                .sum();
            assert!(anti.abs() < 1e-12);
        }
    }

    #[test]
    fn bunched_outcomes_are_purely_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let n = 3;
        let t = transform(n, n);
        let u = Interferometer::random(n, &mut rng);
        let table = outcome_table(&rho_completely(n), &u, &t, false).unwrap();
        for row in table.iter().filter(|o| o.occupation.is_bunched()) {
            assert_abs_diff_eq!(row.total, row.nonsymmetric() + row.total - row.nonsymmetric());
            assert!(row.nonsymmetric() < 1e-14);
        }
    }

    #[test]
    fn indistinguishable_probability_matches_irrep() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let n = 3;
        let t = transform(n, n);
        let rho = rho_indistinguishable(n);
        let coin = Occupation::coincident(n);
        let u = Interferometer::random(n, &mut rng);
        let table = outcome_table(&rho, &u, &t, false).unwrap();
        for row in &table {
            let closed = indistinguishable_probability(&u, &coin, &row.occupation).unwrap();
            assert!((row.total - closed).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_cap() {
        let array = FockArray::completely_distinguishable(9);
        let u = Interferometer::identity(9);
        assert!(matches!(
            outcome_probability_oracle(&array, &u, &Occupation::coincident(9)),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn outcome_enumeration_matches_spec_counts() {
        assert_eq!(enumerate_outcomes(2, 2, true).len(), 1);
        assert_eq!(enumerate_outcomes(3, 3, true).len(), 7);
        assert_eq!(enumerate_outcomes(3, 2, false).len(), 4);
    }
}
