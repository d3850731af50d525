//! Reduced System density operators in the Schur-Weyl basis.
//!
//! Tracing the Label out of a totally symmetric System-Label state leaves a
//! System operator that is block diagonal over irreps `λ`, with identical
//! blocks for every outer copy of the same `λ`. A [`ReducedState`] therefore
//! stores one trace-1 Hermitian block per irrep together with the total
//! probability weight of that irrep; the physical operator is
//!
//! ```text
//! ρ = ⊕_λ Σ_{p=1}^{d_(λ)}  (weight_λ / d_(λ)) · block_λ
//! ```
//!
//! Constructors cover the standard families (completely indistinguishable,
//! singly distinguishable, completely distinguishable, and the uniform
//! mixture of singly distinguishable states), which have closed forms for
//! all `N`, plus the general construction from a System-Label Fock array by
//! symmetrising a first-quantised product state and tracing out the Label.

use crate::combinatorics::{factorial, kostka, sym_dim, unitary_dim, Occupation, Partition};
use crate::schur_weyl::{irrep_basis_labels, SchurWeylTransform};
use crate::{C64, Error, Result};
use ndarray::Array2;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Dense first-quantised construction cap: `(d_S · d_L)^N` beyond this is
/// rejected, leaving only the closed-form constructors.
pub const FOCK_ARRAY_CAP: u128 = 500_000;

/// Photon counts indexed by (System mode, Label mode).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockArray {
    counts: Vec<Vec<usize>>,
}

impl FockArray {
    pub fn new(counts: Vec<Vec<usize>>) -> Result<Self> {
        if counts.is_empty() || counts[0].is_empty() {
            return Err(Error::DimensionMismatch("Fock array must be non-empty".into()));
        }
        let cols = counts[0].len();
        if counts.iter().any(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch(
                "Fock array rows must have equal length".into(),
            ));
        }
        Ok(FockArray { counts })
    }

    /// Diagonal array: the completely distinguishable state of `n` photons.
    pub fn completely_distinguishable(n: usize) -> Self {
        let mut counts = vec![vec![0; n]; n];
        for (j, row) in counts.iter_mut().enumerate() {
            row[j] = 1;
        }
        FockArray { counts }
    }

    /// One occupied Label column: the completely indistinguishable state.
    pub fn indistinguishable(n: usize) -> Self {
        FockArray {
            counts: (0..n).map(|_| vec![1, 0]).collect(),
        }
    }

    /// Single bad photon in System mode `bad_mode` (1-based), Label mode 2.
    pub fn singly_distinguishable(n: usize, bad_mode: usize) -> Self {
        assert!((1..=n).contains(&bad_mode));
        let mut counts = vec![vec![0; 2]; n];
        for (j, row) in counts.iter_mut().enumerate() {
            if j + 1 == bad_mode {
                row[1] = 1;
            } else {
                row[0] = 1;
            }
        }
        FockArray { counts }
    }

    pub fn system_modes(&self) -> usize {
        self.counts.len()
    }

    pub fn label_modes(&self) -> usize {
        self.counts[0].len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    /// Row sums: the System occupation.
    pub fn system_occupation(&self) -> Occupation {
        Occupation::new(self.counts.iter().map(|r| r.iter().sum()).collect())
    }

    /// Column sums: the Label occupation.
    pub fn label_occupation(&self) -> Occupation {
        let cols = self.label_modes();
        Occupation::new((0..cols).map(|c| self.counts.iter().map(|r| r[c]).sum()).collect())
    }

    /// `A! = Π_{s,l} A_{sl}!`.
    pub fn entry_factorial(&self) -> u64 {
        self.counts.iter().flatten().map(|&c| factorial(c)).product()
    }
}

/// One irrep's share of a reduced state.
#[derive(Clone, Debug)]
pub struct StatePart {
    pub shape: Partition,
    /// Total probability mass on all outer copies of this irrep.
    pub weight: f64,
    /// Trace-1 Hermitian block over the canonical `(n̄, r)` basis of the
    /// irrep; outer copies share it.
    pub block: Array2<C64>,
}

/// Block-diagonal reduced System density operator.
#[derive(Clone, Debug)]
pub struct ReducedState {
    photons: usize,
    modes: usize,
    parts: Vec<StatePart>,
}

impl ReducedState {
    /// Assemble from per-irrep parts, validating Hermiticity, traces and
    /// weight normalisation.
    pub fn from_parts(photons: usize, modes: usize, parts: Vec<StatePart>) -> Result<Self> {
        let state = ReducedState { photons, modes, parts };
        state.validate()?;
        Ok(state)
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn parts(&self) -> &[StatePart] {
        &self.parts
    }

    pub fn part(&self, shape: &Partition) -> Option<&StatePart> {
        self.parts.iter().find(|p| &p.shape == shape)
    }

    pub fn weight(&self, shape: &Partition) -> f64 {
        self.part(shape).map_or(0.0, |p| p.weight)
    }

    /// `Tr ρ²` of the physical operator.
    pub fn purity(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| {
                let sq = p.block.dot(&p.block);
                let tr: C64 = (0..sq.nrows()).map(|i| sq[(i, i)]).sum();
                p.weight * p.weight / sym_dim(&p.shape) as f64 * tr.re
            })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let mut total = 0.0;
        for part in &self.parts {
            let dim = unitary_dim(&part.shape, self.modes) as usize;
            if part.block.nrows() != dim || part.block.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "block for λ={} must be {dim}x{dim}",
                    part.shape.display()
                )));
            }
            if part.weight < -1e-12 {
                return Err(Error::Internal(format!(
                    "negative weight {} for λ={}",
                    part.weight,
                    part.shape.display()
                )));
            }
            let mut trace = C64::zero();
            for i in 0..dim {
                trace += part.block[(i, i)];
                for j in 0..dim {
                    let h = (part.block[(i, j)] - part.block[(j, i)].conj()).norm();
                    if h > 1e-12 {
                        return Err(Error::Internal(format!(
                            "block for λ={} not Hermitian: {h:.3e}",
                            part.shape.display()
                        )));
                    }
                }
            }
            if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-12 {
                return Err(Error::Internal(format!(
                    "block for λ={} has trace {trace}",
                    part.shape.display()
                )));
            }
            total += part.weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Internal(format!("weights sum to {total}")));
        }
        Ok(())
    }

    /// Export as `{λ: {weight, block}}` with blocks as `[re, im]` pairs.
    pub fn to_json(&self) -> BTreeMap<String, serde_json::Value> {
        let mut map = BTreeMap::new();
        for part in &self.parts {
            let block: Vec<Vec<[f64; 2]>> = part
                .block
                .rows()
                .into_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            map.insert(
                part.shape.display(),
                serde_json::json!({ "weight": part.weight, "block": block }),
            );
        }
        map
    }
}

/// Position of `(weight, r)` in the canonical basis of irrep `λ` over `d`
/// modes.
fn basis_position(shape: &Partition, d: usize, weight: &Occupation, r: usize) -> Option<usize> {
    irrep_basis_labels(shape, d).iter().position(|(w, rr)| w == weight && *rr == r)
}

fn rank_one_at(dim: usize, pos: usize) -> Array2<C64> {
    let mut m = Array2::zeros((dim, dim));
    m[(pos, pos)] = C64::new(1.0, 0.0);
    m
}

/// Completely indistinguishable state: all weight on the symmetric irrep,
/// pure on the coincident weight vector.
pub fn rho_indistinguishable(n: usize) -> ReducedState {
    assert!(n >= 1);
    let shape = Partition::symmetric(n);
    let dim = unitary_dim(&shape, n) as usize;
    let pos = basis_position(&shape, n, &Occupation::coincident(n), 1).expect("coincident weight");
    ReducedState {
        photons: n,
        modes: n,
        parts: vec![StatePart { shape, weight: 1.0, block: rank_one_at(dim, pos) }],
    }
}

/// Singly distinguishable state with the bad photon in the last System mode:
/// symmetric weight `1/N`, weight `(N-1)/N` on `(N-1, 1)` concentrated on
/// the `r = 1` coincident vector.
pub fn rho_singly(n: usize) -> Result<ReducedState> {
    if n < 2 {
        return Err(Error::DimensionMismatch(
            "singly distinguishable state requires N >= 2".into(),
        ));
    }
    let coin = Occupation::coincident(n);
    let sym = Partition::symmetric(n);
    let sym_pos = basis_position(&sym, n, &coin, 1).expect("coincident weight");
    let sym_dim_u = unitary_dim(&sym, n) as usize;
    let almost = Partition::almost_symmetric(n);
    let almost_dim = unitary_dim(&almost, n) as usize;
    let pos = basis_position(&almost, n, &coin, 1).expect("coincident weight");
    Ok(ReducedState {
        photons: n,
        modes: n,
        parts: vec![
            StatePart {
                shape: sym,
                weight: 1.0 / n as f64,
                block: rank_one_at(sym_dim_u, sym_pos),
            },
            StatePart {
                shape: almost,
                weight: (n - 1) as f64 / n as f64,
                block: rank_one_at(almost_dim, pos),
            },
        ],
    })
}

/// Singly distinguishable state with the bad photon in System mode
/// `bad_mode` (1-based), realised by conjugating [`rho_singly`] with the
/// irrep blocks of the mode permutation swapping `bad_mode` and `N`.
pub fn rho_singly_in_mode(
    n: usize,
    bad_mode: usize,
    transform: &SchurWeylTransform,
) -> Result<ReducedState> {
    if !(1..=n).contains(&bad_mode) {
        return Err(Error::DimensionMismatch(format!(
            "bad mode {bad_mode} out of range 1..={n}"
        )));
    }
    let base = rho_singly(n)?;
    if bad_mode == n {
        return Ok(base);
    }
    if transform.photons() != n || transform.modes() != n {
        return Err(Error::TransformMismatch {
            t_photons: transform.photons(),
            t_modes: transform.modes(),
            photons: n,
            modes: n,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(bad_mode - 1, n - 1);
    let p = crate::optics::Interferometer::permutation(&perm);
    let parts = base
        .parts
        .iter()
        .map(|part| {
            let rep = transform.irrep_block(p.matrix(), &part.shape)?;
            let rotated = rep.dot(&part.block).dot(&rep.t().mapv(|z| z.conj()));
            Ok(StatePart { shape: part.shape.clone(), weight: part.weight, block: rotated })
        })
        .collect::<Result<Vec<_>>>()?;
    ReducedState::from_parts(n, n, parts)
}

/// Completely distinguishable state: uniform mixture over the `N!`
/// dimensional coincident subspace.
pub fn rho_completely(n: usize) -> ReducedState {
    assert!(n >= 1);
    let coin = Occupation::coincident(n);
    let nfact = factorial(n) as f64;
    let parts = crate::combinatorics::enumerate_partitions(n, n)
        .into_iter()
        .map(|shape| {
            let k = kostka(&shape, &coin);
            let dim = unitary_dim(&shape, n) as usize;
            let labels = irrep_basis_labels(&shape, n);
            let mut block = Array2::zeros((dim, dim));
            for (i, (w, _)) in labels.iter().enumerate() {
                if *w == coin {
                    block[(i, i)] = C64::new(1.0 / k as f64, 0.0);
                }
            }
            let weight = sym_dim(&shape) as f64 * k as f64 / nfact;
            StatePart { shape, weight, block }
        })
        .collect();
    ReducedState { photons: n, modes: n, parts }
}

/// Uniform mixture of [`rho_singly_in_mode`] over all bad modes. The blend
/// has a closed form: the `(N-1, 1)` block becomes the normalised projector
/// onto the whole coincident inner-multiplicity space.
pub fn rho_singly_mixed(n: usize) -> Result<ReducedState> {
    if n < 2 {
        return Err(Error::DimensionMismatch(
            "singly distinguishable mixture requires N >= 2".into(),
        ));
    }
    let coin = Occupation::coincident(n);
    let sym = Partition::symmetric(n);
    let sym_pos = basis_position(&sym, n, &coin, 1).expect("coincident weight");
    let sym_dim_u = unitary_dim(&sym, n) as usize;
    let almost = Partition::almost_symmetric(n);
    let dim = unitary_dim(&almost, n) as usize;
    let k = kostka(&almost, &coin) as f64;
    let labels = irrep_basis_labels(&almost, n);
    let mut block = Array2::zeros((dim, dim));
    for (i, (w, _)) in labels.iter().enumerate() {
        if *w == coin {
            block[(i, i)] = C64::new(1.0 / k, 0.0);
        }
    }
    Ok(ReducedState {
        photons: n,
        modes: n,
        parts: vec![
            StatePart {
                shape: sym,
                weight: 1.0 / n as f64,
                block: rank_one_at(sym_dim_u, sym_pos),
            },
            StatePart { shape: almost, weight: (n - 1) as f64 / n as f64, block },
        ],
    })
}

/// Weight of the symmetric irrep for a coincident-System Fock array with
/// Label occupation `n̄_L`: `n̄_L! / N!`.
pub fn symmetric_weight(label_occupation: &Occupation) -> f64 {
    let n = label_occupation.total();
    label_occupation.factorial() as f64 / factorial(n) as f64
}

/// Build the reduced System state of an arbitrary System-Label Fock array.
///
/// The array's first-quantised symmetrisation is expressed in the
/// System⊗Label Schur-Weyl product basis, the paired `(λ, p)` structure of
/// totally symmetric states is verified, and the Label is traced out.
pub fn rho_from_fock_array(
    array: &FockArray,
    system: &SchurWeylTransform,
    label: &SchurWeylTransform,
) -> Result<ReducedState> {
    let n = array.total();
    let (ds, dl) = (array.system_modes(), array.label_modes());
    if system.photons() != n || system.modes() != ds {
        return Err(Error::TransformMismatch {
            t_photons: system.photons(),
            t_modes: system.modes(),
            photons: n,
            modes: ds,
        });
    }
    if label.photons() != n || label.modes() != dl {
        return Err(Error::TransformMismatch {
            t_photons: label.photons(),
            t_modes: label.modes(),
            photons: n,
            modes: dl,
        });
    }
    let joint = (ds as u128 * dl as u128).pow(n as u32);
    if joint > FOCK_ARRAY_CAP {
        return Err(Error::BudgetExceeded {
            what: "first-quantised Fock array construction",
            required: joint,
            cap: FOCK_ARRAY_CAP,
        });
    }

    let sys_occ = array.system_occupation();
    let lab_occ = array.label_occupation();
    let swi = system
        .weight_position(&sys_occ)
        .ok_or_else(|| Error::DimensionMismatch("system occupation out of range".into()))?;
    let lwi = label
        .weight_position(&lab_occ)
        .ok_or_else(|| Error::DimensionMismatch("label occupation out of range".into()))?;

    // distinct words of the symmetrised product state, amplitude √(A!/N!)
    let amp = (array.entry_factorial() as f64 / factorial(n) as f64).sqrt();
    let mut remaining = array.counts().to_vec();
    let mut terms: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    let mut ws = vec![0u8; n];
    let mut wl = vec![0u8; n];
    fn rec(
        slot: usize,
        n: usize,
        remaining: &mut Vec<Vec<usize>>,
        ws: &mut Vec<u8>,
        wl: &mut Vec<u8>,
        terms: &mut Vec<(Vec<u8>, Vec<u8>)>,
    ) {
        if slot == n {
            terms.push((ws.clone(), wl.clone()));
            return;
        }
        for s in 0..remaining.len() {
            for l in 0..remaining[0].len() {
                if remaining[s][l] == 0 {
                    continue;
                }
                remaining[s][l] -= 1;
                ws[slot] = s as u8;
                wl[slot] = l as u8;
                rec(slot + 1, n, remaining, ws, wl, terms);
                remaining[s][l] += 1;
            }
        }
    }
    rec(0, n, &mut remaining, &mut ws, &mut wl, &mut terms);

    // Schur-Weyl coordinates on both sides, restricted to the fixed weights
    let s_block = system.weight_block_matrix(swi);
    let l_block = label.weight_block_matrix(lwi);
    let (s_rows, l_rows) = (s_block.nrows(), l_block.nrows());
    let mut phi = Array2::<C64>::zeros((s_rows, l_rows));
    for (ws, wl) in &terms {
        let sc = system
            .word_local(swi, ws)
            .ok_or_else(|| Error::Internal("word missing from weight table".into()))?;
        let lc = label
            .word_local(lwi, wl)
            .ok_or_else(|| Error::Internal("word missing from weight table".into()))?;
        for i in 0..s_rows {
            let a = s_block[(i, sc)].conj() * amp;
            if a == C64::zero() {
                continue;
            }
            for j in 0..l_rows {
                phi[(i, j)] += a * l_block[(j, lc)].conj();
            }
        }
    }

    // verify the paired structure: mass only on matching (λ, p)
    let s_labels = system.weight_block_labels(swi);
    let l_labels = label.weight_block_labels(lwi);
    let mut off_pair = 0.0f64;
    let mut total_mass = 0.0f64;
    for i in 0..s_rows {
        let sl = &system.labels()[s_labels[i]];
        for j in 0..l_rows {
            let ll = &label.labels()[l_labels[j]];
            let mass = phi[(i, j)].norm_sqr();
            total_mass += mass;
            if sl.shape != ll.shape || sl.outer != ll.outer {
                off_pair += mass;
            }
        }
    }
    if off_pair.sqrt() > 1e-9 {
        return Err(Error::NonSymmetricResidual(off_pair.sqrt()));
    }
    if (total_mass - 1.0).abs() > 1e-9 {
        return Err(Error::Internal(format!("fock array state has norm² {total_mass}")));
    }

    // trace out the Label per (λ, p) and fold copies
    let mut parts = Vec::new();
    for shape in system.partitions() {
        let k_s = kostka(shape, &sys_occ) as usize;
        let k_l = kostka(shape, &lab_occ) as usize;
        if k_s == 0 || k_l == 0 {
            continue;
        }
        let copies = sym_dim(shape) as usize;
        let mut copy_blocks: Vec<Array2<C64>> = Vec::with_capacity(copies);
        for p in 1..=copies {
            let rows: Vec<usize> = (0..s_rows)
                .filter(|&i| {
                    let l = &system.labels()[s_labels[i]];
                    l.shape == *shape && l.outer == p
                })
                .collect();
            let cols: Vec<usize> = (0..l_rows)
                .filter(|&j| {
                    let l = &label.labels()[l_labels[j]];
                    l.shape == *shape && l.outer == p
                })
                .collect();
            debug_assert_eq!(rows.len(), k_s);
            debug_assert_eq!(cols.len(), k_l);
            let mut m = Array2::<C64>::zeros((k_s, k_l));
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in cols.iter().enumerate() {
                    m[(a, b)] = phi[(i, j)];
                }
            }
            copy_blocks.push(m.dot(&m.t().mapv(|z| z.conj())));
        }
        let trace: f64 = (0..k_s).map(|i| copy_blocks[0][(i, i)].re).sum();
        let weight: f64 = copy_blocks
            .iter()
            .map(|b| (0..k_s).map(|i| b[(i, i)].re).sum::<f64>())
            .sum();
        for other in &copy_blocks[1..] {
            let diff = other - &copy_blocks[0];
            if crate::linalg::max_abs(&diff) > 1e-9 {
                return Err(Error::Internal(format!(
                    "outer copies of λ={} differ after tracing",
                    shape.display()
                )));
            }
        }
        if weight < 1e-14 {
            continue;
        }
        // embed the weight-restricted block into the full irrep block
        let dim = unitary_dim(shape, ds) as usize;
        let labels = irrep_basis_labels(shape, ds);
        let positions: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter_map(|(idx, (w, _))| (*w == sys_occ).then_some(idx))
            .collect();
        debug_assert_eq!(positions.len(), k_s);
        let mut block = Array2::zeros((dim, dim));
        for (a, &i) in positions.iter().enumerate() {
            for (b, &j) in positions.iter().enumerate() {
                block[(i, j)] = copy_blocks[0][(a, b)] / trace;
            }
        }
        parts.push(StatePart { shape: shape.clone(), weight, block });
    }
    ReducedState::from_parts(n, ds, parts)
}
