//! Construction, verification and caching of the Schur-Weyl change of basis.
//!
//! The product space of `N` qudits with `d` levels decomposes into paired
//! irreps of U(d) and S_N. This module realises that decomposition with
//! occupation-resolved basis labels `(λ, p, n̄, r)`: `λ` a partition of `N`,
//! `p` the outer multiplicity (which copy of the U(d) irrep), `n̄` the weight
//! (mode occupation) and `r` the inner multiplicity within that weight.
//!
//! Basis vectors are supported only on product words of their own weight, so
//! the transform is stored as one dense block per occupation rather than as
//! a `d^N × d^N` matrix. Construction follows the highest-weight method: the
//! highest weight vector of each irrep is a product of column Slater
//! determinants, outer copies come from the dual S_N action on it, and
//! lowering operators `E_{i+1,i}` span each copy, orthonormalised weight by
//! weight with Gram-Schmidt in a frozen canonical order.
//!
//! Multiplicity freedom is fixed in two steps: candidates are orthonormalised
//! in lowering order (sources in stored order, operators by mode index), and
//! for `λ = (N-1, 1)` at the coincident weight a final rotation aligns the
//! `r = 1` vector with the state whose "bad" photon sits in the last mode, so
//! the singly distinguishable density operator is literally diagonal in this
//! basis. Other implementations may differ from this one by per-vector phases
//! and inner-multiplicity rotations; all physical probabilities agree.

use crate::combinatorics::{
    enumerate_occupations, enumerate_partitions, factorial, kostka, sym_dim, unitary_dim,
    Occupation, Partition,
};
use crate::linalg;
use crate::{C64, Error, Result};
use itertools::Itertools;
use ndarray::{Array1, Array2};
use num_traits::Zero;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

/// Dense construction refuses above this many product words; larger (N, d)
/// must use the permanent pathway in `scattering`.
pub const DENSE_DIMENSION_CAP: u128 = 300_000;

/// Orthonormality required of the finished transform.
pub const ORTHONORMALITY_TOL: f64 = 1e-12;

/// Gram-Schmidt residuals below this cannot start a new basis vector. Two
/// orders above the orthonormality tolerance so that rank decisions stay
/// separated from rounding.
pub const INDEPENDENCE_CUTOFF: f64 = 1e-10;

pub const CACHE_FORMAT_VERSION: u32 = 1;
const CACHE_MAGIC: [u8; 4] = *b"SWTC";

/// Full label of a Schur-Weyl basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisLabel {
    pub shape: Partition,
    /// Outer multiplicity index, 1-based.
    pub outer: usize,
    pub weight: Occupation,
    /// Inner multiplicity index, 1-based.
    pub inner: usize,
}

/// Canonical `(n̄, r)` basis labels of the U(d) irrep `λ`: occupations in
/// enumeration order, inner indices 1-based. Row and column order of every
/// irrep block.
pub fn irrep_basis_labels(shape: &Partition, d: usize) -> Vec<(Occupation, usize)> {
    let n = shape.boxes();
    let mut out = Vec::new();
    for w in enumerate_occupations(n, d, false) {
        let k = kostka(shape, &w);
        for r in 1..=k as usize {
            out.push((w.clone(), r));
        }
    }
    out
}

/// The unitary change of basis from the `d^N` product basis to the
/// Schur-Weyl basis, stored weight block by weight block.
pub struct SchurWeylTransform {
    photons: usize,
    modes: usize,
    partitions: Vec<Partition>,
    labels: Vec<BasisLabel>,
    /// All occupations in canonical order.
    weights: Vec<Occupation>,
    word_index: Vec<HashMap<Vec<u8>, usize>>,
    /// Global product index of each word, per weight.
    word_gidx: Vec<Vec<usize>>,
    /// Per weight: rows are the Schur-Weyl vectors of that weight in global
    /// label order, columns the words.
    blocks: Vec<Array2<C64>>,
    /// Global label index of each block row.
    block_rows: Vec<Vec<usize>>,
    /// For each global label: (weight index, row within block).
    label_pos: Vec<(usize, usize)>,
    /// For each (partition index, copy p-1): label index of its first basis
    /// vector; copy labels are contiguous.
    copy_start: HashMap<(usize, usize), usize>,
}

/// Deviations measured by [`SchurWeylTransform::verify`].
#[derive(Clone, Debug)]
pub struct VerificationReport {
    /// Max deviation of any weight block from row orthonormality.
    pub unitarity: f64,
    /// Support outside a vector's own weight. Zero by storage layout.
    pub weight_preservation: f64,
    /// Largest matrix element of `T·U^{⊗N}·T†` outside the (λ, p) blocks.
    pub off_block: f64,
    /// Largest entrywise difference between outer copies of the same λ.
    pub copy_mismatch: f64,
    pub trials: usize,
}

impl VerificationReport {
    pub fn max_deviation(&self) -> f64 {
        self.unitarity
            .max(self.weight_preservation)
            .max(self.off_block)
            .max(self.copy_mismatch)
    }
}

struct WeightTables {
    weights: Vec<Occupation>,
    weight_index: HashMap<Vec<usize>, usize>,
    words: Vec<Vec<Vec<u8>>>,
    word_index: Vec<HashMap<Vec<u8>, usize>>,
    word_gidx: Vec<Vec<usize>>,
}

fn weight_tables(n: usize, d: usize) -> WeightTables {
    let weights = enumerate_occupations(n, d, false);
    let weight_index: HashMap<Vec<usize>, usize> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (w.counts().to_vec(), i))
        .collect();
    let mut words: Vec<Vec<Vec<u8>>> = vec![Vec::new(); weights.len()];
    let mut word_gidx: Vec<Vec<usize>> = vec![Vec::new(); weights.len()];
    let dim = (d as u64).pow(n as u32) as usize;
    let mut word = vec![0u8; n];
    for g in 0..dim {
        let mut rest = g;
        for k in (0..n).rev() {
            word[k] = (rest % d) as u8;
            rest /= d;
        }
        let mut counts = vec![0usize; d];
        for &v in &word {
            counts[v as usize] += 1;
        }
        let wi = weight_index[&counts];
        words[wi].push(word.clone());
        word_gidx[wi].push(g);
    }
    let word_index = words
        .iter()
        .map(|list| {
            list.iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect::<HashMap<_, _>>()
        })
        .collect();
    WeightTables { weights, weight_index, words, word_index, word_gidx }
}

/// Orthonormalise `cand` against `accepted` (two passes) and append it when
/// the residual is independent. Candidates are normalised first so the
/// cutoff is scale-free.
fn gram_schmidt_push(accepted: &mut Vec<Array1<C64>>, mut cand: Array1<C64>) -> bool {
    let n0 = linalg::norm(&cand);
    if n0 < INDEPENDENCE_CUTOFF {
        return false;
    }
    cand.mapv_inplace(|z| z / n0);
    for _ in 0..2 {
        for b in accepted.iter() {
            let p = linalg::inner(b, &cand);
            cand.zip_mut_with(b, |x, y| *x -= p * y);
        }
    }
    let r = linalg::norm(&cand);
    if r < INDEPENDENCE_CUTOFF {
        return false;
    }
    cand.mapv_inplace(|z| z / r);
    accepted.push(cand);
    true
}

impl SchurWeylTransform {
    /// Build the transform for `N` photons in `d` modes.
    pub fn build(photons: usize, modes: usize) -> Result<Self> {
        if photons < 1 || modes < 2 {
            return Err(Error::DimensionMismatch(format!(
                "transform requires N >= 1 and d >= 2, got N={photons}, d={modes}"
            )));
        }
        let dim_u128 = (modes as u128).pow(photons as u32);
        if dim_u128 > DENSE_DIMENSION_CAP {
            return Err(Error::BudgetExceeded {
                what: "dense Schur-Weyl transform",
                required: dim_u128,
                cap: DENSE_DIMENSION_CAP,
            });
        }
        let (n, d) = (photons, modes);
        let tables = weight_tables(n, d);
        let partitions = enumerate_partitions(n, d);

        // basis vectors per (partition, copy, weight), inner index r = list order
        let mut bases: Vec<Vec<Vec<Vec<Array1<C64>>>>> = Vec::with_capacity(partitions.len());
        for shape in &partitions {
            let copies = build_outer_copies(shape, n, &tables)?;
            let mut shape_bases = Vec::with_capacity(copies.len());
            for hw in copies {
                shape_bases.push(lower_span(shape, hw, n, d, &tables)?);
            }
            bases.push(shape_bases);
        }

        // align r = 1 of (N-1, 1) at the coincident weight with the
        // bad-photon-in-last-mode state
        if d == n && n >= 3 {
            align_singly_convention(&partitions, &mut bases, n, &tables)?;
        }

        // assemble labels and weight blocks
        let mut labels = Vec::new();
        let mut block_rows: Vec<Vec<usize>> = vec![Vec::new(); tables.weights.len()];
        let mut row_vectors: Vec<Vec<Array1<C64>>> = vec![Vec::new(); tables.weights.len()];
        let mut label_pos = Vec::new();
        let mut copy_start = HashMap::new();
        for (li, shape) in partitions.iter().enumerate() {
            for (p, copy) in bases[li].iter().enumerate() {
                copy_start.insert((li, p), labels.len());
                for (wi, vecs) in copy.iter().enumerate() {
                    for (r, v) in vecs.iter().enumerate() {
                        let label_idx = labels.len();
                        labels.push(BasisLabel {
                            shape: shape.clone(),
                            outer: p + 1,
                            weight: tables.weights[wi].clone(),
                            inner: r + 1,
                        });
                        label_pos.push((wi, block_rows[wi].len()));
                        block_rows[wi].push(label_idx);
                        row_vectors[wi].push(v.clone());
                    }
                }
            }
        }
        debug_assert_eq!(labels.len(), dim_u128 as usize);

        let mut blocks = Vec::with_capacity(tables.weights.len());
        for (wi, rows) in row_vectors.iter().enumerate() {
            let cols = tables.words[wi].len();
            debug_assert_eq!(rows.len(), cols, "weight block must be square");
            let mut m = Array2::zeros((rows.len(), cols));
            for (i, v) in rows.iter().enumerate() {
                m.row_mut(i).assign(v);
            }
            blocks.push(m);
        }

        let t = SchurWeylTransform {
            photons,
            modes,
            partitions,
            labels,
            weights: tables.weights,
            word_index: tables.word_index,
            word_gidx: tables.word_gidx,
            blocks,
            block_rows,
            label_pos,
            copy_start,
        };
        let unit = t.unitarity_deviation();
        if unit > ORTHONORMALITY_TOL {
            return Err(Error::Internal(format!(
                "built transform fails orthonormality: {unit:.3e}"
            )));
        }
        Ok(t)
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Total number of basis states, `d^N`.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    fn partition_index(&self, shape: &Partition) -> Result<usize> {
        self.partitions.iter().position(|p| p == shape).ok_or(Error::TransformMismatch {
            t_photons: self.photons,
            t_modes: self.modes,
            photons: shape.boxes(),
            modes: self.modes,
        })
    }

    fn weight_idx(&self, w: &Occupation) -> Option<usize> {
        self.weights.iter().position(|x| x == w)
    }

    pub(crate) fn weight_position(&self, w: &Occupation) -> Option<usize> {
        self.weight_idx(w)
    }

    pub(crate) fn weight_block_matrix(&self, wi: usize) -> &Array2<C64> {
        &self.blocks[wi]
    }

    pub(crate) fn weight_block_labels(&self, wi: usize) -> &[usize] {
        &self.block_rows[wi]
    }

    pub(crate) fn word_local(&self, wi: usize, word: &[u8]) -> Option<usize> {
        self.word_index[wi].get(word).copied()
    }

    /// Global index of a label, if present.
    pub fn find_label(
        &self,
        shape: &Partition,
        outer: usize,
        weight: &Occupation,
        inner: usize,
    ) -> Option<usize> {
        self.labels.iter().position(|l| {
            l.shape == *shape && l.outer == outer && l.weight == *weight && l.inner == inner
        })
    }

    /// The basis vector of a label as a dense product-space vector.
    pub fn basis_vector_dense(&self, label: usize) -> Array1<C64> {
        let (wi, row) = self.label_pos[label];
        let mut out = Array1::zeros(self.dim());
        for (col, &g) in self.word_gidx[wi].iter().enumerate() {
            out[g] = self.blocks[wi][(row, col)];
        }
        out
    }

    /// The full transform as a dense matrix mapping product coordinates to
    /// Schur-Weyl coordinates (rows are conjugated basis vectors). Intended
    /// for small dimensions in tests.
    pub fn to_dense(&self) -> Array2<C64> {
        let dim = self.dim();
        let mut t = Array2::zeros((dim, dim));
        for (label, &(wi, row)) in self.label_pos.iter().enumerate() {
            for (col, &g) in self.word_gidx[wi].iter().enumerate() {
                t[(label, g)] = self.blocks[wi][(row, col)].conj();
            }
        }
        t
    }

    fn unitarity_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for b in &self.blocks {
            dev = dev.max(linalg::unitarity_deviation(b));
        }
        dev
    }

    /// Apply `U^{⊗N}` to the basis vector of `label`, returning the dense
    /// product-space result.
    fn apply_to_label(&self, u: &Array2<C64>, label: usize) -> Array1<C64> {
        let mut v = self.basis_vector_dense(label);
        apply_tensor_power(u, v.as_slice_mut().expect("contiguous"), self.photons, self.modes);
        v
    }

    /// Inner products of a dense vector with every basis vector of `weight`,
    /// in block-row order.
    fn project_weight(&self, dense: &Array1<C64>, wi: usize) -> Array1<C64> {
        let block = &self.blocks[wi];
        let mut out = Array1::zeros(block.nrows());
        for (row, out_e) in out.iter_mut().enumerate() {
            let mut acc = C64::zero();
            for (col, &g) in self.word_gidx[wi].iter().enumerate() {
                acc += block[(row, col)].conj() * dense[g];
            }
            *out_e = acc;
        }
        out
    }

    /// Matrix elements `⟨λ, 1, n̄, r| U^{⊗N} |λ, 1, m̄, r'⟩` for the columns
    /// of input weight `m̄`: the irrep action restricted to one input weight.
    /// Rows run over the canonical `(n̄, r)` labels of `λ`.
    pub fn irrep_action_columns(
        &self,
        u: &Array2<C64>,
        shape: &Partition,
        input_weight: &Occupation,
    ) -> Result<Array2<C64>> {
        let li = self.partition_index(shape)?;
        if u.nrows() != self.modes || u.ncols() != self.modes {
            return Err(Error::DimensionMismatch(format!(
                "unitary must be {0}x{0}, got {1}x{2}",
                self.modes,
                u.nrows(),
                u.ncols()
            )));
        }
        let wi_in = self.weight_idx(input_weight).ok_or_else(|| {
            Error::DimensionMismatch(format!(
                "occupation {} is not a weight for N={}, d={}",
                input_weight.display(),
                self.photons,
                self.modes
            ))
        })?;
        let k_in = kostka(shape, input_weight) as usize;
        let rows = self.copy1_rows(li);
        let dim_l = rows.len();
        let mut out = Array2::zeros((dim_l, k_in));
        for r_in in 0..k_in {
            let label = self
                .find_copy1_label(li, wi_in, r_in)
                .ok_or_else(|| Error::Internal("missing copy-1 label".into()))?;
            let dense = self.apply_to_label(u, label);
            for (row_out, &(wi, brow)) in rows.iter().enumerate() {
                let mut acc = C64::zero();
                let block = &self.blocks[wi];
                for (col, &g) in self.word_gidx[wi].iter().enumerate() {
                    acc += block[(brow, col)].conj() * dense[g];
                }
                out[(row_out, r_in)] = acc;
            }
        }
        Ok(out)
    }

    /// The full irrep block `U^λ` from outer copy `p = 1`, over the canonical
    /// `(n̄, r)` basis.
    pub fn irrep_block(&self, u: &Array2<C64>, shape: &Partition) -> Result<Array2<C64>> {
        let li = self.partition_index(shape)?;
        let rows = self.copy1_rows(li);
        let dim_l = rows.len();
        debug_assert_eq!(dim_l as u64, unitary_dim(shape, self.modes));
        let mut out = Array2::zeros((dim_l, dim_l));
        let start = self.copy_start[&(li, 0)];
        for col in 0..dim_l {
            let dense = self.apply_to_label(u, start + col);
            for (row_out, &(wi, brow)) in rows.iter().enumerate() {
                let mut acc = C64::zero();
                let block = &self.blocks[wi];
                for (c, &g) in self.word_gidx[wi].iter().enumerate() {
                    acc += block[(brow, c)].conj() * dense[g];
                }
                out[(row_out, col)] = acc;
            }
        }
        Ok(out)
    }

    /// Block-row positions of copy-1 labels of partition `li`, in canonical
    /// `(n̄, r)` order.
    fn copy1_rows(&self, li: usize) -> Vec<(usize, usize)> {
        let start = self.copy_start[&(li, 0)];
        let dim_l = unitary_dim(&self.partitions[li], self.modes) as usize;
        (start..start + dim_l).map(|label| self.label_pos[label]).collect()
    }

    fn find_copy1_label(&self, li: usize, wi: usize, r: usize) -> Option<usize> {
        let start = self.copy_start[&(li, 0)];
        let dim_l = unitary_dim(&self.partitions[li], self.modes) as usize;
        (start..start + dim_l)
            .find(|&label| self.label_pos[label].0 == wi && self.labels[label].inner == r + 1)
    }

    /// Measure unitarity, weight preservation and the block structure of
    /// `T·U^{⊗N}·T†` for each supplied unitary.
    pub fn verify(&self, unitaries: &[Array2<C64>]) -> VerificationReport {
        let unitarity = self.unitarity_deviation();
        let mut off_block = 0.0f64;
        let mut copy_mismatch = 0.0f64;
        for u in unitaries {
            // per (λ, p) blocks accumulated column by column
            let mut per_copy: HashMap<(usize, usize), Array2<C64>> = HashMap::new();
            for (li, shape) in self.partitions.iter().enumerate() {
                let dim_l = unitary_dim(shape, self.modes) as usize;
                for p in 0..sym_dim(shape) as usize {
                    per_copy.insert((li, p), Array2::zeros((dim_l, dim_l)));
                }
            }
            for (label, lab) in self.labels.iter().enumerate() {
                let li = self.partitions.iter().position(|s| s == &lab.shape).expect("known");
                let p = lab.outer - 1;
                let start = self.copy_start[&(li, p)];
                let col = label - start;
                let dense = self.apply_to_label(u, label);
                for wi in 0..self.weights.len() {
                    let coords = self.project_weight(&dense, wi);
                    for (brow, &other) in self.block_rows[wi].iter().enumerate() {
                        let z = coords[brow];
                        let ol = &self.labels[other];
                        if ol.shape == lab.shape && ol.outer == lab.outer {
                            let row = other - start;
                            per_copy.get_mut(&(li, p)).expect("present")[(row, col)] = z;
                        } else if z.norm() > off_block {
                            off_block = z.norm();
                        }
                    }
                }
            }
            for (li, shape) in self.partitions.iter().enumerate() {
                let reference = &per_copy[&(li, 0)];
                for p in 1..sym_dim(shape) as usize {
                    let diff = &per_copy[&(li, p)] - reference;
                    copy_mismatch = copy_mismatch.max(linalg::max_abs(&diff));
                }
            }
        }
        VerificationReport {
            unitarity,
            weight_preservation: 0.0, // basis vectors are stored by weight
            off_block,
            copy_mismatch,
            trials: unitaries.len(),
        }
    }

    /// [`verify`](Self::verify) against `trials` seeded Haar-random
    /// unitaries.
    pub fn verify_random(&self, trials: usize, seed: u64) -> VerificationReport {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let us: Vec<Array2<C64>> =
            (0..trials).map(|_| linalg::haar_unitary(self.modes, &mut rng)).collect();
        self.verify(&us)
    }

    pub fn cache_file_name(photons: usize, modes: usize) -> String {
        format!("schur_weyl_{photons}_{modes}.swt")
    }

    /// Serialize into the versioned cache container and write it to `dir`,
    /// via a temp file and rename so concurrent builders never expose a
    /// partial file.
    pub fn save_cache(&self, dir: &Path) -> Result<PathBuf> {
        let mut buf = Vec::new();
        buf.extend_from_slice(&CACHE_MAGIC);
        push_u32(&mut buf, CACHE_FORMAT_VERSION);
        push_u32(&mut buf, self.photons as u32);
        push_u32(&mut buf, self.modes as u32);
        push_u64(&mut buf, self.dim() as u64);
        push_u64(&mut buf, self.labels.len() as u64);
        for label in &self.labels {
            buf.push(label.shape.num_rows() as u8);
            for &row in label.shape.rows() {
                buf.push(row as u8);
            }
            push_u32(&mut buf, label.outer as u32);
            for &c in label.weight.counts() {
                buf.push(c as u8);
            }
            push_u32(&mut buf, label.inner as u32);
        }
        push_u64(&mut buf, self.blocks.len() as u64);
        for (wi, block) in self.blocks.iter().enumerate() {
            for &c in self.weights[wi].counts() {
                buf.push(c as u8);
            }
            push_u64(&mut buf, block.nrows() as u64);
            push_u64(&mut buf, block.ncols() as u64);
            for z in block.iter() {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        let checksum = fnv1a64(&buf);
        push_u64(&mut buf, checksum);

        std::fs::create_dir_all(dir)?;
        let path = dir.join(Self::cache_file_name(self.photons, self.modes));
        let tmp = dir.join(format!(
            ".{}.tmp-{}",
            Self::cache_file_name(self.photons, self.modes),
            std::process::id()
        ));
        std::fs::write(&tmp, &buf)?;
        std::fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Load a previously saved transform, checking version and checksum.
    pub fn load_cache(dir: &Path, photons: usize, modes: usize) -> Result<Self> {
        let path = dir.join(Self::cache_file_name(photons, modes));
        if !path.exists() {
            return Err(Error::CacheMissing(path));
        }
        let buf = std::fs::read(&path)?;
        if buf.len() < 8 + CACHE_MAGIC.len() {
            return Err(Error::CacheFormat("file too short".into()));
        }
        let (payload, tail) = buf.split_at(buf.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
        let computed = fnv1a64(payload);
        if stored != computed {
            return Err(Error::ChecksumMismatch { stored, computed });
        }
        let mut cur = Cursor { buf: payload, pos: 0 };
        if cur.take(4)? != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let version = cur.u32()?;
        if version != CACHE_FORMAT_VERSION {
            return Err(Error::VersionMismatch { found: version, expected: CACHE_FORMAT_VERSION });
        }
        let n = cur.u32()? as usize;
        let d = cur.u32()? as usize;
        if n != photons || d != modes {
            return Err(Error::CacheFormat(format!(
                "file holds N={n}, d={d}, requested N={photons}, d={modes}"
            )));
        }
        let dim = cur.u64()? as usize;
        let tables = weight_tables(n, d);
        let label_count = cur.u64()? as usize;
        if label_count != dim {
            return Err(Error::CacheFormat("label count != dimension".into()));
        }
        let mut labels = Vec::with_capacity(label_count);
        for _ in 0..label_count {
            let rows_len = cur.byte()? as usize;
            let mut rows = Vec::with_capacity(rows_len);
            for _ in 0..rows_len {
                rows.push(cur.byte()? as usize);
            }
            let shape = Partition::new(rows)
                .map_err(|e| Error::CacheFormat(format!("bad partition: {e}")))?;
            let outer = cur.u32()? as usize;
            let mut counts = Vec::with_capacity(d);
            for _ in 0..d {
                counts.push(cur.byte()? as usize);
            }
            let inner = cur.u32()? as usize;
            labels.push(BasisLabel { shape, outer, weight: Occupation::new(counts), inner });
        }
        let block_count = cur.u64()? as usize;
        if block_count != tables.weights.len() {
            return Err(Error::CacheFormat("weight block count mismatch".into()));
        }
        let mut blocks = Vec::with_capacity(block_count);
        for wi in 0..block_count {
            let mut counts = Vec::with_capacity(d);
            for _ in 0..d {
                counts.push(cur.byte()? as usize);
            }
            if counts != tables.weights[wi].counts() {
                return Err(Error::CacheFormat("weight order mismatch".into()));
            }
            let rows = cur.u64()? as usize;
            let cols = cur.u64()? as usize;
            if cols != tables.words[wi].len() || rows != cols {
                return Err(Error::CacheFormat("weight block shape mismatch".into()));
            }
            let mut m = Array2::zeros((rows, cols));
            for i in 0..rows {
                for j in 0..cols {
                    let re = cur.f64()?;
                    let im = cur.f64()?;
                    m[(i, j)] = C64::new(re, im);
                }
            }
            blocks.push(m);
        }
        if cur.pos != payload.len() {
            return Err(Error::CacheFormat("trailing bytes".into()));
        }

        // rebuild the derived indices from the label table
        let mut block_rows: Vec<Vec<usize>> = vec![Vec::new(); tables.weights.len()];
        let mut label_pos = Vec::with_capacity(labels.len());
        let mut copy_start = HashMap::new();
        let partitions = enumerate_partitions(n, d);
        for (idx, label) in labels.iter().enumerate() {
            let wi = *tables
                .weight_index
                .get(label.weight.counts())
                .ok_or_else(|| Error::CacheFormat("unknown weight in label".into()))?;
            label_pos.push((wi, block_rows[wi].len()));
            block_rows[wi].push(idx);
            let li = partitions
                .iter()
                .position(|s| s == &label.shape)
                .ok_or_else(|| Error::CacheFormat("unknown partition in label".into()))?;
            copy_start.entry((li, label.outer - 1)).or_insert(idx);
        }
        Ok(SchurWeylTransform {
            photons,
            modes,
            partitions,
            labels,
            weights: tables.weights,
            word_index: tables.word_index,
            word_gidx: tables.word_gidx,
            blocks,
            block_rows,
            label_pos,
            copy_start,
        })
    }

    /// Load from cache when available, otherwise build (and save when a
    /// directory is given).
    pub fn load_or_build(dir: Option<&Path>, photons: usize, modes: usize) -> Result<Self> {
        if let Some(dir) = dir {
            match Self::load_cache(dir, photons, modes) {
                Ok(t) => return Ok(t),
                Err(Error::CacheMissing(_)) => {}
                Err(e) => return Err(e),
            }
            let t = Self::build(photons, modes)?;
            t.save_cache(dir)?;
            Ok(t)
        } else {
            Self::build(photons, modes)
        }
    }
}

/// Highest weight vector of irrep `λ`: product of column Slater determinants
/// with slots assigned down the columns.
fn highest_weight(shape: &Partition, n: usize, tables: &WeightTables) -> Array1<C64> {
    let heights = shape.conjugate();
    let mut terms: Vec<(Vec<u8>, f64)> = vec![(Vec::with_capacity(n), 1.0)];
    for &h in &heights {
        let mut next = Vec::with_capacity(terms.len() * factorial(h) as usize);
        for perm in (0..h as u8).permutations(h) {
            let sign = permutation_sign(&perm);
            for (word, coeff) in &terms {
                let mut w = word.clone();
                w.extend_from_slice(&perm);
                next.push((w, coeff * sign));
            }
        }
        terms = next;
    }
    let mut counts = vec![0usize; tables.weights[0].num_modes()];
    for &v in &terms[0].0 {
        counts[v as usize] += 1;
    }
    let wi = tables.weight_index[&counts];
    let mut vec = Array1::zeros(tables.words[wi].len());
    for (word, coeff) in &terms {
        let idx = tables.word_index[wi][word];
        vec[idx] += C64::new(*coeff, 0.0);
    }
    let norm = linalg::norm(&vec);
    vec.mapv_inplace(|z| z / norm);
    vec
}

fn permutation_sign(perm: &[u8]) -> f64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Orthonormal highest-weight vectors for all outer copies of `λ`, found by
/// Gram-Schmidt over the S_N orbit of the highest weight in lexicographic
/// permutation order.
fn build_outer_copies(
    shape: &Partition,
    n: usize,
    tables: &WeightTables,
) -> Result<Vec<Array1<C64>>> {
    let hw = highest_weight(shape, n, tables);
    let mut padded = shape.rows().to_vec();
    padded.resize(tables.weights[0].num_modes(), 0);
    let wi = tables.weight_index[&padded];
    let target = sym_dim(shape) as usize;
    let mut copies = Vec::with_capacity(target);
    for perm in (0..n).permutations(n) {
        let mut cand = Array1::zeros(hw.len());
        for (idx, &c) in hw.iter().enumerate() {
            if c == C64::zero() {
                continue;
            }
            let word = &tables.words[wi][idx];
            let mut permuted = vec![0u8; n];
            for (k, &v) in word.iter().enumerate() {
                permuted[perm[k]] = v;
            }
            let new_idx = tables.word_index[wi][&permuted];
            cand[new_idx] += c;
        }
        gram_schmidt_push(&mut copies, cand);
        if copies.len() == target {
            break;
        }
    }
    if copies.len() != target {
        return Err(Error::NumericDegeneracy {
            context: format!("outer copies of λ={}", shape.display()),
            norm: 0.0,
            cutoff: INDEPENDENCE_CUTOFF,
        });
    }
    Ok(copies)
}

/// Span one copy of irrep `λ` from its highest-weight vector by repeated
/// lowering, weight by weight in canonical order. Returns per-weight basis
/// lists whose positions define the inner multiplicity `r`.
fn lower_span(
    shape: &Partition,
    hw: Array1<C64>,
    n: usize,
    d: usize,
    tables: &WeightTables,
) -> Result<Vec<Vec<Array1<C64>>>> {
    let mut padded = shape.rows().to_vec();
    padded.resize(d, 0);
    let hw_wi = tables.weight_index[&padded];
    let mut basis: Vec<Vec<Array1<C64>>> = vec![Vec::new(); tables.weights.len()];
    basis[hw_wi] = vec![hw];
    for wi in 0..tables.weights.len() {
        if wi == hw_wi {
            continue;
        }
        let weight = &tables.weights[wi];
        let expected = kostka(shape, weight) as usize;
        if expected == 0 {
            continue;
        }
        // candidates from every raised weight, sources in stored order,
        // operators by mode index
        let mut accepted: Vec<Array1<C64>> = Vec::with_capacity(expected);
        for i in 0..d - 1 {
            if weight.counts()[i + 1] == 0 {
                continue;
            }
            let mut raised = weight.counts().to_vec();
            raised[i] += 1;
            raised[i + 1] -= 1;
            let Some(&src_wi) = tables.weight_index.get(&raised) else {
                continue;
            };
            for src in &basis[src_wi] {
                let cand = lower(src, src_wi, wi, i, n, tables);
                gram_schmidt_push(&mut accepted, cand);
            }
        }
        if accepted.len() < expected {
            return Err(Error::NumericDegeneracy {
                context: format!("λ={} at weight {}", shape.display(), weight.display()),
                norm: 0.0,
                cutoff: INDEPENDENCE_CUTOFF,
            });
        }
        if accepted.len() > expected {
            return Err(Error::Internal(format!(
                "λ={} at weight {} is overcomplete: {} > {}",
                shape.display(),
                weight.display(),
                accepted.len(),
                expected
            )));
        }
        basis[wi] = accepted;
    }
    Ok(basis)
}

/// Apply the lowering operator `E_{i+1,i}` (sum of single-qudit
/// substitutions) to a vector of weight `src_wi`.
fn lower(
    src: &Array1<C64>,
    src_wi: usize,
    tgt_wi: usize,
    i: usize,
    n: usize,
    tables: &WeightTables,
) -> Array1<C64> {
    let mut out = Array1::zeros(tables.words[tgt_wi].len());
    for (idx, &c) in src.iter().enumerate() {
        if c == C64::zero() {
            continue;
        }
        let word = &tables.words[src_wi][idx];
        for k in 0..n {
            if word[k] == i as u8 {
                let mut w = word.clone();
                w[k] = (i + 1) as u8;
                let tgt = tables.word_index[tgt_wi][&w];
                out[tgt] += c;
            }
        }
    }
    out
}

/// Rotate the inner-multiplicity space of `λ = (N-1, 1)` at the coincident
/// weight so `r = 1` is the component of the singly distinguishable state
/// with its bad photon in the last mode. The same rotation is applied in
/// every outer copy, keeping the copies' blocks identical.
fn align_singly_convention(
    partitions: &[Partition],
    bases: &mut [Vec<Vec<Vec<Array1<C64>>>>],
    n: usize,
    tables: &WeightTables,
) -> Result<()> {
    let shape = Partition::almost_symmetric(n);
    let Some(li) = partitions.iter().position(|s| s == &shape) else {
        return Ok(());
    };
    let coin = Occupation::coincident(n);
    let wi = tables.weight_index[coin.counts()];
    let k = (n - 1) as usize;
    debug_assert_eq!(kostka(&shape, &coin) as usize, k);

    // System components |N_j⟩ of the singly distinguishable state: uniform
    // superpositions of the coincident words with the bad mode N-1 in slot j
    let mult = tables.words[wi].len();
    let amp = 1.0 / (factorial(n - 1) as f64).sqrt();
    let mut njs = vec![Array1::<C64>::zeros(mult); n];
    for (idx, word) in tables.words[wi].iter().enumerate() {
        let j = word.iter().position(|&v| v == (n - 1) as u8).expect("coincident word");
        njs[j][idx] = C64::new(amp, 0.0);
    }

    let rows = &bases[li][0][wi];
    let mut a = Array2::<C64>::zeros((k, k));
    for nj in &njs {
        let c: Vec<C64> = rows.iter().map(|row| linalg::inner(row, nj)).collect();
        for r in 0..k {
            for s in 0..k {
                a[(r, s)] += c[r] * c[s].conj();
            }
        }
    }
    // a must be rank one: a = u u†
    let best_col = (0..k)
        .max_by(|&x, &y| {
            let nx: f64 = (0..k).map(|r| a[(r, x)].norm_sqr()).sum();
            let ny: f64 = (0..k).map(|r| a[(r, y)].norm_sqr()).sum();
            nx.partial_cmp(&ny).expect("finite")
        })
        .expect("k >= 1");
    let mut u = Array1::from_iter((0..k).map(|r| a[(r, best_col)]));
    let norm = linalg::norm(&u);
    u.mapv_inplace(|z| z / norm);
    // deterministic phase: largest component real positive
    let lead = (0..k)
        .max_by(|&x, &y| u[x].norm().partial_cmp(&u[y].norm()).expect("finite"))
        .expect("k >= 1");
    let phase = u[lead] / u[lead].norm();
    u.mapv_inplace(|z| z / phase);
    for r in 0..k {
        for s in 0..k {
            let residual = (a[(r, s)] - u[r] * u[s].conj()).norm();
            if residual > 1e-9 {
                return Err(Error::Internal(format!(
                    "singly distinguishable component is not rank one: residual {residual:.3e}"
                )));
            }
        }
    }

    // complete u to an orthonormal basis of the r-space
    let mut q_cols: Vec<Array1<C64>> = vec![u];
    for e in 0..k {
        if q_cols.len() == k {
            break;
        }
        let mut cand = Array1::zeros(k);
        cand[e] = C64::new(1.0, 0.0);
        gram_schmidt_push(&mut q_cols, cand);
    }
    debug_assert_eq!(q_cols.len(), k);

    for copy in bases[li].iter_mut() {
        let old = copy[wi].clone();
        let mut rotated = Vec::with_capacity(k);
        for q in &q_cols {
            let mut v = Array1::zeros(old[0].len());
            for (r, row) in old.iter().enumerate() {
                let w = q[r];
                v.zip_mut_with(row, |x, y| *x += w * y);
            }
            rotated.push(v);
        }
        copy[wi] = rotated;
    }
    Ok(())
}

/// Apply `U^{⊗N}` in place to a dense product-space vector, one qudit slot
/// at a time.
fn apply_tensor_power(u: &Array2<C64>, v: &mut [C64], n: usize, d: usize) {
    let mut scratch = vec![C64::zero(); d];
    for k in 0..n {
        let stride = d.pow((n - 1 - k) as u32);
        let outer = d.pow(k as u32);
        for hi in 0..outer {
            let base_hi = hi * stride * d;
            for lo in 0..stride {
                let base = base_hi + lo;
                for (a, s) in scratch.iter_mut().enumerate() {
                    let mut acc = C64::zero();
                    for b in 0..d {
                        acc += u[(a, b)] * v[base + b * stride];
                    }
                    *s = acc;
                }
                for (a, s) in scratch.iter().enumerate() {
                    v[base + a * stride] = *s;
                }
            }
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::CacheFormat("unexpected end of file".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn byte(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn occ(counts: &[usize]) -> Occupation {
        Occupation::new(counts.to_vec())
    }

    #[test]
    fn two_photons_two_modes_structure() {
        let t = SchurWeylTransform::build(2, 2).unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.labels().len(), 4);
        // the singlet row must be (|01⟩ - |10⟩)/√2 up to a sign
        let singlet = t
            .find_label(&Partition::new(vec![1, 1]).unwrap(), 1, &occ(&[1, 1]), 1)
            .expect("singlet label");
        let v = t.basis_vector_dense(singlet);
        let s = 1.0 / 2f64.sqrt();
        let dot = (v[1] * s - v[2] * s).norm();
        assert!((dot - 1.0).abs() < 1e-12, "singlet vector wrong: {v:?}");
    }

    #[test]
    fn three_photons_block_multiplicities() {
        let t = SchurWeylTransform::build(3, 3).unwrap();
        assert_eq!(t.dim(), 27);
        let count = |shape: &Partition| {
            t.labels().iter().filter(|l| &l.shape == shape).count() as u64
        };
        let sym = Partition::symmetric(3);
        let mixed = Partition::new(vec![2, 1]).unwrap();
        let anti = Partition::new(vec![1, 1, 1]).unwrap();
        assert_eq!(count(&sym), unitary_dim(&sym, 3));
        assert_eq!(count(&mixed), 2 * unitary_dim(&mixed, 3));
        assert_eq!(count(&anti), 1);
    }

    #[test]
    fn three_in_two_dimension_bookkeeping() {
        let t = SchurWeylTransform::build(3, 2).unwrap();
        assert_eq!(t.dim(), 8);
        // λ=(3) dim 4, λ=(2,1) dim 2 with 2 outer copies: 4·1 + 2·2 = 8
        assert_eq!(t.partitions().len(), 2);
        assert_eq!(unitary_dim(&Partition::symmetric(3), 2), 4);
        assert_eq!(unitary_dim(&Partition::new(vec![2, 1]).unwrap(), 2), 2);
    }

    #[test]
    fn budget_cap_enforced() {
        assert!(matches!(
            SchurWeylTransform::build(9, 9),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn transform_is_unitary() {
        for (n, d) in [(2, 2), (3, 2), (3, 3), (2, 4), (4, 4)] {
            let t = SchurWeylTransform::build(n, d).unwrap();
            assert!(t.unitarity_deviation() < ORTHONORMALITY_TOL, "N={n}, d={d}");
            // dense cross-check at small sizes
            if t.dim() <= 81 {
                let dense = t.to_dense();
                assert!(linalg::unitarity_deviation(&dense) < 1e-12);
            }
        }
    }

    #[test]
    fn verify_identity_has_zero_deviation() {
        let t = SchurWeylTransform::build(2, 2).unwrap();
        let report = t.verify(&[linalg::identity(2)]);
        assert!(report.max_deviation() < 1e-13);
    }

    #[test]
    fn verify_random_unitaries_block_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (n, d) in [(2, 2), (3, 3), (3, 2), (4, 3)] {
            let t = SchurWeylTransform::build(n, d).unwrap();
            let us: Vec<Array2<C64>> = (0..3).map(|_| linalg::haar_unitary(d, &mut rng)).collect();
            let report = t.verify(&us);
            assert!(report.off_block < 1e-9, "off-block {} at N={n}, d={d}", report.off_block);
            assert!(report.copy_mismatch < 1e-9, "copies differ at N={n}, d={d}");
        }
    }

    #[test]
    fn permutation_symmetric_block_is_unit() {
        // the symmetric block of a mode permutation is a 0/1 matrix with
        // entries exactly 1 (no phases), realizing the S_N action
        let t = SchurWeylTransform::build(3, 3).unwrap();
        let p = crate::optics::Interferometer::permutation(&[1, 2, 0]);
        let block = t.irrep_block(p.matrix(), &Partition::symmetric(3)).unwrap();
        for i in 0..block.nrows() {
            for j in 0..block.ncols() {
                let z = block[(i, j)];
                assert!(z.norm() < 1e-12 || (z - C64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
        // exactly one unit entry per row
        for i in 0..block.nrows() {
            let count = (0..block.ncols()).filter(|&j| block[(i, j)].norm() > 0.5).count();
            assert_eq!(count, 1);
        }
    }

    #[test]
    fn cache_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let t = SchurWeylTransform::build(2, 2).unwrap();
        t.save_cache(dir.path()).unwrap();
        let loaded = SchurWeylTransform::load_cache(dir.path(), 2, 2).unwrap();
        assert_eq!(t.labels(), loaded.labels());
        for (a, b) in t.blocks.iter().zip(loaded.blocks.iter()) {
            assert_eq!(a.shape(), b.shape());
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn cache_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            SchurWeylTransform::load_cache(dir.path(), 9, 9),
            Err(Error::CacheMissing(_))
        ));
    }

    #[test]
    fn cache_detects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let t = SchurWeylTransform::build(2, 2).unwrap();
        let path = t.save_cache(dir.path()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            SchurWeylTransform::load_cache(dir.path(), 2, 2),
            Err(Error::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn cache_detects_version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let t = SchurWeylTransform::build(2, 2).unwrap();
        let path = t.save_cache(dir.path()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // bump the version field and restore a consistent checksum
        bytes[4] = 0xfe;
        let len = bytes.len();
        let checksum = fnv1a64(&bytes[..len - 8]);
        bytes[len - 8..].copy_from_slice(&checksum.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            SchurWeylTransform::load_cache(dir.path(), 2, 2),
            Err(Error::VersionMismatch { .. })
        ));
    }

    #[test]
    fn copy1_labels_match_canonical_order() {
        let t = SchurWeylTransform::build(3, 3).unwrap();
        for (li, shape) in t.partitions().iter().enumerate() {
            let expected = irrep_basis_labels(shape, 3);
            let start = t.copy_start[&(li, 0)];
            for (offset, (w, r)) in expected.iter().enumerate() {
                let label = &t.labels()[start + offset];
                assert_eq!(&label.weight, w);
                assert_eq!(label.inner, *r);
                assert_eq!(label.outer, 1);
            }
        }
    }
}
