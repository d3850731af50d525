//! Interferometer construction and matrix functions.
//!
//! An interferometer on `d` modes is a `d × d` unitary transfer matrix.
//! Exterior phaseshifters (before the first and after the last beamsplitter)
//! never affect number-in/number-out experiments, so they are not
//! represented: the Reck parametrisation here carries only beamsplitter
//! angles and the interior phases sitting between beamsplitters.
//!
//! Mesh convention (frozen; it affects parameter coordinates only, not the
//! reachable set): blocks are enumerated in layers `c = 1..d-1`, layer `c`
//! holding blocks on the mode pairs `(r, r+1)` for `r = d-1` down to `c`
//! (1-indexed). A block is
//!
//! ```text
//! B(θ, ω) = diag(e^{iω}, 1) · [[cos θ, sin θ], [-sin θ, cos θ]]
//! ```
//!
//! on its pair, and the transfer matrix is the left-to-right product of the
//! blocks in enumeration order (so the last block in the list acts on the
//! input state first). Layer-1 blocks carry no interior phase: their phases
//! commute leftwards out of the mesh and are exterior. This yields
//! `d(d-1)/2` angles and `(d-1)(d-2)/2` interior phases, and every unitary
//! equals `D_l · from_reck(params) · D_r` for some exterior phase diagonals,
//! which [`reck_decompose`] computes.

use crate::combinatorics::{Occupation, Partition};
use crate::linalg;
use crate::schur_weyl::SchurWeylTransform;
use crate::{C64, Error, Result};
use ndarray::Array2;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Largest matrix the permanent routines accept; keeps worst-case runtime
/// around seconds instead of silently stalling.
pub const PERMANENT_SIZE_CAP: usize = 20;

/// A `d × d` unitary transfer matrix, with optional provenance describing
/// how it was built.
#[derive(Clone, Debug)]
pub struct Interferometer {
    matrix: Array2<C64>,
    provenance: Provenance,
}

/// How an interferometer was constructed, kept for serialization.
#[derive(Clone, Debug, Default)]
pub enum Provenance {
    #[default]
    None,
    Reck(ReckParams),
    Network(Vec<(usize, Interferometer)>),
}

impl Interferometer {
    /// Wrap a matrix, checking unitarity to 1e-12.
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "transfer matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = linalg::unitarity_deviation(&matrix);
        if dev > 1e-12 {
            return Err(Error::DimensionMismatch(format!(
                "matrix is not unitary: deviation {dev:.3e}"
            )));
        }
        Ok(Interferometer { matrix, provenance: Provenance::None })
    }

    pub fn identity(d: usize) -> Self {
        Interferometer { matrix: linalg::identity(d), provenance: Provenance::None }
    }

    /// Permutation interferometer sending mode `j` to mode `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let d = perm.len();
        let mut m = Array2::zeros((d, d));
        for (j, &t) in perm.iter().enumerate() {
            m[(t, j)] = C64::new(1.0, 0.0);
        }
        Interferometer { matrix: m, provenance: Provenance::None }
    }

    /// Haar-random interferometer.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Interferometer { matrix: linalg::haar_unitary(d, rng), provenance: Provenance::None }
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `self · other` as a composed interferometer.
    pub fn compose(&self, other: &Interferometer) -> Interferometer {
        Interferometer {
            matrix: self.matrix.dot(&other.matrix),
            provenance: Provenance::None,
        }
    }
}

/// Interior Reck-mesh parameters: `d(d-1)/2` beamsplitter angles in
/// `[0, π/2]` and `(d-1)(d-2)/2` interior phases in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReckParams {
    pub d: usize,
    pub thetas: Vec<f64>,
    pub omegas: Vec<f64>,
}

impl ReckParams {
    pub fn theta_count(d: usize) -> usize {
        d * (d - 1) / 2
    }

    pub fn omega_count(d: usize) -> usize {
        (d - 1) * (d - 2) / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.thetas.len() != Self::theta_count(self.d) {
            return Err(Error::ParamCount {
                kind: "thetas",
                expected: Self::theta_count(self.d),
                got: self.thetas.len(),
            });
        }
        if self.omegas.len() != Self::omega_count(self.d) {
            return Err(Error::ParamCount {
                kind: "omegas",
                expected: Self::omega_count(self.d),
                got: self.omegas.len(),
            });
        }
        Ok(())
    }

    /// Flatten to a single parameter vector (thetas then omegas).
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.thetas.clone();
        v.extend_from_slice(&self.omegas);
        v
    }

    pub fn from_flat(d: usize, flat: &[f64]) -> Result<Self> {
        let nt = Self::theta_count(d);
        let no = Self::omega_count(d);
        if flat.len() != nt + no {
            return Err(Error::ParamCount {
                kind: "flat reck parameters",
                expected: nt + no,
                got: flat.len(),
            });
        }
        Ok(ReckParams { d, thetas: flat[..nt].to_vec(), omegas: flat[nt..].to_vec() })
    }
}

/// Mesh block positions in enumeration order: (layer `c`, pair `r`),
/// 1-indexed, acting on 0-indexed modes `(r-1, r)`.
fn reck_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut seq = Vec::with_capacity(d * (d - 1) / 2);
    for c in 1..d {
        for r in (c..d).rev() {
            seq.push((c, r));
        }
    }
    seq
}

fn block_matrix(d: usize, pair: usize, theta: f64, omega: f64) -> Array2<C64> {
    let mut m = linalg::identity(d);
    let (c, s) = (theta.cos(), theta.sin());
    let ph = C64::from_polar(1.0, omega);
    let (a, b) = (pair - 1, pair);
    m[(a, a)] = ph * c;
    m[(a, b)] = ph * s;
    m[(b, a)] = C64::new(-s, 0.0);
    m[(b, b)] = C64::new(c, 0.0);
    m
}

/// Build the interferometer for a set of interior Reck parameters.
pub fn from_reck(params: &ReckParams) -> Result<Interferometer> {
    params.validate()?;
    let d = params.d;
    let mut u = linalg::identity(d);
    let mut omega_iter = params.omegas.iter();
    for (i, &(c, r)) in reck_pairs(d).iter().enumerate() {
        let omega = if c == 1 { 0.0 } else { *omega_iter.next().expect("validated count") };
        u = u.dot(&block_matrix(d, r, params.thetas[i], omega));
    }
    Ok(Interferometer { matrix: u, provenance: Provenance::Reck(params.clone()) })
}

/// Recover interior Reck parameters for an arbitrary unitary.
///
/// Returns params with `from_reck(params) = D_l · u · D_r` for some exterior
/// phase diagonals, so all |entries| and all photon-counting statistics
/// agree with `u`.
pub fn reck_decompose(u: &Interferometer) -> Result<ReckParams> {
    let d = u.modes();
    let mut v = u.matrix.clone();
    let mut thetas = Vec::new();
    let mut omegas = Vec::new();
    for (c, r) in reck_pairs(d) {
        let (m0, m1, col) = (r - 1, r, c - 1);
        let x = v[(m0, col)];
        let y = v[(m1, col)];
        let (theta, omega) = if y.norm() < 1e-14 {
            (0.0, 0.0)
        } else if x.norm() < 1e-14 {
            (std::f64::consts::FRAC_PI_2, 0.0)
        } else {
            // choose B so that B† zeroes v[m1, col]
            let theta = y.norm().atan2(x.norm());
            let omega = (-(-y * x.conj()).arg()).rem_euclid(std::f64::consts::TAU);
            (theta, omega)
        };
        // apply B† to rows m0, m1
        let ph = C64::from_polar(1.0, -omega);
        let (cs, sn) = (theta.cos(), theta.sin());
        for j in 0..d {
            let a = v[(m0, j)];
            let b = v[(m1, j)];
            v[(m0, j)] = ph * cs * a - sn * b;
            v[(m1, j)] = ph * sn * a + cs * b;
        }
        thetas.push(theta);
        if c > 1 {
            omegas.push(omega);
        }
        // layer-1 phases commute out of the mesh into the exterior diagonal
    }
    for i in 0..d {
        for j in 0..d {
            if i != j && v[(i, j)].norm() > 1e-10 {
                return Err(Error::Internal(format!(
                    "reck elimination left off-diagonal residue {:.3e}",
                    v[(i, j)].norm()
                )));
            }
        }
    }
    Ok(ReckParams { d, thetas, omegas })
}

/// The `N`-mode quantum Fourier transform, entries `ω^{jk} / √N` with
/// `ω = exp(2πi/N)`, 0-indexed.
pub fn qft(n: usize) -> Interferometer {
    assert!(n >= 2, "qft requires at least 2 modes");
    let norm = 1.0 / (n as f64).sqrt();
    let matrix = Array2::from_shape_fn((n, n), |(j, k)| {
        C64::from_polar(norm, std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64)
    });
    Interferometer { matrix, provenance: Provenance::None }
}

/// Embed interferometer blocks on contiguous mode windows into `d` modes and
/// compose them. The first block in the list acts on the input state first.
pub fn layered_network(d: usize, blocks: &[(usize, Interferometer)]) -> Result<Interferometer> {
    let mut total = linalg::identity(d);
    for (offset, block) in blocks {
        let b = block.modes();
        if offset + b > d {
            return Err(Error::DimensionMismatch(format!(
                "block of {b} modes at offset {offset} does not fit in {d} modes"
            )));
        }
        let mut emb = linalg::identity(d);
        for i in 0..b {
            for j in 0..b {
                emb[(offset + i, offset + j)] = block.matrix[(i, j)];
            }
        }
        total = emb.dot(&total);
    }
    Ok(Interferometer { matrix: total, provenance: Provenance::Network(blocks.to_vec()) })
}

/// Submatrix with row `j` repeated `out_j` times and column `k` repeated
/// `in_k` times, in ascending mode order.
pub fn occupation_submatrix(
    u: &Interferometer,
    input: &Occupation,
    output: &Occupation,
) -> Result<Array2<C64>> {
    let d = u.modes();
    if input.num_modes() != d || output.num_modes() != d {
        return Err(Error::DimensionMismatch(format!(
            "occupations must have {d} modes, got {} and {}",
            input.num_modes(),
            output.num_modes()
        )));
    }
    if input.total() != output.total() {
        return Err(Error::DimensionMismatch(format!(
            "photon number mismatch: {} in, {} out",
            input.total(),
            output.total()
        )));
    }
    let n = input.total();
    let rows: Vec<usize> = output
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat(j).take(c))
        .collect();
    let cols: Vec<usize> = input
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat(k).take(c))
        .collect();
    Ok(Array2::from_shape_fn((n, n), |(i, j)| u.matrix[(rows[i], cols[j])]))
}

/// Matrix permanent by Ryser's formula with Gray-code updates, O(2^n · n).
pub fn permanent<T>(m: &Array2<T>) -> Result<T>
where
    T: Copy
        + Zero
        + num_traits::One
        + std::ops::AddAssign
        + std::ops::SubAssign
        + std::ops::Neg<Output = T>
        + std::ops::Mul<Output = T>,
{
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "permanent requires a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n > PERMANENT_SIZE_CAP {
        return Err(Error::SizeCap { what: "permanent", size: n, cap: PERMANENT_SIZE_CAP });
    }
    if n == 0 {
        return Ok(T::one());
    }
    let mut sums = vec![T::zero(); n];
    let mut total = T::zero();
    let mut parity_odd = false; // parity of |S|
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        // state of the flipped bit in the Gray code k ^ (k >> 1)
        let inserted = (k >> (bit + 1)) & 1 == 0;
        for (i, s) in sums.iter_mut().enumerate() {
            if inserted {
                *s += m[(i, bit)];
            } else {
                *s -= m[(i, bit)];
            }
        }
        parity_odd = !parity_odd;
        let mut prod = T::one();
        for s in &sums {
            prod = prod * *s;
        }
        if parity_odd {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 0 {
        total = -total;
    }
    Ok(total)
}

/// The irreducible representation block `U^λ` of an interferometer.
#[derive(Clone, Debug)]
pub struct IrrepBlock {
    pub shape: Partition,
    /// `unitary_dim(λ, d)` square matrix over the canonical `(n̄, r)` basis.
    pub matrix: Array2<C64>,
    /// Row/column labels in matrix order.
    pub labels: Vec<(Occupation, usize)>,
}

/// Extract the block of `T·U^{⊗N}·T†` for irrep `λ`, taken from outer copy
/// `p = 1`.
pub fn irrep_block(
    u: &Interferometer,
    shape: &Partition,
    transform: &SchurWeylTransform,
) -> Result<IrrepBlock> {
    if u.modes() != transform.modes() || shape.boxes() != transform.photons() {
        return Err(Error::TransformMismatch {
            t_photons: transform.photons(),
            t_modes: transform.modes(),
            photons: shape.boxes(),
            modes: u.modes(),
        });
    }
    let matrix = transform.irrep_block(u.matrix(), shape)?;
    Ok(IrrepBlock {
        shape: shape.clone(),
        matrix,
        labels: crate::schur_weyl::irrep_basis_labels(shape, transform.modes()),
    })
}

/// Serialized form: `{d, entries}` row-major `[re, im]` pairs, plus optional
/// provenance.
#[derive(Serialize, Deserialize)]
pub struct InterferometerJson {
    pub d: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reck: Option<ReckParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<Vec<NetworkBlockJson>>,
}

#[derive(Serialize, Deserialize)]
pub struct NetworkBlockJson {
    pub offset: usize,
    pub block: Box<InterferometerJson>,
}

impl Interferometer {
    pub fn to_json(&self) -> InterferometerJson {
        let d = self.modes();
        let entries = self.matrix.iter().map(|z| [z.re, z.im]).collect();
        let (mut reck, mut network) = (None, None);
        match &self.provenance {
            Provenance::None => {}
            Provenance::Reck(p) => reck = Some(p.clone()),
            Provenance::Network(blocks) => {
                network = Some(
                    blocks
                        .iter()
                        .map(|(offset, b)| NetworkBlockJson {
                            offset: *offset,
                            block: Box::new(b.to_json()),
                        })
                        .collect(),
                )
            }
        }
        InterferometerJson { d, entries, reck, network }
    }

    pub fn from_json(json: &InterferometerJson) -> Result<Self> {
        let d = json.d;
        if json.entries.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {d}x{d} matrix, got {}",
                d * d,
                json.entries.len()
            )));
        }
        let matrix = Array2::from_shape_fn((d, d), |(i, j)| {
            let [re, im] = json.entries[i * d + j];
            C64::new(re, im)
        });
        let mut interferometer = Interferometer::new(matrix)?;
        if let Some(p) = &json.reck {
            interferometer.provenance = Provenance::Reck(p.clone());
        }
        Ok(interferometer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn occ(counts: &[usize]) -> Occupation {
        Occupation::new(counts.to_vec())
    }

    /// Naive O(n!·n) permanent over all permutations; the independent oracle
    /// for the Ryser implementation.
    fn permanent_naive(m: &Array2<C64>) -> C64 {
        use itertools::Itertools;
        let n = m.nrows();
        (0..n)
            .permutations(n)
            .map(|perm| perm.iter().enumerate().map(|(i, &j)| m[(i, j)]).product::<C64>())
            .sum()
    }

    #[test]
    fn permanent_small_cases() {
        let id2 = linalg::identity(2);
        assert_abs_diff_eq!(permanent(&id2).unwrap().re, 1.0, epsilon = 1e-14);
        // per(QFT_2) = 0
        let q2 = qft(2);
        assert!(permanent(q2.matrix()).unwrap().norm() < 1e-14);
        // all-ones 3x3 / 3 has permanent 3!/27 = 2/9
        let ones = Array2::from_elem((3, 3), C64::new(1.0 / 3.0, 0.0));
        assert_abs_diff_eq!(permanent(&ones).unwrap().re, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn permanent_matches_naive_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            for _ in 0..4 {
                let m = Array2::from_shape_fn((n, n), |_| {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let fast = permanent(&m).unwrap();
                let slow = permanent_naive(&m);
                assert!((fast - slow).norm() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn permanent_size_cap() {
        let m = Array2::<C64>::zeros((21, 21));
        assert!(matches!(permanent(&m), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn qft_small() {
        let q2 = qft(2);
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(q2.matrix()[(0, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(q2.matrix()[(1, 1)].re, -s, epsilon = 1e-15);
        for n in 2..=7 {
            assert!(linalg::unitarity_deviation(qft(n).matrix()) < 1e-12);
        }
    }

    #[test]
    fn reck_parameter_counts() {
        for d in 2..=6 {
            assert_eq!(reck_pairs(d).len(), ReckParams::theta_count(d));
            let interior = reck_pairs(d).iter().filter(|&&(c, _)| c > 1).count();
            assert_eq!(interior, ReckParams::omega_count(d));
        }
        let bad = ReckParams { d: 3, thetas: vec![0.0; 2], omegas: vec![] };
        assert!(matches!(from_reck(&bad), Err(Error::ParamCount { .. })));
    }

    #[test]
    fn reck_two_modes() {
        // balanced beamsplitter at θ = π/4
        let p = ReckParams { d: 2, thetas: vec![std::f64::consts::FRAC_PI_4], omegas: vec![] };
        let u = from_reck(&p).unwrap();
        for entry in u.matrix().iter() {
            assert_abs_diff_eq!(entry.norm(), 1.0 / 2f64.sqrt(), epsilon = 1e-14);
        }
        // |U11|² = 2/3 at θ = arccos(√(2/3))
        let p = ReckParams { d: 2, thetas: vec![(2f64 / 3.0).sqrt().acos()], omegas: vec![] };
        let u = from_reck(&p).unwrap();
        assert_abs_diff_eq!(u.matrix()[(0, 0)].norm_sqr(), 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn reck_zero_angles_is_identity() {
        for d in 2..=5 {
            let p = ReckParams {
                d,
                thetas: vec![0.0; ReckParams::theta_count(d)],
                omegas: vec![0.3; ReckParams::omega_count(d)],
            };
            let u = from_reck(&p).unwrap();
            // identity up to the suppressed exterior phases
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        assert_abs_diff_eq!(u.matrix()[(i, j)].norm(), 1.0, epsilon = 1e-14);
                    } else {
                        assert!(u.matrix()[(i, j)].norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn reck_decompose_recovers_moduli() {
        // 50 Haar unitaries on d = 3, |entries| recovered to 1e-8
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let u = Interferometer::random(3, &mut rng);
            let params = reck_decompose(&u).unwrap();
            let rebuilt = from_reck(&params).unwrap();
            for (a, b) in u.matrix().iter().zip(rebuilt.matrix().iter()) {
                assert!((a.norm() - b.norm()).abs() < 1e-8);
            }
        }
        // spot-check larger meshes too
        for d in [4, 5] {
            let u = Interferometer::random(d, &mut rng);
            let params = reck_decompose(&u).unwrap();
            assert!(params
                .thetas
                .iter()
                .all(|&t| (0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&t)));
            let rebuilt = from_reck(&params).unwrap();
            for (a, b) in u.matrix().iter().zip(rebuilt.matrix().iter()) {
                assert!((a.norm() - b.norm()).abs() < 1e-8, "d={d}");
            }
        }
    }

    #[test]
    fn layered_network_basics() {
        // single block reproduces itself
        let u = layered_network(2, &[(0, qft(2))]).unwrap();
        assert!(linalg::max_abs(&(u.matrix() - qft(2).matrix())) < 1e-14);
        // out-of-range offset rejected
        assert!(layered_network(3, &[(2, qft(2))]).is_err());
        // composition order: first entry acts first
        let swap = Interferometer::permutation(&[1, 0]);
        let net = layered_network(3, &[(0, swap.clone()), (1, swap.clone())]).unwrap();
        let direct = {
            let mut first = linalg::identity(3);
            for i in 0..2 {
                for j in 0..2 {
                    first[(i, j)] = swap.matrix()[(i, j)];
                }
            }
            let mut second = linalg::identity(3);
            for i in 0..2 {
                for j in 0..2 {
                    second[(1 + i, 1 + j)] = swap.matrix()[(i, j)];
                }
            }
            second.dot(&first)
        };
        assert!(linalg::max_abs(&(net.matrix() - &direct)) < 1e-14);
    }

    #[test]
    fn occupation_submatrix_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = Interferometer::random(3, &mut rng);
        // coincident in and out gives back U
        let sub = occupation_submatrix(&u, &occ(&[1, 1, 1]), &occ(&[1, 1, 1])).unwrap();
        assert!(linalg::max_abs(&(&sub - u.matrix())) < 1e-15);
        // row repetition
        let u2 = Interferometer::random(2, &mut rng);
        let sub = occupation_submatrix(&u2, &occ(&[1, 1]), &occ(&[2, 0])).unwrap();
        assert_eq!(sub[(0, 0)], u2.matrix()[(0, 0)]);
        assert_eq!(sub[(1, 0)], u2.matrix()[(0, 0)]);
        assert_eq!(sub[(1, 1)], u2.matrix()[(0, 1)]);
        // (1,1,1) -> (2,1,0) duplicates the first row
        let q3 = qft(3);
        let sub = occupation_submatrix(&q3, &occ(&[1, 1, 1]), &occ(&[2, 1, 0])).unwrap();
        for j in 0..3 {
            assert_eq!(sub[(0, j)], sub[(1, j)]);
            assert_eq!(sub[(2, j)], q3.matrix()[(1, j)]);
        }
    }

    #[test]
    fn interferometer_json_round_trip() {
        let p = ReckParams { d: 3, thetas: vec![0.3, 0.7, 1.1], omegas: vec![2.2] };
        let u = from_reck(&p).unwrap();
        let json = serde_json::to_string(&u.to_json()).unwrap();
        let parsed: InterferometerJson = serde_json::from_str(&json).unwrap();
        let back = Interferometer::from_json(&parsed).unwrap();
        assert!(linalg::max_abs(&(u.matrix() - back.matrix())) < 1e-15);
        match back.provenance() {
            Provenance::Reck(q) => assert_eq!(*q, p),
            _ => panic!("reck provenance lost"),
        }
    }

    proptest::proptest! {
        // permanents are invariant under row and column permutations
        #[test]
        fn permanent_permutation_invariance(seed in 0u64..1000) {
            use itertools::Itertools;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 4;
            let m = Array2::from_shape_fn((n, n), |_| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let reference = permanent(&m).unwrap();
            let perm: Vec<usize> = (0..n).permutations(n).nth((seed % 24) as usize).unwrap();
            let rows = Array2::from_shape_fn((n, n), |(i, j)| m[(perm[i], j)]);
            let cols = Array2::from_shape_fn((n, n), |(i, j)| m[(i, perm[j])]);
            proptest::prop_assert!((permanent(&rows).unwrap() - reference).norm() < 1e-12);
            proptest::prop_assert!((permanent(&cols).unwrap() - reference).norm() < 1e-12);
        }
    }
}
