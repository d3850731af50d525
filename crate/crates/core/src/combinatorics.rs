//! Partitions, Young tableaux and irrep dimensions.
//!
//! A partition `λ` of `N` labels simultaneous irreps of the unitary group
//! U(d) and the symmetric group S_N. Their dimensions are computed here with
//! exact integer arithmetic (hook products), never floating point, so that
//! the dimension identities used as consistency checks are exact.
//!
//! Orderings are load-bearing: inner and outer multiplicity indices acquire
//! their meaning from list positions, so every enumeration in this module is
//! frozen to a canonical order. Partitions are listed lexicographically
//! decreasing; tableaux of a given shape are ordered by their row-reading
//! word, lexicographically increasing.

use serde::{Deserialize, Serialize};

/// Young diagram labelling simultaneous U(d)/S_N irreps.
///
/// Rows are weakly decreasing and positive; the number of boxes is the
/// photon number `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    rows: Vec<usize>,
}

impl Partition {
    /// Build a partition, checking the row invariants.
    pub fn new(rows: Vec<usize>) -> crate::Result<Self> {
        if rows.is_empty() {
            return Err(crate::Error::DimensionMismatch(
                "partition must have at least one row".into(),
            ));
        }
        if rows.iter().any(|&r| r == 0) {
            return Err(crate::Error::DimensionMismatch(
                "partition rows must be positive".into(),
            ));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(crate::Error::DimensionMismatch(
                "partition rows must be weakly decreasing".into(),
            ));
        }
        Ok(Partition { rows })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Total number of boxes.
    pub fn boxes(&self) -> usize {
        self.rows.iter().sum()
    }

    /// The one-row partition `(N)`, the totally symmetric irrep.
    pub fn symmetric(n: usize) -> Self {
        Partition { rows: vec![n] }
    }

    /// The partition `(N-1, 1)`, the "almost symmetric" irrep.
    pub fn almost_symmetric(n: usize) -> Self {
        assert!(n >= 2);
        Partition { rows: vec![n - 1, 1] }
    }

    /// Column heights (the conjugate partition).
    pub fn conjugate(&self) -> Vec<usize> {
        let cols = self.rows[0];
        (0..cols)
            .map(|c| self.rows.iter().filter(|&&r| r > c).count())
            .collect()
    }

    /// Hook length of the box at (row, col), 0-indexed.
    fn hook(&self, row: usize, col: usize) -> usize {
        let arm = self.rows[row] - col - 1;
        let leg = self.rows[row + 1..].iter().filter(|&&r| r > col).count();
        arm + leg + 1
    }

    /// Compact display like `(2,1)`.
    pub fn display(&self) -> String {
        let inner: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        format!("({})", inner.join(","))
    }
}

/// Photon counts per mode; the representation-theoretic weight of a state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occupation {
    counts: Vec<usize>,
}

impl Occupation {
    pub fn new(counts: Vec<usize>) -> Self {
        Occupation { counts }
    }

    /// The coincident occupation `1̄ = (1,...,1)` on `d` modes.
    pub fn coincident(d: usize) -> Self {
        Occupation { counts: vec![1; d] }
    }

    /// All photons bunched in one mode.
    pub fn bunched(n: usize, d: usize, mode: usize) -> Self {
        let mut counts = vec![0; d];
        counts[mode] = n;
        Occupation { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_modes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// True when every photon sits in a single mode.
    pub fn is_bunched(&self) -> bool {
        self.counts.iter().filter(|&&c| c > 0).count() <= 1
    }

    /// `n̄! = Π_j n_j!`.
    pub fn factorial(&self) -> u64 {
        self.counts.iter().map(|&c| factorial(c)).product()
    }

    /// Number of product-basis words with this occupation, `N! / n̄!`.
    pub fn multinomial(&self) -> u64 {
        factorial(self.total()) / self.factorial()
    }

    /// Compact display like `210` (single digits suffice for N ≤ 9).
    pub fn display(&self) -> String {
        if self.counts.iter().all(|&c| c < 10) {
            self.counts.iter().map(|c| c.to_string()).collect()
        } else {
            let inner: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
            format!("({})", inner.join(","))
        }
    }
}

/// A filling of a Young diagram.
///
/// Semistandard fillings weakly increase along rows and strictly increase
/// down columns; standard fillings use each of 1..N once and increase
/// strictly in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    shape: Partition,
    /// Row-wise entries, 1-based values.
    filling: Vec<Vec<usize>>,
}

impl Tableau {
    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn filling(&self) -> &[Vec<usize>] {
        &self.filling
    }

    /// Row-reading word (rows concatenated top to bottom).
    pub fn row_word(&self) -> Vec<usize> {
        self.filling.iter().flatten().copied().collect()
    }

    /// Entry multiplicities as an occupation over values 1..=d.
    pub fn weight(&self, d: usize) -> Occupation {
        let mut counts = vec![0; d];
        for &v in self.filling.iter().flatten() {
            counts[v - 1] += 1;
        }
        Occupation::new(counts)
    }
}

/// Exact non-negative rational, used for bounds and reference values so
/// comparisons against floating-point results have unambiguous targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num_integer::gcd(num, den);
        Rational { num: num / g, den: den / g }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// All partitions of `n` with at most `d` rows, lexicographically decreasing.
///
/// The position of each partition in this list is the canonical irrep index
/// used by the Schur-Weyl transform.
pub fn enumerate_partitions(n: usize, d: usize) -> Vec<Partition> {
    assert!(n >= 1 && d >= 1, "enumerate_partitions requires n, d >= 1");
    let mut out = Vec::new();
    let mut rows = Vec::new();
    fn rec(remaining: usize, max_part: usize, rows_left: usize, rows: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { rows: rows.clone() });
            return;
        }
        if rows_left == 0 {
            return;
        }
        // largest feasible part first gives lex-decreasing order
        let hi = max_part.min(remaining);
        // the remaining boxes must fit in the rows left
        let lo = remaining.div_ceil(rows_left);
        for part in (lo..=hi).rev() {
            rows.push(part);
            rec(remaining - part, part, rows_left - 1, rows, out);
            rows.pop();
        }
    }
    rec(n, n, d, &mut rows, &mut out);
    out
}

/// Dimension of the S_N irrep `λ` by the hook length formula.
pub fn sym_dim(shape: &Partition) -> u64 {
    let n = shape.boxes();
    let mut hooks: u128 = 1;
    for (r, &len) in shape.rows().iter().enumerate() {
        for c in 0..len {
            hooks *= shape.hook(r, c) as u128;
        }
    }
    (factorial(n) as u128 / hooks) as u64
}

/// Dimension of the U(d) irrep `λ` by the Weyl (hook content) formula.
///
/// Returns 0 when `λ` has more than `d` rows (no semistandard filling
/// exists).
pub fn unitary_dim(shape: &Partition, d: usize) -> u64 {
    if shape.num_rows() > d {
        return 0;
    }
    // Π (d + c - r) / hook(r, c), with exact division performed at the end
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for (r, &len) in shape.rows().iter().enumerate() {
        for c in 0..len {
            num *= (d + c - r) as u128;
            den *= shape.hook(r, c) as u128;
        }
    }
    debug_assert_eq!(num % den, 0);
    (num / den) as u64
}

/// Kostka number: semistandard tableaux of shape `λ` and weight `n̄`.
pub fn kostka(shape: &Partition, weight: &Occupation) -> u64 {
    enumerate_ssyt(shape, weight).len() as u64
}

/// All semistandard tableaux of shape `λ` and weight `n̄`, ordered by
/// row-reading word. The 1-based position in this list is the inner
/// multiplicity label `r`.
pub fn enumerate_ssyt(shape: &Partition, weight: &Occupation) -> Vec<Tableau> {
    assert_eq!(
        weight.total(),
        shape.boxes(),
        "weight must fill the diagram exactly"
    );
    let d = weight.num_modes();
    let rows = shape.rows();
    let mut filling: Vec<Vec<usize>> = rows.iter().map(|&len| vec![0; len]).collect();
    let mut remaining: Vec<usize> = weight.counts().to_vec();
    let mut out = Vec::new();

    // fill boxes in row-reading order; lex order of the row word follows
    // from trying smaller values first
    let boxes: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
        .collect();

    fn rec(
        idx: usize,
        boxes: &[(usize, usize)],
        filling: &mut Vec<Vec<usize>>,
        remaining: &mut Vec<usize>,
        d: usize,
        shape: &Partition,
        out: &mut Vec<Tableau>,
    ) {
        if idx == boxes.len() {
            out.push(Tableau {
                shape: shape.clone(),
                filling: filling.clone(),
            });
            return;
        }
        let (r, c) = boxes[idx];
        let min_row = if c > 0 { filling[r][c - 1] } else { 1 };
        let min_col = if r > 0 { filling[r - 1][c] + 1 } else { 1 };
        let lo = min_row.max(min_col);
        for v in lo..=d {
            if remaining[v - 1] == 0 {
                continue;
            }
            filling[r][c] = v;
            remaining[v - 1] -= 1;
            rec(idx + 1, boxes, filling, remaining, d, shape, out);
            remaining[v - 1] += 1;
            filling[r][c] = 0;
        }
    }
    rec(0, &boxes, &mut filling, &mut remaining, d, shape, &mut out);
    out
}

/// All standard tableaux of shape `λ`, ordered by row-reading word. The
/// 1-based position is the outer multiplicity label `p`.
pub fn enumerate_syt(shape: &Partition) -> Vec<Tableau> {
    let n = shape.boxes();
    enumerate_ssyt(shape, &Occupation::coincident(n))
}

/// All occupations of `n` photons over `d` modes, lexicographically
/// decreasing from `(n, 0, ..., 0)`; optionally excluding fully bunched
/// patterns, which can never help discriminate.
pub fn enumerate_occupations(n: usize, d: usize, exclude_bunched: bool) -> Vec<Occupation> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; d];
    fn rec(mode: usize, left: usize, counts: &mut Vec<usize>, out: &mut Vec<Occupation>) {
        if mode + 1 == counts.len() {
            counts[mode] = left;
            out.push(Occupation::new(counts.clone()));
            return;
        }
        for c in (0..=left).rev() {
            counts[mode] = c;
            rec(mode + 1, left - c, counts, out);
        }
        counts[mode] = 0;
    }
    rec(0, n, &mut counts, &mut out);
    if exclude_bunched {
        out.retain(|occ| !occ.is_bunched());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rows: &[usize]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    fn occ(counts: &[usize]) -> Occupation {
        Occupation::new(counts.to_vec())
    }

    #[test]
    fn partitions_of_two() {
        assert_eq!(enumerate_partitions(2, 2), vec![p(&[2]), p(&[1, 1])]);
    }

    #[test]
    fn partitions_of_three() {
        assert_eq!(
            enumerate_partitions(3, 3),
            vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]
        );
    }

    #[test]
    fn partitions_of_four_two_rows() {
        // brute-force enumeration of partitions of 4 with ≤ 2 rows
        let brute: Vec<Partition> = (0..=4)
            .rev()
            .flat_map(|a| (0..=a).map(move |b| (a, b)))
            .filter(|&(a, b)| a + b == 4 && a > 0)
            .map(|(a, b)| {
                if b == 0 {
                    p(&[a])
                } else {
                    p(&[a, b])
                }
            })
            .collect();
        assert_eq!(enumerate_partitions(4, 2), brute);
        assert_eq!(
            enumerate_partitions(4, 2),
            vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]
        );
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn sym_dims() {
        for n in 1..=8 {
            assert_eq!(sym_dim(&Partition::symmetric(n)), 1);
        }
        for n in 2..=8 {
            assert_eq!(sym_dim(&Partition::almost_symmetric(n)), (n - 1) as u64);
        }
        assert_eq!(sym_dim(&p(&[2, 1])), 2);
        assert_eq!(sym_dim(&p(&[2, 2])), 2);
        assert_eq!(sym_dim(&p(&[3, 2, 1])), 16);
    }

    #[test]
    fn unitary_dims() {
        assert_eq!(unitary_dim(&p(&[2]), 2), 3); // triplet
        assert_eq!(unitary_dim(&p(&[1, 1]), 2), 1); // singlet
        assert_eq!(unitary_dim(&p(&[2, 1]), 3), 8);
        assert_eq!(unitary_dim(&p(&[1, 1, 1]), 2), 0);
        // dimension equals the count of semistandard tableaux
        for d in 2..=4 {
            for n in 1..=5 {
                for lam in enumerate_partitions(n, d) {
                    let count: u64 = enumerate_occupations(n, d, false)
                        .iter()
                        .map(|w| kostka(&lam, w))
                        .sum();
                    assert_eq!(unitary_dim(&lam, d), count, "λ={:?} d={}", lam, d);
                }
            }
        }
    }

    #[test]
    fn ssyt_examples() {
        // fillings 12/3 and 13/2, in row-word order
        let t = enumerate_ssyt(&p(&[2, 1]), &occ(&[1, 1, 1]));
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].filling(), &[vec![1, 2], vec![3]]);
        assert_eq!(t[1].filling(), &[vec![1, 3], vec![2]]);

        // 12/1 is not semistandard, leaving only 11/2
        let t = enumerate_ssyt(&p(&[2, 1]), &occ(&[2, 1, 0]));
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].filling(), &[vec![1, 1], vec![2]]);

        // the symmetric row filling is unique for any weight
        for n in 1..=6 {
            for w in enumerate_occupations(n, 3, false) {
                assert_eq!(enumerate_ssyt(&Partition::symmetric(n), &w).len(), 1);
            }
        }
    }

    #[test]
    fn syt_counts_match_hook_formula() {
        assert_eq!(enumerate_syt(&Partition::symmetric(4)).len(), 1);
        assert_eq!(enumerate_syt(&p(&[2, 1])).len(), 2);
        assert_eq!(enumerate_syt(&p(&[2, 2])).len(), 2);
        for n in 1..=6 {
            for lam in enumerate_partitions(n, n) {
                assert_eq!(enumerate_syt(&lam).len() as u64, sym_dim(&lam));
            }
        }
    }

    #[test]
    fn schur_weyl_dimension_count() {
        // Σ_λ d_{λ}·d_(λ) = d^N
        for d in 2..=5 {
            for n in 1..=6 {
                let total: u64 = enumerate_partitions(n, d)
                    .iter()
                    .map(|lam| unitary_dim(lam, d) * sym_dim(lam))
                    .sum();
                assert_eq!(total, (d as u64).pow(n as u32));
            }
        }
    }

    #[test]
    fn regular_representation_identity() {
        // Σ_λ d_(λ)² = N!
        for n in 1..=8 {
            let total: u64 = enumerate_partitions(n, n)
                .iter()
                .map(|lam| sym_dim(lam).pow(2))
                .sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn unitary_dimension_identity() {
        // Σ_λ d_{λ}² = binomial(N²+N−1, N)
        for n in 1..=6 {
            let total: u64 = enumerate_partitions(n, n)
                .iter()
                .map(|lam| unitary_dim(lam, n).pow(2))
                .sum();
            let n64 = n as u64;
            assert_eq!(total, binomial(n64 * n64 + n64 - 1, n64));
        }
    }

    #[test]
    fn kostka_weight_permutation_invariance() {
        let lam = p(&[3, 2]);
        let base = kostka(&lam, &occ(&[2, 1, 1, 1, 0]));
        for w in [
            occ(&[1, 2, 1, 0, 1]),
            occ(&[0, 1, 1, 2, 1]),
            occ(&[1, 1, 0, 1, 2]),
        ] {
            assert_eq!(kostka(&lam, &w), base);
        }
    }

    #[test]
    fn occupation_enumeration() {
        assert_eq!(
            enumerate_occupations(2, 2, true),
            vec![occ(&[1, 1])]
        );
        assert_eq!(enumerate_occupations(3, 3, true).len(), 7);
        assert_eq!(enumerate_occupations(3, 2, false).len(), 4);
        // lex-decreasing order
        let all = enumerate_occupations(2, 2, false);
        assert_eq!(all, vec![occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]);
    }

    #[test]
    fn occupation_helpers() {
        let w = occ(&[2, 0, 1]);
        assert_eq!(w.total(), 3);
        assert_eq!(w.factorial(), 2);
        assert_eq!(w.multinomial(), 3);
        assert!(!w.is_bunched());
        assert!(occ(&[0, 3, 0]).is_bunched());
        assert_eq!(w.display(), "201");
        assert_eq!(p(&[2, 1]).display(), "(2,1)");
    }
}
