//! Small dense complex linear algebra helpers shared across modules.

use crate::C64;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

pub(crate) fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// Max-norm deviation of `m · m†` from the identity.
pub(crate) fn unitarity_deviation(m: &Array2<C64>) -> f64 {
    let gram = m.dot(&m.t().mapv(|z| z.conj()));
    let n = gram.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }
    dev
}

pub(crate) fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &Array1<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Haar-random unitary: Gram-Schmidt of a complex Gaussian matrix, with a
/// second orthogonalisation pass for accuracy.
pub(crate) fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Array2<C64> {
    let mut cols: Vec<Array1<C64>> = (0..d)
        .map(|_| {
            Array1::from_iter(
                (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
            )
        })
        .collect();
    for i in 0..d {
        for _pass in 0..2 {
            for j in 0..i {
                let proj = inner(&cols[j], &cols[i]);
                let prev = cols[j].clone();
                cols[i].zip_mut_with(&prev, |x, y| *x -= proj * y);
            }
        }
        let n = norm(&cols[i]);
        cols[i].mapv_inplace(|z| z / n);
    }
    let mut u = Array2::zeros((d, d));
    for (j, col) in cols.iter().enumerate() {
        u.column_mut(j).assign(col);
    }
    u
}
