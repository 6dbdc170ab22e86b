use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, norm2, CsrMatrix, EnvelopeCholesky};
use crate::{Error, Result};

/// Controls for [`smallest_deflated`].
#[derive(Clone, Debug)]
pub struct SubspaceOptions {
    /// Block size; should exceed the multiplicity of the wanted eigenvalue.
    pub block: usize,
    /// Relative residual at which the lowest pair is accepted.
    pub tol: f64,
    pub max_iter: usize,
    /// Shift `s` in `(K + s M)^{-1} M`.
    pub shift: f64,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        SubspaceOptions {
            block: 6,
            tol: 1e-11,
            max_iter: 400,
            shift: 1.0,
            seed: 0x5eed,
        }
    }
}

/// Lowest eigenpairs found by [`smallest_deflated`].
#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Ritz values in increasing order.
    pub values: Vec<f64>,
    /// Eigenvector of `values[0]`, unit norm in the `M` inner product.
    pub vector: Vec<f64>,
    /// `|K x - l M x| / (|K x| + |l| |M x|)` for the lowest pair.
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenvalues of `K x = l M x` on the `M`-orthogonal complement of
/// `null`, by shift-and-invert block subspace iteration with Rayleigh-Ritz.
///
/// `K` must be symmetric positive semidefinite with `null` spanning its
/// kernel, `M` symmetric positive semidefinite with `null^T M null > 0`, and
/// `K + shift M` positive definite.
pub fn smallest_deflated(
    k: &CsrMatrix,
    m: &CsrMatrix,
    null: &[f64],
    opts: &SubspaceOptions,
) -> Result<EigenSolution> {
    let n = k.dim();
    let p = opts.block.min(n.saturating_sub(1)).max(1);
    let shifted = k.add_scaled(opts.shift, m);
    let chol = EnvelopeCholesky::factor(&shifted)?;

    let m_null = m.mul_vec(null);
    let null_norm = dot(null, &m_null);
    if !(null_norm > 0.0) {
        return Err(Error::Singular("deflation vector has zero mass".into()));
    }
    let deflate = |x: &mut [f64]| {
        let c = dot(&m_null, x) / null_norm;
        for (xi, ni) in x.iter_mut().zip(null) {
            *xi -= c * ni;
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            deflate(&mut v);
            v
        })
        .collect();

    let mut last_residual = f64::INFINITY;
    let mut previous: Option<f64> = None;
    for iter in 1..=opts.max_iter {
        let mut y: Vec<Vec<f64>> = basis
            .iter()
            .map(|x| {
                let mut v = chol.solve(&m.mul_vec(x));
                deflate(&mut v);
                v
            })
            .collect();
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.mul_vec(v)).collect();
        let my: Vec<Vec<f64>> = y.iter().map(|v| m.mul_vec(v)).collect();
        let (values, coeffs) = rayleigh_ritz(&y, &ky, &my)?;

        let q = coeffs.ncols();
        let combine = |src: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (r, s) in src.iter().enumerate() {
                let c = coeffs[(r, col)];
                for (o, v) in out.iter_mut().zip(s) {
                    *o += c * v;
                }
            }
            out
        };
        let new_basis: Vec<Vec<f64>> = (0..q).map(|c| combine(&y, c)).collect();

        let kx = combine(&ky, 0);
        let mx = combine(&my, 0);
        let lambda = values[0];
        let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
        let denom = norm2(&kx) + lambda.abs() * norm2(&mx);
        last_residual = if denom > 0.0 {
            norm2(&r) / denom
        } else {
            f64::INFINITY
        };

        let stalled = previous.is_some_and(|prev| (prev - lambda).abs() <= 1e-15 * lambda.abs());
        previous = Some(lambda);
        y.clear();
        basis = new_basis;
        if iter >= 3
            && (last_residual <= opts.tol
                || (stalled && iter >= 30 && last_residual <= 1e3 * opts.tol))
        {
            let vector = basis[0].clone();
            return Ok(EigenSolution {
                values,
                vector,
                residual: last_residual,
                iterations: iter,
            });
        }
        // refill the block if Rayleigh-Ritz dropped dependent directions
        while basis.len() < p {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            deflate(&mut v);
            basis.push(v);
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: last_residual,
    })
}

/// Ritz values and `M`-orthonormal coefficient vectors of the pencil
/// projected onto `span(y)`.
fn rayleigh_ritz(
    y: &[Vec<f64>],
    ky: &[Vec<f64>],
    my: &[Vec<f64>],
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let p = y.len();
    let kp = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
    let mp = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &my[j]) + dot(&y[j], &my[i])));

    let me = SymmetricEigen::new(mp);
    let top = me.eigenvalues.iter().copied().fold(0.0, f64::max);
    if !(top > 0.0) {
        return Err(Error::Singular("subspace has no mass".into()));
    }
    let keep: Vec<usize> = (0..p)
        .filter(|&i| me.eigenvalues[i] > 1e-13 * top)
        .collect();
    let w = DMatrix::from_fn(p, keep.len(), |i, j| {
        let c = keep[j];
        me.eigenvectors[(i, c)] / me.eigenvalues[c].sqrt()
    });
    let reduced = w.transpose() * kp * &w;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let ke = SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by(|&a, &b| ke.eigenvalues[a].total_cmp(&ke.eigenvalues[b]));
    let values = order.iter().map(|&i| ke.eigenvalues[i]).collect();
    let z = DMatrix::from_fn(keep.len(), keep.len(), |i, j| {
        ke.eigenvectors[(i, order[j])]
    });
    Ok((values, w * z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    /// P1 stiffness and consistent mass on a uniform grid of `[0, 1]`.
    fn p1_pencil(cells: usize) -> (CsrMatrix, CsrMatrix) {
        let n = cells + 1;
        let h = 1.0 / cells as f64;
        let mut k = TripletBuilder::new(n);
        let mut m = TripletBuilder::new(n);
        for e in 0..cells {
            for (a, b, kv, mv) in [
                (e, e, 1.0, 2.0),
                (e, e + 1, -1.0, 1.0),
                (e + 1, e, -1.0, 1.0),
                (e + 1, e + 1, 1.0, 2.0),
            ] {
                k.add(a, b, kv / h);
                m.add(a, b, mv * h / 6.0);
            }
        }
        (k.build(), m.build())
    }

    #[test]
    fn neumann_interval_matches_discrete_formula() {
        let cells = 64;
        let (k, m) = p1_pencil(cells);
        let ones = vec![1.0; cells + 1];
        let sol = smallest_deflated(&k, &m, &ones, &SubspaceOptions::default()).unwrap();
        let h = 1.0 / cells as f64;
        let c = (std::f64::consts::PI * h).cos();
        let exact = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
        assert!(
            (sol.values[0] - exact).abs() < 1e-9 * exact,
            "{} vs {}",
            sol.values[0],
            exact
        );
        assert!(sol.residual <= 1e-11);
        assert!(dot(&ones, &m.mul_vec(&sol.vector)).abs() < 1e-10);
    }
}
