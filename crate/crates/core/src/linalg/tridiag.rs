use crate::{Error, Result};

/// Symmetric tridiagonal matrix stored by its diagonal and sub-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        SymTridiagonal {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Adds the symmetric 2x2 block `[[a, b], [b, c]]` at rows `i, i + 1`.
    pub fn add_block(&mut self, i: usize, a: f64, b: f64, c: f64) {
        self.diag[i] += a;
        self.off[i] += b;
        self.diag[i + 1] += c;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    /// Principal submatrix with the first row and column removed.
    pub fn drop_first(&self) -> SymTridiagonal {
        SymTridiagonal {
            diag: self.diag[1..].to_vec(),
            off: self.off[1..].to_vec(),
        }
    }

    /// `LDL^T` factorization; fails on a nonpositive pivot.
    pub fn factor(&self) -> Result<TridiagonalLdl> {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0];
        for i in 1..n {
            if !(d[i - 1] > 0.0) {
                return Err(Error::Singular(format!(
                    "nonpositive pivot {} at row {}",
                    d[i - 1],
                    i - 1
                )));
            }
            l[i - 1] = self.off[i - 1] / d[i - 1];
            d[i] = self.diag[i] - l[i - 1] * self.off[i - 1];
        }
        if !(d[n - 1] > 0.0) {
            return Err(Error::Singular(format!(
                "nonpositive pivot {} at row {}",
                d[n - 1],
                n - 1
            )));
        }
        Ok(TridiagonalLdl { d, l })
    }
}

/// Factor produced by [`SymTridiagonal::factor`].
#[derive(Clone, Debug)]
pub struct TridiagonalLdl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagonalLdl {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            b[i] -= self.l[i - 1] * b[i - 1];
        }
        for (x, d) in b.iter_mut().zip(&self.d) {
            *x /= d;
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.l[i] * b[i + 1];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let mut t = SymTridiagonal::zeros(5);
        for i in 0..4 {
            t.add_block(i, 2.0, -1.0, 2.0);
        }
        let x: Vec<f64> = (0..5).map(|i| i as f64 - 1.5).collect();
        let mut b = t.mul_vec(&x);
        t.factor().unwrap().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_laplacian_detected() {
        let mut t = SymTridiagonal::zeros(4);
        for i in 0..3 {
            t.add_block(i, 1.0, -1.0, 1.0);
        }
        assert!(t.factor().is_err());
        assert!(t.drop_first().factor().is_ok());
    }
}
