use nalgebra::DMatrix;

/// Dense row-major square matrix.
pub type Matrix = Vec<Vec<f64>>;

/// Largest singular value `sup |Ax|/|x|`.
pub fn operator_norm(a: &Matrix) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let m = DMatrix::from_fn(n, a[0].len(), |i, j| a[i][j]);
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `Σ A_{jk}²`.
pub fn frobenius_sq(a: &Matrix) -> f64 {
    a.iter().flatten().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;
    use rand::Rng;

    fn power_iteration(a: &Matrix) -> f64 {
        // largest eigenvalue of AᵀA
        let n = a.len();
        let ata: Matrix = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum()).collect())
            .collect();
        let mut v = vec![1.0; n];
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| ata[i][j] * v[j]).sum()).collect();
            let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            lambda = nw;
            v = w.into_iter().map(|x| x / nw).collect();
        }
        lambda.sqrt()
    }

    #[test]
    fn examples() {
        assert!((operator_norm(&vec![vec![1.0, 0.0], vec![0.0, 1.0]]) - 1.0).abs() < 1e-14);
        assert!((operator_norm(&vec![vec![3.0, 0.0], vec![0.0, -4.0]]) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn random_matrices_match_power_iteration() {
        let mut r = rng(7);
        for _ in 0..20 {
            let a: Matrix = (0..3).map(|_| (0..3).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
            let norm = operator_norm(&a);
            assert!((norm - power_iteration(&a)).abs() < 1e-10);
            assert!(norm <= frobenius_sq(&a).sqrt() + 1e-14);
        }
    }
}
