use crate::error::{LabError, Result};

use super::ScalarField;

/// Potential `φ = Δp/p − q/p²` of the factorization `div(p²∇·) + q = p(Δ − φ)p`.
pub fn factorize_elliptic(p: &ScalarField, q: &ScalarField, x: &[f64]) -> Result<f64> {
    let pv = p.eval(x)?;
    if pv == 0.0 {
        return Err(LabError::SingularCoefficient(x.to_vec()));
    }
    Ok(p.laplacian(x)? / pv - q.eval(x)? / (pv * pv))
}

/// `div(p²∇u) + qu` by central differences of the flux `p²∇u`.
pub fn elliptic_operator_direct(p: &ScalarField, q: &ScalarField, u: &ScalarField, x: &[f64], h: f64) -> Result<f64> {
    let mut pt = x.to_vec();
    let mut div = 0.0;
    for k in 0..x.len() {
        let mut flux = |t: f64| -> Result<f64> {
            pt[k] = x[k] + t;
            let pv = p.eval(&pt)?;
            let g = u.gradient(&pt)?[k];
            pt[k] = x[k];
            Ok(pv * pv * g)
        };
        div += (flux(h)? - flux(-h)?) / (2.0 * h);
    }
    Ok(div + q.eval(x)? * u.eval(x)?)
}

/// `p(Δ − φ)(pu)` with `Δ(pu)` from a finite-difference stencil of step `h`.
pub fn elliptic_operator_factorized(p: &ScalarField, q: &ScalarField, u: &ScalarField, x: &[f64], h: f64) -> Result<f64> {
    let phi = factorize_elliptic(p, q, x)?;
    let (pc, uc) = (p.clone(), u.clone());
    let prod = ScalarField::new(x.len(), "p*u", move |y| pc.value(y) * uc.value(y));
    let pv = p.eval(x)?;
    Ok(pv * (prod.fd_laplacian_with_step(x, h)? - phi * pv * u.eval(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::catalog;
    use crate::sampling::points_in_ball;

    #[test]
    fn examples() {
        let one = ScalarField::constant(2, 1.0);
        let q = catalog::by_name("x1x2", 2).unwrap();
        let x = [0.3, -0.2];
        assert!((factorize_elliptic(&one, &q, &x).unwrap() + q.value(&x)).abs() < 1e-15);
        let p = catalog::planar_exponential(vec![1.0, 0.0]);
        let zero = ScalarField::constant(2, 0.0);
        assert!((factorize_elliptic(&p, &zero, &x).unwrap() - 1.0).abs() < 1e-12);
        let p_fd = p.clone().without_derivatives();
        assert!((factorize_elliptic(&p_fd, &zero, &x).unwrap() - 1.0).abs() < 1e-5);
        let minus_lambda = ScalarField::constant(2, -0.7);
        assert!((factorize_elliptic(&one, &minus_lambda, &x).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_coefficient_is_singular() {
        let p = catalog::coordinate(2, 0);
        let q = ScalarField::constant(2, 1.0);
        assert!(matches!(factorize_elliptic(&p, &q, &[0.0, 0.5]), Err(LabError::SingularCoefficient(_))));
    }

    #[test]
    fn factorization_consistency() {
        let p = catalog::planar_exponential(vec![0.5, -0.3]);
        let q = catalog::by_name("x1x2", 2).unwrap();
        let u = catalog::by_name("norm4", 2).unwrap();
        for x in points_in_ball(3, 2, 0.8, 25) {
            let d = elliptic_operator_direct(&p, &q, &u, &x, 1e-4).unwrap();
            let f = elliptic_operator_factorized(&p, &q, &u, &x, 1e-3).unwrap();
            assert!((d - f).abs() < 1e-5 * d.abs().max(1.0), "{d} {f}");
        }
    }
}
