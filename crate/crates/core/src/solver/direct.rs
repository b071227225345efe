use crate::error::{LabError, Result};
use crate::fields::ScalarField;
use crate::geometry::norm;
use crate::quadrature::{gauss_legendre_squared, green_ball, poisson_kernel, unit_ball_volume, SphereRule};

/// `∫_B G(w, y) f(y) dy` over the unit ball (raw Lebesgue measure), computed
/// in spherical coordinates centred at `w` so that the Newtonian singularity
/// is absorbed by the `ρ^{n−1}` Jacobian. `Δ` of the result is `−f`.
pub fn green_potential_at(source: &ScalarField, w: &[f64], sphere: &SphereRule, radial_nodes: usize) -> Result<f64> {
    let n = w.len();
    let rw = norm(w);
    if rw >= 1.0 {
        return Err(LabError::domain(format!("potential point {w:?} outside the ball")));
    }
    let radial = gauss_legendre_squared(radial_nodes);
    let surface = n as f64 * unit_ball_volume(n);
    let mut total = 0.0;
    let mut y = vec![0.0; n];
    for (theta, wt) in sphere.iter() {
        let wd: f64 = w.iter().zip(theta).map(|(a, b)| a * b).sum();
        let rho_max = -wd + (wd * wd + 1.0 - rw * rw).sqrt();
        let mut line = 0.0;
        for &(t, wr) in &radial {
            let rho = rho_max * t;
            for k in 0..n {
                y[k] = w[k] + rho * theta[k];
            }
            let g = green_ball(n, 1.0, w, &y)?;
            let f = source.eval(&y)?;
            line += wr * g * f * rho.powi(n as i32 - 1);
        }
        total += wt * line * rho_max;
    }
    Ok(surface * total)
}

/// `∫ P_r(w, ζ) g(ζ) dσ(ζ)` scaled by `r^{n−2}`: the harmonic extension to
/// `B_r` of data given on the unit sphere of directions.
pub fn poisson_integral(g: &ScalarField, r: f64, w: &[f64], sphere: &SphereRule) -> Result<f64> {
    let n = w.len();
    let mut acc = 0.0;
    for (z, wz) in sphere.iter() {
        acc += wz * poisson_kernel(n, r, w, z)? * g.value(z);
    }
    Ok(r.powi(n as i32 - 2) * acc)
}
