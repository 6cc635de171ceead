use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::DenseOperator;

/// Eigenvalue of `Σ_i Z_i` on system basis state `s`.
fn total_z(s: usize, n: usize) -> i64 {
    let ones = (s & ((1 << n) - 1)).count_ones() as i64;
    n as i64 - 2 * ones
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("carrier frequency must be positive, got {omega}")));
    }
    Ok(())
}

/// `R H R†` with `R = exp(−itΩ Σ_i Z_i) ⊗ I_B`.
pub fn rotating_frame_transform(h_e: &DenseOperator, omega: f64, t: f64) -> Result<DenseOperator> {
    check_omega(omega)?;
    let space = h_e.space();
    let (n, db) = (space.n_system_qubits(), space.bath_dimension());
    let mut m = h_e.matrix().clone();
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            let dz = (total_z(j / db, n) - total_z(k / db, n)) as f64;
            m[(j, k)] *= Complex64::from_polar(1.0, -omega * t * dz);
        }
    }
    DenseOperator::new(space, m)
}

/// Average of [`rotating_frame_transform`] over one carrier period `2π/Ω`:
/// keeps exactly the entries between states of equal total Z.
pub fn time_average_over_period(h_e: &DenseOperator, omega: f64) -> Result<DenseOperator> {
    check_omega(omega)?;
    let space = h_e.space();
    let (n, db) = (space.n_system_qubits(), space.bath_dimension());
    let mut m = h_e.matrix().clone();
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            if total_z(j / db, n) != total_z(k / db, n) {
                m[(j, k)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    DenseOperator::new(space, m)
}
