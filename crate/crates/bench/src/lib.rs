//! Fixed workloads shared by the criterion benchmarks.

use simplex_angles::tables::{AngleTable, JPath};
use simplex_angles::trig::{inner_cdf, TrigPoly};
use simplex_angles::{voronoi_f_vector, FVector, HalfInt, PiExpr};

/// Full `J(n, •, β)` row on a fresh table, so nothing is memoized between runs.
pub fn j_row_cold(n: u32, beta: HalfInt, path: JPath) -> Vec<PiExpr> {
    AngleTable::new().j_row(n, beta, path).expect("admissible parameters")
}

/// Voronoi f-vector on a fresh table.
pub fn voronoi_cold(d: u32) -> FVector {
    voronoi_f_vector(&AngleTable::new(), d).expect("d >= 2")
}

/// Distribution polynomial raised to the power used by the external-angle integrand.
pub fn cdf_power(alpha: i64, power: u32) -> TrigPoly {
    inner_cdf(alpha).expect("alpha >= 0").pow(power)
}
