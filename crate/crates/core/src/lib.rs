//! Exact expected angle sums of random simplices.
//!
//! The crate evaluates the expected internal and external angle sums of
//! beta and beta' simplices as exact Laurent polynomials in `√π` with
//! rational coefficients, and derives from them
//!
//! * the expected f-vector of the typical Poisson-Voronoi cell,
//! * the limiting f-vector constants for random polytopes in the ball and
//!   on the sphere,
//! * closed forms for the vertex angle sums at `β = ±1/2`.
//!
//! Every exact value can be cross-checked against the [`oracle`] module,
//! which integrates the defining integrals numerically and estimates solid
//! angles by Monte Carlo without touching the symbolic engine.
//!
//! ```
//! use simplex_angles::{AngleTable, HalfInt};
//!
//! let table = AngleTable::new();
//! let j = table.big_j(5, 2, HalfInt::from_int(0)).unwrap();
//! assert_eq!(j.to_string(), "1692197/282240 * pi^-2");
//! ```

pub mod applications;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod tables;
pub mod trig;

pub use applications::{
    closed_j_n1_half, closed_j_n1_minus_half, i_inf_tilde, moller_f0, reitzner_ball,
    reitzner_sphere, voronoi_f_vector, FVector, ReitznerResult,
};
pub use error::{Error, Result};
pub use exact::{c_one, c_tilde_one, gamma_half, GammaProduct, HalfInt, PiExpr, Rational};
pub use tables::{
    arithmetic_structure_check, AngleTable, Family, JPath, Provenance, SimplexFamily,
};
pub use trig::{TrigKind, TrigPoly, TrigTerm};
