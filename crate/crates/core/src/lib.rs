//! Exact celestial integration on towers of toric models.
//!
//! Scalars are rational functions in a formal variable `m`; classes live in
//! rational Chow rings of simplicial fans; invariants (zeta functions,
//! stringy and Chern–Schwartz–MacPherson classes, Chern numbers) are computed
//! by integrating over resolution towers and pushing down.
//!
//! ```
//! use celeste_core::library::quadrant;
//! use celeste_core::{newton_resolve, zeta_local, Cone, Germ, ResolutionTower};
//!
//! let cusp = Germ::new("cusp", [[3, 0], [0, 2]])?;
//! let tower = newton_resolve(&ResolutionTower::new(quadrant()), &cusp.polygon)?;
//! let z = zeta_local(&tower, &cusp, &Cone::new(vec![0, 1]))?;
//! assert_eq!(z.value.to_string(), "(4m+5)/((m+1)(6m+5))");
//! # Ok::<(), celeste_core::Error>(())
//! ```

pub mod celestial;
pub mod chow;
pub mod error;
pub mod fan;
pub mod invariants;
mod linalg;
pub mod models;
pub mod scalar;

pub use celestial::{
    additivity_check, check_change_of_variables, evaluate_manifestation, integrate, local_value,
    CelestialClass, Report,
};
pub use chow::{
    cycle_class, degree, equal, log_chern, multiply, pullback_divisor, pushforward, total_chern,
    ChowClass, InvariantDivisor,
};
pub use error::{Error, Result};
pub use fan::{library, Cone, Fan, FanData, LatticeVector, StarSubdivision};
pub use invariants::{
    chern_numbers, csm_class, stringy_chern, zeta_global, zeta_local, CsmSet, StringyClass,
    ZetaFunction,
};
pub use models::{
    extend_tower, newton_data, newton_resolve, relative_canonical, resolve, restrict_to_point,
    Atom, ConstructibleSet, Germ, NewtonPolygon, ResolutionTower, ResolvedData, SystemDivisor,
};
pub use scalar::{Scalar, Q};
