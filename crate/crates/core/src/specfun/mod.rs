//! Special functions, Gauss quadrature and bracketing root-finding.

mod bessel;
mod hermite;
mod legendre;
mod quadrature;
mod roots;

pub use bessel::{bessel_j, bessel_j0, bessel_j1, bessel_zero, BesselOrder};
pub use hermite::{hermite_functions, HermiteWindow};
pub use legendre::{
    laguerre_eval, legendre_eval, legendre_largest_zero, normalized_associated_legendre,
    OrthogonalPolynomialFamily, PolynomialKind, LEGENDRE_DEGREE_CAP,
};
pub use quadrature::{composite_gauss_legendre, gauss_legendre, QuadratureRule};
pub use roots::find_root;
