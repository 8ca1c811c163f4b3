//! p-adic numbers, quadratic extensions, polynomials and power series.

pub mod newton;
pub mod number;
pub mod quad;
pub mod series;

pub use newton::{newton_polygon, NewtonPolygon, PadicPoly};
pub use number::{least_nonresidue, legendre, Padic, PadicDigits, DEFAULT_PRECISION, EXACT};
pub use quad::{hensel_root, padic_sqrt, ExtKind, QuadElem, QuadExt};
pub use series::{mahler_bound_holds, PadicPowerSeries, SeriesDigits, TailBound};
