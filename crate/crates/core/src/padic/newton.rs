//! Newton polygons of p-adic polynomials.

use num_rational::Ratio;

use crate::field::Poly;

use super::number::Padic;

pub type PadicPoly = Poly<Padic>;

/// Lower convex hull of the points `(i, v(c_i))`.
///
/// Roots at zero (a run of vanishing low coefficients) are kept apart in
/// `zero_roots`; the hull starts at the first nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, i64)>,
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Segments as `(slope, horizontal length)`, slopes non-decreasing.
    pub fn segments(&self) -> Vec<(Ratio<i64>, i64)> {
        self.vertices
            .windows(2)
            .map(|w| {
                let len = w[1].0 - w[0].0;
                (Ratio::new(w[1].1 - w[0].1, len), len)
            })
            .collect()
    }

    /// Root valuations with multiplicities; a segment of slope `-s` and length
    /// `l` accounts for `l` roots of valuation `s`. Roots at zero are omitted.
    pub fn root_valuations(&self) -> Vec<(Ratio<i64>, i64)> {
        self.segments().into_iter().map(|(s, l)| (-s, l)).collect()
    }

    /// Number of roots (with multiplicity, in an algebraic closure) of
    /// valuation at least `bound`, roots at zero included.
    pub fn roots_with_valuation_at_least(&self, bound: Ratio<i64>) -> usize {
        self.zero_roots
            + self
                .root_valuations()
                .into_iter()
                .filter(|(v, _)| *v >= bound)
                .map(|(_, l)| l as usize)
                .sum::<usize>()
    }
}

/// Newton polygon of a nonzero polynomial. Coefficients that are zero at
/// their precision are treated as absent.
pub fn newton_polygon(f: &PadicPoly) -> NewtonPolygon {
    let pts: Vec<(i64, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v)))
        .collect();
    let zero_roots = pts.first().map(|&(i, _)| i as usize).unwrap_or(0);
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b when it lies on or above the segment a -> pt.
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    NewtonPolygon { vertices: hull, zero_roots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64], p: u64) -> PadicPoly {
        Poly::new(c.iter().map(|&n| Padic::from_int(n, p, 20)).collect())
    }

    #[test]
    fn x_squared_minus_seven_x() {
        // Roots 0 and 7.
        let np = newton_polygon(&poly(&[0, -7, 1], 7));
        assert_eq!(np.zero_roots, 1);
        assert_eq!(np.root_valuations(), vec![(Ratio::from_integer(1), 1)]);
        assert_eq!(np.roots_with_valuation_at_least(Ratio::from_integer(0)), 2);
    }

    #[test]
    fn linear_has_slope_zero() {
        let np = newton_polygon(&poly(&[-1, 1], 7));
        assert_eq!(np.segments(), vec![(Ratio::from_integer(0), 1)]);
    }

    #[test]
    fn seven_plus_x_plus_seven_x_squared() {
        let np = newton_polygon(&poly(&[7, 1, 7], 7));
        assert_eq!(
            np.segments(),
            vec![(Ratio::from_integer(-1), 1), (Ratio::from_integer(1), 1)]
        );
        assert_eq!(np.roots_with_valuation_at_least(Ratio::from_integer(0)), 1);
    }

    #[test]
    fn collinear_points_merge() {
        let np = newton_polygon(&poly(&[49, 7, 1], 7));
        assert_eq!(np.vertices, vec![(0, 2), (2, 0)]);
        assert_eq!(np.root_valuations(), vec![(Ratio::from_integer(1), 2)]);
    }
}
