//! Membership grids over the unit interval.
//!
//! A grid holds ordered centers `c_1 < c_2 < … < c_h` in \[0, 1\] and
//! evaluates either triangular membership functions or B-splines of order
//! `q` on them. Both families form a partition of unity: at every point the
//! activations are non-negative, locally supported, and sum to 1. Order-2
//! B-splines coincide with the triangular functions.
//!
//! Inputs outside the center span are clamped onto it before evaluation, so
//! a test-phase value slightly outside the training range still produces a
//! valid activation vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which membership family a grid evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipKind {
    /// Piecewise-linear hat functions with half-triangles at both ends.
    Triangular,
    /// B-splines of order `q` over a clamped knot vector (`q = 2` is
    /// equivalent to [`MembershipKind::Triangular`]).
    BSpline,
}

impl MembershipKind {
    pub fn name(&self) -> &'static str {
        match self {
            MembershipKind::Triangular => "triangular",
            MembershipKind::BSpline => "bspline",
        }
    }
}

impl std::str::FromStr for MembershipKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(MembershipKind::Triangular),
            "bspline" => Ok(MembershipKind::BSpline),
            other => Err(Error::parse(format!(
                "unknown membership kind `{other}` (expected `triangular` or `bspline`)"
            ))),
        }
    }
}

/// An immutable bank of membership functions for one input component.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipGrid {
    centers: Vec<f64>,
    kind: MembershipKind,
    degree: usize,
    /// Knot vector for B-spline evaluation: the centers with the first and
    /// last replicated `degree - 1` extra times. Empty for triangular grids.
    knots: Vec<f64>,
}

/// Builds a triangular grid with `h` centers equally spaced on \[0, 1\],
/// `c_l = (l - 1) / (h - 1)`.
pub fn make_uniform_centers(h: usize) -> Result<MembershipGrid> {
    MembershipGrid::triangular(uniform_centers(h)?)
}

fn uniform_centers(h: usize) -> Result<Vec<f64>> {
    if h < 2 {
        return Err(Error::config(format!("need at least 2 centers, got {h}")));
    }
    let scale = (h - 1) as f64;
    Ok((0..h).map(|l| l as f64 / scale).collect())
}

impl MembershipGrid {
    /// A triangular grid over the given centers.
    pub fn triangular(centers: Vec<f64>) -> Result<Self> {
        Self::new(centers, MembershipKind::Triangular, 2)
    }

    /// A B-spline grid of order `degree` over the given centers.
    pub fn bspline(centers: Vec<f64>, degree: usize) -> Result<Self> {
        Self::new(centers, MembershipKind::BSpline, degree)
    }

    /// A grid with `h` uniform centers of the requested kind. `degree` is
    /// ignored for triangular grids.
    pub fn uniform(h: usize, kind: MembershipKind, degree: usize) -> Result<Self> {
        match kind {
            MembershipKind::Triangular => make_uniform_centers(h),
            MembershipKind::BSpline => Self::bspline(uniform_centers(h)?, degree),
        }
    }

    pub fn new(centers: Vec<f64>, kind: MembershipKind, degree: usize) -> Result<Self> {
        if centers.len() < 2 {
            return Err(Error::config(format!(
                "need at least 2 centers, got {}",
                centers.len()
            )));
        }
        for &c in &centers {
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(Error::config(format!("center {c} outside [0, 1]")));
            }
        }
        if centers.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("centers must be strictly increasing"));
        }
        let degree = match kind {
            MembershipKind::Triangular => 2,
            MembershipKind::BSpline => {
                if degree < 1 {
                    return Err(Error::config("B-spline order must be at least 1"));
                }
                if centers.len() < degree {
                    return Err(Error::config(format!(
                        "B-spline order {degree} needs at least {degree} centers, got {}",
                        centers.len()
                    )));
                }
                degree
            }
        };
        let knots = match kind {
            MembershipKind::Triangular => Vec::new(),
            MembershipKind::BSpline => clamped_knots(&centers, degree),
        };
        Ok(Self {
            centers,
            kind,
            degree,
            knots,
        })
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn kind(&self) -> MembershipKind {
        self.kind
    }

    /// B-spline order `q` (2 for triangular grids).
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of membership functions this grid evaluates: `h` for a
    /// triangular grid with `h` centers, `h + q - 2` for a B-spline grid
    /// over the clamped knot vector.
    pub fn len(&self) -> usize {
        match self.kind {
            MembershipKind::Triangular => self.centers.len(),
            MembershipKind::BSpline => self.knots.len() - self.degree,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest gap between adjacent centers (a Lipschitz scale for the
    /// triangular activations).
    pub fn min_center_gap(&self) -> f64 {
        self.centers
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Clamps `x` onto the center span.
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.centers[0], *self.centers.last().unwrap())
    }

    /// Evaluates all membership functions at `x` (clamped onto the center
    /// span). The result is non-negative and sums to 1.
    pub fn activations(&self, x: f64) -> Vec<f64> {
        match self.kind {
            MembershipKind::Triangular => self.triangular_activations(x),
            MembershipKind::BSpline => self.bspline_activations(x),
        }
    }

    /// Direct piecewise-linear evaluation: `x` lands in one inter-center
    /// segment and splits activation between its two endpoint functions.
    fn triangular_activations(&self, x: f64) -> Vec<f64> {
        let c = &self.centers;
        let x = self.clamp(x);
        let mut out = vec![0.0; c.len()];
        let s = find_span(c, x);
        let gap = c[s + 1] - c[s];
        out[s] = (c[s + 1] - x) / gap;
        out[s + 1] = (x - c[s]) / gap;
        out
    }

    /// Cox–de Boor recursion over the clamped knot vector, starting from
    /// order-1 indicators and elevating in place.
    fn bspline_activations(&self, x: f64) -> Vec<f64> {
        let t = &self.knots;
        let q = self.degree;
        let x = self.clamp(x);
        let mut vals = vec![0.0; t.len() - 1];
        vals[find_span(t, x)] = 1.0;
        for k in 1..q {
            for l in 0..vals.len() - k {
                let mut v = 0.0;
                let d1 = t[l + k] - t[l];
                if d1 > 0.0 {
                    v += (x - t[l]) / d1 * vals[l];
                }
                let d2 = t[l + k + 1] - t[l + 1];
                if d2 > 0.0 {
                    v += (t[l + k + 1] - x) / d2 * vals[l + 1];
                }
                vals[l] = v;
            }
        }
        vals.truncate(t.len() - q);
        vals
    }
}

fn clamped_knots(centers: &[f64], degree: usize) -> Vec<f64> {
    let pad = degree - 1;
    let mut knots = Vec::with_capacity(centers.len() + 2 * pad);
    knots.extend(std::iter::repeat_n(centers[0], pad));
    knots.extend_from_slice(centers);
    knots.extend(std::iter::repeat_n(*centers.last().unwrap(), pad));
    knots
}

/// Index `s` of the knot span containing `x`: half-open `[t_s, t_{s+1})`
/// except at the top of the range, where the last nonempty span is closed.
fn find_span(knots: &[f64], x: f64) -> usize {
    let mut s = knots
        .partition_point(|&v| v <= x)
        .saturating_sub(1)
        .min(knots.len() - 2);
    // x at the top of the range can land on a degenerate padded span; step
    // back to the last nonempty one.
    while s > 0 && knots[s + 1] <= knots[s] {
        s -= 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::XorShift;
    use proptest::prelude::*;

    fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len(), "length mismatch");
        for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
            assert!(
                (a - e).abs() <= tol,
                "component {i}: {a} vs {e} (tol {tol})"
            );
        }
    }

    #[test]
    fn uniform_centers_layout() {
        assert_eq!(make_uniform_centers(2).unwrap().centers(), &[0.0, 1.0]);
        assert_eq!(make_uniform_centers(3).unwrap().centers(), &[0.0, 0.5, 1.0]);
        assert_eq!(
            make_uniform_centers(5).unwrap().centers(),
            &[0.0, 0.25, 0.5, 0.75, 1.0]
        );
    }

    #[test]
    fn uniform_centers_rejects_small_h() {
        assert!(make_uniform_centers(0).is_err());
        assert!(make_uniform_centers(1).is_err());
    }

    #[test]
    fn grid_rejects_bad_centers() {
        assert!(MembershipGrid::triangular(vec![0.0, 0.5, 0.5]).is_err());
        assert!(MembershipGrid::triangular(vec![0.5, 0.0]).is_err());
        assert!(MembershipGrid::triangular(vec![0.0, 1.5]).is_err());
        assert!(MembershipGrid::triangular(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn bspline_rejects_order_above_center_count() {
        assert!(MembershipGrid::bspline(vec![0.0, 0.5, 1.0], 4).is_err());
        assert!(MembershipGrid::bspline(vec![0.0, 0.5, 1.0], 0).is_err());
        assert!(MembershipGrid::bspline(vec![0.0, 0.5, 1.0], 3).is_ok());
    }

    #[test]
    fn triangular_at_center_activates_fully() {
        let grid = make_uniform_centers(3).unwrap();
        assert_close(&grid.activations(0.5), &[0.0, 1.0, 0.0], 0.0);
    }

    #[test]
    fn triangular_midpoint_splits_evenly() {
        let grid = make_uniform_centers(3).unwrap();
        assert_close(&grid.activations(0.25), &[0.5, 0.5, 0.0], 0.0);
    }

    #[test]
    fn triangular_ramp_values() {
        let grid = make_uniform_centers(3).unwrap();
        assert_close(&grid.activations(0.9), &[0.0, 0.2, 0.8], 1e-15);
    }

    #[test]
    fn triangular_end_centers_are_half_triangles() {
        let grid = make_uniform_centers(4).unwrap();
        let at0 = grid.activations(0.0);
        assert_eq!(at0[0], 1.0);
        let at1 = grid.activations(1.0);
        assert_eq!(at1[3], 1.0);
    }

    #[test]
    fn out_of_range_is_clamped() {
        let grid = make_uniform_centers(3).unwrap();
        assert_eq!(grid.activations(-0.3), grid.activations(0.0));
        assert_eq!(grid.activations(1.7), grid.activations(1.0));
    }

    #[test]
    fn bspline_order1_is_an_interval_indicator() {
        let grid = MembershipGrid::bspline(vec![0.0, 0.5, 1.0], 1).unwrap();
        assert_eq!(grid.len(), 2);
        assert_close(&grid.activations(0.3), &[1.0, 0.0], 0.0);
        assert_close(&grid.activations(0.5), &[0.0, 1.0], 0.0);
        assert_close(&grid.activations(1.0), &[0.0, 1.0], 0.0);
    }

    #[test]
    fn bspline_order2_matches_triangular() {
        let mut rng = XorShift::new(0x5eed_0001);
        for _ in 0..1000 {
            let h = 2 + (rng.next_u64() % 7) as usize;
            let centers = rng.centers(h);
            let tri = MembershipGrid::triangular(centers.clone()).unwrap();
            let bsp = MembershipGrid::bspline(centers, 2).unwrap();
            assert_eq!(tri.len(), bsp.len());
            let x = rng.uniform();
            assert_close(&bsp.activations(x), &tri.activations(x), 1e-12);
        }
    }

    #[test]
    fn bspline_order3_partitions_unity() {
        let grid = MembershipGrid::uniform(5, MembershipKind::BSpline, 3).unwrap();
        assert_eq!(grid.len(), 6);
        let sum: f64 = grid.activations(0.5).iter().sum();
        assert!((sum - 1.0).abs() < 1e-12, "sum = {sum}");
    }

    #[test]
    fn local_support_counts() {
        let mut rng = XorShift::new(0x5eed_0002);
        for q in 1..=5usize {
            let grid = MembershipGrid::uniform(7, MembershipKind::BSpline, q).unwrap();
            for _ in 0..200 {
                let nonzero = grid
                    .activations(rng.uniform())
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .count();
                assert!(nonzero <= q, "q={q}: {nonzero} nonzero");
            }
        }
        let tri = make_uniform_centers(7).unwrap();
        for _ in 0..200 {
            let nonzero = tri
                .activations(rng.uniform())
                .iter()
                .filter(|&&v| v > 0.0)
                .count();
            assert!(nonzero <= 2);
        }
    }

    #[test]
    fn lipschitz_continuity() {
        let mut rng = XorShift::new(0x5eed_0003);
        let delta = 1e-6;
        for q in 2..=5usize {
            for kind in [MembershipKind::Triangular, MembershipKind::BSpline] {
                let grid = MembershipGrid::uniform(6, kind, q).unwrap();
                // Triangular slopes are bounded by 1/min-gap; the clamped
                // end splines of order q steepen to (q - 1)/min-gap.
                let lip = match kind {
                    MembershipKind::Triangular => 1.0 / grid.min_center_gap(),
                    MembershipKind::BSpline => (q - 1) as f64 / grid.min_center_gap(),
                };
                for _ in 0..500 {
                    let x = rng.uniform() * (1.0 - delta);
                    let a = grid.activations(x);
                    let b = grid.activations(x + delta);
                    for (va, vb) in a.iter().zip(&b) {
                        assert!(
                            (va - vb).abs() <= lip * delta * (1.0 + 1e-6),
                            "kind {kind:?} q={q}: jump {} > {}",
                            (va - vb).abs(),
                            lip * delta
                        );
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn unity_partition_and_nonnegativity(
            x in 0.0f64..=1.0,
            h in 2usize..9,
            q in 1usize..6,
            bspline in proptest::bool::ANY,
        ) {
            let grid = if bspline {
                MembershipGrid::uniform(h.max(q), MembershipKind::BSpline, q).unwrap()
            } else {
                make_uniform_centers(h).unwrap()
            };
            let acts = grid.activations(x);
            let sum: f64 = acts.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(acts.iter().all(|&v| v >= 0.0));
            prop_assert!(acts.iter().all(|&v| v <= 1.0 + 1e-12));
        }
    }
}
