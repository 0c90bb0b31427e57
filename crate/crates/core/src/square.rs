//! Reallocation on the unit square: the q×q anchor grid, the row-snapping
//! algorithm `cv2_algorithm`, and the exact anchor-matching cost.

use crate::geometry::{displacement_report, DisplacementReport, Placement2D};
use crate::line::cv1_core;
use crate::matching::{hungarian, CostMatrix};
use crate::{Error, Real, Result};
use rand::Rng;

/// Largest q with q² ≤ n.
pub(crate) fn isqrt(n: usize) -> usize {
    let mut q = (n as f64).sqrt() as usize;
    while (q + 1) * (q + 1) <= n {
        q += 1;
    }
    while q * q > n {
        q -= 1;
    }
    q
}

/// The q×q grid of anchor points (k/q − 1/(2q), l/q − 1/(2q)), 1 ≤ k,l ≤ q,
/// listed with the x index outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAnchors<R: Real> {
    q: usize,
    points: Vec<(R, R)>,
}

impl<R: Real> GridAnchors<R> {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn points(&self) -> &[(R, R)] {
        &self.points
    }
}

/// Midpoint of cell `i` of `q` equal cells of [0,1]: (2i+1)/(2q).
fn cell_center<R: Real>(i: usize, q: usize) -> R {
    (R::of(2.0) * R::of_usize(i) + R::one()) / (R::of(2.0) * R::of_usize(q))
}

pub fn grid_anchors<R: Real>(q: usize) -> Result<GridAnchors<R>> {
    if q == 0 {
        return Err(Error::Invalid("need q >= 1".into()));
    }
    let mut points = Vec::with_capacity(q * q);
    for k in 0..q {
        let x = cell_center(k, q);
        for l in 0..q {
            points.push((x, cell_center(l, q)));
        }
    }
    Ok(GridAnchors { q, points })
}

/// Parameters for `cv2_algorithm` on n sensors: q = ⌊√n⌋ of them are
/// arranged into q rows; `r2` is the square sensing half-side and
/// `epsilon = 2·q·r2 − 1` its slack over the critical value 1/(2q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CV2Params<R: Real> {
    q: usize,
    r2: R,
    s: R,
    a: R,
    epsilon: R,
}

impl<R: Real> CV2Params<R> {
    pub fn new(n: usize, r2: R, s: R, a: R) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("need at least one sensor".into()));
        }
        if !r2.is_finite() || !(r2 > R::zero()) {
            return Err(Error::Invalid(format!("r2 must be finite and > 0, got {r2}")));
        }
        if !s.is_finite() || !(s >= R::zero()) {
            return Err(Error::Invalid(format!("s must be finite and >= 0, got {s}")));
        }
        if !a.is_finite() || !(a > R::zero()) {
            return Err(Error::Invalid(format!("exponent must be finite and > 0, got {a}")));
        }
        let q = isqrt(n);
        let qr = R::of_usize(q);
        let epsilon = R::of(2.0) * qr * r2 - R::one();
        if !(epsilon > R::zero()) {
            return Err(Error::Invalid(format!(
                "r2 = {r2} does not exceed the critical radius 1/(2q) for q = {q}"
            )));
        }
        if !(s * qr < R::one()) {
            return Err(Error::Invalid(format!(
                "separation s = {s} is not below 1/q for q = {q}"
            )));
        }
        Ok(CV2Params { q, r2, s, a, epsilon })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r2(&self) -> R {
        self.r2
    }

    pub fn s(&self) -> R {
        self.s
    }

    pub fn a(&self) -> R {
        self.a
    }

    pub fn epsilon(&self) -> R {
        self.epsilon
    }
}

/// Output of `cv2_algorithm`: the new placement, the net-Euclidean
/// displacement report, and the a-total of per-sensor path lengths summed
/// over both phases (vertical snap plus horizontal row repair).
#[derive(Debug, Clone)]
pub struct Cv2Run<R: Real> {
    pub placement: Placement2D<R>,
    pub report: DisplacementReport<R>,
    pub phase_total: R,
}

/// Establish (r2, s) coverage & interference on the unit square: pick
/// q² sensors at random, snap them into q horizontal rows by ascending
/// y (ties by x then index), then repair each row with the 1D procedure.
/// The n − q² sensors left over are deactivated where they stand.
pub fn cv2_algorithm<R: Real>(
    p: &Placement2D<R>,
    params: &CV2Params<R>,
    rng: &mut impl Rng,
) -> Result<Cv2Run<R>> {
    let n = p.n();
    if !p.active().iter().all(|&f| f) {
        return Err(Error::Invalid("all sensors must be active".into()));
    }
    if isqrt(n) != params.q {
        return Err(Error::Invalid(format!(
            "params built for q = {}, placement has n = {n} (q = {})",
            params.q,
            isqrt(n)
        )));
    }
    let q = params.q;

    let mut chosen = rand::seq::index::sample(rng, n, q * q).into_vec();
    chosen.sort_unstable();

    // ascending y, ties broken by x then by index
    chosen.sort_by(|&i, &j| {
        let (xi, yi) = p.current()[i];
        let (xj, yj) = p.current()[j];
        yi.partial_cmp(&yj)
            .unwrap()
            .then(xi.partial_cmp(&xj).unwrap())
            .then(i.cmp(&j))
    });

    let mut current = p.current().to_vec();
    let mut active = vec![false; n];
    let mut path = vec![R::zero(); n];

    for j in 0..q {
        let row = &mut chosen[j * q..(j + 1) * q];
        let row_y = cell_center(j, q);
        for &idx in row.iter() {
            path[idx] += (current[idx].1 - row_y).abs();
            current[idx].1 = row_y;
        }
        // left-to-right within the row, ties by index
        row.sort_by(|&i, &jdx| {
            let xi = current[i].0;
            let xj = current[jdx].0;
            xi.partial_cmp(&xj).unwrap().then(i.cmp(&jdx))
        });
        let xs: Vec<R> = row.iter().map(|&i| current[i].0).collect();
        let (xs_new, row_active, row_path, _case) = cv1_core(&xs, params.r2, params.s, params.a);
        for (k, &idx) in row.iter().enumerate() {
            current[idx].0 = xs_new[k];
            active[idx] = row_active[k];
            path[idx] += row_path[k];
        }
    }

    let report = displacement_report(p.initial(), &current, &active, params.a)?;
    let phase_total = path.iter().map(|&d| d.powf(params.a)).sum();
    let placement = Placement2D::with_state(p.initial().to_vec(), current, active)?;
    Ok(Cv2Run { placement, report, phase_total })
}

/// Exact optimal a-total cost of matching the placement's sensors to the
/// anchor grid, minimized over all assignments.
pub fn anchor_matching_cost_2d<R: Real>(
    p: &Placement2D<R>,
    anchors: &GridAnchors<R>,
    a: R,
) -> Result<R> {
    let n = p.n();
    let q = anchors.q;
    if n != q * q {
        return Err(Error::Invalid(format!(
            "placement has {n} sensors but the {q}×{q} grid has {}",
            q * q
        )));
    }
    if !a.is_finite() || !(a > R::zero()) {
        return Err(Error::Invalid(format!("exponent must be finite and > 0, got {a}")));
    }
    let cur = p.current();
    let pts = &anchors.points;
    let cost = CostMatrix::from_fn(n, |i, j| {
        let (dx, dy) = (cur[i].0 - pts[j].0, cur[i].1 - pts[j].1);
        (dx * dx + dy * dy).sqrt().powf(a)
    })?;
    let (_, total) = hungarian(&cost)?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{verify_ci_2d, CandIParams};
    use crate::sampling::SeedSpec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn isqrt_exact() {
        assert_eq!(isqrt(1), 1);
        assert_eq!(isqrt(3), 1);
        assert_eq!(isqrt(4), 2);
        assert_eq!(isqrt(8), 2);
        assert_eq!(isqrt(9), 3);
        assert_eq!(isqrt(2500), 50);
        assert_eq!(isqrt(2501), 50);
        // a perfect square large enough for f64 noise to matter
        assert_eq!(isqrt(999_950_884), 31622);
    }

    #[test]
    fn grid_anchor_layout() {
        let g = grid_anchors::<f64>(1).unwrap();
        assert_eq!(g.points(), &[(0.5, 0.5)]);

        let g = grid_anchors::<f64>(2).unwrap();
        assert_eq!(
            g.points(),
            &[(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]
        );

        let g = grid_anchors::<f64>(3).unwrap();
        assert_eq!(g.points().len(), 9);
        let min = g
            .points()
            .iter()
            .flat_map(|&(x, y)| [x, y])
            .fold(f64::INFINITY, f64::min);
        let max = g
            .points()
            .iter()
            .flat_map(|&(x, y)| [x, y])
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(min, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(max, 5.0 / 6.0, epsilon = 1e-15);

        assert!(grid_anchors::<f64>(0).is_err());
    }

    #[test]
    fn grid_anchors_satisfy_critical_ci() {
        for q in [1usize, 2, 5, 9] {
            let g = grid_anchors::<f64>(q).unwrap();
            let p = Placement2D::new(g.points().to_vec()).unwrap();
            let params =
                CandIParams::new(2, 1.0 / (2.0 * q as f64), 1.0 / q as f64).unwrap();
            assert_eq!(verify_ci_2d(&p, &params).unwrap(), None, "q = {q}");
        }
    }

    #[test]
    fn params_validation() {
        assert!(CV2Params::new(0, 0.3, 0.1, 1.0).is_err());
        assert!(CV2Params::new(4, 0.25, 0.1, 1.0).is_err()); // epsilon = 0
        assert!(CV2Params::new(4, 0.3, 0.5, 1.0).is_err()); // s·q = 1
        assert!(CV2Params::new(4, 0.3, 0.1, 0.0).is_err());
        let p = CV2Params::new(5, 0.3, 0.1, 1.0).unwrap();
        assert_eq!(p.q(), 2);
        assert_abs_diff_eq!(p.epsilon(), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn single_sensor_row_snap_and_repair() {
        let p = Placement2D::new(vec![(0.3, 0.9)]).unwrap();
        let params = CV2Params::new(1, 0.6, 0.05, 1.0).unwrap();
        let mut rng = SeedSpec::new(1, 0).rng();
        let run = cv2_algorithm(&p, &params, &mut rng).unwrap();
        // vertical snap to the single row center, horizontal repair walks
        // the sensor to 1 − r2
        assert_eq!(run.placement.current(), &[(0.4, 0.5)]);
        assert!(run.placement.active()[0]);
        let ci = CandIParams::new(2, 0.6, 0.05).unwrap();
        assert_eq!(verify_ci_2d(&run.placement, &ci).unwrap(), None);
        // net √(0.1² + 0.4²), phase 0.1 + 0.4
        assert_abs_diff_eq!(run.report.total, (0.1f64.powi(2) + 0.4f64.powi(2)).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(run.phase_total, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn four_sensors_snap_rows_exactly() {
        let p = Placement2D::new(vec![(0.2, 0.2), (0.7, 0.3), (0.25, 0.8), (0.7, 0.7)])
            .unwrap();
        let params = CV2Params::new(4, 0.3, 0.1, 1.0).unwrap();
        let mut rng = SeedSpec::new(2, 0).rng();
        let run = cv2_algorithm(&p, &params, &mut rng).unwrap();
        assert_eq!(
            run.placement.current(),
            &[(0.2, 0.25), (0.7, 0.25), (0.25, 0.75), (0.7, 0.75)]
        );
        assert!(run.placement.active().iter().all(|&f| f));
        assert_abs_diff_eq!(run.report.total, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(run.phase_total, 0.2, epsilon = 1e-15);
        let ci = CandIParams::new(2, 0.3, 0.1).unwrap();
        assert_eq!(verify_ci_2d(&run.placement, &ci).unwrap(), None);
    }

    #[test]
    fn leftovers_are_deactivated_in_place() {
        let pts = vec![(0.1, 0.1), (0.9, 0.1), (0.1, 0.9), (0.9, 0.9), (0.5, 0.5)];
        let p = Placement2D::new(pts.clone()).unwrap();
        let params = CV2Params::new(5, 0.35, 0.1, 1.0).unwrap();
        let mut rng = SeedSpec::new(3, 7).rng();
        let run = cv2_algorithm(&p, &params, &mut rng).unwrap();
        let inactive: Vec<usize> = (0..5).filter(|&i| !run.placement.active()[i]).collect();
        assert_eq!(inactive.len(), 1);
        let i = inactive[0];
        assert_eq!(run.placement.current()[i], pts[i]);
        assert_eq!(run.report.per_sensor[i], 0.0);
        assert_eq!(run.report.deactivated_count, 1);
        let ci = CandIParams::new(2, 0.35, 0.1).unwrap();
        assert_eq!(verify_ci_2d(&run.placement, &ci).unwrap(), None);
    }

    #[test]
    fn deterministic_under_same_seed() {
        let mut rng = SeedSpec::new(42, 0).rng();
        use rand::Rng;
        let pts: Vec<(f64, f64)> = (0..30).map(|_| (rng.gen(), rng.gen())).collect();
        let p = Placement2D::new(pts).unwrap();
        let params = CV2Params::new(30, 1.2 / 10.0, 0.5 / 5.0, 1.5).unwrap();
        let run1 = cv2_algorithm(&p, &params, &mut SeedSpec::new(7, 3).rng()).unwrap();
        let run2 = cv2_algorithm(&p, &params, &mut SeedSpec::new(7, 3).rng()).unwrap();
        assert_eq!(run1.placement.current(), run2.placement.current());
        assert_eq!(run1.placement.active(), run2.placement.active());
        assert_eq!(run1.report.total, run2.report.total);
    }

    #[test]
    fn random_trials_always_verify() {
        use rand::Rng;
        let mut rng = SeedSpec::new(77, 0).rng();
        for trial in 0..100 {
            let n = 4 + (trial % 60);
            let q = isqrt(n);
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let p = Placement2D::new(pts).unwrap();
            let r2 = 1.2 / (2.0 * q as f64);
            let s = 0.5 / q as f64;
            let params = CV2Params::new(n, r2, s, 1.0).unwrap();
            let run = cv2_algorithm(&p, &params, &mut rng).unwrap();
            let ci = CandIParams::new(2, r2, s).unwrap();
            assert_eq!(
                verify_ci_2d(&run.placement, &ci).unwrap(),
                None,
                "violation at trial {trial}, n = {n}"
            );
            assert!(run.phase_total >= run.report.total - 1e-12);
        }
    }

    #[test]
    fn anchor_cost_zero_on_anchors() {
        let g = grid_anchors::<f64>(3).unwrap();
        let p = Placement2D::new(g.points().to_vec()).unwrap();
        let cost = anchor_matching_cost_2d(&p, &g, 2.0).unwrap();
        assert_abs_diff_eq!(cost, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn anchor_cost_single_point() {
        let g = grid_anchors::<f64>(1).unwrap();
        let p = Placement2D::new(vec![(0.0, 0.0)]).unwrap();
        let cost = anchor_matching_cost_2d(&p, &g, 1.0).unwrap();
        assert_abs_diff_eq!(cost, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn anchor_cost_matches_brute_force() {
        use rand::Rng;
        let mut rng = SeedSpec::new(13, 0).rng();
        let g = grid_anchors::<f64>(2).unwrap();
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = (0..4).map(|_| (rng.gen(), rng.gen())).collect();
            let p = Placement2D::new(pts.clone()).unwrap();
            let got = anchor_matching_cost_2d(&p, &g, 1.5).unwrap();
            // enumerate all 24 assignments
            let mut best = f64::INFINITY;
            let perms = [
                [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2],
                [0, 3, 2, 1], [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0],
                [1, 3, 0, 2], [1, 3, 2, 0], [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3],
                [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0], [3, 0, 1, 2], [3, 0, 2, 1],
                [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
            ];
            for perm in perms {
                let c: f64 = (0..4)
                    .map(|i| {
                        let (dx, dy) = (
                            pts[i].0 - g.points()[perm[i]].0,
                            pts[i].1 - g.points()[perm[i]].1,
                        );
                        (dx * dx + dy * dy).sqrt().powf(1.5)
                    })
                    .sum();
                best = best.min(c);
            }
            assert_abs_diff_eq!(got, best, epsilon = 1e-12);
        }
    }

    #[test]
    fn anchor_cost_rejects_size_mismatch() {
        let g = grid_anchors::<f64>(2).unwrap();
        let p = Placement2D::new(vec![(0.5, 0.5)]).unwrap();
        assert!(anchor_matching_cost_2d(&p, &g, 1.0).is_err());
    }
}
