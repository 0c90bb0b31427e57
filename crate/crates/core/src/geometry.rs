//! Sensor placement types and the coverage/interference predicates.
//!
//! A configuration satisfies the (r, s) requirement when the sensing
//! regions of the *active* sensors cover the whole unit domain and every
//! pair of active sensors is at least s apart. Sensing regions are the
//! closed interval [y-r, y+r] on the line and the closed axis-aligned
//! square of half-side r on the plane.

use crate::{Error, Real, Result};

/// Absolute tolerance for all geometric comparisons. Boundary-exact
/// configurations (e.g. the equidistant anchors at critical parameters)
/// must verify true despite rounding.
pub const GEOM_TOL: f64 = 1e-12;

fn check_unit<R: Real>(x: R, what: &str, idx: usize) -> Result<()> {
    let tol = R::of(GEOM_TOL);
    if !(x >= -tol && x <= R::one() + tol) {
        return Err(Error::Invalid(format!(
            "{what} position {idx} = {x} outside [0,1]"
        )));
    }
    Ok(())
}

/// Ordered sensor positions on [0, 1]: the initial (sorted) locations, the
/// current locations after reallocation, and per-sensor active flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement1D<R: Real> {
    initial: Vec<R>,
    current: Vec<R>,
    active: Vec<bool>,
}

impl<R: Real> Placement1D<R> {
    /// A fresh placement: current = initial, everything active. `initial`
    /// must be sorted ascending and inside [0, 1].
    pub fn from_sorted(initial: Vec<R>) -> Result<Self> {
        let n = initial.len();
        let active = vec![true; n];
        let current = initial.clone();
        Self::with_state(initial, current, active)
    }

    /// Full-state constructor; validates lengths, ranges and sortedness of
    /// the initial locations.
    pub fn with_state(initial: Vec<R>, current: Vec<R>, active: Vec<bool>) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::Invalid("placement needs at least one sensor".into()));
        }
        if initial.len() != current.len() || initial.len() != active.len() {
            return Err(Error::Invalid(format!(
                "length mismatch: initial {}, current {}, active {}",
                initial.len(),
                current.len(),
                active.len()
            )));
        }
        for (i, &x) in initial.iter().enumerate() {
            check_unit(x, "initial", i)?;
            if i > 0 && x < initial[i - 1] {
                return Err(Error::Invalid(format!(
                    "initial positions not sorted at index {i}"
                )));
            }
        }
        for (i, &y) in current.iter().enumerate() {
            check_unit(y, "current", i)?;
        }
        Ok(Placement1D {
            initial,
            current,
            active,
        })
    }

    pub fn n(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[R] {
        &self.initial
    }

    pub fn current(&self) -> &[R] {
        &self.current
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn deactivated_count(&self) -> usize {
        self.active.iter().filter(|a| !**a).count()
    }
}

/// Sensor points in the unit square with active flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement2D<R: Real> {
    initial: Vec<(R, R)>,
    current: Vec<(R, R)>,
    active: Vec<bool>,
}

impl<R: Real> Placement2D<R> {
    pub fn new(initial: Vec<(R, R)>) -> Result<Self> {
        let active = vec![true; initial.len()];
        let current = initial.clone();
        Self::with_state(initial, current, active)
    }

    pub fn with_state(
        initial: Vec<(R, R)>,
        current: Vec<(R, R)>,
        active: Vec<bool>,
    ) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::Invalid("placement needs at least one sensor".into()));
        }
        if initial.len() != current.len() || initial.len() != active.len() {
            return Err(Error::Invalid(format!(
                "length mismatch: initial {}, current {}, active {}",
                initial.len(),
                current.len(),
                active.len()
            )));
        }
        for (i, &(x, y)) in initial.iter().chain(current.iter()).enumerate() {
            let idx = i % initial.len();
            check_unit(x, "point.x", idx)?;
            check_unit(y, "point.y", idx)?;
        }
        Ok(Placement2D {
            initial,
            current,
            active,
        })
    }

    pub fn n(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[(R, R)] {
        &self.initial
    }

    pub fn current(&self) -> &[(R, R)] {
        &self.current
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn deactivated_count(&self) -> usize {
        self.active.iter().filter(|a| !**a).count()
    }
}

/// Parameters of the coverage/interference requirement: dimension m,
/// sensing radius r (half-width on the line, half-side on the square) and
/// minimum pairwise separation s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandIParams<R: Real> {
    pub m: u8,
    pub r: R,
    pub s: R,
}

impl<R: Real> CandIParams<R> {
    pub fn new(m: u8, r: R, s: R) -> Result<Self> {
        if m != 1 && m != 2 {
            return Err(Error::Invalid(format!("dimension m must be 1 or 2, got {m}")));
        }
        if !(r > R::zero()) || !r.is_finite() {
            return Err(Error::Invalid(format!("sensing radius must be > 0, got {r}")));
        }
        if !(s >= R::zero()) || !s.is_finite() {
            return Err(Error::Invalid(format!("separation must be >= 0, got {s}")));
        }
        Ok(CandIParams { m, r, s })
    }
}

/// Witness for a failed coverage/interference check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CiViolation<R: Real> {
    CoverageGap1D { point: R },
    Interference1D { i: usize, j: usize, yi: R, yj: R },
    CoverageGap2D { point: (R, R) },
    Interference2D { i: usize, j: usize, pi: (R, R), pj: (R, R) },
}

impl<R: Real> std::fmt::Display for CiViolation<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CiViolation::CoverageGap1D { point } => write!(f, "uncovered point {point}"),
            CiViolation::Interference1D { i, j, yi, yj } => write!(
                f,
                "active sensors {i} (at {yi}) and {j} (at {yj}) closer than s"
            ),
            CiViolation::CoverageGap2D { point } => {
                write!(f, "uncovered point ({}, {})", point.0, point.1)
            }
            CiViolation::Interference2D { i, j, pi, pj } => write!(
                f,
                "active sensors {i} at ({}, {}) and {j} at ({}, {}) closer than s",
                pi.0, pi.1, pj.0, pj.1
            ),
        }
    }
}

/// Check the (r, s) requirement on the line. Returns `None` when satisfied,
/// otherwise the first violation found: interference between the closest
/// offending pair, or the leftmost coverage gap.
pub fn verify_ci_1d<R: Real>(
    p: &Placement1D<R>,
    params: &CandIParams<R>,
) -> Result<Option<CiViolation<R>>> {
    if params.m != 1 {
        return Err(Error::Invalid(format!(
            "verify_ci_1d needs m = 1 params, got m = {}",
            params.m
        )));
    }
    let tol = R::of(GEOM_TOL);
    for (i, &y) in p.current.iter().enumerate() {
        check_unit(y, "current", i)?;
    }

    let mut act: Vec<(usize, R)> = p
        .active
        .iter()
        .zip(p.current.iter())
        .enumerate()
        .filter_map(|(i, (a, y))| if *a { Some((i, *y)) } else { None })
        .collect();
    act.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());

    // separation clause: in 1D it is enough to look at sorted neighbours
    for w in act.windows(2) {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        if yj - yi < params.s - tol {
            return Ok(Some(CiViolation::Interference1D { i, j, yi, yj }));
        }
    }

    // coverage clause: walk the sorted intervals [y-r, y+r]
    let mut cov = R::zero();
    for &(_, y) in &act {
        if y - params.r > cov + tol {
            let gap_mid = R::of(0.5) * (cov + (y - params.r));
            return Ok(Some(CiViolation::CoverageGap1D { point: gap_mid }));
        }
        cov = cov.max(y + params.r);
    }
    if cov < R::one() - tol {
        let gap_mid = R::of(0.5) * (cov + R::one());
        return Ok(Some(CiViolation::CoverageGap1D { point: gap_mid }));
    }
    Ok(None)
}

/// Check the (r, s) requirement on the unit square. Coverage is decided by
/// a strip sweep: between consecutive distinct y-extents of the active
/// squares the covered x-set is constant, so each strip reduces to a 1D
/// interval-cover check.
pub fn verify_ci_2d<R: Real>(
    p: &Placement2D<R>,
    params: &CandIParams<R>,
) -> Result<Option<CiViolation<R>>> {
    if params.m != 2 {
        return Err(Error::Invalid(format!(
            "verify_ci_2d needs m = 2 params, got m = {}",
            params.m
        )));
    }
    let tol = R::of(GEOM_TOL);
    for (i, &(x, y)) in p.current.iter().enumerate() {
        check_unit(x, "current.x", i)?;
        check_unit(y, "current.y", i)?;
    }

    let act: Vec<(usize, (R, R))> = p
        .active
        .iter()
        .zip(p.current.iter())
        .enumerate()
        .filter_map(|(i, (a, q))| if *a { Some((i, *q)) } else { None })
        .collect();

    // separation clause via a sweep over x-sorted sensors: pairs further
    // than s apart in x alone cannot violate it
    let mut by_x: Vec<(usize, (R, R))> = act.clone();
    by_x.sort_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap());
    for i in 0..by_x.len() {
        let (ii, (xi, yi)) = by_x[i];
        for &(jj, (xj, yj)) in by_x.iter().skip(i + 1) {
            if xj - xi >= params.s - tol {
                break;
            }
            let d = ((xj - xi) * (xj - xi) + (yj - yi) * (yj - yi)).sqrt();
            if d < params.s - tol {
                let (i0, j0) = if ii < jj { (ii, jj) } else { (jj, ii) };
                let (pi, pj) = if ii < jj {
                    ((xi, yi), (xj, yj))
                } else {
                    ((xj, yj), (xi, yi))
                };
                return Ok(Some(CiViolation::Interference2D {
                    i: i0,
                    j: j0,
                    pi,
                    pj,
                }));
            }
        }
    }

    // coverage clause
    if act.is_empty() {
        return Ok(Some(CiViolation::CoverageGap2D {
            point: (R::of(0.5), R::of(0.5)),
        }));
    }
    let mut cuts: Vec<R> = vec![R::zero(), R::one()];
    for &(_, (_, y)) in &act {
        for v in [y - params.r, y + params.r] {
            if v > R::zero() && v < R::one() {
                cuts.push(v);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    for w in cuts.windows(2) {
        let (y1, y2) = (w[0], w[1]);
        if y2 <= y1 {
            continue;
        }
        let my = R::of(0.5) * (y1 + y2);
        // x-intervals of squares spanning this strip
        let mut xiv: Vec<(R, R)> = act
            .iter()
            .filter(|&&(_, (_, y))| y - params.r <= my + tol && y + params.r >= my - tol)
            .map(|&(_, (x, _))| (x - params.r, x + params.r))
            .collect();
        xiv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut cov = R::zero();
        let mut witness: Option<R> = None;
        for &(xl, xr) in &xiv {
            if xl > cov + tol {
                witness = Some(R::of(0.5) * (cov + xl));
                break;
            }
            cov = cov.max(xr);
        }
        if witness.is_none() && cov < R::one() - tol {
            witness = Some(R::of(0.5) * (cov + R::one()));
        }
        if let Some(px) = witness {
            return Ok(Some(CiViolation::CoverageGap2D { point: (px, my) }));
        }
    }
    Ok(None)
}

/// Per-sensor net displacements and the a-total cost Σ dᵢᵃ of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementReport<R: Real> {
    pub per_sensor: Vec<R>,
    pub a: R,
    pub total: R,
    pub deactivated_count: usize,
}

/// Distance measure a sensor position type supports.
pub trait Point<R: Real>: Copy {
    fn dist(self, other: Self) -> R;
}

impl<R: Real> Point<R> for R {
    fn dist(self, other: Self) -> R {
        (self - other).abs()
    }
}

impl<R: Real> Point<R> for (R, R) {
    fn dist(self, other: Self) -> R {
        let dx = self.0 - other.0;
        let dy = self.1 - other.1;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Net-displacement report: dᵢ = distance(initial_i, final_i). Deactivated
/// sensors keep the cost they already incurred; the flags only feed the
/// deactivated count.
pub fn displacement_report<R: Real, P: Point<R>>(
    initial: &[P],
    final_pos: &[P],
    active: &[bool],
    a: R,
) -> Result<DisplacementReport<R>> {
    if initial.len() != final_pos.len() || initial.len() != active.len() {
        return Err(Error::Invalid(format!(
            "length mismatch: initial {}, final {}, active {}",
            initial.len(),
            final_pos.len(),
            active.len()
        )));
    }
    if !(a > R::zero()) {
        return Err(Error::Invalid(format!("exponent a must be > 0, got {a}")));
    }
    let per_sensor: Vec<R> = initial
        .iter()
        .zip(final_pos.iter())
        .map(|(&p, &q)| p.dist(q))
        .collect();
    let total = per_sensor.iter().map(|&d| d.powf(a)).sum();
    Ok(DisplacementReport {
        per_sensor,
        a,
        total,
        deactivated_count: active.iter().filter(|x| !**x).count(),
    })
}
