//! Reallocation procedures on the unit interval: the equidistant-anchor
//! move, the gap-normalizing sweep `mv_algorithm`, and the coverage
//! repair `cv1_algorithm` built on top of it.

use crate::geometry::{displacement_report, DisplacementReport, Placement1D};
use crate::special::gamma_fn;
use crate::{Error, Real, Result};

/// Gap bounds for the sweep: consecutive sensors are pushed apart to at
/// least `s` and pulled together to at most `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MVParams<R: Real> {
    rho: R,
    s: R,
}

impl<R: Real> MVParams<R> {
    pub fn new(rho: R, s: R) -> Result<Self> {
        if !rho.is_finite() || !(rho > R::zero()) {
            return Err(Error::Invalid(format!("rho must be finite and > 0, got {rho}")));
        }
        if !s.is_finite() || !(s >= R::zero()) {
            return Err(Error::Invalid(format!("s must be finite and >= 0, got {s}")));
        }
        if !(s < rho) {
            return Err(Error::Invalid(format!("need s < rho, got s = {s}, rho = {rho}")));
        }
        Ok(MVParams { rho, s })
    }

    pub fn rho(&self) -> R {
        self.rho
    }

    pub fn s(&self) -> R {
        self.s
    }
}

/// Parameters for `cv1_algorithm` on `n` sensors with sensing radius `r1`,
/// separation `s` and cost exponent `a`. The slack `epsilon = 2·n·r1 − 1`
/// measures how far `r1` sits above the critical radius `1/(2n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CV1Params<R: Real> {
    n: usize,
    r1: R,
    s: R,
    a: R,
    epsilon: R,
}

impl<R: Real> CV1Params<R> {
    pub fn new(n: usize, r1: R, s: R, a: R) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("need at least one sensor".into()));
        }
        if !r1.is_finite() || !(r1 > R::zero()) {
            return Err(Error::Invalid(format!("r1 must be finite and > 0, got {r1}")));
        }
        if !s.is_finite() || !(s >= R::zero()) {
            return Err(Error::Invalid(format!("s must be finite and >= 0, got {s}")));
        }
        if !a.is_finite() || !(a > R::zero()) {
            return Err(Error::Invalid(format!("exponent must be finite and > 0, got {a}")));
        }
        let nr = R::of_usize(n);
        let epsilon = R::of(2.0) * nr * r1 - R::one();
        if !(epsilon > R::zero()) {
            return Err(Error::Invalid(format!(
                "r1 = {r1} does not exceed the critical radius 1/(2n) for n = {n}"
            )));
        }
        if !(s * nr < R::one()) {
            return Err(Error::Invalid(format!(
                "separation s = {s} is not below 1/n for n = {n}"
            )));
        }
        Ok(CV1Params { n, r1, s, a, epsilon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r1(&self) -> R {
        self.r1
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

    /// Target gap handed to the sweep: (1 + ε/2)/n.
    pub fn rho(&self) -> R {
        (R::one() + self.epsilon / R::of(2.0)) / R::of_usize(self.n)
    }
}

/// Which repair branch `cv1_algorithm` took after the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// Rightmost active sensor already covers the right edge.
    A,
    /// Rightmost active sensor so far left that everything is re-spread
    /// onto the equidistant anchors.
    B,
    /// Rightmost active sensor walked to the right edge, pulling its
    /// neighbors along until the gaps close.
    C,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseLabel::A => write!(f, "A"),
            CaseLabel::B => write!(f, "B"),
            CaseLabel::C => write!(f, "C"),
        }
    }
}

/// Output of `mv_algorithm`: the new placement, the net-displacement
/// report, and the a-total of per-sensor path lengths summed over phases
/// (sweep move plus global shift), always ≥ `report.total`.
#[derive(Debug, Clone)]
pub struct MvRun<R: Real> {
    pub placement: Placement1D<R>,
    pub report: DisplacementReport<R>,
    pub phase_total: R,
}

/// Output of `cv1_algorithm`.
#[derive(Debug, Clone)]
pub struct Cv1Run<R: Real> {
    pub placement: Placement1D<R>,
    pub report: DisplacementReport<R>,
    pub phase_total: R,
    pub case: CaseLabel,
}

/// The anchor for sensor `i` (0-based) among `n`: (2i+1)/(2n).
fn anchor<R: Real>(i: usize, n: usize) -> R {
    (R::of(2.0) * R::of_usize(i) + R::one()) / (R::of(2.0) * R::of_usize(n))
}

/// Move every sensor to its rank's equidistant anchor i/n − 1/(2n).
pub fn move_to_anchors_1d<R: Real>(
    p: &Placement1D<R>,
    a: R,
) -> Result<(Placement1D<R>, DisplacementReport<R>)> {
    require_sorted_all_active(p)?;
    let n = p.n();
    let current: Vec<R> = (0..n).map(|i| anchor(i, n)).collect();
    let report = displacement_report(p.initial(), &current, p.active(), a)?;
    let placement = Placement1D::with_state(p.initial().to_vec(), current, p.active().to_vec())?;
    Ok((placement, report))
}

/// Leading term of the expected a-total anchor cost:
/// Γ(a/2+1)/(2^{a/2}(1+a)) · n^{1−a/2}.
pub fn anchor_cost_leading_term<R: Real>(a: R, n: usize) -> R {
    assert!(a.is_finite() && a > R::zero(), "exponent must be > 0");
    assert!(n >= 1, "need n >= 1");
    let two = R::of(2.0);
    let half_a = a / two;
    let c = gamma_fn(half_a + R::one()) / (two.powf(half_a) * (R::one() + a));
    c * R::of_usize(n).powf(R::one() - half_a)
}

fn require_sorted_all_active<R: Real>(p: &Placement1D<R>) -> Result<()> {
    let cur = p.current();
    for i in 1..cur.len() {
        if cur[i] < cur[i - 1] {
            return Err(Error::Invalid(format!(
                "current positions not sorted at index {i}"
            )));
        }
    }
    if !p.active().iter().all(|&f| f) {
        return Err(Error::Invalid("all sensors must be active".into()));
    }
    Ok(())
}

/// The sweep on raw positions. Returns the new positions, active flags,
/// and per-sensor path lengths (distance actually traveled in this call).
pub(crate) fn mv_core<R: Real>(xs: &[R], rho: R, s: R) -> (Vec<R>, Vec<bool>, Vec<R>) {
    let n = xs.len();
    let one = R::one();
    let mut y = xs.to_vec();
    let mut path = vec![R::zero(); n];

    // Left-to-right pass against the already-moved left neighbor; the
    // virtual neighbor of the first sensor is the origin. Too-small gaps
    // are pushed out to s (clamped at the right edge), too-large gaps are
    // pulled in to rho. Order is preserved: each move lands in
    // [prev, prev + max(s, rho)] and at or beyond prev.
    let mut prev = R::zero();
    for i in 0..n {
        let gap = y[i] - prev;
        if gap < s {
            let target = (s + prev).min(one);
            path[i] = target - y[i];
            y[i] = target;
        } else if gap > rho {
            let target = rho + prev;
            path[i] = y[i] - target;
            y[i] = target;
        }
        prev = y[i];
    }

    // Surplus sensors clamped at the right edge stop sensing. If the gap
    // back to the last interior sensor admits the separation s, one edge
    // sensor stays on duty; otherwise the whole pile goes dark.
    let mut active = vec![true; n];
    if y[n - 1] >= one {
        match (0..n).rev().find(|&i| y[i] < one) {
            Some(l0) => {
                let first_off = if one - y[l0] >= s { l0 + 2 } else { l0 + 1 };
                for flag in active.iter_mut().skip(first_off) {
                    *flag = false;
                }
            }
            None => {
                // every sensor clamped at the edge: keep a single one
                for flag in active.iter_mut().skip(1) {
                    *flag = false;
                }
            }
        }
    }

    // Global left shift so the leftmost sensor sits at rho/2; applies to
    // every sensor, deactivated ones included.
    let z = y[0] - rho / R::of(2.0);
    if z > R::zero() {
        for i in 0..n {
            y[i] -= z;
            path[i] += z;
        }
    }

    (y, active, path)
}

/// Normalize consecutive gaps into [s, ρ] by one left-to-right sweep, then
/// shift the whole row so the leftmost sensor sits at ρ/2. Sensors that
/// pile up at the right edge are deactivated (their movement cost is
/// kept). `a` is the cost exponent for the report.
pub fn mv_algorithm<R: Real>(
    p: &Placement1D<R>,
    params: &MVParams<R>,
    a: R,
) -> Result<MvRun<R>> {
    require_sorted_all_active(p)?;
    if !a.is_finite() || !(a > R::zero()) {
        return Err(Error::Invalid(format!("exponent must be finite and > 0, got {a}")));
    }
    let (y, active, path) = mv_core(p.current(), params.rho, params.s);
    let report = displacement_report(p.initial(), &y, &active, a)?;
    let phase_total = path.iter().map(|&d| d.powf(a)).sum();
    let placement = Placement1D::with_state(p.initial().to_vec(), y, active)?;
    Ok(MvRun { placement, report, phase_total })
}

/// Sweep plus right-edge repair on raw positions. Returns positions,
/// active flags, per-sensor path lengths, and the branch taken.
pub(crate) fn cv1_core<R: Real>(
    xs: &[R],
    r1: R,
    s: R,
    a: R,
) -> (Vec<R>, Vec<bool>, Vec<R>, CaseLabel) {
    let n = xs.len();
    let one = R::one();
    let nr = R::of_usize(n);
    let epsilon = R::of(2.0) * nr * r1 - one;
    let rho = (one + epsilon / R::of(2.0)) / nr;

    let (mut y, mut active, mut path) = mv_core(xs, rho, s);

    // Dispatch on the rightmost sensor still on duty. The sweep keeps the
    // active set a prefix, so that is the last true flag.
    let last = active.iter().rposition(|&f| f).expect("at least one active sensor");
    let ylast = y[last];

    let case = if ylast >= one - r1 {
        CaseLabel::A
    } else if ylast <= one - R::of(2.0) * nr.powf(-a / (a + one)) {
        // Re-spread everything onto the equidistant anchors; sensors
        // parked at the edge come back on duty.
        for i in 0..n {
            let target: R = anchor(i, n);
            path[i] += (target - y[i]).abs();
            y[i] = target;
            active[i] = true;
        }
        CaseLabel::B
    } else {
        // Walk the rightmost active sensor to the edge of its sensing
        // range and drag neighbors right until every gap closes to 2·r1.
        let two_r1 = R::of(2.0) * r1;
        let target = one - r1;
        path[last] += target - y[last];
        y[last] = target;
        let mut i = last;
        while i > 0 && y[i] - y[i - 1] > two_r1 {
            let target = y[i] - two_r1;
            path[i - 1] += target - y[i - 1];
            y[i - 1] = target;
            i -= 1;
        }
        CaseLabel::C
    };

    (y, active, path, case)
}

/// Establish (r1, s) coverage & interference on the unit interval: run the
/// gap sweep with ρ = (1+ε/2)/n, then repair the right edge by the first
/// matching branch (A: nothing to do, B: re-spread on anchors, C: drag
/// sensors rightward).
pub fn cv1_algorithm<R: Real>(p: &Placement1D<R>, params: &CV1Params<R>) -> Result<Cv1Run<R>> {
    require_sorted_all_active(p)?;
    if p.n() != params.n {
        return Err(Error::Invalid(format!(
            "params built for n = {}, placement has n = {}",
            params.n,
            p.n()
        )));
    }
    let (y, active, path, case) = cv1_core(p.current(), params.r1, params.s, params.a);
    let report = displacement_report(p.initial(), &y, &active, params.a)?;
    let phase_total = path.iter().map(|&d| d.powf(params.a)).sum();
    let placement = Placement1D::with_state(p.initial().to_vec(), y, active)?;
    Ok(Cv1Run { placement, report, phase_total, case })
}
