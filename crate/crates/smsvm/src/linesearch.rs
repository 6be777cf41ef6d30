//! Exact minimization of `j(s) = a s^2 + b s + mu ||w + s d||_1` over `s >= 0`.
//!
//! `j` is a convex piecewise quadratic: its derivative is affine with slope
//! `2a` between the breakpoints `sigma_i = -w_i / d_i` and jumps upward by
//! `2 mu |d_i|` at each of them. The minimizer is found by binary search over
//! the sorted breakpoints, maintaining a sign bracket on the one-sided slopes,
//! and closed with one exact secant step on the final affine segment — no
//! iterative refinement, no tolerance knobs.

use crate::error::{Error, Result};
use crate::linalg::norm_l1;
use crate::scalar::{cast, Float};

/// Which one-sided slope to evaluate at a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Slope approaching from below.
    Left,
    /// Slope approaching from above.
    Right,
}

/// One kink of `s -> ||w + s d||_1`: the step at which coordinate `index`
/// crosses zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint<F> {
    /// Step value `-w[index] / d[index]`, exactly as computed.
    pub sigma: F,
    /// Coordinate that vanishes at `sigma`.
    pub index: usize,
}

/// The 1-D subproblem: minimize `a s^2 + b s + mu ||w + s d||_1` on `[0, s_max]`.
#[derive(Debug, Clone)]
pub struct LineSearchProblem<'a, F> {
    /// Current point.
    pub w: &'a [F],
    /// Search direction (not all zero).
    pub d: &'a [F],
    /// Quadratic coefficient of the smooth model (`d' H d / 2 >= 0`).
    pub a: F,
    /// Linear coefficient of the smooth model (`g . d`).
    pub b: F,
    /// l1 penalty weight (`>= 0`).
    pub mu: F,
    /// Upper bound of the search interval.
    pub s_max: F,
}

/// Result of the exact line search.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchResult<F> {
    /// Minimizer of `j` over `[0, s_max]`.
    pub s_star: F,
    /// Present iff `s_star` landed exactly on a breakpoint: the coordinate
    /// whose weight crosses zero there, so callers can zero it bitwise.
    pub zero_index: Option<usize>,
    /// One-sided slopes `(left, right)` of `j` at `s_star` (diagnostic).
    pub slopes_at: (F, F),
    /// Number of breakpoint probes spent (bounded by `ceil(log2(r+1)) + 2`).
    pub probes: usize,
}

impl<'a, F: Float> LineSearchProblem<'a, F> {
    /// Builds a problem with the safe default bound
    /// `s_max = (|b| + mu ||d||_1) / (2a)` (infinite when `a = 0`), which
    /// provably contains the unconstrained minimizer.
    pub fn new(w: &'a [F], d: &'a [F], a: F, b: F, mu: F) -> Self {
        let s_max = if a > F::zero() {
            (b.abs() + mu * norm_l1(d)) / (cast::<F>(2.0) * a)
        } else {
            F::infinity()
        };
        Self {
            w,
            d,
            a,
            b,
            mu,
            s_max,
        }
    }

    /// Replaces the search upper bound.
    pub fn with_s_max(mut self, s_max: F) -> Self {
        self.s_max = s_max;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLineSearch { msg });
        if self.w.len() != self.d.len() {
            return bad(format!(
                "w has {} coordinates but d has {}",
                self.w.len(),
                self.d.len()
            ));
        }
        if self.w.is_empty() {
            return bad("empty problem".into());
        }
        if self.w.iter().chain(self.d.iter()).any(|v| !v.is_finite()) {
            return bad("w and d must be finite".into());
        }
        if !(self.a >= F::zero()) || !self.a.is_finite() {
            return bad(format!("a must be finite and >= 0, got {}", self.a));
        }
        if !self.b.is_finite() {
            return bad(format!("b must be finite, got {}", self.b));
        }
        if !(self.mu >= F::zero()) || !self.mu.is_finite() {
            return bad(format!("mu must be finite and >= 0, got {}", self.mu));
        }
        if !(self.s_max >= F::zero()) {
            return bad(format!("s_max must be >= 0, got {}", self.s_max));
        }
        if self.d.iter().all(|&di| di == F::zero()) {
            return bad("direction is identically zero".into());
        }
        Ok(())
    }
}

/// Positive, finite breakpoints `sigma_i = -w_i / d_i` of `s -> ||w + s d||_1`,
/// sorted ascending (ties by coordinate index, duplicates retained).
/// Coordinates with `d_i = 0` contribute no kink; `sigma_i = 0` (already-zero
/// weights) and negative crossings lie outside `s > 0` and are skipped.
pub fn breakpoints<F: Float>(w: &[F], d: &[F]) -> Vec<Breakpoint<F>> {
    let mut bp = Vec::new();
    for (i, (&wi, &di)) in w.iter().zip(d).enumerate() {
        if di == F::zero() {
            continue;
        }
        let sigma = -wi / di;
        if sigma > F::zero() && sigma.is_finite() {
            bp.push(Breakpoint { sigma, index: i });
        }
    }
    bp.sort_unstable_by(|x, y| {
        x.sigma
            .partial_cmp(&y.sigma)
            .expect("breakpoints are finite")
            .then(x.index.cmp(&y.index))
    });
    bp
}

/// Slope contribution of one coordinate at `s`, classified by its crossing
/// step `sigma_i = -w_i / d_i` — the same quotient `breakpoints` sorts on, so
/// every slope agrees exactly with the breakpoint order even when two
/// crossing steps collide up to rounding. `w_i + s d_i = d_i (s - sigma_i)`
/// in exact arithmetic, which gives `|d_i|` once the crossing is passed
/// (including crossings at or left of zero) and `-|d_i|` before it; `side`
/// breaks the tie at `s = sigma_i`.
fn coord_slope<F: Float>(wi: F, di: F, s: F, side: Side) -> F {
    debug_assert!(di != F::zero(), "zero-direction coordinates carry no slope");
    let sigma = -wi / di;
    if sigma == s {
        return match side {
            Side::Right => di.abs(),
            Side::Left => -di.abs(),
        };
    }
    if sigma <= F::zero() || sigma < s {
        di.abs()
    } else {
        // Covers sigma > s and the overflowed quotient +inf (never crossed).
        -di.abs()
    }
}

/// One-sided slope of `j` at `s`:
/// `j'(s, side) = 2 a s + b + mu * sum_i c_i` with `c_i = +/-|d_i|` chosen by
/// whether coordinate `i` has crossed zero at `s` (see `coord_slope`).
pub fn slope_at<F: Float>(p: &LineSearchProblem<'_, F>, s: F, side: Side) -> F {
    let mut t = F::zero();
    for (&wi, &di) in p.w.iter().zip(p.d) {
        if di == F::zero() {
            continue;
        }
        t += coord_slope(wi, di, s, side);
    }
    cast::<F>(2.0) * p.a * s + p.b + p.mu * t
}

/// `(slope_minus, slope_plus)` at the breakpoint group `bp[glo..=ghi]`
/// (entries sharing one `sigma`): the base slope sums `coord_slope` over the
/// other coordinates (non-members never sit exactly at this `sigma`, so the
/// side is immaterial for them), then the group's total jump
/// `mu * sum |d_j|` is applied with either sign.
fn group_slopes<F: Float>(
    p: &LineSearchProblem<'_, F>,
    bp: &[Breakpoint<F>],
    glo: usize,
    ghi: usize,
    sigma: F,
) -> (F, F) {
    let members = &bp[glo..=ghi];
    let mut base = F::zero();
    'coords: for (i, (&wi, &di)) in p.w.iter().zip(p.d).enumerate() {
        if di == F::zero() {
            continue;
        }
        for m in members {
            if m.index == i {
                continue 'coords;
            }
        }
        base += coord_slope(wi, di, sigma, Side::Right);
    }
    let jump: F = members.iter().map(|m| p.d[m.index].abs()).sum();
    let slope0 = cast::<F>(2.0) * p.a * sigma + p.b + p.mu * base;
    (slope0 - p.mu * jump, slope0 + p.mu * jump)
}

/// Expands entry `i` to its maximal run of equal `sigma` values.
fn group_of<F: Float>(bp: &[Breakpoint<F>], i: usize) -> (usize, usize) {
    let sigma = bp[i].sigma;
    let mut lo = i;
    while lo > 0 && bp[lo - 1].sigma == sigma {
        lo -= 1;
    }
    let mut hi = i;
    while hi + 1 < bp.len() && bp[hi + 1].sigma == sigma {
        hi += 1;
    }
    (lo, hi)
}

/// Exact minimizer of `j(s) = a s^2 + b s + mu ||w + s d||_1` over `[0, s_max]`.
///
/// Errors on malformed input and on genuinely unbounded problems
/// (`a = 0` with the slope past the last breakpoint still negative).
pub fn minimize_quadratic_l1<F: Float>(
    p: &LineSearchProblem<'_, F>,
) -> Result<LineSearchResult<F>> {
    p.validate()?;
    let two = cast::<F>(2.0);
    let k_inf = p.b + p.mu * norm_l1(p.d);
    if p.a == F::zero() && k_inf < F::zero() {
        return Err(Error::UnboundedBelow);
    }

    let finish = |s: F, zero_index: Option<usize>, probes: usize| LineSearchResult {
        s_star: s,
        zero_index,
        slopes_at: (slope_at(p, s, Side::Left), slope_at(p, s, Side::Right)),
        probes,
    };

    // Boundary at 0: if j is already nondecreasing to the right, stay put.
    let slope0 = slope_at(p, F::zero(), Side::Right);
    if slope0 >= F::zero() || p.s_max == F::zero() {
        return Ok(finish(F::zero(), None, 0));
    }

    let bp = breakpoints(p.w, p.d);
    let r = bp.len();

    if r == 0 {
        // No kinks for s > 0: j' (s) = 2 a s + slope0, and slope0 < 0 here,
        // so a > 0 (a = 0 would make slope0 = k_inf >= 0, already returned).
        debug_assert!(p.a > F::zero());
        let s = (-slope0 / (two * p.a)).min(p.s_max);
        return Ok(finish(s, None, 0));
    }

    // Slope just past the last breakpoint (every in-range crossing passed).
    let (last_glo, _) = group_of(&bp, r - 1);
    let last_sigma = bp[r - 1].sigma;
    let slope_last_plus = group_slopes(p, &bp, last_glo, r - 1, last_sigma).1;
    let mut probes = 1;
    if slope_last_plus < F::zero() {
        let k_term = slope_last_plus - two * p.a * last_sigma;
        if p.a == F::zero() {
            // Reachable only when a crossing quotient overflowed: the
            // representable tail still descends, so the window boundary is
            // the practical minimizer (or the problem has none).
            if p.s_max.is_finite() {
                return Ok(finish(p.s_max, None, probes));
            }
            return Err(Error::UnboundedBelow);
        }
        let s = (-k_term / (two * p.a)).min(p.s_max);
        return Ok(finish(s, None, probes));
    }
    if slope_last_plus == F::zero() {
        let (glo, _) = group_of(&bp, r - 1);
        let s = last_sigma.min(p.s_max);
        let zi = (s == last_sigma).then_some(bp[glo].index);
        return Ok(finish(s, zi, probes));
    }

    // Binary search over breakpoint entries. Bracket invariant:
    // slope just past position i1 is negative, slope just before i2 positive.
    let mut i1: isize = -1;
    let mut s1 = F::zero();
    let mut sl1 = slope0;
    let mut i2: isize = r as isize;
    let mut s2 = F::infinity();
    let mut sl2 = F::infinity();
    while i2 - i1 > 1 {
        let i = ((i1 + i2) / 2) as usize;
        let (glo, ghi) = group_of(&bp, i);
        let sigma = bp[i].sigma;
        let (slo_minus, slo_plus) = group_slopes(p, &bp, glo, ghi, sigma);
        probes += 1;
        if slo_minus == F::zero()
            || slo_plus == F::zero()
            || (slo_minus < F::zero() && slo_plus > F::zero())
        {
            // The kink itself is a minimizer.
            let s = sigma.min(p.s_max);
            let zi = (s == sigma).then_some(bp[glo].index);
            return Ok(finish(s, zi, probes));
        }
        if slo_plus < F::zero() {
            i1 = ghi as isize;
            s1 = sigma;
            sl1 = slo_plus;
        } else {
            i2 = glo as isize;
            s2 = sigma;
            sl2 = slo_minus;
        }
    }
    // The pre-check on the last breakpoint guarantees the upper bracket was
    // assigned from a real probe before the loop ended.
    debug_assert!((i2 as usize) < r, "upper bracket must be a real breakpoint");
    debug_assert!(sl1 < F::zero() && sl2 > F::zero());

    // j' is affine on (s1, s2); its root is exact.
    let s = (s1 * sl2 - s2 * sl1) / (sl2 - sl1);
    if s == s2 {
        // Rounding pushed the root onto the upper breakpoint: keep the
        // breakpoint convention so the caller can zero the coordinate.
        let (glo, _) = group_of(&bp, i2 as usize);
        let s = s2.min(p.s_max);
        let zi = (s == s2).then_some(bp[glo].index);
        return Ok(finish(s, zi, probes));
    }
    if s == s1 && i1 >= 0 {
        let (glo, _) = group_of(&bp, i1 as usize);
        return Ok(finish(s1, Some(bp[glo].index), probes));
    }
    let s = s.max(F::zero()).min(p.s_max);
    Ok(finish(s, None, probes))
}
