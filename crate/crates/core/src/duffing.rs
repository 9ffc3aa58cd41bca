//! The cubic-quintic oscillator `ẍ = ax − bx³ − cx⁵ + f(t)`, its conserved
//! energy, homoclinic orbit and Melnikov function, driven by a bounded signal
//! built from an orbit of the map.

use num_bigint::BigUint;
use thiserror::Error;

use crate::map::{ln_big, step};

pub const BLOWUP_LIMIT: f64 = 1e6;
/// Relative size of the neglected tails in [`melnikov`].
pub const MELNIKOV_TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DuffingError {
    #[error("degenerate parameters: need c ≠ 0 and b² + 4ac > 0")]
    DegenerateParams,
    #[error("x0 = {x0} lies outside the separatrix")]
    OutsideSeparatrix { x0: f64 },
    #[error("homoclinic profile undefined at t = {t}")]
    InvalidProfile { t: f64 },
    #[error("Melnikov tails above tolerance at T = {t_max}")]
    NonConvergent { t_max: f64 },
    #[error("|x| exceeded {BLOWUP_LIMIT} at t = {t}")]
    Blowup { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub gamma: f64,
    pub delta_damp: f64,
    pub omega: f64,
    pub a_amp: f64,
    pub lambda: f64,
    pub k: f64,
}

impl Default for DuffingParams {
    /// `a = b = c = 1`, `γ = 0.3`, `δ = 0.1`, `ω = 1`, profile matched to the
    /// separatrix of these coefficients.
    fn default() -> Self {
        Self::with_coefficients(1.0, 1.0, 1.0)
    }
}

impl DuffingParams {
    /// Given coefficients, default forcing, and the matched profile when one exists.
    pub fn with_coefficients(a: f64, b: f64, c: f64) -> Self {
        let mut p = Self {
            a,
            b,
            c,
            gamma: 0.3,
            delta_damp: 0.1,
            omega: 1.0,
            a_amp: 1.0,
            lambda: 0.0,
            k: 1.0,
        };
        if let Some((a_amp, lambda, k)) = p.matched_profile() {
            p.a_amp = a_amp;
            p.lambda = lambda;
            p.k = k;
        }
        p
    }

    /// `(A, λ, k)` making the profile an exact solution of the unforced
    /// equation on the zero-energy level. Writing `x² = 1/z` turns the energy
    /// relation into `ż² = 4az² − 2bz − 4c/3`, solved by `z = α + β cosh(2√a t)`.
    pub fn matched_profile(&self) -> Option<(f64, f64, f64)> {
        let (a, b, c) = (self.a, self.b, self.c);
        if a <= 0.0 {
            return None;
        }
        let alpha = b / (4.0 * a);
        let beta_sq = b * b / (16.0 * a * a) + c / (3.0 * a);
        if beta_sq <= 0.0 {
            return None;
        }
        let beta = beta_sq.sqrt();
        let lambda = (alpha - beta) / (2.0 * beta);
        (lambda > -1.0).then(|| (1.0 / (2.0 * beta).sqrt(), lambda, a))
    }

    pub fn discriminant(&self) -> f64 {
        self.b * self.b + 4.0 * self.a * self.c
    }

    /// `−ax + bx³ + cx⁵`, the derivative of the potential.
    pub fn restoring(&self, x: f64) -> f64 {
        let x2 = x * x;
        x * (-self.a + x2 * (self.b + self.c * x2))
    }

    fn potential_curvature(&self, x: f64) -> f64 {
        let x2 = x * x;
        -self.a + 3.0 * self.b * x2 + 5.0 * self.c * x2 * x2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Center,
    Saddle,
    Degenerate,
}

/// Rest points on `v = 0`, ascending in `x`.
pub fn equilibria(p: &DuffingParams) -> Result<Vec<(f64, Stability)>, DuffingError> {
    let delta = p.discriminant();
    if p.c == 0.0 || delta <= 0.0 {
        return Err(DuffingError::DegenerateParams);
    }
    let classify = |x: f64| {
        let curvature = p.potential_curvature(x);
        if curvature > 0.0 {
            Stability::Center
        } else if curvature < 0.0 {
            Stability::Saddle
        } else {
            Stability::Degenerate
        }
    };
    let mut out = vec![(0.0, classify(0.0))];
    // (−b + √Δ)/(2c) without cancellation
    let root = delta.sqrt();
    let u = if p.b >= 0.0 {
        2.0 * p.a / (p.b + root)
    } else {
        (root - p.b) / (2.0 * p.c)
    };
    if u > 0.0 {
        let x = u.sqrt();
        out.insert(0, (-x, classify(-x)));
        out.push((x, classify(x)));
    }
    Ok(out)
}

/// `K = ½v² − ½ax² + ¼bx⁴ + ⅙cx⁶`.
pub fn energy(p: &DuffingParams, x: f64, v: f64) -> f64 {
    let x2 = x * x;
    0.5 * v * v + x2 * (-0.5 * p.a + x2 * (0.25 * p.b + p.c * x2 / 6.0))
}

/// Nonnegative `v` with `energy(x0, v) = 0`.
pub fn separatrix_velocity(p: &DuffingParams, x0: f64) -> Result<f64, DuffingError> {
    let x2 = x0 * x0;
    let radicand = (6.0 * p.a - 3.0 * p.b * x2 - 2.0 * p.c * x2 * x2) / 6.0;
    if radicand < 0.0 {
        return Err(DuffingError::OutsideSeparatrix { x0 });
    }
    Ok(x0.abs() * radicand.sqrt())
}

/// Largest `x > 0` on the separatrix, where it crosses `v = 0`.
pub fn separatrix_crossing(p: &DuffingParams) -> Result<f64, DuffingError> {
    // 2c u² + 3b u − 6a = 0 with u = x²
    let disc = 9.0 * p.b * p.b + 48.0 * p.a * p.c;
    if p.c == 0.0 || disc < 0.0 || p.a <= 0.0 {
        return Err(DuffingError::DegenerateParams);
    }
    let u = 12.0 * p.a / (3.0 * p.b + disc.sqrt());
    Ok(u.sqrt())
}

fn sech(u: f64) -> f64 {
    let e = (-u.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// `x⁰(t) = A sech(√k t)/√(1 + λ sech²(√k t))` and its time derivative.
pub fn homoclinic_profile(p: &DuffingParams, t: f64) -> Result<(f64, f64), DuffingError> {
    if p.k <= 0.0 {
        return Err(DuffingError::InvalidProfile { t });
    }
    let rk = p.k.sqrt();
    let s = sech(rk * t);
    let d = 1.0 + p.lambda * s * s;
    if d <= 0.0 {
        return Err(DuffingError::InvalidProfile { t });
    }
    let x = p.a_amp * s / d.sqrt();
    let v = -p.a_amp * rk * s * (rk * t).tanh() / (d * d.sqrt());
    Ok((x, v))
}

fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson_step(f, a, fa, m, fm);
    let (rm, frm, right) = simpson_step(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth - 1)
        + adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson on `[a, b]`, split into unit-ish panels first so
/// oscillating integrands are resolved.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let panels = ((b - a).abs().ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            let (flo, fhi) = (f(lo), f(hi));
            let (m, fm, whole) = simpson_step(f, lo, flo, hi, fhi);
            adaptive_simpson_rec(f, lo, flo, hi, fhi, m, fm, whole, eps / panels as f64, 40)
        })
        .sum()
}

/// `M(t₀) = ∫ ẋ⁰(t)[γ cos ω(t+t₀) − δ ẋ⁰(t)] dt` over the whole line.
///
/// The window `[−T, T]` doubles from `10/√k` until the tails, bounded by
/// `∫|ẋ⁰|(|γ| + |δ||ẋ⁰|)` beyond `T`, fall below [`MELNIKOV_TAIL_TOLERANCE`]
/// relative to the integral.
pub fn melnikov(p: &DuffingParams, t0: f64) -> Result<f64, DuffingError> {
    homoclinic_profile(p, 0.0)?;
    let velocity = |t: f64| homoclinic_profile(p, t).map(|(_, v)| v).unwrap_or(f64::NAN);
    let integrand = |t: f64| {
        let v = velocity(t);
        v * (p.gamma * (p.omega * (t + t0)).cos() - p.delta_damp * v)
    };
    let envelope = |t: f64| {
        let v = velocity(t).abs();
        v * (p.gamma.abs() + p.delta_damp.abs() * v)
    };
    let rk = p.k.sqrt();
    let t_max = 200.0 / rk;
    let mut t = 10.0 / rk;
    loop {
        let t_eff = t.min(t_max);
        let value = integrate(&integrand, -t_eff, t_eff, 1e-13);
        if !value.is_finite() {
            return Err(DuffingError::InvalidProfile { t: t_eff });
        }
        let scale = integrate(&envelope, -t_eff, t_eff, 1e-13);
        let tail = 2.0 * integrate(&envelope, t_eff, 2.0 * t_eff, 1e-16);
        if tail <= MELNIKOV_TAIL_TOLERANCE * value.abs().max(scale * 1e-6) || tail == 0.0 {
            return Ok(value);
        }
        if t_eff >= t_max {
            return Err(DuffingError::NonConvergent { t_max });
        }
        t *= 2.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingTransform {
    /// `+1` on even iterates, `−1` on odd ones.
    ParitySign,
    /// `ln(1 + value)` divided by its maximum over the window, in `[0, 1]`.
    LogScaled,
}

/// Piecewise-constant forcing: level `r` holds on `[r·hold_time, (r+1)·hold_time)`
/// and the signal is zero after the last level.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSignal {
    pub levels: Vec<f64>,
    pub hold_time: f64,
}

impl ForcingSignal {
    pub fn none() -> Self {
        Self {
            levels: Vec::new(),
            hold_time: f64::INFINITY,
        }
    }

    /// Levels from `f^r(n)` for `r = 0..count`.
    pub fn from_orbit(
        n: &BigUint,
        count: usize,
        transform: ForcingTransform,
        hold_time: f64,
    ) -> Result<Self, DuffingError> {
        if !(hold_time > 0.0 && hold_time.is_finite()) {
            return Err(DuffingError::InvalidArgument("hold_time must be positive"));
        }
        let mut value = n.clone();
        let mut raw = Vec::with_capacity(count);
        for _ in 0..count {
            raw.push(match transform {
                ForcingTransform::ParitySign => {
                    if value.bit(0) {
                        -1.0
                    } else {
                        1.0
                    }
                }
                ForcingTransform::LogScaled => ln_big(&(&value + 1u32)),
            });
            value = step(&value);
        }
        if transform == ForcingTransform::LogScaled {
            let max = raw.iter().copied().fold(0.0, f64::max);
            if max > 0.0 {
                raw.iter_mut().for_each(|x| *x /= max);
            }
        }
        Ok(Self {
            levels: raw,
            hold_time,
        })
    }

    pub fn level(&self, segment: usize) -> f64 {
        self.levels.get(segment).copied().unwrap_or(0.0)
    }

    pub fn at(&self, t: f64) -> f64 {
        if self.levels.is_empty() || t < 0.0 {
            return 0.0;
        }
        self.level((t / self.hold_time).floor() as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

fn rk4(p: &DuffingParams, x: f64, v: f64, force: f64, h: f64) -> (f64, f64) {
    let acc = |x: f64| -p.restoring(x) + force;
    let (k1x, k1v) = (v, acc(x));
    let (k2x, k2v) = (v + 0.5 * h * k1v, acc(x + 0.5 * h * k1x));
    let (k3x, k3v) = (v + 0.5 * h * k2v, acc(x + 0.5 * h * k2x));
    let (k4x, k4v) = (v + h * k3v, acc(x + h * k3x));
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Classical RK4 with steps of at most `dt`, shortened so that every hold
/// boundary of the forcing is hit exactly. Returns every step, starting at `t = 0`.
pub fn simulate(
    p: &DuffingParams,
    forcing: &ForcingSignal,
    t_end: f64,
    dt: f64,
    x0: f64,
    v0: f64,
) -> Result<Vec<TrajectoryPoint>, DuffingError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DuffingError::InvalidArgument("dt must be positive"));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(DuffingError::InvalidArgument("t_end must be nonnegative"));
    }
    let mut out = Vec::with_capacity((t_end / dt) as usize + 2);
    let (mut x, mut v) = (x0, v0);
    out.push(TrajectoryPoint { t: 0.0, x, v });
    let mut segment = 0usize;
    let mut seg_start = 0.0;
    while seg_start < t_end {
        let boundary = (segment + 1) as f64 * forcing.hold_time;
        let seg_end = if boundary.is_finite() {
            boundary.min(t_end)
        } else {
            t_end
        };
        let force = if forcing.levels.is_empty() {
            0.0
        } else {
            forcing.level(segment)
        };
        let steps = ((seg_end - seg_start) / dt - 1e-9).ceil().max(1.0) as usize;
        let h = (seg_end - seg_start) / steps as f64;
        for i in 1..=steps {
            (x, v) = rk4(p, x, v, force, h);
            if !(x.abs() <= BLOWUP_LIMIT) || !v.is_finite() {
                return Err(DuffingError::Blowup {
                    t: seg_start + h * i as f64,
                });
            }
            let t = if i == steps {
                seg_end
            } else {
                seg_start + h * i as f64
            };
            out.push(TrajectoryPoint { t, x, v });
        }
        seg_start = seg_end;
        segment += 1;
    }
    Ok(out)
}

/// `(x, v)` pairs for plotting.
pub fn phase_portrait(points: &[TrajectoryPoint]) -> Vec<(f64, f64)> {
    points.iter().map(|pt| (pt.x, pt.v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winding {
    /// Circles neither center.
    Neither,
    /// Circles only the center on this side (`−1` or `+1`).
    OneCenter(i8),
    BothCenters,
}

/// Net turns of the curve around `(cx, 0)`.
pub fn turns_around(points: &[(f64, f64)], cx: f64) -> f64 {
    let angles = points.iter().map(|&(x, v)| v.atan2(x - cx));
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for a in angles {
        if let Some(p) = prev {
            let mut d = a - p;
            if d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            } else if d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            total += d;
        }
        prev = Some(a);
    }
    total / (2.0 * std::f64::consts::PI)
}

/// Which centers the trajectory circles, counting a center once the curve
/// completes at least 0.9 of a turn around it.
pub fn classify_winding(
    p: &DuffingParams,
    points: &[TrajectoryPoint],
) -> Result<Winding, DuffingError> {
    let centers: Vec<f64> = equilibria(p)?
        .into_iter()
        .filter(|e| e.1 == Stability::Center)
        .map(|e| e.0)
        .collect();
    let portrait = phase_portrait(points);
    let circled: Vec<f64> = centers
        .into_iter()
        .filter(|&cx| turns_around(&portrait, cx).abs() >= 0.9)
        .collect();
    Ok(match circled.as_slice() {
        [] => Winding::Neither,
        [cx] => Winding::OneCenter(if *cx < 0.0 { -1 } else { 1 }),
        _ => Winding::BothCenters,
    })
}

/// Closest approach to the starting point after the curve has first moved
/// more than `leave` away from it.
pub fn return_distance(points: &[TrajectoryPoint], leave: f64) -> Option<f64> {
    let first = points.first()?;
    let dist = |pt: &TrajectoryPoint| (pt.x - first.x).hypot(pt.v - first.v);
    let left_at = points.iter().position(|pt| dist(pt) > leave)?;
    points[left_at..].iter().map(dist).min_by(f64::total_cmp)
}

/// Largest distance between consecutive samples in the phase plane.
pub fn max_sample_gap(points: &[TrajectoryPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].x - w[0].x).hypot(w[1].v - w[0].v))
        .fold(0.0, f64::max)
}

/// Phase-plane distance between two runs that differ only in `x0`, sampled at
/// every step.
pub fn twin_run_separation(
    p: &DuffingParams,
    forcing: &ForcingSignal,
    t_end: f64,
    dt: f64,
    x0: f64,
    v0: f64,
    offset: f64,
) -> Result<Vec<(f64, f64)>, DuffingError> {
    let (a, b) = rayon::join(
        || simulate(p, forcing, t_end, dt, x0, v0),
        || simulate(p, forcing, t_end, dt, x0 + offset, v0),
    );
    let (a, b) = (a?, b?);
    Ok(a
        .iter()
        .zip(&b)
        .map(|(u, w)| (u.t, (u.x - w.x).hypot(u.v - w.v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_equilibria() {
        let eq = equilibria(&DuffingParams::default()).unwrap();
        let expected = ((5f64.sqrt() - 1.0) / 2.0).sqrt();
        assert_eq!(eq.len(), 3);
        assert!((eq[2].0 - expected).abs() < 1e-15 && (eq[2].0 - 0.7861514).abs() < 1e-7);
        assert_eq!(eq[1], (0.0, Stability::Saddle));
        assert_eq!(eq[0].1, Stability::Center);
    }

    #[test]
    fn energy_examples() {
        let p = DuffingParams::default();
        assert_eq!(energy(&p, 0.0, 0.0), 0.0);
        assert!((energy(&p, 1.0, 0.0) + 1.0 / 12.0).abs() < 1e-15);
        let v = separatrix_velocity(&p, 1.0).unwrap();
        assert!((v - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!(energy(&p, 1.0, v).abs() < 1e-12);
        assert!(separatrix_velocity(&p, 2.0).is_err());
    }

    #[test]
    fn matched_profile_lies_on_the_separatrix() {
        let p = DuffingParams::default();
        let crossing = separatrix_crossing(&p).unwrap();
        let (x, _) = homoclinic_profile(&p, 0.0).unwrap();
        assert!((x - crossing).abs() < 1e-12);
        for i in -40..=40 {
            let (x, v) = homoclinic_profile(&p, i as f64 * 0.25).unwrap();
            assert!(energy(&p, x, v).abs() < 1e-12);
        }
    }

    #[test]
    fn matched_profile_for_general_coefficients() {
        for (a, b, c) in [(2.0, 1.0, 0.5), (0.5, -0.2, 1.0), (3.0, 2.0, 0.0)] {
            let p = DuffingParams::with_coefficients(a, b, c);
            assert_eq!(p.k, a);
            for i in -20..=20 {
                let (x, v) = homoclinic_profile(&p, i as f64 * 0.3).unwrap();
                assert!(energy(&p, x, v).abs() < 1e-12, "{a} {b} {c} {i}");
            }
        }
    }

    #[test]
    fn forcing_levels() {
        let f = ForcingSignal::from_orbit(&BigUint::from(73u32), 6, ForcingTransform::ParitySign, 0.5)
            .unwrap();
        // 73, 103, 145, 205, 289, 408
        assert_eq!(f.levels, vec![-1.0, -1.0, -1.0, -1.0, -1.0, 1.0]);
        assert_eq!(f.at(2.49), -1.0);
        assert_eq!(f.at(2.5), 1.0);
        assert_eq!(f.at(10.0), 0.0);
    }

    #[test]
    fn steps_snap_to_hold_boundaries() {
        let f = ForcingSignal {
            levels: vec![1.0; 8],
            hold_time: 0.3,
        };
        let pts = simulate(&DuffingParams::default(), &f, 1.0, 0.07, 0.0, 0.0).unwrap();
        for b in [0.3, 0.6, 0.9] {
            assert!(pts.iter().any(|pt| (pt.t - b).abs() < 1e-12), "boundary {b}");
        }
        assert!(pts.windows(2).all(|w| w[1].t > w[0].t && w[1].t - w[0].t <= 0.07 + 1e-12));
        assert_eq!(pts.last().unwrap().t, 1.0);
    }
}
