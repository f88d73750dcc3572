//! Trajectory integration, transversal crossing detection, and first-return
//! maps.
//!
//! Classical fixed-order RK4 with the step clamped near zeros keeps sample
//! grids reproducible; backward integration is exactly forward integration
//! of the reversed scene, so the reversal-consistency invariant holds
//! bit-for-bit.

use crate::field::FlowScene;
use crate::geometry::{Axis, Point, SurfaceKind, Transversal};
use crate::math::{self, hypot};
use alloc::vec::Vec;

/// Stop when the field magnitude falls below this.
pub const SINGULAR_SPEED: f64 = 1e-10;
/// Step regularizer near zeros.
pub const SPEED_EPS: f64 = 1e-6;
/// Absolute step floor.
pub const STEP_FLOOR: f64 = 1e-8;
/// A sphere pole counts as hit within this bounded-axis distance.
pub const POLE_EPS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    TimeBudget,
    ReachedSingular,
    ReachedPole,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub seed: Point,
    pub direction: Direction,
    /// Time-ordered samples `(t, p)`, `t` increasing from 0 along the
    /// integration direction; positions wrapped into the surface domain.
    pub samples: Vec<(f64, Point)>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn end(&self) -> Point {
        self.samples.last().map(|&(_, p)| p).unwrap_or(self.seed)
    }

    pub fn end_time(&self) -> f64 {
        self.samples.last().map(|&(t, _)| t).unwrap_or(0.0)
    }
}

fn rk4_step(scene: &FlowScene, p: Point, dt: f64) -> Point {
    let k1 = scene.eval(p);
    let k2 = scene.eval(Point::new(p.x + 0.5 * dt * k1.0, p.y + 0.5 * dt * k1.1));
    let k3 = scene.eval(Point::new(p.x + 0.5 * dt * k2.0, p.y + 0.5 * dt * k2.1));
    let k4 = scene.eval(Point::new(p.x + dt * k3.0, p.y + dt * k3.1));
    Point::new(
        p.x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        p.y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

fn pole_hit(scene: &FlowScene, p: Point) -> bool {
    if !matches!(scene.surface.kind, SurfaceKind::Sphere) {
        return false;
    }
    let b = scene.surface.bounded_coord(scene.surface.wrap_point(p));
    let ext = match scene.surface.bounded {
        Axis::X => scene.surface.width,
        Axis::Y => scene.surface.height,
    };
    (b <= POLE_EPS && scene.poles[0].is_some()) || (b >= ext - POLE_EPS && scene.poles[1].is_some())
}

/// Drive the integration, handing every accepted sample to `visit`
/// (including the initial point at t = 0). Returns the termination reason
/// and the final state.
pub fn integrate_each<F: FnMut(f64, Point)>(
    scene: &FlowScene,
    seed: Point,
    t_max: f64,
    h: f64,
    direction: Direction,
    visit: &mut F,
) -> (Termination, f64, Point) {
    let reversed = match direction {
        Direction::Forward => None,
        Direction::Backward => Some(scene.reverse()),
    };
    let scene = reversed.as_ref().unwrap_or(scene);
    let mut p = scene.surface.wrap_point(seed);
    let mut t = 0.0;
    visit(t, p);
    loop {
        if t >= t_max {
            return (Termination::TimeBudget, t, p);
        }
        let v = scene.eval(p);
        let speed = hypot(v.0, v.1);
        if speed < SINGULAR_SPEED {
            return (Termination::ReachedSingular, t, p);
        }
        if pole_hit(scene, p) {
            return (Termination::ReachedPole, t, p);
        }
        let mut dt = h * math::min(1.0, speed / (speed + SPEED_EPS));
        if dt < STEP_FLOOR {
            dt = STEP_FLOOR;
        }
        if t + dt > t_max {
            dt = t_max - t;
        }
        p = scene.surface.wrap_point(rk4_step(scene, p, dt));
        t += dt;
        visit(t, p);
    }
}

/// Integrate and collect all samples.
pub fn integrate(
    scene: &FlowScene,
    seed: Point,
    t_max: f64,
    h: f64,
    direction: Direction,
) -> Trajectory {
    let mut samples = Vec::new();
    let (termination, _, _) = integrate_each(scene, seed, t_max, h, direction, &mut |t, p| {
        samples.push((t, p));
    });
    Trajectory {
        seed,
        direction,
        samples,
        termination,
    }
}

/// Transversal crossings of a stored trajectory: bracketed sign changes of
/// the coordinate residual, refined by bisection on the bracketing chord to
/// a 1e-10 residual. Returns `(t, along-coordinate)` pairs in increasing
/// time.
pub fn crossings(
    traj: &Trajectory,
    surface_scene: &FlowScene,
    transversal: &Transversal,
) -> Vec<(f64, f64)> {
    let surface = &surface_scene.surface;
    let mut out = Vec::new();
    let mut prev: Option<(f64, Point, f64)> = None;
    for &(t, p) in &traj.samples {
        let r = transversal.residual(surface, p);
        if let Some((t0, p0, r0)) = prev {
            if r0 == 0.0 {
                out.push((t0, transversal.along(p0)));
            } else if r0 * r < 0.0 && math::abs(r0 - r) < 0.25 {
                // Bisection on the chord between the two samples.
                let (mut alo, mut ahi) = (0.0f64, 1.0f64);
                let (mut rlo, _rhi) = (r0, r);
                let lerp = |a: f64| {
                    Point::new(
                        p0.x + a * wrap_delta(p.x - p0.x),
                        p0.y + a * wrap_delta(p.y - p0.y),
                    )
                };
                for _ in 0..64 {
                    let mid = 0.5 * (alo + ahi);
                    let rm = transversal.residual(surface, lerp(mid));
                    if math::abs(rm) < 1e-10 {
                        alo = mid;
                        break;
                    }
                    if rlo * rm <= 0.0 {
                        ahi = mid;
                    } else {
                        alo = mid;
                        rlo = rm;
                    }
                }
                let a = 0.5 * (alo + ahi);
                let pc = surface.wrap_point(lerp(a));
                out.push((t0 + a * (t - t0), transversal.along(pc)));
            }
        }
        prev = Some((t, p, r));
    }
    out
}

/// Shortest signed representative of a coordinate difference on the unit
/// circle (samples are stored wrapped).
fn wrap_delta(d: f64) -> f64 {
    if d > 0.5 {
        d - 1.0
    } else if d < -0.5 {
        d + 1.0
    } else {
        d
    }
}

#[derive(Clone, Debug)]
pub struct ReturnMap {
    pub transversal: Transversal,
    /// Successive same-orientation crossing coordinates `(y_in, y_out)`.
    pub pairs: Vec<(f64, f64)>,
}

/// First-return map on a transversal: integrates each seed coordinate and
/// records pairs of successive same-orientation crossings. Crossing times
/// are refined by bisecting the integration step, so coordinates are
/// accurate to the integrator's own order.
pub fn return_map(
    scene: &FlowScene,
    transversal: &Transversal,
    seeds: &[f64],
    n_returns: usize,
    h: f64,
    t_max: f64,
) -> ReturnMap {
    let mut pairs = Vec::new();
    for &s in seeds {
        let start = match transversal.axis {
            Axis::X => Point::new(transversal.value, s),
            Axis::Y => Point::new(s, transversal.value),
        };
        let mut coords = Vec::with_capacity(n_returns + 1);
        coords.push(s);
        let mut p = scene.surface.wrap_point(start);
        let mut t = 0.0;
        let mut just_crossed = true; // the seed sits on the transversal
        while coords.len() <= n_returns && t < t_max {
            let v = scene.eval(p);
            let speed = hypot(v.0, v.1);
            if speed < SINGULAR_SPEED || pole_hit(scene, p) {
                break;
            }
            let mut dt = h * math::min(1.0, speed / (speed + SPEED_EPS));
            if dt < STEP_FLOOR {
                dt = STEP_FLOOR;
            }
            let q = scene.surface.wrap_point(rk4_step(scene, p, dt));
            let r0 = transversal.residual(&scene.surface, p);
            let r1 = transversal.residual(&scene.surface, q);
            let crossing = r0 != 0.0 && r0 * r1 < 0.0 && math::abs(r0 - r1) < 0.25;
            if crossing && !just_crossed {
                // Refine the crossing by bisecting the step size.
                let (mut lo, mut hi) = (0.0, dt);
                let mut rc = r1;
                let mut pc = q;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let pm = scene.surface.wrap_point(rk4_step(scene, p, mid));
                    let rm = transversal.residual(&scene.surface, pm);
                    if math::abs(rm) < 1e-10 {
                        pc = pm;
                        break;
                    }
                    if r0 * rm <= 0.0 {
                        hi = mid;
                        rc = rm;
                        pc = pm;
                    } else {
                        lo = mid;
                    }
                }
                let _ = rc;
                // Orientation: sign of the crossing-axis velocity.
                let vc = scene.eval(pc);
                let sign = match transversal.axis {
                    Axis::X => vc.0,
                    Axis::Y => vc.1,
                };
                if sign * transversal.orientation as f64 > 0.0 {
                    coords.push(transversal.along(pc));
                }
                just_crossed = true;
            } else if !crossing {
                just_crossed = false;
            }
            p = q;
            t += dt;
        }
        for w in coords.windows(2) {
            pairs.push((w[0], w[1]));
        }
    }
    ReturnMap {
        transversal: *transversal,
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FlowScene;

    #[test]
    fn constant_field_endpoint_exact() {
        let s = FlowScene::irrational(0.0);
        let tr = integrate(&s, Point::new(0.0, 0.0), 0.5, 1e-3, Direction::Forward);
        let end = tr.end();
        assert!(math::abs(end.x - 0.5) < 1e-12);
        assert_eq!(tr.termination, Termination::TimeBudget);
        assert!(math::abs(tr.end_time() - 0.5) < 1e-15);
    }

    #[test]
    fn source_disk_exponential_growth() {
        let s = FlowScene::source_disk(Point::new(0.0, 0.0), 0.3);
        let tr = integrate(&s, Point::new(0.01, 0.0), 1.0, 1e-4, Direction::Forward);
        let end = tr.end();
        let expected = 0.01 * math::exp(1.0);
        assert!(
            math::abs(end.x - expected) < 1e-8,
            "got {} want {}",
            end.x,
            expected
        );
    }

    #[test]
    fn singular_seed_stops_immediately() {
        let s = FlowScene::source_disk(Point::new(0.5, 0.5), 0.1);
        let tr = integrate(&s, Point::new(0.9, 0.9), 10.0, 1e-3, Direction::Forward);
        assert_eq!(tr.termination, Termination::ReachedSingular);
        assert_eq!(tr.end_time(), 0.0);
    }

    #[test]
    fn backward_equals_forward_of_reversed() {
        let s = FlowScene::limit_cycle_torus();
        let seed = Point::new(0.2, 0.45);
        let b = integrate(&s, seed, 2.0, 1e-3, Direction::Backward);
        let f = integrate(&s.reverse(), seed, 2.0, 1e-3, Direction::Forward);
        assert_eq!(b.samples.len(), f.samples.len());
        for (a, b) in b.samples.iter().zip(f.samples.iter()) {
            assert_eq!(a.0, b.0);
            assert_eq!(a.1, b.1);
        }
    }

    #[test]
    fn irrational_crossings_step_by_alpha() {
        let alpha = core::f64::consts::SQRT_2;
        let s = FlowScene::irrational(alpha);
        let tr = integrate(&s, Point::new(0.0, 0.2), 5.0, 1e-3, Direction::Forward);
        let t = Transversal::vertical(0.0);
        let cr = crossings(&tr, &s, &t);
        // Crossing at every integer time (plus the seed point itself).
        assert!(cr.len() >= 5, "got {} crossings", cr.len());
        for w in cr.windows(2) {
            let dy = math::wrap01(w[1].1 - w[0].1);
            assert!(
                math::abs(dy - math::wrap01(alpha)) < 1e-6,
                "step {} vs {}",
                dy,
                math::wrap01(alpha)
            );
        }
    }

    #[test]
    fn irrational_return_map_is_rotation() {
        let alpha = core::f64::consts::SQRT_2;
        let s = FlowScene::irrational(alpha);
        let t = Transversal::vertical(0.0);
        let rm = return_map(&s, &t, &[0.1, 0.4, 0.8], 2, 1e-3, 10.0);
        assert_eq!(rm.pairs.len(), 6);
        for &(a, b) in &rm.pairs {
            let step = math::wrap01(b - a);
            assert!(math::abs(step - math::wrap01(alpha)) < 1e-6);
        }
    }

    #[test]
    fn limit_cycle_fixed_point_residual() {
        let s = FlowScene::limit_cycle_torus();
        let t = Transversal::vertical(0.0);
        let rm = return_map(&s, &t, &[0.0], 1, 1e-3, 10.0);
        assert_eq!(rm.pairs.len(), 1);
        let (y0, y1) = rm.pairs[0];
        assert!(math::abs(y1 - y0) <= 1e-8, "P(0) drifted to {}", y1);
    }

    #[test]
    fn limit_cycle_monotone_drift() {
        let s = FlowScene::limit_cycle_torus();
        let t = Transversal::vertical(0.0);
        for k in 1..=9 {
            let y = k as f64 / 10.0;
            let rm = return_map(&s, &t, &[y], 1, 1e-3, 10.0);
            assert_eq!(rm.pairs.len(), 1);
            let (a, b) = rm.pairs[0];
            assert!(b > a, "P({}) = {} not above", a, b);
        }
    }
}
