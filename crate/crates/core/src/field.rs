//! Composite vector-field evaluation: builtin analytic flows, the tiled
//! Wada region embedded in its host flow, and surgery-transformed fields.
//!
//! A scene is an ordered layer stack over a surface; the last layer whose
//! domain contains the query point wins. The Wada torus scene stacks the
//! host transverse-annulus flow (whole torus), the two zero band rectangles
//! continuing the singular circle outside the dug square, and the tiled
//! square itself. Surgeries act as coordinate offsets (cuts), region sign
//! flips (partial reversal) and pole bookkeeping (collapses).

use crate::geometry::{Axis, Located, Point, Rect, Surface, SurfaceKind, Transversal};
use crate::math::{self, clamp01, psi, wrap01};
use crate::tiles::eval_tile;
use crate::wada::{schedule, Cell, ConstructionPlan, DigError, TileMap};
use alloc::vec::Vec;
use core::fmt;

/// Default interior disk count offset and geometry of the dug square: the
/// seeded singular rectangle D occupies the middle ninth of the unit torus.
pub const D_RECT: Rect = Rect {
    x0: 1.0 / 3.0,
    y0: 1.0 / 3.0,
    w: 1.0 / 3.0,
    h: 1.0 / 3.0,
};

/// Crash-lane amplitude fraction of the ambient flow.
pub const AMBIENT_BLEED: f64 = 0.08;

/// Geometry the host annulus flow needs to match the tiled square: the
/// square itself, the x-extent of the singular band (the spine column
/// continued around the torus), the y-interval of the aligned canal mouths,
/// and the speed scale tying tile-unit velocities to torus units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HostGeometry {
    pub d_rect: Rect,
    pub band_x: (f64, f64),
    /// y-interval of the mouth openings on the west and east faces of D
    /// (both mouths are aligned); `None` for a sealed band.
    pub mouth_y: Option<(f64, f64)>,
    pub speed_scale: f64,
}

impl HostGeometry {
    /// A sealed band host (no canal mouths) with a one-ninth-wide band.
    pub fn sealed() -> Self {
        HostGeometry {
            d_rect: D_RECT,
            band_x: (0.5 - 1.0 / 54.0, 0.5 + 1.0 / 54.0),
            mouth_y: None,
            speed_scale: 1.0 / 27.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Builtin {
    /// Linear flow `(1, alpha)`.
    Irrational { alpha: f64 },
    /// `(1, c sin^2(pi y))`: the circle `y = 0` is a limit cycle, the rest
    /// of the torus a transverse annulus spiralling into it.
    LimitCycleTorus { c: f64 },
    /// Concentric closed orbits inside a disk, zero outside.
    CenterDisk { center: Point, r: f64 },
    /// Radial field `p - center` inside a disk, blended out over the
    /// boundary collar.
    SourceDisk { center: Point, r: f64 },
    /// The host flow of the Wada construction: an eastward jet through the
    /// aligned canal mouths plus slow crash lanes that die on the singular
    /// faces.
    AnnulusTransverse { host: HostGeometry },
}

#[derive(Clone, Debug)]
pub enum LayerSource {
    Builtin(Builtin),
    Tiled { map: TileMap, rect: Rect, speed_scale: f64 },
    Zero,
}

#[derive(Clone, Debug)]
pub struct Layer {
    /// `None` covers the whole surface.
    pub domain: Option<Rect>,
    pub source: LayerSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleRole {
    Source,
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryEnd {
    Bottom,
    Top,
}

/// Applied surgery record; coordinates refer to the field frame (the torus
/// coordinates the layers were built in).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AppliedSurgery {
    Cut { axis: Axis, value: f64 },
    ReverseRegion { x0: f64, x1: f64 },
    Collapse { end: BoundaryEnd, role: PoleRole },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SceneError {
    /// Region-reversal boundary crosses nonzero field away from a cut.
    DiscontinuousReversal { at: Point },
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneError::DiscontinuousReversal { at } => write!(
                f,
                "reversal region boundary crosses nonzero field at ({}, {})",
                at.x, at.y
            ),
        }
    }
}

/// A surface plus composite field: the single evaluable object.
#[derive(Clone, Debug)]
pub struct FlowScene {
    pub surface: Surface,
    pub layers: Vec<Layer>,
    pub surgeries: Vec<AppliedSurgery>,
    /// Declared source points (disk centers and source poles).
    pub sources: Vec<Point>,
    /// Pole roles at the bounded-axis ends (bottom, top) after collapses.
    pub poles: [Option<PoleRole>; 2],
    /// Offset from surface coordinates into the field frame.
    pub coord_offset: Point,
    /// Global time reversal.
    pub reversed: bool,
}

impl FlowScene {
    fn bare(surface: Surface) -> Self {
        FlowScene {
            surface,
            layers: Vec::new(),
            surgeries: Vec::new(),
            sources: Vec::new(),
            poles: [None, None],
            coord_offset: Point::new(0.0, 0.0),
            reversed: false,
        }
    }

    pub fn irrational(alpha: f64) -> Self {
        let mut s = Self::bare(Surface::torus());
        s.layers.push(Layer {
            domain: None,
            source: LayerSource::Builtin(Builtin::Irrational { alpha }),
        });
        s
    }

    pub fn limit_cycle_torus() -> Self {
        let mut s = Self::bare(Surface::torus());
        s.layers.push(Layer {
            domain: None,
            source: LayerSource::Builtin(Builtin::LimitCycleTorus { c: 0.3 }),
        });
        s
    }

    /// Zero background plus one source disk; used for fixtures and tests.
    pub fn source_disk(center: Point, r: f64) -> Self {
        let mut s = Self::bare(Surface::torus());
        s.layers.push(Layer {
            domain: None,
            source: LayerSource::Zero,
        });
        s.layers.push(Layer {
            domain: None,
            source: LayerSource::Builtin(Builtin::SourceDisk { center, r }),
        });
        s.sources.push(center);
        s
    }

    /// The Example-4.3 style torus scene: host annulus flow, singular band,
    /// and the dug square produced by the round-robin schedule.
    pub fn wada_torus(plan: &ConstructionPlan) -> Result<Self, DigError> {
        let map = schedule(plan)?;
        Ok(Self::from_tile_map(map))
    }

    pub fn from_tile_map(map: TileMap) -> Self {
        let d = D_RECT;
        let n = map.n;
        let tau = d.w / n as f64;
        let band_x = (
            d.x0 + map.spine_col as f64 * tau,
            d.x0 + (map.spine_col + 1) as f64 * tau,
        );
        let my0 = d.y0 + map.mouth_row as f64 * tau;
        let mouth_y = (my0 + tau / 3.0, my0 + 2.0 * tau / 3.0);
        let speed_scale = 3.0 * tau;
        let host = HostGeometry {
            d_rect: d,
            band_x,
            mouth_y: Some(mouth_y),
            speed_scale,
        };
        let mut s = Self::bare(Surface::torus());
        s.layers.push(Layer {
            domain: None,
            source: LayerSource::Builtin(Builtin::AnnulusTransverse { host }),
        });
        // The singular band continuing the spine around the torus, split in
        // two rectangles below and above D.
        s.layers.push(Layer {
            domain: Some(Rect::new(band_x.0, 0.0, band_x.1 - band_x.0, d.y0)),
            source: LayerSource::Zero,
        });
        s.layers.push(Layer {
            domain: Some(Rect::new(
                band_x.0,
                d.y0 + d.h,
                band_x.1 - band_x.0,
                1.0 - (d.y0 + d.h),
            )),
            source: LayerSource::Zero,
        });
        s.layers.push(Layer {
            domain: Some(d),
            source: LayerSource::Tiled {
                map,
                rect: d,
                speed_scale,
            },
        });
        s
    }

    pub fn tile_map(&self) -> Option<&TileMap> {
        self.layers.iter().find_map(|l| match &l.source {
            LayerSource::Tiled { map, .. } => Some(map),
            _ => None,
        })
    }

    pub fn tiled_rect(&self) -> Option<Rect> {
        self.layers.iter().find_map(|l| match &l.source {
            LayerSource::Tiled { rect, .. } => Some(*rect),
            _ => None,
        })
    }

    /// Surface point of a tile cell's center.
    pub fn cell_center(&self, col: usize, row: usize) -> Option<Point> {
        let rect = self.tiled_rect()?;
        let map = self.tile_map()?;
        let tau = rect.w / map.n as f64;
        Some(Point::new(
            rect.x0 + (col as f64 + 0.5) * tau,
            rect.y0 + (row as f64 + 0.5) * tau,
        ))
    }

    /// Map a surface coordinate into the field frame.
    fn field_point(&self, p: Point) -> Point {
        let q = self.surface.wrap_point(p);
        Point::new(wrap01(q.x + self.coord_offset.x), wrap01(q.y + self.coord_offset.y))
    }

    fn reverse_region_contains(&self, q: Point) -> bool {
        self.surgeries.iter().any(|s| match s {
            AppliedSurgery::ReverseRegion { x0, x1 } => q.x >= *x0 && q.x <= *x1,
            _ => false,
        })
    }

    /// Evaluate the field at a surface point.
    pub fn eval(&self, p: Point) -> (f64, f64) {
        let wrapped = self.surface.wrap_point(p);
        if matches!(self.surface.kind, SurfaceKind::Sphere) {
            let b = self.surface.bounded_coord(wrapped);
            let ext = match self.surface.bounded {
                Axis::X => self.surface.width,
                Axis::Y => self.surface.height,
            };
            let end = if b <= 0.0 {
                Some(0)
            } else if b >= ext {
                Some(1)
            } else {
                None
            };
            if let Some(end) = end {
                if matches!(self.poles[end], Some(PoleRole::Singular)) {
                    return (0.0, 0.0);
                }
                // Source pole: the field limit along this ray (continuous
                // per ray; the pole itself carries no preferred direction).
            }
        }
        let q = self.field_point(wrapped);
        let v = self.eval_layers(self.layers.len(), q);
        let v = if self.reversed { (-v.0, -v.1) } else { v };
        v
    }

    /// Evaluate layers strictly below index `top` at field point `q`.
    fn eval_layers(&self, top: usize, q: Point) -> (f64, f64) {
        for k in (0..top).rev() {
            let layer = &self.layers[k];
            let contains = match &layer.domain {
                None => true,
                Some(r) => r.contains(q),
            };
            if !contains {
                continue;
            }
            let raw = match &layer.source {
                LayerSource::Zero => (0.0, 0.0),
                LayerSource::Builtin(Builtin::SourceDisk { center, r }) => {
                    let dx = q.x - center.x;
                    let dy = q.y - center.y;
                    let rho = math::hypot(dx, dy);
                    if rho >= *r {
                        continue; // outside the disk: lower layers apply
                    }
                    let ramp = clamp01((r - rho) / (0.1 * r));
                    let below = self.eval_layers(k, q);
                    let below = if self.reverse_region_contains(q) {
                        (-below.0, -below.1)
                    } else {
                        below
                    };
                    // Source layers are exempt from region reversal.
                    return (
                        ramp * dx + (1.0 - ramp) * below.0,
                        ramp * dy + (1.0 - ramp) * below.1,
                    );
                }
                LayerSource::Builtin(b) => eval_builtin(b, q),
                LayerSource::Tiled { map, rect, speed_scale } => {
                    eval_tiled(map, rect, *speed_scale, q)
                }
            };
            let v = if self.reverse_region_contains(q) {
                (-raw.0, -raw.1)
            } else {
                raw
            };
            return v;
        }
        (0.0, 0.0)
    }

    /// Globally reversed scene; an exact involution.
    pub fn reverse(&self) -> FlowScene {
        let mut s = self.clone();
        s.reversed = !s.reversed;
        s
    }

    /// Reverse the field on the x-interval `[x0, x1]` of the field frame.
    /// The interval boundary must lie in the zero set or on a cut boundary.
    pub fn reverse_region(&self, x0: f64, x1: f64) -> Result<FlowScene, SceneError> {
        for &value in &[x0, x1] {
            if self.is_cut_locus(value) {
                continue;
            }
            for k in 0..256 {
                let y = (k as f64 + 0.5) / 256.0;
                let q = Point::new(value, y);
                let v = self.eval_layers(self.layers.len(), q);
                if math::hypot(v.0, v.1) > 1e-9 {
                    return Err(SceneError::DiscontinuousReversal { at: q });
                }
            }
        }
        let mut s = self.clone();
        s.surgeries.push(AppliedSurgery::ReverseRegion { x0, x1 });
        Ok(s)
    }

    fn is_cut_locus(&self, x: f64) -> bool {
        // After a vertical cut the bounded-axis ends sit at field x =
        // offset and offset + width.
        if !matches!(self.surface.kind, SurfaceKind::Torus) && self.surface.bounded == Axis::X {
            let a = wrap01(self.coord_offset.x);
            return math::circ_dist01(x, a) < 1e-12;
        }
        false
    }

    /// Certify that the field crosses `t` with a nonzero constant-sign
    /// component everywhere along it.
    pub fn certify_transversal(&self, t: &Transversal, samples: usize) -> bool {
        let mut sign = 0.0f64;
        for k in 0..samples {
            let along = (k as f64 + 0.5) / samples as f64;
            let p = match t.axis {
                Axis::X => Point::new(t.value, along),
                Axis::Y => Point::new(along, t.value),
            };
            let v = self.eval(p);
            let c = match t.axis {
                Axis::X => v.0,
                Axis::Y => v.1,
            };
            if c == 0.0 {
                return false;
            }
            if sign == 0.0 {
                sign = c;
            } else if sign * c < 0.0 {
                return false;
            }
        }
        true
    }

    /// Grid cells (row-major, `res x res` over the coordinate square) whose
    /// center field magnitude is below 1e-12.
    pub fn zero_set_sample(&self, res: usize) -> Vec<bool> {
        let mut out = Vec::with_capacity(res * res);
        for row in 0..res {
            for col in 0..res {
                let p = Point::new(
                    (col as f64 + 0.5) / res as f64,
                    (row as f64 + 0.5) / res as f64,
                );
                let v = self.eval(p);
                out.push(math::hypot(v.0, v.1) < 1e-12);
            }
        }
        out
    }

    /// Representative surface points of the declared poles.
    pub fn pole_points(&self) -> Vec<(Point, PoleRole)> {
        let mut out = Vec::new();
        let (w, h) = (self.surface.width, self.surface.height);
        for (end, role) in self.poles.iter().enumerate() {
            if let Some(role) = role {
                let p = match (self.surface.bounded, end) {
                    (Axis::X, 0) => Point::new(0.0, h / 2.0),
                    (Axis::X, 1) => Point::new(w, h / 2.0),
                    (Axis::Y, 0) => Point::new(w / 2.0, 0.0),
                    (Axis::Y, 1) => Point::new(w / 2.0, h),
                    _ => unreachable!(),
                };
                out.push((p, *role));
            }
        }
        out
    }
}

fn eval_builtin(b: &Builtin, q: Point) -> (f64, f64) {
    match b {
        Builtin::Irrational { alpha } => (1.0, *alpha),
        Builtin::LimitCycleTorus { c } => {
            let s = math::sin(core::f64::consts::PI * q.y);
            (1.0, c * s * s)
        }
        Builtin::CenterDisk { center, r } => {
            let dx = q.x - center.x;
            let dy = q.y - center.y;
            let rho = math::hypot(dx, dy);
            if rho >= *r || rho < 1e-300 {
                return (0.0, 0.0);
            }
            let mag = psi(rho / r);
            (-mag * dy / rho, mag * dx / rho)
        }
        Builtin::SourceDisk { center, r } => {
            // Standalone evaluation (without a scene the blend target is 0).
            let dx = q.x - center.x;
            let dy = q.y - center.y;
            let rho = math::hypot(dx, dy);
            let ramp = clamp01((r - rho) / (0.1 * r));
            (ramp * dx, ramp * dy)
        }
        Builtin::AnnulusTransverse { host } => eval_ambient(host, q),
    }
}

/// Host flow outside the band and the dug square: a horizontal field that
/// matches the mouth bump exactly on both faces of D and tapers to zero on
/// every singular face.
fn eval_ambient(host: &HostGeometry, q: Point) -> (f64, f64) {
    let d = host.d_rect;
    let jet = match host.mouth_y {
        Some((y0, y1)) if q.y > y0 && q.y < y1 => psi((q.y - y0) / (y1 - y0)),
        _ => 0.0,
    };
    // Across-coordinate between the faces of D (valid at D-range heights).
    let span_d = 1.0 - d.w;
    let u_d = wrap01(q.x - (d.x0 + d.w)) / span_d;
    // Across-coordinate between the band faces (the full arc).
    let band_w = host.band_x.1 - host.band_x.0;
    let u_f = wrap01(q.x - host.band_x.1) / (1.0 - band_w);
    // Blend weight: 0 at D-range heights, 1 beyond a small margin.
    let margin = 2.0 * d.w / 27.0;
    let dy = if q.y >= d.y0 && q.y <= d.y0 + d.h {
        0.0
    } else {
        let lo = math::circ_dist01(q.y, d.y0);
        let hi = math::circ_dist01(q.y, d.y0 + d.h);
        math::min(lo, hi)
    };
    let w = math::clamp01(dy / margin);
    let w = w * w * (3.0 - 2.0 * w); // C1 smoothstep
    let crash = (1.0 - w) * psi(clamp01(u_d)) + w * psi(clamp01(u_f));
    let vx = host.speed_scale * (jet + AMBIENT_BLEED * (1.0 - jet) * crash);
    (vx, 0.0)
}

fn eval_tiled(map: &TileMap, rect: &Rect, speed_scale: f64, q: Point) -> (f64, f64) {
    let n = map.n;
    let fx = (q.x - rect.x0) / rect.w * n as f64;
    let fy = (q.y - rect.y0) / rect.h * n as f64;
    let col = (math::floor(fx) as isize).clamp(0, n as isize - 1) as usize;
    let row = (math::floor(fy) as isize).clamp(0, n as isize - 1) as usize;
    match map.cell(col, row) {
        Cell::Land => (0.0, 0.0),
        Cell::Water { tile, amp, .. } => {
            let u = Point::new(fx - col as f64, fy - row as f64);
            let v = eval_tile(tile, u);
            (speed_scale * amp * v.0, speed_scale * amp * v.1)
        }
    }
}

/// Locate a surface point within the tiled layer's grid, if any.
pub fn locate_tile(scene: &FlowScene, p: Point) -> Option<(usize, usize)> {
    let rect = scene.tiled_rect()?;
    let map = scene.tile_map()?;
    let q = scene.field_point(p);
    match crate::geometry::locate(&rect, q, map.depth) {
        Located::Cell(addr) => {
            let (col, row) = addr.grid_index();
            Some((col, row))
        }
        Located::Outside => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irrational_constant() {
        let s = FlowScene::irrational(core::f64::consts::SQRT_2);
        let v = s.eval(Point::new(0.3, 0.9));
        assert_eq!(v, (1.0, core::f64::consts::SQRT_2));
    }

    #[test]
    fn reverse_is_involution_bit_exact() {
        let s = FlowScene::limit_cycle_torus();
        let rr = s.reverse().reverse();
        for k in 0..200 {
            let p = Point::new((k as f64 * 0.017) % 1.0, (k as f64 * 0.031) % 1.0);
            assert_eq!(s.eval(p), rr.eval(p));
        }
        let r = s.reverse();
        let p = Point::new(0.2, 0.7);
        let v = s.eval(p);
        let vr = r.eval(p);
        assert_eq!((-v.0, -v.1), vr);
    }

    #[test]
    fn source_disk_radial_inside() {
        let s = FlowScene::source_disk(Point::new(0.5, 0.5), 0.3);
        let v = s.eval(Point::new(0.6, 0.5));
        assert!((v.0 - 0.1).abs() < 1e-15 && v.1 == 0.0);
        // outside: zero background
        assert_eq!(s.eval(Point::new(0.95, 0.5)), (0.0, 0.0));
    }

    #[test]
    fn region_reverse_needs_zero_or_cut_boundary() {
        let s = FlowScene::limit_cycle_torus();
        let err = s.reverse_region(0.25, 0.75).unwrap_err();
        assert!(matches!(err, SceneError::DiscontinuousReversal { .. }));
    }

    #[test]
    fn wada_scene_land_cells_evaluate_zero() {
        let plan = ConstructionPlan::standard(1, 2).unwrap();
        let scene = FlowScene::wada_torus(&plan).unwrap();
        let map = scene.tile_map().unwrap();
        let mut checked = 0;
        for (col, row) in map.land_cells() {
            let p = scene.cell_center(col, row).unwrap();
            assert_eq!(scene.eval(p), (0.0, 0.0));
            checked += 1;
        }
        assert!(checked > 0);
        // channel centers are nonzero
        for (col, row) in map.water_cells_of(1) {
            if let Cell::Water { tile, .. } = map.cell(col, row) {
                if matches!(tile.shape, crate::tiles::TileShape::ChannelH) {
                    let p = scene.cell_center(col, row).unwrap();
                    let v = scene.eval(p);
                    assert!(math::hypot(v.0, v.1) > 1e-12);
                }
            }
        }
    }

    #[test]
    fn ambient_matches_mouth_profile_on_faces() {
        let plan = ConstructionPlan::standard(1, 2).unwrap();
        let scene = FlowScene::wada_torus(&plan).unwrap();
        let map = scene.tile_map().unwrap();
        let d = D_RECT;
        let tau = d.w / map.n as f64;
        let y0 = d.y0 + map.mouth_row as f64 * tau;
        // sample across the mouth cell edge on the west face
        for k in 1..30 {
            let y = y0 + k as f64 * tau / 30.0;
            let inside = scene.eval(Point::new(d.x0 + 1e-9, y));
            let outside = scene.eval(Point::new(d.x0 - 1e-9, y));
            assert!(
                (inside.0 - outside.0).abs() < 1e-6,
                "mouth continuity at y={}: {} vs {}",
                y,
                inside.0,
                outside.0
            );
        }
    }

    #[test]
    fn ambient_interior_nonzero_on_cut_circle() {
        let plan = ConstructionPlan::standard(1, 2).unwrap();
        let scene = FlowScene::wada_torus(&plan).unwrap();
        let t = Transversal::vertical(0.0);
        assert!(scene.certify_transversal(&t, 512));
    }
}
