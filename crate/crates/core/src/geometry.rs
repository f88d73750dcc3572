//! Surfaces as coordinate rectangles with identifications, plus base-3 cell
//! addressing inside a designated rectangle.
//!
//! A `Torus` is `[0,w) x [0,h)` with both coordinates periodic. A `Cylinder`
//! keeps one axis periodic and bounds the other by two boundary circles. A
//! `Sphere` is a cylinder whose two boundary circles are each collapsed to a
//! pole point.

use crate::math;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Axis-aligned rectangle, `[x0, x0+w] x [y0, y0+h]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, w: f64, h: f64) -> Self {
        Rect { x0, y0, w, h }
    }

    pub fn unit() -> Self {
        Rect::new(0.0, 0.0, 1.0, 1.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x0 + self.w && p.y >= self.y0 && p.y <= self.y0 + self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.x0 + self.w / 2.0, self.y0 + self.h / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Torus,
    Cylinder,
    Sphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A surface as a coordinate rectangle `[0,width] x [0,height]` with
/// identifications. For `Cylinder` and `Sphere`, `bounded` names the axis
/// carrying the two boundary circles (resp. poles); the other axis stays
/// periodic. Cutting a torus along `x = c` yields a cylinder bounded in `x`,
/// so both orientations occur.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Surface {
    pub kind: SurfaceKind,
    pub width: f64,
    pub height: f64,
    pub bounded: Axis,
}

impl Surface {
    pub fn torus() -> Self {
        Surface {
            kind: SurfaceKind::Torus,
            width: 1.0,
            height: 1.0,
            bounded: Axis::Y,
        }
    }

    pub fn cylinder(bounded: Axis) -> Self {
        Surface {
            kind: SurfaceKind::Cylinder,
            width: 1.0,
            height: 1.0,
            bounded,
        }
    }

    pub fn sphere(bounded: Axis) -> Self {
        Surface {
            kind: SurfaceKind::Sphere,
            width: 1.0,
            height: 1.0,
            bounded,
        }
    }

    fn extent(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.width,
            Axis::Y => self.height,
        }
    }

    /// Bring a point into the fundamental domain, wrapping periodic axes and
    /// clamping the bounded axis of a cylinder or sphere.
    pub fn wrap_point(&self, p: Point) -> Point {
        match self.kind {
            SurfaceKind::Torus => Point::new(math::wrap(p.x, self.width), math::wrap(p.y, self.height)),
            SurfaceKind::Cylinder | SurfaceKind::Sphere => {
                let (bx, by) = match self.bounded {
                    Axis::X => (true, false),
                    Axis::Y => (false, true),
                };
                let x = if bx {
                    math::min(math::max(p.x, 0.0), self.width)
                } else {
                    math::wrap(p.x, self.width)
                };
                let y = if by {
                    math::min(math::max(p.y, 0.0), self.height)
                } else {
                    math::wrap(p.y, self.height)
                };
                Point::new(x, y)
            }
        }
    }

    /// Coordinate of `p` along the bounded axis (distance from the Bottom
    /// boundary circle). Only meaningful for cylinders and spheres.
    pub fn bounded_coord(&self, p: Point) -> f64 {
        match self.bounded {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }

    /// Euler characteristic: torus 0, cylinder 0, sphere 2 (both circles
    /// collapsed).
    pub fn euler_characteristic(&self) -> i32 {
        match self.kind {
            SurfaceKind::Torus | SurfaceKind::Cylinder => 0,
            SurfaceKind::Sphere => 2,
        }
    }
}

/// Minimum distance over identification representatives.
pub fn dist(surface: &Surface, p: Point, q: Point) -> f64 {
    let p = surface.wrap_point(p);
    let q = surface.wrap_point(q);
    match surface.kind {
        SurfaceKind::Torus => {
            let dx = math::circ_dist01(p.x / surface.width, q.x / surface.width) * surface.width;
            let dy = math::circ_dist01(p.y / surface.height, q.y / surface.height) * surface.height;
            math::hypot(dx, dy)
        }
        SurfaceKind::Cylinder => cyl_dist(surface, p, q),
        SurfaceKind::Sphere => {
            // Direct path inside the chart, or through either pole (each
            // boundary circle is one point, so going "via" a pole costs the
            // sum of the two bounded-axis distances to that boundary).
            let direct = cyl_dist(surface, p, q);
            let ext = surface.extent(surface.bounded);
            let bp = surface.bounded_coord(p);
            let bq = surface.bounded_coord(q);
            let via_bottom = bp + bq;
            let via_top = (ext - bp) + (ext - bq);
            math::min(direct, math::min(via_bottom, via_top))
        }
    }
}

fn cyl_dist(surface: &Surface, p: Point, q: Point) -> f64 {
    match surface.bounded {
        Axis::Y => {
            let dx = math::circ_dist01(p.x / surface.width, q.x / surface.width) * surface.width;
            math::hypot(dx, p.y - q.y)
        }
        Axis::X => {
            let dy = math::circ_dist01(p.y / surface.height, q.y / surface.height) * surface.height;
            math::hypot(p.x - q.x, dy)
        }
    }
}

/// Base-3 path into a rectangle: entry `(i, j)` picks column `i`, row `j` of
/// the 3x3 subdivision, with `(0,0)` the lower-left ninth. The addressed
/// square has side `3^-depth` relative to the seed rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellAddress {
    pub path: Vec<(u8, u8)>,
}

impl CellAddress {
    pub fn root() -> Self {
        CellAddress { path: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn is_valid(&self) -> bool {
        self.path.iter().all(|&(i, j)| i < 3 && j < 3)
    }

    /// Truncate to a shallower depth.
    pub fn prefix(&self, depth: usize) -> CellAddress {
        CellAddress {
            path: self.path[..depth.min(self.path.len())].to_vec(),
        }
    }

    /// Flat (column, row) index of this address within the `3^depth` grid.
    pub fn grid_index(&self) -> (usize, usize) {
        let mut col = 0usize;
        let mut row = 0usize;
        for &(i, j) in &self.path {
            col = col * 3 + i as usize;
            row = row * 3 + j as usize;
        }
        (col, row)
    }

    /// Address at `depth` for the cell holding grid position (col, row).
    pub fn from_grid_index(mut col: usize, mut row: usize, depth: usize) -> CellAddress {
        let mut path = alloc::vec![(0u8, 0u8); depth];
        for slot in path.iter_mut().rev() {
            *slot = ((col % 3) as u8, (row % 3) as u8);
            col /= 3;
            row /= 3;
        }
        CellAddress { path }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Located {
    Cell(CellAddress),
    Outside,
}

/// Locate the depth-`depth` cell of `rect` containing `p`. Boundary points
/// resolve to the lexicographically smallest path, which falls out of taking
/// the lower cell on every internal edge. Total: points outside `rect`
/// return `Outside`.
pub fn locate(rect: &Rect, p: Point, depth: usize) -> Located {
    if !rect.contains(p) {
        return Located::Outside;
    }
    let mut path = Vec::with_capacity(depth);
    let mut fx = if rect.w > 0.0 { (p.x - rect.x0) / rect.w } else { 0.0 };
    let mut fy = if rect.h > 0.0 { (p.y - rect.y0) / rect.h } else { 0.0 };
    for _ in 0..depth {
        fx *= 3.0;
        fy *= 3.0;
        // A coordinate exactly on an internal edge belongs to the lower cell;
        // only the far outer boundary clamps down.
        let mut i = math::floor(fx) as i64;
        let mut j = math::floor(fy) as i64;
        if i > 2 {
            i = 2;
        }
        if j > 2 {
            j = 2;
        }
        // Tie-break: an exact hit on an internal edge floors to the upper
        // cell; push it back to keep the smaller path.
        if fx == i as f64 && i > 0 {
            i -= 1;
            fx = 3.0;
        } else {
            fx -= i as f64;
        }
        if fy == j as f64 && j > 0 {
            j -= 1;
            fy = 3.0;
        } else {
            fy -= j as f64;
        }
        path.push((i as u8, j as u8));
    }
    Located::Cell(CellAddress { path })
}

/// Bounds of the addressed sub-square.
pub fn cell_bounds(rect: &Rect, addr: &CellAddress) -> Rect {
    let mut x0 = rect.x0;
    let mut y0 = rect.y0;
    let mut w = rect.w;
    let mut h = rect.h;
    for &(i, j) in &addr.path {
        w /= 3.0;
        h /= 3.0;
        x0 += i as f64 * w;
        y0 += j as f64 * h;
    }
    Rect::new(x0, y0, w, h)
}

/// A closed coordinate-circle transversal: `x = value` or `y = value`, with
/// an orientation sign recording the expected crossing direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transversal {
    pub axis: Axis,
    pub value: f64,
    pub orientation: i8,
}

impl Transversal {
    pub fn vertical(x: f64) -> Self {
        Transversal {
            axis: Axis::X,
            value: x,
            orientation: 1,
        }
    }

    pub fn horizontal(y: f64) -> Self {
        Transversal {
            axis: Axis::Y,
            value: y,
            orientation: 1,
        }
    }

    /// Signed coordinate residual of `p` relative to the transversal,
    /// wrapped to (-1/2, 1/2] along the crossing axis.
    pub fn residual(&self, surface: &Surface, p: Point) -> f64 {
        let (c, v, ext) = match self.axis {
            Axis::X => (p.x, self.value, surface.width),
            Axis::Y => (p.y, self.value, surface.height),
        };
        let mut d = math::wrap(c - v, ext);
        if d > ext / 2.0 {
            d -= ext;
        }
        d
    }

    /// Coordinate along the transversal (the non-crossing axis).
    pub fn along(&self, p: Point) -> f64 {
        match self.axis {
            Axis::X => p.y,
            Axis::Y => p.x,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::abs;

    #[test]
    fn locate_center_depth1_is_middle_ninth() {
        let rect = Rect::unit();
        match locate(&rect, rect.center(), 1) {
            Located::Cell(a) => assert_eq!(a.path, alloc::vec![(1, 1)]),
            Located::Outside => panic!("center must locate"),
        }
    }

    #[test]
    fn locate_depth0_is_root() {
        let rect = Rect::unit();
        match locate(&rect, Point::new(0.9, 0.1), 0) {
            Located::Cell(a) => assert_eq!(a.depth(), 0),
            Located::Outside => panic!(),
        }
    }

    #[test]
    fn locate_outside() {
        let rect = Rect::new(0.25, 0.25, 0.5, 0.5);
        assert_eq!(locate(&rect, Point::new(0.1, 0.5), 3), Located::Outside);
    }

    #[test]
    fn bounds_root_is_rect() {
        let rect = Rect::new(0.2, 0.3, 0.4, 0.5);
        assert_eq!(cell_bounds(&rect, &CellAddress::root()), rect);
    }

    #[test]
    fn bounds_first_ninth() {
        let rect = Rect::unit();
        let b = cell_bounds(
            &rect,
            &CellAddress {
                path: alloc::vec![(0, 0)],
            },
        );
        assert!(abs(b.x0) < 1e-15 && abs(b.y0) < 1e-15);
        assert!(abs(b.w - 1.0 / 3.0) < 1e-15 && abs(b.h - 1.0 / 3.0) < 1e-15);
    }

    // Independent oracle: accumulate base-3 digits directly.
    fn digit_bounds(path: &[(u8, u8)]) -> (f64, f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        let mut side = 1.0;
        for (k, &(i, j)) in path.iter().enumerate() {
            let s = 1.0 / libm::pow(3.0, (k + 1) as f64);
            x += i as f64 * s;
            y += j as f64 * s;
            side = s;
        }
        (x, y, side)
    }

    #[test]
    fn bounds_match_digit_expansion() {
        let rect = Rect::unit();
        let addr = CellAddress {
            path: alloc::vec![(1, 1), (2, 0)],
        };
        let b = cell_bounds(&rect, &addr);
        let (x, y, side) = digit_bounds(&addr.path);
        assert!(abs(b.x0 - x) < 1e-12, "x0 {} vs {}", b.x0, x);
        assert!(abs(b.y0 - y) < 1e-12);
        assert!(abs(b.w - side) < 1e-12);
        // spec arithmetic: [1/3+2/9, 1/3+3/9] x [1/3, 1/3+1/9]
        assert!(abs(b.x0 - (1.0 / 3.0 + 2.0 / 9.0)) < 1e-12);
        assert!(abs(b.y0 - 1.0 / 3.0) < 1e-12);
    }

    #[test]
    fn locate_roundtrips_cell_center() {
        let rect = Rect::unit();
        for depth in 0..=5 {
            let addr = CellAddress::from_grid_index(
                (7usize.pow(depth as u32 % 4)) % 3usize.pow(depth as u32),
                (5usize.pow(depth as u32 % 3)) % 3usize.pow(depth as u32),
                depth,
            );
            let b = cell_bounds(&rect, &addr);
            match locate(&rect, b.center(), depth) {
                Located::Cell(a) => assert_eq!(a, addr),
                Located::Outside => panic!(),
            }
        }
    }

    #[test]
    fn torus_wraparound_distance() {
        let s = Surface::torus();
        let d = dist(&s, Point::new(0.05, 0.0), Point::new(0.95, 0.0));
        assert!(abs(d - 0.1) < 1e-15);
        assert_eq!(dist(&s, Point::new(0.3, 0.7), Point::new(0.3, 0.7)), 0.0);
    }

    #[test]
    fn sphere_pole_distance() {
        let s = Surface::sphere(Axis::Y);
        let eps = 1e-4;
        for k in 0..5 {
            let x = k as f64 / 5.0;
            let d = dist(&s, Point::new(0.0, 1.0), Point::new(x, 1.0 - eps));
            assert!(abs(d - eps) < 1e-12, "pole dist {}", d);
        }
    }

    #[test]
    fn torus_dist_invariant_under_translation_by_width() {
        let s = Surface::torus();
        let p = Point::new(0.12, 0.56);
        let q = Point::new(0.9, 0.14);
        let d1 = dist(&s, p, q);
        let d2 = dist(&s, p, Point::new(q.x + 1.0, q.y));
        assert_eq!(d1, d2);
    }
}
