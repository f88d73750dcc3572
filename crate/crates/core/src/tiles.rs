//! The fixed vocabulary of vector fields on unit cells: straight channels,
//! quarter turns, tee junctions and retracting dead ends, plus the all-zero
//! Land tile. Channels occupy the middle third of the cell; on every open
//! port the normal velocity follows the bump `psi` across the opening, so
//! compatible neighbors join with an exactly continuous field.
//!
//! Tees superpose a straight flow (fraction [`TEE_MAIN`]) and a corner flow
//! (fraction [`TEE_BRANCH`]); that keeps each port on the shared `psi` shape
//! while splitting or merging the flux.

use crate::geometry::Point;
use crate::math::{hypot, psi_mid, retract_ramp};

/// Fraction of a tee's flux continuing along the straight leg.
pub const TEE_MAIN: f64 = 0.6;
/// Fraction of a tee's flux taking the branch.
pub const TEE_BRANCH: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    N,
    E,
    S,
    W,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::N, Edge::E, Edge::S, Edge::W];

    pub fn opposite(self) -> Edge {
        match self {
            Edge::N => Edge::S,
            Edge::S => Edge::N,
            Edge::E => Edge::W,
            Edge::W => Edge::E,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Edge::N => 0,
            Edge::E => 1,
            Edge::S => 2,
            Edge::W => 3,
        }
    }

    /// Grid step (dcol, drow) toward this edge's neighbor.
    pub fn step(self) -> (isize, isize) {
        match self {
            Edge::N => (0, 1),
            Edge::E => (1, 0),
            Edge::S => (0, -1),
            Edge::W => (-1, 0),
        }
    }

    /// Outward unit normal of this edge.
    pub fn normal(self) -> (f64, f64) {
        match self {
            Edge::N => (0.0, 1.0),
            Edge::E => (1.0, 0.0),
            Edge::S => (0.0, -1.0),
            Edge::W => (-1.0, 0.0),
        }
    }
}

/// Tag set of the tile vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TileKind {
    Land,
    ChannelH,
    ChannelV,
    TurnNE,
    TurnNW,
    TurnSE,
    TurnSW,
    TeeSplit,
    DeadEnd,
}

/// Shape of a tile field. The four turn tags already fix their corner;
/// tees and dead ends carry their port placement explicitly since a single
/// sign cannot distinguish the rotations the canal router needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TileShape {
    Land,
    ChannelH,
    ChannelV,
    TurnNE,
    TurnNW,
    TurnSE,
    TurnSW,
    Tee { inlet: Edge, branch: Edge, merge: bool },
    DeadEnd { mouth: Edge, emit: bool },
}

/// A placed tile field: shape plus direction sign (`-1` runs every channel
/// backwards).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileField {
    pub shape: TileShape,
    pub dir: i8,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PortState {
    Closed,
    /// Sign of the normal component on the edge: `+1` outflow, `-1` inflow.
    Open { sign: i8 },
}

impl TileField {
    pub fn land() -> Self {
        TileField {
            shape: TileShape::Land,
            dir: 1,
        }
    }

    pub fn kind(&self) -> TileKind {
        match self.shape {
            TileShape::Land => TileKind::Land,
            TileShape::ChannelH => TileKind::ChannelH,
            TileShape::ChannelV => TileKind::ChannelV,
            TileShape::TurnNE => TileKind::TurnNE,
            TileShape::TurnNW => TileKind::TurnNW,
            TileShape::TurnSE => TileKind::TurnSE,
            TileShape::TurnSW => TileKind::TurnSW,
            TileShape::Tee { .. } => TileKind::TeeSplit,
            TileShape::DeadEnd { .. } => TileKind::DeadEnd,
        }
    }

    /// Straight channel carrying flow `from -> to` (opposite edges).
    pub fn channel(from: Edge, to: Edge) -> Self {
        debug_assert_eq!(from.opposite(), to);
        match (from, to) {
            (Edge::W, Edge::E) => TileField { shape: TileShape::ChannelH, dir: 1 },
            (Edge::E, Edge::W) => TileField { shape: TileShape::ChannelH, dir: -1 },
            (Edge::S, Edge::N) => TileField { shape: TileShape::ChannelV, dir: 1 },
            (Edge::N, Edge::S) => TileField { shape: TileShape::ChannelV, dir: -1 },
            _ => unreachable!(),
        }
    }

    /// Quarter turn carrying flow `from -> to` (adjacent edges).
    pub fn turn(from: Edge, to: Edge) -> Self {
        let (shape, canonical) = corner_tag(from, to);
        let dir = if canonical == (from, to) { 1 } else { -1 };
        TileField { shape, dir }
    }

    pub fn tee(inlet: Edge, branch: Edge, merge: bool) -> Self {
        debug_assert_ne!(inlet, branch);
        debug_assert_ne!(inlet.opposite(), branch);
        TileField {
            shape: TileShape::Tee { inlet, branch, merge },
            dir: 1,
        }
    }

    pub fn dead_end(mouth: Edge, emit: bool) -> Self {
        TileField {
            shape: TileShape::DeadEnd { mouth, emit },
            dir: 1,
        }
    }

    /// Port descriptors on all four edges, indexed by [`Edge::index`].
    pub fn ports(&self) -> [PortState; 4] {
        let mut out = [PortState::Closed; 4];
        let mut set = |edge: Edge, sign: i8| {
            out[edge.index()] = PortState::Open {
                sign: sign * self.dir,
            };
        };
        match self.shape {
            TileShape::Land => {}
            TileShape::ChannelH => {
                set(Edge::W, -1);
                set(Edge::E, 1);
            }
            TileShape::ChannelV => {
                set(Edge::S, -1);
                set(Edge::N, 1);
            }
            TileShape::TurnNE => {
                set(Edge::N, -1);
                set(Edge::E, 1);
            }
            TileShape::TurnNW => {
                set(Edge::W, -1);
                set(Edge::N, 1);
            }
            TileShape::TurnSW => {
                set(Edge::S, -1);
                set(Edge::W, 1);
            }
            TileShape::TurnSE => {
                set(Edge::E, -1);
                set(Edge::S, 1);
            }
            TileShape::Tee { inlet, branch, merge } => {
                if merge {
                    set(inlet, -1);
                    set(branch, -1);
                    set(inlet.opposite(), 1);
                } else {
                    set(inlet, -1);
                    set(branch, 1);
                    set(inlet.opposite(), 1);
                }
            }
            TileShape::DeadEnd { mouth, emit } => {
                set(mouth, if emit { 1 } else { -1 });
            }
        }
        out
    }

    /// Fraction of the cell amplitude carried by the port on `edge`.
    pub fn port_fraction(&self, edge: Edge) -> f64 {
        match self.shape {
            TileShape::Tee { inlet, branch, merge } => {
                if merge {
                    if edge == branch {
                        TEE_BRANCH
                    } else if edge == inlet {
                        TEE_MAIN
                    } else if edge == inlet.opposite() {
                        1.0
                    } else {
                        0.0
                    }
                } else if edge == branch {
                    TEE_BRANCH
                } else if edge == inlet {
                    1.0
                } else if edge == inlet.opposite() {
                    TEE_MAIN
                } else {
                    0.0
                }
            }
            _ => match self.ports()[edge.index()] {
                PortState::Closed => 0.0,
                PortState::Open { .. } => 1.0,
            },
        }
    }

    /// Whether `u` lies in the open channel region (where the field is
    /// nonzero); the complement inside the cell is wall.
    pub fn in_channel(&self, u: Point) -> bool {
        let mid = |t: f64| t > 1.0 / 3.0 && t < 2.0 / 3.0;
        match self.shape {
            TileShape::Land => false,
            TileShape::ChannelH => mid(u.y),
            TileShape::ChannelV => mid(u.x),
            TileShape::TurnNE => mid(corner_radius(Edge::N, Edge::E, u)),
            TileShape::TurnNW => mid(corner_radius(Edge::N, Edge::W, u)),
            TileShape::TurnSE => mid(corner_radius(Edge::S, Edge::E, u)),
            TileShape::TurnSW => mid(corner_radius(Edge::S, Edge::W, u)),
            TileShape::Tee { inlet, branch, .. } => {
                let straight = match inlet {
                    Edge::W | Edge::E => mid(u.y),
                    Edge::N | Edge::S => mid(u.x),
                };
                straight || mid(corner_radius(inlet, branch, u))
            }
            TileShape::DeadEnd { mouth, .. } => {
                let (cross, along) = dead_end_coords(mouth, u);
                mid(cross) && along < 2.0 / 3.0
            }
        }
    }
}

fn corner_tag(a: Edge, b: Edge) -> (TileShape, (Edge, Edge)) {
    // Canonical flow direction of each turn tag is counterclockwise around
    // its corner.
    use Edge::*;
    match (a, b) {
        (N, E) | (E, N) => (TileShape::TurnNE, (N, E)),
        (W, N) | (N, W) => (TileShape::TurnNW, (W, N)),
        (S, W) | (W, S) => (TileShape::TurnSW, (S, W)),
        (E, S) | (S, E) => (TileShape::TurnSE, (E, S)),
        _ => panic!("turn needs adjacent edges"),
    }
}

fn corner_of(a: Edge, b: Edge) -> (f64, f64) {
    use Edge::*;
    let x = if a == E || b == E { 1.0 } else { 0.0 };
    let y = if a == N || b == N { 1.0 } else { 0.0 };
    let _ = (matches!(a, W | S), matches!(b, W | S));
    (x, y)
}

fn corner_radius(a: Edge, b: Edge, u: Point) -> f64 {
    let (cx, cy) = corner_of(a, b);
    hypot(u.x - cx, u.y - cy)
}

/// Tangential quarter-annulus flow from edge `from` into edge `to`.
fn corner_flow(from: Edge, to: Edge, u: Point) -> (f64, f64) {
    let (cx, cy) = corner_of(from, to);
    let dx = u.x - cx;
    let dy = u.y - cy;
    let r = hypot(dx, dy);
    if r < 1e-300 {
        return (0.0, 0.0);
    }
    let mag = psi_mid(r);
    if mag == 0.0 {
        return (0.0, 0.0);
    }
    // Counterclockwise tangential direction around the corner.
    let tx = -dy / r;
    let ty = dx / r;
    let (_, canonical) = corner_tag(from, to);
    let sign = if canonical == (from, to) { 1.0 } else { -1.0 };
    (sign * mag * tx, sign * mag * ty)
}

fn straight_flow(from: Edge, u: Point) -> (f64, f64) {
    match from {
        Edge::W => (psi_mid(u.y), 0.0),
        Edge::E => (-psi_mid(u.y), 0.0),
        Edge::S => (0.0, psi_mid(u.x)),
        Edge::N => (0.0, -psi_mid(u.x)),
    }
}

fn dead_end_coords(mouth: Edge, u: Point) -> (f64, f64) {
    // (cross-channel coordinate, distance from the mouth edge)
    match mouth {
        Edge::W => (u.y, u.x),
        Edge::E => (u.y, 1.0 - u.x),
        Edge::S => (u.x, u.y),
        Edge::N => (u.x, 1.0 - u.y),
    }
}

/// Evaluate the unit-amplitude tile field at `u` in the cell square
/// `[0,1]^2`. The placed scene scales this by the cell amplitude and the
/// global speed scale.
pub fn eval_tile(tile: &TileField, u: Point) -> (f64, f64) {
    let (vx, vy) = match tile.shape {
        TileShape::Land => (0.0, 0.0),
        TileShape::ChannelH => straight_flow(Edge::W, u),
        TileShape::ChannelV => straight_flow(Edge::S, u),
        TileShape::TurnNE => corner_flow(Edge::N, Edge::E, u),
        TileShape::TurnNW => corner_flow(Edge::W, Edge::N, u),
        TileShape::TurnSW => corner_flow(Edge::S, Edge::W, u),
        TileShape::TurnSE => corner_flow(Edge::E, Edge::S, u),
        TileShape::Tee { inlet, branch, merge } => {
            let s = straight_flow(inlet, u);
            let c = if merge {
                corner_flow(branch, inlet.opposite(), u)
            } else {
                corner_flow(inlet, branch, u)
            };
            (TEE_MAIN * s.0 + TEE_BRANCH * c.0, TEE_MAIN * s.1 + TEE_BRANCH * c.1)
        }
        TileShape::DeadEnd { mouth, emit } => {
            let (cross, along) = dead_end_coords(mouth, u);
            let mag = psi_mid(cross) * retract_ramp(along);
            let (nx, ny) = mouth.normal();
            // Absorbing: flow enters through the mouth (against the outward
            // normal) and decays toward the closed end.
            let s = if emit { 1.0 } else { -1.0 };
            (s * mag * nx, s * mag * ny)
        }
    };
    let d = tile.dir as f64;
    (d * vx, d * vy)
}

/// Edge flux descriptor used to certify inter-cell continuity: two adjacent
/// cells are compatible iff the shared edge carries equal descriptors with
/// opposite outward signs (and matching amplitudes, checked by the router).
pub fn port_profile(tile: &TileField, edge: Edge) -> PortState {
    tile.ports()[edge.index()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::abs;
    use alloc::vec::Vec;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn land_is_zero() {
        let t = TileField::land();
        for k in 0..25 {
            let u = p((k % 5) as f64 / 4.0, (k / 5) as f64 / 4.0);
            assert_eq!(eval_tile(&t, u), (0.0, 0.0));
        }
    }

    #[test]
    fn channel_peak_matches_profile() {
        let t = TileField::channel(Edge::W, Edge::E);
        assert_eq!(eval_tile(&t, p(0.5, 0.5)), (1.0, 0.0));
        // wall region outside the middle third
        assert_eq!(eval_tile(&t, p(0.5, 0.2)), (0.0, 0.0));
    }

    #[test]
    fn land_ports_closed_channel_ports_signed() {
        assert_eq!(port_profile(&TileField::land(), Edge::N), PortState::Closed);
        let t = TileField::channel(Edge::W, Edge::E);
        assert_eq!(port_profile(&t, Edge::E), PortState::Open { sign: 1 });
        assert_eq!(port_profile(&t, Edge::W), PortState::Open { sign: -1 });
        assert_eq!(port_profile(&t, Edge::N), PortState::Closed);
    }

    #[test]
    fn turn_ne_south_edge_closed() {
        let t = TileField {
            shape: TileShape::TurnNE,
            dir: 1,
        };
        assert_eq!(port_profile(&t, Edge::S), PortState::Closed);
        // sampled: normal component on the S edge is zero
        for k in 0..=16 {
            let u = p(k as f64 / 16.0, 0.0);
            let v = eval_tile(&t, u);
            assert_eq!(v.1, 0.0);
            assert_eq!(v.0, 0.0);
        }
    }

    #[test]
    fn ports_match_sampled_normal_flux() {
        let fields: Vec<TileField> = alloc::vec![
            TileField::channel(Edge::W, Edge::E),
            TileField::channel(Edge::N, Edge::S),
            TileField::turn(Edge::N, Edge::E),
            TileField::turn(Edge::E, Edge::N),
            TileField::turn(Edge::W, Edge::S),
            TileField::tee(Edge::W, Edge::N, false),
            TileField::tee(Edge::W, Edge::N, true),
            TileField::tee(Edge::E, Edge::S, false),
            TileField::dead_end(Edge::W, false),
            TileField::dead_end(Edge::E, true),
        ];
        for f in &fields {
            for edge in Edge::ALL {
                let (nx, ny) = edge.normal();
                let mut max_flux = 0.0f64;
                for k in 1..16 {
                    let s = k as f64 / 16.0;
                    let u = match edge {
                        Edge::N => p(s, 1.0),
                        Edge::S => p(s, 0.0),
                        Edge::E => p(1.0, s),
                        Edge::W => p(0.0, s),
                    };
                    let v = eval_tile(f, u);
                    let flux = v.0 * nx + v.1 * ny;
                    if abs(flux) > abs(max_flux) {
                        max_flux = flux;
                    }
                    // Tangential component vanishes on every edge.
                    let tang = v.0 * ny - v.1 * nx;
                    assert!(
                        abs(tang) < 1e-12,
                        "{:?} edge {:?} tangential {}",
                        f,
                        edge,
                        tang
                    );
                }
                match port_profile(f, edge) {
                    PortState::Closed => {
                        assert_eq!(max_flux, 0.0, "{:?} edge {:?} should be closed", f, edge)
                    }
                    PortState::Open { sign } => {
                        assert!(
                            max_flux * sign as f64 > 0.0,
                            "{:?} edge {:?} sign mismatch ({})",
                            f,
                            edge,
                            max_flux
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tee_inlet_carries_full_profile() {
        // split: the two outgoing fractions re-add to the inlet profile
        let t = TileField::tee(Edge::W, Edge::N, false);
        for k in 1..16 {
            let y = k as f64 / 16.0;
            let v = eval_tile(&t, p(0.0, y));
            assert!(abs(v.0 - psi_mid(y)) < 1e-12, "inlet profile at y={}", y);
        }
        assert!(abs(t.port_fraction(Edge::W) - 1.0) < 1e-15);
        assert!(abs(t.port_fraction(Edge::E) - TEE_MAIN) < 1e-15);
        assert!(abs(t.port_fraction(Edge::N) - TEE_BRANCH) < 1e-15);
    }

    #[test]
    fn adjacent_channel_turn_agree_exactly_on_shared_edge() {
        // channel cell's E edge against a turn cell's W edge, dyadic samples
        let left = TileField::channel(Edge::W, Edge::E);
        let right = TileField::turn(Edge::W, Edge::N);
        for k in 1..16 {
            let y = k as f64 / 16.0;
            let vl = eval_tile(&left, p(1.0, y));
            let vr = eval_tile(&right, p(0.0, y));
            assert_eq!(vl, vr, "edge mismatch at y={}", y);
        }
    }

    #[test]
    fn dead_end_retracts() {
        let t = TileField::dead_end(Edge::W, false);
        let near_mouth = eval_tile(&t, p(0.1, 0.5));
        let near_end = eval_tile(&t, p(0.62, 0.5));
        assert!(near_mouth.0 > 0.0);
        assert!(near_end.0 > 0.0);
        assert!(near_end.0 < near_mouth.0);
        assert_eq!(eval_tile(&t, p(0.7, 0.5)), (0.0, 0.0));
        // emitting variant runs outward
        let e = TileField::dead_end(Edge::W, true);
        assert!(eval_tile(&e, p(0.1, 0.5)).0 < 0.0);
    }

    #[test]
    fn zero_set_is_exactly_the_walls() {
        let fields = alloc::vec![
            TileField::channel(Edge::W, Edge::E),
            TileField::turn(Edge::N, Edge::E),
            TileField::tee(Edge::W, Edge::S, false),
            TileField::dead_end(Edge::N, false),
        ];
        for f in &fields {
            for a in 0..=24 {
                for b in 0..=24 {
                    let u = p(a as f64 / 24.0 + 0.013, b as f64 / 24.0 + 0.017);
                    if u.x >= 1.0 || u.y >= 1.0 {
                        continue;
                    }
                    let v = eval_tile(f, u);
                    let zero = v.0 == 0.0 && v.1 == 0.0;
                    assert_eq!(
                        zero,
                        !f.in_channel(u),
                        "{:?} at ({}, {})",
                        f,
                        u.x,
                        u.y
                    );
                }
            }
        }
    }

    #[test]
    fn magnitude_bounded_by_one() {
        let fields = alloc::vec![
            TileField::channel(Edge::S, Edge::N),
            TileField::turn(Edge::S, Edge::W),
            TileField::tee(Edge::N, Edge::E, true),
            TileField::dead_end(Edge::S, true),
        ];
        for f in &fields {
            for a in 0..40 {
                for b in 0..40 {
                    let u = p(a as f64 / 39.0, b as f64 / 39.0);
                    let v = eval_tile(f, u);
                    assert!(hypot(v.0, v.1) <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn lipschitz_within_64() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let fields = alloc::vec![
            TileField::channel(Edge::W, Edge::E),
            TileField::turn(Edge::N, Edge::E),
            TileField::turn(Edge::S, Edge::E),
            TileField::tee(Edge::W, Edge::N, false),
            TileField::tee(Edge::S, Edge::W, true),
            TileField::dead_end(Edge::E, false),
        ];
        for f in &fields {
            for _ in 0..4000 {
                let u1 = p(next(), next());
                let u2 = p(
                    (u1.x + (next() - 0.5) * 0.02).clamp(0.0, 1.0),
                    (u1.y + (next() - 0.5) * 0.02).clamp(0.0, 1.0),
                );
                let v1 = eval_tile(f, u1);
                let v2 = eval_tile(f, u2);
                let dv = hypot(v1.0 - v2.0, v1.1 - v2.1);
                let du = hypot(u1.x - u2.x, u1.y - u2.y);
                assert!(dv <= 64.0 * du + 1e-12, "{:?}: {} > 64*{}", f, dv, du);
            }
        }
    }
}
