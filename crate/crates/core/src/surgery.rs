//! Scene-level transforms of the sphere-attractor pipeline: cut a closed
//! transversal open, reverse the part between the singular spine and the
//! cut, collapse the new boundary circles into source poles, and replace
//! center-disk lakes by source disks.

use crate::field::{
    AppliedSurgery, BoundaryEnd, Builtin, FlowScene, Layer, LayerSource, PoleRole, SceneError,
};
use crate::geometry::{Axis, Point, Rect, Surface, SurfaceKind, Transversal};
use crate::math;
use crate::wada::{ConstructionPlan, DigError, LakeType, PlanError, TileMap};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurgeryStep {
    CutTransversal,
    ReverseRight,
    CollapseBoundary,
    ReplaceDiskWithSource,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurgeryError {
    /// The claimed transversal fails its sign certificate.
    NotTransverse,
    /// Source pole requested on a boundary the flow runs into.
    IncompatiblePoleRole,
    NotATorus,
    NotACylinder,
    /// Lake id does not name a disk lake of the scene.
    BadLake(u8),
    /// Corollary B needs at least two complementary domains.
    BadDomainCount(usize),
    Plan(PlanError),
    Dig(DigError),
    Scene(SceneError),
}

impl fmt::Display for SurgeryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurgeryError::NotTransverse => write!(f, "circle is not transverse to the flow"),
            SurgeryError::IncompatiblePoleRole => {
                write!(f, "source pole requested on an inflow boundary")
            }
            SurgeryError::NotATorus => write!(f, "operation requires a torus scene"),
            SurgeryError::NotACylinder => write!(f, "operation requires a cylinder scene"),
            SurgeryError::BadLake(k) => write!(f, "lake {} is not a replaceable disk", k),
            SurgeryError::BadDomainCount(n) => {
                write!(f, "corollary pipeline needs n >= 2 domains, got {}", n)
            }
            SurgeryError::Plan(e) => write!(f, "plan error: {}", e),
            SurgeryError::Dig(e) => write!(f, "dig error: {}", e),
            SurgeryError::Scene(e) => write!(f, "scene error: {}", e),
        }
    }
}

/// Open the torus along a certified closed transversal. The resulting
/// cylinder keeps the field-frame coordinates; its bounded axis runs from
/// one copy of the circle to the other, so evaluation away from the cut is
/// bit-identical.
pub fn cut_transversal(scene: &FlowScene, circle: Transversal) -> Result<FlowScene, SurgeryError> {
    if !matches!(scene.surface.kind, SurfaceKind::Torus) {
        return Err(SurgeryError::NotATorus);
    }
    if !scene.certify_transversal(&circle, 729) {
        return Err(SurgeryError::NotTransverse);
    }
    let mut s = scene.clone();
    s.surface = Surface::cylinder(circle.axis);
    match circle.axis {
        Axis::X => s.coord_offset.x = math::wrap01(s.coord_offset.x + circle.value),
        Axis::Y => s.coord_offset.y = math::wrap01(s.coord_offset.y + circle.value),
    }
    s.surgeries.push(AppliedSurgery::Cut {
        axis: circle.axis,
        value: circle.value,
    });
    Ok(s)
}

/// Collapse one boundary circle of a cylinder into a pole. With `Source`
/// the boundary flow must point into the surface (the collapsed point
/// becomes the alpha-limit of nearby orbits); the surface becomes a sphere
/// once both circles are collapsed.
pub fn collapse_boundary(
    scene: &FlowScene,
    end: BoundaryEnd,
    role: PoleRole,
) -> Result<FlowScene, SurgeryError> {
    if !matches!(scene.surface.kind, SurfaceKind::Cylinder) {
        return Err(SurgeryError::NotACylinder);
    }
    let ext = match scene.surface.bounded {
        Axis::X => scene.surface.width,
        Axis::Y => scene.surface.height,
    };
    let b = match end {
        BoundaryEnd::Bottom => 1e-9,
        BoundaryEnd::Top => ext - 1e-9,
    };
    // Inward direction along the bounded axis.
    let inward = match end {
        BoundaryEnd::Bottom => 1.0,
        BoundaryEnd::Top => -1.0,
    };
    let mut saw_flow = false;
    for k in 0..729 {
        let along = (k as f64 + 0.5) / 729.0;
        let p = match scene.surface.bounded {
            Axis::X => Point::new(b, along),
            Axis::Y => Point::new(along, b),
        };
        let v = scene.eval(p);
        let normal = match scene.surface.bounded {
            Axis::X => v.0,
            Axis::Y => v.1,
        };
        if normal * inward < 0.0 {
            if matches!(role, PoleRole::Source) {
                return Err(SurgeryError::IncompatiblePoleRole);
            }
        }
        if normal != 0.0 {
            saw_flow = true;
        }
    }
    if matches!(role, PoleRole::Source) && !saw_flow {
        return Err(SurgeryError::IncompatiblePoleRole);
    }
    let mut s = scene.clone();
    let slot = match end {
        BoundaryEnd::Bottom => 0,
        BoundaryEnd::Top => 1,
    };
    s.poles[slot] = Some(role);
    s.surgeries.push(AppliedSurgery::Collapse { end, role });
    if s.poles[0].is_some() && s.poles[1].is_some() {
        s.surface = Surface::sphere(s.surface.bounded);
    }
    if matches!(role, PoleRole::Source) {
        let pts = s.pole_points();
        if let Some((p, _)) = pts.last() {
            s.sources.push(*p);
        }
    }
    Ok(s)
}

/// Replace a center-disk lake's core with a radial source disk layer. The
/// disk is inscribed in the lake's root ring block, so it covers the ring
/// channels without touching land.
pub fn replace_disk_with_source(
    scene: &FlowScene,
    lake: u8,
) -> Result<FlowScene, SurgeryError> {
    let map = scene.tile_map().ok_or(SurgeryError::BadLake(lake))?;
    if lake as usize > map.plan.n_lakes
        || matches!(
            map.plan.lake_types[lake as usize - 1],
            LakeType::TransverseAnnulus
        )
    {
        return Err(SurgeryError::BadLake(lake));
    }
    let rect = scene.tiled_rect().ok_or(SurgeryError::BadLake(lake))?;
    let (center, radius) = disk_core(map, &rect, lake).ok_or(SurgeryError::BadLake(lake))?;
    let mut s = scene.clone();
    s.layers.push(Layer {
        domain: None,
        source: LayerSource::Builtin(Builtin::SourceDisk { center, r: radius }),
    });
    s.sources.push(center);
    Ok(s)
}

/// Center and radius of the lake's root block (the cells carved on its
/// first day).
fn disk_core(map: &TileMap, rect: &Rect, lake: u8) -> Option<(Point, f64)> {
    let day = lake as usize; // round one: lake k roots on day k
    if day >= map.days() + 1 {
        return None;
    }
    let cells = map.day_cells(day);
    if cells.is_empty() {
        return None;
    }
    let n = map.n;
    let tau = rect.w / n as f64;
    let (mut c0, mut c1, mut r0, mut r1) = (usize::MAX, 0usize, usize::MAX, 0usize);
    for &i in cells {
        let col = i % n;
        let row = i / n;
        c0 = c0.min(col);
        c1 = c1.max(col);
        r0 = r0.min(row);
        r1 = r1.max(row);
    }
    let center = Point::new(
        rect.x0 + (c0 + c1 + 1) as f64 / 2.0 * tau,
        rect.y0 + (r0 + r1 + 1) as f64 / 2.0 * tau,
    );
    // Inscribed in the block's shorter span.
    let half_h = (r1 - r0 + 1) as f64 * tau / 2.0;
    let half_w = (c1 - c0 + 1) as f64 * tau / 2.0;
    Some((center, math::min(half_h, half_w)))
}

/// The Corollary-B construction: the Example-4.3 torus scene with
/// `n_domains - 2` interior disk lakes plus the transverse-annulus lake,
/// disks replaced by sources, an essential transversal cut open, the part
/// between the spine and the cut reversed, and both boundary circles
/// collapsed into source poles.
pub fn corollary_b_pipeline(n_domains: usize, depth: usize) -> Result<FlowScene, SurgeryError> {
    if n_domains < 2 {
        return Err(SurgeryError::BadDomainCount(n_domains));
    }
    let plan =
        ConstructionPlan::standard(n_domains - 2, depth).map_err(SurgeryError::Plan)?;
    let map = crate::wada::schedule_with(&plan, true).map_err(SurgeryError::Dig)?;
    pipeline_from_torus(FlowScene::from_tile_map(map))
}

/// Run the surgery half of the pipeline on an already built Wada torus
/// scene.
pub fn pipeline_from_torus(torus: FlowScene) -> Result<FlowScene, SurgeryError> {
    let mut scene = torus;
    if let Some(map) = scene.tile_map() {
        let disks: Vec<u8> = (1..=map.plan.n_lakes as u8)
            .filter(|&k| {
                !matches!(
                    map.plan.lake_types[k as usize - 1],
                    LakeType::TransverseAnnulus
                )
            })
            .collect();
        for lake in disks {
            scene = replace_disk_with_source(&scene, lake)?;
        }
    }
    // The ambient arc is centered on x = 0; the spine center sits at 0.5.
    let cut = Transversal::vertical(0.0);
    let scene = cut_transversal(&scene, cut)?;
    let scene = scene
        .reverse_region(0.5, 1.0)
        .map_err(SurgeryError::Scene)?;
    let scene = collapse_boundary(&scene, BoundaryEnd::Bottom, PoleRole::Source)?;
    let scene = collapse_boundary(&scene, BoundaryEnd::Top, PoleRole::Source)?;
    Ok(scene)
}

/// Convenience census over the scene's zero set: flood-fill count of
/// nonzero-field domains. See `analysis::basin_census` for the full report.
pub fn count_complementary_domains(scene: &FlowScene, res: usize) -> usize {
    crate::analysis::basin_census(scene, res).n_domains
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FlowScene;

    #[test]
    fn cut_requires_transversality() {
        // y = 0 is the limit cycle itself: tangent flow, not transverse.
        let s = FlowScene::limit_cycle_torus();
        let err = cut_transversal(&s, Transversal::horizontal(0.0)).unwrap_err();
        assert_eq!(err, SurgeryError::NotTransverse);
    }

    #[test]
    fn cut_irrational_preserves_eval() {
        let s = FlowScene::irrational(core::f64::consts::SQRT_2);
        let cut = cut_transversal(&s, Transversal::vertical(0.0)).unwrap();
        assert!(matches!(cut.surface.kind, SurfaceKind::Cylinder));
        let p = Point::new(0.5, 0.3);
        assert_eq!(s.eval(p), cut.eval(p));
    }

    #[test]
    fn collapse_both_gives_sphere() {
        let s = FlowScene::irrational(1.5);
        let cyl = cut_transversal(&s, Transversal::vertical(0.0)).unwrap();
        // flow (1, 1.5): bottom (x=0) inflow into the surface -> source ok;
        // top boundary has outgoing flow -> source must be rejected.
        let c1 = collapse_boundary(&cyl, BoundaryEnd::Bottom, PoleRole::Source).unwrap();
        let err = collapse_boundary(&c1, BoundaryEnd::Top, PoleRole::Source).unwrap_err();
        assert_eq!(err, SurgeryError::IncompatiblePoleRole);
        let done = collapse_boundary(&c1, BoundaryEnd::Top, PoleRole::Singular).unwrap();
        assert!(matches!(done.surface.kind, SurfaceKind::Sphere));
        assert_eq!(done.surface.euler_characteristic(), 2);
    }

    #[test]
    fn pipeline_rejects_single_domain() {
        let err = corollary_b_pipeline(1, 2).unwrap_err();
        assert_eq!(err, SurgeryError::BadDomainCount(1));
    }

    #[test]
    fn pipeline_builds_sphere() {
        let sphere = corollary_b_pipeline(2, 2).unwrap();
        assert!(matches!(sphere.surface.kind, SurfaceKind::Sphere));
        assert_eq!(sphere.poles, [Some(PoleRole::Source), Some(PoleRole::Source)]);
    }
}
