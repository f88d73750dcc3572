//! Flows on compact surfaces with Lakes-of-Wada limit sets.
//!
//! This crate builds composite vector fields on the torus, cylinder and
//! sphere: a host transverse-annulus flow, a ternary tile system realizing
//! the Wada digging construction, and the surgery pipeline (cut a closed
//! transversal, reverse a part, collapse boundaries into source poles) that
//! turns the torus flow into a sphere flow whose attractor has N
//! complementary domains sharing one boundary continuum.
//!
//! The companion `wadaflow` binary adds the scene description language,
//! renders and report files; everything here is pure computation over
//! `f64` coordinates and grid cells.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dynamics;
pub mod field;
pub mod geometry;
pub mod math;
pub mod rng;
pub mod surgery;
pub mod tiles;
pub mod wada;

pub use analysis::{
    basin_census, classify_orbit, classify_theorem_a, estimate_limit_sets, hausdorff_cells,
    is_time_symmetric, AnalysisError, AnalysisParams, BasinCensus, ClassificationReport,
    GlobalCase, LimitSetEstimate, OccupancyGrid, SeedReport, Verdict,
};
pub use dynamics::{
    crossings, integrate, integrate_each, return_map, Direction, ReturnMap, Termination,
    Trajectory,
};
pub use field::{
    AppliedSurgery, BoundaryEnd, Builtin, FlowScene, HostGeometry, Layer, LayerSource, PoleRole,
    SceneError, D_RECT,
};
pub use geometry::{
    cell_bounds, dist, locate, Axis, CellAddress, Located, Point, Rect, Surface, SurfaceKind,
    Transversal,
};
pub use surgery::{
    collapse_boundary, corollary_b_pipeline, cut_transversal, pipeline_from_torus,
    replace_disk_with_source, SurgeryError, SurgeryStep,
};
pub use tiles::{eval_tile, port_profile, Edge, PortState, TileField, TileKind, TileShape};
pub use wada::{
    schedule, schedule_trace, wada_certificate, Cell, ConstructionPlan, DigError, GridParseError,
    LakeGrid, LakeType, PlanError, TileMap, WadaCertificate,
};
