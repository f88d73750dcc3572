//! The digging scheduler: produces, for N lakes and a chosen depth, the tile
//! map realizing the Lakes-of-Wada construction with its round-robin
//! schedule.
//!
//! Layout invariants maintained by the router:
//!
//! * One spine column of Land crosses the map; together with the off-map
//!   band it realizes the host flow's singular circle. The transverse
//!   annulus lake digs two half-canals along the mouth row that meet the
//!   spine from both sides in a pair of retracting dead ends (the seam).
//! * Disk lakes are closed channel loops (rings); at depth 1, where a ring
//!   cannot fit, they degenerate to emit/absorb pocket chains.
//! * Every later extension is a "tooth": a two-lane hairpin bypass rooted
//!   in a split/merge tee pair on the lake's previous extension, so the
//!   flow through the lake splits around the new area and rejoins. Water
//!   only grows, land stays one 8-connected component at every day, and a
//!   new extension attaches by open ports only to the previous one.

use crate::rng::SplitMix64;
use crate::tiles::{Edge, PortState, TileField, TileShape};
use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LakeType {
    TransverseAnnulus,
    CenterDisk,
    SourceDisk,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanError {
    NoLakes,
    BadDepth(usize),
    TypeCountMismatch,
    /// Exactly one lake must be the transverse annulus.
    AnnulusCount(usize),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::NoLakes => write!(f, "plan needs at least one lake"),
            PlanError::BadDepth(d) => write!(f, "depth {} outside 1..=12", d),
            PlanError::TypeCountMismatch => write!(f, "lake_types length must equal n_lakes"),
            PlanError::AnnulusCount(k) => {
                write!(f, "exactly one TransverseAnnulus lake required, got {}", k)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub n_lakes: usize,
    pub depth: usize,
    pub lake_types: Vec<LakeType>,
}

impl ConstructionPlan {
    /// Validated plan. The annulus lake conventionally comes first; any
    /// order is accepted as long as there is exactly one.
    pub fn new(lake_types: Vec<LakeType>, depth: usize) -> Result<Self, PlanError> {
        let plan = ConstructionPlan {
            n_lakes: lake_types.len(),
            depth,
            lake_types,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.n_lakes == 0 {
            return Err(PlanError::NoLakes);
        }
        if self.depth == 0 || self.depth > 12 {
            return Err(PlanError::BadDepth(self.depth));
        }
        if self.lake_types.len() != self.n_lakes {
            return Err(PlanError::TypeCountMismatch);
        }
        let annuli = self
            .lake_types
            .iter()
            .filter(|t| matches!(t, LakeType::TransverseAnnulus))
            .count();
        if annuli != 1 {
            return Err(PlanError::AnnulusCount(annuli));
        }
        Ok(())
    }

    /// Standard plan: one annulus plus `n_disks` center disks.
    pub fn standard(n_disks: usize, depth: usize) -> Result<Self, PlanError> {
        let mut types = vec![LakeType::TransverseAnnulus];
        types.extend(core::iter::repeat(LakeType::CenterDisk).take(n_disks));
        ConstructionPlan::new(types, depth)
    }

    pub fn annulus_lake(&self) -> u8 {
        self.lake_types
            .iter()
            .position(|t| matches!(t, LakeType::TransverseAnnulus))
            .map(|i| (i + 1) as u8)
            .unwrap_or(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Land,
    Water {
        lake: u8,
        day: u16,
        tile: TileField,
        amp: f64,
    },
}

impl Cell {
    pub fn is_land(&self) -> bool {
        matches!(self, Cell::Land)
    }

    pub fn lake(&self) -> Option<u8> {
        match self {
            Cell::Land => None,
            Cell::Water { lake, .. } => Some(*lake),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DigError {
    /// The canal router could not realize a lake root without disconnecting
    /// land; the construction is undersized for the plan.
    Infeasible { day: u16, lake: u8 },
}

impl fmt::Display for DigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigError::Infeasible { day, lake } => {
                write!(f, "infeasible dig on day {} for lake {}", day, lake)
            }
        }
    }
}

/// The full digging result: per-cell tile assignment plus the day index of
/// every water cell.
#[derive(Clone, Debug)]
pub struct TileMap {
    pub plan: ConstructionPlan,
    pub depth: usize,
    /// Grid side, `3^depth`.
    pub n: usize,
    /// Column of the singular spine (kept Land; the host circle crosses D
    /// here).
    pub spine_col: usize,
    /// Row carrying the annulus half-canals and the two boundary mouths.
    pub mouth_row: usize,
    /// Whether the whole spine column is kept Land (required by the
    /// reversal surgery); plain scenes only reserve the band anchors.
    pub reserve_spine: bool,
    cells: Vec<Cell>,
    /// Indices carved on each day (index 0 unused).
    day_cells: Vec<Vec<usize>>,
    /// Coverage targets that had no feasible dig, as (day, cell index).
    pub skipped_targets: Vec<(u16, usize)>,
}

impl TileMap {
    pub fn idx(&self, col: usize, row: usize) -> usize {
        row * self.n + col
    }

    pub fn cell(&self, col: usize, row: usize) -> &Cell {
        &self.cells[self.idx(col, row)]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn days(&self) -> usize {
        self.day_cells.len().saturating_sub(1)
    }

    pub fn day_cells(&self, day: usize) -> &[usize] {
        &self.day_cells[day]
    }

    pub fn water_count(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_land()).count()
    }

    /// All Land cells as (col, row).
    pub fn land_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for row in 0..self.n {
            for col in 0..self.n {
                if self.cell(col, row).is_land() {
                    out.push((col, row));
                }
            }
        }
        out
    }

    pub fn water_cells_of(&self, lake: u8) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for row in 0..self.n {
            for col in 0..self.n {
                if self.cell(col, row).lake() == Some(lake) {
                    out.push((col, row));
                }
            }
        }
        out
    }

    /// Deterministic pseudo-random seed cells inside a lake, preferring
    /// full-amplitude trunk channels (robust closed-loop streamlines).
    pub fn lake_seed_cells(&self, lake: u8, count: usize, salt: u64) -> Vec<(usize, usize)> {
        let mut trunk = Vec::new();
        let mut rest = Vec::new();
        for row in 0..self.n {
            for col in 0..self.n {
                if let Cell::Water { lake: l, tile, amp, .. } = self.cell(col, row) {
                    if *l != lake {
                        continue;
                    }
                    let plain = matches!(tile.shape, TileShape::ChannelH | TileShape::ChannelV);
                    if plain && *amp >= 0.5 {
                        trunk.push((col, row));
                    } else {
                        rest.push((col, row));
                    }
                }
            }
        }
        let mut rng = SplitMix64::new(salt);
        let mut pool = if trunk.len() >= count { trunk } else { { let mut t = trunk; t.extend(rest); t } };
        // Fisher-Yates
        for i in (1..pool.len()).rev() {
            let j = rng.next_range(i + 1);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }

    fn neighbors8(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n as isize;
        let col = (i % self.n) as isize;
        let row = (i / self.n) as isize;
        [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ]
        .into_iter()
        .filter_map(move |(dc, dr)| {
            let c = col + dc;
            let r = row + dr;
            if c >= 0 && c < n && r >= 0 && r < n {
                Some((r * n + c) as usize)
            } else {
                None
            }
        })
    }

    /// Land 8-connectivity, with the off-map band joining the north and
    /// south map edges near the spine. `removed` cells are treated as water.
    pub fn land_connected_without(&self, removed: &[usize]) -> bool {
        let is_removed = |i: usize| removed.contains(&i);
        let mut land_total = 0usize;
        for (i, c) in self.cells.iter().enumerate() {
            if c.is_land() && !is_removed(i) {
                land_total += 1;
            }
        }
        if land_total == 0 {
            return true;
        }
        // Virtual band node: 8-adjacent to edge-row cells within one column
        // of the spine (the band is one tile wide).
        let mut queue = VecDeque::new();
        let mut seen = vec![false; self.cells.len()];
        let lo = self.spine_col.saturating_sub(1);
        let hi = (self.spine_col + 1).min(self.n - 1);
        for col in lo..=hi {
            for row in [0, self.n - 1] {
                let i = self.idx(col, row);
                if self.cells[i].is_land() && !is_removed(i) && !seen[i] {
                    seen[i] = true;
                    queue.push_back(i);
                }
            }
        }
        if queue.is_empty() {
            // Band detached from all land: connected only if land itself is
            // one component; seed from the first land cell instead.
            if let Some(first) = self
                .cells
                .iter()
                .position(|c| c.is_land())
                .filter(|i| !is_removed(*i))
            {
                seen[first] = true;
                queue.push_back(first);
            }
        }
        let mut visited = 0usize;
        while let Some(i) = queue.pop_front() {
            visited += 1;
            for nb in self.neighbors8(i) {
                if !seen[nb] && self.cells[nb].is_land() && !is_removed(nb) {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        visited == land_total
    }

    pub fn land_connected(&self) -> bool {
        self.land_connected_without(&[])
    }

    /// Chebyshev distance from every cell to the nearest water of `lake`.
    /// For the annulus lake the off-map ambient ring (west and east of the
    /// map) counts as lake water, since the lake is rooted there.
    pub fn lake_distance(&self, lake: u8) -> Vec<u32> {
        let n = self.n;
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.lake() == Some(lake) {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        if self.plan.annulus_lake() == lake {
            for row in 0..n {
                for col in 0..n {
                    let d = (col + 1).min(n - col) as u32;
                    let i = self.idx(col, row);
                    if d < dist[i] {
                        dist[i] = d;
                    }
                }
            }
            // Seed a BFS frontier from every cell whose distance came from
            // the ambient.
            for i in 0..n * n {
                if dist[i] != u32::MAX && dist[i] != 0 {
                    queue.push_back(i);
                }
            }
        }
        while let Some(i) = queue.pop_front() {
            let base = dist[i];
            for nb in self.neighbors8(i) {
                if dist[nb] > base + 1 {
                    dist[nb] = base + 1;
                    queue.push_back(nb);
                }
            }
        }
        dist
    }

    /// Maximum over land cells of the Chebyshev distance to `lake`.
    pub fn max_land_distance(&self, lake: u8) -> u32 {
        let dist = self.lake_distance(lake);
        let mut worst = 0;
        for (i, c) in self.cells.iter().enumerate() {
            if c.is_land() {
                worst = worst.max(dist[i]);
            }
        }
        worst
    }

    /// Water components under open-port connectivity; mouth ports on the
    /// west/east map edges join through the ambient annulus (one shared
    /// component).
    pub fn water_components(&self) -> usize {
        let n = self.n;
        let mut comp = vec![usize::MAX; n * n];
        let mut count = 0usize;
        let mut ambient_comp: Option<usize> = None;
        for start in 0..n * n {
            if self.cells[start].is_land() || comp[start] != usize::MAX {
                continue;
            }
            let id = count;
            count += 1;
            let mut queue = VecDeque::new();
            comp[start] = id;
            queue.push_back(start);
            let mut touches_ambient = false;
            while let Some(i) = queue.pop_front() {
                let col = i % n;
                let row = i / n;
                let tile = match &self.cells[i] {
                    Cell::Water { tile, .. } => *tile,
                    Cell::Land => continue,
                };
                for edge in Edge::ALL {
                    let port = tile.ports()[edge.index()];
                    if matches!(port, PortState::Closed) {
                        continue;
                    }
                    let (dc, dr) = edge.step();
                    let c2 = col as isize + dc;
                    let r2 = row as isize + dr;
                    if c2 < 0 || c2 >= n as isize {
                        touches_ambient = true;
                        continue;
                    }
                    if r2 < 0 || r2 >= n as isize {
                        continue;
                    }
                    let j = (r2 as usize) * n + c2 as usize;
                    if comp[j] != usize::MAX {
                        continue;
                    }
                    if let Cell::Water { tile: t2, .. } = &self.cells[j] {
                        if matches!(t2.ports()[edge.opposite().index()], PortState::Open { .. }) {
                            comp[j] = id;
                            queue.push_back(j);
                        }
                    }
                }
            }
            if touches_ambient {
                match ambient_comp {
                    None => ambient_comp = Some(id),
                    Some(_) => count -= 1, // merged through the ambient
                }
            }
        }
        count
    }

    /// Serialize as the `wada v1` text grid: one row per line (top row
    /// first), `#` for Land and the lake digit for water.
    pub fn to_text(&self) -> String {
        let mut s = format!("wada v1 N={} depth={}\n", self.plan.n_lakes, self.depth);
        for row in (0..self.n).rev() {
            for col in 0..self.n {
                match self.cell(col, row) {
                    Cell::Land => s.push('#'),
                    Cell::Water { lake, .. } => s.push((b'0' + *lake) as char),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Pattern-level view parsed back from the text grid (tiles are not part of
/// the interchange format).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LakeGrid {
    pub n_lakes: usize,
    pub depth: usize,
    pub n: usize,
    /// 0 = land, otherwise lake id.
    pub cells: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridParseError {
    BadHeader,
    BadSize,
    BadChar(char),
}

impl fmt::Display for GridParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridParseError::BadHeader => write!(f, "missing or malformed 'wada v1' header"),
            GridParseError::BadSize => write!(f, "grid size does not match depth"),
            GridParseError::BadChar(c) => write!(f, "unexpected grid character {:?}", c),
        }
    }
}

impl LakeGrid {
    pub fn parse(text: &str) -> Result<LakeGrid, GridParseError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(GridParseError::BadHeader)?;
        let rest = header
            .strip_prefix("wada v1 N=")
            .ok_or(GridParseError::BadHeader)?;
        let mut parts = rest.split(" depth=");
        let n_lakes: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(GridParseError::BadHeader)?;
        let depth: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(GridParseError::BadHeader)?;
        let n = 3usize.pow(depth as u32);
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(n);
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::with_capacity(n);
            for ch in line.chars() {
                match ch {
                    '#' => row.push(0),
                    '1'..='9' => row.push(ch as u8 - b'0'),
                    other => return Err(GridParseError::BadChar(other)),
                }
            }
            if row.len() != n {
                return Err(GridParseError::BadSize);
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(GridParseError::BadSize);
        }
        // Text stores the top row first.
        let mut cells = vec![0u8; n * n];
        for (k, row) in rows.iter().enumerate() {
            let grid_row = n - 1 - k;
            cells[grid_row * n..grid_row * n + n].copy_from_slice(row);
        }
        Ok(LakeGrid {
            n_lakes,
            depth,
            n,
            cells,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("wada v1 N={} depth={}\n", self.n_lakes, self.depth);
        for row in (0..self.n).rev() {
            for col in 0..self.n {
                match self.cells[row * self.n + col] {
                    0 => s.push('#'),
                    k => s.push((b'0' + k) as char),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Flood-fill and adjacency summary of a finished map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WadaCertificate {
    pub n_water_components: usize,
    pub land_connected: bool,
    /// Per lake (1-based order), max over land cells of the Chebyshev cell
    /// distance to the lake's nearest water.
    pub max_land_to_lake_dist: Vec<u32>,
}

pub fn wada_certificate(map: &TileMap) -> WadaCertificate {
    let mut dists = Vec::with_capacity(map.plan.n_lakes);
    for lake in 1..=map.plan.n_lakes as u8 {
        dists.push(map.max_land_distance(lake));
    }
    WadaCertificate {
        n_water_components: map.water_components(),
        land_connected: map.land_connected(),
        max_land_to_lake_dist: dists,
    }
}

/// Run the round-robin digging and return the final map.
pub fn schedule(plan: &ConstructionPlan) -> Result<TileMap, DigError> {
    schedule_with(plan, false)
}

/// Schedule with the full spine column reserved as Land, as the reversal
/// surgery of the sphere pipeline requires.
pub fn schedule_with(plan: &ConstructionPlan, reserve_spine: bool) -> Result<TileMap, DigError> {
    let mut router = Router::init(plan.clone(), reserve_spine)?;
    let total_days = plan.n_lakes * plan.depth;
    for day in 1..=total_days {
        router.run_day(day as u16)?;
    }
    Ok(router.map)
}

/// Like [`schedule`], but keeping a copy of the map after every day.
pub fn schedule_trace(plan: &ConstructionPlan) -> Result<Vec<TileMap>, DigError> {
    let mut router = Router::init(plan.clone(), false)?;
    let total_days = plan.n_lakes * plan.depth;
    let mut trace = Vec::with_capacity(total_days);
    for day in 1..=total_days {
        router.run_day(day as u16)?;
        trace.push(router.map.clone());
    }
    Ok(trace)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tier {
    Wide,
    Strict,
    Relaxed,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum GrowthStyle {
    /// Hairpin bypass teeth rooted in tee pairs (closed streamlines).
    Teeth,
    /// A wandering emit/absorb chain extended at its absorb tip.
    Chain,
}

struct Router {
    map: TileMap,
    /// Extendable absorb-tip per lake (chain-style lakes).
    chain_tips: Vec<Option<usize>>,
    styles: Vec<GrowthStyle>,
    /// Per-cell carve validity for the lake currently digging, rebuilt
    /// after every carve: `ok_relax` is `carveable_for`, `ok_strict`
    /// additionally forbids any 4-adjacent water.
    ok_relax: Vec<bool>,
    ok_strict: Vec<bool>,
    /// `ok_strict` plus a full Chebyshev cell of clearance from all water:
    /// routes prefer these corridor centers and only fall back to tight
    /// cells when no wide route exists.
    ok_wide: Vec<bool>,
    ok_lake: u8,
}

impl Router {
    fn init(plan: ConstructionPlan, reserve_spine: bool) -> Result<Router, DigError> {
        plan.validate().map_err(|_| DigError::Infeasible { day: 0, lake: 0 })?;
        let n = 3usize.pow(plan.depth as u32);
        let spine_col = (n - 1) / 2;
        // The half-canals run along the bottom edge so they never separate
        // a half into quadrants.
        let mouth_row = 0;
        let n_lakes = plan.n_lakes;
        let map = TileMap {
            plan,
            depth: 0,
            n,
            spine_col,
            mouth_row,
            reserve_spine,
            cells: vec![Cell::Land; n * n],
            day_cells: vec![Vec::new()],
            skipped_targets: Vec::new(),
        };
        let mut map = map;
        map.depth = map.plan.depth;
        Ok(Router {
            map,
            chain_tips: vec![None; n_lakes + 1],
            styles: vec![GrowthStyle::Teeth; n_lakes + 1],
            ok_relax: Vec::new(),
            ok_strict: Vec::new(),
            ok_wide: Vec::new(),
            ok_lake: 0,
        })
    }

    fn run_day(&mut self, day: u16) -> Result<(), DigError> {
        let n_lakes = self.map.plan.n_lakes;
        let lake = (((day as usize - 1) % n_lakes) + 1) as u8;
        let level = (day as usize - 1) / n_lakes + 1;
        self.map.day_cells.push(Vec::new());
        if (day as usize) <= n_lakes {
            self.place_root(day, lake)?;
        }
        let rho = 3u32.pow((self.map.depth - level) as u32);
        self.cover(day, lake, rho);
        if level == self.map.depth && self.styles[lake as usize] == GrowthStyle::Teeth {
            self.saturate(day, lake);
        }
        // The schedule must stay strictly monotone, and the next round can
        // only attach to today's extension, so every day needs at least one
        // dig carrying a straight channel pair.
        match self.styles[lake as usize] {
            GrowthStyle::Teeth => {
                if !self.day_has_pair(day) {
                    self.ensure_viable_day(day, lake);
                }
            }
            GrowthStyle::Chain => {
                if self.map.day_cells[day as usize].is_empty() {
                    let _ = self.place_filler_chain(day, lake);
                }
            }
        }
        debug_assert!(self.map.land_connected());
        Ok(())
    }

    /// Dig one more bypass whose path contains a straight pair; fall back
    /// to any bypass at all (monotonicity beats fertility).
    fn ensure_viable_day(&mut self, day: u16, lake: u8) {
        self.rebuild_ok(lake);
        let open = self.water_distance();
        let n = self.map.n;
        let target = (0..n * n)
            .filter(|&i| self.map.cells[i].is_land())
            .max_by_key(|&i| (open[i], usize::MAX - i))
            .map(|i| (i % n, i / n));
        let pairs = self.attachable_pairs(day, lake);
        if let Some(t) = target {
            if self.place_snake(day, lake, &pairs, t, 2) && self.day_has_pair(day) {
                return;
            }
        }
        // Relaxed hunt, far waypoints first, insisting on a pair.
        let before = self.map.day_cells[day as usize].len();
        for want_pair in [true, false] {
            for root in pairs.iter() {
                if !self.pair_still_usable(day, lake, root) {
                    continue;
                }
                for side in Edge::ALL {
                    if side == root.flow || side == root.flow.opposite() {
                        continue;
                    }
                    let Some(path) =
                        self.route_snake(lake, root, side, (0, 0), u32::MAX, Tier::Relaxed)
                    else {
                        continue;
                    };
                    if want_pair && !path_has_run(&path, n) {
                        continue;
                    }
                    if !self.map.land_connected_without(&path) {
                        continue;
                    }
                    self.carve_snake(day, lake, root, side, &path);
                    return;
                }
            }
            if self.map.day_cells[day as usize].len() > before {
                return;
            }
        }
    }

    /// Does the day's dig contain two consecutive same-direction straight
    /// channels (a usable tee root for the next round)?
    fn day_has_pair(&self, day: u16) -> bool {
        let n = self.map.n as isize;
        for &i in &self.map.day_cells[day as usize] {
            let Cell::Water { tile, day: d, lake, .. } = &self.map.cells[i] else {
                continue;
            };
            if *d != day {
                continue;
            }
            let flow = match (tile.shape, tile.dir) {
                (TileShape::ChannelH, 1) => Edge::E,
                (TileShape::ChannelH, -1) => Edge::W,
                (TileShape::ChannelV, 1) => Edge::N,
                (TileShape::ChannelV, -1) => Edge::S,
                _ => continue,
            };
            let (dc, dr) = flow.step();
            let c2 = (i % self.map.n) as isize + dc;
            let r2 = (i / self.map.n) as isize + dr;
            if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                continue;
            }
            let j = (r2 * n + c2) as usize;
            if let Cell::Water {
                tile: t2,
                day: d2,
                lake: l2,
                ..
            } = &self.map.cells[j]
            {
                if d2 == d && l2 == lake && t2.shape == tile.shape && t2.dir == tile.dir {
                    return true;
                }
            }
        }
        false
    }

    /// Chain filler: one-cell extension toward the first reachable land.
    fn place_filler_chain(&mut self, day: u16, lake: u8) -> bool {
        if self.chain_tips[lake as usize].is_none() {
            return false;
        }
        let n = self.map.n;
        let mut tried = 0;
        for i in 0..n * n {
            if !self.map.cells[i].is_land() {
                continue;
            }
            tried += 1;
            if tried > 64 {
                return false;
            }
            if self.extend_chain(day, lake, (i % n, i / n), 0, true) {
                return true;
            }
        }
        false
    }

    fn blocked(&self, col: usize, row: usize) -> bool {
        if col != self.map.spine_col {
            return false;
        }
        if self.map.reserve_spine {
            return true;
        }
        // Plain scenes only keep the seam cell and the band anchors Land.
        row == self.map.mouth_row || row == 0 || row == self.map.n - 1
    }

    fn carveable(&self, col: isize, row: isize) -> bool {
        if col < 0 || row < 0 || col >= self.map.n as isize || row >= self.map.n as isize {
            return false;
        }
        let (c, r) = (col as usize, row as usize);
        self.map.cell(c, r).is_land() && !self.blocked(c, r)
    }

    /// Carve candidate for `lake`: land, unblocked, and (except on the
    /// coarsest grid) keeping a full cell of clearance from other lakes, so
    /// distinct complementary domains never touch and every canal keeps
    /// room to sprout its own side branches.
    fn carveable_for(&self, lake: u8, col: isize, row: isize) -> bool {
        if !self.carveable(col, row) {
            return false;
        }
        if self.map.depth == 1 {
            return true;
        }
        let n = self.map.n as isize;
        for dc in -1isize..=1 {
            for dr in -1isize..=1 {
                if dc == 0 && dr == 0 {
                    continue;
                }
                let (c2, r2) = (col + dc, row + dr);
                if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                    continue;
                }
                if let Some(l) = self.map.cell(c2 as usize, r2 as usize).lake() {
                    if l != lake {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn write(&mut self, day: u16, lake: u8, idx: usize, tile: TileField, amp: f64) {
        self.map.cells[idx] = Cell::Water { lake, day, tile, amp };
        self.map.day_cells[day as usize].push(idx);
    }

    /// Mutate an existing water cell's tile (tee insertion on the previous
    /// extension); the cell keeps its original day.
    fn mutate(&mut self, idx: usize, tile: TileField) {
        if let Cell::Water { tile: t, .. } = &mut self.map.cells[idx] {
            *t = tile;
        }
    }

    fn place_root(&mut self, day: u16, lake: u8) -> Result<(), DigError> {
        let ty = self.map.plan.lake_types[lake as usize - 1];
        match ty {
            LakeType::TransverseAnnulus => {
                if self.map.depth == 1 {
                    self.styles[lake as usize] = GrowthStyle::Chain;
                }
                self.place_annulus_trunks(day, lake)
            }
            LakeType::CenterDisk | LakeType::SourceDisk => {
                if self.map.depth >= 2 && self.place_ring(day, lake).is_ok() {
                    return Ok(());
                }
                self.styles[lake as usize] = GrowthStyle::Chain;
                self.place_pocket(day, lake)
            }
        }
    }

    fn place_annulus_trunks(&mut self, day: u16, lake: u8) -> Result<(), DigError> {
        let n = self.map.n;
        let row = self.map.mouth_row;
        let spine = self.map.spine_col;
        // West half: ambient inflow at col 0, retracting dead end at the
        // seam. East half: emitting dead end at the seam, outflow mouth at
        // col n-1. Both run west-to-east.
        for col in 0..spine {
            let idx = self.map.idx(col, row);
            if !self.map.cells[idx].is_land() {
                return Err(DigError::Infeasible { day, lake });
            }
            let tile = if col + 1 == spine {
                TileField::dead_end(Edge::W, false)
            } else {
                TileField::channel(Edge::W, Edge::E)
            };
            self.write(day, lake, idx, tile, 1.0);
        }
        for col in spine + 1..n {
            let idx = self.map.idx(col, row);
            if !self.map.cells[idx].is_land() {
                return Err(DigError::Infeasible { day, lake });
            }
            let tile = if col == spine + 1 {
                TileField::dead_end(Edge::E, true)
            } else {
                TileField::channel(Edge::W, Edge::E)
            };
            self.write(day, lake, idx, tile, 1.0);
        }
        if self.map.depth == 1 {
            self.chain_tips[lake as usize] = Some(self.map.idx(0, row));
        }
        if !self.map.land_connected() {
            return Err(DigError::Infeasible { day, lake });
        }
        Ok(())
    }

    fn ring_width(&self) -> usize {
        if self.map.n >= 27 {
            6
        } else {
            4
        }
    }

    /// 2 x W counterclockwise ring: bottom row flows east, top row west.
    /// Rings keep one cell of margin to the map edges so their future teeth
    /// cannot strand corner land.
    fn ring_cells(&self, anchor: (usize, usize)) -> Option<Vec<(usize, TileField)>> {
        let (c, r) = anchor;
        let w = self.ring_width();
        if c == 0 || r == 0 || c + w >= self.map.n || r + 2 >= self.map.n {
            return None;
        }
        let mut out = Vec::with_capacity(2 * w);
        let mut push = |col: usize, row: usize, tile: TileField| {
            out.push((row * self.map.n + col, tile));
        };
        push(c, r, TileField::turn(Edge::N, Edge::E));
        for k in 1..w - 1 {
            push(c + k, r, TileField::channel(Edge::W, Edge::E));
        }
        push(c + w - 1, r, TileField::turn(Edge::W, Edge::N));
        push(c + w - 1, r + 1, TileField::turn(Edge::S, Edge::W));
        for k in (1..w - 1).rev() {
            push(c + k, r + 1, TileField::channel(Edge::E, Edge::W));
        }
        push(c, r + 1, TileField::turn(Edge::E, Edge::S));
        Some(out)
    }

    fn place_ring(&mut self, day: u16, lake: u8) -> Result<(), DigError> {
        // Anchor at the most open land (ties scanline-first), so the ring's
        // teeth have room on all sides.
        let open = self.water_distance();
        let mut candidates: Vec<(u32, usize, usize)> = Vec::new();
        for row in 0..self.map.n.saturating_sub(2) {
            for col in 0..self.map.n.saturating_sub(self.ring_width()) {
                let Some(cells) = self.ring_cells((col, row)) else {
                    continue;
                };
                let ok = cells.iter().all(|(i, _)| {
                    let c = i % self.map.n;
                    let r = i / self.map.n;
                    self.carveable_for(lake, c as isize, r as isize)
                });
                if !ok {
                    continue;
                }
                let score = cells.iter().map(|(i, _)| open[*i]).min().unwrap_or(0);
                candidates.push((score, col, row));
            }
        }
        candidates.sort_by_key(|&(score, col, row)| (u32::MAX - score, row, col));
        for (_, col, row) in candidates {
            let Some(cells) = self.ring_cells((col, row)) else {
                continue;
            };
            let removed: Vec<usize> = cells.iter().map(|(i, _)| *i).collect();
            if !self.map.land_connected_without(&removed) {
                continue;
            }
            for (i, tile) in cells {
                self.write(day, lake, i, tile, 1.0);
            }
            return Ok(());
        }
        Err(DigError::Infeasible { day, lake })
    }

    /// Chebyshev distance of every cell to the nearest water of any lake.
    fn water_distance(&self) -> Vec<u32> {
        let n = self.map.n;
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::new();
        for (i, c) in self.map.cells.iter().enumerate() {
            if !c.is_land() {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        if queue.is_empty() {
            return vec![0; n * n];
        }
        while let Some(i) = queue.pop_front() {
            let base = dist[i];
            for nb in self.map.neighbors8(i) {
                if dist[nb] > base + 1 {
                    dist[nb] = base + 1;
                    queue.push_back(nb);
                }
            }
        }
        dist
    }

    /// Two-cell emit/absorb pocket, the stand-in for a disk root where a
    /// ring cannot fit; seeded at the most open land spot so the chain has
    /// room to grow.
    fn place_pocket(&mut self, day: u16, lake: u8) -> Result<(), DigError> {
        let open = self.water_distance();
        let mut candidates: Vec<(usize, usize, Edge)> = Vec::new();
        for row in 0..self.map.n {
            for col in 0..self.map.n {
                for (edge, dc, dr) in [(Edge::E, 1isize, 0isize), (Edge::N, 0, 1)] {
                    let (c2, r2) = (col as isize + dc, row as isize + dr);
                    if self.carveable_for(lake, col as isize, row as isize)
                        && self.carveable_for(lake, c2, r2)
                    {
                        let a = self.map.idx(col, row);
                        let b = self.map.idx(c2 as usize, r2 as usize);
                        candidates.push((a, b, edge));
                    }
                }
            }
        }
        candidates.sort_by_key(|&(a, b, _)| (u32::MAX - open[a].min(open[b]), a));
        for (a, b, edge) in candidates {
            if !self.map.land_connected_without(&[a, b]) {
                continue;
            }
            self.write(day, lake, a, TileField::dead_end(edge, true), 1.0);
            self.write(day, lake, b, TileField::dead_end(edge.opposite(), false), 1.0);
            self.chain_tips[lake as usize] = Some(b);
            return Ok(());
        }
        Err(DigError::Infeasible { day, lake })
    }

    /// Cover every land cell to within Chebyshev distance `rho` of the
    /// lake's water, carving hairpin teeth (or extending chains on the
    /// coarsest grid). Unreachable targets are recorded and skipped.
    fn cover(&mut self, day: u16, lake: u8, rho: u32) {
        let n = self.map.n;
        // Pass structure: failed targets stay skipped until the end of a
        // full pass; a pass that carved anything earns a retry pass, since
        // new canals often unlock previously unreachable targets.
        let mut skipped = vec![false; n * n];
        loop {
            let mut carved = 0usize;
            // Breadth-first: take the nearest uncovered land cell (scanline
            // tie-break), so the lake grows outward through short digs and
            // never clogs distant corridors with long tentacles.
            loop {
                let dist = self.map.lake_distance(lake);
                let pairs = self.attachable_pairs(day, lake);
                self.rebuild_ok(lake);
                let mut target = None;
                for i in 0..n * n {
                    if skipped[i] || !self.map.cells[i].is_land() || dist[i] <= rho {
                        continue;
                    }
                    match target {
                        None => target = Some((dist[i], i)),
                        Some((d, _)) if dist[i] < d => target = Some((dist[i], i)),
                        _ => {}
                    }
                }
                let Some((_, i)) = target else {
                    break;
                };
                let t = (i % n, i / n);
                let done = match self.styles[lake as usize] {
                    GrowthStyle::Chain => self.extend_chain(day, lake, t, rho, false),
                    GrowthStyle::Teeth => self.place_snake(day, lake, &pairs, t, rho),
                };
                if done {
                    carved += 1;
                } else {
                    skipped[i] = true;
                }
            }
            if carved == 0 {
                break;
            }
            skipped.iter_mut().for_each(|s| *s = false);
        }
        let dist = self.map.lake_distance(lake);
        for i in 0..n * n {
            if self.map.cells[i].is_land() && dist[i] > rho {
                self.map.skipped_targets.push((day, i));
            }
        }
    }

    /// Final-round densification: sprout short greedy loops off every
    /// attachable pair with a free side. The spacing rules keep one land
    /// wall between runs, so this saturates the lake's reach without
    /// flooding whole regions.
    fn saturate(&mut self, day: u16, lake: u8) {
        loop {
            self.rebuild_ok(lake);
            let pairs = self.attachable_pairs(day, lake);
            let mut carved = false;
            'pairs: for root in &pairs {
                if !self.pair_still_usable(day, lake, root) {
                    continue;
                }
                for side in Edge::ALL {
                    if side == root.flow || side == root.flow.opposite() {
                        continue;
                    }
                    let nn = self.map.n;
                    let (sc, sr) = side.step();
                    let s0 = ((root.a % nn) as isize + sc, (root.a / nn) as isize + sr);
                    let s1 = ((root.b % nn) as isize + sc, (root.b / nn) as isize + sr);
                    if !self.snake_cell_ok(lake, s0.0, s0.1, root, false)
                        || !self.snake_cell_ok(lake, s1.0, s1.1, root, false)
                    {
                        continue;
                    }
                    let start_i = self.map.idx(s0.0 as usize, s0.1 as usize);
                    let goal_i = self.map.idx(s1.0 as usize, s1.1 as usize);
                    let mut leg1 = vec![start_i];
                    self.extend_leg(lake, root, &mut leg1, 8, Tier::Strict);
                    let path = loop {
                        let tip = *leg1.last().unwrap();
                        if tip == goal_i {
                            break Some(leg1.clone());
                        }
                        if let Some(p) = self.return_leg(lake, root, &leg1, goal_i, Tier::Strict) {
                            break Some(p);
                        }
                        if leg1.len() <= 1 {
                            break None;
                        }
                        leg1.pop();
                    };
                    let Some(path) = path else {
                        continue;
                    };
                    // Only worth a tee pair if it actually adds reach.
                    if path.len() < 4 {
                        continue;
                    }
                    if !self.map.land_connected_without(&path) {
                        continue;
                    }
                    self.carve_snake(day, lake, root, side, &path);
                    carved = true;
                    break 'pairs;
                }
            }
            if !carved {
                break;
            }
        }
    }

    /// Water cells of `lake` available for attachment on `day`: the
    /// previous extension of the same lake (day - n_lakes) or cells carved
    /// earlier on this very day.
    fn attachable(&self, day: u16, lake: u8, idx: usize) -> bool {
        match &self.map.cells[idx] {
            Cell::Water { lake: l, day: d, .. } if *l == lake => {
                *d == day || *d + self.map.plan.n_lakes as u16 == day
            }
            _ => false,
        }
    }

    /// Consecutive straight-channel pairs of `lake` suitable as tee roots.
    fn attachable_pairs(&self, day: u16, lake: u8) -> Vec<ToothRoot> {
        let n = self.map.n;
        let mut out = Vec::new();
        for row in 0..n {
            for col in 0..n {
                let i = self.map.idx(col, row);
                if !self.attachable(day, lake, i) {
                    continue;
                }
                let Cell::Water { tile, amp, .. } = &self.map.cells[i] else {
                    continue;
                };
                let flow = match (tile.shape, tile.dir) {
                    (TileShape::ChannelH, 1) => Edge::E,
                    (TileShape::ChannelH, -1) => Edge::W,
                    (TileShape::ChannelV, 1) => Edge::N,
                    (TileShape::ChannelV, -1) => Edge::S,
                    _ => continue,
                };
                let (dc, dr) = flow.step();
                let (c2, r2) = (col as isize + dc, row as isize + dr);
                if c2 < 0 || r2 < 0 || c2 >= n as isize || r2 >= n as isize {
                    continue;
                }
                let j = self.map.idx(c2 as usize, r2 as usize);
                if !self.attachable(day, lake, j) {
                    continue;
                }
                let Cell::Water { tile: t2, .. } = &self.map.cells[j] else {
                    continue;
                };
                if t2.shape != tile.shape || t2.dir != tile.dir {
                    continue;
                }
                out.push(ToothRoot {
                    a: i,
                    b: j,
                    flow,
                    amp: *amp,
                });
            }
        }
        out
    }

    /// Pairs are collected once per carve; re-validate before use.
    fn pair_still_usable(&self, day: u16, lake: u8, root: &ToothRoot) -> bool {
        self.attachable(day, lake, root.a)
            && self.attachable(day, lake, root.b)
            && matches!(
                self.map.cells[root.a],
                Cell::Water {
                    tile: TileField {
                        shape: TileShape::ChannelH | TileShape::ChannelV,
                        ..
                    },
                    ..
                }
            )
            && matches!(
                self.map.cells[root.b],
                Cell::Water {
                    tile: TileField {
                        shape: TileShape::ChannelH | TileShape::ChannelV,
                        ..
                    },
                    ..
                }
            )
    }

    fn place_snake(
        &mut self,
        day: u16,
        lake: u8,
        pairs: &[ToothRoot],
        target: (usize, usize),
        rho: u32,
    ) -> bool {
        let (tc, tr) = (target.0 as isize, target.1 as isize);
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.sort_by_key(|&k| {
            let r = &pairs[k];
            let col = (r.a % self.map.n) as isize;
            let row = (r.a / self.map.n) as isize;
            ((col - tc).abs().max((row - tr).abs()), r.a)
        });
        let mut attempts = 0usize;
        for &k in order.iter() {
            let root = &pairs[k];
            if !self.pair_still_usable(day, lake, root) {
                continue;
            }
            let arow = (root.a / self.map.n) as isize;
            let acol = (root.a % self.map.n) as isize;
            let sides = match root.flow {
                Edge::E | Edge::W => {
                    if tr >= arow {
                        [Edge::N, Edge::S]
                    } else {
                        [Edge::S, Edge::N]
                    }
                }
                Edge::N | Edge::S => {
                    if tc >= acol {
                        [Edge::E, Edge::W]
                    } else {
                        [Edge::W, Edge::E]
                    }
                }
            };
            for side in sides {
                let (sc, sr) = side.step();
                let nn = self.map.n;
                let s0 = ((root.a % nn) as isize + sc, (root.a / nn) as isize + sr);
                let s1 = ((root.b % nn) as isize + sc, (root.b / nn) as isize + sr);
                if !self.snake_cell_ok(lake, s0.0, s0.1, root, false)
                    || !self.snake_cell_ok(lake, s1.0, s1.1, root, false)
                {
                    continue; // boxed side, no flood spent
                }
                attempts += 1;
                let mut routes = [
                    self.route_hairpin(lake, root, side, (tc, tr), rho, Tier::Wide),
                    self.route_hairpin(lake, root, side, (tc, tr), rho, Tier::Strict),
                    self.route_snake(lake, root, side, (tc, tr), rho, Tier::Strict),
                ];
                for path in routes.iter_mut() {
                    let Some(path) = path.take() else {
                        continue;
                    };
                    if self.map.land_connected_without(&path) {
                        self.carve_snake(day, lake, root, side, &path);
                        return true;
                    }
                }
                if attempts >= 24 {
                    return false;
                }
            }
        }
        false
    }

    fn rebuild_ok(&mut self, lake: u8) {
        let n2 = self.map.n * self.map.n;
        if self.ok_relax.len() != n2 {
            self.ok_relax = vec![false; n2];
            self.ok_strict = vec![false; n2];
            self.ok_wide = vec![false; n2];
        }
        self.ok_lake = lake;
        let n = self.map.n as isize;
        for i in 0..n2 {
            let col = (i % self.map.n) as isize;
            let row = (i / self.map.n) as isize;
            let relax = self.carveable_for(lake, col, row);
            self.ok_relax[i] = relax;
            let mut edge_clean = true;
            let mut diag_clean = true;
            for dc in -1isize..=1 {
                for dr in -1isize..=1 {
                    if dc == 0 && dr == 0 {
                        continue;
                    }
                    let (c2, r2) = (col + dc, row + dr);
                    if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                        continue;
                    }
                    if self.map.cells[(r2 * n + c2) as usize].lake().is_some() {
                        diag_clean = false;
                        if dc == 0 || dr == 0 {
                            edge_clean = false;
                        }
                    }
                }
            }
            self.ok_strict[i] = relax && edge_clean;
            self.ok_wide[i] = relax && diag_clean;
        }
    }

    /// A snake path cell may touch existing water only at the root pair.
    /// `rebuild_ok(lake)` must be current. `Tier::Wide` additionally keeps
    /// diagonal clearance away from the root vicinity, `Tier::Relaxed`
    /// allows contact with the lake's own water.
    fn snake_cell_ok_tier(
        &self,
        lake: u8,
        col: isize,
        row: isize,
        root: &ToothRoot,
        tier: Tier,
    ) -> bool {
        debug_assert_eq!(self.ok_lake, lake);
        let _ = lake;
        if col < 0 || row < 0 || col >= self.map.n as isize || row >= self.map.n as isize {
            return false;
        }
        let i = (row as usize) * self.map.n + col as usize;
        match tier {
            Tier::Relaxed => self.ok_relax[i],
            Tier::Wide if self.ok_wide[i] => true,
            _ => {
                if !self.ok_relax[i] {
                    return false;
                }
                if self.ok_strict[i] && tier == Tier::Strict {
                    return true;
                }
                // Near the root pair both tiers allow the attachment cells.
                let n = self.map.n as isize;
                for edge in Edge::ALL {
                    let (dc, dr) = edge.step();
                    let (c2, r2) = (col + dc, row + dr);
                    if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                        continue;
                    }
                    let j = (r2 * n + c2) as usize;
                    if self.map.cells[j].lake().is_some() && j != root.a && j != root.b {
                        return false;
                    }
                }
                let rc = |r: usize| {
                    let c = (r % self.map.n) as isize;
                    let w = (r / self.map.n) as isize;
                    (c - col).abs().max((w - row).abs()) <= 2
                };
                tier == Tier::Strict || rc(root.a) || rc(root.b)
            }
        }
    }

    fn snake_cell_ok(&self, lake: u8, col: isize, row: isize, root: &ToothRoot, relaxed: bool) -> bool {
        self.snake_cell_ok_tier(
            lake,
            col,
            row,
            root,
            if relaxed { Tier::Relaxed } else { Tier::Strict },
        )
    }

    /// Route a two-lane hairpin: a 2x2-block corridor from the root pair's
    /// side cells out to the target ball. The two lanes hug along the whole
    /// corridor, so the carved bypass never encloses land and other lakes
    /// can always dig around its tip.
    fn route_hairpin(
        &self,
        lake: u8,
        root: &ToothRoot,
        side: Edge,
        target: (isize, isize),
        rho: u32,
        tier: Tier,
    ) -> Option<Vec<usize>> {
        let nn = self.map.n;
        let n = nn as isize;
        let (sc, sr) = side.step();
        let acol = (root.a % nn) as isize;
        let arow = (root.a / nn) as isize;
        let bcol = (root.b % nn) as isize;
        let brow = (root.b / nn) as isize;
        // Initial block: the four side cells at depth 1 and 2.
        let cells0 = [
            (acol + sc, arow + sr),
            (bcol + sc, brow + sr),
            (acol + 2 * sc, arow + 2 * sr),
            (bcol + 2 * sc, brow + 2 * sr),
        ];
        for &(c, r) in &cells0 {
            if !self.snake_cell_ok_tier(lake, c, r, root, tier) {
                return None;
            }
        }
        let anchor0 = (
            cells0.iter().map(|p| p.0).min().unwrap(),
            cells0.iter().map(|p| p.1).min().unwrap(),
        );
        let block_cells = |a: (isize, isize)| {
            [
                (a.0, a.1),
                (a.0 + 1, a.1),
                (a.0, a.1 + 1),
                (a.0 + 1, a.1 + 1),
            ]
        };
        let in_grid = |a: (isize, isize)| a.0 >= 0 && a.1 >= 0 && a.0 + 1 < n && a.1 + 1 < n;
        if !in_grid(anchor0) {
            return None;
        }
        let cheb = |c: isize, r: isize| (c - target.0).abs().max((r - target.1).abs()) as u32;
        let block_hits = |a: (isize, isize)| block_cells(a).iter().any(|&(c, r)| cheb(c, r) <= rho);
        let idx_of = |a: (isize, isize)| (a.1 * n + a.0) as usize;
        let mut prev: Vec<u32> = vec![u32::MAX; nn * nn];
        let mut queue = VecDeque::new();
        prev[idx_of(anchor0)] = idx_of(anchor0) as u32;
        queue.push_back(anchor0);
        let mut goals: Vec<(isize, isize)> = Vec::new();
        if block_hits(anchor0) {
            goals.push(anchor0);
        }
        'flood: while let Some(a) = queue.pop_front() {
            for edge in Edge::ALL {
                let (dc, dr) = edge.step();
                let na = (a.0 + dc, a.1 + dr);
                if !in_grid(na) || prev[idx_of(na)] != u32::MAX {
                    continue;
                }
                // The two leading-edge cells must be diggable.
                let lead: [(isize, isize); 2] = match edge {
                    Edge::E => [(na.0 + 1, na.1), (na.0 + 1, na.1 + 1)],
                    Edge::W => [(na.0, na.1), (na.0, na.1 + 1)],
                    Edge::N => [(na.0, na.1 + 1), (na.0 + 1, na.1 + 1)],
                    Edge::S => [(na.0, na.1), (na.0 + 1, na.1)],
                };
                if !lead
                    .iter()
                    .all(|&(c, r)| self.snake_cell_ok_tier(lake, c, r, root, tier))
                {
                    continue;
                }
                prev[idx_of(na)] = idx_of(a) as u32;
                if block_hits(na) {
                    goals.push(na);
                    if goals.len() >= 4 {
                        break 'flood;
                    }
                }
                queue.push_back(na);
            }
        }
        for goal in goals {
            // Reconstruct the anchor path.
            let mut anchors = vec![goal];
            let mut cur = goal;
            while prev[idx_of(cur)] != idx_of(cur) as u32 {
                let p = prev[idx_of(cur)] as isize;
                cur = (p % n, p / n);
                anchors.push(cur);
            }
            anchors.reverse();
            if let Some(path) = self.hairpin_lanes(root, side, &anchors) {
                return Some(path);
            }
        }
        None
    }

    /// Turn a block-anchor path into the single carve path
    /// `[a-side ... out tip, back tip ... b-side]`.
    fn hairpin_lanes(
        &self,
        root: &ToothRoot,
        side: Edge,
        anchors: &[(isize, isize)],
    ) -> Option<Vec<usize>> {
        let nn = self.map.n;
        let n = nn as isize;
        let block_cells = |a: (isize, isize)| {
            [
                (a.0, a.1),
                (a.0 + 1, a.1),
                (a.0, a.1 + 1),
                (a.0 + 1, a.1 + 1),
            ]
        };
        // Directions per block; the first block extends along `side`.
        let mut dirs = vec![side];
        for w in anchors.windows(2) {
            let d = ((w[1].0 - w[0].0), (w[1].1 - w[0].1));
            dirs.push(match d {
                (1, 0) => Edge::E,
                (-1, 0) => Edge::W,
                (0, 1) => Edge::N,
                (0, -1) => Edge::S,
                _ => return None,
            });
        }
        // Last containing block per cell; containment must be consecutive.
        let mut last_block: alloc::collections::BTreeMap<usize, (usize, usize)> =
            alloc::collections::BTreeMap::new(); // cell -> (first, last)
        for (k, &a) in anchors.iter().enumerate() {
            for &(c, r) in &block_cells(a) {
                let i = (r * n + c) as usize;
                let e = last_block.entry(i).or_insert((k, k));
                if k > e.1 + 1 {
                    return None; // corridor touches itself
                }
                e.1 = k;
            }
        }
        // Left side of a direction (90 degrees counterclockwise).
        let is_left = |cell: (isize, isize), a: (isize, isize), d: Edge| match d {
            Edge::N => cell.0 == a.0,
            Edge::S => cell.0 == a.0 + 1,
            Edge::E => cell.1 == a.1 + 1,
            Edge::W => cell.1 == a.1,
        };
        let mut left_cells = Vec::new();
        let mut right_cells = Vec::new();
        for (&i, &(_, last)) in &last_block {
            let cell = ((i as isize) % n, (i as isize) / n);
            if is_left(cell, anchors[last], dirs[last]) {
                left_cells.push(i);
            } else {
                right_cells.push(i);
            }
        }
        // The out lane starts at a's side cell.
        let (sc, sr) = side.step();
        let astart = ((root.a % nn) as isize + sc) + ((root.a / nn) as isize + sr) * n;
        let bstart = ((root.b % nn) as isize + sc) + ((root.b / nn) as isize + sr) * n;
        let (astart, bstart) = (astart as usize, bstart as usize);
        let (mut out_set, mut back_set) = if left_cells.contains(&astart) {
            (left_cells, right_cells)
        } else {
            (right_cells, left_cells)
        };
        if !out_set.contains(&astart) || !back_set.contains(&bstart) {
            return None;
        }
        // Walk each lane from its root end; adjacency must stay unique.
        let walk = |set: &mut Vec<usize>, start: usize| -> Option<Vec<usize>> {
            let mut path = vec![start];
            set.retain(|&x| x != start);
            loop {
                let cur = *path.last().unwrap();
                let cc = (cur % nn) as isize;
                let cr = (cur / nn) as isize;
                let mut next = None;
                for edge in Edge::ALL {
                    let (dc, dr) = edge.step();
                    let (c2, r2) = (cc + dc, cr + dr);
                    if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                        continue;
                    }
                    let j = (r2 * n + c2) as usize;
                    if set.contains(&j) {
                        if next.is_some() {
                            return None; // ambiguous lane
                        }
                        next = Some(j);
                    }
                }
                match next {
                    Some(j) => {
                        path.push(j);
                        set.retain(|&x| x != j);
                    }
                    None => break,
                }
            }
            if set.is_empty() {
                Some(path)
            } else {
                None
            }
        };
        let out_lane = walk(&mut out_set, astart)?;
        let back_lane = walk(&mut back_set, bstart)?;
        // Tips must join across the hairpin end.
        let t1 = *out_lane.last().unwrap();
        let t2 = *back_lane.last().unwrap();
        let (c1, r1) = ((t1 % nn) as isize, (t1 / nn) as isize);
        let (c2, r2) = ((t2 % nn) as isize, (t2 / nn) as isize);
        if (c1 - c2).abs() + (r1 - r2).abs() != 1 {
            return None;
        }
        let mut path = out_lane;
        path.extend(back_lane.into_iter().rev());
        Some(path)
    }

    /// Route a closed bypass: leave the split tee sideways, pass within
    /// `rho` of the target, and return to the merge tee. The two legs are
    /// shortest paths, so each is self-avoiding; they may run side by side
    /// (walls stay closed between them).
    fn route_snake(
        &self,
        lake: u8,
        root: &ToothRoot,
        side: Edge,
        target: (isize, isize),
        rho: u32,
        tier: Tier,
    ) -> Option<Vec<usize>> {
        let n = self.map.n as isize;
        let nn = self.map.n;
        let (sc, sr) = side.step();
        let acol = (root.a % nn) as isize;
        let arow = (root.a / nn) as isize;
        let bcol = (root.b % nn) as isize;
        let brow = (root.b / nn) as isize;
        let start = (acol + sc, arow + sr);
        let goal = (bcol + sc, brow + sr);
        if !self.snake_cell_ok_tier(lake, start.0, start.1, root, tier)
            || !self.snake_cell_ok_tier(lake, goal.0, goal.1, root, tier)
        {
            return None;
        }
        let start_i = (start.1 * n + start.0) as usize;
        let goal_i = (goal.1 * n + goal.0) as usize;
        // Leg 1: BFS from the start over valid snake cells, stopping once
        // enough waypoints inside the target ball have been found.
        let cheb = |c: isize, r: isize| (c - target.0).abs().max((r - target.1).abs()) as u32;
        let mut dist1 = vec![u32::MAX; nn * nn];
        let mut prev1 = vec![usize::MAX; nn * nn];
        let mut queue = VecDeque::new();
        let mut waypoints: Vec<(u32, usize)> = Vec::new();
        dist1[start_i] = 0;
        prev1[start_i] = start_i;
        queue.push_back(start_i);
        if cheb(start.0, start.1) <= rho {
            waypoints.push((0, start_i));
        }
        'flood: while let Some(i) = queue.pop_front() {
            let col = (i % nn) as isize;
            let row = (i / nn) as isize;
            for edge in Edge::ALL {
                let (dc, dr) = edge.step();
                let (c2, r2) = (col + dc, row + dr);
                if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                    continue;
                }
                let j = (r2 * n + c2) as usize;
                if dist1[j] != u32::MAX || !self.snake_cell_ok_tier(lake, c2, r2, root, tier) {
                    continue;
                }
                dist1[j] = dist1[i] + 1;
                prev1[j] = i;
                if cheb(c2, r2) <= rho {
                    waypoints.push((dist1[j], j));
                    if waypoints.len() >= 8 {
                        break 'flood;
                    }
                }
                queue.push_back(j);
            }
        }
        let max_ext = (rho as usize / 2).clamp(2, 5);
        for &(_, w) in waypoints.iter().take(8) {
            // Reconstruct leg 1.
            let mut leg1 = vec![w];
            let mut cur = w;
            while prev1[cur] != cur {
                cur = prev1[cur];
                leg1.push(cur);
            }
            leg1.reverse();
            // Push on past the waypoint, preferring straight steps: long
            // runs become the tee roots of the next round.
            self.extend_leg(lake, root, &mut leg1, max_ext, tier);
            // Leg 2: from the tip back to the goal cell, avoiding leg 1;
            // shrink the extension until the return leg fits.
            loop {
                let tip = *leg1.last().unwrap();
                if tip == goal_i {
                    return Some(leg1);
                }
                if let Some(path) = self.return_leg(lake, root, &leg1, goal_i, tier) {
                    return Some(path);
                }
                if leg1.len() <= dist1[w] as usize + 1 || leg1.len() <= 1 {
                    break;
                }
                leg1.pop();
            }
        }
        None
    }

    /// Greedy straight-preferred extension of a routed leg.
    fn extend_leg(
        &self,
        lake: u8,
        root: &ToothRoot,
        leg: &mut Vec<usize>,
        max_ext: usize,
        tier: Tier,
    ) {
        let n = self.map.n as isize;
        for _ in 0..max_ext {
            let tip = *leg.last().unwrap();
            let before = if leg.len() >= 2 {
                leg[leg.len() - 2]
            } else {
                root.a
            };
            let heading = self.edge_between(before, tip);
            let mut stepped = false;
            for edge in [heading, rot_ccw(heading), rot_ccw(heading).opposite()] {
                let (dc, dr) = edge.step();
                let c2 = (tip % self.map.n) as isize + dc;
                let r2 = (tip / self.map.n) as isize + dr;
                if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                    continue;
                }
                let j = (r2 * n + c2) as usize;
                if leg.contains(&j) || !self.snake_cell_ok_tier(lake, c2, r2, root, tier) {
                    continue;
                }
                // Do not fold back onto the leg.
                let near_leg = leg[..leg.len() - 1].iter().any(|&k| {
                    let kc = (k % self.map.n) as isize;
                    let kr = (k / self.map.n) as isize;
                    (kc - c2).abs() + (kr - r2).abs() == 1
                });
                if near_leg {
                    continue;
                }
                leg.push(j);
                stepped = true;
                break;
            }
            if !stepped {
                break;
            }
        }
    }

    fn return_leg(
        &self,
        lake: u8,
        root: &ToothRoot,
        leg1: &[usize],
        goal_i: usize,
        tier: Tier,
    ) -> Option<Vec<usize>> {
        let nn = self.map.n;
        let n = nn as isize;
        let w = *leg1.last().unwrap();
        let mut on_leg1 = vec![false; nn * nn];
        for &i in leg1 {
            on_leg1[i] = true;
        }
        let mut prev2 = vec![usize::MAX; nn * nn];
        let mut q2 = VecDeque::new();
        prev2[w] = w;
        q2.push_back(w);
        let mut found = false;
        'bfs2: while let Some(i) = q2.pop_front() {
            let col = (i % nn) as isize;
            let row = (i / nn) as isize;
            for edge in Edge::ALL {
                let (dc, dr) = edge.step();
                let (c2, r2) = (col + dc, row + dr);
                if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                    continue;
                }
                let j = (r2 * n + c2) as usize;
                if prev2[j] != usize::MAX || on_leg1[j] {
                    continue;
                }
                if !self.snake_cell_ok_tier(lake, c2, r2, root, tier) {
                    continue;
                }
                prev2[j] = i;
                if j == goal_i {
                    found = true;
                    break 'bfs2;
                }
                q2.push_back(j);
            }
        }
        if !found {
            return None;
        }
        let mut leg2 = vec![goal_i];
        let mut cur = goal_i;
        while prev2[cur] != cur {
            cur = prev2[cur];
            leg2.push(cur);
        }
        leg2.reverse(); // starts at w
        let mut path = leg1.to_vec();
        path.extend_from_slice(&leg2[1..]);
        Some(path)
    }

    fn edge_between(&self, from: usize, to: usize) -> Edge {
        let n = self.map.n as isize;
        let fc = (from as isize) % n;
        let fr = (from as isize) / n;
        let tc = (to as isize) % n;
        let tr = (to as isize) / n;
        match (tc - fc, tr - fr) {
            (1, 0) => Edge::E,
            (-1, 0) => Edge::W,
            (0, 1) => Edge::N,
            (0, -1) => Edge::S,
            _ => unreachable!("cells not adjacent"),
        }
    }

    /// Carve the bypass: split tee at `root.a`, the snake path, merge tee
    /// at `root.b`.
    fn carve_snake(&mut self, day: u16, lake: u8, root: &ToothRoot, side: Edge, path: &[usize]) {
        let amp = crate::tiles::TEE_BRANCH * root.amp;
        let inlet = root.flow.opposite();
        self.mutate(root.a, TileField::tee(inlet, side, false));
        self.mutate(root.b, TileField::tee(inlet, side, true));
        for (w, &idx) in path.iter().enumerate() {
            let in_edge = if w == 0 {
                self.edge_between(idx, root.a)
            } else {
                self.edge_between(idx, path[w - 1])
            };
            let out_edge = if w + 1 == path.len() {
                self.edge_between(idx, root.b)
            } else {
                self.edge_between(idx, path[w + 1])
            };
            let tile = if in_edge.opposite() == out_edge {
                TileField::channel(in_edge, out_edge)
            } else {
                TileField::turn(in_edge, out_edge)
            };
            self.write(day, lake, idx, tile, amp);
        }
    }

    /// A chain path cell may touch other water only at the tip it extends
    /// (strict mode), and never water of another lake.
    fn chain_cell_ok(
        &self,
        lake: u8,
        col: isize,
        row: isize,
        predecessor: usize,
        tip: usize,
        relaxed: bool,
    ) -> bool {
        if !self.carveable(col, row) {
            return false;
        }
        let n = self.map.n as isize;
        for edge in Edge::ALL {
            let (dc, dr) = edge.step();
            let (c2, r2) = (col + dc, row + dr);
            if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                continue;
            }
            let j = (r2 * n + c2) as usize;
            let Some(nb_lake) = self.map.cells[j].lake() else {
                continue;
            };
            if nb_lake != lake && self.map.depth > 1 {
                return false;
            }
            if relaxed {
                continue;
            }
            if !(j == tip && predecessor == tip) {
                return false;
            }
        }
        true
    }

    /// Chain growth: extend the lake's absorb tip along a land path until
    /// some carved cell is within `rho` of the target.
    fn extend_chain(
        &mut self,
        day: u16,
        lake: u8,
        target: (usize, usize),
        rho: u32,
        relaxed: bool,
    ) -> bool {
        let Some(tip) = self.chain_tips[lake as usize] else {
            return false;
        };
        let n = self.map.n as isize;
        let (tc, tr) = (target.0 as isize, target.1 as isize);
        // BFS from the tip through carveable land.
        let tip_col = (tip % self.map.n) as isize;
        let tip_row = (tip / self.map.n) as isize;
        let mut prev = vec![usize::MAX; self.map.cells.len()];
        let mut queue = VecDeque::new();
        let mut goal = None;
        let start_cheb = (tip_col - tc).abs().max((tip_row - tr).abs()) as u32;
        if start_cheb <= rho {
            return false; // already covered; nothing to extend
        }
        prev[tip] = tip;
        queue.push_back(tip);
        'bfs: while let Some(i) = queue.pop_front() {
            let col = (i % self.map.n) as isize;
            let row = (i / self.map.n) as isize;
            for edge in Edge::ALL {
                let (dc, dr) = edge.step();
                let (c2, r2) = (col + dc, row + dr);
                if c2 < 0 || r2 < 0 || c2 >= n || r2 >= n {
                    continue;
                }
                let j = (r2 * n + c2) as usize;
                if prev[j] != usize::MAX
                    || !self.chain_cell_ok(lake, c2, r2, i, tip, relaxed)
                {
                    continue;
                }
                prev[j] = i;
                if (c2 - tc).abs().max((r2 - tr).abs()) as u32 <= rho {
                    goal = Some(j);
                    break 'bfs;
                }
                queue.push_back(j);
            }
        }
        let Some(goal) = goal else {
            return false;
        };
        // Reconstruct tip -> goal.
        let mut path = vec![goal];
        let mut cur = goal;
        while prev[cur] != cur {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse(); // starts at tip
        let removed: Vec<usize> = path[1..].to_vec();
        if !self.map.land_connected_without(&removed) {
            return false;
        }
        let amp = match &self.map.cells[tip] {
            Cell::Water { amp, .. } => *amp,
            Cell::Land => 1.0,
        };
        // The old tip's mouth edge (flow came in through it).
        let old_mouth = match &self.map.cells[tip] {
            Cell::Water {
                tile:
                    TileField {
                        shape: TileShape::DeadEnd { mouth, .. },
                        ..
                    },
                ..
            } => *mouth,
            _ => return false,
        };
        let nn = self.map.n;
        let dir_between = move |from: usize, to: usize| -> Edge {
            let fc = (from % nn) as isize;
            let fr = (from / nn) as isize;
            let c = (to % nn) as isize;
            let r = (to / nn) as isize;
            match (c - fc, r - fr) {
                (1, 0) => Edge::E,
                (-1, 0) => Edge::W,
                (0, 1) => Edge::N,
                (0, -1) => Edge::S,
                _ => unreachable!(),
            }
        };
        // Rewrite the old tip into a through piece toward path[1].
        let out0 = dir_between(path[0], path[1]);
        let tile0 = if old_mouth.opposite() == out0 {
            TileField::channel(old_mouth, out0)
        } else if old_mouth == out0 {
            // Flow would double back; not representable, bail out.
            return false;
        } else {
            TileField::turn(old_mouth, out0)
        };
        self.mutate(path[0], tile0);
        for w in 1..path.len() {
            let inc = dir_between(path[w], path[w - 1]); // edge looking back
            if w + 1 == path.len() {
                self.write(day, lake, path[w], TileField::dead_end(inc, false), amp);
                self.chain_tips[lake as usize] = Some(path[w]);
            } else {
                let out = dir_between(path[w], path[w + 1]);
                let tile = if inc.opposite() == out {
                    TileField::channel(inc, out)
                } else {
                    TileField::turn(inc, out)
                };
                self.write(day, lake, path[w], tile, amp);
            }
        }
        true
    }
}

/// Three collinear consecutive cells somewhere along the path produce two
/// consecutive straight channels (a future tee root).
fn path_has_run(path: &[usize], n: usize) -> bool {
    path.windows(3).any(|w| {
        let (c0, r0) = (w[0] % n, w[0] / n);
        let (c1, r1) = (w[1] % n, w[1] / n);
        let (c2, r2) = (w[2] % n, w[2] / n);
        (c0 == c1 && c1 == c2) || (r0 == r1 && r1 == r2)
    })
}

fn rot_ccw(e: Edge) -> Edge {
    match e {
        Edge::N => Edge::W,
        Edge::W => Edge::S,
        Edge::S => Edge::E,
        Edge::E => Edge::N,
    }
}

struct ToothRoot {
    a: usize,
    b: usize,
    flow: Edge,
    amp: f64,
}

#[cfg(test)]
mod tests {
    use super::*;


    #[test]
    fn dbg_day4_probe() {
        use std::println;
        let plan = ConstructionPlan::standard(2, 4).unwrap();
        let mut router = Router::init(plan, false).unwrap();
        for day in 1..=3u16 {
            router.run_day(day).unwrap();
        }
        router.map.day_cells.push(Vec::new());
        router.cover(4, 1, 9);
        let dist = router.map.lake_distance(1);
        let n = router.map.n;
        for row in (28..64).rev() {
            let mut line = String::new();
            for col in 0..48 {
                let i = row * n + col;
                let ch = match &router.map.cells[i] {
                    Cell::Land => {
                        if dist[i] > 9 { '*' } else { '.' }
                    }
                    Cell::Water { lake, .. } => (b'0' + lake) as char,
                };
                line.push(ch);
            }
            println!("{}", line);
        }
    }

    #[test]
    fn plan_rejects_two_annuli() {
        let err = ConstructionPlan::new(
            vec![LakeType::TransverseAnnulus, LakeType::TransverseAnnulus],
            2,
        )
        .unwrap_err();
        assert_eq!(err, PlanError::AnnulusCount(2));
    }

    #[test]
    fn plan_rejects_bad_depth() {
        let err = ConstructionPlan::new(vec![LakeType::TransverseAnnulus], 0).unwrap_err();
        assert_eq!(err, PlanError::BadDepth(0));
        let err = ConstructionPlan::new(vec![LakeType::TransverseAnnulus], 13).unwrap_err();
        assert_eq!(err, PlanError::BadDepth(13));
    }

    #[test]
    fn depth1_three_lakes_disjoint_connected() {
        let plan = ConstructionPlan::standard(2, 1).unwrap();
        let map = schedule(&plan).unwrap();
        let cert = wada_certificate(&map);
        assert_eq!(cert.n_water_components, 3);
        assert!(cert.land_connected);
    }

    #[test]
    fn depth2_map_has_ring_disks_and_connected_land() {
        let plan = ConstructionPlan::standard(2, 2).unwrap();
        let map = schedule(&plan).unwrap();
        assert!(map.land_connected());
        assert_eq!(map.water_components(), 3);
        // spine stays land
        for row in 0..map.n {
            assert!(map.cell(map.spine_col, row).is_land());
        }
    }

    #[test]
    fn water_monotone_and_day_indices_recorded() {
        let plan = ConstructionPlan::standard(1, 2).unwrap();
        let trace = schedule_trace(&plan).unwrap();
        let mut prev = 0usize;
        for m in &trace {
            let w = m.water_count();
            assert!(w > prev, "water must strictly grow each day");
            prev = w;
        }
    }

    #[test]
    fn text_roundtrip() {
        let plan = ConstructionPlan::standard(2, 2).unwrap();
        let map = schedule(&plan).unwrap();
        let text = map.to_text();
        let grid = LakeGrid::parse(&text).unwrap();
        assert_eq!(grid.to_text(), text);
        assert_eq!(grid.n, map.n);
    }

    #[test]
    fn overlap_rule_ports_link_only_adjacent_extensions() {
        let plan = ConstructionPlan::standard(2, 3).unwrap();
        let map = schedule(&plan).unwrap();
        let n = map.n;
        let n_lakes = map.plan.n_lakes as i32;
        for row in 0..n {
            for col in 0..n {
                let Cell::Water { day, tile, lake, .. } = map.cell(col, row) else {
                    continue;
                };
                for edge in Edge::ALL {
                    if matches!(tile.ports()[edge.index()], PortState::Closed) {
                        continue;
                    }
                    let (dc, dr) = edge.step();
                    let (c2, r2) = (col as isize + dc, row as isize + dr);
                    if c2 < 0 || r2 < 0 || c2 >= n as isize || r2 >= n as isize {
                        continue;
                    }
                    if let Cell::Water {
                        day: d2, lake: l2, ..
                    } = map.cell(c2 as usize, r2 as usize)
                    {
                        assert_eq!(lake, l2, "ports must not cross lakes");
                        let diff = (*day as i32 - *d2 as i32).abs();
                        assert!(
                            diff == 0 || diff == n_lakes,
                            "port connects day {} to day {}",
                            day,
                            d2
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn no_open_port_faces_land_or_mismatch() {
        let plan = ConstructionPlan::standard(2, 3).unwrap();
        let map = schedule(&plan).unwrap();
        let n = map.n;
        for row in 0..n {
            for col in 0..n {
                let Cell::Water { tile, amp, .. } = map.cell(col, row) else {
                    continue;
                };
                for edge in Edge::ALL {
                    let port = tile.ports()[edge.index()];
                    let PortState::Open { sign } = port else {
                        continue;
                    };
                    let (dc, dr) = edge.step();
                    let (c2, r2) = (col as isize + dc, row as isize + dr);
                    if c2 < 0 || c2 >= n as isize {
                        continue; // mouth into the ambient
                    }
                    assert!(
                        r2 >= 0 && r2 < n as isize,
                        "open port into the band at ({},{})",
                        col,
                        row
                    );
                    match map.cell(c2 as usize, r2 as usize) {
                        Cell::Land => panic!("open port faces land at ({},{})", col, row),
                        Cell::Water { tile: t2, amp: a2, .. } => {
                            match t2.ports()[edge.opposite().index()] {
                                PortState::Closed => {
                                    panic!("open port faces closed port at ({},{})", col, row)
                                }
                                PortState::Open { sign: s2 } => {
                                    assert_eq!(sign, -s2, "port signs must oppose");
                                    let f1 = amp * tile.port_fraction(edge);
                                    let f2 = a2 * t2.port_fraction(edge.opposite());
                                    assert!(
                                        (f1 - f2).abs() < 1e-12,
                                        "port amplitude mismatch {} vs {}",
                                        f1,
                                        f2
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn land_connected_every_day_n3_depth3() {
        let plan = ConstructionPlan::standard(2, 3).unwrap();
        let trace = schedule_trace(&plan).unwrap();
        for (k, m) in trace.iter().enumerate() {
            assert!(m.land_connected(), "land disconnected after day {}", k + 1);
        }
    }
}
