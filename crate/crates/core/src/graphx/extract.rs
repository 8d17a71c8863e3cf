use std::collections::{BTreeSet, VecDeque};

use super::rdp;
use super::{InterestPoint, NumeralGraph, PointKind};
use crate::error::{Error, Result};
use crate::imageproc::{neighbor_ring, SkeletonImage, NEIGHBOR_OFFSETS};

/// RDP tolerance for corner detection, in pixels at the 64×64 working scale.
pub const DEFAULT_RDP_EPSILON: f64 = 2.0;

/// Number of background-to-ink transitions walking once around the
/// 8-neighbourhood.
pub fn crossing_number(ring: &[bool; 8]) -> usize {
    (0..8).filter(|&i| !ring[i] && ring[(i + 1) % 8]).count()
}

/// Endpoints, junctions and corners of `skel` with the default RDP tolerance.
pub fn detect_interest_points(skel: &SkeletonImage) -> Result<Vec<InterestPoint>> {
    detect_interest_points_with(skel, DEFAULT_RDP_EPSILON)
}

/// Interest points in raster order (top to bottom, then left to right).
///
/// * endpoints: ink pixels with at most one ink neighbour;
/// * junctions: crossing number ≥ 3, with 8-adjacent candidates merged into
///   the pixel nearest their centroid;
/// * corners: RDP breakpoints of the stroke segments between the above.
///   A closed loop without endpoints or junctions is seeded at its
///   topmost-then-leftmost pixel, which becomes a corner itself.
///
/// Loops always receive enough corners to form a cycle of at least three nodes.
pub fn detect_interest_points_with(
    skel: &SkeletonImage,
    epsilon: f64,
) -> Result<Vec<InterestPoint>> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Parameter(format!(
            "RDP epsilon must be > 0, got {epsilon}"
        )));
    }
    if skel.foreground_count() == 0 {
        return Err(Error::Content("skeleton has no ink".into()));
    }
    let grid = Grid::new(skel);

    let mut anchors: Vec<(usize, PointKind)> = Vec::new();
    let mut owner = vec![None; grid.len()];
    for idx in grid.ink() {
        if grid.neighbor_count(idx) <= 1 {
            owner[idx] = Some(anchors.len());
            anchors.push((idx, PointKind::Endpoint));
        }
    }
    let candidates = grid.junction_candidates(&owner);
    for cluster in grid.clusters(&candidates) {
        let id = anchors.len();
        anchors.push((grid.centroid_pixel(&cluster), PointKind::Junction));
        for p in cluster {
            owner[p] = Some(id);
        }
    }

    let mut corners = BTreeSet::new();
    let part = grid.partition(owner);
    for region in &part.regions {
        let polyline = match region.touched.len() {
            0 => {
                let seed = region.pixels[0];
                corners.insert(seed);
                let polyline = part.loop_path(region, Anchor::Pixel(seed));
                corners.extend(grid.breakpoints(&polyline, epsilon, 2));
                continue;
            }
            1 => {
                let a = *region.touched.iter().next().unwrap();
                part.loop_path(region, Anchor::Node(a, anchors[a].0))
            }
            _ => {
                let a = *region.touched.iter().next().unwrap();
                let b = *region.touched.iter().next_back().unwrap();
                part.open_path(region, (a, anchors[a].0), (b, anchors[b].0))
            }
        };
        let min = if region.touched.len() == 1 { 2 } else { 0 };
        corners.extend(grid.breakpoints(&polyline, epsilon, min));
    }

    let mut points: Vec<InterestPoint> = anchors
        .iter()
        .map(|&(idx, kind)| grid.point(idx, kind))
        .chain(
            corners
                .iter()
                .map(|&idx| grid.point(idx, PointKind::Corner)),
        )
        .collect();
    points.sort_by_key(|p| (p.y, p.x));
    Ok(points)
}

/// Links interest points that a skeleton path joins without passing through
/// another interest point. Node `i` of the result is `points[i]`; edges are
/// weighted by coordinate distance. Parallel paths collapse into one edge.
pub fn build_graph(skel: &SkeletonImage, points: &[InterestPoint]) -> Result<NumeralGraph> {
    if points.is_empty() {
        return Err(Error::Content("no interest points".into()));
    }
    let grid = Grid::new(skel);
    let mut owner = vec![None; grid.len()];
    for (id, p) in points.iter().enumerate() {
        if p.x >= grid.width || p.y >= grid.height || !skel.get(p.x, p.y) {
            return Err(Error::Consistency(format!(
                "interest point ({}, {}) is not a skeleton pixel",
                p.x, p.y
            )));
        }
        let idx = p.y * grid.width + p.x;
        if owner[idx].replace(id).is_some() {
            return Err(Error::Consistency(format!(
                "duplicate interest point at ({}, {})",
                p.x, p.y
            )));
        }
    }

    // A junction also claims the rest of its candidate cluster.
    let candidates = grid.junction_candidates(&vec![None; grid.len()]);
    for (id, p) in points.iter().enumerate() {
        if p.kind != PointKind::Junction {
            continue;
        }
        let start = p.y * grid.width + p.x;
        if !candidates[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        let mut seen = BTreeSet::from([start]);
        while let Some(q) = queue.pop_front() {
            for n in grid.neighbors(q) {
                if candidates[n] && seen.insert(n) && owner[n].is_none() {
                    owner[n] = Some(id);
                    queue.push_back(n);
                }
            }
        }
    }

    let mut edges = BTreeSet::new();
    let part = grid.partition(owner);
    let owner = &part.owner;
    for region in &part.regions {
        let touched: Vec<usize> = region.touched.iter().copied().collect();
        for (i, &a) in touched.iter().enumerate() {
            for &b in &touched[i + 1..] {
                edges.insert((a, b));
            }
        }
    }
    for idx in grid.ink() {
        if let Some(a) = owner[idx] {
            for n in grid.neighbors(idx) {
                match owner[n] {
                    Some(b) if b != a => {
                        edges.insert((a.min(b), a.max(b)));
                    }
                    _ => {}
                }
            }
        }
    }
    NumeralGraph::euclidean(points.to_vec(), edges)
}

/// Maximal set of non-node ink pixels connected without shortcutting a node.
struct Region {
    /// Ascending pixel indices, so `pixels[0]` is topmost-then-leftmost.
    pixels: Vec<usize>,
    touched: BTreeSet<usize>,
}

enum Anchor {
    /// A loop hanging off a node: (node id, node pixel).
    Node(usize, usize),
    /// A free loop seeded at one of its own pixels.
    Pixel(usize),
}

struct Grid<'a> {
    skel: &'a SkeletonImage,
    width: usize,
    height: usize,
}

impl<'a> Grid<'a> {
    fn new(skel: &'a SkeletonImage) -> Self {
        Self {
            skel,
            width: skel.width(),
            height: skel.height(),
        }
    }

    fn len(&self) -> usize {
        self.width * self.height
    }

    fn is_ink(&self, idx: usize) -> bool {
        self.skel.get(idx % self.width, idx / self.width)
    }

    fn ink(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_ink(i))
    }

    fn point(&self, idx: usize, kind: PointKind) -> InterestPoint {
        InterestPoint::new(idx % self.width, idx / self.width, kind)
    }

    fn xy(&self, idx: usize) -> (f64, f64) {
        ((idx % self.width) as f64, (idx / self.width) as f64)
    }

    fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = ((idx % self.width) as isize, (idx / self.width) as isize);
        NEIGHBOR_OFFSETS.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            self.skel
                .get_signed(nx, ny)
                .then(|| ny as usize * self.width + nx as usize)
        })
    }

    fn neighbor_count(&self, idx: usize) -> usize {
        self.neighbors(idx).count()
    }

    fn junction_candidates(&self, owner: &[Option<usize>]) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for idx in self.ink() {
            let ring = neighbor_ring(self.skel, idx % self.width, idx / self.width);
            mask[idx] = owner[idx].is_none() && crossing_number(&ring) >= 3;
        }
        mask
    }

    /// 8-connected groups of `mask` pixels, each sorted, in raster order.
    fn clusters(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if !mask[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut members = vec![start];
            let mut i = 0;
            while i < members.len() {
                let cur = members[i];
                for n in self.neighbors(cur) {
                    if mask[n] && !seen[n] {
                        seen[n] = true;
                        members.push(n);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    fn centroid_pixel(&self, cluster: &[usize]) -> usize {
        let n = cluster.len() as f64;
        let (sx, sy) = cluster.iter().fold((0.0, 0.0), |(sx, sy), &p| {
            let (x, y) = self.xy(p);
            (sx + x, sy + y)
        });
        let (cx, cy) = (sx / n, sy / n);
        let d = |p: usize| {
            let (x, y) = self.xy(p);
            (x - cx).powi(2) + (y - cy).powi(2)
        };
        *cluster
            .iter()
            .min_by(|&&a, &&b| d(a).total_cmp(&d(b)).then(a.cmp(&b)))
            .unwrap()
    }

    /// Splits the non-node ink into regions. Two neighbouring pixels are
    /// linked only when no single node touches both, so the arms around a
    /// node never shortcut it.
    fn partition(&self, owner: Vec<Option<usize>>) -> Partition<'_, 'a> {
        let near: Vec<Vec<usize>> = (0..self.len())
            .map(|i| {
                if self.is_ink(i) && owner[i].is_none() {
                    let mut out: Vec<usize> = self.neighbors(i).filter_map(|n| owner[n]).collect();
                    out.sort_unstable();
                    out.dedup();
                    out
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut part = Partition {
            grid: self,
            owner,
            near,
            regions: Vec::new(),
        };
        let mut seen = vec![false; self.len()];
        for start in 0..self.len() {
            if !part.is_free(start) || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut pixels = vec![start];
            let mut i = 0;
            while i < pixels.len() {
                let cur = pixels[i];
                for n in part.links(cur) {
                    if !seen[n] {
                        seen[n] = true;
                        pixels.push(n);
                    }
                }
                i += 1;
            }
            let touched = pixels
                .iter()
                .flat_map(|&p| part.near[p].iter().copied())
                .collect();
            pixels.sort_unstable();
            part.regions.push(Region { pixels, touched });
        }
        part
    }

    /// Interior RDP breakpoints of `polyline` as pixel indices, padded with
    /// evenly spaced samples up to `min` when simplification keeps fewer.
    fn breakpoints(&self, polyline: &[(f64, f64)], epsilon: f64, min: usize) -> Vec<usize> {
        let last = polyline.len().saturating_sub(1);
        let mut keep: BTreeSet<usize> = rdp::simplify(polyline, epsilon)
            .into_iter()
            .filter(|&i| i > 0 && i < last)
            .collect();
        if keep.len() < min && last >= 2 {
            for j in 1..=min {
                let i = ((j * last) as f64 / (min + 1) as f64).round() as usize;
                if i > 0 && i < last {
                    keep.insert(i);
                }
                if keep.len() >= min {
                    break;
                }
            }
        }
        keep.into_iter()
            .map(|i| {
                let (x, y) = polyline[i];
                y as usize * self.width + x as usize
            })
            .collect()
    }
}

/// Node ownership of skeleton pixels plus the resulting regions.
struct Partition<'g, 'a> {
    grid: &'g Grid<'a>,
    owner: Vec<Option<usize>>,
    /// For each free ink pixel, the nodes owning one of its neighbours.
    near: Vec<Vec<usize>>,
    regions: Vec<Region>,
}

impl Partition<'_, '_> {
    fn is_free(&self, idx: usize) -> bool {
        self.grid.is_ink(idx) && self.owner[idx].is_none()
    }

    fn links(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.grid.neighbors(idx).filter(move |&n| {
            self.is_free(n) && self.near[idx].iter().all(|a| !self.near[n].contains(a))
        })
    }

    fn touches(&self, pixel: usize, node: usize) -> bool {
        self.near[pixel].contains(&node)
    }

    /// Shortest path through the region from the pixels touching node `a`
    /// to a pixel touching node `b`, bracketed by both node positions.
    fn open_path(&self, region: &Region, a: (usize, usize), b: (usize, usize)) -> Vec<(f64, f64)> {
        let members: BTreeSet<usize> = region.pixels.iter().copied().collect();
        let sources: Vec<usize> = region
            .pixels
            .iter()
            .copied()
            .filter(|&p| self.touches(p, a.0))
            .collect();
        let search = self.bfs(&sources, &members);
        let target = search
            .order
            .iter()
            .copied()
            .find(|&p| self.touches(p, b.0))
            .unwrap_or(*search.order.last().unwrap());
        let mut pts = vec![self.grid.xy(a.1)];
        pts.extend(search.path_to(target).into_iter().map(|p| self.grid.xy(p)));
        pts.push(self.grid.xy(b.1));
        pts
    }

    /// Closed walk around a loop region: out to the pixel farthest from the
    /// anchor along one side, back along the other.
    fn loop_path(&self, region: &Region, anchor: Anchor) -> Vec<(f64, f64)> {
        let mut members: BTreeSet<usize> = region.pixels.iter().copied().collect();
        let (anchor_px, sources): (usize, Vec<usize>) = match anchor {
            Anchor::Node(id, px) => (
                px,
                region
                    .pixels
                    .iter()
                    .copied()
                    .filter(|&p| self.touches(p, id))
                    .collect(),
            ),
            Anchor::Pixel(seed) => {
                members.remove(&seed);
                (
                    seed,
                    self.links(seed).filter(|p| members.contains(p)).collect(),
                )
            }
        };
        let anchor_xy = self.grid.xy(anchor_px);
        if sources.is_empty() {
            return vec![anchor_xy, anchor_xy];
        }

        let first = self.bfs(&sources, &members);
        let far = first
            .order
            .iter()
            .copied()
            .max_by(|&a, &b| first.dist[a].cmp(&first.dist[b]).then(b.cmp(&a)))
            .unwrap();
        let out_path = first.path_to(far);

        let mut rest = members;
        for p in &out_path[..out_path.len() - 1] {
            rest.remove(p);
        }
        let others: Vec<usize> = sources
            .iter()
            .copied()
            .filter(|s| rest.contains(s) && *s != far)
            .collect();
        let mut back_path = Vec::new();
        if !others.is_empty() {
            let second = self.bfs(&others, &rest);
            if second.dist[far] != usize::MAX {
                back_path = second.path_to(far);
                back_path.pop();
                back_path.reverse();
            }
        }

        let mut pts = vec![anchor_xy];
        pts.extend(out_path.iter().chain(&back_path).map(|&p| self.grid.xy(p)));
        pts.push(anchor_xy);
        pts
    }

    fn bfs(&self, sources: &[usize], members: &BTreeSet<usize>) -> Search {
        let mut search = Search::new(self.grid.len());
        let mut queue = VecDeque::new();
        let mut sorted = sources.to_vec();
        sorted.sort_unstable();
        for s in sorted {
            if members.contains(&s) && search.dist[s] == usize::MAX {
                search.dist[s] = 0;
                search.order.push(s);
                queue.push_back(s);
            }
        }
        while let Some(cur) = queue.pop_front() {
            for n in self.links(cur) {
                if members.contains(&n) && search.dist[n] == usize::MAX {
                    search.dist[n] = search.dist[cur] + 1;
                    search.parent[n] = cur;
                    search.order.push(n);
                    queue.push_back(n);
                }
            }
        }
        search
    }
}

struct Search {
    dist: Vec<usize>,
    parent: Vec<usize>,
    order: Vec<usize>,
}

impl Search {
    fn new(len: usize) -> Self {
        Self {
            dist: vec![usize::MAX; len],
            parent: vec![usize::MAX; len],
            order: Vec::new(),
        }
    }

    /// Source-to-`target` path, inclusive.
    fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = vec![target];
        let mut cur = target;
        while self.parent[cur] != usize::MAX {
            cur = self.parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}
