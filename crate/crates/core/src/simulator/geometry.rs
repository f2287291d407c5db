//! Planar points and a uniform bucket grid for nearest-neighbour queries.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        self.dist2(o).sqrt()
    }

    pub fn dist2(self, o: Point) -> f64 {
        let (dx, dy) = (self.x - o.x, self.y - o.y);
        dx * dx + dy * dy
    }

    pub fn norm(self) -> f64 {
        self.dist(Point::ORIGIN)
    }
}

/// Points of one tier bucketed on a square grid covering `[-h, h]^2`.
#[derive(Debug, Clone)]
pub struct Grid {
    half: f64,
    cell: f64,
    n: usize,
    start: Vec<u32>,
    items: Vec<u32>,
    pts: Vec<Point>,
}

impl Grid {
    /// `per_cell` is the target mean occupancy.
    pub fn new(pts: &[Point], half: f64, per_cell: f64) -> Self {
        let want = (pts.len() as f64 / per_cell).max(1.0);
        let n = (want.sqrt().ceil() as usize).clamp(1, 4096);
        let cell = 2.0 * half / n as f64;
        let mut counts = vec![0u32; n * n + 1];
        let idx: Vec<usize> = pts.iter().map(|&p| Self::slot(half, cell, n, p)).collect();
        for &i in &idx {
            counts[i + 1] += 1;
        }
        for i in 0..n * n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; pts.len()];
        for (k, &i) in idx.iter().enumerate() {
            items[fill[i] as usize] = k as u32;
            fill[i] += 1;
        }
        Grid {
            half,
            cell,
            n,
            start: counts,
            items,
            pts: pts.to_vec(),
        }
    }

    fn coord(half: f64, cell: f64, n: usize, v: f64) -> usize {
        (((v + half) / cell).floor().max(0.0) as usize).min(n - 1)
    }

    fn slot(half: f64, cell: f64, n: usize, p: Point) -> usize {
        Self::coord(half, cell, n, p.y) * n + Self::coord(half, cell, n, p.x)
    }

    pub fn points(&self) -> &[Point] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Calls `visit(index, point)` for every point in the cells at Chebyshev
    /// ring `k` around the cell of `z`. Returns false once the ring lies wholly
    /// outside the grid.
    fn ring(&self, z: Point, k: usize, mut visit: impl FnMut(usize, Point)) -> bool {
        let (cx, cy, _) = self.locate(z);
        self.ring_at(cx, cy, k as isize, &mut visit)
    }

    /// Lower bound on the distance from `z` to anything in ring `k`.
    fn ring_floor(&self, k: usize) -> f64 {
        (k.saturating_sub(1)) as f64 * self.cell
    }

    /// Cell coordinates of `z` and its distance to the nearest edge of that cell.
    fn locate(&self, z: Point) -> (isize, isize, f64) {
        let cx = Self::coord(self.half, self.cell, self.n, z.x);
        let cy = Self::coord(self.half, self.cell, self.n, z.y);
        let lx = z.x + self.half - cx as f64 * self.cell;
        let ly = z.y + self.half - cy as f64 * self.cell;
        let m = lx.min(self.cell - lx).min(ly).min(self.cell - ly).max(0.0);
        (cx as isize, cy as isize, m)
    }

    /// Visits ring `k` around cell `(cx, cy)`; false once the ring is off the grid.
    #[inline]
    fn ring_at(&self, cx: isize, cy: isize, k: isize, visit: &mut impl FnMut(usize, Point)) -> bool {
        let n = self.n as isize;
        if cx - k < 0 && cy - k < 0 && cx + k >= n && cy + k >= n {
            return false;
        }
        let mut row = |iy: isize, x0: isize, x1: isize| {
            if iy < 0 || iy >= n {
                return;
            }
            let (x0, x1) = (x0.max(0), x1.min(n - 1));
            if x0 > x1 {
                return;
            }
            let base = iy as usize * self.n;
            let (s0, s1) = (self.start[base + x0 as usize], self.start[base + x1 as usize + 1]);
            for &it in &self.items[s0 as usize..s1 as usize] {
                visit(it as usize, self.pts[it as usize]);
            }
        };
        if k == 0 {
            row(cy, cx, cx);
            return true;
        }
        row(cy - k, cx - k, cx + k);
        row(cy + k, cx - k, cx + k);
        for iy in cy - k + 1..cy + k {
            row(iy, cx - k, cx - k);
            row(iy, cx + k, cx + k);
        }
        true
    }

    /// Nearest point within `max_r` of `z`.
    pub fn nearest_within(&self, z: Point, max_r: f64) -> Option<(usize, f64)> {
        let (cx, cy, m) = self.locate(z);
        let max2 = max_r * max_r;
        let (mut bi, mut b2) = (usize::MAX, f64::INFINITY);
        let mut k = 0isize;
        loop {
            let floor = if k == 0 { 0.0 } else { (k - 1) as f64 * self.cell + m };
            if floor * floor > b2.min(max2) {
                break;
            }
            let more = self.ring_at(cx, cy, k, &mut |i, p| {
                let d2 = z.dist2(p);
                if d2 < b2 {
                    bi = i;
                    b2 = d2;
                }
            });
            if !more {
                break;
            }
            k += 1;
        }
        (bi != usize::MAX && b2 <= max2).then(|| (bi, b2.sqrt()))
    }

    pub fn nearest(&self, z: Point) -> Option<(usize, f64)> {
        self.nearest_within(z, f64::INFINITY)
    }

    /// Whether any point other than `skip` lies strictly closer than `r` to `z`.
    pub fn any_closer(&self, z: Point, r: f64, skip: usize) -> bool {
        let (cx, cy, m) = self.locate(z);
        let r2 = r * r;
        let mut found = false;
        let mut k = 0isize;
        while !found {
            let floor = if k == 0 { 0.0 } else { (k - 1) as f64 * self.cell + m };
            if floor >= r {
                break;
            }
            let more = self.ring_at(cx, cy, k, &mut |i, p| {
                if i != skip && z.dist2(p) < r2 {
                    found = true;
                }
            });
            if !more {
                break;
            }
            k += 1;
        }
        found
    }

    /// Radius of a disc around point `i` that contains its Voronoi cell
    /// clipped to the grid square. Uses the nearest neighbour in each 60° sector.
    pub fn cell_bound(&self, i: usize) -> f64 {
        use std::f64::consts::PI;
        let p = self.pts[i];
        // farthest reach of each sector inside the square
        let ext: [f64; 6] = std::array::from_fn(|s| self.wedge_extent(p, s as f64 * PI / 3.0 - PI, PI / 3.0));
        let mut sector = [f64::INFINITY; 6];
        let mut k = 0;
        loop {
            let more = self.ring(p, k, |j, q| {
                if j == i {
                    return;
                }
                let ang = (q.y - p.y).atan2(q.x - p.x) + PI;
                let s = ((ang / (PI / 3.0)) as usize).min(5);
                sector[s] = sector[s].min(p.dist(q));
            });
            let floor = self.ring_floor(k + 1);
            let done = (0..6).all(|s| sector[s].min(ext[s]) <= floor);
            if done || !more {
                return (0..6).map(|s| sector[s].min(ext[s])).fold(0.0, f64::max);
            }
            k += 1;
        }
    }

    /// Largest distance from `p` to a point of the square within the wedge of
    /// directions `[theta, theta + width]`.
    fn wedge_extent(&self, p: Point, theta: f64, width: f64) -> f64 {
        let h = self.half;
        let exit = |th: f64| {
            let (s, c) = th.sin_cos();
            let tx = if c > 0.0 { (h - p.x) / c } else if c < 0.0 { (-h - p.x) / c } else { f64::INFINITY };
            let ty = if s > 0.0 { (h - p.y) / s } else if s < 0.0 { (-h - p.y) / s } else { f64::INFINITY };
            tx.min(ty).max(0.0)
        };
        let mut best = exit(theta).max(exit(theta + width));
        for (x, y) in [(-h, -h), (-h, h), (h, -h), (h, h)] {
            let c = Point::new(x, y);
            let mut a = (c.y - p.y).atan2(c.x - p.x) - theta;
            a = a.rem_euclid(2.0 * std::f64::consts::PI);
            if a <= width {
                best = best.max(p.dist(c));
            }
        }
        best
    }
}
