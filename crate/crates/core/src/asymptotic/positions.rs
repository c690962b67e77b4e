use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

pub type Point = [f64; 2];

pub const LLOYD_SAMPLES: usize = 100_000;
const LLOYD_SEED: u64 = 0x5eed_1107d;
const LLOYD_MAX_ITERS: usize = 60;
const LLOYD_TOL: f64 = 1e-6;

#[inline]
pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[inline]
fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

pub(crate) fn perfect_square_root(c: usize) -> Option<usize> {
    let k = (c as f64).sqrt().round() as usize;
    (k * k == c).then_some(k)
}

/// Replica positions for `c` replicas.
///
/// Perfect squares get the centres of a `√c × √c` grid of equal cells.
/// Other counts get centroidal positions from Lloyd iterations on uniform
/// samples, started with k-means++ under a fixed seed.
pub fn replica_positions(c: usize) -> Result<Vec<Point>> {
    replica_positions_seeded(c, LLOYD_SEED)
}

pub fn replica_positions_seeded(c: usize, seed: u64) -> Result<Vec<Point>> {
    if c < 1 {
        return Err(Error::InvalidArgument("replica count must be at least 1".into()));
    }
    Ok(match perfect_square_root(c) {
        Some(k) => grid_centers(k),
        None => lloyd(c, LLOYD_SAMPLES, seed),
    })
}

fn grid_centers(k: usize) -> Vec<Point> {
    let step = 1.0 / k as f64;
    (0..k)
        .flat_map(|i| (0..k).map(move |j| [(i as f64 + 0.5) * step, (j as f64 + 0.5) * step]))
        .collect()
}

fn lloyd(c: usize, samples: usize, seed: u64) -> Vec<Point> {
    let mut rng = rng::seeded(seed);
    let pts: Vec<Point> = (0..samples).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();

    // k-means++ seeding
    let mut centers = vec![pts[rng.gen_range(0..samples)]];
    let mut d2: Vec<f64> = pts.iter().map(|&p| dist2(p, centers[0])).collect();
    while centers.len() < c {
        let total: f64 = d2.iter().sum();
        let mut target = rng.gen::<f64>() * total;
        let mut pick = samples - 1;
        for (i, &w) in d2.iter().enumerate() {
            if target < w {
                pick = i;
                break;
            }
            target -= w;
        }
        let new = pts[pick];
        centers.push(new);
        for (w, &p) in d2.iter_mut().zip(&pts) {
            *w = w.min(dist2(p, new));
        }
    }

    let mut sums = vec![[0.0f64; 3]; c];
    for _ in 0..LLOYD_MAX_ITERS {
        let index = NearestReplica::new(&centers);
        sums.iter_mut().for_each(|s| *s = [0.0; 3]);
        for &p in &pts {
            let (k, _) = index.nearest(p);
            sums[k][0] += p[0];
            sums[k][1] += p[1];
            sums[k][2] += 1.0;
        }
        let mut shift: f64 = 0.0;
        for (ctr, s) in centers.iter_mut().zip(&sums) {
            if s[2] > 0.0 {
                let next = [s[0] / s[2], s[1] / s[2]];
                shift = shift.max(dist(*ctr, next));
                *ctr = next;
            }
        }
        if shift < LLOYD_TOL {
            break;
        }
    }
    centers
}

/// Nearest-replica queries over points of the unit square.
///
/// Square grids resolve by cell lookup; other layouts use a bucket grid
/// searched in expanding rings.
#[derive(Debug, Clone)]
pub enum NearestReplica {
    Grid { k: usize, centers: Vec<Point> },
    Buckets { g: usize, centers: Vec<Point>, cells: Vec<Vec<usize>> },
}

impl NearestReplica {
    pub fn new(centers: &[Point]) -> Self {
        if let Some(k) = perfect_square_root(centers.len()) {
            if grid_centers(k) == centers {
                return Self::Grid { k, centers: centers.to_vec() };
            }
        }
        let g = ((centers.len() as f64).sqrt().ceil() as usize).max(1);
        let mut cells = vec![Vec::new(); g * g];
        for (i, &p) in centers.iter().enumerate() {
            let (cx, cy) = cell_of(p, g);
            cells[cy * g + cx].push(i);
        }
        Self::Buckets { g, centers: centers.to_vec(), cells }
    }

    pub fn centers(&self) -> &[Point] {
        match self {
            Self::Grid { centers, .. } | Self::Buckets { centers, .. } => centers,
        }
    }

    /// Index of the nearest replica and its distance.
    pub fn nearest(&self, p: Point) -> (usize, f64) {
        match self {
            Self::Grid { k, centers } => {
                let (cx, cy) = cell_of(p, *k);
                let i = cx * k + cy;
                (i, dist(p, centers[i]))
            }
            Self::Buckets { g, centers, cells } => {
                let g = *g;
                let h = 1.0 / g as f64;
                let (cx, cy) = cell_of(p, g);
                let mut best = (usize::MAX, f64::INFINITY);
                for r in 0..g {
                    let (x0, x1) = (cx.saturating_sub(r), (cx + r).min(g - 1));
                    let (y0, y1) = (cy.saturating_sub(r), (cy + r).min(g - 1));
                    for x in x0..=x1 {
                        for y in y0..=y1 {
                            // only the ring itself; inner cells were done already
                            if x.abs_diff(cx) != r && y.abs_diff(cy) != r {
                                continue;
                            }
                            for &i in &cells[y * g + x] {
                                let d = dist2(p, centers[i]);
                                if d < best.1 {
                                    best = (i, d);
                                }
                            }
                        }
                    }
                    // everything unvisited is at least r cells away
                    let reach = r as f64 * h;
                    if best.0 != usize::MAX && best.1 <= reach * reach {
                        break;
                    }
                }
                (best.0, best.1.sqrt())
            }
        }
    }
}

fn cell_of(p: Point, g: usize) -> (usize, usize) {
    let f = |v: f64| ((v * g as f64) as usize).min(g - 1);
    (f(p[0]), f(p[1]))
}
