//! Hausdorff distance between closed polylines, measured point-to-segment.

use std::collections::HashMap;

type Point = (f64, f64);

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - (a.0 + s * dx)).hypot(p.1 - (a.1 + s * dy))
}

/// Uniform grid over the segments of a polyline.
struct SegmentGrid<'a> {
    points: &'a [Point],
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> SegmentGrid<'a> {
    fn new(points: &'a [Point]) -> Self {
        let longest = points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
            .fold(0.0, f64::max);
        let (mut lo, mut hi) = (
            (f64::INFINITY, f64::INFINITY),
            (f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in points {
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        let typical = (hi.0 - lo.0).hypot(hi.1 - lo.1) / (points.len() as f64).sqrt();
        let cell = longest.max(typical);
        let cell = if cell > 0.0 { cell } else { 1.0 };
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, w) in points.windows(2).enumerate() {
            let (x0, x1) = (w[0].0.min(w[1].0), w[0].0.max(w[1].0));
            let (y0, y1) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
            for cx in (x0 / cell).floor() as i64..=(x1 / cell).floor() as i64 {
                for cy in (y0 / cell).floor() as i64..=(y1 / cell).floor() as i64 {
                    buckets.entry((cx, cy)).or_default().push(i);
                }
            }
        }
        Self {
            points,
            cell,
            buckets,
        }
    }

    fn distance(&self, p: Point) -> f64 {
        let (cx, cy) = (
            (p.0 / self.cell).floor() as i64,
            (p.1 / self.cell).floor() as i64,
        );
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        loop {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    if let Some(list) = self.buckets.get(&(cx + dx, cy + dy)) {
                        for &i in list {
                            best = best.min(point_segment_distance(
                                p,
                                self.points[i],
                                self.points[i + 1],
                            ));
                        }
                    }
                }
            }
            // Anything in ring k+1 or beyond is at least k cells away.
            if best <= ring as f64 * self.cell || ring > 1 << 20 {
                return best;
            }
            ring += 1;
        }
    }
}

/// Largest distance from a vertex of `a` to the polyline `b`.
pub fn directed_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    if b.len() < 2 {
        return a
            .iter()
            .map(|&p| {
                b.first()
                    .map_or(f64::INFINITY, |&q| (p.0 - q.0).hypot(p.1 - q.1))
            })
            .fold(0.0, f64::max);
    }
    let grid = SegmentGrid::new(b);
    a.iter().map(|&p| grid.distance(p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two polylines given by their vertices.
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}
