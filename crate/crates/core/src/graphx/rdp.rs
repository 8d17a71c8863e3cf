//! Ramer–Douglas–Peucker breakpoints on pixel polylines.

pub(crate) type Point = (f64, f64);

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return ((p.0 - a.0).powi(2) + (p.1 - a.1).powi(2)).sqrt();
    }
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Indices kept by RDP simplification with tolerance `epsilon`, ascending.
/// The first and last index are always kept. A closed polyline (first point
/// equal to the last) splits at the point farthest from its start.
pub(crate) fn simplify(points: &[Point], epsilon: f64) -> Vec<usize> {
    if points.len() <= 2 {
        return (0..points.len()).collect();
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0, points.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (a, b) = (points[lo], points[hi]);
        let mut best = (lo, 0.0);
        for (i, &p) in points.iter().enumerate().take(hi).skip(lo + 1) {
            let d = segment_distance(p, a, b);
            if d > best.1 {
                best = (i, d);
            }
        }
        if best.1 > epsilon {
            keep[best.0] = true;
            stack.push((lo, best.0));
            stack.push((best.0, hi));
        }
    }
    keep.iter()
        .enumerate()
        .filter_map(|(i, &k)| k.then_some(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_keeps_only_ends() {
        let pts: Vec<Point> = (0..10).map(|i| (i as f64, 3.0)).collect();
        assert_eq!(simplify(&pts, 2.0), vec![0, 9]);
    }

    #[test]
    fn right_angle_keeps_the_elbow() {
        let mut pts: Vec<Point> = (0..8).map(|i| (i as f64, 0.0)).collect();
        pts.extend((1..8).map(|i| (7.0, i as f64)));
        assert_eq!(simplify(&pts, 2.0), vec![0, 7, 14]);
    }

    #[test]
    fn small_wiggle_is_ignored() {
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.5), (4.0, 0.0)];
        assert_eq!(simplify(&pts, 2.0), vec![0, 4]);
    }

    #[test]
    fn closed_square_splits_at_corners() {
        let mut pts = Vec::new();
        for i in 0..10 {
            pts.push((i as f64, 0.0));
        }
        for i in 0..10 {
            pts.push((10.0, i as f64));
        }
        for i in 0..10 {
            pts.push((10.0 - i as f64, 10.0));
        }
        for i in 0..10 {
            pts.push((0.0, 10.0 - i as f64));
        }
        pts.push((0.0, 0.0));
        assert_eq!(simplify(&pts, 2.0), vec![0, 10, 20, 30, 40]);
    }
}
