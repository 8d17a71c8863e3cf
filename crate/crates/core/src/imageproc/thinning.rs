//! Guo–Hall two-subiteration parallel thinning (algorithm A1 of Guo & Hall,
//! "Parallel thinning with two-subiteration algorithms", CACM 1989).

use super::{neighbor_ring, BinaryImage, SkeletonImage};

/// Thins `bin` to a one-pixel-wide 8-connected skeleton, iterating both
/// subiterations until neither deletes a pixel.
pub fn thin(bin: &BinaryImage) -> SkeletonImage {
    let mut img = bin.clone();
    let mut marked = Vec::new();
    loop {
        let mut changed = false;
        for odd in [true, false] {
            marked.clear();
            for (x, y) in img.foreground() {
                if deletable(&neighbor_ring(&img, x, y), odd) {
                    marked.push((x, y));
                }
            }
            changed |= !marked.is_empty();
            for &(x, y) in &marked {
                img.set(x, y, false);
            }
        }
        if !changed {
            break;
        }
    }
    SkeletonImage::from_binary_unchecked(img)
}

fn deletable(ring: &[bool; 8], odd: bool) -> bool {
    let [p2, p3, p4, p5, p6, p7, p8, p9] = ring.map(u8::from);
    let not = |v: u8| 1 - v;

    let c = (not(p2) & (p3 | p4))
        + (not(p4) & (p5 | p6))
        + (not(p6) & (p7 | p8))
        + (not(p8) & (p9 | p2));
    if c != 1 {
        return false;
    }

    let n1 = (p9 | p2) + (p3 | p4) + (p5 | p6) + (p7 | p8);
    let n2 = (p2 | p3) + (p4 | p5) + (p6 | p7) + (p8 | p9);
    let n = n1.min(n2);
    if !(2..=3).contains(&n) {
        return false;
    }

    let m = if odd {
        (p6 | p7 | not(p9)) & p8
    } else {
        (p2 | p3 | not(p5)) & p4
    };
    m == 0
}
