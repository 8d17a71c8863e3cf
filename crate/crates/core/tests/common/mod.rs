//! Independent reference implementations and random fixture generators.
#![allow(dead_code)]

use glyphspec_core::graphx::{InterestPoint, NumeralGraph, PointKind};
use glyphspec_core::svm::{BinarySvmModel, KernelParams, TrainSummary};
use glyphspec_core::BinaryImage;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random graph with distinct integer coordinates and arbitrary positive weights.
pub fn random_graph<R: Rng>(rng: &mut R, max_order: usize) -> NumeralGraph {
    let n = rng.gen_range(1..=max_order);
    let mut cells: Vec<(usize, usize)> =
        (0..64).flat_map(|y| (0..64).map(move |x| (x, y))).collect();
    cells.shuffle(rng);
    let nodes = cells[..n]
        .iter()
        .map(|&(x, y)| InterestPoint::new(x, y, PointKind::Corner))
        .collect();
    let p = rng.gen_range(0.1..0.8);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(0.1..10.0)));
            }
        }
    }
    NumeralGraph::with_weights(nodes, edges).unwrap()
}

/// Disjoint union with `b`'s nodes shifted right by 100 px.
pub fn disjoint_union(a: &NumeralGraph, b: &NumeralGraph) -> NumeralGraph {
    let off = a.order();
    let nodes = a
        .nodes()
        .iter()
        .copied()
        .chain(
            b.nodes()
                .iter()
                .map(|p| InterestPoint::new(p.x + 100, p.y, p.kind)),
        )
        .collect();
    let edges = a
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.weight))
        .chain(b.edges().iter().map(|e| (e.u + off, e.v + off, e.weight)));
    NumeralGraph::with_weights(nodes, edges).unwrap()
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-10.0..10.0);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

/// Characteristic polynomial coefficients `c[k]` of `λᵏ` by Faddeev–LeVerrier.
pub fn char_poly(m: &[f64], n: usize) -> Vec<f64> {
    let a = DMatrix::from_row_slice(n, n, m);
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = &a * &mk + DMatrix::identity(n, n) * c[n - k + 1];
        c[n - k] = -(&a * &mk).trace() / k as f64;
    }
    c
}

fn horner(c: &[f64], x: f64) -> (f64, f64) {
    let (mut p, mut dp) = (0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp)
}

fn newton_from(c: &[f64], mut x: f64) -> f64 {
    for _ in 0..5000 {
        let (p, dp) = horner(c, x);
        if p == 0.0 || dp == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Roots of a real-rooted polynomial, descending. Newton started above the
/// largest root converges monotonically to it; deflate and repeat, then
/// polish each root on the original polynomial.
pub fn real_roots(c: &[f64]) -> Vec<f64> {
    let mut poly = c.to_vec();
    let mut roots = Vec::new();
    while poly.len() > 1 {
        let lead = *poly.last().unwrap();
        let bound = 1.0 + poly.iter().map(|v| (v / lead).abs()).fold(0.0, f64::max);
        let r = newton_from(&poly, bound);
        roots.push(newton_from(c, r));
        // Synthetic division by (x − r).
        let d = poly.len() - 1;
        let mut q = vec![0.0; d];
        q[d - 1] = poly[d];
        for k in (1..d).rev() {
            q[k - 1] = poly[k] + r * q[k];
        }
        poly = q;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

/// Exact optimum of the SVM dual by active-set enumeration: every index is
/// at 0, at C, or free, and the free block solves the equality-constrained
/// stationarity system. Feasible only for a handful of samples.
pub fn brute_force_dual(k: &[f64], y: &[f64], c: f64) -> f64 {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let objective = |alpha: &[f64]| {
        let mut v: f64 = alpha.iter().sum();
        for i in 0..n {
            for j in 0..n {
                v -= 0.5 * alpha[i] * alpha[j] * q(i, j);
            }
        }
        v
    };
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut status = vec![0u8; n];
        let mut rest = code;
        for s in status.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| status[i] == 2).collect();
        let mut alpha: Vec<f64> = status
            .iter()
            .map(|&s| if s == 1 { c } else { 0.0 })
            .collect();
        let fixed_sum: f64 = (0..n)
            .filter(|&i| status[i] != 2)
            .map(|i| y[i] * alpha[i])
            .sum();
        if free.is_empty() {
            if fixed_sum.abs() > 1e-12 {
                continue;
            }
        } else {
            let f = free.len();
            let mut a = DMatrix::<f64>::zeros(f + 1, f + 1);
            let mut b = DVector::<f64>::zeros(f + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = q(i, j);
                }
                a[(r, f)] = y[i];
                a[(f, r)] = y[i];
                b[r] = 1.0
                    - (0..n)
                        .filter(|&j| status[j] != 2)
                        .map(|j| q(i, j) * alpha[j])
                        .sum::<f64>();
            }
            b[f] = -fixed_sum;
            let Some(sol) = a.lu().solve(&b) else {
                continue;
            };
            if free
                .iter()
                .enumerate()
                .any(|(r, _)| sol[r] < -1e-12 || sol[r] > c + 1e-12)
            {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r].clamp(0.0, c);
            }
        }
        best = best.max(objective(&alpha));
    }
    best
}

/// Checks box and equality constraints and the KKT conditions of a trained
/// binary machine on its own training data.
pub fn check_kkt(
    model: &BinarySvmModel,
    summary: &TrainSummary,
    xs: &[Vec<f64>],
    ys: &[i8],
    params: KernelParams,
    tol: f64,
) -> Result<(), String> {
    let balance: f64 = summary
        .alpha
        .iter()
        .zip(ys)
        .map(|(a, &y)| a * y as f64)
        .sum();
    if balance.abs() > 1e-9 * params.c.max(1.0) * xs.len() as f64 {
        return Err(format!("sum alpha_i y_i = {balance}"));
    }
    for (i, (&a, &y)) in summary.alpha.iter().zip(ys).enumerate() {
        if a < 0.0 || a > params.c {
            return Err(format!("alpha[{i}] = {a} outside [0, {}]", params.c));
        }
        let margin = y as f64 * model.decision(&xs[i]);
        let at_lower = a <= 1e-12;
        let at_upper = a >= params.c - 1e-12;
        let ok = if at_lower {
            margin >= 1.0 - tol
        } else if at_upper {
            margin <= 1.0 + tol
        } else {
            (margin - 1.0).abs() <= tol
        };
        if !ok {
            return Err(format!("KKT violated at {i}: alpha = {a}, y f = {margin}"));
        }
    }
    Ok(())
}

/// Random binary problem with both classes present.
pub fn random_binary_problem<R: Rng>(rng: &mut R, max_n: usize) -> (Vec<Vec<f64>>, Vec<i8>) {
    let n = rng.gen_range(2..=max_n);
    let xs: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
        .collect();
    let mut ys: Vec<i8> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    ys[0] = 1;
    ys[1] = -1;
    (xs, ys)
}

pub fn rbf_gram(xs: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    let n = xs.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d2: f64 = xs[i].iter().zip(&xs[j]).map(|(a, b)| (a - b).powi(2)).sum();
            k[i * n + j] = (-gamma * d2).exp();
        }
    }
    k
}

/// Union of random filled rectangles and disks.
pub fn random_blob<R: Rng>(rng: &mut R) -> BinaryImage {
    let (w, h) = (rng.gen_range(12..40), rng.gen_range(12..40));
    let mut img = BinaryImage::empty(w, h);
    for _ in 0..rng.gen_range(1..5) {
        let (cx, cy) = (rng.gen_range(0..w) as f64, rng.gen_range(0..h) as f64);
        if rng.gen_bool(0.5) {
            let r = rng.gen_range(1.5..8.0);
            for y in 0..h {
                for x in 0..w {
                    if (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r {
                        img.set(x, y, true);
                    }
                }
            }
        } else {
            let (rw, rh) = (rng.gen_range(1..12) as f64, rng.gen_range(1..12) as f64);
            for y in 0..h {
                for x in 0..w {
                    if (x as f64 - cx).abs() <= rw && (y as f64 - cy).abs() <= rh {
                        img.set(x, y, true);
                    }
                }
            }
        }
    }
    img
}

/// Whether any ink pixel has an all-ink 3×3 neighbourhood.
pub fn has_full_3x3(img: &BinaryImage) -> bool {
    img.foreground().any(|(x, y)| {
        (-1..=1).all(|dy| (-1..=1).all(|dx| img.get_signed(x as isize + dx, y as isize + dy)))
    })
}

/// Per-class precision/recall/F by counting samples directly.
pub fn tally_prf(actual: &[usize], predicted: &[usize], k: usize) -> Vec<(f64, f64, f64)> {
    (0..k)
        .map(|c| {
            let tp = actual
                .iter()
                .zip(predicted)
                .filter(|&(&a, &p)| a == c && p == c)
                .count() as f64;
            let pred = predicted.iter().filter(|&&p| p == c).count() as f64;
            let act = actual.iter().filter(|&&a| a == c).count() as f64;
            let p = if pred > 0.0 { tp / pred } else { 0.0 };
            let r = if act > 0.0 { tp / act } else { 0.0 };
            let f = if p + r > 0.0 {
                2.0 * p * r / (p + r)
            } else {
                0.0
            };
            (p, r, f)
        })
        .collect()
}
