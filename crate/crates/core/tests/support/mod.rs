//! Brute-force reference implementations shared by the statistics tests.
#![allow(dead_code)]

/// U of `a` by pairwise comparison.
pub fn u_pairwise(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for x in a {
        for y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Enumerate every way of picking |a| values out of the pool.
pub fn exact_p_enumerated(a: &[f64], b: &[f64]) -> f64 {
    let pool: Vec<f64> = a.iter().chain(b).copied().collect();
    let (n, na) = (pool.len(), a.len());
    let centre = (a.len() * b.len()) as f64 / 2.0;
    let observed = (u_pairwise(a, b) - centre).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (i, &v) in pool.iter().enumerate() {
            if mask & (1 << i) != 0 {
                x.push(v)
            } else {
                y.push(v)
            }
        }
        total += 1;
        if (u_pairwise(&x, &y) - centre).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn var_sum(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Between-group SS from the concatenated observations on each side.
pub fn between(left: &[f64], right: &[f64]) -> f64 {
    let all: Vec<f64> = left.iter().chain(right).copied().collect();
    let g = mean(&all);
    left.len() as f64 * (mean(left) - g).powi(2) + right.len() as f64 * (mean(right) - g).powi(2)
}

pub fn effect(left: &[f64], right: &[f64]) -> f64 {
    let dof = (left.len() + right.len()) as f64 - 2.0;
    let sd = if dof > 0.0 {
        ((var_sum(left) + var_sum(right)) / dof).sqrt()
    } else {
        0.0
    };
    let diff = (mean(left) - mean(right)).abs();
    match (sd == 0.0, diff == 0.0) {
        (true, true) => 0.0,
        (true, false) => f64::INFINITY,
        _ => diff / sd,
    }
}

pub fn sk_oracle(groups: &[(String, Vec<f64>)], out: &mut Vec<Vec<String>>) {
    if groups.len() < 2 {
        out.push(groups.iter().map(|g| g.0.clone()).collect());
        return;
    }
    let flat =
        |gs: &[(String, Vec<f64>)]| gs.iter().flat_map(|g| g.1.clone()).collect::<Vec<f64>>();
    let mut best_k = 1;
    let mut best = between(&flat(&groups[..1]), &flat(&groups[1..]));
    for k in 2..groups.len() {
        let b = between(&flat(&groups[..k]), &flat(&groups[k..]));
        if b - best > 1e-9 * best.abs() {
            best = b;
            best_k = k;
        }
    }
    let (l, r) = groups.split_at(best_k);
    if effect(&flat(l), &flat(r)) >= 0.2 {
        sk_oracle(l, out);
        sk_oracle(r, out);
    } else {
        out.push(groups.iter().map(|g| g.0.clone()).collect());
    }
}
