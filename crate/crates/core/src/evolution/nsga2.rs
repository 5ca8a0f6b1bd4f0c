//! Fast non-dominated sorting, crowding distance and elitist truncation.
//!
//! Everything here works on plain objective slices (minimized) so the
//! routines can be checked against brute-force oracles independently of the
//! evolution engine.

use std::cmp::Ordering;

use super::objectives::dominates;

/// Partitions `points` into Pareto fronts, best first.
///
/// `O(M N^2)`: for every point, count how many points dominate it and record
/// the points it dominates, then peel fronts off in order.
pub fn fast_non_dominated_sort<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates(a, b) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(b, a) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by_me[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of `front` (indices into `points`).
///
/// Per objective, the extreme members get an infinite distance and interior
/// members accumulate the gap between their neighbours divided by the
/// objective's span on the front. Objectives with zero span only mark their
/// extremes. Ties are ordered by index.
pub fn crowding_distance<P: AsRef<[f64]>>(points: &[P], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        distance.fill(f64::INFINITY);
        return distance;
    }
    let n_obj = points[front[0]].as_ref().len();
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..n_obj {
        let value = |k: usize| points[front[k]].as_ref()[m];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(front[a].cmp(&front[b])));
        let (first, last) = (order[0], order[n - 1]);
        distance[first] = f64::INFINITY;
        distance[last] = f64::INFINITY;
        let span = value(last) - value(first);
        if span <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            distance[w[1]] += (value(w[2]) - value(w[0])) / span;
        }
    }
    distance
}

/// NSGA-II truncation: whole fronts while they fit, then the most isolated
/// members of the first front that does not fit. Returns indices into
/// `points` in selection order.
pub fn select_survivors<P: AsRef<[f64]>>(points: &[P], count: usize) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(count);
    for front in fast_non_dominated_sort(points) {
        let room = count - chosen.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            chosen.extend_from_slice(&front);
            continue;
        }
        let distance = crowding_distance(points, &front);
        let mut ranked: Vec<usize> = (0..front.len()).collect();
        ranked.sort_by(|&a, &b| match distance[b].partial_cmp(&distance[a]) {
            Some(Ordering::Equal) | None => front[a].cmp(&front[b]),
            Some(ord) => ord,
        });
        chosen.extend(ranked[..room].iter().map(|&k| front[k]));
        break;
    }
    chosen
}
