//! Set-cover solvers over an [`AdjacencyMatrix`].
//!
//! Every row of the matrix is simultaneously a candidate set (the points a
//! center would cover) and the coverer list of an element, because the
//! matrix is symmetric. The exact solver works one connected component at a
//! time: a minimum cover of the whole matrix is the union of minimum covers of
//! its components, and so is the lexicographically smallest one.

use fixedbitset::FixedBitSet;

use super::adjacency::AdjacencyMatrix;
use crate::error::{Error, Result};

/// Greedy `ln N + 1` approximation: repeatedly take the row that covers the
/// most uncovered points, breaking ties by the lowest index. Returns the
/// selection in ascending order.
pub fn greedy_cover(adj: &AdjacencyMatrix) -> Vec<usize> {
    let rows = bitsets(adj);
    let all = full(adj.len());
    let mut picked = greedy_on(&rows, &all, &all);
    picked.sort_unstable();
    picked
}

/// Minimum-cardinality cover via branch and bound, returning the
/// lexicographically smallest minimum cover in ascending order.
///
/// Fails with [`Error::NodeLimitExceeded`] once the total number of visited
/// search nodes passes `node_limit`; the error carries the best complete cover
/// known at that point.
pub fn exact_min_cover(adj: &AdjacencyMatrix, node_limit: u64) -> Result<Vec<usize>> {
    let rows = bitsets(adj);
    let comps = components(adj);
    let mut nodes = 0u64;
    let mut picked = Vec::new();

    for (c, comp) in comps.iter().enumerate() {
        let outcome = minimum_on_component(&rows, comp, node_limit, &mut nodes, None).and_then(|min| {
            let min = min.expect("uncapped search always yields a cover");
            lex_smallest(&rows, comp, min, node_limit, &mut nodes)
        });
        match outcome {
            Ok(cover) => picked.extend(cover),
            Err(best) => {
                picked.extend(best);
                for rest in &comps[c + 1..] {
                    picked.extend(greedy_on(&rows, rest, rest));
                }
                picked.sort_unstable();
                return Err(Error::NodeLimitExceeded {
                    limit: node_limit,
                    incumbent: picked,
                });
            }
        }
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Size of a minimum cover, or `None` when it exceeds `cap`.
///
/// Cheaper than [`exact_min_cover`]: no lexicographic extraction, and the
/// search stops as soon as the running total passes `cap`.
pub fn min_cover_size(adj: &AdjacencyMatrix, node_limit: u64, cap: Option<usize>) -> Result<Option<usize>> {
    let rows = bitsets(adj);
    let comps = components(adj);
    let mut nodes = 0u64;
    let mut total = 0usize;
    for (c, comp) in comps.iter().enumerate() {
        // Every later component needs at least one center.
        let remaining_cap = match cap {
            Some(cap) => match cap.checked_sub(total + (comps.len() - c - 1)) {
                Some(r) if r >= 1 => Some(r),
                _ => return Ok(None),
            },
            None => None,
        };
        match minimum_on_component(&rows, comp, node_limit, &mut nodes, remaining_cap) {
            Ok(Some(min)) => total += min.len(),
            Ok(None) => return Ok(None),
            Err(best) => {
                let mut incumbent = best;
                for rest in &comps[c + 1..] {
                    incumbent.extend(greedy_on(&rows, rest, rest));
                }
                incumbent.sort_unstable();
                return Err(Error::NodeLimitExceeded {
                    limit: node_limit,
                    incumbent,
                });
            }
        }
    }
    Ok(Some(total))
}

fn bitsets(adj: &AdjacencyMatrix) -> Vec<FixedBitSet> {
    let n = adj.len();
    adj.rows()
        .iter()
        .map(|row| {
            let mut b = FixedBitSet::with_capacity(n);
            for &j in row {
                b.insert(j);
            }
            b
        })
        .collect()
}

fn full(n: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    b.insert_range(..);
    b
}

fn components(adj: &AdjacencyMatrix) -> Vec<FixedBitSet> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = FixedBitSet::with_capacity(n);
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            comp.insert(i);
            for &j in adj.row(i) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Greedy cover of `uncovered` using rows from `allowed`, in pick order.
fn greedy_on(rows: &[FixedBitSet], uncovered: &FixedBitSet, allowed: &FixedBitSet) -> Vec<usize> {
    let mut uncovered = uncovered.clone();
    let mut picked = Vec::new();
    while !uncovered.is_clear() {
        let mut best = None;
        let mut best_gain = 0;
        for s in allowed.ones() {
            let gain = rows[s].intersection_count(&uncovered);
            if gain > best_gain {
                best_gain = gain;
                best = Some(s);
            }
        }
        let Some(s) = best else { break };
        uncovered.difference_with(&rows[s]);
        picked.push(s);
    }
    picked
}

/// Minimum cover of one component. With `cap`, only covers of at most `cap`
/// rows are sought and `Ok(None)` means none exists. `Err` carries the
/// incumbent when the node budget runs out.
fn minimum_on_component(
    rows: &[FixedBitSet],
    comp: &FixedBitSet,
    node_limit: u64,
    nodes: &mut u64,
    cap: Option<usize>,
) -> Result<Option<Vec<usize>>, Vec<usize>> {
    let greedy = greedy_on(rows, comp, comp);
    let capped = cap.is_some_and(|cap| cap < greedy.len());
    let bound = if capped {
        cap.unwrap_or(0) + 1
    } else {
        greedy.len()
    };
    let mut search = Search::new(rows, *nodes, node_limit, bound, false);
    search.run(comp, comp);
    *nodes = search.nodes;
    let best = match search.best.take() {
        Some(found) => Some(found),
        None if !capped => Some(greedy.clone()),
        None => None,
    };
    if search.aborted {
        return Err(best.unwrap_or(greedy));
    }
    Ok(best)
}

/// Lexicographically smallest cover of `comp` with exactly `min.len()` rows,
/// where `min` is some minimum cover.
///
/// Walks the indices in ascending order and keeps index `i` whenever a cover
/// of the right size exists that contains the kept prefix, `i`, and otherwise
/// only indices above `i`.
fn lex_smallest(
    rows: &[FixedBitSet],
    comp: &FixedBitSet,
    min: Vec<usize>,
    node_limit: u64,
    nodes: &mut u64,
) -> Result<Vec<usize>, Vec<usize>> {
    let k = min.len();
    let mut witness = min;
    witness.sort_unstable();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut uncovered = comp.clone();
    let mut later = comp.clone();

    for i in comp.ones() {
        if chosen.len() == k {
            break;
        }
        later.set(i, false);
        if rows[i].intersection_count(&uncovered) == 0 {
            continue;
        }
        let next_witness = witness.iter().copied().find(|w| !chosen.contains(w));
        if next_witness == Some(i) {
            chosen.push(i);
            uncovered.difference_with(&rows[i]);
            continue;
        }
        let mut rest = uncovered.clone();
        rest.difference_with(&rows[i]);
        let budget = k - chosen.len() - 1;
        if rest.is_clear() {
            chosen.push(i);
            uncovered = rest;
            witness = chosen.clone();
            continue;
        }
        if budget == 0 {
            continue;
        }
        let mut search = Search::new(rows, *nodes, node_limit, budget + 1, true);
        search.run(&rest, &later);
        *nodes = search.nodes;
        if search.aborted {
            return Err(witness);
        }
        if let Some(tail) = search.best {
            chosen.push(i);
            uncovered = rest;
            witness = chosen.iter().copied().chain(tail).collect();
            witness.sort_unstable();
        }
    }
    debug_assert!(uncovered.is_clear());
    Ok(chosen)
}

struct Search<'a> {
    rows: &'a [FixedBitSet],
    nodes: u64,
    limit: u64,
    aborted: bool,
    /// Only covers with fewer than `bound` rows are of interest.
    bound: usize,
    first_only: bool,
    best: Option<Vec<usize>>,
    chosen: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(rows: &'a [FixedBitSet], nodes: u64, limit: u64, bound: usize, first_only: bool) -> Self {
        Search {
            rows,
            nodes,
            limit,
            aborted: false,
            bound,
            first_only,
            best: None,
            chosen: Vec::new(),
        }
    }

    fn run(&mut self, uncovered: &FixedBitSet, allowed: &FixedBitSet) {
        self.recurse(uncovered, allowed);
    }

    fn done(&self) -> bool {
        self.aborted || (self.first_only && self.best.is_some())
    }

    fn recurse(&mut self, uncovered: &FixedBitSet, allowed: &FixedBitSet) {
        if self.nodes >= self.limit {
            self.aborted = true;
            return;
        }
        self.nodes += 1;
        if uncovered.is_clear() {
            self.bound = self.chosen.len();
            self.best = Some(self.chosen.clone());
            return;
        }
        if self.chosen.len() + 1 >= self.bound {
            return;
        }
        let budget = self.bound - 1 - self.chosen.len();

        let mut order = Vec::with_capacity(uncovered.count_ones(..));
        for e in uncovered.ones() {
            let count = self.rows[e].intersection_count(allowed);
            if count == 0 {
                return;
            }
            order.push((count, e));
        }
        order.sort_unstable();
        if self.lower_bound(uncovered, allowed, &order) > budget {
            return;
        }

        // Branch on the uncovered point with the fewest coverers. A coverer
        // whose useful part is contained in another coverer's can be dropped.
        let e = order[0].1;
        let mut coverers = self.rows[e].clone();
        coverers.intersect_with(allowed);
        let mut cands: Vec<(usize, FixedBitSet)> = coverers
            .ones()
            .map(|s| {
                let mut useful = self.rows[s].clone();
                useful.intersect_with(uncovered);
                (s, useful)
            })
            .collect();
        let mut keep = vec![true; cands.len()];
        for a in 0..cands.len() {
            for b in 0..cands.len() {
                if a == b || !keep[b] {
                    continue;
                }
                let (sa, ua) = &cands[a];
                let (sb, ub) = &cands[b];
                if ua.is_subset(ub) && (ua != ub || sb < sa) {
                    keep[a] = false;
                    break;
                }
            }
        }
        let mut local = allowed.clone();
        for (k, (s, _)) in keep.iter().zip(&cands) {
            if !k {
                local.set(*s, false);
            }
        }
        let mut kept: Vec<(usize, FixedBitSet)> = cands
            .drain(..)
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect();
        kept.sort_by_key(|(s, useful)| (std::cmp::Reverse(useful.count_ones(..)), *s));

        for (s, useful) in kept {
            local.set(s, false);
            let mut next = uncovered.clone();
            next.difference_with(&useful);
            self.chosen.push(s);
            self.recurse(&next, &local);
            self.chosen.pop();
            if self.done() || self.chosen.len() + 1 >= self.bound {
                return;
            }
        }
    }

    /// Max of three bounds on the number of extra rows still needed: the
    /// largest gains summed until they reach the uncovered count, a packing of
    /// points with pairwise disjoint coverer sets, and a greedy feasible
    /// solution of the fractional packing dual.
    fn lower_bound(&self, uncovered: &FixedBitSet, allowed: &FixedBitSet, order: &[(usize, usize)]) -> usize {
        let mut gains: Vec<usize> = allowed
            .ones()
            .map(|s| self.rows[s].intersection_count(uncovered))
            .filter(|&g| g > 0)
            .collect();
        gains.sort_unstable_by(|a, b| b.cmp(a));
        let mut by_gain = 0;
        let mut acc = 0;
        for g in gains {
            if acc >= order.len() {
                break;
            }
            acc += g;
            by_gain += 1;
        }

        let n = self.rows.len();
        let mut used = FixedBitSet::with_capacity(n);
        let mut packing = 0;
        let mut capacity = vec![1.0f64; n];
        let mut dual = 0.0;
        for &(_, e) in order {
            let mut cov = self.rows[e].clone();
            cov.intersect_with(allowed);
            if cov.is_disjoint(&used) {
                packing += 1;
                used.union_with(&cov);
            }
            let y = cov.ones().map(|s| capacity[s]).fold(f64::INFINITY, f64::min);
            if y > 0.0 {
                for s in cov.ones() {
                    capacity[s] -= y;
                }
                dual += y;
            }
        }
        let dual = (dual - 1e-9).ceil().max(0.0) as usize;
        by_gain.max(packing).max(dual)
    }
}
