use num_bigint::BigUint;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::hst::{DraftNode, Hst};
use super::{FiniteMetric, RamseyError};
use crate::graph::{VertexId, Weight};
use crate::ratio::Ratio;
use crate::rng::rng_for;
use crate::util::UnionFind;

/// Centers tried per split.
pub const CENTERS_PER_SPLIT: usize = 32;
/// Randomized attempts before the deterministic fallback.
pub const MAX_ATTEMPTS: u32 = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamseyOutcome {
    /// The demand set the call was made on.
    pub points: Vec<VertexId>,
    /// The chosen subset, ascending.
    pub subset: Vec<VertexId>,
    /// Dominating ultrametric on `subset`.
    pub hst: Hst,
    /// Exact `max ρ/d` over pairs of `subset` (1 for a single point).
    pub alpha: Ratio,
    pub attempts: u32,
    pub fallback: bool,
}

/// Target subset size `m^(1 - 1/k)`; all of `m` when `k = 1`.
fn target(m: usize, k: u32) -> f64 {
    if k == 1 {
        m as f64
    } else {
        (m as f64).powf((k - 1) as f64 / k as f64)
    }
}

/// `s^k >= m^(k-1)`, exactly.
pub fn cardinality_ok(s: usize, m: usize, k: u32) -> bool {
    BigUint::from(s).pow(k) >= BigUint::from(m).pow(k - 1)
}

/// Smallest subset size a Ramsey step may return on `m` demand points:
/// all of them when `k = 1`, else the least `s` with `s^k >= m^(k-1)`.
pub fn required_size(m: usize, k: u32) -> usize {
    if k == 1 {
        return m;
    }
    let guess = target(m, k).floor() as usize;
    let mut s = guess.saturating_sub(2).max(1).min(m);
    while !cardinality_ok(s, m, k) {
        s += 1;
    }
    while s > 1 && cardinality_ok(s - 1, m, k) {
        s -= 1;
    }
    s
}

struct Builder<'a> {
    metric: &'a FiniteMetric,
    k: u32,
    rng: crate::rng::Rng,
    draft: Vec<DraftNode>,
}

impl Builder<'_> {
    /// Best split of `set`: (maximal gap, inner order prefix, outer suffix).
    fn split(&mut self, set: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let m = set.len();
        let goal = target(m, self.k) * (1.0 - 1e-12);
        let centers: Vec<usize> = if m <= CENTERS_PER_SPLIT {
            set.to_vec()
        } else {
            sample(&mut self.rng, m, CENTERS_PER_SPLIT)
                .into_iter()
                .map(|i| set[i])
                .collect()
        };
        let mut best: Option<(Weight, Vec<usize>, usize, usize)> = None;
        for &c in &centers {
            let row = self.metric.row(c);
            let mut order = set.to_vec();
            order.sort_by_key(|&x| (row[x], x));
            let d: Vec<Weight> = order.iter().map(|&x| row[x]).collect();
            // Cuts between equal distances are not allowed.
            let cuts: Vec<usize> = (1..m).filter(|&i| d[i - 1] < d[i]).collect();
            let ok = |i: usize, j: usize| target(i, self.k) + target(m - j, self.k) >= goal;
            let mut p = 0;
            for (q, &i) in cuts.iter().enumerate() {
                p = p.max(q);
                while p + 1 < cuts.len() && ok(i, cuts[p + 1]) {
                    p += 1;
                }
                let j = cuts[p];
                if !ok(i, j) {
                    continue;
                }
                let gap = d[j] - d[i - 1];
                if best.as_ref().is_none_or(|b| gap > b.0) {
                    best = Some((gap, order.clone(), i, j));
                }
            }
        }
        let (_, order, i, j) = best.expect("a zero-width split always exists");
        (order[..i].to_vec(), order[j..].to_vec())
    }

    /// Builds the subtree for `set`; returns (draft node, kept points).
    fn build(&mut self, set: Vec<usize>) -> (usize, Vec<usize>) {
        if set.len() == 1 {
            let id = self.draft.len();
            self.draft.push(DraftNode {
                label: 0,
                children: vec![],
                point: Some(set[0]),
            });
            return (id, set);
        }
        let (inner, outer) = self.split(&set);
        let (a, keep_a) = self.build(inner);
        let (b, keep_b) = self.build(outer);
        let mut label = self.draft[a].label.max(self.draft[b].label);
        for &x in &keep_a {
            for &y in &keep_b {
                label = label.max(self.metric.get(x, y));
            }
        }
        let id = self.draft.len();
        self.draft.push(DraftNode {
            label,
            children: vec![a, b],
            point: None,
        });
        let mut kept = keep_a;
        kept.extend(keep_b);
        (id, kept)
    }
}

/// Relabels a draft over local indices with the metric's point ids.
fn to_points(metric: &FiniteMetric, mut draft: Vec<DraftNode>) -> Vec<DraftNode> {
    for n in &mut draft {
        n.point = n.point.map(|i| metric.points()[i]);
    }
    draft
}

/// Single-linkage hierarchy on all points, each cluster labelled by its diameter.
fn fallback(metric: &FiniteMetric) -> Hst {
    let m = metric.len();
    let mut draft: Vec<DraftNode> = (0..m)
        .map(|i| DraftNode {
            label: 0,
            children: vec![],
            point: Some(metric.points()[i]),
        })
        .collect();
    let mut pairs: Vec<(Weight, usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .map(|(i, j)| (metric.get(i, j), i, j))
        .collect();
    pairs.sort_unstable();
    let mut uf = UnionFind::new(m);
    let mut top: Vec<usize> = (0..m).collect();
    let mut members: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    for (_, a, b) in pairs {
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            continue;
        }
        let (ma, mb) = (
            std::mem::take(&mut members[ra]),
            std::mem::take(&mut members[rb]),
        );
        let mut label = draft[top[ra]].label.max(draft[top[rb]].label);
        for &x in &ma {
            for &y in &mb {
                label = label.max(metric.get(x, y));
            }
        }
        let id = draft.len();
        draft.push(DraftNode {
            label,
            children: vec![top[ra], top[rb]],
            point: None,
        });
        uf.union(ra, rb);
        let r = uf.find(a);
        top[r] = id;
        members[r] = ma.into_iter().chain(mb).collect();
    }
    let root = draft.len() - 1;
    Hst::from_draft(&draft, root)
}

/// Exact `max ρ(x,y)/d(x,y)` over distinct subset pairs, with the
/// domination check `ρ >= d` folded in.
fn distortion(metric: &FiniteMetric, local: &[usize], hst: &Hst) -> Result<Ratio, RamseyError> {
    let mut alpha = Ratio::ONE;
    for (a, &i) in local.iter().enumerate() {
        for &j in &local[a + 1..] {
            let (x, y) = (metric.points()[i], metric.points()[j]);
            let d = metric.get(i, j);
            let rho = hst.distance(x, y).expect("subset point is a leaf");
            if d == 0 {
                return Err(RamseyError::ZeroDistance { x, y });
            }
            if rho < d {
                return Err(RamseyError::Verification(format!(
                    "ρ({x},{y}) = {rho} < d = {d}"
                )));
            }
            alpha = alpha.max(Ratio::new(rho as u128, d as u128));
        }
    }
    Ok(alpha)
}

/// Picks a large subset of the metric's points together with a dominating
/// ultrametric on it, and certifies the distortion exactly.
///
/// Each attempt splits the point set recursively around a sampled center:
/// an inner ball and an outer shell are kept and the annulus between them is
/// discarded, choosing the widest annulus that still leaves enough points
/// for the `m^(1-1/k)` target. Each node is labelled with the diameter of
/// the points it finally keeps.
pub fn metric_ramsey(
    metric: &FiniteMetric,
    k: u32,
    seed: u64,
) -> Result<RamseyOutcome, RamseyError> {
    let m = metric.len();
    if m == 0 {
        return Err(RamseyError::Empty);
    }
    if k == 0 {
        return Err(RamseyError::BadParameter("k must be at least 1".into()));
    }
    if let Some((x, y)) = metric.zero_pair() {
        return Err(RamseyError::ZeroDistance { x, y });
    }
    let points = metric.points().to_vec();
    if m == 1 {
        return Ok(RamseyOutcome {
            points: points.clone(),
            subset: points.clone(),
            hst: Hst::singleton(points[0]),
            alpha: Ratio::ONE,
            attempts: 1,
            fallback: false,
        });
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut b = Builder {
            metric,
            k,
            rng: rng_for(seed, &[0x7273, attempt as u64]),
            draft: Vec::new(),
        };
        let (root, mut kept) = b.build((0..m).collect());
        kept.sort_unstable();
        if kept.len() < required_size(m, k) {
            continue;
        }
        let hst = Hst::from_draft(&to_points(metric, b.draft), root);
        let alpha = distortion(metric, &kept, &hst)?;
        return Ok(RamseyOutcome {
            points,
            subset: kept.iter().map(|&i| metric.points()[i]).collect(),
            hst,
            alpha,
            attempts: attempt + 1,
            fallback: false,
        });
    }
    let hst = fallback(metric);
    let all: Vec<usize> = (0..m).collect();
    let alpha = distortion(metric, &all, &hst)?;
    Ok(RamseyOutcome {
        points: points.clone(),
        subset: points,
        hst,
        alpha,
        attempts: MAX_ATTEMPTS,
        fallback: true,
    })
}
