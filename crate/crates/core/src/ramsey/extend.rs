use num_bigint::BigUint;

use super::{FiniteMetric, Hst, RamseyError, Ultrametric};
use crate::graph::Weight;
use crate::ratio::Ratio;
use crate::treekit::MAX_TREE_DISTANCE;

/// `⌈a·b / c⌉`.
fn ceil_mul_div(a: u128, b: u128, c: u128) -> Option<u128> {
    match a.checked_mul(b) {
        Some(x) => Some(x.div_ceil(c)),
        None => {
            let r: BigUint =
                (BigUint::from(a) * BigUint::from(b) + BigUint::from(c) - 1u32) / BigUint::from(c);
            u128::try_from(r).ok()
        }
    }
}

fn le_products(a: u128, b: u128, c: u128, d: u128) -> bool {
    match (a.checked_mul(b), c.checked_mul(d)) {
        (Some(x), Some(y)) => x <= y,
        _ => BigUint::from(a) * BigUint::from(b) <= BigUint::from(c) * BigUint::from(d),
    }
}

/// Extends the ultrametric of `hst` (on `Y ⊆ X`, with `d <= ρ <= α·d`
/// there) to all points of `metric`.
///
/// Every point `x` is attached to its nearest `s_x ∈ Y` at distance `δ_x`
/// (smallest id on ties) and gets the height `h_x = 2α·δ_x`. Then
///
/// `ρ̃(x, z) = ⌈(1 + 1/α) · max(ρ(s_x, s_z), h_x, h_z)⌉`,
///
/// which is an ultrametric, dominates `d`, and stays within `6α·d` on every
/// pair with one endpoint in `Y`. When `X = Y`, `ρ` is returned unchanged.
/// Both bounds are checked on all pairs before returning.
pub fn extend_ultrametric(
    metric: &FiniteMetric,
    hst: &Hst,
    alpha: Ratio,
) -> Result<Ultrametric, RamseyError> {
    let m = metric.len();
    if hst.is_empty() {
        return Err(RamseyError::Empty);
    }
    if alpha < Ratio::ONE {
        return Err(RamseyError::BadParameter(format!(
            "distortion {alpha} is below 1"
        )));
    }
    let index = metric.index();
    let mut in_y = vec![false; m];
    let mut ys = Vec::with_capacity(hst.len());
    for p in hst.points() {
        let i = *index.get(&p).ok_or(RamseyError::UnknownPoint(p))?;
        in_y[i] = true;
        ys.push(i);
    }
    let points = metric.points().to_vec();
    if ys.len() == m {
        return Ok(Ultrametric::from_fn(points.clone(), |i, j| {
            hst.distance(points[i], points[j])
                .expect("every point is a leaf")
        }));
    }
    let attach: Vec<(usize, Weight)> = (0..m)
        .map(|x| {
            ys.iter()
                .map(|&y| (metric.get(x, y), points[y], y))
                .min()
                .map(|(d, _, y)| (y, d))
                .expect("Y is non-empty")
        })
        .collect();
    let (p, q) = (alpha.num, alpha.den);
    // q · max(ρ(s_x, s_z), 2α·δ_x, 2α·δ_z) for every pair
    let height: Vec<u128> = attach
        .iter()
        .map(|&(_, d)| (2 * d as u128).checked_mul(p))
        .collect::<Option<_>>()
        .ok_or(RamseyError::Overflow)?;
    let pq = p.checked_mul(q).ok_or(RamseyError::Overflow)?;
    let mut rho = vec![0 as Weight; m * m];
    for x in 0..m {
        for z in x + 1..m {
            let (sx, sz) = (attach[x].0, attach[z].0);
            let base = if sx == sz {
                0
            } else {
                hst.distance(points[sx], points[sz]).expect("leaf")
            };
            let scaled = (base as u128)
                .checked_mul(q)
                .ok_or(RamseyError::Overflow)?
                .max(height[x])
                .max(height[z]);
            let value = ceil_mul_div(p + q, scaled, pq).ok_or(RamseyError::Overflow)?;
            if value > MAX_TREE_DISTANCE as u128 {
                return Err(RamseyError::Overflow);
            }
            rho[x * m + z] = value as Weight;
            rho[z * m + x] = value as Weight;
        }
    }
    let um = Ultrametric::new(points.clone(), rho);
    for x in 0..m {
        for z in 0..m {
            if x == z {
                continue;
            }
            let (d, r) = (metric.get(x, z), um.get(x, z));
            if r < d {
                return Err(RamseyError::Verification(format!(
                    "extension contracts ({}, {})",
                    points[x], points[z]
                )));
            }
            if in_y[z] && !le_products(r as u128, q, 6u128.saturating_mul(p), d as u128) {
                return Err(RamseyError::Verification(format!(
                    "extension exceeds 6α·d on ({}, {})",
                    points[x], points[z]
                )));
            }
        }
    }
    Ok(um)
}
