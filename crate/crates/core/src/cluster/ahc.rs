use alloc::vec;
use alloc::vec::Vec;

use crate::{CostMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

/// Agglomerative clustering of all cities on `(ω + ωᵀ) / 2`, stopped at `k`
/// clusters. Among equally close pairs the one with the smallest members
/// merges first. Clusters come back sorted, ordered by first member.
pub fn ahc_cluster(cost: &CostMatrix, k: usize, linkage: Linkage) -> Result<Vec<Vec<usize>>> {
    let n = cost.n();
    if !(2..=n).contains(&k) {
        return Err(Error::InvalidArgument(alloc::format!("cluster count {k} outside 2..={n}")));
    }
    Ok(agglomerate(cost, &(0..n).collect::<Vec<_>>(), k, linkage))
}

/// Clusters the listed cities into `k >= 1` groups.
pub(crate) fn agglomerate(cost: &CostMatrix, cities: &[usize], k: usize, linkage: Linkage) -> Vec<Vec<usize>> {
    let m = cities.len();
    let mut d = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            d[a * m + b] = 0.5 * (cost.get(cities[a], cities[b]) + cost.get(cities[b], cities[a]));
        }
    }
    let mut groups: Vec<Option<Vec<usize>>> = cities.iter().map(|&c| Some(vec![c])).collect();
    let mut first: Vec<usize> = cities.to_vec();
    let mut active = m;
    while active > k.max(1) {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..m {
            if groups[a].is_none() {
                continue;
            }
            for b in a + 1..m {
                if groups[b].is_none() {
                    continue;
                }
                let (fa, fb) = (first[a], first[b]);
                let key = (fa.min(fb), fa.max(fb));
                let dist = d[a * m + b];
                let better = match &best {
                    None => true,
                    Some((bd, bk, _, _)) => dist < *bd || (dist == *bd && key < *bk),
                };
                if better {
                    best = Some((dist, key, a, b));
                }
            }
        }
        let Some((_, _, a, b)) = best else { break };
        let (sa, sb) = (
            groups[a].as_ref().map_or(0, |v| v.len()) as f64,
            groups[b].as_ref().map_or(0, |v| v.len()) as f64,
        );
        for c in 0..m {
            if c == a || c == b || groups[c].is_none() {
                continue;
            }
            let (dac, dbc) = (d[a * m + c], d[b * m + c]);
            let v = match linkage {
                Linkage::Single => dac.min(dbc),
                Linkage::Complete => dac.max(dbc),
                Linkage::Average => (sa * dac + sb * dbc) / (sa + sb),
            };
            d[a * m + c] = v;
            d[c * m + a] = v;
        }
        first[a] = first[a].min(first[b]);
        let moved = groups[b].take().unwrap_or_default();
        if let Some(g) = groups[a].as_mut() {
            g.extend(moved);
        }
        active -= 1;
    }
    let mut out: Vec<Vec<usize>> = groups.into_iter().flatten().collect();
    for g in out.iter_mut() {
        g.sort_unstable();
    }
    out.sort();
    out
}

/// The member minimizing `Σ_j (ω_ij + ω_ji)` over the other members; ties go
/// to the smallest city.
pub fn medoid(members: &[usize], cost: &CostMatrix) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for &i in members {
        let s: f64 = members.iter().map(|&j| cost.get(i, j) + cost.get(j, i)).sum();
        if best.map_or(true, |(bs, bi)| s < bs || (s == bs && i < bi)) {
            best = Some((s, i));
        }
    }
    best.map(|(_, i)| i).ok_or_else(|| Error::InvalidArgument("empty cluster".into()))
}

/// Medoid-to-medoid costs, in cluster order.
pub fn meta_matrix(clusters: &[Vec<usize>], cost: &CostMatrix) -> Result<CostMatrix> {
    if clusters.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 clusters".into()));
    }
    let meds = clusters.iter().map(|c| medoid(c, cost)).collect::<Result<Vec<_>>>()?;
    cost.submatrix(&meds)
}
