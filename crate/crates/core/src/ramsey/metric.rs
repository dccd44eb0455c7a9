use crate::graph::{DistanceMatrix, VertexId, Weight, UNREACHABLE};

/// A finite metric on a list of points, stored densely over local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetric {
    points: Vec<VertexId>,
    d: Vec<Weight>,
}

impl FiniteMetric {
    pub fn new(points: Vec<VertexId>, d: Vec<Weight>) -> Self {
        assert_eq!(
            d.len(),
            points.len() * points.len(),
            "metric must be square"
        );
        Self { points, d }
    }

    /// Restriction of `dm` to `points`; unreachable pairs become `cap`.
    pub fn restrict(dm: &DistanceMatrix, points: &[VertexId], cap: Weight) -> Self {
        Self::from_fn(points.to_vec(), |a, b| dm.get(a, b), cap)
    }

    /// Built from any symmetric distance function on the point ids.
    pub fn from_fn(
        points: Vec<VertexId>,
        dist: impl Fn(VertexId, VertexId) -> Weight,
        cap: Weight,
    ) -> Self {
        let m = points.len();
        let mut d = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let x = dist(points[i], points[j]);
                    d[i * m + j] = if x == UNREACHABLE { cap } else { x.min(cap) };
                }
            }
        }
        Self { points, d }
    }

    /// The sub-metric on the given local indices, in that order.
    pub fn subset(&self, local: &[usize]) -> Self {
        let m = local.len();
        let mut d = vec![0; m * m];
        for (a, &i) in local.iter().enumerate() {
            for (b, &j) in local.iter().enumerate() {
                d[a * m + b] = self.get(i, j);
            }
        }
        Self {
            points: local.iter().map(|&i| self.points[i]).collect(),
            d,
        }
    }

    /// Local index of every point id, for lookups by id.
    pub fn index(&self) -> std::collections::HashMap<VertexId, usize> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect()
    }

    /// First pair of distinct points at distance zero.
    pub fn zero_pair(&self) -> Option<(VertexId, VertexId)> {
        let m = self.len();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) == 0)
            .map(|(i, j)| (self.points[i], self.points[j]))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[VertexId] {
        &self.points
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.d[i * self.points.len() + j]
    }

    pub fn row(&self, i: usize) -> &[Weight] {
        let m = self.points.len();
        &self.d[i * m..(i + 1) * m]
    }

    /// First violated triple of the triangle inequality, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let m = self.len();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}
