use super::mfcc::{FeatureError, FeatureMatrix, NUM_COEFFS};

#[derive(Debug, Clone, PartialEq)]
pub struct DtwAlignment {
    /// Warping path from `(0, 0)` to `(len_a - 1, len_b - 1)`.
    pub path: Vec<(usize, usize)>,
    pub total_cost: f64,
}

impl DtwAlignment {
    /// Mean frame distance along the path.
    pub fn mean_cost(&self) -> f64 {
        self.total_cost / self.path.len() as f64
    }

    pub fn similarity(&self) -> f64 {
        1.0 / (1.0 + self.mean_cost())
    }
}

fn distance(a: &[f64; NUM_COEFFS], b: &[f64; NUM_COEFFS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Clone, Copy)]
struct Cell {
    cost: f64,
    len: usize,
}

impl Cell {
    fn better_than(self, other: Cell) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.len < other.len)
    }
}

/// Dynamic time warping with the symmetric diagonal/horizontal/vertical
/// step pattern, all steps weighted 1.
///
/// Equal-cost predecessors are resolved by the shorter path, which makes
/// the result independent of argument order.
pub fn dtw(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<DtwAlignment, FeatureError> {
    if a.is_empty() || b.is_empty() {
        return Err(FeatureError::EmptyFeatures);
    }
    let (n, m) = (a.len(), b.len());
    let mut acc = vec![Cell { cost: 0.0, len: 0 }; n * m];
    for i in 0..n {
        for j in 0..m {
            let d = distance(&a.frames[i], &b.frames[j]);
            let best = [
                (i > 0 && j > 0).then(|| acc[(i - 1) * m + j - 1]),
                (i > 0).then(|| acc[(i - 1) * m + j]),
                (j > 0).then(|| acc[i * m + j - 1]),
            ]
            .into_iter()
            .flatten()
            .reduce(|x, y| if y.better_than(x) { y } else { x })
            .unwrap_or(Cell { cost: 0.0, len: 0 });
            acc[i * m + j] = Cell {
                cost: best.cost + d,
                len: best.len + 1,
            };
        }
    }

    let mut path = Vec::with_capacity(acc[n * m - 1].len);
    let (mut i, mut j) = (n - 1, m - 1);
    path.push((i, j));
    while i > 0 || j > 0 {
        let candidates = [
            (i > 0 && j > 0).then(|| (i - 1, j - 1)),
            (i > 0).then(|| (i - 1, j)),
            (j > 0).then(|| (i, j - 1)),
        ];
        let (pi, pj) = candidates
            .into_iter()
            .flatten()
            .reduce(|x, y| {
                if acc[y.0 * m + y.1].better_than(acc[x.0 * m + x.1]) {
                    y
                } else {
                    x
                }
            })
            .expect("at least one predecessor");
        i = pi;
        j = pj;
        path.push((i, j));
    }
    path.reverse();
    Ok(DtwAlignment {
        path,
        total_cost: acc[n * m - 1].cost,
    })
}

/// `1 / (1 + mean path distance)`, in (0, 1].
pub fn dtw_similarity(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<f64, FeatureError> {
    dtw(a, b).map(|al| al.similarity())
}
