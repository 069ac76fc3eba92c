use serde::Serialize;

/// Square matrix of pairwise scores; row = first argument.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilarityMatrix {
    pub n: usize,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        SimilarityMatrix { n, values: (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.values[i][j] == self.values[j][i]))
    }

    /// `d = 1 − s`.
    pub fn distances(&self) -> SimilarityMatrix {
        SimilarityMatrix::from_fn(self.n, |i, j| 1.0 - self.get(i, j))
    }
}

/// `d̄(a,b) = (d(a,b) + d(b,a)) / 2`.
pub fn symmetrize(m: &SimilarityMatrix) -> SimilarityMatrix {
    SimilarityMatrix::from_fn(m.n, |i, j| (m.get(i, j) + m.get(j, i)) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averaging_example_one() {
        let m = SimilarityMatrix { n: 2, values: vec![vec![0.0, 0.0], vec![2.0 / 3.0, 0.0]] };
        let s = symmetrize(&m);
        assert!((s.get(0, 1) - 1.0 / 3.0).abs() < 1e-12);
        assert!(s.is_symmetric());
    }

    #[test]
    fn symmetric_input_unchanged() {
        let m = SimilarityMatrix::from_fn(3, |i, j| (i + j) as f64);
        assert_eq!(symmetrize(&m), m);
    }
}
