use crate::error::{Error, Result};
use crate::ot::{check_p, check_same_dim, DiscreteMeasure};

/// Dense matrices above this many entries are refused.
pub const MAX_DENSE_ENTRIES: usize = 1 << 31;

/// Row-major dense cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows.checked_mul(cols).is_none_or(|e| e > MAX_DENSE_ENTRIES) {
            return Err(Error::TooLarge { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from nested rows (convenient in tests).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len().max(1) as f64
    }
}

/// `|a - b|^p`, avoiding the square root for `p = 2`.
#[inline]
pub fn pow_dist(a: &[f64], b: &[f64], p: f64) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    if p == 2.0 {
        sq
    } else if p == 1.0 {
        sq.sqrt()
    } else {
        sq.powf(0.5 * p)
    }
}

/// `C_ij = |x_i - y_j|^p`.
pub fn cost_matrix(x: &DiscreteMeasure, y: &DiscreteMeasure, p: f64) -> Result<CostMatrix> {
    check_p(p)?;
    check_same_dim(x, y)?;
    let (rows, cols) = (x.len(), y.len());
    if rows.checked_mul(cols).is_none_or(|e| e > MAX_DENSE_ENTRIES) {
        return Err(Error::TooLarge { rows, cols });
    }
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let xi = x.point(i);
        data.extend((0..cols).map(|j| pow_dist(xi, y.point(j), p)));
    }
    Ok(CostMatrix { rows, cols, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_example() {
        let x = DiscreteMeasure::uniform(1, vec![0.0, 2.0]).unwrap();
        let y = DiscreteMeasure::uniform(1, vec![1.0, 3.0]).unwrap();
        let c = cost_matrix(&x, &y, 2.0).unwrap();
        assert_eq!(c.data(), &[1.0, 9.0, 1.0, 1.0]);
        let c1 = cost_matrix(&x, &y, 1.0).unwrap();
        for (a, b) in c1.data().iter().zip(c.data()) {
            assert_eq!(*a, b.sqrt());
        }
        let s = DiscreteMeasure::uniform(2, vec![0.3, 0.4]).unwrap();
        assert_eq!(cost_matrix(&s, &s, 3.0).unwrap().data(), &[0.0]);
    }

    #[test]
    fn rejects_mismatch_and_huge() {
        let x = DiscreteMeasure::uniform(1, vec![0.0]).unwrap();
        let y = DiscreteMeasure::uniform(2, vec![0.0, 1.0]).unwrap();
        assert!(matches!(cost_matrix(&x, &y, 2.0), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(CostMatrix::new(1 << 16, (1 << 15) + 1, vec![]), Err(Error::TooLarge { .. })));
    }
}
