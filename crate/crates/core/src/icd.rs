//! Greedy pivoted incomplete Cholesky factorization of Gaussian Gram
//! matrices, `K ≈ G Gᵀ`, computed column by column from kernel evaluations
//! without ever forming `K`.

use crate::error::{Error, Result};
use crate::kernel::{gaussian_sq, sq_dist};
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

/// When to stop adding columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Sum of the residual diagonal below ε.
    #[default]
    Trace,
    /// Largest residual diagonal entry below ε.
    MaxDiagonal,
}

impl std::str::FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace" => Ok(StopRule::Trace),
            "max-diagonal" | "max" => Ok(StopRule::MaxDiagonal),
            other => Err(Error::invalid(format!("unknown ICD stop rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcdOptions {
    pub epsilon: f64,
    /// `None` means no limit beyond N.
    pub max_rank: Option<usize>,
    pub rule: StopRule,
}

impl Default for IcdOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_rank: None,
            rule: StopRule::Trace,
        }
    }
}

impl IcdOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }
}

/// Low-rank factor `G` (N × rank), stored column-major in pivot order.
#[derive(Debug, Clone, PartialEq)]
pub struct IcdFactor {
    n: usize,
    columns: Vec<Vec<f64>>,
    pivots: Vec<usize>,
    residual_trace: f64,
    residual_max: f64,
    epsilon: f64,
    truncated: bool,
}

impl IcdFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `trace(K) - ‖G‖_F²` at termination.
    pub fn residual_trace(&self) -> f64 {
        self.residual_trace
    }

    /// Largest remaining diagonal entry of `K - GGᵀ`.
    pub fn residual_max(&self) -> f64 {
        self.residual_max
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// True if `max_rank` stopped the factorization before the tolerance was met.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    /// Row `i` of `G`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// `Gᵀ 1` restricted to rows `range`.
    pub fn column_sums(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        self.columns.iter().map(|c| c[range.clone()].iter().sum()).collect()
    }

    /// Dense `N × rank` copy of `G`.
    pub fn to_matrix(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n, self.rank()), |(i, k)| self.columns[k][i])
    }

    /// `(G Gᵀ)_{ij}`.
    pub fn approx_entry(&self, i: usize, j: usize) -> f64 {
        self.columns.iter().map(|c| c[i] * c[j]).sum()
    }
}

/// Factors the Gaussian Gram matrix of the rows of `x` at width `sigma`.
///
/// Pivots are the largest remaining diagonal entry, ties going to the lowest
/// row index.
pub fn icd_factor(x: ArrayView2<f64>, sigma: f64, opts: &IcdOptions) -> Result<IcdFactor> {
    let n = x.nrows();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("kernel width must be positive, got {sigma}")));
    }
    if !(opts.epsilon > 0.0) {
        return Err(Error::invalid("ICD tolerance must be positive"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let d = x.ncols();
    let rows: Vec<f64> = x.iter().copied().collect();
    let row = |i: usize| &rows[i * d..(i + 1) * d];
    let max_rank = opts.max_rank.unwrap_or(n).min(n);

    let mut diag = vec![1.0; n];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut pivots = Vec::new();
    let stop_value = |diag: &[f64]| match opts.rule {
        StopRule::Trace => diag.iter().sum::<f64>(),
        StopRule::MaxDiagonal => diag.iter().copied().fold(0.0, f64::max),
    };

    let mut truncated = false;
    loop {
        if stop_value(&diag) < opts.epsilon {
            break;
        }
        if columns.len() >= max_rank {
            truncated = true;
            break;
        }
        let mut j = 0;
        for (i, &v) in diag.iter().enumerate() {
            if v > diag[j] {
                j = i;
            }
        }
        let pivot_val = diag[j];
        if pivot_val <= 0.0 {
            break;
        }
        let scale = pivot_val.sqrt();
        let xj = row(j);
        let mut g: Vec<f64> = (0..n)
            .map(|i| gaussian_sq(sq_dist(row(i), xj), sigma))
            .collect();
        for c in &columns {
            let cj = c[j];
            for (gi, ci) in g.iter_mut().zip(c) {
                *gi -= ci * cj;
            }
        }
        for gi in g.iter_mut() {
            *gi /= scale;
        }
        for &p in &pivots {
            g[p] = 0.0;
        }
        for (di, gi) in diag.iter_mut().zip(&g) {
            *di = (*di - gi * gi).max(0.0);
        }
        diag[j] = 0.0;
        for &p in &pivots {
            diag[p] = 0.0;
        }
        columns.push(g);
        pivots.push(j);
    }

    Ok(IcdFactor {
        n,
        residual_trace: diag.iter().sum(),
        residual_max: diag.iter().copied().fold(0.0, f64::max),
        columns,
        pivots,
        epsilon: opts.epsilon,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Array1, Array2, Axis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn explicit_gram(x: &Array2<f64>, sigma: f64) -> Array2<f64> {
        let n = x.nrows();
        Array2::from_shape_fn((n, n), |(i, j)| {
            let d: f64 = (&x.row(i) - &x.row(j)).mapv(|v| v * v).sum();
            (-d / (2.0 * sigma * sigma)).exp()
        })
    }

    fn random_points(seed: u64, n: usize, d: usize) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn identical_points_give_rank_one() {
        let x = Array2::from_elem((12, 2), 0.3);
        let f = icd_factor(x.view(), 0.5, &IcdOptions::default()).unwrap();
        assert_eq!(f.rank(), 1);
        assert!(f.column(0).iter().all(|v| (*v - 1.0).abs() < 1e-15));
        assert_eq!(f.residual_trace(), 0.0);
        assert!(!f.truncated());
    }

    #[test]
    fn reconstruction_against_explicit_gram() {
        let x = random_points(3, 30, 1);
        let eps = 1e-6;
        let f = icd_factor(x.view(), 0.7, &IcdOptions::with_epsilon(eps)).unwrap();
        let k = explicit_gram(&x, 0.7);
        let g = f.to_matrix();
        let r = &k - &g.dot(&g.t());
        let fro = r.mapv(|v| v * v).sum().sqrt();
        assert!(fro <= (30.0 * eps).sqrt(), "fro {fro}");
        assert!(r.iter().all(|v| v.abs() <= eps), "max {}", r.iter().fold(0.0f64, |a, b| a.max(b.abs())));
        let tr = k.diag().sum() - g.mapv(|v| v * v).sum();
        assert!((tr - f.residual_trace()).abs() < 1e-10);
        assert!(f.residual_trace() < eps && f.residual_trace() >= -1e-10);
    }

    #[test]
    fn pivot_diagonal_positive_and_non_increasing() {
        let x = random_points(5, 80, 2);
        let f = icd_factor(x.view(), 0.4, &IcdOptions::with_epsilon(1e-8)).unwrap();
        let diag: Vec<f64> = (0..f.rank()).map(|k| f.column(k)[f.pivots()[k]]).collect();
        assert!(diag.iter().all(|v| *v > 0.0));
        for w in diag.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{diag:?}");
        }
        // Lower trapezoidal in pivot order.
        for k in 0..f.rank() {
            for &p in &f.pivots()[..k] {
                assert_eq!(f.column(k)[p], 0.0);
            }
        }
    }

    #[test]
    fn residual_trace_strictly_decreases() {
        let x = random_points(6, 60, 1);
        let mut last = f64::INFINITY;
        for r in 1..=12 {
            let opts = IcdOptions {
                epsilon: 1e-300,
                max_rank: Some(r),
                rule: StopRule::Trace,
            };
            let f = icd_factor(x.view(), 0.3, &opts).unwrap();
            assert!(f.truncated());
            assert!(f.residual_trace() < last);
            last = f.residual_trace();
        }
    }

    #[test]
    fn permutation_leaves_reconstruction_quality() {
        let x = random_points(7, 50, 1);
        let mut idx: Vec<usize> = (0..50).collect();
        idx.reverse();
        idx.swap(3, 17);
        let xp = x.select(Axis(0), &idx);
        let opts = IcdOptions::with_epsilon(1e-12);
        let err = |x: &Array2<f64>| {
            let f = icd_factor(x.view(), 0.5, &opts).unwrap();
            let g = f.to_matrix();
            (explicit_gram(x, 0.5) - g.dot(&g.t())).mapv(|v| v * v).sum().sqrt()
        };
        let (a, b) = (err(&x), err(&xp));
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn truncation_is_flagged_not_an_error() {
        let x = random_points(8, 40, 3);
        let opts = IcdOptions {
            epsilon: 1e-12,
            max_rank: Some(3),
            rule: StopRule::Trace,
        };
        let f = icd_factor(x.view(), 0.2, &opts).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(f.truncated());
    }

    #[test]
    fn max_diagonal_rule_stops_no_later_than_trace() {
        let x = random_points(9, 100, 1);
        let t = icd_factor(x.view(), 0.5, &IcdOptions::with_epsilon(1e-6)).unwrap();
        let m = icd_factor(
            x.view(),
            0.5,
            &IcdOptions {
                rule: StopRule::MaxDiagonal,
                ..IcdOptions::with_epsilon(1e-6)
            },
        )
        .unwrap();
        assert!(m.rank() <= t.rank());
        assert!(m.residual_max() < 1e-6);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let x = Array2::from_shape_vec((4, 1), vec![0.0, 5.0, 10.0, 15.0]).unwrap();
        let f = icd_factor(x.view(), 0.1, &IcdOptions::with_epsilon(1e-6)).unwrap();
        assert_eq!(f.pivots(), &[0, 1, 2, 3]);
    }

    #[test]
    fn column_sums_match_dense() {
        let x = random_points(10, 25, 1);
        let f = icd_factor(x.view(), 0.5, &IcdOptions::default()).unwrap();
        let dense: Array1<f64> = f.to_matrix().sum_axis(Axis(0));
        for (a, b) in f.column_sums(0..25).iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let empty = Array2::<f64>::zeros((0, 1));
        assert!(matches!(
            icd_factor(empty.view(), 1.0, &IcdOptions::default()),
            Err(Error::EmptyInput)
        ));
        let x = Array2::from_elem((2, 1), f64::NAN);
        assert!(icd_factor(x.view(), 1.0, &IcdOptions::default()).is_err());
        assert!(icd_factor(Array2::zeros((2, 1)).view(), 0.0, &IcdOptions::default()).is_err());
        assert_eq!("max-diagonal".parse::<StopRule>().unwrap(), StopRule::MaxDiagonal);
        assert!("frobenius".parse::<StopRule>().is_err());
    }
}
