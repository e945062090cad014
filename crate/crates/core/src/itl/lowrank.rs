//! Descriptors from incomplete Cholesky factors.

use super::stats::QmiTerms;
use crate::icd::IcdFactor;
use crate::kernel::dot;

/// Block sums of a factor of the stacked set `[X; Y]` with `nx` leading rows.
pub struct Stacked<'a> {
    pub factor: &'a IcdFactor,
    pub nx: usize,
}

impl Stacked<'_> {
    fn ny(&self) -> usize {
        self.factor.n() - self.nx
    }

    fn sums(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.factor.column_sums(0..self.nx),
            self.factor.column_sums(self.nx..self.factor.n()),
        )
    }

    /// `(IPx, IPy, CIP)`.
    pub fn potentials(&self) -> (f64, f64, f64) {
        let (sx, sy) = self.sums();
        let (nx, ny) = (self.nx as f64, self.ny() as f64);
        (
            dot(&sx, &sx) / (nx * nx),
            dot(&sy, &sy) / (ny * ny),
            dot(&sx, &sy) / (nx * ny),
        )
    }

    /// `(1/N) Σᵢ gₓᵢᵀ g_yᵢ` for paired rows.
    pub fn correntropy(&self) -> f64 {
        let f = self.factor;
        let mut s = 0.0;
        for k in 0..f.rank() {
            let c = f.column(k);
            s += dot(&c[..self.nx], &c[self.nx..]);
        }
        s / self.nx as f64
    }
}

pub fn information_potential(f: &IcdFactor) -> f64 {
    let s = f.column_sums(0..f.n());
    let n = f.n() as f64;
    dot(&s, &s) / (n * n)
}

/// QMI terms from separate factors of X and Y (same row count).
pub fn qmi_terms(fx: &IcdFactor, fy: &IcdFactor) -> QmiTerms {
    let n = fx.n() as f64;
    // C = Gxᵀ Gy, rank_x × rank_y.
    let c: Vec<Vec<f64>> = (0..fx.rank())
        .map(|a| (0..fy.rank()).map(|b| dot(fx.column(a), fy.column(b))).collect())
        .collect();
    let sx = fx.column_sums(0..fx.n());
    let sy = fy.column_sums(0..fy.n());
    let vj = c.iter().flatten().map(|v| v * v).sum::<f64>() / (n * n);
    let vm = dot(&sx, &sx) * dot(&sy, &sy) / (n * n * n * n);
    let vc = c
        .iter()
        .zip(&sx)
        .map(|(row, a)| a * dot(row, &sy))
        .sum::<f64>()
        / (n * n * n);
    QmiTerms { vj, vm, vc }
}
