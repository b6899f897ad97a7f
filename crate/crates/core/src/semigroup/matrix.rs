use std::sync::Arc;

use nalgebra::DMatrix;

use super::{GrowthClass, SemigroupScenario, TimeDomain};
use crate::error::{Error, Result};
use crate::space::{AmbientSpace, Vector};

const TAYLOR_TERMS: usize = 12;
/// Scaled norm bound; the Taylor tail is then below `0.25¹³/13! ≈ 2e-18`.
const SCALED_NORM: f64 = 0.25;

/// `Q_t(y, z) = (y + tz, z)`.
pub fn jordan_block_q(y: f64, z: f64, t: f64) -> (f64, f64) {
    (y + t * z, z)
}

/// The flow `t ↦ exp(tA)` of a small real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFlow {
    generator: DMatrix<f64>,
}

impl MatrixFlow {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > 3 {
            return Err(Error::InvalidArgument(format!(
                "matrix size {n} outside 1..=3"
            )));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("generator must be square".into()));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "generator entries must be finite".into(),
            ));
        }
        Ok(Self {
            generator: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        })
    }

    /// The nilpotent Jordan block `[[0, 1], [0, 0]]`.
    pub fn jordan() -> Self {
        Self::new(&[vec![0.0, 1.0], vec![0.0, 0.0]]).expect("valid 2x2")
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(&vec![vec![0.0; n]; n])
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// `exp(tA)` by scaling and squaring with a 12-term Taylor polynomial.
    pub fn exp(&self, t: f64) -> DMatrix<f64> {
        let n = self.dim();
        let a = &self.generator * t;
        let norm1 = (0..n).map(|j| a.column(j).abs().sum()).fold(0.0, f64::max);
        let squarings = if norm1 > SCALED_NORM {
            (norm1 / SCALED_NORM).log2().ceil() as i32
        } else {
            0
        };
        let b = a / 2f64.powi(squarings);
        let mut term = DMatrix::<f64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..=TAYLOR_TERMS {
            term = &term * &b / k as f64;
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    /// `exp(tA)` as nested rows.
    pub fn exp_rows(&self, t: f64) -> Vec<Vec<f64>> {
        let e = self.exp(t);
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| e[(i, j)]).collect())
            .collect()
    }

    pub fn apply(&self, coords: &[f64], t: f64) -> Vec<f64> {
        let e = self.exp(t);
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| e[(i, j)] * coords[j]).sum())
            .collect()
    }

    fn growth_class(&self) -> GrowthClass {
        let a = &self.generator;
        if a.iter().all(|x| *x == 0.0) {
            GrowthClass::Bounded
        } else if (a * a).iter().all(|x| *x == 0.0) {
            GrowthClass::Linear
        } else {
            GrowthClass::UnboundedExponential
        }
    }
}

/// Continuous semigroup `exp(tA)` on `ℝⁿ` (Euclidean norm), `n ≤ 3`.
///
/// The declared growth class is `bounded` for `A = 0`, `linear` when
/// `A² = 0`, and `unbounded-exponential` otherwise.
pub fn matrix_semigroup(rows: &[Vec<f64>]) -> Result<SemigroupScenario> {
    let flow = MatrixFlow::new(rows)?;
    let space = AmbientSpace::seq_l2(flow.dim())?;
    let growth = flow.growth_class();
    let sp = space.clone();
    let evolve = Arc::new(move |v: &Vector, t: f64| {
        Vector::from_samples(sp.clone(), flow.apply(v.samples(), t))
    });
    Ok(SemigroupScenario::new(
        "matrix-exponential",
        TimeDomain::Continuous,
        space,
        growth,
        evolve,
    )
    .with_x0("finite-dimensional; X₀ is the stable subspace", None)
    .with_law_tol(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_generator_is_identity() {
        let f = MatrixFlow::identity(3).unwrap();
        assert_eq!(f.exp(17.0), DMatrix::identity(3, 3));
    }

    #[test]
    fn jordan_flow_matches_closed_form() {
        let f = MatrixFlow::jordan();
        assert_eq!(f.apply(&[0.0, 1.0], 5.0), vec![5.0, 1.0]);
        assert_eq!(jordan_block_q(0.0, 1.0, 5.0), (5.0, 1.0));
        assert_eq!(jordan_block_q(1.0, 0.0, 123.0), (1.0, 0.0));
        let (y, z) = jordan_block_q(0.5, -0.25, 2.0);
        assert_eq!(jordan_block_q(y, z, 3.0), jordan_block_q(0.5, -0.25, 5.0));
        for t in [0.1, 1.0, 7.5, 40.0] {
            let rows = f.exp_rows(t);
            assert!((rows[0][1] - t).abs() <= 1e-12 * t.max(1.0));
            assert!((rows[0][0] - 1.0).abs() <= 1e-12);
            assert!(rows[1][0].abs() <= 1e-12);
        }
    }

    #[test]
    fn scalar_decay_matches_series() {
        let f = MatrixFlow::new(&[vec![-1.0]]).unwrap();
        for t in [0.0, 0.5, 1.0, 3.0, 10.0] {
            // independent oracle: plain Taylor series of e^{-t} summed to 80 terms
            let mut term = 1.0_f64;
            let mut oracle = 1.0_f64;
            for k in 1..80 {
                term *= -t / k as f64;
                oracle += term;
            }
            assert!((f.apply(&[1.0], t)[0] - oracle).abs() <= 1e-13, "t = {t}");
        }
    }

    #[test]
    fn law_holds_for_a_rotation_generator() {
        let sem = matrix_semigroup(&[
            vec![0.0, -1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, -0.5],
        ])
        .unwrap();
        let v = Vector::from_samples(sem.space().clone(), vec![1.0, -2.0, 0.5]).unwrap();
        for (t, q) in [(0.1, 0.7), (1.0, 2.5), (2.5, 2.5)] {
            assert!(sem.law_residual(&v, t, q).unwrap() < 1e-12);
        }
        assert_eq!(sem.growth_class(), GrowthClass::UnboundedExponential);
    }

    #[test]
    fn rejects_large_or_ragged_generators() {
        assert!(MatrixFlow::new(&vec![vec![0.0; 4]; 4]).is_err());
        assert!(MatrixFlow::new(&[vec![0.0, 1.0], vec![0.0]]).is_err());
        assert!(MatrixFlow::new(&[]).is_err());
    }

    #[test]
    fn growth_classes() {
        assert_eq!(
            matrix_semigroup(&[vec![0.0]]).unwrap().growth_class(),
            GrowthClass::Bounded
        );
        let j = matrix_semigroup(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(j.growth_class(), GrowthClass::Linear);
    }
}
