//! Distance from a vector to a finite-dimensional subspace.
//!
//! Sup-norm kinds reduce to the discrete Chebyshev problem
//! `min_β max_j |v_j − Σ βᵢ e_ij|` (plus the max-abs of the finite block
//! for product spaces). It is solved by an exchange method: a linear
//! program over a small working set of grid rows, then a full scan that
//! adds the worst violators. The dual objective of the working-set LP is a
//! lower bound on the true minimum and the full scan gives an upper bound,
//! so termination carries a certificate. Euclidean kinds are plain least
//! squares.

use nalgebra::{DMatrix, DVector};

use super::{AmbientSpace, Subspace, Vector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxOptions {
    /// Relative gap between the certified lower and upper bounds at exit.
    pub rel_tol: f64,
    /// Absolute slack added to the gap test, relative to the largest
    /// target magnitude (rounding floor of the residual scan).
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_iter: 100,
        }
    }
}

enum Norm {
    Sup,
    L2,
}

/// Basis data of one subspace, laid out for repeated distance queries.
pub(crate) struct DistanceSolver {
    n: usize,
    norm: Norm,
    /// Core rows, row-major `rows × n` (samples, then the limit if stored).
    core: Vec<f64>,
    rows: usize,
    /// Whether the last core row is the limit at infinity.
    limit_row: bool,
    /// Finite block, row-major `fin_dim × n`.
    fin: Vec<f64>,
    fin_dim: usize,
    product: bool,
    seeds: Vec<usize>,
    opts: MinimaxOptions,
}

impl DistanceSolver {
    pub(crate) fn new(sub: &Subspace, opts: MinimaxOptions) -> Result<Self> {
        let space = sub.space();
        let n = sub.dim();
        let norm = match space.core() {
            AmbientSpace::SeqL2 { .. } if space.is_product() => {
                return Err(Error::InvalidArgument(
                    "distances in products over a sequence core are not supported".into(),
                ))
            }
            AmbientSpace::SeqL2 { .. } => Norm::L2,
            _ => Norm::Sup,
        };
        let cols: Vec<Vec<f64>> = sub.basis().iter().map(Vector::sup_rows).collect();
        let rows = cols[0].len();
        let mut core = vec![0.0; rows * n];
        for (i, col) in cols.iter().enumerate() {
            for (j, x) in col.iter().enumerate() {
                core[j * n + i] = *x;
            }
        }
        let fin_dim = space.fin_dim();
        let mut fin = vec![0.0; fin_dim * n];
        for (i, e) in sub.basis().iter().enumerate() {
            for (k, x) in e.fin_part().iter().enumerate() {
                fin[k * n + i] = *x;
            }
        }
        let mut seeds: Vec<usize> = cols
            .iter()
            .map(|col| argmax_abs(col).0)
            .chain([0, rows - 1])
            .collect();
        let spread = 2 * n + 4;
        seeds.extend((0..spread).map(|i| i * (rows - 1) / (spread - 1).max(1)));
        seeds.sort_unstable();
        seeds.dedup();
        Ok(Self {
            n,
            norm,
            core,
            rows,
            limit_row: space.has_limit(),
            fin,
            fin_dim,
            product: space.is_product(),
            seeds,
            opts,
        })
    }

    pub(crate) fn distance(&self, v: &Vector, warm: &mut Vec<usize>) -> Result<(f64, Vec<f64>)> {
        let target = v.sup_rows();
        if target.len() != self.rows || v.fin_part().len() != self.fin_dim {
            return Err(Error::SpaceMismatch);
        }
        match self.norm {
            Norm::L2 => Ok(self.least_squares(&target)),
            Norm::Sup => self.chebyshev(&target, v.fin_part(), warm),
        }
    }

    fn least_squares(&self, target: &[f64]) -> (f64, Vec<f64>) {
        let a = DMatrix::from_row_slice(self.rows, self.n, &self.core);
        let b = DVector::from_column_slice(target);
        let beta = a
            .clone()
            .svd(true, true)
            .solve(&b, 1e-14)
            .map(|x| x.iter().copied().collect::<Vec<_>>())
            .unwrap_or_else(|_| vec![0.0; self.n]);
        let r = b - a * DVector::from_column_slice(&beta);
        (r.norm(), beta)
    }

    fn residuals(&self, target: &[f64], beta: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (j, (o, t)) in out.iter_mut().zip(target).enumerate() {
            let row = &self.core[j * n..(j + 1) * n];
            *o = t - row.iter().zip(beta).map(|(e, b)| e * b).sum::<f64>();
        }
    }

    fn fin_residual(&self, target_fin: &[f64], beta: &[f64]) -> f64 {
        let n = self.n;
        target_fin
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let row = &self.fin[k * n..(k + 1) * n];
                (t - row.iter().zip(beta).map(|(e, b)| e * b).sum::<f64>()).abs()
            })
            .fold(0.0, f64::max)
    }

    fn chebyshev(
        &self,
        target: &[f64],
        target_fin: &[f64],
        warm: &mut Vec<usize>,
    ) -> Result<(f64, Vec<f64>)> {
        let n = self.n;
        // z = (β, s) or (β, s, r) for products
        let d = n + 1 + usize::from(self.product);
        let mut active: Vec<usize> = self.seeds.clone();
        active.extend(warm.iter().copied().filter(|&j| j < self.rows));
        active.push(argmax_abs(target).0);
        active.sort_unstable();
        active.dedup();

        let mut c = vec![0.0; d];
        c[n] = 1.0;
        if self.product {
            c[n + 1] = 1.0;
        }

        let mut resid = vec![0.0; self.rows];
        let mut best_beta = vec![0.0; n];
        let mut best = abs_max(target)
            + if self.product {
                abs_max(target_fin)
            } else {
                0.0
            };
        let slack = self.opts.abs_tol * abs_max(target).max(abs_max(target_fin)).max(1e-300);
        let mut a = Vec::new();
        let mut b = Vec::new();

        for _ in 0..self.opts.max_iter {
            a.clear();
            b.clear();
            for &j in &active {
                let row = &self.core[j * n..(j + 1) * n];
                for sign in [1.0, -1.0] {
                    // s + sign·(e_j·β) ≥ sign·v_j
                    a.extend(row.iter().map(|e| sign * e));
                    a.push(1.0);
                    if self.product {
                        a.push(0.0);
                    }
                    b.push(sign * target[j]);
                }
            }
            if self.product {
                for (k, t) in target_fin.iter().enumerate() {
                    let row = &self.fin[k * n..(k + 1) * n];
                    for sign in [1.0, -1.0] {
                        a.extend(row.iter().map(|e| sign * e));
                        a.push(0.0);
                        a.push(1.0);
                        b.push(sign * t);
                    }
                }
                a.extend(std::iter::repeat_n(0.0, n + 1));
                a.push(1.0);
                b.push(0.0);
            }

            let Some((z, lower)) = simplex::solve(&a, &b, &c, d) else {
                return Err(Error::SolverFailure {
                    iterations: self.opts.max_iter,
                    best,
                });
            };
            let beta = &z[..n];
            self.residuals(target, beta, &mut resid);
            let core_max = abs_max(&resid);
            let value = core_max
                + if self.product {
                    self.fin_residual(target_fin, beta)
                } else {
                    0.0
                };
            if value < best {
                best = value;
                best_beta.copy_from_slice(beta);
            }

            if best - lower <= self.opts.rel_tol * best + slack {
                self.store_warm(&active, &resid, core_max, warm);
                return Ok((best, best_beta));
            }

            let level = z[n];
            let added = self.add_violators(&resid, level, &mut active, 2 * d);
            if added == 0 {
                // Only rounding separates the bounds.
                if best - lower <= 1e-7 * best + slack {
                    self.store_warm(&active, &resid, core_max, warm);
                    return Ok((best, best_beta));
                }
                break;
            }
        }
        Err(Error::SolverFailure {
            iterations: self.opts.max_iter,
            best,
        })
    }

    fn store_warm(&self, active: &[usize], resid: &[f64], core_max: f64, warm: &mut Vec<usize>) {
        warm.clear();
        warm.extend(
            active
                .iter()
                .copied()
                .filter(|&j| resid[j].abs() >= 0.5 * core_max),
        );
        warm.truncate(4 * (self.n + 2));
    }

    /// Adds up to `budget` rows whose residual exceeds `level`: local maxima of
    /// `|r|` along the grid order, largest first.
    fn add_violators(
        &self,
        resid: &[f64],
        level: f64,
        active: &mut Vec<usize>,
        budget: usize,
    ) -> usize {
        let threshold = level * (1.0 + 1e-12) + 1e-300;
        let sampled = if self.limit_row {
            self.rows - 1
        } else {
            self.rows
        };
        let mut cand: Vec<(f64, usize)> = Vec::new();
        for j in 0..sampled {
            let r = resid[j].abs();
            if r <= threshold {
                continue;
            }
            let left = if j > 0 {
                resid[j - 1].abs()
            } else {
                f64::NEG_INFINITY
            };
            let right = if j + 1 < sampled {
                resid[j + 1].abs()
            } else {
                f64::NEG_INFINITY
            };
            if r >= left && r >= right {
                cand.push((r, j));
            }
        }
        if self.limit_row && resid[self.rows - 1].abs() > threshold {
            cand.push((resid[self.rows - 1].abs(), self.rows - 1));
        }
        cand.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut added = 0;
        for (_, j) in cand {
            if added == budget {
                break;
            }
            if let Err(pos) = active.binary_search(&j) {
                active.insert(pos, j);
                added += 1;
            }
        }
        added
    }
}

fn argmax_abs(xs: &[f64]) -> (usize, f64) {
    xs.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, x)| {
            if x.abs() > bv {
                (i, x.abs())
            } else {
                (bi, bv)
            }
        })
}

fn abs_max(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dense two-phase simplex on the dual of a small inequality-form LP.
mod simplex {
    use nalgebra::{DMatrix, DVector};

    const PIVOT_EPS: f64 = 1e-11;
    const COST_EPS: f64 = 1e-13;
    const MAX_PIVOTS: usize = 20_000;

    /// Solves `min cᵀz s.t. Az ≥ b` (z free, `A` row-major with `d` columns)
    /// through its dual `max bᵀy s.t. Aᵀy = c, y ≥ 0`.
    ///
    /// Returns the primal solution (the simplex multipliers of the dual) and
    /// the dual objective, which lower-bounds the primal minimum.
    pub(super) fn solve(a: &[f64], b: &[f64], c: &[f64], d: usize) -> Option<(Vec<f64>, f64)> {
        let k = b.len();
        let width = k + d + 1;
        let rhs = width - 1;
        let mut t = vec![0.0; d * width];
        let mut flip = vec![1.0; d];
        for i in 0..d {
            if c[i] < 0.0 {
                flip[i] = -1.0;
            }
            let row = &mut t[i * width..(i + 1) * width];
            for j in 0..k {
                row[j] = flip[i] * a[j * d + i];
            }
            row[k + i] = 1.0;
            row[rhs] = flip[i] * c[i];
        }
        let mut basis: Vec<usize> = (k..k + d).collect();

        let phase1 = |j: usize| if j >= k { 1.0 } else { 0.0 };
        if !run(&mut t, &mut basis, k, d, width, &phase1, false) {
            return None;
        }
        let infeasibility: f64 = (0..d)
            .filter(|&i| basis[i] >= k)
            .map(|i| t[i * width + rhs])
            .sum();
        let scale = c.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if infeasibility > 1e-9 * scale {
            return None;
        }

        let phase2 = |j: usize| if j < k { -b[j] } else { 0.0 };
        if !run(&mut t, &mut basis, k, d, width, &phase2, true) {
            return None;
        }

        if let Some(refined) = refine(a, b, c, d, &basis) {
            return Some(refined);
        }
        let mut z = vec![0.0; d];
        for (i, zi) in z.iter_mut().enumerate() {
            let col = k + i;
            let dot: f64 = (0..d).map(|l| phase2(basis[l]) * t[l * width + col]).sum();
            *zi = flip[i] * (0.0 - dot);
        }
        let lower: f64 = (0..d)
            .filter(|&l| basis[l] < k)
            .map(|l| b[basis[l]] * t[l * width + rhs])
            .sum();
        Some((z, lower))
    }

    /// Re-solves the optimal basis directly: `A_B z = b_B` for the vertex and
    /// `A_Bᵀ y = c` for the multipliers. Tableau entries accumulate rounding
    /// over many pivots on nearly parallel rows; the `d × d` systems do not.
    /// Declines when an artificial is basic or a multiplier is negative.
    fn refine(
        a: &[f64],
        b: &[f64],
        c: &[f64],
        d: usize,
        basis: &[usize],
    ) -> Option<(Vec<f64>, f64)> {
        let k = b.len();
        if basis.iter().any(|&j| j >= k) {
            return None;
        }
        let ab = DMatrix::from_fn(d, d, |l, i| a[basis[l] * d + i]);
        let bb = DVector::from_fn(d, |l, _| b[basis[l]]);
        let lu = ab.clone().lu();
        let z = lu.solve(&bb)?;
        let y = ab.transpose().lu().solve(&DVector::from_column_slice(c))?;
        let scale = y.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if y.iter().any(|&x| x < -1e-12 * scale) || z.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let lower = y.iter().zip(bb.iter()).map(|(y, b)| y.max(0.0) * b).sum();
        Some((z.iter().copied().collect(), lower))
    }

    /// Bland-rule primal simplex. Artificial columns never enter; in phase 2
    /// a basic artificial (at zero) leaves as soon as the entering column
    /// touches its row, so it can never turn positive.
    fn run(
        t: &mut [f64],
        basis: &mut [usize],
        k: usize,
        d: usize,
        width: usize,
        cost: &dyn Fn(usize) -> f64,
        pin_artificials: bool,
    ) -> bool {
        let rhs = width - 1;
        for _ in 0..MAX_PIVOTS {
            let mut entering = None;
            for j in 0..k {
                let r = cost(j)
                    - (0..d)
                        .map(|i| cost(basis[i]) * t[i * width + j])
                        .sum::<f64>();
                if r < -COST_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return true;
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..d {
                let aij = t[i * width + j];
                if pin_artificials && basis[i] >= k && aij.abs() > PIVOT_EPS {
                    leave = Some((i, 0.0));
                    break;
                }
                if aij > PIVOT_EPS {
                    let ratio = t[i * width + rhs] / aij;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[i] < basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            pivot(t, width, d, row, j);
            basis[row] = j;
        }
        false
    }

    fn pivot(t: &mut [f64], width: usize, d: usize, row: usize, col: usize) {
        let p = t[row * width + col];
        for x in &mut t[row * width..(row + 1) * width] {
            *x /= p;
        }
        for i in 0..d {
            if i == row {
                continue;
            }
            let f = t[i * width + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = t[row * width + j];
                t[i * width + j] -= f * v;
            }
        }
    }

}
