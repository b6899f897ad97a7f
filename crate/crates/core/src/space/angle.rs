use std::f64::consts::PI;

use super::minimax::{DistanceSolver, MinimaxOptions};
use super::{Subspace, Vector};
use crate::error::{Error, Result};

/// Angular samples used for the sup over a two-dimensional unit sphere.
pub const DEFAULT_SPHERE_SAMPLES: usize = 720;

/// `ρ(v, S)` together with the minimizing coefficients.
pub fn distance_to_subspace(v: &Vector, s: &Subspace) -> Result<(f64, Vec<f64>)> {
    distance_to_subspace_with(v, s, MinimaxOptions::default())
}

pub fn distance_to_subspace_with(
    v: &Vector,
    s: &Subspace,
    opts: MinimaxOptions,
) -> Result<(f64, Vec<f64>)> {
    if v.space() != s.space() {
        return Err(Error::SpaceMismatch);
    }
    DistanceSolver::new(s, opts)?.distance(v, &mut Vec::new())
}

/// Unit vectors of `S`: the normalized basis vector for `dim = 1`, and
/// `(cos θⱼ e¹ + sin θⱼ e²)/‖·‖` with `θⱼ = jπ/M` for `dim = 2`.
///
/// Half a turn suffices because distances are sign-invariant.
pub fn unit_sphere_samples(s: &Subspace, m: usize) -> Result<Vec<Vector>> {
    match s.dim() {
        1 => Ok(vec![s.basis()[0].normalized()?]),
        2 => {
            if m == 0 {
                return Err(Error::InvalidArgument(
                    "need at least one sphere sample".into(),
                ));
            }
            let (e1, e2) = (&s.basis()[0], &s.basis()[1]);
            (0..m)
                .map(|j| {
                    let theta = PI * j as f64 / m as f64;
                    Vector::lin_comb(&[(theta.cos(), e1), (theta.sin(), e2)])?.normalized()
                })
                .collect()
        }
        dim => Err(Error::UnsupportedDimension { dim, max: 2 }),
    }
}

/// Local maxima refined by golden-section search after sampling.
const REFINED_PEAKS: usize = 3;
const REFINE_ITERS: usize = 48;

/// One-sided deficiency `sup_{a∈A,|a|=1} ρ(a, B)`.
///
/// For `dim A = 2` the circle is sampled at `m` angles and the largest local
/// maxima are then refined by golden-section search in `θ`, so the result
/// does not carry the `O(1/m)` error of a kinked peak. It never falls below
/// the sampled maximum.
pub fn deficiency(a: &Subspace, b: &Subspace, m: usize) -> Result<f64> {
    deficiency_with(a, b, m, MinimaxOptions::default())
}

pub fn deficiency_with(a: &Subspace, b: &Subspace, m: usize, opts: MinimaxOptions) -> Result<f64> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch);
    }
    let samples = unit_sphere_samples(a, m)?;
    let solver = DistanceSolver::new(b, opts)?;
    let mut warm = Vec::new();
    let values = samples
        .iter()
        .map(|u| Ok(solver.distance(u, &mut warm)?.0))
        .collect::<Result<Vec<f64>>>()?;
    let sampled = values.iter().copied().fold(0.0, f64::max);
    if a.dim() != 2 || m < 3 {
        return Ok(sampled);
    }

    // ρ(u(θ), B) has period π in θ.
    let (e1, e2) = (&a.basis()[0], &a.basis()[1]);
    let mut rho = |theta: f64| -> Result<f64> {
        let u = Vector::lin_comb(&[(theta.cos(), e1), (theta.sin(), e2)])?.normalized()?;
        Ok(solver.distance(&u, &mut warm)?.0)
    };
    let mut peaks: Vec<usize> = (0..m)
        .filter(|&j| {
            let v = values[j];
            v >= values[(j + m - 1) % m] && v >= values[(j + 1) % m] && v > 0.0
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let step = PI / m as f64;
    let mut best = sampled;
    for &j in peaks.iter().take(REFINED_PEAKS) {
        best = best.max(golden_max(
            &mut rho,
            (j as f64 - 1.0) * step,
            (j as f64 + 1.0) * step,
        )?);
    }
    Ok(best)
}

/// Largest value seen by a golden-section search for a maximum on `[lo, hi]`.
fn golden_max(f: &mut impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<f64> {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut best = fc.max(fd);
    for _ in 0..REFINE_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d)?;
        }
        best = best.max(fc).max(fd);
    }
    Ok(best)
}

/// `∠(A, B)`, the smaller of the two one-sided deficiencies. Exactly
/// symmetric: each deficiency is a deterministic function of its ordered pair.
pub fn angle(a: &Subspace, b: &Subspace, m: usize) -> Result<f64> {
    angle_with(a, b, m, MinimaxOptions::default())
}

pub fn angle_with(a: &Subspace, b: &Subspace, m: usize, opts: MinimaxOptions) -> Result<f64> {
    let d1 = deficiency_with(a, b, m, opts)?;
    let d2 = deficiency_with(b, a, m, opts)?;
    Ok(d1.min(d2))
}

/// Deficiency of `A` with respect to a subspace known only through a
/// closed-form distance (used for the infinite-dimensional `X₀`).
pub fn deficiency_to_x0(a: &Subspace, m: usize, dist: impl Fn(&Vector) -> f64) -> Result<f64> {
    Ok(unit_sphere_samples(a, m)?
        .iter()
        .map(dist)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::AmbientSpace;

    fn r2(x: f64, y: f64) -> Vector {
        Vector::from_samples(AmbientSpace::sup_coords(2).unwrap(), vec![x, y]).unwrap()
    }

    fn line(x: f64, y: f64) -> Subspace {
        Subspace::new(vec![r2(x, y)]).unwrap()
    }

    #[test]
    fn member_of_span_has_zero_distance() {
        let s = AmbientSpace::grid_sup(0.0, 1.0, 0.01).unwrap();
        let e1 = Vector::from_fn(s.clone(), |x| x.sin(), None, vec![]).unwrap();
        let e2 = Vector::from_fn(s, |x| 1.0 + x * x, None, vec![]).unwrap();
        let sub = Subspace::new(vec![e1.clone(), e2]).unwrap();
        let (d, _) = distance_to_subspace(&e1, &sub).unwrap();
        assert!(d <= 1e-8);
    }

    #[test]
    fn orthogonal_axes_in_sup_norm() {
        let (d, beta) = distance_to_subspace(&r2(1.0, 0.0), &line(0.0, 1.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!(beta[0].abs() < 1e-12);
        assert!((deficiency(&line(1.0, 0.0), &line(0.0, 1.0), 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((angle(&line(1.0, 0.0), &line(0.0, 1.0), 8).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_angle_vanishes() {
        let a = line(0.3, -0.7);
        assert!(angle(&a, &a, 16).unwrap() <= 1e-8);
        let s = AmbientSpace::sup_coords(3).unwrap();
        let p = Subspace::new(vec![
            Vector::from_samples(s.clone(), vec![1.0, 0.5, 0.0]).unwrap(),
            Vector::from_samples(s, vec![0.0, 1.0, -2.0]).unwrap(),
        ])
        .unwrap();
        assert!(deficiency(&p, &p, 64).unwrap() <= 1e-8);
    }

    #[test]
    fn sphere_samples_are_unit() {
        let two = Subspace::new(vec![r2(1.0, 0.0), r2(0.0, 1.0)]).unwrap();
        let samples = unit_sphere_samples(&two, 4).unwrap();
        assert_eq!(samples.len(), 4);
        for u in &samples {
            assert!((u.norm() - 1.0).abs() <= 1e-10);
        }
        // θ = π/4: (cos, sin)/‖·‖_∞ = (1, 1)
        assert!((samples[1].samples()[0] - 1.0).abs() < 1e-12);
        assert!((samples[1].samples()[1] - 1.0).abs() < 1e-12);

        let one = Subspace::new(vec![r2(2.0, 0.0)]).unwrap();
        let s1 = unit_sphere_samples(&one, 100).unwrap();
        assert_eq!(s1.len(), 1);
        assert_eq!(s1[0].norm(), 1.0);
    }

    #[test]
    fn dimension_three_is_unsupported_for_sampling() {
        let s = AmbientSpace::sup_coords(3).unwrap();
        let e = |i: usize| {
            let mut c = vec![0.0; 3];
            c[i] = 1.0;
            Vector::from_samples(s.clone(), c).unwrap()
        };
        let sub = Subspace::new(vec![e(0), e(1), e(2)]).unwrap();
        assert!(matches!(
            deficiency(&sub, &sub, 8),
            Err(Error::UnsupportedDimension { dim: 3, .. })
        ));
    }

    #[test]
    fn euclidean_distance_is_least_squares() {
        let s = AmbientSpace::seq_l2(3).unwrap();
        let v = Vector::from_samples(s.clone(), vec![1.0, 2.0, 2.0]).unwrap();
        let sub =
            Subspace::new(vec![Vector::from_samples(s, vec![1.0, 0.0, 0.0]).unwrap()]).unwrap();
        let (d, beta) = distance_to_subspace(&v, &sub).unwrap();
        assert!((d - 8f64.sqrt()).abs() < 1e-12);
        assert!((beta[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_distance_splits_core_and_block() {
        let core = AmbientSpace::grid_sup(0.0, 1.0, 0.5).unwrap();
        let space = AmbientSpace::product_sum(core.clone(), 1).unwrap();
        let e = Vector::product(
            space.clone(),
            Vector::from_samples(core.clone(), vec![1.0, 1.0, 1.0]).unwrap(),
            vec![0.0],
        )
        .unwrap();
        let v = Vector::product(
            space,
            Vector::from_samples(core, vec![2.0, 2.0, 2.0]).unwrap(),
            vec![0.5],
        )
        .unwrap();
        let (d, beta) = distance_to_subspace(&v, &Subspace::new(vec![e]).unwrap()).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!((beta[0] - 2.0).abs() < 1e-12);
    }
}
