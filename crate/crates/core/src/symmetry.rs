//! Rearrangement, dilation normalization and level/radius truncation.

use crate::error::{Error, Result};
use crate::interp;
use crate::params::Params;
use crate::profile::RadialProfile;
use crate::scalar::{compensated_sum, Scalar};

/// Nonincreasing rearrangement with respect to `μ = r^{d-1} dr`.
///
/// Cells are ordered by `|f|` (descending, ties to the smaller radius) and
/// their `μ`-mass is refilled outward from the origin. Each output cell takes
/// the `p`-mean of the sorted values over its `μ`-window, so `‖f*‖_p = ‖f‖_p`
/// up to rounding.
pub fn rearrange<T: Scalar>(params: &Params, f: &RadialProfile<T>) -> RadialProfile<T> {
    let grid = f.grid();
    let p = params.p::<T>();
    let mu = grid.weights(params.domain_weight());
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| {
        f.values()[b]
            .abs()
            .partial_cmp(&f.values()[a].abs())
            .expect("finite samples")
            .then(a.cmp(&b))
    });
    // sorted source segments: (μ-mass, |f|^p)
    let source: Vec<(T, T)> = order.iter().map(|&i| (mu[i], f.values()[i].abs().powf(p))).collect();
    let mut out = Vec::with_capacity(f.len());
    let mut src = 0usize;
    let mut left_in_src = source.first().map_or(T::zero(), |s| s.0);
    for &cell_mass in &mu {
        let mut need = cell_mass;
        let mut acc = T::zero();
        while need > T::zero() && src < source.len() {
            let take = need.min(left_in_src);
            acc = acc + take * source[src].1;
            need = need - take;
            left_in_src = left_in_src - take;
            if left_in_src <= T::zero() {
                src += 1;
                left_in_src = source.get(src).map_or(T::zero(), |s| s.0);
            }
        }
        out.push((acc / cell_mass).max(T::zero()).powf(T::one() / p));
    }
    // the greedy refill may leave values a rounding error out of order
    for i in 1..out.len() {
        if out[i] > out[i - 1] {
            out[i] = out[i - 1];
        }
    }
    f.with_values(out).expect("rearrangement is finite")
}

/// Radius below which half of `‖f‖_p^p` lies. Cumulative masses at cell
/// edges are joined by a monotone cubic in `θ` and inverted by bisection.
pub fn mass_median<T: Scalar>(params: &Params, f: &RadialProfile<T>) -> Result<T> {
    let masses = f.cell_masses(params);
    let total = compensated_sum(masses.iter().copied());
    if !(total > T::zero()) {
        return Err(Error::Domain("profile has zero L^p mass".into()));
    }
    let grid = f.grid();
    let mut edges = Vec::with_capacity(masses.len() + 1);
    let mut cum = Vec::with_capacity(masses.len() + 1);
    edges.push(T::zero());
    cum.push(T::zero());
    let mut running = T::zero();
    for (i, m) in masses.iter().enumerate() {
        running = running + *m;
        edges.push(grid.cell_theta(i).1);
        cum.push(running / total);
    }
    let half = T::lit(0.5);
    let j = cum.partition_point(|c| *c < half).clamp(1, cum.len() - 1);
    let (mut lo, mut hi) = (edges[j - 1], edges[j]);
    // bisection on the monotone interpolant restricted to the bracketing cell
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if interp::monotone_scattered(&edges, &cum, mid) < half {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    Ok(((lo + hi) / T::lit(2.0)).tan())
}

/// Canonical member of the dilation orbit: returns `λ` and `g = f_λ`,
/// `g(r) = λ^{d/p} f(λ r)`, with exactly half of `‖g‖_p^p` inside `[0, 1]`.
pub fn normalize_dilation<T: Scalar>(
    params: &Params,
    f: &RadialProfile<T>,
) -> Result<(T, RadialProfile<T>)> {
    let lambda = mass_median(params, f)?;
    Ok((lambda, f.dilate(params, lambda)))
}

/// Splits `f = g_m + eps_m` with `g_m = f·1_{[0,m]}·1_{f ≤ m}`.
pub fn truncate<T: Scalar>(
    f: &RadialProfile<T>,
    m: T,
) -> (RadialProfile<T>, RadialProfile<T>) {
    let mut kept = Vec::with_capacity(f.len());
    let mut rest = Vec::with_capacity(f.len());
    for (r, v) in f.grid().nodes().iter().zip(f.values()) {
        if *r <= m && *v <= m {
            kept.push(*v);
            rest.push(T::zero());
        } else {
            kept.push(T::zero());
            rest.push(*v);
        }
    }
    (
        f.with_values(kept).expect("finite"),
        f.with_values(rest).expect("finite"),
    )
}

/// `μ({g ≥ 1} ∩ [0, R])`: the largest `c` with `μ({g ≥ 1} ∩ [0,R]) ≥ c`.
pub fn unit_level_mass<T: Scalar>(params: &Params, g: &RadialProfile<T>, radius: T) -> T {
    let grid = g.grid();
    let mu = grid.weights(params.domain_weight());
    compensated_sum(
        g.values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v >= T::one())
            .map(|(i, _)| mu[i] * grid.cell_fraction(i, T::zero(), radius)),
    )
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::RadialGrid;
    use crate::interval::IntervalSet;

    fn grid(n: usize) -> Arc<RadialGrid<f64>> {
        Arc::new(RadialGrid::new(n, f64::INFINITY).unwrap())
    }

    fn h(r: f64) -> f64 {
        (1.0 + r * r).powf(-1.0)
    }

    #[test]
    fn monotone_profile_is_fixed() {
        let params = Params::new(1, 3).unwrap();
        let f = RadialProfile::from_fn(grid(512), h).unwrap();
        let s = rearrange(&params, &f);
        for (a, b) in s.values().iter().zip(f.values()) {
            assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }
    }

    #[test]
    fn shell_rearranges_to_ball_of_equal_measure() {
        let params = Params::new(1, 3).unwrap();
        let g = grid(4096);
        let f = RadialProfile::indicator(g.clone(), &IntervalSet::single(1.0, 2.0).unwrap());
        let s = rearrange(&params, &f);
        let radius = 7f64.cbrt();
        for (r, v) in g.nodes().iter().zip(s.values()) {
            if *r < radius * 0.99 {
                assert!((v - 1.0).abs() < 1e-9, "r={r}: {v}");
            } else if *r > radius * 1.01 {
                assert!(v.abs() < 1e-9, "r={r}: {v}");
            }
        }
        assert!((s.domain_norm(&params) / f.domain_norm(&params) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_of_unit_ball_indicator() {
        let params = Params::new(1, 3).unwrap();
        let a = 2.5;
        let f = RadialProfile::indicator(grid(4096), &IntervalSet::single(0.0, a).unwrap());
        let (lambda, _) = normalize_dilation(&params, &f).unwrap();
        let exact = a * 2f64.powf(-1.0 / 3.0);
        assert!((lambda / exact - 1.0).abs() < 1e-3, "{lambda} vs {exact}");
    }

    #[test]
    fn normalization_is_idempotent() {
        let params = Params::new(2, 4).unwrap();
        let f = RadialProfile::from_fn(grid(2048), |r| (1.0 + 9.0 * r * r).powf(-1.5)).unwrap();
        let (_, g) = normalize_dilation(&params, &f).unwrap();
        let (again, _) = normalize_dilation(&params, &g).unwrap();
        assert!((again - 1.0).abs() < 1e-6, "{again}");
        assert!((g.domain_norm(&params) / f.domain_norm(&params) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_profile_cannot_be_normalized() {
        let params = Params::new(1, 3).unwrap();
        let f = RadialProfile::zeros(grid(64));
        assert!(matches!(normalize_dilation(&params, &f), Err(Error::Domain(_))));
    }

    #[test]
    fn truncation_of_extremizer_at_one() {
        let f = RadialProfile::from_fn(grid(256), |r| (1.0 + r * r).powf(-1.0)).unwrap();
        let (g, e) = truncate(&f, 1.0);
        for ((r, v), (gv, ev)) in f.grid().nodes().iter().zip(f.values()).zip(g.values().iter().zip(e.values())) {
            assert_eq!(gv + ev, *v);
            if *r <= 1.0 {
                assert_eq!(gv, v);
            } else {
                assert_eq!(ev, v);
            }
        }
        let (g_all, e_none) = truncate(&f, f64::INFINITY);
        assert!(e_none.is_zero());
        assert_eq!(g_all.values(), f.values());
        let (g_none, _) = truncate(&f, 1e-12);
        assert!(g_none.is_zero());
    }

    #[test]
    fn unit_level_mass_of_ball() {
        let params = Params::new(1, 3).unwrap();
        let f = RadialProfile::from_fn(grid(2048), |r| if r < 1.0 { 2.0 } else { 0.0 }).unwrap();
        let c = unit_level_mass(&params, &f, 10.0);
        assert!((c - 1.0 / 3.0).abs() < 2e-3, "{c}");
    }
}
