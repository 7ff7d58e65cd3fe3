//! Quadrature grid on the half-line.
//!
//! Nodes are `r_i = tan(θ_i)` with `θ_i` the midpoints of `n` equal cells of
//! `(0, θ_max)`, `θ_max = arctan(r_max)`. An infinite `r_max` maps the whole
//! half-line onto `(0, π/2)`; profiles that decay like a power of `r` become
//! smooth in `θ` there.
//!
//! Two weight sets live on the grid. The cell weights `h (1 + r_i²)` are the
//! exact `dr`-length of each cell to second order and serve as the discrete
//! measure (masses, rearrangement, the search's variational problem). The
//! quadrature weights used by [`RadialGrid::integrate`] add a three-node
//! endpoint correction at each end, cancelling the `h²` term
//! `(h²/24)(f'(θ_max) − f'(0))` of the midpoint rule with one-sided
//! difference estimates of `f'`. Integrands with a nonzero slope at an end
//! (odd weights `r^a`, `k = 1` tails) then converge at fourth order.

use crate::error::{Error, Result};
use crate::gauss::GaussLegendre;
use crate::scalar::{compensated_sum, Scalar};

pub const MIN_POINTS: usize = 16;
const PANEL_ORDER: usize = 8;
/// Relative weight corrections on the three cells nearest each end.
const END_CORRECTION: [f64; 3] = [1.0 + 1.0 / 12.0, 1.0 - 1.0 / 8.0, 1.0 + 1.0 / 24.0];

#[derive(Debug, Clone)]
pub struct RadialGrid<T> {
    nodes: Vec<T>,
    theta_nodes: Vec<T>,
    base_weights: Vec<T>,
    quad_weights: Vec<T>,
    step: T,
    theta_max: T,
    r_max: T,
}

impl<T: Scalar> RadialGrid<T> {
    /// Builds an `n_points` grid covering `(0, r_max_hint]`. Pass
    /// `T::infinity()` to cover the whole half-line.
    pub fn new(n_points: usize, r_max_hint: T) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::Config(format!(
                "grid needs at least {MIN_POINTS} points, got {n_points}"
            )));
        }
        if r_max_hint.is_nan() || r_max_hint <= T::zero() {
            return Err(Error::Config(format!("r_max must be positive, got {r_max_hint}")));
        }
        let theta_max = if r_max_hint.is_infinite() {
            T::FRAC_PI_2()
        } else {
            r_max_hint.atan()
        };
        let step = theta_max / T::from_usize_exact(n_points);
        let half = T::lit(0.5);
        let theta_nodes: Vec<T> = (0..n_points)
            .map(|i| (T::from_usize_exact(i) + half) * step)
            .collect();
        let nodes: Vec<T> = theta_nodes.iter().map(|t| t.tan()).collect();
        let base_weights: Vec<T> = nodes.iter().map(|r| step * (T::one() + *r * *r)).collect();
        let quad_weights = base_weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let edge = i.min(n_points - 1 - i);
                END_CORRECTION.get(edge).map_or(*w, |c| *w * T::lit(*c))
            })
            .collect();
        let r_max = if r_max_hint.is_infinite() {
            T::infinity()
        } else {
            r_max_hint
        };
        Ok(Self { nodes, theta_nodes, base_weights, quad_weights, step, theta_max, r_max })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn theta_nodes(&self) -> &[T] {
        &self.theta_nodes
    }

    /// Cell weights for `∫ · dr`.
    pub fn base_weights(&self) -> &[T] {
        &self.base_weights
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn theta_max(&self) -> T {
        self.theta_max
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn is_unbounded(&self) -> bool {
        self.r_max.is_infinite()
    }

    /// Endpoint-corrected weights for `∫ · dr`.
    pub fn quadrature_weights(&self) -> &[T] {
        &self.quad_weights
    }

    /// Cell weights for `∫ · r^a dr`.
    pub fn weights(&self, a: i32) -> Vec<T> {
        self.nodes
            .iter()
            .zip(&self.base_weights)
            .map(|(r, w)| *w * r.powi(a))
            .collect()
    }

    /// `θ`-interval of cell `i`.
    pub fn cell_theta(&self, i: usize) -> (T, T) {
        let lo = T::from_usize_exact(i) * self.step;
        let hi = if i + 1 == self.len() {
            self.theta_max
        } else {
            T::from_usize_exact(i + 1) * self.step
        };
        (lo, hi)
    }

    /// `r`-interval of cell `i`; the last cell of an unbounded grid ends at infinity.
    pub fn cell_bounds(&self, i: usize) -> (T, T) {
        let (lo, hi) = self.cell_theta(i);
        let hi_r = if i + 1 == self.len() { self.r_max } else { hi.tan() };
        (lo.tan(), hi_r)
    }

    /// Index of the cell containing radius `r`, or `None` beyond `r_max`.
    pub fn cell_of(&self, r: T) -> Option<usize> {
        if r < T::zero() || r > self.r_max {
            return None;
        }
        let idx = (r.atan() / self.step).floor().to_usize().unwrap_or(0);
        Some(idx.min(self.len() - 1))
    }

    /// Fraction of cell `i`'s `θ`-length lying inside `[lo, hi]`.
    pub fn cell_fraction(&self, i: usize, lo: T, hi: T) -> T {
        let (a, b) = self.cell_theta(i);
        let tlo = lo.max(T::zero()).atan();
        let thi = if hi.is_infinite() { T::FRAC_PI_2() } else { hi.atan() };
        let overlap = thi.min(b) - tlo.max(a);
        if overlap <= T::zero() {
            T::zero()
        } else {
            overlap / (b - a)
        }
    }

    /// Quadrature of sampled values against `r^a dr`.
    pub fn integrate(&self, values: &[T], a: i32) -> T {
        debug_assert_eq!(values.len(), self.len());
        compensated_sum(
            values
                .iter()
                .zip(self.nodes.iter().zip(&self.quad_weights))
                .map(|(v, (r, w))| *v * *w * r.powi(a)),
        )
    }

    /// Integrates a function given in closed form, `∫_lo^hi g(r) r^a dr`,
    /// with Gauss-Legendre panels in `θ` aligned to the grid cells and split
    /// at every radius in `breaks`.
    pub fn integrate_fn<F: Fn(T) -> T>(&self, g: F, lo: T, hi: T, a: i32, breaks: &[T]) -> T {
        if !(hi > lo) {
            return T::zero();
        }
        let to_theta = |r: T| if r.is_infinite() { T::FRAC_PI_2() } else { r.atan() };
        let (tlo, thi) = (to_theta(lo.max(T::zero())), to_theta(hi));
        let mut cuts: Vec<T> = vec![tlo, thi];
        cuts.extend(
            (1..self.len())
                .map(|i| T::from_usize_exact(i) * self.step)
                .filter(|t| *t > tlo && *t < thi),
        );
        if thi > self.theta_max {
            let extra = ((thi - self.theta_max) / self.step).ceil().to_usize().unwrap_or(0);
            for j in 0..=extra {
                let t = self.theta_max + T::from_usize_exact(j) * self.step;
                if t > tlo && t < thi {
                    cuts.push(t);
                }
            }
        }
        cuts.extend(breaks.iter().map(|b| to_theta(*b)).filter(|t| *t > tlo && *t < thi));
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite cut"));
        cuts.dedup();
        let gl = GaussLegendre::<T>::new(PANEL_ORDER);
        compensated_sum(cuts.windows(2).map(|w| {
            gl.integrate(w[0], w[1], |t| {
                let r = t.tan();
                let c = t.cos();
                g(r) * r.powi(a) / (c * c)
            })
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_contract() {
        let g = RadialGrid::<f64>::new(16, 10.0).unwrap();
        assert_eq!(g.len(), 16);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(*g.nodes().last().unwrap() <= 10.0 * (1.0 + 1e-12));
        assert!(g.base_weights().iter().all(|w| *w > 0.0));
        // Midpoint rule for ∫_0^10 1 dr; low order at the finite end.
        let len = g.integrate(&[1.0; 16], 0);
        assert!((len - 10.0).abs() < 1.0, "{len}");
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(matches!(RadialGrid::<f64>::new(2, 1.0), Err(Error::Config(_))));
        assert!(matches!(RadialGrid::<f64>::new(64, -1.0), Err(Error::Config(_))));
    }

    #[test]
    fn closed_form_integral_on_unit_interval() {
        let g = RadialGrid::<f64>::new(4096, 50.0).unwrap();
        let v = g.integrate_fn(|_| 1.0, 0.0, 1.0, 2, &[]);
        assert!((v - 1.0 / 3.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn midpoint_rule_is_spectral_for_decaying_profiles() {
        // ∫_0^∞ (1+r²)^{-2} r² dr = π/4
        let g = RadialGrid::<f64>::new(512, f64::INFINITY).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|r| (1.0 + r * r).powi(-2)).collect();
        let v = g.integrate(&vals, 2);
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-12, "{v}");
    }

    #[test]
    fn polynomial_weights_on_finite_range() {
        let g = RadialGrid::<f64>::new(256, 3.0).unwrap();
        for j in 0..6 {
            let v = g.integrate_fn(|_| 1.0, 0.0, 3.0, j, &[]);
            let exact = 3f64.powi(j + 1) / f64::from(j + 1);
            assert!(((v - exact) / exact).abs() < 1e-10);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let g = RadialGrid::<f32>::new(256, f32::INFINITY).unwrap();
        let vals: Vec<f32> = g.nodes().iter().map(|r| (1.0 + r * r).powi(-2)).collect();
        let v = g.integrate(&vals, 2);
        assert!((v - std::f32::consts::FRAC_PI_4).abs() < 1e-4, "{v}");
    }
}
