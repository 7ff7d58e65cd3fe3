//! The radial transform `T`, its adjoint, and closed forms on indicators.

use rayon::prelude::*;

use crate::gauss::GaussLegendre;
use crate::grid::RadialGrid;
use crate::interp;
use crate::interval::IntervalSet;
use crate::params::Params;
use crate::profile::RadialProfile;
use crate::scalar::{compensated_sum, Scalar};

/// Tail threshold relative to the largest output value.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Convergence metadata for a forward transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDiagnostics<T> {
    /// Power-law decay rate fitted to the outermost samples, if they are nonzero.
    pub decay_exponent: Option<T>,
    /// Estimated mass of the integral lost past the grid, relative to `max |Tf|`.
    pub tail_fraction: T,
    pub warning: bool,
}

/// Quadrature for `∫_0^∞ · ds` in the row of output radius `r`: nodes
/// `s = c·tan φ` with `c = √(1+r²)` and `φ` on the midpoints of the grid's cells
/// over `(0, π/2)`. The scale `c` keeps the far field resolved for large `r`.
fn row_quadrature<T: Scalar>(n: usize, r: T) -> impl Iterator<Item = (T, T)> {
    let c = (T::one() + r * r).sqrt();
    let h = T::FRAC_PI_2() / T::from_usize_exact(n);
    (0..n).map(move |j| {
        let phi = (T::from_usize_exact(j) + T::lit(0.5)) * h;
        let t = phi.tan();
        (c * t, c * h * (T::one() + t * t))
    })
}

/// Visits `(node, weight)` pairs such that `Σ weight·f[node] ≈ Tf(r)`.
fn for_each_row_entry<T: Scalar, F: FnMut(usize, T)>(
    params: &Params,
    grid: &RadialGrid<T>,
    r: T,
    mut visit: F,
) {
    let km1 = params.k as i32 - 1;
    let alpha = params.decay::<T>();
    for (s, w) in row_quadrature(grid.len(), r) {
        let u = (r * r + s * s).sqrt();
        if let Some(st) = interp::stencil(grid, u, alpha) {
            let ws = w * s.powi(km1);
            for (node, lw) in st.nodes.iter().zip(st.weights) {
                visit(*node, ws * lw);
            }
        }
    }
    if params.k == 2 {
        // For k = 2 the integrand is odd at φ = 0; the leading midpoint-rule
        // error is -(h²/24)·G'(0) with G'(0) = c²·f(r).
        let h = T::FRAC_PI_2() / T::from_usize_exact(grid.len());
        let corr = -h * h / T::lit(24.0) * (T::one() + r * r);
        if let Some(st) = interp::stencil(grid, r, alpha) {
            for (node, lw) in st.nodes.iter().zip(st.weights) {
                visit(*node, corr * lw);
            }
        }
    }
}

fn transform_at<T: Scalar>(params: &Params, grid: &RadialGrid<T>, values: &[T], r: T) -> T {
    let mut terms = Vec::with_capacity(4 * grid.len());
    for_each_row_entry(params, grid, r, |node, w| terms.push(w * values[node]));
    compensated_sum(terms)
}

/// `Tf` sampled on `f`'s grid, using `T f(r) = ∫_0^∞ f(√(r²+s²)) s^{k-1} ds`.
pub fn apply_t<T: Scalar>(params: &Params, f: &RadialProfile<T>) -> RadialProfile<T> {
    apply_t_checked(params, f).0
}

pub fn apply_t_checked<T: Scalar>(
    params: &Params,
    f: &RadialProfile<T>,
) -> (RadialProfile<T>, TailDiagnostics<T>) {
    let grid = f.grid().clone();
    let values: Vec<T> = grid
        .nodes()
        .par_iter()
        .map(|r| transform_at(params, &grid, f.values(), *r))
        .collect();
    let out = RadialProfile::new(grid.clone(), values).expect("transform of finite data is finite");
    let diag = tail_diagnostics(params, f, out.sup_abs());
    (out, diag)
}

fn tail_diagnostics<T: Scalar>(
    params: &Params,
    f: &RadialProfile<T>,
    scale: T,
) -> TailDiagnostics<T> {
    let grid = f.grid();
    let n = grid.len();
    let (r1, r2) = (grid.nodes()[n - 2], grid.nodes()[n - 1]);
    let (f1, f2) = (f.values()[n - 2].abs(), f.values()[n - 1].abs());
    let k = T::lit(f64::from(params.k));
    if f2 == T::zero() {
        return TailDiagnostics { decay_exponent: None, tail_fraction: T::zero(), warning: false };
    }
    let decay = if f1 > T::zero() { -(f2 / f1).ln() / (r2 / r1).ln() } else { T::infinity() };
    let tail_fraction = if decay <= k {
        T::infinity()
    } else if grid.is_unbounded() || scale == T::zero() {
        T::zero()
    } else {
        // ∫_{r_max}^∞ f(r_max)(u/r_max)^{-a} u^{k-1} du for the far-field power law
        let rm = grid.r_max();
        f2 * (rm / r2).powf(-decay) * rm.powf(k) / (decay - k) / scale
    };
    TailDiagnostics {
        decay_exponent: Some(decay),
        tail_fraction,
        warning: tail_fraction > T::lit(TAIL_TOLERANCE),
    }
}

/// Dense matrix of `T` on one grid, for repeated application.
#[derive(Debug, Clone)]
pub struct TransformMatrix<T> {
    n: usize,
    entries: Vec<T>,
    domain_weights: Vec<T>,
    target_weights: Vec<T>,
}

impl<T: Scalar> TransformMatrix<T> {
    pub fn assemble(params: &Params, grid: &RadialGrid<T>) -> Self {
        let n = grid.len();
        let rows: Vec<Vec<T>> = grid
            .nodes()
            .par_iter()
            .map(|r| {
                let mut row = vec![T::zero(); n];
                for_each_row_entry(params, grid, *r, |node, w| row[node] = row[node] + w);
                row
            })
            .collect();
        Self {
            n,
            entries: rows.into_iter().flatten().collect(),
            domain_weights: grid.weights(params.domain_weight()),
            target_weights: grid.weights(params.target_weight()),
        }
    }

    /// Assembles `T` on the basis `((1+r_j²)/(1+u²))^{(k+1)/2}·ĥ_j(θ)`, with `ĥ_j`
    /// the piecewise-linear hats in `θ` (constant on the last half-cell). All
    /// entries are nonnegative and the weighted transpose is a consistent
    /// adjoint, so the discrete Euler–Lagrange map is an exact ascent. The
    /// extremizer is represented exactly.
    ///
    /// Row `r` is integrated in `ψ` with `u² = r² + (1+r²) tan²ψ`, where the
    /// integrand reduces to `sin^{k-1}ψ / √(1+r²)` times the hat.
    pub fn assemble_hat(params: &Params, grid: &RadialGrid<T>) -> Self {
        let n = grid.len();
        let gl = GaussLegendre::<T>::new(8);
        let km1 = params.k as i32 - 1;
        let half_alpha = params.decay::<T>() / T::lit(2.0);
        let thetas = grid.theta_nodes();
        let lift: Vec<T> = grid.nodes().iter().map(|r| (T::one() + *r * *r).powf(half_alpha)).collect();
        let two = T::lit(2.0);
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let r = grid.nodes()[i];
                let c = (T::one() + r * r).sqrt();
                let th_r = thetas[i];
                let cos_r = th_r.cos();
                // ψ(θ) from 1 - c cos θ = 2 sin((θ+θ_r)/2) sin((θ-θ_r)/2) / cos θ_r
                let psi_of = |th: T| -> T {
                    let gap = two * ((th + th_r) / two).sin() * ((th - th_r) / two).sin() / cos_r;
                    two * (gap / two).max(T::zero()).min(T::one()).sqrt().asin()
                };
                let theta_of = |psi: T| -> T {
                    let (sp, cp) = psi.sin_cos();
                    ((r * cp).powi(2) + (c * sp).powi(2)).sqrt().atan2(cp)
                };
                let mut row = vec![T::zero(); n];
                for j in i..n {
                    let (ta, tb) = if j + 1 < n { (thetas[j], thetas[j + 1]) } else { (thetas[j], grid.theta_max()) };
                    if tb <= ta {
                        continue;
                    }
                    let (pa, pb) = (psi_of(ta), psi_of(tb));
                    for (psi, w) in gl.mapped(pa, pb) {
                        let wk = w * psi.sin().powi(km1);
                        if j + 1 < n {
                            let t = ((theta_of(psi) - ta) / (tb - ta)).max(T::zero()).min(T::one());
                            row[j] = row[j] + wk * (T::one() - t);
                            row[j + 1] = row[j + 1] + wk * t;
                        } else {
                            row[j] = row[j] + wk;
                        }
                    }
                }
                row.iter_mut().zip(&lift).for_each(|(m, l)| *m = *m * *l / c);
                row
            })
            .collect();
        Self {
            n,
            entries: rows.into_iter().flatten().collect(),
            domain_weights: grid.weights(params.domain_weight()),
            target_weights: grid.weights(params.target_weight()),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn apply(&self, f: &[T]) -> Vec<T> {
        (0..self.n)
            .into_par_iter()
            .map(|i| compensated_sum(self.row(i).iter().zip(f).map(|(m, v)| *m * *v)))
            .collect()
    }

    /// Applies the matrix to a profile on the grid it was assembled for.
    pub fn apply_profile(&self, f: &RadialProfile<T>) -> RadialProfile<T> {
        assert_eq!(f.len(), self.n, "profile and matrix grids differ");
        f.with_values(self.apply(f.values())).expect("finite input gives finite output")
    }

    /// Transpose with respect to the cell-weight pairings, so that
    /// `⟨Mf, g⟩_{r^{d-k-1}} = ⟨f, M*g⟩_{r^{d-1}}` holds exactly on the grid.
    pub fn apply_adjoint(&self, g: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(g.len(), n, "adjoint input length");
        let mut acc = vec![T::zero(); n];
        for (i, (gv, tw)) in g.iter().zip(&self.target_weights).enumerate() {
            let gi = *gv * *tw;
            if gi == T::zero() {
                continue;
            }
            for (a, m) in acc.iter_mut().zip(self.row(i)) {
                *a = *a + *m * gi;
            }
        }
        acc.iter().zip(&self.domain_weights).map(|(a, w)| *a / *w).collect()
    }
}

/// `T 1_F(r)` in closed form. With `v = u²` each interval `(a, b)` gives
/// `½ ∫_{max(a,r)²}^{b²} (v - r²)^{k/2-1} dv = [(v - r²)^{k/2}]/k`.
pub fn indicator_transform_at<T: Scalar>(params: &Params, set: &IntervalSet<T>, r: T) -> T {
    let half_k = T::lit(f64::from(params.k) / 2.0);
    let k = T::lit(f64::from(params.k));
    let r = r.abs();
    let lifted = |x: T| {
        // x² - r², factored for accuracy near x ≈ r
        let v = (x - r) * (x + r);
        if v <= T::zero() {
            T::zero()
        } else {
            v.powf(half_k)
        }
    };
    set.intervals()
        .iter()
        .filter(|(_, b)| *b > r)
        .map(|(a, b)| (lifted(*b) - lifted(a.max(r))) / k)
        .sum()
}

/// `T 1_F` sampled on `grid`.
pub fn apply_t_indicator<T: Scalar>(
    params: &Params,
    set: &IntervalSet<T>,
    grid: std::sync::Arc<RadialGrid<T>>,
) -> RadialProfile<T> {
    let values = grid.nodes().iter().map(|r| indicator_transform_at(params, set, *r)).collect();
    RadialProfile::new(grid, values).expect("closed form is finite")
}

/// Same quantity by Gauss-Legendre quadrature of the `s`-form; the preimage
/// of `(a, b)` is `s ∈ (√(max(a,r)² - r²), √(b² - r²))`. Used as an
/// independent cross-check of the closed form.
pub fn indicator_transform_by_quadrature<T: Scalar>(
    params: &Params,
    set: &IntervalSet<T>,
    r: T,
) -> T {
    let gl = GaussLegendre::<T>::new(12);
    let km1 = params.k as i32 - 1;
    set.intervals()
        .iter()
        .filter(|(_, b)| *b > r)
        .map(|(a, b)| {
            let lo = ((a.max(r) - r) * (a.max(r) + r)).max(T::zero()).sqrt();
            let hi = ((*b - r) * (*b + r)).sqrt();
            gl.integrate(lo, hi, |s| s.powi(km1))
        })
        .sum()
}

/// `T*g(u) = u^{2-d} ∫_0^u g(r)(u² - r²)^{k/2-1} r^{d-k-1} dr`, the adjoint
/// for `⟨Tf, g⟩_{r^{d-k-1}dr} = ⟨f, T*g⟩_{r^{d-1}dr}`. With `r = u sin θ`
/// this is `∫_0^{π/2} g(u sin θ) cos^{k-1}θ sin^{d-k-1}θ dθ`, free of the
/// endpoint singularity at `r = u`.
pub fn apply_t_adjoint<T: Scalar>(params: &Params, g: &RadialProfile<T>) -> RadialProfile<T> {
    let grid = g.grid().clone();
    let gl = GaussLegendre::<T>::new(8);
    let panels = 96usize;
    let width = T::FRAC_PI_2() / T::from_usize_exact(panels);
    let (kc, ks) = (params.k as i32 - 1, params.target_weight());
    let quad: Vec<(T, T)> = (0..panels)
        .flat_map(|p| {
            let a = T::from_usize_exact(p) * width;
            gl.mapped(a, a + width).collect::<Vec<_>>()
        })
        .map(|(th, w)| (th.sin(), w * th.cos().powi(kc) * th.sin().powi(ks)))
        .collect();
    let values: Vec<T> = grid
        .nodes()
        .par_iter()
        .map(|u| compensated_sum(quad.iter().map(|(s, w)| *w * interp::eval(&grid, g.values(), *u * *s, T::zero()))))
        .collect();
    RadialProfile::new(grid.clone(), values).expect("adjoint of finite data is finite")
}

/// `⟨f, g⟩` against `r^a dr`.
pub fn pairing<T: Scalar>(f: &RadialProfile<T>, g: &RadialProfile<T>, a: i32) -> T {
    let prod: Vec<T> = f.values().iter().zip(g.values()).map(|(x, y)| *x * *y).collect();
    f.grid().integrate(&prod, a)
}
