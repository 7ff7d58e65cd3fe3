//! Extremizers, sharp constants and the Euler–Lagrange search.

use std::sync::Arc;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::Params;
use crate::profile::RadialProfile;
use crate::scalar::{compensated_sum, Scalar};
use crate::symmetry;
use crate::transform::{apply_t, TransformMatrix};

/// Allowed drop of `Φ` between consecutive iterates.
pub const ASCENT_TOLERANCE: f64 = 1e-9;
/// Consecutive small relative changes required to declare convergence.
pub const STAGNATION_WINDOW: usize = 5;

/// `h_λ(r) = λ^{d/p} (1 + (λr)²)^{-(k+1)/2}`.
pub fn extremizer_profile<T: Scalar>(
    params: &Params,
    lambda: T,
    grid: Arc<RadialGrid<T>>,
) -> Result<RadialProfile<T>> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("dilation must be positive, got {lambda}")));
    }
    let amp = lambda.powf(params.scale_exp::<T>());
    let e = -params.decay::<T>() / T::lit(2.0);
    RadialProfile::from_fn(grid, |r| amp * (T::one() + (lambda * r) * (lambda * r)).powf(e))
}

/// Surface measure of the unit sphere `S^{i-1} ⊂ ℝ^i`.
pub fn sphere_area<T: Scalar>(i: u32) -> Result<T> {
    if i < 1 {
        return Err(Error::Parameter("sphere dimension needs i >= 1".into()));
    }
    let two_pi = T::lit(2.0) * T::PI();
    let (mut area, mut j) = if i % 2 == 1 { (T::lit(2.0), 1) } else { (two_pi, 2) };
    while j < i {
        area = area * two_pi / T::from_usize_exact(j as usize);
        j += 2;
    }
    Ok(area)
}

/// Best constant of the full k-plane inequality,
/// `A(k,d) = [2^{k-d} |S^k|^d / |S^d|^k]^{1/(d+1)}`.
pub fn constant_a<T: Scalar>(params: &Params) -> T {
    let (k, d) = (params.k as i32, params.d as i32);
    let sk = sphere_area::<T>(params.k + 1).expect("k >= 1");
    let sd = sphere_area::<T>(params.d + 1).expect("d >= 2");
    let inner = T::lit(2.0).powi(k - d) * sk.powi(d) / sd.powi(k);
    inner.powf(T::one() / T::lit(f64::from(params.d + 1)))
}

/// `Φ(f) = ‖T f‖_{L^q(r^{d-k-1})} / ‖f‖_{L^p(r^{d-1})}`.
pub fn functional_ratio<T: Scalar>(params: &Params, f: &RadialProfile<T>) -> Result<T> {
    let den = f.domain_norm(params);
    if !(den > T::zero()) {
        return Err(Error::Domain("functional ratio of a zero profile".into()));
    }
    Ok(apply_t(params, f).target_norm(params) / den)
}

/// `Φ(f)` with a pre-assembled matrix, for repeated evaluation on one grid.
pub fn functional_ratio_with<T: Scalar>(
    params: &Params,
    m: &TransformMatrix<T>,
    f: &RadialProfile<T>,
) -> Result<T> {
    let den = f.domain_norm(params);
    if !(den > T::zero()) {
        return Err(Error::Domain("functional ratio of a zero profile".into()));
    }
    Ok(m.apply_profile(f).target_norm(params) / den)
}

/// A computed constant with a resolution-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub resolution: usize,
}

/// `B(k,d) = Φ(h)` on an unbounded grid of `resolution` points; the error
/// is `|Φ_n − Φ_{n/2}|`.
pub fn constant_b<T: Scalar>(params: &Params, resolution: usize) -> Result<Estimate<T>> {
    let phi_at = |n: usize| -> Result<T> {
        let grid = Arc::new(RadialGrid::new(n, T::infinity())?);
        functional_ratio(params, &extremizer_profile(params, T::one(), grid)?)
    };
    let value = phi_at(resolution)?;
    let coarse = phi_at((resolution / 2).max(crate::grid::MIN_POINTS))?;
    Ok(Estimate { value, error: (value - coarse).abs(), resolution })
}

/// Tuning for [`search_extremizer_with`].
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Re-center every iterate in its dilation orbit.
    pub recenter: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-8, recenter: true }
    }
}

/// History of one extremizer search.
#[derive(Debug, Clone)]
pub struct SearchTrace<T: Scalar> {
    /// `Φ` of the initial profile followed by `Φ` after each step.
    pub iterates: Vec<T>,
    pub final_profile: RadialProfile<T>,
    pub converged: bool,
    pub iterations_used: usize,
    /// Steps at which the log-space damped update replaced the plain one.
    pub damped_steps: Vec<usize>,
    /// Dilation applied by re-centering at each step (1 when disabled).
    pub scales: Vec<T>,
}

impl<T: Scalar> SearchTrace<T> {
    pub fn final_ratio(&self) -> T {
        *self.iterates.last().expect("trace holds the initial value")
    }
}

impl<T: Scalar> Serialize for SearchTrace<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SearchTrace", 5)?;
        st.serialize_field("iterates", &self.iterates.iter().map(|v| v.f64()).collect::<Vec<_>>())?;
        st.serialize_field("converged", &self.converged)?;
        st.serialize_field("iterations_used", &self.iterations_used)?;
        st.serialize_field("damped_steps", &self.damped_steps)?;
        st.serialize_field("scales", &self.scales.iter().map(|v| v.f64()).collect::<Vec<_>>())?;
        st.end()
    }
}

struct Discrete<'a, T> {
    m: &'a TransformMatrix<T>,
    dw: Vec<T>,
    tw: Vec<T>,
    p: T,
    q: i32,
}

impl<T: Scalar> Discrete<'_, T> {
    fn mass(&self, f: &[T]) -> T {
        compensated_sum(f.iter().zip(&self.dw).map(|(v, w)| v.abs().powf(self.p) * *w))
    }

    fn normalize(&self, f: &mut [T]) -> Result<()> {
        let norm = self.mass(f).powf(T::one() / self.p);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Numerical("iterate lost its L^p mass".into()));
        }
        f.iter_mut().for_each(|v| *v = *v / norm);
        Ok(())
    }

    fn ratio(&self, f: &[T]) -> T {
        let tf = self.m.apply(f);
        let num = compensated_sum(tf.iter().zip(&self.tw).map(|(v, w)| v.abs().powi(self.q) * *w));
        num.powf(T::one() / T::from_usize_exact(self.q as usize)) / self.mass(f).powf(T::one() / self.p)
    }

    /// `[T*((Tf)^{q-1})]^{1/(p-1)}` with the discrete adjoint.
    fn step(&self, f: &[T]) -> Vec<T> {
        let g: Vec<T> = self.m.apply(f).iter().map(|v| v.max(T::zero()).powi(self.q - 1)).collect();
        let e = T::one() / (self.p - T::one());
        self.m.apply_adjoint(&g).iter().map(|v| v.max(T::zero()).powf(e)).collect()
    }
}

/// Euler–Lagrange fixed-point search with default re-centering.
pub fn search_extremizer<T: Scalar>(
    params: &Params,
    init: &RadialProfile<T>,
    max_iter: usize,
    tol: f64,
) -> Result<SearchTrace<T>> {
    search_extremizer_with(params, init, &SearchOptions { max_iter, tol, ..Default::default() })
}

pub fn search_extremizer_with<T: Scalar>(
    params: &Params,
    init: &RadialProfile<T>,
    opts: &SearchOptions,
) -> Result<SearchTrace<T>> {
    if init.values().iter().any(|v| *v < T::zero() || !v.is_finite()) {
        return Err(Error::Domain("search needs a nonnegative initial profile".into()));
    }
    if init.is_zero() {
        return Err(Error::Domain("search needs a nonzero initial profile".into()));
    }
    let grid = init.grid().clone();
    let m = TransformMatrix::assemble_hat(params, &grid);
    let ctx = Discrete {
        m: &m,
        dw: grid.weights(params.domain_weight()),
        tw: grid.weights(params.target_weight()),
        p: params.p::<T>(),
        q: params.q_int() as i32,
    };
    let mut f = init.values().to_vec();
    ctx.normalize(&mut f)?;
    let mut phi = ctx.ratio(&f);
    let mut trace = SearchTrace {
        iterates: vec![phi],
        final_profile: init.clone(),
        converged: false,
        iterations_used: 0,
        damped_steps: Vec::new(),
        scales: Vec::new(),
    };
    let tol = T::lit(opts.tol);
    let slack = T::lit(ASCENT_TOLERANCE);
    let mut quiet = 0usize;
    for step in 1..=opts.max_iter {
        let mut next = ctx.step(&f);
        ctx.normalize(&mut next)?;
        let mut scale = T::one();
        if opts.recenter {
            let prof = RadialProfile::new(grid.clone(), next.clone())?;
            let (lambda, centred) = symmetry::normalize_dilation(params, &prof)?;
            scale = lambda;
            next = centred.into_values();
            ctx.normalize(&mut next)?;
        }
        let mut phi_next = ctx.ratio(&next);
        if phi_next < phi - slack {
            // geometric mean of the old and new iterate
            let mut damped: Vec<T> = f.iter().zip(&next).map(|(a, b)| (*a * *b).sqrt()).collect();
            ctx.normalize(&mut damped)?;
            let phi_damped = ctx.ratio(&damped);
            if phi_damped < phi - slack {
                return Err(Error::IterationAnomaly {
                    step,
                    before: phi.f64(),
                    after: phi_next.f64(),
                });
            }
            trace.damped_steps.push(step);
            next = damped;
            phi_next = phi_damped;
        }
        let rel = ((phi_next - phi) / phi_next).abs();
        f = next;
        phi = phi_next;
        trace.iterates.push(phi);
        trace.scales.push(scale);
        trace.iterations_used = step;
        quiet = if rel < tol { quiet + 1 } else { 0 };
        if quiet >= STAGNATION_WINDOW {
            trace.converged = true;
            break;
        }
    }
    trace.final_profile = RadialProfile::new(grid, f)?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalSet;

    fn grid(n: usize) -> Arc<RadialGrid<f64>> {
        Arc::new(RadialGrid::new(n, f64::INFINITY).unwrap())
    }

    #[test]
    fn extremizer_samples() {
        let params = Params::new(1, 3).unwrap();
        let g = Arc::new(RadialGrid::<f64>::new(16, 10.0).unwrap());
        let h = extremizer_profile(&params, 1.0, g.clone()).unwrap();
        for (r, v) in g.nodes().iter().zip(h.values()) {
            assert!((v - 1.0 / (1.0 + r * r)).abs() < 1e-15);
        }
        assert!(extremizer_profile(&params, 0.0, g).is_err());
    }

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert_eq!(sphere_area::<f64>(1).unwrap(), 2.0);
        assert!((sphere_area::<f64>(2).unwrap() - 2.0 * pi).abs() < 1e-15);
        assert!((sphere_area::<f64>(3).unwrap() - 4.0 * pi).abs() < 1e-14);
        assert!((sphere_area::<f64>(4).unwrap() - 2.0 * pi * pi).abs() < 1e-13);
        assert!((sphere_area::<f64>(5).unwrap() - 8.0 * pi * pi / 3.0).abs() < 1e-13);
        assert!(sphere_area::<f64>(0).is_err());
    }

    #[test]
    fn constant_a_oracles() {
        let a12 = constant_a::<f64>(&Params::new(1, 2).unwrap());
        assert!((a12 - 1.162_447_351_509_626_5).abs() < 1e-12);
        let a23 = constant_a::<f64>(&Params::new(2, 3).unwrap());
        assert!((a23 - 1.263_237_555_492_129_4).abs() < 1e-12);
    }

    #[test]
    fn ratio_is_homogeneous_and_rejects_zero() {
        let params = Params::new(1, 3).unwrap();
        let f = RadialProfile::from_fn(grid(512), |r| (-r).exp()).unwrap();
        let a = functional_ratio(&params, &f).unwrap();
        let b = functional_ratio(&params, &f.scaled(7.5)).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
        assert!(functional_ratio(&params, &RadialProfile::zeros(grid(64))).is_err());
    }

    #[test]
    fn b24_matches_beta_closed_form() {
        let params = Params::new(2, 4).unwrap();
        let est = constant_b::<f64>(&params, 2048).unwrap();
        let exact = (1f64 / 3.0).powf(0.2) / (2f64 / 3.0).powf(0.6);
        assert!((est.value / exact - 1.0).abs() < 1e-10, "{}", est.value);
        assert!(est.error < 1e-10);
    }

    #[test]
    fn extremizer_is_a_fixed_point() {
        let params = Params::new(1, 3).unwrap();
        let h = extremizer_profile(&params, 1.0, grid(2048)).unwrap();
        let t = search_extremizer(&params, &h, 1, 1e-8).unwrap();
        assert!((t.iterates[1] - t.iterates[0]).abs() < 1e-6);
    }

    #[test]
    fn sign_change_is_rejected() {
        let params = Params::new(1, 3).unwrap();
        let f = RadialProfile::from_fn(grid(64), |r| 1.0 - r).unwrap();
        assert!(matches!(search_extremizer(&params, &f, 10, 1e-8), Err(Error::Domain(_))));
    }

    #[test]
    fn search_from_indicator_climbs() {
        let params = Params::new(1, 3).unwrap();
        let f = RadialProfile::indicator(grid(512), &IntervalSet::single(0.0, 1.0).unwrap());
        let t = search_extremizer(&params, &f, 60, 1e-10).unwrap();
        assert!(t.iterates[1] > t.iterates[0]);
        for w in t.iterates.windows(2) {
            assert!(w[1] >= w[0] - ASCENT_TOLERANCE);
        }
    }
}
