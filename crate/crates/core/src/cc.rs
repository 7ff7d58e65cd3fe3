//! Concentration-compactness diagnostics for finite sequences of profiles.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::interp;
use crate::interval::IntervalSet;
use crate::params::Params;
use crate::profile::RadialProfile;
use crate::scalar::Scalar;
use crate::transform::apply_t;

/// Cells carrying less than this fraction of the mass are numerically empty.
pub const NEGLIGIBLE_MASS: f64 = 1e-9;
/// Allowed deviation of `‖f‖_p^p` from 1 for classifier inputs.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Cumulative `μ`-mass of `|f|^p`, linear in `θ` inside each cell.
struct MassCdf<T> {
    grid: Arc<RadialGrid<T>>,
    masses: Vec<T>,
    before: Vec<T>,
    total: T,
}

impl<T: Scalar> MassCdf<T> {
    fn new(params: &Params, f: &RadialProfile<T>) -> Self {
        let masses = f.cell_masses(params);
        let mut before = Vec::with_capacity(masses.len());
        let mut acc = T::zero();
        for m in &masses {
            before.push(acc);
            acc = acc + *m;
        }
        Self { grid: f.grid().clone(), masses, before, total: acc }
    }

    /// `∫_0^x |f|^p r^{d-1} dr`.
    fn below(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        match self.grid.cell_of(x) {
            None => self.total,
            Some(i) => self.before[i] + self.masses[i] * self.grid.cell_fraction(i, T::zero(), x),
        }
    }
}

/// `sup_{y ≥ 0} ∫_y^{y+R} |f|^p r^{d-1} dr`: the heaviest window of length `R`.
pub fn concentration_function<T: Scalar>(params: &Params, f: &RadialProfile<T>, radius: T) -> Result<T> {
    if !(radius > T::zero()) {
        return Err(Error::Parameter(format!("window length must be positive, got {radius}")));
    }
    let cdf = MassCdf::new(params, f);
    Ok(window_max(&cdf, radius))
}

fn window_max<T: Scalar>(cdf: &MassCdf<T>, radius: T) -> T {
    let grid = &cdf.grid;
    let mut best = cdf.below(radius);
    for i in 0..grid.len() {
        let (lo, hi) = grid.cell_bounds(i);
        for y in [lo, hi - radius, lo - radius] {
            if y >= T::zero() && y.is_finite() {
                best = best.max(cdf.below(y + radius) - cdf.below(y));
            }
        }
    }
    best.min(cdf.total)
}

/// Two sides of the largest gap in the essential support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Split<T> {
    pub inner: IntervalSet<T>,
    pub outer: IntervalSet<T>,
    pub inner_mass: T,
    pub outer_mass: T,
    /// Length of the empty gap between the sides.
    pub gap: T,
}

/// Largest gap `(a, b)` in the essential support with at least `floor` of
/// the mass on each side, or `None`.
pub fn dichotomy_split<T: Scalar>(params: &Params, f: &RadialProfile<T>, floor: T) -> Option<Split<T>> {
    let cdf = MassCdf::new(params, f);
    if !(cdf.total > T::zero()) {
        return None;
    }
    let grid = f.grid();
    let cutoff = cdf.total * T::lit(NEGLIGIBLE_MASS);
    let live: Vec<usize> = (0..grid.len()).filter(|i| cdf.masses[*i] > cutoff).collect();
    let finite_hi = |i: usize| {
        let hi = grid.cell_bounds(i).1;
        if hi.is_finite() { hi } else { grid.nodes()[i] }
    };
    let first = grid.cell_bounds(*live.first()?).0;
    let last = finite_hi(*live.last()?);
    let mut best: Option<Split<T>> = None;
    for pair in live.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        if j == i + 1 {
            continue;
        }
        let (a, b) = (finite_hi(i), grid.cell_bounds(j).0);
        let inner_mass = (cdf.before[i] + cdf.masses[i]) / cdf.total;
        let outer_mass = (cdf.total - cdf.before[j]) / cdf.total;
        if inner_mass < floor || outer_mass < floor {
            continue;
        }
        if best.as_ref().is_some_and(|s| s.gap >= b - a) {
            continue;
        }
        best = Some(Split {
            inner: IntervalSet::single(first, a).ok()?,
            outer: IntervalSet::single(b, last.max(b + (b - a) * T::epsilon())).ok()?,
            inner_mass,
            outer_mass,
            gap: b - a,
        });
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Tight,
    Vanishing,
    Dichotomy,
    Undetermined,
}

/// Classifier thresholds.
#[derive(Debug, Clone)]
pub struct TrichotomyOptions<T> {
    /// Tightness asks for a window holding `1 - eps` of the mass.
    pub eps: T,
    /// Smallest gap accepted as a dichotomy.
    pub separation_min: T,
    /// Smallest mass fraction on either side of a dichotomy.
    pub floor: T,
    /// Window lengths at which the concentration function is sampled.
    pub radii: Vec<T>,
}

impl<T: Scalar> TrichotomyOptions<T> {
    pub fn new(eps: T) -> Self {
        Self {
            eps,
            separation_min: T::lit(8.0),
            floor: T::lit(0.05),
            radii: (-2..=6).map(|j| T::lit(2f64.powi(j))).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrichotomyReport<T> {
    pub verdict: Verdict,
    pub radii: Vec<T>,
    /// `evidence[i][j] = Q_i(radii[j])`.
    pub evidence: Vec<Vec<T>>,
    /// Whether `Q_n(R)` is nonincreasing in `n`, per radius; absent for a
    /// single profile.
    pub trend: Option<Vec<bool>>,
    pub split: Option<Split<T>>,
    pub alpha_estimate: Option<T>,
}

/// Classifies a finite sequence of `L^p`-normalized profiles as tight,
/// vanishing or dichotomous. The split is read off the last profile; tightness
/// needs one window length that captures `1 - eps` of every profile; vanishing
/// needs `Q_n(R)` to fall along the sequence at every sampled `R`.
pub fn classify_trichotomy<T: Scalar>(
    params: &Params,
    seq: &[RadialProfile<T>],
    opts: &TrichotomyOptions<T>,
) -> Result<TrichotomyReport<T>> {
    let last = seq.last().ok_or_else(|| Error::Parameter("empty profile sequence".into()))?;
    for (i, f) in seq.iter().enumerate() {
        let mass = f.lp_mass(params);
        if (mass - T::one()).abs() > T::lit(NORMALIZATION_TOLERANCE) {
            return Err(Error::Domain(format!("profile {i} has ‖f‖_p^p = {mass}, expected 1")));
        }
    }
    let evidence: Vec<Vec<T>> = seq
        .iter()
        .map(|f| {
            let cdf = MassCdf::new(params, f);
            opts.radii.iter().map(|r| window_max(&cdf, *r)).collect()
        })
        .collect();
    let trend = (seq.len() > 1).then(|| {
        (0..opts.radii.len())
            .map(|j| {
                evidence.windows(2).all(|w| w[1][j] <= w[0][j] + T::lit(NORMALIZATION_TOLERANCE))
                    && evidence[evidence.len() - 1][j] < evidence[0][j]
            })
            .collect::<Vec<_>>()
    });
    let split = dichotomy_split(params, last, opts.floor).filter(|s| s.gap >= opts.separation_min);
    let target = T::one() - opts.eps;
    let tight = (0..opts.radii.len()).any(|j| evidence.iter().all(|q| q[j] >= target));
    let verdict = if split.is_some() {
        Verdict::Dichotomy
    } else if tight {
        Verdict::Tight
    } else if trend.as_ref().is_some_and(|t| t.iter().all(|x| *x)) {
        Verdict::Vanishing
    } else {
        Verdict::Undetermined
    };
    Ok(TrichotomyReport {
        verdict,
        radii: opts.radii.clone(),
        evidence,
        trend,
        alpha_estimate: split.as_ref().map(|s| s.inner_mass),
        split,
    })
}

/// `⟨(T f₁)^{q-m}, (T f₂)^m⟩` in `L²(r^{d-k-1} dr)`.
pub fn interaction_term<T: Scalar>(
    params: &Params,
    f1: &RadialProfile<T>,
    f2: &RadialProfile<T>,
    m: u32,
) -> Result<T> {
    let q = params.q_int();
    if m < 1 || m >= q {
        return Err(Error::Parameter(format!("interaction order must lie in [1, {}], got {m}", q - 1)));
    }
    if !Arc::ptr_eq(f1.grid(), f2.grid()) && f1.grid().nodes() != f2.grid().nodes() {
        return Err(Error::Parameter("profiles live on different grids".into()));
    }
    if f1.values().iter().chain(f2.values()).any(|v| *v < T::zero()) {
        return Err(Error::Domain("interaction needs nonnegative profiles".into()));
    }
    Ok(power_pairing(params, &apply_t(params, f1), &apply_t(params, f2), q - m, m))
}

/// [`interaction_term`] from precomputed transforms `T f₁`, `T f₂`.
pub fn interaction_term_from<T: Scalar>(
    params: &Params,
    t1: &RadialProfile<T>,
    t2: &RadialProfile<T>,
    m: u32,
) -> Result<T> {
    let q = params.q_int();
    if m < 1 || m >= q {
        return Err(Error::Parameter(format!("interaction order must lie in [1, {}], got {m}", q - 1)));
    }
    Ok(power_pairing(params, t1, t2, q - m, m))
}

/// `⟨g₁^{a}, g₂^{b}⟩` in `L²(r^{d-k-1} dr)`.
pub fn power_pairing<T: Scalar>(
    params: &Params,
    g1: &RadialProfile<T>,
    g2: &RadialProfile<T>,
    a: u32,
    b: u32,
) -> T {
    let prod: Vec<T> = g1
        .values()
        .iter()
        .zip(g2.values())
        .map(|(x, y)| x.abs().powi(a as i32) * y.abs().powi(b as i32))
        .collect();
    g1.grid().integrate(&prod, params.target_weight())
}

/// `(⟨1_{[0,R]}, (Tψ)^m⟩, R^{d-k}(R+δ)^{-m/p'}‖ψ‖_p^m)` for `ψ` supported in `[R+δ, ∞)`.
pub fn interaction_bound_check<T: Scalar>(
    params: &Params,
    radius: T,
    delta: T,
    psi: &RadialProfile<T>,
    m: u32,
) -> Result<(T, T)> {
    let q = params.q_int();
    if m < 1 || m >= q {
        return Err(Error::Parameter(format!("interaction order must lie in [1, {}], got {m}", q - 1)));
    }
    if !(radius >= T::one()) || !(delta >= radius) {
        return Err(Error::Precondition(format!("need R >= 1 and δ >= R, got R = {radius}, δ = {delta}")));
    }
    let edge = radius + delta;
    let grid = psi.grid();
    if (0..grid.len()).any(|i| grid.cell_bounds(i).1 <= edge && psi.values()[i] != T::zero()) {
        return Err(Error::Precondition(format!("ψ is not supported in [{edge}, ∞)")));
    }
    interaction_bound_from(params, radius, delta, psi, &apply_t(params, psi), m)
}

/// [`interaction_bound_check`] with `Tψ` precomputed.
pub fn interaction_bound_from<T: Scalar>(
    params: &Params,
    radius: T,
    delta: T,
    psi: &RadialProfile<T>,
    t_psi: &RadialProfile<T>,
    m: u32,
) -> Result<(T, T)> {
    let q = params.q_int();
    if m < 1 || m >= q {
        return Err(Error::Parameter(format!("interaction order must lie in [1, {}], got {m}", q - 1)));
    }
    if !(radius >= T::one()) || !(delta >= radius) {
        return Err(Error::Precondition(format!("need R >= 1 and δ >= R, got R = {radius}, δ = {delta}")));
    }
    let edge = radius + delta;
    let grid = psi.grid();
    if (0..grid.len()).any(|i| grid.cell_bounds(i).1 <= edge && psi.values()[i] != T::zero()) {
        return Err(Error::Precondition(format!("ψ is not supported in [{edge}, ∞)")));
    }
    let vals = t_psi.values();
    let lhs = grid.integrate_fn(
        |r| interp::eval(grid, vals, r, T::zero()).max(T::zero()).powi(m as i32),
        T::zero(),
        radius,
        params.target_weight(),
        &[],
    );
    let k = params.k as i32;
    let d = params.d as i32;
    let mm = T::lit(f64::from(m));
    let rhs = radius.powi(d - k) * edge.powf(-mm / params.p_conj::<T>()) * psi.domain_norm(params).powf(mm);
    Ok((lhs, rhs))
}

/// Synthetic sequences whose concentration behaviour is known by construction.
pub mod synthetic {
    use super::*;
    use crate::extremal::extremizer_profile;

    /// `sin²` bump on `[a, b]`, scaled so that `‖f‖_p^p = mass` on the grid.
    pub fn bump<T: Scalar>(
        params: &Params,
        grid: Arc<RadialGrid<T>>,
        a: T,
        b: T,
        mass: T,
    ) -> Result<RadialProfile<T>> {
        let shape = RadialProfile::from_fn(grid, |r| {
            if r > a && r < b {
                (T::PI() * (r - a) / (b - a)).sin().powi(2)
            } else {
                T::zero()
            }
        })?;
        rescale_mass(params, &shape, mass)
    }

    pub fn rescale_mass<T: Scalar>(params: &Params, f: &RadialProfile<T>, mass: T) -> Result<RadialProfile<T>> {
        let current = f.lp_mass(params);
        if !(current > T::zero()) {
            return Err(Error::Domain("cannot rescale a profile with zero mass".into()));
        }
        Ok(f.scaled((mass / current).powf(T::one() / params.p::<T>())))
    }

    fn sum<T: Scalar>(f: &RadialProfile<T>, g: &RadialProfile<T>) -> Result<RadialProfile<T>> {
        f.with_values(f.values().iter().zip(g.values()).map(|(a, b)| *a + *b).collect())
    }

    /// The same unit bump on `[1, 2]`, repeated.
    pub fn tight<T: Scalar>(params: &Params, grid: Arc<RadialGrid<T>>, len: usize) -> Result<Vec<RadialProfile<T>>> {
        let f = bump(params, grid, T::one(), T::lit(2.0), T::one())?;
        Ok(vec![f; len])
    }

    /// Extremizer dilates `h_λ` with `λ_n = 2^{-n}`, each renormalized on the grid.
    pub fn vanishing<T: Scalar>(
        params: &Params,
        grid: Arc<RadialGrid<T>>,
        len: usize,
    ) -> Result<Vec<RadialProfile<T>>> {
        (0..len)
            .map(|n| {
                let f = extremizer_profile(params, T::lit(2f64.powi(-(n as i32))), grid.clone())?;
                rescale_mass(params, &f, T::one())
            })
            .collect()
    }

    /// Bump of mass `α` on `[1, 2]` plus a bump of mass `1 - α` on `[s_n, 2 s_n]`,
    /// `s_n = 4·2^n`.
    pub fn dichotomy<T: Scalar>(
        params: &Params,
        grid: Arc<RadialGrid<T>>,
        alpha: T,
        len: usize,
    ) -> Result<Vec<RadialProfile<T>>> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::Parameter(format!("mass fraction must lie in (0, 1), got {alpha}")));
        }
        let inner = bump(params, grid.clone(), T::one(), T::lit(2.0), alpha)?;
        (0..len)
            .map(|n| {
                let s = T::lit(4.0 * 2f64.powi(n as i32));
                let outer = bump(params, grid.clone(), s, s * T::lit(2.0), T::one() - alpha)?;
                sum(&inner, &outer)
            })
            .collect()
    }
}
