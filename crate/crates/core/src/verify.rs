//! Numerical checks of the quantitative estimates around the inequality.
//!
//! Every check returns a [`BoundReport`]; randomized sweeps are seeded with
//! ChaCha and record the seed. Checks run in `f64`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{constant_b, extremizer_profile};
use crate::gauss::GaussLegendre;
use crate::grid::RadialGrid;
use crate::interval::IntervalSet;
use crate::params::Params;
use crate::profile::RadialProfile;
use crate::symmetry::truncate;
use crate::transform::{apply_t, indicator_transform_at, indicator_transform_by_quadrature, TransformMatrix};
use crate::truncated::{discretize_t_r, equicontinuity_modulus, singular_value_profile};

/// Relative tolerance of the explicit-constant indicator bounds.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Absolute tolerance of the slide comparison.
pub const SLIDE_TOLERANCE: f64 = 1e-10;
/// Allowed growth of `Φ` above `B` in the truncation pipeline.
pub const OPERATOR_TOLERANCE: f64 = 1e-4;
/// Homogeneity tolerance for `‖T(cf)‖_q^q = c^q ‖Tf‖_q^q`.
pub const HOMOGENEITY_TOLERANCE: f64 = 1e-10;
/// Allowed spread `max/min` of an implied-constant ratio over a sweep.
pub const BAND_FACTOR: f64 = 4.0;

/// Largest `‖T1_F‖_q / R^{-1/q}` seen on the `k = 1` reference sweeps
/// (`F = (R, R+δ)`, `δ` fixing `μ(F) = 1`, `R ∈ {1, 4, 16, 64}`), plus 10%.
/// Indexed by `d - 2`.
pub const K1_RATIO_CEILING: [f64; 4] = [1.444, 1.034, 0.921, 0.849];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub passed: bool,
    pub inputs: String,
    pub seed: Option<u64>,
    /// Named intermediate values (sweep ratios, trends, cross-checks).
    pub details: Vec<(String, f64)>,
}

impl BoundReport {
    fn new(name: &str, lhs: f64, rhs: f64, passed: bool, inputs: String) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin: rhs - lhs,
            passed,
            inputs,
            seed: None,
            details: Vec::new(),
        }
    }

    fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.push((key.into(), value));
        self
    }
}

/// `∫_a^b g` on Gauss–Legendre panels graded geometrically towards both ends.
fn integrate_graded<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let gl = GaussLegendre::<f64>::new(16);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (lo, hi, towards_lo) in [(a, mid, true), (mid, b, false)] {
        let mut width = half;
        let mut far = if towards_lo { hi } else { lo };
        for _ in 0..40 {
            width *= 0.5;
            let near = if towards_lo { far - width } else { far + width };
            let (x0, x1) = if towards_lo { (near, far) } else { (far, near) };
            acc += gl.integrate(x0, x1, g);
            far = near;
            if width < half * 1e-15 {
                break;
            }
        }
        let (x0, x1) = if towards_lo { (lo, far) } else { (far, hi) };
        acc += gl.integrate(x0, x1, g);
    }
    acc
}

fn indicator_norm_with<F: Fn(f64) -> f64>(params: &Params, set: &IntervalSet<f64>, t: F) -> f64 {
    let q = params.q_int() as i32;
    let a = params.target_weight();
    let mut cuts = vec![0.0];
    cuts.extend(set.endpoints());
    cuts.dedup();
    let integrand = |r: f64| t(r).max(0.0).powi(q) * r.powi(a);
    let total: f64 = cuts.windows(2).map(|w| integrate_graded(&integrand, w[0], w[1])).sum();
    total.powf(1.0 / f64::from(params.q_int()))
}

/// `‖T1_F‖_{L^q(r^{d-k-1} dr)}` from the closed-form indicator transform.
pub fn indicator_target_norm(params: &Params, set: &IntervalSet<f64>) -> f64 {
    indicator_norm_with(params, set, |r| indicator_transform_at(params, set, r))
}

/// The same norm with the transform itself computed by quadrature.
pub fn indicator_target_norm_by_quadrature(params: &Params, set: &IntervalSet<f64>) -> f64 {
    indicator_norm_with(params, set, |r| indicator_transform_by_quadrature(params, set, r))
}

fn describe(set: &IntervalSet<f64>) -> String {
    let parts: Vec<String> = set.intervals().iter().map(|(a, b)| format!("({a},{b})")).collect();
    if parts.is_empty() { "∅".into() } else { parts.join("∪") }
}

fn require_avoids(set: &IntervalSet<f64>, radius: f64) -> Result<()> {
    if !set.avoids_ball(radius) {
        return Err(Error::Precondition(format!("F = {} meets [0, {radius}]", describe(set))));
    }
    Ok(())
}

/// `‖T1_F‖_q ≤ 2 |F| R^{-d/p}` with `|F|` the Lebesgue measure, for `k ≥ 2`.
pub fn check_concentration_k2(params: &Params, set: &IntervalSet<f64>, radius: f64) -> Result<BoundReport> {
    if params.k < 2 {
        return Err(Error::Parameter(format!("this bound needs k >= 2, got k = {}", params.k)));
    }
    require_avoids(set, radius)?;
    let delta = set.lebesgue_measure();
    let lhs = indicator_target_norm(params, set);
    let rhs = 2.0 * delta * radius.powf(-params.scale_exp::<f64>());
    let passed = lhs <= rhs * (1.0 + QUADRATURE_TOLERANCE);
    Ok(BoundReport::new(
        "concentration-k2",
        lhs,
        rhs,
        passed,
        format!("k={} d={} R={radius} F={} |F|={delta}", params.k, params.d, describe(set)),
    ))
}

/// `‖T1_F‖_q ≤ 2 μ(F) R^{-d/p'}` with `μ(F) = ∫_F r^{d-1} dr`, valid for all
/// `1 ≤ k ≤ d-1`: from `(u²-r²)^{k/2-1} ≤ u^{k-2}` (k ≥ 2) one gets
/// `T1_F(r) ≤ max(r, R)^{k-d} μ(F)`, whose `L^q` norm is at most
/// `((d+1)/(d(d-k)))^{1/q} μ(F) R^{-d/p'}` and `((d+1)/(d(d-k)))^{1/q} < 2`.
pub fn check_concentration_k2_weighted(
    params: &Params,
    set: &IntervalSet<f64>,
    radius: f64,
) -> Result<BoundReport> {
    if params.k < 2 {
        return Err(Error::Parameter(format!("this bound needs k >= 2, got k = {}", params.k)));
    }
    require_avoids(set, radius)?;
    let mu = set.weighted_measure(params.d);
    let lhs = indicator_target_norm(params, set);
    let cross = indicator_target_norm_by_quadrature(params, set);
    let p_conj = params.p_conj::<f64>();
    let rhs = 2.0 * mu * radius.powf(-f64::from(params.d) / p_conj);
    let agree = (lhs - cross).abs() <= QUADRATURE_TOLERANCE * lhs.max(f64::MIN_POSITIVE);
    let passed = agree && lhs <= rhs * (1.0 + QUADRATURE_TOLERANCE);
    Ok(BoundReport::new(
        "concentration-k2-weighted",
        lhs,
        rhs,
        passed,
        format!("k={} d={} R={radius} F={} mu(F)={mu}", params.k, params.d, describe(set)),
    )
    .detail("quadrature_lhs", cross))
}

/// Random union of at most five intervals of total length `δ ∈ [0.1, 2]`
/// starting beyond `R ∈ [1, 100]`.
pub fn random_far_set(rng: &mut ChaCha8Rng) -> (IntervalSet<f64>, f64) {
    let radius = rng.gen_range(1.0..=100.0);
    let delta = rng.gen_range(0.1..=2.0);
    let count = rng.gen_range(1..=5usize);
    let shares: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = shares.iter().sum();
    let mut x = radius;
    let mut parts = Vec::with_capacity(count);
    for s in shares {
        x += rng.gen_range(1e-3..=radius);
        let len = delta * s / total;
        parts.push((x, x + len));
        x += len;
    }
    (IntervalSet::new(parts).expect("constructed sorted and disjoint"), radius)
}

/// Runs one of the `k ≥ 2` indicator bounds on `trials` random sets.
pub fn sweep_concentration_k2(
    params: &Params,
    trials: usize,
    seed: u64,
    weighted: bool,
) -> Result<Vec<BoundReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let (set, radius) = random_far_set(&mut rng);
            let report = if weighted {
                check_concentration_k2_weighted(params, &set, radius)?
            } else {
                check_concentration_k2(params, &set, radius)?
            };
            Ok(report.with_seed(seed))
        })
        .collect()
}

/// `‖T1_F‖_q / R^{-1/q}` for `k = 1`, checked against the recorded ceiling.
pub fn check_concentration_k1(params: &Params, set: &IntervalSet<f64>, radius: f64) -> Result<BoundReport> {
    if params.k != 1 {
        return Err(Error::Parameter(format!("this estimate is for k = 1, got k = {}", params.k)));
    }
    if radius < 1.0 {
        return Err(Error::Precondition(format!("need R >= 1, got {radius}")));
    }
    require_avoids(set, radius)?;
    let mu = set.weighted_measure(params.d);
    if !(0.5..=2.0).contains(&mu) {
        return Err(Error::Precondition(format!("need μ(F) in [1/2, 2], got {mu}")));
    }
    let lhs = indicator_target_norm(params, set);
    let shape = radius.powf(-1.0 / f64::from(params.q_int()));
    let ratio = lhs / shape;
    let ceiling = K1_RATIO_CEILING.get(params.d as usize - 2).copied().unwrap_or(f64::INFINITY);
    Ok(BoundReport::new(
        "concentration-k1",
        ratio,
        ceiling,
        ratio <= ceiling,
        format!("d={} R={radius} F={} mu(F)={mu}", params.d, describe(set)),
    )
    .detail("norm", lhs)
    .detail("shape", shape))
}

/// `F = (ρ, ρ+δ)` with `μ(F) = 1`.
pub fn unit_shell(d: u32, rho: f64) -> IntervalSet<f64> {
    let df = f64::from(d);
    let outer = (rho.powi(d as i32) + df).powf(1.0 / df);
    IntervalSet::single(rho, outer).expect("outer > rho")
}

/// The ratios of [`check_concentration_k1`] on `F = (R, R+δ)`, `μ(F) = 1`.
pub fn sweep_concentration_k1(params: &Params, radii: &[f64]) -> Result<Vec<BoundReport>> {
    radii
        .iter()
        .map(|r| check_concentration_k1(params, &unit_shell(params.d, *r), *r))
        .collect()
}

/// Slides every interval of `F` towards the origin so that they abut at
/// `inf F`, keeping the `v = u²` measure `Σ (b² - a²)`.
pub fn slide_compaction(set: &IntervalSet<f64>) -> Result<IntervalSet<f64>> {
    let start = set.inf().ok_or_else(|| Error::Precondition("cannot compact an empty set".into()))?;
    let area: f64 = set.intervals().iter().map(|(a, b)| (b - a) * (b + a)).sum();
    IntervalSet::single(start, (start * start + area).sqrt())
}

/// `T1_{(a,b)}(r)` for `k = 1` as `(b² - a²)/(√(b²-r²) + √(a²-r²))`, `r ≤ a`.
fn shell_k1(a: f64, b: f64, r: f64) -> f64 {
    let sb = ((b - r) * (b + r)).max(0.0).sqrt();
    let sa = ((a - r) * (a + r)).max(0.0).sqrt();
    (b - a) * (b + a) / (sb + sa)
}

/// `T1_{I_Δ} ≥ T1_I` on `[0, E]` for `I = (a, b)` and `I_Δ = (a-Δ, b-Δ')`
/// with the same `v`-measure, `(b-Δ')² - (a-Δ)² = b² - a²`.
pub fn check_slide_monotonicity(params: &Params, e_sup: f64, a: f64, b: f64, shift: f64) -> Result<BoundReport> {
    if params.k != 1 {
        return Err(Error::Parameter(format!("the slide comparison is for k = 1, got k = {}", params.k)));
    }
    if !(a < b) || !(shift >= 0.0) || !(e_sup >= 0.0) || !(a - shift >= e_sup) {
        return Err(Error::Precondition(format!(
            "need a < b, Δ >= 0 and a - Δ >= E >= 0, got a={a} b={b} Δ={shift} E={e_sup}"
        )));
    }
    let a2 = a - shift;
    let b2 = (a2 * a2 + (b - a) * (b + a)).sqrt();
    let samples = 1001;
    let worst = (0..samples)
        .map(|i| {
            let r = e_sup * i as f64 / (samples - 1) as f64;
            shell_k1(a, b, r) - shell_k1(a2, b2, r)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundReport::new(
        "slide",
        worst,
        0.0,
        worst <= SLIDE_TOLERANCE,
        format!("E={e_sup} I=({a},{b}) I_Δ=({a2},{b2}) Δ={shift} Δ'={}", b - b2),
    ))
}

/// Random slide instances compared on all of `[0, a - Δ]`.
pub fn sweep_slide(params: &Params, trials: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let a = rng.gen_range(0.5..50.0);
            let b = a + rng.gen_range(0.01..10.0);
            let shift = rng.gen_range(0.0..a);
            let e_sup = a - shift;
            Ok(check_slide_monotonicity(params, e_sup, a, b, shift)?.with_seed(seed))
        })
        .collect()
}

/// `α^{k+1} + (1-α)^{k+1} < 1` in exact rational arithmetic.
pub fn strict_superadditivity(k: u32, alpha: &BigRational) -> bool {
    let one = BigRational::one();
    let e = (k + 1) as i32;
    let sum = num_traits::pow::Pow::pow(alpha, e) + num_traits::pow::Pow::pow(&(one.clone() - alpha), e);
    sum < one
}

/// Exact strictness of `S_1 > S_α + S_{1-α}` on `alphas`, plus the
/// homogeneity `‖T(cf)‖_q^q = c^q ‖Tf‖_q^q` on the extremizer.
pub fn check_superadditivity(params: &Params, alphas: &[BigRational]) -> Result<BoundReport> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if let Some(bad) = alphas.iter().find(|a| **a <= zero || **a >= one) {
        return Err(Error::Parameter(format!("mass fractions must lie in (0, 1), got {bad}")));
    }
    let failures = alphas.iter().filter(|a| !strict_superadditivity(params.k, a)).count();
    let e = (params.k + 1) as i32;
    let worst = alphas
        .iter()
        .map(|a| {
            let s = num_traits::pow::Pow::pow(a, e) + num_traits::pow::Pow::pow(&(one.clone() - a), e);
            num_traits::ToPrimitive::to_f64(&s).unwrap_or(f64::NAN)
        })
        .fold(0.0, f64::max);
    let grid = Arc::new(RadialGrid::new(512, f64::INFINITY)?);
    let h = extremizer_profile(params, 1.0, grid)?;
    let c = 1.7;
    let q = params.q_int() as i32;
    let base = apply_t(params, &h).target_norm(params).powi(q);
    let scaled = apply_t(params, &h.scaled(c)).target_norm(params).powi(q);
    let homogeneity = (scaled / (c.powi(q) * base) - 1.0).abs();
    Ok(BoundReport::new(
        "superadditivity",
        worst,
        1.0,
        failures == 0 && homogeneity <= HOMOGENEITY_TOLERANCE,
        format!("k={} {} mass fractions", params.k, alphas.len()),
    )
    .detail("failures", failures as f64)
    .detail("homogeneity_error", homogeneity))
}

/// `j/(n+1)` for `j = 1..=n`.
pub fn rational_grid(n: u32) -> Vec<BigRational> {
    (1..=n)
        .map(|j| BigRational::new(BigInt::from(j), BigInt::from(n + 1)))
        .collect()
}

/// Singular-value decay of `T_R` along `n_list` and the equicontinuity
/// modulus at `h ∈ {1e-1, 1e-2, 1e-3}`; both must decrease.
pub fn check_compactness(params: &Params, radius: f64, n_list: &[usize]) -> Result<BoundReport> {
    if n_list.is_empty() || n_list.iter().any(|n| *n < 64) || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("need an increasing list of sizes, each >= 64".into()));
    }
    let mut report = BoundReport::new("compactness", 0.0, 1.0, true, format!("k={} d={} R={radius}", params.k, params.d));
    let mut ratios = Vec::with_capacity(n_list.len());
    for n in n_list {
        let sv = singular_value_profile(&discretize_t_r(params, radius, *n)?)?;
        let ratio = sv[n / 4 - 1] / sv[0];
        report = report.detail(format!("sigma_ratio_n{n}"), ratio);
        ratios.push(ratio);
    }
    let mut moduli = Vec::new();
    for h in [1e-1, 1e-2, 1e-3] {
        let m = equicontinuity_modulus(params, radius, h * radius, 257)?;
        report = report.detail(format!("modulus_h{h}"), m);
        moduli.push(m);
    }
    let sv_trend = ratios.windows(2).all(|w| w[1] < w[0]);
    let mod_trend = moduli.windows(2).all(|w| w[1] < w[0]);
    report.lhs = ratios.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    report.margin = report.rhs - report.lhs;
    report.passed = sv_trend && mod_trend;
    Ok(report)
}

/// Truncation mechanics on one profile: `‖Tf - Tg^m‖_q ≤ B ‖ε_m‖_p`,
/// `Tg^m` nondecreasing in `m`, and `‖ε_m‖_p` nonincreasing and falling.
/// Uses the nonnegative hat-basis matrix so that positivity is exact.
pub fn check_truncation_pipeline(params: &Params, f: &RadialProfile<f64>, m_list: &[f64]) -> Result<BoundReport> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[1] <= w[0]) || m_list[0] <= 0.0 {
        return Err(Error::Parameter("need an increasing list of positive levels".into()));
    }
    let grid = f.grid();
    let b = constant_b::<f64>(params, grid.len().max(1024))?.value;
    let mat = TransformMatrix::assemble_hat(params, grid);
    let tf = mat.apply_profile(f);
    let mut worst: f64 = 0.0;
    let mut eps_norms = Vec::with_capacity(m_list.len());
    let mut prev: Option<RadialProfile<f64>> = None;
    let mut monotone = true;
    for m in m_list {
        let (g, e) = truncate(f, *m);
        let tg = mat.apply_profile(&g);
        let diff = tf.with_values(tf.values().iter().zip(tg.values()).map(|(a, b)| a - b).collect())?;
        let en = e.domain_norm(params);
        eps_norms.push(en);
        if en > 0.0 {
            worst = worst.max(diff.target_norm(params) / (b * en));
        }
        if let Some(p) = &prev {
            monotone &= p.values().iter().zip(tg.values()).all(|(lo, hi)| *hi >= *lo - 1e-12 * lo.abs());
        }
        prev = Some(tg);
    }
    let falling = eps_norms.windows(2).all(|w| w[1] <= w[0]) && eps_norms.last() < eps_norms.first()
        || eps_norms.iter().all(|e| *e == 0.0);
    let mut report = BoundReport::new(
        "truncation",
        worst,
        1.0 + OPERATOR_TOLERANCE,
        worst <= 1.0 + OPERATOR_TOLERANCE && monotone && falling,
        format!("k={} d={} levels={m_list:?}", params.k, params.d),
    )
    .detail("monotone", f64::from(u8::from(monotone)));
    for (m, e) in m_list.iter().zip(&eps_norms) {
        report = report.detail(format!("eps_norm_m{m}"), *e);
    }
    Ok(report)
}

/// Random positive profile with polynomial decay faster than `r^{-(k+1)}`:
/// a sum of three dilated bumps `c (1 + (r/s)²)^{-e}`.
pub fn random_decaying_profile(
    params: &Params,
    grid: Arc<RadialGrid<f64>>,
    rng: &mut ChaCha8Rng,
) -> Result<RadialProfile<f64>> {
    let floor = f64::from(params.k + 1) / 2.0;
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(0.1..1.0), 10f64.powf(rng.gen_range(-1.0..1.0)), floor + rng.gen_range(0.05..2.0)))
        .collect();
    RadialProfile::from_fn(grid, move |r| {
        terms.iter().map(|(c, s, e)| c * (1.0 + (r / s).powi(2)).powf(-e)).sum()
    })
}

/// Interaction between `1_{[0,R]}` and an `L^p`-normalized bump on
/// `[R+δ, 2(R+δ)]` over a δ-sweep, for every order `m` in `orders`: the
/// interaction term must strictly decrease and `lhs / rhs_shape` must stay
/// within [`BAND_FACTOR`]. One report per order.
pub fn check_interaction(
    params: &Params,
    grid: Arc<RadialGrid<f64>>,
    radius: f64,
    deltas: &[f64],
    orders: &[u32],
) -> Result<Vec<BoundReport>> {
    use crate::cc::{interaction_bound_from, interaction_term_from, synthetic};
    let mat = TransformMatrix::assemble(params, &grid);
    let near = RadialProfile::indicator(grid.clone(), &IntervalSet::single(0.0, radius)?);
    let t_near = mat.apply_profile(&near);
    let psis = deltas
        .iter()
        .map(|delta| {
            let s = radius + delta;
            let psi = synthetic::bump(params, grid.clone(), s, 2.0 * s, 1.0)?;
            let t_psi = mat.apply_profile(&psi);
            Ok((psi, t_psi))
        })
        .collect::<Result<Vec<_>>>()?;
    orders
        .iter()
        .map(|m| {
            let mut report = BoundReport::new(
                "interaction",
                0.0,
                BAND_FACTOR,
                true,
                format!("k={} d={} R={radius} m={m} deltas={deltas:?}", params.k, params.d),
            );
            let mut terms = Vec::with_capacity(deltas.len());
            let mut ratios = Vec::with_capacity(deltas.len());
            for (delta, (psi, t_psi)) in deltas.iter().zip(&psis) {
                let term = interaction_term_from(params, &t_near, t_psi, *m)?;
                let (lhs, shape) = interaction_bound_from(params, radius, *delta, psi, t_psi, *m)?;
                report = report
                    .detail(format!("term_delta{delta}"), term)
                    .detail(format!("ratio_delta{delta}"), lhs / shape);
                terms.push(term);
                ratios.push(lhs / shape);
            }
            let decreasing = terms.windows(2).all(|w| w[1] < w[0]);
            let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            report.lhs = hi / lo;
            report.margin = report.rhs - report.lhs;
            report.passed = decreasing && hi / lo <= BAND_FACTOR && lo > 0.0;
            Ok(report)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, d: u32) -> Params {
        Params::new(k, d).unwrap()
    }

    #[test]
    fn k2_example_norm_matches_exact_antiderivative() {
        // ‖T1_(2,3)‖_4⁴ = 2·(5/2)⁴ + (1/16)∫₂³(9-r²)⁴ dr = 27428/315
        let p = params(2, 3);
        let set = IntervalSet::single(2.0, 3.0).unwrap();
        let exact = (27428.0f64 / 315.0).powf(0.25);
        let rep = check_concentration_k2(&p, &set, 2.0).unwrap();
        assert!((rep.lhs - exact).abs() < 1e-10 * exact);
        assert!((rep.rhs - 2.0 * 2f64.powf(-2.25)).abs() < 1e-14);
        let cross = indicator_target_norm_by_quadrature(&p, &set);
        assert!((cross - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn empty_set_is_trivial_for_k2_and_rejected_for_k1() {
        let empty = IntervalSet::new(Vec::new()).unwrap();
        let rep = check_concentration_k2(&params(2, 4), &empty, 3.0).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.passed);
        assert!(matches!(check_concentration_k1(&params(1, 3), &empty, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn bound_checks_reject_bad_inputs() {
        let set = IntervalSet::single(0.5, 3.0).unwrap();
        assert!(matches!(check_concentration_k2(&params(2, 3), &set, 1.0), Err(Error::Precondition(_))));
        assert!(matches!(check_concentration_k2(&params(1, 3), &set, 0.1), Err(Error::Parameter(_))));
        assert!(matches!(check_slide_monotonicity(&params(2, 3), 0.0, 1.0, 2.0, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(check_slide_monotonicity(&params(1, 3), 2.0, 1.0, 2.0, 0.5), Err(Error::Precondition(_))));
        let one = BigRational::one();
        assert!(matches!(check_superadditivity(&params(1, 2), &[one]), Err(Error::Parameter(_))));
    }

    #[test]
    fn weighted_k2_bound_holds_with_both_routes_agreeing() {
        for (k, d) in [(2, 3), (2, 4), (3, 5)] {
            for rep in sweep_concentration_k2(&params(k, d), 20, 11, true).unwrap() {
                assert!(rep.passed, "{}", rep.inputs);
            }
        }
    }

    #[test]
    fn slide_examples() {
        let p = params(1, 3);
        let same = check_slide_monotonicity(&p, 2.0, 5.0, 6.0, 0.0).unwrap();
        assert!(same.lhs.abs() < 1e-14);
        // at r = 0: T1_(5,6) = 1 and T1_(3,√20) = √20 - 3
        let moved = check_slide_monotonicity(&p, 0.0, 5.0, 6.0, 2.0).unwrap();
        assert!((moved.lhs - (1.0 - (20f64.sqrt() - 3.0))).abs() < 1e-12);
        assert!(moved.passed);
    }

    #[test]
    fn compaction_increases_the_norm() {
        let p = params(1, 3);
        let set = IntervalSet::new(vec![(2.0, 2.5), (3.0, 3.2), (5.0, 5.1)]).unwrap();
        let slid = slide_compaction(&set).unwrap();
        assert_eq!(slid.inf(), Some(2.0));
        assert!(indicator_target_norm(&p, &slid) > indicator_target_norm(&p, &set));
    }

    #[test]
    fn superadditivity_arithmetic() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert!(strict_superadditivity(1, &half));
        let a = BigRational::new(BigInt::from(3), BigInt::from(10));
        let s = num_traits::pow::Pow::pow(&a, 4i32) + num_traits::pow::Pow::pow(&(BigRational::one() - &a), 4i32);
        assert_eq!(s, BigRational::new(BigInt::from(2482), BigInt::from(10000)));
        assert!(strict_superadditivity(3, &a));
        let rep = check_superadditivity(&params(3, 4), &rational_grid(99)).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn k1_ratio_stays_under_ceiling() {
        for d in 2..=5 {
            for rep in sweep_concentration_k1(&params(1, d), &[1.0, 4.0, 16.0, 64.0]).unwrap() {
                assert!(rep.passed, "d={d} {}", rep.inputs);
            }
        }
    }
}
