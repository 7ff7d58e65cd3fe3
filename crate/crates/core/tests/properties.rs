//! Structural invariants of the transform and the profile operations, on
//! random smooth profiles.

use std::sync::{Arc, OnceLock};

use kplane::cc::{concentration_function, interaction_term};
use kplane::extremal::{extremizer_profile, functional_ratio_with};
use kplane::symmetry::{rearrange, truncate};
use kplane::transform::{apply_t, apply_t_adjoint, pairing, TransformMatrix};
use kplane::{Grid, Params, Profile};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

const N: usize = 256;

fn grid() -> Arc<Grid> {
    static G: OnceLock<Arc<Grid>> = OnceLock::new();
    G.get_or_init(|| Arc::new(Grid::new(N, f64::INFINITY).unwrap())).clone()
}

fn fine_grid() -> Arc<Grid> {
    static G: OnceLock<Arc<Grid>> = OnceLock::new();
    G.get_or_init(|| Arc::new(Grid::new(2048, f64::INFINITY).unwrap())).clone()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x6b70_6c61), failure_persistence: None, ..ProptestConfig::default() }
}

fn pair() -> impl Strategy<Value = Params> {
    (2u32..=5).prop_flat_map(|d| (1..d).prop_map(move |k| Params::new(k, d).unwrap()))
}

/// `Σ c_j (1 + (r/s_j)²)^{-e_j}` with `e_j ∈ [floor, floor + 2)`.
fn profile_on(grid: Arc<Grid>, floor: f64) -> impl Strategy<Value = Profile> {
    prop::collection::vec((0.05f64..1.0, 0.1f64..10.0, floor..floor + 2.0), 1..4).prop_map(move |terms| {
        Profile::from_fn(grid.clone(), move |r| terms.iter().map(|(c, s, e)| c * (1.0 + (r / s).powi(2)).powf(-e)).sum())
            .unwrap()
    })
}

/// Barely in `L^p`: decay just faster than `r^{-(k+1)}`.
fn profile(params: &Params) -> impl Strategy<Value = Profile> {
    profile_on(grid(), f64::from(params.k + 1) / 2.0 + 0.05)
}

/// Decay like `r^{-(d+2)}` or faster, so that every pairing converges and
/// the reduced samples are smooth at `θ = π/2`.
fn fast_profile(params: &Params, grid: Arc<Grid>) -> impl Strategy<Value = Profile> {
    profile_on(grid, f64::from(params.d) / 2.0 + 1.0)
}

fn with_profile() -> impl Strategy<Value = (Params, Profile)> {
    pair().prop_flat_map(|p| profile(&p).prop_map(move |f| (p, f)))
}

fn with_fast_profile() -> impl Strategy<Value = (Params, Profile)> {
    pair().prop_flat_map(|p| fast_profile(&p, grid()).prop_map(move |f| (p, f)))
}

fn with_two_profiles() -> impl Strategy<Value = (Params, Profile, Profile)> {
    pair().prop_flat_map(|p| (profile(&p), profile(&p)).prop_map(move |(f, g)| (p, f, g)))
}

fn combine(f: &Profile, g: &Profile, a: f64, b: f64) -> Profile {
    f.with_values(f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect()).unwrap()
}

fn sup_diff(f: &Profile, g: &Profile) -> f64 {
    f.values().iter().zip(g.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn transform_is_linear((p, f, g) in with_two_profiles(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let lhs = apply_t(&p, &combine(&f, &g, a, b));
        let rhs = combine(&apply_t(&p, &f), &apply_t(&p, &g), a, b);
        let scale = apply_t(&p, &f).sup_abs() + apply_t(&p, &g).sup_abs();
        prop_assert!(sup_diff(&lhs, &rhs) <= 1e-12 * scale * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn transform_preserves_positivity((p, f) in with_profile()) {
        prop_assert!(apply_t(&p, &f).values().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn transform_is_monotone((p, f, g) in with_two_profiles()) {
        let lo = apply_t(&p, &f);
        let hi = apply_t(&p, &combine(&f, &g, 1.0, 1.0));
        prop_assert!(lo.values().iter().zip(hi.values()).all(|(a, b)| a <= b));
    }

    #[test]
    fn transform_commutes_with_dilation((p, f) in with_fast_profile(), log_l in -1.0f64..1.0) {
        let lambda = 2f64.powf(log_l);
        let tf = apply_t(&p, &f);
        let lhs = apply_t(&p, &f.dilate(&p, lambda));
        let amp = lambda.powf(p.scale_exp::<f64>() - f64::from(p.k));
        let scale = lhs.sup_abs();
        for (r, v) in grid().nodes().iter().zip(lhs.values()) {
            let rhs = amp * tf.eval(&p, lambda * r);
            prop_assert!((v - rhs).abs() <= 1e-4 * scale, "r={r}: {v} vs {rhs}");
        }
    }

    #[test]
    fn ratio_is_dilation_invariant((p, f) in with_fast_profile(), log_l in -1.0f64..1.0) {
        let m = TransformMatrix::assemble(&p, &grid());
        let lambda = 2f64.powf(log_l);
        let base = functional_ratio_with(&p, &m, &f).unwrap();
        let moved = functional_ratio_with(&p, &m, &f.dilate(&p, lambda)).unwrap();
        prop_assert!((moved / base - 1.0).abs() < 1e-3, "{base} vs {moved}");
    }

    #[test]
    fn ratio_is_homogeneous((p, f) in with_profile(), c in 0.01f64..100.0) {
        let m = TransformMatrix::assemble(&p, &grid());
        let a = functional_ratio_with(&p, &m, &f).unwrap();
        let b = functional_ratio_with(&p, &m, &f.scaled(c)).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_adjoint_identity((p, f, g) in with_two_profiles()) {
        let grid = grid();
        let m = TransformMatrix::assemble(&p, &grid);
        let dot = |x: &[f64], y: &[f64], w: Vec<f64>| -> f64 { x.iter().zip(y).zip(w).map(|((a, b), c)| a * b * c).sum() };
        let lhs = dot(&m.apply(f.values()), g.values(), grid.weights(p.target_weight()));
        let rhs = dot(f.values(), &m.apply_adjoint(g.values()), grid.weights(p.domain_weight()));
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-11);
    }

    #[test]
    fn tail_mass_is_nonincreasing((p, f) in with_profile(), radii in prop::collection::vec(0.0f64..50.0, 2..8)) {
        let mut radii = radii;
        radii.sort_by(f64::total_cmp);
        let tails: Vec<f64> = radii.iter().map(|r| f.mass_tail(&p, *r)).collect();
        prop_assert!(tails.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn rearrangement_is_equimeasurable((p, f) in with_profile()) {
        let fs = rearrange(&p, &f);
        prop_assert!(fs.values().windows(2).all(|w| w[1] <= w[0]));
        let total = f.lp_mass(&p);
        prop_assert!((fs.lp_mass(&p) / total - 1.0).abs() < 1e-6);
        for level in [0.05, 0.1, 0.3] {
            let a = f.mass_above_level(&p, level);
            let b = fs.mass_above_level(&p, level);
            // level sets agree up to the one cell straddling the level
            let cell = fs.cell_masses(&p).into_iter().fold(0.0, f64::max);
            prop_assert!((a - b).abs() <= cell + 1e-9 * total, "level {level}: {a} vs {b}");
        }
    }

    #[test]
    fn truncation_is_monotone_and_exact((_p, f) in with_profile(), m1 in 0.05f64..5.0, dm in 0.0f64..5.0) {
        let (g1, e1) = truncate(&f, m1);
        let (g2, _) = truncate(&f, m1 + dm);
        prop_assert!(g1.values().iter().zip(g2.values()).all(|(a, b)| a <= b));
        prop_assert!(g1.values().iter().zip(e1.values()).zip(f.values()).all(|((a, b), c)| a + b == *c));
    }

    #[test]
    fn concentration_is_monotone_in_window((p, f) in with_profile()) {
        let f = f.scaled(1.0 / f.domain_norm(&p));
        let q: Vec<f64> = [0.25, 0.5, 1.0, 4.0, 16.0].iter().map(|r| concentration_function(&p, &f, *r).unwrap()).collect();
        prop_assert!(q.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        prop_assert!(q.iter().all(|v| *v <= 1.0 + 1e-9));
    }

    #[test]
    fn interaction_obeys_holder((p, f, g) in with_two_profiles(), pick in 0.0f64..1.0) {
        let q = p.q_int();
        let m = 1 + ((pick * f64::from(q - 1)) as u32).min(q - 2);
        let term = interaction_term(&p, &f, &g, m).unwrap();
        let a = apply_t(&p, &f).target_norm(&p);
        let b = apply_t(&p, &g).target_norm(&p);
        let bound = a.powi((q - m) as i32) * b.powi(m as i32);
        prop_assert!(term <= bound * (1.0 + 1e-12), "{term} > {bound}");
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn continuous_adjoint_identity(
        (p, f, g) in pair().prop_flat_map(|p| {
            (fast_profile(&p, fine_grid()), fast_profile(&p, fine_grid())).prop_map(move |(f, g)| (p, f, g))
        })
    ) {
        let lhs = pairing(&apply_t(&p, &f), &g, p.target_weight());
        let rhs = pairing(&f, &apply_t_adjoint(&p, &g), p.domain_weight());
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn extremizer_family_shares_one_ratio() {
    let p = Params::new(2, 4).unwrap();
    let m = TransformMatrix::assemble(&p, &grid());
    let phis: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|l| functional_ratio_with(&p, &m, &extremizer_profile(&p, *l, grid()).unwrap()).unwrap())
        .collect();
    for phi in &phis {
        assert!((phi / phis[1] - 1.0).abs() < 1e-6);
    }
}
