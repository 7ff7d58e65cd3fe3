//! The truncated operator `T_R f = T(1_{[0,R]} f)` as a dense matrix, its
//! singular values, and the equicontinuity modulus of its kernel.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gauss::GaussLegendre;
use crate::params::Params;
use crate::scalar::{compensated_sum, Scalar};

/// Dense `n × n` discretization of `T_R` on nodes equispaced in `v = u²`,
/// `u_j = R·√(j/(n-1))`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<T> {
    radius: T,
    nodes: Vec<T>,
    entries: Vec<T>,
    input_weights: Vec<T>,
    output_weights: Vec<T>,
}

/// `∫_{x_a}^{x_b} x^{e-1} dx` for `e > 0`.
fn moment<T: Scalar>(e: T, xa: T, xb: T) -> T {
    (xb.powf(e) - xa.powf(e)) / e
}

/// `∫ r^a dr` over the dual cell of node `i`, clipped to `[0, R]`.
fn dual_cell_weights<T: Scalar>(nodes: &[T], a: i32) -> Vec<T> {
    let n = nodes.len();
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            let lo = if i == 0 { T::zero() } else { (nodes[i - 1] + nodes[i]) / two };
            let hi = if i + 1 == n { nodes[i] } else { (nodes[i] + nodes[i + 1]) / two };
            let e = T::lit(f64::from(a + 1));
            (hi.powi(a + 1) - lo.powi(a + 1)) / e
        })
        .collect()
}

impl<T: Scalar> OperatorMatrix<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.len();
        &self.entries[i * n..(i + 1) * n]
    }

    /// `μ`-measure of each input node's dual cell (weight `u^{d-1}`).
    pub fn input_weights(&self) -> &[T] {
        &self.input_weights
    }

    /// Dual-cell measure with weight `r^{d-k-1}`.
    pub fn output_weights(&self) -> &[T] {
        &self.output_weights
    }

    pub fn apply(&self, f: &[T]) -> Vec<T> {
        (0..self.len())
            .map(|i| compensated_sum(self.row(i).iter().zip(f).map(|(m, v)| *m * *v)))
            .collect()
    }

    /// Row-major CSV with the node radii as the first row and column.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "r\\u")?;
        for u in &self.nodes {
            write!(out, ",{u}")?;
        }
        writeln!(out)?;
        for (i, r) in self.nodes.iter().enumerate() {
            write!(out, "{r}")?;
            for m in self.row(i) {
                write!(out, ",{m}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// `∫_{x_0}^{x_m} x^{a-1} L_j(x) dx` for the Lagrange basis `L_j` on the
/// nodes `xs` (two or three of them). At `x_0 = 0` the singular weight is
/// integrated exactly through monomial moments; elsewhere it is smooth.
fn lagrange_weights<T: Scalar>(a: T, xs: &[T], gl: &GaussLegendre<T>) -> [T; 3] {
    let m = xs.len();
    let basis = |j: usize, x: T| -> T {
        (0..m)
            .filter(|l| *l != j)
            .fold(T::one(), |acc, l| acc * (x - xs[l]) / (xs[j] - xs[l]))
    };
    let mut out = [T::zero(); 3];
    if xs[0] == T::zero() {
        // L_j(x) = Σ_e c_e x^e; coefficients from the node products
        let top = xs[m - 1];
        for (j, slot) in out.iter_mut().enumerate().take(m) {
            let others: Vec<T> = (0..m).filter(|l| *l != j).map(|l| xs[l]).collect();
            let denom = others.iter().fold(T::one(), |acc, o| acc * (xs[j] - *o));
            let coeffs: Vec<T> = match others.as_slice() {
                [o] => vec![-*o, T::one()],
                [o1, o2] => vec![*o1 * *o2, -(*o1 + *o2), T::one()],
                _ => unreachable!("two or three nodes"),
            };
            *slot = coeffs
                .iter()
                .enumerate()
                .map(|(e, c)| *c * moment(a + T::from_usize_exact(e), T::zero(), top))
                .fold(T::zero(), |acc, t| acc + t)
                / denom;
        }
    } else {
        for (x, w) in gl.mapped(xs[0], xs[m - 1]) {
            let kw = w * x.powf(a - T::one());
            for (j, slot) in out.iter_mut().enumerate().take(m) {
                *slot = *slot + kw * basis(j, x);
            }
        }
    }
    out
}

/// Assembles `T_R` on `n` nodes over `[0, R]`, equispaced in `u²`.
///
/// With `v = u²` the kernel is `½(v - r²)^{k/2-1} dv`. Each row integrates
/// the input against piecewise quadratics in `v` on consecutive node pairs
/// starting at the output node (a linear piece closes an odd remainder).
pub fn discretize_t_r<T: Scalar>(params: &Params, radius: T, n: usize) -> Result<OperatorMatrix<T>> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::Parameter(format!("truncation radius must be positive, got {radius}")));
    }
    if n < crate::grid::MIN_POINTS {
        return Err(Error::Config(format!("need at least {} nodes, got {n}", crate::grid::MIN_POINTS)));
    }
    let dv = radius * radius / T::from_usize_exact(n - 1);
    let v: Vec<T> = (0..n).map(|j| dv * T::from_usize_exact(j)).collect();
    let mut nodes: Vec<T> = v.iter().map(|x| x.sqrt()).collect();
    nodes[n - 1] = radius;
    let a = T::lit(f64::from(params.k) / 2.0);
    let half = T::lit(0.5);
    let gl = GaussLegendre::<T>::new(16);
    let mut entries = vec![T::zero(); n * n];
    for i in 0..n {
        let r2 = v[i];
        let row = &mut entries[i * n..(i + 1) * n];
        let mut j = i;
        while j + 1 < n {
            let width = if j + 2 < n { 3 } else { 2 };
            let xs: Vec<T> = (0..width).map(|l| if j + l == i { T::zero() } else { v[j + l] - r2 }).collect();
            let w = lagrange_weights(a, &xs, &gl);
            for l in 0..width {
                row[j + l] = row[j + l] + half * w[l];
            }
            j += width - 1;
        }
    }
    Ok(OperatorMatrix {
        radius,
        input_weights: dual_cell_weights(&nodes, params.domain_weight()),
        output_weights: dual_cell_weights(&nodes, params.target_weight()),
        nodes,
        entries,
    })
}

/// Singular values, largest first, of `diag(√w_out)·M·diag(1/√w_in)`: the
/// matrix between the weighted `L²` spaces on the nodes.
pub fn singular_value_profile<T: Scalar>(m: &OperatorMatrix<T>) -> Result<Vec<T>> {
    let n = m.len();
    let so: Vec<f64> = m.output_weights.iter().map(|w| w.f64().sqrt()).collect();
    let si: Vec<f64> = m.input_weights.iter().map(|w| w.f64().sqrt()).collect();
    let a = DMatrix::<f64>::from_fn(n, n, |i, j| so[i] * m.entry(i, j).f64() / si[j]);
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    if sv.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical("singular value decomposition produced non-finite values".into()));
    }
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite"));
    Ok(sv.into_iter().map(T::lit).collect())
}

/// `I(h, r) = ∫_0^R |1_{u≥r+h}(u²-(r+h)²)^{k/2-1} - 1_{u≥r}(u²-r²)^{k/2-1}| u du`.
///
/// The part on `[r, r+h]` is `((r+h)² - r²)^{k/2}/k`. Past `r+h` the
/// substitution `u² = (r+h)² + t²` turns the difference into
/// `|t^{k-1} - t(t² + c²)^{k/2-1}|` with `c² = (r+h)² - r²`, integrated on
/// panels graded geometrically towards `t = 0`.
pub fn kernel_difference<T: Scalar>(params: &Params, radius: T, h: T, r: T) -> T {
    if h <= T::zero() {
        return T::zero();
    }
    let s = r + h;
    if s >= radius {
        return moment(T::lit(f64::from(params.k) / 2.0), T::zero(), (radius * radius - r * r).max(T::zero()))
            / T::lit(2.0);
    }
    let c2 = s * s - r * r;
    let a = T::lit(f64::from(params.k) / 2.0);
    let near = c2.powf(a) / T::lit(f64::from(params.k));
    let t_max = (radius * radius - s * s).sqrt();
    let km1 = params.k as i32 - 1;
    let gl = GaussLegendre::<T>::new(8);
    let integrand = |t: T| (t.powi(km1) - t * (t * t + c2).powf(a - T::one())).abs();
    let mut far = T::zero();
    let mut hi = t_max;
    let floor = c2.sqrt() * T::lit(1e-6);
    while hi > floor && hi > t_max * T::lit(1e-14) {
        let lo = hi / T::lit(2.0);
        far = far + gl.integrate(lo, hi, integrand);
        hi = lo;
    }
    far = far + gl.integrate(T::zero(), hi, integrand);
    near + far
}

/// `sup` of [`kernel_difference`] over `samples` radii spread uniformly on `[0, R - h]`.
pub fn equicontinuity_modulus<T: Scalar>(params: &Params, radius: T, h: T, samples: usize) -> Result<T> {
    if h == T::zero() {
        return Ok(T::zero());
    }
    if !(h > T::zero() && h < radius) {
        return Err(Error::Parameter(format!("modulus step must lie in (0, R), got {h}")));
    }
    let samples = samples.max(2);
    let span = radius - h;
    Ok((0..samples)
        .map(|i| {
            let r = span * T::from_usize_exact(i) / T::from_usize_exact(samples - 1);
            kernel_difference(params, radius, h, r)
        })
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalSet;
    use crate::transform::indicator_transform_at;

    /// Closed form: the sign of the kernel difference is fixed by `k`.
    fn modulus_closed(k: u32, radius: f64, h: f64, r: f64) -> f64 {
        let a = f64::from(k) / 2.0;
        let s = r + h;
        let near = (s * s - r * r).powf(a) / f64::from(k);
        let (x1, x2) = (radius * radius - s * s, radius * radius - r * r);
        let (y1, y2) = (0.0, s * s - r * r);
        // ∫ (v - s²)^{a-1} - (v - r²)^{a-1} dv / 2 over [s², R²]
        let diff = ((x1.powf(a) - y1) - (x2.powf(a) - y2.powf(a))) / a / 2.0;
        near + diff.abs()
    }

    #[test]
    fn nonnegative_and_upper_triangular() {
        for (k, d) in [(1, 3), (2, 3), (3, 4)] {
            let p = Params::new(k, d).unwrap();
            for n in [64, 65, 256] {
                let m = discretize_t_r(&p, 1.0, n).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert!(m.entry(i, j) >= 0.0, "k={k} n={n} ({i},{j}) {}", m.entry(i, j));
                        if j < i {
                            assert_eq!(m.entry(i, j), 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn k2_indicator_matches_closed_form() {
        let p = Params::new(2, 3).unwrap();
        let m = discretize_t_r::<f64>(&p, 1.0, 256).unwrap();
        let f = vec![1.0; 256];
        let set = IntervalSet::single(0.0, 1.0).unwrap();
        for (out, r) in m.apply(&f).iter().zip(m.nodes()) {
            assert!((out - indicator_transform_at(&p, &set, *r)).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_input_matches_quadrature() {
        let p = Params::new(1, 3).unwrap();
        let m = discretize_t_r::<f64>(&p, 2.0, 512).unwrap();
        let f: Vec<f64> = m.nodes().iter().map(|u| (-u * u).exp()).collect();
        let gl = GaussLegendre::<f64>::new(32);
        for (out, r) in m.apply(&f).iter().zip(m.nodes()) {
            // T_R f(r) = ∫_0^{√(R²-r²)} f(√(r²+s²)) ds
            let top = (4.0 - r * r).max(0.0).sqrt();
            let exact: f64 = (0..16)
                .map(|j| {
                    let (a, b) = (top * j as f64 / 16.0, top * (j + 1) as f64 / 16.0);
                    gl.integrate(a, b, |s| (-(r * r + s * s)).exp())
                })
                .sum();
            assert!((out - exact).abs() < 1e-6, "r={r}: {out} vs {exact}");
        }
    }

    #[test]
    fn singular_values_sorted_and_zero_matrix() {
        let p = Params::new(2, 3).unwrap();
        let m = discretize_t_r(&p, 1.0, 64).unwrap();
        let sv = singular_value_profile(&m).unwrap();
        assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        assert!(sv[0] > 0.0);
        let mut z = m.clone();
        z.entries.iter_mut().for_each(|e| *e = 0.0);
        assert!(singular_value_profile(&z).unwrap().iter().all(|s| *s == 0.0));
    }

    #[test]
    fn modulus_quadrature_matches_closed_form() {
        for k in [1, 2, 3] {
            let p = Params::new(k, 4).unwrap();
            for h in [0.1, 0.01, 0.001] {
                for r in [0.0, 0.05, 0.3, 0.8] {
                    if r + h >= 1.0 {
                        continue;
                    }
                    let q = kernel_difference(&p, 1.0, h, r);
                    let c = modulus_closed(k, 1.0, h, r);
                    assert!((q - c).abs() <= 1e-10 * c.max(1e-12), "k={k} h={h} r={r}: {q} vs {c}");
                }
            }
        }
    }

    #[test]
    fn k2_modulus_is_quadratic_in_h() {
        let p = Params::new(2, 3).unwrap();
        let (radius, h) = (1.0f64, 0.1f64);
        let m = equicontinuity_modulus(&p, radius, h, 101).unwrap();
        assert!((m - (2.0 * radius * h - h * h) / 2.0).abs() < 1e-12);
        assert_eq!(equicontinuity_modulus(&p, radius, 0.0, 10).unwrap(), 0.0);
    }
}
