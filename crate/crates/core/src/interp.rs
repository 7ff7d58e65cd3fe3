//! Interpolation of sampled profiles in `θ = arctan r` coordinates.
//!
//! Below the first node the samples are mirrored (radial profiles are even
//! in `r`); on a bounded grid the profile is zero past `r_max`.
//!
//! Interpolation acts on the reduced samples `f(r)(1 + r²)^{α/2}`, where `α`
//! is the far-field decay rate the caller expects (`k + 1` for the profiles
//! of interest). Near `θ = π/2` the weighted norms amplify relative errors of
//! `f`, and the reduced samples are smooth there while `f` itself is not
//! well captured by a low-order polynomial. With `α = 0` the profile is
//! assumed to vanish at `θ = π/2`.

use crate::grid::RadialGrid;
use crate::scalar::Scalar;

/// Four node indices and cubic Lagrange weights reproducing `f(r)`.
#[derive(Debug, Clone, Copy)]
pub struct Stencil<T> {
    pub nodes: [usize; 4],
    pub weights: [T; 4],
}

impl<T: Scalar> Stencil<T> {
    pub fn apply(&self, values: &[T]) -> T {
        let mut acc = T::zero();
        for (n, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + *w * values[*n];
        }
        acc
    }
}

/// Maps an extended node index to a stored node (mirror below the first node).
fn fold(j: isize) -> usize {
    if j < 0 {
        (-j - 1) as usize
    } else {
        j as usize
    }
}

/// `(1 + r²)^{α/2}`, avoiding `powf` when `α` is an integer.
fn lift<T: Scalar>(r: T, alpha: T) -> T {
    let base = T::one() + r * r;
    let twice = alpha.round();
    if twice == alpha && alpha.abs() < T::lit(64.0) {
        let m = twice.to_i32().unwrap_or(0);
        let whole = base.powi(m.div_euclid(2));
        if m.rem_euclid(2) == 1 { whole * base.sqrt() } else { whole }
    } else {
        base.powf(alpha / T::lit(2.0))
    }
}

/// Cubic Lagrange stencil at radius `r` for far-field decay `alpha`; `None`
/// when `r` lies past a bounded grid.
pub fn stencil<T: Scalar>(grid: &RadialGrid<T>, r: T, alpha: T) -> Option<Stencil<T>> {
    let theta = if r.is_infinite() { T::FRAC_PI_2() } else { r.abs().atan() };
    if theta > grid.theta_max() {
        return None;
    }
    let n = grid.len() as isize;
    let x = theta / grid.step() - T::lit(0.5);
    if alpha != T::zero() && x > T::lit((n - 1) as f64) {
        // past the last node the reduced sample is held constant: exact for
        // the `r^{-α}` tail and never negative for faster decay
        let last = (n - 1) as usize;
        let w = if r.is_infinite() { T::zero() } else { lift(grid.nodes()[last], alpha) / lift(r, alpha) };
        let z = T::zero();
        return Some(Stencil { nodes: [last; 4], weights: [w, z, z, z] });
    }
    let base = x.floor().to_isize().unwrap_or(0);
    // a virtual zero sample sits at θ = π/2 when nothing else pins the far field
    let virtual_zero = grid.is_unbounded() && alpha == T::zero();
    let top = if virtual_zero { n - 3 } else { n - 4 };
    let j0 = (base - 1).min(top).max(-2);
    let pos = |m: isize| -> T {
        let j = j0 + m;
        if j == n {
            T::lit(n as f64 - 0.5)
        } else {
            T::lit(j as f64)
        }
    };
    let xs = [pos(0), pos(1), pos(2), pos(3)];
    let lift_u = lift(r, alpha);
    let mut nodes = [0usize; 4];
    let mut weights = [T::zero(); 4];
    for m in 0..4 {
        let mut w = T::one();
        for (l, xl) in xs.iter().enumerate() {
            if l != m {
                w = w * (x - *xl) / (xs[m] - *xl);
            }
        }
        let j = j0 + m as isize;
        if j >= n {
            nodes[m] = (n - 1) as usize;
            weights[m] = T::zero();
        } else {
            let idx = fold(j);
            let rm = grid.nodes()[idx];
            nodes[m] = idx;
            weights[m] = if alpha == T::zero() {
                w
            } else if r.is_infinite() {
                T::zero()
            } else {
                w * lift(rm, alpha) / lift_u
            };
        }
    }
    Some(Stencil { nodes, weights })
}

/// Cubic Lagrange interpolation of `values` at radius `r`.
pub fn eval<T: Scalar>(grid: &RadialGrid<T>, values: &[T], r: T, alpha: T) -> T {
    stencil(grid, r, alpha).map_or(T::zero(), |s| s.apply(values))
}

/// Monotone piecewise-cubic Hermite interpolation at radius `r`: centred
/// slopes, zeroed at local extrema and clamped by the Fritsch-Carlson
/// condition, so the interpolant never overshoots neighbouring samples.
pub fn eval_monotone<T: Scalar>(grid: &RadialGrid<T>, values: &[T], r: T, alpha: T) -> T {
    let theta = if r.is_infinite() { T::FRAC_PI_2() } else { r.abs().atan() };
    if theta > grid.theta_max() {
        return T::zero();
    }
    let n = grid.len() as isize;
    let x = theta / grid.step() - T::lit(0.5);
    let unbounded = grid.is_unbounded() && alpha == T::zero();
    let reduce = |idx: usize| {
        let rm = grid.nodes()[idx];
        values[idx] * lift(rm, alpha)
    };
    // extended reduced samples: mirror below 0; zero at π/2 (index n) when unbounded
    let val = |j: isize| -> T {
        if j >= n {
            if unbounded {
                T::zero()
            } else {
                reduce((n - 1) as usize)
            }
        } else {
            reduce(fold(j))
        }
    };
    let xpos = |j: isize| -> T {
        if unbounded && j >= n {
            T::lit(n as f64 - 0.5) + T::lit((j - n) as f64) * T::lit(0.5)
        } else {
            T::lit(j as f64)
        }
    };
    let upper = if unbounded { n - 1 } else { n - 2 };
    let i_raw = x.floor().to_isize().unwrap_or(0);
    let i = i_raw.min(upper).max(-1);
    let secant = |j: isize| (val(j + 1) - val(j)) / (xpos(j + 1) - xpos(j));
    let slope = |j: isize| -> T {
        let (a, b) = (secant(j - 1), secant(j));
        if a * b <= T::zero() {
            return T::zero();
        }
        let (h0, h1) = (xpos(j) - xpos(j - 1), xpos(j + 1) - xpos(j));
        (a * h1 + b * h0) / (h0 + h1)
    };
    let delta = secant(i);
    let (mut m0, mut m1) = (slope(i), slope(i + 1));
    if delta == T::zero() {
        m0 = T::zero();
        m1 = T::zero();
    } else {
        let (a, b) = (m0 / delta, m1 / delta);
        let s = a * a + b * b;
        if s > T::lit(9.0) {
            let tau = T::lit(3.0) / s.sqrt();
            m0 = tau * a * delta;
            m1 = tau * b * delta;
        }
    }
    let h = xpos(i + 1) - xpos(i);
    let t = (x - xpos(i)) / h;
    let (t2, t3) = (t * t, t * t * t);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let reduced = (two * t3 - three * t2 + T::one()) * val(i)
        + (t3 - two * t2 + t) * h * m0
        + (-two * t3 + three * t2) * val(i + 1)
        + (t3 - t2) * h * m1;
    if r.is_infinite() {
        if alpha == T::zero() { reduced } else { T::zero() }
    } else {
        reduced / lift(r, alpha)
    }
}

/// Fritsch-Carlson interpolation through scattered points `(xs, ys)` with
/// strictly increasing `xs`; constant extension outside the data range.
pub fn monotone_scattered<T: Scalar>(xs: &[T], ys: &[T], x: T) -> T {
    let n = xs.len();
    assert!(n == ys.len() && n >= 1);
    if n == 1 || x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|v| *v <= x).saturating_sub(1).min(n - 2);
    let delta = |j: usize| (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
    let slope = |j: usize| -> T {
        if j == 0 {
            return delta(0);
        }
        if j == n - 1 {
            return delta(n - 2);
        }
        let (a, b) = (delta(j - 1), delta(j));
        if a * b <= T::zero() {
            T::zero()
        } else {
            let (h0, h1) = (xs[j] - xs[j - 1], xs[j + 1] - xs[j]);
            let (w1, w2) = (T::lit(2.0) * h1 + h0, h1 + T::lit(2.0) * h0);
            (w1 + w2) / (w1 / a + w2 / b)
        }
    };
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (t2, t3) = (t * t, t * t * t);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    (two * t3 - three * t2 + T::one()) * ys[i]
        + (t3 - two * t2 + t) * h * slope(i)
        + (-two * t3 + three * t2) * ys[i + 1]
        + (t3 - t2) * h * slope(i + 1)
}
