use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::interp;
use crate::interval::IntervalSet;
use crate::params::Params;
use crate::scalar::{compensated_sum, Scalar};

/// A radial function sampled on the nodes of a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialProfile<T> {
    grid: Arc<RadialGrid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> RadialProfile<T> {
    pub fn new(grid: Arc<RadialGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Data(format!(
                "profile has {} samples for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("sample {i} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid<T>>) -> Self {
        let values = vec![T::zero(); grid.len()];
        Self { grid, values }
    }

    pub fn from_fn<F: Fn(T) -> T>(grid: Arc<RadialGrid<T>>, f: F) -> Result<Self> {
        let values = grid.nodes().iter().map(|r| f(*r)).collect();
        Self::new(grid, values)
    }

    /// Samples `1_F`. Cells cut by an endpoint carry the covered fraction of
    /// their `θ`-length instead of a 0/1 value.
    pub fn indicator(grid: Arc<RadialGrid<T>>, set: &IntervalSet<T>) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                set.intervals()
                    .iter()
                    .map(|(a, b)| grid.cell_fraction(i, *a, *b))
                    .sum::<T>()
                    .min(T::one())
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grid, new samples.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| *v * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Evaluates a domain-side profile at any radius by cubic interpolation in `θ`.
    pub fn eval(&self, params: &Params, r: T) -> T {
        interp::eval(&self.grid, &self.values, r, params.decay())
    }

    /// `(∫ |f|^p r^a dr)^{1/p}`.
    pub fn weighted_lp_norm(&self, a: i32, p: T) -> Result<T> {
        if !(p >= T::one()) {
            return Err(Error::Parameter(format!("norm exponent must be >= 1, got {p}")));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("profile has non-finite samples".into()));
        }
        let pow: Vec<T> = self.values.iter().map(|v| v.abs().powf(p)).collect();
        Ok(self.grid.integrate(&pow, a).powf(T::one() / p))
    }

    /// `‖f‖_p^p` in the domain space `L^p(r^{d-1} dr)`.
    pub fn lp_mass(&self, params: &Params) -> T {
        let p = params.p::<T>();
        let pow: Vec<T> = self.values.iter().map(|v| v.abs().powf(p)).collect();
        self.grid.integrate(&pow, params.domain_weight())
    }

    /// `‖f‖_{L^p(r^{d-1} dr)}`.
    pub fn domain_norm(&self, params: &Params) -> T {
        self.lp_mass(params).powf(T::one() / params.p::<T>())
    }

    /// `‖f‖_{L^q(r^{d-k-1} dr)}`.
    pub fn target_norm(&self, params: &Params) -> T {
        let q = params.q_int() as i32;
        let pow: Vec<T> = self.values.iter().map(|v| v.abs().powi(q)).collect();
        self.grid
            .integrate(&pow, params.target_weight())
            .powf(T::one() / params.q::<T>())
    }

    /// Per-cell contributions to `‖f‖_p^p`; they sum to [`Self::lp_mass`].
    pub fn cell_masses(&self, params: &Params) -> Vec<T> {
        let p = params.p::<T>();
        let a = params.domain_weight();
        self.values
            .iter()
            .zip(self.grid.nodes().iter().zip(self.grid.quadrature_weights()))
            .map(|(v, (r, w))| v.abs().powf(p) * *w * r.powi(a))
            .collect()
    }

    /// `∫_R^∞ |f|^p r^{d-1} dr`; the cell containing `R` contributes the
    /// fraction of its `θ`-length beyond `R`.
    pub fn mass_tail(&self, params: &Params, radius: T) -> T {
        let masses = self.cell_masses(params);
        let radius = radius.max(T::zero());
        compensated_sum(
            masses
                .iter()
                .enumerate()
                .map(|(i, m)| *m * self.grid.cell_fraction(i, radius, T::infinity())),
        )
    }

    /// `∫_{|f| > m} |f|^p r^{d-1} dr`.
    pub fn mass_above_level(&self, params: &Params, level: T) -> T {
        let masses = self.cell_masses(params);
        compensated_sum(
            masses
                .iter()
                .zip(&self.values)
                .filter(|(_, v)| v.abs() > level)
                .map(|(m, _)| *m),
        )
    }

    /// `f_λ(r) = λ^{d/p} f(λ r)`, resampled by monotone cubic interpolation.
    pub fn dilate(&self, params: &Params, lambda: T) -> Self {
        let amp = lambda.powf(params.scale_exp::<T>());
        let alpha = params.decay::<T>();
        let values = self
            .grid
            .nodes()
            .iter()
            .map(|r| amp * interp::eval_monotone(&self.grid, &self.values, lambda * *r, alpha))
            .collect();
        Self { grid: self.grid.clone(), values }
    }

    /// Resamples scattered `(r, value)` data onto `grid`. Radii must be
    /// strictly increasing; the profile is zero past the last radius.
    pub fn from_samples(grid: Arc<RadialGrid<T>>, radii: &[T], values: &[T]) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(Error::Data("need matching, non-empty radius and value columns".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] < T::zero() {
            return Err(Error::Data("radii must be non-negative and strictly increasing".into()));
        }
        let thetas: Vec<T> = radii.iter().map(|r| r.atan()).collect();
        let last = *radii.last().expect("non-empty");
        let out = grid
            .nodes()
            .iter()
            .map(|r| {
                if *r > last {
                    T::zero()
                } else {
                    interp::monotone_scattered(&thetas, values, r.atan())
                }
            })
            .collect();
        Self::new(grid, out)
    }

    /// Writes `r,value` rows after a header comment block.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "r,value")?;
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(out, "{:.17e},{:.17e}", r.f64(), v.f64())?;
        }
        Ok(())
    }
}
