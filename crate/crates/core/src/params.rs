use num_rational::Ratio;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Rational = Ratio<i64>;

/// Plane dimension `k`, ambient dimension `d` and the exponents they fix.
///
/// The transform maps `L^p(r^{d-1} dr)` to `L^q(r^{d-k-1} dr)` with
/// `p = (d+1)/(k+1)` and `q = d+1`. All exponents are exact rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub k: u32,
    pub d: u32,
    pub p: Rational,
    pub q: Rational,
    pub p_conj: Rational,
    pub scale_exp: Rational,
}

impl Params {
    pub fn new(k: u32, d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Parameter(format!("need d >= 2, got d = {d}")));
        }
        if k < 1 {
            return Err(Error::Parameter(format!("need k >= 1, got k = {k}")));
        }
        if k > d - 1 {
            return Err(Error::Parameter(format!(
                "need k <= d - 1, got k = {k}, d = {d}"
            )));
        }
        let (ki, di) = (i64::from(k), i64::from(d));
        let p = Rational::new(di + 1, ki + 1);
        let q = Rational::from_integer(di + 1);
        let p_conj = p / (p - Rational::from_integer(1));
        let scale_exp = Rational::from_integer(di) / p;
        Ok(Self { k, d, p, q, p_conj, scale_exp })
    }

    /// `q = d + 1` as an integer power.
    pub fn q_int(&self) -> u32 {
        self.d + 1
    }

    /// Weight exponent of the domain measure, `d - 1`.
    pub fn domain_weight(&self) -> i32 {
        self.d as i32 - 1
    }

    /// Weight exponent of the target measure, `d - k - 1`.
    pub fn target_weight(&self) -> i32 {
        self.d as i32 - self.k as i32 - 1
    }

    /// Far-field decay rate `k + 1` of the extremizer family; interpolation
    /// of domain-side profiles is tuned to it.
    pub fn decay<T: Scalar>(&self) -> T {
        T::lit(f64::from(self.k + 1))
    }

    pub fn p<T: Scalar>(&self) -> T {
        ratio_to(self.p)
    }

    pub fn q<T: Scalar>(&self) -> T {
        ratio_to(self.q)
    }

    pub fn p_conj<T: Scalar>(&self) -> T {
        ratio_to(self.p_conj)
    }

    pub fn scale_exp<T: Scalar>(&self) -> T {
        ratio_to(self.scale_exp)
    }
}

pub fn ratio_to<T: Scalar>(r: Rational) -> T {
    T::lit(*r.numer() as f64) / T::lit(*r.denom() as f64)
}
