//! Fenchel conjugates of convex piecewise-affine fluxes.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::flux::{Flux, SLOPE_TOL};

/// Conjugate `g*(p) = sup_q {pq - g(q)}` on the slope range of `g`.
///
/// Breakpoints are the distinct primal slopes `M_0 < … < M_k`. Between `M_{j-1}`
/// and `M_j` the conjugate is affine with slope `c_j`, the primal corner shared
/// by the two slope groups. `c_0` and `c_{k+1}` are the primal end points.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFlux {
    slopes: Vec<f64>,
    values: Vec<f64>,
    corners: Vec<f64>,
}

impl Serialize for DualFlux {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DualFlux", 2)?;
        st.serialize_field("breakpoints", &self.slopes)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

/// Conjugate of a convex flux; see [`DualFlux`].
pub fn legendre_dual(fl: &Flux) -> Result<DualFlux> {
    let m = fl.slopes();
    let b = fl.breakpoints();
    if let Some(i) = m.windows(2).position(|w| w[1] < w[0] - SLOPE_TOL) {
        return Err(Error::NotConvex { segment: i + 1 });
    }
    let mut slopes = vec![m[0]];
    let mut corners = vec![b[0]];
    for (i, &mi) in m.iter().enumerate().skip(1) {
        if mi > *slopes.last().unwrap() + SLOPE_TOL {
            slopes.push(mi);
            corners.push(b[i]);
        }
    }
    corners.push(*b.last().unwrap());
    let values = slopes
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let c = corners[j];
            p * c - fl.at(c)
        })
        .collect();
    Ok(DualFlux {
        slopes,
        values,
        corners,
    })
}

impl DualFlux {
    /// Dual breakpoints, i.e. the distinct primal slopes.
    pub fn breakpoints(&self) -> &[f64] {
        &self.slopes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Primal corners `c_0 … c_{k+1}`; `c_j` and `c_{j+1}` bound the
    /// subdifferential at the `j`-th dual breakpoint.
    pub fn corners(&self) -> &[f64] {
        &self.corners
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.slopes[0], *self.slopes.last().unwrap())
    }

    fn check(&self, p: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if p >= lo && p <= hi {
            Ok(())
        } else {
            Err(Error::OutsideDualDomain { p, lo, hi })
        }
    }

    pub fn eval(&self, p: f64) -> Result<f64> {
        self.check(p)?;
        Ok(self.at(p))
    }

    pub(crate) fn at(&self, p: f64) -> f64 {
        let j = self.slopes.partition_point(|&s| s <= p);
        if j > 0 && self.slopes[j - 1] == p {
            return self.values[j - 1];
        }
        // p lies strictly inside (M_{j-1}, M_j)
        self.values[j - 1] + self.corners[j] * (p - self.slopes[j - 1])
    }

    /// `[f*'(p-), f*'(p+)]`; the set of primal maximizers at `p`.
    pub fn subgradient(&self, p: f64) -> Result<(f64, f64)> {
        self.check(p)?;
        Ok(self.sub(p))
    }

    pub(crate) fn sub(&self, p: f64) -> (f64, f64) {
        let j = self.slopes.partition_point(|&s| s <= p);
        if j > 0 && self.slopes[j - 1] == p {
            (self.corners[j - 1], self.corners[j])
        } else {
            (self.corners[j], self.corners[j])
        }
    }

    /// Canonical maximizer: the right end of the maximizer set.
    pub fn maximizer(&self, p: f64) -> Result<f64> {
        Ok(self.subgradient(p)?.1)
    }

    /// `g**` on the primal domain, with breakpoints at the corners.
    pub fn conjugate(&self) -> Result<Flux> {
        let vals = self
            .corners
            .iter()
            .map(|&c| {
                self.slopes
                    .iter()
                    .zip(&self.values)
                    .map(|(&p, &v)| p * c - v)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Flux::new(self.corners.clone(), vals)
    }
}

/// `(f*)*` as a flux on the primal domain.
pub fn bidual(fl: &Flux) -> Result<Flux> {
    legendre_dual(fl)?.conjugate()
}
