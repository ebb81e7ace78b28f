//! Piecewise cubic Hermite interpolation of a tabulated function with known
//! node derivatives.

use crate::error::EvalError;
use crate::expr::Jet2;

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    ys: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteTable {
    /// `ys` must be strictly increasing and all three slices equally long
    /// (at least two nodes).
    pub fn new(ys: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        assert!(ys.len() >= 2 && ys.len() == values.len() && ys.len() == slopes.len());
        debug_assert!(ys.windows(2).all(|w| w[0] < w[1]));
        Self { ys, values, slopes }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.ys
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.ys[0], *self.ys.last().unwrap())
    }

    pub fn jet(&self, y: f64) -> Result<Jet2, EvalError> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * (hi - lo);
        if !(y >= lo - slack && y <= hi + slack) {
            return Err(EvalError::Domain { op: "table", y });
        }
        let k = match self.ys.partition_point(|&n| n <= y) {
            0 => 0,
            i => (i - 1).min(self.ys.len() - 2),
        };
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let h = y1 - y0;
        let s = (y - y0) / h;
        let (p0, p1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);

        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;

        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s2 - 2.0 * s;
        let d1 = (d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1) / h;

        let e00 = 12.0 * s - 6.0;
        let e10 = 6.0 * s - 4.0;
        let e01 = -e00;
        let e11 = 6.0 * s - 2.0;
        let d2 = (e00 * p0 + e10 * m0 + e01 * p1 + e11 * m1) / (h * h);

        Ok(Jet2::new(value, d1, d2))
    }
}
