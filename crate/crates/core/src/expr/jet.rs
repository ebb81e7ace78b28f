use std::ops::{Add, Div, Mul, Neg, Sub};

/// Second-order forward-mode jet: a value together with its first and
/// second derivative with respect to the single independent variable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    /// The independent variable itself, seeded at `y`.
    pub const fn variable(y: f64) -> Self {
        Self::new(y, 1.0, 0.0)
    }

    /// Composes an outer scalar function `g` (given by `g(v), g'(v), g''(v)`)
    /// with this jet.
    pub fn chain(self, g0: f64, g1: f64, g2: f64) -> Self {
        Self {
            value: g0,
            d1: g1 * self.d1,
            d2: g2 * self.d1 * self.d1 + g1 * self.d2,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.value, k * self.d1, k * self.d2)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }

    /// Raises the jet to a constant real power. Integer exponents avoid the
    /// `0 * inf` products that the generic formula hits at a zero base.
    pub fn powf(self, p: f64) -> Self {
        let v = self.value;
        if p == 0.0 {
            return Self::constant(1.0);
        }
        if p == 1.0 {
            return self;
        }
        if p == 2.0 {
            return self * self;
        }
        if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
            let n = p as i32;
            let g0 = v.powi(n);
            let g1 = p * v.powi(n - 1);
            let g2 = p * (p - 1.0) * v.powi(n - 2);
            return self.chain(g0, g1, g2);
        }
        self.chain(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Drops one order: the derivative as a jet (its own second derivative is
    /// unknown and reported as NaN).
    pub fn derivative(self) -> Self {
        Self::new(self.d1, self.d2, f64::NAN)
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.value / o.value;
        let q1 = (self.d1 - q * o.d1) / o.value;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.value;
        Self::new(q, q1, q2)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    fn add(self, k: f64) -> Self {
        Self::new(self.value + k, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j.scale(self)
    }
}
