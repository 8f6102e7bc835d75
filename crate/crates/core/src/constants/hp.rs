//! Thin wrapper over `astro-float` with a fixed precision and rounding mode.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;

pub(crate) struct Hp {
    prec: usize,
    cc: Consts,
}

impl Hp {
    pub fn new(prec: usize) -> Self {
        Hp {
            prec,
            cc: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.prec)
    }

    pub fn int(&mut self, n: &BigInt) -> BigFloat {
        BigFloat::parse(&n.to_string(), Radix::Dec, self.prec, RM, &mut self.cc)
    }

    pub fn rat(&mut self, r: &BigRational) -> BigFloat {
        let n = self.int(r.numer());
        let d = self.int(r.denom());
        self.div(&n, &d)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.prec, RM)
    }

    pub fn pow(&mut self, a: &BigFloat, y: &BigFloat) -> BigFloat {
        a.pow(y, self.prec, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.prec, RM)
    }

    pub fn min(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        if self.sub(a, b).is_negative() {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Scientific-notation decimal with all significant digits of the
    /// working precision.
    pub fn decimal(&mut self, a: &BigFloat) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.format(Radix::Dec, RM, &mut self.cc)
            .expect("finite high-precision value")
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        self.decimal(a).parse().unwrap_or(f64::NAN)
    }
}
