//! The constants of the Gehring pipeline, evaluated exactly.
//!
//! Every input float is an exact binary rational, so for integer `q` all
//! rational constants (`θ₀`, `b̄`, `θ̄`, `θ̄₀`, `a`, both `p*`, `C_{p,q,a}`)
//! are computed as [`BigRational`]s. The remaining constants involve roots,
//! `π` or non-integer powers and are evaluated with `astro-float` at
//! [`PRECISION_BITS`]; their error bound is the disagreement with a second
//! evaluation at [`CHECK_BITS`].

mod hp;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use hp::Hp;

pub const PRECISION_BITS: usize = 256;
pub const CHECK_BITS: usize = 192;
const DECIMAL_DIGITS: usize = 40;

/// Hypothesis data `(q, σ, b, θ, γ, d)` of the reverse Hölder assumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GehringParams {
    pub q: f64,
    pub sigma: f64,
    pub b: f64,
    pub theta: f64,
    pub gamma: f64,
    pub d: usize,
}

impl GehringParams {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.q, self.sigma, self.b, self.theta, self.gamma]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(KgError::Domain("Gehring parameters must be finite".into()));
        }
        if !(self.q > 1.0) {
            return Err(KgError::Domain(format!("need q > 1, got {}", self.q)));
        }
        if !(self.sigma > self.q) {
            return Err(KgError::Domain(format!("need sigma > q, got {}", self.sigma)));
        }
        if !(self.b > 1.0) {
            return Err(KgError::Domain(format!("need b > 1, got {}", self.b)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(KgError::Domain(format!("need theta in (0,1), got {}", self.theta)));
        }
        if !(self.gamma > 1.0) {
            return Err(KgError::Domain(format!("need gamma > 1, got {}", self.gamma)));
        }
        if self.d == 0 {
            return Err(KgError::Domain("dimension must be positive".into()));
        }
        Ok(())
    }

    fn integer_q(&self) -> Option<u32> {
        (self.q.fract() == 0.0 && self.q <= 4096.0).then_some(self.q as u32)
    }

    fn hom_dim(&self) -> u32 {
        4 * self.d as u32 + 2
    }
}

/// One constant: exact rational when available, a decimal rendering, the
/// nearest double and an absolute error bound for the decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantValue {
    /// `numerator/denominator`, present when the value is an exact rational.
    pub exact: Option<String>,
    pub decimal: String,
    pub value: f64,
    /// Zero for exact values.
    pub abs_error_bound: f64,
}

impl ConstantValue {
    fn from_rational(r: &BigRational) -> Self {
        ConstantValue {
            exact: Some(rational_string(r)),
            decimal: rational_decimal(r, DECIMAL_DIGITS),
            value: rational_to_f64(r),
            abs_error_bound: 0.0,
        }
    }

    fn from_hp(fine: &BigFloat, coarse: &BigFloat, hp: &mut Hp) -> Self {
        let diff = hp.sub(fine, coarse).abs();
        ConstantValue {
            exact: None,
            decimal: hp.decimal(fine),
            value: hp.to_f64(fine),
            abs_error_bound: hp.to_f64(&diff).max(f64::MIN_POSITIVE),
        }
    }
}

/// Consistency checks evaluated alongside the constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantChecks {
    /// `3^{4d+2} 5^{8d+4} = 75^{4d+2}`
    pub seventy_five_identity: bool,
    /// `2 b̄ 5^{8d+4} 4^q = 2·75^{4d+2} 4^q b`
    pub a_forms_agree: bool,
    /// `θ <= θ₀` iff `θ̄ <= θ̄₀`
    pub theta_scaling_consistent: bool,
    /// `(aq-1)/(a-1) = q + (q-1)/(a-1)`
    pub p_star_variant_identity: bool,
    /// Exact and high-precision evaluations of the rational constants agree.
    pub exact_matches_float: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub params: GehringParams,
    pub p: f64,
    /// True when the rational constants are exact (integer `q`).
    pub exact_arithmetic: bool,
    pub precision_bits: usize,
    pub theta0: ConstantValue,
    pub bar_b: ConstantValue,
    pub bar_theta: ConstantValue,
    pub bar_theta0: ConstantValue,
    pub a: ConstantValue,
    pub alpha: ConstantValue,
    pub p_star_lemma: ConstantValue,
    pub p_star_theorem: ConstantValue,
    pub c_pq: ConstantValue,
    pub c0: ConstantValue,
    pub c1: ConstantValue,
    pub c_gamma: ConstantValue,
    pub c_g: ConstantValue,
    pub q1_volume: ConstantValue,
    /// `p*_lemma - q`, the integrability gain the pipeline guarantees.
    pub epsilon: ConstantValue,
    pub checks: ConstantChecks,
}

pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| KgError::Domain(format!("{x} is not finite")))
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64()
        .filter(|v| v.is_finite())
        .unwrap_or_else(|| rational_decimal(r, 25).parse().unwrap_or(f64::NAN))
}

/// `digits` significant digits in scientific notation, rounded half up.
pub fn rational_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();
    // Estimate the decimal exponent from digit counts, then correct.
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(big(10).pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), big(10).pow((-k) as u32))
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }
    let scaled = &a * pow10(digits as i64 - 1 - e);
    let half = BigRational::new(BigInt::one(), big(2));
    let mut m = (scaled + half).floor().to_integer();
    if m >= big(10).pow(digits as u32) {
        m /= 10;
        e += 1;
    }
    let s = m.to_string();
    format!("{sign}{}.{}e{}{}", &s[..1], &s[1..], if e < 0 { "-" } else { "+" }, e.abs())
}

fn r_min(a: BigRational, b: BigRational) -> BigRational {
    if a < b {
        a
    } else {
        b
    }
}

/// Rational constants for integer `q`.
struct ExactPart {
    theta0: BigRational,
    bar_b: BigRational,
    bar_theta: BigRational,
    bar_theta0: BigRational,
    a: BigRational,
    p_star_lemma: BigRational,
    p_star_theorem: BigRational,
    c0: Option<BigRational>,
    seventy_five_identity: bool,
    a_forms_agree: bool,
    theta_scaling_consistent: bool,
    p_star_variant_identity: bool,
}

/// `3^{4d+2} 5^{8d+4} = 75^{4d+2}` in exact integer arithmetic.
pub fn seventy_five_identity(d: usize) -> bool {
    let n = 4 * d as u32 + 2;
    big(3).pow(n) * big(5).pow(2 * n) == big(75).pow(n)
}

/// `θ₀ = [2·75^{4d+2} 4^q]^{-1}` for integer `q`.
pub fn theta0_exact(d: usize, q: u32) -> BigRational {
    let n = 4 * d as u32 + 2;
    BigRational::new(BigInt::one(), big(2) * big(75).pow(n) * big(4).pow(q))
}

fn exact_part(params: &GehringParams) -> Result<Option<ExactPart>> {
    let Some(qi) = params.integer_q() else {
        return Ok(None);
    };
    let n = params.hom_dim();
    let q = BigRational::from_integer(big(qi as u64));
    let one = BigRational::one();
    let two = BigRational::from_integer(big(2));
    let four_q = BigRational::from_integer(big(4).pow(qi));
    let p3 = BigRational::from_integer(big(3).pow(n));
    let p5 = BigRational::from_integer(big(5).pow(2 * n));
    let p75 = BigRational::from_integer(big(75).pow(n));
    let b = rational(params.b)?;
    let theta = rational(params.theta)?;
    let sigma = rational(params.sigma)?;

    let theta0 = theta0_exact(params.d, qi);
    let bar_b = &p3 * &b;
    let bar_theta = &p3 * &theta;
    let bar_theta0 = (&two * &four_q * &p5).recip();
    let a = &two * &bar_b * &p5 * &four_q;
    let a75 = &two * &p75 * &four_q * &b;
    let lemma = &q + (&q - &one) / (&a - &one);
    let variant = (&a * &q - &one) / (&a - &one);
    let theorem = (&b * &q - &theta0) / (&b - &theta0);
    let c0 = (n % qi == 0).then(|| BigRational::from_integer(big(2).pow(n / qi)));
    Ok(Some(ExactPart {
        theta_scaling_consistent: (theta <= theta0) == (bar_theta <= bar_theta0),
        seventy_five_identity: &p3 * &p5 == p75,
        a_forms_agree: a == a75,
        p_star_variant_identity: lemma == variant,
        p_star_lemma: r_min(sigma.clone(), lemma),
        p_star_theorem: r_min(sigma, theorem),
        theta0,
        bar_b,
        bar_theta,
        bar_theta0,
        a,
        c0,
    }))
}

/// Every constant at one working precision.
struct HpPart {
    theta0: BigFloat,
    bar_b: BigFloat,
    bar_theta: BigFloat,
    bar_theta0: BigFloat,
    a: BigFloat,
    alpha: BigFloat,
    p_star_lemma: BigFloat,
    p_star_theorem: BigFloat,
    c_pq: BigFloat,
    c0: BigFloat,
    c1: BigFloat,
    c_gamma: BigFloat,
    c_g: BigFloat,
    q1: BigFloat,
}

fn unit_ball_volume_hp(hp: &mut Hp, d: usize) -> BigFloat {
    let pi = hp.pi();
    let fact = |hp: &Hp, k: usize| (1..=k).fold(hp.num(1.0), |acc, i| hp.mul(&acc, &hp.num(i as f64)));
    if d % 2 == 0 {
        let k = d / 2;
        hp.div(&hp.powi(&pi, k), &fact(hp, k))
    } else {
        let k = (d - 1) / 2;
        let num = hp.mul(&hp.mul(&hp.powi(&hp.num(2.0), d), &hp.powi(&pi, k)), &fact(hp, k));
        hp.div(&num, &fact(hp, d))
    }
}

fn c_gamma_hp(hp: &Hp, gamma: &BigFloat) -> BigFloat {
    let one = hp.num(1.0);
    let g2 = hp.mul(gamma, gamma);
    let g3 = hp.mul(&g2, gamma);
    let t1 = hp.div(&hp.sub(gamma, &one), &hp.num(5.0));
    let t2 = hp.sqrt(&hp.div(&hp.sub(&g2, &one), &hp.num(13.0)));
    let t3 = hp.sqrt(&hp.div(&hp.sub(&g3, &one), &hp.mul(&hp.num(25.0), gamma)));
    hp.mul(&hp.num(0.5), &hp.min(&hp.min(&t1, &t2), &t3))
}

/// `C_{p,q,a} = 2a(p-1)/((p-1) - a(p-q))` at working precision.
fn c_pq_hp(hp: &Hp, a: &BigFloat, p: &BigFloat, q: &BigFloat) -> BigFloat {
    let one = hp.num(1.0);
    let pm1 = hp.sub(p, &one);
    let den = hp.sub(&pm1, &hp.mul(a, &hp.sub(p, q)));
    hp.div(&hp.mul(&hp.mul(&hp.num(2.0), a), &pm1), &den)
}

fn hp_part(params: &GehringParams, p: &BigFloat, hp: &mut Hp) -> HpPart {
    let n = params.hom_dim() as usize;
    let nf = hp.num(n as f64);
    let one = hp.num(1.0);
    let two = hp.num(2.0);
    let q = hp.num(params.q);
    let b = hp.num(params.b);
    let gamma = hp.num(params.gamma);
    let sigma = hp.num(params.sigma);
    let four_q = hp.pow(&hp.num(4.0), &q);
    let p3 = hp.powi(&hp.num(3.0), n);
    let p5 = hp.powi(&hp.num(5.0), 2 * n);
    let p75 = hp.powi(&hp.num(75.0), n);

    let theta0 = hp.div(&one, &hp.mul(&hp.mul(&two, &p75), &four_q));
    let bar_b = hp.mul(&p3, &b);
    let bar_theta = hp.mul(&p3, &hp.num(params.theta));
    let bar_theta0 = hp.div(&one, &hp.mul(&hp.mul(&two, &four_q), &p5));
    let a = hp.mul(&hp.mul(&hp.mul(&two, &bar_b), &p5), &four_q);
    let inv_q = hp.div(&one, &q);
    let root_b = hp.pow(&bar_b, &inv_q);
    let alpha = hp.mul(&hp.num(4.0), &root_b);
    let lemma = hp.add(&q, &hp.div(&hp.sub(&q, &one), &hp.sub(&a, &one)));
    let theorem = hp.div(
        &hp.sub(&hp.mul(&b, &q), &theta0),
        &hp.sub(&b, &theta0),
    );
    let c_pq = c_pq_hp(hp, &a, p, &q);
    let n_over_q = hp.div(&nf, &q);
    let c0 = hp.pow(&two, &n_over_q);
    let vb = unit_ball_volume_hp(hp, params.d);
    let q1 = hp.mul(&vb, &vb);
    let c_gamma = c_gamma_hp(hp, &gamma);
    // C1 = |Q1|^{-1/q} c_γ^{-(4d+2)/q}
    let neg_inv_q = hp.sub(&hp.num(0.0), &inv_q);
    let neg_n_over_q = hp.sub(&hp.num(0.0), &n_over_q);
    let q1_root = hp.pow(&q1, &neg_inv_q);
    let cg_root = hp.pow(&c_gamma, &neg_n_over_q);
    let c1 = hp.mul(&q1_root, &cg_root);
    // |Q_γ| = γ^{4d+2} |Q1|
    let q_gamma = hp.mul(&hp.powi(&gamma, n), &q1);
    let inv_p = hp.div(&one, p);
    let qg_root = hp.pow(&q_gamma, &inv_p);
    let first = hp.mul(&hp.mul(&c1, &c0), &qg_root);
    let scale = hp.pow(&hp.div(&gamma, &hp.num(5.0)), &n_over_q);
    let second = hp.mul(&hp.mul(&hp.mul(&c1, &c_pq), &q1), &scale);
    HpPart {
        theta0,
        bar_b,
        bar_theta,
        bar_theta0,
        alpha,
        p_star_lemma: hp.min(&sigma, &lemma),
        p_star_theorem: hp.min(&sigma, &theorem),
        a,
        c_pq,
        c0,
        c1,
        c_gamma,
        c_g: hp.add(&first, &second),
        q1,
    }
}

/// `p*` in the form supported by the covering argument,
/// `min(σ, q + (q-1)/(a-1))`.
pub fn p_star(params: &GehringParams) -> Result<ConstantValue> {
    params.validate()?;
    if let Some(ex) = exact_part(params)? {
        return Ok(ConstantValue::from_rational(&ex.p_star_lemma));
    }
    let mut fine = Hp::new(PRECISION_BITS);
    let mut coarse = Hp::new(CHECK_BITS);
    let q = params.q;
    let f = hp_part(params, &fine.num(q), &mut fine).p_star_lemma;
    let c = hp_part(params, &coarse.num(q), &mut coarse).p_star_lemma;
    Ok(ConstantValue::from_hp(&f, &c, &mut fine))
}

/// `α = 4 b̄^{1/q}`.
pub fn alpha_const(b_bar: f64, q: f64) -> f64 {
    4.0 * b_bar.powf(1.0 / q)
}

/// `C_{p,q,a}` in exact arithmetic.
pub fn c_pq_exact(a: &BigRational, p: &BigRational, q: &BigRational) -> BigRational {
    let one = BigRational::one();
    let pm1 = p - &one;
    let two = BigRational::from_integer(big(2));
    (&two * a * &pm1) / (&pm1 - a * (p - q))
}

fn relative_gap(x: &BigFloat, y: &BigFloat, hp: &mut Hp) -> f64 {
    let diff = hp.to_f64(&hp.sub(x, y).abs());
    let scale = hp.to_f64(&x.abs()).max(f64::MIN_POSITIVE);
    diff / scale
}

/// All constants for hypothesis data `params` and target exponent `p`.
pub fn compute_constants(params: &GehringParams, p: f64) -> Result<ConstantsReport> {
    params.validate()?;
    let exact = exact_part(params)?;
    let mut fine = Hp::new(PRECISION_BITS);
    let mut coarse = Hp::new(CHECK_BITS);
    let pf = fine.num(p);
    let pc = coarse.num(p);
    let f = hp_part(params, &pf, &mut fine);
    let c = hp_part(params, &pc, &mut coarse);

    // Hypothesis and exponent range, decided exactly when possible.
    let (theta_ok, p_in_range) = match &exact {
        Some(ex) => {
            let pr = rational(p)?;
            let q = rational(params.q)?;
            (rational(params.theta)? < ex.theta0, pr >= q && pr < ex.p_star_lemma)
        }
        None => {
            let th = fine.num(params.theta);
            let q = fine.num(params.q);
            (
                fine.sub(&th, &f.theta0).is_negative(),
                !fine.sub(&pf, &q).is_negative() && fine.sub(&pf, &f.p_star_lemma).is_negative(),
            )
        }
    };
    if !theta_ok {
        return Err(KgError::HypothesisViolated(format!(
            "theta = {} is not below theta0 = {:e}",
            params.theta,
            fine.to_f64(&f.theta0)
        )));
    }
    if !p_in_range {
        return Err(KgError::Domain(format!(
            "p = {p} outside [q, p*) = [{}, {})",
            params.q,
            fine.decimal(&f.p_star_lemma)
        )));
    }

    let hpv = |a: &BigFloat, b: &BigFloat, hp: &mut Hp| ConstantValue::from_hp(a, b, hp);
    let mut checks = ConstantChecks {
        seventy_five_identity: seventy_five_identity(params.d),
        a_forms_agree: true,
        theta_scaling_consistent: true,
        p_star_variant_identity: true,
        exact_matches_float: true,
    };
    let rat_or = |r: Option<&BigRational>, a: &BigFloat, b: &BigFloat, hp: &mut Hp| match r {
        Some(r) => ConstantValue::from_rational(r),
        None => ConstantValue::from_hp(a, b, hp),
    };
    let (theta0, bar_b, bar_theta, bar_theta0, a, psl, pst, c_pq, c0);
    match &exact {
        Some(ex) => {
            checks.a_forms_agree = ex.a_forms_agree;
            checks.theta_scaling_consistent = ex.theta_scaling_consistent;
            checks.p_star_variant_identity = ex.p_star_variant_identity;
            checks.seventy_five_identity &= ex.seventy_five_identity;
            let q = rational(params.q)?;
            let cpq = c_pq_exact(&ex.a, &rational(p)?, &q);
            let pairs = [
                (&ex.theta0, &f.theta0),
                (&ex.a, &f.a),
                (&ex.p_star_lemma, &f.p_star_lemma),
                (&cpq, &f.c_pq),
            ];
            for (r, x) in pairs {
                let as_hp = fine.rat(r);
                if relative_gap(&as_hp, x, &mut fine) > 1e-60 {
                    checks.exact_matches_float = false;
                }
            }
            theta0 = ConstantValue::from_rational(&ex.theta0);
            bar_b = ConstantValue::from_rational(&ex.bar_b);
            bar_theta = ConstantValue::from_rational(&ex.bar_theta);
            bar_theta0 = ConstantValue::from_rational(&ex.bar_theta0);
            a = ConstantValue::from_rational(&ex.a);
            psl = ConstantValue::from_rational(&ex.p_star_lemma);
            pst = ConstantValue::from_rational(&ex.p_star_theorem);
            c_pq = ConstantValue::from_rational(&cpq);
            c0 = rat_or(ex.c0.as_ref(), &f.c0, &c.c0, &mut fine);
        }
        None => {
            theta0 = hpv(&f.theta0, &c.theta0, &mut fine);
            bar_b = hpv(&f.bar_b, &c.bar_b, &mut fine);
            bar_theta = hpv(&f.bar_theta, &c.bar_theta, &mut fine);
            bar_theta0 = hpv(&f.bar_theta0, &c.bar_theta0, &mut fine);
            a = hpv(&f.a, &c.a, &mut fine);
            psl = hpv(&f.p_star_lemma, &c.p_star_lemma, &mut fine);
            pst = hpv(&f.p_star_theorem, &c.p_star_theorem, &mut fine);
            c_pq = hpv(&f.c_pq, &c.c_pq, &mut fine);
            c0 = hpv(&f.c0, &c.c0, &mut fine);
        }
    }
    let eps_f = fine.sub(&f.p_star_lemma, &fine.num(params.q));
    let eps_c = coarse.sub(&c.p_star_lemma, &coarse.num(params.q));
    let epsilon = match &exact {
        Some(ex) => ConstantValue::from_rational(&(&ex.p_star_lemma - rational(params.q)?)),
        None => hpv(&eps_f, &eps_c, &mut fine),
    };
    // d = 1: |Q1| = 4 exactly.
    let q1_volume = if params.d == 1 {
        ConstantValue::from_rational(&BigRational::from_integer(big(4)))
    } else {
        hpv(&f.q1, &c.q1, &mut fine)
    };
    Ok(ConstantsReport {
        params: params.clone(),
        p,
        exact_arithmetic: exact.is_some(),
        precision_bits: PRECISION_BITS,
        theta0,
        bar_b,
        bar_theta,
        bar_theta0,
        a,
        alpha: hpv(&f.alpha, &c.alpha, &mut fine),
        p_star_lemma: psl,
        p_star_theorem: pst,
        c_pq,
        c0,
        c1: hpv(&f.c1, &c.c1, &mut fine),
        c_gamma: hpv(&f.c_gamma, &c.c_gamma, &mut fine),
        c_g: hpv(&f.c_g, &c.c_g, &mut fine),
        q1_volume,
        epsilon,
        checks,
    })
}

/// `C_{p,q,a}` along exponents approaching `p*` from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceProfile {
    /// `p_k = q + (p* - q)(1 - 10^{-k})`, decimal.
    pub exponents: Vec<String>,
    pub values: Vec<f64>,
    /// The same constant at `p*(1 - 10^{-k})`, which lies below `q`.
    pub literal_values: Vec<f64>,
    pub strictly_increasing: bool,
    pub literal_strictly_increasing: bool,
}

/// Evaluates `C_{p,q,a}` for `k = 1..=k_max` in high precision, so exponents
/// far closer to `p*` than a double can resolve stay distinct.
pub fn c_pq_divergence(params: &GehringParams, k_max: u32) -> Result<DivergenceProfile> {
    params.validate()?;
    let mut hp = Hp::new(PRECISION_BITS);
    let q = hp.num(params.q);
    let base = hp_part(params, &q, &mut hp);
    let ps = base.p_star_lemma.clone();
    let gap = hp.sub(&ps, &q);
    let one = hp.num(1.0);
    let mut exponents = Vec::new();
    let mut values = Vec::new();
    let mut literal_values = Vec::new();
    for k in 1..=k_max {
        let tiny = hp.div(&one, &hp.powi(&hp.num(10.0), k as usize));
        let frac = hp.sub(&one, &tiny);
        let pk = hp.add(&q, &hp.mul(&gap, &frac));
        let lit = hp.mul(&ps, &frac);
        let v = c_pq_hp(&hp, &base.a, &pk, &q);
        let lv = c_pq_hp(&hp, &base.a, &lit, &q);
        exponents.push(hp.decimal(&pk));
        values.push(hp.to_f64(&v));
        literal_values.push(hp.to_f64(&lv));
    }
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]) && v.iter().all(|x| *x > 0.0);
    Ok(DivergenceProfile {
        strictly_increasing: increasing(&values),
        literal_strictly_increasing: literal_values.windows(2).all(|w| w[1] > w[0]),
        exponents,
        values,
        literal_values,
    })
}
