use num_rational::BigRational;
use num_traits::FromPrimitive;

use super::Context;
use crate::constants::{
    c_pq_divergence, c_pq_exact, compute_constants, p_star, seventy_five_identity, theta0_exact,
};
use crate::error::{KgError, Result};
use crate::harness::report::{CheckRecord, Table};

const REF: &str = "Gehring constants";

pub fn run(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config.constants.clone();
    let params = ctx.config.params.clone();

    let failing: Vec<usize> = (1..=cfg.max_dim).filter(|&d| !seventy_five_identity(d)).collect();
    ctx.push(
        CheckRecord::new("seventy-five identity", REF, &cfg.max_dim)
            .measure("dimensions", cfg.max_dim)
            .measure("failing_dimensions", &failing)
            .threshold("exact equality")
            .verdict(failing.is_empty()),
    );

    let theta0 = theta0_exact(1, 2).to_string();
    ctx.push(
        CheckRecord::new("theta0 d=1 q=2", REF, &(1, 2))
            .measure("theta0", &theta0)
            .threshold("== 1/5695312500000")
            .verdict(theta0 == "1/5695312500000"),
    );

    let ps = p_star(&params)?;
    let p = cfg.p.unwrap_or(params.q + 0.5 * (ps.value - params.q));
    let report = compute_constants(&params, p)?;
    let mut table = Table::new("constants", &["name", "value", "exact", "abs_error_bound"]);
    for (name, c) in [
        ("theta0", &report.theta0),
        ("bar_b", &report.bar_b),
        ("bar_theta", &report.bar_theta),
        ("a", &report.a),
        ("alpha", &report.alpha),
        ("p_star_lemma", &report.p_star_lemma),
        ("p_star_theorem", &report.p_star_theorem),
        ("c_pq", &report.c_pq),
        ("c0", &report.c0),
        ("c1", &report.c1),
        ("c_gamma", &report.c_gamma),
        ("c_g", &report.c_g),
        ("epsilon", &report.epsilon),
    ] {
        table.push(&[
            name.to_string(),
            c.decimal.clone(),
            c.exact.clone().unwrap_or_default(),
            format!("{:e}", c.abs_error_bound),
        ]);
    }
    ctx.table(table);
    let checks = &report.checks;
    ctx.push(
        CheckRecord::new("a forms agree", REF, &(&params, p))
            .measure("a", report.a.value)
            .threshold("exact equality")
            .verdict(checks.a_forms_agree),
    );
    ctx.push(
        CheckRecord::new("constant consistency", REF, &(&params, p))
            .measure("theta_scaling_consistent", checks.theta_scaling_consistent)
            .measure("p_star_variant_identity", checks.p_star_variant_identity)
            .measure("exact_matches_float", checks.exact_matches_float)
            .verdict(checks.theta_scaling_consistent && checks.p_star_variant_identity && checks.exact_matches_float),
    );

    // C_{q,q,a} = 2a, exactly when a is rational.
    let a = match &report.a.exact {
        Some(s) => s.parse::<BigRational>().map_err(|e| KgError::Format(e.to_string()))?,
        None => BigRational::from_f64(report.a.value)
            .ok_or_else(|| KgError::Degenerate("a is not finite".into()))?,
    };
    let q = BigRational::from_f64(params.q).ok_or_else(|| KgError::Domain("q is not finite".into()))?;
    let two_a = BigRational::from_integer(2.into()) * &a;
    ctx.push(
        CheckRecord::new("c_pq at p = q", REF, &params)
            .measure("c_qq_equals_2a", c_pq_exact(&a, &q, &q) == two_a)
            .threshold("exact equality")
            .verdict(c_pq_exact(&a, &q, &q) == two_a),
    );

    let div = c_pq_divergence(&params, cfg.divergence_steps)?;
    let mut dt = Table::new("c_pq_divergence", &["k", "p_k", "c_pq", "literal_c_pq"]);
    for (k, ((e, v), l)) in div.exponents.iter().zip(&div.values).zip(&div.literal_values).enumerate() {
        dt.push(&[(k + 1).to_string(), e.clone(), format!("{v:e}"), format!("{l:e}")]);
    }
    ctx.table(dt);
    ctx.push(
        CheckRecord::new("c_pq divergence", REF, &(&params, cfg.divergence_steps))
            .measure("values", &div.values)
            .measure("literal_values", &div.literal_values)
            .measure("literal_strictly_increasing", div.literal_strictly_increasing)
            .threshold("strictly increasing")
            .verdict(div.strictly_increasing)
            .warn("exponents p_k = q + (p* - q)(1 - 10^-k); p*(1 - 10^-k) lies below q and is reported separately"),
    );

    ctx.push(
        CheckRecord::new("gehring constant", REF, &(&params, p))
            .measure("p", p)
            .measure("p_star", report.p_star_lemma.value)
            .measure("epsilon", report.epsilon.value)
            .measure("c_g", report.c_g.value)
            .threshold("finite and positive")
            .verdict(report.c_g.value.is_finite() && report.c_g.value > 0.0 && report.epsilon.value > 0.0)
            .warn(format!(
                "integrability gain {:e} is far below what a grid can resolve",
                report.epsilon.value
            )),
    );
    Ok(())
}
