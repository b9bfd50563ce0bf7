use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::decision::SAMPLING_CONSTANT;

/// Largest `m` handled with exact rationals.
pub const EXACT_BOUND_LIMIT: u64 = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub m: u64,
    pub q: f64,
    pub eps: f64,
    /// `⌈q·m·(1 + ε)⌉`.
    pub target: u64,
    /// `P[Bin(m, q) = target]`.
    pub exact_probability: f64,
    pub log_exact_probability: f64,
    /// `c·q·m^{-3/2}·exp(-ε²qm/(1-q))`.
    pub closed_form_bound: f64,
    pub log_closed_form_bound: f64,
    pub exact_arithmetic: bool,
    pub holds: bool,
}

/// Decimal value of `x` as printed, so `0.2` becomes exactly `1/5`.
pub(crate) fn decimal_rational(x: f64) -> BigRational {
    let text = format!("{x}");
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let numer: BigInt = format!("{whole}{frac}").parse().expect("finite float prints as digits");
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(numer, denom);
    if negative {
        -r
    } else {
        r
    }
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64 bits").ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_rational(r: &BigRational) -> f64 {
    let numer = r.numer().to_biguint().expect("positive");
    let denom = r.denom().to_biguint().expect("positive");
    ln_big(&numer) - ln_big(&denom)
}

fn binomial(m: u64, k: u64) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (m - i) / (i + 1);
    }
    c
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let next = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - next) + t } else { (t - next) + sum };
        sum = next;
    }
    sum + comp
}

/// Compares the binomial point mass at `⌈qm(1+ε)⌉` against the sampling lower
/// bound. Exact rationals up to `m = 200`, compensated log-space beyond.
pub fn check_sampling_bound(m: u64, q: f64, eps: f64) -> Result<BoundCheck, VerifyError> {
    if m == 0 {
        return Err(VerifyError::Parameter("m must be at least 1".into()));
    }
    if !(q.is_finite() && q > 0.0 && q < 1.0) {
        return Err(VerifyError::Parameter(format!("q must lie in (0, 1), got {q}")));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(VerifyError::Parameter(format!("eps must be nonnegative, got {eps}")));
    }
    let qr = decimal_rational(q);
    let er = decimal_rational(eps);
    let one = BigRational::one();
    if &qr * (&one + &er) >= one {
        return Err(VerifyError::Parameter(format!("eps must be below (1 - q)/q, got eps={eps}, q={q}")));
    }
    let mean = &qr * BigRational::from_integer(BigInt::from(m)) * (&one + &er);
    let target = mean.ceil().to_integer().to_u64().expect("target is at most m");

    let mf = m as f64;
    let log_bound = SAMPLING_CONSTANT.ln() + q.ln() - 1.5 * mf.ln() - eps * eps * q * mf / (1.0 - q);
    let bound = log_bound.exp();

    if m <= EXACT_BOUND_LIMIT {
        let comp = &one - &qr;
        let mass = BigRational::from_integer(BigInt::from(binomial(m, target)))
            * num_traits::pow(qr.clone(), target as usize)
            * num_traits::pow(comp, (m - target) as usize);
        let log_mass = ln_rational(&mass);
        let holds = if bound.is_normal() {
            // a slightly inflated bound keeps the float evaluation error on the safe side
            let threshold = BigRational::from_float(bound * (1.0 + 1e-12)).expect("finite");
            mass >= threshold
        } else {
            log_mass >= log_bound + 1e-9 * log_bound.abs().max(1.0)
        };
        return Ok(BoundCheck {
            m,
            q,
            eps,
            target,
            exact_probability: mass.to_f64().unwrap_or(0.0),
            log_exact_probability: log_mass,
            closed_form_bound: bound,
            log_closed_form_bound: log_bound,
            exact_arithmetic: true,
            holds,
        });
    }

    let k = target;
    let log_binom = compensated_sum((1..=k).map(|i| ((m - k + i) as f64).ln() - (i as f64).ln()));
    let log_mass = compensated_sum(
        [log_binom, k as f64 * q.ln(), (m - k) as f64 * (-q).ln_1p()].into_iter(),
    );
    let holds = log_mass >= log_bound + 1e-9 * log_bound.abs().max(1.0);
    Ok(BoundCheck {
        m,
        q,
        eps,
        target,
        exact_probability: log_mass.exp(),
        log_exact_probability: log_mass,
        closed_form_bound: bound,
        log_closed_form_bound: log_bound,
        exact_arithmetic: false,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn decimal_conversion_is_exact() {
        assert_eq!(decimal_rational(0.2), BigRational::new(1.into(), 5.into()));
        assert_eq!(decimal_rational(3.0), BigRational::from_integer(3.into()));
        assert_eq!(decimal_rational(-0.125), BigRational::new((-1).into(), 8.into()));
    }

    #[test]
    fn hundred_fair_coins_at_sixty() {
        let b = check_sampling_bound(100, 0.5, 0.2).unwrap();
        assert_eq!(b.target, 60);
        // C(100, 60) / 2^100
        assert_relative_eq!(b.exact_probability, 0.010_843_866_711_637_987, max_relative = 1e-12);
        let expected_bound = SAMPLING_CONSTANT * 0.5 * 1e-3 * (-4.0f64).exp();
        assert_relative_eq!(b.closed_form_bound, expected_bound, max_relative = 1e-12);
        assert!(b.holds && b.exact_arithmetic);
    }

    #[test]
    fn single_trial() {
        let b = check_sampling_bound(1, 0.5, 0.0).unwrap();
        assert_eq!(b.target, 1);
        assert_eq!(b.exact_probability, 0.5);
        assert!(b.holds);
    }

    #[test]
    fn eps_at_the_open_end_is_rejected() {
        assert!(check_sampling_bound(10, 0.5, 1.0).is_err());
        assert!(check_sampling_bound(10, 0.2, 4.0).is_err());
        assert!(check_sampling_bound(10, 0.0, 0.1).is_err());
        assert!(check_sampling_bound(0, 0.5, 0.1).is_err());
    }

    #[test]
    fn log_path_agrees_with_exact_path_near_the_limit() {
        let exact = check_sampling_bound(200, 0.3, 0.1).unwrap();
        let k = exact.target;
        let log_binom = compensated_sum((1..=k).map(|i| ((200 - k + i) as f64).ln() - (i as f64).ln()));
        let log_mass = log_binom + k as f64 * 0.3f64.ln() + (200 - k) as f64 * 0.7f64.ln();
        assert_relative_eq!(exact.log_exact_probability, log_mass, max_relative = 1e-12);
        let big = check_sampling_bound(5000, 0.3, 0.1).unwrap();
        assert!(!big.exact_arithmetic && big.holds);
    }

    #[test]
    fn tiny_bound_uses_log_comparison() {
        let b = check_sampling_bound(200, 0.01, 90.0).unwrap();
        assert!(!b.exact_arithmetic || !b.closed_form_bound.is_normal());
        assert!(b.holds);
    }
}
