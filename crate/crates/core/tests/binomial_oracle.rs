//! Binomial tails against exact rational enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use ionsurgery_core::resource::{binomial_cdf, binomial_tail_geq, p_onepair};

/// `p = num / den` exactly; returns P(X >= k) as a rational.
fn exact_tail(n: u64, num: u64, den: u64, k: u64) -> BigRational {
    let p = BigRational::new(BigInt::from(num), BigInt::from(den));
    let q = BigRational::one() - &p;
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    for j in 0..=n {
        if j > 0 {
            binom = binom * BigInt::from(n - j + 1) / BigInt::from(j);
        }
        if j >= k {
            let term = BigRational::from_integer(binom.clone()) * pow(&p, j) * pow(&q, n - j);
            total += term;
        }
    }
    total
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    let mut out = BigRational::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    out
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1e-300) || (got - want).abs() < 1e-300
}

#[test]
fn all_small_cases_match_enumeration() {
    let probs = [
        (1u64, 7u64),
        (1, 2),
        (3, 10),
        (49, 250),
        (9, 10),
        (1, 1000),
        (999, 1000),
    ];
    for n in 0..=30u64 {
        for &(num, den) in &probs {
            let p = num as f64 / den as f64;
            for k in 0..=n + 1 {
                let want = exact_tail(n, num, den, k).to_f64().unwrap();
                let got = binomial_tail_geq(n, p, k);
                assert!(
                    close(got, want, 1e-9) || (got - want).abs() < 1e-15,
                    "n={n} p={p} k={k}: {got} vs {want}"
                );
                if k >= 1 {
                    let lower = binomial_cdf(n, p, k - 1);
                    assert!((got + lower - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn thousand_trials_at_p_0196() {
    let want = exact_tail(1000, 196, 1000, 135).to_f64().unwrap();
    let got = binomial_tail_geq(1000, 0.196, 135);
    assert!(close(got, want, 1e-9), "{got} vs {want}");
    // tail deep on the right side of the mean
    let want = exact_tail(1000, 196, 1000, 300).to_f64().unwrap();
    let got = binomial_tail_geq(1000, 0.196, 300);
    assert!(close(got, want, 1e-9), "{got} vs {want}");
}

#[test]
fn onepair_probability_reference() {
    // 1 - (1 - 2.18e-4)^1000 evaluated exactly
    let q = BigRational::new(BigInt::from(1_000_000 - 218), BigInt::from(1_000_000));
    let want = (BigRational::one() - pow(&q, 1000)).to_f64().unwrap();
    let got = p_onepair(2.18e-4, 1000);
    assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    assert!((got - 0.195894).abs() < 1e-6);
}
