//! Exactness and structural laws of the polynomial families over the full index range.

use num_bigint::BigInt;
use num_integer::binomial;
use projpair::polynomials::{
    ab_closed, ab_polys, ab_sums, f_closed, f_recursive, pq_closed, pq_even_sums, pq_recursive,
    IntPolynomial,
};

#[test]
fn pq_forms_agree_up_to_200() {
    for n in 1..=200 {
        pq_closed(n).unwrap_or_else(|e| panic!("n = {n}: {e}"));
    }
}

#[test]
fn f_forms_agree_up_to_200() {
    for n in 0..=200 {
        f_closed(n).unwrap_or_else(|e| panic!("n = {n}: {e}"));
    }
}

#[test]
fn ab_forms_agree_up_to_100() {
    for big_n in 1..=100 {
        ab_polys(big_n).unwrap_or_else(|e| panic!("N = {big_n}: {e}"));
    }
}

#[test]
fn even_index_sums_agree_up_to_100() {
    for big_n in 1..=100 {
        assert_eq!(pq_even_sums(big_n).unwrap(), pq_recursive(2 * big_n).unwrap());
    }
}

#[test]
fn degree_laws_and_signs() {
    for n in 1..=120 {
        let (p, q) = pq_recursive(n).unwrap();
        assert_eq!(p.degree(), Some(n));
        if n >= 2 {
            assert_eq!(q.degree(), Some(n - 1));
        }
        assert!(p.all_nonnegative() && q.all_nonnegative());
    }
    for n in 0..=120 {
        let f = f_recursive(n);
        assert_eq!(f.degree(), Some(n));
        assert!(f.all_nonnegative(), "F_{n}");
    }
}

#[test]
fn values_at_one() {
    for n in 1..=60usize {
        let f = f_recursive(n);
        // F_n(1) = ½[2^{n+1} - 0] = 2^n.
        let at_one: BigInt = f.coefficients().iter().sum();
        assert_eq!(at_one, BigInt::from(2).pow(n as u32));
        // (fg + gf)^n at f = g = P gives (2P)^n, so P_n(1)·2 + Q_n(1)·2 = 2^n.
        let (p, q) = pq_recursive(n).unwrap();
        let total: BigInt = p.coefficients().iter().chain(q.coefficients()).sum();
        assert_eq!(total * 2, BigInt::from(2).pow(n as u32));
    }
}

#[test]
fn a_n_scalar_consistency() {
    for a in [0.1f64, 0.5, 0.9] {
        for big_n in 1..=30 {
            let (poly_a, poly_b) = ab_sums(big_n).unwrap();
            let k = (2 * big_n - 1) as i32;
            let closed_a = a / 2.0 * ((1.0 + a).powi(k) - (1.0 - a).powi(k));
            let closed_b = 0.5 * ((1.0 + a).powi(k) + (1.0 - a).powi(k));
            let ea = poly_a.eval_f64(a);
            let eb = poly_b.eval_f64(a);
            assert!((ea - closed_a).abs() <= 1e-10 * closed_a.abs(), "A_{big_n}({a})");
            assert!((eb - closed_b).abs() <= 1e-10 * closed_b.abs(), "B_{big_n}({a})");
        }
    }
}

#[test]
fn upper_bound_algebra_collapses() {
    // 2a^{2N-1} A_N(a) + 2a^{2N} B_N(a) = 2 a^{2N} (1+a)^{2N-1}, exactly, as polynomials.
    for big_n in 1..=25 {
        let (a_n, b_n) = ab_closed(big_n).unwrap();
        let two = BigInt::from(2);
        let lhs = &a_n.shift(2 * big_n - 1).scale(&two) + &b_n.shift(2 * big_n).scale(&two);
        let rhs = IntPolynomial::from_i64(&[1, 1])
            .pow((2 * big_n - 1) as u32)
            .shift(2 * big_n)
            .scale(&two);
        assert_eq!(lhs, rhs, "N = {big_n}");
    }
}

#[test]
fn binomial_sum_entries() {
    let (p, q) = pq_even_sums(3).unwrap();
    // P_6 = C(5,1)x^4 + C(5,3)x^5 + C(5,5)x^6, Q_6 = C(5,0)x^3 + C(5,2)x^4 + C(5,4)x^5.
    assert_eq!(p, IntPolynomial::from_i64(&[0, 0, 0, 0, 5, 10, 1]));
    assert_eq!(q, IntPolynomial::from_i64(&[0, 0, 0, 1, 10, 5]));
    assert_eq!(p.coeff(5), binomial(BigInt::from(5), BigInt::from(3)));
}
