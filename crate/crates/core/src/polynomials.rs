//! Exact integer polynomials for the anticommutator power expansion and the corner-block
//! recursion, each computed two ways: by recurrence and by a closed form in `√x`.
//!
//! Closed forms are expanded in `ℤ[s]` with `x = s²` and carried as a numerator over a
//! fixed denominator of 2. Converting back to `ℤ[x]` checks that every odd power of
//! `s` cancels and that every surviving coefficient is even.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("index {index} is below the first member ({min}) of family {family}")]
    IndexOutOfRange {
        family: Family,
        index: usize,
        min: usize,
    },
    #[error("closed form left a nonzero odd power s^{power}")]
    OddPowerSurvived { power: usize },
    #[error("closed form coefficient of s^{power} is not divisible by 2")]
    NotDivisibleByTwo { power: usize },
    #[error("recursive and closed forms of {family}_{index} disagree")]
    FormMismatch { family: Family, index: usize },
}

/// The polynomial families this crate knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `P_n`: coefficient polynomial of `fg` and `gf` in `(fg + gf)^n`.
    P,
    /// `Q_n`: coefficient polynomial of `fgf` and `gfg` in `(fg + gf)^n`.
    Q,
    /// `F_n`: northwest block of `(fg + gf)^n` as a polynomial in `D`.
    F,
    /// `A_N(a) = Σ C(2N-1, 2l-1) a^{2l}`.
    A,
    /// `B_N(a) = Σ C(2N-1, 2l) a^{2l}`.
    B,
}

impl Family {
    /// Smallest valid index.
    pub fn first_index(self) -> usize {
        match self {
            Family::F => 0,
            _ => 1,
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "P" | "p" => Some(Family::P),
            "Q" | "q" => Some(Family::Q),
            "F" | "f" => Some(Family::F),
            "A" | "a" => Some(Family::A),
            "B" | "b" => Some(Family::B),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::P => "P",
            Family::Q => "Q",
            Family::F => "F",
            Family::A => "A",
            Family::B => "B",
        };
        f.write_str(c)
    }
}

/// Dense univariate polynomial with big-integer coefficients, index = power.
///
/// Always canonical: no trailing zero coefficients, so the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{k}")?,
            }
        }
        Ok(())
    }
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c);
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(BigInt::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division of every coefficient by 2, or the first offending power.
    pub fn halve(&self) -> Result<Self, PolyError> {
        let two = BigInt::from(2);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let (q, r) = c.div_rem(&two);
            if !r.is_zero() {
                return Err(PolyError::NotDivisibleByTwo { power: k });
            }
            out.push(q);
        }
        Ok(Self::from_coeffs(out))
    }

    /// Horner evaluation in double precision.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Decimal strings, index = power. The zero polynomial exports as `["0"]`.
    pub fn to_decimal_strings(&self) -> Vec<String> {
        if self.is_zero() {
            return vec!["0".to_string()];
        }
        self.coeffs.iter().map(|c| c.to_str_radix(10)).collect()
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntPolynomial::from_coeffs(out)
    }
}

/// Half-integer polynomial in `s = √x`, stored as `numerator / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtRingPolynomial {
    numerator: IntPolynomial,
}

impl SqrtRingPolynomial {
    /// The value `numerator(s) / 2`.
    pub fn from_numerator(numerator: IntPolynomial) -> Self {
        Self { numerator }
    }

    pub fn numerator(&self) -> &IntPolynomial {
        &self.numerator
    }

    /// Rewrites `numerator(s) / 2` as an integer polynomial in `x = s²`.
    pub fn into_x_polynomial(self) -> Result<IntPolynomial, PolyError> {
        let halved = self.numerator.halve()?;
        let mut out = Vec::with_capacity(halved.coeffs.len() / 2 + 1);
        for (k, c) in halved.coeffs.into_iter().enumerate() {
            if k % 2 == 1 {
                if !c.is_zero() {
                    return Err(PolyError::OddPowerSurvived { power: k });
                }
            } else {
                out.push(c);
            }
        }
        Ok(IntPolynomial::from_coeffs(out))
    }
}

/// `c_0 + c_1 s + ...` from small integers.
fn s_poly(coeffs: &[i64]) -> IntPolynomial {
    IntPolynomial::from_i64(coeffs)
}

fn check_index(family: Family, index: usize) -> Result<(), PolyError> {
    let min = family.first_index();
    if index < min {
        Err(PolyError::IndexOutOfRange { family, index, min })
    } else {
        Ok(())
    }
}

/// `(P_n, Q_n)` from `P_{n+1} = x P_n + x Q_n`, `Q_{n+1} = P_n + x Q_n`, `P_1 = x`, `Q_1 = 0`.
pub fn pq_recursive(n: usize) -> Result<(IntPolynomial, IntPolynomial), PolyError> {
    check_index(Family::P, n)?;
    let mut p = IntPolynomial::from_i64(&[0, 1]);
    let mut q = IntPolynomial::zero();
    for _ in 1..n {
        let next_p = (&p + &q).shift(1);
        let next_q = &p + &q.shift(1);
        p = next_p;
        q = next_q;
    }
    Ok((p, q))
}

/// `(P_n, Q_n)` from the closed forms with `m = n - 1`:
/// `P_n = (x/2)[(x+√x)^m + (x-√x)^m]`, `Q_n = (√x/2)[(x+√x)^m - (x-√x)^m]`.
pub fn pq_closed_unchecked(n: usize) -> Result<(IntPolynomial, IntPolynomial), PolyError> {
    check_index(Family::P, n)?;
    let m = (n - 1) as u32;
    let plus = s_poly(&[0, 1, 1]).pow(m);
    let minus = s_poly(&[0, -1, 1]).pow(m);
    let p = SqrtRingPolynomial::from_numerator((&plus + &minus).shift(2)).into_x_polynomial()?;
    let q = SqrtRingPolynomial::from_numerator((&plus - &minus).shift(1)).into_x_polynomial()?;
    Ok((p, q))
}

/// Closed-form `(P_n, Q_n)`, confirmed coefficient-for-coefficient against the recursion.
pub fn pq_closed(n: usize) -> Result<(IntPolynomial, IntPolynomial), PolyError> {
    let closed = pq_closed_unchecked(n)?;
    let recursive = pq_recursive(n)?;
    if closed.0 != recursive.0 {
        return Err(PolyError::FormMismatch {
            family: Family::P,
            index: n,
        });
    }
    if closed.1 != recursive.1 {
        return Err(PolyError::FormMismatch {
            family: Family::Q,
            index: n,
        });
    }
    Ok(closed)
}

/// `(P_{2N}, Q_{2N})` as explicit binomial sums:
/// `P_{2N} = Σ_{l=1..N} C(2N-1, 2l-1) x^{N+l}`, `Q_{2N} = Σ_{l=0..N-1} C(2N-1, 2l) x^{N+l}`.
pub fn pq_even_sums(big_n: usize) -> Result<(IntPolynomial, IntPolynomial), PolyError> {
    check_index(Family::P, big_n)?;
    let top = BigInt::from(2 * big_n - 1);
    let mut p = vec![BigInt::zero(); 2 * big_n + 1];
    let mut q = vec![BigInt::zero(); 2 * big_n + 1];
    for l in 1..=big_n {
        p[big_n + l] = binomial(top.clone(), BigInt::from(2 * l - 1));
    }
    for l in 0..big_n {
        q[big_n + l] = binomial(top.clone(), BigInt::from(2 * l));
    }
    Ok((IntPolynomial::from_coeffs(p), IntPolynomial::from_coeffs(q)))
}

/// `F_n` from `F_{n+1} = 2x F_n + (x - x²) F_{n-1}`, `F_0 = 1`, `F_1 = 2x`.
pub fn f_recursive(n: usize) -> IntPolynomial {
    let two_x = IntPolynomial::from_i64(&[0, 2]);
    let x_minus_x2 = IntPolynomial::from_i64(&[0, 1, -1]);
    let mut prev = IntPolynomial::from_i64(&[1]);
    if n == 0 {
        return prev;
    }
    let mut cur = two_x.clone();
    for _ in 1..n {
        let next = &(&two_x * &cur) + &(&x_minus_x2 * &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `F_n = (1/2) x^{n/2} [(√x + 1)^{n+1} - (√x - 1)^{n+1}]`, expanded in `ℤ[s]`.
pub fn f_closed_unchecked(n: usize) -> Result<IntPolynomial, PolyError> {
    let k = (n + 1) as u32;
    let diff = &s_poly(&[1, 1]).pow(k) - &s_poly(&[-1, 1]).pow(k);
    SqrtRingPolynomial::from_numerator(diff.shift(n)).into_x_polynomial()
}

/// Closed-form `F_n`, confirmed against the recursion.
pub fn f_closed(n: usize) -> Result<IntPolynomial, PolyError> {
    let closed = f_closed_unchecked(n)?;
    if closed != f_recursive(n) {
        return Err(PolyError::FormMismatch {
            family: Family::F,
            index: n,
        });
    }
    Ok(closed)
}

/// `(A_N, B_N)` in the variable `a`, as binomial sums.
pub fn ab_sums(big_n: usize) -> Result<(IntPolynomial, IntPolynomial), PolyError> {
    check_index(Family::A, big_n)?;
    let top = BigInt::from(2 * big_n - 1);
    let mut a = vec![BigInt::zero(); 2 * big_n + 1];
    let mut b = vec![BigInt::zero(); 2 * big_n + 1];
    for l in 1..=big_n {
        a[2 * l] = binomial(top.clone(), BigInt::from(2 * l - 1));
    }
    for l in 0..big_n {
        b[2 * l] = binomial(top.clone(), BigInt::from(2 * l));
    }
    Ok((IntPolynomial::from_coeffs(a), IntPolynomial::from_coeffs(b)))
}

/// `A_N = (a/2)[(1+a)^{2N-1} - (1-a)^{2N-1}]`, `B_N = (1/2)[(1+a)^{2N-1} + (1-a)^{2N-1}]`.
pub fn ab_closed(big_n: usize) -> Result<(IntPolynomial, IntPolynomial), PolyError> {
    check_index(Family::A, big_n)?;
    let k = (2 * big_n - 1) as u32;
    let plus = IntPolynomial::from_i64(&[1, 1]).pow(k);
    let minus = IntPolynomial::from_i64(&[1, -1]).pow(k);
    let a = (&plus - &minus).shift(1).halve()?;
    let b = (&plus + &minus).halve()?;
    Ok((a, b))
}

/// `(A_N, B_N)` in sum form, after confirming both closed forms agree exactly.
pub fn ab_polys(big_n: usize) -> Result<(IntPolynomial, IntPolynomial), PolyError> {
    let sums = ab_sums(big_n)?;
    let closed = ab_closed(big_n)?;
    if sums.0 != closed.0 {
        return Err(PolyError::FormMismatch {
            family: Family::A,
            index: big_n,
        });
    }
    if sums.1 != closed.1 {
        return Err(PolyError::FormMismatch {
            family: Family::B,
            index: big_n,
        });
    }
    Ok(sums)
}

/// One member of a family, computed by its primary route, plus whether the
/// independent route reproduced it exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub family: Family,
    pub index: usize,
    pub polynomial: IntPolynomial,
    pub forms_agree: bool,
}

/// Computes `family_index` by recursion (or binomial sum for `A`/`B`) and checks it
/// against the closed form.
pub fn family_member(family: Family, index: usize) -> Result<FamilyMember, PolyError> {
    check_index(family, index)?;
    let (polynomial, forms_agree) = match family {
        Family::P | Family::Q => {
            let (p, q) = pq_recursive(index)?;
            let (cp, cq) = pq_closed_unchecked(index)?;
            if family == Family::P {
                let agree = p == cp;
                (p, agree)
            } else {
                let agree = q == cq;
                (q, agree)
            }
        }
        Family::F => {
            let f = f_recursive(index);
            let agree = f_closed_unchecked(index)? == f;
            (f, agree)
        }
        Family::A | Family::B => {
            let (a, b) = ab_sums(index)?;
            let (ca, cb) = ab_closed(index)?;
            if family == Family::A {
                let agree = a == ca;
                (a, agree)
            } else {
                let agree = b == cb;
                (b, agree)
            }
        }
    };
    Ok(FamilyMember {
        family,
        index,
        polynomial,
        forms_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn canonical_form_trims_trailing_zeros() {
        let p = poly(&[1, 2, 0, 0]);
        assert_eq!(p.coefficients().len(), 2);
        assert_eq!(p.degree(), Some(1));
        assert!(poly(&[0, 0]).is_zero());
        assert_eq!(poly(&[0]).degree(), None);
        assert_eq!(&poly(&[1, 1]) - &poly(&[1, 1]), IntPolynomial::zero());
    }

    #[test]
    fn pq_recursive_small_cases() {
        assert_eq!(pq_recursive(1).unwrap(), (poly(&[0, 1]), IntPolynomial::zero()));
        assert_eq!(pq_recursive(2).unwrap(), (poly(&[0, 0, 1]), poly(&[0, 1])));
        let (p4, q4) = pq_recursive(4).unwrap();
        assert_eq!(p4, poly(&[0, 0, 0, 3, 1]));
        assert_eq!(q4, poly(&[0, 0, 1, 3]));
    }

    #[test]
    fn pq_zero_index_is_rejected() {
        assert!(matches!(
            pq_recursive(0),
            Err(PolyError::IndexOutOfRange { index: 0, .. })
        ));
        assert!(pq_closed(0).is_err());
        assert!(ab_polys(0).is_err());
    }

    #[test]
    fn pq_closed_small_cases() {
        assert_eq!(pq_closed(1).unwrap(), (poly(&[0, 1]), IntPolynomial::zero()));
        assert_eq!(pq_closed(2).unwrap(), (poly(&[0, 0, 1]), poly(&[0, 1])));
        let (p4, q4) = pq_closed(4).unwrap();
        assert_eq!(p4, poly(&[0, 0, 0, 3, 1]));
        assert_eq!(q4, poly(&[0, 0, 1, 3]));
    }

    #[test]
    fn even_index_sums_match_recursion() {
        for big_n in 1..=40 {
            assert_eq!(pq_even_sums(big_n).unwrap(), pq_recursive(2 * big_n).unwrap());
        }
    }

    #[test]
    fn f_small_cases() {
        assert_eq!(f_recursive(0), poly(&[1]));
        assert_eq!(f_recursive(1), poly(&[0, 2]));
        assert_eq!(f_recursive(2), poly(&[0, 1, 3]));
        assert_eq!(f_recursive(3), poly(&[0, 0, 4, 4]));
        for n in 0..=3 {
            assert_eq!(f_closed(n).unwrap(), f_recursive(n));
        }
    }

    #[test]
    fn ab_small_cases() {
        assert_eq!(ab_polys(1).unwrap(), (poly(&[0, 0, 1]), poly(&[1])));
        assert_eq!(ab_polys(2).unwrap(), (poly(&[0, 0, 3, 0, 1]), poly(&[1, 0, 3])));
    }

    #[test]
    fn sqrt_ring_conversion_rejects_bad_input() {
        // s / 2 has an odd power.
        let odd = SqrtRingPolynomial::from_numerator(poly(&[0, 2]));
        assert_eq!(
            odd.into_x_polynomial(),
            Err(PolyError::OddPowerSurvived { power: 1 })
        );
        // s^2 / 2 is not integral.
        let half = SqrtRingPolynomial::from_numerator(poly(&[0, 0, 1]));
        assert_eq!(
            half.into_x_polynomial(),
            Err(PolyError::NotDivisibleByTwo { power: 2 })
        );
        let ok = SqrtRingPolynomial::from_numerator(poly(&[4, 0, 6]));
        assert_eq!(ok.into_x_polynomial().unwrap(), poly(&[2, 3]));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(f_recursive(2).eval_f64(1.0), 4.0);
        assert_eq!(IntPolynomial::zero().eval_f64(3.7), 0.0);
        let (p4, _) = pq_recursive(4).unwrap();
        assert_eq!(p4.eval_f64(0.5), 0.4375);
    }

    #[test]
    fn decimal_export() {
        assert_eq!(f_recursive(2).to_decimal_strings(), vec!["0", "1", "3"]);
        assert_eq!(IntPolynomial::zero().to_decimal_strings(), vec!["0"]);
        let (a2, _) = ab_polys(2).unwrap();
        assert_eq!(a2.to_decimal_strings(), vec!["0", "0", "3", "0", "1"]);
    }

    #[test]
    fn coefficients_exceed_machine_words() {
        // C(199, 99) is far beyond u64.
        let (a, _) = ab_polys(100).unwrap();
        let c = a.coeff(100);
        assert!(c.bits() > 64);
        assert_eq!(c, binomial(BigInt::from(199), BigInt::from(99)));
    }

    #[test]
    fn family_member_reports_agreement() {
        for fam in [Family::P, Family::Q, Family::F, Family::A, Family::B] {
            let m = family_member(fam, 5).unwrap();
            assert!(m.forms_agree, "{fam}");
        }
        assert_eq!(family_member(Family::Q, 1).unwrap().polynomial, IntPolynomial::zero());
        assert!(family_member(Family::F, 0).unwrap().forms_agree);
        assert!(family_member(Family::P, 0).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(format!("{}", f_recursive(2)), "1x + 3x^2");
        assert_eq!(format!("{}", IntPolynomial::zero()), "0");
    }
}
