//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! carrying ~106 significand bits.
//!
//! The phase of `n^{-it}` is `(-t·ln n) mod 2π`. For block starts with
//! thousands of digits, `t·ln n` can reach 10^5 and beyond, so plain `f64`
//! would lose most of the angular information to rounding before the
//! reduction even starts. Everything phase-critical — `ln n`, the product
//! `t·ln n`, and the reduction mod 2π — runs through this module, keeping
//! the reduced angle accurate to well below the advertised 2^-40 bound.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// 2π = TAU.hi + TAU.lo + η with |η| < 6e-33.
pub(crate) const TAU: Dd = Dd {
    hi: std::f64::consts::TAU,
    lo: 2.4492935982947064e-16,
};

/// ln 2 = LN2.hi + LN2.lo + η with |η| < 6e-34.
pub(crate) const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // assumes |a| >= |b| or a == 0
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = f64::mul_add(a, b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }
}

/// ln(m) for a double-double m in (0.5, 3): 2·atanh((m-1)/(m+1)).
///
/// For m in [1, 2) the series ratio is below 1/9, so 40 terms leave a tail
/// under 2^-110 relative.
fn ln_near_one(m: Dd) -> Dd {
    let s = m.add_f64(-1.0).div(m.add_f64(1.0));
    let s2 = s.mul(s);
    let mut power = Dd::ONE;
    let mut acc = Dd::ONE;
    for j in 1..40u32 {
        power = power.mul(s2);
        // divide by the exact integer; a rounded 1/(2j+1) multiplier would
        // poison every term with a 2^-53 relative error
        let contrib = power.div(Dd::from_f64((2 * j + 1) as f64));
        acc = acc.add(contrib);
        if contrib.hi.abs() < 1e-36 {
            break;
        }
    }
    acc.mul(s).mul_f64(2.0)
}

/// ln(x) for a finite f64 x >= 1.
pub(crate) fn ln_f64(x: f64) -> Dd {
    debug_assert!(x >= 1.0 && x.is_finite());
    if x == 1.0 {
        return Dd::ZERO;
    }
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1023u64 << 52));
    LN2.mul_f64(e as f64).add(ln_near_one(Dd::from_f64(m)))
}

/// Natural log of a positive BigUint.
///
/// Takes the top 106 bits exactly; the dropped tail perturbs ln n by at most
/// 2^-105, so the result is accurate to ~2^-100 · max(1, ln n) absolute.
pub(crate) fn big_ln(n: &BigUint) -> Dd {
    let bits = n.bits();
    assert!(bits >= 1, "big_ln of zero");
    if bits <= 53 {
        return ln_f64(n.to_f64().expect("fits in f64"));
    }
    let take = bits.min(106);
    let shift = bits - take;
    let top = (n >> shift).to_u128().expect("top bits fit u128");
    let hi = top as f64;
    let lo = (top as i128 - hi as i128) as f64;
    let (h, l) = quick_two_sum(hi, lo);
    // scale top into [1, 2): divide by 2^(take-1), exact
    let scale = exp2i(1 - take as i64);
    let m = Dd {
        hi: h * scale,
        lo: l * scale,
    };
    LN2.mul_f64((bits - 1) as f64).add(ln_near_one(m))
}

/// x mod 2π reduced into [0, 2π).
pub(crate) fn reduce_two_pi(x: Dd) -> Dd {
    let k = (x.hi / TAU.hi).round();
    let mut r = x.sub(TAU.mul_f64(k));
    while r.hi < 0.0 {
        r = r.add(TAU);
    }
    loop {
        let d = r.sub(TAU);
        if d.hi < 0.0 {
            break;
        }
        r = d;
    }
    r
}

/// round(e^u) as an exact integer, for u >= ~0.6 (result >= 2).
///
/// Relative accuracy of the real exponential is ~2^-98, so the returned
/// integer is the correctly rounded e^u except when e^u sits within
/// e^u·2^-98 of a half-integer — and any neighbour that close is equally
/// valid for the phase solve that calls this.
pub(crate) fn exp_round(u: Dd) -> BigUint {
    debug_assert!(u.hi > 0.5);
    let mut k = (u.hi / LN2.hi).floor() as i64;
    let mut v = u.sub(LN2.mul_f64(k as f64));
    while v.hi < 0.0 {
        v = v.add(LN2);
        k -= 1;
    }
    loop {
        let d = v.sub(LN2);
        if d.hi < 0.0 {
            break;
        }
        v = d;
        k += 1;
    }
    debug_assert!(k >= 0);
    // e^v by series on v/16, squared back up
    let w = Dd {
        hi: v.hi / 16.0,
        lo: v.lo / 16.0,
    };
    let mut term = Dd::ONE;
    let mut acc = Dd::ONE;
    for j in 1..30u32 {
        term = term.mul(w).div(Dd::from_f64(j as f64));
        acc = acc.add(term);
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    let mut m = acc;
    for _ in 0..4 {
        m = m.mul(m);
    }
    if m.hi >= 2.0 {
        m = Dd {
            hi: m.hi * 0.5,
            lo: m.lo * 0.5,
        };
        k += 1;
    }
    // integer mantissa M ≈ m·2^104 (m.hi·2^104 is exact: 52 fractional bits)
    let p_hi = m.hi * exp2i(104);
    let p_lo = m.lo * exp2i(104);
    let mantissa = p_hi as i128 + p_lo.round() as i128;
    debug_assert!(mantissa > 0);
    if k >= 104 {
        BigUint::from(mantissa as u128) << (k - 104) as usize
    } else {
        let shift = (104 - k) as usize;
        let rounded = (mantissa + (1i128 << (shift - 1))) >> shift;
        BigUint::from(rounded.max(1) as u128)
    }
}

/// 2^e as f64, exact over the finite range, clamped to subnormal/infinity.
pub(crate) fn exp2i(e: i64) -> f64 {
    if e >= 1024 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// n as f64 (infinity when n > f64::MAX).
pub(crate) fn big_to_f64(n: &BigUint) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// 1/n rounded to nearest; 0.0 once n exceeds 1/f64::MIN_POSITIVE-ish.
pub(crate) fn recip(n: &BigUint) -> f64 {
    let x = big_to_f64(n);
    if x.is_finite() {
        1.0 / x
    } else {
        0.0
    }
}

/// A certified upper bound on 1/n (always positive for finite n).
pub(crate) fn recip_upper(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1020 {
        let x = big_to_f64(n);
        (1.0 / x).next_up().next_up()
    } else if bits <= 1074 {
        // n >= 2^(bits-1), so 1/n <= 2^(1-bits)
        exp2i(1 - bits as i64)
    } else {
        f64::from_bits(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_basic_arithmetic() {
        let a = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let three_a = a.mul_f64(3.0);
        assert!((three_a.to_f64() - 1.0).abs() < 1e-30);

        let x = Dd::from_f64(1e16).add_f64(1.0);
        let y = x.add_f64(-1e16);
        assert_eq!(y.to_f64(), 1.0);
    }

    #[test]
    fn ln_matches_f64_for_moderate_inputs() {
        for n in [2u64, 3, 10, 97, 1_000_003, 1 << 40] {
            let got = big_ln(&BigUint::from(n)).to_f64();
            let want = (n as f64).ln();
            assert!(
                (got - want).abs() <= want.abs() * 1e-15 + 1e-15,
                "ln({n}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn ln_of_one_is_zero() {
        assert_eq!(big_ln(&BigUint::from(1u32)).to_f64(), 0.0);
    }

    #[test]
    fn big_ln_at_huge_arguments() {
        // ln(10^40), reference value to 25 digits: 92.10340371976182736071966
        let n = BigUint::from(10u32).pow(40);
        let got = big_ln(&n);
        let want_hi = 92.10340371976183;
        assert!(
            (got.to_f64() - want_hi).abs() < 1e-12,
            "got {}",
            got.to_f64()
        );
    }

    #[test]
    fn reduce_folds_into_range() {
        for x in [0.0, 1.0, 6.25, 6.5, 1e6, -1.0, -1e6, 12345.678] {
            let r = reduce_two_pi(Dd::from_f64(x)).to_f64();
            assert!((0.0..TAU.hi + 1e-12).contains(&r), "x={x} r={r}");
        }
    }

    #[test]
    fn exp_round_inverts_ln() {
        for n in [2u64, 3, 536, 99_991, 1 << 52] {
            let u = big_ln(&BigUint::from(n));
            assert_eq!(exp_round(u), BigUint::from(n));
        }
        // beyond ~2^100 an exact roundtrip would need ln accurate to under
        // 1/n; what the phase solve needs is ln(exp_round(u)) ≈ u
        let n = BigUint::from(7u32).pow(100);
        let u = big_ln(&n);
        let back = big_ln(&exp_round(u));
        assert!(back.sub(u).to_f64().abs() < 1e-25);
    }

    #[test]
    fn recip_upper_is_an_upper_bound() {
        for bits in [10u64, 53, 300, 1021, 1060, 1074, 1100, 4000] {
            let n = BigUint::from(1u32) << (bits as usize - 1);
            let ru = recip_upper(&n);
            assert!(ru > 0.0);
            // compare against 2^(1-bits) rationally: ru must be >= true 1/n
            let true_recip = exp2i(1 - bits as i64);
            assert!(ru >= true_recip * 0.999_999, "bits={bits}");
        }
    }
}
