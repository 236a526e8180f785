//! Size bounds for the finite-model constructions, in arbitrary precision.

use num_bigint::BigUint;
use num_traits::{One, Pow};

/// `T_0 = 1`, `T_{l+1} = 2 K^2 m^(2l+2) T_l^(2l+3)`: the size bound for the
/// two-variable construction with `l` live equivalences, `K` realized
/// generalized types and `m` existential conjuncts.
pub fn size_bound_t(l: u32, k: u32, m: u32) -> BigUint {
    let k = BigUint::from(k);
    let m = BigUint::from(m);
    let mut t = BigUint::one();
    for i in 0..l {
        t = BigUint::from(2u32) * &k * &k * Pow::pow(&m, 2 * i + 2) * Pow::pow(&t, 2 * i + 3);
    }
    t
}

/// `M_0 = 1`, `M_l = M_{l-1}^(8n^2) n^(8n^2) (2 g^2 M_{l-1}^(8n^2) + 1)`:
/// the size bound for the general construction with `l` live equivalences,
/// formula length `n` and `g` subtree types. Grows very fast; see
/// [`within_size_bound_m`] for comparisons that stop early.
pub fn size_bound_m(l: u32, n: u32, g: u32) -> BigUint {
    m_steps(n, g).nth(l as usize).expect("infinite sequence")
}

fn m_steps(n: u32, g: u32) -> impl Iterator<Item = BigUint> {
    let e = 8 * n * n;
    let nb = Pow::pow(&BigUint::from(n), e);
    let g2 = BigUint::from(g) * BigUint::from(g);
    // Each term is computed only when requested: the one after a huge term
    // is far too large to build speculatively.
    let mut prev: Option<BigUint> = None;
    std::iter::from_fn(move || {
        let next = match &prev {
            None => BigUint::one(),
            Some(m) => {
                let p = Pow::pow(m, e);
                &p * &nb * (BigUint::from(2u32) * &g2 * &p + BigUint::one())
            }
        };
        prev = Some(next.clone());
        Some(next)
    })
}

/// Whether `size <= M_l(n, g)`. The sequence is nondecreasing, so this stops
/// at the first term reaching `size`.
pub fn within_size_bound_m(size: &BigUint, l: u32, n: u32, g: u32) -> bool {
    m_steps(n, g).take(l as usize + 1).any(|m| m >= *size)
}

/// `size_bound_t`, or `None` when some term would exceed `max_bits` bits.
pub fn size_bound_t_capped(l: u32, k: u32, m: u32, max_bits: u64) -> Option<BigUint> {
    let c = BigUint::from(2u32) * BigUint::from(k) * BigUint::from(k);
    let m = BigUint::from(m);
    let mut t = BigUint::one();
    for i in 0..l {
        let est = c.bits() + u64::from(2 * i + 2) * m.bits() + u64::from(2 * i + 3) * t.bits();
        if est > max_bits {
            return None;
        }
        t = &c * Pow::pow(&m, 2 * i + 2) * Pow::pow(&t, 2 * i + 3);
    }
    Some(t)
}

/// `size_bound_m`, or `None` when some term would exceed `max_bits` bits.
pub fn size_bound_m_capped(l: u32, n: u32, g: u32, max_bits: u64) -> Option<BigUint> {
    let e = 8 * n * n;
    let nb_bits = u64::from(e) * BigUint::from(n).bits();
    let g2 = BigUint::from(g) * BigUint::from(g);
    let mut m = BigUint::one();
    for _ in 0..l {
        let est = 2 * u64::from(e) * m.bits() + nb_bits + g2.bits() + 2;
        if est > max_bits {
            return None;
        }
        let p = Pow::pow(&m, e);
        m = &p * Pow::pow(&BigUint::from(n), e) * (BigUint::from(2u32) * &g2 * &p + BigUint::one());
    }
    Some(m)
}

/// The closed-form cap `(g^2 4 n^(8n^2))^((16n^2)^(n+1))` on `M_{k+1}`, as
/// `(base, exponent)`.
pub fn size_cap_m(n: u32, g: u32) -> (BigUint, BigUint) {
    let base = BigUint::from(g) * BigUint::from(g) * BigUint::from(4u32) * Pow::pow(&BigUint::from(n), 8 * n * n);
    let exp = Pow::pow(&BigUint::from(16 * n * n), n + 1);
    (base, exp)
}

/// Whether `x <= base^exp`, comparing bit lengths first and falling back to
/// exact powers only when those cannot decide.
pub fn at_most_power(x: &BigUint, base: &BigUint, exp: &BigUint) -> bool {
    if exp == &BigUint::from(0u32) || base == &BigUint::one() {
        return x <= &BigUint::one();
    }
    if base == &BigUint::from(0u32) {
        return x == &BigUint::from(0u32);
    }
    // base^exp >= 2^(exp * (bits(base) - 1)) and < 2^(exp * bits(base)).
    let lo = exp * BigUint::from(base.bits() - 1);
    let hi = exp * BigUint::from(base.bits());
    let xb = BigUint::from(x.bits());
    if xb <= lo {
        return true;
    }
    if xb > hi {
        return false;
    }
    let e: u32 = exp.try_into().expect("exponent small enough for an exact check");
    x <= &Pow::pow(base, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capped_bounds_agree_or_refuse() {
        for l in 0..=3 {
            for k in 0..=3 {
                for m in 0..=3 {
                    assert_eq!(size_bound_t_capped(l, k, m, 1 << 20), Some(size_bound_t(l, k, m)));
                }
            }
        }
        for (l, n, g) in [(0, 3, 3), (1, 1, 1), (1, 2, 3), (2, 1, 2)] {
            assert_eq!(size_bound_m_capped(l, n, g, 1 << 20), Some(size_bound_m(l, n, g)));
        }
        assert_eq!(size_bound_m_capped(2, 10, 3, 1 << 20), None);
        assert_eq!(size_bound_t_capped(3, 1000, 1000, 64), None);
    }

    #[test]
    fn m_base_and_printed_example() {
        assert_eq!(size_bound_m(0, 1, 1), BigUint::one());
        assert_eq!(size_bound_m(1, 1, 1), BigUint::from(3u32));
        // n = 1, g = 2: M_1 = 1 * 1 * (2*4*1 + 1) = 9; M_2 = 9^8 (8 * 9^8 + 1).
        assert_eq!(size_bound_m(1, 1, 2), BigUint::from(9u32));
        let p = Pow::pow(&BigUint::from(9u32), 8u32);
        assert_eq!(size_bound_m(2, 1, 2), &p * (BigUint::from(8u32) * &p + BigUint::one()));
    }

    #[test]
    fn m_hand_values_n2() {
        // n = 2, g = 1: M_1 = 2^32 * 3.
        assert_eq!(size_bound_m(1, 2, 1), BigUint::from(3u64 << 32));
    }

    #[test]
    fn m_within_stops_early() {
        assert!(within_size_bound_m(&BigUint::from(3u32), 1, 1, 1));
        assert!(!within_size_bound_m(&BigUint::from(4u32), 1, 1, 1));
        assert!(within_size_bound_m(&BigUint::from(1u32), 0, 5, 5));
        // M_3 for n = 40 is far too large to write out; the first term decides.
        assert!(within_size_bound_m(&BigUint::from(1u64 << 60), 3, 40, 3));
    }

    #[test]
    fn m_recurrence_below_closed_cap() {
        for k in 0..=2u32 {
            for n in 1..=2u32 {
                for g in 1..=3u32 {
                    let m = size_bound_m(k + 1, n, g);
                    let (b, e) = size_cap_m(n, g);
                    assert!(at_most_power(&m, &b, &e), "k={k} n={n} g={g}");
                }
            }
        }
    }

    #[test]
    fn at_most_power_agrees_with_exact_values() {
        for b in 2..6u32 {
            for e in 0..6u32 {
                let p = Pow::pow(&BigUint::from(b), e);
                for d in [0u32, 1] {
                    let x = &p + BigUint::from(d);
                    assert_eq!(at_most_power(&x, &BigUint::from(b), &BigUint::from(e)), x <= p);
                }
            }
        }
    }

    #[test]
    fn t_base_and_first_step() {
        assert_eq!(size_bound_t(0, 1, 1), BigUint::from(1u32));
        assert_eq!(size_bound_t(0, 7, 0), BigUint::from(1u32));
        assert_eq!(size_bound_t(1, 1, 1), BigUint::from(2u32));
    }

    #[test]
    fn t_small_values_by_hand() {
        // T_1 = 2 K^2 m^2; T_2 = 2 K^2 m^4 T_1^5.
        assert_eq!(size_bound_t(1, 2, 3), BigUint::from(72u32));
        let t1 = BigUint::from(72u32);
        let t2 = BigUint::from(2u32 * 4 * 81) * Pow::pow(&t1, 5u32);
        assert_eq!(size_bound_t(2, 2, 3), t2);
        // T_3 = 2 K^2 m^6 T_2^7 with K = m = 1: T_1 = 2, T_2 = 64, T_3 = 2 * 64^7.
        assert_eq!(size_bound_t(3, 1, 1), BigUint::from(2u64 << 42));
    }

    #[test]
    fn t_is_monotone() {
        for l in 0..=3 {
            for k in 1..=5 {
                for m in 1..=5 {
                    let v = size_bound_t(l, k, m);
                    assert!(size_bound_t(l, k + 1, m) >= v);
                    assert!(size_bound_t(l, k, m + 1) >= v);
                    assert!(size_bound_t(l + 1, k, m) >= v);
                }
            }
        }
    }

    #[test]
    fn t_does_not_overflow() {
        let v = size_bound_t(5, 5, 5);
        assert!(v.bits() > 1000);
    }
}
