//! Small integer utilities: primality and squarefree decomposition.
//!
//! Everything here works on machine integers by trial division. The orders
//! handled by this crate are a few hundred at most, so nothing cleverer is
//! warranted.

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) || n.is_multiple_of(p + 2) {
            return false;
        }
        p += 6;
    }
    true
}

/// Splits `n` as `s² · m` with `m` squarefree, returning `(s, m)`.
///
/// `0` decomposes as `(0, 1)`.
pub fn squarefree_decompose(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let mut rest = n;
    let mut square_root = 1u64;
    let mut squarefree = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        let mut exp = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            exp += 1;
        }
        square_root *= p.pow(exp / 2);
        if exp % 2 == 1 {
            squarefree *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // whatever is left is a prime appearing once
    squarefree *= rest;
    (square_root, squarefree)
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && squarefree_decompose(n).0 == 1
}

/// Returns `log2(n)` when `n` is a power of two.
pub fn power_of_two_exponent(n: u64) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(squarefree_decompose(8), (2, 2));
        assert_eq!(squarefree_decompose(4), (2, 1));
        assert_eq!(squarefree_decompose(7), (1, 7));
        assert_eq!(squarefree_decompose(1), (1, 1));
        assert_eq!(squarefree_decompose(72), (6, 2));
        assert_eq!(squarefree_decompose(0), (0, 1));
    }

    #[test]
    fn decompose_up_to_ten_thousand() {
        for n in 1..=10_000u64 {
            let (s, m) = squarefree_decompose(n);
            assert_eq!(s * s * m, n, "n = {n}");
            for p in 2..=m {
                if p * p > m {
                    break;
                }
                assert_ne!(m % (p * p), 0, "{m} (from {n}) has square factor {p}²");
            }
        }
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime(7919));
        assert!(!is_prime(7917));
        assert!(!is_prime(1));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(power_of_two_exponent(1), Some(0));
        assert_eq!(power_of_two_exponent(64), Some(6));
        assert_eq!(power_of_two_exponent(12), None);
        assert_eq!(power_of_two_exponent(0), None);
    }
}
