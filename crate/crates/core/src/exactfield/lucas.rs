/// `C(m, n) mod p` by Lucas' theorem: the product of digit-wise binomials in
/// base `p`, zero as soon as a digit of `n` exceeds the digit of `m`.
pub fn lucas_binomial(mut m: u64, mut n: u64, p: u64) -> u64 {
    debug_assert!(is_prime(p));
    let mut acc = 1u64;
    while n > 0 || m > 0 {
        let (mi, ni) = (m % p, n % p);
        if ni > mi {
            return 0;
        }
        acc = acc * small_binomial_mod(mi, ni, p) % p;
        m /= p;
        n /= p;
    }
    acc
}

// C(m, n) mod p for 0 <= n <= m < p; no factor of p appears.
fn small_binomial_mod(m: u64, n: u64, p: u64) -> u64 {
    let n = n.min(m - n);
    let mut num = 1u128;
    let mut den = 1u128;
    let p128 = p as u128;
    for i in 0..n {
        num = num * ((m - i) as u128) % p128;
        den = den * ((i + 1) as u128) % p128;
    }
    (num * mod_pow(den, p128 - 2, p128) % p128) as u64
}

pub(crate) fn mod_pow(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn factorial_binomial(m: u64, n: u64) -> BigUint {
        if n > m {
            return BigUint::from(0u32);
        }
        let fact = |k: u64| (1..=k).fold(BigUint::from(1u32), |a, i| a * i);
        fact(m) / (fact(n) * fact(m - n))
    }

    #[test]
    fn spec_examples() {
        assert_eq!(lucas_binomial(7, 2, 5), 1);
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(lucas_binomial(p, 1, p), 0);
            assert_eq!(lucas_binomial(17, 0, p), 1);
        }
    }

    #[test]
    fn agrees_with_factorials_up_to_forty() {
        for p in [2u64, 3, 5, 7, 11, 13, 37, 41] {
            for m in 0..=40 {
                for n in 0..=40 {
                    let want = factorial_binomial(m, n) % BigUint::from(p);
                    assert_eq!(
                        BigUint::from(lucas_binomial(m, n, p)),
                        want,
                        "C({m},{n}) mod {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
