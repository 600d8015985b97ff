use num_bigint::BigUint;
use num_traits::One;
use statrs::function::gamma::ln_gamma;

/// Exact binomial coefficient `C(a, b)`; zero when `b < 0` or `b > a`.
pub fn binom(a: u64, b: i64) -> BigUint {
    if b < 0 || b as u64 > a {
        return BigUint::ZERO;
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// `ln C(a, b)` through log-gamma; `-inf` where the coefficient is zero.
pub fn log_binom(a: u64, b: i64) -> f64 {
    if b < 0 || b as u64 > a {
        return f64::NEG_INFINITY;
    }
    let (a, b) = (a as f64, b as f64);
    ln_gamma(a + 1.0) - ln_gamma(b + 1.0) - ln_gamma(a - b + 1.0)
}

/// `ln(n!)` through log-gamma.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `C(a, b)` in machine integers, saturating at `u64::MAX`.
pub fn binom_u64(a: usize, b: usize) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Pascal triangle rows `0..=n`, saturating at `u64::MAX`.
#[derive(Debug, Clone)]
pub struct PascalTable {
    rows: Vec<Vec<u64>>,
}

impl PascalTable {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        for a in 0..=n {
            let mut row = vec![1u64; a + 1];
            for b in 1..a {
                row[b] = rows[a - 1][b - 1].saturating_add(rows[a - 1][b]);
            }
            rows.push(row);
        }
        Self { rows }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u64 {
        if b > a {
            0
        } else {
            self.rows[a][b]
        }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn small_values() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(4, 0), BigUint::one());
        assert_eq!(binom(3, 5), BigUint::ZERO);
        assert_eq!(binom(3, -1), BigUint::ZERO);
        assert_eq!(binom_u64(5, 2), 10);
        assert_eq!(binom_u64(3, 5), 0);
    }

    #[test]
    fn log_binom_matches_exact() {
        let exact = binom(50, 25).to_f64().unwrap().ln();
        let approx = log_binom(50, 25);
        assert!(((approx - exact) / exact).abs() < 1e-9, "{approx} vs {exact}");
        for a in 0..60u64 {
            for b in 0..=a as i64 {
                let exact = crate::numeric::ln_biguint(&binom(a, b));
                let lg = log_binom(a, b);
                assert!((lg - exact).abs() <= 1e-9 * exact.abs().max(1.0), "C({a},{b})");
            }
        }
    }

    #[test]
    fn pascal_agrees_with_multiplicative() {
        let t = PascalTable::new(40);
        for a in 0..=40 {
            for b in 0..=41 {
                assert_eq!(t.get(a, b), binom_u64(a, b));
            }
        }
    }
}
