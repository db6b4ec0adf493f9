//! Exact integer helpers: binomials, rounding windows, admissibility.

/// Binomial coefficient; zero when `k > n`. Panics on overflow of `u64`.
pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

/// Whether `floor(num/den) <= x <= ceil(num/den)`.
pub fn in_window(x: u64, num: u64, den: u64) -> bool {
    num / den <= x && x <= num.div_ceil(den)
}

/// `(n, r, lambda)` is `h`-admissible when `h | r n` and `r | lambda C(n-1, h-1)`.
pub fn is_admissible(n: u64, r: u64, lambda: u64, h: u64) -> bool {
    if r == 0 || h == 0 || n == 0 {
        return false;
    }
    (r * n).is_multiple_of(h) && (lambda * binom(n - 1, h - 1)).is_multiple_of(r)
}

/// Number of classes of an `r`-factorization of `lambda K_n^h`.
pub fn class_count(n: u64, r: u64, lambda: u64, h: u64) -> Option<u64> {
    is_admissible(n, r, lambda, h).then(|| lambda * binom(n - 1, h - 1) / r)
}

/// Whether `n >= c * m` for a decimal constant `c = num / 10^6`.
pub fn at_least_scaled(n: u64, m: u64, num_micro: u64) -> bool {
    n as u128 * 1_000_000 >= m as u128 * num_micro as u128
}

/// Integer square root (floor).
pub fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Whether `a > sqrt(b)` for an integer `a` and `b >= 0`.
pub fn exceeds_sqrt(a: i128, b: i128) -> bool {
    a >= 0 && a * a > b
}

/// Whether `a >= sqrt(b)` for an integer `a` and `b >= 0`.
pub fn at_least_sqrt(a: i128, b: i128) -> bool {
    a >= 0 && a * a >= b
}

/// Whether `sqrt(b) >= a` for an integer `a` and `b >= 0`.
pub fn sqrt_at_least(b: i128, a: i128) -> bool {
    a <= 0 || a * a <= b
}
