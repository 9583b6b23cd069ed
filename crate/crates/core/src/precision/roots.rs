use rug::Integer;

/// `base^exp` in `u128`, or `None` on overflow.
pub fn pow_u128(base: u64, exp: u32) -> Option<u128> {
    (base as u128).checked_pow(exp)
}

/// Largest `r` with `r^k <= n`.
pub fn kth_root_u64(n: u64, k: u32) -> u64 {
    assert!(k >= 1, "root index must be positive");
    if k == 1 || n < 2 {
        return n;
    }
    if k >= 64 {
        return 1;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    let fits = |r: u64| pow_u128(r, k).is_some_and(|v| v <= n as u128);
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

/// The unique `r >= 0` with `r^k <= n < (r+1)^k`.
///
/// # Panics
///
/// Panics if `n < 0` or `k == 0`.
pub fn integer_kth_root(n: &Integer, k: u32) -> Integer {
    assert!(k >= 1, "root index must be positive");
    assert!(n.cmp0() != std::cmp::Ordering::Less, "root of a negative integer");
    match n.to_u64() {
        Some(v) => Integer::from(kth_root_u64(v, k)),
        None => Integer::from(n.root_ref(k)),
    }
}
