//! Small combinatorial enumerators shared by the search routines.

/// Calls `visit` on every vector of `n` nonnegative integers summing to `k`,
/// in lexicographically decreasing order. Stops early when `visit` returns
/// `false`; the return value reports whether the enumeration ran to the end.
pub fn for_each_effective<F>(n: usize, k: i64, mut visit: F) -> bool
where
    F: FnMut(&[i64]) -> bool,
{
    if k < 0 {
        return true;
    }
    if n == 0 {
        return k != 0 || visit(&[]);
    }
    let mut buf = vec![0i64; n];
    fill(&mut buf, 0, k, &mut visit)
}

fn fill<F>(buf: &mut [i64], pos: usize, left: i64, visit: &mut F) -> bool
where
    F: FnMut(&[i64]) -> bool,
{
    if pos + 1 == buf.len() {
        buf[pos] = left;
        return visit(buf);
    }
    for x in (0..=left).rev() {
        buf[pos] = x;
        if !fill(buf, pos + 1, left - x, visit) {
            return false;
        }
    }
    buf[pos] = 0;
    true
}

/// Number of effective divisors of degree `k` on `n` vertices, saturating.
pub fn effective_count(n: usize, k: i64) -> u128 {
    if k < 0 {
        return 0;
    }
    if n == 0 {
        return (k == 0) as u128;
    }
    // C(k + n - 1, n - 1)
    let mut acc: u128 = 1;
    for i in 1..n as u128 {
        acc = acc.saturating_mul(k as u128 + i) / i;
    }
    acc
}

/// Calls `visit` on every vector in `[lo, hi]^n`, first coordinate slowest.
pub fn for_each_in_window<F>(n: usize, lo: i64, hi: i64, mut visit: F)
where
    F: FnMut(&[i64]),
{
    if lo > hi {
        return;
    }
    let mut buf = vec![lo; n];
    loop {
        visit(&buf);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if buf[i] < hi {
                buf[i] += 1;
                break;
            }
            buf[i] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_enumeration_counts() {
        for n in 1..5 {
            for k in 0..6 {
                let mut seen = 0u128;
                for_each_effective(n, k, |v| {
                    assert_eq!(v.iter().sum::<i64>(), k);
                    assert!(v.iter().all(|&x| x >= 0));
                    seen += 1;
                    true
                });
                assert_eq!(seen, effective_count(n, k));
            }
        }
        assert_eq!(effective_count(4, 2), 10);
        assert_eq!(effective_count(3, -1), 0);
    }

    #[test]
    fn early_stop() {
        let mut seen = 0;
        let finished = for_each_effective(3, 3, |_| {
            seen += 1;
            seen < 4
        });
        assert!(!finished);
        assert_eq!(seen, 4);
    }

    #[test]
    fn window_enumeration() {
        let mut all = Vec::new();
        for_each_in_window(2, -1, 1, |v| all.push(v.to_vec()));
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![-1, -1]);
        assert_eq!(all[8], vec![1, 1]);
    }
}
