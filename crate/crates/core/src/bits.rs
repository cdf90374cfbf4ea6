//! Bitmask helpers shared by the enumeration routines.

/// Iterates over all `k`-bit masks inside the low `n` bits in increasing numeric order
/// (Gosper's hack).
#[derive(Clone, Debug)]
pub struct KSubsets {
    next: Option<u64>,
    limit_bit: u32,
}

impl KSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(n <= 64);
        let next = if k > n {
            None
        } else if k == 0 {
            Some(0)
        } else if k == 64 {
            Some(u64::MAX)
        } else {
            Some((1u64 << k) - 1)
        };
        KSubsets {
            next,
            limit_bit: n as u32,
        }
    }
}

impl Iterator for KSubsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 || cur == u64::MAX {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.checked_add(c);
            match r {
                None => None,
                Some(r) => {
                    let nxt = (((r ^ cur) >> 2) / c) | r;
                    if self.limit_bit < 64 && nxt >> self.limit_bit != 0 {
                        None
                    } else {
                        Some(nxt)
                    }
                }
            }
        };
        Some(cur)
    }
}

/// Mask with the low `n` bits set.
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates over the 0-based positions of set bits, lowest first.
pub fn bit_positions(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn ksubsets_counts_and_order() {
        for n in 0..=10 {
            for k in 0..=n {
                let v: Vec<u64> = KSubsets::new(n, k).collect();
                assert_eq!(v.len() as u64, binom(n as u64, k as u64), "n={n} k={k}");
                assert!(v.windows(2).all(|w| w[0] < w[1]));
                assert!(v.iter().all(|m| m.count_ones() as usize == k && m >> n == 0));
            }
        }
        assert_eq!(KSubsets::new(3, 4).count(), 0);
        assert_eq!(KSubsets::new(64, 64).collect::<Vec<_>>(), vec![u64::MAX]);
        assert_eq!(KSubsets::new(64, 63).count(), 64);
    }

    #[test]
    fn positions() {
        assert_eq!(bit_positions(0b1011).collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(bit_positions(0).count(), 0);
    }
}
