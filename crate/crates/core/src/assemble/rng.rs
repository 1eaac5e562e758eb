//! SplitMix64 generator with unbiased bounded draws.
//!
//! The state is a plain value; every draw order used by assembly is fixed so
//! the same seed regenerates the same exam anywhere.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState(pub u64);

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `[0, n)` by rejection sampling. Panics if `n == 0`.
    pub fn bounded(&mut self, n: u64) -> u64 {
        assert!(n >= 1, "bounded draw needs n >= 1");
        // 2^64 mod n
        let rem = (u64::MAX % n + 1) % n;
        if rem == 0 {
            return self.next_u64() % n;
        }
        let limit = rem.wrapping_neg();
        loop {
            let v = self.next_u64();
            if v < limit {
                return v % n;
            }
        }
    }

    /// Descending Fisher-Yates.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.bounded(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_zero_first_output() {
        let mut s = RngState::new(0);
        assert_eq!(s.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(s.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(s.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn seeds_diverge_immediately() {
        assert_eq!(RngState::new(1).next_u64(), 0x910A_2DEC_8902_5CC1);
        assert_ne!(RngState::new(0).next_u64(), RngState::new(1).next_u64());
    }

    #[test]
    fn repeatable() {
        let a: Vec<u64> = {
            let mut s = RngState::new(99);
            (0..16).map(|_| s.next_u64()).collect()
        };
        let mut s = RngState::new(99);
        let b: Vec<u64> = (0..16).map(|_| s.next_u64()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn bounded_one_consumes_a_draw() {
        let mut s = RngState::new(5);
        assert_eq!(s.bounded(1), 0);
        let mut t = RngState::new(5);
        t.next_u64();
        assert_eq!(s, t);
    }

    #[test]
    fn powers_of_two_never_reject() {
        for shift in [1u32, 3, 17, 63] {
            let n = 1u64 << shift;
            let mut s = RngState::new(shift as u64);
            for _ in 0..100 {
                let mut shadow = s;
                let expected = shadow.next_u64() % n;
                assert_eq!(s.bounded(n), expected);
                assert_eq!(s, shadow);
            }
        }
    }

    #[test]
    fn rejection_happens_near_the_top() {
        // For n = 2^63 + 1 the limit is 2^63 + 1, so about half the draws reject.
        let n = (1u64 << 63) + 1;
        let mut s = RngState::new(0);
        let mut draws = 0;
        for _ in 0..200 {
            let before = s;
            let v = s.bounded(n);
            assert!(v < n);
            let mut probe = before;
            while probe != s {
                probe.next_u64();
                draws += 1;
            }
        }
        assert!(draws > 250, "expected rejections, saw {draws} draws");
    }

    #[test]
    fn residues_of_seven_are_uniform() {
        let trials = 100_000u64;
        let mut hist = [0u64; 7];
        for seed in 0..trials {
            hist[RngState::new(seed).bounded(7) as usize] += 1;
        }
        let p = 1.0 / 7.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for count in hist {
            assert!((count as f64 - trials as f64 * p).abs() < 3.0 * sigma, "{hist:?}");
        }
    }

    #[test]
    fn shuffle_golden() {
        let mut items = ["A", "B", "C"];
        let mut s = RngState::new(0);
        s.shuffle(&mut items);
        assert_eq!(items, ["C", "A", "B"]);
        assert_eq!(s, RngState(0x3C6E_F372_FE94_F82A));
    }

    #[test]
    fn tiny_shuffles_draw_nothing() {
        let mut s = RngState::new(3);
        let mut empty: [u8; 0] = [];
        s.shuffle(&mut empty);
        let mut one = [7];
        s.shuffle(&mut one);
        assert_eq!(one, [7]);
        assert_eq!(s, RngState::new(3));
    }
}
