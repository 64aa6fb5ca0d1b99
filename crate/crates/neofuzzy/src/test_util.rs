//! Deterministic xorshift RNG for unit tests, so frozen expectations do not
//! depend on external RNG crates.

pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        Self(if seed == 0 { 0x9e3779b97f4a7c15 } else { seed })
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform f64 in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform f64 in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// `h` strictly increasing centers spanning [0, 1] with gaps of at
    /// least ~1e-3.
    pub fn centers(&mut self, h: usize) -> Vec<f64> {
        assert!(h >= 2);
        let mut centers = vec![0.0, 1.0];
        while centers.len() < h {
            let c = self.range(0.02, 0.98);
            if centers.iter().all(|&v| (v - c).abs() > 1e-3) {
                centers.push(c);
            }
        }
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        centers
    }
}
