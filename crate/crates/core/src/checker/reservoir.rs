use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform fixed-size sample of a stream (Algorithm R).
#[derive(Debug, Clone)]
pub struct Reservoir<T> {
    capacity: usize,
    slots: Vec<T>,
    seen: u64,
    rng: ChaCha8Rng,
}

impl<T> Reservoir<T> {
    pub fn new(capacity: usize, seed: u64) -> Self {
        Reservoir {
            capacity,
            slots: Vec::with_capacity(capacity.min(1024)),
            seen: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// After `n` offers, each offered item is held with probability
    /// `capacity / n`.
    pub fn offer(&mut self, item: T) {
        if self.slots.len() < self.capacity {
            self.slots.push(item);
        } else if self.capacity > 0 {
            let j = self.rng.random_range(0..=self.seen);
            if let Ok(j) = usize::try_from(j) {
                if j < self.capacity {
                    self.slots[j] = item;
                }
            }
        }
        self.seen += 1;
    }

    pub fn slots(&self) -> &[T] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total number of offers so far.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn clear(&mut self) {
        self.slots.clear();
        self.seen = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_phase() {
        let mut r = Reservoir::new(3, 0);
        for i in 1..=3 {
            r.offer(i);
        }
        assert_eq!(r.slots(), &[1, 2, 3]);
        assert_eq!(r.seen(), 3);
    }

    #[test]
    fn capacity_zero_stays_empty() {
        let mut r = Reservoir::new(0, 0);
        for i in 0..100 {
            r.offer(i);
        }
        assert!(r.is_empty());
        assert_eq!(r.seen(), 100);
    }

    #[test]
    fn size_is_min_of_seen_and_capacity() {
        let mut r = Reservoir::new(5, 9);
        for i in 0..50u64 {
            r.offer(i);
            assert_eq!(r.len() as u64, (i + 1).min(5));
        }
        let mut s = r.slots().to_vec();
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let run = |seed| {
            let mut r = Reservoir::new(4, seed);
            (0..200).for_each(|i| r.offer(i));
            r.slots().to_vec()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }
}
