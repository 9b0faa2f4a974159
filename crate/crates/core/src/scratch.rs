//! Reusable per-query storage with O(1) reset.

/// Vector whose entries are invalidated in bulk by bumping a generation counter.
#[derive(Debug, Clone)]
pub struct TimestampedVec<T> {
    values: Vec<T>,
    stamps: Vec<u32>,
    current: u32,
}

impl<T: Copy> TimestampedVec<T> {
    pub fn new(len: usize, fill: T) -> Self {
        Self {
            values: vec![fill; len],
            stamps: vec![0; len],
            current: 1,
        }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn reset(&mut self) {
        if self.current == u32::MAX {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        } else {
            self.current += 1;
        }
    }

    pub fn get(&self, i: usize) -> Option<T> {
        (self.stamps[i] == self.current).then(|| self.values[i])
    }

    pub fn contains(&self, i: usize) -> bool {
        self.stamps[i] == self.current
    }

    pub fn set(&mut self, i: usize, value: T) {
        self.stamps[i] = self.current;
        self.values[i] = value;
    }

    /// Grows the vector; new entries are unset.
    pub fn ensure_len(&mut self, len: usize, fill: T) {
        if self.values.len() < len {
            self.values.resize(len, fill);
            self.stamps.resize(len, 0);
        }
    }
}
