//! Re-encoding order for one phase: super-blocks bucketed by their encoded
//! length, handed out shortest first. Within a bucket, ascending id.

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Default)]
pub(crate) struct Schedule {
    heads: Vec<u32>,
    tails: Vec<u32>,
    next: Vec<u32>,
    keys: Vec<u32>,
    nonempty: Vec<u64>,
    remaining: usize,
}

impl Schedule {
    /// `keys[y]` is the bucket of super-block `y`, at most `max_key`.
    pub fn build(keys: &[u32], max_key: usize) -> Self {
        let buckets = max_key + 1;
        let mut s = Self {
            heads: vec![NONE; buckets],
            tails: vec![NONE; buckets],
            next: vec![NONE; keys.len()],
            keys: keys.to_vec(),
            nonempty: vec![0; buckets.div_ceil(64)],
            remaining: keys.len(),
        };
        for (y, &k) in keys.iter().enumerate() {
            let k = k as usize;
            assert!(k <= max_key, "schedule key {k} exceeds {max_key}");
            if s.tails[k] == NONE {
                s.heads[k] = y as u32;
                s.nonempty[k / 64] |= 1 << (k % 64);
            } else {
                s.next[s.tails[k] as usize] = y as u32;
            }
            s.tails[k] = y as u32;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.remaining
    }

    /// Smallest non-empty bucket, via the bitmap.
    fn first_bucket(&self) -> Option<usize> {
        self.nonempty
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn pop(&mut self) -> Option<u32> {
        let k = self.first_bucket()?;
        let y = self.heads[k];
        let n = self.next[y as usize];
        self.heads[k] = n;
        if n == NONE {
            self.tails[k] = NONE;
            self.nonempty[k / 64] &= !(1 << (k % 64));
        }
        self.remaining -= 1;
        Some(y)
    }

    /// Entries not yet popped, in pop order, with their keys.
    pub fn pending(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.remaining);
        for &h in &self.heads {
            let mut y = h;
            while y != NONE {
                out.push((y, self.keys[y as usize]));
                y = self.next[y as usize];
            }
        }
        out
    }

    /// Rebuilds a schedule holding only `pending` (ids below `count`).
    pub fn from_pending(pending: &[(u32, u32)], count: usize, max_key: usize) -> Self {
        let mut s = Self::build(&[], max_key);
        s.next = vec![NONE; count];
        s.keys = vec![0; count];
        for &(y, k) in pending {
            let (yi, ki) = (y as usize, k as usize);
            s.keys[yi] = k;
            if s.tails[ki] == NONE {
                s.heads[ki] = y;
                s.nonempty[ki / 64] |= 1 << (ki % 64);
            } else {
                s.next[s.tails[ki] as usize] = y;
            }
            s.tails[ki] = y;
        }
        s.remaining = pending.len();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_shortest_first_stable() {
        let mut s = Schedule::build(&[5, 2, 9, 2, 130], 200);
        let order: Vec<u32> = std::iter::from_fn(|| s.pop()).collect();
        assert_eq!(order, vec![1, 3, 0, 2, 4]);
        assert_eq!(s.len(), 0);
    }

    #[test]
    fn pending_round_trip() {
        let mut s = Schedule::build(&[3, 1, 3, 0], 3);
        s.pop();
        let p = s.pending();
        assert_eq!(p, vec![(1, 1), (0, 3), (2, 3)]);
        let mut t = Schedule::from_pending(&p, 4, 3);
        assert_eq!(std::iter::from_fn(|| t.pop()).collect::<Vec<_>>(), vec![1, 0, 2]);
    }
}
