/// Compressed per-slot lists: slot `k` owns `items[offsets[k]..offsets[k + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr<T> {
    offsets: Vec<u64>,
    items: Vec<T>,
}

impl<T> Csr<T> {
    /// Groups `(slot, item)` pairs by slot with a stable counting sort.
    pub fn from_pairs(slots: usize, pairs: Vec<(u32, T)>) -> Csr<T> {
        let mut offsets = vec![0u64; slots + 1];
        for (k, _) in &pairs {
            offsets[*k as usize + 1] += 1;
        }
        for k in 0..slots {
            offsets[k + 1] += offsets[k];
        }
        let mut cursor: Vec<u64> = offsets[..slots].to_vec();
        let mut placed: Vec<Option<T>> = (0..pairs.len()).map(|_| None).collect();
        for (k, item) in pairs {
            let at = cursor[k as usize];
            cursor[k as usize] += 1;
            placed[at as usize] = Some(item);
        }
        let items = placed.into_iter().map(|item| item.unwrap()).collect();
        Csr { offsets, items }
    }

    pub fn from_parts(offsets: Vec<u64>, items: Vec<T>) -> Option<Csr<T>> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() == items.len() as u64;
        ok.then_some(Csr { offsets, items })
    }

    #[inline]
    pub fn get(&self, slot: usize) -> &[T] {
        &self.items[self.offsets[slot] as usize..self.offsets[slot + 1] as usize]
    }

    pub fn get_mut(&mut self, slot: usize) -> &mut [T] {
        let (a, b) = (self.offsets[slot] as usize, self.offsets[slot + 1] as usize);
        &mut self.items[a..b]
    }

    pub fn slots(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total(&self) -> usize {
        self.items.len()
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[T])> + '_ {
        (0..self.slots()).map(move |k| (k, self.get(k)))
    }

    /// Rewrites every slot in place, possibly shrinking it.
    pub fn retain_slots(&mut self, mut f: impl FnMut(usize, &mut Vec<T>))
    where
        T: Clone,
    {
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut items = Vec::with_capacity(self.items.len());
        offsets.push(0);
        let mut scratch = Vec::new();
        for k in 0..self.slots() {
            scratch.clear();
            scratch.extend_from_slice(self.get(k));
            f(k, &mut scratch);
            items.append(&mut scratch);
            offsets.push(items.len() as u64);
        }
        self.offsets = offsets;
        self.items = items;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_stably() {
        let csr = Csr::from_pairs(3, vec![(2, 'a'), (0, 'b'), (2, 'c'), (0, 'd')]);
        assert_eq!(csr.get(0), &['b', 'd']);
        assert_eq!(csr.get(1), &[] as &[char]);
        assert_eq!(csr.get(2), &['a', 'c']);
        assert_eq!(csr.total(), 4);
    }

    #[test]
    fn rejects_bad_offsets() {
        assert!(Csr::from_parts(vec![0, 2, 1], vec![1, 2]).is_none());
        assert!(Csr::from_parts(vec![0, 1, 2], vec![1, 2]).is_some());
    }
}
