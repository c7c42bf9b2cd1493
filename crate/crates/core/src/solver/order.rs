use alloc::vec::Vec;

use crate::lit::Var;

const ABSENT: u32 = u32::MAX;

/// Indexed binary max-heap of variables ordered by activity, lowest index
/// first among equal activities.
#[derive(Debug, Clone, Default)]
pub(crate) struct VarOrder {
    heap: Vec<Var>,
    position: Vec<u32>,
}

#[inline]
fn before(act: &[f64], a: Var, b: Var) -> bool {
    let (x, y) = (act[a.index()], act[b.index()]);
    x > y || (x == y && a < b)
}

impl VarOrder {
    pub(crate) fn new(num_vars: usize) -> VarOrder {
        VarOrder { heap: Vec::with_capacity(num_vars), position: alloc::vec![ABSENT; num_vars] }
    }

    pub(crate) fn contains(&self, v: Var) -> bool {
        self.position[v.index()] != ABSENT
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.heap.len()
    }

    pub(crate) fn insert(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.position[v.index()] = self.heap.len() as u32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    /// Restores the heap after `v`'s activity increased.
    pub(crate) fn increased(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.position[v.index()] as usize, act);
        }
    }

    pub(crate) fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.position[top.index()] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last.index()] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !before(act, v, p) {
                break;
            }
            self.heap[i] = p;
            self.position[p.index()] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.position[v.index()] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && before(act, self.heap[right], self.heap[left]) { right } else { left };
            let c = self.heap[child];
            if !before(act, c, v) {
                break;
            }
            self.heap[i] = c;
            self.position[c.index()] = i as u32;
            i = child;
        }
        self.heap[i] = v;
        self.position[v.index()] = i as u32;
    }
}
