//! Order-statistic multiset of finite `f64`s.
//!
//! An arena-backed treap with subtree sizes: insert and k-th smallest are
//! both expected `O(log n)`. Priorities come from a fixed xorshift sequence
//! so the tree shape is a pure function of the insertion sequence.

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    value: f64,
    priority: u64,
    size: u32,
    left: u32,
    right: u32,
}

#[derive(Debug, Clone)]
pub struct OrderStatTree {
    nodes: Vec<Node>,
    root: u32,
    prio_state: u64,
}

impl Default for OrderStatTree {
    fn default() -> Self {
        Self::new()
    }
}

impl OrderStatTree {
    pub fn new() -> Self {
        OrderStatTree {
            nodes: Vec::new(),
            root: NIL,
            prio_state: 0x9E37_79B9_7F4A_7C15,
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        let mut t = Self::new();
        t.nodes.reserve(n);
        t
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    fn size(&self, id: u32) -> u32 {
        if id == NIL {
            0
        } else {
            self.nodes[id as usize].size
        }
    }

    #[inline]
    fn pull(&mut self, id: u32) {
        let n = self.nodes[id as usize];
        self.nodes[id as usize].size = 1 + self.size(n.left) + self.size(n.right);
    }

    fn next_priority(&mut self) -> u64 {
        let mut x = self.prio_state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.prio_state = x;
        x
    }

    /// Splits `id` into (values <= pivot, values > pivot).
    fn split(&mut self, id: u32, pivot: f64) -> (u32, u32) {
        if id == NIL {
            return (NIL, NIL);
        }
        let node = self.nodes[id as usize];
        if node.value <= pivot {
            let (l, r) = self.split(node.right, pivot);
            self.nodes[id as usize].right = l;
            self.pull(id);
            (id, r)
        } else {
            let (l, r) = self.split(node.left, pivot);
            self.nodes[id as usize].left = r;
            self.pull(id);
            (l, id)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].priority > self.nodes[b as usize].priority {
            let r = self.nodes[a as usize].right;
            let m = self.merge(r, b);
            self.nodes[a as usize].right = m;
            self.pull(a);
            a
        } else {
            let l = self.nodes[b as usize].left;
            let m = self.merge(a, l);
            self.nodes[b as usize].left = m;
            self.pull(b);
            b
        }
    }

    /// Inserts `value`. Callers guarantee it is finite.
    pub fn insert(&mut self, value: f64) {
        debug_assert!(value.is_finite());
        let priority = self.next_priority();
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            value,
            priority,
            size: 1,
            left: NIL,
            right: NIL,
        });
        let root = self.root;
        let (l, r) = self.split(root, value);
        let l = self.merge(l, id);
        self.root = self.merge(l, r);
    }

    /// Number of stored values `<= value`.
    pub fn rank_le(&self, value: f64) -> usize {
        let mut id = self.root;
        let mut count = 0usize;
        while id != NIL {
            let n = &self.nodes[id as usize];
            if n.value <= value {
                count += self.size(n.left) as usize + 1;
                id = n.right;
            } else {
                id = n.left;
            }
        }
        count
    }

    /// The `k`-th smallest value, 1-based. `None` when `k` is out of `1..=len`.
    pub fn select(&self, k: usize) -> Option<f64> {
        if k == 0 || k > self.len() {
            return None;
        }
        let mut k = k as u32;
        let mut id = self.root;
        loop {
            let n = &self.nodes[id as usize];
            let left = self.size(n.left);
            if k <= left {
                id = n.left;
            } else if k == left + 1 {
                return Some(n.value);
            } else {
                k -= left + 1;
                id = n.right;
            }
        }
    }

    /// In-order (ascending) traversal.
    pub fn iter(&self) -> Iter<'_> {
        let mut it = Iter {
            tree: self,
            stack: Vec::new(),
        };
        it.push_left(self.root);
        it
    }

    pub fn min(&self) -> Option<f64> {
        self.select(1)
    }

    pub fn max(&self) -> Option<f64> {
        self.select(self.len())
    }
}

pub struct Iter<'a> {
    tree: &'a OrderStatTree,
    stack: Vec<u32>,
}

impl Iter<'_> {
    fn push_left(&mut self, mut id: u32) {
        while id != NIL {
            self.stack.push(id);
            id = self.tree.nodes[id as usize].left;
        }
    }
}

impl Iterator for Iter<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let id = self.stack.pop()?;
        let n = self.tree.nodes[id as usize];
        self.push_left(n.right);
        Some(n.value)
    }
}
