//! Dynamic sequences backed by a counted B+-tree.
//!
//! Leaves hold fixed-capacity chunks; internal nodes cache the length and
//! weight (number of one bits, for bit chunks) of every child subtree. All
//! positional operations are `O(log n)`.

use crate::error::{check_index, Error, Result};

const MAX_FANOUT: usize = 16;
const MIN_FANOUT: usize = 4;

/// A leaf payload of the counted tree.
pub trait Chunk: Clone + Default {
    type Item: Copy + PartialEq + std::fmt::Debug;
    const CAPACITY: usize;

    fn len(&self) -> usize;
    fn weight(&self) -> usize;
    fn item_weight(item: Self::Item) -> usize;
    fn get(&self, i: usize) -> Self::Item;
    /// Returns the previous item.
    fn set(&mut self, i: usize, v: Self::Item) -> Self::Item;
    fn insert(&mut self, i: usize, v: Self::Item);
    fn remove(&mut self, i: usize) -> Self::Item;
    fn split_off(&mut self, at: usize) -> Self;
    /// Appends `other`; the combined length must fit in `CAPACITY`.
    fn append(&mut self, other: Self);
    /// Weight of the first `i` items.
    fn rank(&self, i: usize) -> usize;
    /// Position of the item holding weight unit `k` (0-based).
    fn select(&self, k: usize) -> usize;
}

/// Up to 512 bits, LSB-first inside each word.
#[derive(Debug, Clone, Default)]
pub struct BitChunk {
    words: [u64; 8],
    len: u16,
}

impl BitChunk {
    /// Shifts bits `[i, len)` up by one.
    fn shift_up(&mut self, i: usize) {
        let w = i / 64;
        let last = self.len as usize / 64;
        for k in (w + 1..=last.min(7)).rev() {
            self.words[k] = (self.words[k] << 1) | (self.words[k - 1] >> 63);
        }
        let b = i % 64;
        let low = self.words[w] & ((1u64 << b) - 1);
        let high = self.words[w] & !((1u64 << b) - 1);
        self.words[w] = low | (high << 1);
    }

    /// Shifts bits `(i, len)` down by one onto `i`.
    fn shift_down(&mut self, i: usize) {
        let w = i / 64;
        let last = (self.len as usize).saturating_sub(1) / 64;
        let b = i % 64;
        let low = self.words[w] & ((1u64 << b) - 1);
        let high = (self.words[w] >> 1) & !((1u64 << b) - 1);
        self.words[w] = low | high;
        for k in w + 1..=last.min(7) {
            self.words[k - 1] |= (self.words[k] & 1) << 63;
            self.words[k] >>= 1;
        }
    }

    fn clear_tail(&mut self) {
        let len = self.len as usize;
        for k in 0..8 {
            let lo = k * 64;
            if lo >= len {
                self.words[k] = 0;
            } else if len - lo < 64 {
                self.words[k] &= (1u64 << (len - lo)) - 1;
            }
        }
    }

    fn push(&mut self, bit: bool) {
        let i = self.len as usize;
        self.words[i / 64] |= (bit as u64) << (i % 64);
        self.len += 1;
    }
}

impl Chunk for BitChunk {
    type Item = bool;
    const CAPACITY: usize = 512;

    fn len(&self) -> usize {
        self.len as usize
    }

    fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn item_weight(item: bool) -> usize {
        item as usize
    }

    fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    fn set(&mut self, i: usize, v: bool) -> bool {
        let old = self.get(i);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
        old
    }

    fn insert(&mut self, i: usize, v: bool) {
        debug_assert!((self.len as usize) < Self::CAPACITY);
        self.shift_up(i);
        self.len += 1;
        self.set(i, v);
    }

    fn remove(&mut self, i: usize) -> bool {
        let old = self.get(i);
        self.shift_down(i);
        self.len -= 1;
        self.clear_tail();
        old
    }

    fn split_off(&mut self, at: usize) -> Self {
        let mut tail = BitChunk::default();
        for i in at..self.len as usize {
            tail.push(self.get(i));
        }
        self.len = at as u16;
        self.clear_tail();
        tail
    }

    fn append(&mut self, other: Self) {
        debug_assert!(self.len() + other.len() <= Self::CAPACITY);
        for i in 0..other.len() {
            self.push(other.get(i));
        }
    }

    fn rank(&self, i: usize) -> usize {
        let w = i / 64;
        let mut r: usize = self.words[..w].iter().map(|x| x.count_ones() as usize).sum();
        if i % 64 != 0 {
            r += (self.words[w] & ((1u64 << (i % 64)) - 1)).count_ones() as usize;
        }
        r
    }

    fn select(&self, mut k: usize) -> usize {
        for (w, &word) in self.words.iter().enumerate() {
            let c = word.count_ones() as usize;
            if k < c {
                let mut x = word;
                for _ in 0..k {
                    x &= x - 1;
                }
                return w * 64 + x.trailing_zeros() as usize;
            }
            k -= c;
        }
        unreachable!("select past chunk weight")
    }
}

/// Up to 64 `u32` values; carries no weight.
#[derive(Debug, Clone, Default)]
pub struct U32Chunk {
    items: Vec<u32>,
}

impl Chunk for U32Chunk {
    type Item = u32;
    const CAPACITY: usize = 64;

    fn len(&self) -> usize {
        self.items.len()
    }
    fn weight(&self) -> usize {
        0
    }
    fn item_weight(_: u32) -> usize {
        0
    }
    fn get(&self, i: usize) -> u32 {
        self.items[i]
    }
    fn set(&mut self, i: usize, v: u32) -> u32 {
        std::mem::replace(&mut self.items[i], v)
    }
    fn insert(&mut self, i: usize, v: u32) {
        self.items.insert(i, v)
    }
    fn remove(&mut self, i: usize) -> u32 {
        self.items.remove(i)
    }
    fn split_off(&mut self, at: usize) -> Self {
        Self {
            items: self.items.split_off(at),
        }
    }
    fn append(&mut self, mut other: Self) {
        self.items.append(&mut other.items)
    }
    fn rank(&self, _: usize) -> usize {
        0
    }
    fn select(&self, _: usize) -> usize {
        unreachable!("u32 chunks carry no weight")
    }
}

#[derive(Debug, Clone)]
enum Node<C: Chunk> {
    Leaf(C),
    Inner(Inner<C>),
}

#[derive(Debug, Clone)]
struct Inner<C: Chunk> {
    children: Vec<Node<C>>,
    lens: Vec<usize>,
    weights: Vec<usize>,
}

impl<C: Chunk> Node<C> {
    fn len(&self) -> usize {
        match self {
            Node::Leaf(c) => c.len(),
            Node::Inner(n) => n.lens.iter().sum(),
        }
    }

    fn weight(&self) -> usize {
        match self {
            Node::Leaf(c) => c.weight(),
            Node::Inner(n) => n.weights.iter().sum(),
        }
    }

    /// Size in the unit the fill rules are expressed in.
    fn fill(&self) -> usize {
        match self {
            Node::Leaf(c) => c.len(),
            Node::Inner(n) => n.children.len(),
        }
    }

    fn is_underfull(&self) -> bool {
        match self {
            Node::Leaf(c) => c.len() < C::CAPACITY / 4,
            Node::Inner(n) => n.children.len() < MIN_FANOUT,
        }
    }
}

impl<C: Chunk> Inner<C> {
    fn from_children(children: Vec<Node<C>>) -> Self {
        let lens = children.iter().map(Node::len).collect();
        let weights = children.iter().map(Node::weight).collect();
        Self {
            children,
            lens,
            weights,
        }
    }

    /// Child holding position `i`, and `i` relative to it.
    fn find(&self, mut i: usize) -> (usize, usize) {
        let last = self.lens.len() - 1;
        for (c, &l) in self.lens.iter().enumerate() {
            if i < l || c == last {
                return (c, i);
            }
            i -= l;
        }
        unreachable!()
    }

    fn refresh(&mut self, c: usize) {
        self.lens[c] = self.children[c].len();
        self.weights[c] = self.children[c].weight();
    }

    fn insert_child(&mut self, at: usize, node: Node<C>) {
        self.lens.insert(at, node.len());
        self.weights.insert(at, node.weight());
        self.children.insert(at, node);
    }

    fn remove_child(&mut self, at: usize) -> Node<C> {
        self.lens.remove(at);
        self.weights.remove(at);
        self.children.remove(at)
    }

    /// Restores the fill rule for child `c` by merging with or borrowing from
    /// a neighbour.
    fn fix_child(&mut self, c: usize) {
        if self.children.len() < 2 {
            return;
        }
        let (l, r) = if c + 1 < self.children.len() { (c, c + 1) } else { (c - 1, c) };
        let right = self.remove_child(r);
        let mut left = self.remove_child(l);
        let combined = left.fill() + right.fill();
        let cap = match left {
            Node::Leaf(_) => C::CAPACITY,
            Node::Inner(_) => MAX_FANOUT,
        };
        if combined <= cap {
            merge_nodes(&mut left, right);
            self.insert_child(l, left);
        } else {
            let mut right = right;
            rebalance(&mut left, &mut right);
            self.insert_child(l, right);
            self.insert_child(l, left);
        }
    }
}

fn merge_nodes<C: Chunk>(left: &mut Node<C>, right: Node<C>) {
    match (left, right) {
        (Node::Leaf(a), Node::Leaf(b)) => a.append(b),
        (Node::Inner(a), Node::Inner(b)) => {
            a.children.extend(b.children);
            a.lens.extend(b.lens);
            a.weights.extend(b.weights);
        }
        _ => unreachable!("siblings at different depths"),
    }
}

/// Evens out two siblings whose combined size exceeds one node.
fn rebalance<C: Chunk>(left: &mut Node<C>, right: &mut Node<C>) {
    let total = left.fill() + right.fill();
    let want = total / 2;
    match (left, right) {
        (Node::Leaf(a), Node::Leaf(b)) => {
            if a.len() < want {
                let rest = b.split_off(want - a.len());
                let head = std::mem::replace(b, rest);
                a.append(head);
            } else if a.len() > want {
                let mut tail = a.split_off(want);
                tail.append(std::mem::take(b));
                *b = tail;
            }
        }
        (Node::Inner(a), Node::Inner(b)) => {
            let mut all = std::mem::take(&mut a.children);
            all.append(&mut b.children);
            let right = all.split_off(want);
            *a = Inner::from_children(all);
            *b = Inner::from_children(right);
        }
        _ => unreachable!("siblings at different depths"),
    }
}

impl<C: Chunk> Default for Inner<C> {
    fn default() -> Self {
        Self {
            children: Vec::new(),
            lens: Vec::new(),
            weights: Vec::new(),
        }
    }
}

/// Counted B+-tree over chunks of type `C`.
#[derive(Debug, Clone)]
pub struct CountedTree<C: Chunk> {
    root: Node<C>,
    len: usize,
    weight: usize,
}

impl<C: Chunk> Default for CountedTree<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Chunk> CountedTree<C> {
    pub fn new() -> Self {
        Self {
            root: Node::Leaf(C::default()),
            len: 0,
            weight: 0,
        }
    }

    /// Bulk build with evenly filled leaves.
    pub fn from_items<I: IntoIterator<Item = C::Item>>(items: I) -> Self {
        let items: Vec<C::Item> = items.into_iter().collect();
        let n = items.len();
        if n == 0 {
            return Self::new();
        }
        let per = C::CAPACITY * 3 / 4;
        let leaves = n.div_ceil(per);
        let mut level: Vec<Node<C>> = Vec::with_capacity(leaves);
        let mut it = items.into_iter();
        for k in 0..leaves {
            let take = n * (k + 1) / leaves - n * k / leaves;
            let mut c = C::default();
            for (j, v) in it.by_ref().take(take).enumerate() {
                c.insert(j, v);
            }
            level.push(Node::Leaf(c));
        }
        while level.len() > 1 {
            let per = (MAX_FANOUT * 3) / 4;
            let groups = level.len().div_ceil(per);
            let total = level.len();
            let mut next = Vec::with_capacity(groups);
            let mut it = level.into_iter();
            for k in 0..groups {
                let take = total * (k + 1) / groups - total * k / groups;
                next.push(Node::Inner(Inner::from_children(it.by_ref().take(take).collect())));
            }
            level = next;
        }
        let root = level.pop().unwrap();
        let weight = root.weight();
        Self { root, len: n, weight }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Total weight (number of ones for bit chunks).
    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn height(&self) -> usize {
        let mut h = 1;
        let mut node = &self.root;
        while let Node::Inner(n) = node {
            h += 1;
            node = &n.children[0];
        }
        h
    }

    pub fn get(&self, i: usize) -> Result<C::Item> {
        check_index(i, self.len)?;
        let mut node = &self.root;
        let mut i = i;
        loop {
            match node {
                Node::Leaf(c) => return Ok(c.get(i)),
                Node::Inner(n) => {
                    let (c, r) = n.find(i);
                    node = &n.children[c];
                    i = r;
                }
            }
        }
    }

    pub fn set(&mut self, i: usize, v: C::Item) -> Result<C::Item> {
        check_index(i, self.len)?;
        let old = set_rec(&mut self.root, i, v);
        self.weight = self.weight + C::item_weight(v) - C::item_weight(old);
        Ok(old)
    }

    /// Weight of the first `i` items.
    pub fn rank(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        if i == self.len {
            return Ok(self.weight);
        }
        let mut node = &self.root;
        let mut i = i;
        let mut acc = 0;
        loop {
            match node {
                Node::Leaf(c) => return Ok(acc + c.rank(i)),
                Node::Inner(n) => {
                    let (c, r) = n.find(i);
                    acc += n.weights[..c].iter().sum::<usize>();
                    node = &n.children[c];
                    i = r;
                }
            }
        }
    }

    /// Position of weight unit `k` (0-based).
    pub fn select(&self, k: usize) -> Result<usize> {
        if k >= self.weight {
            return Err(Error::OutOfRange {
                index: k,
                len: self.weight,
            });
        }
        let mut node = &self.root;
        let mut k = k;
        let mut pos = 0;
        loop {
            match node {
                Node::Leaf(c) => return Ok(pos + c.select(k)),
                Node::Inner(n) => {
                    let mut c = 0;
                    while k >= n.weights[c] {
                        k -= n.weights[c];
                        pos += n.lens[c];
                        c += 1;
                    }
                    node = &n.children[c];
                }
            }
        }
    }

    pub fn insert(&mut self, i: usize, v: C::Item) -> Result<()> {
        if i > self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        if let Some(sibling) = insert_rec(&mut self.root, i, v) {
            let left = std::mem::replace(&mut self.root, Node::Leaf(C::default()));
            self.root = Node::Inner(Inner::from_children(vec![left, sibling]));
        }
        self.len += 1;
        self.weight += C::item_weight(v);
        Ok(())
    }

    pub fn remove(&mut self, i: usize) -> Result<C::Item> {
        check_index(i, self.len)?;
        let old = remove_rec(&mut self.root, i);
        if let Node::Inner(n) = &mut self.root {
            if n.children.len() == 1 {
                self.root = n.children.pop().unwrap();
            }
        }
        self.len -= 1;
        self.weight -= C::item_weight(old);
        Ok(old)
    }

    pub fn iter(&self) -> impl Iterator<Item = C::Item> + '_ {
        let mut leaves = Vec::new();
        collect_leaves(&self.root, &mut leaves);
        leaves
            .into_iter()
            .flat_map(|c| (0..c.len()).map(move |i| c.get(i)))
    }

    /// Approximate memory footprint in bits.
    pub fn size_bits(&self) -> u64 {
        fn walk<C: Chunk>(n: &Node<C>) -> u64 {
            match n {
                Node::Leaf(_) => (std::mem::size_of::<C>() * 8) as u64,
                Node::Inner(n) => {
                    (n.children.len() * 3 * 64) as u64 + n.children.iter().map(walk).sum::<u64>()
                }
            }
        }
        walk(&self.root)
    }

    /// Verifies cached counts, fill bounds and uniform depth.
    pub fn check_invariants(&self) -> Result<(), String> {
        fn walk<C: Chunk>(
            n: &Node<C>,
            is_root: bool,
            depth: usize,
            leaf_depth: &mut Option<usize>,
            underfull_leaves: &mut usize,
        ) -> Result<(usize, usize), String> {
            match n {
                Node::Leaf(c) => {
                    if c.len() > C::CAPACITY {
                        return Err(format!("leaf overflow: {}", c.len()));
                    }
                    if !is_root && c.len() < C::CAPACITY / 4 {
                        *underfull_leaves += 1;
                    }
                    match leaf_depth {
                        Some(d) if *d != depth => return Err("leaves at different depths".into()),
                        _ => *leaf_depth = Some(depth),
                    }
                    Ok((c.len(), c.weight()))
                }
                Node::Inner(inner) => {
                    let k = inner.children.len();
                    if k > MAX_FANOUT || (!is_root && k < MIN_FANOUT) || (is_root && k < 2) {
                        return Err(format!("fanout {k} out of bounds"));
                    }
                    let (mut len, mut weight) = (0, 0);
                    for (c, child) in inner.children.iter().enumerate() {
                        let (l, w) = walk(child, false, depth + 1, leaf_depth, underfull_leaves)?;
                        if l != inner.lens[c] || w != inner.weights[c] {
                            return Err(format!("stale counts at depth {depth} child {c}"));
                        }
                        len += l;
                        weight += w;
                    }
                    Ok((len, weight))
                }
            }
        }
        let mut leaf_depth = None;
        let mut underfull = 0;
        let (len, weight) = walk(&self.root, true, 0, &mut leaf_depth, &mut underfull)?;
        if len != self.len || weight != self.weight {
            return Err("stale root totals".into());
        }
        if underfull > 0 {
            return Err(format!("{underfull} leaves below a quarter full"));
        }
        Ok(())
    }
}

fn collect_leaves<'a, C: Chunk>(n: &'a Node<C>, out: &mut Vec<&'a C>) {
    match n {
        Node::Leaf(c) => out.push(c),
        Node::Inner(inner) => inner.children.iter().for_each(|c| collect_leaves(c, out)),
    }
}

fn set_rec<C: Chunk>(node: &mut Node<C>, i: usize, v: C::Item) -> C::Item {
    match node {
        Node::Leaf(c) => c.set(i, v),
        Node::Inner(n) => {
            let (c, r) = n.find(i);
            let old = set_rec(&mut n.children[c], r, v);
            n.weights[c] = n.weights[c] + C::item_weight(v) - C::item_weight(old);
            old
        }
    }
}

/// Inserts and returns a new right sibling if `node` had to split.
fn insert_rec<C: Chunk>(node: &mut Node<C>, i: usize, v: C::Item) -> Option<Node<C>> {
    match node {
        Node::Leaf(c) => {
            if c.len() < C::CAPACITY {
                c.insert(i, v);
                return None;
            }
            let half = c.len() / 2;
            let mut right = c.split_off(half);
            if i <= half {
                c.insert(i, v);
            } else {
                right.insert(i - half, v);
            }
            Some(Node::Leaf(right))
        }
        Node::Inner(n) => {
            // Appending at the very end descends into the last child.
            let (c, r) = if i == n.lens.iter().sum::<usize>() {
                let last = n.lens.len() - 1;
                (last, n.lens[last])
            } else {
                n.find(i)
            };
            let split = insert_rec(&mut n.children[c], r, v);
            n.refresh(c);
            if let Some(sib) = split {
                n.insert_child(c + 1, sib);
            }
            if n.children.len() > MAX_FANOUT {
                let half = n.children.len() / 2;
                let right = Inner::from_children(n.children.split_off(half));
                n.lens.truncate(half);
                n.weights.truncate(half);
                return Some(Node::Inner(right));
            }
            None
        }
    }
}

fn remove_rec<C: Chunk>(node: &mut Node<C>, i: usize) -> C::Item {
    match node {
        Node::Leaf(c) => c.remove(i),
        Node::Inner(n) => {
            let (c, r) = n.find(i);
            let old = remove_rec(&mut n.children[c], r);
            n.refresh(c);
            if n.children[c].is_underfull() {
                n.fix_child(c);
            }
            old
        }
    }
}

/// Dynamic bit sequence with rank and select.
#[derive(Debug, Clone, Default)]
pub struct DynBitVec {
    tree: CountedTree<BitChunk>,
}

impl DynBitVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self {
            tree: CountedTree::from_items(bits),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.tree.weight()
    }

    pub fn get(&self, i: usize) -> Result<bool> {
        self.tree.get(i)
    }

    pub fn set(&mut self, i: usize, bit: bool) -> Result<bool> {
        self.tree.set(i, bit)
    }

    /// Number of ones among the first `i` bits.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        self.tree.rank(i)
    }

    pub fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i - self.tree.rank(i)?)
    }

    /// Position of the `j`-th one, counting from 1.
    pub fn select1(&self, j: usize) -> Result<usize> {
        if j == 0 {
            return Err(Error::Argument("select1 counts from 1".into()));
        }
        self.tree.select(j - 1)
    }

    pub fn insert_bit(&mut self, i: usize, bit: bool) -> Result<()> {
        self.tree.insert(i, bit)
    }

    pub fn delete_bit(&mut self, i: usize) -> Result<bool> {
        self.tree.remove(i)
    }

    pub fn push(&mut self, bit: bool) {
        let n = self.len();
        self.tree.insert(n, bit).expect("append position is valid");
    }

    pub fn height(&self) -> usize {
        self.tree.height()
    }

    pub fn size_bits(&self) -> u64 {
        self.tree.size_bits()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.tree.iter()
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        self.tree.check_invariants()
    }
}

/// Dynamic sequence of `u32` values with positional insert and delete.
#[derive(Debug, Clone, Default)]
pub struct DynSeq {
    tree: CountedTree<U32Chunk>,
}

impl DynSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values<I: IntoIterator<Item = u32>>(values: I) -> Self {
        Self {
            tree: CountedTree::from_items(values),
        }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn get(&self, i: usize) -> Result<u32> {
        self.tree.get(i)
    }

    pub fn set(&mut self, i: usize, v: u32) -> Result<u32> {
        self.tree.set(i, v)
    }

    pub fn insert(&mut self, i: usize, v: u32) -> Result<()> {
        self.tree.insert(i, v)
    }

    pub fn remove(&mut self, i: usize) -> Result<u32> {
        self.tree.remove(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.tree.iter()
    }

    pub fn size_bits(&self) -> u64 {
        self.tree.size_bits()
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        self.tree.check_invariants()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> DynBitVec {
        DynBitVec::from_bits(s.bytes().map(|b| b == b'1'))
    }

    #[test]
    fn rank_select_small() {
        let v = bv("101");
        assert_eq!(v.rank1(3).unwrap(), 2);
        assert_eq!(v.rank1(0).unwrap(), 0);
        // select1 is 0-based in position: the second one sits at index 2.
        assert_eq!(v.select1(2).unwrap(), 2);
        assert!(v.select1(3).is_err());
        assert!(v.rank1(4).is_err());
    }

    #[test]
    fn empty_vector() {
        let mut v = DynBitVec::new();
        assert_eq!(v.rank1(0).unwrap(), 0);
        assert!(v.get(0).is_err());
        v.insert_bit(0, true).unwrap();
        assert!(v.get(0).unwrap());
        assert!(v.delete_bit(0).unwrap());
        assert!(v.is_empty());
        v.check_invariants().unwrap();
    }

    #[test]
    fn chunk_shifts_across_words() {
        let mut c = BitChunk::default();
        for i in 0..200 {
            c.insert(i, i % 3 == 0);
        }
        c.insert(0, true);
        assert!(c.get(0));
        for i in 0..200 {
            assert_eq!(c.get(i + 1), i % 3 == 0);
        }
        assert!(c.remove(0));
        for i in 0..200 {
            assert_eq!(c.get(i), i % 3 == 0);
        }
        assert_eq!(c.weight(), (0..200).filter(|i| i % 3 == 0).count());
    }

    #[test]
    fn grows_and_shrinks() {
        let mut v = DynBitVec::new();
        for i in 0..20_000 {
            v.insert_bit(i / 2, i % 5 == 0).unwrap();
        }
        v.check_invariants().unwrap();
        assert!(v.height() >= 3);
        while v.len() > 10 {
            v.delete_bit(v.len() / 3).unwrap();
        }
        v.check_invariants().unwrap();
        assert_eq!(v.height(), 1);
    }

    #[test]
    fn seq_round_trip() {
        let mut s = DynSeq::from_values(0..1000);
        s.insert(500, 7).unwrap();
        assert_eq!(s.get(500).unwrap(), 7);
        assert_eq!(s.get(501).unwrap(), 500);
        assert_eq!(s.remove(0).unwrap(), 0);
        assert_eq!(s.iter().count(), 1000);
        s.check_invariants().unwrap();
    }
}
