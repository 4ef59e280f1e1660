//! Planar rooted trees stored as their preorder slot sequence.
//!
//! A tree is the list of its slots read root first, depth first, children left
//! to right; each slot is a leaf or a vertex carrying a label whose arity says
//! how many child slots follow. The encoding is canonical, so structural
//! equality is `Vec` equality, and the k-th vertex slot is vertex k in planar
//! order.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::arith::{koszul_sign_unchecked, Degree, Sign};
use crate::error::{Error, Result};

/// What a vertex may carry.
pub trait Label: Clone + Eq + Ord + core::hash::Hash + fmt::Debug {
    fn arity(&self) -> usize;
    fn degree(&self) -> Degree;
    /// Position in the generator order used by the path-lexicographic order.
    fn rank(&self) -> Option<u32>;
    fn symbol(&self) -> String;
    fn from_symbol(s: &str) -> Option<Self>;
}

/// Undecorated vertices are labelled by their arity.
impl Label for usize {
    fn arity(&self) -> usize {
        *self
    }
    fn degree(&self) -> Degree {
        0
    }
    fn rank(&self) -> Option<u32> {
        None
    }
    fn symbol(&self) -> String {
        alloc::format!("v{self}")
    }
    fn from_symbol(s: &str) -> Option<Self> {
        s.strip_prefix('v')?.parse().ok().filter(|&n: &usize| n >= 1)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Slot<V> {
    Leaf,
    Vertex(V),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Tree<V> {
    slots: Vec<Slot<V>>,
}

/// A bare planar tree.
pub type PlanarTree = Tree<usize>;

/// A connected set of vertices, given by 1-based planar indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Divisor {
    root: usize,
    vertices: BTreeSet<usize>,
}

impl Divisor {
    pub fn new<V: Label>(t: &Tree<V>, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let w = t.weight();
        if vertices.is_empty() || vertices.iter().any(|&v| v == 0 || v > w) {
            return Err(Error::NotADivisor);
        }
        let parents = t.vertex_parents();
        let mut roots = vertices.iter().filter(|&&v| parents[v - 1].is_none_or(|p| !vertices.contains(&p)));
        let root = *roots.next().ok_or(Error::NotADivisor)?;
        if roots.next().is_some() {
            return Err(Error::NotADivisor);
        }
        Ok(Divisor { root, vertices })
    }

    pub fn single(v: usize) -> Self {
        Divisor { root: v, vertices: core::iter::once(v).collect() }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

impl<V: Label> Tree<V> {
    pub fn corolla(v: V) -> Self {
        let n = v.arity();
        let mut slots = Vec::with_capacity(n + 1);
        slots.push(Slot::Vertex(v));
        slots.extend(core::iter::repeat_n(Slot::Leaf, n));
        Tree { slots }
    }

    /// Checks that `slots` is the preorder encoding of a single tree.
    pub fn from_slots(slots: Vec<Slot<V>>) -> Result<Self> {
        if !matches!(slots.first(), Some(Slot::Vertex(_))) {
            return Err(Error::MalformedShape("a tree needs a root vertex".into()));
        }
        let mut need = 1usize;
        for (i, s) in slots.iter().enumerate() {
            if need == 0 {
                return Err(Error::MalformedShape(alloc::format!("trailing slots from {i}")));
            }
            need -= 1;
            if let Slot::Vertex(v) = s {
                if v.arity() == 0 {
                    return Err(Error::MalformedShape("arity-0 vertex".into()));
                }
                need += v.arity();
            }
        }
        if need != 0 {
            return Err(Error::MalformedShape("missing child slots".into()));
        }
        Ok(Tree { slots })
    }

    pub fn slots(&self) -> &[Slot<V>] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Leaf)).count()
    }

    pub fn weight(&self) -> usize {
        self.slots.len() - self.arity()
    }

    pub fn degree(&self) -> Degree {
        self.labels().map(|v| v.degree()).sum()
    }

    /// Vertex labels in planar order.
    pub fn labels(&self) -> impl Iterator<Item = &V> + '_ {
        self.slots.iter().filter_map(|s| match s {
            Slot::Vertex(v) => Some(v),
            Slot::Leaf => None,
        })
    }

    pub fn label(&self, vertex: usize) -> &V {
        self.labels().nth(vertex - 1).expect("vertex index in range")
    }

    pub fn root_label(&self) -> &V {
        match &self.slots[0] {
            Slot::Vertex(v) => v,
            Slot::Leaf => unreachable!("validated tree"),
        }
    }

    pub fn degrees(&self) -> Vec<Degree> {
        self.labels().map(|v| v.degree()).collect()
    }

    /// Slot index one past the subtree starting at `slot`.
    pub fn subtree_end(&self, slot: usize) -> usize {
        let mut need = 1usize;
        let mut i = slot;
        while need > 0 {
            need -= 1;
            if let Slot::Vertex(v) = &self.slots[i] {
                need += v.arity();
            }
            i += 1;
        }
        i
    }

    /// Slot indices of the children of the vertex at `slot`.
    pub fn child_slots(&self, slot: usize) -> Vec<usize> {
        let Slot::Vertex(v) = &self.slots[slot] else { return Vec::new() };
        let mut out = Vec::with_capacity(v.arity());
        let mut c = slot + 1;
        for _ in 0..v.arity() {
            out.push(c);
            c = self.subtree_end(c);
        }
        out
    }

    /// Slot index of each vertex, in planar order.
    pub fn vertex_slots(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&i| matches!(self.slots[i], Slot::Vertex(_))).collect()
    }

    /// Slot index of each leaf, left to right.
    pub fn leaf_slots(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&i| matches!(self.slots[i], Slot::Leaf)).collect()
    }

    /// Planar index of the slot, if it is a vertex.
    fn vertex_index_of_slot(&self) -> Vec<Option<usize>> {
        let mut k = 0;
        self.slots
            .iter()
            .map(|s| match s {
                Slot::Vertex(_) => {
                    k += 1;
                    Some(k)
                }
                Slot::Leaf => None,
            })
            .collect()
    }

    /// Parent (1-based planar index) of each vertex.
    pub fn vertex_parents(&self) -> Vec<Option<usize>> {
        let idx = self.vertex_index_of_slot();
        let mut parents = vec![None; self.weight()];
        for (slot, s) in self.slots.iter().enumerate() {
            if let Slot::Vertex(_) = s {
                let p = idx[slot].unwrap();
                for c in self.child_slots(slot) {
                    if let Some(ci) = idx[c] {
                        parents[ci - 1] = Some(p);
                    }
                }
            }
        }
        parents
    }

    /// Parent vertex of each leaf, together with the child position (0-based).
    pub fn leaf_parents(&self) -> Vec<(usize, usize)> {
        let idx = self.vertex_index_of_slot();
        let mut out = vec![(0, 0); self.arity()];
        let leaf_no: Vec<Option<usize>> = {
            let mut k = 0;
            self.slots
                .iter()
                .map(|s| match s {
                    Slot::Leaf => {
                        k += 1;
                        Some(k - 1)
                    }
                    _ => None,
                })
                .collect()
        };
        for (slot, s) in self.slots.iter().enumerate() {
            if let Slot::Vertex(_) = s {
                for (pos, c) in self.child_slots(slot).into_iter().enumerate() {
                    if let Some(l) = leaf_no[c] {
                        out[l] = (idx[slot].unwrap(), pos);
                    }
                }
            }
        }
        out
    }

    /// Vertices from the root down to the parent of leaf `leaf` (1-based), as planar indices.
    pub fn leaf_path(&self, leaf: usize) -> Vec<usize> {
        let parents = self.vertex_parents();
        let (mut v, _) = self.leaf_parents()[leaf - 1];
        let mut path = vec![v];
        while let Some(p) = parents[v - 1] {
            path.push(p);
            v = p;
        }
        path.reverse();
        path
    }

    /// Planar order of the vertices as 1-based indices; the encoding already
    /// lists them root first, depth first, left to right.
    pub fn planar_order(&self) -> Vec<usize> {
        (1..=self.weight()).collect()
    }

    /// `f ∘_i g` (1-based `i`): graft `g` at the i-th leaf. The sign reorders
    /// the factors `(f's vertices, g's vertices)` into planar order.
    pub fn graft(&self, i: usize, g: &Tree<V>) -> Result<(Tree<V>, Sign)> {
        let ar = self.arity();
        if i == 0 || i > ar {
            return Err(Error::PositionOutOfRange { position: i, arity: ar });
        }
        let leaf = self.leaf_slots()[i - 1];
        let mut slots = Vec::with_capacity(self.slots.len() + g.slots.len() - 1);
        slots.extend_from_slice(&self.slots[..leaf]);
        slots.extend_from_slice(&g.slots);
        slots.extend_from_slice(&self.slots[leaf + 1..]);
        let after: Degree = self.slots[leaf + 1..]
            .iter()
            .filter_map(|s| match s {
                Slot::Vertex(v) => Some(v.degree()),
                Slot::Leaf => None,
            })
            .sum();
        let sign = Sign::pow(i64::from(g.degree()) * i64::from(after));
        Ok((Tree { slots }, sign))
    }

    /// Slot indices of the inputs of a divisor: leaves of `T` and roots of
    /// subtrees hanging off it, left to right.
    fn divisor_inputs(&self, d: &Divisor) -> Vec<usize> {
        let idx = self.vertex_index_of_slot();
        let vs = self.vertex_slots();
        let mut out = Vec::new();
        let mut stack = vec![vs[d.root - 1]];
        // Depth first, left to right: push children in reverse.
        while let Some(s) = stack.pop() {
            let in_d = idx[s].is_some_and(|k| d.vertices.contains(&k));
            if in_d {
                for c in self.child_slots(s).into_iter().rev() {
                    stack.push(c);
                }
            } else {
                out.push(s);
            }
        }
        out
    }

    /// `σ(T, T′)`: the planar order of `T` rearranged as (vertices before the
    /// divisor root, divisor in planar order, the rest in `T/T′` order).
    /// Entries are 1-based planar indices of `T`.
    pub fn sigma_permutation(&self, d: &Divisor) -> Vec<usize> {
        let mut out: Vec<usize> = (1..d.root).collect();
        out.extend(d.vertices.iter().copied());
        out.extend((d.root..=self.weight()).filter(|v| !d.vertices.contains(v)));
        out
    }

    /// Replaces the divisor by `e` (whose arity must match the divisor's
    /// input count). The sign is `ε(σ(T,T′))` times the Koszul sign of
    /// putting `(before, e's vertices, rest)` into the new planar order.
    pub fn substitute(&self, d: &Divisor, e: &Tree<V>) -> Result<(Tree<V>, Sign)> {
        let inputs = self.divisor_inputs(d);
        if inputs.len() != e.arity() {
            return Err(Error::SizeMismatch { expected: inputs.len(), found: e.arity() });
        }
        let idx = self.vertex_index_of_slot();
        let vs = self.vertex_slots();
        let root_slot = vs[d.root - 1];
        let end = self.subtree_end(root_slot);
        let pre = d.root - 1;
        let we = e.weight();
        // Canonical position of each surviving vertex of T in (pre, e, rest).
        let mut key_of = vec![0usize; self.weight()];
        let mut next = pre + we;
        for v in 1..=self.weight() {
            if v <= pre {
                key_of[v - 1] = v - 1;
            } else if !d.vertices.contains(&v) {
                key_of[v - 1] = next;
                next += 1;
            }
        }
        let mut slots = Vec::with_capacity(self.slots.len() + e.slots.len());
        let mut keys = Vec::with_capacity(pre + we + self.weight());
        let push_range = |from: usize, to: usize, slots: &mut Vec<Slot<V>>, keys: &mut Vec<usize>| {
            for s in from..to {
                slots.push(self.slots[s].clone());
                if let Some(k) = idx[s] {
                    keys.push(key_of[k - 1]);
                }
            }
        };
        push_range(0, root_slot, &mut slots, &mut keys);
        let mut leaf = 0;
        let mut ev = 0;
        for s in &e.slots {
            match s {
                Slot::Vertex(_) => {
                    slots.push(s.clone());
                    keys.push(pre + ev);
                    ev += 1;
                }
                Slot::Leaf => {
                    let inp = inputs[leaf];
                    push_range(inp, self.subtree_end(inp), &mut slots, &mut keys);
                    leaf += 1;
                }
            }
        }
        push_range(end, self.slots.len(), &mut slots, &mut keys);
        let old_degs = self.degrees();
        let sigma: Vec<usize> = self.sigma_permutation(d).iter().map(|v| v - 1).collect();
        let eps_t = koszul_sign_unchecked(&old_degs, &sigma);
        let mut canon = vec![0; keys.len()];
        for v in 1..=self.weight() {
            if !d.vertices.contains(&v) {
                canon[key_of[v - 1]] = old_degs[v - 1];
            }
        }
        for (k, deg) in e.degrees().into_iter().enumerate() {
            canon[pre + k] = deg;
        }
        let eps_new = koszul_sign_unchecked(&canon, &keys);
        Ok((Tree { slots }, eps_t * eps_new))
    }

    /// The divisor itself as a tree (its inputs become leaves).
    pub fn divisor_tree(&self, d: &Divisor) -> Tree<V> {
        let idx = self.vertex_index_of_slot();
        let vs = self.vertex_slots();
        let mut slots = Vec::new();
        let mut stack = vec![vs[d.root - 1]];
        while let Some(s) = stack.pop() {
            if idx[s].is_some_and(|k| d.vertices.contains(&k)) {
                slots.push(self.slots[s].clone());
                for c in self.child_slots(s).into_iter().rev() {
                    stack.push(c);
                }
            } else {
                slots.push(Slot::Leaf);
            }
        }
        Tree { slots }
    }

    /// Root-to-leaf label words, one per leaf.
    pub fn path_sequence(&self) -> Vec<Vec<V>> {
        let mut words = Vec::with_capacity(self.arity());
        // Stack of (label, remaining children) along the current path.
        let mut path: Vec<(V, usize)> = Vec::new();
        for s in &self.slots {
            match s {
                Slot::Vertex(v) => path.push((v.clone(), v.arity())),
                Slot::Leaf => words.push(path.iter().map(|(v, _)| v.clone()).collect()),
            }
            if matches!(s, Slot::Leaf) {
                // Close every vertex whose children are now exhausted.
                while let Some(top) = path.last_mut() {
                    top.1 -= 1;
                    if top.1 > 0 {
                        break;
                    }
                    path.pop();
                }
            }
        }
        words
    }

    /// The sort key of the graded path-lexicographic order.
    pub fn order_key(&self) -> Result<OrderKey> {
        let mut words = Vec::with_capacity(self.arity());
        for w in self.path_sequence() {
            let ranks = w
                .iter()
                .map(|v| v.rank().ok_or_else(|| Error::ForeignGenerator(v.symbol())))
                .collect::<Result<Vec<u32>>>()?;
            words.push(Word(ranks));
        }
        Ok(OrderKey { arity: self.arity(), degree: self.degree(), words })
    }

    /// Writes the s-expression form, e.g. `(m3 (d1 _) _ (m2 _ _))`.
    pub fn write_sexpr(&self, out: &mut String) {
        let mut open: Vec<usize> = Vec::new();
        for s in &self.slots {
            if !open.is_empty() {
                out.push(' ');
            }
            match s {
                Slot::Vertex(v) => {
                    out.push('(');
                    out.push_str(&v.symbol());
                    open.push(v.arity());
                    continue;
                }
                Slot::Leaf => out.push('_'),
            }
            while let Some(top) = open.last_mut() {
                *top -= 1;
                if *top > 0 {
                    break;
                }
                out.push(')');
                open.pop();
            }
        }
    }

    /// Parses `tree := '(' gen child+ ')'; child := '_' | tree`.
    pub fn parse(s: &str) -> Result<Self> {
        let err = |m: &str| Error::Parse { what: "tree", msg: alloc::format!("{m} in {s:?}") };
        let mut slots = Vec::new();
        let mut counts: Vec<(usize, usize)> = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        let mut done = false;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if done {
                return Err(err("trailing input"));
            }
            match c {
                b'(' => {
                    if let Some(top) = counts.last_mut() {
                        top.1 += 1;
                    }
                    let start = i + 1;
                    let mut j = start;
                    while j < bytes.len() && bytes[j].is_ascii_alphanumeric() {
                        j += 1;
                    }
                    let v = V::from_symbol(&s[start..j]).ok_or_else(|| err("unknown generator"))?;
                    counts.push((v.arity(), 0));
                    slots.push(Slot::Vertex(v));
                    i = j;
                }
                b'_' => {
                    let top = counts.last_mut().ok_or_else(|| err("leaf outside a vertex"))?;
                    top.1 += 1;
                    slots.push(Slot::Leaf);
                    i += 1;
                }
                b')' => {
                    let (want, got) = counts.pop().ok_or_else(|| err("unbalanced ')'"))?;
                    if want != got {
                        return Err(err("child count does not match arity"));
                    }
                    done = counts.is_empty();
                    i += 1;
                }
                _ => return Err(err("unexpected character")),
            }
        }
        if !done {
            return Err(err("unterminated tree"));
        }
        Tree::from_slots(slots)
    }
}

impl PlanarTree {
    /// `T/T′`: the divisor collapsed to a corolla.
    pub fn contract(&self, d: &Divisor) -> Result<PlanarTree> {
        let n = self.divisor_inputs(d).len();
        Ok(self.substitute(d, &Tree::corolla(n))?.0)
    }

    /// Forgets the decoration.
    pub fn shape_of<V: Label>(t: &Tree<V>) -> PlanarTree {
        Tree {
            slots: t
                .slots
                .iter()
                .map(|s| match s {
                    Slot::Vertex(v) => Slot::Vertex(v.arity()),
                    Slot::Leaf => Slot::Leaf,
                })
                .collect(),
        }
    }
}

impl<V: Label> fmt::Display for Tree<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_sexpr(&mut s);
        f.write_str(&s)
    }
}

/// A word of generator ranks compared shorter-first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Word(pub Vec<u32>);

impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Arity, then degree, then path words left to right.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct OrderKey {
    pub arity: usize,
    pub degree: Degree,
    pub words: Vec<Word>,
}

pub fn compare<V: Label>(a: &Tree<V>, b: &Tree<V>) -> Result<Ordering> {
    Ok(a.order_key()?.cmp(&b.order_key()?))
}
