//! Free graded non-symmetric operads: generators, tree monomials and their
//! linear combinations, with signed partial compositions and braces.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{Coefficient, Degree, Sign};
use crate::error::{Error, Result};
use crate::trees::{Divisor, Label, Tree};

/// Families of generators. `M`/`D` are the Dif∞ generators `m_n`, `d_n`;
/// `Mu`/`Nu` the desuspended generators `μ_n`, `ν_n` of the twisted cobar
/// construction; the rest are cooperad elements `m̃_n`, `d̃_n`, `sm_n`, `sd_n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GenKind {
    M,
    D,
    Mu,
    Nu,
    MTilde,
    DTilde,
    SM,
    SD,
}

impl GenKind {
    fn prefix(self) -> &'static str {
        match self {
            GenKind::M => "m",
            GenKind::D => "d",
            GenKind::Mu => "mu",
            GenKind::Nu => "nu",
            GenKind::MTilde => "mt",
            GenKind::DTilde => "dt",
            GenKind::SM => "sm",
            GenKind::SD => "sd",
        }
    }

    fn min_arity(self) -> usize {
        match self {
            GenKind::M | GenKind::Mu => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator {
    pub kind: GenKind,
    arity: u8,
}

impl Generator {
    pub fn new(kind: GenKind, arity: usize) -> Result<Self> {
        if arity < kind.min_arity() || arity > u8::MAX as usize {
            return Err(Error::ForeignGenerator(alloc::format!("{}{arity}", kind.prefix())));
        }
        Ok(Generator { kind, arity: arity as u8 })
    }

    /// `m_n`, `n ≥ 2`.
    pub fn m(n: usize) -> Self {
        Generator::new(GenKind::M, n).expect("m_n needs n >= 2")
    }

    /// `d_n`, `n ≥ 1`.
    pub fn d(n: usize) -> Self {
        Generator::new(GenKind::D, n).expect("d_n needs n >= 1")
    }
}

impl Label for Generator {
    fn arity(&self) -> usize {
        self.arity as usize
    }

    fn degree(&self) -> Degree {
        let n = self.arity as Degree;
        match self.kind {
            GenKind::M => n - 2,
            GenKind::D => n - 1,
            GenKind::Mu => -1,
            GenKind::Nu => 0,
            GenKind::MTilde => 0,
            GenKind::DTilde => 1,
            GenKind::SM => n - 1,
            GenKind::SD => n,
        }
    }

    /// `m_2 < d_1 < m_3 < d_2 < …`: `m_n ↦ 2n−4`, `d_n ↦ 2n−1`.
    fn rank(&self) -> Option<u32> {
        let n = self.arity as u32;
        match self.kind {
            GenKind::M => Some(2 * n - 4),
            GenKind::D => Some(2 * n - 1),
            _ => None,
        }
    }

    fn symbol(&self) -> String {
        alloc::format!("{}{}", self.kind.prefix(), self.arity)
    }

    fn from_symbol(s: &str) -> Option<Self> {
        let split = s.find(|c: char| c.is_ascii_digit())?;
        let (p, n) = s.split_at(split);
        let kind = [
            GenKind::M,
            GenKind::D,
            GenKind::Mu,
            GenKind::Nu,
            GenKind::MTilde,
            GenKind::DTilde,
            GenKind::SM,
            GenKind::SD,
        ]
        .into_iter()
        .find(|k| k.prefix() == p)?;
        if n.len() > 1 && n.starts_with('0') {
            return None;
        }
        Generator::new(kind, n.parse().ok()?).ok()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

pub type TreeMonomial = Tree<Generator>;

/// Finite linear combination of tree monomials of one arity and one degree.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OperadElement {
    terms: BTreeMap<TreeMonomial, Coefficient>,
}

impl OperadElement {
    pub fn zero() -> Self {
        OperadElement { terms: BTreeMap::new() }
    }

    pub fn monomial(t: TreeMonomial, c: Coefficient) -> Self {
        let mut x = OperadElement::zero();
        x.push(t, &c);
        x
    }

    pub fn generator(g: Generator) -> Self {
        OperadElement::monomial(Tree::corolla(g), Coefficient::one())
    }

    /// Builds an element, rejecting mixed arities or degrees.
    pub fn from_terms(terms: impl IntoIterator<Item = (TreeMonomial, Coefficient)>) -> Result<Self> {
        let mut x = OperadElement::zero();
        for (t, c) in terms {
            x.add_term(t, &c)?;
        }
        Ok(x)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TreeMonomial, &Coefficient)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &TreeMonomial) -> Coefficient {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    pub fn arity(&self) -> Option<usize> {
        self.terms.keys().next().map(|t| t.arity())
    }

    pub fn degree(&self) -> Option<Degree> {
        self.terms.keys().next().map(|t| t.degree())
    }

    fn compatible(&self, t: &TreeMonomial) -> bool {
        match self.terms.keys().next() {
            None => true,
            Some(u) => u.arity() == t.arity() && u.degree() == t.degree(),
        }
    }

    pub fn add_term(&mut self, t: TreeMonomial, c: &Coefficient) -> Result<()> {
        if !self.compatible(&t) {
            return Err(Error::Inhomogeneous);
        }
        self.push(t, c);
        Ok(())
    }

    /// Adds without the homogeneity check; callers guarantee it by construction.
    pub(crate) fn push(&mut self, t: TreeMonomial, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        debug_assert!(self.compatible(&t), "inhomogeneous term {t}");
        match self.terms.entry(t) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub(crate) fn push_signed(&mut self, t: TreeMonomial, c: &Coefficient, s: Sign) {
        match s {
            Sign::Plus => self.push(t, c),
            Sign::Minus => self.push(t, &-c),
        }
    }

    pub fn add(&self, o: &OperadElement) -> Result<OperadElement> {
        let mut x = self.clone();
        x.add_assign(o)?;
        Ok(x)
    }

    pub fn sub(&self, o: &OperadElement) -> Result<OperadElement> {
        self.add(&o.neg())
    }

    pub fn add_assign(&mut self, o: &OperadElement) -> Result<()> {
        if let Some(t) = o.terms.keys().next() {
            if !self.compatible(t) {
                return Err(Error::Inhomogeneous);
            }
        }
        for (t, c) in &o.terms {
            self.push(t.clone(), c);
        }
        Ok(())
    }

    pub fn neg(&self) -> OperadElement {
        OperadElement { terms: self.terms.iter().map(|(t, c)| (t.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &Coefficient) -> OperadElement {
        let mut x = OperadElement::zero();
        for (t, c) in &self.terms {
            x.push(t.clone(), &(c * k));
        }
        x
    }

    /// Applies `f` to every coefficient (used to specialize λ).
    pub fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> OperadElement {
        let mut x = OperadElement::zero();
        for (t, c) in &self.terms {
            x.push(t.clone(), &f(c));
        }
        x
    }

    /// Relabels every vertex; the map must preserve arity and degree parity
    /// relations the caller relies on.
    pub fn relabel(&self, f: impl Fn(&Generator) -> Generator) -> Result<OperadElement> {
        let mut x = OperadElement::zero();
        for (t, c) in &self.terms {
            let slots = t
                .slots()
                .iter()
                .map(|s| match s {
                    crate::trees::Slot::Vertex(g) => crate::trees::Slot::Vertex(f(g)),
                    crate::trees::Slot::Leaf => crate::trees::Slot::Leaf,
                })
                .collect();
            x.add_term(Tree::from_slots(slots)?, c)?;
        }
        Ok(x)
    }

    /// `f ∘_i g`, bilinear, 1-based `i`.
    pub fn compose(&self, i: usize, g: &OperadElement) -> Result<OperadElement> {
        let mut out = OperadElement::zero();
        if let Some(a) = self.arity() {
            if i == 0 || i > a {
                return Err(Error::PositionOutOfRange { position: i, arity: a });
            }
        }
        for (ft, fc) in &self.terms {
            for (gt, gc) in &g.terms {
                let (t, s) = ft.graft(i, gt)?;
                out.push_signed(t, &(fc * gc), s);
            }
        }
        Ok(out)
    }

    /// `f{g_1,…,g_k}`: all left-to-right non-overlapping insertions.
    pub fn brace(&self, gs: &[OperadElement]) -> Result<OperadElement> {
        let Some(m) = self.arity() else { return Ok(OperadElement::zero()) };
        if gs.len() > m {
            return Err(Error::TooManyArguments { given: gs.len(), arity: m });
        }
        if gs.iter().any(|g| g.is_zero()) {
            return Ok(OperadElement::zero());
        }
        Ok(self.brace_unchecked(gs))
    }

    fn brace_unchecked(&self, gs: &[OperadElement]) -> OperadElement {
        let m = self.arity().unwrap_or(0);
        let mut out = OperadElement::zero();
        if gs.len() > m {
            return out;
        }
        // Choose original slots p_1 < … < p_k of f; g_t then sits at
        // p_t + Σ_{u<t}(arity(g_u) − 1) in the iterated composite.
        let k = gs.len();
        let mut pos: Vec<usize> = (1..=k).collect();
        loop {
            let mut acc = self.clone();
            let mut shift = 0usize;
            for (t, g) in gs.iter().enumerate() {
                acc = acc.compose(pos[t] + shift, g).expect("slot in range");
                shift += g.arity().unwrap_or(1) - 1;
            }
            out.add_assign(&acc).expect("brace summands are homogeneous");
            // Next increasing tuple.
            let mut j = k;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if pos[j] < m - (k - 1 - j) {
                    pos[j] += 1;
                    for t in j + 1..k {
                        pos[t] = pos[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// `[f,g]_G = f{g} − (−1)^{|f||g|} g{f}`.
    pub fn gerstenhaber(&self, g: &OperadElement) -> Result<OperadElement> {
        let (Some(df), Some(dg)) = (self.degree(), g.degree()) else {
            return Ok(OperadElement::zero());
        };
        let a = self.brace(core::slice::from_ref(g))?;
        let b = g.brace(core::slice::from_ref(self))?;
        a.sub(&b.scale(&Coefficient::sign(Sign::pow(i64::from(df) * i64::from(dg)))))
    }

    /// Applies the derivation determined by generator images, with the sign
    /// `(−1)^{Σ degrees of vertices before v}` at vertex `v`.
    pub fn extend_derivation<F>(&self, images: F) -> Result<OperadElement>
    where
        F: Fn(&Generator) -> Result<OperadElement>,
    {
        let mut out = OperadElement::zero();
        for (t, c) in &self.terms {
            let mut before: i64 = 0;
            for (k, g) in t.labels().enumerate() {
                let img = images(g)?;
                let d = Divisor::single(k + 1);
                let s0 = Sign::pow(before);
                for (e, ec) in img.terms() {
                    let (nt, s) = t.substitute(&d, e)?;
                    out.add_term(nt, &(c * ec).apply_sign(s * s0))?;
                }
                before += i64::from(g.degree());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for OperadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{t}")?;
        }
        Ok(())
    }
}

/// Brace that yields zero instead of an error when there are too many arguments.
pub fn brace_or_zero(f: &OperadElement, gs: &[OperadElement]) -> OperadElement {
    f.brace(gs).unwrap_or_default()
}

/// General pre-Jacobi identity for `(f{g_1..g_m}){h_1..h_n}`; returns the
/// difference of the two sides.
pub fn pre_jacobi_residual(f: &OperadElement, gs: &[OperadElement], hs: &[OperadElement]) -> Result<OperadElement> {
    let lhs = brace_or_zero(&brace_or_zero(f, gs), hs);
    let m = gs.len();
    let n = hs.len();
    let deg = |x: &OperadElement| i64::from(x.degree().unwrap_or(0));
    let mut rhs = OperadElement::zero();
    // Breakpoints 0 ≤ i_1 ≤ j_1 ≤ … ≤ i_m ≤ j_m ≤ n.
    let mut bps = vec![0usize; 2 * m];
    loop {
        let mut args = Vec::new();
        let mut prev = 0;
        let mut exp: i64 = 0;
        for k in 0..m {
            let (i, j) = (bps[2 * k], bps[2 * k + 1]);
            args.extend_from_slice(&hs[prev..i]);
            args.push(brace_or_zero(&gs[k], &hs[i..j]));
            exp += deg(&gs[k]) * hs[..i].iter().map(deg).sum::<i64>();
            prev = j;
        }
        args.extend_from_slice(&hs[prev..]);
        let term = brace_or_zero(f, &args);
        rhs.add_assign(&term.scale(&Coefficient::sign(Sign::pow(exp))))?;
        // Next non-decreasing breakpoint vector.
        let mut p = 2 * m;
        loop {
            if p == 0 {
                return lhs.sub(&rhs);
            }
            p -= 1;
            if bps[p] < n {
                bps[p] += 1;
                for q in p + 1..2 * m {
                    bps[q] = bps[p];
                }
                break;
            }
        }
    }
}

/// `(f{g}){h} = f{g{h}} + f{g,h} + (−1)^{|g||h|} f{h,g}`, checked exactly.
pub fn pre_jacobi_check(f: &OperadElement, g: &OperadElement, h: &OperadElement) -> bool {
    let lhs = brace_or_zero(&brace_or_zero(f, core::slice::from_ref(g)), core::slice::from_ref(h));
    let s = Sign::pow(i64::from(g.degree().unwrap_or(0)) * i64::from(h.degree().unwrap_or(0)));
    let mut rhs = brace_or_zero(f, &[brace_or_zero(g, core::slice::from_ref(h))]);
    let two = [g.clone(), h.clone()];
    let owt = [h.clone(), g.clone()];
    let ok = rhs.add_assign(&brace_or_zero(f, &two)).is_ok()
        && rhs.add_assign(&brace_or_zero(f, &owt).scale(&Coefficient::sign(s))).is_ok();
    ok && lhs == rhs
}
