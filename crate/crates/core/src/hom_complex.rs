//! Finite graded spaces and multilinear maps between them, with operadic
//! composition, braces and the Gerstenhaber bracket on `Hom(T(W), W)`.
//!
//! The suspension `s` is a degree +1 symbol; moving `s` or `s⁻¹` past an
//! element of degree `p` costs `(−1)^p`, and `s⁻¹s = ss⁻¹ = id`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{Coefficient, Degree, Sign};
use crate::error::{Error, Result};

/// A finite-dimensional graded space with a homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    degrees: Vec<Degree>,
    labels: Vec<String>,
}

impl GradedSpace {
    pub fn new(degrees: Vec<Degree>) -> Self {
        let labels = (1..=degrees.len()).map(|i| format!("e{i}")).collect();
        GradedSpace { degrees, labels }
    }

    pub fn with_labels(degrees: Vec<Degree>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != degrees.len() {
            return Err(Error::SizeMismatch { expected: degrees.len(), found: labels.len() });
        }
        Ok(GradedSpace { degrees, labels })
    }

    /// Basis ordered by degree, `dims[k]` elements in degree `k`.
    pub fn from_dims(dims: &BTreeMap<Degree, usize>) -> Self {
        let degrees = dims.iter().flat_map(|(&d, &n)| core::iter::repeat_n(d, n)).collect();
        GradedSpace::new(degrees)
    }

    /// Ungraded space of the given dimension, in degree 0.
    pub fn ungraded(dim: usize) -> Self {
        GradedSpace::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> Degree {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> BTreeMap<Degree, usize> {
        let mut m = BTreeMap::new();
        for &d in &self.degrees {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    /// `sV`: same basis, degrees raised by one.
    pub fn suspend(&self) -> Self {
        GradedSpace { degrees: self.degrees.iter().map(|d| d + 1).collect(), labels: self.labels.clone() }
    }

    pub fn desuspend(&self) -> Self {
        GradedSpace { degrees: self.degrees.iter().map(|d| d - 1).collect(), labels: self.labels.clone() }
    }
}

/// A homogeneous multilinear map `src^{⊗n} → tgt` of degree `r`, stored as a
/// dense table: one output vector per tuple of source basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    src: GradedSpace,
    tgt: GradedSpace,
    arity: usize,
    degree: Degree,
    data: Vec<Coefficient>,
}

/// Decodes a tuple index into basis indices (first input most significant).
pub fn decode_tuple(mut idx: usize, dim: usize, arity: usize, out: &mut [usize]) {
    for k in (0..arity).rev() {
        out[k] = idx % dim;
        idx /= dim;
    }
}

pub fn encode_tuple(tuple: &[usize], dim: usize) -> usize {
    tuple.iter().fold(0, |acc, &t| acc * dim + t)
}

impl MultiMap {
    pub fn zero(src: &GradedSpace, tgt: &GradedSpace, arity: usize, degree: Degree) -> Self {
        let len = src.dim().pow(arity as u32) * tgt.dim();
        MultiMap { src: src.clone(), tgt: tgt.clone(), arity, degree, data: vec![Coefficient::zero(); len] }
    }

    /// Endomorphism-type map on `space`.
    pub fn zero_endo(space: &GradedSpace, arity: usize, degree: Degree) -> Self {
        MultiMap::zero(space, space, arity, degree)
    }

    pub fn src(&self) -> &GradedSpace {
        &self.src
    }

    pub fn tgt(&self) -> &GradedSpace {
        &self.tgt
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn tuple_count(&self) -> usize {
        self.src.dim().pow(self.arity as u32)
    }

    pub fn tuple(&self, idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity];
        decode_tuple(idx, self.src.dim(), self.arity, &mut t);
        t
    }

    fn tuple_degree(&self, tuple: &[usize]) -> Degree {
        tuple.iter().map(|&i| self.src.degree(i)).sum()
    }

    /// Whether an entry at `(tuple, out)` is allowed by the grading.
    pub fn admissible(&self, tuple: &[usize], out: usize) -> bool {
        self.tuple_degree(tuple) + self.degree == self.tgt.degree(out)
    }

    pub fn output(&self, tuple: &[usize]) -> &[Coefficient] {
        let m = self.tgt.dim();
        let i = encode_tuple(tuple, self.src.dim()) * m;
        &self.data[i..i + m]
    }

    fn output_at(&self, idx: usize) -> &[Coefficient] {
        let m = self.tgt.dim();
        &self.data[idx * m..idx * m + m]
    }

    pub fn entry(&self, tuple: &[usize], out: usize) -> &Coefficient {
        &self.output(tuple)[out]
    }

    pub fn set(&mut self, tuple: &[usize], out: usize, c: Coefficient) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(Error::SizeMismatch { expected: self.arity, found: tuple.len() });
        }
        if tuple.iter().any(|&i| i >= self.src.dim()) || out >= self.tgt.dim() {
            return Err(Error::InvalidData(format!("basis index out of range in {tuple:?} -> {out}")));
        }
        if !c.is_zero() && !self.admissible(tuple, out) {
            return Err(Error::Grading(format!(
                "entry {tuple:?} -> {out} breaks degree {} bookkeeping",
                self.degree
            )));
        }
        let i = encode_tuple(tuple, self.src.dim()) * self.tgt.dim() + out;
        self.data[i] = c;
        Ok(())
    }

    fn add_at(&mut self, idx: usize, out: usize, c: &Coefficient) {
        let m = self.tgt.dim();
        self.data[idx * m + out].add_assign_ref(c);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Coefficient::is_zero)
    }

    /// Coordinates in the basis `(tuple, output)`, tuple-major.
    pub fn coords(&self) -> &[Coefficient] {
        &self.data
    }

    /// Inverse of [`MultiMap::coords`]; grading-violating nonzero entries are rejected.
    pub fn from_coords(src: &GradedSpace, tgt: &GradedSpace, arity: usize, degree: Degree, coords: Vec<Coefficient>) -> Result<Self> {
        let mut m = MultiMap::zero(src, tgt, arity, degree);
        if coords.len() != m.data.len() {
            return Err(Error::SizeMismatch { expected: m.data.len(), found: coords.len() });
        }
        for (k, c) in coords.into_iter().enumerate() {
            if !c.is_zero() {
                let t = m.tuple(k / tgt.dim());
                m.set(&t, k % tgt.dim(), c)?;
            }
        }
        Ok(m)
    }

    /// Nonzero entries as `(tuple, output index, coefficient)`.
    pub fn nonzero_entries(&self) -> Vec<(Vec<usize>, usize, Coefficient)> {
        let m = self.tgt.dim();
        let mut out = Vec::new();
        for (k, c) in self.data.iter().enumerate() {
            if !c.is_zero() {
                out.push((self.tuple(k / m), k % m, c.clone()));
            }
        }
        out
    }

    fn same_shape(&self, o: &MultiMap) -> Result<()> {
        if self.src != o.src || self.tgt != o.tgt || self.arity != o.arity || self.degree != o.degree {
            return Err(Error::Grading(format!(
                "maps of arity {}/{} and degree {}/{} do not live in the same space",
                self.arity, o.arity, self.degree, o.degree
            )));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, o: &MultiMap) -> Result<()> {
        self.same_shape(o)?;
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            a.add_assign_ref(b);
        }
        Ok(())
    }

    pub fn add(&self, o: &MultiMap) -> Result<MultiMap> {
        let mut r = self.clone();
        r.add_assign(o)?;
        Ok(r)
    }

    pub fn sub(&self, o: &MultiMap) -> Result<MultiMap> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> MultiMap {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, k: &Coefficient) -> MultiMap {
        self.map_coefficients(|c| c * k)
    }

    pub fn map_coefficients(&self, f: impl Fn(&Coefficient) -> Coefficient) -> MultiMap {
        MultiMap { data: self.data.iter().map(f).collect(), ..self.clone_shape() }
    }

    fn clone_shape(&self) -> MultiMap {
        MultiMap { src: self.src.clone(), tgt: self.tgt.clone(), arity: self.arity, degree: self.degree, data: Vec::new() }
    }

    /// Evaluates on basis tuples `fixed` except at the slots listed in
    /// `vecs`, which carry vectors; accumulates `scale ×` the result.
    fn eval_into(&self, slots: &mut [usize], vecs: &[(usize, &[Coefficient])], scale: &Coefficient, acc: &mut [Coefficient]) {
        let Some(((pos, v), rest)) = vecs.split_first() else {
            for (a, c) in acc.iter_mut().zip(self.output(slots)) {
                if !c.is_zero() {
                    a.add_assign_ref(&(c * scale));
                }
            }
            return;
        };
        for (b, vb) in v.iter().enumerate() {
            if vb.is_zero() {
                continue;
            }
            slots[*pos] = b;
            self.eval_into(slots, rest, &(scale * vb), acc);
        }
    }

    /// `f(x_1, …, x_n)` on vectors, with no sign (the inputs are coordinates).
    pub fn eval(&self, xs: &[Vec<Coefficient>]) -> Result<Vec<Coefficient>> {
        if xs.len() != self.arity {
            return Err(Error::SizeMismatch { expected: self.arity, found: xs.len() });
        }
        let mut slots = vec![0; self.arity];
        let vecs: Vec<(usize, &[Coefficient])> = xs.iter().enumerate().map(|(i, x)| (i, x.as_slice())).collect();
        let mut acc = vec![Coefficient::zero(); self.tgt.dim()];
        self.eval_into(&mut slots, &vecs, &Coefficient::one(), &mut acc);
        Ok(acc)
    }

    /// `F ∘ (Id^{⊗p_1} ⊗ G_1 ⊗ … )` for blocks inserted at increasing slots
    /// `positions` of `self`, with the Koszul sign of each `G_t` passing the
    /// inputs to its left.
    fn insert(&self, gs: &[&MultiMap], positions: &[usize], out: &mut MultiMap) {
        let w = &self.src;
        let n_out = out.arity;
        let mut tuple = vec![0; n_out];
        let mut slots = vec![0; self.arity];
        for idx in 0..out.tuple_count() {
            decode_tuple(idx, w.dim(), n_out, &mut tuple);
            let mut sign_exp: i64 = 0;
            let mut vecs: Vec<(usize, &[Coefficient])> = Vec::with_capacity(gs.len());
            let mut read = 0;
            let mut t = 0;
            let mut deg_before: Degree = 0;
            let mut zero = false;
            for (s, slot) in slots.iter_mut().enumerate() {
                if t < gs.len() && positions[t] == s {
                    let g = gs[t];
                    let block = &tuple[read..read + g.arity];
                    sign_exp += i64::from(g.degree) * i64::from(deg_before);
                    let y = g.output(block);
                    if y.iter().all(Coefficient::is_zero) {
                        zero = true;
                        break;
                    }
                    vecs.push((s, y));
                    for &b in block {
                        deg_before += w.degree(b);
                    }
                    read += g.arity;
                    t += 1;
                } else {
                    *slot = tuple[read];
                    deg_before += w.degree(tuple[read]);
                    read += 1;
                }
            }
            if zero {
                continue;
            }
            let scale = Coefficient::sign(Sign::pow(sign_exp));
            let m = out.tgt.dim();
            let acc = &mut out.data[idx * m..idx * m + m];
            self.eval_into(&mut slots, &vecs, &scale, acc);
        }
    }

    fn check_composable(&self, g: &MultiMap) -> Result<()> {
        if g.tgt != self.src || g.src != self.src {
            return Err(Error::Grading("composition needs maps on a common space".into()));
        }
        Ok(())
    }

    /// `f ∘_i g` (1-based `i`).
    pub fn compose_at(&self, i: usize, g: &MultiMap) -> Result<MultiMap> {
        self.check_composable(g)?;
        if i == 0 || i > self.arity {
            return Err(Error::PositionOutOfRange { position: i, arity: self.arity });
        }
        let mut out = MultiMap::zero(&self.src, &self.tgt, self.arity + g.arity - 1, self.degree + g.degree);
        self.insert(&[g], &[i - 1], &mut out);
        Ok(out)
    }

    /// `f ∘ (… ⊗ g_1 ⊗ … ⊗ g_m ⊗ …)` with `g_t` plugged into input
    /// `positions[t]` (0-based, strictly increasing) and identities elsewhere.
    pub fn compose_multi(&self, gs: &[&MultiMap], positions: &[usize]) -> Result<MultiMap> {
        for g in gs {
            self.check_composable(g)?;
        }
        if gs.len() != positions.len() {
            return Err(Error::SizeMismatch { expected: gs.len(), found: positions.len() });
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) || positions.last().is_some_and(|&p| p >= self.arity) {
            return Err(Error::PositionOutOfRange { position: positions.last().copied().unwrap_or(0), arity: self.arity });
        }
        let arity = self.arity + gs.iter().map(|g| g.arity).sum::<usize>() - gs.len();
        let degree = self.degree + gs.iter().map(|g| g.degree).sum::<Degree>();
        let mut out = MultiMap::zero(&self.src, &self.tgt, arity, degree);
        self.insert(gs, positions, &mut out);
        Ok(out)
    }

    /// `f{g_1, …, g_m}`: sum over all ways of plugging the `g_t` into distinct
    /// inputs of `f`, in order. Zero when `m` exceeds the arity; `f` when `m = 0`.
    pub fn brace(&self, gs: &[&MultiMap]) -> Result<MultiMap> {
        for g in gs {
            self.check_composable(g)?;
        }
        let m = gs.len();
        let arity = (self.arity + gs.iter().map(|g| g.arity).sum::<usize>()).saturating_sub(m);
        let degree = self.degree + gs.iter().map(|g| g.degree).sum::<Degree>();
        let mut out = MultiMap::zero(&self.src, &self.tgt, arity, degree);
        if m > self.arity {
            return Ok(out);
        }
        if m == 0 {
            return Ok(self.clone());
        }
        let mut pos: Vec<usize> = (0..m).collect();
        loop {
            self.insert(gs, &pos, &mut out);
            // Next increasing tuple.
            let mut k = m;
            while k > 0 && pos[k - 1] == self.arity - m + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            pos[k - 1] += 1;
            for r in k..m {
                pos[r] = pos[r - 1] + 1;
            }
        }
        Ok(out)
    }

    /// `[f, g] = f{g} − (−1)^{|f||g|} g{f}` for maps `W^{⊗n} → W`; the
    /// degrees are those of the maps on `W = sV`.
    pub fn gerstenhaber(&self, g: &MultiMap) -> Result<MultiMap> {
        let a = self.brace(&[g])?;
        let b = g.brace(&[self])?;
        let s = Sign::pow(i64::from(self.degree) * i64::from(g.degree));
        a.add(&b.scale(&Coefficient::sign(-s)))
    }
}

/// Exponent of the sign `s^{⊗n}(v_1 ⊗ … ⊗ v_n) = ±sv_1 ⊗ … ⊗ sv_n`.
fn susp_tensor_exponent(degs_v: impl Iterator<Item = Degree>, n: usize) -> i64 {
    degs_v.enumerate().map(|(u, d)| (n - 1 - u) as i64 * i64::from(d)).sum()
}

/// `f: V^{⊗n} → V` ↦ `F: (sV)^{⊗n} → sV` with `f = s⁻¹ ∘ F ∘ s^{⊗n}`, i.e.
/// `F(sv_1, …, sv_n) = (−1)^{Σ (n−u)|v_u|} s f(v_1, …, v_n)`.
pub fn suspend_map(f: &MultiMap) -> Result<MultiMap> {
    if f.src != f.tgt {
        return Err(Error::Grading("suspension translation needs an endomorphism-type map".into()));
    }
    let w = f.src.suspend();
    let n = f.arity;
    let mut out = MultiMap::zero(&w, &w, n, f.degree + 1 - n as Degree);
    for idx in 0..f.tuple_count() {
        let t = f.tuple(idx);
        let e = susp_tensor_exponent(t.iter().map(|&i| f.src.degree(i)), n);
        let s = Sign::pow(e);
        for (o, c) in f.output_at(idx).iter().enumerate() {
            if !c.is_zero() {
                out.add_at(idx, o, &c.apply_sign(s));
            }
        }
    }
    Ok(out)
}

/// Inverse of [`suspend_map`]: `F ↦ s⁻¹ ∘ F ∘ s^{⊗n}`. The same formula
/// translates a DO-type component stored as `sg` into `ǧ = g ∘ s^{⊗n}`.
pub fn desuspend_map(big: &MultiMap) -> Result<MultiMap> {
    if big.src != big.tgt {
        return Err(Error::Grading("suspension translation needs an endomorphism-type map".into()));
    }
    let v = big.src.desuspend();
    let n = big.arity;
    let mut out = MultiMap::zero(&v, &v, n, big.degree + n as Degree - 1);
    for idx in 0..big.tuple_count() {
        let t = big.tuple(idx);
        let e = susp_tensor_exponent(t.iter().map(|&i| v.degree(i)), n);
        let s = Sign::pow(e);
        for (o, c) in big.output_at(idx).iter().enumerate() {
            if !c.is_zero() {
                out.add_at(idx, o, &c.apply_sign(s));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(k: i64) -> Coefficient {
        Coefficient::from_int(k)
    }

    /// A map on `space` of the given arity and degree with entries drawn from `vals`.
    fn fill(space: &GradedSpace, arity: usize, degree: Degree, vals: &[i64]) -> MultiMap {
        let mut f = MultiMap::zero_endo(space, arity, degree);
        let mut k = 0;
        for idx in 0..f.tuple_count() {
            let t = f.tuple(idx);
            for o in 0..space.dim() {
                if f.admissible(&t, o) {
                    f.set(&t, o, c(vals[k % vals.len()])).unwrap();
                    k += 1;
                }
            }
        }
        f
    }

    #[test]
    fn degree_bookkeeping() {
        let v = GradedSpace::new(vec![0, 1]);
        let mut f = MultiMap::zero_endo(&v, 2, 0);
        assert!(f.set(&[0, 1], 1, c(1)).is_ok());
        assert!(matches!(f.set(&[0, 1], 0, c(1)), Err(Error::Grading(_))));
        assert_eq!(v.dims().get(&1), Some(&1));
        assert_eq!(v.suspend().degrees(), &[1, 2]);
    }

    #[test]
    fn arity_one_translation_is_sign_free() {
        let v = GradedSpace::ungraded(2);
        let f = fill(&v, 1, 0, &[1, 2, 3, 4]);
        let big = suspend_map(&f).unwrap();
        assert_eq!(big.degree(), 0);
        for idx in 0..f.tuple_count() {
            assert_eq!(f.output_at(idx), big.output_at(idx));
        }
    }

    #[test]
    fn multiplication_translation() {
        // m = −s ∘ μ ∘ (s⁻¹)^{⊗2}: on degree-0 inputs (s⁻¹ ⊗ s⁻¹)(sv ⊗ sw) = −v ⊗ w,
        // so m(sv, sw) = sμ(v, w), which is what suspend_map produces.
        let v = GradedSpace::ungraded(2);
        let mu = fill(&v, 2, 0, &[1, -1, 2, 0, 3, 1, 0, 5]);
        let m = suspend_map(&mu).unwrap();
        assert_eq!(m.degree(), -1);
        for idx in 0..mu.tuple_count() {
            assert_eq!(mu.output_at(idx), m.output_at(idx));
        }
        // With a degree-1 input the (s⁻¹)^{⊗2} sign shows up.
        let v = GradedSpace::new(vec![1]);
        let mut mu = MultiMap::zero_endo(&v, 2, -1);
        mu.set(&[0, 0], 0, c(1)).unwrap();
        let m = suspend_map(&mu).unwrap();
        assert_eq!(m.entry(&[0, 0], 0), &c(-1));
    }

    #[test]
    fn arity_one_brace_is_composition() {
        let v = GradedSpace::ungraded(2).suspend();
        let f = fill(&v, 1, 0, &[1, 2, 3, 4]);
        let g = fill(&v, 1, 0, &[0, 1, -1, 2]);
        let fg = f.brace(&[&g]).unwrap();
        for i in 0..2 {
            let mut e = vec![Coefficient::zero(); 2];
            e[i] = c(1);
            let gi = g.eval(&[e.clone()]).unwrap();
            assert_eq!(fg.eval(&[e]).unwrap(), f.eval(&[gi]).unwrap());
        }
    }

    #[test]
    fn commutator_under_translation() {
        let v = GradedSpace::ungraded(2);
        let f = fill(&v, 1, 0, &[1, 2, 3, 4]);
        let g = fill(&v, 1, 0, &[0, 1, -1, 2]);
        let (sf, sg) = (suspend_map(&f).unwrap(), suspend_map(&g).unwrap());
        let br = desuspend_map(&sf.gerstenhaber(&sg).unwrap()).unwrap();
        let fg = f.compose_at(1, &g).unwrap();
        let gf = g.compose_at(1, &f).unwrap();
        assert_eq!(br, fg.sub(&gf).unwrap());
    }

    #[test]
    fn self_bracket_vanishes_for_even_shift() {
        let w = GradedSpace::ungraded(2).suspend();
        // |F| = 0 on W means |f| odd in the shifted convention.
        let f = fill(&w, 1, 0, &[1, 2, 3, 4]);
        assert!(f.gerstenhaber(&f).unwrap().is_zero());
        // m for an associative μ: [m, m] = 2 m{m} = 0.
        let v = GradedSpace::ungraded(1);
        let mut mu = MultiMap::zero_endo(&v, 2, 0);
        mu.set(&[0, 0], 0, c(1)).unwrap();
        let m = suspend_map(&mu).unwrap();
        assert!(m.gerstenhaber(&m).unwrap().is_zero());
        let mut bad = MultiMap::zero_endo(&GradedSpace::ungraded(2), 2, 0);
        bad.set(&[0, 0], 1, c(1)).unwrap();
        bad.set(&[1, 0], 0, c(1)).unwrap();
        let m = suspend_map(&bad).unwrap();
        let br = m.gerstenhaber(&m).unwrap();
        assert_eq!(br, m.brace(&[&m]).unwrap().scale(&c(2)));
        assert!(!br.is_zero());
    }

    #[test]
    fn associativity_defect() {
        // m{m} translates to the associator up to sign.
        let v = GradedSpace::ungraded(2);
        let mu = fill(&v, 2, 0, &[1, 0, 2, 1, 0, 1, 3, -1]);
        let m = suspend_map(&mu).unwrap();
        let mm = desuspend_map(&m.brace(&[&m]).unwrap()).unwrap();
        let assoc = mu.compose_at(1, &mu).unwrap().sub(&mu.compose_at(2, &mu).unwrap()).unwrap();
        assert!(mm == assoc || mm == assoc.neg());
    }

    #[test]
    fn brace_with_two_arguments() {
        // m{τ, τ} for arity-2 m is the single summand m ∘ (τ ⊗ τ).
        let w = GradedSpace::ungraded(2).suspend();
        let m = fill(&w, 2, -1, &[1, 2, -1, 0, 1, 1, 2, 3]);
        let t = fill(&w, 1, 0, &[1, -1, 2, 1]);
        let b = m.brace(&[&t, &t]).unwrap();
        let direct = m.compose_at(1, &t).unwrap().compose_at(2, &t).unwrap();
        assert_eq!(b, direct);
        assert!(m.brace(&[&t, &t, &t]).unwrap().is_zero());
    }

    fn arb_map(space: GradedSpace, arity: usize, degree: Degree) -> impl Strategy<Value = MultiMap> {
        let n = space.dim().pow(arity as u32) * space.dim();
        proptest::collection::vec(-2i64..=2, n).prop_map(move |vals| fill(&space, arity, degree, &vals))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn translation_round_trip(f in arb_map(GradedSpace::new(vec![0, 1]), 2, 0)) {
            prop_assert_eq!(desuspend_map(&suspend_map(&f).unwrap()).unwrap(), f);
        }

        #[test]
        fn gerstenhaber_antisymmetry(
            f in arb_map(GradedSpace::new(vec![1, 2]), 2, 0),
            g in arb_map(GradedSpace::new(vec![1, 2]), 1, 1),
        ) {
            let a = f.gerstenhaber(&g).unwrap();
            let b = g.gerstenhaber(&f).unwrap();
            let s = Sign::pow(i64::from(f.degree()) * i64::from(g.degree()));
            prop_assert_eq!(a, b.scale(&Coefficient::sign(-s)));
        }

        #[test]
        fn gerstenhaber_jacobi(
            f in arb_map(GradedSpace::ungraded(2).suspend(), 2, -1),
            g in arb_map(GradedSpace::ungraded(2).suspend(), 1, 0),
            h in arb_map(GradedSpace::ungraded(2).suspend(), 3, -2),
        ) {
            // [f,[g,h]] = [[f,g],h] + (−1)^{|f||g|}[g,[f,h]]
            let lhs = f.gerstenhaber(&g.gerstenhaber(&h).unwrap()).unwrap();
            let r1 = f.gerstenhaber(&g).unwrap().gerstenhaber(&h).unwrap();
            let r2 = g.gerstenhaber(&f.gerstenhaber(&h).unwrap()).unwrap();
            let s = Sign::pow(i64::from(f.degree()) * i64::from(g.degree()));
            prop_assert_eq!(lhs, r1.add(&r2.scale(&Coefficient::sign(s))).unwrap());
        }
    }
}
