//! L∞-algebras: a small generic interface with the generalized Jacobi
//! residual, Maurer–Cartan sums and twisting, and the L∞-structure on
//! `ℭ_DA(V) = Hom(T(sV), sV) ⊕ Hom(T(sV), V)`.
//!
//! Every component is stored as a map `W^{⊗n} → W` with `W = sV`; a DO-type
//! component `g: W^{⊗n} → V` is stored as `sg`, so its L∞ degree is one less
//! than the degree of the stored map.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::arith::{chi_sign, Coefficient, Degree, Lambda, Rational, Sign};
use crate::error::{Error, Result};
use crate::hom_complex::{suspend_map, desuspend_map, GradedSpace, MultiMap};

/// The operations `l_n` of an L∞-algebra on homogeneous elements.
pub trait LInfinity {
    type Elem: Clone;

    /// `l_n(x_1 ⊗ … ⊗ x_n)`.
    fn bracket(&self, xs: &[&Self::Elem]) -> Result<Self::Elem>;

    /// Degree of a nonzero homogeneous element; `None` for zero.
    fn degree(&self, x: &Self::Elem) -> Result<Option<Degree>>;

    fn zero(&self) -> Self::Elem;

    fn is_zero(&self, x: &Self::Elem) -> bool;

    fn add_scaled(&self, acc: &mut Self::Elem, x: &Self::Elem, c: &Coefficient) -> Result<()>;

    /// An upper bound on `k` such that `l_{n+k}(α^{⊗k} ⊗ xs)` can be nonzero.
    fn extra_arguments_bound(&self, alpha: &Self::Elem, xs: &[&Self::Elem]) -> usize;
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..m).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..m).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..m).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

/// `(i, n−i)`-shuffles as full permutations (first block then second block).
pub fn shuffles(i: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for first in crate::dif_operads::increasing_tuples(i, n) {
        let first: Vec<usize> = first.iter().map(|k| k - 1).collect();
        let mut sigma = first.clone();
        sigma.extend((0..n).filter(|k| !first.contains(k)));
        out.push(sigma);
    }
    if i == 0 {
        out.push((0..n).collect());
    }
    out
}

fn factorial_inv(n: usize) -> Coefficient {
    Coefficient::constant(Rational::inv_factorial(n))
}

/// `Σ_i Σ_{σ ∈ Sh(i,n−i)} χ(σ)(−1)^{i(n−i)} l_{n−i+1}(l_i(x_σ(1), …) ⊗ x_σ(i+1) ⊗ …)`.
pub fn jacobi_residual<L: LInfinity>(l: &L, xs: &[&L::Elem]) -> Result<L::Elem> {
    let n = xs.len();
    let mut degs = Vec::with_capacity(n);
    for x in xs {
        match l.degree(x)? {
            Some(d) => degs.push(d),
            None => return Ok(l.zero()),
        }
    }
    let mut acc = l.zero();
    for i in 1..=n {
        for sigma in shuffles(i, n) {
            let inner_args: Vec<&L::Elem> = sigma[..i].iter().map(|&k| xs[k]).collect();
            let inner = l.bracket(&inner_args)?;
            if l.is_zero(&inner) {
                continue;
            }
            let mut outer_args = vec![&inner];
            outer_args.extend(sigma[i..].iter().map(|&k| xs[k]));
            let outer = l.bracket(&outer_args)?;
            if l.is_zero(&outer) {
                continue;
            }
            let s = chi_sign(&degs, &sigma)? * Sign::pow((i * (n - i)) as i64);
            l.add_scaled(&mut acc, &outer, &Coefficient::sign(s))?;
        }
    }
    Ok(acc)
}

/// `Σ_n (1/n!)(−1)^{n(n−1)/2} l_n(α^{⊗n})`, summed up to the structure's bound.
pub fn mc_residual<L: LInfinity>(l: &L, alpha: &L::Elem) -> Result<L::Elem> {
    match l.degree(alpha)? {
        None => return Ok(l.zero()),
        Some(-1) => {}
        Some(d) => return Err(Error::Grading(format!("Maurer–Cartan elements have degree −1, not {d}"))),
    }
    let bound = l.extra_arguments_bound(alpha, &[]);
    let mut acc = l.zero();
    for n in 1..=bound {
        let args = vec![alpha; n];
        let v = l.bracket(&args)?;
        let c = factorial_inv(n).apply_sign(Sign::pow((n * (n - 1) / 2) as i64));
        l.add_scaled(&mut acc, &v, &c)?;
    }
    Ok(acc)
}

/// The L∞-algebra twisted by a Maurer–Cartan element:
/// `l_n^α(x) = Σ_i (1/i!)(−1)^{in + i(i−1)/2} l_{n+i}(α^{⊗i} ⊗ x)`.
pub struct Twisted<'a, L: LInfinity> {
    base: &'a L,
    alpha: L::Elem,
}

impl<'a, L: LInfinity> Twisted<'a, L> {
    /// Refuses `α` with a nonzero Maurer–Cartan residual.
    pub fn new(base: &'a L, alpha: L::Elem) -> Result<Self> {
        if !base.is_zero(&mc_residual(base, &alpha)?) {
            return Err(Error::InvalidData("twisting element does not solve the Maurer–Cartan equation".into()));
        }
        Ok(Twisted { base, alpha })
    }

    pub fn alpha(&self) -> &L::Elem {
        &self.alpha
    }
}

impl<L: LInfinity> LInfinity for Twisted<'_, L> {
    type Elem = L::Elem;

    fn bracket(&self, xs: &[&Self::Elem]) -> Result<Self::Elem> {
        let n = xs.len();
        let bound = self.base.extra_arguments_bound(&self.alpha, xs);
        let mut acc = self.base.zero();
        for i in 0..=bound {
            let mut args = vec![&self.alpha; i];
            args.extend_from_slice(xs);
            let v = self.base.bracket(&args)?;
            let c = factorial_inv(i).apply_sign(Sign::pow((i * n + i * i.saturating_sub(1) / 2) as i64));
            self.base.add_scaled(&mut acc, &v, &c)?;
        }
        Ok(acc)
    }

    fn degree(&self, x: &Self::Elem) -> Result<Option<Degree>> {
        self.base.degree(x)
    }

    fn zero(&self) -> Self::Elem {
        self.base.zero()
    }

    fn is_zero(&self, x: &Self::Elem) -> bool {
        self.base.is_zero(x)
    }

    fn add_scaled(&self, acc: &mut Self::Elem, x: &Self::Elem, c: &Coefficient) -> Result<()> {
        self.base.add_scaled(acc, x, c)
    }

    fn extra_arguments_bound(&self, alpha: &Self::Elem, xs: &[&Self::Elem]) -> usize {
        let mut with_own = vec![&self.alpha];
        with_own.extend_from_slice(xs);
        self.base.extra_arguments_bound(alpha, &with_own)
    }
}

/// Which half of `ℭ_DA(V)` a component lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    /// `Hom(T(sV), sV)`.
    Alg,
    /// `Hom(T(sV), V)`, stored suspended.
    Do,
}

/// A finitely supported element of `ℭ_DA(V)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdaElement {
    w: GradedSpace,
    comps: BTreeMap<(Part, usize), MultiMap>,
}

impl CdaElement {
    /// The zero element over `V` (the stored maps live on `sV`).
    pub fn zero(v: &GradedSpace) -> Self {
        CdaElement { w: v.suspend(), comps: BTreeMap::new() }
    }

    pub fn single(v: &GradedSpace, part: Part, map: MultiMap) -> Result<Self> {
        let mut e = CdaElement::zero(v);
        e.add_component(part, &map)?;
        Ok(e)
    }

    pub fn space(&self) -> GradedSpace {
        self.w.desuspend()
    }

    pub fn suspended_space(&self) -> &GradedSpace {
        &self.w
    }

    /// L∞ degree of a stored component.
    pub fn component_degree(part: Part, map: &MultiMap) -> Degree {
        match part {
            Part::Alg => map.degree(),
            Part::Do => map.degree() - 1,
        }
    }

    pub fn add_component(&mut self, part: Part, map: &MultiMap) -> Result<()> {
        if map.src() != &self.w || map.tgt() != &self.w {
            return Err(Error::Grading("component is not a map on sV".into()));
        }
        if map.is_zero() {
            return Ok(());
        }
        let key = (part, map.arity());
        match self.comps.get_mut(&key) {
            Some(existing) => {
                existing.add_assign(map)?;
                if existing.is_zero() {
                    self.comps.remove(&key);
                }
            }
            None => {
                self.comps.insert(key, map.clone());
            }
        }
        Ok(())
    }

    pub fn component(&self, part: Part, arity: usize) -> Option<&MultiMap> {
        self.comps.get(&(part, arity))
    }

    pub fn components(&self) -> impl Iterator<Item = (Part, &MultiMap)> + '_ {
        self.comps.iter().map(|((p, _), m)| (*p, m))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// The common L∞ degree of all components; `None` for zero.
    pub fn degree(&self) -> Result<Option<Degree>> {
        let mut d = None;
        for (p, m) in self.components() {
            let k = CdaElement::component_degree(p, m);
            if d.is_some_and(|d0| d0 != k) {
                return Err(Error::Inhomogeneous);
            }
            d = Some(k);
        }
        Ok(d)
    }

    pub fn scale(&self, c: &Coefficient) -> CdaElement {
        let mut out = CdaElement { w: self.w.clone(), comps: BTreeMap::new() };
        for (k, m) in &self.comps {
            let s = m.scale(c);
            if !s.is_zero() {
                out.comps.insert(*k, s);
            }
        }
        out
    }

    pub fn add(&self, o: &CdaElement) -> Result<CdaElement> {
        let mut r = self.clone();
        for (p, m) in o.components() {
            r.add_component(p, m)?;
        }
        Ok(r)
    }

    pub fn neg(&self) -> CdaElement {
        self.scale(&Coefficient::from_int(-1))
    }

    /// Keeps only the components of one part.
    pub fn part(&self, part: Part) -> CdaElement {
        CdaElement {
            w: self.w.clone(),
            comps: self.comps.iter().filter(|((p, _), _)| *p == part).map(|(k, m)| (*k, m.clone())).collect(),
        }
    }

    /// Keeps only the components of arity `n`.
    pub fn arity_part(&self, n: usize) -> CdaElement {
        CdaElement {
            w: self.w.clone(),
            comps: self.comps.iter().filter(|((_, a), _)| *a == n).map(|(k, m)| (*k, m.clone())).collect(),
        }
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.comps.keys().map(|(_, a)| *a).max()
    }

    fn max_alg_arity(&self) -> Option<usize> {
        self.comps.keys().filter(|(p, _)| *p == Part::Alg).map(|(_, a)| *a).max()
    }
}

/// The L∞-structure on `ℭ_DA(V)`. Brackets with more than one `Alg`-type
/// argument vanish except `l_2` on two of them, which is the Gerstenhaber
/// bracket; one `Alg` argument `F` with DO arguments `g_1, …, g_m` gives
/// `(−1)^{|F|}[F, sg]` for `m = 1` and
/// `λ^{m−1} Σ_σ χ(σ)(−1)^{m|F| + Σ_j (m−j)|g_σ(j)|} F{sg_σ(1), …, sg_σ(m)}`
/// for `m ≥ 2`; an `Alg` argument in position `k+1` is first moved to the
/// front at the cost of `(−1)^{|F| Σ_{j≤k}|g_j| + k}`.
#[derive(Clone, Debug)]
pub struct CdaLinf {
    v: GradedSpace,
    lambda: Lambda,
    arity_cap: Option<usize>,
}

impl CdaLinf {
    pub fn new(v: &GradedSpace, lambda: Lambda) -> Self {
        CdaLinf { v: v.clone(), lambda, arity_cap: None }
    }

    /// Drops every output component of arity above `cap`. Exact on the kept
    /// arities as long as no input has arity-0 components.
    pub fn with_arity_cap(mut self, cap: usize) -> Self {
        self.arity_cap = Some(cap);
        self
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn space(&self) -> &GradedSpace {
        &self.v
    }

    fn within_cap(&self, arity: usize) -> bool {
        self.arity_cap.is_none_or(|c| arity <= c)
    }

    /// `l_n` on one tuple of homogeneous components.
    pub fn bracket_components(&self, comps: &[(Part, &MultiMap)]) -> Result<Option<(Part, MultiMap)>> {
        let n = comps.len();
        if n < 2 {
            return Ok(None);
        }
        let algs: Vec<usize> = (0..n).filter(|&i| comps[i].0 == Part::Alg).collect();
        if n == 2 && algs.len() == 2 {
            let (f, g) = (comps[0].1, comps[1].1);
            if !self.within_cap((f.arity() + g.arity()).saturating_sub(1)) {
                return Ok(None);
            }
            return Ok(Some((Part::Alg, f.gerstenhaber(g)?)));
        }
        let [p] = algs[..] else { return Ok(None) };
        let f = comps[p].1;
        let fd = i64::from(f.degree());
        let gs: Vec<&MultiMap> = comps.iter().enumerate().filter(|(i, _)| *i != p).map(|(_, c)| c.1).collect();
        let gdeg: Vec<Degree> = gs.iter().map(|g| g.degree() - 1).collect();
        let before: i64 = gdeg[..p].iter().map(|&d| i64::from(d)).sum();
        let front = Sign::pow(fd * before + p as i64);
        let m = gs.len();
        let out_arity = (f.arity() + gs.iter().map(|g| g.arity()).sum::<usize>()).saturating_sub(m);
        if !self.within_cap(out_arity) {
            return Ok(None);
        }
        if m == 1 {
            let r = f.gerstenhaber(gs[0])?;
            return Ok(Some((Part::Do, r.scale(&Coefficient::sign(front * Sign::pow(fd))))));
        }
        if m > f.arity() {
            return Ok(None);
        }
        let mut acc: Option<MultiMap> = None;
        for sigma in permutations(m) {
            let mut e = fd * m as i64;
            for (j, &s) in sigma[..m - 1].iter().enumerate() {
                e += (m - 1 - j) as i64 * i64::from(gdeg[s]);
            }
            let sign = chi_sign(&gdeg, &sigma)? * Sign::pow(e);
            let args: Vec<&MultiMap> = sigma.iter().map(|&s| gs[s]).collect();
            let b = f.brace(&args)?.scale(&Coefficient::sign(sign));
            match &mut acc {
                Some(a) => a.add_assign(&b)?,
                None => acc = Some(b),
            }
        }
        let coeff = self.lambda.pow((m - 1) as u32).apply_sign(front);
        Ok(acc.map(|a| (Part::Do, a.scale(&coeff))))
    }

    fn expand(
        &self,
        xs: &[Vec<(Part, &MultiMap)>],
        chosen: &mut Vec<(Part, usize)>,
        algs: usize,
        out: &mut CdaElement,
    ) -> Result<()> {
        let n = xs.len();
        let k = chosen.len();
        if k == n {
            let comps: Vec<(Part, &MultiMap)> = chosen.iter().enumerate().map(|(i, &(_, j))| xs[i][j]).collect();
            if let Some((p, m)) = self.bracket_components(&comps)? {
                out.add_component(p, &m)?;
            }
            return Ok(());
        }
        let max_algs = if n == 2 { 2 } else { 1 };
        for (j, (p, _)) in xs[k].iter().enumerate() {
            let a = algs + usize::from(*p == Part::Alg);
            // Exactly one Alg argument is needed unless n = 2.
            if a > max_algs || (a == 0 && k + 1 == n) {
                continue;
            }
            chosen.push((*p, j));
            self.expand(xs, chosen, a, out)?;
            chosen.pop();
        }
        Ok(())
    }
}

impl LInfinity for CdaLinf {
    type Elem = CdaElement;

    fn bracket(&self, xs: &[&CdaElement]) -> Result<CdaElement> {
        let mut out = CdaElement::zero(&self.v);
        if xs.len() < 2 {
            return Ok(out);
        }
        let mut comps = Vec::with_capacity(xs.len());
        for x in xs {
            if x.w != out.w {
                return Err(Error::Grading("bracket arguments over different spaces".into()));
            }
            x.degree()?;
            comps.push(x.components().collect::<Vec<_>>());
        }
        self.expand(&comps, &mut Vec::new(), 0, &mut out)?;
        Ok(out)
    }

    fn degree(&self, x: &CdaElement) -> Result<Option<Degree>> {
        x.degree()
    }

    fn zero(&self) -> CdaElement {
        CdaElement::zero(&self.v)
    }

    fn is_zero(&self, x: &CdaElement) -> bool {
        x.is_zero()
    }

    fn add_scaled(&self, acc: &mut CdaElement, x: &CdaElement, c: &Coefficient) -> Result<()> {
        for (p, m) in x.components() {
            acc.add_component(p, &m.scale(c))?;
        }
        Ok(())
    }

    /// A nonzero bracket has one `Alg` argument of arity `a` and at most `a`
    /// DO arguments (or is `l_2` on two `Alg` arguments), so at most
    /// `max(a + 1, 2)` arguments in total.
    fn extra_arguments_bound(&self, alpha: &CdaElement, xs: &[&CdaElement]) -> usize {
        let a = core::iter::once(alpha).chain(xs.iter().copied()).filter_map(CdaElement::max_alg_arity).max();
        match a {
            None => 0,
            Some(a) => (a + 1).max(2).saturating_sub(xs.len()),
        }
    }
}

/// A weight-λ differential algebra on an ungraded space: multiplication
/// `μ: A ⊗ A → A`, operator `d: A → A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifAlgebraData {
    pub space: GradedSpace,
    pub mult: MultiMap,
    pub d: MultiMap,
    pub lambda: Lambda,
}

impl DifAlgebraData {
    pub fn new(mult: MultiMap, d: MultiMap, lambda: Lambda) -> Result<Self> {
        let space = mult.src().clone();
        if space.degrees().iter().any(|&k| k != 0) {
            return Err(Error::Grading("differential algebra data must be ungraded".into()));
        }
        if mult.arity() != 2 || mult.degree() != 0 || d.arity() != 1 || d.degree() != 0 {
            return Err(Error::Grading("expected a binary multiplication and a unary operator of degree 0".into()));
        }
        if mult.tgt() != &space || d.src() != &space || d.tgt() != &space {
            return Err(Error::Grading("multiplication and operator act on different spaces".into()));
        }
        Ok(DifAlgebraData { space, mult, d, lambda })
    }

    /// Builds the data from integer structure constants:
    /// `mult[i][j][k]` is the coefficient of `e_k` in `e_i e_j`, `d[i][k]` of `e_k` in `d(e_i)`.
    pub fn from_tables(mult: &[Vec<Vec<Rational>>], d: &[Vec<Rational>], lambda: Lambda) -> Result<Self> {
        let n = d.len();
        let a = GradedSpace::ungraded(n);
        let mut mu = MultiMap::zero_endo(&a, 2, 0);
        let mut dd = MultiMap::zero_endo(&a, 1, 0);
        if mult.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: mult.len() });
        }
        for i in 0..n {
            if mult[i].len() != n || d[i].len() != n {
                return Err(Error::SizeMismatch { expected: n, found: mult[i].len().min(d[i].len()) });
            }
            for k in 0..n {
                dd.set(&[i], k, Coefficient::constant(d[i][k].clone()))?;
            }
            for j in 0..n {
                if mult[i][j].len() != n {
                    return Err(Error::SizeMismatch { expected: n, found: mult[i][j].len() });
                }
                for k in 0..n {
                    mu.set(&[i, j], k, Coefficient::constant(mult[i][j][k].clone()))?;
                }
            }
        }
        DifAlgebraData::new(mu, dd, lambda)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn lambda_coeff(&self) -> Coefficient {
        self.lambda.pow(1)
    }

    /// `(uv)w − u(vw)` as a map `A^{⊗3} → A`.
    pub fn associator(&self) -> Result<MultiMap> {
        self.mult.compose_at(1, &self.mult)?.sub(&self.mult.compose_at(2, &self.mult)?)
    }

    /// `d(uv) − d(u)v − u d(v) − λ d(u)d(v)`.
    pub fn leibniz_defect(&self) -> Result<MultiMap> {
        let duv = self.d.compose_at(1, &self.mult)?;
        let du_v = self.mult.compose_at(1, &self.d)?;
        let u_dv = self.mult.compose_at(2, &self.d)?;
        let du_dv = du_v.compose_at(2, &self.d)?.scale(&self.lambda_coeff());
        duv.sub(&du_v)?.sub(&u_dv)?.sub(&du_dv)
    }

    pub fn is_associative(&self) -> Result<bool> {
        Ok(self.associator()?.is_zero())
    }

    /// Both axioms, evaluated directly.
    pub fn satisfies_axioms(&self) -> Result<bool> {
        Ok(self.is_associative()? && self.leibniz_defect()?.is_zero())
    }

    pub fn linf(&self) -> CdaLinf {
        CdaLinf::new(&self.space, self.lambda.clone())
    }
}

/// `α = (m, τ)` with `m = −s∘μ∘(s⁻¹)^{⊗2}` and `τ = d∘s⁻¹`.
pub fn mc_from_algebra(dat: &DifAlgebraData) -> Result<CdaElement> {
    let mut a = CdaElement::zero(&dat.space);
    a.add_component(Part::Alg, &suspend_map(&dat.mult)?)?;
    a.add_component(Part::Do, &suspend_map(&dat.d)?)?;
    Ok(a)
}

/// The inverse dictionary; rejects components other than `m` and `τ`.
pub fn algebra_from_mc(alpha: &CdaElement, lambda: Lambda) -> Result<DifAlgebraData> {
    let v = alpha.space();
    for (p, m) in alpha.components() {
        if !matches!((p, m.arity()), (Part::Alg, 2) | (Part::Do, 1)) {
            return Err(Error::Grading(format!("unexpected {p:?} component of arity {}", m.arity())));
        }
    }
    let w = alpha.suspended_space();
    let mu = match alpha.component(Part::Alg, 2) {
        Some(m) => desuspend_map(m)?,
        None => desuspend_map(&MultiMap::zero_endo(w, 2, -1))?,
    };
    let d = match alpha.component(Part::Do, 1) {
        Some(t) => desuspend_map(t)?,
        None => MultiMap::zero_endo(&v, 1, 0),
    };
    DifAlgebraData::new(mu, d, lambda)
}

/// The dg Lie algebra on `ℭ_DO(A)` obtained by twisting `ℭ_DA(A)` with
/// `β = (m, 0)` for an associative `μ`. Only `l_1^β` and `l_2^β` survive.
pub struct DoDgla {
    linf: CdaLinf,
    beta: CdaElement,
}

impl DoDgla {
    pub fn new(dat: &DifAlgebraData) -> Result<Self> {
        if !dat.is_associative()? {
            return Err(Error::InvalidData("multiplication is not associative".into()));
        }
        let mut beta = CdaElement::zero(&dat.space);
        beta.add_component(Part::Alg, &suspend_map(&dat.mult)?)?;
        Ok(DoDgla { linf: dat.linf(), beta })
    }

    fn twisted(&self) -> Twisted<'_, CdaLinf> {
        Twisted { base: &self.linf, alpha: self.beta.clone() }
    }

    fn check_do(x: &CdaElement) -> Result<()> {
        if x.components().any(|(p, _)| p == Part::Alg) {
            return Err(Error::Grading("argument is not in the DO part".into()));
        }
        Ok(())
    }

    pub fn l1(&self, g: &CdaElement) -> Result<CdaElement> {
        DoDgla::check_do(g)?;
        self.twisted().bracket(&[g])
    }

    pub fn l2(&self, g: &CdaElement, h: &CdaElement) -> Result<CdaElement> {
        DoDgla::check_do(g)?;
        DoDgla::check_do(h)?;
        self.twisted().bracket(&[g, h])
    }

    /// `l_n^β` for `n ≥ 3` on DO arguments; zero by the arity of `m`.
    pub fn higher(&self, xs: &[&CdaElement]) -> Result<CdaElement> {
        self.twisted().bracket(xs)
    }

    /// `l_1^β(τ) − ½ l_2^β(τ, τ)`.
    pub fn mc_residual(&self, tau: &CdaElement) -> Result<CdaElement> {
        let a = self.l1(tau)?;
        let b = self.l2(tau, tau)?;
        a.add(&b.scale(&Coefficient::constant(Rational::new(-1, 2))))
    }

    pub fn linf(&self) -> &CdaLinf {
        &self.linf
    }
}

/// A random homogeneous element of L∞ degree `degree` over `v`, with
/// components of the listed parts and arities; entries in `−2..=2`.
pub fn random_element(
    v: &GradedSpace,
    degree: Degree,
    parts: &[Part],
    arities: core::ops::RangeInclusive<usize>,
    rng: &mut impl RngCore,
) -> Result<CdaElement> {
    let w = v.suspend();
    let mut x = CdaElement::zero(v);
    for &p in parts {
        for n in arities.clone() {
            let map_degree = match p {
                Part::Alg => degree,
                Part::Do => degree + 1,
            };
            let mut m = MultiMap::zero_endo(&w, n, map_degree);
            for idx in 0..m.tuple_count() {
                let t = m.tuple(idx);
                for o in 0..w.dim() {
                    if m.admissible(&t, o) {
                        let r = (rng.next_u32() % 5) as i64 - 2;
                        m.set(&t, o, Coefficient::from_int(r))?;
                    }
                }
            }
            x.add_component(p, &m)?;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(k: i64) -> Rational {
        Rational::from_int(k)
    }

    /// `A = ℚe`, `e² = e`, `d(e) = δ e`.
    fn idempotent(delta: i64, lambda: Lambda) -> DifAlgebraData {
        DifAlgebraData::from_tables(&[vec![vec![q(1)]]], &[vec![q(delta)]], lambda).unwrap()
    }

    #[test]
    fn permutations_and_shuffles() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
        assert_eq!(shuffles(2, 4).len(), 6);
        assert_eq!(shuffles(1, 3), vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 0, 1]]);
    }

    #[test]
    fn mc_of_honest_algebras() {
        let one = Lambda::Fixed(q(1));
        for dat in [idempotent(-1, one.clone()), idempotent(0, one.clone()), idempotent(0, Lambda::Generic)] {
            assert!(dat.satisfies_axioms().unwrap());
            let a = mc_from_algebra(&dat).unwrap();
            assert!(mc_residual(&dat.linf(), &a).unwrap().is_zero());
        }
        // d(e) = e with λ = 1: d(e·e) = e but d(e)e + e d(e) + d(e)d(e) = 3e.
        let bad = idempotent(1, one);
        assert!(!bad.satisfies_axioms().unwrap());
        let r = mc_residual(&bad.linf(), &mc_from_algebra(&bad).unwrap()).unwrap();
        assert!(r.component(Part::Alg, 2).is_none());
        assert!(r.component(Part::Do, 2).is_some());
    }

    #[test]
    fn non_associative_gives_alg_residual() {
        let z = q(0);
        let o = q(1);
        // e1 e1 = e2, everything else zero except e2 e1 = e1: (e1e1)e1 = e1 but e1(e1e1) = 0.
        let mult = vec![
            vec![vec![z.clone(), o.clone()], vec![z.clone(), z.clone()]],
            vec![vec![o.clone(), z.clone()], vec![z.clone(), z.clone()]],
        ];
        let d = vec![vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]];
        let dat = DifAlgebraData::from_tables(&mult, &d, Lambda::Generic).unwrap();
        let r = mc_residual(&dat.linf(), &mc_from_algebra(&dat).unwrap()).unwrap();
        assert!(r.component(Part::Alg, 3).is_some());
    }

    #[test]
    fn dictionary_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let mut t = || Rational::from_int((rng.next_u32() % 5) as i64 - 2);
            let mult: Vec<Vec<Vec<Rational>>> = (0..2).map(|_| (0..2).map(|_| vec![t(), t()]).collect()).collect();
            let d: Vec<Vec<Rational>> = (0..2).map(|_| vec![t(), t()]).collect();
            let dat = DifAlgebraData::from_tables(&mult, &d, Lambda::Fixed(q(2))).unwrap();
            let back = algebra_from_mc(&mc_from_algebra(&dat).unwrap(), Lambda::Fixed(q(2))).unwrap();
            assert_eq!(back, dat);
        }
        let dat = idempotent(0, Lambda::Generic);
        assert!(mc_from_algebra(&dat).unwrap().component(Part::Do, 1).is_none());
    }

    #[test]
    fn l2_on_alg_parts_is_gerstenhaber() {
        let v = GradedSpace::ungraded(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_element(&v, -1, &[Part::Alg], 2..=2, &mut rng).unwrap();
        let g = random_element(&v, 0, &[Part::Alg], 1..=1, &mut rng).unwrap();
        let l = CdaLinf::new(&v, Lambda::Generic);
        let b = l.bracket(&[&f, &g]).unwrap();
        let ff = f.component(Part::Alg, 2).unwrap();
        let gg = g.component(Part::Alg, 1).unwrap();
        assert_eq!(b.component(Part::Alg, 2).unwrap(), &ff.gerstenhaber(gg).unwrap());
        // Two Alg parts among four arguments vanish.
        let t = random_element(&v, -1, &[Part::Do], 1..=1, &mut rng).unwrap();
        assert!(l.bracket(&[&f, &f, &t, &t]).unwrap().is_zero());
        assert!(l.bracket(&[&f]).unwrap().is_zero());
    }

    #[test]
    fn l3_of_m_tau_tau() {
        // l_3(m, τ, τ) = 2λ (−1)^{2|m| + |τ|} m{sτ, sτ} = −2λ m ∘ (sτ ⊗ sτ).
        let dat = idempotent(-1, Lambda::Generic);
        let a = mc_from_algebra(&dat).unwrap();
        let m = a.part(Part::Alg);
        let t = a.part(Part::Do);
        let l = dat.linf();
        let r = l.bracket(&[&m, &t, &t]).unwrap();
        let mm = m.component(Part::Alg, 2).unwrap();
        let tt = t.component(Part::Do, 1).unwrap();
        let expect = mm.brace(&[tt, tt]).unwrap().scale(&(&Coefficient::from_int(-2) * &Coefficient::lambda_pow(1)));
        assert_eq!(r.component(Part::Do, 2).unwrap(), &expect);
        // Antisymmetry: moving m behind τ costs (−1)^{|m||τ| + 1} = +1 for degrees −1, −1.
        assert_eq!(l.bracket(&[&t, &m, &t]).unwrap(), r);
    }

    #[test]
    fn jacobi_small_degree_zero() {
        let v = GradedSpace::ungraded(1);
        let l = CdaLinf::new(&v, Lambda::Generic);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            for _ in 0..4 {
                let xs: Vec<CdaElement> = (0..n)
                    .map(|k| {
                        let deg = -((rng.next_u32() % 3) as Degree) + if k == 0 { 0 } else { -1 };
                        random_element(&v, deg, &[Part::Alg, Part::Do], 0..=2, &mut rng).unwrap()
                    })
                    .collect();
                let refs: Vec<&CdaElement> = xs.iter().collect();
                assert!(jacobi_residual(&l, &refs).unwrap().is_zero(), "n = {n}");
            }
        }
    }

    #[test]
    fn jacobi_two_degrees() {
        let v = GradedSpace::new(vec![0, 1]);
        let l = CdaLinf::new(&v, Lambda::Generic);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=3 {
            for _ in 0..3 {
                let xs: Vec<CdaElement> = (0..n)
                    .map(|_| {
                        let deg = (rng.next_u32() % 3) as Degree - 1;
                        random_element(&v, deg, &[Part::Alg, Part::Do], 0..=2, &mut rng).unwrap()
                    })
                    .collect();
                let refs: Vec<&CdaElement> = xs.iter().collect();
                assert!(jacobi_residual(&l, &refs).unwrap().is_zero(), "n = {n}");
            }
        }
    }

    #[test]
    fn twisting_by_zero_is_identity() {
        let v = GradedSpace::ungraded(1);
        let l = CdaLinf::new(&v, Lambda::Generic);
        let tw = Twisted::new(&l, CdaElement::zero(&v)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_element(&v, -1, &[Part::Alg, Part::Do], 1..=2, &mut rng).unwrap();
        let y = random_element(&v, 0, &[Part::Alg, Part::Do], 0..=1, &mut rng).unwrap();
        assert_eq!(tw.bracket(&[&x, &y]).unwrap(), l.bracket(&[&x, &y]).unwrap());
        assert!(tw.bracket(&[&x]).unwrap().is_zero());
    }

    #[test]
    fn do_dgla_structure() {
        let dat = idempotent(-1, Lambda::Fixed(q(1)));
        let dg = DoDgla::new(&dat).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_element(&dat.space, -1, &[Part::Do], 1..=1, &mut rng).unwrap();
        let h = random_element(&dat.space, -2, &[Part::Do], 2..=2, &mut rng).unwrap();
        let k = random_element(&dat.space, 0, &[Part::Do], 0..=0, &mut rng).unwrap();
        assert!(dg.higher(&[&g, &h, &k]).unwrap().is_zero());
        // Graded antisymmetry of l_2^β.
        let gh = dg.l2(&g, &h).unwrap();
        let hg = dg.l2(&h, &g).unwrap();
        let s = Sign::pow(1 + 2);
        assert_eq!(gh, hg.scale(&Coefficient::sign(s)));
        // λ = 0 kills the bracket.
        let dat0 = idempotent(0, Lambda::Fixed(q(0)));
        let dg0 = DoDgla::new(&dat0).unwrap();
        assert!(dg0.l2(&g, &h).unwrap().is_zero());
        // τ from a genuine weight-λ operator solves the dgla MC equation.
        let tau = mc_from_algebra(&dat).unwrap().part(Part::Do);
        assert!(dg.mc_residual(&tau).unwrap().is_zero());
    }
}
