//! Homotopy differential algebras of weight λ on finite graded spaces,
//! truncated at an arity bound `N`.
//!
//! Three equivalent descriptions are implemented and compared arity by arity:
//! the operations `m_n`, `d_n` with the Stasheff and weighted Leibniz
//! identities, the suspended maps `b_n`, `R_n` with brace identities, and a
//! Maurer–Cartan element of the reduced L∞-algebra.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::arith::{Coefficient, Degree, Lambda, Rational, Sign};
use crate::cochain::dense_rank;
use crate::error::{Error, Result};
use crate::hom_complex::{desuspend_map, suspend_map, GradedSpace, MultiMap};
use crate::linf_def::{mc_residual, CdaElement, DifAlgebraData, Part};

/// Operations `m_n` of degree `n − 2` and `d_n` of degree `n − 1` for `1 ≤ n ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HdaStructure {
    v: GradedSpace,
    lambda: Lambda,
    m: Vec<MultiMap>,
    d: Vec<MultiMap>,
}

pub fn m_degree(n: usize) -> Degree {
    n as Degree - 2
}

pub fn d_degree(n: usize) -> Degree {
    n as Degree - 1
}

impl HdaStructure {
    pub fn zero(v: &GradedSpace, lambda: Lambda, max_arity: usize) -> Self {
        HdaStructure {
            v: v.clone(),
            lambda,
            m: (1..=max_arity).map(|n| MultiMap::zero_endo(v, n, m_degree(n))).collect(),
            d: (1..=max_arity).map(|n| MultiMap::zero_endo(v, n, d_degree(n))).collect(),
        }
    }

    /// `(V, μ, d)` as `m_2 = μ`, `d_1 = d`, all other operations zero.
    pub fn from_algebra(dat: &DifAlgebraData, max_arity: usize) -> Result<Self> {
        let mut s = HdaStructure::zero(&dat.space, dat.lambda.clone(), max_arity);
        if max_arity >= 2 {
            s.set_m(2, dat.mult.clone())?;
        }
        if max_arity >= 1 {
            s.set_d(1, dat.d.clone())?;
        }
        Ok(s)
    }

    pub fn space(&self) -> &GradedSpace {
        &self.v
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn max_arity(&self) -> usize {
        self.m.len()
    }

    fn check_slot(&self, n: usize, f: &MultiMap, degree: Degree) -> Result<()> {
        if n == 0 || n > self.max_arity() {
            return Err(Error::PositionOutOfRange { position: n, arity: self.max_arity() });
        }
        if f.src() != &self.v || f.tgt() != &self.v || f.arity() != n || f.degree() != degree {
            return Err(Error::Grading(format!("operation of arity {n} must have degree {degree} on V")));
        }
        Ok(())
    }

    pub fn set_m(&mut self, n: usize, f: MultiMap) -> Result<()> {
        self.check_slot(n, &f, m_degree(n))?;
        self.m[n - 1] = f;
        Ok(())
    }

    pub fn set_d(&mut self, n: usize, f: MultiMap) -> Result<()> {
        self.check_slot(n, &f, d_degree(n))?;
        self.d[n - 1] = f;
        Ok(())
    }

    pub fn m(&self, n: usize) -> &MultiMap {
        &self.m[n - 1]
    }

    pub fn d(&self, n: usize) -> &MultiMap {
        &self.d[n - 1]
    }

    fn check_arity(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.max_arity() {
            return Err(Error::PositionOutOfRange { position: n, arity: self.max_arity() });
        }
        Ok(())
    }

    fn normalized(&self, f: MultiMap) -> MultiMap {
        f.map_coefficients(|c| self.lambda.normalize(c))
    }

    /// `Σ_{i+j+k=n} (−1)^{i+jk} m_{i+1+k} ∘ (Id^{⊗i} ⊗ m_j ⊗ Id^{⊗k})`.
    pub fn stasheff_residual(&self, n: usize) -> Result<MultiMap> {
        self.check_arity(n)?;
        let mut acc = MultiMap::zero_endo(&self.v, n, n as Degree - 3);
        for j in 1..=n {
            for i in 0..=n - j {
                let k = n - j - i;
                let t = self.m(i + 1 + k).compose_at(i + 1, self.m(j))?;
                acc.add_assign(&t.scale(&Coefficient::sign(Sign::pow((i + j * k) as i64))))?;
            }
        }
        Ok(self.normalized(acc))
    }

    /// Left side minus right side of the weighted Leibniz identity at arity `n`:
    /// `Σ (−1)^{i+jk} d_{i+1+k} ∘ (Id^{⊗i} ⊗ m_j ⊗ Id^{⊗k})
    ///  − Σ (−1)^η λ^{q−1} m_p ∘ (Id^{⊗j_1} ⊗ d_{l_1} ⊗ … ⊗ d_{l_q} ⊗ Id^{⊗j_{q+1}})`.
    pub fn weighted_leibniz_residual(&self, n: usize) -> Result<MultiMap> {
        self.check_arity(n)?;
        let mut acc = MultiMap::zero_endo(&self.v, n, n as Degree - 2);
        for j in 1..=n {
            for i in 0..=n - j {
                let k = n - j - i;
                let t = self.d(i + 1 + k).compose_at(i + 1, self.m(j))?;
                acc.add_assign(&t.scale(&Coefficient::sign(Sign::pow((i + j * k) as i64))))?;
            }
        }
        for term in leibniz_terms(n) {
            let p = term.p();
            let mut positions = Vec::with_capacity(term.ls.len());
            let mut at = 0;
            for (k, _) in term.ls.iter().enumerate() {
                at += term.js[k];
                positions.push(at);
                at += 1;
            }
            let gs: Vec<&MultiMap> = term.ls.iter().map(|&l| self.d(l)).collect();
            let t = self.m(p).compose_multi(&gs, &positions)?;
            let q = term.ls.len() as u32;
            let c = self.lambda.pow(q - 1).apply_sign(-Sign::pow(term.eta()));
            acc.add_assign(&t.scale(&c))?;
        }
        Ok(self.normalized(acc))
    }

    /// `b_n = s m_n (s⁻¹)^{⊗n}` and `R_n = d_n (s⁻¹)^{⊗n}`.
    pub fn to_br(&self) -> Result<BrStructure> {
        let w = self.v.suspend();
        let mut b = Vec::with_capacity(self.max_arity());
        let mut r = Vec::with_capacity(self.max_arity());
        for n in 1..=self.max_arity() {
            b.push(suspend_map(self.m(n))?);
            let sr = suspend_map(self.d(n))?;
            r.push(MultiMap::from_coords(&w, &self.v, n, -1, sr.coords().to_vec())?);
        }
        Ok(BrStructure { v: self.v.clone(), lambda: self.lambda.clone(), b, r })
    }

    /// The element `(b_n, sR_n)_{n ≤ N}` of the reduced `ℭ_DA(V)`.
    pub fn to_mc_element(&self) -> Result<CdaElement> {
        let mut x = CdaElement::zero(&self.v);
        for n in 1..=self.max_arity() {
            x.add_component(Part::Alg, &suspend_map(self.m(n))?)?;
            x.add_component(Part::Do, &suspend_map(self.d(n))?)?;
        }
        Ok(x)
    }
}

/// Suspended form: `b_n: (sV)^{⊗n} → sV` and `R_n: (sV)^{⊗n} → V`, both of degree −1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrStructure {
    v: GradedSpace,
    lambda: Lambda,
    b: Vec<MultiMap>,
    r: Vec<MultiMap>,
}

impl BrStructure {
    pub fn new(v: &GradedSpace, lambda: Lambda, b: Vec<MultiMap>, r: Vec<MultiMap>) -> Result<Self> {
        let w = v.suspend();
        if b.len() != r.len() {
            return Err(Error::SizeMismatch { expected: b.len(), found: r.len() });
        }
        for (i, (bn, rn)) in b.iter().zip(&r).enumerate() {
            let n = i + 1;
            let ok = bn.src() == &w && bn.tgt() == &w && bn.arity() == n && bn.degree() == -1
                && rn.src() == &w && rn.tgt() == v && rn.arity() == n && rn.degree() == -1;
            if !ok {
                return Err(Error::Grading(format!("b_{n} and R_{n} must have degree −1 on sV")));
            }
        }
        Ok(BrStructure { v: v.clone(), lambda, b, r })
    }

    pub fn b(&self, n: usize) -> &MultiMap {
        &self.b[n - 1]
    }

    pub fn r(&self, n: usize) -> &MultiMap {
        &self.r[n - 1]
    }

    pub fn max_arity(&self) -> usize {
        self.b.len()
    }

    /// `s ∘ R_n`, a degree-0 map on `sV`.
    fn sr(&self, n: usize) -> Result<MultiMap> {
        let w = self.v.suspend();
        MultiMap::from_coords(&w, &w, n, 0, self.r(n).coords().to_vec())
    }

    /// `m_n = s⁻¹ b_n s^{⊗n}` and `d_n = R_n s^{⊗n}`.
    pub fn from_br(&self) -> Result<HdaStructure> {
        let mut s = HdaStructure::zero(&self.v, self.lambda.clone(), self.max_arity());
        for n in 1..=self.max_arity() {
            s.set_m(n, desuspend_map(self.b(n))?)?;
            s.set_d(n, desuspend_map(&self.sr(n)?)?)?;
        }
        Ok(s)
    }

    /// `Σ_{i+j−1=n} b_i{b_j}`.
    pub fn b_residual(&self, n: usize) -> Result<MultiMap> {
        let w = self.v.suspend();
        let mut acc = MultiMap::zero_endo(&w, n, -2);
        for j in 1..=n {
            let i = n + 1 - j;
            acc.add_assign(&self.b(i).brace(&[self.b(j)])?)?;
        }
        Ok(acc.map_coefficients(|c| self.lambda.normalize(c)))
    }

    /// `Σ_{u+j−1=n} sR_u{b_j} − Σ λ^{q−1} b_p{sR_{l_1}, …, sR_{l_q}}`
    /// over `l_1 + … + l_q + p − q = n`, `1 ≤ q ≤ p ≤ n`.
    pub fn r_residual(&self, n: usize) -> Result<MultiMap> {
        let w = self.v.suspend();
        let mut acc = MultiMap::zero_endo(&w, n, -1);
        for j in 1..=n {
            let u = n + 1 - j;
            acc.add_assign(&self.sr(u)?.brace(&[self.b(j)])?)?;
        }
        let srs: Vec<MultiMap> = (1..=n).map(|l| self.sr(l)).collect::<Result<_>>()?;
        for p in 1..=n {
            for q in 1..=p {
                // l_1 + … + l_q = n − p + q with every l_k ≥ 1
                for ls in compositions(n - p + q, q) {
                    let gs: Vec<&MultiMap> = ls.iter().map(|&l| &srs[l - 1]).collect();
                    let t = self.b(p).brace(&gs)?;
                    acc.add_assign(&t.scale(&-self.lambda.pow(q as u32 - 1)))?;
                }
            }
        }
        Ok(acc.map_coefficients(|c| self.lambda.normalize(c)))
    }
}

/// Compositions of `total` into `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Weak compositions of `total` into `parts` nonnegative integers.
fn weak_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in weak_compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One term `m_p ∘ (Id^{⊗j_1} ⊗ d_{l_1} ⊗ … ⊗ d_{l_q} ⊗ Id^{⊗j_{q+1}})` of the
/// weighted Leibniz identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeibnizTerm {
    pub n: usize,
    pub js: Vec<usize>,
    pub ls: Vec<usize>,
}

impl LeibnizTerm {
    pub fn p(&self) -> usize {
        self.js.iter().sum::<usize>() + self.ls.len()
    }

    /// `η = Σ_k (l_k − 1)(q − k + Σ_{r>k} j_r)`, 1-based `k` and `r`.
    pub fn eta(&self) -> i64 {
        let q = self.ls.len();
        (1..=q)
            .map(|k| {
                let tail: usize = self.js[k..].iter().sum();
                (self.ls[k - 1] as i64 - 1) * ((q - k + tail) as i64)
            })
            .sum()
    }

    /// `n(n−1)/2 + p(p−1)/2 + Σ_k l_k(l_k−1)/2 + Σ_k (l_k − 1)(Σ_{r≤k} j_r + Σ_{r<k} l_r)`.
    pub fn eta_expanded(&self) -> i64 {
        let tri = |x: usize| (x * x.saturating_sub(1) / 2) as i64;
        let (n, p) = (self.n, self.p());
        let mut e = tri(n) + tri(p);
        for (k, &l) in self.ls.iter().enumerate() {
            let js: usize = self.js[..=k].iter().sum();
            let ls: usize = self.ls[..k].iter().sum();
            e += tri(l) + (l as i64 - 1) * (js + ls) as i64;
        }
        e
    }
}

/// All terms of the weighted Leibniz identity at arity `n`.
pub fn leibniz_terms(n: usize) -> Vec<LeibnizTerm> {
    let mut out = Vec::new();
    for q in 1..=n {
        for l_total in q..=n {
            for ls in compositions(l_total, q) {
                for js in weak_compositions(n - l_total, q + 1) {
                    out.push(LeibnizTerm { n, js, ls: ls.clone() });
                }
            }
        }
    }
    out
}

/// Per-arity comparison of the three descriptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityCheck {
    pub arity: usize,
    pub stasheff_zero: bool,
    pub leibniz_zero: bool,
    pub b_zero: bool,
    pub r_zero: bool,
    pub mc_alg_zero: bool,
    pub mc_do_zero: bool,
    /// The residuals agree as maps, not only in vanishing: the `b` residual is
    /// `s(Stasheff)` and the negated algebra part of the Maurer–Cartan residual;
    /// the `R` residual is `s(Leibniz)` and the negated operator part.
    pub residuals_match: bool,
}

impl ArityCheck {
    /// The `m`/`b`/MC algebra parts vanish together, and so do the `d`/`R`/MC operator parts.
    pub fn consistent(&self) -> bool {
        self.residuals_match
            && self.stasheff_zero == self.b_zero
            && self.b_zero == self.mc_alg_zero
            && self.leibniz_zero == self.r_zero
            && self.r_zero == self.mc_do_zero
    }

    pub fn identities_hold(&self) -> bool {
        self.stasheff_zero && self.leibniz_zero
    }

    pub fn mc_holds(&self) -> bool {
        self.mc_alg_zero && self.mc_do_zero
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HdaReport {
    pub arities: Vec<ArityCheck>,
}

impl HdaReport {
    pub fn consistent(&self) -> bool {
        self.arities.iter().all(ArityCheck::consistent)
    }

    pub fn is_structure(&self) -> bool {
        self.arities.iter().all(ArityCheck::identities_hold)
    }
}

/// Evaluates the identities, the brace identities and the Maurer–Cartan
/// residual of the reduced `ℭ_DA(V)` (capped at arity `max_arity`) arity by arity.
pub fn mc_equivalence_check(s: &HdaStructure, max_arity: usize) -> Result<HdaReport> {
    if max_arity > s.max_arity() {
        return Err(Error::PositionOutOfRange { position: max_arity, arity: s.max_arity() });
    }
    let br = s.to_br()?;
    let linf = crate::linf_def::CdaLinf::new(&s.v, s.lambda.clone()).with_arity_cap(max_arity);
    let res = mc_residual(&linf, &s.to_mc_element()?)?;
    let w = s.v.suspend();
    let component = |part: Part, n: usize, degree: Degree| {
        res.component(part, n)
            .map(|m| m.map_coefficients(|c| s.lambda.normalize(c)))
            .unwrap_or_else(|| MultiMap::zero_endo(&w, n, degree))
    };
    let mut arities = Vec::with_capacity(max_arity);
    for n in 1..=max_arity {
        let (st, le) = (s.stasheff_residual(n)?, s.weighted_leibniz_residual(n)?);
        let (bres, rres) = (br.b_residual(n)?, br.r_residual(n)?);
        let (mc_alg, mc_do) = (component(Part::Alg, n, -2), component(Part::Do, n, -1));
        let residuals_match =
            mc_alg == bres.neg() && bres == suspend_map(&st)? && mc_do == rres.neg() && rres == suspend_map(&le)?;
        arities.push(ArityCheck {
            arity: n,
            stasheff_zero: st.is_zero(),
            leibniz_zero: le.is_zero(),
            b_zero: bres.is_zero(),
            r_zero: rres.is_zero(),
            mc_alg_zero: mc_alg.is_zero(),
            mc_do_zero: mc_do.is_zero(),
            residuals_match,
        });
    }
    Ok(HdaReport { arities })
}

/// A random structure: every admissible entry of every operation is `±1`
/// with probability `density_percent / 100`, else zero.
pub fn random_structure(v: &GradedSpace, lambda: Lambda, max_arity: usize, density_percent: u32, rng: &mut impl RngCore) -> HdaStructure {
    let mut s = HdaStructure::zero(v, lambda, max_arity);
    let mut fill = |f: &mut MultiMap| {
        for idx in 0..f.tuple_count() {
            let t = f.tuple(idx);
            for o in 0..v.dim() {
                if f.admissible(&t, o) && rng.next_u32() % 100 < density_percent {
                    let c = if rng.next_u32().is_multiple_of(2) { 1 } else { -1 };
                    f.set(&t, o, Coefficient::from_int(c)).expect("admissible");
                }
            }
        }
    };
    for n in 1..=max_arity {
        fill(&mut s.m[n - 1]);
        fill(&mut s.d[n - 1]);
    }
    s
}

fn constant_matrix(f: &MultiMap, lambda: &Lambda) -> Result<Vec<Vec<Rational>>> {
    (0..f.tuple_count())
        .map(|idx| {
            f.output(&f.tuple(idx))
                .iter()
                .map(|c| {
                    lambda.normalize(c).as_constant().ok_or_else(|| Error::InvalidData("homology check needs a fixed weight".into()))
                })
                .collect()
        })
        .collect()
}

fn in_span(span: &[Vec<Rational>], v: &[Rational]) -> bool {
    let r = dense_rank(span);
    let mut with = span.to_vec();
    with.push(v.to_vec());
    dense_rank(&with) == r
}

/// Kernel of the linear map whose rows are the images of the basis vectors.
fn kernel(images: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    // Solve Σ_i c_i images[i] = 0 by reducing the transpose.
    let rows = images.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<Rational>> = (0..rows).map(|r| (0..dim).map(|i| images[i][r].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..dim {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        let inv = a[rank][c].recip();
        let pivot: Vec<Rational> = a[rank].iter().map(|x| x * &inv).collect();
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for k in 0..dim {
                    row[k] = &row[k] - &(&f * &pivot[k]);
                }
            }
        }
        a[rank] = pivot;
        pivots.push(c);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); dim];
        v[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&a[r][free];
        }
        basis.push(v);
    }
    basis
}

fn apply(f: &MultiMap, xs: &[&[Rational]]) -> Result<Vec<Rational>> {
    let vs: Vec<Vec<Coefficient>> = xs.iter().map(|x| x.iter().map(|r| Coefficient::constant(r.clone())).collect()).collect();
    f.eval(&vs)?
        .into_iter()
        .map(|c| c.as_constant().ok_or_else(|| Error::InvalidData("homology check needs a fixed weight".into())))
        .collect()
}

/// Chain-level check that `H(V, m_1)` with the products induced by `m_2` and
/// the operator induced by `d_1` is a weight-λ differential algebra: `d_1` and
/// `m_2` preserve cycles and boundaries, and the associator and Leibniz defect
/// send cycles to boundaries. Needs a fixed λ.
pub fn homology_descends(s: &HdaStructure) -> Result<bool> {
    let lam = match &s.lambda {
        Lambda::Fixed(r) => r.clone(),
        Lambda::Generic => return Err(Error::InvalidData("homology check needs a fixed weight".into())),
    };
    let dim = s.v.dim();
    let m1 = s.m(1);
    let images = constant_matrix(m1, &s.lambda)?;
    let cycles = kernel(&images, dim);
    let boundaries: Vec<Vec<Rational>> = images.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let is_boundary = |v: &[Rational]| v.iter().all(Rational::is_zero) || in_span(&boundaries, v);
    let is_cycle = |v: &[Rational]| v.iter().all(Rational::is_zero) || in_span(&cycles, v);
    let (m2, d1) = (s.m(2), s.d(1));
    for z in &cycles {
        if !is_cycle(&apply(d1, &[z])?) {
            return Ok(false);
        }
    }
    for b in &boundaries {
        if !is_boundary(&apply(d1, &[b])?) {
            return Ok(false);
        }
    }
    for x in &cycles {
        for y in &cycles {
            let xy = apply(m2, &[x, y])?;
            if !is_cycle(&xy) {
                return Ok(false);
            }
            let dx = apply(d1, &[x])?;
            let dy = apply(d1, &[y])?;
            let mut defect = apply(d1, &[&xy])?;
            let terms = [apply(m2, &[&dx, y])?, apply(m2, &[x, &dy])?, apply(m2, &[&dx, &dy])?];
            for (t, scale) in terms.iter().zip([Rational::one(), Rational::one(), lam.clone()]) {
                for (a, b) in defect.iter_mut().zip(t) {
                    *a = &*a - &(&scale * b);
                }
            }
            if !is_boundary(&defect) {
                return Ok(false);
            }
            for z in &cycles {
                let left = apply(m2, &[&xy, z])?;
                let yz = apply(m2, &[y, z])?;
                let right = apply(m2, &[x, &yz])?;
                let diff: Vec<Rational> = left.iter().zip(&right).map(|(a, b)| a - b).collect();
                if !is_boundary(&diff) {
                    return Ok(false);
                }
            }
        }
        for b in &boundaries {
            if !is_boundary(&apply(m2, &[x, b])?) || !is_boundary(&apply(m2, &[b, x])?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
