//! The dg operad Dif∞ (generators `m_n`, `d_n` and their differential) and
//! the operad Dif, presented by a rewriting system on `m_2`, `d_1` trees.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{Coefficient, Degree, Lambda, Sign};
use crate::error::{Error, Result};
use crate::free_operad::{GenKind, Generator, OperadElement, TreeMonomial};
use crate::trees::{Divisor, Label, Slot, Tree};

/// `∂m_n` and `∂d_n` written out directly.
pub fn difinfty_diff(g: &Generator, lambda: &Lambda) -> Result<OperadElement> {
    let n = g.arity();
    let mut out = OperadElement::zero();
    let gen = |x: Generator| OperadElement::generator(x);
    let sgn = |e: i64| Coefficient::sign(Sign::pow(e));
    match g.kind {
        GenKind::M => {
            for j in 2..n {
                for i in 1..=n - j + 1 {
                    let t = gen(Generator::m(n - j + 1)).compose(i, &gen(Generator::m(j)))?;
                    out.add_assign(&t.scale(&sgn((i + j * (n - i)) as i64)))?;
                }
            }
        }
        GenKind::D => {
            for j in 2..=n {
                for i in 1..=n - j + 1 {
                    let t = gen(Generator::d(n - j + 1)).compose(i, &gen(Generator::m(j)))?;
                    out.add_assign(&t.scale(&-sgn((i + j * (n - i)) as i64)))?;
                }
            }
            for p in 2..=n {
                for q in 1..=p {
                    // Σ l_s = n − p + q with every l_s ≥ 1.
                    let total = n + q - p;
                    if total < q {
                        continue;
                    }
                    for ks in increasing_tuples(q, p) {
                        for ls in compositions(total, q) {
                            let mut acc = gen(Generator::m(p));
                            let mut shift = 0usize;
                            let mut xi = 0i64;
                            for s in 0..q {
                                acc = acc.compose(ks[s] + shift, &gen(Generator::d(ls[s])))?;
                                shift += ls[s] - 1;
                                xi += ((ls[s] - 1) * (p - ks[s])) as i64;
                            }
                            let c = &lambda.pow((q - 1) as u32) * &-sgn(xi);
                            out.add_assign(&acc.scale(&c))?;
                        }
                    }
                }
            }
        }
        _ => return Err(Error::ForeignGenerator(g.symbol())),
    }
    Ok(out)
}

/// All `1 ≤ k_1 < … < k_q ≤ p`.
pub fn increasing_tuples(q: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if q > p {
        return out;
    }
    let mut cur: Vec<usize> = (1..=q).collect();
    loop {
        out.push(cur.clone());
        let mut j = q;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if cur[j] < p - (q - 1 - j) {
                cur[j] += 1;
                for t in j + 1..q {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Ordered ways of writing `total` as `parts` positive integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    if total < parts {
        return out;
    }
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The differential of Dif∞ tabulated on generators up to an arity bound.
#[derive(Clone, Debug)]
pub struct DiffTable {
    lambda: Lambda,
    max_arity: usize,
    table: BTreeMap<Generator, OperadElement>,
}

impl DiffTable {
    pub fn new(max_arity: usize, lambda: Lambda) -> Result<Self> {
        let mut table = BTreeMap::new();
        for n in 1..=max_arity {
            if n >= 2 {
                table.insert(Generator::m(n), difinfty_diff(&Generator::m(n), &lambda)?);
            }
            table.insert(Generator::d(n), difinfty_diff(&Generator::d(n), &lambda)?);
        }
        Ok(DiffTable { lambda, max_arity, table })
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn image(&self, g: &Generator) -> Result<OperadElement> {
        self.table.get(g).cloned().ok_or_else(|| Error::MissingImage(g.symbol()))
    }

    pub fn image_ref(&self, g: &Generator) -> Option<&OperadElement> {
        self.table.get(g)
    }

    /// ∂ on arbitrary elements via the Leibniz rule.
    pub fn diff(&self, x: &OperadElement) -> Result<OperadElement> {
        x.extend_derivation(|g| self.image(g))
    }

    /// ∂ of one monomial, skipping vertices whose image vanishes.
    pub fn diff_monomial(&self, t: &TreeMonomial, c: &Coefficient, out: &mut OperadElement) -> Result<()> {
        let mut before: i64 = 0;
        for (k, g) in t.labels().enumerate() {
            let img = self.image_ref(g).ok_or_else(|| Error::MissingImage(g.symbol()))?;
            if !img.is_zero() {
                let d = Divisor::single(k + 1);
                let s0 = Sign::pow(before);
                for (e, ec) in img.terms() {
                    let (nt, s) = t.substitute(&d, e)?;
                    out.add_term(nt, &(c * ec).apply_sign(s * s0))?;
                }
            }
            before += i64::from(g.degree());
        }
        Ok(())
    }
}

/// Outcome of the ∂² check: every generator with a nonzero `∂²`.
#[derive(Clone, Debug, Default)]
pub struct D2Report {
    pub checked: Vec<Generator>,
    pub residuals: Vec<(Generator, OperadElement)>,
}

impl D2Report {
    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }
}

pub fn check_d_square(max_arity: usize, lambda: &Lambda) -> Result<D2Report> {
    let table = DiffTable::new(max_arity, lambda.clone())?;
    let mut rep = D2Report::default();
    for n in 1..=max_arity {
        let gens: Vec<Generator> =
            if n >= 2 { vec![Generator::m(n), Generator::d(n)] } else { vec![Generator::d(n)] };
        for g in gens {
            rep.checked.push(g);
            let dd = table.diff(&table.image(&g)?)?;
            if !dd.is_zero() {
                rep.residuals.push((g, dd));
            }
        }
    }
    Ok(rep)
}

/// Every Dif∞ tree monomial with arity ≤ `max_arity`, weight ≤ `max_weight`
/// and degree in `degrees`; sorted by the structural order.
pub fn enumerate_monomials(max_arity: usize, max_weight: usize, degrees: core::ops::RangeInclusive<Degree>) -> Vec<TreeMonomial> {
    let max_deg = *degrees.end();
    let mut gens = Vec::new();
    for n in 1..=max_arity {
        if n >= 2 && (n as Degree) - 2 <= max_deg {
            gens.push(Generator::m(n));
        }
        if (n as Degree) - 1 <= max_deg {
            gens.push(Generator::d(n));
        }
    }
    // by_weight[w]: subtrees of weight w with admissible arity and degree.
    let mut by_weight: Vec<Vec<Tree<Generator>>> = vec![Vec::new()];
    for w in 1..=max_weight {
        let mut level = Vec::new();
        for g in &gens {
            let mut kids: Vec<Option<&Tree<Generator>>> = Vec::new();
            fill_children(g, w - 1, &by_weight, max_arity, max_deg, &mut kids, &mut level);
        }
        by_weight.push(level);
    }
    let mut out: Vec<TreeMonomial> =
        by_weight.into_iter().flatten().filter(|t| degrees.contains(&t.degree())).collect();
    out.sort();
    out
}

fn fill_children<'a>(
    g: &Generator,
    remaining: usize,
    by_weight: &'a [Vec<Tree<Generator>>],
    max_arity: usize,
    max_deg: Degree,
    kids: &mut Vec<Option<&'a Tree<Generator>>>,
    out: &mut Vec<Tree<Generator>>,
) {
    let arity_so_far: usize = kids.iter().map(|k| k.map_or(1, |t| t.arity())).sum::<usize>();
    let deg_so_far: Degree = g.degree() + kids.iter().map(|k| k.map_or(0, |t| t.degree())).sum::<Degree>();
    let open = g.arity() - kids.len();
    if arity_so_far + open > max_arity || deg_so_far > max_deg {
        return;
    }
    if open == 0 {
        if remaining == 0 {
            let mut slots = vec![Slot::Vertex(*g)];
            for k in kids.iter() {
                match k {
                    None => slots.push(Slot::Leaf),
                    Some(t) => slots.extend_from_slice(t.slots()),
                }
            }
            out.push(Tree::from_slots(slots).expect("valid construction"));
        }
        return;
    }
    kids.push(None);
    fill_children(g, remaining, by_weight, max_arity, max_deg, kids, out);
    kids.pop();
    for w in 1..=remaining.min(by_weight.len() - 1) {
        for t in &by_weight[w] {
            kids.push(Some(t));
            fill_children(g, remaining - w, by_weight, max_arity, max_deg, kids, out);
            kids.pop();
        }
    }
}

/// Default bound on rewriting steps.
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

fn is_dif_letter(g: &Generator) -> bool {
    (g.kind == GenKind::M && g.arity() == 2) || (g.kind == GenKind::D && g.arity() == 1)
}

/// Leftmost-innermost redex of a degree-0 monomial, as (vertex index, rule).
fn find_redex(t: &TreeMonomial) -> Option<(usize, bool)> {
    let vs = t.vertex_slots();
    let slots = t.slots();
    let redex_at = |slot: usize| -> Option<bool> {
        let Slot::Vertex(g) = &slots[slot] else { return None };
        let child_is_m2 = matches!(&slots[slot + 1], Slot::Vertex(c) if c.kind == GenKind::M);
        if !child_is_m2 {
            return None;
        }
        match g.kind {
            GenKind::M => Some(true),
            GenKind::D => Some(false),
            _ => None,
        }
    };
    let redexes: Vec<(usize, usize, bool)> =
        vs.iter().enumerate().filter_map(|(k, &s)| redex_at(s).map(|r| (k + 1, s, r))).collect();
    for &(v, s, rule) in &redexes {
        let end = t.subtree_end(s);
        if !redexes.iter().any(|&(_, s2, _)| s2 > s && s2 < end) {
            return Some((v, rule));
        }
    }
    None
}

fn rewrite_rules(lambda: &Lambda) -> (OperadElement, OperadElement) {
    let t = |s: &str| TreeMonomial::parse(s).expect("fixed tree");
    let assoc = OperadElement::monomial(t("(m2 _ (m2 _ _))"), Coefficient::one());
    let mut leib = OperadElement::monomial(t("(m2 (d1 _) _)"), Coefficient::one());
    leib.push(t("(m2 _ (d1 _))"), &Coefficient::one());
    leib.push(t("(m2 (d1 _) (d1 _))"), &lambda.pow(1));
    (assoc, leib)
}

/// Every single-step reduct of a monomial, one per redex.
pub fn one_step_reducts(t: &TreeMonomial, lambda: &Lambda) -> Vec<OperadElement> {
    let (assoc, leib) = rewrite_rules(lambda);
    let vs = t.vertex_slots();
    let slots = t.slots();
    let mut out = Vec::new();
    for (k, &s) in vs.iter().enumerate() {
        let Slot::Vertex(g) = &slots[s] else { continue };
        if !matches!(&slots[s + 1], Slot::Vertex(c) if c.kind == GenKind::M) {
            continue;
        }
        let rhs = if g.kind == GenKind::M { &assoc } else { &leib };
        out.push(apply_rule(t, k + 1, rhs));
    }
    out
}

fn apply_rule(t: &TreeMonomial, v: usize, rhs: &OperadElement) -> OperadElement {
    let d = Divisor::new(t, [v, v + 1]).expect("vertex and first child form a divisor");
    let mut out = OperadElement::zero();
    for (e, c) in rhs.terms() {
        let (nt, _) = t.substitute(&d, e).expect("arity matches");
        out.push(nt, c);
    }
    out
}

/// Normal form under `μ∘₁μ → μ∘₂μ` and `d∘₁μ → μ∘₁d + μ∘₂d + λ(μ∘₁d)∘₂d`.
pub fn dif_normalize(x: &OperadElement, lambda: &Lambda, max_steps: usize) -> Result<OperadElement> {
    for (t, _) in x.terms() {
        if let Some(g) = t.labels().find(|g| !is_dif_letter(g)) {
            return Err(Error::ForeignGenerator(g.symbol()));
        }
    }
    let (assoc, leib) = rewrite_rules(lambda);
    let mut pending: BTreeMap<TreeMonomial, Coefficient> = BTreeMap::new();
    for (t, c) in x.terms() {
        pending.insert(t.clone(), c.clone());
    }
    let mut done = OperadElement::zero();
    let mut steps = 0usize;
    while let Some((t, c)) = pending.pop_first() {
        match find_redex(&t) {
            None => done.push(t, &c),
            Some((v, rule)) => {
                steps += 1;
                if steps > max_steps {
                    return Err(Error::StepBound(max_steps));
                }
                let rhs = if rule { &assoc } else { &leib };
                for (nt, nc) in apply_rule(&t, v, rhs).terms() {
                    let e = pending.entry(nt.clone()).or_default();
                    e.add_product(nc, &c);
                    if e.is_zero() {
                        pending.remove(nt);
                    }
                }
            }
        }
    }
    Ok(done.map_coefficients(|c| lambda.normalize(c)))
}

/// The projection `p: Dif∞ → Dif` on degree-0 elements.
pub fn project_p(x: &OperadElement, lambda: &Lambda, max_steps: usize) -> Result<OperadElement> {
    if let Some(d) = x.degree() {
        if d != 0 {
            return Err(Error::Grading(alloc::format!("p is defined in degree 0, got {d}")));
        }
    }
    dif_normalize(x, lambda, max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeMonomial {
        TreeMonomial::parse(s).unwrap()
    }

    fn el(terms: &[(&str, Coefficient)]) -> OperadElement {
        OperadElement::from_terms(terms.iter().map(|(s, c)| (t(s), c.clone()))).unwrap()
    }

    fn int(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    #[test]
    fn low_differentials() {
        let g = Lambda::Generic;
        assert!(difinfty_diff(&Generator::m(2), &g).unwrap().is_zero());
        assert!(difinfty_diff(&Generator::d(1), &g).unwrap().is_zero());
        assert_eq!(
            difinfty_diff(&Generator::m(3), &g).unwrap(),
            el(&[("(m2 (m2 _ _) _)", int(-1)), ("(m2 _ (m2 _ _))", int(1))])
        );
        assert_eq!(
            difinfty_diff(&Generator::d(2), &g).unwrap(),
            el(&[
                ("(d1 (m2 _ _))", int(1)),
                ("(m2 (d1 _) _)", int(-1)),
                ("(m2 _ (d1 _))", int(-1)),
                ("(m2 (d1 _) (d1 _))", -Coefficient::lambda_pow(1)),
            ])
        );
    }

    #[test]
    fn diff_of_composites() {
        let tab = DiffTable::new(4, Lambda::Generic).unwrap();
        let m2 = OperadElement::generator(Generator::m(2));
        let m3 = OperadElement::generator(Generator::m(3));
        assert!(tab.diff(&m2.compose(1, &m2).unwrap()).unwrap().is_zero());
        let x = m3.compose(1, &m2).unwrap();
        assert_eq!(tab.diff(&x).unwrap(), tab.diff(&m3).unwrap().compose(1, &m2).unwrap());
        let d3 = OperadElement::generator(Generator::d(3));
        assert!(tab.diff(&tab.diff(&d3).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn d_square_small() {
        for n in [2, 3, 5] {
            let r = check_d_square(n, &Lambda::Generic).unwrap();
            assert!(r.passed(), "{:?}", r.residuals);
        }
        let r = check_d_square(4, &Lambda::Fixed(crate::Rational::new(-3, 2))).unwrap();
        assert!(r.passed());
    }

    /// ∂² vanishes on composites too, not just generators.
    #[test]
    fn d_square_on_composites() {
        let tab = DiffTable::new(4, Lambda::Generic).unwrap();
        for m in enumerate_monomials(4, 2, 1..=3) {
            let x = OperadElement::monomial(m, Coefficient::one());
            assert!(tab.diff(&tab.diff(&x).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn tuples_and_compositions() {
        assert_eq!(increasing_tuples(2, 3), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(1, 2), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn enumeration_counts() {
        // Degree 0, arity ≤ 2, weight ≤ 2: m2, d1, d1∘d1, d1∘m2, m2∘₁d1, m2∘₂d1.
        let v = enumerate_monomials(2, 2, 0..=0);
        assert_eq!(v.len(), 6);
        let all = enumerate_monomials(3, 2, 0..=2);
        for t in &all {
            assert!(t.arity() <= 3 && t.weight() <= 2 && t.degree() <= 2);
        }
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
    }

    #[test]
    fn normalize_examples() {
        let g = Lambda::Generic;
        let n = |s: &str| dif_normalize(&el(&[(s, int(1))]), &g, DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(n("(m2 (m2 _ _) _)"), el(&[("(m2 _ (m2 _ _))", int(1))]));
        assert_eq!(n("(d1 (d1 _))"), el(&[("(d1 (d1 _))", int(1))]));
        // d∘₁(μ∘₁μ) and d∘₁(μ∘₂μ) are equal in Dif.
        assert_eq!(n("(d1 (m2 (m2 _ _) _))"), n("(d1 (m2 _ (m2 _ _)))"));
        let bad = el(&[("(m3 _ _ _)", int(1))]);
        assert!(dif_normalize(&bad, &g, 10).is_err());
        assert!(matches!(dif_normalize(&el(&[("(d1 (m2 (m2 _ _) _))", int(1))]), &g, 2), Err(Error::StepBound(2))));
    }

    #[test]
    fn p_kills_relations() {
        let g = Lambda::Generic;
        let tab = DiffTable::new(3, g.clone()).unwrap();
        for s in [Generator::m(3), Generator::d(2), Generator::d(3)] {
            let img = tab.image(&s).unwrap();
            if img.degree() == Some(0) {
                assert!(project_p(&img, &g, DEFAULT_MAX_STEPS).unwrap().is_zero(), "{s}");
            }
        }
        assert!(project_p(&OperadElement::generator(Generator::m(3)), &g, 10).is_err());
        assert_eq!(
            project_p(&el(&[("(d1 (d1 _))", int(1))]), &g, 10).unwrap(),
            el(&[("(d1 (d1 _))", int(1))])
        );
    }

    #[test]
    fn normalize_idempotent_and_confluent() {
        let g = Lambda::Generic;
        for t0 in enumerate_monomials(6, 5, 0..=0) {
            let x = OperadElement::monomial(t0.clone(), Coefficient::one());
            let nf = dif_normalize(&x, &g, DEFAULT_MAX_STEPS).unwrap();
            assert_eq!(dif_normalize(&nf, &g, DEFAULT_MAX_STEPS).unwrap(), nf);
            for r in one_step_reducts(&t0, &g) {
                assert_eq!(dif_normalize(&r, &g, DEFAULT_MAX_STEPS).unwrap(), nf, "{t0}");
            }
        }
    }
}
