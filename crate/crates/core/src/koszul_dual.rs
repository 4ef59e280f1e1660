//! The homotopy cooperads `𝒮(Dif^¡)` (generators `m̃_n`, `d̃_n`) and
//! `Dif^¡` (generators `sm_n`, `sd_n`) as explicit decomposition tables, and
//! their cobar differentials.

use alloc::string::String;
use alloc::vec::Vec;

use crate::arith::{Coefficient, Lambda, Sign};
use crate::dif_operads::{compositions, difinfty_diff, increasing_tuples};
use crate::error::{Error, Result};
use crate::free_operad::{GenKind, Generator, OperadElement, TreeMonomial};
use crate::trees::{Label, PlanarTree, Slot, Tree};

/// The trees on which some `Δ_T` can be nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TreeShape {
    /// Two vertices: a root of arity `n−j+1` with a vertex of arity `j` on leaf `i`.
    TypeI { n: usize, j: usize, i: usize },
    /// A root of arity `p` carrying vertices of arities `l_s` on leaves `k_s`.
    TypeII { p: usize, ks: Vec<usize>, ls: Vec<usize> },
}

impl TreeShape {
    pub fn arity(&self) -> usize {
        match self {
            TreeShape::TypeI { n, .. } => *n,
            TreeShape::TypeII { p, ks, ls } => ls.iter().sum::<usize>() + p - ks.len(),
        }
    }

    pub fn weight(&self) -> usize {
        match self {
            TreeShape::TypeI { .. } => 2,
            TreeShape::TypeII { ks, .. } => ks.len() + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::MalformedShape(String::from(s)));
        match self {
            TreeShape::TypeI { n, j, i } => {
                if *j < 1 || j > n || *i < 1 || *i > n - j + 1 {
                    return bad("type (i) needs 1 ≤ j ≤ n and 1 ≤ i ≤ n−j+1");
                }
            }
            TreeShape::TypeII { p, ks, ls } => {
                let q = ks.len();
                if q < 2 || q > *p || ls.len() != q || ls.iter().any(|&l| l < 1) {
                    return bad("type (ii) needs 2 ≤ q ≤ p and l_s ≥ 1");
                }
                if ks.windows(2).any(|w| w[0] >= w[1]) || ks[0] < 1 || ks[q - 1] > *p {
                    return bad("type (ii) needs 1 ≤ k_1 < … < k_q ≤ p");
                }
            }
        }
        Ok(())
    }

    /// The tree with the given vertex labels in planar order.
    fn decorate(&self, labels: &[Generator]) -> TreeMonomial {
        let mut slots = Vec::new();
        let mut it = labels.iter();
        let root = *it.next().expect("root label");
        slots.push(Slot::Vertex(root));
        let upper: Vec<usize> = match self {
            TreeShape::TypeI { i, .. } => alloc::vec![*i],
            TreeShape::TypeII { ks, .. } => ks.clone(),
        };
        for leaf in 1..=root.arity() {
            if upper.contains(&leaf) {
                let g = *it.next().expect("upper label");
                slots.push(Slot::Vertex(g));
                slots.extend(core::iter::repeat_n(Slot::Leaf, g.arity()));
            } else {
                slots.push(Slot::Leaf);
            }
        }
        Tree::from_slots(slots).expect("shape labels fit")
    }

    pub fn planar_tree(&self) -> PlanarTree {
        let arities: Vec<usize> = match self {
            TreeShape::TypeI { n, j, .. } => alloc::vec![n - j + 1, *j],
            TreeShape::TypeII { p, ls, .. } => core::iter::once(*p).chain(ls.iter().copied()).collect(),
        };
        let labels: Vec<Generator> =
            arities.iter().map(|&a| Generator::new(GenKind::MTilde, a).expect("arity ≥ 1")).collect();
        PlanarTree::shape_of(&self.decorate(&labels))
    }
}

impl core::fmt::Display for TreeShape {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TreeShape::TypeI { n, j, i } => write!(f, "(i) n={n} j={j} i={i}"),
            TreeShape::TypeII { p, ks, ls } => write!(f, "(ii) p={p} k={ks:?} l={ls:?}"),
        }
    }
}

/// Every type (i) and type (ii) shape of arity `n`.
pub fn shapes(n: usize) -> Vec<TreeShape> {
    let mut out = Vec::new();
    for j in 1..=n {
        for i in 1..=n - j + 1 {
            out.push(TreeShape::TypeI { n, j, i });
        }
    }
    for p in 2..=n {
        for q in 2..=p {
            if n + q < p + q || n + q - p < q {
                continue;
            }
            for ks in increasing_tuples(q, p) {
                for ls in compositions(n + q - p, q) {
                    out.push(TreeShape::TypeII { p, ks: ks.clone(), ls });
                }
            }
        }
    }
    out
}

fn coop(kind: GenKind, n: usize) -> Generator {
    Generator::new(kind, n).expect("cooperad generators exist in every arity ≥ 1")
}

fn is_coop(c: &Generator) -> bool {
    matches!(c.kind, GenKind::MTilde | GenKind::DTilde | GenKind::SM | GenKind::SD)
}

/// `Δ_T(c)` as a combination of decorated copies of `T`.
pub fn delta_t(c: &Generator, shape: &TreeShape, lambda: &Lambda) -> Result<OperadElement> {
    if !is_coop(c) {
        return Err(Error::ForeignGenerator(c.symbol()));
    }
    shape.validate()?;
    let mut out = OperadElement::zero();
    let n = c.arity();
    if shape.arity() != n {
        return Ok(out);
    }
    let sgn = |e: usize| Coefficient::sign(Sign::pow(e as i64));
    let mut put = |labels: &[Generator], coeff: Coefficient| {
        out.push(shape.decorate(labels), &coeff);
    };
    use GenKind::*;
    match (c.kind, shape) {
        (MTilde, TreeShape::TypeI { j, .. }) => {
            put(&[coop(MTilde, n - j + 1), coop(MTilde, *j)], Coefficient::one());
        }
        (DTilde, TreeShape::TypeI { j, .. }) => {
            put(&[coop(DTilde, n - j + 1), coop(MTilde, *j)], Coefficient::one());
            put(&[coop(MTilde, n - j + 1), coop(DTilde, *j)], Coefficient::one());
        }
        (DTilde, TreeShape::TypeII { p, ks, ls }) => {
            let q = ks.len();
            let mut labels = alloc::vec![coop(MTilde, *p)];
            labels.extend(ls.iter().map(|&l| coop(DTilde, l)));
            put(&labels, &lambda.pow((q - 1) as u32) * &sgn(q * (q - 1) / 2));
        }
        (SM, TreeShape::TypeI { j, i, .. }) => {
            let (j, i) = (*j, *i);
            put(&[coop(SM, n - j + 1), coop(SM, j)], sgn((j - 1) * (n + 1 - i - j)));
        }
        (SD, TreeShape::TypeI { j, i, .. }) => {
            let (j, i) = (*j, *i);
            let e = (j - 1) * (n + 1 - i - j);
            put(&[coop(SD, n - j + 1), coop(SM, j)], sgn(e));
            put(&[coop(SM, n - j + 1), coop(SD, j)], sgn(e + n - j));
        }
        (SD, TreeShape::TypeII { p, ks, ls }) => {
            let q = ks.len();
            let mut alpha = q * (p - 1);
            for s in 0..q {
                alpha += (ls[s] - 1) * (p - ks[s]);
            }
            for t in 0..q.saturating_sub(1) {
                alpha += (q - 1 - t) * ls[t];
            }
            let mut labels = alloc::vec![coop(SM, *p)];
            labels.extend(ls.iter().map(|&l| coop(SD, l)));
            put(&labels, &lambda.pow((q - 1) as u32) * &sgn(alpha));
        }
        _ => {}
    }
    Ok(out)
}

/// Every nonzero `Δ_T(c)` with its shape.
pub fn delta_list(c: &Generator, lambda: &Lambda) -> Result<Vec<(TreeShape, OperadElement)>> {
    let mut out = Vec::new();
    for sh in shapes(c.arity()) {
        let d = delta_t(c, &sh, lambda)?;
        if !d.is_zero() {
            out.push((sh, d));
        }
    }
    Ok(out)
}

fn desuspend(c: &Generator) -> Generator {
    let kind = match c.kind {
        GenKind::MTilde => GenKind::Mu,
        GenKind::DTilde => GenKind::Nu,
        GenKind::SM => GenKind::M,
        GenKind::SD => GenKind::D,
        k => k,
    };
    Generator::new(kind, c.arity()).expect("desuspended generator exists")
}

fn is_counit(c: &Generator) -> bool {
    matches!(c.kind, GenKind::MTilde | GenKind::SM) && c.arity() == 1
}

/// `∂(s⁻¹c) = −Σ_T (s⁻¹)^{⊗ω(T)} ∘ Δ_T(c)`, dropping every tensor that
/// contains the coaugmentation `m̃_1` / `sm_1`. The `k`-th desuspension passes
/// the first `k−1` factors and pays their degrees.
pub fn cobar_differential(c: &Generator, lambda: &Lambda) -> Result<OperadElement> {
    if !is_coop(c) {
        return Err(Error::ForeignGenerator(c.symbol()));
    }
    if is_counit(c) {
        return Err(Error::ForeignGenerator(c.symbol()));
    }
    let mut out = OperadElement::zero();
    for (_, d) in delta_list(c, lambda)? {
        for (t, coeff) in d.terms() {
            if t.labels().any(is_counit) {
                continue;
            }
            let mut exp: i64 = 0;
            let mut passed: i64 = 0;
            for g in t.labels() {
                exp += passed;
                passed += i64::from(g.degree());
            }
            let slots = t
                .slots()
                .iter()
                .map(|s| match s {
                    Slot::Vertex(g) => Slot::Vertex(desuspend(g)),
                    Slot::Leaf => Slot::Leaf,
                })
                .collect();
            let mono = Tree::from_slots(slots)?;
            out.add_term(mono, &coeff.apply_sign(-Sign::pow(exp)))?;
        }
    }
    Ok(out)
}

/// The closed formulas for the twisted cobar construction:
/// `∂μ_n = −Σ μ_{n−j+1}{μ_j}` and
/// `∂ν_n = Σ ν_{n−j+1}{μ_j} − Σ λ^{q−1} μ_p{ν_{l_1},…,ν_{l_q}}`.
pub fn twisted_cobar_display(g: &Generator, lambda: &Lambda) -> Result<OperadElement> {
    let n = g.arity();
    let gen = |k: GenKind, a: usize| OperadElement::generator(Generator::new(k, a).expect("valid"));
    let mut out = OperadElement::zero();
    match g.kind {
        GenKind::Mu => {
            for j in 2..n {
                out.add_assign(&gen(GenKind::Mu, n - j + 1).brace(&[gen(GenKind::Mu, j)])?.neg())?;
            }
        }
        GenKind::Nu => {
            for j in 2..=n {
                out.add_assign(&gen(GenKind::Nu, n - j + 1).brace(&[gen(GenKind::Mu, j)])?)?;
            }
            for p in 2..=n {
                for q in 1..=p {
                    for ls in compositions(n + q - p, q) {
                        let args: Vec<OperadElement> = ls.iter().map(|&l| gen(GenKind::Nu, l)).collect();
                        let b = gen(GenKind::Mu, p).brace(&args)?;
                        out.add_assign(&b.scale(&-lambda.pow((q - 1) as u32)))?;
                    }
                }
            }
        }
        _ => return Err(Error::ForeignGenerator(g.symbol())),
    }
    Ok(out)
}

/// One disagreement found by [`cross_check_cobar`].
#[derive(Clone, Debug)]
pub struct CobarMismatch {
    pub generator: Generator,
    pub cobar: OperadElement,
    pub expected: OperadElement,
}

#[derive(Clone, Debug, Default)]
pub struct CobarReport {
    pub checked: Vec<Generator>,
    pub mismatches: Vec<CobarMismatch>,
}

impl CobarReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the cobar differential of `Dif^¡` (identifying `s⁻¹sm_n = m_n`,
/// `s⁻¹sd_n = d_n`) with the explicit Dif∞ differential, and the cobar
/// differential of `𝒮(Dif^¡)` with its brace display.
pub fn cross_check_cobar(max_arity: usize, lambda: &Lambda) -> Result<CobarReport> {
    let mut rep = CobarReport::default();
    for n in 1..=max_arity {
        let mut pairs = Vec::new();
        if n >= 2 {
            pairs.push((coop(GenKind::SM, n), difinfty_diff(&Generator::m(n), lambda)?));
            pairs.push((coop(GenKind::MTilde, n), twisted_cobar_display(&coop(GenKind::Mu, n), lambda)?));
        }
        pairs.push((coop(GenKind::SD, n), difinfty_diff(&Generator::d(n), lambda)?));
        pairs.push((coop(GenKind::DTilde, n), twisted_cobar_display(&coop(GenKind::Nu, n), lambda)?));
        for (c, expected) in pairs {
            rep.checked.push(c);
            let cobar = cobar_differential(&c, lambda)?;
            if cobar != expected {
                rep.mismatches.push(CobarMismatch { generator: c, cobar, expected });
            }
        }
    }
    Ok(rep)
}

/// `∂²` on the generators of a cobar construction, via the Leibniz rule.
pub fn cobar_d_square(c: &Generator, lambda: &Lambda) -> Result<OperadElement> {
    let first = cobar_differential(c, lambda)?;
    let back = |g: &Generator| -> Result<OperadElement> {
        let kind = match g.kind {
            GenKind::Mu => GenKind::MTilde,
            GenKind::Nu => GenKind::DTilde,
            GenKind::M => GenKind::SM,
            GenKind::D => GenKind::SD,
            _ => return Err(Error::ForeignGenerator(g.symbol())),
        };
        cobar_differential(&coop(kind, g.arity()), lambda)
    };
    first.extend_derivation(|g| {
        if matches!(g.kind, GenKind::M | GenKind::Mu) && g.arity() == 1 {
            return Ok(OperadElement::zero());
        }
        back(g)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Tree;

    fn t(s: &str) -> TreeMonomial {
        TreeMonomial::parse(s).unwrap()
    }

    fn one(s: &str, c: Coefficient) -> OperadElement {
        OperadElement::monomial(t(s), c)
    }

    #[test]
    fn delta_examples() {
        let g = Lambda::Generic;
        let d = delta_t(&coop(GenKind::MTilde, 3), &TreeShape::TypeI { n: 3, j: 2, i: 1 }, &g).unwrap();
        assert_eq!(d, one("(mt2 (mt2 _ _) _)", Coefficient::one()));
        let d = delta_t(&coop(GenKind::DTilde, 1), &TreeShape::TypeI { n: 1, j: 1, i: 1 }, &g).unwrap();
        let mut e = one("(dt1 (mt1 _))", Coefficient::one());
        e.add_assign(&one("(mt1 (dt1 _))", Coefficient::one())).unwrap();
        assert_eq!(d, e);
        let sh = TreeShape::TypeII { p: 2, ks: alloc::vec![1, 2], ls: alloc::vec![1, 1] };
        let d = delta_t(&coop(GenKind::SD, 2), &sh, &g).unwrap();
        assert_eq!(d, one("(sm2 (sd1 _) (sd1 _))", -Coefficient::lambda_pow(1)));
        // sm_4 on (n, j, i) = (4, 2, 1): (−1)^{1·2} = +1; on (4, 2, 2): −1.
        let d = delta_t(&coop(GenKind::SM, 4), &TreeShape::TypeI { n: 4, j: 2, i: 2 }, &g).unwrap();
        assert_eq!(d, one("(sm3 _ (sm2 _ _) _)", -Coefficient::one()));
        assert!(delta_t(&coop(GenKind::SM, 3), &TreeShape::TypeI { n: 3, j: 4, i: 1 }, &g).is_err());
    }

    #[test]
    fn delta_degree_is_weight_minus_two() {
        let g = Lambda::Generic;
        for n in 1..=6 {
            for k in [GenKind::MTilde, GenKind::DTilde, GenKind::SM, GenKind::SD] {
                let c = coop(k, n);
                for (sh, d) in delta_list(&c, &g).unwrap() {
                    let deg = d.degree().unwrap();
                    assert_eq!(deg - c.degree(), sh.weight() as i32 - 2, "{c} {sh}");
                    assert_eq!(PlanarTree::shape_of(d.terms().next().unwrap().0), sh.planar_tree());
                }
            }
        }
    }

    #[test]
    fn counit() {
        let g = Lambda::Generic;
        let l = delta_list(&coop(GenKind::MTilde, 1), &g).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].1, one("(mt1 (mt1 _))", Coefficient::one()));
    }

    #[test]
    fn cobar_low_arity() {
        let g = Lambda::Generic;
        assert!(cobar_differential(&coop(GenKind::MTilde, 2), &g).unwrap().is_zero());
        let a = cobar_differential(&coop(GenKind::SM, 3), &g).unwrap();
        assert_eq!(a, difinfty_diff(&Generator::m(3), &g).unwrap());
        let b = cobar_differential(&coop(GenKind::SD, 2), &g).unwrap();
        assert_eq!(b, difinfty_diff(&Generator::d(2), &g).unwrap());
    }

    #[test]
    fn cross_check_small() {
        let r = cross_check_cobar(5, &Lambda::Generic).unwrap();
        for m in &r.mismatches {
            std::println!("{}: cobar {} vs {}", m.generator, m.cobar, m.expected);
        }
        assert!(r.passed());
    }

    #[test]
    fn cobar_squares_to_zero() {
        let g = Lambda::Generic;
        for n in 1..=5 {
            for k in [GenKind::MTilde, GenKind::DTilde, GenKind::SM, GenKind::SD] {
                if n == 1 && matches!(k, GenKind::MTilde | GenKind::SM) {
                    continue;
                }
                assert!(cobar_d_square(&coop(k, n), &g).unwrap().is_zero(), "{k:?} {n}");
            }
        }
    }

    #[test]
    fn shape_counts() {
        // Arity 2: type (i) has (j,i) ∈ {(1,1),(1,2),(2,1)}; type (ii) only p=q=2, l=(1,1).
        assert_eq!(shapes(2).len(), 4);
        let _ = Tree::<usize>::corolla(1);
    }
}
