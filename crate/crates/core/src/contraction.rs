//! The contracting homotopy `H` on Dif∞ in positive degrees.
//!
//! A monomial is effective when it has a typical divisor `Ŝ` (a vertex `m_n`
//! or `d_n` whose first input is `m_2`) that is left-upper-most in the sense
//! of conditions (1)–(3): the leftmost path above the divisor's root is free
//! of positive degrees and other typical roots, and so is every root-to-leaf
//! path ending to the left of it.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::arith::{Coefficient, Degree, Lambda, Sign};
use crate::dif_operads::{enumerate_monomials, DiffTable};
use crate::error::{Error, Result};
use crate::free_operad::{GenKind, Generator, OperadElement, TreeMonomial};
use crate::trees::{compare, Divisor, Label, OrderKey, Slot, Tree};

/// The largest monomial of `x` under the path-lexicographic order.
pub fn leading_monomial(x: &OperadElement) -> Result<(TreeMonomial, Coefficient)> {
    let mut best: Option<(OrderKey, &TreeMonomial, &Coefficient)> = None;
    for (t, c) in x.terms() {
        let k = t.order_key()?;
        if best.as_ref().is_none_or(|(bk, _, _)| k > *bk) {
            best = Some((k, t, c));
        }
    }
    best.map(|(_, t, c)| (t.clone(), c.clone())).ok_or(Error::ZeroElement)
}

/// A generator `S` of positive degree together with its leading shape `Ŝ`
/// and the coefficient `c_S` of `Ŝ` in `∂S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypicalDivisor {
    pub generator: Generator,
    pub shape: TreeMonomial,
    pub coefficient: Sign,
}

/// The generator whose leading shape is rooted at a vertex labelled `g`
/// with `m_2` as first input.
fn typical_generator(g: &Generator) -> Option<Generator> {
    match g.kind {
        GenKind::M if g.arity() >= 2 => Some(Generator::m(g.arity() + 1)),
        GenKind::D => Some(Generator::d(g.arity() + 1)),
        _ => None,
    }
}

fn expected_shape(s: &Generator) -> Result<TreeMonomial> {
    let root = Generator::new(s.kind, s.arity() - 1)?;
    let (t, _) = Tree::corolla(root).graft(1, &Tree::corolla(Generator::m(2)))?;
    Ok(t)
}

impl TypicalDivisor {
    /// Derives `Ŝ` and `c_S` from `∂S` and checks them against the expected
    /// shape `m_n ∘₁ m_2` or `d_n ∘₁ m_2` and `c_S = ±1`.
    pub fn derive(s: &Generator, table: &DiffTable) -> Result<Self> {
        if s.degree() <= 0 || (s.kind == GenKind::M && s.arity() < 3) {
            return Err(Error::InvalidData(alloc::format!("{s} has no typical shape")));
        }
        let (shape, c) = leading_monomial(&table.image(s)?)?;
        if shape != expected_shape(s)? {
            return Err(Error::InvalidData(alloc::format!("leading monomial of ∂{s} is {shape}")));
        }
        let coefficient = if c.is_one() {
            Sign::Plus
        } else if (-&c).is_one() {
            Sign::Minus
        } else {
            return Err(Error::InvalidData(alloc::format!("c_{s} = {c} is not ±1")));
        };
        Ok(TypicalDivisor { generator: *s, shape, coefficient })
    }
}

/// Outcome of the effectiveness test. `omega` is the total degree of the
/// vertices preceding the divisor's root in planar order, i.e. those on the
/// path down from the root of `T` and to the left of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveAnalysis {
    pub is_effective: bool,
    pub divisor: Option<Divisor>,
    pub leaf: Option<usize>,
    pub omega: i64,
}

impl EffectiveAnalysis {
    fn none() -> Self {
        EffectiveAnalysis { is_effective: false, divisor: None, leaf: None, omega: 0 }
    }
}

/// Per-vertex data used by the effectiveness scan.
struct Scan {
    degrees: Vec<Degree>,
    typical_root: Vec<bool>,
    leftmost_leaf: Vec<usize>,
}

fn scan(t: &TreeMonomial) -> Scan {
    let slots = t.slots();
    let vs = t.vertex_slots();
    let mut leaves_before = Vec::with_capacity(slots.len() + 1);
    let mut k = 0;
    for s in slots {
        leaves_before.push(k);
        if matches!(s, Slot::Leaf) {
            k += 1;
        }
    }
    let mut typical_root = Vec::with_capacity(vs.len());
    let mut leftmost_leaf = Vec::with_capacity(vs.len());
    for &s in &vs {
        let Slot::Vertex(g) = &slots[s] else { unreachable!() };
        let first_is_m2 = matches!(&slots[s + 1], Slot::Vertex(c) if *c == Generator::m(2));
        typical_root.push(first_is_m2 && typical_generator(g).is_some());
        leftmost_leaf.push(leaves_before[s] + 1);
    }
    Scan { degrees: t.degrees(), typical_root, leftmost_leaf }
}

/// Finds the effective divisor, checking that at most one candidate passes.
pub fn analyze_effective(t: &TreeMonomial) -> Result<EffectiveAnalysis> {
    let sc = scan(t);
    let w = t.weight();
    let mut found: Option<(usize, usize)> = None;
    for v in 1..=w {
        if !sc.typical_root[v - 1] {
            continue;
        }
        let l = sc.leftmost_leaf[v - 1];
        // The leftmost path above v occupies consecutive planar indices.
        let mut ok = true;
        let mut u = v + 1;
        while u <= w && sc.leftmost_leaf[u - 1] == l && is_first_descendant(t, v, u) {
            if sc.degrees[u - 1] != 0 || sc.typical_root[u - 1] {
                ok = false;
                break;
            }
            u += 1;
        }
        if !ok {
            continue;
        }
        // Vertices on a path to a leaf left of l are exactly those whose
        // leftmost leaf is smaller than l.
        let left_clean = (1..=w)
            .filter(|&x| sc.leftmost_leaf[x - 1] < l)
            .all(|x| sc.degrees[x - 1] <= 0 && !sc.typical_root[x - 1]);
        if !left_clean {
            continue;
        }
        if let Some((v0, _)) = found {
            return Err(Error::NotEffective(alloc::format!(
                "two effective divisors at vertices {v0} and {v} in {t}"
            )));
        }
        found = Some((v, l));
    }
    let Some((v, l)) = found else { return Ok(EffectiveAnalysis::none()) };
    let omega = sc.degrees[..v - 1].iter().map(|&d| i64::from(d)).sum();
    Ok(EffectiveAnalysis {
        is_effective: true,
        divisor: Some(Divisor::new(t, [v, v + 1])?),
        leaf: Some(l),
        omega,
    })
}

/// Whether `u` lies on the leftmost path above `v`: every step from `v` to
/// `u` goes through a first child, which in preorder means consecutive slots.
fn is_first_descendant(t: &TreeMonomial, v: usize, u: usize) -> bool {
    let vs = t.vertex_slots();
    vs[u - 1] - vs[v - 1] == u - v
}

/// `H̄`, `T̄` and `H` for a fixed arity bound and parameter.
#[derive(Clone, Debug)]
pub struct Contraction {
    table: DiffTable,
    typical: BTreeMap<Generator, TypicalDivisor>,
    max_steps: usize,
}

/// One failure of `∂H + H∂ = id`.
#[derive(Clone, Debug)]
pub struct ContractionViolation {
    pub monomial: TreeMonomial,
    pub residual: OperadElement,
}

#[derive(Clone, Debug, Default)]
pub struct ContractionReport {
    pub checked: usize,
    pub violations: Vec<ContractionViolation>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: ContractionReport) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }
}

impl Contraction {
    /// Tabulates `∂` and the typical divisors for generators of arity up to
    /// `max_arity + 1`, so that `H̄` never leaves the table.
    pub fn new(max_arity: usize, lambda: Lambda) -> Result<Self> {
        let table = DiffTable::new(max_arity + 1, lambda)?;
        let mut typical = BTreeMap::new();
        for n in 2..=max_arity + 1 {
            let mut gens = alloc::vec![Generator::d(n)];
            if n >= 3 {
                gens.push(Generator::m(n));
            }
            for s in gens {
                typical.insert(s, TypicalDivisor::derive(&s, &table)?);
            }
        }
        Ok(Contraction { table, typical, max_steps: crate::dif_operads::DEFAULT_MAX_STEPS })
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn table(&self) -> &DiffTable {
        &self.table
    }

    pub fn typical(&self, s: &Generator) -> Option<&TypicalDivisor> {
        self.typical.get(s)
    }

    fn effective_data(&self, t: &TreeMonomial) -> Result<Option<(EffectiveAnalysis, &TypicalDivisor)>> {
        let a = analyze_effective(t)?;
        let Some(d) = &a.divisor else { return Ok(None) };
        let s = typical_generator(t.label(d.root())).expect("typical root");
        let td = self.typical.get(&s).ok_or_else(|| Error::MissingImage(s.symbol()))?;
        Ok(Some((a, td)))
    }

    /// `H̄(T) = (−1)^ω (1/c_S) m_{T′,S}(T)`.
    pub fn h_bar(&self, t: &TreeMonomial) -> Result<OperadElement> {
        let (a, td) = self.effective_data(t)?.ok_or_else(|| Error::NotEffective(t.to_string()))?;
        let d = a.divisor.as_ref().expect("effective");
        let (nt, s) = t.substitute(d, &Tree::corolla(td.generator))?;
        let sign = s * Sign::pow(a.omega) * td.coefficient;
        Ok(OperadElement::monomial(nt, Coefficient::sign(sign)))
    }

    /// `T̄`: the effective divisor `Ŝ` replaced by `Ŝ − (1/c_S)∂S`.
    pub fn t_bar(&self, t: &TreeMonomial) -> Result<OperadElement> {
        let (a, td) = self.effective_data(t)?.ok_or_else(|| Error::NotEffective(t.to_string()))?;
        let d = a.divisor.as_ref().expect("effective");
        let mut out = OperadElement::monomial(t.clone(), Coefficient::one());
        for (e, c) in self.table.image(&td.generator)?.terms() {
            let (nt, s) = t.substitute(d, e)?;
            out.add_term(nt, &c.apply_sign(-(s * td.coefficient)))?;
        }
        Ok(out)
    }

    /// `H(x)`. Monomials are consumed largest first; each `T̄` only feeds
    /// strictly smaller monomials back into the worklist, which is checked.
    pub fn homotopy_h(&self, x: &OperadElement) -> Result<OperadElement> {
        let mut work: BTreeMap<OrderKey, (TreeMonomial, Coefficient)> = BTreeMap::new();
        for (t, c) in x.terms() {
            work.insert(t.order_key()?, (t.clone(), c.clone()));
        }
        let mut out = OperadElement::zero();
        let mut steps = 0;
        while let Some((key, (t, c))) = work.pop_last() {
            if c.is_zero() {
                continue;
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::StepBound(self.max_steps));
            }
            if self.effective_data(&t)?.is_none() {
                continue;
            }
            out.add_assign(&self.h_bar(&t)?.scale(&c))?;
            for (u, uc) in self.t_bar(&t)?.terms() {
                let k = u.order_key()?;
                if k >= key {
                    return Err(Error::NoDecrease(alloc::format!("{u} in the expansion of {t}")));
                }
                let entry = work.entry(k).or_insert_with(|| (u.clone(), Coefficient::zero()));
                entry.1.add_assign_ref(&(&c * uc));
            }
        }
        Ok(out)
    }

    /// `∂H(T) + H∂(T) − T`.
    pub fn residual(&self, t: &TreeMonomial) -> Result<OperadElement> {
        let x = OperadElement::monomial(t.clone(), Coefficient::one());
        let mut r = self.table.diff(&self.homotopy_h(&x)?)?;
        r.add_assign(&self.homotopy_h(&self.table.diff(&x)?)?)?;
        r.add_assign(&x.neg())?;
        Ok(r)
    }

    pub fn check(&self, monomials: &[TreeMonomial]) -> Result<ContractionReport> {
        let mut rep = ContractionReport::default();
        for t in monomials {
            rep.checked += 1;
            let r = self.residual(t)?;
            if !r.is_zero() {
                rep.violations.push(ContractionViolation { monomial: t.clone(), residual: r });
            }
        }
        Ok(rep)
    }
}

/// The monomials `verify_contraction` runs over. Degree-0 vertices of arity
/// one (`d_1`) can be stacked without bound, so a weight bound is required.
pub fn contraction_domain(max_arity: usize, max_degree: Degree, max_weight: usize) -> Vec<TreeMonomial> {
    enumerate_monomials(max_arity, max_weight, 1..=max_degree)
}

/// Checks `∂H + H∂ = id` on every Dif∞ monomial with arity ≤ `max_arity`,
/// degree in `1..=max_degree` and weight ≤ `max_weight`.
pub fn verify_contraction(
    max_arity: usize,
    max_degree: Degree,
    max_weight: usize,
    lambda: &Lambda,
) -> Result<ContractionReport> {
    if max_arity == 0 || max_degree < 1 || max_weight == 0 {
        return Err(Error::InvalidData("bounds must be at least 1".to_string()));
    }
    let c = Contraction::new(max_arity, lambda.clone())?;
    c.check(&contraction_domain(max_arity, max_degree, max_weight))
}

/// Used by tests and the CLI to order monomials for display.
pub fn sort_by_order(ts: &mut [TreeMonomial]) {
    ts.sort_by(|a, b| compare(a, b).expect("Dif∞ monomials"));
}
