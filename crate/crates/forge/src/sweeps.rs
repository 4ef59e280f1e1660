//! Seeded sampling sweeps shared by the CLI and the acceptance suite. Every
//! sample draws from its own ChaCha stream, keyed by its position, so results
//! do not depend on the number of worker threads.

use operad_forge_core::contraction::{contraction_domain, Contraction, ContractionReport};
use operad_forge_core::hda::{mc_equivalence_check, random_structure, HdaReport};
use operad_forge_core::hom_complex::GradedSpace;
use operad_forge_core::linf_def::{jacobi_residual, mc_from_algebra, mc_residual, random_element, CdaElement, CdaLinf, DifAlgebraData, Part};
use operad_forge_core::{Degree, Lambda, Rational, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn stream(seed: u64, family: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((family << 40) ^ index);
    rng
}

/// Runs `f` over `items` on `jobs` threads (all available when `None`),
/// returning results in input order.
pub fn fan_out<T: Sync, R: Send>(items: &[T], jobs: Option<usize>, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    match jobs {
        Some(1) => items.iter().map(f).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        },
        None => items.par_iter().map(f).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiSample {
    pub n: usize,
    pub trial: usize,
    pub degrees: Vec<Degree>,
    /// Empty when the residual vanished.
    pub residual: Option<CdaElement>,
    /// Whether every argument was nonzero; a zero argument passes vacuously.
    pub nontrivial: bool,
}

/// The generalized Jacobi identity on `trials` random tuples of each length
/// `2 ≤ n ≤ max_n`. Arguments have components of arity `≤ arity`; degrees are
/// drawn from the range where such components can be nonzero.
pub fn jacobi_sweep(
    v: &GradedSpace,
    lambda: &Lambda,
    max_n: usize,
    arity: usize,
    trials: usize,
    seed: u64,
    jobs: Option<usize>,
) -> Result<Vec<JacobiSample>> {
    let l = CdaLinf::new(v, lambda.clone());
    let (lo, hi) = degree_window(v, arity);
    let jobs_list: Vec<(usize, usize)> = (2..=max_n).flat_map(|n| (0..trials).map(move |t| (n, t))).collect();
    fan_out(&jobs_list, jobs, |&(n, trial)| {
        let mut rng = stream(seed, n as u64, trial as u64);
        let span = (hi - lo + 1) as u32;
        let mut xs = Vec::with_capacity(n);
        let mut degrees = Vec::with_capacity(n);
        for _ in 0..n {
            let deg = lo + (rng.next_u32() % span) as Degree;
            degrees.push(deg);
            xs.push(random_element(v, deg, &[Part::Alg, Part::Do], 0..=arity, &mut rng)?);
        }
        let refs: Vec<&CdaElement> = xs.iter().collect();
        let r = jacobi_residual(&l, &refs)?;
        Ok(JacobiSample {
            n,
            trial,
            degrees,
            nontrivial: xs.iter().all(|x| !x.is_zero()),
            residual: (!r.is_zero()).then_some(r),
        })
    })
    .into_iter()
    .collect()
}

/// Degrees `k` for which some component of arity `≤ arity` on `sV` can be
/// nonzero in an element of degree `k`.
fn degree_window(v: &GradedSpace, arity: usize) -> (Degree, Degree) {
    let w = v.suspend();
    let lo_v = *w.degrees().iter().min().unwrap_or(&1);
    let hi_v = *w.degrees().iter().max().unwrap_or(&1);
    // A map of arity n has degree between lo_v − n·hi_v and hi_v − n·lo_v;
    // Do parts shift by one.
    let a = arity as Degree;
    let lo = (lo_v - a * hi_v - 1).min(lo_v - hi_v);
    let hi = hi_v.max(hi_v - a * lo_v);
    (lo, hi)
}

#[derive(Clone, Debug)]
pub struct McSample {
    pub label: String,
    pub axioms: bool,
    pub mc_zero: bool,
}

impl McSample {
    pub fn agrees(&self) -> bool {
        self.axioms == self.mc_zero
    }
}

pub fn mc_sample(label: String, dat: &DifAlgebraData) -> Result<McSample> {
    let r = mc_residual(&dat.linf(), &mc_from_algebra(dat)?)?;
    Ok(McSample { label, axioms: dat.satisfies_axioms()?, mc_zero: r.is_zero() })
}

fn unit(k: i64) -> Rational {
    Rational::from_int(k)
}

/// Every one-dimensional algebra with `μ(e, e)`, `d(e)` in `{−1, 0, 1}`, for
/// each listed weight.
pub fn mc_grid_dim1(lambdas: &[Lambda]) -> Result<Vec<McSample>> {
    let mut out = Vec::new();
    for lam in lambdas {
        for a in -1..=1 {
            for b in -1..=1 {
                let dat = DifAlgebraData::from_tables(&[vec![vec![unit(a)]]], &[vec![unit(b)]], lam.clone())?;
                out.push(mc_sample(format!("lambda={lam} mu={a} d={b}"), &dat)?);
            }
        }
    }
    Ok(out)
}

/// Random two-dimensional algebras with entries in `{−1, 0, 1}`. Uniform
/// tables are almost never associative, so every fourth sample is drawn from
/// an associative family: a product of two one-dimensional algebras in a
/// random unimodular basis. Whether its `d` has weight `λ` is left to chance.
pub fn mc_random_dim2(lambdas: &[Lambda], samples: usize, seed: u64, jobs: Option<usize>) -> Result<Vec<McSample>> {
    let idx: Vec<usize> = (0..samples).collect();
    fan_out(&idx, jobs, |&i| {
        let mut rng = stream(seed, 0x4d43, i as u64);
        let lam = lambdas[i % lambdas.len()].clone();
        let mut t = || unit((rng.next_u32() % 3) as i64 - 1);
        let (mult, d) = if i % 4 == 3 { product_family(&mut t) } else { uniform_tables(&mut t) };
        let dat = DifAlgebraData::from_tables(&mult, &d, lam.clone())?;
        mc_sample(format!("sample {i} lambda={lam}"), &dat)
    })
    .into_iter()
    .collect()
}

type Tables = (Vec<Vec<Vec<Rational>>>, Vec<Vec<Rational>>);

fn uniform_tables(t: &mut impl FnMut() -> Rational) -> Tables {
    let mult = (0..2).map(|_| (0..2).map(|_| vec![t(), t()]).collect()).collect();
    let d = (0..2).map(|_| vec![t(), t()]).collect();
    (mult, d)
}

/// `ℚf₁ × ℚf₂` with `f_i² = a_i f_i`, `d(f_i) = c_i f_i`, written in the basis
/// `e = P f` for `P = [[1, s], [0, 1]]`.
fn product_family(t: &mut impl FnMut() -> Rational) -> Tables {
    let (a1, a2, c1, c2, s) = (t(), t(), t(), t(), t());
    // e1 = f1, e2 = f2 + s f1; `to_e` rewrites f-coordinates in the e-basis.
    let to_e = |v: [Rational; 2]| -> Vec<Rational> {
        vec![&v[0] - &(&v[1] * &s), v[1].clone()]
    };
    let f_of_e = |i: usize| -> [Rational; 2] {
        if i == 0 {
            [unit(1), unit(0)]
        } else {
            [s.clone(), unit(1)]
        }
    };
    let mul_f = |x: &[Rational; 2], y: &[Rational; 2]| -> [Rational; 2] { [&(&x[0] * &y[0]) * &a1, &(&x[1] * &y[1]) * &a2] };
    let d_f = |x: &[Rational; 2]| -> [Rational; 2] { [&x[0] * &c1, &x[1] * &c2] };
    let mult = (0..2).map(|i| (0..2).map(|j| to_e(mul_f(&f_of_e(i), &f_of_e(j)))).collect()).collect();
    let d = (0..2).map(|i| to_e(d_f(&f_of_e(i)))).collect();
    (mult, d)
}

#[derive(Clone, Debug)]
pub struct HdaSample {
    pub index: usize,
    pub report: HdaReport,
}

/// Random structures on the listed spaces, checked arity by arity.
pub fn hda_sweep(spaces: &[GradedSpace], lambda: &Lambda, max_arity: usize, samples: usize, seed: u64, jobs: Option<usize>) -> Result<Vec<HdaSample>> {
    let idx: Vec<usize> = (0..samples).collect();
    fan_out(&idx, jobs, |&i| {
        let mut rng = stream(seed, 0x4844, i as u64);
        let v = &spaces[i % spaces.len()];
        // Sparse structures are far more often genuine; vary the density.
        let density = [5, 15, 40][i % 3];
        let s = random_structure(v, lambda.clone(), max_arity, density, &mut rng);
        Ok(HdaSample { index: i, report: mc_equivalence_check(&s, max_arity)? })
    })
    .into_iter()
    .collect()
}

/// `∂H + H∂ = id` on the exhaustive domain, split across threads.
pub fn contraction_sweep(max_arity: usize, max_degree: Degree, max_weight: usize, lambda: &Lambda, max_steps: usize, jobs: Option<usize>) -> Result<ContractionReport> {
    let c = Contraction::new(max_arity, lambda.clone())?.with_max_steps(max_steps);
    let domain = contraction_domain(max_arity, max_degree, max_weight);
    let chunks: Vec<&[_]> = domain.chunks(64).collect();
    let mut total = ContractionReport::default();
    for part in fan_out(&chunks, jobs, |chunk| c.check(chunk)) {
        total.merge(part?);
    }
    Ok(total)
}
