//! L∞ structures as coefficient tensors, their Maurer-Cartan encoding,
//! transfer along homotopy equivalences, minimal models, Chevalley-Eilenberg
//! obstruction classes, and higher derived brackets.
//!
//! A bracket family {l_k}_{k≥2} on a complex E corresponds to the element
//! ν = Σ c · θ_{a_1}···θ_{a_k} ξ^b of degree 3 and biweight (k,1); the higher
//! Jacobi identities hold exactly when ν is Maurer-Cartan. Brackets are stored
//! in the θ-symmetric (shifted/décalage) normalization that this bijection
//! forces: l_k is graded symmetric in the parities |x|+1.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::bracket::{big_bracket, ShiftedLieContext};
use crate::complex::{Complex, HomotopyEquivalence};
use crate::equiv::retract_to_cohomology;
use crate::error::{input_err, violation, Result};
use crate::matrix::{Matrix, Rat};
use crate::symalg::{sort_with_sign, Element, Generator, Monomial};
use crate::trees::{push_mc, TransferMorphism};

/// A family of brackets l_k (k ≥ 2) of degree 2−k on a complex, stored as
/// exact coefficient tensors over the named basis. The differential l_1 is
/// carried by the complex itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinftyStructure {
    pub complex: Complex,
    /// brackets[k] maps (canonical input tuple, output generator) to the
    /// coefficient; input tuples are kept in θ-sorted order.
    pub brackets: BTreeMap<usize, BTreeMap<(Vec<String>, String), Rat>>,
}

impl LinftyStructure {
    pub fn new(complex: &Complex) -> Result<Self> {
        complex.validate()?;
        if complex.degrees().iter().any(|&d| d > 0) {
            return input_err("structures live on complexes in non-positive degrees");
        }
        Ok(LinftyStructure { complex: complex.clone(), brackets: BTreeMap::new() })
    }

    fn theta_of(&self, name: &str) -> Result<Generator> {
        match self.complex.find_generator(name) {
            Some((deg, _)) => Ok(Generator::theta(name, deg)),
            None => input_err(format!("unknown generator '{}'", name)),
        }
    }

    /// Add `coeff` to the component e_out of l_k(inputs). The tuple is
    /// canonicalized with its Koszul sign; tuples that vanish by symmetry are
    /// dropped silently.
    pub fn add_bracket(&mut self, inputs: &[&str], output: &str, coeff: Rat) -> Result<()> {
        let k = inputs.len();
        if k < 2 {
            return input_err("brackets start at arity 2; l_1 is the differential");
        }
        let thetas: Vec<Generator> =
            inputs.iter().map(|n| self.theta_of(n)).collect::<Result<_>>()?;
        let (out_deg, _) = self
            .complex
            .find_generator(output)
            .ok_or_else(|| crate::error::Error::Input(format!("unknown generator '{}'", output)))?;
        let in_deg: i64 = thetas.iter().map(|t| t.base_degree).sum();
        if out_deg != 2 - k as i64 + in_deg {
            return input_err(format!(
                "l_{} must have degree {}: inputs of total degree {} cannot map to '{}'",
                k,
                2 - k as i64,
                in_deg,
                output
            ));
        }
        let Some((word, sign)) = sort_with_sign(thetas) else {
            return Ok(()); // vanishes by antisymmetry
        };
        if coeff.is_zero() {
            return Ok(());
        }
        let key = (word.into_iter().map(|g| g.name).collect::<Vec<_>>(), output.to_string());
        let slot = self.brackets.entry(k).or_default();
        let v = slot.remove(&key).unwrap_or_else(Rat::zero) + coeff * crate::symalg::rat_int(sign);
        if !v.is_zero() {
            slot.insert(key, v);
        }
        Ok(())
    }

    /// l_k evaluated on a tuple of basis generators, as (output name, coeff)
    /// pairs.
    pub fn eval(&self, inputs: &[&str]) -> Result<Vec<(String, Rat)>> {
        let thetas: Vec<Generator> =
            inputs.iter().map(|n| self.theta_of(n)).collect::<Result<_>>()?;
        let Some((word, sign)) = sort_with_sign(thetas) else {
            return Ok(Vec::new());
        };
        let names: Vec<String> = word.into_iter().map(|g| g.name).collect();
        let Some(slot) = self.brackets.get(&inputs.len()) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for ((key, output), c) in slot.range((names.clone(), String::new())..) {
            if key != &names {
                break;
            }
            out.push((output.clone(), c * crate::symalg::rat_int(sign)));
        }
        Ok(out)
    }

    pub fn arities(&self) -> Vec<usize> {
        self.brackets.iter().filter(|(_, m)| !m.is_empty()).map(|(&k, _)| k).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.brackets.values().all(|m| m.is_empty())
    }
}

/// The Maurer-Cartan encoding Σ c · θ_{a_1}···θ_{a_k} ξ^b of a bracket family.
pub fn encode_structure(s: &LinftyStructure) -> Result<Element> {
    let mut nu = Element::zero();
    for (_, slot) in &s.brackets {
        for ((inputs, output), c) in slot {
            let mut word: Vec<Generator> =
                inputs.iter().map(|n| s.theta_of(n)).collect::<Result<_>>()?;
            let (out_deg, _) = s.complex.find_generator(output).expect("validated on insert");
            word.push(Generator::xi(output, out_deg));
            nu.add_word(word, c.clone());
        }
    }
    if !nu.is_zero() && !nu.is_homogeneous_of_degree(3) {
        return violation("encoded structure is not homogeneous of degree 3");
    }
    Ok(nu)
}

/// Inverse of `encode_structure`: read the weight-(k,1) components of ν back
/// into coefficient tensors.
pub fn decode_structure(complex: &Complex, nu: &Element) -> Result<LinftyStructure> {
    let mut s = LinftyStructure::new(complex)?;
    if nu.is_zero() {
        return Ok(s);
    }
    if !nu.is_homogeneous_of_degree(3) {
        return input_err("encoded structures are homogeneous of degree 3");
    }
    for (mono, c) in &nu.terms {
        let (lw, rw) = mono.biweight();
        if rw != 1 {
            return input_err(format!("term {} has right weight {}, expected 1", mono, rw));
        }
        if lw < 2 {
            return input_err(format!(
                "term {} has left weight {} < 2; the differential belongs to the context",
                mono, lw
            ));
        }
        let mut thetas: Vec<&Generator> = Vec::new();
        let mut xi: Option<(usize, &Generator)> = None;
        for (pos, g) in mono.0.iter().enumerate() {
            match s.complex.find_generator(&g.name) {
                Some((deg, _)) if deg == g.base_degree => {}
                _ => {
                    return input_err(format!("term {} uses a generator not in the complex", mono))
                }
            }
            match g.side {
                crate::symalg::Side::EDual => thetas.push(g),
                crate::symalg::Side::E => xi = Some((pos, g)),
            }
        }
        let (xi_pos, xi_gen) = xi.expect("right weight 1");
        // Koszul sign of moving ξ past the θ's that follow it
        let mut sign = 1i64;
        if xi_gen.is_odd() {
            for g in &mono.0[xi_pos + 1..] {
                if g.is_odd() {
                    sign = -sign;
                }
            }
        }
        let names: Vec<&str> = thetas.iter().map(|g| g.name.as_str()).collect();
        s.add_bracket(&names, &xi_gen.name, c * crate::symalg::rat_int(sign))?;
    }
    Ok(s)
}

/// The higher Jacobi identities, checked all at once through the Maurer-Cartan
/// equation of the encoding.
pub fn verify_structure(s: &LinftyStructure) -> Result<()> {
    let ctx = ShiftedLieContext::new(&s.complex)?;
    let nu = encode_structure(s)?;
    let res = ctx.mc_residual(&nu)?;
    if res.is_zero() {
        Ok(())
    } else {
        violation(format!(
            "higher Jacobi identities fail; first nonzero residual term in biweights {:?}",
            res.biweights()
        ))
    }
}

/// Transfer a verified structure on E across an equivalence to F:
/// decode ∘ push_mc(U) ∘ encode.
pub fn transfer_structure(
    eq: &HomotopyEquivalence,
    s: &LinftyStructure,
) -> Result<LinftyStructure> {
    if s.complex != eq.e {
        return input_err("structure does not live on the source of the equivalence");
    }
    verify_structure(s)?;
    let nu = encode_structure(s)?;
    let u = TransferMorphism::new(eq.clone())?;
    let pushed = push_mc(&u, &nu)?;
    let out = decode_structure(&eq.f_cx, &pushed)?;
    verify_structure(&out)?;
    Ok(out)
}

/// Minimal model: retract onto cohomology (zero differential) and transfer.
/// Returns the structure together with the retract used.
pub fn minimal_model(s: &LinftyStructure) -> Result<(LinftyStructure, HomotopyEquivalence)> {
    let eq = retract_to_cohomology(&s.complex)?;
    let out = transfer_structure(&eq, s)?;
    Ok((out, eq))
}

/// Solvability certificate for the obstruction class.
#[derive(Clone, Debug)]
pub struct CEClassReport {
    /// whether [l_3] = 0 in CE cohomology
    pub vanishes: bool,
    /// a 2-cochain primitive (encoded as a weight-(2,1) element) when it does
    pub primitive: Option<Element>,
    /// rank of the coboundary map on 2-cochains
    pub coboundary_rank: usize,
    /// rank of the coboundary map extended by the cocycle column
    pub augmented_rank: usize,
}

/// Coordinates of `rhs` in the span of `cols`, plus the two ranks certifying
/// the answer.
pub(crate) fn express_in_span(cols: &[Element], rhs: &Element) -> (Option<Vec<Rat>>, usize, usize) {
    let mut index: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for e in cols.iter().chain(std::iter::once(rhs)) {
        for m in e.terms.keys() {
            let next = index.len();
            index.entry(m).or_insert(next);
        }
    }
    let n = index.len();
    let coords = |e: &Element| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); n];
        for (m, c) in &e.terms {
            v[index[m]] = c.clone();
        }
        v
    };
    let cvecs: Vec<Vec<Rat>> = cols.iter().map(coords).collect();
    let b = coords(rhs);
    let a = Matrix::from_cols(&cvecs, n);
    let rank = a.rank();
    let mut aug = cvecs;
    aug.push(b.clone());
    let rank_aug = Matrix::from_cols(&aug, n).rank();
    (a.solve(&b), rank, rank_aug)
}

/// All nonzero monomial elements θ_a θ_b ξ^c of the given algebra degree
/// (candidate 2-cochains).
fn two_cochain_basis(complex: &Complex, degree: i64) -> Vec<Element> {
    let mut gens: Vec<(i64, String)> = Vec::new();
    for (&deg, names) in &complex.basis {
        for n in names {
            gens.push((deg, n.clone()));
        }
    }
    let mut out = Vec::new();
    for i in 0..gens.len() {
        for j in i..gens.len() {
            for (cd, cn) in &gens {
                let word = vec![
                    Generator::theta(&gens[i].1, gens[i].0),
                    Generator::theta(&gens[j].1, gens[j].0),
                    Generator::xi(cn, *cd),
                ];
                let e = Element::from_word(word, Rat::one());
                if !e.is_zero() && e.is_homogeneous_of_degree(degree) {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// The obstruction class of l_3 in the CE cohomology of (complex, l_2):
/// δμ = {d̂ + ν₂, μ}, solved exactly on the space of 2-cochains.
pub fn ce_class(l2: &LinftyStructure, l3: &LinftyStructure) -> Result<CEClassReport> {
    if l2.complex != l3.complex {
        return input_err("l_2 and l_3 must live on the same complex");
    }
    if l2.arities().iter().any(|&k| k != 2) || l3.arities().iter().any(|&k| k != 3) {
        return input_err("ce_class expects an arity-2 family and an arity-3 cochain");
    }
    if l2.complex.d.values().any(|m| !m.is_zero()) {
        return input_err("ce_class expects a minimal complex (zero differential)");
    }
    let ctx = ShiftedLieContext::new(&l2.complex)?;
    let nu2 = encode_structure(l2)?;
    if !ctx.mc_residual(&nu2)?.is_zero() {
        return input_err("l_2 (with the differential) is not strictly Jacobi");
    }
    let dtot = ctx.d_hat.add(&nu2);
    let nu3 = encode_structure(l3)?;
    if !big_bracket(&dtot, &nu3).is_zero() {
        return input_err("l_3 is not a CE cocycle for the given l_2");
    }
    let basis = two_cochain_basis(&l2.complex, 2);
    let cols: Vec<Element> = basis.iter().map(|m| big_bracket(&dtot, m)).collect();
    let (sol, rank, rank_aug) = express_in_span(&cols, &nu3);
    let primitive = sol.map(|x| {
        let mut p = Element::zero();
        for (m, c) in basis.iter().zip(&x) {
            p = p.add(&m.scale(c));
        }
        p
    });
    Ok(CEClassReport {
        vanishes: primitive.is_some(),
        primitive,
        coboundary_rank: rank,
        augmented_rank: rank_aug,
    })
}

/// Projection onto the abelian part a = S(E*): terms of right weight 0.
pub fn abelian_part(e: &Element) -> Element {
    let mut out = Element::zero();
    for (m, c) in &e.terms {
        if m.biweight().1 == 0 {
            out.add_term(m.clone(), c.clone());
        }
    }
    out
}

/// Voronov's n-th derived bracket of π on the abelian part:
/// l_n(a_1,…,a_n) = pr_a [ … [ d̂ + π, a_1 ], …, a_n ].
pub fn voronov_bracket(ctx: &ShiftedLieContext, pi: &Element, args: &[Element]) -> Element {
    let mut b = ctx.differential_element().add(pi);
    for a in args {
        b = big_bracket(&b, a);
    }
    abelian_part(&b)
}

fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    rec(0, n, q, &mut cur, &mut out);
    out
}

/// The n-th generalized Jacobi expression for a family of graded-symmetric
/// (in the shifted parities) brackets:
/// Σ_{q=1..n} Σ_{(q,n−q)-unshuffles σ} ε(σ) l_{n−q+1}(l_q(x_σ…), x_σ…),
/// where ε is the Koszul sign of σ on the shifted parities.
pub fn element_jacobiator(
    l: &dyn Fn(&[Element]) -> Element,
    args: &[Element],
    shifted_parities: &[i64],
) -> Element {
    let n = args.len();
    let mut total = Element::zero();
    for q in 1..=n {
        for sub in subsets(n, q) {
            let rest: Vec<usize> = (0..n).filter(|i| !sub.contains(i)).collect();
            let perm: Vec<usize> = sub.iter().chain(rest.iter()).copied().collect();
            let eps = crate::complex::koszul_sign(&perm, shifted_parities).expect("permutation");
            let inner_args: Vec<Element> = sub.iter().map(|&i| args[i].clone()).collect();
            let inner = l(&inner_args);
            let mut outer_args = vec![inner];
            outer_args.extend(rest.iter().map(|&i| args[i].clone()));
            let term = l(&outer_args);
            total = total.add(&term.scale(&crate::symalg::rat_int(eps)));
        }
    }
    total
}

/// Verify the L∞ identities of the derived-bracket family of π up to
/// `max_arity` on random homogeneous abelian arguments.
pub fn verify_voronov(
    ctx: &ShiftedLieContext,
    pi: &Element,
    max_arity: usize,
    trials: usize,
    seed: u64,
) -> Result<()> {
    if let Some(w) = pi.biweights().iter().find(|w| w.1 < 1) {
        return input_err(format!(
            "π must lie in the biweight-(*,≥1) subalgebra; found a term of biweight {:?}",
            w
        ));
    }
    if !ctx.is_mc(pi)? {
        return violation("π is not Maurer-Cartan");
    }
    let l = |xs: &[Element]| voronov_bracket(ctx, pi, xs);
    let mut rng = crate::corpus::seeded_rng(seed);
    for n in 1..=max_arity {
        for trial in 0..trials {
            let args: Vec<Element> = (0..n)
                .map(|_| crate::corpus::random_theta_word(&mut rng, &ctx.complex, 2))
                .collect();
            let parities: Vec<i64> =
                args.iter().map(|a| a.degree().unwrap_or(0) + 1).collect();
            let j = element_jacobiator(&l, &args, &parities);
            if !j.is_zero() {
                return violation(format!(
                    "derived brackets fail the arity-{} Jacobi identity (trial {}): {}",
                    n, trial, j
                ));
            }
        }
    }
    Ok(())
}
