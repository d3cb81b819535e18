//! Labeled-tree combinatorics and the tree-sum operators: single-tree
//! evaluation with homotopy-decorated edges, the sums R_n, the transferred
//! morphism components U_n = U_1 ∘ R_n, verifiers for the structure and
//! morphism equations, and Maurer-Cartan pushforward.

use num_traits::{One, Zero};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::bracket::{
    apply_degree0, apply_homotopy, big_bracket, ShiftedLieContext,
};
use crate::complex::{koszul_sign, perm_sign, GradedMap, HomotopyEquivalence};
use crate::error::{input_err, violation, Result};
use crate::matrix::Rat;
use crate::symalg::{pairing, rat_int, Element, Generator, Monomial, Side};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum EdgeMark {
    Dotted,
    Wavy,
}

/// A tree on vertices {1..n}, edges stored as (i, j) with i < j in
/// lexicographic order. At most one edge carries a mark changing its
/// operator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct LabeledTree {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub mark: Option<(usize, EdgeMark)>,
}

impl LabeledTree {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return input_err(format!("self-loop at vertex {}", e.0));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        let t = LabeledTree { n, edges, mark: None };
        t.validate()?;
        Ok(t)
    }

    pub fn with_mark(mut self, edge_index: usize, mark: EdgeMark) -> Result<Self> {
        if edge_index >= self.edges.len() {
            return input_err(format!("mark on nonexistent edge {}", edge_index));
        }
        self.mark = Some((edge_index, mark));
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return input_err("trees need at least one vertex");
        }
        if self.edges.len() + 1 != self.n {
            return input_err(format!(
                "{} edges on {} vertices is not a tree",
                self.edges.len(),
                self.n
            ));
        }
        // connectivity by union-find
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j) in &self.edges {
            if i < 1 || j > self.n {
                return input_err(format!("edge ({},{}) out of range", i, j));
            }
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a == b {
                return input_err(format!("cycle through edge ({},{})", i, j));
            }
            parent[a] = b;
        }
        Ok(())
    }

    /// The relabeled tree σ·T (vertex v becomes σ(v), 1-based) together with
    /// the sign of the edge-order permutation relating the old canonical
    /// order to the new one.
    pub fn relabel(&self, sigma: &[usize]) -> (LabeledTree, i64) {
        let mut imgs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (sigma[i - 1], sigma[j - 1]);
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        let mut order: Vec<usize> = (0..imgs.len()).collect();
        order.sort_by_key(|&k| imgs[k]);
        let sign = perm_sign(&order);
        imgs.sort_unstable();
        (LabeledTree { n: self.n, edges: imgs, mark: None }, sign)
    }
}

/// All labeled trees on n vertices, via the Prüfer bijection; n^{n-2} trees
/// for n ≥ 2, each with canonical edge order.
pub fn enumerate_trees(n: usize) -> Result<Vec<LabeledTree>> {
    if n == 0 {
        return input_err("trees need at least one vertex");
    }
    if n == 1 {
        return Ok(vec![LabeledTree { n: 1, edges: vec![], mark: None }]);
    }
    if n == 2 {
        return Ok(vec![LabeledTree { n: 2, edges: vec![(1, 2)], mark: None }]);
    }
    let mut out = Vec::with_capacity((n as u64).pow(n as u32 - 2) as usize);
    let mut seq = vec![1usize; n - 2];
    loop {
        out.push(prufer_decode(n, &seq));
        // odometer over {1..n}^(n-2)
        let mut k = 0;
        loop {
            if k == seq.len() {
                return Ok(out);
            }
            if seq[k] < n {
                seq[k] += 1;
                break;
            }
            seq[k] = 1;
            k += 1;
        }
    }
}

fn prufer_decode(n: usize, seq: &[usize]) -> LabeledTree {
    let mut degree = vec![1usize; n + 1];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = 1;
    let mut leaf = 0;
    for &s in seq {
        if leaf == 0 {
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
        edges.push(if leaf < s { (leaf, s) } else { (s, leaf) });
        degree[leaf] -= 1;
        degree[s] -= 1;
        if degree[s] == 1 && s < ptr {
            leaf = s;
        } else {
            leaf = 0;
        }
    }
    let mut last = Vec::new();
    for v in 1..=n {
        if degree[v] == 1 {
            last.push(v);
        }
    }
    edges.push((last[0], last[1]));
    edges.sort_unstable();
    LabeledTree { n, edges, mark: None }
}

/// Edge-operator data shared by all trees of one transfer problem: the
/// homotopy for plain edges and g∘f for wavy ones.
#[derive(Clone, Debug)]
pub struct TreeOps {
    pub h: GradedMap,
    pub gf: GradedMap,
}

impl TreeOps {
    pub fn from_equivalence(eq: &HomotopyEquivalence) -> Self {
        TreeOps { h: eq.h_e.clone(), gf: eq.gf() }
    }

    fn edge_scalar(&self, mark: Option<EdgeMark>, alpha: &Generator, beta: &Generator) -> Rat {
        match mark {
            None => pair_against(alpha, &apply_homotopy(&self.h, beta)),
            Some(EdgeMark::Dotted) => pairing(alpha, beta),
            Some(EdgeMark::Wavy) => pair_against(alpha, &apply_degree0(&self.gf, beta)),
        }
    }
}

fn pair_against(alpha: &Generator, image: &Element) -> Rat {
    let mut out = Rat::zero();
    for (m, c) in &image.terms {
        debug_assert_eq!(m.len(), 1);
        out += pairing(alpha, &m.0[0]) * c;
    }
    out
}

/// Evaluate one labeled tree on n algebra elements: per edge (i,j) in
/// canonical order, choose one unconsumed factor from x_i and one from x_j,
/// apply the edge operator, multiply what is left. The sign of a choice is
/// the Koszul sign of moving the chosen factors (α₁, β₁, α₂, β₂, …) to the
/// front of the concatenated word x₁x₂…x_n.
pub fn tree_eval(t: &LabeledTree, ops: &TreeOps, xs: &[Element]) -> Result<Element> {
    if xs.len() != t.n {
        return input_err(format!("tree on {} vertices applied to {} inputs", t.n, xs.len()));
    }
    t.validate()?;
    let mut out = Element::zero();
    let terms: Vec<Vec<(&Monomial, &Rat)>> =
        xs.iter().map(|x| x.terms.iter().collect()).collect();
    let mut pick = vec![0usize; xs.len()];
    'outer: loop {
        if terms.iter().all(|t| !t.is_empty()) {
            let mut coeff = Rat::one();
            let words: Vec<&[Generator]> = pick
                .iter()
                .zip(&terms)
                .map(|(&k, t)| {
                    coeff *= t[k].1;
                    t[k].0 .0.as_slice()
                })
                .collect();
            eval_words(t, ops, &words, &coeff, &mut out);
        }
        for i in 0..pick.len() {
            if terms[i].is_empty() {
                break 'outer;
            }
            if pick[i] + 1 < terms[i].len() {
                pick[i] += 1;
                continue 'outer;
            }
            pick[i] = 0;
        }
        break;
    }
    Ok(out)
}

fn eval_words(
    t: &LabeledTree,
    ops: &TreeOps,
    words: &[&[Generator]],
    coeff: &Rat,
    out: &mut Element,
) {
    let offsets: Vec<usize> = words
        .iter()
        .scan(0usize, |acc, w| {
            let o = *acc;
            *acc += w.len();
            Some(o)
        })
        .collect();
    let total: usize = words.iter().map(|w| w.len()).sum();
    let mut used: Vec<Vec<bool>> = words.iter().map(|w| vec![false; w.len()]).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(2 * t.edges.len());
    recurse_edges(t, ops, words, &offsets, total, coeff, &mut used, &mut chosen, 0, &Rat::one(), out);
}

#[allow(clippy::too_many_arguments)]
fn recurse_edges(
    t: &LabeledTree,
    ops: &TreeOps,
    words: &[&[Generator]],
    offsets: &[usize],
    total: usize,
    coeff: &Rat,
    used: &mut Vec<Vec<bool>>,
    chosen: &mut Vec<usize>,
    k: usize,
    scalars: &Rat,
    out: &mut Element,
) {
    if k == t.edges.len() {
        // assemble the sign and the leftover word
        let remaining: Vec<usize> = (0..total).filter(|g| !chosen.contains(g)).collect();
        let mut perm = chosen.clone();
        perm.extend(&remaining);
        let degrees: Vec<i64> = words.iter().flat_map(|w| w.iter().map(|g| g.degree())).collect();
        let mut sign = koszul_sign(&perm, &degrees).expect("valid permutation");
        // edge operators are applied as a tensor product of odd operators:
        // the operator of edge k passes the pairs consumed by earlier edges
        let ne = t.edges.len();
        for m in 0..ne {
            let p = (degrees[chosen[2 * m]] + degrees[chosen[2 * m + 1]]).rem_euclid(2);
            if p == 1 && (ne - 1 - m) % 2 == 1 {
                sign = -sign;
            }
        }
        let gens: Vec<Generator> = remaining
            .iter()
            .map(|&g| {
                let v = offsets.partition_point(|&o| o <= g) - 1;
                words[v][g - offsets[v]].clone()
            })
            .collect();
        out.add_word(gens, coeff * scalars * rat_int(sign));
        return;
    }
    let (i, j) = (t.edges[k].0 - 1, t.edges[k].1 - 1);
    let mark = match t.mark {
        Some((e, m)) if e == k => Some(m),
        _ => None,
    };
    for p in 0..words[i].len() {
        if used[i][p] {
            continue;
        }
        for q in 0..words[j].len() {
            if used[j][q] {
                continue;
            }
            let s = ops.edge_scalar(mark, &words[i][p], &words[j][q]);
            if s.is_zero() {
                continue;
            }
            used[i][p] = true;
            used[j][q] = true;
            chosen.push(offsets[i] + p);
            chosen.push(offsets[j] + q);
            let scalars2 = scalars * &s;
            recurse_edges(t, ops, words, offsets, total, coeff, used, chosen, k + 1, &scalars2, out);
            chosen.pop();
            chosen.pop();
            used[i][p] = false;
            used[j][q] = false;
        }
    }
}

/// R_n = Σ over all labeled trees; R_1 is the identity.
pub fn r_n(ops: &TreeOps, xs: &[Element]) -> Result<Element> {
    let trees = enumerate_trees(xs.len())?;
    sum_trees(&trees, ops, xs)
}

fn sum_trees(trees: &[LabeledTree], ops: &TreeOps, xs: &[Element]) -> Result<Element> {
    #[cfg(feature = "parallel")]
    {
        trees
            .par_iter()
            .map(|t| tree_eval(t, ops, xs))
            .try_reduce(Element::zero, |a, b| Ok(a.add(&b)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut out = Element::zero();
        for t in trees {
            out = out.add(&tree_eval(t, ops, xs)?);
        }
        Ok(out)
    }
}

/// The algebra morphism extending f on ξ-generators and g* on θ-generators,
/// applied multiplicatively.
pub fn u1_apply(eq: &HomotopyEquivalence, a: &Element) -> Element {
    let mut out = Element::zero();
    for (m, c) in &a.terms {
        let mut term = Element::scalar(c.clone());
        for g in &m.0 {
            let img = match g.side {
                Side::E => apply_degree0(&eq.f, g),
                Side::EDual => apply_degree0(&eq.g, g),
            };
            term = term.mul(&img);
            if term.is_zero() {
                break;
            }
        }
        out = out.add(&term);
    }
    out
}

/// U_n = U_1 ∘ R_n.
pub fn u_n(eq: &HomotopyEquivalence, ops: &TreeOps, xs: &[Element]) -> Result<Element> {
    Ok(u1_apply(eq, &r_n(ops, xs)?))
}

/// An L∞ morphism presented through its evaluators.
pub trait LinftyMorphism {
    fn source(&self) -> &ShiftedLieContext;
    fn target(&self) -> &ShiftedLieContext;
    /// The n-th Taylor component on n inputs.
    fn component(&self, n: usize, xs: &[Element]) -> Result<Element>;
}

/// The morphism of the transfer theorem, built from a homotopy equivalence.
pub struct TransferMorphism {
    pub equiv: HomotopyEquivalence,
    pub ops: TreeOps,
    src: ShiftedLieContext,
    tgt: ShiftedLieContext,
}

impl TransferMorphism {
    pub fn new(equiv: HomotopyEquivalence) -> Result<Self> {
        equiv.check()?;
        let src = ShiftedLieContext::new(&equiv.e)?;
        let tgt = ShiftedLieContext::new(&equiv.f_cx)?;
        let ops = TreeOps::from_equivalence(&equiv);
        Ok(TransferMorphism { equiv, ops, src, tgt })
    }
}

impl LinftyMorphism for TransferMorphism {
    fn source(&self) -> &ShiftedLieContext {
        &self.src
    }

    fn target(&self) -> &ShiftedLieContext {
        &self.tgt
    }

    fn component(&self, n: usize, xs: &[Element]) -> Result<Element> {
        if n == 0 || xs.len() != n {
            return input_err("component arity mismatch");
        }
        u_n(&self.equiv, &self.ops, xs)
    }
}

/// The identity morphism on a context: U_1 = id, U_{≥2} = 0.
pub struct IdentityMorphism {
    ctx: ShiftedLieContext,
}

impl IdentityMorphism {
    pub fn new(ctx: ShiftedLieContext) -> Self {
        IdentityMorphism { ctx }
    }
}

impl LinftyMorphism for IdentityMorphism {
    fn source(&self) -> &ShiftedLieContext {
        &self.ctx
    }

    fn target(&self) -> &ShiftedLieContext {
        &self.ctx
    }

    fn component(&self, n: usize, xs: &[Element]) -> Result<Element> {
        if n == 0 || xs.len() != n {
            return input_err("component arity mismatch");
        }
        Ok(if n == 1 { xs[0].clone() } else { Element::zero() })
    }
}

fn parity_sign(k: i64) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All k-subsets of {0..n-1} in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// The sign with which the unshuffle (front-block S, rest in order) acts on
/// graded antisymmetric arguments: sgn(σ) times the Koszul sign.
fn unshuffle_sign(front: &[usize], n: usize, degs: &[i64]) -> i64 {
    let mut perm: Vec<usize> = front.to_vec();
    perm.extend((0..n).filter(|i| !front.contains(i)));
    perm_sign(&perm) * koszul_sign(&perm, degs).expect("valid permutation")
}

fn reordered<'a>(xs: &'a [Element], front: &[usize]) -> (Vec<&'a Element>, Vec<&'a Element>) {
    let head: Vec<&Element> = front.iter().map(|&i| &xs[i]).collect();
    let tail: Vec<&Element> =
        (0..xs.len()).filter(|i| !front.contains(i)).map(|i| &xs[i]).collect();
    (head, tail)
}

/// [d, F](xs) for an n-ary operator evaluator F of the given parity:
/// D∘F − (−1)^{|F|} Σᵢ (−1)^{|x₁|+…+|xᵢ₋₁|} F(…, Dxᵢ, …).
fn commutator_with_d(
    ctx: &ShiftedLieContext,
    f: &mut dyn FnMut(&[Element]) -> Result<Element>,
    f_parity: i64,
    target_d: &mut dyn FnMut(&Element) -> Element,
    xs: &[Element],
) -> Result<Element> {
    let mut out = target_d(&f(xs)?);
    let degs: Vec<i64> = xs.iter().map(|x| x.degree().unwrap_or(0)).collect();
    for i in 0..xs.len() {
        let prefix: i64 = degs[..i].iter().sum();
        let mut ys: Vec<Element> = xs.to_vec();
        ys[i] = ctx.differential(&xs[i]);
        let s = parity_sign(f_parity) * parity_sign(prefix);
        out = out.add(&f(&ys)?.scale(&rat_int(-s)));
    }
    Ok(out)
}

/// Check the structure equation for R_n on one input tuple, in edge-marking
/// form: [d, R_n] = Σ_{T, e} (T^e − T^{∼e}) over all trees T on n vertices
/// and all edges e, where the dotted edge T^e pairs without the homotopy and
/// the wavy edge T^{∼e} pairs through g∘f. The identity encodes the side
/// relation dH + Hd = id − g∘f edge by edge; composing both sides with f
/// yields the L∞ morphism equations checked by `morphism_residual`.
pub fn prop21_residual(
    ctx: &ShiftedLieContext,
    ops: &TreeOps,
    xs: &[Element],
) -> Result<Element> {
    let n = xs.len();
    if n < 2 {
        return input_err("the structure equation needs arity at least 2");
    }
    let lhs = commutator_with_d(
        ctx,
        &mut |ys| r_n(ops, ys),
        (n as i64) - 1,
        &mut |e| ctx.differential(e),
        xs,
    )?;

    let mut rhs = Element::zero();
    for t in enumerate_trees(n)? {
        for e in 0..t.edges.len() {
            let dotted = t.clone().with_mark(e, EdgeMark::Dotted)?;
            let wavy = t.clone().with_mark(e, EdgeMark::Wavy)?;
            rhs = rhs.add(&tree_eval(&dotted, ops, xs)?).sub(&tree_eval(&wavy, ops, xs)?);
        }
    }
    Ok(lhs.sub(&rhs))
}

/// Randomized exact verification of the structure equation at arity n.
pub fn verify_prop21(
    eq: &HomotopyEquivalence,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<()> {
    eq.check()?;
    let ctx = ShiftedLieContext::new(&eq.e)?;
    let ops = TreeOps::from_equivalence(eq);
    let mut rng = crate::corpus::seeded_rng(seed);
    for trial in 0..trials {
        let xs: Vec<Element> = (0..n)
            .map(|_| crate::corpus::random_nonzero_word(&mut rng, &eq.e, 3))
            .collect();
        let res = prop21_residual(&ctx, &ops, &xs)?;
        if !res.is_zero() {
            let tuple: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            return violation(format!(
                "structure equation fails at arity {} (trial {}): inputs [{}], difference {}",
                n,
                trial,
                tuple.join("; "),
                res
            ));
        }
    }
    Ok(())
}

/// Residual of the L∞ morphism equation at arity n on one tuple.
pub fn morphism_residual(
    u: &dyn LinftyMorphism,
    n: usize,
    xs: &[Element],
) -> Result<Element> {
    let src = u.source().clone();
    let tgt = u.target().clone();
    if n == 1 {
        // [d, U_1] = 0
        let lhs = tgt.differential(&u.component(1, xs)?);
        let rhs = u.component(1, &[src.differential(&xs[0])])?;
        return Ok(lhs.sub(&rhs));
    }
    let degs: Vec<i64> = xs.iter().map(|x| x.degree().unwrap_or(0)).collect();
    let lhs = commutator_with_d(
        &src,
        &mut |ys| u.component(n, ys),
        (n as i64) - 1,
        &mut |e| tgt.differential(e),
        xs,
    )?;
    let mut rhs = Element::zero();
    for front in subsets(n, 2) {
        let chi = unshuffle_sign(&front, n, &degs);
        let (head, tail) = reordered(xs, &front);
        let first = big_bracket(head[0], head[1]);
        let mut args: Vec<Element> = vec![first];
        args.extend(tail.iter().map(|e| (*e).clone()));
        rhs = rhs.add(&u.component(n - 1, &args)?.scale(&rat_int(chi)));
    }
    for p in 1..n {
        for front in subsets(n, p).into_iter().filter(|f| f[0] == 0) {
            let chi = unshuffle_sign(&front, n, &degs);
            let (head, tail) = reordered(xs, &front);
            let head: Vec<Element> = head.into_iter().cloned().collect();
            let tail: Vec<Element> = tail.into_iter().cloned().collect();
            let a = u.component(p, &head)?;
            let b = u.component(n - p, &tail)?;
            // tensor Koszul sign: the odd-arity operator on the second block
            // passes the arguments of the first block
            let front_deg: i64 = front.iter().map(|&i| degs[i]).sum();
            let q = (n - p) as i64;
            let s = chi * parity_sign(p as i64 - 1) * parity_sign((q - 1) * front_deg);
            rhs = rhs.add(&big_bracket(&a, &b).scale(&rat_int(-s)));
        }
    }
    Ok(lhs.sub(&rhs))
}

/// Randomized exact verification of the morphism equations up to an arity.
pub fn verify_linfty_morphism(
    u: &dyn LinftyMorphism,
    max_arity: usize,
    trials: usize,
    seed: u64,
) -> Result<()> {
    if max_arity < 2 {
        return input_err("morphism verification needs max arity at least 2");
    }
    let src_complex = u.source().complex.clone();
    let mut rng = crate::corpus::seeded_rng(seed);
    for n in 1..=max_arity {
        for trial in 0..trials {
            let xs: Vec<Element> = (0..n)
                .map(|_| crate::corpus::random_nonzero_word(&mut rng, &src_complex, 3))
                .collect();
            let res = morphism_residual(u, n, &xs)?;
            if !res.is_zero() {
                let tuple: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                return violation(format!(
                    "morphism equation fails at arity {} (trial {}): inputs [{}], difference {}",
                    n,
                    trial,
                    tuple.join("; "),
                    res
                ));
            }
        }
    }
    Ok(())
}

/// Pushforward Σ 1/n! U_n(ν,…,ν) of a Maurer-Cartan element. Finite because
/// every term of ν has left weight ≥ 2 and the degree window bounds the left
/// weight of a nonzero degree-3 element.
pub fn push_mc(u: &dyn LinftyMorphism, nu: &Element) -> Result<Element> {
    if nu.is_zero() {
        return Ok(Element::zero());
    }
    let src = u.source();
    if let Some(w) = nu.biweights().iter().find(|w| w.0 < 2) {
        return input_err(format!(
            "pushforward input has a term of left weight {} < 2; the series need not terminate",
            w.0
        ));
    }
    if !src.is_mc(nu)? {
        return violation("pushforward input is not Maurer-Cartan".to_string());
    }
    let min_deg = match src.complex.degrees().iter().min() {
        Some(&d) => d,
        None => return Ok(Element::zero()),
    };
    if src.complex.degrees().iter().any(|&d| d > 0) {
        return input_err("pushforward requires a complex in non-positive degrees".to_string());
    }
    // a nonzero degree-3 term with L θ-factors (each of degree ≥ 1) and one
    // ξ-factor (degree ≥ 1 + min_deg) needs L ≤ 2 - min_deg; U_n output has
    // left weight ≥ n+1
    let n_max = (1 - min_deg).max(1) as usize;
    let mut out = Element::zero();
    let mut factorial = Rat::one();
    for n in 1..=n_max {
        factorial = &factorial * rat_int(n as i64);
        let xs: Vec<Element> = std::iter::repeat(nu.clone()).take(n).collect();
        let term = u.component(n, &xs)?;
        out = out.add(&term.scale(&(Rat::one() / &factorial)));
    }
    Ok(out)
}
