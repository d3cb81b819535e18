//! Seeded random generation of complexes, homotopy equivalences and algebra
//! elements. Used by the randomized verifiers and the test suites; fixed seed
//! means byte-identical output everywhere.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{Complex, GradedMap, HomotopyEquivalence};
use crate::matrix::{Matrix, Rat};
use crate::symalg::{rat_int, Element, Generator, Side};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random invertible integer matrix with integer inverse, built from
/// elementary row operations.
pub fn random_unimodular(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut m = Matrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..(2 * n) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = rat_int(rng.gen_range(-2..=2i64));
        // row_i += c * row_j
        for k in 0..n {
            let v = &m[(i, k)] + &(&c * &m[(j, k)]);
            m[(i, k)] = v;
        }
        if rng.gen_bool(0.3) {
            for k in 0..n {
                m.data.swap(i * n + k, j * n + k);
            }
        }
    }
    m
}

/// Dims of the "split" model: per degree, a zero-differential part plus cone
/// sources feeding identically into the next degree.
#[derive(Clone, Debug)]
struct SplitShape {
    min_deg: i64,
    max_deg: i64,
    z: Vec<usize>,
    cones: Vec<usize>, // cones[k] spans (min_deg + k, min_deg + k + 1)
}

impl SplitShape {
    fn random(rng: &mut impl Rng, min_deg: i64, max_deg: i64, max_dim: usize) -> Self {
        let span = (max_deg - min_deg) as usize + 1;
        loop {
            let z: Vec<usize> = (0..span).map(|_| rng.gen_range(0..=max_dim.min(2))).collect();
            let cones: Vec<usize> =
                (0..span.saturating_sub(1)).map(|_| rng.gen_range(0..=1)).collect();
            let shape = SplitShape { min_deg, max_deg, z, cones };
            if shape.total_dim() > 0 && shape.dims().iter().all(|&(_, d)| d <= max_dim) {
                return shape;
            }
        }
    }

    fn empty(min_deg: i64, max_deg: i64, z: Vec<usize>) -> Self {
        let span = (max_deg - min_deg) as usize + 1;
        SplitShape { min_deg, max_deg, z, cones: vec![0; span.saturating_sub(1)] }
    }

    fn dim(&self, deg: i64) -> usize {
        let k = (deg - self.min_deg) as usize;
        if deg < self.min_deg || deg > self.max_deg {
            return 0;
        }
        let mut d = self.z[k];
        if k < self.cones.len() {
            d += self.cones[k]; // cone sources at this degree
        }
        if k > 0 {
            d += self.cones[k - 1]; // cone targets from below
        }
        d
    }

    fn dims(&self) -> Vec<(i64, usize)> {
        (self.min_deg..=self.max_deg).map(|d| (d, self.dim(d))).collect()
    }

    fn total_dim(&self) -> usize {
        self.dims().iter().map(|&(_, d)| d).sum()
    }

    /// Complex with basis ordered (zero part, cone sources, cone targets) per
    /// degree and the identity differential on cone pairs.
    fn complex(&self, tag: &str) -> Complex {
        let mut basis = std::collections::BTreeMap::new();
        for (deg, dim) in self.dims() {
            if dim > 0 {
                basis.insert(
                    deg,
                    (0..dim).map(|k| format!("{}{}_{}", tag, deg, k)).collect::<Vec<_>>(),
                );
            }
        }
        let mut c = Complex { basis, d: std::collections::BTreeMap::new() };
        for k in 0..self.cones.len() {
            let nc = self.cones[k];
            if nc == 0 {
                continue;
            }
            let deg = self.min_deg + k as i64;
            let mut m = Matrix::zeros(self.dim(deg + 1), self.dim(deg));
            // source block starts after z[k]; target block after z[k+1] + cone
            // sources of deg+1
            let src0 = self.z[k];
            let mut tgt0 = self.z[k + 1];
            if k + 1 < self.cones.len() {
                tgt0 += self.cones[k + 1];
            }
            for c_idx in 0..nc {
                m[(tgt0 + c_idx, src0 + c_idx)] = rat_int(1);
            }
            c.set_d_block(deg, m);
        }
        c
    }

    /// The cone-contracting homotopy: sends each cone target back to its
    /// source, everything else to zero.
    fn homotopy(&self, c: &Complex) -> GradedMap {
        let mut h = GradedMap::zero(c, c, -1);
        for k in 0..self.cones.len() {
            let nc = self.cones[k];
            if nc == 0 {
                continue;
            }
            let deg = self.min_deg + k as i64;
            let mut m = Matrix::zeros(self.dim(deg), self.dim(deg + 1));
            let src0 = self.z[k];
            let mut tgt0 = self.z[k + 1];
            if k + 1 < self.cones.len() {
                tgt0 += self.cones[k + 1];
            }
            for c_idx in 0..nc {
                m[(src0 + c_idx, tgt0 + c_idx)] = rat_int(1);
            }
            h.set_block(deg + 1, m);
        }
        h
    }
}

/// A random complex in the degree window, of bounded dimension per degree,
/// with a basis change hiding the split structure.
pub fn random_complex(rng: &mut impl Rng, min_deg: i64, max_deg: i64, max_dim: usize) -> Complex {
    let shape = SplitShape::random(rng, min_deg, max_deg, max_dim);
    let c0 = shape.complex("e");
    conjugate_complex(rng, &c0).0
}

fn conjugate_complex(rng: &mut impl Rng, c0: &Complex) -> (Complex, GradedMap, GradedMap) {
    // pick invertible P per degree; the new complex has d = P d0 P^{-1}
    let mut p_blocks = std::collections::BTreeMap::new();
    for (&deg, b) in &c0.basis {
        p_blocks.insert(deg, random_unimodular(rng, b.len()));
    }
    let mut c = c0.clone();
    for &deg in &c0.degrees() {
        let d0 = c0.d_block(deg);
        if d0.rows == 0 || d0.cols == 0 {
            continue;
        }
        let p_t = &p_blocks[&(deg + 1)];
        let p_s = &p_blocks[&deg];
        let m = p_t.mul(&d0).mul(&p_s.inverse().expect("unimodular"));
        c.set_d_block(deg, m);
    }
    let mut p = GradedMap::zero(c0, &c, 0);
    let mut p_inv = GradedMap::zero(&c, c0, 0);
    for (&deg, m) in &p_blocks {
        if m.rows > 0 {
            p.set_block(deg, m.clone());
            p_inv.set_block(deg, m.inverse().expect("unimodular"));
        }
    }
    (c, p, p_inv)
}

/// A random valid homotopy equivalence (E, F, f, g, H_E, H_F): both sides are
/// a shared zero-differential core plus independent contractible cones, then
/// both get random basis changes and H_E gets an extra d∘μ∘d term.
pub fn random_equivalence(
    rng: &mut impl Rng,
    min_deg: i64,
    max_deg: i64,
    max_dim: usize,
) -> HomotopyEquivalence {
    let span = (max_deg - min_deg) as usize + 1;
    let core_max = max_dim.saturating_sub(1).max(1);
    let z: Vec<usize> = (0..span).map(|_| rng.gen_range(0..=core_max.min(2))).collect();
    let mk_side = |rng: &mut dyn rand::RngCore| -> SplitShape {
        let mut cones: Vec<usize> = (0..span.saturating_sub(1))
            .map(|_| rng.gen_range(0..=1usize))
            .collect();
        let mut shape = SplitShape {
            min_deg,
            max_deg,
            z: z.clone(),
            cones: cones.clone(),
        };
        while shape.dims().iter().any(|&(_, d)| d > max_dim) || shape.total_dim() == 0 {
            for c in cones.iter_mut() {
                if *c > 0 && rng.gen_bool(0.5) {
                    *c -= 1;
                }
            }
            shape = SplitShape { min_deg, max_deg, z: z.clone(), cones: cones.clone() };
            if shape.total_dim() == 0 {
                shape = SplitShape::empty(min_deg, max_deg, vec![1; span]);
                break;
            }
        }
        shape
    };
    let se = mk_side(rng);
    let sf = mk_side(rng);
    let e0 = se.complex("a");
    let f0 = sf.complex("b");
    let he0 = se.homotopy(&e0);
    let hf0 = sf.homotopy(&f0);

    // f0: identity on the shared core, zero on cones (core indices come first
    // in each degree by construction)
    let mut f_map = GradedMap::zero(&e0, &f0, 0);
    let mut g_map = GradedMap::zero(&f0, &e0, 0);
    for k in 0..span {
        let deg = min_deg + k as i64;
        let (de, df) = (e0.dim(deg), f0.dim(deg));
        if de == 0 || df == 0 {
            continue;
        }
        let mut mf = Matrix::zeros(df, de);
        let mut mg = Matrix::zeros(de, df);
        for i in 0..z[k] {
            mf[(i, i)] = rat_int(1);
            mg[(i, i)] = rat_int(1);
        }
        f_map.set_block(deg, mf);
        g_map.set_block(deg, mg);
    }

    // conjugate both sides
    let (e, p, p_inv) = conjugate_complex(rng, &e0);
    let (f_cx, q, q_inv) = conjugate_complex(rng, &f0);
    let f = q.compose(&f_map).compose(&p_inv);
    let g = p.compose(&g_map).compose(&q_inv);
    let mut h_e = p.compose(&he0).compose(&p_inv);
    let h_f = q.compose(&hf0).compose(&q_inv);

    // enrich H_E by d∘μ∘d for a random shift -3 map μ: still a valid homotopy
    let mut mu = GradedMap::zero(&e, &e, -3);
    for &deg in &e.degrees() {
        let (r, c) = (e.dim(deg - 3), e.dim(deg));
        if r > 0 && c > 0 {
            let mut m = Matrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m[(i, j)] = rat_int(rng.gen_range(-1..=1i64));
                }
            }
            mu.set_block(deg, m);
        }
    }
    let d = GradedMap::differential(&e);
    h_e = h_e.add(&d.compose(&mu).compose(&d));

    HomotopyEquivalence { e, f_cx, f, g, h_e, h_f }
}

/// Random homogeneous word (single monomial with a small integer coefficient)
/// over the complex, with 1..=max_len generator factors. The result can be
/// zero when an odd generator repeats.
pub fn random_word(rng: &mut impl Rng, complex: &Complex, max_len: usize) -> Element {
    let mut names: Vec<(i64, String)> = Vec::new();
    for (&deg, b) in &complex.basis {
        for n in b {
            names.push((deg, n.clone()));
        }
    }
    if names.is_empty() {
        return Element::zero();
    }
    let len = rng.gen_range(1..=max_len.max(1));
    let mut gens = Vec::with_capacity(len);
    for _ in 0..len {
        let (deg, name) = names[rng.gen_range(0..names.len())].clone();
        let side = if rng.gen_bool(0.5) { Side::E } else { Side::EDual };
        gens.push(Generator { side, name, base_degree: deg });
    }
    let coeff = loop {
        let c = rng.gen_range(-3..=3i64);
        if c != 0 {
            break c;
        }
    };
    Element::from_word(gens, rat_int(coeff))
}

/// Random homogeneous word that is guaranteed nonzero.
pub fn random_nonzero_word(rng: &mut impl Rng, complex: &Complex, max_len: usize) -> Element {
    loop {
        let w = random_word(rng, complex, max_len);
        if !w.is_zero() {
            return w;
        }
    }
}

/// Random (generally inhomogeneous) element: a small sum of random words.
pub fn random_element(rng: &mut impl Rng, complex: &Complex, max_terms: usize, max_len: usize) -> Element {
    let t = rng.gen_range(1..=max_terms.max(1));
    let mut out = Element::zero();
    for _ in 0..t {
        out = out.add(&random_word(rng, complex, max_len));
    }
    out
}

/// Random homogeneous product of θ-generators (an element of the abelian part
/// S(E*)); retries until nonzero.
pub fn random_theta_word(rng: &mut impl Rng, complex: &Complex, max_len: usize) -> Element {
    let mut names: Vec<(i64, String)> = Vec::new();
    for (&deg, b) in &complex.basis {
        for n in b {
            names.push((deg, n.clone()));
        }
    }
    if names.is_empty() {
        return Element::one();
    }
    loop {
        let len = rng.gen_range(1..=max_len.max(1));
        let gens: Vec<Generator> = (0..len)
            .map(|_| {
                let (deg, name) = names[rng.gen_range(0..names.len())].clone();
                Generator::theta(name, deg)
            })
            .collect();
        let coeff = rat_int(rng.gen_range(1..=3i64));
        let w = Element::from_word(gens, coeff);
        if !w.is_zero() {
            return w;
        }
    }
}

/// Random degree-2 element of biweight (≥2, 1): a valid gauge generator.
/// Can be zero when the degree window admits no such monomial.
pub fn random_gauge_generator(rng: &mut impl Rng, complex: &Complex) -> Element {
    let mut gens: Vec<(i64, String)> = Vec::new();
    for (&deg, b) in &complex.basis {
        for n in b {
            gens.push((deg, n.clone()));
        }
    }
    let mut out = Element::zero();
    if gens.is_empty() {
        return out;
    }
    for _ in 0..4 {
        let k = rng.gen_range(2..=3usize);
        let mut word: Vec<Generator> = (0..k)
            .map(|_| {
                let (deg, name) = gens[rng.gen_range(0..gens.len())].clone();
                Generator::theta(name, deg)
            })
            .collect();
        let (deg, name) = gens[rng.gen_range(0..gens.len())].clone();
        word.push(Generator::xi(name, deg));
        let w = Element::from_word(word, rat_int(rng.gen_range(-2..=2i64)));
        if w.is_homogeneous_of_degree(2) {
            out = out.add(&w);
        }
    }
    out
}

/// A random Maurer-Cartan element of biweight (≥2, 1): the gauge orbit of 0
/// under a random gauge generator. Zero when the complex has no differential
/// (the orbit of 0 is then trivial).
pub fn random_mc_encoding(rng: &mut impl Rng, complex: &Complex) -> Element {
    let ctx = crate::bracket::ShiftedLieContext::new(complex).expect("valid complex");
    for _ in 0..8 {
        let h = random_gauge_generator(rng, complex);
        if let Ok(nu) = crate::bracket::gauge_exp(&ctx, &h, &Element::zero()) {
            if !nu.is_zero() {
                return nu;
            }
        }
    }
    Element::zero()
}

/// Random scaling used when perturbing data in negative tests.
pub fn random_rat(rng: &mut impl Rng) -> Rat {
    let p = rng.gen_range(-4..=4i64);
    let q = rng.gen_range(1..=3i64);
    Rat::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_complexes_validate() {
        let mut rng = seeded_rng(7);
        for _ in 0..50 {
            let c = random_complex(&mut rng, -2, 0, 3);
            c.validate().unwrap();
        }
    }

    #[test]
    fn random_equivalences_check() {
        let mut rng = seeded_rng(11);
        for _ in 0..30 {
            let eq = random_equivalence(&mut rng, -2, 0, 3);
            eq.check().unwrap();
        }
    }

    #[test]
    fn determinism() {
        let mut a = seeded_rng(5);
        let mut b = seeded_rng(5);
        for _ in 0..5 {
            assert_eq!(random_complex(&mut a, -2, 0, 3), random_complex(&mut b, -2, 0, 3));
        }
    }
}

use num_traits::One;

use crate::oracle::{combo_apply, combo_single, eval_combo, Combo};
use crate::transfer::LinftyStructure;

/// Transport a structure along an invertible degree-0 change of basis:
/// l_k'(u_1..u_k) = P l_k(P^{-1}u_1, .., P^{-1}u_k).
fn transform_structure(
    s: &LinftyStructure,
    c: &Complex,
    p: &GradedMap,
    p_inv: &GradedMap,
) -> LinftyStructure {
    let mut out = LinftyStructure::new(c).expect("valid complex");
    let mut gens: Vec<String> = Vec::new();
    for names in c.basis.values() {
        gens.extend(names.iter().cloned());
    }
    for &k in &s.arities() {
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..k {
            let mut next = Vec::new();
            for t in &tuples {
                let lo = t.last().copied().unwrap_or(0);
                for i in lo..gens.len() {
                    let mut t2 = t.clone();
                    t2.push(i);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        for t in tuples {
            let names: Vec<&str> = t.iter().map(|&i| gens[i].as_str()).collect();
            let args: Vec<Combo> =
                names.iter().map(|n| combo_apply(p_inv, &combo_single(n))).collect();
            for (nm, v) in combo_apply(p, &eval_combo(s, &args)) {
                out.add_bracket(&names, &nm, v).expect("homogeneous bracket");
            }
        }
    }
    out
}

/// A dg Lie algebra (arity-2 structure with differential) on degrees in
/// [−2, 0], conjugated by a random change of basis per degree. Variants:
///   0: 2-dim solvable algebra [x,y]=y acting on its ideal ⟨y⟩ in degree −1
///      plus a 2-dim weight-λ module,
///   1: Heisenberg algebra acting on its center in degree −1 plus the 3-dim
///      standard nilpotent representation,
///   2: Heisenberg in degree 0, module ⟨m, t⟩ in degree −1 with d m = z, and
///      a symmetric pairing B(m,t) = n into degree −2; its minimal model has
///      a nonzero l_3 (a Massey-product-style obstruction).
pub fn dg_lie_instance(rng: &mut impl Rng, variant: usize) -> LinftyStructure {
    let base = match variant % 3 {
        0 => {
            let lam1 = rat_int(rng.gen_range(-2..=2));
            let lam2 = rat_int(rng.gen_range(-2..=2));
            let mut c0 = Complex::with_dims(&[(-1, 3), (0, 2)]);
            // e-1_0 = s ↦ y; t_1, t_2 map to 0
            c0.set_d_block(-1, Matrix::from_i64(vec![vec![0, 0, 0], vec![1, 0, 0]]));
            let mut s = LinftyStructure::new(&c0).expect("complex");
            let x = "e0_0";
            let y = "e0_1";
            s.add_bracket(&[x, y], y, Rat::one()).unwrap();
            // the action on the ideal carries the opposite sign to [x,y]=y:
            // the encoded brackets satisfy the shifted (décalage) Jacobi and
            // Leibniz identities, not the classical ones
            s.add_bracket(&[x, "e-1_0"], "e-1_0", -Rat::one()).unwrap();
            // diagonal action of x on the closed module part; y·im(d) ≡ 0
            s.add_bracket(&[x, "e-1_1"], "e-1_1", lam1).unwrap();
            s.add_bracket(&[x, "e-1_2"], "e-1_2", lam2).unwrap();
            s
        }
        1 => {
            let c0 = Complex::with_dims(&[(-1, 3), (0, 3)]);
            let mut s = LinftyStructure::new(&c0).expect("complex");
            let (x, y, z) = ("e0_0", "e0_1", "e0_2");
            s.add_bracket(&[x, y], z, Rat::one()).unwrap();
            // ρ(x) = E12, ρ(y) = E23, ρ(z) = −E13: the shifted Jacobi
            // identity forces ρ(z) = −[ρ(x),ρ(y)] on the degree −1 module
            s.add_bracket(&[x, "e-1_1"], "e-1_0", Rat::one()).unwrap();
            s.add_bracket(&[y, "e-1_2"], "e-1_1", Rat::one()).unwrap();
            s.add_bracket(&[z, "e-1_2"], "e-1_0", -Rat::one()).unwrap();
            s
        }
        _ => {
            let alpha = rat_int(rng.gen_range(1..=3));
            let beta = rat_int(rng.gen_range(1..=3));
            let delta = rat_int(rng.gen_range(0..=2));
            let mut c0 = Complex::with_dims(&[(-2, 1), (-1, 2), (0, 3)]);
            // e-1_0 = m ↦ z; t = e-1_1 closed; n = e-2_0
            c0.set_d_block(-1, Matrix::from_i64(vec![vec![0, 0], vec![0, 0], vec![1, 0]]));
            let mut s = LinftyStructure::new(&c0).expect("complex");
            let (x, y) = ("e0_0", "e0_1");
            let (m, t, n) = ("e-1_0", "e-1_1", "e-2_0");
            s.add_bracket(&[x, y], "e0_2", alpha).unwrap();
            s.add_bracket(&[m, t], n, beta).unwrap();
            s.add_bracket(&[t, t], n, delta).unwrap();
            s
        }
    };
    let (c, p, p_inv) = conjugate_complex(rng, &base.complex);
    transform_structure(&base, &c, &p, &p_inv)
}
