//! The graded-commutative algebra S(E[-1] ⊕ E*[-1]): generators, monomial
//! normal forms, product, coproduct and the E*/E pairing.
//!
//! Elements are stored as canonically sorted monomials with nonzero rational
//! coefficients, so equality of elements is equality of the term maps.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::complex::Complex;
use crate::error::{input_err, Result};
use crate::matrix::Rat;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    /// ξ-type generator coming from E.
    E,
    /// θ-type generator coming from E*.
    EDual,
}

/// A single algebra generator: ξ^a (from E) or θ_a (from E*).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Generator {
    pub side: Side,
    pub name: String,
    pub base_degree: i64,
}

impl Generator {
    pub fn xi(name: impl Into<String>, base_degree: i64) -> Self {
        Generator { side: Side::E, name: name.into(), base_degree }
    }

    pub fn theta(name: impl Into<String>, base_degree: i64) -> Self {
        Generator { side: Side::EDual, name: name.into(), base_degree }
    }

    /// Algebra (cohomological) degree: d+1 for ξ over E_d, -d+1 for θ_a.
    pub fn degree(&self) -> i64 {
        match self.side {
            Side::E => self.base_degree + 1,
            Side::EDual => -self.base_degree + 1,
        }
    }

    pub fn biweight(&self) -> (i64, i64) {
        match self.side {
            Side::E => (0, 1),
            Side::EDual => (1, 0),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree() % 2 != 0
    }

    fn sort_key(&self) -> (i64, &str, Side) {
        (self.degree(), &self.name, self.side)
    }
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then(self.base_degree.cmp(&other.base_degree))
    }
}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::E => write!(f, "xi[{}]", self.name),
            Side::EDual => write!(f, "th[{}]", self.name),
        }
    }
}

/// Sort generators into canonical order, returning the Koszul sign of the
/// permutation. `None` means the monomial contains a repeated odd generator
/// and is therefore zero.
pub fn sort_with_sign(mut gens: Vec<Generator>) -> Option<(Vec<Generator>, i64)> {
    // insertion sort; each adjacent transposition of two odd symbols flips
    // the sign
    let mut sign = 1i64;
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j] < gens[j - 1] {
            if gens[j].is_odd() && gens[j - 1].is_odd() {
                sign = -sign;
            }
            gens.swap(j, j - 1);
            j -= 1;
        }
    }
    for w in gens.windows(2) {
        if w[0] == w[1] && w[0].is_odd() {
            return None;
        }
    }
    Some((gens, sign))
}

/// A normal-form monomial: canonically sorted generator list, no repeated odd
/// generator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(pub Vec<Generator>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|g| g.degree()).sum()
    }

    pub fn biweight(&self) -> (i64, i64) {
        self.0
            .iter()
            .fold((0, 0), |(a, b), g| {
                let (x, y) = g.biweight();
                (a + x, b + y)
            })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Exact linear combination of normal-form monomials.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Element {
    pub terms: BTreeMap<Monomial, Rat>,
}

impl Element {
    pub fn zero() -> Self {
        Element { terms: BTreeMap::new() }
    }

    pub fn scalar(q: Rat) -> Self {
        let mut e = Element::zero();
        if !q.is_zero() {
            e.terms.insert(Monomial::unit(), q);
        }
        e
    }

    pub fn one() -> Self {
        Element::scalar(Rat::one())
    }

    pub fn from_generator(g: Generator) -> Self {
        let mut e = Element::zero();
        e.terms.insert(Monomial(vec![g]), Rat::one());
        e
    }

    /// Build a term from an unsorted generator list; the normal-form sign is
    /// absorbed into the coefficient.
    pub fn from_word(gens: Vec<Generator>, coeff: Rat) -> Self {
        let mut e = Element::zero();
        e.add_word(gens, coeff);
        e
    }

    pub fn add_word(&mut self, gens: Vec<Generator>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        if let Some((sorted, sign)) = sort_with_sign(gens) {
            self.add_term(Monomial(sorted), coeff * Rat::from(num_bigint::BigInt::from(sign)));
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let new = self.coefficient(&m) + c;
        if new.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, new);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &Element) -> Element {
        let mut out = Element::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut gens = ma.0.clone();
                gens.extend(mb.0.iter().cloned());
                out.add_word(gens, ca * cb);
            }
        }
        out
    }

    /// Degree if homogeneous, `None` for 0 or mixed.
    pub fn degree(&self) -> Option<i64> {
        let mut degs = self.terms.keys().map(|m| m.degree());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of_degree(&self, d: i64) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// All biweights occurring with nonzero coefficient.
    pub fn biweights(&self) -> Vec<(i64, i64)> {
        let mut ws: Vec<(i64, i64)> = self.terms.keys().map(|m| m.biweight()).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    /// Projection onto a single biweight.
    pub fn weight_component(&self, w: (i64, i64)) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.biweight() == w)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Projection onto W_k: all biweights of the form (n, n+k).
    pub fn wk_component(&self, k: i64) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| {
                    let (a, b) = m.biweight();
                    b - a == k
                })
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Projection onto terms whose left weight (E*-count) satisfies the
    /// predicate.
    pub fn filter_left_weight(&self, pred: impl Fn(i64) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m.biweight().0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The coefficient of the unit monomial.
    pub fn scalar_part(&self) -> Rat {
        self.coefficient(&Monomial::unit())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({})*{}", c, m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The natural pairing between E* and E generators, symmetrized.
///
/// ⟨θ_a, ξ^b⟩ = δ_a^b for dual pairs of the same base name; zero unless
/// exactly one argument is from each side. With arguments in the other order
/// we set ⟨e, ε⟩ = -(-1)^{|e||ε|} ⟨ε, e⟩, the unique extension under which
/// the induced degree -2 bracket satisfies {a,b} = -(-1)^{|a||b|} {b,a} on
/// generators.
pub fn pairing(alpha: &Generator, beta: &Generator) -> Rat {
    match (alpha.side, beta.side) {
        (Side::EDual, Side::E) => {
            if alpha.name == beta.name && alpha.base_degree == beta.base_degree {
                Rat::one()
            } else {
                Rat::zero()
            }
        }
        (Side::E, Side::EDual) => {
            let s = if alpha.is_odd() && beta.is_odd() { 1 } else { -1 };
            pairing(beta, alpha) * Rat::from(num_bigint::BigInt::from(s))
        }
        _ => Rat::zero(),
    }
}

/// Embed a named complex generator into the algebra.
pub fn embed_generator(complex: &Complex, side: Side, name: &str) -> Result<Element> {
    let Some((deg, _)) = complex.find_generator(name) else {
        return input_err(format!("unknown generator '{}'", name));
    };
    Ok(Element::from_generator(Generator {
        side,
        name: name.to_string(),
        base_degree: deg,
    }))
}

/// Full coproduct of an element: sum over all two-block splittings of each
/// monomial, with Koszul signs.
pub fn coproduct(a: &Element) -> Vec<(Monomial, Monomial, Rat)> {
    let mut out: BTreeMap<(Monomial, Monomial), Rat> = BTreeMap::new();
    for (m, c) in &a.terms {
        let n = m.len();
        for mask in 0u64..(1u64 << n) {
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut perm = Vec::with_capacity(n);
            for (i, g) in m.0.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    left.push(g.clone());
                    perm.push(i);
                }
            }
            for (i, g) in m.0.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    right.push(g.clone());
                    perm.push(i);
                }
            }
            let degs: Vec<i64> = m.0.iter().map(|g| g.degree()).collect();
            let sign = crate::complex::koszul_sign(&perm, &degs).expect("valid perm");
            let coeff = c * Rat::from(num_bigint::BigInt::from(sign));
            let key = (Monomial(left), Monomial(right));
            let e = out.entry(key).or_insert_with(Rat::zero);
            *e += coeff;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out.into_iter().map(|((l, r), c)| (l, r, c)).collect()
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(num_bigint::BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi0() -> Generator {
        Generator::xi("e0", 0) // degree 1, odd
    }

    fn th_m1() -> Generator {
        Generator::theta("a1", -1) // degree 2, even
    }

    #[test]
    fn generator_degrees_and_weights() {
        assert_eq!(Element::one().degree(), Some(0));
        assert_eq!(xi0().degree(), 1);
        assert_eq!(xi0().biweight(), (0, 1));
        assert_eq!(th_m1().degree(), 2);
        assert_eq!(th_m1().biweight(), (1, 0));
    }

    #[test]
    fn unit_and_odd_square() {
        let x = Element::from_generator(xi0());
        assert_eq!(Element::one().mul(&x), x);
        assert!(x.mul(&x).is_zero());
    }

    #[test]
    fn graded_commutativity() {
        let th = Element::from_generator(th_m1());
        let xi = Element::from_generator(xi0());
        // |th| = 2 even: th*xi = xi*th
        assert_eq!(th.mul(&xi), xi.mul(&th));
        let xi2 = Element::from_generator(Generator::xi("e2", -2)); // degree -1, odd
        let a = xi.mul(&xi2);
        let b = xi2.mul(&xi).scale(&rat_int(-1));
        assert_eq!(a, b);
    }

    #[test]
    fn pairing_table() {
        let th = Generator::theta("e0", 0); // degree 1
        let xi = xi0();
        assert_eq!(pairing(&th, &xi), rat_int(1));
        assert_eq!(pairing(&xi, &th), rat_int(1)); // both odd: symmetric
        let other = Generator::xi("e1", 0);
        assert_eq!(pairing(&th, &other), rat_int(0));
        assert_eq!(pairing(&xi, &other), rat_int(0));
    }

    #[test]
    fn coproduct_small() {
        let one = Element::one();
        let cp = coproduct(&one);
        assert_eq!(cp.len(), 1);
        assert_eq!(cp[0], (Monomial::unit(), Monomial::unit(), rat_int(1)));

        let x = Element::from_generator(xi0());
        let cp = coproduct(&x);
        assert_eq!(cp.len(), 2); // x⊗1 + 1⊗x

        // Δ(xy) for odd x, odd y: xy⊗1 + x⊗y - y⊗x + 1⊗xy
        let y = Element::from_generator(Generator::xi("e1", 0));
        let xy = x.mul(&y);
        let cp = coproduct(&xy);
        assert_eq!(cp.len(), 4);
        let mx = Monomial(vec![xi0()]);
        let my = Monomial(vec![Generator::xi("e1", 0)]);
        let get = |l: &Monomial, r: &Monomial| {
            cp.iter()
                .find(|(a, b, _)| a == l && b == r)
                .map(|(_, _, c)| c.clone())
                .unwrap()
        };
        let sxy = get(&mx, &my);
        let syx = get(&my, &mx);
        assert_eq!(sxy, -syx);
    }

    #[test]
    fn weight_projections_sum_to_identity() {
        let th = Element::from_generator(Generator::theta("e0", 0));
        let xi = Element::from_generator(xi0());
        let a = th.mul(&xi).add(&xi.scale(&rat_int(3))).add(&Element::one());
        let mut sum = Element::zero();
        for w in a.biweights() {
            sum = sum.add(&a.weight_component(w));
        }
        assert_eq!(sum, a);
        // θξ has biweight (1,1), so it lies in W_0
        let tx = th.mul(&xi);
        assert_eq!(tx.wk_component(0), tx);
        assert!(tx.wk_component(1).is_zero());
    }
}
