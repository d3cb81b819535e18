//! The degree -2 Poisson bracket on S(E[-1] ⊕ E*[-1]), the canonical
//! differential element d̂, Maurer-Cartan machinery, twisting and gauge
//! transformations.

use num_traits::{One, Zero};

use crate::complex::{Complex, GradedMap};
use crate::error::{input_err, violation, Result};
use crate::matrix::Rat;
use crate::symalg::{pairing, rat_int, Element, Generator, Monomial, Side};

/// The shifted Lie algebra O with its chosen differential element.
///
/// `d_hat` encodes the differential of the complex in biweight (1,1); a twist
/// (a Maurer-Cartan element added to `d_hat`) is tracked separately.
#[derive(Clone, Debug)]
pub struct ShiftedLieContext {
    pub complex: Complex,
    pub d_hat: Element,
    pub twist: Element,
}

impl ShiftedLieContext {
    /// Build the context for a valid complex. `d_hat` is constructed by
    /// solving `{d̂, ξ^e} = embed(d e)` for every basis generator `e`; its
    /// action on θ-generators is then a consequence, not an input.
    pub fn new(complex: &Complex) -> Result<Self> {
        complex.validate()?;
        let mut d_hat = Element::zero();
        for &deg in &complex.degrees() {
            let block = complex.d_block(deg);
            if block.rows == 0 || block.cols == 0 {
                continue;
            }
            for c in 0..block.cols {
                for r in 0..block.rows {
                    let coeff = block[(r, c)].clone();
                    if coeff.is_zero() {
                        continue;
                    }
                    let theta = Generator::theta(complex.generator_name(deg, c), deg);
                    let xi_out = Generator::xi(complex.generator_name(deg + 1, r), deg + 1);
                    let term = Element::from_word(vec![theta, xi_out.clone()], Rat::one());
                    // solve {term, ξ^src} = s · ξ^tgt for the scalar s
                    let src = Element::from_generator(Generator::xi(
                        complex.generator_name(deg, c),
                        deg,
                    ));
                    let br = big_bracket(&term, &src);
                    let s = br.coefficient(&Monomial(vec![xi_out]));
                    if s.is_zero() {
                        return violation("degenerate defining equation for d̂".to_string());
                    }
                    d_hat = d_hat.add(&term.scale(&(coeff / s)));
                }
            }
        }
        let ctx = ShiftedLieContext { complex: complex.clone(), d_hat, twist: Element::zero() };
        let sq = big_bracket(&ctx.differential_element(), &ctx.differential_element());
        if !sq.is_zero() {
            return violation("{d̂, d̂} != 0".to_string());
        }
        Ok(ctx)
    }

    /// The full differential element d̂ + twist.
    pub fn differential_element(&self) -> Element {
        self.d_hat.add(&self.twist)
    }

    /// The induced differential {d̂ + twist, -}.
    pub fn differential(&self, a: &Element) -> Element {
        big_bracket(&self.differential_element(), a)
    }

    /// dν + ½{ν,ν}; ν is Maurer-Cartan iff this vanishes.
    pub fn mc_residual(&self, nu: &Element) -> Result<Element> {
        if !nu.is_homogeneous_of_degree(3) {
            return input_err(format!(
                "Maurer-Cartan candidates must be homogeneous of degree 3, got degrees {:?}",
                nu.terms.keys().map(|m| m.degree()).collect::<Vec<_>>()
            ));
        }
        let half = Rat::one() / rat_int(2);
        Ok(self.differential(nu).add(&big_bracket(nu, nu).scale(&half)))
    }

    pub fn is_mc(&self, nu: &Element) -> Result<bool> {
        Ok(self.mc_residual(nu)?.is_zero())
    }

    /// Twist by a Maurer-Cartan element: the differential becomes
    /// d̂ + twist + μ.
    pub fn twist_by(&self, mu: &Element) -> Result<ShiftedLieContext> {
        if !self.is_mc(mu)? {
            return violation("twist element is not Maurer-Cartan".to_string());
        }
        Ok(ShiftedLieContext {
            complex: self.complex.clone(),
            d_hat: self.d_hat.clone(),
            twist: self.twist.add(mu),
        })
    }

    pub fn embed_xi(&self, name: &str) -> Result<Element> {
        crate::symalg::embed_generator(&self.complex, Side::E, name)
    }

    pub fn embed_theta(&self, name: &str) -> Result<Element> {
        crate::symalg::embed_generator(&self.complex, Side::EDual, name)
    }
}

/// The big bracket, defined through the coproduct diagram: pair one factor of
/// `a` against one factor of `b`, multiply the rest, sum with Koszul signs.
pub fn big_bracket(a: &Element, b: &Element) -> Element {
    bracket_with(a, b, &pairing)
}

/// The wavy-edge bracket: the pairing is composed with g∘f.
pub fn twisted_bracket(a: &Element, b: &Element, gf: &GradedMap) -> Element {
    bracket_with(a, b, &|x: &Generator, y: &Generator| twisted_pairing(x, y, gf))
}

/// ⟨α, (g∘f)(β)⟩ on generators, with g∘f acting as the given matrix on
/// ξ-generators and as its plain dual on θ-generators.
pub fn twisted_pairing(alpha: &Generator, beta: &Generator, gf: &GradedMap) -> Rat {
    let image = apply_degree0(gf, beta);
    image
        .terms
        .iter()
        .map(|(m, c)| {
            debug_assert_eq!(m.len(), 1);
            pairing(alpha, &m.0[0]) * c
        })
        .fold(Rat::zero(), |acc, x| acc + x)
}

/// Apply a degree-0 chain map to a single generator: its matrix on the
/// ξ-side, its transpose on the θ-side.
pub fn apply_degree0(map: &GradedMap, g: &Generator) -> Element {
    assert_eq!(map.shift, 0, "apply_degree0 expects a shift-0 map");
    let mut out = Element::zero();
    match g.side {
        Side::E => {
            let Some((deg, idx)) = map.source.find_generator(&g.name) else {
                return out;
            };
            debug_assert_eq!(deg, g.base_degree);
            let block = map.block(deg);
            for r in 0..block.rows {
                out.add_term(
                    Monomial(vec![Generator::xi(map.target.generator_name(deg, r), deg)]),
                    block[(r, idx)].clone(),
                );
            }
        }
        Side::EDual => {
            // θ_b ∘ map: row b of the block
            let Some((deg, idx)) = map.target.find_generator(&g.name) else {
                return out;
            };
            debug_assert_eq!(deg, g.base_degree);
            let block = map.block(deg);
            for c in 0..block.cols {
                out.add_term(
                    Monomial(vec![Generator::theta(map.source.generator_name(deg, c), deg)]),
                    block[(idx, c)].clone(),
                );
            }
        }
    }
    out
}

/// Apply a shift -1 homotopy to a single generator. On the ξ-side it is the
/// homotopy matrix; on the θ-side the dual transpose carries the per-degree
/// sign (-1)^d (block `(E_{d-1})* -> (E_d)*`) that makes the generator-level
/// homotopy identity hold against the bracket-induced differential.
pub fn apply_homotopy(h: &GradedMap, g: &Generator) -> Element {
    assert_eq!(h.shift, -1, "apply_homotopy expects a shift -1 map");
    let mut out = Element::zero();
    match g.side {
        Side::E => {
            let Some((deg, idx)) = h.source.find_generator(&g.name) else {
                return out;
            };
            let block = h.block(deg);
            // the alternating sign makes Ĥ satisfy the commutator-form
            // homotopy identity ⟨Dα,Ĥβ⟩ + (-1)^{|α|}⟨α,ĤDβ⟩ = ⟨α,(id-ĝf)β⟩
            let sign = if deg.rem_euclid(2) == 0 { Rat::one() } else { -Rat::one() };
            for r in 0..block.rows {
                out.add_term(
                    Monomial(vec![Generator::xi(h.target.generator_name(deg - 1, r), deg - 1)]),
                    &block[(r, idx)] * &sign,
                );
            }
        }
        Side::EDual => {
            let Some((deg, idx)) = h.target.find_generator(&g.name) else {
                return out;
            };
            // θ_r dual to E_{deg}; the relevant block is H: E_{deg+1} -> E_{deg}
            let block = h.block(deg + 1);
            let sign = -Rat::one();
            for c in 0..block.cols {
                out.add_term(
                    Monomial(vec![Generator::theta(
                        h.source.generator_name(deg + 1, c),
                        deg + 1,
                    )]),
                    &block[(idx, c)] * &sign,
                );
            }
        }
    }
    out
}

fn bracket_with(a: &Element, b: &Element, pair: &dyn Fn(&Generator, &Generator) -> Rat) -> Element {
    let mut out = Element::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            bracket_monomials(ma, mb, &(ca * cb), pair, &mut out);
        }
    }
    out
}

fn bracket_monomials(
    a: &Monomial,
    b: &Monomial,
    coeff: &Rat,
    pair: &dyn Fn(&Generator, &Generator) -> Rat,
    out: &mut Element,
) {
    for i in 0..a.len() {
        // Koszul sign of moving a_i to the right end of a
        let tail_odd = a.0[i + 1..].iter().filter(|g| g.is_odd()).count();
        let s1 = if a.0[i].is_odd() && tail_odd % 2 == 1 { -1i64 } else { 1 };
        for j in 0..b.len() {
            let p = pair(&a.0[i], &b.0[j]);
            if p.is_zero() {
                continue;
            }
            // Koszul sign of moving b_j to the front of b
            let head_odd = b.0[..j].iter().filter(|g| g.is_odd()).count();
            let s2 = if b.0[j].is_odd() && head_odd % 2 == 1 { -1 } else { 1 };
            let mut gens: Vec<Generator> = Vec::with_capacity(a.len() + b.len() - 2);
            gens.extend(a.0.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, g)| g.clone()));
            gens.extend(b.0.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, g)| g.clone()));
            out.add_word(gens, coeff * p * rat_int(s1 * s2));
        }
    }
}

/// A polynomial in one formal variable t with Element coefficients, stored by
/// ascending power.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TPoly(pub Vec<Element>);

impl TPoly {
    pub fn constant(e: Element) -> Self {
        TPoly(vec![e])
    }

    pub fn coeff(&self, k: usize) -> Element {
        self.0.get(k).cloned().unwrap_or_else(Element::zero)
    }

    pub fn degree_bound(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let n = self.0.len().max(other.0.len());
        TPoly((0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect())
    }

    pub fn scale(&self, c: &Rat) -> TPoly {
        TPoly(self.0.iter().map(|e| e.scale(c)).collect())
    }

    /// d/dt.
    pub fn derivative(&self) -> TPoly {
        TPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, e)| e.scale(&rat_int(k as i64)))
                .collect(),
        )
    }

    pub fn bracket(&self, other: &TPoly) -> TPoly {
        let n = self.0.len() + other.0.len();
        let mut out = vec![Element::zero(); n.saturating_sub(1).max(1)];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&big_bracket(a, b));
            }
        }
        TPoly(out)
    }

    pub fn map(&self, f: impl Fn(&Element) -> Element) -> TPoly {
        TPoly(self.0.iter().map(f).collect())
    }
}

const GAUGE_SERIES_CAP: usize = 1024;

/// Gauge-transform a Maurer-Cartan element by the degree-2 generator h:
/// e^{-ad_h} ν - ((1 - e^{-ad_h})/ad_h)(dh), evaluated as a finite sum.
///
/// h must have all left weights ≥ 2 so that ad_h strictly raises left weight
/// and the series terminates.
pub fn gauge_exp(ctx: &ShiftedLieContext, h: &Element, nu: &Element) -> Result<Element> {
    check_gauge_generator(h)?;
    if !ctx.is_mc(nu)? {
        return violation("gauge_exp input is not Maurer-Cartan".to_string());
    }
    let dh = ctx.differential(h);
    let mut out = Element::zero();
    let mut ad_nu = nu.clone(); // ad_h^k ν
    let mut ad_dh = dh; // ad_h^k dh
    let mut factorial = Rat::one();
    for k in 0..GAUGE_SERIES_CAP {
        if ad_nu.is_zero() && ad_dh.is_zero() {
            return Ok(out);
        }
        // 1/k! on the ν series, -1/(k+1)! on the dh series: the t=1 value of
        // the flow ṁ = {h, m} - dh, the Maurer-Cartan preserving form of the
        // gauge equation (note {h, m} = -{m, h} for h of even degree)
        out = out.add(&ad_nu.scale(&(Rat::one() / &factorial)));
        let next_fact = &factorial * rat_int(k as i64 + 1);
        out = out.add(&ad_dh.scale(&(-Rat::one() / &next_fact)));
        ad_nu = big_bracket(h, &ad_nu);
        ad_dh = big_bracket(h, &ad_dh);
        factorial = next_fact;
    }
    violation("gauge series did not terminate within the iteration cap".to_string())
}

fn check_gauge_generator(h: &Element) -> Result<()> {
    if !h.is_homogeneous_of_degree(2) {
        return input_err("gauge generator must be homogeneous of degree 2".to_string());
    }
    if let Some(w) = h.biweights().iter().find(|w| w.0 < 2) {
        return input_err(format!(
            "gauge generator has a term of left weight {} < 2; the series may not terminate",
            w.0
        ));
    }
    Ok(())
}

/// The polynomial gauge path m(t) generated by t·h from ν, together with the
/// constant homotopy h(t) = h. The pair passes `gauge_path_check`.
pub fn gauge_path(ctx: &ShiftedLieContext, h: &Element, nu: &Element) -> Result<(TPoly, TPoly)> {
    check_gauge_generator(h)?;
    if !ctx.is_mc(nu)? {
        return violation("gauge_path input is not Maurer-Cartan".to_string());
    }
    let dh = ctx.differential(h);
    let mut coeffs = Vec::new();
    let mut ad_nu = nu.clone();
    let mut ad_dh = dh;
    let mut factorial = Rat::one();
    for k in 0..GAUGE_SERIES_CAP {
        if ad_nu.is_zero() && ad_dh.is_zero() {
            return Ok((TPoly(coeffs), TPoly::constant(h.clone())));
        }
        // t^k coefficient from e^{t ad_h} ν
        let mut ck = ad_nu.scale(&(Rat::one() / &factorial));
        // t^{k+1} coefficient from the dh series lands one slot later
        let next_fact = &factorial * rat_int(k as i64 + 1);
        let dk = ad_dh.scale(&(-Rat::one() / &next_fact));
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Element::zero());
        }
        ck = ck.add(&std::mem::take(&mut coeffs[k]));
        coeffs[k] = ck;
        coeffs.push(dk);
        ad_nu = big_bracket(h, &ad_nu);
        ad_dh = big_bracket(h, &ad_dh);
        factorial = next_fact;
    }
    violation("gauge series did not terminate within the iteration cap".to_string())
}

/// Verify the two polynomial identities of a gauge path:
/// d m_t + ½{m_t, m_t} = 0 and ṁ_t + d h_t + {m_t, h_t} = 0.
pub fn gauge_path_check(ctx: &ShiftedLieContext, m: &TPoly, h: &TPoly) -> Result<()> {
    let half = Rat::one() / rat_int(2);
    let mc = m.map(|e| ctx.differential(e)).add(&m.bracket(m).scale(&half));
    if !mc.is_zero() {
        return violation("path is not Maurer-Cartan at every t".to_string());
    }
    // the commutator term is {m_t, h_t}: with this order the flow preserves
    // the Maurer-Cartan equation (h is even, so {h,m} = -{m,h})
    let flow = m
        .derivative()
        .add(&h.map(|e| ctx.differential(e)))
        .add(&m.bracket(h));
    if !flow.is_zero() {
        return violation("path does not satisfy the gauge flow equation".to_string());
    }
    Ok(())
}

/// Check that π is a shifted Poisson structure for the (twisted) context:
/// degree 3, biweight (*, ≥ 2), Maurer-Cartan in the twisted algebra.
pub fn shifted_poisson_check(ctx: &ShiftedLieContext, pi: &Element) -> Result<Element> {
    if let Some(w) = pi.biweights().iter().find(|w| w.1 < 2) {
        return input_err(format!(
            "shifted Poisson candidates must have biweight (*, >= 2); found {:?}",
            w
        ));
    }
    ctx.mc_residual(pi)
}
