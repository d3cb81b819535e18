//! JSON wire format: rationals as "p/q" strings, matrices row-major, degrees
//! as integers, canonical (sorted) ordering everywhere so that fixed inputs
//! produce byte-identical output.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, GradedMap, HomotopyEquivalence};
use crate::error::{input_err, Result};
use crate::matrix::{Matrix, Rat};
use crate::symalg::{Element, Generator, Side};
use crate::transfer::LinftyStructure;

pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_from_string(s: &str) -> Result<Rat> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num.trim())
        .map_err(|_| crate::error::Error::Input(format!("bad rational numerator: {s:?}")))?;
    let d = BigInt::from_str(den.trim())
        .map_err(|_| crate::error::Error::Input(format!("bad rational denominator: {s:?}")))?;
    if d == BigInt::from(0) {
        return input_err(format!("zero denominator: {s:?}"));
    }
    Ok(Rat::new(n, d))
}

fn matrix_to_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| rat_to_string(&m[(r, c)])).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<String>], want_rows: usize, want_cols: usize) -> Result<Matrix> {
    if rows.len() != want_rows || rows.iter().any(|r| r.len() != want_cols) {
        return input_err(format!(
            "matrix shape mismatch: got {}x{:?}, want {}x{}",
            rows.len(),
            rows.first().map(|r| r.len()).unwrap_or(0),
            want_rows,
            want_cols
        ));
    }
    let mut m = Matrix::zeros(want_rows, want_cols);
    for (r, row) in rows.iter().enumerate() {
        for (c, s) in row.iter().enumerate() {
            m[(r, c)] = rat_from_string(s)?;
        }
    }
    Ok(m)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DegreeBlock {
    pub degree: i64,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DegreeBasis {
    pub degree: i64,
    pub names: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ComplexJson {
    pub basis: Vec<DegreeBasis>,
    /// Differential blocks E_k -> E_{k+1}, keyed by source degree k.
    pub d: Vec<DegreeBlock>,
}

impl ComplexJson {
    pub fn from_complex(c: &Complex) -> Self {
        let basis = c
            .basis
            .iter()
            .map(|(&degree, names)| DegreeBasis { degree, names: names.clone() })
            .collect();
        let d = c
            .basis
            .keys()
            .filter_map(|&deg| {
                let b = c.d_block(deg);
                if b.rows == 0 || b.cols == 0 || b.is_zero() {
                    None
                } else {
                    Some(DegreeBlock { degree: deg, matrix: matrix_to_rows(&b) })
                }
            })
            .collect();
        ComplexJson { basis, d }
    }

    pub fn to_complex(&self) -> Result<Complex> {
        let mut basis = BTreeMap::new();
        for db in &self.basis {
            if db.names.is_empty() {
                continue;
            }
            if basis.insert(db.degree, db.names.clone()).is_some() {
                return input_err(format!("duplicate basis degree {}", db.degree));
            }
        }
        let mut c = Complex { basis, d: BTreeMap::new() };
        for blk in &self.d {
            let rows = c.dim(blk.degree + 1);
            let cols = c.dim(blk.degree);
            c.set_d_block(blk.degree, matrix_from_rows(&blk.matrix, rows, cols)?);
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct GradedMapJson {
    pub shift: i64,
    /// Blocks source_k -> target_{k+shift}, keyed by source degree k.
    pub blocks: Vec<DegreeBlock>,
}

impl GradedMapJson {
    pub fn from_map(m: &GradedMap) -> Self {
        let blocks = m
            .source
            .basis
            .keys()
            .filter_map(|&deg| {
                let b = m.block(deg);
                if b.rows == 0 || b.cols == 0 || b.is_zero() {
                    None
                } else {
                    Some(DegreeBlock { degree: deg, matrix: matrix_to_rows(&b) })
                }
            })
            .collect();
        GradedMapJson { shift: m.shift, blocks }
    }

    pub fn to_map(&self, source: &Complex, target: &Complex) -> Result<GradedMap> {
        let mut m = GradedMap::zero(source, target, self.shift);
        for blk in &self.blocks {
            let rows = target.dim(blk.degree + self.shift);
            let cols = source.dim(blk.degree);
            m.set_block(blk.degree, matrix_from_rows(&blk.matrix, rows, cols)?);
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct EquivalenceJson {
    pub e: ComplexJson,
    pub f_cx: ComplexJson,
    /// Chain map E -> F.
    pub f: GradedMapJson,
    /// Chain map F -> E.
    pub g: GradedMapJson,
    /// Homotopy on E with id - g∘f = H d + d H.
    pub h_e: GradedMapJson,
    /// Homotopy on F with id - f∘g = H d + d H.
    pub h_f: GradedMapJson,
}

impl EquivalenceJson {
    pub fn from_equivalence(eq: &HomotopyEquivalence) -> Self {
        EquivalenceJson {
            e: ComplexJson::from_complex(&eq.e),
            f_cx: ComplexJson::from_complex(&eq.f_cx),
            f: GradedMapJson::from_map(&eq.f),
            g: GradedMapJson::from_map(&eq.g),
            h_e: GradedMapJson::from_map(&eq.h_e),
            h_f: GradedMapJson::from_map(&eq.h_f),
        }
    }

    pub fn to_equivalence(&self) -> Result<HomotopyEquivalence> {
        let e = self.e.to_complex()?;
        let f_cx = self.f_cx.to_complex()?;
        if self.f.shift != 0 || self.g.shift != 0 {
            return input_err("chain maps must have shift 0");
        }
        if self.h_e.shift != -1 || self.h_f.shift != -1 {
            return input_err("homotopies must have shift -1");
        }
        Ok(HomotopyEquivalence {
            f: self.f.to_map(&e, &f_cx)?,
            g: self.g.to_map(&f_cx, &e)?,
            h_e: self.h_e.to_map(&e, &e)?,
            h_f: self.h_f.to_map(&f_cx, &f_cx)?,
            e,
            f_cx,
        })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct GeneratorJson {
    /// "xi" for E-side generators, "theta" for E*-side generators.
    pub kind: String,
    pub name: String,
    pub degree: i64,
}

impl GeneratorJson {
    pub fn from_generator(g: &Generator) -> Self {
        GeneratorJson {
            kind: match g.side {
                Side::E => "xi".to_string(),
                Side::EDual => "theta".to_string(),
            },
            name: g.name.clone(),
            degree: g.base_degree,
        }
    }

    pub fn to_generator(&self) -> Result<Generator> {
        match self.kind.as_str() {
            "xi" => Ok(Generator::xi(&self.name, self.degree)),
            "theta" => Ok(Generator::theta(&self.name, self.degree)),
            other => input_err(format!("unknown generator kind {other:?}")),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TermJson {
    pub coefficient: String,
    pub monomial: Vec<GeneratorJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ElementJson {
    pub terms: Vec<TermJson>,
}

impl ElementJson {
    pub fn from_element(e: &Element) -> Self {
        let terms = e
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                coefficient: rat_to_string(c),
                monomial: m.0.iter().map(GeneratorJson::from_generator).collect(),
            })
            .collect();
        ElementJson { terms }
    }

    pub fn to_element(&self) -> Result<Element> {
        let mut out = Element::zero();
        for t in &self.terms {
            let gens: Vec<Generator> =
                t.monomial.iter().map(|g| g.to_generator()).collect::<Result<_>>()?;
            let coeff = rat_from_string(&t.coefficient)?;
            out = out.add(&Element::from_word(gens, coeff));
        }
        Ok(out)
    }
}

/// Polynomial in t with Element coefficients, listed by ascending power of t.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PolyElementJson {
    pub coefficients: Vec<ElementJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct BracketJson {
    pub inputs: Vec<String>,
    pub output: String,
    pub coefficient: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StructureJson {
    pub complex: ComplexJson,
    pub brackets: Vec<BracketJson>,
}

impl StructureJson {
    pub fn from_structure(s: &LinftyStructure) -> Self {
        let mut brackets = Vec::new();
        for map in s.brackets.values() {
            for ((ins, out), c) in map {
                brackets.push(BracketJson {
                    inputs: ins.clone(),
                    output: out.clone(),
                    coefficient: rat_to_string(c),
                });
            }
        }
        StructureJson { complex: ComplexJson::from_complex(&s.complex), brackets }
    }

    pub fn to_structure(&self) -> Result<LinftyStructure> {
        let c = self.complex.to_complex()?;
        let mut s = LinftyStructure::new(&c)?;
        for b in &self.brackets {
            let refs: Vec<&str> = b.inputs.iter().map(|n| n.as_str()).collect();
            s.add_bracket(&refs, &b.output, rat_from_string(&b.coefficient)?)?;
        }
        Ok(s)
    }
}

pub fn element_is_one_over(r: &Rat) -> bool {
    r.is_one()
}
