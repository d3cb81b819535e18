//! Mapping cylinder and deformation retract onto cohomology.
//!
//! Both constructions produce `HomotopyEquivalence` values whose homotopies
//! are found by exact linear algebra: the needed null-homotopy is solved as a
//! linear system over the rationals, degree block by degree block.

use num_traits::{One, Zero};

use crate::complex::{Complex, GradedMap, HomotopyEquivalence};
use crate::error::{violation, Result};
use crate::matrix::{Matrix, Rat};

/// Solve H d + d H = rhs for a shift -1 map H, restricting the unknown
/// entries of each block to those allowed by `support(degree, row, col)`.
/// Returns a violation when no solution exists (rhs not null-homotopic).
fn solve_homotopy(
    c: &Complex,
    rhs: &GradedMap,
    support: &dyn Fn(i64, usize, usize) -> bool,
) -> Result<GradedMap> {
    // unknown slots (deg, row, col) for blocks C_deg -> C_{deg-1}
    let mut slots: Vec<(i64, usize, usize)> = Vec::new();
    for &deg in c.basis.keys() {
        let (rows, cols) = (c.dim(deg - 1), c.dim(deg));
        for r in 0..rows {
            for col in 0..cols {
                if support(deg, r, col) {
                    slots.push((deg, r, col));
                }
            }
        }
    }
    let degs: Vec<i64> = c.degrees();
    let vec_of = |m: &GradedMap| -> Vec<Rat> {
        let mut v = Vec::new();
        for &deg in &degs {
            let b = m.block(deg);
            v.extend(b.data.iter().cloned());
        }
        v
    };
    let d = GradedMap::differential(c);
    let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(slots.len());
    for &(deg, r, col) in &slots {
        let mut h = GradedMap::zero(c, c, -1);
        let mut blk = Matrix::zeros(c.dim(deg - 1), c.dim(deg));
        blk[(r, col)] = Rat::one();
        h.set_block(deg, blk);
        let image = d.compose(&h).add(&h.compose(&d));
        cols.push(vec_of(&image));
    }
    let b = vec_of(rhs);
    let a = Matrix::from_cols(&cols, b.len());
    let Some(x) = a.solve(&b) else {
        return violation("no null-homotopy exists for the requested map");
    };
    let mut h = GradedMap::zero(c, c, -1);
    for (&(deg, r, col), xi) in slots.iter().zip(&x) {
        if xi.is_zero() {
            continue;
        }
        let mut blk = h.block(deg);
        blk[(r, col)] = xi.clone();
        h.set_block(deg, blk);
    }
    Ok(h)
}

/// The mapping cylinder C = E ⊕ E[1] ⊕ F with differential
/// d(e, e', y) = (de - e', -de', dy + f e'), together with homotopy
/// equivalences E ≃ C and C ≃ F satisfying p ∘ i = id on both sides.
///
/// i_F(y) = (0,0,y), p_F(e,e',y) = f(e) + y, H_2(e,e',y) = (0,-e,0);
/// i_E(e) = (e,0,0), p_E(e,e',y) = e - H_E(e') + g(y), and H_1 has middle
/// component g(y) - H_E(e') with the remaining entries obtained by an exact
/// linear solve of the homotopy identity.
pub fn mapping_cylinder(
    eq: &HomotopyEquivalence,
) -> Result<(Complex, HomotopyEquivalence, HomotopyEquivalence)> {
    eq.check()?;
    let (e, f_cx) = (&eq.e, &eq.f_cx);
    // basis per degree: [E_k, E_{k+1} (shifted copy), F_k]
    let mut degs: std::collections::BTreeSet<i64> = e.degrees().into_iter().collect();
    degs.extend(e.degrees().iter().map(|d| d - 1));
    degs.extend(f_cx.degrees());
    let mut c = Complex::zero();
    for &k in &degs {
        let mut names: Vec<String> = Vec::new();
        names.extend(e.basis.get(&k).into_iter().flatten().map(|n| format!("E.{}", n)));
        names.extend(e.basis.get(&(k + 1)).into_iter().flatten().map(|n| format!("S.{}", n)));
        names.extend(f_cx.basis.get(&k).into_iter().flatten().map(|n| format!("F.{}", n)));
        if !names.is_empty() {
            c.basis.insert(k, names);
        }
    }
    let dim3 = |k: i64| (e.dim(k), e.dim(k + 1), f_cx.dim(k));
    for &k in &degs {
        let (ae, ase, af) = dim3(k);
        let (be, bse, bf) = dim3(k + 1);
        let (rows, cols) = (be + bse + bf, ae + ase + af);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = Matrix::zeros(rows, cols);
        let de = e.d_block(k);
        for r in 0..be {
            for col in 0..ae {
                m[(r, col)] = de[(r, col)].clone();
            }
            // -e' lands in E_{k+1}: the shifted copy at degree k IS E_{k+1}
            if r < ase {
                m[(r, ae + r)] = -Rat::one();
            }
        }
        let dse = e.d_block(k + 1);
        for r in 0..bse {
            for col in 0..ase {
                m[(be + r, ae + col)] = -dse[(r, col)].clone();
            }
        }
        let df = f_cx.d_block(k);
        let fb = eq.f.block(k + 1);
        for r in 0..bf {
            for col in 0..af {
                m[(be + bse + r, ae + ase + col)] = df[(r, col)].clone();
            }
            for col in 0..ase {
                m[(be + bse + r, ae + col)] = fb[(r, col)].clone();
            }
        }
        c.set_d_block(k, m);
    }
    c.validate()?;

    let mut i_e = GradedMap::zero(e, &c, 0);
    let mut p_e = GradedMap::zero(&c, e, 0);
    let mut i_f = GradedMap::zero(f_cx, &c, 0);
    let mut p_f = GradedMap::zero(&c, f_cx, 0);
    let mut h2 = GradedMap::zero(&c, &c, -1);
    let mut h1_known = GradedMap::zero(&c, &c, -1);
    for &k in &degs {
        let (ae, ase, af) = dim3(k);
        let cols = ae + ase + af;
        if cols == 0 {
            continue;
        }
        if ae > 0 {
            let mut m = Matrix::zeros(cols, ae);
            for r in 0..ae {
                m[(r, r)] = Rat::one();
            }
            i_e.set_block(k, m);
        }
        {
            let mut m = Matrix::zeros(ae, cols);
            let he = eq.h_e.block(k + 1);
            let gb = eq.g.block(k);
            for r in 0..ae {
                m[(r, r)] = Rat::one();
                for col in 0..ase {
                    m[(r, ae + col)] = -he[(r, col)].clone();
                }
                for col in 0..af {
                    m[(r, ae + ase + col)] = gb[(r, col)].clone();
                }
            }
            if ae > 0 {
                p_e.set_block(k, m);
            }
        }
        if af > 0 {
            let mut m = Matrix::zeros(cols, af);
            for r in 0..af {
                m[(ae + ase + r, r)] = Rat::one();
            }
            i_f.set_block(k, m);
        }
        {
            let mut m = Matrix::zeros(af, cols);
            let fb = eq.f.block(k);
            for r in 0..af {
                for col in 0..ae {
                    m[(r, col)] = fb[(r, col)].clone();
                }
                m[(r, ae + ase + r)] = Rat::one();
            }
            if af > 0 {
                p_f.set_block(k, m);
            }
        }
        // H_2(e, e', y) = (0, -e, 0): E_k -> shifted copy inside C_{k-1}
        let (pe, pse, _pf) = dim3(k - 1);
        let prev_cols = pe + pse + f_cx.dim(k - 1);
        if prev_cols > 0 && cols > 0 && ae > 0 && pse == ae {
            let mut m = Matrix::zeros(prev_cols, cols);
            for r in 0..ae {
                m[(pe + r, r)] = -Rat::one();
            }
            h2.set_block(k, m);
        }
        // known middle component of H_1: (0, g(y) - H_E(e'), 0)
        if prev_cols > 0 && pse > 0 {
            let mut m = Matrix::zeros(prev_cols, cols);
            let he = eq.h_e.block(k + 1);
            let gb = eq.g.block(k);
            for r in 0..pse {
                for col in 0..ase {
                    m[(pe + r, ae + col)] = -he[(r, col)].clone();
                }
                for col in 0..af {
                    m[(pe + r, ae + ase + col)] = gb[(r, col)].clone();
                }
            }
            if !m.is_zero() {
                h1_known.set_block(k, m);
            }
        }
    }
    let d = GradedMap::differential(&c);
    let idc = GradedMap::identity(&c);
    // H_1: seed with the closed-form middle component, solve the rest with
    // unknowns restricted to the F-target/shifted-source corner
    let rhs = idc
        .sub(&i_e.compose(&p_e))
        .sub(&d.compose(&h1_known).add(&h1_known.compose(&d)));
    let corner = |k: i64, row: usize, col: usize| -> bool {
        let (ae, ase, _) = dim3(k);
        let (pe, pse, _) = dim3(k - 1);
        row >= pe + pse && col >= ae && col < ae + ase
    };
    let h1 = match solve_homotopy(&c, &rhs, &corner) {
        Ok(h) => h1_known.add(&h),
        Err(_) => h1_known.add(&solve_homotopy(&c, &rhs, &|_, _, _| true)?),
    };
    let rhs2 = idc.sub(&i_f.compose(&p_f)).sub(&d.compose(&h2).add(&h2.compose(&d)));
    if !rhs2.is_zero() {
        return violation("H_2 fails the cylinder homotopy identity");
    }
    let eq_ec = HomotopyEquivalence {
        e: e.clone(),
        f_cx: c.clone(),
        f: i_e,
        g: p_e,
        h_e: GradedMap::zero(e, e, -1),
        h_f: h1,
    };
    eq_ec.check()?;
    let eq_cf = HomotopyEquivalence {
        e: c.clone(),
        f_cx: f_cx.clone(),
        f: p_f,
        g: i_f,
        h_e: h2,
        h_f: GradedMap::zero(f_cx, f_cx, -1),
    };
    eq_cf.check()?;
    Ok((c, eq_ec, eq_cf))
}

/// Extend `base` (independent vectors) by members of `extra` that increase
/// the rank; returns the indices of the accepted vectors.
fn greedy_extend(base: &mut Vec<Vec<Rat>>, extra: &[Vec<Rat>], dim: usize) -> Vec<usize> {
    let mut accepted = Vec::new();
    for (i, v) in extra.iter().enumerate() {
        let before = Matrix::from_cols(base, dim).rank();
        base.push(v.clone());
        if Matrix::from_cols(base, dim).rank() == before + 1 {
            accepted.push(i);
        } else {
            base.pop();
        }
    }
    accepted
}

/// Deformation retract of a complex onto its cohomology (zero differential):
/// returns the equivalence (C, H(C), p, i, H, 0) with p ∘ i = id, built by
/// exact kernel/image decompositions and a linear solve for H.
pub fn retract_to_cohomology(c: &Complex) -> Result<HomotopyEquivalence> {
    c.validate()?;
    let degs = c.degrees();
    let mut h_cx = Complex::zero();
    let mut i_blocks: std::collections::BTreeMap<i64, Matrix> = Default::default();
    let mut p_blocks: std::collections::BTreeMap<i64, Matrix> = Default::default();
    for &k in &degs {
        let n = c.dim(k);
        let d_out = c.d_block(k);
        let d_in = c.d_block(k - 1);
        // image basis from the incoming differential
        let mut basis: Vec<Vec<Rat>> = Vec::new();
        let im_cols: Vec<Vec<Rat>> = (0..d_in.cols).map(|j| d_in.col(j)).collect();
        greedy_extend(&mut basis, &im_cols, n);
        let im_rank = basis.len();
        // representatives: kernel vectors independent of the image
        let ker = if d_out.rows == 0 {
            (0..n)
                .map(|i| {
                    let mut v = vec![Rat::zero(); n];
                    v[i] = Rat::one();
                    v
                })
                .collect()
        } else {
            d_out.kernel_basis()
        };
        greedy_extend(&mut basis, &ker, n);
        let h_dim = basis.len() - im_rank;
        // complete to a basis of C_k
        let std_basis: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut v = vec![Rat::zero(); n];
                v[i] = Rat::one();
                v
            })
            .collect();
        greedy_extend(&mut basis, &std_basis, n);
        let b = Matrix::from_cols(&basis, n);
        let binv = b.inverse().expect("basis change is invertible");
        if h_dim > 0 {
            h_cx.basis.insert(k, (0..h_dim).map(|i| format!("h{}_{}", k, i)).collect());
            let reps: Vec<Vec<Rat>> = basis[im_rank..im_rank + h_dim].to_vec();
            i_blocks.insert(k, Matrix::from_cols(&reps, n));
            let mut p = Matrix::zeros(h_dim, n);
            for r in 0..h_dim {
                for col in 0..n {
                    p[(r, col)] = binv[(im_rank + r, col)].clone();
                }
            }
            p_blocks.insert(k, p);
        }
    }
    h_cx.validate()?;
    let mut i_map = GradedMap::zero(&h_cx, c, 0);
    let mut p_map = GradedMap::zero(c, &h_cx, 0);
    for (&k, m) in &i_blocks {
        i_map.set_block(k, m.clone());
    }
    for (&k, m) in &p_blocks {
        p_map.set_block(k, m.clone());
    }
    let rhs = GradedMap::identity(c).sub(&i_map.compose(&p_map));
    let h = solve_homotopy(c, &rhs, &|_, _, _| true)?;
    let eq = HomotopyEquivalence {
        e: c.clone(),
        f_cx: h_cx.clone(),
        f: p_map,
        g: i_map,
        h_e: h,
        h_f: GradedMap::zero(&h_cx, &h_cx, -1),
    };
    eq.check()?;
    Ok(eq)
}
