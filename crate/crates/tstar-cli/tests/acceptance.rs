//! Acceptance gate: one test per criterion, each ending with a single
//! printed pass line (run with `--nocapture` to see them all).

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::{Command, Stdio};

use num_traits::{One, Zero};
use tstar::bracket::{gauge_exp, gauge_path, gauge_path_check, ShiftedLieContext};
use tstar::big_bracket;
use tstar::complex::{koszul_sign, GradedMap, HomotopyEquivalence};
use tstar::corpus::{
    dg_lie_instance, random_complex, random_element, random_equivalence, random_gauge_generator,
    random_mc_encoding, random_nonzero_word, seeded_rng,
};
use tstar::equiv::mapping_cylinder;
use tstar::json::{EquivalenceJson, StructureJson};
use tstar::oracle::{
    bracket_biderivation, direct_transfer_arity3, structure_equation_holds, tree_eval_exhaustive,
};
use tstar::symalg::{coproduct, rat_int, Element, Generator, Monomial};
use tstar::transfer::{
    ce_class, decode_structure, encode_structure, minimal_model, transfer_structure,
    verify_structure, verify_voronov, LinftyStructure,
};
use tstar::trees::{
    enumerate_trees, push_mc, tree_eval, u_n, verify_linfty_morphism, verify_prop21, EdgeMark,
    TransferMorphism, TreeOps,
};
use tstar::{Complex, Rat};

fn pass(n: usize, what: &str) {
    println!("criterion {:2}: PASS — {}", n, what);
}

fn psign(k: i64) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Coproduct of an element as an aggregated (left, right) -> coefficient map.
fn cop_map(a: &Element) -> BTreeMap<(Monomial, Monomial), Rat> {
    let mut out: BTreeMap<(Monomial, Monomial), Rat> = BTreeMap::new();
    for (l, r, c) in coproduct(a) {
        let e = out.entry((l, r)).or_insert_with(Rat::zero);
        *e += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn mono_elem(m: &Monomial) -> Element {
    Element::from_word(m.0.clone(), Rat::one())
}

#[test]
fn criterion_01_algebra_laws() {
    let mut rng = seeded_rng(101);
    let mut triples = 0usize;
    while triples < 200 {
        let c = random_complex(&mut rng, -2, 0, 3);
        for _ in 0..10 {
            let a = random_nonzero_word(&mut rng, &c, 3);
            let b = random_nonzero_word(&mut rng, &c, 3);
            let x = random_nonzero_word(&mut rng, &c, 3);
            let (da, db) = (a.degree().unwrap(), b.degree().unwrap());

            // graded commutativity and associativity of the product
            assert_eq!(a.mul(&b), b.mul(&a).scale(&rat_int(psign(da * db))));
            assert_eq!(a.mul(&b).mul(&x), a.mul(&b.mul(&x)));

            // coassociativity of Δ
            let mut lhs: BTreeMap<(Monomial, Monomial, Monomial), Rat> = BTreeMap::new();
            let mut rhs = lhs.clone();
            let e = random_element(&mut rng, &c, 3, 3);
            for ((l, r), cc) in cop_map(&e) {
                for ((l1, l2), c1) in cop_map(&mono_elem(&l)) {
                    let ent = lhs.entry((l1, l2, r.clone())).or_insert_with(Rat::zero);
                    *ent += cc.clone() * c1;
                }
                for ((r1, r2), c2) in cop_map(&mono_elem(&r)) {
                    let ent = rhs.entry((l.clone(), r1, r2)).or_insert_with(Rat::zero);
                    *ent += cc.clone() * c2;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            assert_eq!(lhs, rhs, "coassociativity");

            // bialgebra law: Δ(ab) = Δ(a)Δ(b) with the Koszul sign
            let mut conv: BTreeMap<(Monomial, Monomial), Rat> = BTreeMap::new();
            for ((a1, a2), ca) in cop_map(&a) {
                for ((b1, b2), cb) in cop_map(&b) {
                    let s = psign(a2.degree() * b1.degree());
                    let left = mono_elem(&a1).mul(&mono_elem(&b1));
                    let right = mono_elem(&a2).mul(&mono_elem(&b2));
                    for (lm, lc) in &left.terms {
                        for (rm, rc) in &right.terms {
                            let ent = conv
                                .entry((lm.clone(), rm.clone()))
                                .or_insert_with(Rat::zero);
                            *ent += ca.clone() * cb.clone() * lc * rc * rat_int(s);
                        }
                    }
                }
            }
            conv.retain(|_, v| !v.is_zero());
            assert_eq!(cop_map(&a.mul(&b)), conv, "bialgebra law");

            // bracket degree −2 and biweight (−1,−1)
            let br = big_bracket(&a, &b);
            if !br.is_zero() {
                assert!(br.is_homogeneous_of_degree(da + db - 2));
                let wa = a.biweights()[0];
                let wb = b.biweights()[0];
                for w in br.biweights() {
                    assert_eq!(w, (wa.0 + wb.0 - 1, wa.1 + wb.1 - 1));
                }
            }

            // graded antisymmetry {a,b} = −(−1)^{|a||b|}{b,a}
            assert_eq!(br, big_bracket(&b, &a).scale(&rat_int(-psign(da * db))));

            // Jacobi {a,{b,c}} = {{a,b},c} + (−1)^{|a||b|}{b,{a,c}}
            let jac = big_bracket(&a, &big_bracket(&b, &x))
                .sub(&big_bracket(&big_bracket(&a, &b), &x))
                .sub(&big_bracket(&b, &big_bracket(&a, &x)).scale(&rat_int(psign(da * db))));
            assert!(jac.is_zero(), "Jacobi");

            // Leibniz {a,bc} = {a,b}c + (−1)^{|a||b|} b{a,c}
            let leib = big_bracket(&a, &b.mul(&x))
                .sub(&big_bracket(&a, &b).mul(&x))
                .sub(&b.mul(&big_bracket(&a, &x)).scale(&rat_int(psign(da * db))));
            assert!(leib.is_zero(), "Leibniz");

            triples += 1;
        }
    }

    let mut pairs = 0usize;
    while pairs < 500 {
        let c = random_complex(&mut rng, -2, 0, 3);
        for _ in 0..25 {
            let a = random_element(&mut rng, &c, 3, 3);
            let b = random_element(&mut rng, &c, 3, 3);
            assert_eq!(big_bracket(&a, &b), bracket_biderivation(&a, &b));
            pairs += 1;
        }
    }
    pass(1, "algebra laws on 200 triples; big_bracket ≡ biderivation oracle on 500 pairs");
}

#[test]
fn criterion_02_differential_coherence() {
    let mut rng = seeded_rng(102);
    for _ in 0..50 {
        let c = random_complex(&mut rng, -2, 0, 3);
        c.validate().unwrap();
        let d = GradedMap::differential(&c);
        assert!(d.compose(&d).is_zero(), "d² = 0 on matrices");
        let ctx = ShiftedLieContext::new(&c).unwrap();
        let d_hat = ctx.differential_element();
        assert!(big_bracket(&d_hat, &d_hat).is_zero(), "{{d̂,d̂}} = 0");
        for _ in 0..3 {
            let x = random_element(&mut rng, &c, 3, 3);
            assert!(ctx.differential(&ctx.differential(&x)).is_zero());
        }
    }
    pass(2, "{d̂,d̂} = 0 and d² = 0 on 50 random complexes");
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n);
            out.push(q);
        }
    }
    out
}

#[test]
fn criterion_03_tree_calculus() {
    for n in 1..=7usize {
        let expect = if n <= 2 { 1 } else { (n as u64).pow(n as u32 - 2) };
        assert_eq!(enumerate_trees(n).unwrap().len() as u64, expect, "|Tree_{}|", n);
    }

    let mut rng = seeded_rng(103);
    for _ in 0..3 {
        let eq = random_equivalence(&mut rng, -2, 0, 3);
        let ops = TreeOps::from_equivalence(&eq);
        for n in 2..=4usize {
            let xs: Vec<Element> =
                (0..n).map(|_| random_nonzero_word(&mut rng, &eq.e, 2)).collect();
            let degs: Vec<i64> = xs.iter().map(|x| x.degree().unwrap()).collect();
            for t in enumerate_trees(n).unwrap() {
                assert_eq!(
                    tree_eval(&t, &ops, &xs).unwrap(),
                    tree_eval_exhaustive(&t, &ops, &xs).unwrap()
                );
                for e in 0..t.edges.len() {
                    for m in [EdgeMark::Dotted, EdgeMark::Wavy] {
                        let tm = t.clone().with_mark(e, m).unwrap();
                        assert_eq!(
                            tree_eval(&tm, &ops, &xs).unwrap(),
                            tree_eval_exhaustive(&tm, &ops, &xs).unwrap()
                        );
                    }
                }
                // S_n relabeling sign law
                for sigma in all_perms(n) {
                    let (t2, edge_sign) = t.relabel(&sigma);
                    let mut inv = vec![0usize; n];
                    for (v, &sv) in sigma.iter().enumerate() {
                        inv[sv - 1] = v;
                    }
                    let ys: Vec<Element> = inv.iter().map(|&i| xs[i].clone()).collect();
                    let block_sign = koszul_sign(&inv, &degs).unwrap();
                    assert_eq!(
                        tree_eval(&t2, &ops, &ys).unwrap(),
                        tree_eval(&t, &ops, &xs)
                            .unwrap()
                            .scale(&rat_int(edge_sign * block_sign)),
                        "tree {:?} sigma {:?}",
                        t,
                        sigma
                    );
                }
            }
        }
    }
    pass(3, "|Tree_n| = n^(n−2) for n ≤ 7; evaluator ≡ exhaustive oracle; S_n sign law (n ≤ 4)");
}

#[test]
fn criterion_04_structure_equation_and_morphism() {
    let mut rng = seeded_rng(104);
    for k in 0..20u64 {
        let eq = random_equivalence(&mut rng, -2, 0, 3);
        for n in 2..=4usize {
            verify_prop21(&eq, n, 4, 1000 + 7 * k + n as u64).unwrap();
        }
        let u = TransferMorphism::new(eq.clone()).unwrap();
        verify_linfty_morphism(&u, 3, 4, 2000 + k).unwrap();

        // U_n biweight (−n+1, −n+1), hence W_k preservation
        let ops = TreeOps::from_equivalence(&eq);
        for n in 2..=3usize {
            let xs: Vec<Element> =
                (0..n).map(|_| random_nonzero_word(&mut rng, &eq.e, 2)).collect();
            let out = u_n(&eq, &ops, &xs).unwrap();
            let mut want = (1 - n as i64, 1 - n as i64);
            for x in &xs {
                let w = x.biweights()[0];
                want = (want.0 + w.0, want.1 + w.1);
            }
            for w in out.biweights() {
                assert_eq!(w, want, "U_{} biweight", n);
            }
        }
    }
    pass(4, "Prop 2.1 residual = 0 for n ∈ {2,3,4} on 20 equivalences; morphism law to arity 3; U_n biweight (−n+1,−n+1)");
}

#[test]
fn criterion_05_transfer_of_structures() {
    let mut rng = seeded_rng(105);
    let mut done = 0usize;
    while done < 10 {
        let eq = random_equivalence(&mut rng, -2, 0, 3);
        let nu = random_mc_encoding(&mut rng, &eq.e);
        if nu.is_zero() {
            continue;
        }
        done += 1;
        let src = ShiftedLieContext::new(&eq.e).unwrap();
        assert!(src.is_mc(&nu).unwrap());
        let s = decode_structure(&eq.e, &nu).unwrap();
        verify_structure(&s).unwrap();

        let u = TransferMorphism::new(eq.clone()).unwrap();
        let pushed = push_mc(&u, &nu).unwrap();
        let tgt = ShiftedLieContext::new(&eq.f_cx).unwrap();
        assert!(tgt.is_mc(&pushed).unwrap(), "pushforward is exactly Maurer-Cartan");
        let out = decode_structure(&eq.f_cx, &pushed).unwrap();
        verify_structure(&out).unwrap();
        assert!(structure_equation_holds(&out, 3), "higher Jacobi on the pushforward");

        // identity (H = 0) equivalences act trivially
        let id = HomotopyEquivalence::identity(&eq.e);
        let uid = TransferMorphism::new(id.clone()).unwrap();
        assert_eq!(push_mc(&uid, &nu).unwrap(), nu);
        assert_eq!(transfer_structure(&id, &s).unwrap(), s);
    }
    pass(5, "10 pushforwards are exact MC; decoded structures verify; identity equivalences act trivially");
}

#[test]
fn criterion_06_mapping_cylinder() {
    let mut rng = seeded_rng(106);
    for _ in 0..20 {
        let eq = random_equivalence(&mut rng, -2, 0, 2);
        let (cyl, eq_ec, eq_cf) = mapping_cylinder(&eq).unwrap();
        cyl.validate().unwrap();
        eq_ec.check().unwrap();
        eq_cf.check().unwrap();
        // p ∘ i = id strictly on both retractions
        let pi_e = eq_ec.g.compose(&eq_ec.f);
        let id_e = GradedMap::identity(&eq.e);
        let pi_f = eq_cf.f.compose(&eq_cf.g);
        let id_f = GradedMap::identity(&eq.f_cx);
        for &deg in eq.e.basis.keys() {
            assert_eq!(pi_e.block(deg), id_e.block(deg));
        }
        for &deg in eq.f_cx.basis.keys() {
            assert_eq!(pi_f.block(deg), id_f.block(deg));
        }
    }
    pass(6, "cylinder formulas check as homotopy equivalences with p∘i = id, 20 instances");
}

fn arity_part(s: &LinftyStructure, k: usize) -> LinftyStructure {
    let mut out = LinftyStructure::new(&s.complex).unwrap();
    if let Some(m) = s.brackets.get(&k) {
        for ((ins, outn), c) in m {
            let refs: Vec<&str> = ins.iter().map(|n| n.as_str()).collect();
            out.add_bracket(&refs, outn, c.clone()).unwrap();
        }
    }
    out
}

#[test]
fn criterion_07_minimal_models_and_obstruction() {
    let mut rng = seeded_rng(107);
    let mut nonzero_l3 = 0usize;
    for v in 0..12 {
        let s = dg_lie_instance(&mut rng, v);
        let (min, eqr) = minimal_model(&s).unwrap();
        for &deg in min.complex.basis.keys() {
            assert!(min.complex.d_block(deg).is_zero(), "minimal model differential");
        }
        verify_structure(&min).unwrap();

        // arity-3 agreement with the direct two-step transfer, as CE classes
        let o3 = direct_transfer_arity3(&eqr, &s).unwrap();
        let l2 = arity_part(&min, 2);
        let l3 = arity_part(&min, 3);
        if !l3.is_zero() {
            nonzero_l3 += 1;
        }
        if l3.brackets != o3.brackets {
            let mut diff = l3.clone();
            for ((ins, outn), c) in o3.brackets.get(&3).cloned().unwrap_or_default() {
                let refs: Vec<&str> = ins.iter().map(|n| n.as_str()).collect();
                diff.add_bracket(&refs, &outn, -c).unwrap();
            }
            if !diff.is_zero() {
                assert!(ce_class(&l2, &diff).unwrap().vanishes, "variant {}", v);
            }
        }
    }
    assert!(nonzero_l3 >= 3, "need nonzero obstructions in the corpus");

    // ce_class on constructed coboundaries vanishes with a checked primitive
    let c = Complex::with_dims(&[(-1, 1), (0, 3)]);
    let mut l2 = LinftyStructure::new(&c).unwrap();
    l2.add_bracket(&["e0_0", "e0_1"], "e0_2", Rat::one()).unwrap();
    l2.add_bracket(&["e0_1", "e0_2"], "e0_0", Rat::one()).unwrap();
    l2.add_bracket(&["e0_2", "e0_0"], "e0_1", Rat::one()).unwrap();
    verify_structure(&l2).unwrap();
    let ctx = ShiftedLieContext::new(&c).unwrap();
    let nu2 = encode_structure(&l2).unwrap();
    // all degree-2 biweight-(2,1) words θθξ
    let mut gens: Vec<(Generator, Generator, Generator)> = Vec::new();
    let names: Vec<(i64, String)> = c
        .basis
        .iter()
        .flat_map(|(&d, ns)| ns.iter().map(move |n| (d, n.clone())))
        .collect();
    for (d1, n1) in &names {
        for (d2, n2) in &names {
            for (d3, n3) in &names {
                let (t1, t2, x3) = (
                    Generator::theta(n1.clone(), *d1),
                    Generator::theta(n2.clone(), *d2),
                    Generator::xi(n3.clone(), *d3),
                );
                if t1.degree() + t2.degree() + x3.degree() == 2 {
                    gens.push((t1, t2, x3));
                }
            }
        }
    }
    use rand::Rng;
    for trial in 0..5 {
        let mut mu = Element::zero();
        for (t1, t2, x3) in &gens {
            mu = mu.add(&Element::from_word(
                vec![t1.clone(), t2.clone(), x3.clone()],
                rat_int(rng.gen_range(-2..=2i64)),
            ));
        }
        let d3 = big_bracket(&ctx.d_hat.add(&nu2), &mu);
        let l3 = decode_structure(&c, &d3).unwrap();
        let report = ce_class(&l2, &l3).unwrap();
        assert!(report.vanishes, "coboundary trial {}", trial);
        let p = report.primitive.expect("primitive for a coboundary");
        assert_eq!(big_bracket(&ctx.d_hat.add(&nu2), &p), d3);
    }

    // with l2 = 0 the class vanishes iff l3 = 0
    let c2 = Complex::with_dims(&[(-2, 1), (-1, 1), (0, 2)]);
    let zero2 = LinftyStructure::new(&c2).unwrap();
    let mut l3 = LinftyStructure::new(&c2).unwrap();
    l3.add_bracket(&["e0_0", "e0_1", "e-1_0"], "e-2_0", Rat::one()).unwrap();
    assert!(!ce_class(&zero2, &l3).unwrap().vanishes);
    assert!(ce_class(&zero2, &LinftyStructure::new(&c2).unwrap()).unwrap().vanishes);

    pass(7, "minimal models strict with zero differential; CE obstruction behaves; arity-3 transfer agreement on 12 dg Lie instances");
}

#[test]
fn criterion_08_gauge_and_twisting() {
    let mut rng = seeded_rng(108);
    let mut done = 0usize;
    while done < 10 {
        let c = random_complex(&mut rng, -2, 0, 3);
        let ctx = ShiftedLieContext::new(&c).unwrap();
        let nu = random_mc_encoding(&mut rng, &c);
        let h = random_gauge_generator(&mut rng, &c);
        if h.is_zero() {
            continue;
        }
        done += 1;
        let m = gauge_exp(&ctx, &h, &nu).unwrap();
        assert!(ctx.is_mc(&m).unwrap(), "gauge_exp output is MC");
        let (mt, ht) = gauge_path(&ctx, &h, &nu).unwrap();
        gauge_path_check(&ctx, &mt, &ht).unwrap();

        // twist correspondence: residual of ν′ in g^μ equals residual of ν′+μ in g
        let mu = random_mc_encoding(&mut rng, &c);
        if !mu.is_zero() {
            let twisted = ctx.twist_by(&mu).unwrap();
            for _ in 0..3 {
                let w = random_mc_encoding(&mut rng, &c)
                    .add(&random_mc_encoding(&mut rng, &c));
                assert_eq!(
                    twisted.mc_residual(&w).unwrap(),
                    ctx.mc_residual(&w.add(&mu)).unwrap(),
                    "MC(g^μ) ∋ ν′ ⇔ MC(g) ∋ ν′+μ"
                );
            }
        }
    }
    pass(8, "gauge_exp lands in MC, paths check, twisting matches the MC correspondence");
}

#[test]
fn criterion_09_voronov_brackets() {
    let mut rng = seeded_rng(109);
    let mut done = 0usize;
    let mut tries = 0usize;
    while done < 10 {
        tries += 1;
        assert!(tries < 200, "corpus keeps producing zero MC elements");
        let c = random_complex(&mut rng, -2, 0, 3);
        let ctx = ShiftedLieContext::new(&c).unwrap();
        let pi = random_mc_encoding(&mut rng, &c);
        if pi.is_zero() {
            continue;
        }
        done += 1;
        verify_voronov(&ctx, &pi, 3, 4, 900 + done as u64).unwrap();
    }
    pass(9, "derived brackets satisfy the L∞ identities up to arity 3 on 10 MC instances");
}

fn run_cli(args: &[&str], stdin_data: &str) -> (i32, Vec<u8>) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tstar"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin_data.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_10_cli_determinism() {
    let mut rng = seeded_rng(110);
    let eq = random_equivalence(&mut rng, -2, 0, 2);
    let eq_json =
        serde_json::to_string(&EquivalenceJson::from_equivalence(&eq)).unwrap();
    let s = dg_lie_instance(&mut rng, 2);
    let s_json = serde_json::to_string(&StructureJson::from_structure(&s)).unwrap();

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["morphism", "verify", "--seed", "7", "--trials", "8"], &eq_json),
        (vec!["equiv", "check"], &eq_json),
        (vec!["structure", "verify"], &s_json),
        (vec!["structure", "minimal-model"], &s_json),
        (vec!["structure", "encode"], &s_json),
    ];
    for (args, input) in cases {
        let (c1, o1) = run_cli(&args, input);
        let (c2, o2) = run_cli(&args, input);
        assert_eq!(c1, 0, "{:?}", args);
        assert_eq!(c2, 0, "{:?}", args);
        assert_eq!(o1, o2, "{:?} not byte-identical across same-seed runs", args);
        assert!(!o1.is_empty());
    }
    pass(10, "CLI verifiers byte-identical across repeated same-seed runs");
}
