//! Command-line interface: JSON in, canonical JSON report out.
//!
//! Exit codes: 0 when the requested check passes or the operation succeeds,
//! 1 when a mathematical violation is found, 2 on malformed input.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use tstar::bracket::{gauge_exp, gauge_path, gauge_path_check, shifted_poisson_check, ShiftedLieContext, TPoly};
use tstar::equiv::{mapping_cylinder, retract_to_cohomology};
use tstar::error::Error;
use tstar::json::{
    ComplexJson, ElementJson, EquivalenceJson, PolyElementJson, StructureJson,
};
use tstar::symalg::{Element, Generator};
use tstar::transfer::{
    abelian_part, ce_class, decode_structure, encode_structure, minimal_model, transfer_structure,
    verify_structure, verify_voronov, voronov_bracket,
};
use tstar::trees::{
    enumerate_trees, push_mc, tree_eval, verify_linfty_morphism, verify_prop21, EdgeMark,
    LabeledTree, TransferMorphism, TreeOps,
};

#[derive(Parser)]
#[command(name = "tstar", version, about = "Exact homotopy-transfer calculator")]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Args, Clone)]
struct Common {
    /// Input JSON file; reads stdin when omitted or "-".
    input: Option<PathBuf>,
    /// Seed for randomized verification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random trials per checked identity.
    #[arg(long, default_value_t = 64)]
    trials: usize,
    /// Largest arity included in the check.
    #[arg(long)]
    max_arity: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Group {
    /// Cochain complex operations.
    Complex {
        #[command(subcommand)]
        cmd: ComplexCmd,
    },
    /// Homotopy equivalence operations.
    Equiv {
        #[command(subcommand)]
        cmd: EquivCmd,
    },
    /// Labeled tree calculus.
    Trees {
        #[command(subcommand)]
        cmd: TreesCmd,
    },
    /// The transfer L-infinity morphism.
    Morphism {
        #[command(subcommand)]
        cmd: MorphismCmd,
    },
    /// L-infinity structures as Maurer-Cartan elements.
    Structure {
        #[command(subcommand)]
        cmd: StructureCmd,
    },
    /// Shifted Poisson structure checks.
    Poisson {
        #[command(subcommand)]
        cmd: PoissonCmd,
    },
    /// Gauge transformations of Maurer-Cartan elements.
    Gauge {
        #[command(subcommand)]
        cmd: GaugeCmd,
    },
    /// Higher derived brackets.
    Voronov {
        #[command(subcommand)]
        cmd: VoronovCmd,
    },
}

#[derive(Subcommand)]
enum ComplexCmd {
    /// Check d^2 = 0, shapes, and basis-name uniqueness.
    Validate(Common),
}

#[derive(Subcommand)]
enum EquivCmd {
    /// Check the homotopy-equivalence identities exactly.
    Check(Common),
    /// Factor the equivalence through its mapping cylinder.
    Cylinder(Common),
    /// Deformation-retract a complex onto its cohomology.
    Retract(Common),
}

#[derive(Subcommand)]
enum TreesCmd {
    /// List all labeled trees on n vertices in canonical order.
    Enumerate {
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate one decorated tree on a tuple of elements.
    Eval(Common),
}

#[derive(Subcommand)]
enum MorphismCmd {
    /// Verify the tree-sum identity and the morphism equations.
    Verify(Common),
    /// Push a Maurer-Cartan element along the transfer morphism.
    PushMc(Common),
}

#[derive(Subcommand)]
enum StructureCmd {
    /// Encode a bracket table as a Maurer-Cartan candidate.
    Encode(Common),
    /// Decode a Maurer-Cartan candidate into a bracket table.
    Decode(Common),
    /// Check the higher Jacobi identities exactly.
    Verify(Common),
    /// Transfer a structure along a homotopy equivalence.
    Transfer(Common),
    /// Transfer onto cohomology: zero differential, strict l_2.
    MinimalModel(Common),
    /// Decide whether [l_3] vanishes in CE cohomology.
    CeClass(Common),
}

#[derive(Subcommand)]
enum PoissonCmd {
    /// Check a biweight-(*,>=2) element against the Maurer-Cartan equation.
    Check(Common),
}

#[derive(Subcommand)]
enum GaugeCmd {
    /// Apply the gauge action of exp(h) to a Maurer-Cartan element.
    Exp(Common),
    /// Build the polynomial gauge path and check the flow equation.
    PathCheck(Common),
}

#[derive(Subcommand)]
enum VoronovCmd {
    /// Tabulate the derived brackets and verify the L-infinity identities.
    Brackets(Common),
}

#[derive(Deserialize)]
struct TreeJson {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// Optional decoration: index into `edges` plus "dotted" or "wavy".
    mark: Option<(usize, String)>,
}

#[derive(Deserialize)]
struct TreeEvalInput {
    tree: TreeJson,
    equivalence: EquivalenceJson,
    inputs: Vec<ElementJson>,
}

#[derive(Deserialize)]
struct PushMcInput {
    equivalence: EquivalenceJson,
    nu: ElementJson,
}

#[derive(Deserialize)]
struct DecodeInput {
    complex: ComplexJson,
    element: ElementJson,
}

#[derive(Deserialize)]
struct TransferInput {
    structure: StructureJson,
    equivalence: EquivalenceJson,
}

#[derive(Deserialize)]
struct CeClassInput {
    l2: StructureJson,
    l3: StructureJson,
}

#[derive(Deserialize)]
struct PoissonInput {
    complex: ComplexJson,
    pi: ElementJson,
    twist: Option<ElementJson>,
}

#[derive(Deserialize)]
struct GaugeInput {
    complex: ComplexJson,
    h: ElementJson,
    nu: ElementJson,
}

#[derive(Deserialize)]
struct VoronovInput {
    complex: ComplexJson,
    pi: ElementJson,
}

#[derive(Serialize)]
struct Report {
    command: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
}

fn read_input(common: &Common) -> Result<String, Error> {
    match &common.input {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
            .map_err(|e| Error::Input(format!("cannot read {}: {}", p.display(), e))),
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Input(format!("cannot read stdin: {}", e)))?;
            Ok(buf)
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("malformed JSON at line {} column {}: {}", e.line(), e.column(), e)))
}

fn poly_json(p: &TPoly) -> PolyElementJson {
    PolyElementJson {
        coefficients: (0..=p.degree_bound()).map(|k| ElementJson::from_element(&p.coeff(k))).collect(),
    }
}

fn run(group: &Group) -> (String, Result<Option<Value>, Error>, Option<PathBuf>) {
    match group {
        Group::Complex { cmd: ComplexCmd::Validate(c) } => {
            ("complex validate".into(), complex_validate(c), c.out.clone())
        }
        Group::Equiv { cmd } => match cmd {
            EquivCmd::Check(c) => ("equiv check".into(), equiv_check(c), c.out.clone()),
            EquivCmd::Cylinder(c) => ("equiv cylinder".into(), equiv_cylinder(c), c.out.clone()),
            EquivCmd::Retract(c) => ("equiv retract".into(), equiv_retract(c), c.out.clone()),
        },
        Group::Trees { cmd } => match cmd {
            TreesCmd::Enumerate { n, common } => {
                ("trees enumerate".into(), trees_enumerate(*n), common.out.clone())
            }
            TreesCmd::Eval(c) => ("trees eval".into(), trees_eval(c), c.out.clone()),
        },
        Group::Morphism { cmd } => match cmd {
            MorphismCmd::Verify(c) => ("morphism verify".into(), morphism_verify(c), c.out.clone()),
            MorphismCmd::PushMc(c) => ("morphism push-mc".into(), morphism_push_mc(c), c.out.clone()),
        },
        Group::Structure { cmd } => match cmd {
            StructureCmd::Encode(c) => ("structure encode".into(), structure_encode(c), c.out.clone()),
            StructureCmd::Decode(c) => ("structure decode".into(), structure_decode(c), c.out.clone()),
            StructureCmd::Verify(c) => ("structure verify".into(), structure_verify(c), c.out.clone()),
            StructureCmd::Transfer(c) => {
                ("structure transfer".into(), structure_transfer(c), c.out.clone())
            }
            StructureCmd::MinimalModel(c) => {
                ("structure minimal-model".into(), structure_minimal_model(c), c.out.clone())
            }
            StructureCmd::CeClass(c) => {
                ("structure ce-class".into(), structure_ce_class(c), c.out.clone())
            }
        },
        Group::Poisson { cmd: PoissonCmd::Check(c) } => {
            ("poisson check".into(), poisson_check(c), c.out.clone())
        }
        Group::Gauge { cmd } => match cmd {
            GaugeCmd::Exp(c) => ("gauge exp".into(), gauge_exp_cmd(c), c.out.clone()),
            GaugeCmd::PathCheck(c) => ("gauge path-check".into(), gauge_path_check_cmd(c), c.out.clone()),
        },
        Group::Voronov { cmd: VoronovCmd::Brackets(c) } => {
            ("voronov brackets".into(), voronov_brackets(c), c.out.clone())
        }
    }
}

fn complex_validate(c: &Common) -> Result<Option<Value>, Error> {
    let j: ComplexJson = parse(&read_input(c)?)?;
    let cx = j.to_complex()?;
    Ok(Some(json!({
        "degrees": cx.degrees(),
        "total_dim": cx.total_dim(),
    })))
}

fn equiv_check(c: &Common) -> Result<Option<Value>, Error> {
    let j: EquivalenceJson = parse(&read_input(c)?)?;
    let eq = j.to_equivalence()?;
    eq.check()?;
    Ok(None)
}

fn equiv_cylinder(c: &Common) -> Result<Option<Value>, Error> {
    let j: EquivalenceJson = parse(&read_input(c)?)?;
    let eq = j.to_equivalence()?;
    eq.check()?;
    let (cyl, eq_ec, eq_cf) = mapping_cylinder(&eq)?;
    eq_ec.check()?;
    eq_cf.check()?;
    Ok(Some(json!({
        "cylinder": ComplexJson::from_complex(&cyl),
        "left": EquivalenceJson::from_equivalence(&eq_ec),
        "right": EquivalenceJson::from_equivalence(&eq_cf),
    })))
}

fn equiv_retract(c: &Common) -> Result<Option<Value>, Error> {
    let j: ComplexJson = parse(&read_input(c)?)?;
    let cx = j.to_complex()?;
    let eq = retract_to_cohomology(&cx)?;
    eq.check()?;
    Ok(Some(json!({
        "equivalence": EquivalenceJson::from_equivalence(&eq),
    })))
}

fn trees_enumerate(n: usize) -> Result<Option<Value>, Error> {
    let trees = enumerate_trees(n)?;
    Ok(Some(json!({
        "n": n,
        "count": trees.len(),
        "trees": trees.iter().map(|t| json!({"edges": t.edges})).collect::<Vec<_>>(),
    })))
}

fn trees_eval(c: &Common) -> Result<Option<Value>, Error> {
    let input: TreeEvalInput = parse(&read_input(c)?)?;
    let eq = input.equivalence.to_equivalence()?;
    eq.check()?;
    let mut tree = LabeledTree::new(input.tree.n, input.tree.edges)?;
    if let Some((idx, kind)) = &input.tree.mark {
        let mark = match kind.as_str() {
            "dotted" => EdgeMark::Dotted,
            "wavy" => EdgeMark::Wavy,
            other => return Err(Error::Input(format!("unknown edge mark {other:?}"))),
        };
        if *idx >= tree.edges.len() {
            return Err(Error::Input(format!("mark index {} out of range", idx)));
        }
        tree.mark = Some((*idx, mark));
    }
    let xs: Vec<Element> =
        input.inputs.iter().map(|e| e.to_element()).collect::<Result<_, _>>()?;
    let ops = TreeOps::from_equivalence(&eq);
    let value = tree_eval(&tree, &ops, &xs)?;
    Ok(Some(json!({"value": ElementJson::from_element(&value)})))
}

fn morphism_verify(c: &Common) -> Result<Option<Value>, Error> {
    let j: EquivalenceJson = parse(&read_input(c)?)?;
    let eq = j.to_equivalence()?;
    eq.check()?;
    let max_arity = c.max_arity.unwrap_or(3);
    for n in 2..=max_arity.max(4) {
        verify_prop21(&eq, n, c.trials, c.seed.wrapping_add(n as u64))?;
    }
    let u = TransferMorphism::new(eq)?;
    verify_linfty_morphism(&u, max_arity, c.trials, c.seed)?;
    Ok(Some(json!({
        "max_arity": max_arity,
        "trials": c.trials,
        "seed": c.seed,
    })))
}

fn morphism_push_mc(c: &Common) -> Result<Option<Value>, Error> {
    let input: PushMcInput = parse(&read_input(c)?)?;
    let eq = input.equivalence.to_equivalence()?;
    eq.check()?;
    let nu = input.nu.to_element()?;
    let u = TransferMorphism::new(eq)?;
    let pushed = push_mc(&u, &nu)?;
    Ok(Some(json!({"element": ElementJson::from_element(&pushed)})))
}

fn structure_encode(c: &Common) -> Result<Option<Value>, Error> {
    let j: StructureJson = parse(&read_input(c)?)?;
    let s = j.to_structure()?;
    let nu = encode_structure(&s)?;
    Ok(Some(json!({"element": ElementJson::from_element(&nu)})))
}

fn structure_decode(c: &Common) -> Result<Option<Value>, Error> {
    let input: DecodeInput = parse(&read_input(c)?)?;
    let cx = input.complex.to_complex()?;
    let nu = input.element.to_element()?;
    let s = decode_structure(&cx, &nu)?;
    Ok(Some(json!({"structure": StructureJson::from_structure(&s)})))
}

fn structure_verify(c: &Common) -> Result<Option<Value>, Error> {
    let j: StructureJson = parse(&read_input(c)?)?;
    let s = j.to_structure()?;
    verify_structure(&s)?;
    Ok(None)
}

fn structure_transfer(c: &Common) -> Result<Option<Value>, Error> {
    let input: TransferInput = parse(&read_input(c)?)?;
    let s = input.structure.to_structure()?;
    let eq = input.equivalence.to_equivalence()?;
    eq.check()?;
    let t = transfer_structure(&eq, &s)?;
    Ok(Some(json!({"structure": StructureJson::from_structure(&t)})))
}

fn structure_minimal_model(c: &Common) -> Result<Option<Value>, Error> {
    let j: StructureJson = parse(&read_input(c)?)?;
    let s = j.to_structure()?;
    let (min, eq) = minimal_model(&s)?;
    Ok(Some(json!({
        "structure": StructureJson::from_structure(&min),
        "equivalence": EquivalenceJson::from_equivalence(&eq),
    })))
}

fn structure_ce_class(c: &Common) -> Result<Option<Value>, Error> {
    let input: CeClassInput = parse(&read_input(c)?)?;
    let l2 = input.l2.to_structure()?;
    let l3 = input.l3.to_structure()?;
    let report = ce_class(&l2, &l3)?;
    Ok(Some(json!({
        "vanishes": report.vanishes,
        "primitive": report.primitive.as_ref().map(ElementJson::from_element),
        "coboundary_rank": report.coboundary_rank,
        "augmented_rank": report.augmented_rank,
    })))
}

fn poisson_check(c: &Common) -> Result<Option<Value>, Error> {
    let input: PoissonInput = parse(&read_input(c)?)?;
    let cx = input.complex.to_complex()?;
    let mut ctx = ShiftedLieContext::new(&cx)?;
    if let Some(t) = &input.twist {
        ctx = ctx.twist_by(&t.to_element()?)?;
    }
    let pi = input.pi.to_element()?;
    let residual = shifted_poisson_check(&ctx, &pi)?;
    if !residual.is_zero() {
        return Err(Error::Violation(format!(
            "Maurer-Cartan residual is nonzero: {}",
            residual
        )));
    }
    Ok(Some(json!({"residual": ElementJson::from_element(&residual)})))
}

fn gauge_exp_cmd(c: &Common) -> Result<Option<Value>, Error> {
    let input: GaugeInput = parse(&read_input(c)?)?;
    let cx = input.complex.to_complex()?;
    let ctx = ShiftedLieContext::new(&cx)?;
    let h = input.h.to_element()?;
    let nu = input.nu.to_element()?;
    let out = gauge_exp(&ctx, &h, &nu)?;
    Ok(Some(json!({"element": ElementJson::from_element(&out)})))
}

fn gauge_path_check_cmd(c: &Common) -> Result<Option<Value>, Error> {
    let input: GaugeInput = parse(&read_input(c)?)?;
    let cx = input.complex.to_complex()?;
    let ctx = ShiftedLieContext::new(&cx)?;
    let h = input.h.to_element()?;
    let nu = input.nu.to_element()?;
    let (m, hp) = gauge_path(&ctx, &h, &nu)?;
    gauge_path_check(&ctx, &m, &hp)?;
    Ok(Some(json!({
        "path": poly_json(&m),
        "generator": poly_json(&hp),
    })))
}

fn voronov_brackets(c: &Common) -> Result<Option<Value>, Error> {
    let input: VoronovInput = parse(&read_input(c)?)?;
    let cx = input.complex.to_complex()?;
    let ctx = ShiftedLieContext::new(&cx)?;
    let pi = input.pi.to_element()?;
    let max_arity = c.max_arity.unwrap_or(3);
    verify_voronov(&ctx, &pi, max_arity, c.trials, c.seed)?;
    // tabulate l_n on tuples of θ generators of the abelian part
    let mut gens: Vec<(String, i64)> = Vec::new();
    for (&deg, names) in &cx.basis {
        for n in names {
            gens.push((n.clone(), deg));
        }
    }
    let mut table = Vec::new();
    for n in 1..=max_arity.min(2) {
        let mut idx = vec![0usize; n];
        'tuples: loop {
            let args: Vec<Element> = idx
                .iter()
                .map(|&i| {
                    Element::from_generator(Generator::theta(&gens[i].0, gens[i].1))
                })
                .collect();
            let val = abelian_part(&voronov_bracket(&ctx, &pi, &args));
            if !val.is_zero() {
                table.push(json!({
                    "arity": n,
                    "inputs": idx.iter().map(|&i| gens[i].0.clone()).collect::<Vec<_>>(),
                    "value": ElementJson::from_element(&val),
                }));
            }
            let mut k = n;
            loop {
                if k == 0 {
                    break 'tuples;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < gens.len() {
                    for j in k + 1..n {
                        idx[j] = idx[k];
                    }
                    break;
                }
            }
            if idx[0] >= gens.len() {
                break;
            }
        }
        if gens.is_empty() {
            break;
        }
    }
    Ok(Some(json!({
        "max_arity": max_arity,
        "trials": c.trials,
        "seed": c.seed,
        "brackets": table,
    })))
}

fn emit(report: &Report, out: &Option<PathBuf>) {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text + "\n") {
                eprintln!("cannot write {}: {}", p.display(), e);
            }
        }
        None => {
            use std::io::Write;
            let _ = writeln!(std::io::stdout(), "{}", text);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, outcome, out) = run(&cli.group);
    match outcome {
        Ok(result) => {
            let report = Report { command: command.clone(), status: "ok".into(), detail: None, result };
            emit(&report, &out);
            eprintln!("{}: ok", command);
            ExitCode::from(0)
        }
        Err(Error::Violation(msg)) => {
            let report = Report {
                command: command.clone(),
                status: "violation".into(),
                detail: Some(msg.clone()),
                result: None,
            };
            emit(&report, &out);
            eprintln!("{}: violation: {}", command, msg);
            ExitCode::from(1)
        }
        Err(Error::Input(msg)) => {
            eprintln!("{}: input error: {}", command, msg);
            ExitCode::from(2)
        }
    }
}
