//! Acceptance suite: one PASS/FAIL line per criterion, each under a fixed
//! time budget. Runs without the libtest harness so every line is printed.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gup_core::criteria::*;
use gup_core::model::report::ReportDocument;
use gup_core::model::{builtin, parse_model, render_model, ModelSpec, LIBRARY_NAMES};
use gup_core::number::{rat, Rational};
use gup_core::operator::{build_position, LogDerivative, OperatorExpr, Placement};
use gup_core::oracle::{cross_check, NumericInstance};
use gup_core::tensor::TensorExpr;

const BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<(), String>;
type Criterion<'a> = (u32, &'static str, Box<dyn FnMut() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn m(name: &str) -> Result<ModelSpec, String> {
    builtin(name).ok_or_else(|| format!("no built-in `{name}`"))
}

fn named<'a>(model: &'a ModelSpec, a: &str) -> Result<&'a TransformAnsatz, String> {
    model.ansatz(a).ok_or_else(|| format!("{}: no ansatz `{a}`", model.name))
}

fn op(model: &ModelSpec, s: &str) -> Result<OperatorExpr, String> {
    Ok(OperatorExpr::from(model.parse_expr(s).map_err(err)?))
}

fn zero(model: &ModelSpec, e: &OperatorExpr) -> Result<bool, String> {
    Mode::Exact.is_zero(model, e.tensor()).map_err(err)
}

fn expect_status(r: &CheckReport, want: Status) -> Outcome {
    ensure(r.status == want, || {
        format!("{} {} [{}]: {} (want {}) {}", r.model, r.check, r.mode, r.status, want, r.residual)
    })
}

// 1

const OPS_MODEL: &str = r#"model "ops" {
  dim 3
  tensor alpha rank 1
  tensor beta rank 2 symmetric
  scalaratom w = 1 + alpha[a]*p[a]
  f = 1
}"#;

const SCALARS: &[&str] = &["alpha[a]*p[a]", "p[a]*beta[a,b]*p[b]", "p[a]*p[a]", "2", "-1/3", "1/w"];
const VECTORS: &[&str] = &["p[i]", "alpha[i]", "beta[i,a]*p[a]"];

fn random_operator(rng: &mut ChaCha8Rng) -> String {
    let s0 = SCALARS[rng.gen_range(0..SCALARS.len())];
    let s1 = SCALARS[rng.gen_range(0..SCALARS.len())];
    let v = VECTORS[rng.gen_range(0..VECTORS.len())];
    let mut s = format!("({s0}) + ({s1})*{v}*q[i]");
    if rng.gen_bool(0.3) {
        s.push_str(" + alpha[i]*q[i]*p[j]*q[j]");
    }
    s
}

fn algebra_floor() -> Outcome {
    let model = parse_model(OPS_MODEL).map_err(err)?;
    let qp = OperatorExpr::q("i").commutator(&OperatorExpr::p("j")).map_err(err)?;
    let want = OperatorExpr::from(TensorExpr::ihbar().mul(&TensorExpr::delta("i", "j").map_err(err)?).map_err(err)?);
    ensure(zero(&model, &qp.sub(&want).map_err(err)?)?, || "[q_i,p_j] != iħδ_ij".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let ops: Vec<(String, OperatorExpr)> = (0..100)
        .map(|_| {
            let s = random_operator(&mut rng);
            op(&model, &s).map(|o| (s, o))
        })
        .collect::<Result<_, _>>()?;
    let inst = NumericInstance::instantiate(&model, 20);
    for k in 0..ops.len() {
        let (sa, a) = &ops[k];
        let (sb, b) = &ops[(k + 1) % ops.len()];
        let (_, c) = &ops[(k + 2) % ops.len()];
        let ab = a.commutator(b).map_err(err)?;
        let ba = b.commutator(a).map_err(err)?;
        ensure(zero(&model, &ab.add(&ba).map_err(err)?)?, || format!("antisymmetry: {sa} / {sb}"))?;
        let jac = a
            .commutator(&b.commutator(c).map_err(err)?)
            .and_then(|t| t.add(&b.commutator(&c.commutator(a)?)?))
            .and_then(|t| t.add(&c.commutator(&ab)?))
            .map_err(err)?;
        ensure(zero(&model, &jac)?, || format!("Jacobi fails at operator {k}"))?;
        let cc = cross_check(a, b, &inst, 1).map_err(err)?;
        ensure(cc.passed, || format!("oracle: {sa} / {sb}: {:?}", cc.mismatch))?;
    }
    Ok(())
}

// 2

/// Every declared transformation, with unknowns set to fixed generic values.
fn library_transforms(model: &ModelSpec) -> Result<Vec<(String, LogDerivative)>, String> {
    let mut out = vec![("identity".to_string(), LogDerivative::none("#lj"))];
    for a in &model.ansatze {
        let values: BTreeMap<String, Rational> = a
            .unknowns()
            .iter()
            .enumerate()
            .map(|(k, u)| (u.name.to_string(), rat(2 * k as i64 + 1, 3)))
            .collect();
        let l = a.instantiate("j", &values).map_err(err)?;
        let v = l.value.rename("j", "#lj").map_err(err)?;
        out.push((a.name.to_string(), LogDerivative::new("#lj", v).map_err(err)?));
    }
    Ok(out)
}

fn construction() -> Outcome {
    for name in LIBRARY_NAMES {
        let model = m(name)?;
        let rhs = OperatorExpr::from(
            TensorExpr::ihbar().mul(&model.f_matrix("i", "j").map_err(err)?).map_err(err)?,
        );
        for (tname, l) in library_transforms(&model)? {
            let x = build_position(&model, "i", Some(&l)).map_err(err)?;
            let d = x.commutator(&OperatorExpr::p("j")).and_then(|c| c.sub(&rhs)).map_err(err)?;
            ensure(zero(&model, &d)?, || format!("{name} ({tname}): [x'_i,p_j] != iħF_ij"))?;
        }
    }
    Ok(())
}

// 3

fn isotropy() -> Outcome {
    for name in ["isotropic-radial", "isotropic-kempf"] {
        let model = m(name)?;
        let r = check_ansatz(&model, &Target::Xx, named(&model, "radial")?, &Mode::Exact).map_err(err)?;
        expect_status(&r, Status::Holds)?;
    }
    let model = m("isotropic-radial")?;
    let r = check_ansatz(&model, &Target::Reorder(Placement::Left), named(&model, "reorder")?, &Mode::Exact)
        .map_err(err)?;
    expect_status(&r, Status::Holds)
}

// 4

fn f_only() -> Outcome {
    let general = m("f-only-general")?;
    let r = check_ansatz(&general, &Target::Reorder(Placement::Left), named(&general, "f-inverse")?, &Mode::Exact)
        .map_err(err)?;
    expect_status(&r, Status::Holds)?;

    let single = m("f-only-single")?;
    let mut placements: Vec<Placement> = (0..=2).map(Placement::Uniform).collect();
    placements.push(Placement::Right);
    for p in placements {
        let r = solve_report(&single, &Target::Reorder(p.clone()), named(&single, "f-power")?, &Mode::Exact)
            .map_err(err)?;
        expect_status(&r, Status::Solved).map_err(|e| format!("{p:?}: {e}"))?;
    }

    let r = solve_report(&general, &Target::Reorder(Placement::Uniform(1)), named(&general, "f-power")?, &Mode::Exact)
        .map_err(err)?;
    expect_status(&r, Status::NoSolution)
}

// 5

fn h_no_go() -> Outcome {
    let h = m("h-constant-c")?;
    let targets = [Target::Xx, Target::Reorder(Placement::Left)];
    for t in &targets {
        for a in ["c-power", "poly-2"] {
            let r = check_ansatz(&h, t, named(&h, a)?, &Mode::Exact).map_err(err)?;
            expect_status(&r, Status::Fails)?;
        }
        let r = solve_report(&h, t, named(&h, "poly-1")?, &Mode::Order(1)).map_err(err)?;
        expect_status(&r, Status::Solved)?;
    }
    Ok(())
}

// 6

fn kappa_example() -> Outcome {
    let model = m("kempf-aniso-c")?;
    let a = named(&model, "kappa-poly")?;
    let target = Target::Reorder(Placement::Left);
    let want: BTreeMap<String, Rational> = [("k1", rat(-1, 1)), ("k2", rat(-1, 1)), ("k3", rat(-1, 2)), ("k4", rat(1, 2))]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();

    let substituted = check_transform(&model, &target, &a.instantiate("j", &want).map_err(err)?, &Mode::Mixed)
        .map_err(err)?;
    let sol = solve_transform(&model, &target, a, &Mode::Mixed).map_err(err)?;
    let got = match sol {
        Some(s) => s.values,
        None => return Err("no solution".into()),
    };
    ensure(got == want, || {
        let show = |v: &BTreeMap<String, Rational>| {
            v.iter().map(|(k, x)| format!("{k}={x}")).collect::<Vec<_>>().join(" ")
        };
        format!("solved {}, expected {}", show(&got), show(&want))
    })?;
    expect_status(&substituted, Status::Holds)
}

// 7

fn commutative() -> Outcome {
    let comm = m("commutative")?;
    expect_status(&check_commutativity(&comm, &Mode::Exact).map_err(err)?, Status::Holds)?;
    let derived = commutative_model(&m("f-only-single")?).map_err(err)?;
    expect_status(&check_commutativity(&derived, &Mode::Exact).map_err(err)?, Status::Holds)?;
    let k = m("kempf-aniso")?;
    expect_status(&check_commutativity(&k, &Mode::Order(1)).map_err(err)?, Status::Holds)?;
    expect_status(&check_commutativity(&k, &Mode::Exact).map_err(err)?, Status::Fails)
}

// 8

const KEMPF_WITH_F: &str = r#"model "kempf-display" {
  dim 3
  tensor beta rank 2 symmetric
  scalaratom fa = 1 + p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  g[i] = 2*beta[i,a]*p[a]
}"#;

fn summary() -> Outcome {
    for r in check_summary_models().map_err(err)? {
        if !r.check.starts_with("angular") {
            ensure(r.status.is_success(), || format!("{} {}: {} {}", r.model, r.check, r.status, r.residual))?;
        }
    }

    let kempf = parse_model(KEMPF_WITH_F).map_err(err)?;
    let x = |i: &str| build_position(&kempf, i, None).map_err(err);
    let shown = op(
        &kempf,
        "(1 + p[a]*beta[a,b]*p[b])*q[i] + 2*beta[i,a]*p[a]*p[b]*q[b] + 5*im*hbar*beta[i,a]*p[a]",
    )?;
    ensure(zero(&kempf, &x("i")?.sub(&shown).map_err(err)?)?, || "kempf position operator".into())?;
    let coef = |i: &str| kempf.parse_expr(&format!("4*im*hbar*p[c]*beta[c,d]*p[d]*beta[{i},a]*p[a]/fa")).map_err(err);
    let ij = x("j")?.left_mul(&coef("i")?).map_err(err)?;
    let ji = x("i")?.left_mul(&coef("j")?).map_err(err)?;
    let rhs = ij.sub(&ji).map_err(err)?;
    let lhs = x("i")?.commutator(&x("j")?).map_err(err)?;
    ensure(zero(&kempf, &lhs.sub(&rhs).map_err(err)?)?, || "kempf [x_i,x_j]".into())?;

    let g = m("g-only-single")?;
    let shown = op(&g, "q[i] + gb[i,a]*p[a]*p[b]*q[b] + 2*im*hbar*gb[i,a]*p[a]")?;
    let xg = build_position(&g, "i", None).map_err(err)?;
    ensure(zero(&g, &xg.sub(&shown).map_err(err)?)?, || "g-model position operator".into())?;

    let aa = m("alpha-alpha-prime")?;
    let r = check_ansatz(&aa, &Target::Xx, named(&aa, "exp")?, &Mode::Exact).map_err(err)?;
    expect_status(&r, Status::Holds)?;
    let r = check_translation_generator(&m("kempf-aniso")?, &Mode::Order(1)).map_err(err)?;
    expect_status(&r, Status::Holds)
}

// 9

fn angular(details: &mut Vec<String>) -> Outcome {
    for name in ["f-only-general", "f-only-single"] {
        let reports = check_angular_momentum(&m(name)?).map_err(err)?;
        ensure(reports.iter().any(|r| r.check == "angular H-L (q form)"), || format!("{name}: no [H,L]"))?;
        for r in &reports {
            expect_status(r, Status::Holds)?;
        }
    }
    let reports = check_angular_momentum(&m("g-only-single")?).map_err(err)?;
    for check in ["angular H-L (q form)", "angular H-L (x form)", "angular x-form equals q form"] {
        let r = reports
            .iter()
            .find(|r| r.check == check)
            .ok_or_else(|| format!("g-only-single: missing `{check}`"))?;
        details.push(format!("g-only-single {check}: {} {}", r.status, r.residual));
    }
    Ok(())
}

// 10

fn tooling() -> Outcome {
    for name in LIBRARY_NAMES {
        let model = m(name)?;
        let back = parse_model(&render_model(&model)).map_err(err)?;
        ensure(back == model, || format!("{name}: render/parse round trip"))?;
    }

    let a = ReportDocument::new("summary", check_summary_models().map_err(err)?);
    let b = ReportDocument::new("summary", check_summary_models().map_err(err)?);
    ensure(a.to_machine() == b.to_machine(), || "machine report differs between runs".into())?;
    ensure(ReportDocument::from_machine(&a.to_machine()).map_err(err)? == a, || "machine report round trip".into())?;

    let bad = std::env::temp_dir().join(format!("gupcheck-bad-{}.gup", std::process::id()));
    std::fs::write(&bad, "model \"bad\" { dim 3 f = 1 + }").map_err(err)?;
    let bad = bad.to_string_lossy().into_owned();
    let cases: [(&[&str], i32); 10] = [
        (&["list-models"], 0),
        (&["check-xx", "--builtin", "isotropic-radial", "--ansatz", "radial"], 0),
        (&["check-xx", "--builtin", "h-constant-c", "--ansatz", "c-power"], 1),
        (&["check-reorder", "--builtin", "f-only-general", "--ansatz", "f-inverse"], 0),
        (&["solve", "--builtin", "f-only-general", "--ansatz", "f-power", "--placement", "uniform:1"], 1),
        (&["solve", "--builtin", "h-constant-c", "--ansatz", "poly-1", "--order", "1"], 0),
        (&["check-commutative", "--builtin", "kempf-aniso", "--exact"], 1),
        (&["oracle", "--builtin", "kempf-aniso", "--seed", "3", "--trials", "2", "--format", "machine"], 0),
        (&["check-xx", "--builtin", "no-such-model"], 2),
        (&["check-xx", "--model", &bad], 2),
    ];
    for (args, want) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_gupcheck")).args(args).output().map_err(err)?;
        let code = out.status.code().unwrap_or(-1);
        ensure(code == want, || format!("gupcheck {}: exit {code}, want {want}", args.join(" ")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut details = Vec::new();
    let mut criteria: Vec<Criterion> = vec![
        (1, "algebra floor", Box::new(algebra_floor)),
        (2, "construction", Box::new(construction)),
        (3, "isotropy theorem", Box::new(isotropy)),
        (4, "f-only model", Box::new(f_only)),
        (5, "h-model no-go", Box::new(h_no_go)),
        (6, "worked kappa example", Box::new(kappa_example)),
        (7, "commutative model", Box::new(commutative)),
        (8, "summary regressions", Box::new(summary)),
        (9, "angular momentum", Box::new(|| angular(&mut details))),
        (10, "tooling", Box::new(tooling)),
    ];
    let mut failed = 0;
    for (n, topic, run) in criteria.iter_mut() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= BUDGET, || format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), BUDGET.as_secs()))
        });
        match outcome {
            Ok(()) => println!("criterion {n} {topic}: PASS ({:.2}s)", elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {n} {topic}: FAIL ({:.2}s) {e}", elapsed.as_secs_f64());
            }
        }
    }
    drop(criteria);
    for d in details {
        println!("    {d}");
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
