//! Closed-form identities of the model families: commutators, explicit
//! position operators, angular momentum and the translation generator.

use num_traits::One;

use super::invariance::Target;
use super::report::{CheckReport, Mode};
use super::solve::check_ansatz;
use super::structure::{atom_for, invertible_at_origin, Anisotropy, KappaStructure};
use super::CriteriaError;
use crate::model::{builtin, ModelSpec};
use crate::number::{rat, real, Rational};
use crate::operator::{build_position, divergence, fresh, OperatorExpr, Placement};
use crate::tensor::{label, TensorExpr};

type Result<T> = std::result::Result<T, CriteriaError>;

fn op(e: TensorExpr) -> OperatorExpr {
    OperatorExpr::from(e)
}

fn x(model: &ModelSpec, i: &str) -> Result<OperatorExpr> {
    Ok(build_position(model, i, None)?)
}

fn ihbar_times(e: &TensorExpr) -> Result<TensorExpr> {
    Ok(TensorExpr::ihbar().mul(e)?)
}

/// Report on `lhs - rhs` in the given mode.
fn compare(model: &ModelSpec, check: &str, mode: &Mode, lhs: &OperatorExpr, rhs: &OperatorExpr) -> Result<CheckReport> {
    let r = mode.reduce(model, lhs.sub(rhs)?.tensor())?;
    Ok(CheckReport::new(model, check, mode).with_residual(&r)?)
}

/// `p·A` for a vector operator `A_idx` with the momentum standing left.
fn p_dot(a: &OperatorExpr, idx: &str) -> Result<OperatorExpr> {
    let n = fresh("n");
    Ok(a.left_mul(&TensorExpr::p(&n))?.contract(idx, &n)?)
}

/// `[x'_i, p_j] = iħ F_ij` for the named ansatz, or the identity.
pub fn check_xp(model: &ModelSpec, ansatz: Option<&str>) -> Result<CheckReport> {
    let (check, l) = match ansatz {
        None => ("xp".to_string(), None),
        Some(name) => {
            let a = model
                .ansatz(name)
                .ok_or_else(|| CriteriaError::Precondition(format!("no ansatz `{name}`")))?;
            (format!("xp ({name})"), Some(a.log_derivative("j")?.value.rename("j", "#lj")?))
        }
    };
    let l = l.map(|v| crate::operator::LogDerivative::new("#lj", v)).transpose()?;
    let lhs = build_position(model, "i", l.as_ref())?.commutator(&OperatorExpr::p("j"))?;
    let rhs = op(ihbar_times(&model.f_matrix("i", "j")?)?);
    compare(model, &check, &Mode::Exact, &lhs, &rhs)
}

/// `[x_i, x_j] = iħ (∂_i f x_j - ∂_j f x_i)` for `F = f δ`.
pub fn check_f_commutator(model: &ModelSpec) -> Result<CheckReport> {
    if model.g.is_some() || model.h.is_some() {
        return Err(CriteriaError::Precondition("model is not of the form F = f δ".into()));
    }
    let lhs = x(model, "i")?.commutator(&x(model, "j")?)?;
    let term = |a: &str, b: &str| -> Result<OperatorExpr> { Ok(x(model, b)?.left_mul(&ihbar_times(&model.f.derive(a)?)?)?) };
    let rhs = term("i", "j")?.sub(&term("j", "i")?)?;
    compare(model, "xx-form", &Mode::Exact, &lhs, &rhs)
}

/// `F = δ + ŵg_i p_j`: position `x_i = q_i + ŵg_i (p·q + (d+2)/2 iħ)` and
/// `[x_i, x_j] = iħ (x_i ŵg_j - x_j ŵg_i)`.
pub fn check_g_model(model: &ModelSpec) -> Result<Vec<CheckReport>> {
    let g = match (&model.h, Anisotropy::from_vector(model)?) {
        (None, Some(g)) if model.f.sub(&TensorExpr::one())?.is_zero()? => g,
        _ => return Err(CriteriaError::Precondition("model is not of the form F = δ + ŵg_i p_j".into())),
    };
    let d = Rational::from_integer(g.degree.into());
    let pq = p_dot(&OperatorExpr::q("#a"), "#a")?;
    let c = TensorExpr::ihbar().scale(&real((d + Rational::from_integer(2.into())) / Rational::from_integer(2.into())));
    let bracket = pq.add(&op(c))?;
    let expected = OperatorExpr::q("i").add(&bracket.left_mul(&g.at("i")?)?)?;
    let position = compare(model, "position-form", &Mode::Exact, &x(model, "i")?, &expected)?;

    let lhs = x(model, "i")?.commutator(&x(model, "j")?)?;
    let term = |a: &str, b: &str| -> Result<OperatorExpr> { Ok(x(model, a)?.mul(&op(g.at(b)?))?) };
    let rhs = term("i", "j")?.sub(&term("j", "i")?)?.scale(&crate::number::imag(Rational::one()));
    let rhs = OperatorExpr::from(TensorExpr::hbar().mul(rhs.tensor())?);
    let commutator = compare(model, "xx-form", &Mode::Exact, &lhs, &rhs)?;
    Ok(vec![position, commutator])
}

fn kappa(model: &ModelSpec) -> Result<KappaStructure> {
    match KappaStructure::recognise(model)? {
        Some(k) if model.g.is_some() => Ok(k),
        _ => Err(CriteriaError::Precondition(
            "model is not of the form f = 1 + ŵf, g_i = κ ŵf_i".into(),
        )),
    }
}

/// `x_i = (1+ŵf) q_i + ŵf_i [κ p·q + (κ + κd/2 + d/2) iħ]` and
/// `[x_i, x_j] = iħ (d-κ + (d-κ+κd) ŵf)/(1+ŵf) (ŵf_i x_j - ŵf_j x_i)`.
pub fn check_kappa_model(model: &ModelSpec) -> Result<Vec<CheckReport>> {
    let ks = kappa(model)?;
    let (k, d) = (ks.kappa.clone(), ks.d());
    let half = rat(1, 2);
    let pq = p_dot(&OperatorExpr::q("#a"), "#a")?.scale(&real(k.clone()));
    let c = &k + &k * &d * &half + &d * &half;
    let bracket = pq.add(&op(TensorExpr::ihbar().scale(&real(c))))?;
    let expected = OperatorExpr::q("i")
        .left_mul(&model.f)?
        .add(&bracket.left_mul(&ks.f.at("i")?)?)?;
    let position = compare(model, "position-form", &Mode::Exact, &x(model, "i")?, &expected)?;

    let f_atom = atom_for(model, "f", &model.f)?;
    let num = TensorExpr::rational(&d - &k).add(&ks.f.scalar.scale(&real(&d - &k + &k * &d)))?;
    let pref = ihbar_times(&num.mul(&TensorExpr::inverse_atom(&f_atom, 1)?)?)?;
    let term = |a: &str, b: &str| -> Result<OperatorExpr> { Ok(x(model, b)?.left_mul(&pref.mul(&ks.f.at(a)?)?)?) };
    let rhs = term("i", "j")?.sub(&term("j", "i")?)?;
    let lhs = x(model, "i")?.commutator(&x(model, "j")?)?;
    let commutator = compare(model, "xx-form", &Mode::Exact, &lhs, &rhs)?
        .note(format!("kappa = {}, d = {}", crate::number::fmt_rational(&k), ks.f.degree));
    Ok(vec![position, commutator])
}

/// `[x_i, T_j] = iħ δ_ij` with `T_j = p_j / f`, for `κ = d` (or `F = δ`).
pub fn check_translation_generator(model: &ModelSpec, mode: &Mode) -> Result<CheckReport> {
    let trivial = model.g.is_none() && model.h.is_none() && model.f.sub(&TensorExpr::one())?.is_zero()?;
    if !trivial {
        let ks = kappa(model)?;
        if ks.kappa != ks.d() {
            return Err(CriteriaError::Precondition("translation generator needs κ = d".into()));
        }
    }
    let f_atom = atom_for(model, "f", &model.f)?;
    let t = op(TensorExpr::p("j").mul(&TensorExpr::inverse_atom(&f_atom, 1)?)?);
    let lhs = x(model, "i")?.commutator(&t)?;
    let rhs = op(ihbar_times(&TensorExpr::delta("i", "j")?)?);
    compare(model, "translation-generator", mode, &lhs, &rhs)
}

/// `g_i = f ∂_i f / (f - p·∂f)`.
pub fn commutative_g_from_f(f: &TensorExpr, idx: &str) -> Result<TensorExpr> {
    let a = fresh("a");
    let a2 = fresh("a");
    let w = f.sub(&f.derive(&a)?.mul(&TensorExpr::p(&a2))?.contract(&a, &a2)?)?;
    if !invertible_at_origin(&w) {
        return Err(CriteriaError::Precondition("f - p·∂f has zero constant term".into()));
    }
    let atom = crate::tensor::AtomRef(std::sync::Arc::new(crate::tensor::ScalarAtom {
        name: label("w"),
        definition: w,
    }));
    Ok(f.mul(&f.derive(idx)?)?.mul(&TensorExpr::inverse_atom(&atom, 1)?)?)
}

/// The model `F = f δ + g ⊗ p` with `g` from [`commutative_g_from_f`].
pub fn commutative_model(base: &ModelSpec) -> Result<ModelSpec> {
    let mut m = base.clone();
    m.name = format!("{}+commutative-g", base.name);
    m.g = Some((label("i"), commutative_g_from_f(&base.pin(&base.f)?, "i")?));
    m.h = None;
    m.ansatze.clear();
    Ok(m)
}

/// `[x_i, x_j]` in the given mode.
pub fn check_commutativity(model: &ModelSpec, mode: &Mode) -> Result<CheckReport> {
    if model.h.is_some() {
        return Err(CriteriaError::Precondition("model has an h_j term".into()));
    }
    let c = x(model, "i")?.commutator(&x(model, "j")?)?;
    compare(model, "commutativity", mode, &c, &OperatorExpr::zero(c.free().clone()))
}

/// `L_ij = q_i p_j - q_j p_i`.
fn angular_q(i: &str, j: &str) -> Result<OperatorExpr> {
    let t = |a: &str, b: &str| OperatorExpr::q(a).mul(&OperatorExpr::p(b));
    Ok(t(i, j)?.sub(&t(j, i)?)?)
}

fn wedge_p(v: impl Fn(&str) -> Result<OperatorExpr>, i: &str, j: &str) -> Result<OperatorExpr> {
    Ok(v(i)?.mul(&OperatorExpr::p(j))?.sub(&v(j)?.mul(&OperatorExpr::p(i))?)?)
}

/// `L_ij` rewritten through the deformed position, where such a form is known.
fn angular_x(model: &ModelSpec, i: &str, j: &str) -> Result<Option<OperatorExpr>> {
    let xp = wedge_p(|a| x(model, a), i, j)?;
    if model.g.is_none() && model.h.is_none() {
        // f⁻¹ (x_i p_j - x_j p_i) - ½iħ f⁻¹ (∂_i f p_j - ∂_j f p_i)
        let inv = TensorExpr::inverse_atom(&atom_for(model, "f", &model.f)?, 1)?;
        let grad = wedge_p(|a| Ok(op(model.f.derive(a)?)), i, j)?.left_mul(&TensorExpr::ihbar().scale(&real(rat(1, 2))))?;
        return Ok(Some(xp.sub(&grad)?.left_mul(&inv)?));
    }
    if let (Some(g), None, true) = (
        Anisotropy::from_vector(model)?,
        &model.h,
        model.f.sub(&TensorExpr::one())?.is_zero()?,
    ) {
        // x_i p_j - x_j p_i - (ŵg_i p_j - ŵg_j p_i) (1+ŵg)⁻¹ (p·x + (d+2)/2 iħ)
        let s = atom_for(model, "sg", &TensorExpr::one().add(&g.scalar)?)?;
        let gp = wedge_p(|a| Ok(op(g.at(a)?)), i, j)?;
        let d = Rational::from_integer(g.degree.into());
        let c = TensorExpr::ihbar().scale(&real((d + Rational::from_integer(2.into())) / Rational::from_integer(2.into())));
        let a = fresh("a");
        let px = p_dot(&x(model, &a)?, &a)?.add(&op(c))?;
        let tail = gp.left_mul(&TensorExpr::inverse_atom(&s, 1)?)?.mul(&px)?;
        return Ok(Some(xp.sub(&tail)?));
    }
    Ok(None)
}

fn isotropic(model: &ModelSpec) -> bool {
    model.symbols.tensors.values().all(|t| t.rank == 0)
}

/// Angular momentum algebra for `L_ij = q_i p_j - q_j p_i`, the value of
/// `[p·p, L_ij]`, and the comparison with the position-based form.
pub fn check_angular_momentum(model: &ModelSpec) -> Result<Vec<CheckReport>> {
    let exact = Mode::Exact;
    let l = angular_q("i", "j")?;
    let ih = |e: TensorExpr| -> Result<OperatorExpr> { Ok(op(ihbar_times(&e)?)) };
    let dp = |a: &str, b: &str, c: &str| -> Result<TensorExpr> { Ok(TensorExpr::delta(a, b)?.mul(&TensorExpr::p(c))?) };
    let mut out = Vec::new();

    // [p_k, L_ij] = -iħ (δ_ik p_j - δ_jk p_i)
    let lhs = OperatorExpr::p("k").commutator(&l)?;
    let rhs = ih(dp("i", "k", "j")?.sub(&dp("j", "k", "i")?)?)?.neg();
    out.push(compare(model, "angular p-L", &exact, &lhs, &rhs)?);

    // [q_k, L_ij] = iħ (δ_jk q_i - δ_ik q_j)
    let dq = |a: &str, b: &str, c: &str| -> Result<OperatorExpr> { Ok(OperatorExpr::q(c).left_mul(&TensorExpr::delta(a, b)?)?) };
    let lhs = OperatorExpr::q("k").commutator(&l)?;
    let rhs = dq("j", "k", "i")?.sub(&dq("i", "k", "j")?)?.left_mul(&TensorExpr::ihbar())?;
    out.push(compare(model, "angular q-L", &exact, &lhs, &rhs)?);

    if isotropic(model) {
        let dx = |a: &str, b: &str, c: &str| -> Result<OperatorExpr> { Ok(x(model, c)?.left_mul(&TensorExpr::delta(a, b)?)?) };
        let lhs = x(model, "k")?.commutator(&l)?;
        let rhs = dx("j", "k", "i")?.sub(&dx("i", "k", "j")?)?.left_mul(&TensorExpr::ihbar())?;
        out.push(compare(model, "angular x-L", &exact, &lhs, &rhs)?);
    }

    // [L_ij, L_kl] = iħ (δ_ik L_jl + δ_jl L_ik - δ_jk L_il - δ_il L_jk)
    let lkl = angular_q("k", "l")?;
    let lhs = l.commutator(&lkl)?;
    let dl = |a: &str, b: &str, c: &str, e: &str| -> Result<OperatorExpr> {
        Ok(angular_q(c, e)?.left_mul(&TensorExpr::delta(a, b)?)?)
    };
    let rhs = dl("i", "k", "j", "l")?
        .add(&dl("j", "l", "i", "k")?)?
        .sub(&dl("j", "k", "i", "l")?)?
        .sub(&dl("i", "l", "j", "k")?)?
        .left_mul(&TensorExpr::ihbar())?;
    out.push(compare(model, "angular L-L", &exact, &lhs, &rhs)?);

    let h = op(TensorExpr::p_squared());
    let hl = h.commutator(&l)?;
    out.push(compare(model, "angular H-L (q form)", &exact, &hl, &OperatorExpr::zero(hl.free().clone()))?);

    if let Some(lx) = angular_x(model, "i", "j")? {
        out.push(compare(model, "angular x-form equals q form", &exact, &lx, &l)?);
        let hx = h.commutator(&lx)?;
        out.push(compare(model, "angular H-L (x form)", &exact, &hx, &OperatorExpr::zero(hx.free().clone()))?);
    }
    Ok(out)
}

/// Symmetricity integrand `∂_j(F_ij C⁻²) - 2 F_i C⁻²`, reported divided by
/// `C⁻²`. `F_i` is read off the constructed position operator; with
/// `trivial` it is set to zero instead.
pub fn check_symmetricity(model: &ModelSpec, ansatz: Option<&str>, trivial: bool) -> Result<CheckReport> {
    let l = match ansatz {
        None => None,
        Some(name) => {
            let a = model
                .ansatz(name)
                .ok_or_else(|| CriteriaError::Precondition(format!("no ansatz `{name}`")))?;
            if matches!(a.kind, super::AnsatzKind::Poly { .. }) {
                return Err(CriteriaError::Precondition("symmetricity needs a power-family or explicit C".into()));
            }
            Some(a.log_derivative("#lj")?)
        }
    };
    let div = divergence(model, "i")?;
    let fl = match &l {
        Some(l) => crate::operator::f_dot(model, "i", l)?,
        None => TensorExpr::zero([label("i")].into_iter().collect()),
    };
    let fi = if trivial {
        TensorExpr::zero([label("i")].into_iter().collect())
    } else {
        // q-free part of x'_i over iħ
        let xi = build_position(model, "i", l.as_ref())?;
        let free_part: Vec<_> = xi.tensor().terms().iter().filter(|m| m.q_degree() == 0).cloned().collect();
        let c = TensorExpr::from_terms(free_part, xi.free().clone())?;
        divide_hbar(&c.scale(&crate::number::imag(-Rational::one())))?
    };
    let two = real(Rational::from_integer(2.into()));
    let residual = div.sub(&fl.scale(&two))?.sub(&fi.scale(&two))?;
    let name = if trivial { "symmetricity (F_i = 0)" } else { "symmetricity" };
    let r = Mode::Exact.reduce(model, &residual)?;
    let mut rep = CheckReport::new(model, name, &Mode::Exact).with_residual(&r)?;
    if let Some(a) = ansatz {
        rep = rep.note(format!("ansatz {a}"));
    }
    Ok(rep)
}

/// Lowers the power of `ħ` by one in every term.
fn divide_hbar(e: &TensorExpr) -> std::result::Result<TensorExpr, crate::tensor::AlgebraError> {
    let mut terms = Vec::new();
    for m in e.terms() {
        let mut m = m.clone();
        if m.hbar == 0 {
            return Err(crate::tensor::AlgebraError::IllFormed("term without ħ".into()));
        }
        m.hbar -= 1;
        terms.push(m);
    }
    TensorExpr::from_terms(terms, e.free().clone())
}

/// What the summary verifies for one model.
#[derive(Clone, Copy, Debug)]
enum Item {
    Xp,
    XpTransformed(&'static str),
    FCommutator,
    GModel,
    KappaModel,
    Invariance(&'static str),
    Reorder(&'static str),
    Angular,
    Commutativity(u32),
    Translation(u32),
    Symmetricity,
}

const SUMMARY: &[(&str, &[Item])] = &[
    (
        "f-only-general",
        &[
            Item::Xp,
            Item::XpTransformed("f-power"),
            Item::FCommutator,
            Item::Invariance("f-power"),
            Item::Reorder("f-inverse"),
            Item::Angular,
            Item::Symmetricity,
        ],
    ),
    (
        "f-only-single",
        &[Item::Xp, Item::FCommutator, Item::Invariance("f-power"), Item::Reorder("f-power"), Item::Angular],
    ),
    (
        "g-only-single",
        &[
            Item::Xp,
            Item::XpTransformed("g-power"),
            Item::GModel,
            Item::Invariance("g-power"),
            Item::Reorder("g-power"),
            Item::Angular,
        ],
    ),
    (
        "kappa-fg",
        &[Item::Xp, Item::KappaModel, Item::Invariance("kappa-power"), Item::Reorder("kappa-power")],
    ),
    (
        "kappa-fg-alpha",
        &[Item::Xp, Item::KappaModel, Item::Invariance("kappa-power"), Item::Reorder("kappa-power")],
    ),
    (
        "kempf-aniso",
        &[
            Item::Xp,
            Item::KappaModel,
            Item::Invariance("kappa-power"),
            Item::Reorder("kappa-power"),
            Item::Commutativity(1),
            Item::Translation(1),
            Item::Symmetricity,
        ],
    ),
    ("alpha-alpha-prime", &[Item::Xp, Item::XpTransformed("exp"), Item::Invariance("exp")]),
];

fn run_item(model: &ModelSpec, item: Item) -> Result<Vec<CheckReport>> {
    Ok(match item {
        Item::Xp => vec![check_xp(model, None)?],
        Item::XpTransformed(a) => vec![check_xp(model, Some(a))?],
        Item::FCommutator => vec![check_f_commutator(model)?],
        Item::GModel => check_g_model(model)?,
        Item::KappaModel => check_kappa_model(model)?,
        Item::Invariance(a) | Item::Reorder(a) => {
            let ansatz = model
                .ansatz(a)
                .ok_or_else(|| CriteriaError::Precondition(format!("no ansatz `{a}`")))?;
            let target = match item {
                Item::Invariance(_) => Target::Xx,
                _ => Target::Reorder(Placement::Left),
            };
            vec![check_ansatz(model, &target, ansatz, &Mode::Exact)?]
        }
        Item::Angular => check_angular_momentum(model)?,
        Item::Commutativity(k) => vec![check_commutativity(model, &Mode::Order(k))?],
        Item::Translation(k) => vec![check_translation_generator(model, &Mode::Order(k))?],
        Item::Symmetricity => vec![check_symmetricity(model, None, false)?],
    })
}

/// Summary identities for one model: the fixed list for the library models,
/// otherwise whatever its structure supports.
pub fn summary_checks(model: &ModelSpec) -> Result<Vec<CheckReport>> {
    if let Some((_, items)) = SUMMARY.iter().find(|(n, _)| *n == model.name) {
        let mut out = Vec::new();
        for it in items.iter() {
            out.extend(run_item(model, *it)?);
        }
        return Ok(out);
    }
    let mut out = vec![check_xp(model, None)?];
    if model.g.is_none() && model.h.is_none() {
        out.push(check_f_commutator(model)?);
    } else if Anisotropy::from_vector(model)?.is_some() && model.f.sub(&TensorExpr::one())?.is_zero()? && model.h.is_none() {
        out.extend(check_g_model(model)?);
    } else if model.g.is_some() && KappaStructure::recognise(model)?.is_some() {
        out.extend(check_kappa_model(model)?);
    }
    out.extend(check_angular_momentum(model)?);
    Ok(out)
}

/// Summary identities over the built-in model families.
pub fn check_summary_models() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (name, _) in SUMMARY {
        let model = builtin(name).expect("summary model is built in");
        out.extend(summary_checks(&model)?);
    }
    let comm = builtin("commutative").expect("built in");
    out.push(check_commutativity(&comm, &Mode::Exact)?);
    Ok(out)
}
