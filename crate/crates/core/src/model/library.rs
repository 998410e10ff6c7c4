use super::{parse_model, ModelSpec};

const MODELS: &[(&str, &str)] = &[
    (
        "baseline",
        r#"model "baseline" {
  dim 3
  scalaratom s = 1 + p[a]*p[a]
  f = 1
  ansatz "p-power" power(n: s)
}"#,
    ),
    (
        "isotropic-radial",
        r#"model "isotropic-radial" {
  dim 3
  radial fr
  radial gr
  radial ell
  scalaratom fg = fr + gr*p[a]*p[a]
  f = fr
  g[i] = gr*p[i]
  ansatz "radial" logderiv[j] = 2*ell*p[j]
  ansatz "reorder" logderiv[j] = -2*(fr' + p[a]*p[a]*gr' + 2*gr)*p[j]/fg
}"#,
    ),
    (
        "isotropic-kempf",
        r#"model "isotropic-kempf" {
  dim 3
  tensor beta rank 0
  tensor betap rank 0
  radial ell
  f = 1 + beta*p[a]*p[a]
  g[i] = betap*p[i]
  ansatz "radial" logderiv[j] = 2*ell*p[j]
}"#,
    ),
    (
        "f-only-general",
        r#"model "f-only-general" {
  dim 3
  tensor alpha rank 1
  tensor beta rank 2 symmetric
  scalaratom sf = 1 + alpha[a]*p[a] + p[a]*beta[a,b]*p[b]
  f = 1 + alpha[a]*p[a] + p[a]*beta[a,b]*p[b]
  ansatz "f-power" power(n: sf)
  ansatz "f-inverse" logderiv[j] = -(alpha[j] + 2*beta[j,a]*p[a])/sf
}"#,
    ),
    (
        "f-only-single",
        r#"model "f-only-single" {
  dim 3
  tensor beta rank 2 symmetric
  scalaratom sf = 1 + p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  ansatz "f-power" power(n: sf)
}"#,
    ),
    (
        "g-only-single",
        r#"model "g-only-single" {
  dim 3
  tensor gb rank 2 symmetric
  scalaratom sg = 1 + p[a]*gb[a,b]*p[b]
  g[i] = gb[i,a]*p[a]
  ansatz "g-power" power(n: sg)
}"#,
    ),
    (
        "g-nonsym",
        r#"model "g-nonsym" {
  dim 3
  tensor gb rank 2
  scalaratom sg = 1 + p[a]*gb[a,b]*p[b]
  g[i] = gb[i,a]*p[a]
  ansatz "g-power" power(n: sg)
}"#,
    ),
    (
        "alpha-alpha-prime",
        r#"model "alpha-alpha-prime" {
  dim 3
  tensor alpha rank 1
  tensor alphap rank 1
  f = 1 + alpha[a]*p[a]
  g[i] = alphap[i]
  ansatz "exp" logderiv[j] = (1 + alpha[a]*p[a])*alpha[j] - alphap[j]
}"#,
    ),
    (
        "h-constant-c",
        r#"model "h-constant-c" {
  dim 3
  tensor c rank 1
  scalaratom sc = 1 + c[a]*p[a]
  h[j] = c[j]
  ansatz "c-power" power(n: sc)
  ansatz "poly-2" poly(k1: c[a]*p[a], k2: (c[a]*p[a])^2)
  ansatz "poly-1" poly(k1: c[a]*p[a])
}"#,
    ),
    (
        "h-rank-2-d",
        r#"model "h-rank-2-d" {
  dim 3
  tensor d rank 2
  scalaratom sd = 1 + p[a]*d[a,b]*p[b]
  h[j] = d[j,a]*p[a]
  ansatz "d-power" power(n: sd)
  ansatz "poly-1" poly(k1: p[a]*d[a,b]*p[b])
}"#,
    ),
    (
        "kappa-fg",
        r#"model "kappa-fg" {
  dim 3
  tensor beta rank 2 symmetric
  scalaratom s = 1 + 2*p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  g[i] = beta[i,a]*p[a]
  ansatz "kappa-power" power(n: s)
}"#,
    ),
    (
        "kappa-fg-alpha",
        r#"model "kappa-fg-alpha" {
  dim 3
  tensor alpha rank 1
  scalaratom s = 1 + 4*alpha[a]*p[a]
  f = 1 + alpha[a]*p[a]
  g[i] = 3*alpha[i]
  ansatz "kappa-power" power(n: s)
}"#,
    ),
    (
        "kempf-aniso",
        r#"model "kempf-aniso" {
  dim 3
  tensor beta rank 2 symmetric
  scalaratom s = 1 + 3*p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  g[i] = 2*beta[i,a]*p[a]
  ansatz "kappa-power" power(n: s)
}"#,
    ),
    (
        "kempf-aniso-c",
        r#"model "kempf-aniso-c" {
  dim 3
  tensor beta rank 2 symmetric order 2
  tensor c rank 1 order 1
  f = 1 + p[a]*beta[a,b]*p[b]
  h[j] = c[j]
  ansatz "kappa-poly" poly(k1: p[a]*beta[a,b]*p[b], k2: p[a]*c[a], k3: (p[a]*c[a])^2, k4: c[a]*c[a]*p[b]*p[b])
}"#,
    ),
    (
        "commutative",
        r#"model "commutative" {
  dim 3
  tensor beta rank 2 symmetric
  scalaratom s = 1 - p[a]*beta[a,b]*p[b]
  f = 1 + p[a]*beta[a,b]*p[b]
  g[i] = 2*(1 + p[a]*beta[a,b]*p[b])*beta[i,c]*p[c]/s
}"#,
    ),
];

/// Names of the built-in models, in library order.
pub const LIBRARY_NAMES: &[&str] = &[
    "baseline",
    "isotropic-radial",
    "isotropic-kempf",
    "f-only-general",
    "f-only-single",
    "g-only-single",
    "g-nonsym",
    "alpha-alpha-prime",
    "h-constant-c",
    "h-rank-2-d",
    "kappa-fg",
    "kappa-fg-alpha",
    "kempf-aniso",
    "kempf-aniso-c",
    "commutative",
];

/// DSL source of a built-in model.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    MODELS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Option<ModelSpec> {
    builtin_source(name).map(|src| parse_model(src).expect("built-in model parses"))
}

pub fn library() -> Vec<ModelSpec> {
    LIBRARY_NAMES.iter().map(|n| builtin(n).expect("listed model exists")).collect()
}
