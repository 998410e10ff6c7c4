use gup_core::model::{builtin, library, parse_model, render_model, ParseErrorKind, LIBRARY_NAMES};

#[test]
fn library_round_trips() {
    for m in library() {
        let text = render_model(&m);
        let back = parse_model(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", m.name));
        assert_eq!(back, m, "{}", text);
        assert_eq!(render_model(&back), text);
    }
}

#[test]
fn library_names_resolve() {
    for n in LIBRARY_NAMES {
        assert_eq!(builtin(n).unwrap().name, *n);
    }
    assert!(builtin("nope").is_none());
}

#[test]
fn kempf_f_parses() {
    let m = parse_model(
        "model \"k\" {\n tensor beta rank 2 symmetric order 2\n f = 1 + p[a]*beta[a,b]*p[b]\n}",
    )
    .unwrap();
    assert_eq!(m.f.to_string(), "1 + beta[a,b]*p[a]*p[b]");
    assert_eq!(m.symbols.tensors["beta"].grading, 2);
}

#[test]
fn zero_g_is_absent() {
    let m = parse_model("model \"z\" { g[i] = 0*p[i] }").unwrap();
    assert!(m.g.is_none());
}

#[test]
fn triple_index_rejected() {
    let e = parse_model("model \"t\" {\n  f = p[a]*p[a]*p[a]\n}").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::TripleIndex);
    assert_eq!(e.line, 2);
}

#[test]
fn errors_carry_positions() {
    let e = parse_model("model \"t\" {\n  f = 1 +\n}").unwrap_err();
    assert_eq!((e.kind, e.line, e.col), (ParseErrorKind::Syntax, 3, 1));
    let e = parse_model("model \"t\" {\n  f = 1 + gamma[a]*p[a]\n}").unwrap_err();
    assert_eq!((e.kind, e.line, e.col), (ParseErrorKind::UndeclaredSymbol, 2, 11));
    let e = parse_model("model \"t\" {\n tensor b rank 2\n f = b[a]*p[a]\n}").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Arity);
    let e = parse_model("model \"t\" { f = p[i] }").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::Invalid);
}
