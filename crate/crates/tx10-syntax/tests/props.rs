use proptest::prelude::*;
use tx10_syntax::*;

fn exc() -> impl Strategy<Value = ExcConst> {
    prop::sample::select(vec![ExcConst::E, ExcConst::BF, ExcConst::BG, ExcConst::DP])
}

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        exc().prop_map(Value::Exc),
        (0..3u32, 0..4u32).prop_map(|(p, n)| Value::Oid(Oid::new(p, n))),
        (0..3u32, 0..4u32).prop_map(|(p, n)| Value::GlobalRef(Oid::new(p, n))),
    ]
}

fn name() -> impl Strategy<Value = Name> {
    prop::sample::select(vec!["f", "g"]).prop_map(Name::from)
}

fn var() -> impl Strategy<Value = Name> {
    prop::sample::select(vec!["x", "y"]).prop_map(Name::from)
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![value().prop_map(Expr::Val), var().prop_map(Expr::Var)];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (inner.clone(), name()).prop_map(|(e, f)| Expr::Select(Box::new(e), f)),
            inner.clone().prop_map(|e| Expr::GlobalRefOf(Box::new(e))),
            inner.clone().prop_map(|e| Expr::ValOf(Box::new(e))),
            prop::collection::btree_map(name(), inner, 0..3)
                .prop_map(|m| Expr::ObjLit(m.into_iter().collect())),
        ]
    })
}

/// Any closed statement, runtime forms included: `x` and `y` are bound
/// around the generated body.
fn stmt() -> impl Strategy<Value = Stmt> {
    open_stmt().prop_map(|s| {
        let s = freshen(&s, &mut 0);
        Stmt::val(
            "x",
            Expr::exc(ExcConst::E),
            Stmt::val("y", Expr::exc(ExcConst::E), s),
        )
    })
}

/// Inner binders get distinct unused names; bodies only mention `x`, `y`.
fn freshen(s: &Stmt, n: &mut usize) -> Stmt {
    let mut sub = |t: &Stmt| std::sync::Arc::new(freshen(t, n));
    let kind = match &s.kind {
        StmtKind::ValDecl(_, e, b) => {
            let b = sub(b);
            *n += 1;
            StmtKind::ValDecl(Name::from(format!("z{n}")), e.clone(), b)
        }
        StmtKind::At(q, _, e, b) => {
            let b = sub(b);
            *n += 1;
            StmtKind::At(*q, Name::from(format!("z{n}")), e.clone(), b)
        }
        StmtKind::Seq(a, b) => StmtKind::Seq(sub(a), sub(b)),
        StmtKind::TryCatch(a, b) => StmtKind::TryCatch(sub(a), sub(b)),
        StmtKind::AtSimple(q, b) => StmtKind::AtSimple(*q, sub(b)),
        StmtKind::DynAt(q, b) => StmtKind::DynAt(*q, sub(b)),
        StmtKind::Async(b) => StmtKind::Async(sub(b)),
        StmtKind::Spawned(b) => StmtKind::Spawned(sub(b)),
        StmtKind::Finish(mu, b) => StmtKind::Finish(*mu, sub(b)),
        other => other.clone(),
    };
    s.rebuild(kind)
}

fn open_stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        Just(Stmt::skip()),
        exc().prop_map(Stmt::throw),
        (expr(), name(), expr()).prop_map(|(t, f, e)| Stmt::new(StmtKind::FieldAssign(t, f, e))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(s, t)| Stmt::seq(s, t)),
            (var(), expr(), inner.clone()).prop_map(|(x, e, s)| Stmt::new(StmtKind::ValDecl(
                x,
                e,
                s.into()
            ))),
            (0..3u32, var(), expr(), inner.clone())
                .prop_map(|(q, x, e, s)| Stmt::new(StmtKind::At(q, x, e, s.into()))),
            (0..3u32, inner.clone()).prop_map(|(q, s)| Stmt::at_simple(q, s)),
            inner.clone().prop_map(Stmt::async_),
            (prop::collection::vec(exc(), 0..3), inner.clone()).prop_map(|(es, s)| {
                let mu = es.into_iter().fold(ExcSet::default(), |m, e| m.with(e));
                Stmt::finish_mu(mu, s)
            }),
            (inner.clone(), inner.clone()).prop_map(|(s, t)| Stmt::try_catch(s, t)),
            (0..3u32, inner.clone()).prop_map(|(q, s)| Stmt::dyn_at(q, s)),
            inner.prop_map(Stmt::spawned),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn printing_then_parsing_is_identity(s in stmt()) {
        let text = stmt_to_string(&s);
        let back = parse_runtime(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back.strip_labels(), s.strip_labels());
    }

    #[test]
    fn classification_is_total_and_exclusive(s in stmt()) {
        prop_assert!(is_async(&s) != derives_sync(&s), "{}", s);
        prop_assert_eq!(classify(&s) == Class::Async, is_async(&s));
    }

    #[test]
    fn relabelling_numbers_every_statement_once(s in stmt()) {
        let r = s.relabel();
        let mut n = 0;
        r.walk(&mut |_| n += 1);
        prop_assert_eq!(r.labels().len(), n);
        prop_assert_eq!(r.labels().into_iter().map(|l| l.0).max(), Some(n as u32));
    }

    #[test]
    fn active_labels_are_labels_of_the_statement(s in stmt()) {
        let r = s.relabel();
        let all = r.labels();
        for l in active_labels(&r) {
            prop_assert!(all.contains(&l));
        }
    }
}
