//! Seeded random generators: small well-scoped programs, arbitrary
//! runtime statements and object graphs.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tx10_heap::{GlobalHeap, ObjRecord};
use tx10_syntax::{ExcConst, ExcSet, Expr, Name, Oid, Place, Stmt, StmtKind, Value};

const EXCS: [ExcConst; 4] = [ExcConst::E, ExcConst::BF, ExcConst::BG, ExcConst::DP];
const FIELDS: [&str; 2] = ["f", "g"];

fn exc(rng: &mut impl Rng) -> ExcConst {
    // E dominates; the others still show up
    if rng.gen_bool(0.7) {
        ExcConst::E
    } else {
        *EXCS.choose(rng).unwrap()
    }
}

/// An expression of at most `budget` nodes over the variables in scope.
fn gen_expr(rng: &mut impl Rng, budget: usize, scope: &[Name]) -> Expr {
    let leaf = |rng: &mut dyn rand::RngCore| -> Expr {
        match scope.choose(rng) {
            Some(x) if rng.gen_bool(0.6) => Expr::Var(x.clone()),
            _ => Expr::exc(if rng.gen_bool(0.8) {
                ExcConst::E
            } else {
                ExcConst::BF
            }),
        }
    };
    if budget <= 1 {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 => Expr::ObjLit(vec![]),
        1 => {
            let f = FIELDS.choose(rng).unwrap();
            Expr::ObjLit(vec![(Name::from(*f), gen_expr(rng, budget - 1, scope))])
        }
        2 => Expr::select(
            gen_expr(rng, budget - 1, scope),
            FIELDS.choose(rng).unwrap(),
        ),
        3 => Expr::GlobalRefOf(Box::new(gen_expr(rng, budget - 1, scope))),
        4 => Expr::ValOf(Box::new(gen_expr(rng, budget - 1, scope))),
        _ => leaf(rng),
    }
}

fn fresh_var(scope: &[Name]) -> Name {
    Name::from(format!("x{}", scope.len()))
}

/// A static statement of at most `budget` AST nodes (at least 1).
fn gen_stmt(rng: &mut impl Rng, budget: usize, places: u32, scope: &mut Vec<Name>) -> Stmt {
    if budget <= 1 {
        return if rng.gen_bool(0.6) {
            Stmt::skip()
        } else {
            Stmt::throw(exc(rng))
        };
    }
    let place = |rng: &mut dyn rand::RngCore| rng.gen_range(0..places);
    match rng.gen_range(0..10) {
        0 if budget >= 3 => {
            let a = rng.gen_range(1..budget - 1);
            let s = gen_stmt(rng, a, places, scope);
            let t = gen_stmt(rng, budget - 1 - a, places, scope);
            Stmt::seq(s, t)
        }
        1 => Stmt::async_(gen_stmt(rng, budget - 1, places, scope)),
        2 => Stmt::finish(gen_stmt(rng, budget - 1, places, scope)),
        3 if budget >= 3 => {
            let a = rng.gen_range(1..budget - 1);
            let s = gen_stmt(rng, a, places, scope);
            let t = gen_stmt(rng, budget - 1 - a, places, scope);
            Stmt::try_catch(s, t)
        }
        4 => {
            let q = place(rng);
            Stmt::at_simple(q, gen_stmt(rng, budget - 1, places, scope))
        }
        5 | 6 if budget >= 3 => {
            let eb = rng.gen_range(1..=(budget - 2).min(3));
            let e = gen_expr(rng, eb, scope);
            let x = fresh_var(scope);
            scope.push(x.clone());
            let body = gen_stmt(rng, budget - 1 - e.size(), places, scope);
            scope.pop();
            if rng.gen_bool(0.5) {
                Stmt::val(&x, e, body)
            } else {
                Stmt::at(place(rng), &x, e, body)
            }
        }
        7 if budget >= 3 && !scope.is_empty() => {
            let target = Expr::Var(scope.choose(rng).unwrap().clone());
            let e = gen_expr(rng, (budget - 2).min(2), scope);
            Stmt::assign(target, FIELDS.choose(rng).unwrap(), e)
        }
        _ => gen_stmt(rng, 1, places, scope),
    }
}

/// A well-scoped static program of at most `max_nodes` AST nodes over
/// places `0..places`, labelled in pre-order.
pub fn random_program(rng: &mut impl Rng, places: u32, max_nodes: usize) -> Stmt {
    let budget = rng.gen_range(1..=max_nodes);
    gen_stmt(rng, budget, places.max(1), &mut Vec::new()).relabel()
}

/// `n` distinct programs from `seed`.
pub fn program_corpus(seed: u64, n: usize, places: u32, max_nodes: usize) -> Vec<Stmt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < n && attempts < n * 200 {
        attempts += 1;
        let p = random_program(&mut rng, places, max_nodes);
        if seen.insert(p.strip_labels()) {
            out.push(p);
        }
    }
    out
}

/// Any statement shape, runtime forms included; expressions are
/// constants. Used for the classification properties.
pub fn random_stmt(rng: &mut impl Rng, depth: usize) -> Stmt {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Stmt::skip(),
            1 => Stmt::throw(exc(rng)),
            2 => Stmt::val("x", Expr::exc(ExcConst::E), Stmt::skip()),
            _ => Stmt::assign(Expr::exc(ExcConst::E), "f", Expr::exc(ExcConst::E)),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_stmt(rng, depth - 1);
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let kind = match rng.gen_range(0..8) {
        0 => StmtKind::Seq(sub(&mut r).into(), sub(&mut r).into()),
        1 => StmtKind::Async(sub(&mut r).into()),
        2 => {
            let mu = if rng.gen_bool(0.5) {
                ExcSet::default()
            } else {
                ExcSet::default().with(exc(rng))
            };
            StmtKind::Finish(mu, sub(&mut r).into())
        }
        3 => StmtKind::TryCatch(sub(&mut r).into(), sub(&mut r).into()),
        4 => StmtKind::AtSimple(rng.gen_range(0..3), sub(&mut r).into()),
        5 => StmtKind::DynAt(rng.gen_range(0..3), sub(&mut r).into()),
        6 => StmtKind::Spawned(sub(&mut r).into()),
        _ => StmtKind::At(
            rng.gen_range(0..3),
            "x".into(),
            Expr::exc(ExcConst::E),
            sub(&mut r).into(),
        ),
    };
    Stmt::new(kind)
}

/// A place-local heap over `places` places with at most `max_nodes`
/// objects, plus a root oid. Fields may point back (cycles) and may
/// hold global refs to objects anywhere.
pub fn random_object_graph(
    rng: &mut impl Rng,
    places: u32,
    max_nodes: usize,
) -> (GlobalHeap, Value) {
    let mut g = GlobalHeap::empty(places);
    let n = rng.gen_range(1..=max_nodes);
    let oids: Vec<Oid> = (0..n as u32)
        .map(|i| {
            let p: Place = rng.gen_range(0..places);
            Oid::new(p, i)
        })
        .collect();
    for &o in &oids {
        g.local_mut(o.place).unwrap().insert(o, ObjRecord::new());
    }
    for &o in &oids {
        let fields = rng.gen_range(0..=3);
        let mut rec = ObjRecord::new();
        for k in 0..fields {
            let target = *oids.choose(rng).unwrap();
            let v = match rng.gen_range(0..4) {
                0 => Value::Exc(exc(rng)),
                1 => Value::GlobalRef(target),
                _ if target.place == o.place => Value::Oid(target),
                _ => Value::GlobalRef(target),
            };
            rec.insert(Name::from(format!("f{k}")), v);
        }
        *g.local_mut(o.place).unwrap().get_mut(&o).unwrap() = rec;
    }
    (g, Value::Oid(oids[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tx10_heap::is_place_local;

    #[test]
    fn programs_are_small_static_and_closed() {
        for p in program_corpus(7, 100, 3, 8) {
            assert!(p.size() <= 8, "{p}");
            assert!(p.is_static());
            assert!(p.free_vars().is_empty(), "{p}");
            assert!(p.max_place().is_none_or(|q| q < 3));
        }
    }

    #[test]
    fn corpus_is_seeded() {
        assert_eq!(program_corpus(3, 20, 2, 6), program_corpus(3, 20, 2, 6));
    }

    #[test]
    fn graphs_are_place_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (g, _) = random_object_graph(&mut rng, 3, 8);
            assert!(is_place_local(&g).is_ok());
        }
    }
}
