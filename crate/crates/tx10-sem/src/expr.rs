//! Expression evaluation at a place with its local heap.

use tx10_heap::{fresh_oids, LocalHeap, ObjRecord};
use tx10_syntax::{ExcConst, Expr, Place, Value};

use crate::{EngineFault, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    /// One step; the rule is the leaf rule under any (Exp Ctx) wrapping.
    Step(Expr, LocalHeap, Rule),
    /// The heap is unchanged.
    Thrown(ExcConst, Rule),
    AlreadyValue,
}

pub fn eval_step(e: &Expr, h: &LocalHeap, p: Place) -> Result<EvalOutcome, EngineFault> {
    use EvalOutcome::*;
    Ok(match e {
        Expr::Val(_) => AlreadyValue,
        Expr::Var(x) => return Err(EngineFault::FreeVariable(x.to_string())),
        Expr::Select(a, f) => match a.as_value() {
            None => ctx(a, h, p, |a2| Expr::Select(Box::new(a2), f.clone()))?,
            Some(Value::Oid(o)) => match h.get(&o).and_then(|r| r.get(f)) {
                Some(v) => Step(Expr::Val(*v), h.clone(), Rule::Select),
                None => Thrown(ExcConst::BF, Rule::SelectBad),
            },
            Some(_) => Thrown(ExcConst::BF, Rule::SelectBad),
        },
        Expr::ObjLit(fs) => match fs.iter().position(|(_, a)| a.as_value().is_none()) {
            Some(i) => ctx(&fs[i].1, h, p, |a2| {
                let mut fs2 = fs.clone();
                fs2[i].1 = a2;
                Expr::ObjLit(fs2)
            })?,
            None => {
                let o = fresh_oids(h, p, 1)[0];
                let rec: ObjRecord = fs
                    .iter()
                    .map(|(f, a)| (f.clone(), a.as_value().expect("all fields are values")))
                    .collect();
                let mut h2 = h.clone();
                h2.insert(o, rec);
                Step(Expr::oid(o), h2, Rule::NewObj)
            }
        },
        Expr::GlobalRefOf(a) => match a.as_value() {
            None => ctx(a, h, p, |a2| Expr::GlobalRefOf(Box::new(a2)))?,
            Some(Value::Oid(o)) if o.place == p => Step(
                Expr::Val(Value::GlobalRef(o)),
                h.clone(),
                Rule::NewGlobalRef,
            ),
            Some(_) => Thrown(ExcConst::BG, Rule::NewGlobalRefBad),
        },
        Expr::ValOf(a) => match a.as_value() {
            None => ctx(a, h, p, |a2| Expr::ValOf(Box::new(a2)))?,
            Some(Value::GlobalRef(o)) if o.place == p => Step(Expr::oid(o), h.clone(), Rule::Valof),
            Some(_) => Thrown(ExcConst::BG, Rule::ValofBad),
        },
    })
}

fn ctx(
    a: &Expr,
    h: &LocalHeap,
    p: Place,
    rebuild: impl FnOnce(Expr) -> Expr,
) -> Result<EvalOutcome, EngineFault> {
    Ok(match eval_step(a, h, p)? {
        EvalOutcome::Step(a2, h2, r) => EvalOutcome::Step(rebuild(a2), h2, r),
        thrown @ EvalOutcome::Thrown(..) => thrown,
        EvalOutcome::AlreadyValue => unreachable!("ctx is only entered on non-values"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalResult {
    Value(Value, LocalHeap),
    Thrown(ExcConst, LocalHeap),
}

/// Iterate `eval_step` to a value or an exception.
pub fn eval_full(e: &Expr, h: &LocalHeap, p: Place) -> Result<EvalResult, EngineFault> {
    let (mut e, mut h) = (e.clone(), h.clone());
    loop {
        match eval_step(&e, &h, p)? {
            EvalOutcome::AlreadyValue => return Ok(EvalResult::Value(e.as_value().unwrap(), h)),
            EvalOutcome::Thrown(x, _) => return Ok(EvalResult::Thrown(x, h)),
            EvalOutcome::Step(e2, h2, _) => {
                e = e2;
                h = h2;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tx10_syntax::{Name, Oid};

    #[test]
    fn new_obj_empty() {
        let h = LocalHeap::new();
        let out = eval_step(&Expr::ObjLit(vec![]), &h, 0).unwrap();
        let mut h2 = LocalHeap::new();
        h2.insert(Oid::new(0, 0), ObjRecord::new());
        assert_eq!(
            out,
            EvalOutcome::Step(Expr::oid(Oid::new(0, 0)), h2, Rule::NewObj)
        );
    }

    #[test]
    fn select_missing_field() {
        let mut h = LocalHeap::new();
        h.insert(Oid::new(0, 0), ObjRecord::new());
        let e = Expr::select(Expr::oid(Oid::new(0, 0)), "f");
        assert_eq!(
            eval_step(&e, &h, 0).unwrap(),
            EvalOutcome::Thrown(ExcConst::BF, Rule::SelectBad)
        );
    }

    #[test]
    fn valof_foreign_ref() {
        let e = Expr::ValOf(Box::new(Expr::Val(Value::GlobalRef(Oid::new(1, 0)))));
        assert_eq!(
            eval_step(&e, &LocalHeap::new(), 2).unwrap(),
            EvalOutcome::Thrown(ExcConst::BG, Rule::ValofBad)
        );
        let ok = eval_step(&e, &LocalHeap::new(), 1).unwrap();
        assert_eq!(
            ok,
            EvalOutcome::Step(Expr::oid(Oid::new(1, 0)), LocalHeap::new(), Rule::Valof)
        );
    }

    #[test]
    fn eval_full_examples() {
        let h = LocalHeap::new();
        let r = eval_full(&Expr::exc(ExcConst::E), &h, 0).unwrap();
        assert_eq!(r, EvalResult::Value(Value::Exc(ExcConst::E), h.clone()));

        let e = Expr::GlobalRefOf(Box::new(Expr::ObjLit(vec![])));
        match eval_full(&e, &h, 1).unwrap() {
            EvalResult::Value(v, h2) => {
                assert_eq!(v, Value::GlobalRef(Oid::new(1, 0)));
                assert_eq!(h2.len(), 1);
            }
            other => panic!("{other:?}"),
        }

        let e = Expr::select(Expr::obj(vec![("f", Expr::exc(ExcConst::E))]), "g");
        match eval_full(&e, &h, 0).unwrap() {
            EvalResult::Thrown(ExcConst::BF, h2) => {
                let rec: ObjRecord = [(Name::from("f"), Value::Exc(ExcConst::E))].into();
                assert_eq!(h2.get(&Oid::new(0, 0)), Some(&rec));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn object_fields_evaluate_in_written_order() {
        // {b: {}, a: {}} allocates b's object first
        let e = Expr::obj(vec![
            ("b", Expr::ObjLit(vec![])),
            ("a", Expr::ObjLit(vec![])),
        ]);
        let EvalResult::Value(Value::Oid(root), h) = eval_full(&e, &LocalHeap::new(), 0).unwrap()
        else {
            panic!()
        };
        assert_eq!(root, Oid::new(0, 2));
        assert_eq!(h[&root][&Name::from("b")], Value::Oid(Oid::new(0, 0)));
        assert_eq!(h[&root][&Name::from("a")], Value::Oid(Oid::new(0, 1)));
    }

    #[test]
    fn globalref_of_non_local() {
        let e = Expr::GlobalRefOf(Box::new(Expr::exc(ExcConst::E)));
        assert_eq!(
            eval_step(&e, &LocalHeap::new(), 0).unwrap(),
            EvalOutcome::Thrown(ExcConst::BG, Rule::NewGlobalRefBad)
        );
        let e = Expr::GlobalRefOf(Box::new(Expr::oid(Oid::new(1, 0))));
        assert!(matches!(
            eval_step(&e, &LocalHeap::new(), 0).unwrap(),
            EvalOutcome::Thrown(ExcConst::BG, _)
        ));
    }
}
