use std::collections::{BTreeMap, VecDeque};

use proptest::prelude::*;
use tx10_heap::{copy, graph_isomorphic, is_place_local, GlobalHeap, ObjRecord};
use tx10_syntax::{ExcConst, Name, Oid, Place, Value};

/// Field values by shape: a local edge to object i, a global ref to
/// object i at place 2, or an exception.
#[derive(Clone, Debug)]
enum Edge {
    Local(usize),
    Remote(usize),
    Exc,
}

fn edge() -> impl Strategy<Value = Edge> {
    prop_oneof![
        (0..8usize).prop_map(Edge::Local),
        (0..3usize).prop_map(Edge::Remote),
        Just(Edge::Exc)
    ]
}

/// Objects at place 1 (the source) plus three objects at place 2 that
/// the global refs point to.
fn graph() -> impl Strategy<Value = (GlobalHeap, Value)> {
    prop::collection::vec(prop::collection::vec(edge(), 0..4), 1..=8).prop_map(|objs| {
        let n = objs.len();
        let mut g = GlobalHeap::empty(3);
        for i in 0..3 {
            g.local_mut(2)
                .unwrap()
                .insert(Oid::new(2, i), ObjRecord::new());
        }
        for (i, fields) in objs.iter().enumerate() {
            let rec: ObjRecord = fields
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let v = match e {
                        Edge::Local(j) => Value::Oid(Oid::new(1, (*j % n) as u32)),
                        Edge::Remote(j) => Value::GlobalRef(Oid::new(2, *j as u32)),
                        Edge::Exc => Value::Exc(ExcConst::E),
                    };
                    (Name::from(format!("f{k}")), v)
                })
                .collect();
            g.local_mut(1).unwrap().insert(Oid::new(1, i as u32), rec);
        }
        (g, Value::Oid(Oid::new(1, 0)))
    })
}

/// Independent oracle: the reachable graph relabelled by breadth-first
/// discovery order, with fields in name order.
fn canonical(g: &GlobalHeap, root: Value) -> Vec<Vec<(String, String)>> {
    let mut index: BTreeMap<Oid, usize> = BTreeMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    if let Value::Oid(o) = root {
        index.insert(o, 0);
        order.push(o);
        queue.push_back(o);
    }
    while let Some(o) = queue.pop_front() {
        for v in g.object(o).unwrap().values() {
            if let Value::Oid(t) = v {
                if !index.contains_key(t) {
                    index.insert(*t, order.len());
                    order.push(*t);
                    queue.push_back(*t);
                }
            }
        }
    }
    order
        .iter()
        .map(|o| {
            g.object(*o)
                .unwrap()
                .iter()
                .map(|(f, v)| {
                    let shown = match v {
                        Value::Oid(t) => format!("#{}", index[t]),
                        other => other.to_string(),
                    };
                    (f.to_string(), shown)
                })
                .collect()
        })
        .collect()
}

fn reachable_count(g: &GlobalHeap, root: Value) -> usize {
    canonical(g, root).len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn copy_is_an_isomorphic_fresh_graph((g, root) in graph(), q in prop::sample::select(vec![0 as Place, 2])) {
        let before_q = g.local(q).unwrap().len();
        let (v, g2) = copy(root, q, &g).unwrap();
        let Value::Oid(new_root) = v else { panic!("copy of an oid must be an oid") };
        prop_assert_eq!(new_root.place, q);
        prop_assert!(is_place_local(&g2).is_ok());
        // the source is untouched, and q only grows by the reachable part
        prop_assert_eq!(g2.local(1), g.local(1));
        prop_assert_eq!(g2.local(q).unwrap().len(), before_q + reachable_count(&g, root));
        prop_assert_eq!(canonical(&g, root), canonical(&g2, v));
        prop_assert!(graph_isomorphic(&g, root, &g2, v).unwrap().is_some());
    }

    #[test]
    fn copied_objects_only_reach_copies_and_global_refs((g, root) in graph()) {
        let (v, g2) = copy(root, 0, &g).unwrap();
        let fresh: Vec<Oid> = g2.local(0).unwrap().keys().copied().collect();
        for o in &fresh {
            for val in g2.object(*o).unwrap().values() {
                match val {
                    Value::Oid(t) => prop_assert!(fresh.contains(t)),
                    Value::GlobalRef(t) => prop_assert_eq!(t.place, 2),
                    _ => {}
                }
            }
        }
        prop_assert_eq!(fresh.len(), reachable_count(&g2, v));
    }

    #[test]
    fn isomorphism_is_reflexive((g, root) in graph()) {
        let m = graph_isomorphic(&g, root, &g, root).unwrap().unwrap();
        prop_assert!(m.iter().all(|(a, b)| a == b));
    }
}

#[test]
fn a_changed_field_breaks_isomorphism() {
    let mut g = GlobalHeap::empty(3);
    let o = Oid::new(1, 0);
    g.local_mut(1)
        .unwrap()
        .insert(o, [(Name::from("f"), Value::Oid(o))].into());
    let (v, mut g2) = copy(Value::Oid(o), 0, &g).unwrap();
    let Value::Oid(c) = v else { unreachable!() };
    g2.local_mut(0)
        .unwrap()
        .get_mut(&c)
        .unwrap()
        .insert(Name::from("f"), Value::Exc(ExcConst::E));
    assert!(graph_isomorphic(&g, Value::Oid(o), &g2, v)
        .unwrap()
        .is_none());
    assert_ne!(canonical(&g, Value::Oid(o)), canonical(&g2, v));
}
