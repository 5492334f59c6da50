//! A finite family of environment moves: changes another activity or
//! the outside world could make to the heap between two steps.

use std::collections::BTreeSet;
use std::fmt;

use tx10_heap::{fail_place, fresh_oids, GlobalHeap, ObjRecord};
use tx10_sem::Config;
use tx10_syntax::{ExcConst, Name, Oid, Place, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnvMove {
    Identity,
    UpdateField(Place, Oid, Name, Value),
    AllocEmpty(Place),
    RemovePlace(Place),
}

impl fmt::Display for EnvMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvMove::Identity => f.write_str("id"),
            EnvMove::UpdateField(_, o, x, v) => write!(f, "{o}.{x}:={v}"),
            EnvMove::AllocEmpty(p) => write!(f, "alloc@{p}"),
            EnvMove::RemovePlace(p) => write!(f, "fail@{p}"),
        }
    }
}

impl EnvMove {
    pub fn apply_heap(&self, g: &GlobalHeap) -> GlobalHeap {
        match self {
            EnvMove::Identity => g.clone(),
            EnvMove::UpdateField(p, o, x, v) => {
                let mut g2 = g.clone();
                if let Some(rec) = g2.local_mut(*p).and_then(|h| h.get_mut(o)) {
                    rec.insert(x.clone(), *v);
                }
                g2
            }
            EnvMove::AllocEmpty(p) => {
                let mut g2 = g.clone();
                if let Some(h) = g2.local_mut(*p) {
                    let o = fresh_oids(h, *p, 1)[0];
                    h.insert(o, ObjRecord::new());
                }
                g2
            }
            EnvMove::RemovePlace(p) => fail_place(g, *p).unwrap_or_else(|_| g.clone()),
        }
    }

    pub fn apply(&self, k: &Config) -> Config {
        match k {
            Config::Running(s, g) => Config::Running(s.clone(), self.apply_heap(g)),
            Config::Done(g) => Config::Done(self.apply_heap(g)),
        }
    }
}

fn global_refs(k: &Config) -> BTreeSet<Value> {
    let g = k.heap();
    let in_heap = g
        .places()
        .values()
        .flat_map(|h| h.values())
        .flat_map(|r| r.values().copied());
    let in_stmt = k.stmt().into_iter().flat_map(|s| s.values());
    in_heap
        .chain(in_stmt)
        .filter(|v| matches!(v, Value::GlobalRef(_)))
        .collect()
}

/// Oids reachable from some field or from the statement.
fn referenced(k: &Config) -> BTreeSet<Oid> {
    let in_heap = k
        .heap()
        .places()
        .values()
        .flat_map(|h| h.values())
        .flat_map(|r| r.values().copied());
    let in_stmt = k.stmt().into_iter().flat_map(|s| s.values());
    in_heap
        .chain(in_stmt)
        .filter_map(|v| match v {
            Value::Oid(o) | Value::GlobalRef(o) => Some(o),
            _ => None,
        })
        .collect()
}

/// Moves applicable to `k`, in a fixed order. Every move keeps the heap
/// place-local; only `RemovePlace` shrinks the set of places.
///
/// `AllocEmpty(p)` is left out while `p` already holds an empty object
/// nothing refers to: another one adds nothing the program could see,
/// and unbounded allocation would swamp the game.
pub fn env_move_universe(k: &Config, resilient: bool) -> Vec<EnvMove> {
    let g = k.heap();
    let grefs = global_refs(k);
    let refs = referenced(k);
    let mut out = vec![EnvMove::Identity];
    for (&p, h) in g.places() {
        let mut universe: Vec<Value> = h.keys().map(|&o| Value::Oid(o)).collect();
        universe.extend(grefs.iter().copied());
        universe.push(Value::Exc(ExcConst::E));
        for (&o, rec) in h {
            for x in rec.keys() {
                for &v in &universe {
                    out.push(EnvMove::UpdateField(p, o, x.clone(), v));
                }
            }
        }
    }
    let has_spare = |p: Place| {
        g.local(p)
            .is_some_and(|h| h.iter().any(|(o, r)| r.is_empty() && !refs.contains(o)))
    };
    out.extend(
        g.live_places()
            .filter(|&p| !has_spare(p))
            .map(EnvMove::AllocEmpty),
    );
    if resilient {
        out.extend(
            g.live_places()
                .filter(|&p| p != 0)
                .map(EnvMove::RemovePlace),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tx10_heap::{is_place_local, Locality};
    use tx10_syntax::Stmt;

    #[test]
    fn empty_single_place() {
        let k = Config::Running(Stmt::skip(), GlobalHeap::empty(1));
        assert_eq!(
            env_move_universe(&k, false),
            vec![EnvMove::Identity, EnvMove::AllocEmpty(0)]
        );
    }

    #[test]
    fn one_field_counts() {
        let mut g = GlobalHeap::empty(2);
        let o = Oid::new(1, 0);
        g.local_mut(1)
            .unwrap()
            .insert(o, [(Name::from("f"), Value::Exc(ExcConst::E))].into());
        let k = Config::Done(g);
        // universe at place 1: its one oid and E
        assert_eq!(env_move_universe(&k, false).len(), 1 + 2 + 2);
        let all = env_move_universe(&k, true);
        assert_eq!(all.last(), Some(&EnvMove::RemovePlace(1)));
        for m in all {
            assert_eq!(is_place_local(m.apply(&k).heap()), Locality::Ok, "{m}");
        }
    }
}
