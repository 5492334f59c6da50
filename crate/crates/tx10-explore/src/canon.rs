//! Canonical oid naming, used to identify configurations that differ
//! only by a renaming of object ids.

use std::collections::{BTreeMap, VecDeque};

use tx10_heap::{GlobalHeap, LocalHeap, ObjRecord};
use tx10_sem::Config;
use tx10_syntax::{Oid, Place, Stmt, Value};

type Renaming = BTreeMap<Oid, Oid>;
type Rendering = Vec<Vec<(String, Value)>>;

struct Namer<'a> {
    g: &'a GlobalHeap,
    map: Renaming,
    next: BTreeMap<Place, u32>,
}

impl<'a> Namer<'a> {
    fn name(&mut self, o: Oid) -> bool {
        if self.map.contains_key(&o) {
            return false;
        }
        let n = self.next.entry(o.place).or_insert(0);
        self.map.insert(o, Oid::new(o.place, *n));
        *n += 1;
        true
    }

    /// Name `roots` in order, then everything reachable breadth first.
    fn bfs(&mut self, roots: impl IntoIterator<Item = Oid>) {
        let mut queue: VecDeque<Oid> = VecDeque::new();
        for o in roots {
            if self.name(o) {
                queue.push_back(o);
            }
        }
        while let Some(o) = queue.pop_front() {
            let Some(rec) = self.g.object(o) else {
                continue;
            };
            for v in rec.values() {
                if let Some(o2) = v.named_oid() {
                    if self.name(o2) {
                        queue.push_back(o2);
                    }
                }
            }
        }
    }

    fn render(&self, o: Oid) -> Vec<(String, Value)> {
        self.g.object(o).map_or_else(Vec::new, |rec| {
            rec.iter()
                .map(|(f, v)| (f.to_string(), rename_value(*v, &self.map)))
                .collect()
        })
    }
}

fn rename_value(v: Value, m: &Renaming) -> Value {
    match v {
        Value::Oid(o) => Value::Oid(*m.get(&o).unwrap_or(&o)),
        Value::GlobalRef(o) => Value::GlobalRef(*m.get(&o).unwrap_or(&o)),
        other => other,
    }
}

/// The canonical renaming for statements sharing one heap.
///
/// Oids are named per place with consecutive serials: first by
/// occurrence in the statements, left to right, closing over fields
/// breadth first; then the unreachable heap objects, choosing each next
/// root as the one whose component renders least.
pub fn canonical_renaming(stmts: &[&Stmt], g: &GlobalHeap) -> Renaming {
    let mut namer = Namer {
        g,
        map: Renaming::new(),
        next: BTreeMap::new(),
    };
    let roots: Vec<Oid> = stmts
        .iter()
        .flat_map(|s| s.values())
        .filter_map(|v| v.named_oid())
        .collect();
    namer.bfs(roots);

    loop {
        let rest: Vec<Oid> = g
            .places()
            .values()
            .flat_map(|h| h.keys().copied())
            .filter(|o| !namer.map.contains_key(o))
            .collect();
        if rest.is_empty() {
            break;
        }
        let mut best: Option<(Rendering, Oid)> = None;
        for &c in &rest {
            let mut trial = Namer {
                g,
                map: namer.map.clone(),
                next: namer.next.clone(),
            };
            let before: Vec<Oid> = trial.map.keys().copied().collect();
            trial.bfs([c]);
            let mut added: Vec<(Oid, Oid)> = trial
                .map
                .iter()
                .filter(|(k, _)| !before.contains(k))
                .map(|(k, v)| (*v, *k))
                .collect();
            added.sort();
            let rendering: Vec<_> = added.iter().map(|(_, old)| trial.render(*old)).collect();
            let key = (rendering, c);
            if best.as_ref().is_none_or(|b| key.0 < b.0) {
                best = Some(key);
            }
        }
        namer.bfs([best.expect("nonempty").1]);
    }
    namer.map
}

pub fn rename_stmt(s: &Stmt, m: &Renaming) -> Stmt {
    s.map_values(&|v| rename_value(v, m))
}

pub fn rename_heap(g: &GlobalHeap, m: &Renaming) -> GlobalHeap {
    let places = g
        .places()
        .iter()
        .map(|(&p, h)| {
            let h2: LocalHeap = h
                .iter()
                .map(|(o, r)| {
                    let r2: ObjRecord = r
                        .iter()
                        .map(|(f, v)| (f.clone(), rename_value(*v, m)))
                        .collect();
                    (*m.get(o).unwrap_or(o), r2)
                })
                .collect();
            (p, h2)
        })
        .collect();
    GlobalHeap::from_places(places)
}

pub fn rename_config(k: &Config, m: &Renaming) -> Config {
    match k {
        Config::Running(s, g) => Config::Running(rename_stmt(s, m), rename_heap(g, m)),
        Config::Done(g) => Config::Done(rename_heap(g, m)),
    }
}

pub fn canonicalize(k: &Config) -> Config {
    let stmts: Vec<&Stmt> = k.stmt().into_iter().collect();
    rename_config(k, &canonical_renaming(&stmts, k.heap()))
}

/// Canonical form of two configurations over the same heap, renamed
/// jointly. Heaps that differ are canonicalized separately.
pub fn canonicalize_pair(k1: &Config, k2: &Config) -> (Config, Config) {
    if k1.heap() != k2.heap() {
        return (canonicalize(k1), canonicalize(k2));
    }
    let stmts: Vec<&Stmt> = k1.stmt().into_iter().chain(k2.stmt()).collect();
    let m = canonical_renaming(&stmts, k1.heap());
    (rename_config(k1, &m), rename_config(k2, &m))
}
