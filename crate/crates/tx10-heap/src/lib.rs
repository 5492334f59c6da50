//! Per-place heaps and the global heap, reachability, the place-local
//! invariant, rooted graph isomorphism, and the deterministic deep copy
//! performed by a place shift.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use tx10_syntax::{Name, Oid, Place, Value};

mod copy;
mod iso;

pub use copy::copy;
pub use iso::graph_isomorphic;

/// Field name to value. Iteration is in field-name order.
pub type ObjRecord = BTreeMap<Name, Value>;

pub type LocalHeap = BTreeMap<Oid, ObjRecord>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HeapError {
    #[error("dangling oid {0}")]
    DanglingOid(Oid),
    #[error("place {0} is not live")]
    PlaceNotLive(Place),
    #[error("place 0 cannot fail")]
    PlaceZero,
}

/// A partial map from places to local heaps; the domain is the set of
/// live places.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalHeap {
    places: BTreeMap<Place, LocalHeap>,
}

impl GlobalHeap {
    /// Empty heaps at places `0..n`.
    pub fn empty(n: u32) -> GlobalHeap {
        GlobalHeap {
            places: (0..n).map(|p| (p, LocalHeap::new())).collect(),
        }
    }

    pub fn from_places(places: BTreeMap<Place, LocalHeap>) -> GlobalHeap {
        GlobalHeap { places }
    }

    pub fn is_live(&self, p: Place) -> bool {
        self.places.contains_key(&p)
    }

    pub fn live_places(&self) -> impl Iterator<Item = Place> + '_ {
        self.places.keys().copied()
    }

    pub fn local(&self, p: Place) -> Option<&LocalHeap> {
        self.places.get(&p)
    }

    pub fn local_mut(&mut self, p: Place) -> Option<&mut LocalHeap> {
        self.places.get_mut(&p)
    }

    pub fn places(&self) -> &BTreeMap<Place, LocalHeap> {
        &self.places
    }

    /// The record of an oid in its home heap.
    pub fn object(&self, o: Oid) -> Option<&ObjRecord> {
        self.places.get(&o.place)?.get(&o)
    }

    /// `g[p -> h]`
    pub fn with_local(&self, p: Place, h: LocalHeap) -> GlobalHeap {
        let mut g = self.clone();
        g.places.insert(p, h);
        g
    }

    pub fn object_count(&self) -> usize {
        self.places.values().map(|h| h.len()).sum()
    }

    /// Canonical text: places ascending, oids by serial, fields by name.
    pub fn digest(&self) -> String {
        let mut out = String::new();
        for (i, (p, h)) in self.places.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{p}[").unwrap();
            for (j, (o, r)) in h.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                write!(out, "{o}{{").unwrap();
                for (k, (f, v)) in r.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    write!(out, "{f}={v}").unwrap();
                }
                out.push('}');
            }
            out.push(']');
        }
        out
    }
}

impl fmt::Display for GlobalHeap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digest())
    }
}

/// The `count` least serials at `q` not used in `h`, ascending.
pub fn fresh_oids(h: &LocalHeap, q: Place, count: usize) -> Vec<Oid> {
    let mut out = Vec::with_capacity(count);
    let mut serial = 0u32;
    while out.len() < count {
        let o = Oid::new(q, serial);
        if !h.contains_key(&o) {
            out.push(o);
        }
        serial += 1;
    }
    out
}

/// Remove a failed place. Place 0 never fails.
pub fn fail_place(g: &GlobalHeap, p: Place) -> Result<GlobalHeap, HeapError> {
    if p == 0 {
        return Err(HeapError::PlaceZero);
    }
    if !g.is_live(p) {
        return Err(HeapError::PlaceNotLive(p));
    }
    let mut out = g.clone();
    out.places.remove(&p);
    Ok(out)
}

/// Values reachable from `root` by following fields of local oids in
/// their home heaps. Global refs are leaves.
pub fn reachable(g: &GlobalHeap, root: Value) -> Result<BTreeSet<Value>, HeapError> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        if let Value::Oid(o) = v {
            let rec = g.object(o).ok_or(HeapError::DanglingOid(o))?;
            stack.extend(rec.values().copied());
        }
    }
    Ok(seen)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Locality {
    Ok,
    Violation {
        place: Place,
        oid: Oid,
        value: Option<Value>,
    },
}

impl Locality {
    pub fn is_ok(&self) -> bool {
        matches!(self, Locality::Ok)
    }
}

/// Every heap stores only its own oids, and fields of those objects
/// hold local oids present in the heap, global refs, or exceptions.
pub fn is_place_local(g: &GlobalHeap) -> Locality {
    for (&q, h) in &g.places {
        for (&o, r) in h {
            if o.place != q {
                return Locality::Violation {
                    place: q,
                    oid: o,
                    value: None,
                };
            }
            for &v in r.values() {
                if let Value::Oid(o2) = v {
                    if o2.place != q || !h.contains_key(&o2) {
                        return Locality::Violation {
                            place: q,
                            oid: o,
                            value: Some(v),
                        };
                    }
                }
            }
        }
    }
    Locality::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use tx10_syntax::ExcConst;

    fn heap_with(objs: &[(Oid, &[(&str, Value)])], places: u32) -> GlobalHeap {
        let mut g = GlobalHeap::empty(places);
        for (o, fields) in objs {
            let rec: ObjRecord = fields.iter().map(|(f, v)| (Name::from(*f), *v)).collect();
            g.local_mut(o.place).unwrap().insert(*o, rec);
        }
        g
    }

    #[test]
    fn fresh_oids_examples() {
        let h = LocalHeap::new();
        assert_eq!(fresh_oids(&h, 2, 1), vec![Oid::new(2, 0)]);
        let g = heap_with(&[(Oid::new(2, 0), &[]), (Oid::new(2, 1), &[])], 3);
        assert_eq!(
            fresh_oids(g.local(2).unwrap(), 2, 2),
            vec![Oid::new(2, 2), Oid::new(2, 3)]
        );
        let g = heap_with(&[(Oid::new(2, 0), &[]), (Oid::new(2, 2), &[])], 3);
        assert_eq!(
            fresh_oids(g.local(2).unwrap(), 2, 2),
            vec![Oid::new(2, 1), Oid::new(2, 3)]
        );
    }

    #[test]
    fn reachable_examples() {
        let g = GlobalHeap::empty(1);
        let e = Value::Exc(ExcConst::E);
        assert_eq!(reachable(&g, e).unwrap(), [e].into());
        let o = Oid::new(0, 0);
        let g = heap_with(&[(o, &[("f", Value::Oid(o))])], 1);
        assert_eq!(
            reachable(&g, Value::Oid(o)).unwrap(),
            [Value::Oid(o)].into()
        );
        let w = Value::GlobalRef(Oid::new(3, 0));
        let g = heap_with(&[(o, &[("f", w)])], 1);
        assert_eq!(
            reachable(&g, Value::Oid(o)).unwrap(),
            [Value::Oid(o), w].into()
        );
    }

    #[test]
    fn reachable_reports_dangling() {
        let o = Oid::new(0, 0);
        let g = heap_with(&[(o, &[("f", Value::Oid(Oid::new(0, 9)))])], 1);
        assert_eq!(
            reachable(&g, Value::Oid(o)),
            Err(HeapError::DanglingOid(Oid::new(0, 9)))
        );
    }

    #[test]
    fn place_locality_examples() {
        assert!(is_place_local(&GlobalHeap::empty(1)).is_ok());
        let mut g = GlobalHeap::empty(2);
        g.local_mut(0)
            .unwrap()
            .insert(Oid::new(1, 0), ObjRecord::new());
        assert!(matches!(
            is_place_local(&g),
            Locality::Violation { place: 0, .. }
        ));
        let o = Oid::new(0, 0);
        let g = heap_with(&[(o, &[("f", Value::Oid(Oid::new(1, 7)))])], 2);
        assert!(
            matches!(is_place_local(&g), Locality::Violation { place: 0, oid, .. } if oid == o)
        );
    }

    #[test]
    fn fail_place_examples() {
        let g = heap_with(&[(Oid::new(2, 0), &[("f", Value::Exc(ExcConst::E))])], 3);
        let g1 = fail_place(&g, 1).unwrap();
        assert_eq!(g1.live_places().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(fail_place(&g1, 1), Err(HeapError::PlaceNotLive(1)));
        assert_eq!(fail_place(&g1, 0), Err(HeapError::PlaceZero));
        assert_eq!(g1.digest(), "0[] 2[o(2,0){f=E}]");
    }

    #[test]
    fn digest_format() {
        let o = Oid::new(0, 0);
        let g = heap_with(
            &[
                (
                    o,
                    &[
                        ("g", Value::GlobalRef(Oid::new(1, 0))),
                        ("f", Value::Oid(o)),
                    ],
                ),
                (Oid::new(1, 0), &[]),
            ],
            2,
        );
        assert_eq!(g.digest(), "0[o(0,0){f=o(0,0),g=gr(1,0)}] 1[o(1,0){}]");
    }
}
