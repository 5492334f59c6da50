use std::collections::BTreeMap;

use tx10_syntax::{Oid, Place, Value};

use crate::{fresh_oids, GlobalHeap, HeapError, ObjRecord};

/// Deep copy of the object graph rooted at `v` into place `q`.
///
/// Non-oid values are returned unchanged. Otherwise the graph is walked
/// depth first in field order; each oid gets the next least unused
/// serial at `q` on its first visit. Global refs are copied as is.
pub fn copy(v: Value, q: Place, g: &GlobalHeap) -> Result<(Value, GlobalHeap), HeapError> {
    let target = g.local(q).ok_or(HeapError::PlaceNotLive(q))?;
    let Value::Oid(root) = v else {
        return Ok((v, g.clone()));
    };

    // First-visit order, iterative pre-order DFS.
    let mut order: Vec<Oid> = Vec::new();
    let mut seen: BTreeMap<Oid, usize> = BTreeMap::new();
    let mut stack = vec![root];
    while let Some(o) = stack.pop() {
        if seen.contains_key(&o) {
            continue;
        }
        let rec = g.object(o).ok_or(HeapError::DanglingOid(o))?;
        seen.insert(o, order.len());
        order.push(o);
        // push in reverse so the first field is visited first
        for val in rec.values().rev() {
            if let Value::Oid(next) = val {
                if !seen.contains_key(next) {
                    stack.push(*next);
                }
            }
        }
    }

    let fresh = fresh_oids(target, q, order.len());
    let rename = |o: &Oid| fresh[seen[o]];
    let mut h = target.clone();
    for o in &order {
        let rec = g.object(*o).expect("visited oids exist");
        let copied: ObjRecord = rec
            .iter()
            .map(|(f, val)| {
                let nv = match val {
                    Value::Oid(x) => Value::Oid(rename(x)),
                    other => *other,
                };
                (f.clone(), nv)
            })
            .collect();
        h.insert(rename(o), copied);
    }
    Ok((Value::Oid(rename(&root)), g.with_local(q, h)))
}
