use std::collections::BTreeMap;

use tx10_syntax::{Oid, Value};

use crate::{GlobalHeap, HeapError};

/// Rooted, field-labelled isomorphism between the object graphs at `r1`
/// in `g1` and `r2` in `g2`. Global refs and exceptions must be equal.
/// Returns the oid bijection on success.
pub fn graph_isomorphic(
    g1: &GlobalHeap,
    r1: Value,
    g2: &GlobalHeap,
    r2: Value,
) -> Result<Option<BTreeMap<Oid, Oid>>, HeapError> {
    let mut fwd: BTreeMap<Oid, Oid> = BTreeMap::new();
    let mut back: BTreeMap<Oid, Oid> = BTreeMap::new();
    let mut work = vec![(r1, r2)];
    while let Some((a, b)) = work.pop() {
        match (a, b) {
            (Value::Oid(x), Value::Oid(y)) => {
                match (fwd.get(&x), back.get(&y)) {
                    (Some(&y2), _) if y2 == y => continue,
                    (None, None) => {}
                    _ => return Ok(None),
                }
                fwd.insert(x, y);
                back.insert(y, x);
                let rx = g1.object(x).ok_or(HeapError::DanglingOid(x))?;
                let ry = g2.object(y).ok_or(HeapError::DanglingOid(y))?;
                if rx.len() != ry.len() || rx.keys().ne(ry.keys()) {
                    return Ok(None);
                }
                work.extend(rx.values().copied().zip(ry.values().copied()));
            }
            (Value::Oid(_), _) | (_, Value::Oid(_)) => return Ok(None),
            _ if a == b => {}
            _ => return Ok(None),
        }
    }
    Ok(Some(fwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ObjRecord;
    use tx10_syntax::Name;

    fn put(g: &mut GlobalHeap, o: Oid, fields: &[(&str, Value)]) {
        let r: ObjRecord = fields.iter().map(|(f, v)| (Name::from(*f), *v)).collect();
        g.local_mut(o.place).unwrap().insert(o, r);
    }

    #[test]
    fn single_empty_object() {
        let mut g1 = GlobalHeap::empty(2);
        let mut g2 = GlobalHeap::empty(2);
        put(&mut g1, Oid::new(0, 0), &[]);
        put(&mut g2, Oid::new(1, 3), &[]);
        let iso = graph_isomorphic(
            &g1,
            Value::Oid(Oid::new(0, 0)),
            &g2,
            Value::Oid(Oid::new(1, 3)),
        );
        assert_eq!(
            iso.unwrap().unwrap(),
            [(Oid::new(0, 0), Oid::new(1, 3))].into()
        );
    }

    #[test]
    fn cycle_lengths_differ() {
        let (a, b) = (Oid::new(0, 0), Oid::new(0, 1));
        let mut g1 = GlobalHeap::empty(1);
        put(&mut g1, a, &[("f", Value::Oid(b))]);
        put(&mut g1, b, &[("f", Value::Oid(a))]);
        let mut g2 = GlobalHeap::empty(1);
        put(&mut g2, a, &[("f", Value::Oid(a))]);
        assert_eq!(
            graph_isomorphic(&g1, Value::Oid(a), &g2, Value::Oid(a)).unwrap(),
            None
        );
    }

    #[test]
    fn refs_must_be_fixed() {
        let a = Oid::new(0, 0);
        let mut g1 = GlobalHeap::empty(1);
        put(&mut g1, a, &[("f", Value::GlobalRef(Oid::new(1, 0)))]);
        let mut g2 = GlobalHeap::empty(1);
        put(&mut g2, a, &[("f", Value::GlobalRef(Oid::new(2, 0)))]);
        assert_eq!(
            graph_isomorphic(&g1, Value::Oid(a), &g2, Value::Oid(a)).unwrap(),
            None
        );
    }
}
