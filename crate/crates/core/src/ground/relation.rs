use std::collections::HashMap;

use indexmap::IndexSet;

use super::value::Value;

pub(crate) type Tuple = Box<[Value]>;

/// A set of tuples in insertion order, with hash indexes on column subsets
/// built on demand and kept up to date by `insert`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Relation {
    tuples: IndexSet<Tuple>,
    indexes: HashMap<u64, HashMap<Tuple, Vec<u32>>>,
}

impl Relation {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        self.tuples.contains(t)
    }

    pub fn get(&self, i: u32) -> &[Value] {
        &self.tuples[i as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Value]> {
        self.tuples.iter().map(|t| &**t)
    }

    /// Returns false when the tuple was already present.
    pub fn insert(&mut self, t: Tuple) -> bool {
        if self.tuples.contains(&t) {
            return false;
        }
        let id = self.tuples.len() as u32;
        for (&mask, index) in &mut self.indexes {
            index.entry(project(&t, mask)).or_default().push(id);
        }
        self.tuples.insert(t);
        true
    }

    pub fn ensure_index(&mut self, mask: u64) {
        if mask == 0 || self.indexes.contains_key(&mask) {
            return;
        }
        let mut index: HashMap<Tuple, Vec<u32>> = HashMap::new();
        for (i, t) in self.tuples.iter().enumerate() {
            index.entry(project(t, mask)).or_default().push(i as u32);
        }
        self.indexes.insert(mask, index);
    }

    /// Ids of tuples whose columns in `mask` equal `key`, ascending.
    /// The index for `mask` must exist.
    pub fn lookup(&self, mask: u64, key: &[Value]) -> &[u32] {
        self.indexes[&mask].get(key).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn project(t: &[Value], mask: u64) -> Tuple {
    t.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| *v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> Tuple {
        v.iter().map(|&n| Value::Int(n)).collect()
    }

    #[test]
    fn index_tracks_inserts() {
        let mut r = Relation::default();
        assert!(r.insert(t(&[1, 2])));
        assert!(!r.insert(t(&[1, 2])));
        r.ensure_index(0b01);
        r.insert(t(&[1, 3]));
        r.insert(t(&[2, 3]));
        assert_eq!(r.lookup(0b01, &[Value::Int(1)]), &[0, 1]);
        assert_eq!(r.lookup(0b01, &[Value::Int(5)]), &[] as &[u32]);
        r.ensure_index(0b10);
        assert_eq!(r.lookup(0b10, &[Value::Int(3)]), &[1, 2]);
        assert_eq!(r.len(), 3);
        assert!(r.contains(&[Value::Int(2), Value::Int(3)]));
    }
}
