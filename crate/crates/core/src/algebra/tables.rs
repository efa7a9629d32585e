use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AlgebraError, FiniteAlgebra};
use crate::fragment::Fragment;
use crate::relation::Substitution;

const MAX_TABLE_ENTRIES: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("malformed algebra file: {0}")]
    Json(String),
    #[error("missing table: {0}")]
    Missing(String),
    #[error("table {table} has entry {value} out of range (bound {bound})")]
    Range { table: String, value: usize, bound: usize },
    #[error("table {table} has length {found}, expected {expected}")]
    Shape {
        table: String,
        expected: usize,
        found: usize,
    },
}

/// Sorts above the bound are answered by `source`; `to_source` and
/// `from_source` translate indices on the shared sorts.
pub(crate) struct Extension {
    source: FiniteAlgebra,
    to_source: Vec<Vec<usize>>,
    from_source: Vec<HashMap<usize, usize>>,
}

pub(crate) struct Tables {
    sizes: Vec<usize>,
    zero: Vec<usize>,
    one: Vec<usize>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    neg: Option<Vec<Vec<usize>>>,
    subst: HashMap<Substitution, Vec<usize>>,
    exists: Vec<Vec<usize>>,
    delta: HashMap<(usize, usize, usize), usize>,
    pub extension: Option<Extension>,
}

#[derive(Serialize, Deserialize)]
struct SortFile {
    size: usize,
    zero: usize,
    one: usize,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    neg: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    fragment: String,
    max_sort: usize,
    sorts: Vec<SortFile>,
    #[serde(default)]
    subst: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    exists: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    delta: BTreeMap<String, usize>,
}

fn delta_key(n: usize, i: usize, j: usize) -> String {
    format!("{n}:{i},{j}")
}

impl Tables {
    fn beyond(&self, sort: usize, max_sort: usize) -> Result<&Extension, AlgebraError> {
        self.extension
            .as_ref()
            .ok_or(AlgebraError::InsufficientSorts { sort, max_sort })
    }

    fn up(&self, sort: usize, a: usize, max_sort: usize) -> usize {
        match &self.extension {
            Some(ext) if sort <= max_sort => ext.to_source[sort][a],
            _ => a,
        }
    }

    fn down(&self, sort: usize, a: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        match &self.extension {
            Some(ext) if sort <= max_sort => ext.from_source[sort]
                .get(&a)
                .copied()
                .ok_or(AlgebraError::NotConservative { sort: max_sort + 1, grown: sort }),
            _ => Ok(a),
        }
    }

    pub fn size(&self, sort: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if sort <= max_sort {
            return Ok(self.sizes[sort]);
        }
        self.beyond(sort, max_sort)?.source.size(sort)
    }

    pub fn zero(&self, sort: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if sort <= max_sort {
            return Ok(self.zero[sort]);
        }
        self.beyond(sort, max_sort)?.source.zero(sort)
    }

    pub fn one(&self, sort: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if sort <= max_sort {
            return Ok(self.one[sort]);
        }
        self.beyond(sort, max_sort)?.source.one(sort)
    }

    pub fn meet(&self, sort: usize, a: usize, b: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if sort <= max_sort {
            return Ok(self.meet[sort][a * self.sizes[sort] + b]);
        }
        self.beyond(sort, max_sort)?.source.meet(sort, a, b)
    }

    pub fn join(&self, sort: usize, a: usize, b: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if sort <= max_sort {
            return Ok(self.join[sort][a * self.sizes[sort] + b]);
        }
        self.beyond(sort, max_sort)?.source.join(sort, a, b)
    }

    pub fn neg(&self, sort: usize, a: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if sort <= max_sort {
            let table = self.neg.as_ref().ok_or_else(|| TableError::Missing("neg".into()))?;
            return Ok(table[sort][a]);
        }
        self.beyond(sort, max_sort)?.source.neg(sort, a)
    }

    pub fn subst(&self, alpha: &Substitution, a: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        let (n, k) = (alpha.dom(), alpha.cod());
        if n <= max_sort && k <= max_sort {
            let table = self
                .subst
                .get(alpha)
                .ok_or_else(|| TableError::Missing(alpha.to_string()))?;
            return Ok(table[a]);
        }
        let ext = self.beyond(n.max(k), max_sort)?;
        let image = ext.source.subst(alpha, self.up(n, a, max_sort))?;
        self.down(k, image, max_sort)
    }

    pub fn exists(&self, n: usize, a: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if n < max_sort {
            let table = self
                .exists
                .get(n)
                .ok_or_else(|| TableError::Missing(format!("exists {n}")))?;
            return Ok(table[a]);
        }
        let ext = self.beyond(n + 1, max_sort)?;
        let image = ext.source.exists(n, self.up(n + 1, a, max_sort))?;
        self.down(n, image, max_sort)
    }

    pub fn delta(&self, n: usize, i: usize, j: usize, max_sort: usize) -> Result<usize, AlgebraError> {
        if n <= max_sort {
            return self
                .delta
                .get(&(n, i, j))
                .copied()
                .ok_or_else(|| TableError::Missing(delta_key(n, i, j)).into());
        }
        self.beyond(n, max_sort)?.source.delta(n, i, j)
    }

    pub fn set_meet(&mut self, sort: usize, a: usize, b: usize, value: usize) -> Result<(), AlgebraError> {
        let size = *self.sizes.get(sort).ok_or(AlgebraError::InsufficientSorts {
            sort,
            max_sort: self.sizes.len() - 1,
        })?;
        for x in [a, b, value] {
            if x >= size {
                return Err(AlgebraError::Element { sort, index: x, size });
            }
        }
        self.meet[sort][a * size + b] = value;
        Ok(())
    }

    pub fn tabulate(alg: &FiniteAlgebra, shuffle: Option<u64>, extend: bool) -> Result<Tables, AlgebraError> {
        let fragment = alg.fragment();
        let max = alg.max_sort();
        let mut rng = shuffle.map(ChaCha8Rng::seed_from_u64);
        let mut sizes = Vec::new();
        let mut forward = Vec::new();
        let mut backward = Vec::new();
        for sort in 0..=max {
            let size = alg.size(sort)?;
            if size.saturating_mul(size) > MAX_TABLE_ENTRIES {
                return Err(AlgebraError::ResourceLimit {
                    sort,
                    size: format!("{size} squared table entries"),
                    cap: MAX_TABLE_ENTRIES,
                });
            }
            let mut order: Vec<usize> = (0..size).collect();
            if let Some(rng) = rng.as_mut() {
                order.shuffle(rng);
            }
            let mut position = vec![0; size];
            for (new, &old) in order.iter().enumerate() {
                position[old] = new;
            }
            sizes.push(size);
            forward.push(position);
            backward.push(order);
        }
        let p = |sort: usize, a: usize| forward[sort][a];
        let mut tables = Tables {
            sizes: sizes.clone(),
            zero: Vec::new(),
            one: Vec::new(),
            meet: Vec::new(),
            join: Vec::new(),
            neg: fragment.has_negation().then(Vec::new),
            subst: HashMap::new(),
            exists: Vec::new(),
            delta: HashMap::new(),
            extension: None,
        };
        for sort in 0..=max {
            let size = sizes[sort];
            tables.zero.push(p(sort, alg.zero(sort)?));
            tables.one.push(p(sort, alg.one(sort)?));
            let mut meet = vec![0; size * size];
            let mut join = vec![0; size * size];
            for a in 0..size {
                for b in 0..size {
                    meet[p(sort, a) * size + p(sort, b)] = p(sort, alg.meet(sort, a, b)?);
                    join[p(sort, a) * size + p(sort, b)] = p(sort, alg.join(sort, a, b)?);
                }
            }
            tables.meet.push(meet);
            tables.join.push(join);
            if let Some(neg) = tables.neg.as_mut() {
                let mut row = vec![0; size];
                for a in 0..size {
                    row[p(sort, a)] = p(sort, alg.neg(sort, a)?);
                }
                neg.push(row);
            }
            if fragment.equality {
                for i in 1..=sort {
                    for j in 1..=sort {
                        tables.delta.insert((sort, i, j), p(sort, alg.delta(sort, i, j)?));
                    }
                }
            }
        }
        for n in 0..=max {
            for k in 0..=max {
                for alpha in Substitution::all(n, k) {
                    let mut row = vec![0; sizes[n]];
                    for a in 0..sizes[n] {
                        row[p(n, a)] = p(k, alg.subst(&alpha, a)?);
                    }
                    tables.subst.insert(alpha, row);
                }
            }
        }
        if fragment.has_exists() {
            for n in 0..max {
                let mut row = vec![0; sizes[n + 1]];
                for a in 0..sizes[n + 1] {
                    row[p(n + 1, a)] = p(n, alg.exists(n, a)?);
                }
                tables.exists.push(row);
            }
        }
        if extend {
            if !alg.can_extend() {
                return Err(AlgebraError::InsufficientSorts {
                    sort: max + 1,
                    max_sort: max,
                });
            }
            tables.extension = Some(Extension {
                source: alg.clone(),
                to_source: backward,
                from_source: forward
                    .into_iter()
                    .map(|position| position.into_iter().enumerate().collect())
                    .collect(),
            });
        }
        Ok(tables)
    }

    pub fn to_json(&self, fragment: Fragment, max_sort: usize) -> Result<String, AlgebraError> {
        let sorts = (0..=max_sort)
            .map(|s| {
                let size = self.sizes[s];
                SortFile {
                    size,
                    zero: self.zero[s],
                    one: self.one[s],
                    meet: self.meet[s].chunks(size.max(1)).map(<[usize]>::to_vec).collect(),
                    join: self.join[s].chunks(size.max(1)).map(<[usize]>::to_vec).collect(),
                    neg: self.neg.as_ref().map(|n| n[s].clone()),
                }
            })
            .collect();
        let file = AlgebraFile {
            fragment: fragment.to_string(),
            max_sort,
            sorts,
            subst: self.subst.iter().map(|(a, t)| (a.to_string(), t.clone())).collect(),
            exists: self.exists.iter().enumerate().map(|(n, t)| (n.to_string(), t.clone())).collect(),
            delta: self.delta.iter().map(|(&(n, i, j), &v)| (delta_key(n, i, j), v)).collect(),
        };
        serde_json::to_string(&file).map_err(|e| TableError::Json(e.to_string()).into())
    }

    pub fn from_json(text: &str) -> Result<(Fragment, usize, Tables), AlgebraError> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| TableError::Json(e.to_string()))?;
        let fragment: Fragment = file
            .fragment
            .parse()
            .map_err(|e: crate::fragment::FragmentParseError| TableError::Json(e.to_string()))?;
        let max = file.max_sort;
        if file.sorts.len() != max + 1 {
            return Err(TableError::Shape {
                table: "sorts".into(),
                expected: max + 1,
                found: file.sorts.len(),
            }
            .into());
        }
        let sizes: Vec<usize> = file.sorts.iter().map(|s| s.size).collect();
        let in_range = |table: &str, values: &[usize], bound: usize| -> Result<(), TableError> {
            match values.iter().find(|&&v| v >= bound) {
                Some(&value) => Err(TableError::Range {
                    table: table.into(),
                    value,
                    bound,
                }),
                None => Ok(()),
            }
        };
        let shaped = |table: String, values: &[usize], expected: usize| -> Result<(), TableError> {
            if values.len() == expected {
                Ok(())
            } else {
                Err(TableError::Shape {
                    table,
                    expected,
                    found: values.len(),
                })
            }
        };
        let mut tables = Tables {
            sizes: sizes.clone(),
            zero: Vec::new(),
            one: Vec::new(),
            meet: Vec::new(),
            join: Vec::new(),
            neg: fragment.has_negation().then(Vec::new),
            subst: HashMap::new(),
            exists: Vec::new(),
            delta: HashMap::new(),
            extension: None,
        };
        for (s, sort) in file.sorts.into_iter().enumerate() {
            let size = sort.size;
            in_range(&format!("sort {s} constants"), &[sort.zero, sort.one], size)?;
            tables.zero.push(sort.zero);
            tables.one.push(sort.one);
            for (name, rows, dest) in [("meet", sort.meet, &mut tables.meet), ("join", sort.join, &mut tables.join)] {
                let flat: Vec<usize> = rows
                    .iter()
                    .map(|row| shaped(format!("sort {s} {name} row"), row, size).map(|_| row.clone()))
                    .collect::<Result<Vec<_>, _>>()?
                    .concat();
                shaped(format!("sort {s} {name}"), &flat, size * size)?;
                in_range(&format!("sort {s} {name}"), &flat, size)?;
                dest.push(flat);
            }
            if let Some(neg) = tables.neg.as_mut() {
                let row = sort.neg.ok_or_else(|| TableError::Missing(format!("sort {s} neg")))?;
                shaped(format!("sort {s} neg"), &row, size)?;
                in_range(&format!("sort {s} neg"), &row, size)?;
                neg.push(row);
            }
        }
        let mut subst = HashMap::new();
        for (key, row) in file.subst {
            let alpha: Substitution = key
                .parse()
                .map_err(|e: crate::relation::RelationError| TableError::Json(format!("{key}: {e}")))?;
            let (n, k) = (alpha.dom(), alpha.cod());
            if n > max || k > max {
                return Err(TableError::Json(format!("substitution {key} is above the bound")).into());
            }
            shaped(key.clone(), &row, sizes[n])?;
            in_range(&key, &row, sizes[k])?;
            subst.insert(alpha, row);
        }
        for n in 0..=max {
            for k in 0..=max {
                for alpha in Substitution::all(n, k) {
                    if !subst.contains_key(&alpha) {
                        return Err(TableError::Missing(alpha.to_string()).into());
                    }
                }
            }
        }
        tables.subst = subst;
        if fragment.has_exists() {
            for n in 0..max {
                let key = n.to_string();
                let row = file
                    .exists
                    .get(&key)
                    .ok_or_else(|| TableError::Missing(format!("exists {key}")))?;
                shaped(format!("exists {key}"), row, sizes[n + 1])?;
                in_range(&format!("exists {key}"), row, sizes[n])?;
                tables.exists.push(row.clone());
            }
        }
        if fragment.equality {
            for n in 0..=max {
                for i in 1..=n {
                    for j in 1..=n {
                        let key = delta_key(n, i, j);
                        let &v = file.delta.get(&key).ok_or_else(|| TableError::Missing(key.clone()))?;
                        in_range(&key, &[v], sizes[n])?;
                        tables.delta.insert((n, i, j), v);
                    }
                }
            }
        }
        Ok((fragment, max, tables))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Universe;

    fn same_operations(a: &FiniteAlgebra, b: &FiniteAlgebra, map: impl Fn(usize, usize) -> usize) {
        let max = a.max_sort();
        for s in 0..=max {
            assert_eq!(a.size(s).unwrap(), b.size(s).unwrap());
            assert_eq!(map(s, a.zero(s).unwrap()), b.zero(s).unwrap());
            assert_eq!(map(s, a.one(s).unwrap()), b.one(s).unwrap());
            for x in 0..a.size(s).unwrap() {
                for y in 0..a.size(s).unwrap() {
                    assert_eq!(map(s, a.meet(s, x, y).unwrap()), b.meet(s, map(s, x), map(s, y)).unwrap());
                }
                for k in 0..=max {
                    for alpha in Substitution::all(s, k) {
                        assert_eq!(map(k, a.subst(&alpha, x).unwrap()), b.subst(&alpha, map(s, x)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn plain_tabulation_is_identical() {
        let alg = FiniteAlgebra::concrete(Universe::new(2), Fragment::FO_EQ, 2).unwrap();
        let t = alg.tabulate(None, false).unwrap();
        same_operations(&alg, &t, |_, x| x);
        assert!(!t.can_extend());
        assert!(matches!(t.size(3), Err(AlgebraError::InsufficientSorts { .. })));
    }

    #[test]
    fn shuffled_tabulation_with_extension() {
        let alg = FiniteAlgebra::concrete(Universe::new(1), Fragment::QF, 2).unwrap();
        let t = alg.tabulate(Some(7), true).unwrap();
        assert!(t.can_extend());
        let c = Substitution::partitioning(&[2, 1]);
        let top = t.one(2).unwrap();
        assert_eq!(t.subst(&c[0], top).unwrap(), t.one(3).unwrap());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let alg = FiniteAlgebra::concrete(Universe::new(1), Fragment::FO_EQ, 2).unwrap();
        let text = alg.to_tables_json().unwrap();
        let back = FiniteAlgebra::from_tables_json(&text).unwrap();
        same_operations(&alg, &back, |_, x| x);
        assert_eq!(back.to_tables_json().unwrap(), text);
        let broken = text.replacen("\"2->1:[1,1]\":[", "\"2->1:[1,1]\":[7,", 1);
        assert!(FiniteAlgebra::from_tables_json(&broken).is_err());
        assert!(FiniteAlgebra::from_tables_json("{}").is_err());
    }
}
