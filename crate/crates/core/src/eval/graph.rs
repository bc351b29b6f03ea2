use std::collections::{BTreeMap, BTreeSet};

use crate::workspace::CellId;

/// Rectangle on one sheet, in internal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct RangeKey {
    pub book: u32,
    pub sheet: u32,
    pub r1: u32,
    pub c1: u32,
    pub r2: u32,
    pub c2: u32,
}

impl RangeKey {
    pub fn contains(&self, id: CellId) -> bool {
        self.book == id.book
            && self.sheet == id.sheet
            && (self.r1..=self.r2).contains(&id.row)
            && (self.c1..=self.c2).contains(&id.col)
    }

    pub fn cell_count(&self) -> u64 {
        u64::from(self.r2 - self.r1 + 1) * u64::from(self.c2 - self.c1 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Dep {
    Cell(CellId),
    Range(RangeKey),
}

/// Static precedent edges between formula cells, with reverse indexes for
/// single cells and for ranges.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct DependencyGraph {
    precedents: BTreeMap<CellId, BTreeSet<Dep>>,
    cell_dependents: BTreeMap<CellId, BTreeSet<CellId>>,
    range_dependents: BTreeMap<RangeKey, BTreeSet<CellId>>,
    volatile: BTreeSet<CellId>,
}

impl DependencyGraph {
    pub fn insert(&mut self, cell: CellId, deps: Vec<Dep>, volatile: bool) {
        self.remove(cell);
        let deps: BTreeSet<Dep> = deps
            .into_iter()
            .map(|d| match d {
                Dep::Range(r) if r.r1 == r.r2 && r.c1 == r.c2 => Dep::Cell(CellId {
                    book: r.book,
                    sheet: r.sheet,
                    row: r.r1,
                    col: r.c1,
                }),
                d => d,
            })
            .collect();
        for d in &deps {
            match d {
                Dep::Cell(p) => self.cell_dependents.entry(*p).or_default().insert(cell),
                Dep::Range(r) => self.range_dependents.entry(*r).or_default().insert(cell),
            };
        }
        if !deps.is_empty() {
            self.precedents.insert(cell, deps);
        }
        if volatile {
            self.volatile.insert(cell);
        }
    }

    pub fn remove(&mut self, cell: CellId) {
        self.volatile.remove(&cell);
        let Some(deps) = self.precedents.remove(&cell) else {
            return;
        };
        for d in deps {
            match d {
                Dep::Cell(p) => {
                    if let Some(set) = self.cell_dependents.get_mut(&p) {
                        set.remove(&cell);
                        if set.is_empty() {
                            self.cell_dependents.remove(&p);
                        }
                    }
                }
                Dep::Range(r) => {
                    if let Some(set) = self.range_dependents.get_mut(&r) {
                        set.remove(&cell);
                        if set.is_empty() {
                            self.range_dependents.remove(&r);
                        }
                    }
                }
            }
        }
    }

    #[cfg(test)]
    pub fn precedents(&self, cell: CellId) -> impl Iterator<Item = &Dep> {
        self.precedents.get(&cell).into_iter().flatten()
    }

    /// Direct dependents of `cell`, through single-cell or range edges.
    pub fn dependents(&self, cell: CellId, out: &mut Vec<CellId>) {
        if let Some(set) = self.cell_dependents.get(&cell) {
            out.extend(set.iter().copied());
        }
        for (range, set) in &self.range_dependents {
            if range.contains(cell) {
                out.extend(set.iter().copied());
            }
        }
    }

    pub fn volatile(&self) -> &BTreeSet<CellId> {
        &self.volatile
    }

    /// True if the reverse indexes are exactly the transpose of the
    /// forward edges.
    pub fn is_consistent(&self) -> bool {
        let mut cells: BTreeMap<CellId, BTreeSet<CellId>> = BTreeMap::new();
        let mut ranges: BTreeMap<RangeKey, BTreeSet<CellId>> = BTreeMap::new();
        for (cell, deps) in &self.precedents {
            for d in deps {
                match d {
                    Dep::Cell(p) => cells.entry(*p).or_default().insert(*cell),
                    Dep::Range(r) => ranges.entry(*r).or_default().insert(*cell),
                };
            }
        }
        cells == self.cell_dependents && ranges == self.range_dependents
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(row: u32, col: u32) -> CellId {
        CellId {
            book: 0,
            sheet: 0,
            row,
            col,
        }
    }

    #[test]
    fn insert_remove_keeps_transpose() {
        let mut g = DependencyGraph::default();
        let range = RangeKey {
            book: 0,
            sheet: 0,
            r1: 1,
            c1: 1,
            r2: 5,
            c2: 1,
        };
        g.insert(id(1, 2), vec![Dep::Cell(id(1, 1)), Dep::Range(range)], false);
        g.insert(id(2, 2), vec![Dep::Cell(id(1, 2))], true);
        assert!(g.is_consistent());

        let mut out = Vec::new();
        g.dependents(id(3, 1), &mut out);
        assert_eq!(out, [id(1, 2)]);

        g.insert(id(1, 2), vec![Dep::Cell(id(9, 9))], false);
        assert!(g.is_consistent());
        out.clear();
        g.dependents(id(3, 1), &mut out);
        assert!(out.is_empty());

        g.remove(id(1, 2));
        g.remove(id(2, 2));
        assert_eq!(g, DependencyGraph::default());
    }

    #[test]
    fn single_cell_range_is_a_cell_edge() {
        let mut g = DependencyGraph::default();
        let r = RangeKey {
            book: 0,
            sheet: 0,
            r1: 2,
            c1: 2,
            r2: 2,
            c2: 2,
        };
        g.insert(id(1, 1), vec![Dep::Range(r)], false);
        assert_eq!(g.precedents(id(1, 1)).collect::<Vec<_>>(), [&Dep::Cell(id(2, 2))]);
    }
}
