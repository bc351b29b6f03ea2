use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;
use std::time::Instant;

use super::plan::{build_plan, Plan, Step};
use super::{EvalStats, Evaluator};
use crate::value::{ErrorKind, Value};
use crate::workspace::{CellContent, CellId, TableRecalc, Workspace};

/// Plan-cache key for the cells downstream of table bodies.
const SETTLE_KEY: CellId = CellId {
    book: u32::MAX,
    sheet: u32::MAX,
    row: u32::MAX,
    col: u32::MAX,
};

impl Workspace {
    /// Recomputes dirty and volatile cells, then (with automatic table
    /// recalculation) every data table, then the cells that read table
    /// results.
    pub fn full_recalc(&mut self) -> EvalStats {
        let start = Instant::now();
        let mut stats = self.phase_cells();
        if self.config.table_recalc == TableRecalc::Auto {
            self.schedule_tables(&mut stats);
            self.settle(&mut stats);
        }
        stats.wall_time = start.elapsed();
        stats
    }

    /// Recomputes dirty and volatile cells only; tables are left alone.
    pub fn recalc_cells(&mut self) -> EvalStats {
        let start = Instant::now();
        let mut stats = self.phase_cells();
        stats.wall_time = start.elapsed();
        stats
    }

    /// Evaluates every table regardless of the table recalculation mode,
    /// then refreshes the cells that read table results.
    pub fn calculate_tables(&mut self) -> EvalStats {
        let start = Instant::now();
        let mut stats = EvalStats::default();
        self.schedule_tables(&mut stats);
        self.settle(&mut stats);
        stats.wall_time = start.elapsed();
        stats
    }

    /// Marks every cell dirty so the next recalculation evaluates all of
    /// them.
    pub fn invalidate_all(&mut self) {
        self.dirty = self.all_cell_ids().collect();
        self.tables_dirty = true;
    }

    /// True if tables have not been evaluated since the last edit.
    pub fn tables_stale(&self) -> bool {
        self.tables_dirty && !self.tables.is_empty()
    }

    fn phase_cells(&mut self) -> EvalStats {
        let mut stats = EvalStats::default();
        let mut roots: BTreeSet<CellId> = std::mem::take(&mut self.dirty);
        roots.extend(self.graph.volatile().iter().copied());
        if roots.is_empty() {
            return stats;
        }
        let plan = build_plan(&self.graph, roots, None, self.order_seed);
        self.run_plan(&plan, None, &mut stats);
        stats
    }

    fn settle(&mut self, stats: &mut EvalStats) {
        let plan = match self.plan_cache.get(&(SETTLE_KEY, false)) {
            Some(p) => Arc::clone(p),
            None => {
                let roots: Vec<CellId> = self
                    .all_cell_ids()
                    .filter(|&id| matches!(self.cell_by_id(id).map(|c| &c.content), Some(CellContent::TableBody(_))))
                    .collect();
                let plan = Arc::new(build_plan(&self.graph, roots, None, self.order_seed));
                self.plan_cache.insert((SETTLE_KEY, false), Arc::clone(&plan));
                plan
            }
        };
        self.run_plan(&plan, None, stats);
    }

    /// Every cell reachable from `roots` through dependent edges, roots
    /// excluded unless they sit on a cycle.
    pub(crate) fn transitive_dependents(&self, roots: impl IntoIterator<Item = CellId>) -> Vec<CellId> {
        let mut seen: HashSet<CellId> = HashSet::new();
        let mut queue: VecDeque<CellId> = roots.into_iter().collect();
        let mut out = Vec::new();
        let mut scratch = Vec::new();
        while let Some(id) = queue.pop_front() {
            scratch.clear();
            self.graph.dependents(id, &mut scratch);
            for &d in &scratch {
                if seen.insert(d) {
                    out.push(d);
                    queue.push_back(d);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Evaluates the steps of `plan`. The pinned cell holds a substituted
    /// value and is skipped, as are table bodies.
    pub(crate) fn run_plan(&mut self, plan: &Plan, pinned: Option<CellId>, stats: &mut EvalStats) {
        for step in &plan.steps {
            match step {
                Step::Single(id) if Some(*id) == pinned => {}
                Step::Single(id) => self.eval_cell(*id, stats),
                Step::Cycle(ids) if self.config.iterative => self.iterate(ids, pinned, stats),
                Step::Cycle(ids) => {
                    for &id in ids {
                        if Some(id) != pinned && self.is_formula(id) {
                            self.set_cached(id, Value::Error(ErrorKind::Cycle));
                        }
                    }
                }
            }
        }
    }

    fn is_formula(&self, id: CellId) -> bool {
        matches!(self.cell_by_id(id).map(|c| &c.content), Some(CellContent::Formula(_)))
    }

    /// Evaluates a formula cell and stores the result; returns the previous
    /// and new values, or `None` for cells without a formula.
    fn eval_formula_cell(&mut self, id: CellId, stats: &mut EvalStats) -> Option<(Value, Value)> {
        let cell = self.cell_by_id(id)?;
        let CellContent::Formula(f) = &cell.content else {
            return None;
        };
        let f = Arc::clone(f);
        let new = Evaluator::new(self, id).evaluate_formula(&f.ast);
        stats.cell_evaluations += 1;
        let old = std::mem::replace(&mut self.cell_by_id_mut(id).cached, new.clone());
        Some((old, new))
    }

    fn eval_cell(&mut self, id: CellId, stats: &mut EvalStats) {
        self.eval_formula_cell(id, stats);
    }

    /// Sweeps a cycle in address order until every change is within
    /// `max_change` or `max_iterations` sweeps have run.
    fn iterate(&mut self, ids: &[CellId], pinned: Option<CellId>, stats: &mut EvalStats) {
        let max_iter = self.config.max_iterations.max(1);
        let tolerance = self.config.max_change;
        for _ in 0..max_iter {
            let mut settled = true;
            for &id in ids {
                if Some(id) == pinned {
                    continue;
                }
                if let Some((old, new)) = self.eval_formula_cell(id, stats) {
                    let within = match (&old, &new) {
                        (Value::Number(a), Value::Number(b)) => (a - b).abs() <= tolerance,
                        (a, b) => a == b,
                    };
                    settled &= within;
                }
            }
            if settled {
                break;
            }
        }
    }
}
