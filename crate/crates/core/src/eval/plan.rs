//! Evaluation order for a set of cells: transitive closure over dependents,
//! strongly connected components, then a topological order of the
//! condensation.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use super::graph::DependencyGraph;
use crate::workspace::CellId;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Step {
    Single(CellId),
    /// Cells on a circular reference, in address order.
    Cycle(Vec<CellId>),
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Plan {
    pub steps: Vec<Step>,
    pub members: HashSet<CellId>,
}

/// Orders `roots` and everything downstream of them. Edges into `pinned`
/// are ignored: during a table pass the input cell holds a literal, so its
/// own precedents do not matter.
pub(crate) fn build_plan(
    graph: &DependencyGraph,
    roots: impl IntoIterator<Item = CellId>,
    pinned: Option<CellId>,
    seed: Option<u64>,
) -> Plan {
    let mut index: HashMap<CellId, usize> = HashMap::new();
    let mut nodes: Vec<CellId> = Vec::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |id: CellId, nodes: &mut Vec<CellId>, adj: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>| {
        *index.entry(id).or_insert_with(|| {
            nodes.push(id);
            adj.push(Vec::new());
            queue.push_back(nodes.len() - 1);
            nodes.len() - 1
        })
    };

    let mut sorted_roots: Vec<CellId> = roots.into_iter().collect();
    sorted_roots.sort_unstable();
    sorted_roots.dedup();
    for r in sorted_roots {
        intern(r, &mut nodes, &mut adj, &mut queue);
    }
    let mut scratch = Vec::new();
    while let Some(i) = queue.pop_front() {
        scratch.clear();
        graph.dependents(nodes[i], &mut scratch);
        scratch.sort_unstable();
        scratch.dedup();
        for &d in &scratch {
            let j = intern(d, &mut nodes, &mut adj, &mut queue);
            if Some(d) != pinned {
                adj[i].push(j);
            }
        }
    }

    let comps = tarjan(&adj);
    let n_comps = comps.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comps];
    for (node, &c) in comps.iter().enumerate() {
        members[c].push(node);
    }
    let mut indegree = vec![0usize; n_comps];
    let mut cadj: Vec<Vec<usize>> = vec![Vec::new(); n_comps];
    let mut self_loop = vec![false; n_comps];
    for (i, outs) in adj.iter().enumerate() {
        for &j in outs {
            let (a, b) = (comps[i], comps[j]);
            if a == b {
                self_loop[a] |= i == j || members[a].len() > 1;
            } else {
                cadj[a].push(b);
                indegree[b] += 1;
            }
        }
    }

    let key = |c: usize| -> (u64, CellId) {
        let first = members[c].iter().map(|&n| nodes[n]).min().expect("non-empty component");
        let salt = seed.map_or(0, |s| {
            mix(s
                ^ mix(u64::from(first.row) << 32 | u64::from(first.col))
                ^ u64::from(first.book) << 48
                ^ u64::from(first.sheet) << 40)
        });
        (salt, first)
    };
    let mut heap: BinaryHeap<Reverse<((u64, CellId), usize)>> = (0..n_comps)
        .filter(|&c| indegree[c] == 0)
        .map(|c| Reverse((key(c), c)))
        .collect();
    let mut steps = Vec::with_capacity(n_comps);
    while let Some(Reverse((_, c))) = heap.pop() {
        let mut cells: Vec<CellId> = members[c].iter().map(|&n| nodes[n]).collect();
        if self_loop[c] {
            cells.sort_unstable();
            steps.push(Step::Cycle(cells));
        } else {
            steps.push(Step::Single(cells[0]));
        }
        for &d in &cadj[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                heap.push(Reverse((key(d), d)));
            }
        }
    }
    debug_assert_eq!(steps.len(), n_comps);

    Plan {
        steps,
        members: nodes.into_iter().collect(),
    }
}

fn mix(mut x: u64) -> u64 {
    // splitmix64 finalizer
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Iterative Tarjan; returns the component index of every node.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        call.push((start, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
