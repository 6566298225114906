//! Positive dependency graph, SCCs, loop atoms, and the tightness test.
//!
//! The graph has an edge a → b whenever some rule has a in its head and b in
//! its positive body. Loop atoms are the atoms lying in cyclic SCCs (size ≥ 2,
//! or singletons with a self-loop); a program is tight iff it has none.

use std::collections::BTreeSet;

use crate::program::{AtomId, Program};

/// Head → positive-body dependency graph over the atoms of a program.
#[derive(Debug, Clone)]
pub struct DepGraph {
    /// Adjacency lists indexed by atom id; deduplicated, ascending.
    pub succ: Vec<Vec<AtomId>>,
}

impl DepGraph {
    pub fn num_nodes(&self) -> usize {
        self.succ.len()
    }

    pub fn has_edge(&self, from: AtomId, to: AtomId) -> bool {
        self.succ[from as usize].binary_search(&to).is_ok()
    }
}

/// Strongly connected components of a [`DepGraph`].
#[derive(Debug, Clone)]
pub struct SccInfo {
    /// Component id per atom.
    pub component_id: Vec<u32>,
    /// Member list per component, ascending atom ids.
    pub members: Vec<Vec<AtomId>>,
    /// Whether the component is cyclic: size ≥ 2, or size 1 with a self-loop.
    pub is_cyclic: Vec<bool>,
}

pub fn build_dep_graph(p: &Program) -> DepGraph {
    let n = p.num_atoms() as usize;
    let mut succ: Vec<BTreeSet<AtomId>> = vec![BTreeSet::new(); n];
    for r in &p.rules {
        for &h in &r.head {
            for &b in &r.pos_body {
                succ[h as usize].insert(b);
            }
        }
    }
    DepGraph {
        succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

/// Iterative Tarjan SCC over the dependency graph.
pub fn compute_sccs(g: &DepGraph) -> SccInfo {
    let n = g.num_nodes();
    const UNVISITED: u32 = u32::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut component_id = vec![0u32; n];
    let mut members: Vec<Vec<AtomId>> = Vec::new();

    // explicit DFS frames: (node, next successor position)
    let mut frames: Vec<(u32, usize)> = Vec::new();
    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root as usize] = next_index;
        lowlink[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < g.succ[v as usize].len() {
                let w = g.succ[v as usize][*pos];
                *pos += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next_index;
                    lowlink[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    frames.push((w, 0));
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent as usize] = lowlink[parent as usize].min(lowlink[v as usize]);
                }
                if lowlink[v as usize] == index[v as usize] {
                    let cid = members.len() as u32;
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        component_id[w as usize] = cid;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    members.push(comp);
                }
            }
        }
    }

    let is_cyclic = members
        .iter()
        .map(|comp| comp.len() >= 2 || g.has_edge(comp[0], comp[0]))
        .collect();
    SccInfo {
        component_id,
        members,
        is_cyclic,
    }
}

/// Atoms in cyclic SCCs of the positive dependency graph.
pub fn loop_atoms(p: &Program) -> BTreeSet<AtomId> {
    let g = build_dep_graph(p);
    let scc = compute_sccs(&g);
    scc.members
        .iter()
        .zip(&scc.is_cyclic)
        .filter(|(_, &cyc)| cyc)
        .flat_map(|(comp, _)| comp.iter().copied())
        .collect()
}

/// A program is tight iff its positive dependency graph is acyclic.
pub fn is_tight(p: &Program) -> bool {
    loop_atoms(p).is_empty()
}
