//! Breadth-first construction of the labelled transition system of a
//! wrapped program, over canonical configurations.

use std::collections::HashMap;

use rayon::prelude::*;
use tx10_heap::GlobalHeap;
use tx10_sem::{Config, EngineFault, FailurePolicy, Semantics, Stepper, Transition};
use tx10_syntax::{wrap_program, Stmt};

use crate::canon::canonicalize;

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub stepper: Stepper,
    pub policy: FailurePolicy,
    pub depth: usize,
    pub node_budget: usize,
    /// Expand frontiers on the rayon pool. Results are identical.
    pub parallel: bool,
}

impl ExploreOptions {
    pub fn tx10(depth: usize) -> Self {
        ExploreOptions {
            stepper: Stepper::new(Semantics::Tx10),
            policy: FailurePolicy::none(),
            depth,
            node_budget: 200_000,
            parallel: false,
        }
    }

    pub fn resilient(policy: FailurePolicy, depth: usize) -> Self {
        ExploreOptions {
            stepper: Stepper::new(Semantics::Resilient),
            policy,
            ..ExploreOptions::tx10(depth)
        }
    }

    pub fn sem(&self) -> Semantics {
        self.stepper.sem
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub transition: Transition,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LtsStats {
    pub nodes: usize,
    pub edges: usize,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct Lts {
    pub sem: Semantics,
    pub nodes: Vec<Config>,
    /// BFS depth of each node.
    pub depth_of: Vec<usize>,
    /// Whether the node's successors were computed.
    pub expanded: Vec<bool>,
    pub edges: Vec<Edge>,
    /// Outgoing edge ids per node.
    pub out: Vec<Vec<usize>>,
    pub root: usize,
    pub bound_hit: bool,
    pub initial_live: usize,
}

impl Lts {
    pub fn stats(&self) -> LtsStats {
        LtsStats {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            depth: self.depth_of.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn complete(&self) -> bool {
        !self.bound_hit
    }

    /// Edge ids from the root to `node` along BFS parents.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut parent: Vec<Option<usize>> = vec![None; self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if parent[e.to].is_none()
                && e.to != self.root
                && self.depth_of[e.to] == self.depth_of[e.from] + 1
            {
                parent[e.to] = Some(i);
            }
        }
        let mut path = Vec::new();
        let mut cur = node;
        while let Some(e) = parent[cur] {
            path.push(e);
            cur = self.edges[e].from;
        }
        path.reverse();
        path
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ExploreError {
    #[error("node budget of {budget} exceeded")]
    NodeBudgetExceeded { budget: usize, partial: Box<Lts> },
    #[error("engine fault: {0}")]
    Fault(#[from] EngineFault),
}

/// Explore the wrapped program from `g0`.
pub fn explore(
    program: &Stmt,
    g0: &GlobalHeap,
    opts: &ExploreOptions,
) -> Result<Lts, ExploreError> {
    explore_config(Config::Running(wrap_program(program), g0.clone()), opts)
}

pub fn explore_config(k0: Config, opts: &ExploreOptions) -> Result<Lts, ExploreError> {
    let root = canonicalize(&k0);
    let initial_live = root.heap().live_places().count();
    let mut lts = Lts {
        sem: opts.sem(),
        nodes: vec![root.clone()],
        depth_of: vec![0],
        expanded: vec![false],
        edges: Vec::new(),
        out: vec![Vec::new()],
        root: 0,
        bound_hit: false,
        initial_live,
    };
    let mut index: HashMap<Config, usize> = HashMap::from([(root, 0)]);
    let mut frontier = vec![0usize];

    for depth in 0..=opts.depth {
        if frontier.is_empty() {
            break;
        }
        if depth == opts.depth {
            if frontier.iter().any(|&n| !lts.nodes[n].is_done()) {
                lts.bound_hit = true;
            }
            break;
        }
        let expand = |&n: &usize| successors(&lts.nodes[n], depth, initial_live, opts);
        let results: Vec<Result<Vec<Transition>, EngineFault>> = if opts.parallel {
            frontier.par_iter().map(expand).collect()
        } else {
            frontier.iter().map(expand).collect()
        };
        let mut next = Vec::new();
        for (&n, res) in frontier.iter().zip(results) {
            lts.expanded[n] = true;
            for t in res? {
                let target = canonicalize(&t.target);
                let to = match index.get(&target) {
                    Some(&i) => i,
                    None => {
                        let i = lts.nodes.len();
                        if i >= opts.node_budget {
                            lts.bound_hit = true;
                            let budget = opts.node_budget;
                            return Err(ExploreError::NodeBudgetExceeded {
                                budget,
                                partial: Box::new(lts),
                            });
                        }
                        index.insert(target.clone(), i);
                        lts.nodes.push(target);
                        lts.depth_of.push(depth + 1);
                        lts.expanded.push(false);
                        lts.out.push(Vec::new());
                        next.push(i);
                        i
                    }
                };
                lts.out[n].push(lts.edges.len());
                lts.edges.push(Edge {
                    from: n,
                    to,
                    transition: t,
                });
            }
        }
        frontier = next;
    }
    Ok(lts)
}

fn successors(
    k: &Config,
    depth: usize,
    initial_live: usize,
    opts: &ExploreOptions,
) -> Result<Vec<Transition>, EngineFault> {
    let Config::Running(s, g) = k else {
        return Ok(vec![]);
    };
    let mut ts = opts.stepper.transitions(s, g, 0)?;
    if opts.sem() == Semantics::Resilient {
        let failed = initial_live - g.live_places().count();
        ts.extend(
            opts.stepper
                .failure_transitions(k, &opts.policy.eligible(g, depth, failed)),
        );
    }
    Ok(ts)
}
