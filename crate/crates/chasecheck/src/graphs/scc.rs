//! Tarjan strongly connected components on adjacency lists.

pub struct Sccs {
    /// Components in reverse topological order (successors first).
    pub components: Vec<Vec<usize>>,
    /// Component id per vertex.
    pub comp_of: Vec<usize>,
}

impl Sccs {
    /// True when `v`'s component can reach itself through at least one edge:
    /// it has two or more vertices, or `v` has a self-loop.
    pub fn on_cycle(&self, v: usize, graph: &[Vec<usize>]) -> bool {
        self.components[self.comp_of[v]].len() > 1 || graph[v].contains(&v)
    }

    /// Components in topological order (predecessors first).
    pub fn topological(&self) -> Vec<Vec<usize>> {
        self.components.iter().rev().cloned().collect()
    }
}

pub fn tarjan(graph: &[Vec<usize>]) -> Sccs {
    let n = graph.len();
    let mut state = State {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v].is_none() {
            connect(v, graph, &mut state);
        }
    }
    let mut comp_of = vec![usize::MAX; n];
    for (cid, comp) in state.comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = cid;
        }
    }
    Sccs {
        components: state.comps,
        comp_of,
    }
}

struct State {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn connect(v: usize, graph: &[Vec<usize>], state: &mut State) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &graph[v] {
        if state.idx[w].is_none() {
            connect(w, graph, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].unwrap());
        }
    }

    if state.low[v] == state.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        comp.sort_unstable();
        state.comps.push(comp);
    }
}

/// Shortest path from `from` to `to` staying inside one component, for
/// cycle-witness reconstruction. Returns the vertex sequence including both
/// endpoints; `None` when unreachable.
pub fn path_within(
    graph: &[Vec<usize>],
    comp_of: &[usize],
    from: usize,
    to: usize,
) -> Option<Vec<usize>> {
    let cid = comp_of[from];
    if comp_of[to] != cid {
        return None;
    }
    let mut prev = vec![usize::MAX; graph.len()];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(from);
    let mut seen = vec![false; graph.len()];
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &graph[v] {
            if comp_of[w] == cid && !seen[w] {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    // from == to with no path back means no cycle through the vertex
    None
}
