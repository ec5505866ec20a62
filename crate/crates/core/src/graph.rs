//! Recurrent-class counting on the nonzero pattern of a transition matrix.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::visit::EdgeRef;

/// Number of terminal strongly connected components (closed communicating
/// classes) of the graph on `n` nodes with the given `(from, to)` edges.
///
/// For a finite Markov chain this is the number of recurrent classes.
pub(crate) fn count_terminal_components(
    n: usize,
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> usize {
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (from, to) in edges {
        g.update_edge(nodes[from], nodes[to], ());
    }
    let components = tarjan_scc(&g);
    let mut component_of = vec![0usize; n];
    for (c, members) in components.iter().enumerate() {
        for node in members {
            component_of[node.index()] = c;
        }
    }
    let mut has_exit = vec![false; components.len()];
    for e in g.edge_references() {
        let (a, b) = (
            component_of[e.source().index()],
            component_of[e.target().index()],
        );
        if a != b {
            has_exit[a] = true;
        }
    }
    has_exit.iter().filter(|&&exits| !exits).count()
}

/// Edges `j -> i` for every entry `column_major[j * n + i] > 0` of an `n × n`
/// column-stochastic matrix.
pub(crate) fn column_stochastic_edges(
    n: usize,
    column_major: &[f64],
) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..n).flat_map(move |j| {
        (0..n).filter_map(move |i| (column_major[j * n + i] > 0.0).then_some((j, i)))
    })
}
