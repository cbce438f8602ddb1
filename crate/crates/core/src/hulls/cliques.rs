//! Maximal clique enumeration (Bron-Kerbosch with Tomita pivoting) on
//! bitset adjacency.

use std::sync::atomic::{AtomicUsize, Ordering};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Undirected simple graph on `0..n`.
pub struct Graph {
    adj: Vec<FixedBitSet>,
    vertices: FixedBitSet,
}

impl Graph {
    /// Graph on the vertex subset `vertices`; `edge(i, j)` is queried for `i < j`.
    pub fn new(
        n: usize,
        vertices: impl IntoIterator<Item = usize>,
        edge: impl Fn(usize, usize) -> bool,
    ) -> Graph {
        let mut vs = FixedBitSet::with_capacity(n);
        for v in vertices {
            vs.insert(v);
        }
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        let list: Vec<usize> = vs.ones().collect();
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                if edge(i, j) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Graph { adj, vertices: vs }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.count_ones(..)
    }

    /// All maximal cliques, each sorted ascending, in lexicographic order.
    ///
    /// Branches are rooted at the smallest vertex of each clique, so they are
    /// independent and may run in parallel.
    pub fn maximal_cliques(&self, cap: usize, exec: Exec) -> Result<Vec<Vec<usize>>> {
        let found = AtomicUsize::new(0);
        let roots: Vec<usize> = self.vertices.ones().collect();
        let n = self.vertices.len();
        let per_root: Vec<Result<Vec<Vec<usize>>>> = exec.map(&roots, |&v| {
            let mut later = FixedBitSet::with_capacity(n);
            later.insert_range(v + 1..);
            let mut earlier = FixedBitSet::with_capacity(n);
            earlier.insert_range(..v);
            let mut p = self.adj[v].clone();
            p.intersect_with(&later);
            let mut x = self.adj[v].clone();
            x.intersect_with(&earlier);
            let mut out = Vec::new();
            let mut r = vec![v];
            self.expand(&mut r, p, x, &mut out, &found, cap)?;
            Ok(out)
        });
        let mut cliques = Vec::new();
        for part in per_root {
            cliques.extend(part?);
        }
        cliques.sort();
        Ok(cliques)
    }

    fn expand(
        &self,
        r: &mut Vec<usize>,
        mut p: FixedBitSet,
        mut x: FixedBitSet,
        out: &mut Vec<Vec<usize>>,
        found: &AtomicUsize,
        cap: usize,
    ) -> Result<()> {
        if p.is_clear() {
            if x.is_clear() {
                if found.fetch_add(1, Ordering::Relaxed) >= cap {
                    return Err(Error::SquareCap { cap });
                }
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return Ok(());
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| p.intersection(&self.adj[u]).count())
            .expect("nonempty candidate set");
        let mut todo = p.clone();
        todo.difference_with(&self.adj[pivot]);
        for v in todo.ones() {
            let mut np = p.clone();
            np.intersect_with(&self.adj[v]);
            let mut nx = x.clone();
            nx.intersect_with(&self.adj[v]);
            r.push(v);
            self.expand(r, np, nx, out, found, cap)?;
            r.pop();
            p.set(v, false);
            x.insert(v);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_plus_tail() {
        let edges = [(0, 1), (0, 2), (1, 2), (2, 3)];
        let g = Graph::new(5, 0..4, |i, j| edges.contains(&(i, j)));
        let c = g.maximal_cliques(100, Exec::Sequential).unwrap();
        assert_eq!(c, vec![vec![0, 1, 2], vec![2, 3]]);
    }

    #[test]
    fn isolated_vertices_are_singletons() {
        let g = Graph::new(3, [0, 2], |_, _| false);
        assert_eq!(
            g.maximal_cliques(10, Exec::Sequential).unwrap(),
            vec![vec![0], vec![2]]
        );
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::new(6, 0..6, |_, _| false);
        assert!(matches!(
            g.maximal_cliques(5, Exec::Sequential),
            Err(Error::SquareCap { cap: 5 })
        ));
        assert_eq!(g.maximal_cliques(6, Exec::Parallel).unwrap().len(), 6);
    }
}
