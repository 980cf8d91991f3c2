use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};

/// Directed acyclic graph over named nodes, stored as per-node parent lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    parents: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(names: Vec<String>, parents: Vec<Vec<usize>>) -> Result<Self> {
        if names.len() != parents.len() {
            return Err(Error::InvalidGraph(alloc::format!("{} names but {} parent sets", names.len(), parents.len())));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::InvalidGraph(alloc::format!("duplicate node name `{name}`")));
            }
        }
        let d = names.len();
        for (child, pa) in parents.iter().enumerate() {
            for (k, &p) in pa.iter().enumerate() {
                if p >= d {
                    return Err(Error::InvalidGraph(alloc::format!("parent index {p} out of range")));
                }
                if p == child {
                    return Err(Error::InvalidGraph(alloc::format!("node {child} is its own parent")));
                }
                if pa[..k].contains(&p) {
                    return Err(Error::InvalidGraph(alloc::format!("duplicate parent {p} of node {child}")));
                }
            }
        }
        topological_order(&parents)?;
        Ok(Dag { names, parents })
    }

    pub fn empty(names: Vec<String>) -> Result<Self> {
        let d = names.len();
        Dag::new(names, vec![Vec::new(); d])
    }

    /// Builds a graph from `(parent, child)` index pairs.
    pub fn from_edges(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); names.len()];
        for &(p, c) in edges {
            if c >= names.len() {
                return Err(Error::InvalidGraph(alloc::format!("child index {c} out of range")));
            }
            parents[c].push(p);
        }
        Dag::new(names, parents)
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn parent_sets(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `(parent, child)` pairs, grouped by child in index order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents.iter().enumerate().flat_map(|(c, pa)| pa.iter().map(move |&p| (p, c))).collect()
    }

    pub fn n_edges(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(&self.parents).expect("validated at construction")
    }
}

/// Kahn's algorithm with the lowest ready index taken first.
///
/// On a cycle, returns the nodes of one cycle in edge direction.
pub fn topological_order(parents: &[Vec<usize>]) -> Result<Vec<usize>> {
    let d = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); d];
    for (c, pa) in parents.iter().enumerate() {
        for &p in pa {
            children[p].push(c);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..d).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(d);
    while let Some(Reverse(node)) = ready.pop() {
        order.push(node);
        for &c in &children[node] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() == d {
        return Ok(order);
    }

    // every unplaced node has an unplaced parent; walk parents until a repeat
    let mut placed = vec![false; d];
    for &i in &order {
        placed[i] = true;
    }
    let start = (0..d).find(|&i| !placed[i]).expect("unplaced node exists");
    let mut seen_at = vec![usize::MAX; d];
    let mut walk = Vec::new();
    let mut node = start;
    while seen_at[node] == usize::MAX {
        seen_at[node] = walk.len();
        walk.push(node);
        node = *parents[node].iter().find(|&&p| !placed[p]).expect("cycle member has cyclic parent");
    }
    let mut cycle = walk[seen_at[node]..].to_vec();
    cycle.reverse();
    Err(Error::Cycle(cycle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| alloc::format!("x{i}")).collect()
    }

    #[test]
    fn order_examples() {
        assert_eq!(topological_order(&[vec![], vec![], vec![]]).unwrap(), vec![0, 1, 2]);
        assert_eq!(topological_order(&[vec![], vec![0], vec![1]]).unwrap(), vec![0, 1, 2]);
        assert_eq!(topological_order(&[vec![2], vec![2], vec![]]).unwrap(), vec![2, 0, 1]);
    }

    #[test]
    fn cycle_reported() {
        // 0 -> 1 -> 2 -> 0, plus an acyclic hanger-on 3
        let parents = [vec![2], vec![0], vec![1], vec![0]];
        match topological_order(&parents) {
            Err(Error::Cycle(c)) => {
                assert_eq!(c.len(), 3);
                for w in 0..3 {
                    let (from, to) = (c[w], c[(w + 1) % 3]);
                    assert!(parents[to].contains(&from));
                }
            }
            other => panic!("{other:?}"),
        }
        assert!(Dag::new(names(4), parents.to_vec()).is_err());
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert!(Dag::new(names(2), vec![vec![1], vec![1]]).is_err());
        assert!(Dag::new(names(2), vec![vec![5], vec![]]).is_err());
        assert!(Dag::new(names(2), vec![vec![1, 1], vec![]]).is_err());
        assert!(Dag::new(vec!["a".to_string(), "a".to_string()], vec![vec![], vec![]]).is_err());
    }

    #[test]
    fn edges_round_trip() {
        let dag = Dag::from_edges(names(4), &[(0, 1), (0, 2), (2, 3), (1, 3)]).unwrap();
        assert_eq!(dag.n_edges(), 4);
        let again = Dag::from_edges(names(4), &dag.edges()).unwrap();
        assert_eq!(dag, again);
        let order = dag.topological_order();
        for (p, c) in dag.edges() {
            let pos = |x| order.iter().position(|&o| o == x).unwrap();
            assert!(pos(p) < pos(c));
        }
    }
}
