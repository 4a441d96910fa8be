//! Maximum bipartite matching (Hopcroft–Karp) over compressed adjacency.

use std::collections::VecDeque;

const FREE: u32 = u32::MAX;

/// Bipartite graph with left vertices `0..left` and right vertices
/// `0..right`; `targets[offsets[u]..offsets[u+1]]` are the neighbours of `u`.
#[derive(Clone, Debug, Default)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl BipartiteGraph {
    pub fn from_edges(left: usize, right: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; left + 1];
        for &(u, _) in edges {
            degree[u as usize + 1] += 1;
        }
        for i in 0..left {
            degree[i + 1] += degree[i];
        }
        let offsets = degree.clone();
        let mut fill = degree;
        let mut targets = vec![0u32; edges.len()];
        for &(u, v) in edges {
            debug_assert!((v as usize) < right);
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }
        Self {
            left,
            right,
            offsets,
            targets,
        }
    }

    /// Builds the graph from adjacency lists emitted in left-vertex order.
    pub fn from_adjacency(right: usize, adjacency: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for list in adjacency {
            targets.extend(list);
            offsets.push(targets.len());
        }
        Self {
            left: offsets.len() - 1,
            right,
            offsets,
            targets,
        }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn neighbours(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn maximum_matching(&self) -> Matching {
        hopcroft_karp(self)
    }
}

#[derive(Clone, Debug)]
pub struct Matching {
    pub size: usize,
    pub mate_left: Vec<u32>,
    pub mate_right: Vec<u32>,
}

impl Matching {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mate_left
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != FREE)
            .map(|(u, &v)| (u, v as usize))
    }
}

/// Hopcroft–Karp: BFS layering from free left vertices, then iterative DFS
/// along layered edges to extract a maximal set of shortest augmenting paths.
pub fn hopcroft_karp(g: &BipartiteGraph) -> Matching {
    let mut mate_left = vec![FREE; g.left];
    let mut mate_right = vec![FREE; g.right];
    let mut dist = vec![u32::MAX; g.left];
    let mut cursor = vec![0usize; g.left];
    let mut queue = VecDeque::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut size = 0;

    // Greedy warm start.
    for u in 0..g.left {
        if let Some(&v) = g
            .neighbours(u)
            .iter()
            .find(|&&v| mate_right[v as usize] == FREE)
        {
            mate_left[u] = v;
            mate_right[v as usize] = u as u32;
            size += 1;
        }
    }

    loop {
        queue.clear();
        for u in 0..g.left {
            if mate_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbours(u) {
                let w = mate_right[v as usize];
                if w == FREE {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        if !found {
            break;
        }

        for u in 0..g.left {
            cursor[u] = g.offsets[u];
        }
        for root in 0..g.left {
            if mate_left[root] != FREE {
                continue;
            }
            stack.clear();
            stack.push(root);
            let mut augmented = false;
            while let Some(&u) = stack.last() {
                let end = g.offsets[u + 1];
                let mut advanced = false;
                while cursor[u] < end {
                    let v = g.targets[cursor[u]] as usize;
                    let w = mate_right[v];
                    if w == FREE {
                        augmented = true;
                        break;
                    }
                    if dist[w as usize] == dist[u] + 1 {
                        stack.push(w as usize);
                        advanced = true;
                        break;
                    }
                    cursor[u] += 1;
                }
                if augmented {
                    break;
                }
                if !advanced {
                    dist[u] = u32::MAX;
                    stack.pop();
                    if let Some(&parent) = stack.last() {
                        cursor[parent] += 1;
                    }
                }
            }
            if augmented {
                // Each stacked vertex takes the right vertex under its cursor.
                for &u in stack.iter().rev() {
                    let v = g.targets[cursor[u]];
                    mate_left[u] = v;
                    mate_right[v as usize] = u as u32;
                    dist[u] = u32::MAX;
                }
                size += 1;
            }
        }
    }

    Matching {
        size,
        mate_left,
        mate_right,
    }
}
