//! All-pairs shortest travel times used to cost deadheading between
//! consecutive serviced arcs.

use crate::error::{Error, Result};
use crate::graph::{ArcId, Instance, NodeId};

/// Shortest-path travel times between every ordered node pair, with the first
/// arc of each shortest path kept for path reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct DeadheadMatrix {
    n: usize,
    sp: Vec<f64>,
    first_arc: Vec<Option<ArcId>>,
    heads: Vec<NodeId>,
}

impl DeadheadMatrix {
    /// Floyd-Warshall over traversal times. Parallel arcs keep the cheapest
    /// (lowest id on ties).
    pub fn new(inst: &Instance) -> Result<Self> {
        let n = inst.num_nodes();
        let mut sp = vec![f64::INFINITY; n * n];
        let mut first_arc = vec![None; n * n];
        for i in 0..n {
            sp[i * n + i] = 0.0;
        }
        for arc in &inst.arcs {
            let idx = arc.tail * n + arc.head;
            if arc.tail != arc.head && arc.d < sp[idx] {
                sp[idx] = arc.d;
                first_arc[idx] = Some(arc.id);
            }
        }
        for k in 0..n {
            for i in 0..n {
                let ik = sp[i * n + k];
                if !ik.is_finite() || i == k {
                    continue;
                }
                for j in 0..n {
                    let through = ik + sp[k * n + j];
                    if through < sp[i * n + j] {
                        sp[i * n + j] = through;
                        first_arc[i * n + j] = first_arc[i * n + k];
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !sp[i * n + j].is_finite() {
                    return Err(Error::NotStronglyConnected { from: i, to: j });
                }
            }
        }
        Ok(Self {
            n,
            sp,
            first_arc,
            heads: inst.arcs.iter().map(|a| a.head).collect(),
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sp(&self, from: NodeId, to: NodeId) -> f64 {
        self.sp[from * self.n + to]
    }

    /// Node following `from` on the stored shortest path to `to`.
    pub fn next_hop(&self, from: NodeId, to: NodeId) -> Option<NodeId> {
        self.first_arc[from * self.n + to].map(|a| self.heads[a])
    }

    /// Arcs of the stored shortest path, empty when `from == to`.
    pub fn path_arcs(&self, from: NodeId, to: NodeId) -> Vec<ArcId> {
        let mut out = Vec::new();
        let mut at = from;
        while at != to {
            let arc = self.first_arc[at * self.n + to].expect("strongly connected matrix");
            out.push(arc);
            at = self.heads[arc];
        }
        out
    }

    /// Node sequence of the stored shortest path, both endpoints included.
    pub fn path_nodes(&self, from: NodeId, to: NodeId) -> Vec<NodeId> {
        let mut out = vec![from];
        out.extend(self.path_arcs(from, to).into_iter().map(|a| self.heads[a]));
        out
    }

    pub fn max_sp(&self) -> f64 {
        self.sp.iter().copied().fold(0.0, f64::max)
    }
}

/// Convenience wrapper around [`DeadheadMatrix::new`].
pub fn compute_deadhead_matrix(inst: &Instance) -> Result<DeadheadMatrix> {
    DeadheadMatrix::new(inst)
}

/// Travel time from the end of `from_arc` to the start of `to_arc`.
#[inline]
pub fn deadhead_time(inst: &Instance, mat: &DeadheadMatrix, from_arc: ArcId, to_arc: ArcId) -> f64 {
    mat.sp(inst.arcs[from_arc].head, inst.arcs[to_arc].tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::TIME_EPS;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    #[test]
    fn triangle_distances() {
        let inst = triangle();
        let m = DeadheadMatrix::new(&inst).unwrap();
        assert_eq!(m.sp(0, 2), 2.0);
        assert_eq!(m.sp(2, 0), 1.0);
        for i in 0..3 {
            assert_eq!(m.sp(i, i), 0.0);
        }
        assert_eq!(m.path_nodes(0, 2), vec![0, 1, 2]);
        assert_eq!(m.next_hop(0, 2), Some(1));
    }

    #[test]
    fn deadhead_between_arcs() {
        let inst = triangle();
        let m = DeadheadMatrix::new(&inst).unwrap();
        // 0->1 followed by 1->2 share node 1.
        assert_eq!(deadhead_time(&inst, &m, 0, 1), 0.0);
        // a = w->u (arc 2), b = v->w (arc 1): sp[u][v] = 1.
        assert_eq!(deadhead_time(&inst, &m, 2, 1), 1.0);
    }

    #[test]
    fn unreachable_pair_is_a_fault() {
        let inst = instance(2, vec![deadhead(0, 0, 1, 1.0)], 1, 1.0, 1);
        assert!(matches!(
            DeadheadMatrix::new(&inst),
            Err(Error::NotStronglyConnected { from: 1, to: 0 })
        ));
    }

    /// Random strongly connected digraph: a Hamiltonian cycle plus extras.
    fn random_instance(n: usize, extra: usize, seed: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut arcs = Vec::new();
        for i in 0..n {
            let d = rng.gen_range(0.1..5.0);
            arcs.push(deadhead(arcs.len(), i, (i + 1) % n, d));
        }
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                let d = rng.gen_range(0.1..5.0);
                arcs.push(deadhead(arcs.len(), u, v, d));
            }
        }
        instance(n, arcs, 1, 1.0, 1)
    }

    #[derive(PartialEq)]
    struct Item(f64, usize);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Item {
        fn cmp(&self, o: &Self) -> Ordering {
            o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
        }
    }

    fn dijkstra(inst: &Instance, src: usize) -> Vec<f64> {
        let n = inst.num_nodes();
        let mut dist = vec![f64::INFINITY; n];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::from([Item(0.0, src)]);
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for a in inst.arcs.iter().filter(|a| a.tail == u) {
                let nd = d + a.d;
                if nd < dist[a.head] {
                    dist[a.head] = nd;
                    heap.push(Item(nd, a.head));
                }
            }
        }
        dist
    }

    fn brute_force_paths(inst: &Instance, from: usize, to: usize) -> f64 {
        fn go(inst: &Instance, at: usize, to: usize, seen: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if at == to {
                *best = best.min(acc);
                return;
            }
            for a in inst.arcs.iter().filter(|a| a.tail == at) {
                if !seen[a.head] {
                    seen[a.head] = true;
                    go(inst, a.head, to, seen, acc + a.d, best);
                    seen[a.head] = false;
                }
            }
        }
        let mut seen = vec![false; inst.num_nodes()];
        seen[from] = true;
        let mut best = f64::INFINITY;
        go(inst, from, to, &mut seen, 0.0, &mut best);
        best
    }

    #[test]
    fn eight_node_matrix_matches_dijkstra_and_paths_reconstruct() {
        for seed in 0..20 {
            let inst = random_instance(8, 12, seed);
            let m = DeadheadMatrix::new(&inst).unwrap();
            for i in 0..8 {
                let dist = dijkstra(&inst, i);
                for j in 0..8 {
                    assert!((m.sp(i, j) - dist[j]).abs() <= TIME_EPS);
                    let along: f64 = m.path_arcs(i, j).iter().map(|&a| inst.arcs[a].d).sum();
                    assert!((along - m.sp(i, j)).abs() <= TIME_EPS);
                }
            }
        }
    }

    #[test]
    fn arc_to_arc_deadhead_matches_simple_path_enumeration() {
        for seed in 0..10 {
            let inst = random_instance(6, 6, 100 + seed);
            let m = DeadheadMatrix::new(&inst).unwrap();
            for a in 0..inst.arcs.len() {
                for b in 0..inst.arcs.len() {
                    let expect = brute_force_paths(&inst, inst.arcs[a].head, inst.arcs[b].tail);
                    assert!((deadhead_time(&inst, &m, a, b) - expect).abs() <= TIME_EPS);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn triangle_inequality_and_relabeling(seed in 0u64..1000, perm_seed in 0u64..1000) {
            let inst = random_instance(7, 10, seed);
            let m = DeadheadMatrix::new(&inst).unwrap();
            let n = inst.num_nodes();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        prop_assert!(m.sp(i, k) <= m.sp(i, j) + m.sp(j, k) + TIME_EPS);
                    }
                }
            }

            let mut perm: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            let mut relabeled = inst.clone();
            for a in &mut relabeled.arcs {
                a.tail = perm[a.tail];
                a.head = perm[a.head];
            }
            let pm = DeadheadMatrix::new(&relabeled).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((pm.sp(perm[i], perm[j]) - m.sp(i, j)).abs() <= TIME_EPS);
                }
            }
        }
    }
}
