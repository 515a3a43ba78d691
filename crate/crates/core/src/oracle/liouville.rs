//! Sparse Lindblad superoperator on the matrix elements reachable from a
//! given initial density matrix.

use std::collections::VecDeque;

use num_complex::Complex64;

use super::fock::SparseOp;
use super::Generator;

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ReducedLiouvillian {
    n: usize,
    pairs: Vec<(usize, usize)>,
    /// index into `pairs` keyed by the column-major offset j·n + i
    pos: Vec<u32>,
    op: SparseOp,
}

impl ReducedLiouvillian {
    /// Superoperator restricted to the smallest set of elements (i, j) that
    /// contains the support of `rho` (column-major) and is closed under the
    /// dynamics.
    pub fn new(gen: &Generator, rho: &[Complex64]) -> Self {
        let n = gen.dim();
        let heff = &gen.effective;
        let heff_adj = heff.adjoint();
        let jump_adj: Vec<SparseOp> = gen.jumps.iter().map(|(_, l)| l.adjoint()).collect();

        let mut pos = vec![ABSENT; n * n];
        let mut pairs = Vec::new();
        let mut queue = VecDeque::new();
        let mut visit = |i: usize, j: usize, pairs: &mut Vec<(usize, usize)>, queue: &mut VecDeque<(usize, usize)>| {
            let key = j * n + i;
            if pos[key] == ABSENT {
                pos[key] = pairs.len() as u32;
                pairs.push((i, j));
                queue.push_back((i, j));
            }
        };
        for j in 0..n {
            for i in 0..n {
                if rho[j * n + i] != Complex64::new(0.0, 0.0) {
                    visit(i, j, &mut pairs, &mut queue);
                }
            }
        }
        while let Some((k, l)) = queue.pop_front() {
            for (i, _) in heff_adj.row(k) {
                visit(i, l, &mut pairs, &mut queue);
            }
            for (j, _) in heff_adj.row(l) {
                visit(k, j, &mut pairs, &mut queue);
            }
            for la in &jump_adj {
                for (i, _) in la.row(k) {
                    for (j, _) in la.row(l) {
                        visit(i, j, &mut pairs, &mut queue);
                    }
                }
            }
        }

        let minus_i = -Complex64::i();
        let mut triplets = Vec::new();
        for (row, &(i, j)) in pairs.iter().enumerate() {
            let mut push = |a: usize, b: usize, v: Complex64| {
                let p = pos[b * n + a];
                if p != ABSENT {
                    triplets.push((row, p as usize, v));
                }
            };
            for (k, v) in heff.row(i) {
                push(k, j, minus_i * v);
            }
            for (m, v) in heff.row(j) {
                push(i, m, Complex64::i() * v.conj());
            }
            for (kappa, l) in &gen.jumps {
                for (k, a) in l.row(i) {
                    for (m, b) in l.row(j) {
                        push(k, m, *kappa * a * b.conj());
                    }
                }
            }
        }
        let op = SparseOp::from_triplets(pairs.len(), triplets);
        ReducedLiouvillian { n, pairs, pos, op }
    }

    /// Number of tracked matrix elements.
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn nnz(&self) -> usize {
        self.op.nnz()
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.op.apply(x, y);
    }

    /// Tracked elements of a column-major ρ.
    pub fn gather(&self, rho: &[Complex64]) -> Vec<Complex64> {
        self.pairs.iter().map(|&(i, j)| rho[j * self.n + i]).collect()
    }

    /// Column-major ρ with untracked elements set to zero.
    pub fn scatter(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut rho = vec![Complex64::new(0.0, 0.0); self.n * self.n];
        for (&(i, j), x) in self.pairs.iter().zip(v) {
            rho[j * self.n + i] = *x;
        }
        rho
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pos[j * self.n + i] != ABSENT
    }
}
