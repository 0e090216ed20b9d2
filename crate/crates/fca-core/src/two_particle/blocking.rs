//! The full pair space (all 16 ordered mode pairs) at fixed total momentum,
//! used to check that the six interacting pairs form an invariant block.

use serde::Serialize;

use super::{build_evolution, build_interaction_block, Lattice, TwoParticleParams};
use crate::linalg::{c, cis};
use crate::sparse::SparseMatrix;

/// Mode pairs (0-based) of the labels e1..e6.
pub const LABEL_PAIRS: [(usize, usize); 6] = [(0, 3), (2, 1), (2, 3), (3, 0), (1, 2), (3, 2)];

/// Hopping direction of each cell mode: modes 1 and 4 move one way, 2 and 3
/// the other.
const DIRECTION: [i64; 4] = [1, -1, -1, 1];

#[derive(Debug, Clone)]
pub struct PairSpace {
    pub params: TwoParticleParams,
    lattice: Lattice,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QBlockingReport {
    /// Frobenius norm of [Q, A₂].
    pub commutator: f64,
    /// (I−Q)A₂(I−Q) against the free antisymmetrized step.
    pub complement_defect: f64,
    /// QA₂Q against the six-label blocked evolution.
    pub block_defect: f64,
}

impl PairSpace {
    pub fn new(params: &TwoParticleParams) -> Self {
        Self { params: *params, lattice: params.lattice() }
    }

    pub fn dim(&self) -> usize {
        16 * self.lattice.sites()
    }

    fn index(&self, a: usize, b: usize, y: i64) -> usize {
        (4 * a + b) * self.lattice.sites() + (y + self.lattice.half_width as i64) as usize
    }

    fn each(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..4).flat_map(move |a| (0..4).flat_map(move |b| self.lattice.ys().map(move |y| (a, b, y))))
    }

    pub fn free_step(&self) -> SparseMatrix {
        let p = self.params.p;
        let trip = self.each().map(|(a, b, y)| {
            let to = self.lattice.wrap(y + DIRECTION[a] - DIRECTION[b]);
            (self.index(a, b, to), self.index(a, b, y), cis(p * (DIRECTION[a] + DIRECTION[b]) as f64))
        });
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    pub fn contact(&self) -> SparseMatrix {
        let block = build_interaction_block(self.params.lambda);
        let labelled: Vec<usize> = LABEL_PAIRS.iter().map(|&(a, b)| self.index(a, b, 0)).collect();
        let mut trip: Vec<_> = (0..self.dim()).filter(|i| !labelled.contains(i)).map(|i| (i, i, c(1.0, 0.0))).collect();
        for (r, &row) in labelled.iter().enumerate() {
            for (s, &col) in labelled.iter().enumerate() {
                trip.push((row, col, block[(r, s)]));
            }
        }
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    pub fn antisymmetrizer(&self) -> SparseMatrix {
        let trip = self.each().flat_map(|(a, b, y)| {
            let col = self.index(a, b, y);
            [(col, col, c(0.5, 0.0)), (self.index(b, a, -y), col, c(-0.5, 0.0))]
        });
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    /// Q: projector onto the six interacting pairs at every `y`.
    pub fn q(&self) -> SparseMatrix {
        let trip = LABEL_PAIRS
            .iter()
            .flat_map(|&(a, b)| self.lattice.ys().map(move |y| (a, b, y)))
            .map(|(a, b, y)| (self.index(a, b, y), self.index(a, b, y), c(1.0, 0.0)));
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    pub fn evolution(&self) -> SparseMatrix {
        let proj = self.antisymmetrizer();
        proj.mul(&self.contact()).mul(&self.free_step()).mul(&proj)
    }

    pub fn check(&self) -> QBlockingReport {
        let a2 = self.evolution();
        let q = self.q();
        let rest = SparseMatrix::identity(self.dim()).sub(&q);
        let proj = self.antisymmetrizer();
        let free = proj.mul(&self.free_step()).mul(&proj);
        let commutator = q.mul(&a2).sub(&a2.mul(&q)).frobenius();
        let complement_defect = rest.mul(&a2).mul(&rest).sub(&rest.mul(&free).mul(&rest)).frobenius();

        let blocked = build_evolution(&self.params).matrix;
        let lat = self.lattice;
        let embed = |idx: usize| {
            let (label, y) = lat.site(idx);
            let (a, b) = LABEL_PAIRS[label];
            self.index(a, b, y)
        };
        let embedded = SparseMatrix::from_triplets(
            self.dim(),
            self.dim(),
            (0..lat.dim()).flat_map(|col| blocked.column(col).iter().map(move |&(row, v)| (embed(row), embed(col), v))),
        );
        let block_defect = q.mul(&a2).mul(&q).sub(&embedded).frobenius();
        QBlockingReport { commutator, complement_defect, block_defect }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn interacting_pairs_form_an_invariant_block() {
        for (p, mu, phase) in [(0.7, 1.0, 0.2), (1.9, 2.6, -1.0), (0.0, std::f64::consts::PI, 0.0)] {
            let pr = TwoParticleParams::new(p, mu / SQRT_2, phase, 8).unwrap();
            let report = PairSpace::new(&pr).check();
            assert!(report.commutator < 1e-12, "{report:?}");
            assert!(report.complement_defect < 1e-12, "{report:?}");
            assert!(report.block_defect < 1e-12, "{report:?}");
        }
    }

    #[test]
    fn label_pairs_are_exchange_closed() {
        for i in 0..3 {
            let (a, b) = LABEL_PAIRS[i];
            assert_eq!(LABEL_PAIRS[i + 3], (b, a));
        }
    }

    #[test]
    fn free_step_matches_massless_walk() {
        // e3 = (3,4) moves y ↦ y − 2 with no phase
        let pr = TwoParticleParams::new(0.4, 0.0, 0.0, 8).unwrap();
        let space = PairSpace::new(&pr);
        let d = space.free_step();
        assert_eq!(d.column(space.index(2, 3, 0)), &[(space.index(2, 3, -2), c(1.0, 0.0))]);
        assert_eq!(d.column(space.index(0, 3, 4)), &[(space.index(0, 3, 4), cis(0.8))]);
    }
}
