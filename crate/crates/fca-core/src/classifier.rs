//! Exact classification of single-site, number-preserving, isotropic
//! interactions on a four-mode cell.
//!
//! Unknowns are real coefficients of Hermitian combinations of normal-ordered
//! monomials: `m` itself when creators equal annihilators, otherwise
//! `m + m†` and `i(m − m†)`. Isotropy becomes a real linear system
//! `[X, Γ(V_l)] = 0`, solved exactly.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{is_zero, rank_of_vectors, ExactMatrix, ExactScalar, RowEchelon};
use crate::fock::{ExactModes, FockError};
use crate::linalg::ComplexMatrix;
use crate::walks::DiracRep;

pub const CELL_MODES: usize = 4;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("internal matrix is not unitary over the Gaussian rationals")]
    NotUnitary,
    #[error("matrix entry {0} is not a Gaussian integer")]
    NotGaussianInteger(String),
    #[error("monomial degree {0} is not in 2..=8 or is odd")]
    BadDegree(usize),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// ψ†_{creators} ψ_{annihilators}, both lists ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub creators: Vec<usize>,
    pub annihilators: Vec<usize>,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.creators.len() + self.annihilators.len()
    }

    /// The adjoint of a normal-ordered monomial with ascending index lists is
    /// the swapped monomial with a plus sign: reversing q creators and q
    /// annihilators costs the same sign twice.
    pub fn adjoint(&self) -> Monomial {
        Monomial { creators: self.annihilators.clone(), annihilators: self.creators.clone() }
    }

    pub fn operator(&self, modes: &ExactModes) -> ExactMatrix {
        modes.monomial(&self.creators, &self.annihilators)
    }
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == size {
            out.push((0..n).filter(|&j| mask >> j & 1 == 1).collect());
        }
    }
    out.sort();
    out
}

/// All normal-ordered number-preserving monomials of the given even degrees.
pub fn enumerate_monomials(modes: usize, degrees: &[usize]) -> Result<Vec<Monomial>, ClassifierError> {
    let mut out = Vec::new();
    for &d in degrees {
        if d == 0 || d % 2 == 1 || d > 2 * modes {
            return Err(ClassifierError::BadDegree(d));
        }
        let q = d / 2;
        for cr in subsets(modes, q) {
            for an in subsets(modes, q) {
                out.push(Monomial { creators: cr.clone(), annihilators: an });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeneratorKind {
    /// m, with creators = annihilators
    Diagonal,
    /// m + m†
    Symmetric,
    /// i(m − m†)
    Antisymmetric,
}

/// One real direction in the space of Hermitian operators.
#[derive(Debug, Clone, Serialize)]
pub struct HermitianGenerator {
    pub monomial: Monomial,
    pub kind: GeneratorKind,
    #[serde(skip)]
    pub matrix: ExactMatrix,
}

impl HermitianGenerator {
    /// Real in the occupation basis; the antisymmetric ones are imaginary.
    pub fn is_real(&self) -> bool {
        self.kind != GeneratorKind::Antisymmetric
    }
}

pub fn hermitian_generators(monomials: &[Monomial], modes: &ExactModes) -> Vec<HermitianGenerator> {
    let i = ExactScalar::i();
    let mut out = Vec::new();
    for m in monomials {
        let adj = m.adjoint();
        if *m == adj {
            out.push(HermitianGenerator {
                monomial: m.clone(),
                kind: GeneratorKind::Diagonal,
                matrix: m.operator(modes),
            });
        } else if *m < adj {
            let op = m.operator(modes);
            let op_adj = op.adjoint();
            out.push(HermitianGenerator { monomial: m.clone(), kind: GeneratorKind::Symmetric, matrix: &op + &op_adj });
            out.push(HermitianGenerator {
                monomial: m.clone(),
                kind: GeneratorKind::Antisymmetric,
                matrix: (&op - &op_adj).scale(&i),
            });
        }
    }
    out
}

/// Converts a floating matrix whose entries are Gaussian integers.
pub fn exact_from_complex(m: &ComplexMatrix) -> Result<ExactMatrix, ClassifierError> {
    let mut out = ExactMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let (re, im) = (z.re.round(), z.im.round());
            if (z.re - re).abs() > 1e-12 || (z.im - im).abs() > 1e-12 {
                return Err(ClassifierError::NotGaussianInteger(format!("{z}")));
            }
            out[(i, j)] = crate::exact::gauss(re as i64, im as i64);
        }
    }
    Ok(out)
}

/// Γ(V): Γ(V)|Ω⟩ = |Ω⟩ and Γ(V) ψ†_a Γ(V)† = Σ_b V_{ba} ψ†_b.
pub fn second_quantize(v: &ExactMatrix, modes: &ExactModes) -> Result<ExactMatrix, ClassifierError> {
    let s = modes.modes();
    if v.rows() != s || v.cols() != s || &v.adjoint() * v != ExactMatrix::identity(s) {
        return Err(ClassifierError::NotUnitary);
    }
    let dim = modes.dim();
    // rotated creators Σ_b V_{ba} ψ†_b
    let rotated: Vec<ExactMatrix> = (0..s)
        .map(|a| {
            let mut acc = ExactMatrix::zeros(dim, dim);
            for b in 0..s {
                if !is_zero(&v[(b, a)]) {
                    acc = &acc + &modes.creators[b].scale(&v[(b, a)]);
                }
            }
            acc
        })
        .collect();
    let mut gamma = ExactMatrix::zeros(dim, dim);
    for state in 0..dim {
        let mut col = crate::fock::vacuum(s);
        // ψ†_{a1}…ψ†_{aq}|Ω⟩ with a1 < … < aq is the + basis state
        for a in (0..s).rev() {
            if state >> a & 1 == 1 {
                col = rotated[a].mul_vec(&col);
            }
        }
        for (r, z) in col.into_iter().enumerate() {
            gamma[(r, state)] = z;
        }
    }
    Ok(gamma)
}

/// Real-linear solution space of the isotropy constraints.
#[derive(Debug, Clone)]
pub struct InvariantBasis {
    pub generators: Vec<HermitianGenerator>,
    /// Real coefficient vectors over `generators`.
    pub coefficients: Vec<Vec<BigRational>>,
    /// The corresponding Hermitian operators.
    pub basis: Vec<ExactMatrix>,
}

impl InvariantBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the solutions that are real matrices in the occupation basis.
    pub fn real_sector_dimension(&self) -> usize {
        self.dimension() - self.projected_rank(false)
    }

    /// Dimension of the solutions that are imaginary matrices.
    pub fn imaginary_sector_dimension(&self) -> usize {
        self.dimension() - self.projected_rank(true)
    }

    /// Rank of the solutions projected onto the real (or imaginary) generators.
    fn projected_rank(&self, real: bool) -> usize {
        let vs: Vec<Vec<ExactScalar>> = self
            .coefficients
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&self.generators)
                    .filter(|(_, g)| g.is_real() == real)
                    .map(|(x, _)| ExactScalar::new(x.clone(), BigRational::zero()))
                    .collect()
            })
            .collect();
        rank_of_vectors(&vs)
    }

    pub fn without(&self, index: usize) -> InvariantBasis {
        let mut b = self.clone();
        b.coefficients.remove(index);
        b.basis.remove(index);
        b
    }
}

/// Solves [X, Γ(V_l)] = 0 for every element l of the representation.
pub fn solve_invariants(rep: &[ExactMatrix], degrees: &[usize]) -> Result<InvariantBasis, ClassifierError> {
    let modes = ExactModes::new(CELL_MODES)?;
    let monomials = enumerate_monomials(CELL_MODES, degrees)?;
    let generators = hermitian_generators(&monomials, &modes);
    let gammas = rep.iter().map(|v| second_quantize(v, &modes)).collect::<Result<Vec<_>, _>>()?;
    let commutators: Vec<Vec<ExactMatrix>> =
        gammas.iter().map(|g| generators.iter().map(|h| h.matrix.commutator(g)).collect()).collect();
    let n = generators.len();
    let dim = modes.dim();
    let mut ech = RowEchelon::new(n);
    'outer: for per_gamma in &commutators {
        for entry in 0..dim * dim {
            let (r, c) = (entry / dim, entry % dim);
            for part in 0..2 {
                let row: Vec<ExactScalar> = per_gamma
                    .iter()
                    .map(|m| {
                        let z = &m[(r, c)];
                        let x = if part == 0 { z.re.clone() } else { z.im.clone() };
                        ExactScalar::new(x, BigRational::zero())
                    })
                    .collect();
                if row.iter().all(is_zero) {
                    continue;
                }
                ech.push(row);
                if ech.rank() == n {
                    break 'outer;
                }
            }
        }
    }
    let kernel = ech.kernel();
    let coefficients: Vec<Vec<BigRational>> =
        kernel.into_iter().map(|v| v.into_iter().map(|z| z.re).collect()).collect();
    let basis = coefficients
        .iter()
        .map(|c| {
            let mut acc = ExactMatrix::zeros(dim, dim);
            for (x, g) in c.iter().zip(&generators) {
                if !x.is_zero() {
                    acc = &acc + &g.matrix.scale(&ExactScalar::new(x.clone(), BigRational::zero()));
                }
            }
            acc
        })
        .collect();
    Ok(InvariantBasis { generators, coefficients, basis })
}

/// Exact internal matrices of a Dirac representation (identity included).
pub fn dirac_rep_exact(variant: DiracRep) -> Result<Vec<ExactMatrix>, ClassifierError> {
    variant.matrices().iter().map(exact_from_complex).collect()
}

/// One interaction term of the classification with its coupling type.
#[derive(Debug, Clone)]
pub struct Family {
    pub label: &'static str,
    /// Complex couplings contribute both X + X† and i(X − X†).
    pub complex_coupling: bool,
    pub operator: ExactMatrix,
}

impl Family {
    /// The real directions the family spans.
    pub fn hermitian_parts(&self) -> Vec<ExactMatrix> {
        let adj = self.operator.adjoint();
        if self.complex_coupling {
            vec![&self.operator + &adj, (&self.operator - &adj).scale(&ExactScalar::i())]
        } else {
            vec![self.operator.clone()]
        }
    }
}

/// The thirteen interaction families of the four-mode cell. Modes are
/// numbered 1..4 in the labels and 0..3 in code.
pub fn interaction_families() -> Result<Vec<Family>, ClassifierError> {
    let m = ExactModes::new(CELL_MODES)?;
    let n = |j: usize| m.number(j - 1);
    let hop = |to: usize, from: usize| &m.creators[to - 1] * &m.annihilators[from - 1];
    let quartic = |c1: usize, c2: usize, a1: usize, a2: usize| m.monomial(&[c1 - 1, c2 - 1], &[a1 - 1, a2 - 1]);
    let plus_adj = |x: ExactMatrix| &x + &x.adjoint();
    let sum = |a: ExactMatrix, b: ExactMatrix| &a + &b;
    let prod = |a: ExactMatrix, b: ExactMatrix| &a * &b;
    let fam = |label, complex_coupling, operator| Family { label, complex_coupling, operator };
    Ok(vec![
        fam("lambda_1", true, sum(prod(n(3), hop(4, 2)), prod(n(4), hop(3, 1)))),
        fam("lambda_2", true, sum(prod(n(1), hop(2, 4)), prod(n(2), hop(1, 3)))),
        fam("lambda_3", true, quartic(1, 2, 3, 4)),
        fam("lambda_4", false, plus_adj(quartic(2, 4, 1, 3))),
        fam("lambda_5", false, plus_adj(quartic(2, 3, 1, 4))),
        fam("lambda_6", false, sum(prod(n(1), n(3)), prod(n(2), n(4)))),
        fam("lambda_7", false, sum(prod(n(1), n(4)), prod(n(2), n(3)))),
        fam("lambda_8", false, prod(n(1), n(2))),
        fam("lambda_9", false, prod(n(3), n(4))),
        fam("xi_1", true, sum(prod(prod(n(1), n(3)), hop(4, 2)), prod(prod(n(2), n(4)), hop(3, 1)))),
        fam("xi_2", false, prod(sum(n(1), n(2)), prod(n(3), n(4)))),
        fam("xi_3", false, prod(prod(n(1), n(2)), sum(n(3), n(4)))),
        fam("chi", false, prod(prod(n(1), n(2)), prod(n(3), n(4)))),
    ])
}

/// Hermitian matrix as a rational vector (real parts then imaginary parts),
/// so that ranks are real ranks.
fn real_vector(m: &ExactMatrix) -> Vec<ExactScalar> {
    let mut v: Vec<ExactScalar> =
        m.entries().iter().map(|z| ExactScalar::new(z.re.clone(), BigRational::zero())).collect();
    v.extend(m.entries().iter().map(|z| ExactScalar::new(z.im.clone(), BigRational::zero())));
    v
}

/// True when `x` lies in the real span of `basis`.
pub fn in_real_span(basis: &[ExactMatrix], x: &ExactMatrix) -> bool {
    let mut vs: Vec<Vec<ExactScalar>> = basis.iter().map(real_vector).collect();
    let before = rank_of_vectors(&vs);
    vs.push(real_vector(x));
    rank_of_vectors(&vs) == before
}

pub fn real_span_dimension(ops: &[ExactMatrix]) -> usize {
    rank_of_vectors(&ops.iter().map(real_vector).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyVerdict {
    pub label: String,
    pub complex_coupling: bool,
    /// X + X† (or X itself for real couplings) lies in the solution space.
    pub hermitian_part_contained: bool,
    /// i(X − X†) lies in the solution space; absent for real couplings.
    pub antihermitian_part_contained: Option<bool>,
    pub commutes_with_rep: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub solution_dimension: usize,
    pub real_sector_dimension: usize,
    pub imaginary_sector_dimension: usize,
    /// Real dimension spanned by all family directions.
    pub family_span_dimension: usize,
    /// Number of families, i.e. independent coupling constants.
    pub family_count: usize,
    pub families: Vec<FamilyVerdict>,
    pub all_contained: bool,
    pub span_equal: bool,
    pub offending: Vec<String>,
}

/// Checks every family against the solution space and compares the spans.
pub fn match_families(basis: &InvariantBasis, rep: &[ExactMatrix]) -> Result<MatchReport, ClassifierError> {
    let modes = ExactModes::new(CELL_MODES)?;
    let gammas = rep.iter().map(|v| second_quantize(v, &modes)).collect::<Result<Vec<_>, _>>()?;
    let families = interaction_families()?;
    let mut verdicts = Vec::new();
    let mut directions = Vec::new();
    let mut offending = Vec::new();
    for f in &families {
        let parts = f.hermitian_parts();
        let contained: Vec<bool> = parts.iter().map(|p| in_real_span(&basis.basis, p)).collect();
        let commutes = parts.iter().all(|p| gammas.iter().all(|g| p.commutator(g).is_zero()));
        if !contained.iter().all(|&c| c) {
            offending.push(f.label.to_string());
        }
        verdicts.push(FamilyVerdict {
            label: f.label.to_string(),
            complex_coupling: f.complex_coupling,
            hermitian_part_contained: contained[0],
            antihermitian_part_contained: contained.get(1).copied(),
            commutes_with_rep: commutes,
        });
        directions.extend(parts);
    }
    let family_span_dimension = real_span_dimension(&directions);
    let all_contained = offending.is_empty();
    Ok(MatchReport {
        solution_dimension: basis.dimension(),
        real_sector_dimension: basis.real_sector_dimension(),
        imaginary_sector_dimension: basis.imaginary_sector_dimension(),
        family_span_dimension,
        family_count: families.len(),
        families: verdicts,
        all_contained,
        span_equal: all_contained && family_span_dimension == basis.dimension(),
        offending,
    })
}

/// Checks the defining properties of one basis element.
pub fn check_element(x: &ExactMatrix, gammas: &[ExactMatrix], total_number: &ExactMatrix) -> bool {
    x.is_hermitian() && x.commutator(total_number).is_zero() && gammas.iter().all(|g| x.commutator(g).is_zero())
}

/// Rank of the stacked constraint system, exposed for diagnostics.
pub fn constraint_rank(rep: &[ExactMatrix], degrees: &[usize]) -> Result<usize, ClassifierError> {
    let b = solve_invariants(rep, degrees)?;
    Ok(b.generators.len() - b.dimension())
}
