//! Truncated Fock basis and sparse operators built from normal-ordered
//! ladder monomials.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rwa::{OperatorSignature, MODE_A, MODE_L, MODE_R};

/// Tensor-product basis with the last mode varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl FockSpace {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        FockSpace {
            dims: dims.to_vec(),
            strides,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn index(&self, occupations: &[usize]) -> usize {
        occupations.iter().zip(&self.strides).map(|(n, s)| n * s).sum()
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % self.dims[mode]
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.modes()).map(|m| self.occupation(index, m)).collect()
    }
}

/// Compressed-row sparse complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOp {
    pub fn zeros(dim: usize) -> Self {
        SparseOp {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Build from (row, col, value) triplets; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseOp { dim, row_ptr, cols, vals }.pruned()
    }

    fn pruned(self) -> Self {
        let dim = self.dim;
        let mut triplets = Vec::with_capacity(self.vals.len());
        let mut row_ptr = vec![0; dim + 1];
        for r in 0..dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != Complex64::new(0.0, 0.0) {
                    triplets.push((self.cols[k], self.vals[k]));
                    row_ptr[r + 1] += 1;
                }
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let (cols, vals) = triplets.into_iter().unzip();
        SparseOp { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        (0..self.dim)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r)
            .find(|&(cc, _)| cc == c)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| v)
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().into_iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        SparseOp::from_triplets(self.dim, t)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        SparseOp {
            vals: self.vals.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &SparseOp) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut t = self.triplets();
        t.extend(other.triplets());
        SparseOp::from_triplets(self.dim, t)
    }

    pub fn matmul(&self, other: &SparseOp) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut t = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        SparseOp::from_triplets(self.dim, t)
    }

    /// y = A x
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |A − A†|
    pub fn hermiticity_defect(&self) -> f64 {
        self.add(&self.adjoint().scaled(Complex64::new(-1.0, 0.0))).max_abs()
    }

    /// ⟨x|A|x⟩
    pub fn expectation_pure(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                acc += x[r].conj() * v * x[c];
            }
        }
        acc
    }

    /// Tr(A ρ) for a column-major dense ρ.
    pub fn expectation_mixed(&self, rho: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                // ρ[c, r]
                acc += v * rho[r * self.dim + c];
            }
        }
        acc
    }

    /// out = A ρ with ρ and out dense column-major.
    pub fn left_mul_dense(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for j in 0..n {
            let col = &rho[j * n..(j + 1) * n];
            let dst = &mut out[j * n..(j + 1) * n];
            self.apply(col, dst);
        }
    }

    /// out += s · A B† with B dense column-major.
    pub fn add_mul_adjoint_dense(&self, b: &[Complex64], s: f64, out: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            for (k, a) in self.row(i) {
                let a = a * s;
                let bcol = &b[k * n..(k + 1) * n];
                for j in 0..n {
                    // (A B†)[i, j] = Σ_k A[i,k] conj(B[j,k])
                    out[j * n + i] += a * bcol[j].conj();
                }
            }
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }
}

/// Which tensor factor holds each physical mode (a, b_L, b_R).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeMap {
    pub squid: Option<usize>,
    pub left: usize,
    pub right: usize,
}

impl ModeMap {
    pub const TWO_MODE: ModeMap = ModeMap {
        squid: None,
        left: 0,
        right: 1,
    };
    pub const THREE_MODE: ModeMap = ModeMap {
        squid: Some(0),
        left: 1,
        right: 2,
    };

    fn slot(&self, physical: usize) -> Option<usize> {
        match physical {
            MODE_A => self.squid,
            MODE_L => Some(self.left),
            MODE_R => Some(self.right),
            _ => None,
        }
    }
}

/// (c†)^p c^q |n⟩ = sqrt(n!/(n−q)!) sqrt((n−q+p)!/(n−q)!) |n−q+p⟩
fn ladder_amplitude(n: usize, q: usize, p: usize) -> Option<(usize, f64)> {
    if n < q {
        return None;
    }
    let m = n - q;
    let down: f64 = ((m + 1)..=n).map(|k| k as f64).product();
    let up: f64 = ((m + 1)..=(m + p)).map(|k| k as f64).product();
    Some((m + p, (down * up).sqrt()))
}

/// Matrix of Σ coeff · monomial projected onto the truncated space.
pub fn operator_from_terms(
    space: &FockSpace,
    map: ModeMap,
    terms: &[(OperatorSignature, Complex64)],
) -> Result<SparseOp> {
    for (op, _) in terms {
        for physical in [MODE_A, MODE_L, MODE_R] {
            if op.degree(physical) > 0 && map.slot(physical).is_none() {
                return Err(Error::InvalidParameter {
                    field: "terms",
                    reason: format!("operator {} acts on a mode absent from the truncation", op.ascii()),
                });
            }
        }
    }
    let dim = space.dim();
    let mut triplets = Vec::new();
    for col in 0..dim {
        let occ = space.occupations(col);
        'term: for (op, coeff) in terms {
            let mut target = occ.clone();
            let mut amp = 1.0;
            for physical in [MODE_A, MODE_L, MODE_R] {
                let Some(slot) = map.slot(physical) else { continue };
                let (q, p) = op.mode(physical);
                match ladder_amplitude(occ[slot], q as usize, p as usize) {
                    Some((n, a)) if n < space.dims()[slot] => {
                        target[slot] = n;
                        amp *= a;
                    }
                    _ => continue 'term,
                }
            }
            triplets.push((space.index(&target), col, coeff * amp));
        }
    }
    Ok(SparseOp::from_triplets(dim, triplets))
}

/// Annihilation operator of one tensor factor.
pub fn annihilation(space: &FockSpace, slot: usize) -> SparseOp {
    let mut triplets = Vec::new();
    for col in 0..space.dim() {
        let n = space.occupation(col, slot);
        if n > 0 {
            let mut occ = space.occupations(col);
            occ[slot] -= 1;
            triplets.push((space.index(&occ), col, Complex64::new((n as f64).sqrt(), 0.0)));
        }
    }
    SparseOp::from_triplets(space.dim(), triplets)
}

/// Number operator of one tensor factor.
pub fn number(space: &FockSpace, slot: usize) -> SparseOp {
    let triplets = (0..space.dim())
        .map(|i| (i, i, Complex64::new(space.occupation(i, slot) as f64, 0.0)))
        .collect();
    SparseOp::from_triplets(space.dim(), triplets)
}
