//! Exact sparse linear algebra over ℚ: rank, kernel and products, by
//! incremental Gaussian elimination on columns.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::fock::Coeff;

pub type SparseVec = BTreeMap<usize, Coeff>;

fn axpy(y: &mut SparseVec, a: &Coeff, x: &SparseVec) {
    for (i, v) in x {
        let e = y.entry(*i).or_insert_with(Coeff::zero);
        *e -= a * v;
        if e.is_zero() {
            y.remove(i);
        }
    }
}

/// Column-major sparse matrix with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![SparseVec::new(); cols] }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c.keys().all(|&r| r < rows)));
        SparseMatrix { rows, columns }
    }

    pub fn from_dense(rows: &[Vec<Coeff>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::zeros(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.columns[c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Coeff) {
        assert!(r < self.rows && c < self.columns.len(), "index out of range");
        if v.is_zero() {
            self.columns[c].remove(&r);
        } else {
            self.columns[c].insert(r, v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Coeff {
        self.columns[c].get(&r).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), rhs.rows, "inner dimensions differ");
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut out = SparseVec::new();
                for (k, v) in col {
                    axpy(&mut out, &-v.clone(), &self.columns[*k]);
                }
                out
            })
            .collect();
        SparseMatrix { rows: self.rows, columns }
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (k, x) in v {
            axpy(&mut out, &-x.clone(), &self.columns[*k]);
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::default();
        for col in &self.columns {
            ech.insert(col.clone(), None);
        }
        ech.pivots.len()
    }

    /// Basis of `{v : self · v = 0}`, in reduced form.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut ech = Echelon::default();
        let mut kernel = Vec::new();
        for (c, col) in self.columns.iter().enumerate() {
            let hist = SparseVec::from([(c, Coeff::one())]);
            if let Some(k) = ech.insert(col.clone(), Some(hist)) {
                kernel.push(k);
            }
        }
        kernel
    }
}

#[derive(Default)]
struct Echelon {
    pivots: BTreeMap<usize, (SparseVec, Option<SparseVec>)>,
}

impl Echelon {
    /// Reduces `v` against the pivots. Returns the combination history when
    /// `v` reduces to zero.
    fn insert(&mut self, mut v: SparseVec, mut hist: Option<SparseVec>) -> Option<SparseVec> {
        loop {
            let Some((&lead, a)) = v.iter().next() else {
                return hist;
            };
            match self.pivots.get(&lead) {
                Some((p, ph)) => {
                    let a = a.clone();
                    axpy(&mut v, &a, p);
                    if let (Some(h), Some(ph)) = (hist.as_mut(), ph.as_ref()) {
                        axpy(h, &a, ph);
                    }
                }
                None => {
                    let inv = Coeff::one() / a;
                    let v: SparseVec = v.into_iter().map(|(i, x)| (i, x * &inv)).collect();
                    let hist = hist.map(|h| h.into_iter().map(|(i, x)| (i, x * &inv)).collect());
                    self.pivots.insert(lead, (v, hist));
                    return None;
                }
            }
        }
    }
}
