//! Dense matrices of polynomials. Bundle maps, Christoffel blocks and
//! projections are all stored this way.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{dim_err, Error, Result};
use crate::poly::{Poly, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            nvars,
            entries: vec![Poly::zero(nvars); rows * cols],
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        Self::from_fn(n, n, nvars, |i, j| if i == j { Poly::one(nvars) } else { Poly::zero(nvars) })
    }

    pub fn from_fn(rows: usize, cols: usize, nvars: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = f(i, j);
                assert_eq!(p.nvars(), nvars, "matrix entry on the wrong chart");
                entries.push(p);
            }
        }
        PolyMatrix { rows, cols, nvars, entries }
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(dim_err("from_rows", format!("row {} has {} entries, expected {}", i + 1, row.len(), c)));
            }
            for p in row {
                if p.nvars() != nvars {
                    return Err(Error::ChartMismatch {
                        expected: nvars,
                        found: p.nvars(),
                    });
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            nvars,
            entries,
        })
    }

    /// Constant matrix from integer rows.
    pub fn from_ints(nvars: usize, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        Self::from_fn(r, c, nvars, |i, j| Poly::from_int(nvars, rows[i][j]))
    }

    pub fn column_vector(v: &[Poly], nvars: usize) -> Self {
        Self::from_fn(v.len(), 1, nvars, |i, _| v[i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        assert!(i < self.rows && j < self.cols, "matrix index ({i}, {j}) out of range");
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert!(i < self.rows && j < self.cols, "matrix index ({i}, {j}) out of range");
        assert_eq!(p.nvars(), self.nvars, "matrix entry on the wrong chart");
        self.entries[i * self.cols + j] = p;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Poly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Poly> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        let cols = self.cols;
        self.entries.iter().enumerate().map(move |(n, p)| (n / cols.max(1), n % cols.max(1), p))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    fn same_shape(&self, other: &PolyMatrix, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(dim_err(op, format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        if self.nvars != other.nvars {
            return Err(Error::ChartMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_shape(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(dim_err("mul", format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        if self.nvars != other.nvars {
            return Err(Error::ChartMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols, self.nvars);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        *out.entry_mut(i, j) += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero(self.nvars);
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.cols, self.rows, self.nvars, |i, j| self.get(j, i).clone())
    }

    pub fn apply_partial(&self, j: usize) -> Result<PolyMatrix> {
        let entries = self.entries.iter().map(|p| p.partial(j)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries,
        })
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        let entries: Vec<Poly> = self.entries.iter().map(f).collect();
        let nvars = entries.first().map(Poly::nvars).unwrap_or(self.nvars);
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars,
            entries,
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn scale_poly(&self, f: &Poly) -> PolyMatrix {
        self.map(|p| p * f)
    }

    /// Derivative of every entry along a vector field on the chart.
    pub fn derive_along(&self, field: &[Poly]) -> PolyMatrix {
        self.map(|p| p.derive_along(field))
    }

    pub fn extend_vars(&self, nvars: usize) -> PolyMatrix {
        let mut m = self.map(|p| p.extend_vars(nvars));
        m.nvars = nvars;
        m
    }

    pub fn substitute(&self, subs: &[Poly], nvars: usize) -> Result<PolyMatrix> {
        let entries = self.entries.iter().map(|p| p.substitute(subs)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars,
            entries,
        })
    }

    /// Copies `block` into this matrix with its top-left corner at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, block: &PolyMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r: usize, c: usize, rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix::from_fn(rows, cols, self.nvars, |i, j| self.get(r + i, c + j).clone())
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> MatrixDisplay<'a> {
        MatrixDisplay { m: self, names: Some(names) }
    }
}

pub struct MatrixDisplay<'a> {
    m: &'a PolyMatrix,
    names: Option<&'a [String]>,
}

impl fmt::Display for MatrixDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.m.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.m.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                match self.names {
                    Some(n) => write!(f, "{}", self.m.get(i, j).display_with(n))?,
                    None => write!(f, "{}", self.m.get(i, j))?,
                }
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        MatrixDisplay { m: self, names: None }.fmt(f)
    }
}

impl Add for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_add(rhs).expect("matrix add")
    }
}

impl Sub for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_sub(rhs).expect("matrix sub")
    }
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_mul(rhs).expect("matrix mul")
    }
}

impl Add for PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: PolyMatrix) -> PolyMatrix {
        &self + &rhs
    }
}

impl Sub for PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: PolyMatrix) -> PolyMatrix {
        &self - &rhs
    }
}

impl Mul for PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: PolyMatrix) -> PolyMatrix {
        &self * &rhs
    }
}

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.map(|p| -p)
    }
}

impl Neg for PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let m = PolyMatrix::from_fn(2, 2, 2, |i, j| Poly::var(2, (i + j) % 2).scale_int(i as i64 + 1));
        assert_eq!(&PolyMatrix::identity(2, 2) * &m, m);
        assert_eq!(&m * &PolyMatrix::identity(2, 2), m);
    }

    #[test]
    fn transpose_is_an_involution() {
        let m = PolyMatrix::from_fn(2, 3, 2, |i, j| Poly::var(2, 0).pow((i + 2 * j) as u32));
        assert_eq!(m.transpose().shape(), (3, 2));
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn apply_partial_differentiates_entries() {
        let n = 2;
        let m = PolyMatrix::from_rows(n, vec![vec![Poly::var(n, 0), Poly::zero(n)], vec![Poly::zero(n), Poly::one(n)]]).unwrap();
        assert_eq!(m.apply_partial(0).unwrap(), PolyMatrix::from_ints(n, &[&[1, 0], &[0, 0]]));
        assert!(m.apply_partial(5).is_err());
    }

    #[test]
    fn shape_errors() {
        let a = PolyMatrix::zeros(2, 3, 1);
        let b = PolyMatrix::zeros(2, 2, 1);
        assert!(matches!(a.checked_mul(&b), Err(Error::Dimension { .. })));
        assert!(a.checked_add(&b).is_err());
        assert!(b.checked_mul(&a).is_ok());
    }

    #[test]
    fn empty_shapes_multiply() {
        let a = PolyMatrix::zeros(3, 0, 0);
        let b = PolyMatrix::zeros(0, 2, 0);
        assert_eq!(&a * &b, PolyMatrix::zeros(3, 2, 0));
    }
}
