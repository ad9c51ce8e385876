//! Arithmetic and linear algebra over GF(2^8).
//!
//! Elements are bytes; addition is XOR and multiplication is polynomial
//! multiplication modulo x^8 + x^4 + x^3 + x + 1 (0x11B). Multiplication goes
//! through a full 256x256 product table built at compile time from log/exp
//! tables over the generator 0x03.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Reduction polynomial x^8 + x^4 + x^3 + x + 1.
pub const POLY: u16 = 0x11B;

const fn build_exp_log() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u8 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x;
        exp[i + 255] = x;
        log[x as usize] = i as u8;
        // x *= 3, i.e. x*2 ^ x
        let hi = x & 0x80;
        let mut x2 = x << 1;
        if hi != 0 {
            x2 ^= (POLY & 0xFF) as u8;
        }
        x = x2 ^ x;
        i += 1;
    }
    (exp, log)
}

const EXP_LOG: ([u8; 512], [u8; 256]) = build_exp_log();
const EXP: [u8; 512] = EXP_LOG.0;
const LOG: [u8; 256] = EXP_LOG.1;

const fn build_mul_table() -> [[u8; 256]; 256] {
    let mut t = [[0u8; 256]; 256];
    let mut a = 1;
    while a < 256 {
        let mut b = 1;
        while b < 256 {
            t[a][b] = EXP[LOG[a] as usize + LOG[b] as usize];
            b += 1;
        }
        a += 1;
    }
    t
}

static MUL: [[u8; 256]; 256] = build_mul_table();

/// An element of GF(2^8).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    /// Multiplicative inverse; zero has none.
    pub fn inverse(self) -> Result<Gf256> {
        if self.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(Gf256(EXP[255 - LOG[self.0 as usize] as usize]))
    }

    /// Product table row for this element: `row[b] == self * b`.
    #[inline]
    pub fn mul_row(self) -> &'static [u8; 256] {
        &MUL[self.0 as usize]
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf256({:#04x})", self.0)
    }
}

impl fmt::Display for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02x}", self.0)
    }
}

impl From<u8> for Gf256 {
    fn from(v: u8) -> Self {
        Gf256(v)
    }
}

impl From<Gf256> for u8 {
    fn from(v: Gf256) -> Self {
        v.0
    }
}

impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Sub for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        Gf256(MUL[self.0 as usize][rhs.0 as usize])
    }
}

/// Division by zero panics, like integer division.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Gf256 {
    type Output = Gf256;
    #[inline]
    fn div(self, rhs: Gf256) -> Gf256 {
        self * rhs.inverse().expect("division by zero in GF(256)")
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for Gf256 {
    #[inline]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl SubAssign for Gf256 {
    #[inline]
    fn sub_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Zero for Gf256 {
    fn zero() -> Self {
        Gf256::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Gf256 {
    fn one() -> Self {
        Gf256::ONE
    }
}

impl std::iter::Sum for Gf256 {
    fn sum<I: Iterator<Item = Gf256>>(iter: I) -> Gf256 {
        iter.fold(Gf256::ZERO, |a, b| a + b)
    }
}

#[inline]
pub fn add(a: Gf256, b: Gf256) -> Gf256 {
    a + b
}

#[inline]
pub fn mul(a: Gf256, b: Gf256) -> Gf256 {
    a * b
}

#[inline]
pub fn inverse(a: Gf256) -> Result<Gf256> {
    a.inverse()
}

/// `dst[i] += c * src[i]` over bytes.
#[inline]
pub fn axpy(dst: &mut [u8], c: Gf256, src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    match c.0 {
        0 => {}
        1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
        _ => {
            let row = c.mul_row();
            dst.iter_mut().zip(src).for_each(|(d, &s)| *d ^= row[s as usize]);
        }
    }
}

/// `dst[i] += c * src[i]` over field elements.
#[inline]
pub fn axpy_elems(dst: &mut [Gf256], c: Gf256, src: &[Gf256]) {
    debug_assert_eq!(dst.len(), src.len());
    if c.0 == 0 {
        return;
    }
    let row = c.mul_row();
    dst.iter_mut().zip(src).for_each(|(d, s)| d.0 ^= row[s.0 as usize]);
}

/// `v[i] *= c` over bytes.
#[inline]
pub fn scale(v: &mut [u8], c: Gf256) {
    let row = c.mul_row();
    v.iter_mut().for_each(|x| *x = row[*x as usize]);
}

#[inline]
pub fn scale_elems(v: &mut [Gf256], c: Gf256) {
    let row = c.mul_row();
    v.iter_mut().for_each(|x| x.0 = row[x.0 as usize]);
}

/// Dense row-major matrix over GF(2^8).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoefMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Gf256>,
}

impl fmt::Debug for CoefMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CoefMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl CoefMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CoefMatrix {
            rows,
            cols,
            entries: vec![Gf256::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Gf256::ONE);
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[Gf256]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            entries.extend_from_slice(r);
        }
        Ok(CoefMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} bytes for a {rows}x{cols} matrix",
                bytes.len()
            )));
        }
        Ok(CoefMatrix {
            rows,
            cols,
            entries: bytes.iter().copied().map(Gf256).collect(),
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Gf256 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Gf256) {
        self.entries[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Gf256] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Gf256] {
        &mut self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Adds `c * row[src]` into `row[dst]`.
    fn row_axpy(&mut self, dst: usize, c: Gf256, src: usize) {
        debug_assert_ne!(dst, src);
        let cols = self.cols;
        let (d, s) = if dst < src {
            let (lo, hi) = self.entries.split_at_mut(src * cols);
            (&mut lo[dst * cols..(dst + 1) * cols], &hi[..cols])
        } else {
            let (lo, hi) = self.entries.split_at_mut(dst * cols);
            (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
        };
        axpy_elems(d, c, s);
    }

    /// Rank by forward Gaussian elimination. The pivot for each column is the
    /// first remaining row with a nonzero entry there.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let inv = m.get(rank, col).inverse().expect("pivot is nonzero");
            scale_elems(m.row_mut(rank), inv);
            for r in rank + 1..m.rows {
                let f = m.get(r, col);
                if !f.is_zero() {
                    m.row_axpy(r, f, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Computes `self * rows`, treating each payload as one row of the right
    /// operand.
    pub fn mul_payloads<P: AsRef<[u8]>>(&self, payloads: &[P]) -> Result<Vec<Vec<u8>>> {
        if payloads.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{} payload rows for a matrix with {} columns",
                payloads.len(),
                self.cols
            )));
        }
        let k = payloads.first().map_or(0, |p| p.as_ref().len());
        if payloads.iter().any(|p| p.as_ref().len() != k) {
            return Err(Error::Dimension("payloads differ in length".into()));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut out = vec![0u8; k];
                for (c, p) in self.row(r).iter().zip(payloads) {
                    axpy(&mut out, *c, p.as_ref());
                }
                out
            })
            .collect())
    }

    /// Solves `self * x = rhs` for square, full-rank `self`, with `rhs` given
    /// as one payload row per matrix row.
    pub fn solve<P: AsRef<[u8]>>(&self, rhs: &[P]) -> Result<Vec<Vec<u8>>> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if rhs.len() != self.rows {
            return Err(Error::Dimension(format!(
                "{} right-hand rows for {} equations",
                rhs.len(),
                self.rows
            )));
        }
        let k = rhs.first().map_or(0, |p| p.as_ref().len());
        if rhs.iter().any(|p| p.as_ref().len() != k) {
            return Err(Error::Dimension("payloads differ in length".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut b: Vec<Vec<u8>> = rhs.iter().map(|p| p.as_ref().to_vec()).collect();

        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Err(Error::RankDeficient {
                    rank: self.rank(),
                    needed: n,
                });
            };
            m.swap_rows(col, p);
            b.swap(col, p);
            let inv = m.get(col, col).inverse()?;
            scale_elems(m.row_mut(col), inv);
            scale(&mut b[col], inv);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m.get(r, col);
                if f.is_zero() {
                    continue;
                }
                m.row_axpy(r, f, col);
                let (pivot, target) = if r < col {
                    let (lo, hi) = b.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = b.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                axpy(target, f, pivot);
            }
        }
        Ok(b)
    }
}

/// Forward-multiplies coefficients by payloads: `sum_i c_i * p_i`.
pub fn combine<P: AsRef<[u8]>>(coefficients: &[Gf256], payloads: &[P], len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for (c, p) in coefficients.iter().zip(payloads) {
        axpy(&mut out, *c, p.as_ref());
    }
    out
}
