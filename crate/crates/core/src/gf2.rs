//! Bit-exact linear algebra over GF(2).
//!
//! Bit index 0 is the leftmost printed bit. Packed storage puts bit `i` in
//! word `i / 64` at position `i % 64`, so equality and hashing are canonical
//! per `(len, bits)`. For enumeration-heavy code the helpers
//! [`BitVector::from_pattern`] / [`BitVector::to_pattern`] convert to an
//! integer whose most significant (of `len`) bits is bit 0, which makes
//! integer order coincide with lexicographic order of the printed string.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector from the low `len` bits of `pattern`, most significant first.
    pub fn from_pattern(pattern: u64, len: usize) -> Self {
        assert!(len <= WORD, "pattern vectors are limited to 64 bits");
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, (pattern >> (len - 1 - i)) & 1 == 1);
        }
        v
    }

    /// Inverse of [`BitVector::from_pattern`].
    pub fn to_pattern(&self) -> u64 {
        assert!(self.len <= WORD, "pattern vectors are limited to 64 bits");
        (0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        hamming_weight(self)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Selects the listed positions, in order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (dst, &src) in positions.iter().enumerate() {
            out.set(dst, self.get(src));
        }
        out
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::Dimension(format!(
                "xor of vectors with lengths {} and {}",
                self.len, other.len
            )));
        }
        Ok(self ^ other)
    }
}

/// Number of ones in `v`.
pub fn hamming_weight(v: &BitVector) -> usize {
    v.words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Hamming distance `|x ⊕ y|`.
pub fn hamming_distance(x: &BitVector, y: &BitVector) -> usize {
    assert_eq!(x.len, y.len);
    x.words
        .iter()
        .zip(&y.words)
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum()
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&rhs.words).map(|(a, b)| a ^ b).collect(),
        }
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVector::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("invalid bit character {other:?}"),
                    })
                }
            }
        }
        Ok(v)
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dense GF(2) matrix stored as packed rows. Zero-row matrices are allowed
/// (the parity check of a `k = n` code has no rows).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed so that a zero-row matrix
    /// still knows its width.
    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Parses rows written as `0`/`1` strings, e.g. `["110", "011"]`.
    pub fn parse_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.as_ref().trim().parse())
            .collect::<Result<Vec<BitVector>>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::from_rows(parsed, cols)
    }

    /// Builds a matrix from column vectors.
    pub fn from_columns(columns: &[BitVector], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::Dimension(format!(
                    "column of length {} in a matrix with {rows} rows",
                    col.len()
                )));
            }
            for r in 0..rows {
                m.set(r, c, col.get(r));
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            v.set(r, self.get(r, c));
        }
        v
    }

    /// Row `r` as an integer pattern (see [`BitVector::to_pattern`]).
    pub fn row_pattern(&self, r: usize) -> u64 {
        self.data[r].to_pattern()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{} matrices",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ot = other.transpose();
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                out.set(r, c, self.data[r].dot(&ot.data[c]));
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    /// Applies a column permutation: column `c` of the result is column
    /// `perm[c]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.cols);
        BitMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| r.select(perm)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        row_echelon(self).1.len()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{})[", self.rows, self.cols)?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.data {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<BitVector>,
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.data.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.rows {
            return Err(serde::de::Error::custom("row count does not match entries"));
        }
        BitMatrix::from_rows(repr.entries, repr.cols).map_err(serde::de::Error::custom)
    }
}

/// GF(2) matrix-vector product.
pub fn mat_vec_mul(m: &BitMatrix, v: &BitVector) -> Result<BitVector> {
    if v.len() != m.cols {
        return Err(Error::Dimension(format!(
            "{}x{} matrix applied to a vector of length {}",
            m.rows,
            m.cols,
            v.len()
        )));
    }
    let mut out = BitVector::zeros(m.rows);
    for (r, row) in m.data.iter().enumerate() {
        if row.dot(v) {
            out.set(r, true);
        }
    }
    Ok(out)
}

/// Reduced row echelon form; returns the reduced matrix and pivot columns
/// (one per nonzero row, ascending).
fn row_echelon(m: &BitMatrix) -> (BitMatrix, Vec<usize>) {
    let mut rows = m.data.clone();
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..m.cols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(next, found);
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(c) {
                *row ^= &pivot_row;
            }
        }
        pivots.push(c);
        next += 1;
    }
    let reduced = BitMatrix {
        rows: m.rows,
        cols: m.cols,
        data: rows,
    };
    (reduced, pivots)
}

/// Output of [`standard_form`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardForm {
    /// `[A | I_rank]`, with `rank` rows.
    pub canonical: BitMatrix,
    /// Column `c` of `canonical` comes from column `column_permutation[c]` of the input.
    pub column_permutation: Vec<usize>,
    pub rank: usize,
}

impl StandardForm {
    /// Width of the `A` block.
    pub fn a_cols(&self) -> usize {
        self.canonical.cols() - self.rank
    }

    /// The `A` block of `[A | I]`.
    pub fn a_block(&self) -> BitMatrix {
        let keep: Vec<usize> = (0..self.a_cols()).collect();
        BitMatrix {
            rows: self.rank,
            cols: keep.len(),
            data: self.canonical.data.iter().map(|r| r.select(&keep)).collect(),
        }
    }

    /// Original column indices that land in the identity block.
    pub fn identity_columns(&self) -> &[usize] {
        &self.column_permutation[self.a_cols()..]
    }

    pub fn permute_vector(&self, v: &BitVector) -> BitVector {
        v.select(&self.column_permutation)
    }
}

/// Reduces `h` to `[A | I_rank]` by row operations and a column permutation.
///
/// Non-pivot columns keep their relative order in the `A` block; pivot
/// columns go to the identity block in pivot order. A rank-deficient input
/// yields `rank < h.rows()` and a canonical matrix with only `rank` rows.
pub fn standard_form(h: &BitMatrix) -> StandardForm {
    let (reduced, pivots) = row_echelon(h);
    let rank = pivots.len();
    let mut perm: Vec<usize> = (0..h.cols).filter(|c| !pivots.contains(c)).collect();
    perm.extend_from_slice(&pivots);
    let data = reduced.data[..rank].iter().map(|r| r.select(&perm)).collect();
    StandardForm {
        canonical: BitMatrix {
            rows: rank,
            cols: h.cols,
            data,
        },
        column_permutation: perm,
        rank,
    }
}
