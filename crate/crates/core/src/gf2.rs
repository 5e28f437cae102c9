//! Dense linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed into `u64` words, bit `j` of a row
//! living in word `j / 64` at position `j % 64`. Row operations are XORs of
//! whole words.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// The `i`-th standard basis vector.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Builds a vector from a slice of 0/1 values; any nonzero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b != 0);
        }
        v
    }

    /// Low `len` bits of `value`, bit 0 first. `len` must be at most 64.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; panics if the vector is wider than 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "to_u64 supports at most 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.clear_tail();
        v
    }

    /// Uniformly random vector of exactly `weight` ones.
    pub fn random_of_weight<R: Rng + ?Sized>(len: usize, weight: usize, rng: &mut R) -> Self {
        assert!(weight <= len, "weight exceeds length");
        let mut v = Self::zeros(len);
        for i in rand::seq::index::sample(rng, len, weight) {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    /// Copies `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVector::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// XORs `v` into the bits `offset..offset + v.len()`.
    pub fn xor_at(&mut self, offset: usize, v: &BitVector) {
        assert!(offset + v.len <= self.len, "xor_at out of range");
        for i in v.iter_ones() {
            self.flip(offset + i);
        }
    }

    /// `v` padded with zeros (or truncated) to `len` bits.
    pub fn resized(&self, len: usize) -> BitVector {
        let mut out = BitVector::zeros(len);
        for i in self.iter_ones().take_while(|&i| i < len) {
            out.set(i, true);
        }
        out
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = self.resized(self.len + other.len);
        out.xor_at(self.len, other);
        out
    }

    /// Lowercase hex, bits packed LSB-first into `ceil(len / 8)` bytes.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut s = String::with_capacity(2 * nbytes);
        for j in 0..nbytes {
            let byte = (self.words[j / 8] >> (8 * (j % 8))) as u8;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        let nbytes = len.div_ceil(8);
        if !hex.is_ascii() || hex.len() != 2 * nbytes {
            return Err(Error::parse(format!("expected {} hex digits for {len} bits, got {}", 2 * nbytes, hex.len())));
        }
        let mut v = BitVector::zeros(len);
        for j in 0..nbytes {
            let byte = u8::from_str_radix(&hex[2 * j..2 * j + 2], 16)
                .map_err(|e| Error::parse(format!("bad hex byte {:?}: {e}", &hex[2 * j..2 * j + 2])))?;
            v.words[j / 8] |= (byte as u64) << (8 * (j % 8));
        }
        if v != v.clone().tail_cleared() {
            return Err(Error::parse(format!("hex {hex:?} has bits set beyond length {len}")));
        }
        Ok(v)
    }

    fn tail_cleared(mut self) -> Self {
        self.clear_tail();
        self
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Row-reduced echelon form together with the row operations that produced it.
struct Echelon {
    reduced: BitMatrix,
    /// `transform · original = reduced`
    transform: BitMatrix,
    pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { cols, rows: vec![BitVector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { cols: n, rows: (0..n).map(|i| BitVector::unit(n, i)).collect() }
    }

    /// Builds a matrix from rows; `cols` is needed to describe matrices with zero rows.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dim(format!("row of length {} in a {cols}-column matrix", r.len())));
        }
        Ok(Self { cols, rows })
    }

    /// Convenience constructor from nested 0/1 slices. Panics on ragged input.
    pub fn from_bit_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| BitVector::from_bits(r)).collect()).expect("ragged rows")
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self { cols, rows: (0..rows).map(|_| BitVector::random(cols, rng)).collect() }
    }

    /// Random invertible `n × n` matrix, by drawing uniform matrices until one is nonsingular.
    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "random_invertible needs n >= 1");
        loop {
            let m = Self::random(n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.rows[r].set(c, bit);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols && *self == Self::identity(self.cols)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Row vector times matrix, `v · self`.
    pub fn vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.rows() {
            return Err(Error::dim(format!("vector of length {} times {}x{} matrix", v.len(), self.rows(), self.cols)));
        }
        let mut out = BitVector::zeros(self.cols);
        for i in v.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    /// Matrix product `self · other` over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows() {
            return Err(Error::dim(format!("{}x{} times {}x{}", self.rows(), self.cols, other.rows(), other.cols)));
        }
        let rows = self.rows.iter().map(|r| other.vec_mul(r)).collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix { cols: other.cols, rows })
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows() != other.rows() {
            return Err(Error::dim("hstack with different row counts"));
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.concat(b)).collect();
        Ok(BitMatrix { cols: self.cols + other.cols, rows })
    }

    /// `self` stacked above `other`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::dim("vstack with different column counts"));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { cols: self.cols, rows })
    }

    fn echelon(&self) -> Echelon {
        let mut reduced = self.clone();
        let mut transform = BitMatrix::identity(self.rows());
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == reduced.rows() {
                break;
            }
            let Some(p) = (next..reduced.rows()).find(|&r| reduced.rows[r].get(c)) else {
                continue;
            };
            reduced.rows.swap(next, p);
            transform.rows.swap(next, p);
            for r in 0..reduced.rows() {
                if r != next && reduced.rows[r].get(c) {
                    let (pr, tr) = (reduced.rows[next].clone(), transform.rows[next].clone());
                    reduced.rows[r].xor_assign(&pr);
                    transform.rows[r].xor_assign(&tr);
                }
            }
            pivots.push(c);
            next += 1;
        }
        Echelon { reduced, transform, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Right inverse `R` (`cols × rows`) with `self · R = I`.
    ///
    /// Free variables of the underlying system are fixed to zero, so `R` is
    /// supported on the pivot rows of the reduced echelon form.
    pub fn right_inverse(&self) -> Result<BitMatrix> {
        let ech = self.echelon();
        if ech.pivots.len() != self.rows() {
            return Err(Error::Rank { rank: ech.pivots.len(), rows: self.rows() });
        }
        let mut r = BitMatrix::zeros(self.cols, self.rows());
        for (i, &p) in ech.pivots.iter().enumerate() {
            r.rows[p] = ech.transform.rows[i].clone();
        }
        Ok(r)
    }

    /// Inverse of a square matrix by Gauss–Jordan elimination.
    pub fn invert(&self) -> Result<BitMatrix> {
        if self.rows() != self.cols {
            return Err(Error::dim(format!("cannot invert a {}x{} matrix", self.rows(), self.cols)));
        }
        let ech = self.echelon();
        if ech.pivots.len() != self.cols {
            return Err(Error::Singular);
        }
        Ok(ech.transform)
    }

    /// Basis of `{ y : self · yᵀ = 0 }`, one row per free column in increasing order.
    pub fn kernel(&self) -> BitMatrix {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut y = BitVector::unit(self.cols, f);
                for (i, &p) in ech.pivots.iter().enumerate() {
                    if ech.reduced.rows[i].get(f) {
                        y.set(p, true);
                    }
                }
                y
            })
            .collect();
        BitMatrix { cols: self.cols, rows }
    }

    /// Whether `v` is a GF(2) combination of the rows.
    pub fn row_space_contains(&self, v: &BitVector) -> bool {
        let mut stacked = self.clone();
        stacked.rows.push(v.clone());
        stacked.rank() == self.rank()
    }

    /// Row-per-line hex encoding, see [`BitVector::to_hex`].
    pub fn to_hex_lines(&self) -> Vec<String> {
        self.rows.iter().map(BitVector::to_hex).collect()
    }

    pub fn from_hex_lines<S: AsRef<str>>(cols: usize, lines: &[S]) -> Result<BitMatrix> {
        let rows = lines.iter().map(|l| BitVector::from_hex(cols, l.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix { cols, rows })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// A permutation of `0..n`; position `i` is sent to `image[i]`.
///
/// As a matrix it has a one at `(i, image[i])`, so applying it to a row
/// vector moves bit `i` to position `image[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { image: (0..n).collect() }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Param(format!("{image:?} is not a permutation")));
            }
        }
        Ok(Self { image })
    }

    /// Fisher–Yates shuffle of `0..n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "random permutation needs n >= 1");
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Self { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { image: inv }
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &Permutation) -> Permutation {
        assert_eq!(self.len(), then.len(), "composing permutations of different sizes");
        Permutation { image: self.image.iter().map(|&j| then.image[j]).collect() }
    }

    pub fn apply(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.len() {
            return Err(Error::dim(format!("permutation of {} applied to {} bits", self.len(), v.len())));
        }
        let mut out = BitVector::zeros(v.len());
        for i in v.iter_ones() {
            out.set(self.image[i], true);
        }
        Ok(out)
    }

    /// Permutes the columns of `m`, i.e. computes `m · P`.
    pub fn apply_columns(&self, m: &BitMatrix) -> Result<BitMatrix> {
        let rows = m.rows.iter().map(|r| self.apply(r)).collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix { cols: m.cols, rows })
    }

    pub fn to_matrix(&self) -> BitMatrix {
        let n = self.len();
        BitMatrix { cols: n, rows: self.image.iter().map(|&j| BitVector::unit(n, j)).collect() }
    }
}
