//! Bit-packed GF(2) vectors, row spaces and the handful of elimination
//! routines the rest of the crate is built on.
//!
//! Every row operation is a word-wise XOR over `u64` limbs. Pivots are always
//! the lowest set bit of a row, so echelon forms (and therefore everything
//! derived from them, such as coset representatives) are deterministic.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at `indices`.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the bitwise AND, i.e. the GF(2) dot product.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Keeps only the bits at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `[start, start + len)` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

/// A ±1 vector stored in the bit convention b = (1 − m)/2, so that the
/// componentwise product of sign vectors is the XOR of their bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub BitVec);

impl SignVector {
    /// The all-(+1) vector.
    pub fn ones(len: usize) -> Self {
        Self(BitVec::zeros(len))
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut bits = BitVec::zeros(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => bits.set(i, true),
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("sign component must be ±1, got {other}"),
                    })
                }
            }
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sign(&self, i: usize) -> i8 {
        if self.0.get(i) {
            -1
        } else {
            1
        }
    }

    pub fn to_signs(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.sign(i)).collect()
    }

    /// Componentwise product.
    pub fn mul(&self, other: &SignVector) -> SignVector {
        SignVector(self.0.xor(&other.0))
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Serialized as a list of ±1 entries.
impl serde::Serialize for SignVector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.to_signs())
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.len() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.sign(i))?;
        }
        write!(f, ")")
    }
}

/// A subspace of GF(2)^width kept in row-echelon form.
///
/// Each row's pivot is its lowest set bit and rows are sorted by pivot, which
/// makes [`Gf2RowSpace::reduce`] return the unique coset representative with
/// zeros in every pivot column. That representative is also the
/// lexicographically least element of the coset when bit 0 is read as the
/// most significant position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2RowSpace {
    width: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Gf2RowSpace {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<'a, I>(width: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BitVec>,
    {
        let mut space = Self::new(width);
        for row in rows {
            space.insert(row.clone())?;
        }
        Ok(space)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, v: &BitVec) -> Result<()> {
        if v.len() != self.width {
            return Err(Error::Dimension {
                expected: self.width,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Reduces `v` in place against the echelon rows.
    pub fn reduce_in_place(&self, v: &mut BitVec) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn reduce(&self, v: &BitVec) -> Result<BitVec> {
        self.check(v)?;
        let mut out = v.clone();
        self.reduce_in_place(&mut out);
        Ok(out)
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    /// Inserts a row; returns `true` when the rank grew.
    pub fn insert(&mut self, v: BitVec) -> Result<bool> {
        self.check(&v)?;
        let mut v = v;
        self.reduce_in_place(&mut v);
        let Some(p) = v.first_one() else {
            return Ok(false);
        };
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        Ok(true)
    }

    /// Every element of the span (2^rank vectors). Intended for small spaces.
    pub fn elements(&self) -> Vec<BitVec> {
        let mut out = vec![BitVec::zeros(self.width)];
        for row in &self.rows {
            let extra: Vec<BitVec> = out.iter().map(|v| v.xor(row)).collect();
            out.extend(extra);
        }
        out
    }
}

/// Gaussian elimination that remembers which input rows produced each
/// echelon row, so that solutions come back as coefficient vectors.
#[derive(Clone, Debug)]
pub struct TrackedReducer {
    width: usize,
    inputs: usize,
    rows: Vec<(BitVec, BitVec)>,
    pivots: Vec<usize>,
    dependencies: Vec<BitVec>,
}

impl TrackedReducer {
    /// Eliminates the given rows (each of length `width`).
    pub fn new(width: usize, rows: &[BitVec]) -> Result<Self> {
        let mut r = Self {
            width,
            inputs: rows.len(),
            rows: Vec::new(),
            pivots: Vec::new(),
            dependencies: Vec::new(),
        };
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Dimension {
                    expected: width,
                    found: row.len(),
                });
            }
            let mut v = row.clone();
            let mut combo = BitVec::zeros(rows.len());
            combo.set(i, true);
            r.reduce_pair(&mut v, &mut combo);
            match v.first_one() {
                Some(p) => {
                    let at = r.pivots.partition_point(|&q| q < p);
                    r.pivots.insert(at, p);
                    r.rows.insert(at, (v, combo));
                }
                None => r.dependencies.push(combo),
            }
        }
        Ok(r)
    }

    fn reduce_pair(&self, v: &mut BitVec, combo: &mut BitVec) {
        for ((row, c), &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
                combo.xor_assign(c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coefficients `c` with Σ c_i · row_i = target, if any exist.
    pub fn solve(&self, target: &BitVec) -> Result<Option<BitVec>> {
        if target.len() != self.width {
            return Err(Error::Dimension {
                expected: self.width,
                found: target.len(),
            });
        }
        let mut v = target.clone();
        let mut combo = BitVec::zeros(self.inputs);
        self.reduce_pair(&mut v, &mut combo);
        Ok(if v.is_zero() { Some(combo) } else { None })
    }

    /// Basis of the coefficient vectors that combine the inputs to zero.
    pub fn dependencies(&self) -> &[BitVec] {
        &self.dependencies
    }
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank(rows: &[BitVec]) -> usize {
    let Some(first) = rows.first() else {
        return 0;
    };
    let mut space = Gf2RowSpace::new(first.len());
    for r in rows {
        // widths are checked by insert; mismatched input is a caller bug here
        space.insert(r.clone()).expect("row width mismatch");
    }
    space.rank()
}

/// Coefficients `c` (one per row of `rows`) with Σ c_i · rows_i = v.
pub fn solve(rows: &[BitVec], v: &BitVec) -> Result<Option<BitVec>> {
    TrackedReducer::new(v.len(), rows)?.solve(v)
}

/// Basis of the right null space {v : rows · v = 0} of a `rows.len() × width` matrix.
pub fn kernel_basis(width: usize, rows: &[BitVec]) -> Result<Vec<BitVec>> {
    for r in rows {
        if r.len() != width {
            return Err(Error::Dimension {
                expected: width,
                found: r.len(),
            });
        }
    }
    // Fully reduced echelon form, then read off one kernel vector per free column.
    let mut space = Gf2RowSpace::new(width);
    for r in rows {
        space.insert(r.clone())?;
    }
    let mut reduced: Vec<BitVec> = space.rows.clone();
    let pivots = space.pivots.clone();
    for i in (0..reduced.len()).rev() {
        let (head, tail) = reduced.split_at_mut(i);
        let row_i = &tail[0];
        for r in head.iter_mut() {
            if r.get(pivots[i]) {
                r.xor_assign(row_i);
            }
        }
    }
    let mut is_pivot = vec![false; width];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..width).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::zeros(width);
        v.set(free, true);
        for (row, &p) in reduced.iter().zip(&pivots) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    Ok(basis)
}
