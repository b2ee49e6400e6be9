//! Pauli operators in symplectic form.
//!
//! A [`PauliString`] on `n` qubits is `i^phase · σ(x_0, z_0) ⊗ … ⊗ σ(x_{n−1}, z_{n−1})`
//! where σ(1,0) = X, σ(0,1) = Z and σ(1,1) = Y. Hermitian operators therefore
//! carry phase 0 (sign +1) or 2 (sign −1).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | '_' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: 0,
        }
    }

    pub fn from_parts(x: BitVec, z: BitVec, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self {
            n: x.len(),
            x,
            z,
            phase: phase & 3,
        })
    }

    /// Single-qubit Pauli `letter` on qubit `q` of `n`.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(q, letter);
        p
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Inverse of [`PauliString::symplectic`]; the result has phase 0.
    pub fn from_symplectic(v: &BitVec) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension {
                expected: v.len() + 1,
                found: v.len(),
            });
        }
        let n = v.len() / 2;
        Ok(Self {
            n,
            x: v.slice(0, n),
            z: v.slice(n, n),
            phase: 0,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// +1 or −1 for Hermitian operators.
    pub fn sign(&self) -> Result<i8> {
        match self.phase {
            0 => Ok(1),
            2 => Ok(-1),
            _ => Err(Error::NonHermitian),
        }
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.phase = if sign < 0 { 2 } else { 0 };
        self
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn y_count(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// The vector `(x | z)` of length 2n.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    /// Symplectic product: `true` when the operators anticommute.
    #[inline]
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u64;
        let (x1, z1) = (self.x.words(), self.z.words());
        let (x2, z2) = (other.x.words(), other.z.words());
        for k in 0..x1.len() {
            acc ^= (x1[k] & z2[k]) ^ (z1[k] & x2[k]);
        }
        acc.count_ones() & 1 == 1
    }

    /// In-place right multiplication `self ← self · other`.
    pub fn mul_assign(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        let mut pos = 0u32;
        let mut neg = 0u32;
        {
            let (x1, z1) = (self.x.words(), self.z.words());
            let (x2, z2) = (other.x.words(), other.z.words());
            for k in 0..x1.len() {
                let (a, b, c, d) = (x1[k], z1[k], x2[k], z2[k]);
                let x_1 = a & !b;
                let y_1 = a & b;
                let z_1 = !a & b;
                let x_2 = c & !d;
                let y_2 = c & d;
                let z_2 = !c & d;
                pos += ((x_1 & y_2) | (y_1 & z_2) | (z_1 & x_2)).count_ones();
                neg += ((x_1 & z_2) | (y_1 & x_2) | (z_1 & y_2)).count_ones();
            }
        }
        let delta = (pos as i64 - neg as i64).rem_euclid(4) as u8;
        self.phase = (self.phase + other.phase + delta) & 3;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Complex conjugate: Y* = −Y, X* = X, Z* = Z, and i* = −i.
    pub fn conjugate(&self) -> PauliString {
        let mut out = self.clone();
        let ys = (self.y_count() % 2) as u8;
        out.phase = ((4 - self.phase) + 2 * ys) & 3;
        out
    }

    /// Keeps the qubits in `mask`, in mask order.
    pub fn restrict(&self, mask: &SubsystemMask) -> Result<PauliString> {
        self.check_mask(mask)?;
        Ok(PauliString {
            n: mask.len(),
            x: self.x.select(mask.members()),
            z: self.z.select(mask.members()),
            phase: self.phase,
        })
    }

    pub fn is_supported_on(&self, mask: &SubsystemMask) -> Result<bool> {
        self.check_mask(mask)?;
        let comp = mask.complement();
        Ok(comp
            .members()
            .iter()
            .all(|&q| !self.x.get(q) && !self.z.get(q)))
    }

    /// Places this operator on qubits `positions` of an `n_total`-qubit register.
    pub fn embed(&self, n_total: usize, positions: &[usize]) -> Result<PauliString> {
        if positions.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: positions.len(),
            });
        }
        let mut out = PauliString::identity(n_total);
        for (q, &p) in positions.iter().enumerate() {
            if p >= n_total {
                return Err(Error::QubitOutOfRange {
                    index: p,
                    n: n_total,
                });
            }
            out.set_letter(p, self.letter(q));
        }
        out.phase = self.phase;
        Ok(out)
    }

    fn check_mask(&self, mask: &SubsystemMask) -> Result<()> {
        if mask.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: mask.n(),
            });
        }
        Ok(())
    }

    /// Letters without the sign, e.g. `XIZ`.
    pub fn letters_string(&self) -> String {
        (0..self.n).map(|q| self.letter(q).as_char()).collect()
    }
}

/// `+1` when `p` and `q` commute, `−1` otherwise.
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<i8> {
    if p.n() != q.n() {
        return Err(Error::Dimension {
            expected: p.n(),
            found: q.n(),
        });
    }
    Ok(if p.anticommutes(q) { -1 } else { 1 })
}

pub fn multiply(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    if p.n() != q.n() {
        return Err(Error::Dimension {
            expected: p.n(),
            found: q.n(),
        });
    }
    let mut out = p.clone();
    out.mul_assign(q);
    Ok(out)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.letters_string())
    }
}

/// Serialized as its display string, e.g. `"-XIZ"`.
impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional `+`, `-`, `+i`, `-i` or `i` prefix followed by `IXYZ` letters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else {
            (0, s)
        };
        let mut letters = Vec::with_capacity(body.len());
        for c in body.chars() {
            letters.push(Letter::from_char(c).ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected character {c:?} in Pauli string {s:?}"),
            })?);
        }
        let mut p = PauliString::from_letters(&letters);
        p.phase = phase;
        Ok(p)
    }
}

/// A set of qubit indices out of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemMask {
    n: usize,
    members: Vec<usize>,
}

impl SubsystemMask {
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        let before = members.len();
        members.dedup();
        if members.len() != before {
            return Err(Error::InvalidSubsystem("duplicate qubit index".to_string()));
        }
        if let Some(&bad) = members.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange { index: bad, n });
        }
        Ok(Self { n, members })
    }

    pub fn all(n: usize) -> Self {
        Self {
            n,
            members: (0..n).collect(),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            members: Vec::new(),
        }
    }

    /// Contiguous interval `[start, start + len)`.
    pub fn interval(n: usize, start: usize, len: usize) -> Result<Self> {
        Self::new(n, start..start + len)
    }

    /// Parses a comma-separated index list such as `0,2,3` or a range `0-3`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let mut members = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::InvalidSubsystem(format!("cannot parse {part:?}"));
            if let Some((a, b)) = part.split_once('-') {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if b < a {
                    return Err(bad());
                }
                members.extend(a..=b);
            } else {
                members.push(part.parse().map_err(|_| bad())?);
            }
        }
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.members.binary_search(&q).is_ok()
    }

    pub fn complement(&self) -> SubsystemMask {
        SubsystemMask {
            n: self.n,
            members: (0..self.n).filter(|q| !self.contains(*q)).collect(),
        }
    }
}
