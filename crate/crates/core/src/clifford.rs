//! Clifford gates acting on Pauli operators by conjugation, and uniform
//! sampling of random Clifford unitaries.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitVec, Gf2RowSpace};
use crate::pauli::{Letter, PauliString};

/// Conjugation table of a two-qubit Clifford.
///
/// Entry `k = x_a | z_a << 1 | x_b << 2 | z_b << 3` describes the image of the
/// Hermitian Pauli with those bits: the low nibble holds the image bits in the
/// same layout and bit 4 is set when the image carries a minus sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoQubitClifford {
    table: [u8; 16],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    Two(usize, usize, TwoQubitClifford),
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                (q, None)
            }
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) | Gate::Two(a, b, _) => {
                (a, Some(b))
            }
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        let (a, b) = self.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidArgument(format!(
                "two-qubit gate needs distinct qubits, got {a} twice"
            )));
        }
        Ok(())
    }

    /// The gate with its qubit indices shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::S(q) => Gate::S(q + offset),
            Gate::Sdg(q) => Gate::Sdg(q + offset),
            Gate::X(q) => Gate::X(q + offset),
            Gate::Y(q) => Gate::Y(q + offset),
            Gate::Z(q) => Gate::Z(q + offset),
            Gate::Cnot(a, b) => Gate::Cnot(a + offset, b + offset),
            Gate::Cz(a, b) => Gate::Cz(a + offset, b + offset),
            Gate::Swap(a, b) => Gate::Swap(a + offset, b + offset),
            Gate::Two(a, b, c) => Gate::Two(a + offset, b + offset, c),
        }
    }

    /// Replaces `p` by `U p U†`. Indices are assumed valid.
    pub fn conjugate(&self, p: &mut PauliString) {
        match *self {
            Gate::H(q) => {
                let (x, z) = (p.x().get(q), p.z().get(q));
                if x && z {
                    p.negate();
                }
                set_bits(p, q, z, x);
            }
            Gate::S(q) => {
                let (x, z) = (p.x().get(q), p.z().get(q));
                if x && z {
                    p.negate();
                }
                set_bits(p, q, x, z ^ x);
            }
            Gate::Sdg(q) => {
                let (x, z) = (p.x().get(q), p.z().get(q));
                if x && !z {
                    p.negate();
                }
                set_bits(p, q, x, z ^ x);
            }
            Gate::X(q) => {
                if p.z().get(q) {
                    p.negate();
                }
            }
            Gate::Y(q) => {
                if p.x().get(q) ^ p.z().get(q) {
                    p.negate();
                }
            }
            Gate::Z(q) => {
                if p.x().get(q) {
                    p.negate();
                }
            }
            Gate::Cnot(a, b) => {
                let (xa, za, xb, zb) = (p.x().get(a), p.z().get(a), p.x().get(b), p.z().get(b));
                if xa && zb && !(xb ^ za) {
                    p.negate();
                }
                set_bits(p, b, xb ^ xa, zb);
                set_bits(p, a, xa, za ^ zb);
            }
            Gate::Cz(a, b) => {
                Gate::H(b).conjugate(p);
                Gate::Cnot(a, b).conjugate(p);
                Gate::H(b).conjugate(p);
            }
            Gate::Swap(a, b) => {
                let la = p.letter(a);
                let lb = p.letter(b);
                p.set_letter(a, lb);
                p.set_letter(b, la);
            }
            Gate::Two(a, b, c) => {
                let k = p.x().get(a) as usize
                    | (p.z().get(a) as usize) << 1
                    | (p.x().get(b) as usize) << 2
                    | (p.z().get(b) as usize) << 3;
                let e = c.table[k];
                if e & 0x10 != 0 {
                    p.negate();
                }
                set_bits(p, a, e & 1 != 0, e & 2 != 0);
                set_bits(p, b, e & 4 != 0, e & 8 != 0);
            }
        }
    }
}

#[inline]
fn set_bits(p: &mut PauliString, q: usize, x: bool, z: bool) {
    p.set_letter(q, Letter::from_bits(x, z));
}

/// A Clifford unitary described by the images of X_q and Z_q under conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordMap {
    n: usize,
    /// `images[q]` = U X_q U†, `images[n + q]` = U Z_q U†.
    images: Vec<PauliString>,
}

impl CliffordMap {
    pub fn identity(n: usize) -> Self {
        let mut images = Vec::with_capacity(2 * n);
        for q in 0..n {
            images.push(PauliString::single(n, q, Letter::X));
        }
        for q in 0..n {
            images.push(PauliString::single(n, q, Letter::Z));
        }
        Self { n, images }
    }

    /// The Clifford implemented by applying `gates` in order.
    pub fn from_gates(n: usize, gates: &[Gate]) -> Result<Self> {
        let mut map = Self::identity(n);
        for g in gates {
            g.check(n)?;
            for img in &mut map.images {
                g.conjugate(img);
            }
        }
        Ok(map)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    /// U p U†.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        debug_assert_eq!(p.n(), self.n);
        // p = i^(phase + #Y) Π_q X_q^{x_q} Z_q^{z_q}
        let mut out = PauliString::identity(self.n);
        out.set_phase(p.phase() + (p.y_count() % 4) as u8);
        for q in 0..self.n {
            if p.x().get(q) {
                out.mul_assign(&self.images[q]);
            }
            if p.z().get(q) {
                out.mul_assign(&self.images[self.n + q]);
            }
        }
        out
    }

    /// Uniformly random element of the n-qubit Clifford group modulo global phase.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let dim = 2 * n;
        let form = |u: &BitVec, v: &BitVec| -> bool {
            let mut acc = false;
            for q in 0..n {
                acc ^= (u.get(q) && v.get(n + q)) ^ (u.get(n + q) && v.get(q));
            }
            acc
        };
        let random_in = |basis: &[BitVec], rng: &mut R| -> BitVec {
            let mut v = BitVec::zeros(dim);
            for b in basis {
                if rng.random::<bool>() {
                    v.xor_assign(b);
                }
            }
            v
        };
        let mut basis: Vec<BitVec> = (0..dim).map(|i| BitVec::from_indices(dim, &[i])).collect();
        let mut xs = Vec::with_capacity(n);
        let mut zs = Vec::with_capacity(n);
        for _ in 0..n {
            let v = loop {
                let v = random_in(&basis, rng);
                if !v.is_zero() {
                    break v;
                }
            };
            let w = loop {
                let w = random_in(&basis, rng);
                if form(&v, &w) {
                    break w;
                }
            };
            let projected: Vec<BitVec> = basis
                .iter()
                .map(|b| {
                    let mut b2 = b.clone();
                    if form(b, &w) {
                        b2.xor_assign(&v);
                    }
                    if form(b, &v) {
                        b2.xor_assign(&w);
                    }
                    b2
                })
                .collect();
            basis = Gf2RowSpace::from_rows(dim, &projected)
                .expect("uniform width")
                .rows()
                .to_vec();
            xs.push(v);
            zs.push(w);
        }
        let mut images = Vec::with_capacity(dim);
        for v in xs.into_iter().chain(zs) {
            let mut p = PauliString::from_symplectic(&v).expect("even width");
            if rng.random::<bool>() {
                p.negate();
            }
            images.push(p);
        }
        Self { n, images }
    }
}

impl TwoQubitClifford {
    pub fn from_map(map: &CliffordMap) -> Result<Self> {
        if map.n() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: map.n(),
            });
        }
        let mut table = [0u8; 16];
        for (k, entry) in table.iter_mut().enumerate() {
            let mut p = PauliString::identity(2);
            set_bits(&mut p, 0, k & 1 != 0, k & 2 != 0);
            set_bits(&mut p, 1, k & 4 != 0, k & 8 != 0);
            let img = map.conjugate(&p);
            let mut e = img.x().get(0) as u8
                | (img.z().get(0) as u8) << 1
                | (img.x().get(1) as u8) << 2
                | (img.z().get(1) as u8) << 3;
            match img.phase() {
                0 => {}
                2 => e |= 0x10,
                _ => return Err(Error::NonHermitian),
            }
            *entry = e;
        }
        Ok(Self { table })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_map(&CliffordMap::random(2, rng)).expect("two-qubit map")
    }

    pub fn table(&self) -> &[u8; 16] {
        &self.table
    }
}
