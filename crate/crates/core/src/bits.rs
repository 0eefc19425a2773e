//! Word-packed GF(2) vectors and incremental Gaussian elimination.

use std::fmt;

use crate::error::Error;

const WORD: usize = 64;

/// Fixed-length vector over GF(2), packed into 64-bit words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`; bits past `len` are
/// always zero so derived equality and ordering are canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf2Vec {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vec {
    pub fn zeros(len: usize) -> Self {
        Gf2Vec {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector from the low `len` bits of `value` (`len <= 64`).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit {index} out of range {}", self.len);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit {index} out of range {}", self.len);
        let bit = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= bit;
        } else {
            self.words[index / WORD] &= !bit;
        }
    }

    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len, "bit {index} out of range {}", self.len);
        self.words[index / WORD] ^= 1u64 << (index % WORD);
    }

    pub fn xor_assign(&mut self, other: &Gf2Vec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Gf2Vec) -> Gf2Vec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &Gf2Vec) -> Gf2Vec {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        Gf2Vec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Gf2Vec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &Gf2Vec) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn lowest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Lowercase hex, most significant digit first, padded to `ceil(len / 4)`
    /// digits. Bit 0 is the least significant bit of the last digit.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.len && self.get(i) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self, Error> {
        let hex = hex.trim();
        if hex.is_empty() {
            return Err(Error::Parse(format!("empty hex mask for length {len}")));
        }
        let mut v = Self::zeros(len);
        for (d, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {ch:?} in {hex:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= len {
                        return Err(Error::Parse(format!(
                            "hex mask {hex:?} sets bit {i} beyond length {len}"
                        )));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vec[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
struct Row {
    pivot: usize,
    value: Gf2Vec,
    combo: Gf2Vec,
}

/// Row basis kept in reduced row echelon form.
///
/// Pivots are the lowest set bit of each row, so elimination proceeds in
/// ascending column order. When built with `generators > 0`, every row also
/// records which inserted generators XOR to it.
#[derive(Clone, Debug)]
pub struct Gf2Basis {
    len: usize,
    generators: usize,
    inserted: usize,
    rows: Vec<Row>,
}

impl Gf2Basis {
    pub fn new(len: usize) -> Self {
        Self::with_tracking(len, 0)
    }

    pub fn with_tracking(len: usize, generators: usize) -> Self {
        Gf2Basis {
            len,
            generators,
            inserted: 0,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    /// Reduces `v` against the basis, returning the residual and the set of
    /// generators whose XOR equals `v + residual`.
    pub fn reduce_tracked(&self, v: &Gf2Vec) -> (Gf2Vec, Gf2Vec) {
        let mut residual = v.clone();
        let mut combo = Gf2Vec::zeros(self.generators);
        for row in &self.rows {
            if residual.get(row.pivot) {
                residual.xor_assign(&row.value);
                combo.xor_assign(&row.combo);
            }
        }
        (residual, combo)
    }

    pub fn reduce(&self, v: &Gf2Vec) -> Gf2Vec {
        let mut residual = v.clone();
        for row in &self.rows {
            if residual.get(row.pivot) {
                residual.xor_assign(&row.value);
            }
        }
        residual
    }

    pub fn contains(&self, v: &Gf2Vec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts the next generator; returns true if the rank grew.
    pub fn insert(&mut self, v: &Gf2Vec) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let index = self.inserted;
        self.inserted += 1;
        let (residual, mut combo) = self.reduce_tracked(v);
        if self.generators > 0 {
            assert!(index < self.generators, "more generators than tracked");
            combo.flip(index);
        }
        let Some(pivot) = residual.lowest_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.value.get(pivot) {
                row.value.xor_assign(&residual);
                row.combo.xor_assign(&combo);
            }
        }
        let at = self.rows.partition_point(|r| r.pivot < pivot);
        self.rows.insert(
            at,
            Row {
                pivot,
                value: residual,
                combo,
            },
        );
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &Gf2Vec> {
        self.rows.iter().map(|r| &r.value)
    }

    /// The reduced row echelon form, which identifies the spanned subspace.
    pub fn canonical(&self) -> Vec<Gf2Vec> {
        self.rows.iter().map(|r| r.value.clone()).collect()
    }
}

/// Rank of a list of equal-length vectors.
pub fn rank_of<'a, I: IntoIterator<Item = &'a Gf2Vec>>(len: usize, rows: I) -> usize {
    let mut basis = Gf2Basis::new(len);
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}
