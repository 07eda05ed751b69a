//! Explicit permutations of n-bit strings and the prefix sets they induce.
//!
//! Bit positions are 1-indexed from the most significant bit, so the length-L
//! prefix of a value `v` is `v >> (n - L)`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on `n` for explicitly tabulated permutations.
pub const DEFAULT_MAX_BITS: u32 = 16;

/// A permutation family together with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Identity,
    BitReversal,
    XorMask(usize),
    /// `y -> A y + c` over GF(2). Row `i` of `matrix` is a bitmask over the
    /// input whose parity gives output bit `i + 1` (MSB-first). With no matrix
    /// a uniformly random invertible one is drawn from the seed.
    AffineGf2 {
        matrix: Option<Vec<usize>>,
        offset: usize,
    },
    Random,
    FromTable(Vec<usize>),
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::BitReversal => "bit-reversal",
            Family::XorMask(_) => "xor-mask",
            Family::AffineGf2 { .. } => "affine-gf2",
            Family::Random => "random",
            Family::FromTable(_) => "from-table",
        }
    }
}

/// Family labels without parameters, as accepted on the command line and in
/// sweep configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Identity,
    BitReversal,
    XorMask,
    AffineGf2,
    Random,
    FromTable,
}

impl FamilyKind {
    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::Identity => "identity",
            FamilyKind::BitReversal => "bit-reversal",
            FamilyKind::XorMask => "xor-mask",
            FamilyKind::AffineGf2 => "affine-gf2",
            FamilyKind::Random => "random",
            FamilyKind::FromTable => "from-table",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identity" => FamilyKind::Identity,
            "bit-reversal" => FamilyKind::BitReversal,
            "xor-mask" => FamilyKind::XorMask,
            "affine-gf2" => FamilyKind::AffineGf2,
            "random" => FamilyKind::Random,
            "from-table" => FamilyKind::FromTable,
            other => return Err(Error::FamilyParams(format!("unknown family `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// A bijection on `[0, 2^n)` stored as a lookup table with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    n: u32,
    table: Vec<usize>,
    inverse: Vec<usize>,
    family: &'static str,
    seed: Option<u64>,
}

pub(crate) fn check_bits(n: u32, cap: u32) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddBitLength(n));
    }
    if n < 2 || n > cap {
        return Err(Error::BitLengthOutOfRange { n, cap });
    }
    Ok(())
}

impl Permutation {
    /// Builds a permutation from `family` with the default size cap.
    pub fn build(family: &Family, n: u32, seed: Option<u64>) -> Result<Self> {
        Self::build_with_cap(family, n, seed, DEFAULT_MAX_BITS)
    }

    pub fn build_with_cap(family: &Family, n: u32, seed: Option<u64>, cap: u32) -> Result<Self> {
        check_bits(n, cap)?;
        let size = 1usize << n;
        let mask = size - 1;
        let table: Vec<usize> = match family {
            Family::Identity => (0..size).collect(),
            Family::BitReversal => (0..size).map(|y| reverse_bits(y, n)).collect(),
            Family::XorMask(m) => {
                if *m > mask {
                    return Err(Error::FamilyParams(format!(
                        "xor mask {m} does not fit in {n} bits"
                    )));
                }
                (0..size).map(|y| y ^ m).collect()
            }
            Family::AffineGf2 { matrix, offset } => {
                if *offset > mask {
                    return Err(Error::FamilyParams(format!(
                        "affine offset {offset} does not fit in {n} bits"
                    )));
                }
                let rows = match matrix {
                    Some(rows) => {
                        if rows.len() != n as usize {
                            return Err(Error::FamilyParams(format!(
                                "affine matrix needs {n} rows, got {}",
                                rows.len()
                            )));
                        }
                        if let Some(r) = rows.iter().find(|&&r| r > mask) {
                            return Err(Error::FamilyParams(format!(
                                "affine matrix row {r} does not fit in {n} bits"
                            )));
                        }
                        if gf2_rank(rows, n) < n {
                            return Err(Error::SingularMatrix);
                        }
                        rows.clone()
                    }
                    None => random_invertible_gf2(n, require_seed(family, seed)?),
                };
                (0..size).map(|y| affine_apply(&rows, n, y) ^ offset).collect()
            }
            Family::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(require_seed(family, seed)?);
                let mut table: Vec<usize> = (0..size).collect();
                table.shuffle(&mut rng);
                table
            }
            Family::FromTable(t) => {
                if t.len() != size {
                    return Err(Error::NotBijective {
                        n,
                        reason: format!("expected {size} entries, found {}", t.len()),
                    });
                }
                t.clone()
            }
        };
        let inverse = invert_table(&table, n)?;
        Ok(Permutation {
            n,
            table,
            inverse,
            family: family.label(),
            seed,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Domain size `2^n`.
    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn family(&self) -> &'static str {
        self.family
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    pub fn check_value(&self, v: usize) -> Result<()> {
        if v >= self.size() {
            return Err(Error::ValueOutOfRange {
                value: v,
                bits: self.n,
            });
        }
        Ok(())
    }

    pub fn apply(&self, v: usize, direction: Direction) -> Result<usize> {
        self.check_value(v)?;
        Ok(match direction {
            Direction::Forward => self.table[v],
            Direction::Inverse => self.inverse[v],
        })
    }

    /// `f(y)` without range checking beyond slice indexing.
    #[inline]
    pub fn forward(&self, y: usize) -> usize {
        self.table[y]
    }

    #[inline]
    pub fn inverse(&self, v: usize) -> usize {
        self.inverse[v]
    }

    /// All `y` whose image agrees with `x` on the top `prefix_len` bits.
    pub fn prefix_set(&self, x: usize, prefix_len: u32) -> Result<PrefixSet> {
        self.check_value(x)?;
        if !prefix_len.is_multiple_of(2) || prefix_len > self.n {
            return Err(Error::BadPrefixLength {
                len: prefix_len,
                n: self.n,
            });
        }
        let shift = self.n - prefix_len;
        let lo = (x >> shift) << shift;
        let mut members: Vec<usize> = (lo..lo + (1usize << shift))
            .map(|z| self.inverse[z])
            .collect();
        members.sort_unstable();
        Ok(PrefixSet {
            n: self.n,
            x,
            prefix_len,
            members,
        })
    }

    /// `S_{x,j}`: preimages matching `x` on the first `2j` bits.
    pub fn stage_set(&self, x: usize, j: usize) -> Result<PrefixSet> {
        self.check_stage_prefix(j)?;
        self.prefix_set(x, 2 * j as u32)
    }

    /// `T_{x,j}`: preimages matching `x` on the first `2j + 2` bits.
    pub fn tagged_set(&self, x: usize, j: usize) -> Result<PrefixSet> {
        self.check_stage(j)?;
        self.prefix_set(x, 2 * j as u32 + 2)
    }

    /// Fraction of `x` in `[0, 2^n)` for which `y` lies in `S_{x,j}`.
    pub fn prefix_membership_stats(&self, y: usize, j: usize) -> Result<Ratio<u64>> {
        self.check_value(y)?;
        self.check_stage_prefix(j)?;
        let shift = self.n - 2 * j as u32;
        let target = self.table[y] >> shift;
        let hits = (0..self.size()).filter(|x| x >> shift == target).count();
        Ok(Ratio::new(hits as u64, self.size() as u64))
    }

    /// Valid stage indices for the inversion loop are `0..n/2`.
    pub fn check_stage(&self, j: usize) -> Result<()> {
        if j >= self.n as usize / 2 {
            return Err(Error::StageOutOfRange { j, n: self.n });
        }
        Ok(())
    }

    // S_{x,j} is also meaningful for j = n/2 (the singleton preimage).
    fn check_stage_prefix(&self, j: usize) -> Result<()> {
        if j > self.n as usize / 2 {
            return Err(Error::StageOutOfRange { j, n: self.n });
        }
        Ok(())
    }

    /// Writes the text format: `n=<n>` followed by one image per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n={}", self.n)?;
        for v in &self.table {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn to_file_string(&self) -> String {
        let mut buf = Vec::with_capacity(self.size() * 6 + 8);
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the text format, rejecting comments, blank lines, a missing
    /// trailing newline and non-bijective tables.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_cap(text, DEFAULT_MAX_BITS)
    }

    pub fn parse_with_cap(text: &str, cap: u32) -> Result<Self> {
        if !text.ends_with('\n') {
            return Err(Error::parse(text.lines().count().max(1), "missing trailing newline"));
        }
        let mut lines = text[..text.len() - 1].split('\n');
        let header = lines.next().unwrap_or_default();
        let n: u32 = header
            .strip_prefix("n=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(1, format!("expected `n=<int>`, found `{header}`")))?;
        check_bits(n, cap)?;
        let size = 1usize << n;
        let mut table = Vec::with_capacity(size);
        for (i, line) in lines.enumerate() {
            let v: usize = line
                .parse()
                .map_err(|_| Error::parse(i + 2, format!("expected a decimal integer, found `{line}`")))?;
            table.push(v);
        }
        if table.len() != size {
            return Err(Error::NotBijective {
                n,
                reason: format!("expected {size} entries, found {}", table.len()),
            });
        }
        Self::build_with_cap(&Family::FromTable(table), n, None, cap)
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)
            .map_err(|e| Error::io("<reader>", e))?;
        Self::parse(&text)
    }
}

fn require_seed(family: &Family, seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::FamilyParams(format!("family `{}` requires a seed", family.label())))
}

fn invert_table(table: &[usize], n: u32) -> Result<Vec<usize>> {
    let size = table.len();
    let mut inverse = vec![usize::MAX; size];
    for (y, &v) in table.iter().enumerate() {
        if v >= size {
            return Err(Error::NotBijective {
                n,
                reason: format!("entry {v} at row {y} is out of range"),
            });
        }
        if inverse[v] != usize::MAX {
            return Err(Error::NotBijective {
                n,
                reason: format!("value {v} appears more than once"),
            });
        }
        inverse[v] = y;
    }
    Ok(inverse)
}

fn reverse_bits(y: usize, n: u32) -> usize {
    (0..n).fold(0, |acc, i| acc | (((y >> i) & 1) << (n - 1 - i)))
}

fn affine_apply(rows: &[usize], n: u32, y: usize) -> usize {
    rows.iter().enumerate().fold(0, |acc, (i, &row)| {
        acc | ((((row & y).count_ones() & 1) as usize) << (n as usize - 1 - i))
    })
}

/// Rank over GF(2) of the rows, viewed as `n`-bit vectors.
pub(crate) fn gf2_rank(rows: &[usize], n: u32) -> u32 {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in (0..n).rev() {
        let pivot = 1usize << bit;
        let Some(p) = (rank as usize..rows.len()).find(|&i| rows[i] & pivot != 0) else {
            continue;
        };
        rows.swap(rank as usize, p);
        let pr = rows[rank as usize];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank as usize && *r & pivot != 0 {
                *r ^= pr;
            }
        }
        rank += 1;
    }
    rank
}

fn random_invertible_gf2(n: u32, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1usize << n;
    loop {
        let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..size)).collect();
        if gf2_rank(&rows, n) == n {
            return rows;
        }
    }
}

/// A prefix-consistent preimage set, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixSet {
    n: u32,
    x: usize,
    prefix_len: u32,
    members: Vec<usize>,
}

impl PrefixSet {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn prefix_len(&self) -> u32 {
        self.prefix_len
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn contains(&self, y: usize) -> bool {
        self.members.binary_search(&y).is_ok()
    }

    pub fn into_members(self) -> Vec<usize> {
        self.members
    }
}

impl AsRef<[usize]> for PrefixSet {
    fn as_ref(&self) -> &[usize] {
        &self.members
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_table() {
        let p = Permutation::build(&Family::Identity, 2, None).unwrap();
        assert_eq!(p.table(), &[0, 1, 2, 3]);
        assert_eq!(p.apply(3, Direction::Forward).unwrap(), 3);
    }

    #[test]
    fn xor_mask_table_and_lookups() {
        let p = Permutation::build(&Family::XorMask(0b01), 2, None).unwrap();
        assert_eq!(p.table(), &[1, 0, 3, 2]);
        assert_eq!(p.apply(2, Direction::Forward).unwrap(), 3);
        assert_eq!(p.apply(3, Direction::Inverse).unwrap(), 2);
    }

    #[test]
    fn bit_reversal_n4() {
        let p = Permutation::build(&Family::BitReversal, 4, None).unwrap();
        assert_eq!(p.forward(0b0001), 0b1000);
        assert_eq!(p.forward(0b0110), 0b0110);
        assert_eq!(p.forward(0b1101), 0b1011);
    }

    #[test]
    fn random_is_deterministic_in_seed() {
        let a = Permutation::build(&Family::Random, 4, Some(7)).unwrap();
        let b = Permutation::build(&Family::Random, 4, Some(7)).unwrap();
        let c = Permutation::build(&Family::Random, 4, Some(8)).unwrap();
        assert_eq!(a.table(), b.table());
        assert_ne!(a.table(), c.table());
    }

    #[test]
    fn random_needs_seed() {
        assert!(matches!(
            Permutation::build(&Family::Random, 4, None),
            Err(Error::FamilyParams(_))
        ));
    }

    #[test]
    fn rejects_odd_and_oversized_n() {
        assert!(matches!(
            Permutation::build(&Family::Identity, 3, None),
            Err(Error::OddBitLength(3))
        ));
        assert!(matches!(
            Permutation::build(&Family::Identity, 18, None),
            Err(Error::BitLengthOutOfRange { n: 18, cap: 16 })
        ));
        assert!(matches!(
            Permutation::build(&Family::Identity, 0, None),
            Err(Error::BitLengthOutOfRange { .. })
        ));
        assert!(Permutation::build_with_cap(&Family::Identity, 18, None, 18).is_ok());
    }

    #[test]
    fn rejects_non_bijective_table() {
        let err = Permutation::build(&Family::FromTable(vec![0, 1, 1, 3]), 2, None).unwrap_err();
        assert!(matches!(err, Error::NotBijective { .. }));
        let err = Permutation::build(&Family::FromTable(vec![0, 1, 2, 4]), 2, None).unwrap_err();
        assert!(matches!(err, Error::NotBijective { .. }));
    }

    #[test]
    fn affine_rejects_singular_matrix() {
        let family = Family::AffineGf2 {
            matrix: Some(vec![0b1100, 0b0100, 0b1000, 0b0001]),
            offset: 0,
        };
        assert!(matches!(
            Permutation::build(&family, 4, None),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn affine_identity_matrix_with_offset_is_xor() {
        let family = Family::AffineGf2 {
            matrix: Some(vec![0b1000, 0b0100, 0b0010, 0b0001]),
            offset: 0b0110,
        };
        let p = Permutation::build(&family, 4, None).unwrap();
        let q = Permutation::build(&Family::XorMask(0b0110), 4, None).unwrap();
        assert_eq!(p.table(), q.table());
    }

    #[test]
    fn random_affine_is_bijective() {
        let family = Family::AffineGf2 {
            matrix: None,
            offset: 5,
        };
        let p = Permutation::build(&family, 8, Some(3)).unwrap();
        let mut sorted = p.table().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..256).collect::<Vec<_>>());
    }

    #[test]
    fn prefix_set_examples() {
        let p = Permutation::build(&Family::Identity, 4, None).unwrap();
        assert_eq!(p.prefix_set(0b1010, 0).unwrap().len(), 16);
        assert_eq!(p.prefix_set(0b1010, 2).unwrap().members(), &[8, 9, 10, 11]);
        assert_eq!(p.prefix_set(0b1010, 4).unwrap().members(), &[10]);
        assert!(matches!(
            p.prefix_set(0, 3),
            Err(Error::BadPrefixLength { len: 3, n: 4 })
        ));
        assert!(matches!(p.prefix_set(16, 2), Err(Error::ValueOutOfRange { .. })));
    }

    #[test]
    fn membership_stats_examples() {
        let p = Permutation::build(&Family::Random, 4, Some(11)).unwrap();
        for y in 0..16 {
            assert_eq!(p.prefix_membership_stats(y, 0).unwrap(), Ratio::from_integer(1));
            assert_eq!(p.prefix_membership_stats(y, 1).unwrap(), Ratio::new(1, 4));
            assert_eq!(p.prefix_membership_stats(y, 2).unwrap(), Ratio::new(1, 16));
        }
    }

    #[test]
    fn file_format_roundtrip_and_strictness() {
        let p = Permutation::build(&Family::Identity, 2, None).unwrap();
        assert_eq!(p.to_file_string(), "n=2\n0\n1\n2\n3\n");
        let q = Permutation::parse("n=2\n1\n0\n3\n2\n").unwrap();
        assert_eq!(q.table(), &[1, 0, 3, 2]);
        assert!(Permutation::parse("n=2\n1\n0\n3\n2").is_err());
        assert!(Permutation::parse("n=2\n# c\n1\n0\n3\n2\n").is_err());
        assert!(Permutation::parse("n=2\n1\n0\n3\n").is_err());
        assert!(Permutation::parse("n=3\n0\n1\n2\n3\n4\n5\n6\n7\n").is_err());
    }
}
