//! Stage operators acting in place on a [`StateVector`]: the tagging
//! sign-flip, the reflection about a prefix-consistent uniform state, the
//! pseudo-identity `J` and the conjugated reflection `J^dagger Q J`.
//!
//! The classical input `x` is a parameter of every operator rather than a
//! register, since all of them are block-diagonal in it.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::fmt_f64;
use crate::perm::Permutation;
use crate::qstate::StateVector;

/// Negates every amplitude whose main value `y` has `f(y)` agreeing with `x`
/// on bits `2j+1, 2j+2` (MSB-first).
pub fn apply_tagging(state: &mut StateVector, perm: &Permutation, x: usize, j: usize) -> Result<()> {
    perm.check_stage(j)?;
    perm.check_value(x)?;
    state.expect_shape(perm.n(), state.k())?;
    let shift = perm.n() as usize - 2 * j - 2;
    let want = (x >> shift) & 3;
    let kd = state.ancilla_dim();
    let amps = state.amps_mut();
    for y in 0..perm.size() {
        if (perm.forward(y) >> shift) & 3 == want {
            for a in &mut amps[y * kd..(y + 1) * kd] {
                *a = -*a;
            }
        }
    }
    Ok(())
}

/// Applies `2|u><u| - I` on every ancilla slice, where `u` is the uniform
/// superposition over `members` (distinct main values).
pub fn reflect_about_uniform(state: &mut StateVector, members: &[usize]) -> Result<()> {
    if members.is_empty() {
        return Err(Error::InvalidSet("reflection set must be nonempty".into()));
    }
    if let Some(&bad) = members.iter().find(|&&y| y >= state.main_dim()) {
        return Err(Error::ValueOutOfRange {
            value: bad,
            bits: state.n(),
        });
    }
    let kd = state.ancilla_dim();
    let inv_len = 1.0 / members.len() as f64;
    let amps = state.amps_mut();
    let mut means = vec![Complex64::new(0.0, 0.0); kd];
    for &y in members {
        for (m, a) in means.iter_mut().zip(&amps[y * kd..(y + 1) * kd]) {
            *m += a;
        }
    }
    for m in &mut means {
        *m *= 2.0 * inv_len;
    }
    for a in amps.iter_mut() {
        *a = -*a;
    }
    for &y in members {
        for (a, m) in amps[y * kd..(y + 1) * kd].iter_mut().zip(&means) {
            *a += m;
        }
    }
    Ok(())
}

/// The exact stage reflection about the uniform state over `S_{x,j}`,
/// applied independently on every ancilla slice.
pub fn apply_reflection_exact(
    state: &mut StateVector,
    perm: &Permutation,
    x: usize,
    j: usize,
) -> Result<()> {
    perm.check_stage(j)?;
    state.expect_shape(perm.n(), state.k())?;
    let s = perm.stage_set(x, j)?;
    reflect_about_uniform(state, s.members())
}

/// How the rotation cosines of good main values are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleMode {
    /// Every good value gets cosine exactly `1 - a`.
    WorstCase,
    /// Cosines drawn uniformly from `[1 - a, 1]`.
    Random,
}

/// What the operator does to values in the bad set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BadMode {
    /// Cosine 0: `|z,0>` is sent to `|z,1>`.
    FullRotation,
    /// Cosine drawn uniformly from `[0, 1]`.
    RandomAngle,
}

impl AngleMode {
    pub fn label(self) -> &'static str {
        match self {
            AngleMode::WorstCase => "worst-case",
            AngleMode::Random => "random",
        }
    }
}

impl BadMode {
    pub fn label(self) -> &'static str {
        match self {
            BadMode::FullRotation => "full-rotation",
            BadMode::RandomAngle => "random-angle",
        }
    }
}

impl fmt::Display for AngleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for BadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AngleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worst-case" => Ok(AngleMode::WorstCase),
            "random" => Ok(AngleMode::Random),
            _ => Err(Error::PseudoIdentityParams(format!("unknown angle mode `{s}`"))),
        }
    }
}

impl FromStr for BadMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-rotation" => Ok(BadMode::FullRotation),
            "random-angle" => Ok(BadMode::RandomAngle),
            _ => Err(Error::PseudoIdentityParams(format!("unknown bad mode `{s}`"))),
        }
    }
}

/// Parameters for [`PseudoIdentity::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoIdentitySpec {
    pub n: u32,
    pub k: u32,
    pub a: f64,
    pub b: f64,
    pub bad_mode: BadMode,
    pub angle_mode: AngleMode,
    /// Explicit bad set; otherwise `floor(b * 2^n)` values are sampled.
    pub bad_set: Option<Vec<usize>>,
    pub seed: u64,
}

impl PseudoIdentitySpec {
    pub fn identity(n: u32) -> Self {
        PseudoIdentitySpec {
            n,
            k: 1,
            a: 0.0,
            b: 0.0,
            bad_mode: BadMode::FullRotation,
            angle_mode: AngleMode::WorstCase,
            bad_set: None,
            seed: 0,
        }
    }

    /// Worst-case operator with an explicit bad set and `b = |X| / 2^n`.
    pub fn worst_case(n: u32, a: f64, bad_set: Vec<usize>, seed: u64) -> Self {
        PseudoIdentitySpec {
            n,
            k: 1,
            a,
            b: bad_set.len() as f64 / (1u64 << n) as f64,
            bad_mode: BadMode::FullRotation,
            angle_mode: AngleMode::WorstCase,
            bad_set: Some(bad_set),
            seed,
        }
    }
}

/// `floor(b * 2^n)`, tolerant of `b` values that are exact fractions of `2^n`
/// up to rounding.
pub fn bad_capacity(n: u32, b: f64) -> usize {
    (b * (1u64 << n) as f64 + 1e-9).floor() as usize
}

/// The first `size` entries of a seeded shuffle of `[0, 2^n)`, sorted.
///
/// For a fixed seed the sets are nested in `size`.
pub fn sample_bad_set(n: u32, size: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<usize> = (0..1usize << n).collect();
    all.shuffle(&mut rng);
    let mut set = all[..size.min(all.len())].to_vec();
    set.sort_unstable();
    set
}

/// A unitary on `n + k` qubits built as a direct sum of real 2x2 rotations
/// on `span{|z,0>, |z,1>}`, identity on ancilla values `w >= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoIdentity {
    n: u32,
    k: u32,
    a: f64,
    b: f64,
    angle_mode: AngleMode,
    bad_mode: BadMode,
    seed: u64,
    bad_set: Vec<usize>,
    in_bad: Vec<bool>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PseudoIdentity {
    pub fn build(spec: &PseudoIdentitySpec) -> Result<Self> {
        let PseudoIdentitySpec { n, k, a, b, .. } = *spec;
        validate_params(n, k, a, b)?;
        let size = 1usize << n;
        let cap = bad_capacity(n, b);
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let bad_set = match &spec.bad_set {
            Some(set) => {
                if set.len() > cap {
                    return Err(Error::PseudoIdentityParams(format!(
                        "bad set of size {} exceeds floor(b * 2^n) = {cap}",
                        set.len()
                    )));
                }
                let mut set = set.clone();
                set.sort_unstable();
                set
            }
            None => {
                let mut all: Vec<usize> = (0..size).collect();
                all.shuffle(&mut rng);
                let mut set = all[..cap].to_vec();
                set.sort_unstable();
                set
            }
        };
        let mut in_bad = vec![false; size];
        for &z in &bad_set {
            if z >= size {
                return Err(Error::ValueOutOfRange { value: z, bits: n });
            }
            if in_bad[z] {
                return Err(Error::PseudoIdentityParams(format!("bad set repeats {z}")));
            }
            in_bad[z] = true;
        }
        let cos = (0..size)
            .map(|z| match (in_bad[z], spec.bad_mode, spec.angle_mode) {
                (true, BadMode::FullRotation, _) => 0.0,
                (true, BadMode::RandomAngle, _) => rng.gen_range(0.0..=1.0),
                (false, _, AngleMode::WorstCase) => 1.0 - a,
                (false, _, AngleMode::Random) => rng.gen_range((1.0 - a)..=1.0),
            })
            .collect();
        Ok(Self::assemble(
            n,
            k,
            a,
            b,
            spec.angle_mode,
            spec.bad_mode,
            spec.seed,
            bad_set,
            in_bad,
            cos,
        ))
    }

    /// Builds from explicit per-value cosines, checking the defect bound on
    /// every value outside the bad set.
    #[allow(clippy::too_many_arguments)]
    pub fn from_cosines(
        n: u32,
        k: u32,
        a: f64,
        b: f64,
        angle_mode: AngleMode,
        seed: u64,
        bad_set: Vec<usize>,
        cos: Vec<f64>,
    ) -> Result<Self> {
        validate_params(n, k, a, b)?;
        let size = 1usize << n;
        if cos.len() != size {
            return Err(Error::PseudoIdentityParams(format!(
                "expected {size} cosines, got {}",
                cos.len()
            )));
        }
        if bad_set.len() > bad_capacity(n, b) {
            return Err(Error::PseudoIdentityParams(format!(
                "bad set of size {} exceeds floor(b * 2^n)",
                bad_set.len()
            )));
        }
        let mut in_bad = vec![false; size];
        for &z in &bad_set {
            if z >= size || in_bad[z] {
                return Err(Error::PseudoIdentityParams(format!("invalid bad-set entry {z}")));
            }
            in_bad[z] = true;
        }
        for (z, &c) in cos.iter().enumerate() {
            if !(-1.0..=1.0).contains(&c) {
                return Err(Error::PseudoIdentityParams(format!("cosine {c} for z={z} outside [-1, 1]")));
            }
            if !in_bad[z] && (1.0 - c).abs() > a + crate::tol::SCALAR {
                return Err(Error::PseudoIdentityParams(format!(
                    "good value z={z} has defect {} > a = {a}",
                    (1.0 - c).abs()
                )));
            }
        }
        let mut bad_set = bad_set;
        bad_set.sort_unstable();
        let bad_mode = if bad_set.iter().all(|&z| cos[z] == 0.0) {
            BadMode::FullRotation
        } else {
            BadMode::RandomAngle
        };
        Ok(Self::assemble(n, k, a, b, angle_mode, bad_mode, seed, bad_set, in_bad, cos))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        n: u32,
        k: u32,
        a: f64,
        b: f64,
        angle_mode: AngleMode,
        bad_mode: BadMode,
        seed: u64,
        bad_set: Vec<usize>,
        in_bad: Vec<bool>,
        cos: Vec<f64>,
    ) -> Self {
        let sin = cos.iter().map(|c| (1.0 - c * c).max(0.0).sqrt()).collect();
        PseudoIdentity {
            n,
            k,
            a,
            b,
            angle_mode,
            bad_mode,
            seed,
            bad_set,
            in_bad,
            cos,
            sin,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn angle_mode(&self) -> AngleMode {
        self.angle_mode
    }

    pub fn bad_mode(&self) -> BadMode {
        self.bad_mode
    }

    /// The bad set `X`, sorted.
    pub fn bad_set(&self) -> &[usize] {
        &self.bad_set
    }

    pub fn is_bad(&self, z: usize) -> bool {
        self.in_bad[z]
    }

    /// `<z,0| J |z,0>`.
    pub fn cosine(&self, z: usize) -> f64 {
        self.cos[z]
    }

    pub fn cosines(&self) -> &[f64] {
        &self.cos
    }

    /// Qubit count `n + k` of the operator.
    pub fn qubits(&self) -> u32 {
        self.n + self.k
    }

    fn expect_state(&self, state: &StateVector) -> Result<()> {
        state.expect_shape(self.n, self.k)
    }

    /// Applies `J` (or `J^dagger`) in place.
    pub fn apply(&self, state: &mut StateVector, adjoint: bool) -> Result<()> {
        self.expect_state(state)?;
        let k = self.k;
        let sign = if adjoint { -1.0 } else { 1.0 };
        let amps = state.amps_mut();
        for z in 0..self.cos.len() {
            let s = self.sin[z] * sign;
            if s == 0.0 && self.cos[z] == 1.0 {
                continue;
            }
            let c = self.cos[z];
            let i0 = z << k;
            let (a0, a1) = (amps[i0], amps[i0 + 1]);
            amps[i0] = a0 * c - a1 * s;
            amps[i0 + 1] = a0 * s + a1 * c;
        }
        Ok(())
    }

    /// `|1 - <z,0|J|z,0>|`.
    pub fn identity_defect(&self, z: usize) -> Result<f64> {
        if z >= self.cos.len() {
            return Err(Error::ValueOutOfRange { value: z, bits: self.n });
        }
        Ok((1.0 - self.cos[z]).abs())
    }

    fn cosines_derivable(&self) -> bool {
        self.angle_mode == AngleMode::WorstCase
            && (0..self.cos.len()).all(|z| {
                let expected = if self.in_bad[z] { 0.0 } else { 1.0 - self.a };
                self.cos[z] == expected
            })
    }

    /// Serializes as `n k a b mode seed`, the sorted bad set on one line, then
    /// one cosine per main value unless they all follow from worst-case mode.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {} {}\n",
            self.n,
            self.k,
            fmt_f64(self.a),
            fmt_f64(self.b),
            self.angle_mode,
            self.seed
        );
        let bad: Vec<String> = self.bad_set.iter().map(|z| z.to_string()).collect();
        out.push_str(&bad.join(" "));
        out.push('\n');
        if !self.cosines_derivable() {
            for c in &self.cos {
                out.push_str(&fmt_f64(*c));
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::parse(1, "expected `n k a b mode seed`"));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::parse(1, format!("bad number `{}`", fields[i])))
        };
        let int = |i: usize| -> Result<u64> {
            fields[i]
                .parse::<u64>()
                .map_err(|_| Error::parse(1, format!("bad integer `{}`", fields[i])))
        };
        let n = int(0)? as u32;
        let k = int(1)? as u32;
        let (a, b) = (num(2)?, num(3)?);
        let angle_mode: AngleMode = fields[4].parse()?;
        let seed = int(5)?;
        validate_params(n, k, a, b)?;
        let bad_line = lines.next().ok_or_else(|| Error::parse(2, "missing bad-set line"))?;
        let bad_set = bad_line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::parse(2, format!("bad entry `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        let rest: Vec<&str> = lines.collect();
        let size = 1usize << n;
        let cos = if rest.is_empty() {
            if angle_mode == AngleMode::Random {
                return Err(Error::parse(3, "random angle mode requires per-value cosines"));
            }
            let mut cos = vec![1.0 - a; size];
            for &z in &bad_set {
                if z < size {
                    cos[z] = 0.0;
                }
            }
            cos
        } else {
            rest.iter()
                .enumerate()
                .map(|(i, t)| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(i + 3, format!("bad cosine `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::from_cosines(n, k, a, b, angle_mode, seed, bad_set, cos)
    }
}

fn validate_params(n: u32, k: u32, a: f64, b: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::PseudoIdentityParams("k must be at least 1".into()));
    }
    if n == 0 || n + k > crate::qstate::MAX_QUBITS {
        return Err(Error::PseudoIdentityParams(format!("unsupported size n={n}, k={k}")));
    }
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::PseudoIdentityParams(format!(
            "a and b must lie in [0, 1] (got a={a}, b={b})"
        )));
    }
    Ok(())
}

pub fn apply_pseudo_identity(state: &mut StateVector, op: &PseudoIdentity, adjoint: bool) -> Result<()> {
    op.apply(state, adjoint)
}

/// Applies `J^dagger (Q_j x I) J` for input `x`.
///
/// Evaluated as a single reflection `2 sum_w |phi_w><phi_w| - I` with
/// `phi_w = J^dagger (|psi_{j,x}> |w>)`, which equals the three-step
/// composition but never forms `J v`.
pub fn apply_pseudo_reflection(
    state: &mut StateVector,
    perm: &Permutation,
    x: usize,
    j: usize,
    op: &PseudoIdentity,
) -> Result<()> {
    perm.check_stage(j)?;
    if op.n != perm.n() {
        return Err(Error::DimensionMismatch {
            expected_n: perm.n(),
            expected_k: op.k,
            found_n: op.n,
            found_k: op.k,
        });
    }
    op.expect_state(state)?;
    let s = perm.stage_set(x, j)?;
    let k = op.k;
    let kd = state.ancilla_dim();
    let r = 1.0 / (s.len() as f64).sqrt();
    let amps = state.amps_mut();

    let mut m = vec![Complex64::new(0.0, 0.0); kd];
    for &z in s.members() {
        let (c, sn) = (op.cos[z], op.sin[z]);
        let base = z << k;
        let (v0, v1) = (amps[base], amps[base + 1]);
        m[0] += v0 * c - v1 * sn;
        m[1] += v0 * sn + v1 * c;
        for w in 2..kd {
            m[w] += amps[base + w];
        }
    }
    for mw in &mut m {
        *mw *= r;
    }

    for a in amps.iter_mut() {
        *a = -*a;
    }
    let two_r = 2.0 * r;
    for &z in s.members() {
        let (c, sn) = (op.cos[z], op.sin[z]);
        let base = z << k;
        amps[base] += (m[0] * c + m[1] * sn) * two_r;
        amps[base + 1] += (m[1] * c - m[0] * sn) * two_r;
        for w in 2..kd {
            amps[base + w] += m[w] * two_r;
        }
    }
    Ok(())
}

/// `|1 - <z,0|J|z,0>|` for main value `z`.
pub fn measure_identity_defect(op: &PseudoIdentity, z: usize) -> Result<f64> {
    op.identity_defect(z)
}

/// `|1 - <ideal|actual>|` where `ideal` is the exact stage reflection of
/// `|w_in>|0>` and `actual` the pseudo-reflection of the same input.
pub fn measure_reflection_defect(
    perm: &Permutation,
    op: &PseudoIdentity,
    j: usize,
    x: usize,
    w_in: usize,
) -> Result<f64> {
    perm.check_value(x)?;
    perm.check_value(w_in)?;
    let mut ideal = StateVector::basis(op.n, op.k, w_in, 0)?;
    apply_reflection_exact(&mut ideal, perm, x, j)?;
    let mut actual = StateVector::basis(op.n, op.k, w_in, 0)?;
    apply_pseudo_reflection(&mut actual, perm, x, j, op)?;
    Ok((Complex64::new(1.0, 0.0) - ideal.inner(&actual)?).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Family;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_state(n: u32, k: u32, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..1usize << (n + k))
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(n, k, amps.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    fn three_step(state: &mut StateVector, perm: &Permutation, x: usize, j: usize, op: &PseudoIdentity) {
        op.apply(state, false).unwrap();
        apply_reflection_exact(state, perm, x, j).unwrap();
        op.apply(state, true).unwrap();
    }

    #[test]
    fn tagging_identity_n2() {
        let p = Permutation::build(&Family::Identity, 2, None).unwrap();
        let mut s = StateVector::uniform(2, 0, &[0, 1, 2, 3]).unwrap();
        apply_tagging(&mut s, &p, 3, 0).unwrap();
        assert_eq!(s.amps(), &[c(0.5), c(0.5), c(0.5), c(-0.5)]);
        apply_tagging(&mut s, &p, 3, 0).unwrap();
        assert_eq!(s.amps(), &[c(0.5); 4]);
    }

    #[test]
    fn tagging_without_matches_is_noop() {
        let p = Permutation::build(&Family::Identity, 4, None).unwrap();
        // Support {0,1,2,3}: bits 3..4 of f(y) range over all patterns, so use
        // j = 0 and x with top bits 11 against support whose top bits are 00.
        let mut s = StateVector::uniform(4, 0, &[0, 1, 2, 3]).unwrap();
        let before = s.clone();
        apply_tagging(&mut s, &p, 0b1100, 0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn tagging_range_errors() {
        let p = Permutation::build(&Family::Identity, 4, None).unwrap();
        let mut s = StateVector::zeros(4, 0).unwrap();
        assert!(matches!(apply_tagging(&mut s, &p, 0, 2), Err(Error::StageOutOfRange { .. })));
        let mut wrong = StateVector::zeros(2, 0).unwrap();
        assert!(matches!(
            apply_tagging(&mut wrong, &p, 0, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exact_reflection_examples() {
        let p = Permutation::build(&Family::Identity, 2, None).unwrap();
        let mut s = StateVector::signed_uniform(2, 0, &[0, 1, 2, 3], &[3]).unwrap();
        apply_reflection_exact(&mut s, &p, 3, 0).unwrap();
        let target = StateVector::basis(2, 0, 3, 0).unwrap();
        assert!(s.distance(&target).unwrap() < 1e-15);

        let psi = StateVector::uniform(2, 0, &[0, 1, 2, 3]).unwrap();
        let mut fixed = psi.clone();
        apply_reflection_exact(&mut fixed, &p, 1, 0).unwrap();
        assert!(fixed.distance(&psi).unwrap() < 1e-15);

        // Orthogonal to psi within the slice: negated.
        let v = StateVector::from_amplitudes(2, 0, vec![c(0.5), c(-0.5), c(0.5), c(-0.5)]).unwrap();
        let mut r = v.clone();
        apply_reflection_exact(&mut r, &p, 1, 0).unwrap();
        for (a, b) in r.amps().iter().zip(v.amps()) {
            assert!((a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn reflection_acts_per_ancilla_slice() {
        let p = Permutation::build(&Family::Random, 4, Some(5)).unwrap();
        let v = random_state(4, 2, 1);
        let mut r = v.clone();
        apply_reflection_exact(&mut r, &p, 9, 1).unwrap();
        let s = p.stage_set(9, 1).unwrap();
        for w in 0..4 {
            let mean: Complex64 = s.members().iter().map(|&y| v.amplitude(y, w).unwrap()).sum::<Complex64>()
                / s.len() as f64;
            for y in 0..16 {
                let expected = if s.contains(y) {
                    mean * 2.0 - v.amplitude(y, w).unwrap()
                } else {
                    -v.amplitude(y, w).unwrap()
                };
                assert!((r.amplitude(y, w).unwrap() - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_defect_operator_is_identity() {
        let op = PseudoIdentity::build(&PseudoIdentitySpec::identity(4)).unwrap();
        assert!(op.bad_set().is_empty());
        let v = random_state(4, 1, 3);
        let mut w = v.clone();
        op.apply(&mut w, false).unwrap();
        assert_eq!(w, v);
        for z in 0..16 {
            assert_eq!(measure_identity_defect(&op, z).unwrap(), 0.0);
        }
    }

    #[test]
    fn worst_case_single_bad_value() {
        let op = PseudoIdentity::build(&PseudoIdentitySpec::worst_case(2, 0.0, vec![0], 1)).unwrap();
        let mut s = StateVector::basis(2, 1, 0, 0).unwrap();
        op.apply(&mut s, false).unwrap();
        assert!(s.distance(&StateVector::basis(2, 1, 0, 1).unwrap()).unwrap() < 1e-15);
        assert_eq!(measure_identity_defect(&op, 0).unwrap(), 1.0);

        let mut u = StateVector::uniform(2, 1, &[0, 1]).unwrap();
        op.apply(&mut u, false).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(u.amplitude(0, 0).unwrap().norm() < 1e-15);
        assert!((u.amplitude(0, 1).unwrap() - c(h)).norm() < 1e-15);
        assert!((u.amplitude(1, 0).unwrap() - c(h)).norm() < 1e-15);
    }

    #[test]
    fn worst_case_good_defect_is_a() {
        let spec = PseudoIdentitySpec::worst_case(4, 0.02, vec![3], 0);
        let op = PseudoIdentity::build(&spec).unwrap();
        for z in (0..16).filter(|&z| z != 3) {
            assert!((op.cosine(z) - 0.98).abs() < 1e-15);
            assert!((measure_identity_defect(&op, z).unwrap() - 0.02).abs() < 1e-15);
        }
    }

    #[test]
    fn build_errors() {
        let mut spec = PseudoIdentitySpec::identity(4);
        spec.k = 0;
        assert!(PseudoIdentity::build(&spec).is_err());
        let mut spec = PseudoIdentitySpec::identity(4);
        spec.b = 1.0 / 16.0;
        spec.bad_set = Some(vec![1, 2]);
        assert!(PseudoIdentity::build(&spec).is_err());
        spec.bad_set = Some(vec![1]);
        assert!(PseudoIdentity::build(&spec).is_ok());
    }

    #[test]
    fn sampled_bad_set_has_exact_size() {
        let mut spec = PseudoIdentitySpec::identity(6);
        spec.b = 0.25;
        spec.seed = 9;
        let op = PseudoIdentity::build(&spec).unwrap();
        assert_eq!(op.bad_set().len(), 16);
        assert!(op.bad_set().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn random_mode_respects_ranges() {
        let spec = PseudoIdentitySpec {
            n: 6,
            k: 1,
            a: 0.1,
            b: 0.125,
            bad_mode: BadMode::RandomAngle,
            angle_mode: AngleMode::Random,
            bad_set: None,
            seed: 4,
        };
        let op = PseudoIdentity::build(&spec).unwrap();
        for z in 0..64 {
            if op.is_bad(z) {
                assert!((0.0..=1.0).contains(&op.cosine(z)));
            } else {
                assert!(op.identity_defect(z).unwrap() <= 0.1);
            }
        }
    }

    #[test]
    fn pseudo_identity_roundtrip_adjoint() {
        let spec = PseudoIdentitySpec {
            n: 4,
            k: 2,
            a: 0.3,
            b: 0.25,
            bad_mode: BadMode::RandomAngle,
            angle_mode: AngleMode::Random,
            bad_set: None,
            seed: 2,
        };
        let op = PseudoIdentity::build(&spec).unwrap();
        for seed in 0..100 {
            let v = random_state(4, 2, seed);
            let mut w = v.clone();
            apply_pseudo_identity(&mut w, &op, false).unwrap();
            apply_pseudo_identity(&mut w, &op, true).unwrap();
            assert!(w.distance(&v).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn fused_pseudo_reflection_matches_three_steps() {
        let p = Permutation::build(&Family::Random, 6, Some(3)).unwrap();
        for (k, seed) in [(1, 0u64), (2, 1), (3, 2)] {
            let spec = PseudoIdentitySpec {
                n: 6,
                k,
                a: 0.05,
                b: 0.2,
                bad_mode: BadMode::RandomAngle,
                angle_mode: AngleMode::Random,
                bad_set: None,
                seed,
            };
            let op = PseudoIdentity::build(&spec).unwrap();
            for j in 0..3 {
                let v = random_state(6, k, seed * 10 + j as u64);
                let mut fused = v.clone();
                apply_pseudo_reflection(&mut fused, &p, 37, j, &op).unwrap();
                let mut stepped = v.clone();
                three_step(&mut stepped, &p, 37, j, &op);
                assert!(fused.distance(&stepped).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn pseudo_reflection_with_identity_is_exact() {
        let p = Permutation::build(&Family::Random, 4, Some(1)).unwrap();
        let op = PseudoIdentity::build(&PseudoIdentitySpec::identity(4)).unwrap();
        for seed in 0..20 {
            let v = random_state(4, 1, seed);
            let mut a = v.clone();
            let mut b = v.clone();
            apply_pseudo_reflection(&mut a, &p, 6, 1, &op).unwrap();
            apply_reflection_exact(&mut b, &p, 6, 1).unwrap();
            assert!(a.distance(&b).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn pseudo_reflection_differs_when_bad_set_meets_support() {
        let p = Permutation::build(&Family::Identity, 4, None).unwrap();
        let x = 0b0110;
        let s = p.stage_set(x, 1).unwrap();
        let op = PseudoIdentity::build(&PseudoIdentitySpec::worst_case(4, 0.0, vec![s.members()[0]], 0)).unwrap();
        let t = p.tagged_set(x, 1).unwrap();
        let v = StateVector::signed_uniform(4, 1, s.members(), t.members()).unwrap();
        let mut exact = v.clone();
        apply_reflection_exact(&mut exact, &p, x, 1).unwrap();
        let mut pseudo = v.clone();
        apply_pseudo_reflection(&mut pseudo, &p, x, 1, &op).unwrap();
        let diff = exact.distance(&pseudo).unwrap();
        assert!(diff > 1e-3);
        // |J^dag Q J v - Q v| <= |(J - I) v| + |(J - I) Q v|.
        let l_in = crate::analysis::error_length(&op, s.members(), t.members()).unwrap();
        let l_out = crate::analysis::error_length(&op, t.members(), &[]).unwrap();
        assert!(diff <= l_in + l_out + 1e-12);
    }

    #[test]
    fn reflection_defect_examples() {
        let p = Permutation::build(&Family::Random, 4, Some(2)).unwrap();
        let op = PseudoIdentity::build(&PseudoIdentitySpec::identity(4)).unwrap();
        for x in 0..16 {
            for w in 0..16 {
                assert!(measure_reflection_defect(&p, &op, 1, x, w).unwrap() < 1e-12);
            }
        }
        let x = 5;
        let s = p.stage_set(x, 1).unwrap();
        let w_in = s.members()[2];
        let bad = PseudoIdentity::build(&PseudoIdentitySpec::worst_case(4, 0.0, vec![w_in], 0)).unwrap();
        let d1 = measure_reflection_defect(&p, &bad, 1, x, w_in).unwrap();
        let d2 = measure_reflection_defect(&p, &bad, 1, x, w_in).unwrap();
        // |S| = 4: overlap (1 - 2/|S|)^2 = 1/4, defect 3/4.
        assert!((d1 - 0.75).abs() < 1e-12);
        assert_eq!(d1, d2);
    }

    #[test]
    fn serialization_roundtrip() {
        let worst = PseudoIdentity::build(&PseudoIdentitySpec::worst_case(4, 0.01, vec![2, 7], 5)).unwrap();
        let text = worst.to_text();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(PseudoIdentity::parse(&text).unwrap(), worst);

        let spec = PseudoIdentitySpec {
            n: 4,
            k: 1,
            a: 0.2,
            b: 0.25,
            bad_mode: BadMode::RandomAngle,
            angle_mode: AngleMode::Random,
            bad_set: None,
            seed: 8,
        };
        let random = PseudoIdentity::build(&spec).unwrap();
        let text = random.to_text();
        assert_eq!(text.lines().count(), 2 + 16);
        assert_eq!(PseudoIdentity::parse(&text).unwrap(), random);
    }

    #[test]
    fn parse_rejects_defect_violations() {
        let mut text = String::from("2 1 0.1 0 random 0\n\n");
        for c in ["1", "0.95", "0.5", "1"] {
            text.push_str(c);
            text.push('\n');
        }
        assert!(PseudoIdentity::parse(&text).is_err());
    }
}
