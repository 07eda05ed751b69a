//! Dense statevector over a main register of `n` qubits and an ancilla
//! register of `k` qubits.
//!
//! Amplitudes are stored at `idx = y * 2^k + w`, where `y` is the main value
//! and `w` the ancilla value. The classical input register is never
//! represented: every operator in this crate is block-diagonal in it.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: u32,
    k: u32,
    amps: Vec<Complex64>,
}

/// Largest combined register supported (`n + k`).
pub const MAX_QUBITS: u32 = 26;

fn check_dims(n: u32, k: u32) -> Result<()> {
    if n + k > MAX_QUBITS {
        return Err(Error::Param(format!(
            "register of {} qubits exceeds the {MAX_QUBITS}-qubit limit",
            n + k
        )));
    }
    Ok(())
}

impl StateVector {
    pub fn zeros(n: u32, k: u32) -> Result<Self> {
        check_dims(n, k)?;
        Ok(StateVector {
            n,
            k,
            amps: vec![Complex64::new(0.0, 0.0); 1usize << (n + k)],
        })
    }

    pub fn basis(n: u32, k: u32, y: usize, w: usize) -> Result<Self> {
        let mut s = Self::zeros(n, k)?;
        let idx = s.index(y, w)?;
        s.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(n: u32, k: u32, amps: Vec<Complex64>) -> Result<Self> {
        check_dims(n, k)?;
        if amps.len() != 1usize << (n + k) {
            return Err(Error::Param(format!(
                "expected {} amplitudes for n={n}, k={k}, got {}",
                1usize << (n + k),
                amps.len()
            )));
        }
        Ok(StateVector { n, k, amps })
    }

    /// `(1/sqrt|S|) (sum_{S\T} |y,0> - sum_T |y,0>)`.
    pub fn signed_uniform(n: u32, k: u32, s: &[usize], t: &[usize]) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidSet("S must be nonempty".into()));
        }
        let mut state = Self::zeros(n, k)?;
        let amp = 1.0 / (s.len() as f64).sqrt();
        for &y in s {
            let idx = state.index(y, 0)?;
            if state.amps[idx].re != 0.0 {
                return Err(Error::InvalidSet(format!("S contains {y} twice")));
            }
            state.amps[idx] = Complex64::new(amp, 0.0);
        }
        for &y in t {
            let idx = state.index(y, 0)?;
            if state.amps[idx].re <= 0.0 {
                return Err(Error::InvalidSet(format!(
                    "T is not a subset of S (offending element {y})"
                )));
            }
            state.amps[idx] = -state.amps[idx];
        }
        Ok(state)
    }

    /// Uniform superposition over `s` at ancilla value 0.
    pub fn uniform(n: u32, k: u32, s: &[usize]) -> Result<Self> {
        Self::signed_uniform(n, k, s, &[])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Number of ancilla values per main value, `2^k`.
    pub fn ancilla_dim(&self) -> usize {
        1usize << self.k
    }

    pub fn main_dim(&self) -> usize {
        1usize << self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn index(&self, y: usize, w: usize) -> Result<usize> {
        if y >= self.main_dim() {
            return Err(Error::ValueOutOfRange {
                value: y,
                bits: self.n,
            });
        }
        if w >= self.ancilla_dim() {
            return Err(Error::ValueOutOfRange {
                value: w,
                bits: self.k,
            });
        }
        Ok((y << self.k) | w)
    }

    pub fn amplitude(&self, y: usize, w: usize) -> Result<Complex64> {
        Ok(self.amps[self.index(y, w)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn same_shape(&self, other: &StateVector) -> Result<()> {
        self.expect_shape(other.n, other.k)
    }

    pub fn expect_shape(&self, n: u32, k: u32) -> Result<()> {
        if self.n != n || self.k != k {
            return Err(Error::DimensionMismatch {
                expected_n: n,
                expected_k: k,
                found_n: self.n,
                found_k: self.k,
            });
        }
        Ok(())
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Squared magnitude of the amplitude at `(y, w)`.
    pub fn basis_overlap(&self, y: usize, w: usize) -> Result<f64> {
        Ok(self.amplitude(y, w)?.norm_sqr())
    }

    /// `self - other`, kept as a raw (unnormalized) vector.
    pub fn difference(&self, other: &StateVector) -> Result<StateVector> {
        self.same_shape(other)?;
        Ok(StateVector {
            n: self.n,
            k: self.k,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= tol::STATE
    }

    /// Writes `y w re im` rows in index order with 17 significant digits.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let kd = self.ancilla_dim();
        for (idx, a) in self.amps.iter().enumerate() {
            writeln!(
                out,
                "{} {} {} {}",
                idx / kd,
                idx % kd,
                crate::harness::fmt_f64(a.re),
                crate::harness::fmt_f64(a.im)
            )?;
        }
        Ok(())
    }
}

/// Decomposition `v = alpha * u + perp` along a unit vector `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    pub alpha: Complex64,
    pub perp_norm: f64,
}

/// Summary of the elementary relations between two states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorAlgebra {
    pub inner: Complex64,
    pub norm_u: f64,
    pub dist: f64,
    pub decomposition: Decomposition,
}

/// Decomposes `v` along the unit vector `u`.
pub fn decompose(u: &StateVector, v: &StateVector) -> Result<Decomposition> {
    let norm_u = u.norm();
    if (norm_u - 1.0).abs() > tol::STATE {
        return Err(Error::NotNormalized(norm_u));
    }
    let alpha = u.inner(v)?;
    let perp_norm = u
        .amps
        .iter()
        .zip(&v.amps)
        .map(|(a, b)| (b - alpha * a).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(Decomposition { alpha, perp_norm })
}

pub fn vector_algebra(u: &StateVector, v: &StateVector) -> Result<VectorAlgebra> {
    let decomposition = decompose(u, v)?;
    Ok(VectorAlgebra {
        inner: decomposition.alpha,
        norm_u: u.norm(),
        dist: u.distance(v)?,
        decomposition,
    })
}
