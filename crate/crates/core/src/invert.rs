//! Stage-by-stage inversion of a permutation by alternating tagging and
//! reflection, with closed-form oracles for every intermediate state.
//!
//! Stage `j` (for `j = 0 .. n/2`) tags the preimages that match `x` on two
//! more bits and then reflects about the uniform state over `S_{x,j}`. Before
//! stage `j` the state is uniform over `S_{x,j}` with amplitude
//! `2^j / sqrt(2^n)`, so after the last stage it sits on `f^{-1}(x)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::{apply_pseudo_reflection, apply_reflection_exact, apply_tagging, reflect_about_uniform, PseudoIdentity};
use crate::perm::Permutation;
use crate::qstate::StateVector;
use crate::tol;

/// Uniform superposition over every main value, ancilla at 0.
pub fn initial_state(n: u32, k: u32) -> Result<StateVector> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddBitLength(n));
    }
    let all: Vec<usize> = (0..1usize << n).collect();
    StateVector::uniform(n, k, &all)
}

/// The state right after tagging in stage `j`: `+c` on `S_{x,j} \ T_{x,j}`,
/// `-c` on `T_{x,j}`, with `c = 2^j / sqrt(2^n)`.
pub fn expected_state_after_tag(perm: &Permutation, x: usize, j: usize, k: u32) -> Result<StateVector> {
    perm.check_stage(j)?;
    let s = perm.stage_set(x, j)?;
    let t = perm.tagged_set(x, j)?;
    let n = perm.n();
    let coeff = (1u64 << j) as f64 / ((1u64 << n) as f64).sqrt();
    let mut state = StateVector::zeros(n, k)?;
    for &y in s.members() {
        let idx = state.index(y, 0)?;
        state.amps_mut()[idx].re = coeff;
    }
    for &y in t.members() {
        let idx = state.index(y, 0)?;
        state.amps_mut()[idx].re = -coeff;
    }
    Ok(state)
}

/// The state right after the reflection in stage `j`: uniform over
/// `T_{x,j} = S_{x,j+1}` with amplitude `2^{j+1} / sqrt(2^n)`.
pub fn expected_state_after_reflect(perm: &Permutation, x: usize, j: usize, k: u32) -> Result<StateVector> {
    perm.check_stage(j)?;
    let t = perm.tagged_set(x, j)?;
    let n = perm.n();
    let coeff = (1u64 << (j + 1)) as f64 / ((1u64 << n) as f64).sqrt();
    let mut state = StateVector::zeros(n, k)?;
    for &y in t.members() {
        let idx = state.index(y, 0)?;
        state.amps_mut()[idx].re = coeff;
    }
    Ok(state)
}

/// A source of stage reflections. Implementations claim to realize the
/// reflection about `|psi_{j,x}>` for stage `j`.
pub trait StageProvider: Sync {
    fn label(&self) -> String;

    /// Ancilla qubits the provider operates on.
    fn ancilla_qubits(&self) -> u32;

    fn apply_stage(&self, state: &mut StateVector, perm: &Permutation, x: usize, j: usize) -> Result<()>;

    fn pseudo_identity(&self) -> Option<&PseudoIdentity> {
        None
    }
}

/// The exact reflection, tensored with identity on `k` ancilla qubits.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactReflection {
    pub k: u32,
}

impl StageProvider for ExactReflection {
    fn label(&self) -> String {
        "exact".into()
    }

    fn ancilla_qubits(&self) -> u32 {
        self.k
    }

    fn apply_stage(&self, state: &mut StateVector, perm: &Permutation, x: usize, j: usize) -> Result<()> {
        apply_reflection_exact(state, perm, x, j)
    }
}

/// `J^dagger Q_j J` evaluated in one fused pass.
#[derive(Clone, Copy, Debug)]
pub struct PseudoReflection<'a> {
    pub op: &'a PseudoIdentity,
}

impl StageProvider for PseudoReflection<'_> {
    fn label(&self) -> String {
        format!("pseudo(a={},b={})", self.op.a(), self.op.b())
    }

    fn ancilla_qubits(&self) -> u32 {
        self.op.k()
    }

    fn apply_stage(&self, state: &mut StateVector, perm: &Permutation, x: usize, j: usize) -> Result<()> {
        apply_pseudo_reflection(state, perm, x, j, self.op)
    }

    fn pseudo_identity(&self) -> Option<&PseudoIdentity> {
        Some(self.op)
    }
}

/// The same operator as [`PseudoReflection`], applied as three separate
/// steps: `J`, the exact reflection, then `J^dagger`.
#[derive(Clone, Copy, Debug)]
pub struct SteppedPseudoReflection<'a> {
    pub op: &'a PseudoIdentity,
}

impl StageProvider for SteppedPseudoReflection<'_> {
    fn label(&self) -> String {
        format!("pseudo-stepped(a={},b={})", self.op.a(), self.op.b())
    }

    fn ancilla_qubits(&self) -> u32 {
        self.op.k()
    }

    fn apply_stage(&self, state: &mut StateVector, perm: &Permutation, x: usize, j: usize) -> Result<()> {
        self.op.apply(state, false)?;
        apply_reflection_exact(state, perm, x, j)?;
        self.op.apply(state, true)
    }

    fn pseudo_identity(&self) -> Option<&PseudoIdentity> {
        Some(self.op)
    }
}

/// Exact everywhere except at `stage`, where it reflects about the uniform
/// state over the wrong prefix set `S_{x,j+1}`.
#[derive(Clone, Copy, Debug)]
pub struct CorruptedReflection {
    pub stage: usize,
    pub k: u32,
}

impl StageProvider for CorruptedReflection {
    fn label(&self) -> String {
        format!("corrupted(stage={})", self.stage)
    }

    fn ancilla_qubits(&self) -> u32 {
        self.k
    }

    fn apply_stage(&self, state: &mut StateVector, perm: &Permutation, x: usize, j: usize) -> Result<()> {
        if j == self.stage {
            perm.check_stage(j)?;
            let wrong = perm.tagged_set(x, j)?;
            reflect_about_uniform(state, wrong.members())
        } else {
            apply_reflection_exact(state, perm, x, j)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub trace: bool,
    /// Keep full states after each step (memory heavy for large `n`).
    pub snapshots: bool,
    /// Stage passes iff its fidelity is at least this.
    pub threshold: f64,
}

impl RunOptions {
    pub fn exact() -> Self {
        RunOptions {
            trace: false,
            snapshots: false,
            threshold: tol::EXACT_STAGE_THRESHOLD,
        }
    }

    pub fn pseudo() -> Self {
        RunOptions {
            threshold: tol::PSEUDO_STAGE_THRESHOLD,
            ..Self::exact()
        }
    }

    pub fn traced(mut self) -> Self {
        self.trace = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub j: usize,
    /// L2 distance to the closed-form state after tagging.
    pub dist_after_tag: f64,
    /// L2 distance to the closed-form state after the reflection.
    pub dist_after_reflect: f64,
    /// `|<expected|state>|^2` after the reflection.
    pub stage_fidelity: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageSnapshot {
    pub after_tag: StateVector,
    pub after_reflect: StateVector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTrace {
    pub threshold: f64,
    pub stages: Vec<StageRecord>,
    #[serde(skip)]
    pub snapshots: Option<Vec<StageSnapshot>>,
}

impl StageTrace {
    pub fn first_failing_stage(&self) -> Option<usize> {
        self.stages.iter().find(|s| !s.pass).map(|s| s.j)
    }

    pub fn max_distance(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| s.dist_after_tag.max(s.dist_after_reflect))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermMeta {
    pub n: u32,
    pub family: String,
    pub seed: Option<u64>,
}

impl From<&Permutation> for PermMeta {
    fn from(p: &Permutation) -> Self {
        PermMeta {
            n: p.n(),
            family: p.family().to_string(),
            seed: p.seed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoMeta {
    pub k: u32,
    pub a: f64,
    pub b: f64,
    pub bad_size: usize,
    pub seed: u64,
}

impl From<&PseudoIdentity> for PseudoMeta {
    fn from(op: &PseudoIdentity) -> Self {
        PseudoMeta {
            k: op.k(),
            a: op.a(),
            b: op.b(),
            bad_size: op.bad_set().len(),
            seed: op.seed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub x: usize,
    /// `f^{-1}(x)`.
    pub target: usize,
    /// `|<f^{-1}(x), 0 | final>|^2`.
    pub success_prob: f64,
    /// Length of the final state's component orthogonal to the target.
    pub v2_norm: f64,
    pub trace: Option<StageTrace>,
    pub perm: PermMeta,
    pub pseudo: Option<PseudoMeta>,
}

impl RunReport {
    pub fn first_failing_stage(&self) -> Option<usize> {
        self.trace.as_ref().and_then(StageTrace::first_failing_stage)
    }
}

/// Runs all `n/2` stages with `provider` and returns the report together
/// with the final state.
pub fn run_with_provider(
    perm: &Permutation,
    x: usize,
    provider: &dyn StageProvider,
    opts: &RunOptions,
) -> Result<(RunReport, StateVector)> {
    perm.check_value(x)?;
    let n = perm.n();
    let k = provider.ancilla_qubits();
    let mut state = initial_state(n, k)?;
    let mut stages = Vec::new();
    let mut snapshots = Vec::new();
    for j in 0..n as usize / 2 {
        apply_tagging(&mut state, perm, x, j)?;
        let after_tag = if opts.trace {
            let oracle = expected_state_after_tag(perm, x, j, k)?;
            Some(state.distance(&oracle)?)
        } else {
            None
        };
        let tagged = opts.snapshots.then(|| state.clone());
        provider.apply_stage(&mut state, perm, x, j)?;
        if let Some(dist_after_tag) = after_tag {
            let oracle = expected_state_after_reflect(perm, x, j, k)?;
            let stage_fidelity = oracle.inner(&state)?.norm_sqr();
            stages.push(StageRecord {
                j,
                dist_after_tag,
                dist_after_reflect: state.distance(&oracle)?,
                stage_fidelity,
                pass: stage_fidelity >= opts.threshold,
            });
        }
        if let Some(after_tag) = tagged {
            snapshots.push(StageSnapshot {
                after_tag,
                after_reflect: state.clone(),
            });
        }
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > tol::STATE {
        return Err(Error::Invariant(format!(
            "final norm {norm} deviates from 1 for x={x}"
        )));
    }
    let target = perm.inverse(x);
    let target_idx = state.index(target, 0)?;
    let success_prob = state.amps()[target_idx].norm_sqr();
    let v2_norm = state
        .amps()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_idx)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let report = RunReport {
        x,
        target,
        success_prob,
        v2_norm,
        trace: opts.trace.then(|| StageTrace {
            threshold: opts.threshold,
            stages,
            snapshots: opts.snapshots.then_some(snapshots),
        }),
        perm: perm.into(),
        pseudo: provider.pseudo_identity().map(PseudoMeta::from),
    };
    Ok((report, state))
}

/// Exact inversion with `k` idle ancilla qubits.
pub fn run_inv(perm: &Permutation, x: usize, k: u32, opts: &RunOptions) -> Result<RunReport> {
    run_with_provider(perm, x, &ExactReflection { k }, opts).map(|(r, _)| r)
}

/// Inversion where every reflection is replaced by `J^dagger Q_j J`.
pub fn run_av_inv(perm: &Permutation, x: usize, op: &PseudoIdentity, opts: &RunOptions) -> Result<RunReport> {
    check_op(perm, op)?;
    run_with_provider(perm, x, &PseudoReflection { op }, opts).map(|(r, _)| r)
}

/// [`run_av_inv`] with the pseudo-reflection applied as separate
/// `J`, reflection and `J^dagger` steps.
pub fn run_av_inv_stepped(
    perm: &Permutation,
    x: usize,
    op: &PseudoIdentity,
    opts: &RunOptions,
) -> Result<(RunReport, StateVector)> {
    check_op(perm, op)?;
    run_with_provider(perm, x, &SteppedPseudoReflection { op }, opts)
}

fn check_op(perm: &Permutation, op: &PseudoIdentity) -> Result<()> {
    if op.n() != perm.n() {
        return Err(Error::DimensionMismatch {
            expected_n: perm.n(),
            expected_k: op.k(),
            found_n: op.n(),
            found_k: op.k(),
        });
    }
    Ok(())
}

/// Runs `f` for every `x` concurrently, returning results in input order.
pub fn run_many<T, F>(xs: &[usize], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XVerdict {
    pub x: usize,
    pub stages: Vec<StageRecord>,
    pub first_failing_stage: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepwiseReport {
    pub provider: String,
    pub threshold: f64,
    pub per_x: Vec<XVerdict>,
    /// Smallest failing stage over all tested `x`.
    pub first_failing_stage: Option<usize>,
}

impl StepwiseReport {
    pub fn all_pass(&self) -> bool {
        self.first_failing_stage.is_none()
    }
}

/// Checks every stage of `provider` against the closed-form post-stage
/// state, for each `x` in `xs`.
pub fn run_stepwise_test(
    perm: &Permutation,
    xs: &[usize],
    provider: &dyn StageProvider,
    threshold: f64,
) -> Result<StepwiseReport> {
    let opts = RunOptions {
        trace: true,
        snapshots: false,
        threshold,
    };
    let per_x = run_many(xs, |x| {
        let (report, _) = run_with_provider(perm, x, provider, &opts)?;
        let stages = report.trace.map(|t| t.stages).unwrap_or_default();
        let first_failing_stage = stages.iter().find(|s| !s.pass).map(|s| s.j);
        Ok(XVerdict {
            x,
            stages,
            first_failing_stage,
        })
    })?;
    let first_failing_stage = per_x.iter().filter_map(|v| v.first_failing_stage).min();
    Ok(StepwiseReport {
        provider: provider.label(),
        threshold,
        per_x,
        first_failing_stage,
    })
}
