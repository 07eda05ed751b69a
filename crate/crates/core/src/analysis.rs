//! Quantitative checks of the error analysis for inversion with
//! pseudo-reflections.
//!
//! Everything is finite-n: wherever an asymptotically negligible term would
//! appear, the explicit good-state term `2 sqrt(a) |S ∩ Y| / sqrt|S|` (or its
//! coarsening `2 sqrt(a) 2^{n/2}`) is carried instead.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invert::{run_av_inv, run_many, RunOptions};
use crate::ops::{bad_capacity, sample_bad_set, AngleMode, BadMode, PseudoIdentity, PseudoIdentitySpec};
use crate::perm::Permutation;
use crate::qstate::{decompose, StateVector};
use crate::tol;

/// `|| (J - I) |psi(S, T)> ||`, by direct application of `J`.
pub fn error_length(op: &PseudoIdentity, s: &[usize], t: &[usize]) -> Result<f64> {
    let psi = StateVector::signed_uniform(op.n(), op.k(), s, t)?;
    let mut moved = psi.clone();
    op.apply(&mut moved, false)?;
    moved.distance(&psi)
}

/// The two parts of the error-length bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundTerms {
    /// `2 sqrt(|S ∩ X| / |S|)`.
    pub bad_term: f64,
    /// `2 sqrt(a) |S ∩ Y| / sqrt|S|`.
    pub good_term: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.bad_term + self.good_term
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub measured: f64,
    pub bound: f64,
    pub terms: BoundTerms,
    pub margin: f64,
    pub pass: bool,
    pub s_size: usize,
    pub t_size: usize,
    pub s_bad: usize,
    pub a: f64,
    pub b: f64,
}

pub fn error_length_bound(op: &PseudoIdentity, s: &[usize]) -> BoundTerms {
    let s_bad = s.iter().filter(|&&y| op.is_bad(y)).count();
    let len = s.len() as f64;
    BoundTerms {
        bad_term: 2.0 * (s_bad as f64 / len).sqrt(),
        good_term: 2.0 * op.a().sqrt() * (s.len() - s_bad) as f64 / len.sqrt(),
    }
}

/// Error length against `2 sqrt(a) |S∩Y|/sqrt|S| + 2 sqrt(|S∩X|/|S|)`.
pub fn lemma31_check(op: &PseudoIdentity, s: &[usize], t: &[usize]) -> Result<LemmaReport> {
    let measured = error_length(op, s, t)?;
    let terms = error_length_bound(op, s);
    let bound = terms.total();
    let margin = bound - measured;
    Ok(LemmaReport {
        measured,
        bound,
        terms,
        margin,
        pass: margin >= -tol::BOUND_SLACK,
        s_size: s.len(),
        t_size: t.len(),
        s_bad: s.iter().filter(|&&y| op.is_bad(y)).count(),
        a: op.a(),
        b: op.b(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma32Report {
    pub alpha: Complex64,
    pub perp_norm: f64,
    pub error_length: f64,
    pub pass: bool,
}

/// Decomposes `J |psi(S,T)>` along `|psi(S,T)>` and compares the orthogonal
/// part with the error length.
pub fn lemma32_check(op: &PseudoIdentity, s: &[usize], t: &[usize]) -> Result<Lemma32Report> {
    let psi = StateVector::signed_uniform(op.n(), op.k(), s, t)?;
    let mut moved = psi.clone();
    op.apply(&mut moved, false)?;
    let d = decompose(&psi, &moved)?;
    let error_length = moved.distance(&psi)?;
    Ok(Lemma32Report {
        alpha: d.alpha,
        perp_norm: d.perp_norm,
        error_length,
        pass: d.perp_norm <= error_length + tol::BOUND_SLACK,
    })
}

/// A seeded random `(J, S, T)` instance: `S` a uniform nonempty subset of
/// `[0, 2^n)`, `T` a uniform subset of `S`, and `J` with `floor(b 2^n)` bad
/// values and randomly chosen angle and bad modes.
pub fn random_lemma_instance(n: u32, a: f64, b: f64, seed: u64) -> Result<(PseudoIdentity, Vec<usize>, Vec<usize>)> {
    let size = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_len = rng.gen_range(1..=size);
    let mut s = rand::seq::index::sample(&mut rng, size, s_len).into_vec();
    let t_len = rng.gen_range(0..=s_len);
    let mut t = s[..t_len].to_vec();
    s.sort_unstable();
    t.sort_unstable();
    let bad_set = sample_bad_set(n, bad_capacity(n, b), rng.gen());
    let op = PseudoIdentity::build(&PseudoIdentitySpec {
        n,
        k: 1,
        a,
        b,
        bad_mode: if rng.gen_bool(0.5) { BadMode::FullRotation } else { BadMode::RandomAngle },
        angle_mode: if rng.gen_bool(0.5) { AngleMode::WorstCase } else { AngleMode::Random },
        bad_set: Some(bad_set),
        seed: rng.gen(),
    })?;
    Ok((op, s, t))
}

/// Which inputs `x` a sweep visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum XSelection {
    All,
    /// One uniformly drawn `x` from each of `count` equal strata of
    /// `[0, 2^n)`, in ascending order.
    Sample { count: usize, seed: u64 },
}

impl XSelection {
    pub fn resolve(&self, n: u32) -> Vec<usize> {
        let size = 1usize << n;
        match *self {
            XSelection::All => (0..size).collect(),
            XSelection::Sample { count, seed } => {
                if count >= size {
                    return (0..size).collect();
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|i| {
                        let lo = i * size / count;
                        let hi = (i + 1) * size / count;
                        rng.gen_range(lo..hi)
                    })
                    .collect()
            }
        }
    }

    pub fn is_exhaustive(&self, n: u32) -> bool {
        match *self {
            XSelection::All => true,
            XSelection::Sample { count, .. } => count >= 1usize << n,
        }
    }

    pub fn label(&self) -> String {
        match self {
            XSelection::All => "exhaustive".into(),
            XSelection::Sample { count, .. } => format!("sampled({count})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioCheck {
    /// `mean_x |X ∩ S| / |S|`.
    pub mean_ratio: f64,
    /// `|X| / 2^n`.
    pub expected: f64,
    /// Only asserted on exhaustive sweeps.
    pub asserted: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceedCheck {
    pub threshold: f64,
    pub count: usize,
    /// Markov limit `N * mean / threshold`.
    pub markov_limit: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SweepMetric {
    /// `l(S_{x,j}, T_{x,j})` when `with_t`, else `l(S_{x,j+1}, {})`.
    ErrorLength { j: usize, with_t: bool },
    V2Norm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub metric: SweepMetric,
    pub sample_mode: String,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub population: usize,
    pub evaluated: usize,
    pub mean: f64,
    pub std_err: f64,
    pub max: f64,
    pub bound: f64,
    /// Slack added to `bound` before comparing.
    pub slack: f64,
    pub bound_pass: bool,
    pub ratio: Option<RatioCheck>,
    pub exceed: Vec<ExceedCheck>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl SweepSummary {
    pub fn pass(&self) -> bool {
        self.bound_pass
            && self.ratio.as_ref().is_none_or(|r| r.pass)
            && self.exceed.iter().all(|e| e.pass)
    }

    pub fn margin(&self) -> f64 {
        self.bound - self.mean
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn selection_seed(xs: &XSelection) -> Option<u64> {
    match xs {
        XSelection::All => None,
        XSelection::Sample { seed, .. } => Some(*seed),
    }
}

/// `count{v > t} <= N * mean / t` for `t > 0`.
pub fn markov_check(values: &[f64], threshold: f64) -> ExceedCheck {
    let (mean, _) = mean_and_stderr(values);
    let count = values.iter().filter(|&&v| v > threshold).count();
    let markov_limit = values.len() as f64 * mean / threshold;
    ExceedCheck {
        threshold,
        count,
        markov_limit,
        pass: count as f64 <= markov_limit + tol::BOUND_SLACK,
    }
}

/// Mean error length over `x` for one stage, with the averaged
/// bad-fraction identity and the averaged error-length bound.
pub fn expected_error_sweep(
    perm: &Permutation,
    op: &PseudoIdentity,
    j: usize,
    with_t: bool,
    xs: &XSelection,
) -> Result<SweepSummary> {
    perm.check_stage(j)?;
    let n = perm.n();
    let xlist = xs.resolve(n);
    let rows = run_many(&xlist, |x| {
        let (s, t) = if with_t {
            (perm.stage_set(x, j)?, perm.tagged_set(x, j)?.into_members())
        } else {
            (perm.stage_set(x, j + 1)?, Vec::new())
        };
        let s_bad = s.members().iter().filter(|&&y| op.is_bad(y)).count();
        let l = error_length(op, s.members(), &t)?;
        Ok((l, s_bad as f64 / s.len() as f64))
    })?;
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (mean, std_err) = mean_and_stderr(&values);
    let (mean_ratio, _) = mean_and_stderr(&ratios);
    let exhaustive = xs.is_exhaustive(n);

    let population = perm.size();
    let bad_fraction = op.bad_set().len() as f64 / population as f64;
    let bound = 2.0 * bad_fraction.sqrt() + 2.0 * op.a().sqrt() * (population as f64).sqrt();
    let slack = if exhaustive {
        tol::BOUND_SLACK
    } else {
        tol::SAMPLED_SE_MULTIPLIER * std_err + tol::BOUND_SLACK
    };
    let ratio_pass = (mean_ratio - bad_fraction).abs() <= tol::SCALAR;
    Ok(SweepSummary {
        metric: SweepMetric::ErrorLength { j, with_t },
        sample_mode: xs.label(),
        exhaustive,
        seed: selection_seed(xs),
        population,
        evaluated: values.len(),
        mean,
        std_err,
        max: values.iter().copied().fold(0.0, f64::max),
        bound,
        slack,
        bound_pass: mean <= bound + slack,
        ratio: Some(RatioCheck {
            mean_ratio,
            expected: bad_fraction,
            asserted: exhaustive,
            pass: !exhaustive || ratio_pass,
        }),
        exceed: Vec::new(),
        values,
    })
}

/// Runs the pseudo-reflection inverter on every selected `x` and checks the
/// aggregate orthogonal-error bound `2n sqrt(b) + 2n sqrt(a) 2^{n/2}` and
/// the Markov counts at `1/q` and at ten times the mean.
pub fn claim32_stats(perm: &Permutation, op: &PseudoIdentity, xs: &XSelection, q: f64) -> Result<SweepSummary> {
    if q <= 0.0 {
        return Err(Error::Param(format!("q must be positive (got {q})")));
    }
    let n = perm.n();
    let xlist = xs.resolve(n);
    let opts = RunOptions::pseudo();
    let values = run_many(&xlist, |x| Ok(run_av_inv(perm, x, op, &opts)?.v2_norm))?;
    let (mean, std_err) = mean_and_stderr(&values);
    let exhaustive = xs.is_exhaustive(n);
    let population = perm.size();
    let bad_fraction = op.bad_set().len() as f64 / population as f64;
    let nf = n as f64;
    let bound = 2.0 * nf * bad_fraction.sqrt() + 2.0 * nf * op.a().sqrt() * (population as f64).sqrt();
    let slack = if exhaustive {
        tol::BOUND_SLACK
    } else {
        tol::SAMPLED_SE_MULTIPLIER * std_err + tol::BOUND_SLACK
    };
    let mut exceed = vec![markov_check(&values, 1.0 / q)];
    if mean > 0.0 {
        exceed.push(markov_check(&values, 10.0 * mean));
    }
    Ok(SweepSummary {
        metric: SweepMetric::V2Norm,
        sample_mode: xs.label(),
        exhaustive,
        seed: selection_seed(xs),
        population,
        evaluated: values.len(),
        mean,
        std_err,
        max: values.iter().copied().fold(0.0, f64::max),
        bound,
        slack,
        bound_pass: mean <= bound + slack,
        ratio: None,
        exceed,
        values,
    })
}

/// Parameter calculus relating the inversion failure rate `1/r`, the
/// pseudo-identity quality `p` and the success margin `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Params {
    pub r: f64,
    pub n: u32,
    /// `4 n^2 (r + 1)^4`.
    pub p: f64,
    /// `p^{1/4} / sqrt(2n)`.
    pub q: f64,
    /// `2^n (1/r - 1/q^2) / (1 - 1/q^2)`.
    pub claim31_count: f64,
}

pub fn params_compute(r: f64, n: u32) -> Result<Params> {
    if !r.is_finite() || r < 1.0 {
        return Err(Error::Param(format!("r must be at least 1 (got {r})")));
    }
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Param(format!("n must be even and at least 2 (got {n})")));
    }
    let nf = n as f64;
    let p = 4.0 * nf * nf * (r + 1.0).powi(4);
    let q = p.sqrt().sqrt() / (2.0 * nf).sqrt();
    let inv_q2 = 1.0 / (q * q);
    let claim31_count = 2f64.powi(n as i32) * (1.0 / r - inv_q2) / (1.0 - inv_q2);
    Ok(Params {
        r,
        n,
        p,
        q,
        claim31_count,
    })
}

/// Whether `(1/r - 1/q^2) / (1 - 1/q^2) > 1/q` holds at `q = r + 1`.
pub fn contradiction_check(r: f64) -> bool {
    let q = r + 1.0;
    let inv_q2 = 1.0 / (q * q);
    (1.0 / r - inv_q2) / (1.0 - inv_q2) > 1.0 / q
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectProfile {
    pub j: usize,
    pub samples: usize,
    pub max: f64,
    pub mean: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    /// Fraction of samples with defect above `2a`.
    pub frac_exceeding_2a: f64,
}

/// `(x, w_in)` pairs: all of them when `count` covers `2^{2n}`, otherwise a
/// seeded uniform sample sorted ascending.
pub fn defect_sample(n: u32, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let size = 1usize << n;
    if count >= size * size {
        return (0..size).flat_map(|x| (0..size).map(move |w| (x, w))).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..count)
        .map(|_| (rng.gen_range(0..size), rng.gen_range(0..size)))
        .collect();
    pairs.sort_unstable();
    pairs
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Empirical distribution of the reflection defect over `(x, w_in)` pairs.
/// Reporting only.
pub fn pseudo_reflection_profile(
    perm: &Permutation,
    op: &PseudoIdentity,
    j: usize,
    sample: &[(usize, usize)],
) -> Result<DefectProfile> {
    perm.check_stage(j)?;
    let mut defects: Vec<f64> = sample
        .iter()
        .map(|&(x, w)| crate::ops::measure_reflection_defect(perm, op, j, x, w))
        .collect::<Result<_>>()?;
    let mean = if defects.is_empty() {
        0.0
    } else {
        defects.iter().sum::<f64>() / defects.len() as f64
    };
    let exceeding = defects.iter().filter(|&&d| d > 2.0 * op.a()).count();
    defects.sort_by(f64::total_cmp);
    Ok(DefectProfile {
        j,
        samples: defects.len(),
        max: defects.last().copied().unwrap_or(0.0),
        mean,
        p50: nearest_rank(&defects, 0.5),
        p90: nearest_rank(&defects, 0.9),
        p99: nearest_rank(&defects, 0.99),
        frac_exceeding_2a: if defects.is_empty() {
            0.0
        } else {
            exceeding as f64 / defects.len() as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{sample_bad_set, PseudoIdentitySpec};
    use crate::perm::Family;

    fn worst(n: u32, a: f64, bad: Vec<usize>) -> PseudoIdentity {
        PseudoIdentity::build(&PseudoIdentitySpec::worst_case(n, a, bad, 0)).unwrap()
    }

    #[test]
    fn error_length_examples() {
        let id = PseudoIdentity::build(&PseudoIdentitySpec::identity(4)).unwrap();
        assert_eq!(error_length(&id, &[1, 2, 3, 4], &[2]).unwrap(), 0.0);

        let op = worst(4, 0.0, vec![5]);
        assert!((error_length(&op, &[5], &[]).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);

        // Every component rotated by the same angle: l^2 = 2(1 - (1 - a)).
        let a = 0.01;
        let op = worst(4, a, vec![]);
        let l = error_length(&op, &[0, 3, 6, 9], &[6]).unwrap();
        assert!((l - (2.0 * a).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lemma31_examples() {
        let op = worst(4, 0.0, vec![15]);
        let r = lemma31_check(&op, &[0, 1, 2, 3], &[1]).unwrap();
        assert_eq!((r.measured, r.bound), (0.0, 0.0));
        assert!(r.pass);

        let op = worst(4, 0.0, vec![7]);
        let r = lemma31_check(&op, &[7], &[]).unwrap();
        assert!((r.measured - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((r.bound - 2.0).abs() < 1e-12);
        assert!(r.pass);
        assert_eq!(r.s_bad, 1);
    }

    #[test]
    fn lemma32_examples() {
        let id = PseudoIdentity::build(&PseudoIdentitySpec::identity(4)).unwrap();
        let r = lemma32_check(&id, &[1, 2], &[]).unwrap();
        assert!((r.alpha - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(r.perp_norm < 1e-15);

        let op = worst(4, 0.0, vec![9]);
        let r = lemma32_check(&op, &[9], &[]).unwrap();
        assert!(r.alpha.norm() < 1e-15);
        assert!((r.perp_norm - 1.0).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn ratio_identity_n4_j1() {
        let p = Permutation::build(&Family::Random, 4, Some(3)).unwrap();
        let op = worst(4, 0.0, vec![2, 9, 14]);
        let s = expected_error_sweep(&p, &op, 1, true, &XSelection::All).unwrap();
        // Oracle: enumerate all 16 x and average |X ∩ S_{x,1}| / |S_{x,1}|.
        let mut total = 0.0;
        for x in 0..16 {
            let members = p.stage_set(x, 1).unwrap();
            let hits = members.members().iter().filter(|y| [2, 9, 14].contains(*y)).count();
            total += hits as f64 / members.len() as f64;
        }
        assert!((total / 16.0 - 3.0 / 16.0).abs() < 1e-15);
        let ratio = s.ratio.unwrap();
        assert!((ratio.mean_ratio - 3.0 / 16.0).abs() < 1e-12);
        assert!(ratio.pass && s.bound_pass);
    }

    #[test]
    fn empty_bad_set_sweeps_are_zero() {
        let p = Permutation::build(&Family::Random, 6, Some(3)).unwrap();
        let op = worst(6, 0.0, vec![]);
        for j in 0..3 {
            let s = expected_error_sweep(&p, &op, j, false, &XSelection::All).unwrap();
            assert_eq!(s.mean, 0.0);
        }
        let c = claim32_stats(&p, &op, &XSelection::All, 2.0).unwrap();
        assert!(c.mean <= 1e-12);
        assert!(c.exceed.iter().all(|e| e.count == 0));
    }

    #[test]
    fn claim32_single_bad_value_n8() {
        let p = Permutation::build(&Family::Random, 8, Some(5)).unwrap();
        let op = worst(8, 0.0, sample_bad_set(8, 1, 1));
        let c = claim32_stats(&p, &op, &XSelection::All, 4.0).unwrap();
        assert!(c.mean > 0.0);
        assert!((c.bound - 2.0 * 8.0 * (1.0f64 / 256.0).sqrt()).abs() < 1e-12);
        assert!(c.pass(), "{c:?}");
    }

    #[test]
    fn sampled_selection_is_stratified() {
        let xs = XSelection::Sample { count: 8, seed: 3 }.resolve(6);
        assert_eq!(xs.len(), 8);
        for (i, x) in xs.iter().enumerate() {
            assert!((i * 8..(i + 1) * 8).contains(x));
        }
        assert_eq!(XSelection::Sample { count: 100, seed: 0 }.resolve(4).len(), 16);
        assert!(XSelection::Sample { count: 16, seed: 0 }.is_exhaustive(4));
    }

    #[test]
    fn params_examples() {
        let p = params_compute(1.0, 4).unwrap();
        assert_eq!(p.p, 1024.0);
        assert_eq!(p.q, 2.0);
        assert!((p.claim31_count - 16.0).abs() < 1e-12);
        let p = params_compute(2.0, 4).unwrap();
        assert_eq!(p.p, 5184.0);
        assert!((p.q - 3.0).abs() < 1e-12);
        assert!((p.claim31_count - 7.0).abs() < 1e-12);
        assert!(params_compute(0.5, 4).is_err());
        assert!(params_compute(2.0, 3).is_err());
    }

    #[test]
    fn contradiction_examples() {
        assert!(contradiction_check(1.0));
        let q: f64 = 3.0;
        let lhs = (0.5 - 1.0 / (q * q)) / (1.0 - 1.0 / (q * q));
        assert!((lhs - 7.0 / 16.0).abs() < 1e-15);
        assert!(contradiction_check(2.0));
        assert!((1..=100).all(|r| contradiction_check(r as f64)));
    }

    #[test]
    fn markov_on_array() {
        let values = [0.0, 0.0, 0.0, 1.0];
        let e = markov_check(&values, 0.5);
        assert_eq!(e.count, 1);
        assert_eq!(e.markov_limit, 2.0);
        assert!(e.pass);
    }

    #[test]
    fn profile_examples() {
        let p = Permutation::build(&Family::Random, 4, Some(1)).unwrap();
        let id = PseudoIdentity::build(&PseudoIdentitySpec::identity(4)).unwrap();
        let sample = defect_sample(4, 1 << 8, 0);
        assert_eq!(sample.len(), 256);
        let prof = pseudo_reflection_profile(&p, &id, 1, &sample).unwrap();
        assert!(prof.max < 1e-12);
        assert_eq!(prof.frac_exceeding_2a, 0.0);

        let p6 = Permutation::build(&Family::Random, 6, Some(1)).unwrap();
        let mut spec = PseudoIdentitySpec::identity(6);
        spec.b = 1.0 / 16.0;
        spec.seed = 4;
        let op = PseudoIdentity::build(&spec).unwrap();
        let sample = defect_sample(6, 500, 7);
        let a = pseudo_reflection_profile(&p6, &op, 0, &sample).unwrap();
        let b = pseudo_reflection_profile(&p6, &op, 0, &defect_sample(6, 500, 7)).unwrap();
        assert_eq!(a, b);
        assert!(a.max > 0.0 && a.max <= 2.0);
    }
}
