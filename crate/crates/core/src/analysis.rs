//! Closed-form information gain and disturbance for a fixed eavesdropping channel.
//!
//! The eavesdropper sees only the string of bit announcements. On each one,
//! given message bit `b`, the four symbols `(σ1, c=0), (σ1, c=1), (σ3, c=0),
//! (σ3, c=1)` occur with probabilities fixed by the image of the chaotic state
//! ½I under her channel. Strings of length `k` are grouped into count classes
//! (how often each symbol occurs), so the mutual information is a sum over
//! O(k³) classes instead of 4^k strings. All entropies are in bits.

use rayon::prelude::*;

use crate::error::{check_unit_interval, Error, Result};
use crate::qubit::{
    apply_channel, bloch_from_density, measurement_prob, DensityMatrix, KrausChannel,
    MeasurementBasis, MeasurementResult, ProtocolPureState,
};

/// Default binomial tail tolerance.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Largest accepted binomial tail tolerance.
pub const MAX_TAIL_TOL: f64 = 1e-6;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Probabilities below this are treated as exact zeros.
const PROB_FLOOR: f64 = 1e-300;

/// Per-announcement symbol probabilities, for each value of the message bit.
///
/// Symbol order is `[(σ1, c=0), (σ1, c=1), (σ3, c=0), (σ3, c=1)]`. The `b = 1`
/// row is the `b = 0` row with `c` flipped within each basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnouncementDistribution {
    pub probs_given_b: [[f64; 4]; 2],
}

impl AnnouncementDistribution {
    /// Builds both rows from the `b = 0` row.
    pub fn from_b0(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidChannel(format!(
                "announcement probabilities {probs:?} outside [0, 1]"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidChannel(format!(
                "announcement probabilities sum to {sum}"
            )));
        }
        let [a, b, c, d] = probs;
        Ok(AnnouncementDistribution {
            probs_given_b: [probs, [b, a, d, c]],
        })
    }

    pub fn uniform() -> Self {
        AnnouncementDistribution {
            probs_given_b: [[0.25; 4]; 2],
        }
    }

    pub fn given(&self, b: u8) -> [f64; 4] {
        self.probs_given_b[usize::from(b)]
    }
}

/// Pr(σi, c = b | b) = ¼(1 + λv_i), Pr(σi, c ≠ b | b) = ¼(1 − λv_i).
pub fn bit_announcement_probs(eve: &KrausChannel) -> Result<AnnouncementDistribution> {
    let image = apply_channel(eve, &DensityMatrix::chaotic())?;
    let [r1, _, r3] = bloch_from_density(&image).cartesian();
    AnnouncementDistribution::from_b0([
        0.25 * (1.0 + r1),
        0.25 * (1.0 - r1),
        0.25 * (1.0 + r3),
        0.25 * (1.0 - r3),
    ])
}

/// ln n! for 0 ≤ n ≤ max.
#[derive(Debug, Clone)]
pub struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for n in 1..=max {
            acc += (n as f64).ln();
            table.push(acc);
        }
        LnFactorial(table)
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    pub fn ln_multinomial(&self, parts: &[usize]) -> f64 {
        let total: usize = parts.iter().sum();
        self.get(total) - parts.iter().map(|&d| self.get(d)).sum::<f64>()
    }
}

/// `d · ln a` with the convention 0 · ln 0 = 0.
#[inline]
fn ln_pow(ln_a: f64, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        d as f64 * ln_a
    }
}

fn ln_prob(p: f64) -> f64 {
    if p < PROB_FLOOR {
        f64::NEG_INFINITY
    } else {
        p.ln()
    }
}

/// log2(1 + e^r), stable for large |r|.
#[inline]
fn log2_1p_exp(r: f64) -> f64 {
    if r == f64::NEG_INFINITY {
        0.0
    } else if r > 0.0 {
        (r + (-r).exp().ln_1p()) / std::f64::consts::LN_2
    } else {
        r.exp().ln_1p() / std::f64::consts::LN_2
    }
}

/// Contribution of one count class to I(C^(k) : B), in bits.
///
/// With per-string probabilities P0 = Pr(c|b=0), P1 = Pr(c|b=1) and
/// P̄ = (P0 + P1)/2, each string contributes
/// −P̄ log P̄ + ½(P0 log P0 + P1 log P1) = ½P0 log(P0/P̄) + ½P1 log(P1/P̄).
/// Inputs are natural logs; `ln_mult` is the log class size.
#[inline]
fn class_information(ln_mult: f64, ln_p0: f64, ln_p1: f64) -> f64 {
    let mut total = 0.0;
    if ln_p0 > f64::NEG_INFINITY {
        total += 0.5 * (ln_mult + ln_p0).exp() * (1.0 - log2_1p_exp(ln_p1 - ln_p0));
    }
    if ln_p1 > f64::NEG_INFINITY {
        total += 0.5 * (ln_mult + ln_p1).exp() * (1.0 - log2_1p_exp(ln_p0 - ln_p1));
    }
    total
}

/// I(C^(k) : B) in bits for a uniform prior on the message bit.
pub fn mutual_information_k(dist: &AnnouncementDistribution, k: usize) -> f64 {
    mutual_information_k_with(dist, k, &LnFactorial::new(k))
}

fn mutual_information_k_with(dist: &AnnouncementDistribution, k: usize, lnf: &LnFactorial) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let l0 = dist.given(0).map(ln_prob);
    let l1 = dist.given(1).map(ln_prob);
    let mut total = 0.0;
    for d1 in 0..=k {
        for d2 in 0..=k - d1 {
            for d3 in 0..=k - d1 - d2 {
                let d4 = k - d1 - d2 - d3;
                let d = [d1, d2, d3, d4];
                let ln_p0: f64 = (0..4).map(|i| ln_pow(l0[i], d[i])).sum();
                let ln_p1: f64 = (0..4).map(|i| ln_pow(l1[i], d[i])).sum();
                total += class_information(lnf.get(k) - d.iter().map(|&j| lnf.get(j)).sum::<f64>(), ln_p0, ln_p1);
            }
        }
    }
    total.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MIResult {
    pub mi_bits: f64,
    pub k_terms_used: usize,
    /// Binomial mass of the omitted string lengths.
    pub truncation_mass: f64,
}

/// Binomial weights p_k = C(N,k) p^k (1−p)^(N−k), kept in decreasing order of
/// p_k until the omitted mass drops below `tail_tol`. Returned in ascending `k`
/// together with the omitted mass.
pub fn binomial_weights(n: usize, p: f64, tail_tol: f64) -> Result<(Vec<(usize, f64)>, f64)> {
    check_unit_interval("p_announce", p)?;
    if !(tail_tol > 0.0 && tail_tol <= MAX_TAIL_TOL) {
        return Err(Error::OutOfRange {
            name: "tail_tol",
            value: tail_tol,
            expected: "(0, 1e-6]",
        });
    }
    let lnf = LnFactorial::new(n);
    let (lp, lq) = (ln_prob(p), ln_prob(1.0 - p));
    let mut pmf: Vec<(usize, f64)> = (0..=n)
        .map(|k| {
            let ln = lnf.get(n) - lnf.get(k) - lnf.get(n - k) + ln_pow(lp, k) + ln_pow(lq, n - k);
            (k, ln.exp())
        })
        .collect();
    pmf.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    // omitted[i] = mass of pmf[i..], accumulated smallest-first.
    let mut omitted = vec![0.0; pmf.len() + 1];
    for i in (0..pmf.len()).rev() {
        omitted[i] = omitted[i + 1] + pmf[i].1;
    }
    let keep = (1..=pmf.len())
        .find(|&i| omitted[i] < tail_tol)
        .unwrap_or(pmf.len());
    let truncation_mass = omitted[keep];
    let mut kept = pmf[..keep].to_vec();
    kept.sort_by_key(|&(k, _)| k);
    Ok((kept, truncation_mass))
}

fn weighted_sum<F>(weights: &[(usize, f64)], term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let terms: Vec<f64> = weights.par_iter().map(|&(k, pk)| pk * term(k)).collect();
    // Fixed ascending-k summation order.
    terms.iter().sum()
}

/// I(C : B) = Σ_k p_k I(C^(k) : B).
pub fn expected_mutual_information(
    dist: &AnnouncementDistribution,
    n_shots: usize,
    p_announce: f64,
    tail_tol: f64,
) -> Result<MIResult> {
    let (weights, truncation_mass) = binomial_weights(n_shots, p_announce, tail_tol)?;
    let lnf = LnFactorial::new(n_shots);
    let mi = weighted_sum(&weights, |k| mutual_information_k_with(dist, k, &lnf));
    Ok(MIResult {
        mi_bits: mi.clamp(0.0, 1.0),
        k_terms_used: weights.len(),
        truncation_mass,
    })
}

/// Count class of a length-`k` bit-announcement string: `d3` copies of
/// (σ3, c=0), `d4` of (σ3, c=1), the rest σ1 announcements of either bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StringCountClass {
    pub k: usize,
    pub d3: usize,
    pub d4: usize,
}

impl StringCountClass {
    pub fn sigma1_count(&self) -> usize {
        self.k - self.d3 - self.d4
    }
}

/// One count class of the seal-channel family with its natural-log weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SealClass {
    pub class: StringCountClass,
    /// ln[k!/(d3! d4! m!) · 2^m], m = number of σ1 announcements.
    pub ln_multiplicity: f64,
    /// ln[(¼)^k (1+x)^d3 (1−x)^d4], the per-string probability given b = 0.
    pub ln_p: f64,
    /// Same with the exponents swapped (b = 1).
    pub ln_q: f64,
}

impl SealClass {
    /// Total probability of the class given b = 0.
    pub fn mass_p(&self) -> f64 {
        (self.ln_multiplicity + self.ln_p).exp()
    }

    pub fn mass_q(&self) -> f64 {
        (self.ln_multiplicity + self.ln_q).exp()
    }
}

/// The σ1 symbols have equal likelihood under both messages, so they are
/// merged: each σ1 position can carry either bit, giving the 2^m factor.
pub fn seal_example_classes(x: f64, k: usize) -> Result<Vec<SealClass>> {
    check_unit_interval("x", x)?;
    Ok(seal_classes(x, k, &LnFactorial::new(k)))
}

fn seal_classes(x: f64, k: usize, lnf: &LnFactorial) -> Vec<SealClass> {
    let ln_plus = ln_prob(1.0 + x);
    let ln_minus = ln_prob(1.0 - x);
    let ln_quarter_k = -(k as f64) * 4f64.ln();
    let mut out = Vec::with_capacity((k + 1) * (k + 2) / 2);
    for d3 in 0..=k {
        for d4 in 0..=k - d3 {
            let m = k - d3 - d4;
            out.push(SealClass {
                class: StringCountClass { k, d3, d4 },
                ln_multiplicity: lnf.ln_multinomial(&[d3, d4, m]) + m as f64 * std::f64::consts::LN_2,
                ln_p: ln_quarter_k + ln_pow(ln_plus, d3) + ln_pow(ln_minus, d4),
                ln_q: ln_quarter_k + ln_pow(ln_minus, d3) + ln_pow(ln_plus, d4),
            });
        }
    }
    out
}

/// Expected mutual information for the seal-channel family, using its
/// two-count class structure directly.
pub fn mi_seal_example(x: f64, n_shots: usize, p_announce: f64, tail_tol: f64) -> Result<MIResult> {
    check_unit_interval("x", x)?;
    let (weights, truncation_mass) = binomial_weights(n_shots, p_announce, tail_tol)?;
    let lnf = LnFactorial::new(n_shots);
    let mi = weighted_sum(&weights, |k| {
        seal_classes(x, k, &lnf)
            .iter()
            .map(|c| class_information(c.ln_multiplicity, c.ln_p, c.ln_q))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    });
    Ok(MIResult {
        mi_bits: mi.clamp(0.0, 1.0),
        k_terms_used: weights.len(),
        truncation_mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchProbability {
    /// Probability that a given shot is a mismatch event.
    pub per_shot: f64,
    /// Probability of a mismatch given the bases matched.
    pub matched_basis_conditional: f64,
}

/// ⅛ Σ over the four mismatch events (prepared state, its own basis, wrong result).
pub fn mismatch_probability(eve: &KrausChannel) -> Result<MismatchProbability> {
    let mut sum = 0.0;
    for prep in ProtocolPureState::ALL {
        let out = apply_channel(eve, &prep.density())?;
        sum += measurement_prob(&out, prep.basis(), prep.eigen_result().negate());
    }
    let per_shot = (sum / 8.0).clamp(0.0, 1.0);
    Ok(MismatchProbability {
        per_shot,
        matched_basis_conditional: (2.0 * per_shot).min(1.0),
    })
}

/// Probability that a run has at least one matched-basis bit announcement,
/// 1 − (1 − p_a/2)^N. On an undisturbed channel this is the probability that
/// Bob recovers the message.
pub fn decode_success_probability(n_shots: usize, p_announce: f64) -> f64 {
    -(n_shots as f64 * (-0.5 * p_announce).ln_1p()).exp_m1()
}

/// Chaotic-state image probability `Pr(m = +1 | σ)` for reporting.
pub fn chaotic_plus_probability(eve: &KrausChannel, basis: MeasurementBasis) -> Result<f64> {
    let image = apply_channel(eve, &DensityMatrix::chaotic())?;
    Ok(measurement_prob(&image, basis, MeasurementResult::Plus))
}
