//! Shot-level protocol simulation.
//!
//! Each shot: Bob prepares one of |0⟩, |1⟩, |+⟩, |−⟩ uniformly at random, the
//! eavesdropper's channel acts on the qubit in transit, Alice measures σ1 or σ3
//! with equal probability, announces her basis, and then announces either the
//! coded bit `c = b XOR [m = −1]` (with probability `p_announce`) or her raw
//! result `m`.
//!
//! Randomness: a run is driven by a ChaCha8 stream keyed by the root seed,
//! with the stream id set to the trial index. Every shot consumes a fixed
//! number of words, so shot `i` of trial `t` is a pure function of
//! `(seed, t, i)` and trials can run on any number of threads.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_unit_interval, Error, Result};
use crate::qubit::{
    apply_channel, measurement_prob, KrausChannel, MeasurementBasis, MeasurementResult,
    ProtocolPureState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    n_shots: usize,
    p_announce: f64,
    message_bit: u8,
    seed: u64,
}

impl ProtocolParams {
    pub fn new(n_shots: usize, p_announce: f64, message_bit: u8, seed: u64) -> Result<Self> {
        if n_shots == 0 {
            return Err(Error::OutOfRange {
                name: "n_shots",
                value: 0.0,
                expected: ">= 1",
            });
        }
        check_unit_interval("p_announce", p_announce)?;
        if message_bit > 1 {
            return Err(Error::OutOfRange {
                name: "message_bit",
                value: f64::from(message_bit),
                expected: "0 or 1",
            });
        }
        Ok(ProtocolParams {
            n_shots,
            p_announce,
            message_bit,
            seed,
        })
    }

    pub fn n_shots(&self) -> usize {
        self.n_shots
    }

    pub fn p_announce(&self) -> f64 {
        self.p_announce
    }

    pub fn message_bit(&self) -> u8 {
        self.message_bit
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Announcement {
    /// Coded bit `c`.
    Bit(u8),
    /// Raw measurement result.
    Result(MeasurementResult),
}

impl Announcement {
    pub fn kind(&self) -> &'static str {
        match self {
            Announcement::Bit(_) => "bit",
            Announcement::Result(_) => "result",
        }
    }

    pub fn value(&self) -> String {
        match self {
            Announcement::Bit(c) => c.to_string(),
            Announcement::Result(m) => m.to_string(),
        }
    }
}

/// One shot's full private record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotRecord {
    pub prep: ProtocolPureState,
    pub basis: MeasurementBasis,
    pub result: MeasurementResult,
    pub announcement: Announcement,
}

impl ShotRecord {
    pub fn matched_basis(&self) -> bool {
        self.prep.basis() == self.basis
    }
}

/// What everyone hears: Alice's basis and her announcement, per shot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicTranscript {
    shots: Vec<(MeasurementBasis, Announcement)>,
}

impl PublicTranscript {
    pub fn from_shots(shots: &[ShotRecord]) -> Self {
        PublicTranscript {
            shots: shots.iter().map(|s| (s.basis, s.announcement)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn entries(&self) -> &[(MeasurementBasis, Announcement)] {
        &self.shots
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    pub decoded_bit: Option<u8>,
    pub matched_bit_announcements: u64,
    pub matched_result_announcements: u64,
    pub mismatch_count: u64,
}

/// Born-rule table `Pr(m = +1 | ℰ(prep), basis)` for a fixed channel.
///
/// The eavesdropper applies the same operation on every shot, so the four
/// output states are computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct Eavesdropper {
    label: String,
    plus_prob: [[f64; 2]; 4],
}

impl Eavesdropper {
    pub fn new(channel: &KrausChannel) -> Result<Self> {
        let mut plus_prob = [[0.0; 2]; 4];
        for (i, prep) in ProtocolPureState::ALL.iter().enumerate() {
            let out = apply_channel(channel, &prep.density())?;
            for (j, basis) in MeasurementBasis::ALL.iter().enumerate() {
                plus_prob[i][j] = measurement_prob(&out, *basis, MeasurementResult::Plus);
            }
        }
        Ok(Eavesdropper {
            label: channel.label().to_owned(),
            plus_prob,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn prob_plus(&self, prep: ProtocolPureState, basis: MeasurementBasis) -> f64 {
        self.plus_prob[prep_index(prep)][basis_index(basis)]
    }
}

fn prep_index(p: ProtocolPureState) -> usize {
    match p {
        ProtocolPureState::Zero => 0,
        ProtocolPureState::One => 1,
        ProtocolPureState::Plus => 2,
        ProtocolPureState::Minus => 3,
    }
}

fn basis_index(b: MeasurementBasis) -> usize {
    match b {
        MeasurementBasis::Sigma1 => 0,
        MeasurementBasis::Sigma3 => 1,
    }
}

/// Index into the bit-announcement alphabet
/// `[(σ1, c=0), (σ1, c=1), (σ3, c=0), (σ3, c=1)]`.
pub fn bit_announcement_index(basis: MeasurementBasis, c: u8) -> usize {
    2 * basis_index(basis) + usize::from(c)
}

/// One shot. Draws, in order: preparation, basis, Born variate, announcement variate.
pub fn run_shot<R: Rng + ?Sized>(
    rng: &mut R,
    message_bit: u8,
    p_announce: f64,
    eve: &Eavesdropper,
) -> ShotRecord {
    let prep = ProtocolPureState::ALL[(rng.next_u32() >> 30) as usize];
    let basis = MeasurementBasis::ALL[(rng.next_u32() >> 31) as usize];
    let u: f64 = rng.gen();
    let result = if u < eve.prob_plus(prep, basis) {
        MeasurementResult::Plus
    } else {
        MeasurementResult::Minus
    };
    let v: f64 = rng.gen();
    let announcement = if v < p_announce {
        Announcement::Bit(message_bit ^ result.flip_bit())
    } else {
        Announcement::Result(result)
    };
    ShotRecord {
        prep,
        basis,
        result,
        announcement,
    }
}

/// Majority vote over matched-basis bit announcements; `None` on no votes or a tie.
pub fn bob_decode(shots: &[ShotRecord]) -> Option<u8> {
    let (ones, total) = decode_votes(shots);
    let zeros = total - ones;
    match ones.cmp(&zeros) {
        std::cmp::Ordering::Greater => Some(1),
        std::cmp::Ordering::Less => Some(0),
        std::cmp::Ordering::Equal => None,
    }
}

/// (votes for 1, total votes)
fn decode_votes(shots: &[ShotRecord]) -> (u64, u64) {
    let mut ones = 0;
    let mut total = 0;
    for s in shots.iter().filter(|s| s.matched_basis()) {
        if let Announcement::Bit(c) = s.announcement {
            // |1⟩ and |−⟩ predict m = −1, so the coded bit is flipped back.
            ones += u64::from(c ^ s.prep.eigen_result().flip_bit());
            total += 1;
        }
    }
    (ones, total)
}

/// Returns `(mismatch_count, matched_result_announcements)`.
pub fn tally_mismatches(shots: &[ShotRecord]) -> (u64, u64) {
    let mut mismatches = 0;
    let mut matched = 0;
    for s in shots.iter().filter(|s| s.matched_basis()) {
        if let Announcement::Result(m) = s.announcement {
            matched += 1;
            if m != s.prep.eigen_result() {
                mismatches += 1;
            }
        }
    }
    (mismatches, matched)
}

pub fn outcome(shots: &[ShotRecord]) -> RunOutcome {
    let (mismatch_count, matched_result_announcements) = tally_mismatches(shots);
    RunOutcome {
        decoded_bit: bob_decode(shots),
        matched_bit_announcements: decode_votes(shots).1,
        matched_result_announcements,
        mismatch_count,
    }
}

/// The RNG for trial `trial` under root seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(params: &ProtocolParams, eve: &Eavesdropper, trial: u64) -> Vec<ShotRecord> {
    let mut rng = trial_rng(params.seed, trial);
    (0..params.n_shots)
        .map(|_| run_shot(&mut rng, params.message_bit, params.p_announce, eve))
        .collect()
}

/// A full run of `params.n_shots` shots; identical to Monte Carlo trial 0.
pub fn run_protocol(
    params: &ProtocolParams,
    eve: &KrausChannel,
) -> Result<(Vec<ShotRecord>, PublicTranscript, RunOutcome)> {
    let eve = Eavesdropper::new(eve)?;
    let shots = run_trial(params, &eve, 0);
    let transcript = PublicTranscript::from_shots(&shots);
    let out = outcome(&shots);
    Ok((shots, transcript, out))
}

/// Aggregated counts over Monte Carlo trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimStats {
    pub trials: u64,
    pub shots: u64,
    pub matched_basis_shots: u64,
    /// Indexed by [`bit_announcement_index`].
    pub bit_announcement_counts: [u64; 4],
    pub matched_result_announcements: u64,
    pub mismatches: u64,
    pub decode_successes: u64,
    pub decode_correct: u64,
}

impl SimStats {
    fn from_run(shots: &[ShotRecord], message_bit: u8) -> Self {
        let mut stats = SimStats {
            trials: 1,
            shots: shots.len() as u64,
            ..Default::default()
        };
        for s in shots {
            if s.matched_basis() {
                stats.matched_basis_shots += 1;
            }
            if let Announcement::Bit(c) = s.announcement {
                stats.bit_announcement_counts[bit_announcement_index(s.basis, c)] += 1;
            }
        }
        let out = outcome(shots);
        stats.matched_result_announcements = out.matched_result_announcements;
        stats.mismatches = out.mismatch_count;
        if let Some(b) = out.decoded_bit {
            stats.decode_successes = 1;
            stats.decode_correct = u64::from(b == message_bit);
        }
        stats
    }

    pub fn merge(self, o: SimStats) -> SimStats {
        let mut counts = self.bit_announcement_counts;
        for (c, d) in counts.iter_mut().zip(o.bit_announcement_counts) {
            *c += d;
        }
        SimStats {
            trials: self.trials + o.trials,
            shots: self.shots + o.shots,
            matched_basis_shots: self.matched_basis_shots + o.matched_basis_shots,
            bit_announcement_counts: counts,
            matched_result_announcements: self.matched_result_announcements
                + o.matched_result_announcements,
            mismatches: self.mismatches + o.mismatches,
            decode_successes: self.decode_successes + o.decode_successes,
            decode_correct: self.decode_correct + o.decode_correct,
        }
    }

    pub fn bit_announcements(&self) -> u64 {
        self.bit_announcement_counts.iter().sum()
    }

    pub fn bit_announcement_freqs(&self) -> [Estimate; 4] {
        let n = self.bit_announcements();
        self.bit_announcement_counts.map(|k| Estimate::binomial(k, n))
    }

    /// Mismatches per matched-basis result announcement.
    pub fn mismatch_rate(&self) -> Estimate {
        Estimate::binomial(self.mismatches, self.matched_result_announcements)
    }

    pub fn decode_success_rate(&self) -> Estimate {
        Estimate::binomial(self.decode_successes, self.trials)
    }

    /// Correct decodes among successful ones.
    pub fn decode_correct_rate(&self) -> Estimate {
        Estimate::binomial(self.decode_correct, self.decode_successes)
    }

    pub fn matched_basis_rate(&self) -> Estimate {
        Estimate::binomial(self.matched_basis_shots, self.shots)
    }
}

/// An empirical proportion `successes / trials`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn binomial(successes: u64, trials: u64) -> Self {
        Estimate { successes, trials }
    }

    /// NaN when there are no trials.
    pub fn value(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Plug-in standard error √(p̂(1−p̂)/n).
    pub fn std_error(&self) -> f64 {
        let p = self.value();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Standard error under a hypothesised proportion `p`.
    pub fn std_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// |p̂ − p| measured in standard errors at `p`; 0 when both agree exactly.
    pub fn z_score(&self, p: f64) -> f64 {
        let diff = (self.value() - p).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error_at(p)
        }
    }
}

/// Runs `trials` independent runs on the rayon pool; trial `t` uses stream `t`.
pub fn monte_carlo(params: &ProtocolParams, eve: &KrausChannel, trials: u64) -> Result<SimStats> {
    let eve = Eavesdropper::new(eve)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| SimStats::from_run(&run_trial(params, &eve, t), params.message_bit))
        .reduce(SimStats::default, SimStats::merge))
}

pub const TRANSCRIPT_HEADER: &str = "shot_index,prep,basis,result,announcement_kind,announced_value";
pub const PUBLIC_TRANSCRIPT_HEADER: &str = "shot_index,basis,announcement_kind,announced_value";

pub fn write_transcript<W: Write + ?Sized>(w: &mut W, shots: &[ShotRecord]) -> io::Result<()> {
    writeln!(w, "{TRANSCRIPT_HEADER}")?;
    for (i, s) in shots.iter().enumerate() {
        writeln!(
            w,
            "{i},{},{},{},{},{}",
            s.prep.name(),
            s.basis.name(),
            s.result,
            s.announcement.kind(),
            s.announcement.value()
        )?;
    }
    Ok(())
}

pub fn write_public_transcript<W: Write + ?Sized>(w: &mut W, t: &PublicTranscript) -> io::Result<()> {
    writeln!(w, "{PUBLIC_TRANSCRIPT_HEADER}")?;
    for (i, (basis, a)) in t.entries().iter().enumerate() {
        writeln!(w, "{i},{},{},{}", basis.name(), a.kind(), a.value())?;
    }
    Ok(())
}
