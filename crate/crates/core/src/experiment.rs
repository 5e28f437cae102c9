//! Tamper-detection experiments: constant bit-flip attacks of a given
//! weight against the quantum pipeline, tallied per weight.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classical::RejectReason;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::keys::{PrivateKey, SenderKey};
use crate::protocol::{channel_tamper, q_decode, q_encode_with_error, QVerdict};
use crate::qsim::QuantumMessage;

pub const CSV_HEADER: &str =
    "weight,trials,accept_unchanged,accept_forged,reject_decode_fail,reject_auth_fail,reject_residue";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrialClass {
    AcceptUnchanged,
    AcceptForged,
    Reject(RejectReason),
}

impl TrialClass {
    pub fn of(verdict: &QVerdict, sent: &QuantumMessage) -> Self {
        match verdict {
            QVerdict::Accept(out) if out == sent => TrialClass::AcceptUnchanged,
            QVerdict::Accept(_) => TrialClass::AcceptForged,
            QVerdict::Reject(r) => TrialClass::Reject(*r),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub attack_weight: usize,
    pub trials: usize,
    pub accept_unchanged: usize,
    pub accept_forged: usize,
    pub reject_decode_fail: usize,
    pub reject_auth_fail: usize,
    pub reject_residue: usize,
}

impl ExperimentRecord {
    pub fn new(attack_weight: usize) -> Self {
        Self { attack_weight, ..Default::default() }
    }

    pub fn add(&mut self, class: TrialClass) {
        self.trials += 1;
        match class {
            TrialClass::AcceptUnchanged => self.accept_unchanged += 1,
            TrialClass::AcceptForged => self.accept_forged += 1,
            TrialClass::Reject(RejectReason::DecodeFailure) => self.reject_decode_fail += 1,
            TrialClass::Reject(RejectReason::AuthCheckFailed) => self.reject_auth_fail += 1,
            TrialClass::Reject(RejectReason::ResidueNonzero) => self.reject_residue += 1,
        }
    }

    pub fn counts_consistent(&self) -> bool {
        self.accept_unchanged
            + self.accept_forged
            + self.reject_decode_fail
            + self.reject_auth_fail
            + self.reject_residue
            == self.trials
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.attack_weight,
            self.trials,
            self.accept_unchanged,
            self.accept_forged,
            self.reject_decode_fail,
            self.reject_auth_fail,
            self.reject_residue
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMessage {
    /// Equal superposition over all `2^k` strings.
    Uniform,
    /// A fresh random superposition per trial.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackSet {
    /// Every attack vector of each weight, once.
    Exhaustive,
    /// This many uniformly random attack vectors per weight.
    Sampled(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub wmin: usize,
    pub wmax: usize,
    pub attacks: AttackSet,
    pub message: SweepMessage,
    pub seed: u64,
}

/// One attack and what it led to.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub weight: usize,
    pub message: QuantumMessage,
    pub e: BitVector,
    pub d: BitVector,
    pub verdict: QVerdict,
    pub class: TrialClass,
}

/// All `n`-bit vectors of weight `w`, in lexicographic order of their support.
pub fn vectors_of_weight(n: usize, w: usize) -> Vec<BitVector> {
    let mut out = Vec::new();
    if w > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        let mut v = BitVector::zeros(n);
        for &i in &idx {
            v.set(i, true);
        }
        out.push(v);
        // advance to the next combination
        let Some(pos) = (0..w).rev().find(|&p| idx[p] < n - w + p) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..w {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// Independent stream per (weight, trial) so results do not depend on scheduling.
fn trial_rng(seed: u64, weight: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((weight as u64) << 40) | trial as u64);
    rng
}

fn run_trial(
    sk: &SenderKey,
    priv_key: &PrivateKey,
    cfg: &SweepConfig,
    weight: usize,
    trial: usize,
    d: Option<&BitVector>,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(cfg.seed, weight, trial);
    let d = match d {
        Some(d) => d.clone(),
        None => BitVector::random_of_weight(sk.n(), weight, &mut rng),
    };
    let message = match cfg.message {
        SweepMessage::Uniform => QuantumMessage::uniform(sk.k()),
        SweepMessage::Random => {
            let support = rand::Rng::gen_range(&mut rng, 1..=1usize << sk.k());
            QuantumMessage::random(sk.k(), support, &mut rng)
        }
    };
    let e = sk.policy.draw(sk.n(), sk.t, &mut rng);
    let mut ts = q_encode_with_error(&message, sk, &e)?;
    channel_tamper(&mut ts, &d)?;
    let verdict = q_decode(&ts, priv_key, &mut rng)?;
    let class = TrialClass::of(&verdict, &message);
    Ok(TrialOutcome { weight, message, e, d, verdict, class })
}

/// Runs every trial of the sweep, ordered by weight then trial index.
pub fn sweep_trials(sk: &SenderKey, priv_key: &PrivateKey, cfg: &SweepConfig) -> Result<Vec<TrialOutcome>> {
    if cfg.wmin > cfg.wmax || cfg.wmax > sk.n() {
        return Err(Error::Param(format!("weights {}..={} invalid for n = {}", cfg.wmin, cfg.wmax, sk.n())));
    }
    if sk.k() >= 24 {
        return Err(Error::Param(format!("k = {} too large to simulate", sk.k())));
    }
    let mut jobs: Vec<(usize, usize, Option<BitVector>)> = Vec::new();
    for w in cfg.wmin..=cfg.wmax {
        match cfg.attacks {
            AttackSet::Exhaustive => {
                jobs.extend(vectors_of_weight(sk.n(), w).into_iter().enumerate().map(|(i, d)| (w, i, Some(d))))
            }
            AttackSet::Sampled(trials) => jobs.extend((0..trials).map(|i| (w, i, None))),
        }
    }
    jobs.par_iter().map(|(w, i, d)| run_trial(sk, priv_key, cfg, *w, *i, d.as_ref())).collect()
}

pub fn summarize(cfg: &SweepConfig, outcomes: &[TrialOutcome]) -> Vec<ExperimentRecord> {
    let mut records: Vec<ExperimentRecord> = (cfg.wmin..=cfg.wmax).map(ExperimentRecord::new).collect();
    for o in outcomes {
        records[o.weight - cfg.wmin].add(o.class);
    }
    records
}

pub fn attack_sweep(sk: &SenderKey, priv_key: &PrivateKey, cfg: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    Ok(summarize(cfg, &sweep_trials(sk, priv_key, cfg)?))
}

pub fn to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::{keygen, sender_key, Mode, SchemeParams};

    fn setup() -> (SenderKey, PrivateKey) {
        let (pk, sk) = keygen(&SchemeParams::toy16(Mode::PublicIntegrity), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        (sender_key(&pk, None).unwrap(), sk)
    }

    #[test]
    fn weight_enumeration_counts() {
        for (n, w, count) in [(16, 0, 1), (16, 1, 16), (16, 2, 120), (16, 3, 560), (5, 5, 1), (4, 5, 0)] {
            let vs = vectors_of_weight(n, w);
            assert_eq!(vs.len(), count);
            assert!(vs.iter().all(|v| v.weight() == w));
            let distinct: std::collections::HashSet<_> = vs.iter().collect();
            assert_eq!(distinct.len(), count);
        }
    }

    #[test]
    fn weight_zero_always_accepts_unchanged() {
        let (snd, sk) = setup();
        let cfg =
            SweepConfig { wmin: 0, wmax: 0, attacks: AttackSet::Sampled(40), message: SweepMessage::Random, seed: 1 };
        let recs = attack_sweep(&snd, &sk, &cfg).unwrap();
        assert_eq!(
            recs,
            vec![ExperimentRecord { attack_weight: 0, trials: 40, accept_unchanged: 40, ..Default::default() }]
        );
    }

    #[test]
    fn sweep_is_deterministic_and_consistent() {
        let (snd, sk) = setup();
        let cfg =
            SweepConfig { wmin: 0, wmax: 4, attacks: AttackSet::Sampled(30), message: SweepMessage::Uniform, seed: 9 };
        let a = attack_sweep(&snd, &sk, &cfg).unwrap();
        let b = attack_sweep(&snd, &sk, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(ExperimentRecord::counts_consistent));
        assert!(a.iter().all(|r| r.trials == 30));
        let csv = to_csv(&a);
        assert_eq!(csv.lines().next(), Some(CSV_HEADER));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn bad_weight_range() {
        let (snd, sk) = setup();
        let cfg =
            SweepConfig { wmin: 3, wmax: 2, attacks: AttackSet::Exhaustive, message: SweepMessage::Uniform, seed: 0 };
        assert!(matches!(attack_sweep(&snd, &sk, &cfg), Err(Error::Param(_))));
    }
}
