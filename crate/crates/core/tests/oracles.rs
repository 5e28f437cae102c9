//! Pipelines checked against the brute-force oracles in `common`.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{low_weight_vectors, naive_syndrome, oracle_verdict, shifted, CosetTable, OracleVerdict};
use qma_core::classical::{c_decode, c_encode_with_error, DecodeVerdict};
use qma_core::experiment::{summarize, sweep_trials, AttackSet, SweepConfig, SweepMessage, TrialClass};
use qma_core::gf2::BitVector;
use qma_core::keys::{keygen, sender_key, Mode, PrivateKey, SchemeParams, SenderKey};
use qma_core::protocol::{channel_tamper, q_decode, q_encode_with_error, QVerdict};
use qma_core::qsim::QuantumMessage;

fn keys(seed: u64, mode: Mode) -> (SenderKey, PrivateKey) {
    let (pk, sk) = keygen(&SchemeParams::toy16(mode), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    let shared = (mode == Mode::HybridAuth).then_some(&sk.sns);
    (sender_key(&pk, shared).unwrap(), sk)
}

#[test]
fn syndromes_match_naive_parity_sums() {
    let (_, sk) = keys(11, Mode::PublicIntegrity);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let y = BitVector::random(16, &mut rng);
        assert_eq!(sk.code.syndrome(&y).unwrap().bits(), &naive_syndrome(sk.code.parity_check(), &y));
    }
}

#[test]
fn classical_tamper_matches_oracle() {
    for (seed, mode) in [(12, Mode::PublicIntegrity), (13, Mode::HybridAuth)] {
        let (snd, sk) = keys(seed, mode);
        let table = CosetTable::build(&sk.code);
        assert_eq!(table.len(), 137);
        let masks = low_weight_vectors(16, 2);
        let mut forged = 0;
        for (i, d) in low_weight_vectors(16, 3).iter().enumerate() {
            let e = &masks[(i * 31) % masks.len()];
            let s = BitVector::from_u64(4, (i % 16) as u64);
            let mut ct = c_encode_with_error(&s, &snd, e).unwrap();
            ct.word.xor_assign(d);
            let got = c_decode(&ct, &sk).unwrap();
            match oracle_verdict(&sk, &table, e, d) {
                OracleVerdict::Reject(r) => assert_eq!(got, DecodeVerdict::Reject(r), "d = {d}"),
                OracleVerdict::Accept { shift } => {
                    forged += usize::from(!shift.is_zero());
                    assert_eq!(got, DecodeVerdict::Accept(s.xor(&shift)), "d = {d}");
                }
            }
        }
        // weight ≤ 3 attacks do get through sometimes; the oracle says which
        assert!(forged > 0, "seed {seed}: expected some forgeries");
    }
}

#[test]
fn quantum_tamper_on_basis_states_matches_classical() {
    let (snd, sk) = keys(14, Mode::HybridAuth);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let masks = low_weight_vectors(16, 2);
    for (i, d) in low_weight_vectors(16, 3).iter().enumerate().step_by(3) {
        let e = &masks[(i * 17) % masks.len()];
        let s = BitVector::from_u64(4, (i % 16) as u64);
        let mut ts = q_encode_with_error(&QuantumMessage::basis(s.clone()), &snd, e).unwrap();
        channel_tamper(&mut ts, d).unwrap();
        let q = q_decode(&ts, &sk, &mut rng).unwrap();
        let mut ct = c_encode_with_error(&s, &snd, e).unwrap();
        ct.word.xor_assign(d);
        match c_decode(&ct, &sk).unwrap() {
            DecodeVerdict::Accept(out) => assert_eq!(q, QVerdict::Accept(QuantumMessage::basis(out))),
            DecodeVerdict::Reject(r) => assert_eq!(q, QVerdict::Reject(r)),
        }
    }
}

#[test]
fn sweep_outcomes_match_oracle() {
    let (snd, sk) = keys(15, Mode::PublicIntegrity);
    let table = CosetTable::build(&sk.code);
    let cfg = SweepConfig { wmin: 1, wmax: 3, attacks: AttackSet::Exhaustive, message: SweepMessage::Random, seed: 5 };
    let outcomes = sweep_trials(&snd, &sk, &cfg).unwrap();
    assert_eq!(outcomes.len(), 16 + 120 + 560);
    for o in &outcomes {
        assert_eq!(o.d.weight(), o.weight);
        let class = match oracle_verdict(&sk, &table, &o.e, &o.d) {
            OracleVerdict::Reject(r) => TrialClass::Reject(r),
            OracleVerdict::Accept { shift } => {
                let expected = shifted(&o.message, &shift);
                assert_eq!(o.verdict, QVerdict::Accept(expected.clone()));
                if expected == o.message {
                    TrialClass::AcceptUnchanged
                } else {
                    TrialClass::AcceptForged
                }
            }
        };
        assert_eq!(o.class, class, "d = {}, e = {}", o.d, o.e);
    }
    let records = summarize(&cfg, &outcomes);
    assert_eq!(records.iter().map(|r| r.trials).collect::<Vec<_>>(), vec![16, 120, 560]);
    assert!(records.iter().all(|r| r.counts_consistent()));
}
