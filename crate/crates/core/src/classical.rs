//! Classical encode/decode: `word = s·G_s·G' ⊕ r`, and its inversion
//! through the trapdoor followed by the pre-code check.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::goppa::Syndrome;
use crate::keys::{PrivateKey, SenderKey};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCiphertext {
    pub word: BitVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    /// The received syndrome has no coset leader of weight at most `t`.
    DecodeFailure,
    /// The recovered pre-codeword fails `x·H_sᵀ = 0`.
    AuthCheckFailed,
    /// An ancilla register that should have been uncomputed is not zero.
    ResidueNonzero,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::DecodeFailure => "decode-failure",
            RejectReason::AuthCheckFailed => "auth-check-failed",
            RejectReason::ResidueNonzero => "residue-nonzero",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeVerdict {
    Accept(BitVector),
    Reject(RejectReason),
}

impl DecodeVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, DecodeVerdict::Accept(_))
    }
}

/// Encodes with a fresh error vector drawn per the sender's policy. The
/// error is returned for inspection only; it is not part of the ciphertext.
pub fn c_encode<R: Rng + ?Sized>(
    s: &BitVector,
    sk: &SenderKey,
    rng: &mut R,
) -> Result<(ClassicalCiphertext, BitVector)> {
    if s.len() != sk.k() {
        return Err(Error::dim(format!("message of length {}, key expects k = {}", s.len(), sk.k())));
    }
    let r = sk.policy.draw(sk.n(), sk.t, rng);
    let ct = c_encode_with_error(s, sk, &r)?;
    Ok((ct, r))
}

/// Encodes with a caller-chosen error vector.
pub fn c_encode_with_error(s: &BitVector, sk: &SenderKey, r: &BitVector) -> Result<ClassicalCiphertext> {
    if r.len() != sk.n() {
        return Err(Error::dim(format!("error of length {}, key expects n = {}", r.len(), sk.n())));
    }
    let x = sk.sns.encode(s)?;
    let mut word = sk.gp.vec_mul(&x)?;
    word.xor_assign(r);
    Ok(ClassicalCiphertext { word })
}

pub fn c_decode(ct: &ClassicalCiphertext, priv_key: &PrivateKey) -> Result<DecodeVerdict> {
    let y = priv_key.p_inv.apply(&ct.word)?;
    let syndrome: Syndrome = priv_key.code.syndrome(&y)?;
    let e = match priv_key.code.decode_syndrome(&syndrome) {
        Ok(e) => e,
        Err(Error::DecodeFailure) => return Ok(DecodeVerdict::Reject(RejectReason::DecodeFailure)),
        Err(other) => return Err(other),
    };
    let codeword = y.xor(&e);
    let u = priv_key.code.generator_inv().vec_mul(&codeword)?;
    let x = priv_key.s_inv.vec_mul(&u)?;
    if priv_key.sns.verify(&x)? {
        Ok(DecodeVerdict::Accept(priv_key.sns.recover(&x)?))
    } else {
        Ok(DecodeVerdict::Reject(RejectReason::AuthCheckFailed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;
    use crate::keys::{keygen, sender_key, ErrorWeightPolicy, Mode, SchemeParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(seed: u64) -> (SenderKey, PrivateKey) {
        let (pk, sk) =
            keygen(&SchemeParams::toy16(Mode::PublicIntegrity), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        (sender_key(&pk, None).unwrap(), sk)
    }

    #[test]
    fn zero_message_zero_error() {
        let (snd, sk) = setup(1);
        let ct = c_encode_with_error(&BitVector::zeros(4), &snd, &BitVector::zeros(16)).unwrap();
        assert!(ct.word.is_zero());
        assert_eq!(c_decode(&ct, &sk).unwrap(), DecodeVerdict::Accept(BitVector::zeros(4)));
    }

    #[test]
    fn exactly_t_policy_weight() {
        let (snd, _) = setup(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (_, r) = c_encode(&BitVector::random(4, &mut rng), &snd, &mut rng).unwrap();
            assert_eq!(r.weight(), 2);
        }
        let snd = snd.with_policy(ErrorWeightPolicy::UpToT);
        let mut seen = [false; 3];
        for _ in 0..200 {
            let (_, r) = c_encode(&BitVector::random(4, &mut rng), &snd, &mut rng).unwrap();
            seen[r.weight()] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn unmasked_word_lies_in_encoding_rowspace() {
        let (snd, _) = setup(4);
        let gsgp: BitMatrix = snd.sns.gs().mul(&snd.gp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (ct, r) = c_encode(&BitVector::random(4, &mut rng), &snd, &mut rng).unwrap();
            assert!(gsgp.row_space_contains(&ct.word.xor(&r)));
        }
    }

    #[test]
    fn roundtrip_all_messages() {
        for seed in 0..10 {
            let (snd, sk) = setup(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            for s in 0..16 {
                let s = BitVector::from_u64(4, s);
                let (ct, _) = c_encode(&s, &snd, &mut rng).unwrap();
                assert_eq!(c_decode(&ct, &sk).unwrap(), DecodeVerdict::Accept(s));
            }
        }
    }

    #[test]
    fn permutation_preserves_error_weight() {
        let (_, sk) = setup(6);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let r = BitVector::random(16, &mut rng);
            assert_eq!(sk.p_inv.apply(&r).unwrap().weight(), r.weight());
        }
    }

    #[test]
    fn single_extra_flip_on_weight_t_error_is_rejected() {
        let (snd, sk) = setup(8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for s in 0..16 {
            let s = BitVector::from_u64(4, s);
            let (ct, r) = c_encode(&s, &snd, &mut rng).unwrap();
            for i in (0..16).filter(|&i| !r.get(i)) {
                let mut tampered = ct.clone();
                tampered.word.flip(i);
                // total error weight t + 1; a miscorrection could in principle
                // land in the pre-code, but not for this key
                let v = c_decode(&tampered, &sk).unwrap();
                assert!(!v.is_accept(), "s={s:?} flip={i} -> {v:?}");
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let (snd, _) = setup(10);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(c_encode(&BitVector::zeros(5), &snd, &mut rng), Err(Error::Dim(_))));
        assert!(matches!(c_encode_with_error(&BitVector::zeros(4), &snd, &BitVector::zeros(15)), Err(Error::Dim(_))));
    }
}
