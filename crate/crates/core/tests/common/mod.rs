//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the syndrome decoder or the protocol pipelines.

#![allow(dead_code)]

use std::collections::HashMap;

use num_complex::Complex64;
use qma_core::classical::RejectReason;
use qma_core::gf2::{BitMatrix, BitVector};
use qma_core::goppa::GoppaCode;
use qma_core::keys::PrivateKey;
use qma_core::qsim::QuantumMessage;

/// Every vector of length `n` and weight at most `t`, by weight then support order.
pub fn low_weight_vectors(n: usize, t: usize) -> Vec<BitVector> {
    let mut out = Vec::new();
    fn rec(n: usize, left: usize, start: usize, cur: &mut BitVector, out: &mut Vec<BitVector>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.set(i, true);
            rec(n, left - 1, i + 1, cur, out);
            cur.set(i, false);
        }
    }
    for w in 0..=t {
        rec(n, w, 0, &mut BitVector::zeros(n), &mut out);
    }
    out
}

/// Binary syndrome by explicit row-by-row parity sums over the parity check.
pub fn naive_syndrome(h: &BitMatrix, y: &BitVector) -> BitVector {
    let mut s = BitVector::zeros(h.rows());
    for r in 0..h.rows() {
        let mut acc = false;
        for c in 0..h.cols() {
            acc ^= h.get(r, c) & y.get(c);
        }
        s.set(r, acc);
    }
    s
}

/// Syndrome → unique coset leader of weight at most `t`.
pub struct CosetTable {
    h: BitMatrix,
    leaders: HashMap<BitVector, BitVector>,
}

impl CosetTable {
    pub fn build(code: &GoppaCode) -> Self {
        let h = code.parity_check().clone();
        let mut leaders = HashMap::new();
        for e in low_weight_vectors(code.n(), code.t()) {
            let s = naive_syndrome(&h, &e);
            assert!(leaders.insert(s, e).is_none(), "two low-weight vectors share a syndrome");
        }
        CosetTable { h, leaders }
    }

    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn leader_of_syndrome(&self, s: &BitVector) -> Option<&BitVector> {
        self.leaders.get(s)
    }

    pub fn leader_of_word(&self, y: &BitVector) -> Option<&BitVector> {
        self.leaders.get(&naive_syndrome(&self.h, y))
    }
}

/// What the receiver must conclude for a constant-XOR attack `d` on a
/// transmission masked with `e`.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleVerdict {
    Reject(RejectReason),
    /// Accepted; each message `m` comes back as `m ⊕ shift`.
    Accept {
        shift: BitVector,
    },
}

pub fn oracle_verdict(key: &PrivateKey, table: &CosetTable, e: &BitVector, d: &BitVector) -> OracleVerdict {
    let total = key.p_inv.apply(&e.xor(d)).unwrap();
    let Some(leader) = table.leader_of_word(&total) else {
        return OracleVerdict::Reject(RejectReason::DecodeFailure);
    };
    let residual = total.xor(leader);
    // residual is a Goppa codeword u·G; recover u by brute force over all messages
    let g = key.code.generator();
    let u = (0..1u64 << g.rows())
        .map(|u| BitVector::from_u64(g.rows(), u))
        .find(|u| g.vec_mul(u).unwrap() == residual)
        .expect("residual is a codeword");
    let delta = key.s_inv.vec_mul(&u).unwrap();
    let k = key.sns.k();
    // δ must lie in the row space of G_s: δ = δ[0..k]·G_s
    let prefix = delta.slice(0, k);
    if key.sns.gs().vec_mul(&prefix).unwrap() != delta {
        return OracleVerdict::Reject(RejectReason::AuthCheckFailed);
    }
    OracleVerdict::Accept { shift: prefix }
}

pub fn shifted(msg: &QuantumMessage, shift: &BitVector) -> QuantumMessage {
    QuantumMessage::new(msg.k(), msg.amplitudes().iter().map(|(m, &a): (&BitVector, &Complex64)| (m.xor(shift), a)))
        .unwrap()
}
