//! Quantum authentication pipeline on the register machine.
//!
//! Encoding writes `m·G_s·G'` into register II, uncomputes register I and
//! masks with a classical error `e`. Decoding undoes `P`, measures the Goppa
//! syndrome into register III (message independent, so the superposition
//! survives), corrects, uncomputes through `G⁻`, `S⁻¹` and `G_s⁻`, measures
//! the pre-code check and finally hands back register V.

use rand::Rng;

use crate::classical::RejectReason;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::goppa::Syndrome;
use crate::keys::{PrivateKey, SenderKey};
use crate::qsim::{QState, QuantumMessage, Register, RegisterLayout};

/// What travels from sender to receiver: payload in register II, all others zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmittedState {
    pub state: QState,
    /// The masking error, kept for inspection when known. Not transmitted.
    pub e_used: Option<BitVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QVerdict {
    Accept(QuantumMessage),
    Reject(RejectReason),
}

impl QVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, QVerdict::Accept(_))
    }
}

/// Observations made while decoding; used by experiments and tests.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecodeTrace {
    /// Register III was identical across the support before the syndrome measurement.
    pub syndrome_was_constant: bool,
    pub support_before_syndrome: usize,
    pub support_after_syndrome: usize,
    pub syndrome: Option<BitVector>,
    pub correction: Option<BitVector>,
    /// Outcome of the pre-code check measurement.
    pub auth_check: Option<BitVector>,
}

pub fn layout_for(k: usize, n: usize, syndrome_len: usize, n1: usize) -> Result<RegisterLayout> {
    RegisterLayout::for_scheme(k, n, syndrome_len, n1)
}

pub fn receiver_layout(priv_key: &PrivateKey) -> Result<RegisterLayout> {
    layout_for(priv_key.k, priv_key.n(), priv_key.code.syndrome_len(), priv_key.n1())
}

pub fn sender_layout(sk: &SenderKey) -> Result<RegisterLayout> {
    let syndrome_len = sk.n() - sk.n1();
    layout_for(sk.k(), sk.n(), syndrome_len, sk.n1())
}

pub fn q_encode<R: Rng + ?Sized>(msg: &QuantumMessage, sk: &SenderKey, rng: &mut R) -> Result<TransmittedState> {
    let e = sk.policy.draw(sk.n(), sk.t, rng);
    q_encode_with_error(msg, sk, &e)
}

/// Encoding with a caller-chosen masking error.
pub fn q_encode_with_error(msg: &QuantumMessage, sk: &SenderKey, e: &BitVector) -> Result<TransmittedState> {
    let mut state = QState::from_message(msg, sender_layout(sk)?)?;
    let encode = sk.sns.gs().mul(&sk.gp)?;
    let unencode = sk.gp_inv.mul(sk.sns.gs_inv())?;
    debug_assert!(encode.mul(&unencode)?.is_identity());
    state.xor_linear(Register::I, Register::II, &encode)?;
    state.xor_linear(Register::II, Register::I, &unencode)?;
    assert_eq!(
        state.register_constant(Register::I).map(|v| v.is_zero()),
        Some(true),
        "register I not cleared by the uncompute"
    );
    state.xor_const(Register::II, e)?;
    Ok(TransmittedState { state, e_used: Some(e.clone()) })
}

/// Constant bit-flip attack on the payload register.
pub fn channel_tamper(ts: &mut TransmittedState, d: &BitVector) -> Result<()> {
    ts.state.xor_const(Register::II, d)
}

pub fn q_decode<R: Rng + ?Sized>(ts: &TransmittedState, priv_key: &PrivateKey, rng: &mut R) -> Result<QVerdict> {
    q_decode_traced(ts, priv_key, rng).map(|(v, _)| v)
}

fn measure_zero<R: Rng + ?Sized>(st: &mut QState, reg: Register, rng: &mut R) -> bool {
    st.measure_register(reg, rng).is_zero()
}

pub fn q_decode_traced<R: Rng + ?Sized>(
    ts: &TransmittedState,
    priv_key: &PrivateKey,
    rng: &mut R,
) -> Result<(QVerdict, DecodeTrace)> {
    let layout = receiver_layout(priv_key)?;
    if *ts.state.layout() != layout {
        return Err(Error::dim(format!(
            "state layout {} does not match key layout {}",
            ts.state.layout().to_header(),
            layout.to_header()
        )));
    }
    let code = &priv_key.code;
    let sns = &priv_key.sns;
    let mut st = ts.state.clone();
    let mut trace = DecodeTrace::default();
    let reject = |reason, trace| Ok((QVerdict::Reject(reason), trace));

    // (1) undo the column permutation
    st.apply_invertible(Register::II, &priv_key.p_inv.to_matrix())?;
    // (2) syndrome into III
    st.xor_linear(Register::II, Register::III, &code.parity_check().transpose())?;
    // (3) measure and reset III
    trace.syndrome_was_constant = st.register_constant(Register::III).is_some();
    trace.support_before_syndrome = st.support_size();
    let measured = st.measure_register(Register::III, rng);
    trace.support_after_syndrome = st.support_size();
    st.xor_const(Register::III, &measured)?;
    let syndrome = measured.slice(0, code.syndrome_len());
    trace.syndrome = Some(syndrome.clone());
    if syndrome.resized(measured.len()) != measured {
        return reject(RejectReason::ResidueNonzero, trace);
    }
    // (4) classical decoding of the syndrome
    let correction = match code.decode_syndrome(&Syndrome::new(syndrome)) {
        Ok(e) => e,
        Err(Error::DecodeFailure) => return reject(RejectReason::DecodeFailure, trace),
        Err(other) => return Err(other),
    };
    trace.correction = Some(correction.clone());
    // (5) correction
    st.xor_const(Register::II, &correction)?;
    // (6)-(7) copy out through G⁻, then clear II with G
    st.xor_linear(Register::II, Register::IV, code.generator_inv())?;
    st.xor_linear(Register::IV, Register::II, code.generator())?;
    if !measure_zero(&mut st, Register::II, rng) {
        return reject(RejectReason::ResidueNonzero, trace);
    }
    // (8) undo S
    st.apply_invertible(Register::IV, &priv_key.s_inv)?;
    // (9) message candidate into V
    st.xor_linear(Register::IV, Register::V, sns.gs_inv())?;
    // (10)-(11) pre-code check through III
    st.xor_linear(Register::IV, Register::III, &sns.hs().transpose())?;
    let check = st.measure_register(Register::III, rng);
    trace.auth_check = Some(check.clone());
    if !check.is_zero() {
        return reject(RejectReason::AuthCheckFailed, trace);
    }
    // (12) clear IV from V
    st.xor_linear(Register::V, Register::IV, sns.gs())?;
    if !measure_zero(&mut st, Register::IV, rng) {
        return reject(RejectReason::ResidueNonzero, trace);
    }
    // (13)
    match st.extract_amplitudes(Register::V) {
        Ok(msg) => Ok((QVerdict::Accept(msg), trace)),
        Err(Error::ResidueNonzero(_)) => reject(RejectReason::ResidueNonzero, trace),
        Err(other) => Err(other),
    }
}

/// Encode, flip `d` on the channel, decode.
pub fn q_roundtrip<R: Rng + ?Sized>(
    msg: &QuantumMessage,
    sk: &SenderKey,
    priv_key: &PrivateKey,
    d: &BitVector,
    rng: &mut R,
) -> Result<QVerdict> {
    let mut ts = q_encode(msg, sk, rng)?;
    channel_tamper(&mut ts, d)?;
    q_decode(&ts, priv_key, rng)
}
