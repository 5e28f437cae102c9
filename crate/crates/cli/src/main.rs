//! `qma`: key generation, classical and quantum encode/decode, and attack sweeps.
//!
//! Exit status is 0 on success or Accept, 2 on a protocol Reject, 1 on any
//! usage, parse or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qma_core::classical::{c_decode, c_encode, ClassicalCiphertext, DecodeVerdict};
use qma_core::experiment::{attack_sweep, to_csv, AttackSet, SweepConfig, SweepMessage};
use qma_core::gf2::BitVector;
use qma_core::keys::{
    keygen, sender_key, shared_from_text, shared_to_text, ErrorWeightPolicy, Mode, PrivateKey, PublicKey, SchemeParams,
    SenderKey,
};
use qma_core::protocol::{channel_tamper, q_decode, q_encode, QVerdict, TransmittedState};
use qma_core::qsim::{QState, QuantumMessage};

#[derive(Parser, Debug)]
#[command(name = "qma", version, about = "Quantum message authentication with SN-S pre-coding and a Goppa trapdoor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key pair: <prefix>.pub, <prefix>.priv and, in hybrid mode, <prefix>.shared
    Keygen {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Classically encode a k-bit hex message with the public key
    Encode {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        message: String,
        #[arg(long, default_value = "exact")]
        policy: ErrorWeightPolicy,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Classically decode an n-bit hex word with the private key
    Decode {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        ciphertext: String,
    },
    /// Encode a quantum message into a state file
    QEncode {
        #[command(flatten)]
        key: KeyArg,
        #[command(flatten)]
        message: MessageArgs,
        #[arg(long, default_value = "exact")]
        policy: ErrorWeightPolicy,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a state file, optionally flipping payload bits first
    QDecode {
        #[command(flatten)]
        key: KeyArg,
        #[arg(long)]
        state: PathBuf,
        /// n-bit hex vector XORed onto the payload register before decoding
        #[arg(long)]
        tamper: Option<String>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Encode, optionally tamper, decode, and report the verdict
    QRoundtrip {
        #[command(flatten)]
        key: KeyArg,
        #[command(flatten)]
        message: MessageArgs,
        #[arg(long)]
        tamper: Option<String>,
        #[arg(long, default_value = "exact")]
        policy: ErrorWeightPolicy,
        /// Write <prefix>.encoded.state and <prefix>.received.state
        #[arg(long, value_name = "PREFIX")]
        emit_states: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Constant bit-flip attacks per weight, tallied as CSV
    AttackSweep {
        /// Key prefix; without it a fresh key is generated from the parameters and seed
        #[arg(long)]
        key: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        wmin: usize,
        #[arg(long)]
        wmax: usize,
        /// Random attacks per weight
        #[arg(long, conflicts_with = "exhaustive", required_unless_present = "exhaustive")]
        trials: Option<usize>,
        /// Every attack vector of each weight
        #[arg(long)]
        exhaustive: bool,
        /// Send the uniform superposition instead of a fresh random one per trial.
        /// Shifts of the uniform state are invisible, so forgeries count as unchanged.
        #[arg(long)]
        uniform_message: bool,
        #[arg(long, default_value = "exact")]
        policy: ErrorWeightPolicy,
        #[command(flatten)]
        seed: SeedArg,
        /// CSV destination; stdout if absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long, default_value_t = 4)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value = "public-integrity")]
    mode: Mode,
}

impl ParamArgs {
    fn params(&self) -> Result<SchemeParams> {
        Ok(SchemeParams::new(self.m, self.t, self.k, self.mode)?)
    }
}

#[derive(Args, Debug)]
struct SeedArg {
    #[arg(long, env = "QMA_SEED", default_value_t = 0)]
    seed: u64,
}

impl SeedArg {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Args, Debug)]
struct KeyArg {
    /// Key file prefix as written by `keygen`
    #[arg(long = "key")]
    prefix: PathBuf,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct MessageArgs {
    /// Amplitudes as `hex:re[:im],...`; normalized automatically
    #[arg(long)]
    message: Option<String>,
    /// Equal superposition over all 2^k strings
    #[arg(long)]
    uniform: bool,
}

impl MessageArgs {
    fn message(&self, k: usize) -> Result<QuantumMessage> {
        match &self.message {
            Some(spec) => parse_message(k, spec),
            None => Ok(QuantumMessage::uniform(k)),
        }
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_sender(prefix: &Path, policy: ErrorWeightPolicy) -> Result<SenderKey> {
    let pk = PublicKey::from_text(&read(&with_ext(prefix, "pub"))?).context("parsing public key")?;
    let shared = match pk.mode {
        Mode::HybridAuth => Some(shared_from_text(&read(&with_ext(prefix, "shared"))?).context("parsing shared key")?),
        Mode::PublicIntegrity => None,
    };
    Ok(sender_key(&pk, shared.as_ref())?.with_policy(policy))
}

fn load_private(prefix: &Path) -> Result<PrivateKey> {
    PrivateKey::from_text(&read(&with_ext(prefix, "priv"))?).context("parsing private key")
}

fn parse_float(s: &str) -> Result<f64> {
    s.trim().parse().with_context(|| format!("bad amplitude component {s:?}"))
}

/// `hex:re[:im],...` → normalized message.
fn parse_message(k: usize, spec: &str) -> Result<QuantumMessage> {
    let mut amps = Vec::new();
    for term in spec.split(',') {
        let parts: Vec<&str> = term.trim().split(':').collect();
        let (hex, re, im) = match parts.as_slice() {
            [hex, re] => (*hex, parse_float(re)?, 0.0),
            [hex, re, im] => (*hex, parse_float(re)?, parse_float(im)?),
            _ => bail!("bad message term {term:?}; expected hex:re[:im]"),
        };
        let m = BitVector::from_hex(k, hex).with_context(|| format!("bad basis string {hex:?} for k = {k}"))?;
        amps.push((m, Complex64::new(re, im)));
    }
    let norm = amps.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        bail!("message amplitudes have zero or non-finite norm");
    }
    Ok(QuantumMessage::new(k, amps.into_iter().map(|(m, a)| (m, a / norm)))?)
}

fn parse_vector(n: usize, hex: &str) -> Result<BitVector> {
    BitVector::from_hex(n, hex).with_context(|| format!("bad {n}-bit hex vector {hex:?}"))
}

fn print_message(msg: &QuantumMessage) {
    for (m, a) in msg.amplitudes() {
        println!("{} {:?} {:?}", m.to_hex(), a.re, a.im);
    }
}

/// Prints the verdict; `true` on Accept.
fn report(v: &QVerdict) -> bool {
    match v {
        QVerdict::Accept(msg) => {
            println!("ACCEPT");
            print_message(msg);
            true
        }
        QVerdict::Reject(r) => {
            println!("REJECT {r}");
            false
        }
    }
}

enum Outcome {
    Done,
    Rejected,
}

fn accepted(ok: bool) -> Outcome {
    if ok {
        Outcome::Done
    } else {
        Outcome::Rejected
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Keygen { params, seed, out_prefix } => {
            let params = params.params()?;
            let (pk, sk) = keygen(&params, &mut seed.rng())?;
            write(&with_ext(&out_prefix, "pub"), &pk.to_text())?;
            write(&with_ext(&out_prefix, "priv"), &sk.to_text())?;
            if params.mode == Mode::HybridAuth {
                write(&with_ext(&out_prefix, "shared"), &shared_to_text(&params, &sk.sns))?;
            }
            Ok(Outcome::Done)
        }
        Command::Encode { key, message, policy, seed } => {
            let snd = load_sender(&key.prefix, policy)?;
            let s = parse_vector(snd.k(), &message)?;
            let (ct, _) = c_encode(&s, &snd, &mut seed.rng())?;
            println!("{}", ct.word.to_hex());
            Ok(Outcome::Done)
        }
        Command::Decode { key, ciphertext } => {
            let sk = load_private(&key.prefix)?;
            let ct = ClassicalCiphertext { word: parse_vector(sk.n(), &ciphertext)? };
            match c_decode(&ct, &sk)? {
                DecodeVerdict::Accept(s) => {
                    println!("ACCEPT {}", s.to_hex());
                    Ok(Outcome::Done)
                }
                DecodeVerdict::Reject(r) => {
                    println!("REJECT {r}");
                    Ok(Outcome::Rejected)
                }
            }
        }
        Command::QEncode { key, message, policy, seed, out } => {
            let snd = load_sender(&key.prefix, policy)?;
            let ts = q_encode(&message.message(snd.k())?, &snd, &mut seed.rng())?;
            write(&out, &ts.state.to_text())?;
            Ok(Outcome::Done)
        }
        Command::QDecode { key, state, tamper, seed } => {
            let sk = load_private(&key.prefix)?;
            let state = QState::from_text(&read(&state)?).context("parsing state file")?;
            let mut ts = TransmittedState { state, e_used: None };
            if let Some(d) = tamper {
                channel_tamper(&mut ts, &parse_vector(sk.n(), &d)?)?;
            }
            Ok(accepted(report(&q_decode(&ts, &sk, &mut seed.rng())?)))
        }
        Command::QRoundtrip { key, message, tamper, policy, emit_states, seed } => {
            let snd = load_sender(&key.prefix, policy)?;
            let sk = load_private(&key.prefix)?;
            let msg = message.message(snd.k())?;
            let d = match tamper {
                Some(d) => parse_vector(snd.n(), &d)?,
                None => BitVector::zeros(snd.n()),
            };
            let mut rng = seed.rng();
            let mut ts = q_encode(&msg, &snd, &mut rng)?;
            if let Some(prefix) = &emit_states {
                write(&with_ext(prefix, "encoded.state"), &ts.state.to_text())?;
            }
            channel_tamper(&mut ts, &d)?;
            if let Some(prefix) = &emit_states {
                write(&with_ext(prefix, "received.state"), &ts.state.to_text())?;
            }
            Ok(accepted(report(&q_decode(&ts, &sk, &mut rng)?)))
        }
        Command::AttackSweep { key, params, wmin, wmax, trials, exhaustive, uniform_message, policy, seed, out } => {
            let (snd, sk) = match key {
                Some(prefix) => (load_sender(&prefix, policy)?, load_private(&prefix)?),
                None => {
                    let (pk, sk) = keygen(&params.params()?, &mut seed.rng())?;
                    let shared = (sk.mode == Mode::HybridAuth).then_some(&sk.sns);
                    (sender_key(&pk, shared)?.with_policy(policy), sk)
                }
            };
            let attacks = match trials {
                Some(n) if !exhaustive => AttackSet::Sampled(n),
                _ => AttackSet::Exhaustive,
            };
            let message = if uniform_message { SweepMessage::Uniform } else { SweepMessage::Random };
            let cfg = SweepConfig { wmin, wmax, attacks, message, seed: seed.seed };
            let csv = to_csv(&attack_sweep(&snd, &sk, &cfg)?);
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
