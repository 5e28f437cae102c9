//! Key generation, key material and the text key-file format.
//!
//! The receiver holds `(S, G, P)` plus the pre-code; the published matrix is
//! `G' = S·G·P`. In public-integrity mode the pre-code is published with
//! `G'`; in hybrid mode it is a secret shared between sender and receiver.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, Permutation};
use crate::gf2m::{Field, Poly};
use crate::goppa::GoppaCode;
use crate::sns::SnsCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Pre-code published: anyone can check integrity.
    PublicIntegrity,
    /// Pre-code secret between sender and receiver: origin authentication.
    HybridAuth,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::PublicIntegrity => "public-integrity",
            Mode::HybridAuth => "hybrid-auth",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "public-integrity" | "public" => Ok(Mode::PublicIntegrity),
            "hybrid-auth" | "hybrid" => Ok(Mode::HybridAuth),
            other => Err(Error::parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// How the sender draws the masking error vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ErrorWeightPolicy {
    /// Uniform over vectors of weight exactly `t`.
    #[default]
    ExactlyT,
    /// Weight uniform in `0..=t`, then uniform among vectors of that weight.
    UpToT,
}

impl ErrorWeightPolicy {
    pub fn draw<R: Rng + ?Sized>(self, n: usize, t: usize, rng: &mut R) -> BitVector {
        let w = match self {
            ErrorWeightPolicy::ExactlyT => t,
            ErrorWeightPolicy::UpToT => rng.gen_range(0..=t),
        };
        BitVector::random_of_weight(n, w, rng)
    }
}

impl FromStr for ErrorWeightPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" | "exactly-t" => Ok(ErrorWeightPolicy::ExactlyT),
            "upto" | "up-to-t" => Ok(ErrorWeightPolicy::UpToT),
            other => Err(Error::parse(format!("unknown error weight policy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    pub m: u32,
    pub t: usize,
    pub k: usize,
    pub mode: Mode,
    pub policy: ErrorWeightPolicy,
}

impl SchemeParams {
    pub fn new(m: u32, t: usize, k: usize, mode: Mode) -> Result<Self> {
        let p = SchemeParams { m, t, k, mode, policy: ErrorWeightPolicy::default() };
        p.validate()?;
        Ok(p)
    }

    /// m = 4, t = 2, k = 4: n = 16, n₁ = 8.
    pub fn toy16(mode: Mode) -> Self {
        Self::new(4, 2, 4, mode).expect("valid preset")
    }

    /// m = 5, t = 3, k = 8: n = 32, n₁ = 17.
    pub fn demo32(mode: Mode) -> Self {
        Self::new(5, 3, 8, mode).expect("valid preset")
    }

    pub fn with_policy(mut self, policy: ErrorWeightPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn n1(&self) -> usize {
        self.n() - self.m as usize * self.t
    }

    pub fn validate(&self) -> Result<()> {
        Field::new(self.m)?;
        if self.t < 2 || self.m as usize * self.t >= self.n() {
            return Err(Error::Param(format!("t = {} invalid for m = {}", self.t, self.m)));
        }
        if self.k == 0 || self.k >= self.n1() {
            return Err(Error::Param(format!("k = {} must satisfy 1 <= k < n1 = {}", self.k, self.n1())));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub mode: Mode,
    pub m: u32,
    pub t: usize,
    pub k: usize,
    /// `S·G·P`, `n₁ × n`.
    pub gp: BitMatrix,
    /// Right inverse of `gp`, derived on construction.
    pub gp_inv: BitMatrix,
    /// Present exactly in public-integrity mode.
    pub sns: Option<SnsCode>,
}

impl PublicKey {
    fn new(mode: Mode, m: u32, t: usize, k: usize, gp: BitMatrix, sns: Option<SnsCode>) -> Result<Self> {
        let params = SchemeParams::new(m, t, k, mode)?;
        if gp.rows() != params.n1() || gp.cols() != params.n() {
            return Err(Error::dim(format!("public matrix is {}x{}", gp.rows(), gp.cols())));
        }
        if sns.is_some() != (mode == Mode::PublicIntegrity) {
            return Err(Error::ModeMismatch(format!("{mode} public key with pre-code present = {}", sns.is_some())));
        }
        if let Some(s) = &sns {
            if s.k() != k || s.n1() != params.n1() {
                return Err(Error::dim("pre-code dimensions do not match the key parameters"));
            }
        }
        let gp_inv = gp.right_inverse()?;
        Ok(PublicKey { mode, m, t, k, gp, gp_inv, sns })
    }

    pub fn n(&self) -> usize {
        self.gp.cols()
    }

    pub fn n1(&self) -> usize {
        self.gp.rows()
    }
}

#[derive(Clone, Debug)]
pub struct PrivateKey {
    pub mode: Mode,
    pub k: usize,
    pub s: BitMatrix,
    pub s_inv: BitMatrix,
    pub p: Permutation,
    pub p_inv: Permutation,
    pub code: GoppaCode,
    pub sns: SnsCode,
}

impl PrivateKey {
    fn new(mode: Mode, s: BitMatrix, code: GoppaCode, p: Permutation, sns: SnsCode) -> Result<Self> {
        let n1 = code.dimension();
        if s.rows() != n1 || s.cols() != n1 {
            return Err(Error::dim(format!("S is {}x{}, expected {n1}x{n1}", s.rows(), s.cols())));
        }
        if p.len() != code.n() {
            return Err(Error::dim(format!("P acts on {} positions, expected {}", p.len(), code.n())));
        }
        if sns.n1() != n1 {
            return Err(Error::dim(format!("pre-code length {} != n1 = {n1}", sns.n1())));
        }
        let s_inv = s.invert()?;
        let p_inv = p.inverse();
        Ok(PrivateKey { mode, k: sns.k(), s, s_inv, p, p_inv, code, sns })
    }

    pub fn params(&self) -> SchemeParams {
        SchemeParams {
            m: self.code.m(),
            t: self.code.t(),
            k: self.k,
            mode: self.mode,
            policy: ErrorWeightPolicy::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn n1(&self) -> usize {
        self.code.dimension()
    }

    /// `S·G·P` recomputed from the private parts.
    pub fn public_matrix(&self) -> BitMatrix {
        let sg = self.s.mul(self.code.generator()).expect("S matches G");
        self.p.apply_columns(&sg).expect("P matches G")
    }

    pub fn public_key(&self) -> PublicKey {
        let sns = (self.mode == Mode::PublicIntegrity).then(|| self.sns.clone());
        PublicKey::new(self.mode, self.code.m(), self.code.t(), self.k, self.public_matrix(), sns)
            .expect("private key is consistent")
    }
}

/// Everything the sender needs to encode.
#[derive(Clone, Debug)]
pub struct SenderKey {
    pub gp: BitMatrix,
    pub gp_inv: BitMatrix,
    pub t: usize,
    pub sns: SnsCode,
    pub policy: ErrorWeightPolicy,
}

impl SenderKey {
    pub fn with_policy(mut self, policy: ErrorWeightPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn k(&self) -> usize {
        self.sns.k()
    }

    pub fn n(&self) -> usize {
        self.gp.cols()
    }

    pub fn n1(&self) -> usize {
        self.gp.rows()
    }
}

/// Generates the Goppa code, `S`, `P` and the pre-code, in that order.
pub fn keygen<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> Result<(PublicKey, PrivateKey)> {
    params.validate()?;
    let code = GoppaCode::generate(params.m, params.t, rng)?;
    let n1 = code.dimension();
    let s = BitMatrix::random_invertible(n1, rng);
    let p = Permutation::random(code.n(), rng);
    let sns = SnsCode::new_random(params.k, n1, rng)?;
    let private = PrivateKey::new(params.mode, s, code, p, sns)?;
    Ok((private.public_key(), private))
}

/// Packages the public key for the sender. Hybrid keys need the shared
/// pre-code; public-integrity keys already carry theirs.
pub fn sender_key(pk: &PublicKey, shared_sns: Option<&SnsCode>) -> Result<SenderKey> {
    let sns = match (pk.mode, &pk.sns, shared_sns) {
        (Mode::PublicIntegrity, Some(sns), None) => sns.clone(),
        (Mode::HybridAuth, None, Some(sns)) => {
            if sns.k() != pk.k || sns.n1() != pk.n1() {
                return Err(Error::dim("shared pre-code does not match the public key"));
            }
            sns.clone()
        }
        (Mode::PublicIntegrity, _, Some(_)) => {
            return Err(Error::ModeMismatch("public-integrity key takes no shared pre-code".into()))
        }
        (Mode::HybridAuth, _, None) => {
            return Err(Error::ModeMismatch("hybrid-auth key needs the shared pre-code".into()))
        }
        (mode, _, _) => return Err(Error::ModeMismatch(format!("malformed {mode} public key"))),
    };
    Ok(SenderKey { gp: pk.gp.clone(), gp_inv: pk.gp_inv.clone(), t: pk.t, sns, policy: ErrorWeightPolicy::default() })
}

// ---------------------------------------------------------------------------
// key files

const MAGIC: &str = "QMA1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyFileKind {
    Public,
    Private,
    Shared,
}

impl KeyFileKind {
    fn as_str(self) -> &'static str {
        match self {
            KeyFileKind::Public => "public",
            KeyFileKind::Private => "private",
            KeyFileKind::Shared => "shared",
        }
    }
}

struct KeyFileWriter {
    out: String,
}

impl KeyFileWriter {
    fn new(kind: KeyFileKind, mode: Mode, m: u32, t: usize, k: usize) -> Self {
        let out = format!("{MAGIC} {}\nmode: {mode}\nm: {m}\nt: {t}\nk: {k}\n", kind.as_str());
        KeyFileWriter { out }
    }

    fn section(mut self, name: &str, lines: impl IntoIterator<Item = String>) -> Self {
        self.out.push_str(name);
        self.out.push_str(":\n");
        for l in lines {
            self.out.push_str(&l);
            self.out.push('\n');
        }
        self
    }

    fn finish(self) -> String {
        self.out
    }
}

const SECTIONS: [&str; 5] = ["Gp", "A", "S", "g", "P"];

struct ParsedKeyFile {
    kind: KeyFileKind,
    mode: Mode,
    m: u32,
    t: usize,
    k: usize,
    sections: BTreeMap<String, Vec<String>>,
}

impl ParsedKeyFile {
    fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| Error::parse("empty key file"))?;
        let kind = match first.strip_prefix(MAGIC).map(str::trim) {
            Some("public") => KeyFileKind::Public,
            Some("private") => KeyFileKind::Private,
            Some("shared") => KeyFileKind::Shared,
            _ => return Err(Error::parse(format!("bad key file magic line {first:?}"))),
        };
        let mut headers = BTreeMap::new();
        let mut sections: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(name) = line.strip_suffix(':').filter(|n| SECTIONS.contains(n)) {
                if sections.insert(name.to_string(), Vec::new()).is_some() {
                    return Err(Error::parse(format!("duplicate section {name}")));
                }
                current = Some(name.to_string());
                continue;
            }
            match &current {
                Some(name) => sections.get_mut(name).expect("section exists").push(line.trim().to_string()),
                None => {
                    let (key, value) =
                        line.split_once(':').ok_or_else(|| Error::parse(format!("bad header line {line:?}")))?;
                    headers.insert(key.trim().to_string(), value.trim().to_string());
                }
            }
        }
        let header = |name: &str| headers.get(name).ok_or_else(|| Error::parse(format!("missing header {name}")));
        let num = |name: &str| -> Result<usize> {
            header(name)?.parse().map_err(|e| Error::parse(format!("header {name}: {e}")))
        };
        Ok(ParsedKeyFile {
            kind,
            mode: header("mode")?.parse()?,
            m: num("m")? as u32,
            t: num("t")?,
            k: num("k")?,
            sections,
        })
    }

    fn expect_kind(&self, kind: KeyFileKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::parse(format!("expected a {} key file, got {}", kind.as_str(), self.kind.as_str())));
        }
        Ok(())
    }

    fn section(&self, name: &str) -> Result<&[String]> {
        self.sections.get(name).map(Vec::as_slice).ok_or_else(|| Error::parse(format!("missing section {name}")))
    }

    fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<BitMatrix> {
        let lines = self.section(name)?;
        if lines.len() != rows {
            return Err(Error::parse(format!("section {name} has {} rows, expected {rows}", lines.len())));
        }
        BitMatrix::from_hex_lines(cols, lines)
    }

    fn single_line(&self, name: &str) -> Result<&str> {
        match self.section(name)? {
            [line] => Ok(line),
            other => Err(Error::parse(format!("section {name} should have one line, has {}", other.len()))),
        }
    }

    fn params(&self) -> Result<SchemeParams> {
        SchemeParams::new(self.m, self.t, self.k, self.mode)
    }

    fn sns(&self) -> Result<SnsCode> {
        let p = self.params()?;
        SnsCode::from_a(self.matrix("A", p.k, p.n1() - p.k)?)
    }

    fn only_sections(&self, allowed: &[&str]) -> Result<()> {
        match self.sections.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(extra) => Err(Error::parse(format!("unexpected section {extra}"))),
            None => Ok(()),
        }
    }
}

fn permutation_line(p: &Permutation) -> String {
    p.image().iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl PublicKey {
    pub fn to_text(&self) -> String {
        let w = KeyFileWriter::new(KeyFileKind::Public, self.mode, self.m, self.t, self.k)
            .section("Gp", self.gp.to_hex_lines());
        match &self.sns {
            Some(sns) => w.section("A", sns.a().to_hex_lines()),
            None => w,
        }
        .finish()
    }

    pub fn from_text(text: &str) -> Result<PublicKey> {
        let f = ParsedKeyFile::parse(text)?;
        f.expect_kind(KeyFileKind::Public)?;
        let p = f.params()?;
        let gp = f.matrix("Gp", p.n1(), p.n())?;
        let sns = match p.mode {
            Mode::PublicIntegrity => {
                f.only_sections(&["Gp", "A"])?;
                Some(f.sns()?)
            }
            Mode::HybridAuth => {
                f.only_sections(&["Gp"])?;
                None
            }
        };
        PublicKey::new(p.mode, p.m, p.t, p.k, gp, sns)
    }
}

impl PrivateKey {
    pub fn to_text(&self) -> String {
        KeyFileWriter::new(KeyFileKind::Private, self.mode, self.code.m(), self.code.t(), self.k)
            .section("S", self.s.to_hex_lines())
            .section("g", [self.code.goppa_poly().to_text()])
            .section("P", [permutation_line(&self.p)])
            .section("A", self.sns.a().to_hex_lines())
            .finish()
    }

    pub fn from_text(text: &str) -> Result<PrivateKey> {
        let f = ParsedKeyFile::parse(text)?;
        f.expect_kind(KeyFileKind::Private)?;
        f.only_sections(&["S", "g", "P", "A"])?;
        let p = f.params()?;
        let field = Field::new(p.m)?;
        let g = Poly::from_text(f.single_line("g")?, &field)?;
        if g.degree() != Some(p.t) {
            return Err(Error::parse(format!("g has degree {:?}, expected t = {}", g.degree(), p.t)));
        }
        let code = GoppaCode::from_goppa_poly(field, g)?;
        let s = f.matrix("S", p.n1(), p.n1())?;
        let image = f
            .single_line("P")?
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|e| Error::parse(format!("bad P entry {x:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let perm = Permutation::from_image(image)?;
        PrivateKey::new(p.mode, s, code, perm, f.sns()?)
    }
}

/// Shared pre-code file, used in hybrid mode.
pub fn shared_to_text(params: &SchemeParams, sns: &SnsCode) -> String {
    KeyFileWriter::new(KeyFileKind::Shared, params.mode, params.m, params.t, params.k)
        .section("A", sns.a().to_hex_lines())
        .finish()
}

pub fn shared_from_text(text: &str) -> Result<SnsCode> {
    let f = ParsedKeyFile::parse(text)?;
    f.expect_kind(KeyFileKind::Shared)?;
    f.only_sections(&["A"])?;
    f.sns()
}
