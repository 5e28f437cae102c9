//! Sparse simulation of a five-register quantum machine.
//!
//! Every operator the protocol applies is a permutation of computational
//! basis states (affine maps over GF(2) between registers), so a state is
//! stored as a map from basis strings to amplitudes and never grows beyond
//! the support of the initial message. Measurement is the only operation
//! that touches amplitude values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Tolerance for accepting a caller-supplied message as normalized.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Register {
    I,
    II,
    III,
    IV,
    V,
}

impl Register {
    pub const ALL: [Register; 5] = [Register::I, Register::II, Register::III, Register::IV, Register::V];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["I", "II", "III", "IV", "V"][self.index()]
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Register {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Register::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| Error::parse(format!("unknown register {s:?}")))
    }
}

/// Widths of registers I..V; register I occupies the lowest bits of a basis string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    widths: [usize; 5],
}

impl RegisterLayout {
    pub fn new(widths: [usize; 5]) -> Result<Self> {
        if widths.contains(&0) {
            return Err(Error::Param(format!("register widths must be >= 1, got {widths:?}")));
        }
        Ok(Self { widths })
    }

    /// `(k, n, max(m·t, n₁ − k), n₁, k)`.
    pub fn for_scheme(k: usize, n: usize, syndrome_len: usize, n1: usize) -> Result<Self> {
        Self::new([k, n, syndrome_len.max(n1.saturating_sub(k)), n1, k])
    }

    pub fn width(&self, reg: Register) -> usize {
        self.widths[reg.index()]
    }

    pub fn offset(&self, reg: Register) -> usize {
        self.widths[..reg.index()].iter().sum()
    }

    pub fn total(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn to_header(&self) -> String {
        Register::ALL.iter().map(|&r| format!("{}={}", r.name(), self.width(r))).collect::<Vec<_>>().join(",")
    }

    pub fn from_header(s: &str) -> Result<Self> {
        let mut widths = [0usize; 5];
        let parts: Vec<_> = s.trim().split(',').collect();
        if parts.len() != 5 {
            return Err(Error::parse(format!("layout {s:?} must list five registers")));
        }
        for (reg, part) in Register::ALL.into_iter().zip(parts) {
            let (name, w) = part.split_once('=').ok_or_else(|| Error::parse(format!("bad layout entry {part:?}")))?;
            if name.trim() != reg.name() {
                return Err(Error::parse(format!("expected register {reg}, found {name:?}")));
            }
            widths[reg.index()] = w.trim().parse().map_err(|e| Error::parse(format!("bad width {w:?}: {e}")))?;
        }
        Self::new(widths)
    }
}

fn norm_sqr<'a>(amps: impl Iterator<Item = &'a Complex64>) -> f64 {
    amps.map(Complex64::norm_sqr).sum()
}

/// A pure state `Σ α_m |m⟩` over `k`-bit strings.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumMessage {
    k: usize,
    amps: BTreeMap<BitVector, Complex64>,
}

impl QuantumMessage {
    /// Zero amplitudes are dropped; the rest must be normalized within [`NORM_TOLERANCE`].
    pub fn new(k: usize, amps: impl IntoIterator<Item = (BitVector, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (m, a) in amps {
            if m.len() != k {
                return Err(Error::dim(format!("basis string of length {}, expected {k}", m.len())));
            }
            if map.insert(m.clone(), a).is_some() {
                return Err(Error::Param(format!("basis string {m} listed twice")));
            }
        }
        map.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        let norm = norm_sqr(map.values());
        if map.is_empty() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Norm(norm));
        }
        Ok(Self { k, amps: map })
    }

    pub fn basis(m: BitVector) -> Self {
        let k = m.len();
        Self { k, amps: BTreeMap::from([(m, Complex64::new(1.0, 0.0))]) }
    }

    /// Equal real amplitudes over all `2^k` strings.
    pub fn uniform(k: usize) -> Self {
        assert!(k < 32, "uniform superposition over 2^{k} strings is too large");
        let a = Complex64::new((-(k as f64) / 2.0).exp2(), 0.0);
        Self { k, amps: (0..1u64 << k).map(|m| (BitVector::from_u64(k, m), a)).collect() }
    }

    /// Random complex amplitudes on `support` distinct random strings.
    pub fn random<R: Rng + ?Sized>(k: usize, support: usize, rng: &mut R) -> Self {
        assert!(k < 32 && support >= 1 && support <= 1 << k, "bad support size");
        let raw: Vec<(BitVector, Complex64)> = rand::seq::index::sample(rng, 1 << k, support)
            .into_iter()
            .map(|m| {
                let a = loop {
                    let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    if a.norm_sqr() > 1e-6 {
                        break a;
                    }
                };
                (BitVector::from_u64(k, m as u64), a)
            })
            .collect();
        let scale = norm_sqr(raw.iter().map(|(_, a)| a)).sqrt();
        Self { k, amps: raw.into_iter().map(|(m, a)| (m, a / scale)).collect() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &BTreeMap<BitVector, Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, m: &BitVector) -> Complex64 {
        self.amps.get(m).copied().unwrap_or_default()
    }

    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(self.amps.values())
    }
}

/// A sparse state over the five-register layout.
#[derive(Clone, Debug, PartialEq)]
pub struct QState {
    layout: RegisterLayout,
    terms: BTreeMap<BitVector, Complex64>,
}

impl QState {
    /// Places the message in register I with every other register zero.
    pub fn from_message(msg: &QuantumMessage, layout: RegisterLayout) -> Result<Self> {
        if msg.k != layout.width(Register::I) {
            return Err(Error::dim(format!(
                "message of {} qubits, register I has {}",
                msg.k,
                layout.width(Register::I)
            )));
        }
        let norm = msg.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Norm(norm));
        }
        let total = layout.total();
        let terms = msg.amps.iter().map(|(m, &a)| (m.resized(total), a)).collect();
        Ok(Self { layout, terms })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn terms(&self) -> &BTreeMap<BitVector, Complex64> {
        &self.terms
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(self.terms.values())
    }

    /// Value of `reg` within a basis string of this layout.
    pub fn register_value(&self, basis: &BitVector, reg: Register) -> BitVector {
        basis.slice(self.layout.offset(reg), self.layout.width(reg))
    }

    /// `Some(v)` when `reg` holds `v` in every term of the support.
    pub fn register_constant(&self, reg: Register) -> Option<BitVector> {
        let mut values = self.terms.keys().map(|b| self.register_value(b, reg));
        let first = values.next()?;
        values.all(|v| v == first).then_some(first)
    }

    fn remap(&mut self, f: impl Fn(&BitVector) -> Result<BitVector>) -> Result<()> {
        let mut next = BTreeMap::new();
        for (basis, amp) in std::mem::take(&mut self.terms) {
            let image = f(&basis)?;
            let clash = next.insert(image, amp);
            debug_assert!(clash.is_none(), "basis map is not injective");
        }
        self.terms = next;
        Ok(())
    }

    /// `|u⟩_src |v⟩_dst → |u⟩_src |v ⊕ u·M⟩_dst`. `M` may be narrower than
    /// `dst`, in which case it writes the low bits of `dst`.
    pub fn xor_linear(&mut self, src: Register, dst: Register, m: &BitMatrix) -> Result<()> {
        if src == dst {
            return Err(Error::SameRegister);
        }
        let (ws, wd) = (self.layout.width(src), self.layout.width(dst));
        if m.rows() != ws || m.cols() > wd {
            return Err(Error::dim(format!(
                "{}x{} matrix from register {src} (width {ws}) into {dst} (width {wd})",
                m.rows(),
                m.cols()
            )));
        }
        let dst_off = self.layout.offset(dst);
        let layout = self.layout;
        self.remap(|basis| {
            let u = basis.slice(layout.offset(src), ws);
            let mut out = basis.clone();
            out.xor_at(dst_off, &m.vec_mul(&u)?);
            Ok(out)
        })
    }

    /// Flips the bits of `reg` selected by `c` in every term.
    pub fn xor_const(&mut self, reg: Register, c: &BitVector) -> Result<()> {
        if c.len() != self.layout.width(reg) {
            return Err(Error::dim(format!(
                "{}-bit constant for register {reg} of width {}",
                c.len(),
                self.layout.width(reg)
            )));
        }
        let off = self.layout.offset(reg);
        self.remap(|basis| {
            let mut out = basis.clone();
            out.xor_at(off, c);
            Ok(out)
        })
    }

    /// In-place `v → v·M` on `reg` for an invertible `M`.
    pub fn apply_invertible(&mut self, reg: Register, m: &BitMatrix) -> Result<()> {
        let w = self.layout.width(reg);
        if m.rows() != w || m.cols() != w {
            return Err(Error::dim(format!("{}x{} matrix on register {reg} of width {w}", m.rows(), m.cols())));
        }
        if m.rank() != w {
            return Err(Error::Singular);
        }
        let off = self.layout.offset(reg);
        self.remap(|basis| {
            let v = basis.slice(off, w);
            let mut out = basis.clone();
            out.xor_at(off, &v.xor(&m.vec_mul(&v)?));
            Ok(out)
        })
    }

    /// Projective measurement of `reg` in the computational basis.
    ///
    /// When every term already agrees on `reg` the state is left untouched,
    /// amplitudes included.
    pub fn measure_register<R: Rng + ?Sized>(&mut self, reg: Register, rng: &mut R) -> BitVector {
        let mut weights: BTreeMap<BitVector, f64> = BTreeMap::new();
        for (basis, amp) in &self.terms {
            *weights.entry(self.register_value(basis, reg)).or_default() += amp.norm_sqr();
        }
        if weights.len() == 1 {
            return weights.into_keys().next().expect("one outcome");
        }
        let total: f64 = weights.values().sum();
        let mut draw = rng.gen::<f64>() * total;
        let last = weights.keys().next_back().cloned().expect("nonempty state");
        let outcome = weights
            .iter()
            .find(|(_, &p)| {
                draw -= p;
                draw < 0.0
            })
            .map_or(last, |(o, _)| o.clone());
        let layout = self.layout;
        self.terms.retain(|basis, _| basis.slice(layout.offset(reg), layout.width(reg)) == outcome);
        let scale = self.norm_sqr().sqrt();
        for amp in self.terms.values_mut() {
            *amp /= scale;
        }
        outcome
    }

    /// Amplitudes of `reg`, provided every other register is zero in every term.
    pub fn extract_amplitudes(&self, reg: Register) -> Result<QuantumMessage> {
        for other in Register::ALL.into_iter().filter(|&r| r != reg) {
            if self.terms.keys().any(|b| !self.register_value(b, other).is_zero()) {
                return Err(Error::ResidueNonzero(other.name().to_string()));
            }
        }
        QuantumMessage::new(self.layout.width(reg), self.terms.iter().map(|(b, &a)| (self.register_value(b, reg), a)))
    }

    /// `QMASTATE1` text form, one `<basis-hex> <re> <im>` line per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("QMASTATE1\nlayout: {}\n", self.layout.to_header());
        for (basis, amp) in &self.terms {
            out.push_str(&format!("{} {:?} {:?}\n", basis.to_hex(), amp.re, amp.im));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("QMASTATE1") {
            return Err(Error::parse("missing QMASTATE1 magic line"));
        }
        let layout_line = lines.next().ok_or_else(|| Error::parse("missing layout line"))?;
        let layout = RegisterLayout::from_header(
            layout_line
                .strip_prefix("layout:")
                .ok_or_else(|| Error::parse(format!("bad layout line {layout_line:?}")))?,
        )?;
        let mut terms = BTreeMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let fields: Vec<_> = line.split_whitespace().collect();
            let [hex, re, im] = fields[..] else {
                return Err(Error::parse(format!("bad term line {line:?}")));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::parse(format!("bad amplitude {s:?}: {e}")));
            let amp = Complex64::new(num(re)?, num(im)?);
            if amp == Complex64::new(0.0, 0.0) {
                return Err(Error::parse("zero amplitude stored in state file"));
            }
            if terms.insert(BitVector::from_hex(layout.total(), hex)?, amp).is_some() {
                return Err(Error::parse(format!("duplicate basis string {hex}")));
            }
        }
        let state = QState { layout, terms };
        let norm = state.norm_sqr();
        if state.terms.is_empty() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Norm(norm));
        }
        Ok(state)
    }
}
