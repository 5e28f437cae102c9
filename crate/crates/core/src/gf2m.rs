//! Arithmetic in GF(2^m) and in GF(2^m)[z].
//!
//! Field elements are `u16` values below `2^m`; bit `i` is the coefficient
//! of the generator to the power `i`. Polynomials keep their coefficients
//! lowest degree first with no trailing zeros.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// GF(2^m) with a fixed reduction polynomial per degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    m: u32,
    /// Full modulus including the `z^m` term.
    modulus: u32,
}

impl Field {
    pub const MIN_DEGREE: u32 = 2;
    pub const MAX_DEGREE: u32 = 6;

    pub fn new(m: u32) -> Result<Self> {
        let modulus = match m {
            2 => 0b111,      // z^2 + z + 1
            3 => 0b1011,     // z^3 + z + 1
            4 => 0b1_0011,   // z^4 + z + 1
            5 => 0b10_0101,  // z^5 + z^2 + 1
            6 => 0b100_0011, // z^6 + z + 1
            _ => {
                return Err(Error::Param(format!(
                    "field degree m = {m} outside {}..={}",
                    Self::MIN_DEGREE,
                    Self::MAX_DEGREE
                )))
            }
        };
        Ok(Self { m, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of field elements, `2^m`.
    pub fn order(&self) -> usize {
        1 << self.m
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..(1u16 << self.m)
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        debug_assert!((a as usize) < self.order() && (b as usize) < self.order());
        let (mut a, mut b) = (a as u32, b as u32);
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.m & 1 == 1 {
                a ^= self.modulus;
            }
        }
        acc as u16
    }

    pub fn square(&self, a: u16) -> u16 {
        self.mul(a, a)
    }

    pub fn pow(&self, a: u16, mut e: u64) -> u16 {
        let mut base = a;
        let mut acc = 1;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// `a^(2^m - 2)`, the multiplicative inverse.
    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, (1u64 << self.m) - 2))
    }
}

/// A polynomial over GF(2^m).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<u16>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    /// The indeterminate `z`.
    pub fn z() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    pub fn monomial(c: u16, deg: usize) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<u16>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u16 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn leading(&self) -> u16 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| self.coeff(i) ^ other.coeff(i)).collect())
    }

    pub fn scale(&self, c: u16, f: &Field) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u16; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] ^= f.mul(a, b);
            }
        }
        Poly::from_coeffs(out)
    }

    /// Long division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly, f: &Field) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree().filter(|&sd| sd >= dd) else {
            return (Poly::zero(), self.clone());
        };
        let mut quot = vec![0u16; sd - dd + 1];
        for i in (dd..=sd).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = f.mul(c, lead_inv);
            quot[i - dd] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] ^= f.mul(q, d);
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, modulus: &Poly, f: &Field) -> Poly {
        self.div_rem(modulus, f).1
    }

    /// Horner evaluation at a field point.
    pub fn eval(&self, x: u16, f: &Field) -> u16 {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.mul(acc, x) ^ c)
    }

    pub fn monic(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.leading()).expect("nonzero leading coefficient"), f)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly, f: &Field) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `(a · b) mod g`.
    pub fn mul_mod(a: &Poly, b: &Poly, g: &Poly, f: &Field) -> Poly {
        a.mul(b, f).rem(g, f)
    }

    pub fn square_mod(&self, g: &Poly, f: &Field) -> Poly {
        Poly::mul_mod(self, self, g, f)
    }

    /// Inverse of `self` modulo `g` by the extended Euclidean algorithm.
    pub fn inv_mod(&self, g: &Poly, f: &Field) -> Result<Poly> {
        let (mut r0, mut r1) = (g.clone(), self.rem(g, f));
        let (mut u0, mut u1) = (Poly::zero(), Poly::one());
        if r1.is_zero() {
            return Err(Error::NotInvertible);
        }
        while r1.degree() != Some(0) {
            if r1.is_zero() {
                return Err(Error::NotInvertible);
            }
            let (q, r) = r0.div_rem(&r1, f);
            let u = u0.add(&q.mul(&u1, f));
            (r0, r1) = (r1, r);
            (u0, u1) = (u1, u);
        }
        // r1 = c is a nonzero constant with u1 · self ≡ c
        let c_inv = f.inv(r1.leading())?;
        Ok(u1.scale(c_inv, f).rem(g, f))
    }

    /// Square root modulo an irreducible `g` of degree `t`: `self^(2^(m·t − 1)) mod g`.
    pub fn sqrt_mod(&self, g: &Poly, f: &Field) -> Poly {
        let t = g.degree().expect("nonzero modulus");
        let mut h = self.rem(g, f);
        for _ in 0..(f.degree() as usize * t).saturating_sub(1) {
            h = h.square_mod(g, f);
        }
        h
    }

    /// Extended Euclid on `(a, b)` stopped at the first remainder of degree
    /// at most `stop_deg`. Returns that remainder `r` and its coefficient `u`
    /// with `r ≡ u · b (mod a)`.
    pub fn eea_bounded(a: &Poly, b: &Poly, stop_deg: usize, f: &Field) -> (Poly, Poly) {
        if b.is_zero() {
            return (Poly::zero(), Poly::zero());
        }
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut u0, mut u1) = (Poly::zero(), Poly::one());
        while r1.degree().is_some_and(|d| d > stop_deg) {
            let (q, r) = r0.div_rem(&r1, f);
            let u = u0.add(&q.mul(&u1, f));
            (r0, r1) = (r1, r);
            (u0, u1) = (u1, u);
        }
        (r1, u1)
    }

    /// `z^(q^e) mod g` with `q = 2^m`, by `m·e` squarings of `z`.
    fn frobenius_z(g: &Poly, e: usize, f: &Field) -> Poly {
        let mut h = Poly::z().rem(g, f);
        for _ in 0..f.degree() as usize * e {
            h = h.square_mod(g, f);
        }
        h
    }

    /// Rabin's irreducibility test for a polynomial of degree at least 1.
    pub fn is_irreducible(&self, f: &Field) -> bool {
        let Some(t) = self.degree().filter(|&t| t >= 1) else {
            return false;
        };
        let g = self.monic(f);
        let z = Poly::z().rem(&g, f);
        if Poly::frobenius_z(&g, t, f) != z {
            return false;
        }
        prime_factors(t).into_iter().all(|p| {
            let h = Poly::frobenius_z(&g, t / p, f).add(&z);
            h.gcd(&g, f).is_one()
        })
    }

    /// Random monic irreducible polynomial of degree `t`, by rejection sampling.
    pub fn random_irreducible<R: Rng + ?Sized>(t: usize, f: &Field, rng: &mut R) -> Poly {
        assert!(t >= 1, "irreducible polynomials need degree >= 1");
        loop {
            let mut coeffs: Vec<u16> = (0..t).map(|_| rng.gen_range(0..f.order() as u16)).collect();
            coeffs.push(1);
            let g = Poly::from_coeffs(coeffs);
            if g.is_irreducible(f) {
                return g;
            }
        }
    }

    /// Comma-separated lowercase hex coefficients, degree 0 first.
    pub fn to_text(&self) -> String {
        self.coeffs.iter().map(|c| format!("{c:x}")).collect::<Vec<_>>().join(",")
    }

    pub fn from_text(s: &str, f: &Field) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Poly::zero());
        }
        let coeffs = s
            .split(',')
            .map(|c| {
                let v = u16::from_str_radix(c.trim(), 16)
                    .map_err(|e| Error::parse(format!("bad coefficient {c:?}: {e}")))?;
                if (v as usize) >= f.order() {
                    return Err(Error::parse(format!("coefficient {v:#x} outside GF(2^{})", f.degree())));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.last() == Some(&0) {
            return Err(Error::parse("polynomial text has a zero leading coefficient"));
        }
        Ok(Poly { coeffs })
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]", self.to_text())
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
