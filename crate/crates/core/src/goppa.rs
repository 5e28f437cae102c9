//! Binary irreducible Goppa codes with full support and syndrome decoding.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::gf2m::{Field, Poly};

/// Binary syndrome `y · Hᵀ` of width `m·t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(BitVector);

impl Syndrome {
    pub fn new(bits: BitVector) -> Self {
        Syndrome(bits)
    }

    pub fn bits(&self) -> &BitVector {
        &self.0
    }

    pub fn into_bits(self) -> BitVector {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// A binary Goppa code `Γ(L, g)` with `L` every element of GF(2^m) in value order.
#[derive(Clone, Debug)]
pub struct GoppaCode {
    field: Field,
    t: usize,
    g: Poly,
    support: Vec<u16>,
    /// `m·t × n` binary parity check.
    parity_check: BitMatrix,
    /// `n₁ × n` generator, the reduced kernel basis of `parity_check`.
    generator: BitMatrix,
    /// `n × n₁` right inverse of `generator`.
    generator_inv: BitMatrix,
    /// `m·t × n`; row-vector `s` times this is a word with syndrome `s`.
    syndrome_lift: BitMatrix,
    /// `(z − L_i)⁻¹ mod g` per support position.
    locator_inverses: Vec<Poly>,
}

impl GoppaCode {
    /// Draws irreducible Goppa polynomials until the binary parity check has full rank `m·t`.
    pub fn generate<R: Rng + ?Sized>(m: u32, t: usize, rng: &mut R) -> Result<GoppaCode> {
        let field = Self::check_params(m, t)?;
        loop {
            let g = Poly::random_irreducible(t, &field, rng);
            match Self::from_goppa_poly(field, g) {
                Ok(code) => return Ok(code),
                Err(Error::Rank { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    fn check_params(m: u32, t: usize) -> Result<Field> {
        let field = Field::new(m)?;
        // a linear g always has a root in the field, which a full support cannot avoid
        if t < 2 {
            return Err(Error::Param(format!("t = {t}; full-support Goppa codes need t >= 2")));
        }
        if m as usize * t >= field.order() {
            return Err(Error::Param(format!("m·t = {} must be below n = {}", m as usize * t, field.order())));
        }
        Ok(field)
    }

    /// Deterministically rebuilds the code for a given Goppa polynomial.
    pub fn from_goppa_poly(field: Field, g: Poly) -> Result<GoppaCode> {
        let t = g.degree().unwrap_or(0);
        Self::check_params(field.degree(), t)?;
        if g.leading() != 1 || !g.is_irreducible(&field) {
            return Err(Error::Param(format!("{g:?} is not monic irreducible")));
        }
        let m = field.degree() as usize;
        let support: Vec<u16> = field.elements().collect();
        let n = support.len();

        let mut parity_check = BitMatrix::zeros(m * t, n);
        for (j, &l) in support.iter().enumerate() {
            let ginv = field.inv(g.eval(l, &field))?;
            let mut entry = ginv; // L_j^i / g(L_j), starting at i = 0
            for i in 0..t {
                for b in 0..m {
                    if entry >> b & 1 == 1 {
                        parity_check.set(i * m + b, j, true);
                    }
                }
                entry = field.mul(entry, l);
            }
        }
        let syndrome_lift = parity_check.right_inverse()?.transpose();
        let generator = parity_check.kernel();
        let generator_inv = generator.right_inverse()?;
        let locator_inverses =
            support.iter().map(|&l| Poly::from_coeffs(vec![l, 1]).inv_mod(&g, &field)).collect::<Result<Vec<_>>>()?;
        Ok(GoppaCode { field, t, g, support, parity_check, generator, generator_inv, syndrome_lift, locator_inverses })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn m(&self) -> u32 {
        self.field.degree()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn goppa_poly(&self) -> &Poly {
        &self.g
    }

    pub fn support(&self) -> &[u16] {
        &self.support
    }

    /// Code length `n = 2^m`.
    pub fn n(&self) -> usize {
        self.support.len()
    }

    /// Dimension `n₁ = n − m·t`.
    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    pub fn syndrome_len(&self) -> usize {
        self.parity_check.rows()
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn generator_inv(&self) -> &BitMatrix {
        &self.generator_inv
    }

    /// `u · G`.
    pub fn encode(&self, u: &BitVector) -> Result<BitVector> {
        self.generator.vec_mul(u)
    }

    /// `y · Hᵀ`.
    pub fn syndrome(&self, y: &BitVector) -> Result<Syndrome> {
        if y.len() != self.n() {
            return Err(Error::dim(format!("word of length {} for a length-{} code", y.len(), self.n())));
        }
        let mut s = BitVector::zeros(self.syndrome_len());
        for (r, row) in self.parity_check.row_vectors().iter().enumerate() {
            if row.dot(y) {
                s.set(r, true);
            }
        }
        Ok(Syndrome(s))
    }

    /// Finds the unique error of weight at most `t` with the given syndrome.
    ///
    /// Patterson's algorithm on the syndrome polynomial of an arbitrary coset
    /// representative, followed by a check that the result really is a
    /// weight-≤t vector with that syndrome.
    pub fn decode_syndrome(&self, s: &Syndrome) -> Result<BitVector> {
        if s.0.len() != self.syndrome_len() {
            return Err(Error::dim(format!(
                "syndrome of length {} for a code with m·t = {}",
                s.0.len(),
                self.syndrome_len()
            )));
        }
        let n = self.n();
        if s.is_zero() {
            return Ok(BitVector::zeros(n));
        }
        let f = &self.field;
        let g = &self.g;
        let representative = self.syndrome_lift.vec_mul(&s.0)?;
        let s_poly = representative.iter_ones().fold(Poly::zero(), |acc, i| acc.add(&self.locator_inverses[i]));
        if s_poly.is_zero() {
            // nonzero binary syndrome always gives a nonzero syndrome polynomial
            return Err(Error::DecodeFailure);
        }
        let t_poly = s_poly.inv_mod(g, f)?;
        let sigma = if t_poly == Poly::z() {
            Poly::z()
        } else {
            let r = t_poly.add(&Poly::z()).sqrt_mod(g, f);
            let (a, b) = Poly::eea_bounded(g, &r, self.t / 2, f);
            a.mul(&a, f).add(&Poly::z().mul(&b.mul(&b, f), f))
        };
        let Some(deg) = sigma.degree() else {
            return Err(Error::DecodeFailure);
        };
        let mut e = BitVector::zeros(n);
        for (i, &l) in self.support.iter().enumerate() {
            if sigma.eval(l, f) == 0 {
                e.set(i, true);
            }
        }
        if e.weight() != deg || deg > self.t || self.syndrome(&e)? != *s {
            return Err(Error::DecodeFailure);
        }
        Ok(e)
    }
}
