//! Standard-form pre-code `G_s = [I_k | A]` used as the authentication layer.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnsCode {
    a: BitMatrix,
    /// `[I_k | A]`, `k × n₁`
    gs: BitMatrix,
    /// `[Aᵀ | I_{n₁−k}]`, `(n₁−k) × n₁`
    hs: BitMatrix,
    /// `[I_k ; 0]`, `n₁ × k`
    gs_inv: BitMatrix,
}

impl SnsCode {
    /// Draws `A` uniformly over all `k × (n₁ − k)` matrices. No distance
    /// requirement is placed on the resulting code.
    pub fn new_random<R: Rng + ?Sized>(k: usize, n1: usize, rng: &mut R) -> Result<SnsCode> {
        Self::check(k, n1)?;
        Self::from_a(BitMatrix::random(k, n1 - k, rng))
    }

    fn check(k: usize, n1: usize) -> Result<()> {
        if k == 0 || k >= n1 {
            return Err(Error::Param(format!("pre-code needs 1 <= k < n1, got k = {k}, n1 = {n1}")));
        }
        Ok(())
    }

    pub fn from_a(a: BitMatrix) -> Result<SnsCode> {
        let (k, r) = (a.rows(), a.cols());
        Self::check(k, k + r)?;
        let gs = BitMatrix::identity(k).hstack(&a)?;
        let hs = a.transpose().hstack(&BitMatrix::identity(r))?;
        let gs_inv = BitMatrix::identity(k).vstack(&BitMatrix::zeros(r, k))?;
        Ok(SnsCode { a, gs, hs, gs_inv })
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }

    pub fn n1(&self) -> usize {
        self.gs.cols()
    }

    /// Number of check bits, `n₁ − k`.
    pub fn redundancy(&self) -> usize {
        self.a.cols()
    }

    pub fn a(&self) -> &BitMatrix {
        &self.a
    }

    pub fn gs(&self) -> &BitMatrix {
        &self.gs
    }

    pub fn hs(&self) -> &BitMatrix {
        &self.hs
    }

    pub fn gs_inv(&self) -> &BitMatrix {
        &self.gs_inv
    }

    /// `s · G_s`; the first `k` bits of the result are `s`.
    pub fn encode(&self, s: &BitVector) -> Result<BitVector> {
        self.gs.vec_mul(s)
    }

    /// `x · H_sᵀ`, zero exactly on codewords.
    pub fn check_bits(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.n1() {
            return Err(Error::dim(format!("word of length {} for a length-{} pre-code", x.len(), self.n1())));
        }
        let mut out = BitVector::zeros(self.redundancy());
        for (r, row) in self.hs.row_vectors().iter().enumerate() {
            if row.dot(x) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn verify(&self, x: &BitVector) -> Result<bool> {
        Ok(self.check_bits(x)?.is_zero())
    }

    /// Source message of a codeword, read off its first `k` bits.
    pub fn recover(&self, x: &BitVector) -> Result<BitVector> {
        if !self.verify(x)? {
            return Err(Error::NotACodeword);
        }
        Ok(x.slice(0, self.k()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> SnsCode {
        SnsCode::from_a(BitMatrix::from_bit_rows(&[&[1, 0], &[1, 1]])).unwrap()
    }

    #[test]
    fn construction_examples() {
        let c = SnsCode::from_a(BitMatrix::from_bit_rows(&[&[1]])).unwrap();
        assert_eq!(c.gs(), &BitMatrix::from_bit_rows(&[&[1, 1]]));
        assert_eq!(c.hs(), &BitMatrix::from_bit_rows(&[&[1, 1]]));
        assert_eq!(small().gs(), &BitMatrix::from_bit_rows(&[&[1, 0, 1, 0], &[0, 1, 1, 1]]));
    }

    #[test]
    fn random_codes_satisfy_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (k, n1) in [(1, 2), (4, 8), (8, 17), (3, 40)] {
            let c = SnsCode::new_random(k, n1, &mut rng).unwrap();
            assert!(c.gs().mul(&c.hs().transpose()).unwrap().is_zero());
            assert!(c.gs().mul(c.gs_inv()).unwrap().is_identity());
            assert_eq!(c.gs().rank(), k);
        }
        assert!(matches!(SnsCode::new_random(4, 4, &mut rng), Err(Error::Param(_))));
        assert!(matches!(SnsCode::new_random(0, 4, &mut rng), Err(Error::Param(_))));
    }

    #[test]
    fn encode_examples() {
        let c = small();
        assert!(c.encode(&BitVector::zeros(2)).unwrap().is_zero());
        assert_eq!(c.encode(&BitVector::from_bits(&[1, 1])).unwrap(), BitVector::from_bits(&[1, 1, 0, 1]));
        assert!(matches!(c.encode(&BitVector::zeros(3)), Err(Error::Dim(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = SnsCode::new_random(6, 14, &mut rng).unwrap();
        for _ in 0..100 {
            let s = BitVector::random(6, &mut rng);
            assert_eq!(c.encode(&s).unwrap().slice(0, 6), s);
        }
    }

    #[test]
    fn verify_matches_rowspace_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (k, n1) in [(2, 4), (4, 8), (5, 12)] {
            let c = SnsCode::new_random(k, n1, &mut rng).unwrap();
            let rowspace: std::collections::HashSet<BitVector> =
                (0..1u64 << k).map(|s| c.encode(&BitVector::from_u64(k, s)).unwrap()).collect();
            assert_eq!(rowspace.len(), 1 << k);
            let mut accepted = 0;
            for x in 0..1u64 << n1 {
                let x = BitVector::from_u64(n1, x);
                let ok = c.verify(&x).unwrap();
                assert_eq!(ok, rowspace.contains(&x));
                assert_eq!(ok, c.encode(&x.slice(0, k)).unwrap() == x);
                accepted += ok as usize;
            }
            assert_eq!(accepted, 1 << k);
        }
        assert!(small().verify(&BitVector::zeros(4)).unwrap());
        assert!(matches!(small().verify(&BitVector::zeros(5)), Err(Error::Dim(_))));
    }

    #[test]
    fn recover_roundtrip_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = SnsCode::new_random(12, 20, &mut rng).unwrap();
        for s in 0..1u64 << 12 {
            let s = BitVector::from_u64(12, s);
            let x = c.encode(&s).unwrap();
            assert_eq!(c.recover(&x).unwrap(), s);
        }
        assert!(c.recover(&BitVector::zeros(20)).unwrap().is_zero());
    }

    #[test]
    fn recover_prefix_agrees_with_right_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = SnsCode::new_random(8, 17, &mut rng).unwrap();
        for _ in 0..100 {
            let x = c.encode(&BitVector::random(8, &mut rng)).unwrap();
            assert_eq!(c.recover(&x).unwrap(), c.gs_inv().vec_mul(&x).unwrap());
        }
    }

    #[test]
    fn recover_rejects_non_codewords() {
        let c = small();
        let x = c.encode(&BitVector::from_bits(&[1, 0])).unwrap().xor(&BitVector::unit(4, 3));
        assert!(!c.verify(&x).unwrap());
        assert_eq!(c.recover(&x), Err(Error::NotACodeword));
    }
}
