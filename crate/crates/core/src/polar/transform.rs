use crate::error::{Error, Result};

/// In-place `v = u G_n` with `G_n = [[1,0],[1,1]]^{⊗n}` (no bit reversal).
pub fn transform_in_place(bits: &mut [u8]) -> Result<()> {
    let len = bits.len();
    if !len.is_power_of_two() {
        return Err(Error::LengthNotPow2(len));
    }
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x ^= *y;
            }
        }
        half *= 2;
    }
    Ok(())
}

pub fn transform(bits: &[u8]) -> Result<Vec<u8>> {
    let mut out = bits.to_vec();
    transform_in_place(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix_product(u: &[u8]) -> Vec<u8> {
        // row r of G_n has a one in column c iff c's bits are a subset of r's
        let n = u.len();
        (0..n)
            .map(|c| (0..n).filter(|&r| r & c == c).fold(0, |acc, r| acc ^ u[r]))
            .collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(transform(&[0; 8]).unwrap(), vec![0; 8]);
        assert_eq!(transform(&[1, 0]).unwrap(), vec![1, 0]);
        assert_eq!(transform(&[0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(transform(&[1, 1]).unwrap(), vec![0, 1]);
        assert!(matches!(transform(&[0; 6]), Err(Error::LengthNotPow2(6))));
    }

    #[test]
    fn matches_kronecker_matrix_exhaustively() {
        for n in 0..=4 {
            let len = 1usize << n;
            for word in 0u32..(1 << len) {
                let u: Vec<u8> = (0..len).map(|k| (word >> k & 1) as u8).collect();
                let v = transform(&u).unwrap();
                assert_eq!(v, matrix_product(&u));
                assert_eq!(transform(&v).unwrap(), u);
            }
        }
    }

    proptest! {
        #[test]
        fn involution_at_1024(u in proptest::collection::vec(0u8..2, 1024)) {
            prop_assert_eq!(transform(&transform(&u).unwrap()).unwrap(), u);
        }
    }
}
