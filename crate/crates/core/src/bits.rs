//! Bit sequences are plain `Vec<u8>` holding 0/1 values; this module has the
//! packing and XOR helpers shared by the codec and the container formats.

/// Packs 0/1 bits most-significant-bit first, zero padding the last byte.
pub fn pack_msb(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Inverse of [`pack_msb`]; `len` is the number of meaningful bits.
pub fn unpack_msb(bytes: &[u8], len: usize) -> Vec<u8> {
    (0..len).map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1).collect()
}

/// XOR of two bit strings, the shorter one padded with trailing zeros.
pub fn xor_padded(a: &[u8], b: &[u8]) -> Vec<u8> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| a.get(i).copied().unwrap_or(0) ^ b.get(i).copied().unwrap_or(0))
        .collect()
}

pub fn to_hex(bits: &[u8]) -> String {
    hex::encode(pack_msb(bits))
}

/// Gathers `bits[positions]` in the order given.
pub fn gather(bits: &[u8], positions: &[usize]) -> Vec<u8> {
    positions.iter().map(|&p| bits[p]).collect()
}
