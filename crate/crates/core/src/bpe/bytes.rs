//! Byte-to-printable remapping used by byte-level BPE.
//!
//! Printable Latin-1 bytes map to themselves; the remaining 68 bytes
//! (controls, space, NBSP, soft hyphen) are shifted to U+0100 and up in
//! byte order. This is the table shipped with the GPT-2 encoder, so merge
//! files written against it are interchangeable.

use std::collections::HashMap;
use std::sync::LazyLock;

/// The remapped form of the ASCII space (U+0120, `Ġ`).
pub const SPACE_MARKER: char = '\u{0120}';

struct ByteTable {
    encode: [char; 256],
    decode: HashMap<char, u8>,
}

static TABLE: LazyLock<ByteTable> = LazyLock::new(|| {
    let printable = |b: u32| (0x21..=0x7E).contains(&b) || (0xA1..=0xAC).contains(&b) || (0xAE..=0xFF).contains(&b);
    let mut encode = ['\0'; 256];
    let mut shifted = 0u32;
    for b in 0u32..256 {
        let code = if printable(b) {
            b
        } else {
            shifted += 1;
            255 + shifted
        };
        encode[b as usize] = char::from_u32(code).expect("remap range is valid scalar values");
    }
    let decode = encode.iter().enumerate().map(|(b, &c)| (c, b as u8)).collect();
    ByteTable { encode, decode }
});

/// Printable symbol for a raw byte.
#[inline]
pub fn byte_to_char(byte: u8) -> char {
    TABLE.encode[byte as usize]
}

/// Raw byte for a remapped symbol, if the symbol is part of the alphabet.
#[inline]
pub fn char_to_byte(c: char) -> Option<u8> {
    TABLE.decode.get(&c).copied()
}

/// Remap every byte of `bytes` into the printable alphabet.
pub fn remap(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| byte_to_char(b)).collect()
}

/// Inverse of [`remap`]. Returns the first symbol outside the alphabet on failure.
pub fn unmap(symbols: &str) -> Result<Vec<u8>, char> {
    symbols.chars().map(|c| char_to_byte(c).ok_or(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_maps_to_marker() {
        assert_eq!(byte_to_char(b' '), SPACE_MARKER);
        assert_eq!(byte_to_char(b'\n'), '\u{010A}');
        assert_eq!(byte_to_char(b'a'), 'a');
        assert_eq!(byte_to_char(b'#'), '#');
        assert_eq!(byte_to_char(0), '\u{0100}');
        assert_eq!(byte_to_char(0xAD), '\u{0143}');
    }

    #[test]
    fn table_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for b in 0..=255u8 {
            let c = byte_to_char(b);
            assert!(!c.is_whitespace(), "byte {b} maps to whitespace");
            assert!(seen.insert(c));
            assert_eq!(char_to_byte(c), Some(b));
        }
    }

    #[test]
    fn unmap_rejects_foreign_symbols() {
        assert_eq!(unmap("ab\u{4E00}"), Err('\u{4E00}'));
        assert_eq!(unmap(&remap("héllo wörld\n".as_bytes())).unwrap(), "héllo wörld\n".as_bytes());
    }
}
