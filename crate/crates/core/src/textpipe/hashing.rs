/// CRC-32 (IEEE, reflected 0xEDB88320) of the token's UTF-8 bytes.
pub fn crc32(word: &str) -> u32 {
    crc32fast::hash(word.as_bytes())
}

/// Bucket for `word` in a vector of `size` buckets.
///
/// # Panics
/// If `size` is zero.
pub fn hash_index(word: &str, size: usize) -> usize {
    assert!(size > 0, "vector size must be positive");
    (u64::from(crc32(word)) % size as u64) as usize
}
