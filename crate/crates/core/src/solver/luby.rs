/// The `index`-th term (1-based) of the Luby sequence with base 2:
/// 1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8, ...
///
/// Panics if `index == 0`.
pub fn luby(index: u64) -> u64 {
    assert!(index >= 1, "the Luby sequence is 1-based");
    let mut x = index - 1;
    // Find the complete subsequence 2^k - 1 long that contains x.
    let mut size: u64 = 1;
    let mut seq: u32 = 0;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}
