//! Cantor pairing and sequence codes.

/// `(x + y)(x + y + 1)/2 + y`, or `None` on overflow.
pub fn code_pair(x: u64, y: u64) -> Option<u64> {
    let s = x.checked_add(y)?;
    let tri = if s % 2 == 0 {
        (s / 2).checked_mul(s.checked_add(1)?)?
    } else {
        s.checked_mul(s / 2 + 1)?
    };
    tri.checked_add(y)
}

/// Inverse of [`code_pair`].
pub fn decode_pair(z: u64) -> (u64, u64) {
    // Largest w with w(w+1)/2 <= z.
    let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    let tri = |w: u64| w as u128 * (w as u128 + 1) / 2;
    while tri(w) > z as u128 {
        w -= 1;
    }
    while tri(w + 1) <= z as u128 {
        w += 1;
    }
    let y = (z as u128 - tri(w)) as u64;
    (w - y, y)
}

/// Codes a sequence as `pair(length, body)` where the body is the
/// right fold `pair(a0, pair(a1, ... pair(ak, 0)))`.
pub fn code_seq(items: &[u64]) -> Option<u64> {
    let mut body = 0u64;
    for &a in items.iter().rev() {
        body = code_pair(a, body)?;
    }
    code_pair(items.len() as u64, body)
}

/// Inverse of [`code_seq`]. Every natural decodes to some sequence.
pub fn decode_seq(z: u64) -> Vec<u64> {
    let (len, mut body) = decode_pair(z);
    let mut out = Vec::new();
    for _ in 0..len {
        let (a, rest) = decode_pair(body);
        out.push(a);
        body = rest;
        if out.len() > 64 {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_values() {
        // Enumeration order of the diagonal walk.
        let walk: Vec<(u64, u64)> = (0..6).map(decode_pair).collect();
        assert_eq!(walk, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        assert_eq!(code_seq(&[]), Some(0));
        assert_eq!(code_seq(&[0]), Some(1));
        assert_eq!(code_seq(&[0, 0]), Some(3));
        assert_eq!(code_pair(u64::MAX, 1), None);
    }

    proptest! {
        #[test]
        fn pair_round_trip(x in 0u64..1 << 30, y in 0u64..1 << 30) {
            prop_assert_eq!(decode_pair(code_pair(x, y).unwrap()), (x, y));
        }

        #[test]
        fn unpair_round_trip(z in 0u64..1 << 60) {
            let (x, y) = decode_pair(z);
            prop_assert_eq!(code_pair(x, y), Some(z));
        }

        #[test]
        fn seq_round_trip(v in proptest::collection::vec(0u64..8, 0..4)) {
            prop_assert_eq!(decode_seq(code_seq(&v).unwrap()), v);
        }
    }
}
