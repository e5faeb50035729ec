//! Small linear algebra over F₂ with vectors packed into machine words.

/// Row-reduces `vectors` in place and returns an echelon basis of their span.
pub(crate) fn echelon_basis(vectors: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

pub(crate) fn rank(vectors: impl IntoIterator<Item = u32>) -> usize {
    echelon_basis(vectors).len()
}

/// Parity of the inner product of two packed vectors.
#[inline]
pub(crate) fn dot(a: u32, b: u32) -> u32 {
    (a & b).count_ones() & 1
}

/// Multiplies the matrix with the given packed columns by `y`.
#[inline]
pub(crate) fn mat_vec(cols: &[u8], y: u32) -> u32 {
    let mut acc = 0u32;
    let mut bits = y;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        acc ^= cols[j] as u32;
        bits &= bits - 1;
    }
    acc
}

/// Transposes a `rows × cols` matrix given by its packed columns.
pub(crate) fn transpose(cols: &[u8], rows: usize) -> Vec<u8> {
    (0..rows)
        .map(|i| {
            cols.iter()
                .enumerate()
                .fold(0u8, |acc, (j, &c)| acc | (((c >> i) & 1) << j))
        })
        .collect()
}

/// Inverse of a square invertible matrix given by packed columns.
pub(crate) fn invert(cols: &[u8]) -> Option<Vec<u8>> {
    let n = cols.len();
    // Gauss-Jordan on rows [A | I].
    let mut rows: Vec<(u32, u32)> = transpose(cols, n)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (r as u32, 1u32 << i))
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| (rows[r].0 >> col) & 1 == 1)?;
        rows.swap(col, pivot);
        for r in 0..n {
            if r != col && (rows[r].0 >> col) & 1 == 1 {
                rows[r].0 ^= rows[col].0;
                rows[r].1 ^= rows[col].1;
            }
        }
    }
    // Row i of the inverse is rows[i].1; convert back to packed columns.
    let inv_rows: Vec<u8> = rows.iter().map(|r| r.1 as u8).collect();
    Some(transpose(&inv_rows, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let cols = [0b011u8, 0b110, 0b100];
        let inv = invert(&cols).unwrap();
        for y in 0..8u32 {
            assert_eq!(mat_vec(&inv, mat_vec(&cols, y)), y);
        }
        assert!(invert(&[0b01, 0b01]).is_none());
    }

    #[test]
    fn rank_of_dependent_set() {
        assert_eq!(rank([0b011, 0b101, 0b110]), 2);
        assert_eq!(rank([0, 0]), 0);
    }
}
