//! Explicit array constructions achieving the optimal delivery time.
//!
//! * [`construct_case_a`] covers `2r >= K` with `N = K` files.
//! * [`construct_case_b`] covers `K = t * r`, `t >= 2`, with `N = t` files,
//!   built by tiling the `t x t` base array [`construct_case_b_base`].

use thiserror::Error;

use crate::array::{Entry, WmrArray};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("load r={r} not admissible for K={k}: case (a) needs ceil(K/2) <= r <= K")]
    InvalidLoad { k: usize, r: usize },
    #[error("base size t={0} must be at least 2")]
    InvalidT(usize),
    #[error("case (b) needs r | K with K/r >= 2, got K={k}, r={r}")]
    NotDivisible { k: usize, r: usize },
}

/// Parameters of the tiled construction: `K = t * r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseBParams {
    t: usize,
    r: usize,
}

impl CaseBParams {
    pub fn new(t: usize, r: usize) -> Result<Self, ConstructError> {
        if t < 2 || r < 1 {
            return Err(ConstructError::NotDivisible { k: t * r, r });
        }
        Ok(Self { t, r })
    }

    pub fn from_nodes(k: usize, r: usize) -> Result<Self, ConstructError> {
        if r == 0 || !k.is_multiple_of(r) || k / r < 2 {
            return Err(ConstructError::NotDivisible { k, r });
        }
        Ok(Self { t: k / r, r })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.t * self.r
    }

    pub fn slots(&self) -> usize {
        self.t * (self.t - 1) / 2
    }
}

/// The `(K, K, r, K - r)` array for `2r >= K`.
///
/// Column `k` holds stars in the `r` cyclically consecutive rows starting at
/// row `k`, followed by slots `1..=K-r` in the next `K - r` rows.
pub fn construct_case_a(k: usize, r: usize) -> Result<WmrArray, ConstructError> {
    if r < 1 || r > k || 2 * r < k {
        return Err(ConstructError::InvalidLoad { k, r });
    }
    // 0-based: with d = (i - col) mod K, a star iff d < r, else slot d - r + 1,
    // which puts slot s at row (col + r + s - 1) mod K
    let grid = (0..k)
        .map(|i| {
            (0..k)
                .map(|col| match (i + k - col) % k {
                    d if d < r => Entry::Star,
                    d => Entry::Slot(d - r + 1),
                })
                .collect()
        })
        .collect();
    Ok(WmrArray::with_params(grid, r, k - r).expect("square grid"))
}

/// The `(t, t, 1, t(t-1)/2)` base array: stars on the diagonal, slot
/// `s = u(u-1)/2 + v` (`u` in `1..t`, `v` in `1..=u`) at the symmetric pair
/// `(v, t-u+v)` and `(t-u+v, v)`.
pub fn construct_case_b_base(t: usize) -> Result<WmrArray, ConstructError> {
    if t < 2 {
        return Err(ConstructError::InvalidT(t));
    }
    let mut grid = vec![vec![Entry::Star; t]; t];
    for u in 1..t {
        for v in 1..=u {
            let s = u * (u - 1) / 2 + v;
            let (a, b) = (v - 1, t - u + v - 1);
            grid[a][b] = Entry::Slot(s);
            grid[b][a] = Entry::Slot(s);
        }
    }
    Ok(WmrArray::with_params(grid, 1, t * (t - 1) / 2).expect("square grid"))
}

/// Places `copies` copies of `b` side by side. `K` and `r` scale by
/// `copies`; `N` and `S` are unchanged.
pub fn concat_horizontal(b: &WmrArray, copies: usize) -> WmrArray {
    assert!(copies >= 1, "need at least one copy");
    let rows = b
        .rows()
        .map(|row| {
            row.iter()
                .copied()
                .cycle()
                .take(row.len() * copies)
                .collect()
        })
        .collect();
    WmrArray::with_params(rows, b.r() * copies, b.s()).expect("tiling keeps the grid rectangular")
}

/// The `(K, K/r, r, t(t-1)/2)` array for `K = t * r`, `t >= 2`.
pub fn construct_case_b(k: usize, r: usize) -> Result<WmrArray, ConstructError> {
    let params = CaseBParams::from_nodes(k, r)?;
    Ok(construct_case_b_params(params))
}

pub fn construct_case_b_params(params: CaseBParams) -> WmrArray {
    let base = construct_case_b_base(params.t()).expect("t >= 2 by construction");
    concat_horizontal(&base, params.r())
}

/// A direct construction, as picked by [`choose_method`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CaseA,
    CaseB,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::CaseA => "case-a",
            Method::CaseB => "case-b",
        }
    }
}

/// Prefers the tiled construction (fewer files) when `r | K` and `K/r >= 2`,
/// otherwise the cyclic one when `2r >= K`. `None` when neither applies.
pub fn choose_method(k: usize, r: usize) -> Option<Method> {
    if r >= 1 && r <= k && k.is_multiple_of(r) && k / r >= 2 {
        Some(Method::CaseB)
    } else if r >= 1 && r <= k && 2 * r >= k {
        Some(Method::CaseA)
    } else {
        None
    }
}

pub fn construct(k: usize, r: usize, method: Method) -> Result<WmrArray, ConstructError> {
    match method {
        Method::CaseA => construct_case_a(k, r),
        Method::CaseB => construct_case_b(k, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::parse_array;

    #[test]
    fn case_a_five_three_matches_printed_array() {
        let a = construct_case_a(5, 3).unwrap();
        let printed = "* 2 1 * *\n* * 2 1 *\n* * * 2 1\n1 * * * 2\n2 1 * * *\n";
        assert_eq!(a.to_text(), printed);
        assert_eq!((a.k(), a.n(), a.r(), a.s()), (5, 5, 3, 2));
        let col0: Vec<Entry> = a.column(0).collect();
        assert_eq!(
            col0,
            vec![
                Entry::Star,
                Entry::Star,
                Entry::Star,
                Entry::Slot(1),
                Entry::Slot(2)
            ]
        );
    }

    #[test]
    fn case_a_small_and_degenerate() {
        assert_eq!(
            construct_case_a(2, 1).unwrap(),
            parse_array("* 1\n1 *").unwrap()
        );
        let full = construct_case_a(4, 4).unwrap();
        assert_eq!(full.s(), 0);
        assert!(full.rows().flatten().all(|e| e.is_star()));
        assert!(full.verify().passed);
    }

    #[test]
    fn case_a_rejects_low_load() {
        assert_eq!(
            construct_case_a(5, 2),
            Err(ConstructError::InvalidLoad { k: 5, r: 2 })
        );
        assert!(construct_case_a(5, 0).is_err());
        assert!(construct_case_a(5, 6).is_err());
    }

    #[test]
    fn base_arrays() {
        assert_eq!(
            construct_case_b_base(3).unwrap(),
            parse_array("* 2 1\n2 * 3\n1 3 *").unwrap()
        );
        assert_eq!(
            construct_case_b_base(2).unwrap(),
            parse_array("* 1\n1 *").unwrap()
        );
        let b4 = construct_case_b_base(4).unwrap();
        assert_eq!(b4.s(), 6);
        for i in 0..4 {
            assert!(b4.get(i, i).is_star());
            for j in 0..4 {
                assert_eq!(b4.get(i, j), b4.get(j, i));
            }
        }
        assert!(b4.verify().passed);
        assert_eq!(construct_case_b_base(1), Err(ConstructError::InvalidT(1)));
    }

    #[test]
    fn tiling() {
        let b = construct_case_b_base(3).unwrap();
        let c = concat_horizontal(&b, 2);
        assert_eq!(
            c,
            parse_array("* 2 1 * 2 1\n2 * 3 2 * 3\n1 3 * 1 3 *").unwrap()
        );
        assert_eq!(concat_horizontal(&c, 1), c);
        let b2 = construct_case_b_base(2).unwrap();
        let tiled = concat_horizontal(&b2, 3);
        assert_eq!((tiled.n(), tiled.k(), tiled.r(), tiled.s()), (2, 6, 3, 1));
    }

    #[test]
    fn case_b() {
        let c = construct_case_b(6, 2).unwrap();
        assert_eq!((c.k(), c.n(), c.r(), c.s()), (6, 3, 2, 3));
        assert!(c.verify().passed);
        let d = construct_case_b(6, 3).unwrap();
        assert_eq!((d.n(), d.s()), (2, 1));
        assert_eq!(
            construct_case_b(4, 3),
            Err(ConstructError::NotDivisible { k: 4, r: 3 })
        );
        assert!(construct_case_b(3, 3).is_err());
    }

    #[test]
    fn method_choice() {
        assert_eq!(choose_method(5, 3), Some(Method::CaseA));
        assert_eq!(choose_method(6, 2), Some(Method::CaseB));
        assert_eq!(choose_method(6, 3), Some(Method::CaseB));
        assert_eq!(choose_method(4, 4), Some(Method::CaseA));
        assert_eq!(choose_method(5, 2), None);
    }
}
