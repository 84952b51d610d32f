//! Reference values the verifier compares computed results against.

/// `(K, [(subset size, count)])`; sizes with no subsets are omitted.
pub type CountRow = (u32, &'static [(usize, usize)]);

pub const SUBSET_COUNTS_D2: &[CountRow] = &[
    (1, &[(4, 1)]),
    (2, &[(4, 2), (8, 1)]),
    (3, &[(4, 4), (8, 6)]),
    (4, &[(4, 8), (8, 28)]),
];

pub const SUBSET_COUNTS_D3: &[CountRow] = &[
    (1, &[(8, 1)]),
    (2, &[(8, 3), (16, 1), (24, 1)]),
    (3, &[(8, 7), (16, 3), (24, 9), (48, 4)]),
    (4, &[(8, 16), (16, 19), (24, 48), (32, 11), (48, 45)]),
];

/// `(K, [(subset size, element sum)])`.
pub type SumRow = (u32, &'static [(usize, u128)]);

pub const SUBSET_SUMS_D2: &[SumRow] = &[
    (1, &[(4, 6)]),
    (2, &[(4, 30), (8, 60)]),
    (3, &[(4, 126), (8, 252)]),
    (4, &[(4, 510), (8, 1020)]),
];

pub const SUBSET_SUMS_D3: &[SumRow] = &[
    (1, &[(8, 28)]),
    (2, &[(8, 252), (16, 504), (24, 756)]),
    (3, &[(8, 2044), (16, 4088), (24, 6132), (48, 12264)]),
    (4, &[(8, 16380), (16, 32760), (24, 49140), (32, 65520), (48, 98280)]),
];

/// `(B − S, D, Ω)`.
pub const OMEGA: &[(u32, u32, u64)] = &[
    (1, 1, 3),
    (2, 1, 7),
    (3, 1, 15),
    (4, 1, 31),
    (1, 2, 5),
    (2, 2, 21),
    (3, 2, 85),
    (4, 2, 341),
    (1, 3, 9),
    (2, 3, 73),
    (3, 3, 585),
    (4, 3, 4681),
];

/// `(subset size, S, B, valid, total)` for `D = 3`.
pub const VALIDITY_D3: &[(usize, u32, u32, usize, usize)] = &[
    (8, 1, 2, 1, 1),
    (8, 1, 3, 1, 1),
    (8, 1, 4, 1, 1),
    (8, 1, 5, 1, 1),
    (8, 1, 6, 1, 1),
    (8, 1, 7, 1, 1),
    (8, 1, 8, 1, 1),
    (8, 2, 3, 2, 3),
    (8, 2, 4, 2, 3),
    (8, 2, 5, 2, 3),
    (8, 2, 6, 3, 3),
    (8, 2, 7, 2, 3),
    (8, 2, 8, 2, 3),
    (8, 3, 4, 4, 7),
    (8, 3, 5, 5, 7),
    (8, 3, 6, 4, 7),
    (8, 3, 7, 5, 7),
    (8, 3, 8, 4, 7),
    (8, 4, 5, 9, 16),
    (8, 4, 6, 10, 16),
    (8, 4, 7, 10, 16),
    (8, 4, 8, 9, 16),
    (8, 5, 6, 22, 49),
    (8, 5, 7, 23, 49),
    (8, 5, 8, 21, 49),
    (16, 2, 3, 0, 1),
    (16, 2, 4, 0, 1),
    (16, 2, 5, 0, 1),
    (16, 2, 6, 1, 1),
    (16, 2, 7, 0, 1),
    (16, 2, 8, 0, 1),
    (16, 3, 4, 0, 3),
    (16, 3, 5, 1, 3),
    (16, 3, 6, 0, 3),
    (16, 3, 7, 1, 3),
    (16, 3, 8, 0, 3),
    (16, 4, 5, 1, 19),
    (16, 4, 6, 2, 19),
    (16, 4, 7, 5, 19),
    (16, 4, 8, 3, 19),
    (16, 5, 6, 11, 127),
    (16, 5, 7, 19, 127),
    (16, 5, 8, 11, 127),
    (24, 2, 3, 1, 1),
    (24, 2, 4, 1, 1),
    (24, 2, 5, 1, 1),
    (24, 2, 6, 1, 1),
    (24, 2, 7, 1, 1),
    (24, 2, 8, 1, 1),
    (24, 3, 4, 7, 9),
    (24, 3, 5, 8, 9),
    (24, 3, 6, 7, 9),
    (24, 3, 7, 9, 9),
    (24, 3, 8, 8, 9),
    (24, 4, 5, 43, 48),
    (24, 4, 6, 36, 48),
    (24, 4, 7, 44, 48),
    (24, 4, 8, 40, 48),
    (24, 5, 6, 168, 207),
    (24, 5, 7, 185, 207),
    (24, 5, 8, 182, 207),
    (32, 4, 5, 0, 11),
    (32, 4, 6, 4, 11),
    (32, 4, 7, 3, 11),
    (32, 4, 8, 2, 11),
    (32, 5, 6, 12, 94),
    (32, 5, 7, 23, 94),
    (32, 5, 8, 12, 94),
    (48, 3, 4, 4, 4),
    (48, 3, 5, 4, 4),
    (48, 3, 6, 1, 4),
    (48, 3, 7, 4, 4),
    (48, 3, 8, 3, 4),
    (48, 4, 5, 39, 45),
    (48, 4, 6, 33, 45),
    (48, 4, 7, 35, 45),
    (48, 4, 8, 36, 45),
    (48, 5, 6, 370, 466),
    (48, 5, 7, 374, 466),
    (48, 5, 8, 374, 466),
];

/// `(subset size, dictionary sizes, distinct generators)`.
pub type DictRow = (usize, &'static [usize], usize);

pub const DICTIONARIES_D2: &[DictRow] = &[(4, &[2], 1), (8, &[4], 1)];

pub const DICTIONARIES_D3: &[DictRow] = &[
    (8, &[2], 1),
    (16, &[4], 1),
    (24, &[4], 2),
    (32, &[6, 7], 6),
    (48, &[8], 2),
];

pub fn subset_counts(dim: u32, k: u32) -> Option<&'static [(usize, usize)]> {
    let table = match dim {
        2 => SUBSET_COUNTS_D2,
        3 => SUBSET_COUNTS_D3,
        _ => return None,
    };
    table.iter().find(|r| r.0 == k).map(|r| r.1)
}

pub fn subset_sums(dim: u32, k: u32) -> Option<&'static [(usize, u128)]> {
    let table = match dim {
        2 => SUBSET_SUMS_D2,
        3 => SUBSET_SUMS_D3,
        _ => return None,
    };
    table.iter().find(|r| r.0 == k).map(|r| r.1)
}

/// Reference `(valid, total)` for one cell of the validity tables.
pub fn validity(dim: u32, size: usize, source: u32, dest: u32) -> Option<(usize, usize)> {
    match dim {
        3 => VALIDITY_D3
            .iter()
            .find(|r| r.0 == size && r.1 == source && r.2 == dest)
            .map(|r| (r.3, r.4)),
        _ => None,
    }
}

pub fn dictionaries(dim: u32) -> Option<&'static [DictRow]> {
    match dim {
        2 => Some(DICTIONARIES_D2),
        3 => Some(DICTIONARIES_D3),
        _ => None,
    }
}

/// `(D, K, Υ)`.
pub const UPSILON: &[(u32, u32, u64)] = &[(2, 1, 1), (2, 2, 4), (2, 3, 16), (2, 4, 64), (3, 4, 512)];

/// `φ` over all of `X^1_3` into `X^1_8`.
pub const PHI_D1_S3_B8: [u64; 8] = [0, 63, 64, 127, 128, 191, 192, 255];

/// `φ` over all of `X^2_2` into `X^2_4`.
pub const PHI_D2_S2_B4: [u64; 16] = [0, 21, 42, 63, 64, 85, 106, 127, 128, 149, 170, 191, 192, 213, 234, 255];

pub fn upsilon(dim: u32, k: u32) -> Option<u64> {
    UPSILON.iter().find(|r| r.0 == dim && r.1 == k).map(|r| r.2)
}
