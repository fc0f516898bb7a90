//! Independent reference values and brute-force oracles. Nothing here calls
//! into the engine's scoring code, so tests can compare the two.
#![allow(dead_code)]

/// Likelihood table as published: rows exposure 1-4, columns probability 1-4.
pub const PUBLISHED_LIKELIHOOD: [[u8; 4]; 4] = [[1, 2, 3, 4], [2, 3, 5, 9], [3, 5, 9, 12], [4, 7, 12, 15]];

/// Severity table as published: rows effort 1-4, columns gravity 1-4.
pub const PUBLISHED_SEVERITY: [[u8; 4]; 4] = [[1, 2, 4, 6], [2, 3, 5, 8], [3, 5, 8, 10], [5, 8, 10, 12]];

/// Score to level pairs stated in the worked example (levels as ordinals).
pub const LIKELIHOOD_ANCHORS: [(u8, u8); 4] = [(1, 1), (2, 1), (3, 2), (12, 4)];
pub const SEVERITY_ANCHORS: [(u8, u8); 3] = [(1, 1), (3, 2), (5, 2)];

/// (likelihood, severity) -> overall, as ordinals, from the worked example.
pub const OVERALL_ANCHORS: [((u8, u8), u8); 5] = [((4, 2), 3), ((2, 1), 2), ((1, 2), 2), ((1, 1), 1), ((2, 2), 2)];

/// Initial ratings from the worked example: (probability, exposure, gravity, effort).
pub const CASE_INITIAL: [(&str, [u8; 4]); 3] = [
    ("privacy", [3, 4, 3, 2]),
    ("thought", [2, 2, 1, 1]),
    ("safety", [2, 1, 2, 2]),
];

/// Distinct values of a 4x4 table, ascending.
pub fn attainable(table: &[[u8; 4]; 4]) -> Vec<u8> {
    let mut v: Vec<u8> = table.iter().flatten().copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// A binning assigns an ordinal 1-4 to every attainable score.
pub type Binning = Vec<(u8, u8)>;

/// Every contiguous, monotone split of `scores` into four non-empty bins.
pub fn all_binnings(scores: &[u8]) -> Vec<Binning> {
    let n = scores.len();
    let mut out = Vec::new();
    for a in 1..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let binning = scores
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let level = 1 + u8::from(i >= a) + u8::from(i >= b) + u8::from(i >= c);
                        (*s, level)
                    })
                    .collect();
                out.push(binning);
            }
        }
    }
    out
}

pub fn consistent(binning: &Binning, anchors: &[(u8, u8)]) -> bool {
    anchors
        .iter()
        .all(|(score, level)| binning.iter().any(|(s, l)| s == score && l == level))
}

/// Overall impact: rounded-up mean of the two ordinals.
pub fn overall(l: u8, s: u8) -> u8 {
    (l + s).div_ceil(2)
}

/// Brute-force integration of one right's component levels (ordinals).
/// Returns (max, contributing, escalated, integrated).
pub fn integrate(levels: &[u8], threshold: Option<u32>) -> (u8, u32, bool, u8) {
    let max = *levels.iter().max().expect("non-empty");
    let mut contributing = 0;
    for l in levels {
        if *l >= 2 {
            contributing += 1;
        }
    }
    let triggered = match threshold {
        None => false,
        Some(t) => contributing >= t,
    };
    let integrated = if triggered { (max + 1).min(4) } else { max };
    (max, contributing, triggered && max < 4, integrated)
}

/// All sequences of `n` ordinals in 1..=4.
pub fn level_tuples(n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=4).map(move |l| {
                    let mut p = prefix.clone();
                    p.push(l);
                    p
                })
            })
            .collect();
    }
    out
}
