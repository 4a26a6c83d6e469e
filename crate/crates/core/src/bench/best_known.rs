/// Best known objective values (maximization) of the `bqpgka` instances,
/// used as stop targets.
pub const BQPGKA_BEST_KNOWN: &[(&str, f64)] = &[
    ("1d", 6333.0),
    ("2d", 6579.0),
    ("3d", 9261.0),
    ("4d", 10727.0),
    ("5d", 11626.0),
    ("1e", 16464.0),
    ("2e", 23395.0),
    ("3e", 25243.0),
    ("4e", 35594.0),
    ("5e", 35154.0),
    ("1f", 61194.0),
    ("2f", 100161.0),
    ("3f", 138035.0),
    ("4f", 172771.0),
    ("5f", 190507.0),
];

/// Instance sets of the `bqpgka` file in file order, with their sizes.
pub const BQPGKA_SETS: &[(char, usize)] =
    &[('a', 8), ('b', 10), ('c', 7), ('d', 10), ('e', 5), ('f', 5)];

pub fn best_known(name: &str) -> Option<f64> {
    BQPGKA_BEST_KNOWN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, v)| v)
}

/// Name (`"1d"`, `"5f"`, ...) of the zero-based instance `index` of the file.
pub fn bqpgka_name(index: usize) -> Option<String> {
    let mut start = 0;
    for &(set, count) in BQPGKA_SETS {
        if index < start + count {
            return Some(format!("{}{}", index - start + 1, set));
        }
        start += count;
    }
    None
}

/// Zero-based position of a named instance within the file.
pub fn bqpgka_index(name: &str) -> Option<usize> {
    let set = name.chars().last()?;
    let number: usize = name[..name.len() - set.len_utf8()].parse().ok()?;
    let mut start = 0;
    for &(s, count) in BQPGKA_SETS {
        if s == set {
            return (1..=count).contains(&number).then(|| start + number - 1);
        }
        start += count;
    }
    None
}
