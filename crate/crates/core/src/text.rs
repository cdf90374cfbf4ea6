//! Plain-text family files.
//!
//! ```text
//! n=6 k=2
//! 1,2
//! 3,4
//! hex:30
//! ```
//!
//! The header gives the ground set size and either the uniformity `k` or `*`. Each
//! following line is one member: an ascending comma-separated element list (an empty line
//! is the empty set) or `hex:<mask>` where bit `i - 1` stands for element `i`. A file may
//! hold several families back to back; every `n=` line starts a new one.

use crate::error::{Error, Result};
use crate::family::{Family, GroundSet, Subset};

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

fn parse_header(line_no: usize, line: &str) -> Result<(GroundSet, Option<usize>)> {
    let mut n = None;
    let mut k = None;
    let mut saw_k = false;
    for tok in line.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            match v.parse::<usize>() {
                Ok(x) => n = Some(x),
                Err(_) => return parse_err(line_no, format!("bad n value {v:?}")),
            }
        } else if let Some(v) = tok.strip_prefix("k=") {
            saw_k = true;
            if v != "*" {
                match v.parse::<usize>() {
                    Ok(x) => k = Some(x),
                    Err(_) => return parse_err(line_no, format!("bad k value {v:?}")),
                }
            }
        } else {
            return parse_err(line_no, format!("unexpected header token {tok:?}"));
        }
    }
    let Some(n) = n else {
        return parse_err(line_no, "header is missing n=<n>");
    };
    if !saw_k {
        return parse_err(line_no, "header is missing k=<k|*>");
    }
    let ground = GroundSet::new(n).or_else(|e| parse_err(line_no, e.to_string()))?;
    Ok((ground, k))
}

fn parse_member(line_no: usize, line: &str, ground: GroundSet) -> Result<Subset> {
    let line = line.trim();
    if let Some(hex) = line.strip_prefix("hex:") {
        let bits = u64::from_str_radix(hex, 16)
            .or_else(|_| parse_err(line_no, format!("bad hex mask {hex:?}")))?;
        let s = Subset::from_bits(bits);
        if !ground.contains(s) {
            return parse_err(line_no, format!("mask {hex} exceeds [{}]", ground.n()));
        }
        return Ok(s);
    }
    if line.is_empty() {
        return Ok(Subset::EMPTY);
    }
    let mut bits = 0u64;
    let mut last = 0usize;
    for tok in line.split(',') {
        let tok = tok.trim();
        let e: usize = tok
            .parse()
            .or_else(|_| parse_err(line_no, format!("bad element {tok:?}")))?;
        if e == 0 || e > ground.n() {
            return parse_err(line_no, format!("element {e} outside [{}]", ground.n()));
        }
        if e <= last {
            return parse_err(line_no, "elements must be strictly ascending");
        }
        last = e;
        bits |= 1 << (e - 1);
    }
    Ok(Subset::from_bits(bits))
}

fn finish(
    header_line: usize,
    ground: GroundSet,
    k: Option<usize>,
    members: Vec<Subset>,
) -> Result<Family> {
    let built = match k {
        Some(k) => Family::uniform(ground, k, members),
        None => Family::new(ground, members),
    };
    built.or_else(|e| parse_err(header_line, e.to_string()))
}

/// Parses every family in `text`.
pub fn parse_families(text: &str) -> Result<Vec<Family>> {
    let mut out = Vec::new();
    let mut current: Option<(usize, GroundSet, Option<usize>, Vec<Subset>)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim_start().starts_with("n=") {
            if let Some((h, g, k, m)) = current.take() {
                out.push(finish(h, g, k, m)?);
            }
            let (g, k) = parse_header(line_no, line)?;
            current = Some((line_no, g, k, Vec::new()));
            continue;
        }
        match current.as_mut() {
            Some((_, g, _, members)) => members.push(parse_member(line_no, line, *g)?),
            None => return parse_err(line_no, "member line before any n=<n> k=<k|*> header"),
        }
    }
    if let Some((h, g, k, m)) = current {
        out.push(finish(h, g, k, m)?);
    }
    Ok(out)
}

/// Parses a file holding exactly one family.
pub fn parse_family(text: &str) -> Result<Family> {
    let mut all = parse_families(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => parse_err(1, "no family header found"),
        m => parse_err(1, format!("expected one family, found {m}")),
    }
}

/// Header line for `f`.
pub fn header(f: &Family) -> String {
    match f.declared_uniformity() {
        Some(k) => format!("n={} k={k}", f.n()),
        None => format!("n={} k=*", f.n()),
    }
}

/// Serializes `f` with element lists, one member per line.
pub fn format_family(f: &Family) -> String {
    let mut out = header(f);
    out.push('\n');
    for s in f {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

/// Serializes `f` with `hex:` members.
pub fn format_family_hex(f: &Family) -> String {
    let mut out = header(f);
    out.push('\n');
    for s in f {
        out.push_str(&format!("hex:{:x}\n", s.bits()));
    }
    out
}

/// Member strings as used inside JSON reports.
pub fn member_strings(f: &Family) -> Vec<String> {
    f.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_lists_hex_and_empty_lines() {
        let f = parse_family("n=6 k=*\n1,2\nhex:c\n\n").unwrap();
        assert_eq!(f.n(), 6);
        assert_eq!(
            f.members(),
            &[Subset::EMPTY, Subset::of(&[1, 2]), Subset::of(&[3, 4])]
        );
        let g = parse_family("n=4 k=2\n").unwrap();
        assert!(g.is_empty());
        assert_eq!(g.declared_uniformity(), Some(2));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_family("1,2\n").is_err());
        assert!(parse_family("n=4\n1\n").is_err());
        assert!(parse_family("n=4 k=2\n1,5\n").is_err());
        assert!(parse_family("n=4 k=2\n2,1\n").is_err());
        assert!(parse_family("n=4 k=2\n1\n").is_err());
        assert!(parse_family("n=4 k=*\nhex:10\n").is_err());
        assert!(parse_family("n=70 k=*\n").is_err());
        assert!(parse_family("n=4 k=*\nn=4 k=*\n").is_err());
        match parse_family("n=4 k=*\n1,x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multiple_families() {
        let all = parse_families("n=4 k=2\n1,2\nn=4 k=2\n1,3\n2,4\n").unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1].len(), 2);
    }

    proptest! {
        #[test]
        fn text_round_trip(n in 1usize..=64, raw in proptest::collection::vec(any::<u64>(), 0..20), hex in any::<bool>()) {
            let ground = GroundSet::new(n).unwrap();
            let mask = ground.full().bits();
            let f = Family::new(ground, raw.into_iter().map(|b| Subset::from_bits(b & mask))).unwrap();
            let text = if hex { format_family_hex(&f) } else { format_family(&f) };
            prop_assert_eq!(parse_family(&text).unwrap(), f);
        }
    }
}
