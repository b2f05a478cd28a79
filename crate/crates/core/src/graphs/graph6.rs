use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{pair_index, Graph, GraphError, MAX_ORDER};

const HEADER: &str = ">>graph6<<";

/// Size prefix: one byte `n + 63` for `n <= 62`, else `~` and three bytes.
pub fn encode_graph6_size(n: usize) -> Vec<u8> {
    if n <= 62 {
        Vec::from([n as u8 + 63])
    } else {
        Vec::from([
            b'~',
            ((n >> 12) & 63) as u8 + 63,
            ((n >> 6) & 63) as u8 + 63,
            (n & 63) as u8 + 63,
        ])
    }
}

/// Returns `(n, bytes consumed)`.
pub fn decode_graph6_size(bytes: &[u8]) -> Result<(usize, usize), GraphError> {
    let bad = |why: &str| GraphError::MalformedGraph6(why.to_string());
    let digit = |b: u8| {
        if (63..=126).contains(&b) {
            Ok((b - 63) as usize)
        } else {
            Err(bad("byte outside 63..=126"))
        }
    };
    match bytes {
        [] => Err(bad("empty input")),
        [b'~', b'~', ..] => Err(bad("orders above 258047 are not supported")),
        [b'~', rest @ ..] => {
            if rest.len() < 3 {
                return Err(bad("truncated size field"));
            }
            let n = (digit(rest[0])? << 12) | (digit(rest[1])? << 6) | digit(rest[2])?;
            Ok((n, 4))
        }
        [b, ..] => Ok((digit(*b)?, 1)),
    }
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.order();
    let mut out = encode_graph6_size(n);
    let mut acc = 0u8;
    let mut used = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            used += 1;
            if used == 6 {
                out.push(acc + 63);
                acc = 0;
                used = 0;
            }
        }
    }
    if used > 0 {
        out.push((acc << (6 - used)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

/// Parses one graph6 line; a leading `>>graph6<<` header and trailing
/// whitespace are accepted.
pub fn parse_graph6(s: &str) -> Result<Graph, GraphError> {
    let bad = |why: &str| GraphError::MalformedGraph6(why.to_string());
    let s = s.trim_end();
    let s = s.strip_prefix(HEADER).unwrap_or(s);
    let bytes = s.as_bytes();
    let (n, used) = decode_graph6_size(bytes)?;
    if n > MAX_ORDER {
        return Err(GraphError::TooLarge { order: n, max: MAX_ORDER });
    }
    let body = &bytes[used..];
    let bits = n * n.saturating_sub(1) / 2;
    if body.len() != bits.div_ceil(6) {
        return Err(bad("body length does not match the order"));
    }
    if body.iter().any(|b| !(63..=126).contains(b)) {
        return Err(bad("byte outside 63..=126"));
    }
    let bit = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    if (bits..body.len() * 6).any(bit) {
        return Err(bad("nonzero padding bits"));
    }
    let mut g = Graph::empty(n)?;
    for j in 1..n {
        for i in 0..j {
            if bit(pair_index(i, j)) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        assert_eq!(to_graph6(&Graph::empty(1).unwrap()), "@");
        assert_eq!(parse_graph6("@").unwrap(), Graph::empty(1).unwrap());
    }

    #[test]
    fn known_strings() {
        // standard examples: K3 is "Bw", the 5-cycle 0-1-2-3-4 is "Dhc"
        assert_eq!(to_graph6(&Graph::complete(3)), "Bw");
        assert_eq!(to_graph6(&Graph::cycle(5)), "Dhc");
        assert_eq!(parse_graph6(">>graph6<<Dhc\n").unwrap(), Graph::cycle(5));
    }

    #[test]
    fn malformed() {
        assert!(matches!(parse_graph6("D"), Err(GraphError::MalformedGraph6(_))));
        assert!(matches!(parse_graph6("Bww"), Err(GraphError::MalformedGraph6(_))));
        assert!(matches!(parse_graph6(""), Err(GraphError::MalformedGraph6(_))));
        assert!(matches!(parse_graph6("B\x01"), Err(GraphError::MalformedGraph6(_))));
        // K2 needs one bit; a set padding bit is rejected
        assert!(parse_graph6("A_").is_ok());
        assert!(matches!(parse_graph6("Ao"), Err(GraphError::MalformedGraph6(_))));
    }

    #[test]
    fn large_orders_roundtrip() {
        let g = Graph::cycle(64);
        let s = to_graph6(&g);
        assert!(s.starts_with('~'));
        assert_eq!(parse_graph6(&s).unwrap(), g);
        assert_eq!(decode_graph6_size(&encode_graph6_size(63)).unwrap(), (63, 4));
    }
}
