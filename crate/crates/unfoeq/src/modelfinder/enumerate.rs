//! Enumeration of interpretations for distinguished symbols.

/// All set partitions of `0..n` as restricted growth strings, in
/// lexicographic order. `rgs[i]` is the block of element `i`.
pub fn partitions(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(vec![]);
        return out;
    }
    let mut rgs = vec![0u32; n];
    loop {
        out.push(rgs.clone());
        // Advance to the next restricted growth string.
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let max_prefix = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Partitions whose blocks are consecutive id intervals of non-increasing
/// size. Every partition is isomorphic to exactly one of these.
pub fn canonical_partitions(n: usize) -> Vec<Vec<u32>> {
    partitions(n)
        .into_iter()
        .filter(|rgs| {
            let contiguous = rgs.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
            let mut sizes = vec![0usize; rgs.iter().max().map_or(0, |m| *m as usize + 1)];
            for b in rgs {
                sizes[*b as usize] += 1;
            }
            contiguous && sizes.windows(2).all(|w| w[0] >= w[1])
        })
        .collect()
}

/// All transitive relations on `0..n`, as `n*n` adjacency bitmasks
/// (bit `a*n+b` for the pair `(a,b)`), in increasing mask order.
pub fn transitive_relations(n: usize) -> Vec<u64> {
    assert!(n * n <= 20, "transitive enumeration is desk-scale only");
    let bit = |a: usize, b: usize| 1u64 << (a * n + b);
    (0..1u64 << (n * n))
        .filter(|&r| {
            (0..n).all(|a| {
                (0..n).all(|b| {
                    r & bit(a, b) == 0 || (0..n).all(|c| r & bit(b, c) == 0 || r & bit(a, c) != 0)
                })
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bells: Vec<usize> = (0..=5).map(|n| partitions(n).len()).collect();
        assert_eq!(bells, vec![1, 1, 2, 5, 15, 52]);
        assert_eq!(
            partitions(3),
            vec![
                vec![0, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
                vec![0, 1, 1],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn canonical_partitions_are_integer_partitions() {
        let counts: Vec<usize> = (1..=5).map(|n| canonical_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7]);
    }

    #[test]
    fn transitive_relation_counts() {
        let counts: Vec<usize> = (0..=3).map(|n| transitive_relations(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 13, 171]);
    }
}
