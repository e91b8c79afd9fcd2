//! Monomial bases for Gram-matrix parameterizations.

use std::collections::BTreeMap;

use crate::cpoly::MonomialKey;

/// Ordered list of all monomials `z^α z̄^β` with `|α| + |β| ≤ d` over `n`
/// complex variables. The joint span over both `z` and `z̄` is deliberate:
/// pure powers such as `z_0²` only arise from conjugate-closed bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    dim: usize,
    max_degree: u32,
    keys: Vec<MonomialKey>,
    positions: BTreeMap<MonomialKey, usize>,
}

impl MonomialBasis {
    /// All monomials of total degree ≤ `d` in graded lexicographic order.
    /// The size is `C(2n + d, d)`.
    pub fn new(n: usize, d: u32) -> Self {
        assert!(n >= 1, "basis needs at least one variable");
        let mut keys = Vec::new();
        let mut exponents = vec![0u32; 2 * n];
        enumerate(&mut exponents, 0, d, n, &mut keys);
        keys.sort();
        let positions = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        Self {
            dim: n,
            max_degree: d,
            keys,
            positions,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> &MonomialKey {
        &self.keys[i]
    }

    pub fn keys(&self) -> &[MonomialKey] {
        &self.keys
    }

    pub fn position(&self, key: &MonomialKey) -> Option<usize> {
        self.positions.get(key).copied()
    }

    /// Position of the conjugate of basis element `i`; always present since
    /// the basis is closed under conjugation.
    pub fn conjugate_position(&self, i: usize) -> usize {
        self.positions[&self.keys[i].conjugate()]
    }
}

fn enumerate(
    exponents: &mut Vec<u32>,
    slot: usize,
    remaining: u32,
    n: usize,
    out: &mut Vec<MonomialKey>,
) {
    if slot == exponents.len() {
        let key = MonomialKey::new(
            exponents[..n].to_vec(),
            exponents[n..].to_vec(),
        )
        .expect("slot lengths match");
        out.push(key);
        return;
    }
    for e in 0..=remaining {
        exponents[slot] = e;
        enumerate(exponents, slot + 1, remaining - e, n, out);
    }
    exponents[slot] = 0;
}

/// Binomial coefficient, used by tests to cross-check basis sizes.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
