//! Helpers shared by the integration test targets.

#![allow(dead_code)]

pub mod props;

use crosstalk::ft_runtime::Instruction;
use crosstalk::msa_block::MsaMode;
use crosstalk::truth_table::TruthTable;

/// 30 instructions cycling through every mode over a spread of operands.
pub fn mixed_program() -> Vec<Instruction> {
    (0..30)
        .map(|i| Instruction {
            id: i,
            op: MsaMode::ALL[i % 3],
            a: (i * 7 % 4) as u8,
            b: (i * 5 / 3 % 4) as u8,
        })
        .collect()
}

/// Independent brute force over `w_i ∈ 1..=max`, `w_ct ∈ 1..=max` and every
/// theta up to the total coupling. Returns the first realization in order
/// of total weight, then weight vector `(data.., ctrl)`, then theta.
pub fn brute_force_pair(
    f0: &TruthTable,
    f1: &TruthTable,
    max: u32,
) -> Option<(Vec<u32>, u32, u32)> {
    let n = f0.arity();
    let mut candidates: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..=n {
        candidates = candidates
            .into_iter()
            .flat_map(|c| {
                (1..=max).map(move |w| {
                    let mut c = c.clone();
                    c.push(w);
                    c
                })
            })
            .collect();
    }
    candidates.sort_by_key(|c| (c.iter().sum::<u32>(), c.clone()));
    for c in candidates {
        let total: u32 = c.iter().sum();
        let (data, ct) = (&c[..n], c[n]);
        for theta in 1..=total {
            let ok = (0..1usize << n).all(|k| {
                let s: u32 = (0..n).filter(|i| k >> i & 1 == 1).map(|i| data[i]).sum();
                (s >= theta) == f0.get(k) && (s + ct >= theta) == f1.get(k)
            });
            if ok {
                return Some((data.to_vec(), ct, theta));
            }
        }
    }
    None
}

pub fn all_tables(arity: usize) -> Vec<TruthTable> {
    let len = 1usize << arity;
    (0..1usize << len)
        .map(|m| TruthTable::from_bits((0..len).map(|k| m >> k & 1 == 1).collect()).unwrap())
        .collect()
}
