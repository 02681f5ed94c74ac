//! Strong (Dynkin) lumpability: a partition lumps a chain when every state
//! of a class has the same total rate into each other class.

use crate::error::{Error, Result};

use super::generator::RateMatrix;

/// Absolute tolerance on class-to-class rates. All rates here are small
/// rationals, so disagreements are either exact or gross.
pub const LUMP_TOLERANCE: f64 = 1e-12;

/// Verifies lumpability of `gen` under `class_of` (state -> class in
/// `0..classes`) and returns the lumped generator.
pub fn lump_check(gen: &RateMatrix, class_of: &[usize], classes: usize) -> Result<RateMatrix> {
    if class_of.len() != gen.size() {
        return Err(Error::DimensionMismatch(class_of.len(), gen.size()));
    }
    if let Some(&c) = class_of.iter().find(|&&c| c >= classes) {
        return Err(Error::invalid("partition", format!("class {c} >= {classes}")));
    }
    let mut representative: Vec<Option<usize>> = vec![None; classes];
    let mut profile: Vec<Vec<f64>> = vec![Vec::new(); classes];
    let mut scratch = vec![0.0; classes];
    for x in 0..gen.size() {
        let cx = class_of[x];
        scratch.iter_mut().for_each(|r| *r = 0.0);
        for (y, r) in gen.row(x) {
            scratch[class_of[y]] += r;
        }
        scratch[cx] = 0.0;
        match representative[cx] {
            None => {
                representative[cx] = Some(x);
                profile[cx] = scratch.clone();
            }
            Some(rep) => {
                for (d, (&a, &b)) in profile[cx].iter().zip(&scratch).enumerate() {
                    if (a - b).abs() > LUMP_TOLERANCE {
                        return Err(Error::NotLumpable {
                            x: rep,
                            y: x,
                            class: d,
                            rate_x: a,
                            rate_y: b,
                        });
                    }
                }
            }
        }
    }
    if let Some(empty) = representative.iter().position(Option::is_none) {
        return Err(Error::invalid("partition", format!("class {empty} is empty")));
    }
    let triplets = profile
        .iter()
        .enumerate()
        .flat_map(|(c, row)| row.iter().enumerate().map(move |(d, &r)| (c, d, r)))
        .collect();
    RateMatrix::from_triplets(classes, triplets)
}
