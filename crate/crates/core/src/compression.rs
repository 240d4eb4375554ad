//! Down-shifts, compression to a complex, and translation normalization.
//!
//! `compress_to_complex` sweeps `j = 1..n` round-robin until a full pass
//! changes nothing. Traces depend on that order and so can the fixpoint
//! family; only its size, being a complex, and the diameter bound are
//! guaranteed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{SetFamily, SetMask};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionTrace {
    /// `(j, members moved)` for every productive shift, in order.
    pub steps: Vec<(usize, usize)>,
    /// True iff the final family is a complex.
    pub fixpoint: bool,
}

/// `S_j`: replaces each member `F ∋ j` by `F \ {j}` when that set is not
/// already in the family. Membership is always tested against `f` itself.
pub fn down_shift(f: &SetFamily, j: usize) -> Result<SetFamily> {
    Ok(shift_counted(f, j)?.0)
}

fn shift_counted(f: &SetFamily, j: usize) -> Result<(SetFamily, usize)> {
    let n = f.n();
    if j == 0 || j > n.get() {
        return Err(Error::ElementOutOfRange { element: j, n: n.get() });
    }
    let mut moved = 0;
    let image: Vec<SetMask> = f
        .iter()
        .map(|&m| {
            let down = m.without(j);
            if m.contains(j) && !f.contains(down) {
                moved += 1;
                down
            } else {
                m
            }
        })
        .collect();
    Ok((SetFamily::from_masks(n, image), moved))
}

pub fn compress_to_complex(f: &SetFamily) -> (SetFamily, CompressionTrace) {
    let n = f.n().get();
    let mut cur = f.clone();
    let mut steps = Vec::new();
    loop {
        let mut changed = false;
        for j in 1..=n {
            let (next, moved) = shift_counted(&cur, j).expect("coordinate in range");
            if moved > 0 {
                steps.push((j, moved));
                cur = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let fixpoint = cur.is_complex();
    (cur, CompressionTrace { steps, fixpoint })
}

/// Translates by `S = {i : |F(i)| > |F(ī)|}`, after which every coordinate
/// is absent from at least half of the members.
pub fn normalize_translation(f: &SetFamily) -> (SetFamily, SetMask) {
    let n = f.n();
    let mut shift = SetMask::EMPTY;
    for i in n.elements() {
        let (with, without) = f.degree_split(i);
        if with > without {
            shift = shift.with(i);
        }
    }
    (f.translate(shift).expect("shift lies inside the ground set"), shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{Template, TemplateKind};
    use crate::family::GroundSize;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    #[test]
    fn shift_examples() {
        assert_eq!(down_shift(&fam(3, &[&[1, 2]]), 1).unwrap(), fam(3, &[&[2]]));
        let f = fam(3, &[&[1], &[1, 2]]);
        assert_eq!(down_shift(&f, 2).unwrap(), f);
        assert!(down_shift(&f, 0).is_err());
        assert!(down_shift(&f, 4).is_err());
    }

    #[test]
    fn r_to_h() {
        let g = GroundSize::new(6).unwrap();
        let r = Template::R { n: g, d: 2, r_set: SetMask::interval(1, 4), y: 1 }.build().unwrap();
        let h = Template::H { n: g, s: 4, d_set: SetMask::interval(2, 4), y: 1 }.build().unwrap();
        assert_eq!(down_shift(&r, 1).unwrap(), h);
    }

    #[test]
    fn compress_single_chain() {
        let (out, trace) = compress_to_complex(&fam(3, &[&[1, 2]]));
        assert_eq!(out, fam(3, &[&[]]));
        assert_eq!(trace.steps, vec![(1, 1), (2, 1)]);
        assert!(trace.fixpoint);
    }

    #[test]
    fn compress_complex_is_noop() {
        let k = Template::standard(TemplateKind::K, 6, 4).unwrap().build().unwrap();
        let (out, trace) = compress_to_complex(&k);
        assert_eq!(out, k);
        assert!(trace.steps.is_empty());
        assert!(trace.fixpoint);
    }

    #[test]
    fn normalize_examples() {
        let (_, s) = normalize_translation(&fam(3, &[&[1], &[1, 2], &[1, 3]]));
        assert!(s.contains(1));
        for n in 6..=9 {
            let k = Template::standard(TemplateKind::K, n, 4).unwrap().build().unwrap();
            assert_eq!(normalize_translation(&k).1, SetMask::EMPTY);
        }
    }
}
