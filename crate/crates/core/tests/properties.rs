use diamfam::classify::Mode;
use diamfam::{
    canonical_form, compress_to_complex, down_shift, fits_ball, fits_template, normalize_translation, GroundSize,
    SetFamily, SetMask, TemplateKind,
};
use proptest::prelude::*;

fn family(max_n: usize, max_size: usize) -> impl Strategy<Value = SetFamily> {
    (3..=max_n).prop_flat_map(move |n| {
        let full = (1u64 << n) - 1;
        prop::collection::vec(0..=full, 1..=max_size)
            .prop_map(move |bits| SetFamily::from_masks(GroundSize::new(n).unwrap(), bits.into_iter().map(SetMask)))
    })
}

fn perm_of(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn down_shift_keeps_size_and_shrinks_diameter(f in family(9, 40), j in 1usize..=9) {
        let j = 1 + (j - 1) % f.n().get();
        let g = down_shift(&f, j).unwrap();
        prop_assert_eq!(g.len(), f.len());
        prop_assert!(g.diameter() <= f.diameter());
        prop_assert!(g.max_union() <= f.max_union());
    }

    #[test]
    fn compression_reaches_a_complex(f in family(8, 40)) {
        let (g, trace) = compress_to_complex(&f);
        prop_assert!(g.is_complex());
        prop_assert!(trace.fixpoint);
        prop_assert_eq!(g.len(), f.len());
        prop_assert!(g.diameter() <= f.diameter());
    }

    #[test]
    fn normalization_is_idempotent(f in family(9, 30)) {
        let (g, _) = normalize_translation(&f);
        let (h, shift) = normalize_translation(&g);
        prop_assert_eq!(shift, SetMask::EMPTY);
        prop_assert_eq!(&h, &g);
        prop_assert_eq!(g.diameter(), f.diameter());
        for i in 1..=g.n().get() {
            let (with, without) = g.degree_split(i);
            prop_assert!(with <= without);
        }
    }

    #[test]
    fn canonical_form_is_an_isometry_invariant(
        (f, perm, shift) in family(7, 16).prop_flat_map(|f| {
            let n = f.n().get();
            (Just(f), perm_of(n), 0..(1u64 << n))
        })
    ) {
        let img = f.translate(SetMask(shift)).unwrap().permute(&perm).unwrap();
        prop_assert_eq!(canonical_form(&f).unwrap(), canonical_form(&img).unwrap());
    }

    #[test]
    fn template_fit_is_hereditary(f in family(7, 20), drop in any::<prop::sample::Index>()) {
        let s = f.diameter().max(2);
        if s + 2 > f.n().get() as u32 {
            return Ok(());
        }
        let mut sub = f.clone();
        if sub.len() > 1 {
            let victim = sub.members()[drop.index(sub.len())];
            sub.remove(victim);
        }
        for kind in [TemplateKind::K, TemplateKind::H] {
            if !fits_template(&f, kind, s, Mode::TranslateOnly).unwrap().is_none() {
                prop_assert!(!fits_template(&sub, kind, s, Mode::TranslateOnly).unwrap().is_none());
            }
        }
        if let Some(center) = fits_ball(&f, s / 2).unwrap() {
            prop_assert!(sub.iter().all(|m| m.distance(center) <= s / 2));
        }
    }
}
