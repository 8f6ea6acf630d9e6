mod common;

use common::{arb_grid, corpus, MAX};
use hfk_core::complex::{
    alexander_range, boundary_at_level, generators_in_level, gradings, FilteredComplex, Perm,
};
use hfk_core::gf2::{deflate_to_hat, homology_ranks, induced_map_rank, BigradedRanks, TwoStepFiltration};
use hfk_core::grid::{connected_sum, link_components, mirror};
use hfk_core::invariants::{
    alexander_polynomial, bottom_group, genus, graded_euler_characteristic, hat_homology, top_group,
};
use hfk_core::ledger::{p_image, LedgerEntry, PosRationalFunction, Source};
use hfk_core::poly::{LaurentPoly, Var};
use proptest::prelude::*;

fn all_levels(g: &hfk_core::grid::ValidatedGrid) -> Vec<i32> {
    let (lo, hi) = alexander_range(g);
    (lo..=hi).step_by(2).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn boundary_squares_to_zero(g in arb_grid(2, 6)) {
        for a in all_levels(&g) {
            let lc = boundary_at_level(&g, a, MAX).unwrap();
            lc.check().unwrap();
            prop_assert!(lc.boundary.mul(&lc.boundary).is_zero());
        }
        let fc = FilteredComplex::build(&g, MAX).unwrap();
        let d = fc.boundary_matrix();
        prop_assert!(d.mul(&d).is_zero());
    }

    #[test]
    fn rectangles_respect_gradings(g in arb_grid(2, 6)) {
        // every entry joins permutations differing by one transposition,
        // lowers maslov2 by 2 and never raises alex2
        let fc = FilteredComplex::build(&g, MAX).unwrap();
        for (c, x) in fc.gens().iter().enumerate() {
            for r in fc.boundary_of(c) {
                let y = &fc.gens()[r as usize];
                let moved = (0..g.size()).filter(|&i| x.perm.row(i) != y.perm.row(i)).count();
                prop_assert_eq!(moved, 2);
                prop_assert_eq!(x.maslov2 - y.maslov2, 2);
                prop_assert!(y.alex2 <= x.alex2 && (x.alex2 - y.alex2) % 2 == 0);
            }
        }
    }

    #[test]
    fn levels_partition_generators(g in arb_grid(2, 6)) {
        let n = g.size();
        let mut total = 0usize;
        for a in all_levels(&g) {
            let gens = generators_in_level(&g, a, MAX).unwrap();
            for x in &gens {
                prop_assert_eq!(gradings(&g, &x.perm.to_vec()), (x.maslov2, x.alex2));
                prop_assert_eq!(x.alex2, a);
            }
            total += gens.len();
        }
        prop_assert_eq!(total, (1..=n).product::<usize>());
        let (lo, hi) = alexander_range(&g);
        prop_assert!(generators_in_level(&g, lo - 2, MAX).unwrap().is_empty());
        prop_assert!(generators_in_level(&g, hi + 2, MAX).unwrap().is_empty());
    }

    #[test]
    fn euler_characteristic_is_symmetric(g in arb_grid(2, 6)) {
        let chi = graded_euler_characteristic(&g, MAX).unwrap();
        if link_components(&g) == 1 {
            let d = alexander_polynomial(&g, MAX).unwrap();
            prop_assert!(d.is_symmetric());
            prop_assert_eq!(d.eval_at_one(), 1);
            // the state sum is symmetric about zero without any shift
            prop_assert!(chi.is_symmetric());
            let b = bottom_group(&g, MAX).unwrap();
            prop_assert!(d.coeff(d.min_exp().unwrap()).unsigned_abs() <= b.rank());
            prop_assert_eq!(hat_homology(&g, MAX).unwrap().total() % 2, 1);
        }
    }

    #[test]
    fn mirror_properties(g in arb_grid(2, 6)) {
        prop_assert_eq!(mirror(&mirror(&g)).to_diagram().x_cols, g.to_diagram().x_cols);
        prop_assert_eq!(mirror(&mirror(&g)).to_diagram().o_cols, g.to_diagram().o_cols);
        prop_assert_eq!(link_components(&g), link_components(&mirror(&g)));
        prop_assert_eq!(genus(&g, MAX).unwrap(), genus(&mirror(&g), MAX).unwrap());
        // bottom group of L is the reflected top group of the mirror,
        // shifted down by l - 1 in Maslov grading
        let b = bottom_group(&g, MAX).unwrap();
        let t = top_group(&mirror(&g), MAX).unwrap();
        let l = link_components(&g) as i32;
        prop_assert_eq!(b.alex2_bottom, -t.alex2_top);
        prop_assert_eq!(b.poincare, t.poincare.reflect().shift(-2 * (l - 1)));
    }

    #[test]
    fn hat_homology_is_invariant_under_grid_rotation(g in arb_grid(2, 5), k in 0usize..5) {
        let k = k % g.size();
        let h = hat_homology(&g, MAX).unwrap();
        prop_assert_eq!(&hat_homology(&g.rotate_rows(k), MAX).unwrap(), &h);
        prop_assert_eq!(&hat_homology(&g.rotate_cols(k), MAX).unwrap(), &h);
    }

    #[test]
    fn deflate_inflate_round_trip(g in arb_grid(2, 6)) {
        let levels: Vec<_> = all_levels(&g).into_iter().map(|a| boundary_at_level(&g, a, MAX).unwrap()).collect();
        let tilde = homology_ranks(&levels).unwrap();
        let factors = g.size() - link_components(&g);
        let hat = deflate_to_hat(&tilde, factors).unwrap();
        prop_assert_eq!(hat.inflate(factors), tilde);
    }

    #[test]
    fn induced_rank_is_bounded(g in arb_grid(2, 5), offset in 0i32..8) {
        let fc = FilteredComplex::build(&g, MAX).unwrap();
        let (lo, _) = alexander_range(&g);
        let f = TwoStepFiltration::new(&fc, lo + 2 * offset);
        let r = induced_map_rank(&f).unwrap();
        prop_assert!(r <= 1 << (g.size() - 1));
        prop_assert!(r as usize <= f.sub_size());
    }
}

#[test]
fn unknot_is_a_connected_sum_identity() {
    let u = corpus("unknot2");
    for name in ["trefoil5", "hopf_pos4", "figure8_6"] {
        let g = corpus(name);
        let h = hat_homology(&g, MAX).unwrap();
        assert_eq!(hat_homology(&connected_sum(&u, &g), MAX).unwrap(), h, "{name}");
        assert_eq!(hat_homology(&connected_sum(&g, &u), MAX).unwrap(), h, "{name}");
    }
}

#[test]
fn connected_sum_is_associative() {
    // triples of total size at most 8 keep the full complexes small
    let triples = [
        ("unknot2", "hopf_pos4", "unknot3"),
        ("hopf_pos4", "unknot2", "hopf_neg4"),
        ("hopf_neg4", "hopf_pos4", "unknot2"),
        ("unknot2", "unknot2", "trefoil5"),
        ("trefoil5", "unknot2", "unknot3"),
        ("unknot3", "trefoil_left5", "unknot2"),
    ];
    for (a, b, c) in triples {
        let (ga, gb, gc) = (corpus(a), corpus(b), corpus(c));
        let left = connected_sum(&connected_sum(&ga, &gb), &gc);
        let right = connected_sum(&ga, &connected_sum(&gb, &gc));
        assert_eq!(link_components(&left), link_components(&right));
        assert_eq!(
            hat_homology(&left, MAX).unwrap(),
            hat_homology(&right, MAX).unwrap(),
            "({a}#{b})#{c}"
        );
    }
}

#[test]
fn connected_sum_multiplies_hat_homology() {
    // hat homology of a connected sum is the tensor product
    let pairs = [("hopf_pos4", "hopf_neg4"), ("trefoil5", "unknot3"), ("hopf_pos4", "hopf_pos4")];
    for (a, b) in pairs {
        let (ga, gb) = (corpus(a), corpus(b));
        let (ha, hb) = (hat_homology(&ga, MAX).unwrap(), hat_homology(&gb, MAX).unwrap());
        let mut product = BigradedRanks::new();
        for ((m1, a1), r1) in ha.iter() {
            for ((m2, a2), r2) in hb.iter() {
                product.add(m1 + m2, a1 + a2, r1 * r2);
            }
        }
        assert_eq!(hat_homology(&connected_sum(&ga, &gb), MAX).unwrap(), product, "{a}#{b}");
    }
}

#[test]
fn perm_ranks_are_dense() {
    let mut ranks: Vec<u64> = (0..24u64)
        .map(|k| {
            let mut rows: Vec<usize> = (0..4).collect();
            let mut k = k as usize;
            for i in (1..=4).rev() {
                rows.swap(i - 1, k % i);
                k /= i;
            }
            Perm::from_slice(&rows).lex_rank()
        })
        .collect();
    ranks.sort_unstable();
    assert_eq!(ranks, (0..24).collect::<Vec<_>>());
}

fn arb_entry() -> impl Strategy<Value = LedgerEntry> {
    (proptest::collection::vec((-2i32..4, 1i64..4), 1..4), 0u32..4, 0u32..1000).prop_map(|(terms, b1, id)| {
        LedgerEntry::new(
            format!("e{id}"),
            LaurentPoly::from_terms(Var::T, terms),
            b1,
            Source::Literature { reference: "random".into() },
        )
        .unwrap()
    })
}

fn arb_multiset() -> impl Strategy<Value = Vec<(i32, LedgerEntry)>> {
    proptest::collection::vec((prop_oneof![Just(1), Just(-1)], arb_entry()), 1..5)
}

fn image(m: &[(i32, LedgerEntry)]) -> PosRationalFunction {
    let refs: Vec<(i32, &LedgerEntry)> = m.iter().map(|(s, e)| (*s, e)).collect();
    p_image(&refs).unwrap()
}

proptest! {
    #[test]
    fn p_image_is_a_homomorphism(a in arb_multiset(), b in arb_multiset()) {
        let joined: Vec<_> = a.iter().chain(&b).cloned().collect();
        let (ia, ib) = (image(&a), image(&b));
        prop_assert_eq!(image(&joined), ia.mul(&ib).unwrap());
        // inverse cancels
        let negated: Vec<_> = a.iter().map(|(s, e)| (-s, e.clone())).collect();
        prop_assert!(ia.mul(&image(&negated)).unwrap().is_one());
    }

    #[test]
    fn reduction_is_idempotent(a in arb_multiset()) {
        let f = image(&a);
        let again = PosRationalFunction::new(f.numerator().clone(), f.denominator().clone()).unwrap();
        prop_assert_eq!(&again, &f);
        prop_assert_eq!(f.denominator().min_exp(), Some(0));
        let g = f.numerator().gcd(f.denominator()).unwrap();
        prop_assert_eq!(g, LaurentPoly::one(Var::T));
    }

    #[test]
    fn value_at_one_is_the_rank_ratio(a in arb_multiset()) {
        let f = image(&a);
        let (mut num, mut den) = (1i128, 1i128);
        for (s, e) in &a {
            let r = e.top_poincare.eval_at_one() as i128;
            if *s > 0 { num *= r } else { den *= r }
        }
        let (p, q) = f.at_one();
        prop_assert_eq!(p as i128 * den, q as i128 * num);
    }
}
