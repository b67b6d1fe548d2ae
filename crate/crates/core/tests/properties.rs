mod common;

use proptest::prelude::*;

use dpo_core::presheaf::PresheafCat;
use dpo_core::Category;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hom_matches_brute_force(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let schema = graph_schema();
        let cat = PresheafCat::from_arc(schema.clone());
        let a = random_graph(&mut rng, &schema, 2, 2);
        let b = random_graph(&mut rng, &schema, 3, 3);
        let got: std::collections::BTreeSet<_> = cat.hom(&a, &b).iter().map(images).collect();
        prop_assert_eq!(got, brute_force_hom(&a, &b));
    }

    #[test]
    fn pushouts_and_pullbacks_satisfy_the_set_oracles(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let schema = graph_schema();
        let cat = PresheafCat::from_arc(schema.clone());
        let a = random_graph(&mut rng, &schema, 2, 1);
        let b = random_graph(&mut rng, &schema, 3, 2);
        let c = random_graph(&mut rng, &schema, 3, 2);
        let (fs, gs) = (cat.hom(&a, &b), cat.hom(&a, &c));
        prop_assume!(!fs.is_empty() && !gs.is_empty());
        let (f, g) = (&fs[seed as usize % fs.len()], &gs[(seed >> 8) as usize % gs.len()]);
        let co = cat.pushout(f, g).unwrap();
        prop_assert!(is_pushout_oracle(f, g, &co.left, &co.right));
        let back = cat.pullback(&co.left, &co.right).unwrap();
        prop_assert!(is_pullback_oracle(&back.left, &back.right, &co.left, &co.right));
    }

    #[test]
    fn complements_agree_with_brute_force(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let cat = PresheafCat::from_arc(graph_schema());
        let rule = random_rule(&mut rng, &cat, "r", true);
        let host = random_graph(&mut rng, cat.schema(), 3, 3);
        let ms = cat.hom(cat.target(rule.l()), &host);
        prop_assume!(!ms.is_empty());
        let m = &ms[seed as usize % ms.len()];
        let brute = brute_force_complements(&cat, rule.l(), m);
        match cat.pushout_complement(rule.l(), m) {
            Ok((k, f)) => {
                prop_assert!(!brute.is_empty());
                prop_assert!(is_pushout_oracle(rule.l(), &k, m, &f));
            }
            Err(_) => prop_assert!(brute.is_empty()),
        }
    }
}
