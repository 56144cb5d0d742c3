//! Finite symmetry models: points `Φ`, variables `θ^a : Φ → values`,
//! permutation groups acting on `Φ`, the space `H` of functions that factor
//! through the distinguished variable, and the checks built on them.

mod hilbert;
mod model;
mod perm;
mod words;

pub use hilbert::{
    build_question_states, check_assumptions, hilbert_subspace, induced_transformations, induced_transformations_in,
    regular_representation, verify_theorem1, HilbertBasis, QuestionStateSet, QuestionStates, LEMMA2_MARGIN,
};
pub use model::{validate_model, FiniteSymmetryModel, Variable};
pub use perm::{group_closure, PermGroup, Permutation, MAX_GROUP_ORDER};
pub use words::{
    detect_multivaluedness, random_word, verify_word_homomorphism, word_image, GroupWord, Letter, Multivaluedness,
    MultivaluednessSummary, TransferWords, WordEnumeration, MAX_WORDS,
};

/// Default enumeration depth for word searches.
pub const DEFAULT_MAX_WORD_LEN: usize = 6;

/// A model satisfying the structural relations, with a multivalued word
/// pair for its transfer map.
pub const TWO_VARIABLE_MODEL: &str = include_str!("../../models/two_variable.json");

/// A model violating the value alignment and the overlap bound.
pub const BAD_MODEL: &str = include_str!("../../models/bad_model.json");

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, c, ComplexVector};
    use crate::report::{Subject, Verdict};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn good() -> FiniteSymmetryModel {
        FiniteSymmetryModel::from_json(TWO_VARIABLE_MODEL).unwrap()
    }

    fn bad() -> FiniteSymmetryModel {
        FiniteSymmetryModel::from_json(BAD_MODEL).unwrap()
    }

    fn single_subgroup() -> FiniteSymmetryModel {
        FiniteSymmetryModel::from_json(
            r#"{"phi_size": 4, "distinguished": 0,
                "variables": [{"label": "z", "theta": [0, 0, 1, 1]}],
                "subgroups": {"z": [[2, 3, 0, 1]]}}"#,
        )
        .unwrap()
    }

    fn commuting() -> FiniteSymmetryModel {
        FiniteSymmetryModel::from_json(
            r#"{"phi_size": 4, "distinguished": 0,
                "variables": [{"label": "a", "theta": [0, 1, 0, 1]}, {"label": "b", "theta": [0, 1, 0, 1]}],
                "subgroups": {"a": [[2, 1, 0, 3], [0, 3, 2, 1]], "b": [[0, 3, 2, 1]]},
                "transfer": {"ab": [0, 3, 2, 1]}}"#,
        )
        .unwrap()
    }

    fn perm(images: &[usize]) -> Permutation {
        Permutation::new(images.to_vec()).unwrap()
    }

    #[test]
    fn model_loading_errors_name_the_field() {
        let err = |s: &str| FiniteSymmetryModel::from_json(s).unwrap_err().to_string();
        let base = |theta: &str, extra: &str| {
            format!(r#"{{"phi_size": 3, "distinguished": 0, "variables": [{{"label": "x", "theta": {theta}}}]{extra}}}"#)
        };
        assert!(err(&base("[0, 1]", "")).contains("variables[0].theta"));
        assert!(err(&base("[0, 1, 1]", r#", "subgroups": {"x": [[0, 0, 1]]}"#)).contains("subgroups.x[0]"));
        assert!(err(&base("[0, 1, 1]", r#", "subgroups": {"y": []}"#)).contains("subgroups.y"));
        assert!(err(&base("[0, 1, 1]", r#", "transfer": {"xq": [0, 1, 2]}"#)).contains("transfer.xq"));
        assert!(err(&base("[0, 1, 1]", r#", "extra": 1"#)).contains("unknown field"));
        let two = r#"{"phi_size": 2, "distinguished": 0,
            "variables": [{"label": "x", "theta": [0, 1]}, {"label": "y", "theta": [0, 1]}]}"#;
        assert!(err(two).contains("missing map"));
        let far = r#"{"phi_size": 2, "distinguished": 3, "variables": [{"label": "x", "theta": [0, 1]}]}"#;
        assert!(err(far).contains("distinguished"));
    }

    #[test]
    fn ambiguous_transfer_keys_are_rejected() {
        let text = r#"{"phi_size": 2, "distinguished": 0,
            "variables": [{"label": "a", "theta": [0, 1]}, {"label": "ab", "theta": [0, 1]},
                          {"label": "b", "theta": [0, 1]}, {"label": "bb", "theta": [0, 1]}],
            "transfer": {"abb": [0, 1], "aab": [0, 1], "ab": [0, 1], "abb0": [0, 1]}}"#;
        let msg = FiniteSymmetryModel::from_json(text).unwrap_err().to_string();
        assert!(msg.contains("more than one way") || msg.contains("two concatenated"), "{msg}");
    }

    #[test]
    fn distinguished_variable_is_moved_first() {
        let m = FiniteSymmetryModel::from_json(
            r#"{"phi_size": 2, "distinguished": 1,
                "variables": [{"label": "p", "theta": [0, 1]}, {"label": "q", "theta": [1, 0]}],
                "transfer": {"qp": [1, 0]}}"#,
        )
        .unwrap();
        assert_eq!(m.label(0), "q");
        assert_eq!(m.transfer(1, 0).unwrap(), perm(&[1, 0]).inverse());
        assert_eq!(validate_model(&m).verdict, Verdict::Pass);
    }

    #[test]
    fn validation_of_bundled_models() {
        let r = validate_model(&good());
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.witnesses);
        assert_eq!(r.details["relabelings"][0]["identity"], true);

        let r = validate_model(&bad());
        assert_eq!(r.subject, Subject::Lemma1);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.witnesses.iter().any(|w| w["check"] == "relabeling_not_injective"));
    }

    #[test]
    fn relabeled_values_are_aligned() {
        // θ¹ uses different value ids but the same partition through k_01.
        let m = FiniteSymmetryModel::from_json(
            r#"{"phi_size": 4, "distinguished": 0,
                "variables": [{"label": "0", "theta": [0, 0, 1, 1]}, {"label": "1", "theta": [7, 5, 5, 7]}],
                "transfer": {"01": [1, 2, 3, 0]}}"#,
        )
        .unwrap();
        let r = validate_model(&m);
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.witnesses);
        assert_eq!(r.metrics["relabeled_pairs"], 1.0);
        // ρ(θ¹(φ)) = θ⁰(k_01 φ) pointwise
        let rho: BTreeMap<i64, i64> = r.details["relabelings"][0]["relabeling"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (p[0].as_i64().unwrap(), p[1].as_i64().unwrap()))
            .collect();
        let k = m.transfer(0, 1).unwrap();
        for phi in 0..4 {
            assert_eq!(rho[&m.variables()[1].theta[phi]], m.variables()[0].theta[k.apply(phi)]);
        }
    }

    #[test]
    fn broken_relation_and_level_sets_are_reported() {
        let m = FiniteSymmetryModel::from_json(
            r#"{"phi_size": 4, "distinguished": 0,
                "variables": [{"label": "0", "theta": [0, 0, 1, 1]}, {"label": "1", "theta": [0, 1, 0, 1]}],
                "subgroups": {"0": [[1, 2, 3, 0]]},
                "transfer": {"01": [0, 1, 2, 3]}}"#,
        )
        .unwrap();
        let r = validate_model(&m);
        assert_eq!(r.verdict, Verdict::Fail);
        let checks: Vec<_> = r.witnesses.iter().map(|w| w["check"].as_str().unwrap()).collect();
        assert!(checks.contains(&"transfer_relation"));
        assert!(checks.contains(&"level_sets_not_permuted"));
    }

    #[test]
    fn induced_transformations_examples() {
        let m = FiniteSymmetryModel::from_json(
            r#"{"phi_size": 4, "distinguished": 0, "variables": [{"label": "0", "theta": [0, 0, 1, 1]}]}"#,
        )
        .unwrap();
        let s4 = group_closure(4, &[perm(&[1, 0, 2, 3]), perm(&[1, 2, 3, 0])]).unwrap();
        assert_eq!(s4.len(), 24);
        let swap: BTreeMap<i64, i64> = [(0, 1), (1, 0)].into();
        let found = induced_transformations_in(&m, 0, &swap, &s4).unwrap();
        assert!(found.contains(&Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap()));
        assert!(found.contains(&Permutation::from_cycles(4, &[&[0, 3], &[1, 2]]).unwrap()));
        assert_eq!(found.len(), 4);

        let id: BTreeMap<i64, i64> = [(0, 0), (1, 1)].into();
        assert!(induced_transformations(&m, 0, &id).unwrap().contains(&Permutation::identity(4)));
        let outside: BTreeMap<i64, i64> = [(0, 2), (1, 0)].into();
        assert!(induced_transformations(&m, 0, &outside).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let m = single_subgroup();
        let h = hilbert_subspace(&m).unwrap();
        assert_eq!(h.dim(), 2);
        let r = 1.0 / 2f64.sqrt();
        assert_eq!(h.functions[0].amplitudes(), &[c(r, 0.0), c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let h = hilbert_subspace(&good()).unwrap();
        assert_eq!(h.dim(), 3);
        assert_eq!(h.level_sets, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        assert!(h.functions.iter().all(|f| f.amplitudes().iter().all(|z| z.re == 0.0 || (z.re - r).abs() < 1e-15)));
        assert!(linalg::orthonormality_deviation(&h.functions).unwrap() <= 1e-12);

        let flat = FiniteSymmetryModel::from_json(
            r#"{"phi_size": 3, "distinguished": 0, "variables": [{"label": "0", "theta": [4, 4, 4]}]}"#,
        )
        .unwrap();
        assert!(matches!(hilbert_subspace(&flat), Err(crate::Error::HilbertDimensionTooSmall(1))));
    }

    #[test]
    fn regular_representation_examples() {
        let cycle = perm(&[1, 2, 0]);
        let group = PermGroup::generate(3, std::slice::from_ref(&cycle)).unwrap();
        let f = ComplexVector::basis(3, 0);
        assert_eq!(regular_representation(&group, &Permutation::identity(3), &f).unwrap(), f);
        assert_eq!(regular_representation(&group, &cycle, &f).unwrap(), ComplexVector::basis(3, cycle.apply(0)));
        assert!(matches!(
            regular_representation(&group, &perm(&[1, 0, 2]), &f),
            Err(crate::Error::NotInGroup)
        ));

        let m = good();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in m.whole_group().elements().iter().take(60) {
            let f = crate::qubit::random_unit_vector(6, &mut rng);
            let g = regular_representation(m.whole_group(), k, &f).unwrap();
            assert!((g.norm() - f.norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn distinguished_subgroup_keeps_h_stable() {
        let m = good();
        let h = hilbert_subspace(&m).unwrap();
        for k in m.subgroup(0).elements() {
            for f in &h.functions {
                let (_, residual) = h.coordinates(&regular_representation(m.whole_group(), k, f).unwrap()).unwrap();
                assert!(residual <= 1e-12);
            }
        }
    }

    #[test]
    fn word_image_examples() {
        let m = good();
        let (k, k0) = word_image(&m, &GroupWord::empty()).unwrap();
        assert!(k.is_identity() && k0.is_identity());

        let w = GroupWord::reduced(&m, &[Letter { subgroup: 0, element: 1 }]).unwrap();
        let (k, k0) = word_image(&m, &w).unwrap();
        assert_eq!(k, k0);

        // By hand: letter images are k_01·k·k_10 for the second subgroup.
        let x = m.subgroup(0).element(1).unwrap().clone();
        let y = m.subgroup(1).element(2).unwrap().clone();
        let s = m.transfer(0, 1).unwrap();
        let w = GroupWord::reduced(&m, &[Letter { subgroup: 0, element: 1 }, Letter { subgroup: 1, element: 2 }]).unwrap();
        let (k, k0) = word_image(&m, &w).unwrap();
        assert_eq!(k, x.compose(&y));
        assert_eq!(k0, x.compose(&s.compose(&y).compose(&s.inverse())));

        let bogus = GroupWord::reduced(&m, &[Letter { subgroup: 5, element: 1 }]);
        assert!(bogus.is_err());
        let bogus = GroupWord::reduced(&m, &[Letter { subgroup: 1, element: 99 }]);
        assert!(bogus.is_err());
    }

    #[test]
    fn words_merge_within_subgroups() {
        let m = good();
        let c1 = Letter { subgroup: 0, element: 1 };
        let c2 = Letter { subgroup: 0, element: 2 };
        let w = GroupWord::reduced(&m, &[c1, c2]).unwrap();
        assert!(w.is_empty(), "an element times its inverse cancels");
        let w = GroupWord::reduced(&m, &[c1, c1]).unwrap();
        assert_eq!(w.letters(), &[c2]);
    }

    #[test]
    fn word_image_is_multiplicative() {
        let m = good();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let w1 = random_word(&m, 5, &mut rng);
            let w2 = random_word(&m, 5, &mut rng);
            let (k1, i1) = word_image(&m, &w1).unwrap();
            let (k2, i2) = word_image(&m, &w2).unwrap();
            let (k, i) = word_image(&m, &w1.concat(&m, &w2).unwrap()).unwrap();
            assert_eq!(k, k1.compose(&k2));
            assert_eq!(i, i1.compose(&i2));
        }
    }

    #[test]
    fn multivaluedness_examples() {
        let mv = detect_multivaluedness(&single_subgroup(), 6).unwrap();
        assert_eq!(mv.summary().multivalued_elements, 0);
        assert_eq!(mv.report(&single_subgroup()).verdict, Verdict::Fail);

        let m = commuting();
        let mv = detect_multivaluedness(&m, 6).unwrap();
        assert_eq!(mv.summary().multivalued_elements, 0);
        assert!(mv.conjugation_trivial);
        assert!(matches!(mv.transfers[1], Some(TransferWords::SingleValued { .. })));
        assert_eq!(mv.report(&m).verdict, Verdict::Fail);

        let m = good();
        let mv = detect_multivaluedness(&m, 6).unwrap();
        let Some(TransferWords::Multivalued { first, second, first_image, second_image }) = &mv.transfers[1] else {
            panic!("expected a multivalued pair");
        };
        assert_ne!(first_image, second_image);
        let k01 = m.transfer(0, 1).unwrap();
        assert_eq!(word_image(&m, first).unwrap(), (k01.clone(), first_image.clone()));
        assert_eq!(word_image(&m, second).unwrap().0, k01);
        assert!(first.len() <= second.len());
        assert_eq!(mv.report(&m).verdict, Verdict::Pass);
        assert!(detect_multivaluedness(&m, 0).is_err());
    }

    #[test]
    fn enumeration_order_is_by_length_then_letters() {
        let m = good();
        let e = WordEnumeration::run(&m, 3).unwrap();
        let words: Vec<_> = (0..e.word_count() as u32).map(|i| e.word(i)).collect();
        assert!(words.windows(2).all(|w| w[0].len() <= w[1].len()));
        // 4 letters, no two adjacent from one subgroup: 1 + 4 + 8 + 16
        assert_eq!(words.len(), 29);
        let same_len: Vec<_> = words.iter().filter(|w| w.len() == 2).map(|w| w.letters().to_vec()).collect();
        let mut sorted = same_len.clone();
        sorted.sort();
        assert_eq!(same_len, sorted);
    }

    #[test]
    fn question_states() {
        let m = good();
        let mv = detect_multivaluedness(&m, 6).unwrap();
        let set = build_question_states(&m, &mv).unwrap();
        assert_eq!(set.built.len(), 2);
        for (i, s) in set.built[0].states.iter().enumerate() {
            assert_eq!(s, &ComplexVector::basis(3, i));
        }
        let family = &set.built[1];
        assert!(!family.shift.is_identity());
        assert!(family.outside_residual <= 1e-12);
        assert!(linalg::orthonormality_deviation(&family.states).unwrap() <= 1e-12);
        // The shift lies in K⁰, so it permutes level sets: each |1;i⟩ is some |0;π(i)⟩.
        for s in &family.states {
            assert!(set.built[0].states.iter().any(|t| linalg::phase_equal(s, t, 1e-9).unwrap()));
        }
    }

    #[test]
    fn theorem1_reports() {
        let r = verify_theorem1(&single_subgroup(), 6, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);

        let r = verify_theorem1(&good(), 6, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.witnesses.iter().all(|w| w["check"] == "distinctness"));
        assert_eq!(r.metrics["collisions"], 3.0);
        assert!(r.metrics["max_gram_deviation"] <= 1e-12);

        let r = verify_theorem1(&commuting(), 6, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Undetermined);
    }

    #[test]
    fn assumption_reports() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let subjects = |rs: &[crate::report::VerificationReport]| rs.iter().map(|r| (r.subject, r.verdict)).collect::<Vec<_>>();

        let trivial = FiniteSymmetryModel::from_json(
            r#"{"phi_size": 3, "distinguished": 0, "variables": [{"label": "0", "theta": [0, 1, 1]}]}"#,
        )
        .unwrap();
        let rs = check_assumptions(&trivial, 6, &mut rng).unwrap();
        let by = subjects(&rs);
        assert!(by.contains(&(Subject::Assumption3a, Verdict::Pass)));
        assert!(by.contains(&(Subject::Lemma2, Verdict::Pass)));

        let rs = check_assumptions(&bad(), 6, &mut rng).unwrap();
        let lemma2 = rs.iter().find(|r| r.subject == Subject::Lemma2).unwrap();
        assert_eq!(lemma2.verdict, Verdict::Fail);
        assert!(!lemma2.witnesses.is_empty());

        let rs = check_assumptions(&good(), 6, &mut rng).unwrap();
        let by = subjects(&rs);
        assert_eq!(
            by,
            vec![
                (Subject::Assumption1, Verdict::Pass),
                (Subject::Assumption2, Verdict::Pass),
                (Subject::Assumption3a, Verdict::Fail),
                (Subject::Assumption3b, Verdict::Pass),
                (Subject::Assumption3c, Verdict::Fail),
                (Subject::Lemma2, Verdict::Pass),
                (Subject::Prop3, by[6].1),
            ]
        );
        let a3a = &rs[2];
        assert_eq!(a3a.metrics["reducible_cyclic_subgroups"], a3a.metrics["cyclic_subgroups"]);
        assert_eq!(rs[6].metrics["multiplicativity_failures"], 0.0);
    }

    #[test]
    fn value_group_restriction_changes_3c() {
        let text = TWO_VARIABLE_MODEL.replacen("\"transfer\"", "\"value_groups\": {\"0\": []},\n  \"transfer\"", 1);
        let m = FiniteSymmetryModel::from_json(&text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rs = check_assumptions(&m, 6, &mut rng).unwrap();
        let a3c = rs.iter().find(|r| r.subject == Subject::Assumption3c).unwrap();
        assert_eq!(a3c.verdict, Verdict::Pass);
    }
}
