use std::collections::BTreeSet;

use modborel::diagrams::{eval_staged, StructureStream};
use modborel::formulas::{classify, parse_formula, prenex, Compiled, FiniteStructure, Formula, Level, Vocabulary};
use modborel::pointclasses::{verdict_prefix, BorelLevel};
use modborel::reductions::{linord_vocabulary, matching_construction, r_linord, sentence_star};
use modborel::theories::*;
use modborel::Verdict;

fn p_vocab() -> Vocabulary {
    Vocabulary::parse("P/1").unwrap()
}

fn r_vocab() -> Vocabulary {
    Vocabulary::parse("R/2").unwrap()
}

fn strings(fs: &[Formula]) -> BTreeSet<String> {
    fs.iter().map(|f| f.to_string()).collect()
}

// Independent counting oracle: build the model with `big` elements per
// infinite class and evaluate directly.
fn monadic_structure(p: Card, not_p: Card, big: usize) -> FiniteStructure {
    let n = |c: Card| match c {
        Card::Fin(k) => k,
        Card::Inf => big,
    };
    let (a, b) = (n(p), n(not_p));
    let mut s = FiniteStructure::empty(&p_vocab(), a + b).unwrap();
    for e in 0..a {
        s.set(0, &[e], true);
    }
    s
}

fn matching_structure(pairs: Card, unmatched: Card, big: usize) -> FiniteStructure {
    let n = |c: Card| match c {
        Card::Fin(k) => k,
        Card::Inf => big,
    };
    let (a, b) = (n(pairs), n(unmatched));
    let mut s = FiniteStructure::empty(&r_vocab(), 2 * a + b).unwrap();
    for i in 0..a {
        s.set(0, &[2 * i, 2 * i + 1], true);
        s.set(0, &[2 * i + 1, 2 * i], true);
    }
    s
}

#[test]
fn fragment_examples() {
    let all_p = level_fragment(&TheoryHandle::all_p(), Level::e(1), 2).unwrap();
    let have = strings(&all_p.sentences);
    assert!(have.contains("(exists x0 (P x0))"));
    assert!(have.contains("(exists x0 (exists x1 (and (P x0) (P x1) (not (= x0 x1)))))"));
    assert!(all_p.sentences.iter().all(|f| Level::e(1).contains(classify(f))));

    let ic = level_fragment(&TheoryHandle::inf_coinf(), Level::e(1), 2).unwrap();
    assert!(have.is_subset(&strings(&ic.sentences)));
    assert!(ic.sentences.len() > all_p.sentences.len());

    let perfect = level_fragment(&TheoryHandle::perfect_matching(), Level::e(2), 2).unwrap();
    let unmatched = parse_formula("(exists x0 (forall x1 (not (R x0 x1))))", &r_vocab()).unwrap();
    assert!(!perfect.contains(&unmatched));
    let infinf = level_fragment(&TheoryHandle::inf_inf_matching(), Level::e(2), 2).unwrap();
    assert!(infinf.contains(&unmatched));
}

#[test]
fn rank_above_the_cap_is_an_error() {
    let err = level_fragment(&TheoryHandle::all_p(), Level::e(1), MAX_RANK + 1).unwrap_err();
    assert_eq!(err, TheoryError::RankAboveCap { cap: MAX_RANK + 1, max: MAX_RANK });
}

#[test]
fn fragments_grow_by_prefix() {
    for t in [TheoryHandle::inf_coinf(), TheoryHandle::inf_inf_matching(), TheoryHandle::linorder(OrderShape::star())] {
        for lambda in [Level::e(1), Level::a(2)] {
            let small = level_fragment(&t, lambda, 1).unwrap();
            let large = level_fragment(&t, lambda, 2).unwrap();
            assert!(large.sentences.len() >= small.sentences.len());
            assert_eq!(large.sentences[..small.sentences.len()], small.sentences[..], "{} {lambda}", t.id);
        }
    }
}

#[test]
fn containment_examples() {
    let r = check_fragment_containment(&TheoryHandle::all_p(), &TheoryHandle::inf_coinf(), Level::e(1), 3).unwrap();
    assert!(r.contained(), "{:?}", r.counterexamples);
    assert!(r.checked > 100);

    let perfect = TheoryHandle::perfect_matching();
    let infinf = TheoryHandle::inf_inf_matching();
    let r = check_fragment_containment(&perfect, &infinf, Level::e(2), 3).unwrap();
    assert!(r.contained(), "{:?}", r.counterexamples);

    let back = check_fragment_containment(&infinf, &perfect, Level::e(2), 3).unwrap();
    let unmatched = parse_formula("(exists x0 (forall x1 (not (R x0 x1))))", &r_vocab()).unwrap();
    assert!(back.counterexamples.contains(&unmatched));

    let mixed = check_fragment_containment(&perfect, &TheoryHandle::all_p(), Level::e(1), 2);
    assert!(matches!(mixed, Err(TheoryError::Config(_))));
}

#[test]
fn oracles_agree_with_direct_evaluation() {
    let q = 3;
    for (family, vocab) in [(Family::Monadic, p_vocab()), (Family::Matching, r_vocab())] {
        let space = SentenceSpace::new(&vocab, q, 2);
        let sentences = space.sentences();
        for a in Card::classes(q) {
            for b in Card::classes(q) {
                let Ok(t) = (match family {
                    Family::Monadic => TheoryHandle::monadic(a, b),
                    _ => TheoryHandle::matching(a, b),
                }) else {
                    continue;
                };
                let s = match family {
                    Family::Monadic => monadic_structure(a, b, 7),
                    _ => matching_structure(a, b, 7),
                };
                for f in &sentences {
                    let direct = Compiled::new(f, &vocab).unwrap().holds(&s);
                    assert_eq!(t.decide(f).unwrap(), direct, "{} on {}", f, t.id);
                }
            }
        }
    }
}

#[test]
fn order_oracle_agrees_with_stages_on_level_one() {
    let vocab = linord_vocabulary();
    let mut st = r_linord();
    st.run_to(12);
    let pres = st.presentation();
    let stage = pres.structure(pres.elements_after(12));
    let t = TheoryHandle::linorder(OrderShape::star());
    let space = SentenceSpace::new(&vocab, 3, 2);
    let mut checked = 0;
    for f in space.sentences() {
        let level = classify(&f);
        if Level::e(1).contains(level) || Level::a(1).contains(level) {
            let direct = Compiled::new(&f, &vocab).unwrap().holds(&stage);
            assert_eq!(t.decide(&f).unwrap(), direct, "{f}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn star_on_the_presentations() {
    let star = sentence_star();
    assert_eq!(classify(&star), Level::e(3));
    assert!(TheoryHandle::linorder(OrderShape::star()).decide(&star).unwrap());
    assert!(!TheoryHandle::linorder(OrderShape::dense()).decide(&star).unwrap());
}

#[test]
fn theory_handles_parse() {
    let t: TheoryHandle = "monadic P=inf notP=0".parse().unwrap();
    assert_eq!(t.id, TheoryHandle::all_p().id);
    let m: TheoryHandle = "matching inf inf".parse().unwrap();
    assert_eq!(m.id, TheoryHandle::inf_inf_matching().id);
    let o: TheoryHandle = "linorder 2Q+1+Q".parse().unwrap();
    assert_eq!(o.family(), Some(Family::LinorderS));
    assert!("monadic P=3 notP=2".parse::<TheoryHandle>().is_err());
    assert!("matching inf".parse::<TheoryHandle>().is_err());
    assert!("groups".parse::<TheoryHandle>().is_err());
}

fn complete(
    family: Family,
    phi: &str,
    lambda: Level,
    cap: usize,
) -> Result<(Completion, ModelSpace, Vec<Formula>), TheoryError> {
    let vocab = family.vocabulary();
    let space = family.space(cap);
    let sentences = SentenceSpace::new(&vocab, cap, family.default_literals()).sentences();
    let phi = parse_formula(phi, &vocab).unwrap();
    let c = lindenbaum_complete(&[], &phi, lambda, &space, &sentences, cap, None)?;
    Ok((c, space, sentences))
}

// Independent check of a completion: each tower is the theory of one of its
// survivors, and the postconditions hold sentence by sentence.
fn check_completion(c: &Completion, space: &ModelSpace, sentences: &[Formula], phi: &Formula) {
    assert!(c.counterexamples.is_empty(), "{:?}", c.counterexamples);
    for tower in [&c.plus, &c.minus] {
        assert!(!tower.survivors.is_empty());
        let model = space.models.iter().find(|m| m.label() == tower.survivors[0]).unwrap();
        for (f, b) in &tower.steps {
            assert_eq!(model.holds(f).unwrap(), *b, "{f}");
        }
    }
    let plus_model = space.models.iter().find(|m| m.label() == c.plus.survivors[0]).unwrap();
    let minus_model = space.models.iter().find(|m| m.label() == c.minus.survivors[0]).unwrap();
    assert!(plus_model.holds(phi).unwrap());
    assert!(!minus_model.holds(phi).unwrap());
    for f in &c.theta {
        assert_eq!(c.plus.decides(f), Some(true));
    }
    for f in sentences {
        let l = classify(f);
        if c.lambda.contains(l) && minus_model.holds(f).unwrap() {
            assert!(plus_model.holds(f).unwrap(), "{f}");
        }
        if c.lambda.dual().contains(l) && plus_model.holds(f).unwrap() {
            assert!(minus_model.holds(f).unwrap(), "{f}");
        }
    }
}

#[test]
fn completion_of_a_monadic_sentence() {
    let phi = "(exists x0 (exists x1 (and (P x0) (not (P x1)))))";
    let (c, space, sentences) = complete(Family::Monadic, phi, Level::e(1), 2).unwrap();
    let f = parse_formula(phi, &p_vocab()).unwrap();
    assert_eq!(c.plus.decides(&f), Some(true));
    assert_eq!(c.minus.decides(&f), Some(false));
    check_completion(&c, &space, &sentences, &f);
}

#[test]
fn universal_phi_violates_the_hypothesis() {
    let err = complete(Family::Monadic, "(forall x0 (P x0))", Level::e(1), 2).unwrap_err();
    assert!(matches!(err, TheoryError::PreconditionViolated { .. }));
    // the literal A(1) reading of the examples: phi itself is in the dual level
    let err =
        complete(Family::Monadic, "(exists x0 (exists x1 (and (P x0) (not (P x1)))))", Level::a(1), 2).unwrap_err();
    assert!(matches!(err, TheoryError::PreconditionViolated { .. }));
    let err = complete(Family::Matching, "(exists x0 (forall x1 (not (R x0 x1))))", Level::a(2), 3).unwrap_err();
    assert!(matches!(err, TheoryError::PreconditionViolated { .. }));
}

#[test]
fn completion_of_the_unmatched_sentence() {
    let phi = "(exists x0 (forall x1 (not (R x0 x1))))";
    let (c, space, sentences) = complete(Family::Matching, phi, Level::e(2), 3).unwrap();
    let f = parse_formula(phi, &r_vocab()).unwrap();
    check_completion(&c, &space, &sentences, &f);
    assert_eq!(c.minus.survivors, [TheoryHandle::perfect_matching().id]);
    assert!(c.plus.survivors.iter().all(|l| l.starts_with("matching pairs=inf")), "{:?}", c.plus.survivors);
    assert!(sentences.len() > 1000);
}

// The tower decides every stock sentence the way `t` does.
fn tower_is(tower: &Tower, t: &TheoryHandle) {
    for (f, b) in &tower.steps {
        assert_eq!(t.decide(f).unwrap(), *b, "{f} in {}", t.id);
    }
    assert!(tower.survivors.contains(&t.id), "{:?}", tower.survivors);
}

#[test]
fn split_examples() {
    let space = Family::Matching.space(3);
    let infinf = TheoryHandle::inf_inf_matching();
    let s = split_theory(&infinf, Level::a(2), &space, 3).unwrap();
    assert!(s.counterexamples.is_empty(), "{:?}", s.counterexamples);
    tower_is(&s.t0, &infinf);
    tower_is(&s.t1, &TheoryHandle::perfect_matching());
    assert!(infinf.decide(&s.witness).unwrap());
    assert!(!TheoryHandle::perfect_matching().decide(&s.witness).unwrap());

    let mspace = Family::Monadic.space(3);
    let none = split_theory(&TheoryHandle::all_p(), Level::a(1), &mspace, 3).unwrap_err();
    assert_eq!(none, TheoryError::NoWitness { cap: 3 });

    let ic = TheoryHandle::inf_coinf();
    let s = split_theory(&ic, Level::a(1), &mspace, 3).unwrap();
    assert!(s.counterexamples.is_empty());
    tower_is(&s.t0, &ic);
    assert!(Level::e(1).contains(classify(&s.witness)));
    let t1 = mspace.models.iter().find(|m| m.label() == s.t1.survivors[0]).unwrap();
    assert!(!t1.holds(&s.witness).unwrap());
}

fn diagram_bits(st: &mut StructureStream, stages: usize) -> Vec<bool> {
    st.run_to(stages);
    let pres = st.presentation();
    let n = pres.elements_after(stages);
    let mut bits = Vec::new();
    for m in 0..n {
        pres.push_rank_bits(m, &mut bits);
    }
    bits
}

#[test]
fn axiom_codes_have_the_expected_levels() {
    let single = parse_formula("(exists x0 (forall x1 (not (R x0 x1))))", &r_vocab()).unwrap();
    let code = axioms_to_borel(&AxiomSource::Finite(vec![single]), Level::e(2), &r_vocab()).unwrap();
    assert_eq!(code.level(), BorelLevel::sigma(2));
    let m = axioms_to_borel(&matching_theory_axioms(), Level::e(2), &r_vocab()).unwrap();
    assert_eq!(m.level(), BorelLevel::pi(3));
    let a1 = axioms_to_borel(&AxiomSource::Finite(matching_axioms()), Level::a(1), &r_vocab()).unwrap();
    assert_eq!(a1.level(), BorelLevel::pi(1));
    // a single asymmetric edge R(0,1) is refuted once R(1,0) is read
    let mut s = FiniteStructure::empty(&r_vocab(), 2).unwrap();
    s.set(0, &[0, 1], true);
    let bits = modborel::diagrams::encode(&s).into_bits();
    assert_eq!(verdict_prefix(&a1, &bits), Verdict::False);
}

#[test]
fn false_code_verdicts_are_seen_by_staged_evaluation() {
    use rand::{Rng, SeedableRng};
    let vocab = r_vocab();
    let finite = AxiomSource::Finite(matching_axioms());
    let codes = [
        axioms_to_borel(&finite, Level::a(1), &vocab).unwrap(),
        axioms_to_borel(&matching_theory_axioms(), Level::e(2), &vocab).unwrap(),
    ];
    let axioms = matching_theory_axioms().take(DEFAULT_AXIOM_WINDOW);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut refuted = 0;
    for trial in 0..100 {
        // random symmetric-ish structures, sometimes broken
        let n = 4 + trial % 4;
        let mut s = FiniteStructure::empty(&vocab, n).unwrap();
        for a in 0..n {
            for b in 0..n {
                if rng.gen_bool(0.15) {
                    s.set(0, &[a, b], true);
                    if rng.gen_bool(0.9) {
                        s.set(0, &[b, a], true);
                    }
                }
            }
        }
        let mut st = StructureStream::new(modborel::diagrams::FiniteSource::new(s));
        let stages = n;
        let bits = diagram_bits(&mut st, stages);
        for code in &codes {
            for len in 1..=bits.len() {
                if verdict_prefix(code, &bits[..len]) != Verdict::False {
                    continue;
                }
                refuted += 1;
                let violated = axioms.iter().any(|ax| {
                    let sv = eval_staged(&prenex(ax), &mut st, stages, None);
                    sv.per_stage.iter().take(len + 1).any(|&v| v == Verdict::False)
                });
                assert!(violated, "trial {trial}, prefix {len}");
                break;
            }
        }
    }
    assert!(refuted > 20, "{refuted}");
}

#[test]
fn matching_axiom_code_on_a_good_stream() {
    let vocab = r_vocab();
    let code = axioms_to_borel(&matching_theory_axioms(), Level::e(2), &vocab).unwrap();
    let point = "0;0".parse::<modborel::pointclasses::UPPoint>().unwrap();
    let mut st = matching_construction().stream(&point);
    let bits = diagram_bits(&mut st, 6);
    assert_ne!(verdict_prefix(&code, &bits), Verdict::False);
}
