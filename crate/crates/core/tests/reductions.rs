use modborel::diagrams::{FiniteSource, StructureStream};
use modborel::formulas::random::{random_formula, random_structure, FormulaShape};
use modborel::formulas::{classify, holds, parse_formula, FiniteStructure, Formula, Level, Vocabulary};
use modborel::pointclasses::{
    canonical_set, member_up, pi2_infones_on, wide_battery, MatrixPoint, PointclassKind, Track, UPPoint,
};
use modborel::reductions::*;
use modborel::transducers::{run, ReductionCertificate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn up(s: &str) -> UPPoint {
    s.parse().unwrap()
}

fn assert_certificate(cert: &ReductionCertificate, points: &[UPPoint]) {
    let mismatches = cert.check(points).unwrap();
    assert!(mismatches.is_empty(), "{} mismatches, first {:?}", mismatches.len(), mismatches.first());
}

#[test]
fn matching_certificate_holds_on_the_battery() {
    let mut points = wide_battery(200, 7);
    points.extend([up(";0"), up(";110"), up("1;0")]);
    assert_certificate(&matching_certificate(), &points);
}

#[test]
fn padded_infcoinf_certificate_holds_on_the_battery() {
    assert_certificate(&pad_infcoinf_certificate(), &wide_battery(200, 8));
}

#[test]
fn infcoinf_certificate_holds_on_the_battery() {
    assert_certificate(&infcoinf_certificate(), &wide_battery(200, 9));
}

#[test]
fn infcoinf_examples() {
    let cert = infcoinf_certificate();
    assert_eq!(cert.evaluate(&up("0110;10")).unwrap(), (true, true));
    assert_eq!(cert.evaluate(&up("00;1")).unwrap(), (false, false));
    assert_eq!(cert.evaluate(&up("11;0")).unwrap(), (false, false));
    let out = run(r_infcoinf().as_ref(), up("01;1").bits(), 6, 6).unwrap();
    assert_eq!(out, up("01;1").take(6));
}

#[test]
fn pad_examples_and_equivalence() {
    let t = pad();
    let ones = run(t.as_ref(), up("1;1").bits(), 20, 10).unwrap();
    assert!(ones.iter().step_by(2).all(|&b| b) && ones.iter().skip(1).step_by(2).all(|&b| !b));
    let infones = pi2_infones_on(Track::Whole);
    let (zeros, wanted) = (pi2_infzeros(), canonical_set(&PointclassKind::Pi2InfOnes));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in modborel::pointclasses::random_points(200, 12, 6, 4) {
        let padded = UPPoint::interleave(&[q.clone(), UPPoint::constant(false)]);
        let n = rng.gen_range(1..100);
        assert_eq!(run(t.as_ref(), q.bits(), 2 * n, n).unwrap(), padded.take(2 * n));
        let both = member_up(&infones, &padded).unwrap() && member_up(&zeros, &padded).unwrap();
        assert_eq!(member_up(&wanted, &q).unwrap(), both, "{q}");
    }
}

/// Partner counts of the `a`-elements, recomputed by replaying the
/// schedule from the matrix alone.
fn unmatched_columns_below(x: &MatrixPoint, columns: usize) -> usize {
    (0..columns).filter(|&m| x.column_empty(m)).count()
}

#[test]
fn matching_examples() {
    let cert = matching_certificate();
    assert_eq!(cert.evaluate(&up(";0")).unwrap(), (true, true));
    assert_eq!(cert.evaluate(&up("1;0")).unwrap(), (true, true));
    // triangular numbers are never 2 mod 3, so ";110" has x(m,0) = 1 for every m
    let first_row = up(";110");
    let x = MatrixPoint(first_row.clone());
    assert!((0..200).all(|m| x.get(m, 0)));
    assert_eq!(cert.evaluate(&first_row).unwrap(), (false, false));
    assert_eq!(unmatched_columns_below(&x, 50), 0);

    let stages = 40;
    let mut st = matching_construction().stream(&first_row);
    st.run_to(stages);
    let n = st.presentation().len();
    let shape = matching_shape(&st.presentation().structure(n));
    assert!(shape.is_matching);
    // every a_j with a column read far enough is matched
    let a_elements: Vec<usize> = (0..stages).map(|s| matching_elements_after(&first_row, s)).collect();
    for (j, &a) in a_elements.iter().enumerate().take(8) {
        assert_eq!(shape.partners[a], 1, "a_{j}");
    }
}

#[test]
fn matching_stage_structure_matches_the_schedule() {
    let p = up("0100;10");
    let x = MatrixPoint(p.clone());
    let mut st = matching_construction().stream(&p);
    st.run_to(30);
    let pres = st.presentation();
    let s = pres.structure(pres.len());
    let mut expected = 0;
    let mut first_one = std::collections::HashMap::new();
    for t in 0..30 {
        let (j, k) = modborel::pointclasses::unpair(t);
        if x.get(j, k) && !first_one.contains_key(&j) {
            first_one.insert(j, k);
        }
    }
    for a in 0..s.size() {
        for b in 0..s.size() {
            if s.holds(0, &[a, b]) {
                expected += 1;
            }
        }
    }
    // one c–d edge per stage and one a–b edge per column hit, both directions
    assert_eq!(expected, 2 * (30 + first_one.len()));
}

#[test]
fn linord_stages_are_linear_orders_with_successor_pairs() {
    let mut st = r_linord();
    st.run_to(200);
    let pres = st.presentation();
    let n = pres.len();
    let s = pres.structure(n);
    // an independent check by ranks: `<` is a strict linear order iff the
    // number of predecessors is a permutation of 0..n and agrees with `<`
    let rank: Vec<usize> = (0..n).map(|a| (0..n).filter(|&b| s.holds(0, &[b, a])).count()).collect();
    let mut sorted = rank.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    for a in 0..n {
        for b in 0..n {
            assert_eq!(s.holds(0, &[a, b]), rank[a] < rank[b]);
            if s.holds(1, &[a, b]) {
                assert_eq!(rank[b], rank[a] + 1, "S({a},{b}) skips an element");
            }
        }
    }
    // left-region elements come in S-pairs: every element below the middle
    // has exactly one S-neighbour
    let middle = 2;
    for a in (0..n).filter(|&a| rank[a] < rank[middle]) {
        let partners = (0..n).filter(|&b| s.holds(1, &[a, b]) || s.holds(1, &[b, a])).count();
        assert_eq!(partners, 1, "left element {a}");
    }
    for stage in [1, 5, 50, 120] {
        let m = pres.elements_after(stage);
        assert_eq!(linord_violation(&pres.structure(m)), None);
    }
    assert_eq!(classify(&sentence_star()), Level::e(3));
}

fn converges(vocab: &Vocabulary, make: impl Fn() -> StructureStream, label: &str) {
    let mut reference = make();
    let mut st = marker_construction(vocab).stream(make()).unwrap();
    let rec = MarkerRecovery::new(vocab);
    for n in 1..=50 {
        let Some(want) = reference.stage_view(n, 10_000) else {
            break;
        };
        let agrees = |st: &StructureStream| {
            rec.guess(st.presentation(), st.stages()).is_some_and(|g| g.size() >= n && g.restrict(n) == want)
        };
        while !agrees(&st) {
            assert!(st.stages() < 4 * n && st.advance(), "{label}: no agreement on {n} elements by stage {}", 4 * n);
        }
        for _ in 0..2 {
            if st.advance() {
                assert!(agrees(&st), "{label}: agreement on {n} elements lost at stage {}", st.stages());
            }
        }
    }
}

#[test]
fn marker_recovery_converges_on_shipped_streams() {
    let monadic = monadic_vocabulary();
    let matching = matching_vocabulary();
    for p in ["0;0", ";10", "011;1", "1;0", "0100;10"] {
        let p = up(p);
        converges(&monadic, || infcoinf_construction().stream(&p), "infcoinf");
        converges(&matching, || matching_construction().stream(&p), "matching");
        let section = section_construction(1, 3, &matching).unwrap();
        let sv = section_vocabulary(1, 3, &matching).unwrap();
        converges(&sv, || section.stream(matching_construction().stream(&p)).unwrap(), "section");
        let jv = join_vocabulary(&monadic, &matching).unwrap();
        converges(
            &jv,
            || diff_join(infcoinf_construction().stream(&p), matching_construction().stream(&p)).unwrap(),
            "diffjoin",
        );
    }
    converges(&linord_vocabulary(), r_linord, "linord");
    let graph = graph_construction(&monadic, DEFAULT_MAX_ARITY).unwrap();
    converges(&graph_vocabulary(), || graph.stream(infcoinf_construction().stream(&up(";10"))).unwrap(), "tograph");
}

#[test]
fn marker_round_trips_finite_structures() {
    let v = Vocabulary::parse("R/2").unwrap();
    let s = FiniteStructure::parse(&v, "size=2; R 0 1").unwrap();
    let mut st = marker_construction(&v).stream(StructureStream::new(FiniteSource::new(s.clone()))).unwrap();
    let rec = MarkerRecovery::new(&v);
    st.run_to(100);
    assert!(st.is_exhausted());
    assert_eq!(rec.guess(st.presentation(), st.stages()), Some(s));

    let mut inf = infcoinf_construction().stream(&up("0110;100"));
    let truncated = inf.stage_view(50, 100).unwrap();
    let monadic = monadic_vocabulary();
    let mut st =
        marker_construction(&monadic).stream(StructureStream::new(FiniteSource::new(truncated.clone()))).unwrap();
    st.run_to(1000);
    assert_eq!(MarkerRecovery::new(&monadic).guess(st.presentation(), st.stages()), Some(truncated));
}

fn finished(mut st: StructureStream) -> FiniteStructure {
    st.run_to(usize::MAX);
    let pres = st.presentation();
    pres.structure(pres.len())
}

#[test]
fn marker_lift_preserves_truth_and_shifts_levels() {
    let v = Vocabulary::parse("R/2").unwrap();
    let axioms = [
        "(forall x0 (not (R x0 x0)))",
        "(forall x0 (forall x1 (implies (R x0 x1) (R x1 x0))))",
        "(forall x0 (forall x1 (forall x2 (implies (and (R x0 x1) (R x0 x2)) (= x1 x2)))))",
        "(exists x0 (exists x1 (and (not (= x0 x1)) (forall x2 (and (not (R x0 x2)) (not (R x1 x2)))))))",
        "(exists x0 (exists x1 (exists x2 (exists x3 (and (not (= x0 x2)) (R x0 x1) (R x2 x3))))))",
    ];
    let axioms: Vec<Formula> = axioms.iter().map(|a| parse_formula(a, &v).unwrap()).collect();
    let all = Formula::and(axioms.clone());
    assert_eq!(classify(&all), Level::e(2));
    let lifted = marker_lift(&all);
    assert_eq!(classify(&lifted), Level::e(3));

    let mv = marker_vocabulary(&v);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let shape = FormulaShape { max_depth: 3, max_quantifiers: 2, ..FormulaShape::default() };
    for _ in 0..60 {
        let size = rng.gen_range(1..=3);
        let s = random_structure(&mut rng, &v, size, 0.4);
        let m = finished(marker_construction(&v).stream(StructureStream::new(FiniteSource::new(s.clone()))).unwrap());
        let f = random_formula(&mut rng, &v, &shape);
        if !f.is_sentence() {
            continue;
        }
        let g = marker_lift(&f);
        g.check(&mv).unwrap();
        assert_eq!(holds(&f, &s).unwrap(), holds(&g, &m).unwrap(), "{f} on {s}");
    }
    for a in &axioms {
        let s = FiniteStructure::parse(&v, "size=4; R 0 1; R 1 0").unwrap();
        let m = finished(marker_construction(&v).stream(StructureStream::new(FiniteSource::new(s.clone()))).unwrap());
        assert_eq!(holds(a, &s).unwrap(), holds(&marker_lift(a), &m).unwrap(), "{a}");
        for ax in marker_structure_axioms(&v) {
            assert!(holds(&ax, &m).unwrap(), "{ax}");
        }
    }
}

#[test]
fn diff_join_keeps_sides_apart() {
    let monadic = monadic_vocabulary();
    let p = up(";10");
    let zero = up(";0");
    let mut j = diff_join(infcoinf_construction().stream(&p), matching_construction().stream(&zero)).unwrap();
    j.run_to(60);
    let pres = j.presentation();
    let s = pres.structure(pres.settled());
    let vocab = s.vocabulary().clone();
    let u = vocab.index_of("U").unwrap();
    let side = |e: usize| s.holds(u, &[e]);
    for sym in 0..vocab.len() {
        for t in s.facts(sym) {
            assert!(t.iter().all(|&e| side(e) == side(t[0])), "{} {t:?} is mixed", vocab.name(sym));
            let from_a = sym < monadic.len() || sym == u;
            if sym != u {
                assert_eq!(side(t[0]), from_a, "{} on the wrong side", vocab.name(sym));
            }
        }
    }
    for e in 0..s.size() {
        assert_eq!(side(e), e % 2 == 0);
    }
    // per side: P infinite and coinfinite on U, a matching with both kinds on ¬U
    let us: Vec<usize> = (0..s.size()).filter(|&e| side(e)).collect();
    let ps = us.iter().filter(|&&e| s.holds(0, &[e])).count();
    assert!(ps > 10 && us.len() - ps > 10);
    let r = vocab.index_of("R").unwrap();
    let others: Vec<usize> = (0..s.size()).filter(|&e| !side(e)).collect();
    let partners = |e: usize| others.iter().filter(|&&f| s.holds(r, &[e, f])).count();
    assert!(others.iter().all(|&e| partners(e) <= 1));
    assert!(others.iter().filter(|&&e| partners(e) == 0).count() > 10);
    assert!(others.iter().filter(|&&e| partners(e) == 1).count() > 10);
}

#[test]
fn diff_join_of_two_all_p_streams() {
    let monadic = monadic_vocabulary();
    let ones = up(";1");
    let renamed = rename_construction(&monadic, "_b").unwrap();
    let b = renamed.stream(infcoinf_construction().stream(&ones)).unwrap();
    let mut j = diff_join(infcoinf_construction().stream(&ones), b).unwrap();
    j.run_to(30);
    let pres = j.presentation();
    let s = pres.structure(pres.settled());
    let v = s.vocabulary();
    let (p, pb, u) = (v.index_of("P").unwrap(), v.index_of("P_b").unwrap(), v.index_of("U").unwrap());
    for e in 0..s.size() {
        if s.holds(u, &[e]) {
            assert!(s.holds(p, &[e]) && !s.holds(pb, &[e]));
        } else {
            assert!(s.holds(pb, &[e]) && !s.holds(p, &[e]));
        }
    }
    assert!(diff_join(infcoinf_construction().stream(&ones), infcoinf_construction().stream(&ones)).is_err());
}

#[test]
fn sections_realize_one_predicate() {
    let matching = matching_vocabulary();
    for k in 0..3 {
        let sec = section_construction(k, 3, &matching).unwrap();
        let mut st = sec.stream(matching_construction().stream(&up(";0"))).unwrap();
        for stage in 1..=10 {
            st.run_to(stage);
            let pres = st.presentation();
            let s = pres.structure(pres.len());
            for e in 0..s.size() {
                let realized: Vec<usize> = (0..3).filter(|&i| s.holds(i, &[e])).collect();
                assert_eq!(realized, [k], "element {e} at stage {stage}");
            }
            let r = s.vocabulary().index_of(&format!("L{k}_R")).unwrap();
            assert!(s.facts(r).iter().flatten().all(|&e| s.holds(k, &[e])));
        }
    }
    assert_eq!(section_construction(3, 3, &matching).err(), Some(SectionError::OutOfRange { k: 3, sections: 3 }));
}

#[test]
fn graph_coding_round_trips_stagewise() {
    let monadic = monadic_vocabulary();
    let g = graph_construction(&monadic, DEFAULT_MAX_ARITY).unwrap();
    for p in ["0110;10", ";1", "1;0"] {
        let p = up(p);
        let mut st = g.stream(infcoinf_construction().stream(&p)).unwrap();
        let mut reference = infcoinf_construction().stream(&p);
        for stage in 1..=40 {
            st.run_to(stage);
            reference.run_to(stage);
            let pres = st.presentation();
            let graph = pres.structure(pres.len());
            for a in 0..graph.size() {
                assert!(!graph.holds(0, &[a, a]));
                for b in 0..graph.size() {
                    assert_eq!(graph.holds(0, &[a, b]), graph.holds(0, &[b, a]));
                }
            }
            let want = reference.presentation().structure(reference.presentation().len());
            assert_eq!(decode_graph(&graph, &monadic).unwrap(), want, "stage {stage}");
        }
    }
    let wide = Vocabulary::parse("T/5").unwrap();
    assert!(matches!(graph_construction(&wide, 4), Err(GraphError::ArityAboveBound { arity: 5, .. })));
}

/// Colour refinement followed by individualization: a complete
/// isomorphism test for small graphs.
fn graphs_isomorphic(g: &FiniteStructure, h: &FiniteStructure) -> bool {
    let n = g.size();
    if n != h.size() {
        return false;
    }
    let adj = |s: &FiniteStructure| -> Vec<Vec<usize>> {
        (0..n).map(|a| (0..n).filter(|&b| s.holds(0, &[a, b])).collect()).collect()
    };
    let (ga, ha) = (adj(g), adj(h));
    search(&ga, &ha, vec![0; n], vec![0; n])
}

fn refine(
    ga: &[Vec<usize>],
    ha: &[Vec<usize>],
    mut cg: Vec<usize>,
    mut ch: Vec<usize>,
) -> Option<(Vec<usize>, Vec<usize>)> {
    loop {
        let sig = |adj: &[Vec<usize>], c: &[usize], v: usize| {
            let mut ns: Vec<usize> = adj[v].iter().map(|&w| c[w]).collect();
            ns.sort_unstable();
            (c[v], ns)
        };
        let mut sigs: Vec<_> =
            (0..ga.len()).map(|v| sig(ga, &cg, v)).chain((0..ha.len()).map(|v| sig(ha, &ch, v))).collect();
        let mut keys = sigs.clone();
        keys.sort();
        keys.dedup();
        let colour = |s: &(usize, Vec<usize>)| keys.binary_search(s).unwrap();
        let ng: Vec<usize> = sigs.drain(..ga.len()).map(|s| colour(&s)).collect();
        let nh: Vec<usize> = sigs.iter().map(colour).collect();
        let mut hist_g = ng.clone();
        let mut hist_h = nh.clone();
        hist_g.sort_unstable();
        hist_h.sort_unstable();
        if hist_g != hist_h {
            return None;
        }
        let classes = |c: &[usize]| c.iter().collect::<std::collections::HashSet<_>>().len();
        let stable = classes(&ng) == classes(&cg);
        (cg, ch) = (ng, nh);
        if stable {
            return Some((cg, ch));
        }
    }
}

fn search(ga: &[Vec<usize>], ha: &[Vec<usize>], cg: Vec<usize>, ch: Vec<usize>) -> bool {
    let Some((cg, ch)) = refine(ga, ha, cg, ch) else {
        return false;
    };
    let n = ga.len();
    let mut counts = std::collections::HashMap::new();
    for &c in &cg {
        *counts.entry(c).or_insert(0) += 1;
    }
    let Some(v) = (0..n).find(|&v| counts[&cg[v]] > 1) else {
        // discrete: the colouring is a bijection; check it
        let mut map = vec![0; n];
        for v in 0..n {
            map[v] = (0..n).find(|&w| ch[w] == cg[v]).unwrap();
        }
        return (0..n).all(|a| ga[a].len() == ha[map[a]].len() && ga[a].iter().all(|&b| ha[map[a]].contains(&map[b])));
    };
    let fresh = n * 4 + 1;
    (0..n).filter(|&w| ch[w] == cg[v]).any(|w| {
        let (mut cg2, mut ch2) = (cg.clone(), ch.clone());
        cg2[v] = fresh;
        ch2[w] = fresh;
        search(ga, ha, cg2, ch2)
    })
}

#[test]
fn isomorphic_inputs_give_isomorphic_graphs() {
    let v = Vocabulary::parse("P/1,R/2").unwrap();
    let code = graph_construction(&v, DEFAULT_MAX_ARITY).unwrap();
    let graph_of =
        |s: &FiniteStructure| finished(code.stream(StructureStream::new(FiniteSource::new(s.clone()))).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let size = rng.gen_range(1..=5);
        let s = random_structure(&mut rng, &v, size, 0.3);
        let mut perm: Vec<usize> = (0..size).collect();
        perm.shuffle(&mut rng);
        let t = s.permute(&perm);
        let (gs, gt) = (graph_of(&s), graph_of(&t));
        assert!(graphs_isomorphic(&gs, &gt), "{s} vs {t}");
        // flipping one fact changes the number of gadgets
        let mut u = s.clone();
        let e = rng.gen_range(0..size);
        u.set(0, &[e], !s.holds(0, &[e]));
        assert!(!graphs_isomorphic(&gs, &graph_of(&u)));
    }
}
