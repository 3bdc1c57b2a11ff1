//! The combinatorial complete sets and the shipped `Π⁰_ω` family.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::code::{member_up, BorelCode, BorelLevel, CodeError, Sequence};
use super::up::{pair, MatrixPoint, UPPoint};

/// Which bits of the ambient point a set looks at: the whole point, or one
/// of its two interleaved tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Track {
    Whole,
    Even,
    Odd,
}

impl Track {
    pub fn position(self, n: usize) -> usize {
        match self {
            Track::Whole => n,
            Track::Even => 2 * n,
            Track::Odd => 2 * n + 1,
        }
    }

    pub fn view(self, p: &UPPoint) -> UPPoint {
        match self {
            Track::Whole => p.clone(),
            Track::Even => p.track(0, 2),
            Track::Odd => p.track(1, 2),
        }
    }

    // positions within a prefix of length `len` that belong to the track
    fn scan(self, len: usize) -> usize {
        match self {
            Track::Whole => len + 1,
            Track::Even | Track::Odd => len / 2 + 1,
        }
    }
}

/// `{p : ∃n p(n) = 1}`.
pub fn sigma1_on(t: Track) -> BorelCode {
    BorelCode::union(
        Sequence::infinite(move |n| BorelCode::bit(t.position(n), true)).with_scan_limit(move |l| t.scan(l)),
        BorelLevel::sigma(1),
    )
    .with_rule(move |p| t.view(p).has_anywhere(true))
    .named("Sigma1")
}

/// `{p : ∀n p(n) = 0}`.
pub fn pi1_allzero_on(t: Track) -> BorelCode {
    BorelCode::intersect(
        Sequence::infinite(move |n| BorelCode::bit(t.position(n), false)).with_scan_limit(move |l| t.scan(l)),
        BorelLevel::pi(1),
    )
    .with_rule(move |p| !t.view(p).has_anywhere(true))
    .named("Pi1_allzero")
}

/// `{p : ∃m ∀n ≥ m p(n) = 0}`.
pub fn sigma2_evzero_on(t: Track) -> BorelCode {
    BorelCode::union(
        Sequence::infinite(move |m| {
            BorelCode::intersect(
                Sequence::infinite(move |n| BorelCode::bit(t.position(m + n), false))
                    .with_scan_limit(move |l| t.scan(l)),
                BorelLevel::pi(1),
            )
        })
        .with_scan_limit(move |l| t.scan(l)),
        BorelLevel::sigma(2),
    )
    .with_rule(move |p| !t.view(p).period_has(true))
    .named("Sigma2_evzero")
}

/// `{p : ∃^∞ n p(n) = 1}`.
pub fn pi2_infones_on(t: Track) -> BorelCode {
    BorelCode::intersect(
        Sequence::infinite(move |m| {
            BorelCode::union(
                Sequence::infinite(move |n| BorelCode::bit(t.position(m + n), true))
                    .with_scan_limit(move |l| t.scan(l)),
                BorelLevel::sigma(1),
            )
        })
        .with_scan_limit(move |l| t.scan(l)),
        BorelLevel::pi(2),
    )
    .with_rule(move |p| t.view(p).period_has(true))
    .named("Pi2_infones")
}

/// `{x : ∃^∞ m ∀n x(m,n) = 0}`, reading the track as a matrix.
pub fn pi3_infemptycols_on(t: Track) -> BorelCode {
    // column m is all zero
    let column = move |m: usize| {
        BorelCode::intersect(
            Sequence::infinite(move |n| BorelCode::bit(t.position(pair(m, n)), false))
                .with_scan_limit(move |l| (t.scan(l) as f64 * 2.0).sqrt() as usize + 2),
            BorelLevel::pi(1),
        )
    };
    BorelCode::intersect(
        Sequence::infinite(move |k| {
            BorelCode::union(
                Sequence::infinite(move |m| column(k + m))
                    .with_scan_limit(move |l| (t.scan(l) as f64 * 2.0).sqrt() as usize + 2),
                BorelLevel::sigma(2),
            )
        })
        .with_scan_limit(move |l| (t.scan(l) as f64 * 2.0).sqrt() as usize + 2),
        BorelLevel::pi(3),
    )
    .with_rule(move |p| MatrixPoint(t.view(p)).infinitely_many_empty_columns())
    .named("Pi3_infemptycols")
}

/// A decreasing sequence of codes `P_1 ⊇ P_2 ⊇ …` with `P_n` at level `Π_n`,
/// together with a bound past which the sets no longer change.
#[derive(Clone)]
pub struct DecreasingFamily {
    pub name: String,
    gen: Arc<dyn Fn(usize) -> BorelCode + Send + Sync>,
    pub stabilizes_at: usize,
}

impl DecreasingFamily {
    pub fn new(name: &str, stabilizes_at: usize, gen: impl Fn(usize) -> BorelCode + Send + Sync + 'static) -> Self {
        DecreasingFamily { name: name.to_string(), gen: Arc::new(gen), stabilizes_at }
    }

    /// `P_n` for `n ≥ 1`.
    pub fn level(&self, n: usize) -> BorelCode {
        assert!(n >= 1, "families are indexed from 1");
        (self.gen)(n)
    }

    /// `⋂ P_n`, decided on UP points by checking levels up to the
    /// stabilization bound.
    pub fn intersection(&self) -> BorelCode {
        let me = self.clone();
        let gen = self.gen.clone();
        BorelCode::intersect(Sequence::infinite(move |i| gen(i + 1)), BorelLevel::pi_omega())
            .with_rule(move |p| {
                (1..=me.stabilizes_at).all(|n| member_up(&me.level(n), p).expect("family levels are decidable"))
            })
            .named(&self.name)
    }
}

/// A point separating two consecutive levels of a family the wrong way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyViolation {
    pub point: UPPoint,
    pub level: usize,
    pub reason: &'static str,
}

impl DecreasingFamily {
    /// Checks on sample points that `P_(n+1) ⊆ P_n`, that each `P_n` is
    /// annotated within `Π_n`, and that nothing changes past the
    /// stabilization bound (checked two levels beyond it).
    pub fn check(&self, points: &[UPPoint]) -> Result<(), FamilyViolation> {
        let top = self.stabilizes_at + 2;
        for n in 1..=top {
            if !BorelLevel::pi(n).contains(self.level(n).level()) {
                return Err(FamilyViolation {
                    point: UPPoint::constant(false),
                    level: n,
                    reason: "annotated level exceeds Pi_n",
                });
            }
        }
        for p in points {
            let member: Vec<bool> =
                (1..=top).map(|n| member_up(&self.level(n), p).expect("family levels are decidable")).collect();
            for n in 1..top {
                if member[n] && !member[n - 1] {
                    return Err(FamilyViolation { point: p.clone(), level: n + 1, reason: "not decreasing" });
                }
                if n >= self.stabilizes_at && member[n] != member[n - 1] {
                    return Err(FamilyViolation { point: p.clone(), level: n + 1, reason: "changes past the bound" });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DecreasingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecreasingFamily({}, stabilizes at {})", self.name, self.stabilizes_at)
    }
}

/// The shipped family on a point split into tracks:
///
/// * `P_1`: the even track is all zero;
/// * `P_2`: `P_1` and the odd track has infinitely many ones;
/// * `P_n`, `n ≥ 3`: `P_2` and the odd track, read as a matrix, has
///   infinitely many empty columns.
pub fn split_point_family() -> DecreasingFamily {
    DecreasingFamily::new("split_point", 3, |n| match n {
        1 => pi1_allzero_on(Track::Even).named("P1"),
        2 => BorelCode::all_of(vec![pi1_allzero_on(Track::Even), pi2_infones_on(Track::Odd)]).named("P2"),
        _ => BorelCode::all_of(vec![
            pi1_allzero_on(Track::Even),
            pi2_infones_on(Track::Odd),
            pi3_infemptycols_on(Track::Odd),
        ])
        .named("P3"),
    })
}

/// Names of the canonical sets.
#[derive(Clone, Debug)]
pub enum PointclassKind {
    Sigma1,
    Sigma2EvZero,
    Pi2InfOnes,
    Pi3InfEmptyCols,
    PiOmega(DecreasingFamily),
}

impl FromStr for PointclassKind {
    type Err = CodeError;

    /// `PiOmega` names the shipped split-point family.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "Sigma1" => PointclassKind::Sigma1,
            "Sigma2_evzero" => PointclassKind::Sigma2EvZero,
            "Pi2_infones" => PointclassKind::Pi2InfOnes,
            "Pi3_infemptycols" => PointclassKind::Pi3InfEmptyCols,
            "PiOmega" => PointclassKind::PiOmega(split_point_family()),
            other => return Err(CodeError::UnknownKind(other.to_string())),
        })
    }
}

pub fn canonical_set(kind: &PointclassKind) -> BorelCode {
    match kind {
        PointclassKind::Sigma1 => sigma1_on(Track::Whole),
        PointclassKind::Sigma2EvZero => sigma2_evzero_on(Track::Whole),
        PointclassKind::Pi2InfOnes => pi2_infones_on(Track::Whole),
        PointclassKind::Pi3InfEmptyCols => pi3_infemptycols_on(Track::Whole),
        PointclassKind::PiOmega(f) => f.intersection(),
    }
}

/// Looks a canonical set up by name.
pub fn canonical_set_named(name: &str) -> Result<BorelCode, CodeError> {
    name.parse().map(|k| canonical_set(&k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointclasses::code::verdict_prefix;
    use crate::verdict::Verdict;

    fn up(s: &str) -> UPPoint {
        s.parse().unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn membership_examples() {
        let s1 = canonical_set(&PointclassKind::Sigma1);
        assert_eq!(member_up(&s1, &up("0;1")), Ok(true));
        let p3 = canonical_set(&PointclassKind::Pi3InfEmptyCols);
        assert_eq!(member_up(&p3, &up(";0")), Ok(true));
        // triangular numbers are never 2 mod 3, so x(m,0) = 1 for every m
        let first_row: UPPoint = ";110".parse().unwrap();
        assert!((0..50).all(|m| MatrixPoint(first_row.clone()).get(m, 0)));
        assert_eq!(member_up(&p3, &first_row), Ok(false));
        let p2 = canonical_set(&PointclassKind::Pi2InfOnes);
        assert_eq!(member_up(&p2, &up("1;0")), Ok(false));
        let e = canonical_set(&PointclassKind::Sigma2EvZero);
        assert_eq!(member_up(&e, &up("101;0")), Ok(true));
    }

    #[test]
    fn prefix_verdicts() {
        let s1 = canonical_set(&PointclassKind::Sigma1);
        assert_eq!(verdict_prefix(&s1, &bits("001")), Verdict::True);
        assert_eq!(verdict_prefix(&s1, &bits("000")), Verdict::Unknown);
        let p2 = canonical_set(&PointclassKind::Pi2InfOnes);
        for prefix in ["", "1", "0101", "1111111", "000000"] {
            assert_eq!(verdict_prefix(&p2, &bits(prefix)), Verdict::Unknown);
        }
    }

    #[test]
    fn levels_match_tree_shapes() {
        for name in ["Sigma1", "Sigma2_evzero", "Pi2_infones", "Pi3_infemptycols", "PiOmega"] {
            let c = canonical_set_named(name).unwrap();
            assert!(c.level_consistent(3), "{name}: {} vs {}", c.level(), c.computed_level(3));
        }
        assert_eq!(canonical_set_named("Pi3_infemptycols").unwrap().computed_level(3), BorelLevel::pi(3));
        assert!(matches!(canonical_set_named("Delta7"), Err(CodeError::UnknownKind(_))));
    }

    #[test]
    fn empty_columns_closed_form_matches_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let pre = rng.gen_range(0..12);
            let per = rng.gen_range(1..6);
            let density = rng.gen_range(0.0..0.6);
            let p = UPPoint::from_fn(pre, per, |_| false);
            let p = UPPoint::new(
                (0..p.prefix().len()).map(|_| rng.gen_bool(density)).collect(),
                (0..per).map(|_| rng.gen_bool(density)).collect(),
            )
            .unwrap();
            let m = MatrixPoint(p.clone());
            // columns 50..100, rows below 100: far past the periodic diagonal
            let scan = (50..100).filter(|&c| (0..100).all(|r| !m.get(c, r))).count();
            assert_eq!(m.infinitely_many_empty_columns(), scan > 0, "{p}");
            for c in 0..20 {
                assert_eq!(m.column_empty(c), (0..200).all(|r| !m.get(c, r)), "{p} column {c}");
            }
        }
    }

    #[test]
    fn split_family_is_decreasing() {
        let fam = split_point_family();
        let points = crate::pointclasses::exhaustive_points(3, 3);
        assert_eq!(fam.check(&points), Ok(()));
        // P3 is strictly smaller than P2, which is strictly smaller than P1
        let odd_ones = UPPoint::interleave(&[UPPoint::constant(false), UPPoint::constant(true)]);
        assert!(member_up(&fam.level(2), &odd_ones).unwrap());
        assert!(!member_up(&fam.level(3), &odd_ones).unwrap());
        let zero = UPPoint::constant(false);
        assert!(member_up(&fam.level(1), &zero).unwrap());
        assert!(!member_up(&fam.level(2), &zero).unwrap());
        let sparse = UPPoint::interleave(&[UPPoint::constant(false), "0;001".parse().unwrap()]);
        assert!(member_up(&fam.level(2), &sparse).unwrap());
        assert_eq!(
            member_up(&fam.intersection(), &sparse).unwrap(),
            MatrixPoint(sparse.track(1, 2)).infinitely_many_empty_columns()
        );
        let dense = UPPoint::interleave(&[UPPoint::constant(false), ";110".parse().unwrap()]);
        assert!(!member_up(&fam.intersection(), &dense).unwrap());
    }
}
