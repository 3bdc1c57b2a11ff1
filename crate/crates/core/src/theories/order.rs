//! Decision procedure for linear orders with successor built from points,
//! copies of `ℚ` and copies of `2·ℚ`.
//!
//! Inside a dense region every automorphism fixing finitely many elements
//! can move any element of a gap between them to any other element of the
//! same gap (for `2·ℚ`: any pair to any pair, side preserved). So a
//! quantifier only needs one candidate per region, gap and side, and
//! sentences are decided exactly.

use std::fmt;
use std::str::FromStr;

use super::TheoryError;
use crate::formulas::{Formula, Quant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    /// A single element.
    Point,
    /// A copy of `ℚ`, with no successor pairs.
    Dense,
    /// A copy of `2·ℚ`: pairs `a < a'` with `S(a, a')`, densely ordered
    /// without endpoints.
    DensePairs,
}

impl Region {
    fn symbol(self) -> &'static str {
        match self {
            Region::Point => "1",
            Region::Dense => "Q",
            Region::DensePairs => "2Q",
        }
    }
}

/// An order sum of regions, written like `2Q+1+Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderShape(pub Vec<Region>);

#[derive(Clone, Copy, Debug, PartialEq)]
struct Elem {
    region: usize,
    key: f64,
    side: u8,
}

impl Elem {
    fn less(self, other: Elem) -> bool {
        (self.region, self.side_key()) < (other.region, other.side_key())
    }

    fn side_key(self) -> (OrdF64, u8) {
        (OrdF64(self.key), self.side)
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
struct OrdF64(f64);

impl OrderShape {
    /// `2·ℚ + 1 + ℚ`.
    pub fn star() -> Self {
        OrderShape(vec![Region::DensePairs, Region::Point, Region::Dense])
    }

    /// `ℚ`, with empty successor relation.
    pub fn dense() -> Self {
        OrderShape(vec![Region::Dense])
    }

    /// The shapes in the linear-order model space.
    pub fn shipped() -> Vec<OrderShape> {
        ["2Q+1+Q", "Q", "1+Q", "Q+1", "Q+1+Q", "2Q", "2Q+1", "Q+1+2Q", "1+1+Q", "2Q+Q"]
            .iter()
            .map(|s| s.parse().expect("valid shape"))
            .collect()
    }

    fn successor(&self, a: Elem, b: Elem) -> bool {
        if a.region == b.region {
            return self.0[a.region] == Region::DensePairs && a.key == b.key && a.side == 0 && b.side == 1;
        }
        b.region == a.region + 1 && self.0[a.region] == Region::Point && self.0[b.region] == Region::Point
    }

    /// One element per type over `env` that a new variable can take.
    fn candidates(&self, env: &[Option<Elem>]) -> Vec<Elem> {
        let mut out = Vec::new();
        for (r, &region) in self.0.iter().enumerate() {
            if region == Region::Point {
                out.push(Elem { region: r, key: 0.0, side: 0 });
                continue;
            }
            let mut keys: Vec<f64> = env.iter().flatten().filter(|e| e.region == r).map(|e| e.key).collect();
            keys.sort_by(|a, b| a.partial_cmp(b).expect("finite keys"));
            keys.dedup();
            let mut all = keys.clone();
            match (keys.first(), keys.last()) {
                (Some(&lo), Some(&hi)) => {
                    all.push(lo - 1.0);
                    all.push(hi + 1.0);
                    all.extend(keys.windows(2).map(|w| (w[0] + w[1]) / 2.0));
                }
                _ => all.push(0.0),
            }
            let sides: &[u8] = if region == Region::DensePairs { &[0, 1] } else { &[0] };
            for &key in &all {
                for &side in sides {
                    out.push(Elem { region: r, key, side });
                }
            }
        }
        out
    }

    /// Truth of a sentence over `{</2, S/2}`.
    pub fn holds(&self, f: &Formula) -> bool {
        let slots = f.max_var().map_or(0, |v| v.index() + 1);
        let mut env = vec![None; slots];
        self.eval(f, &mut env)
    }

    fn eval(&self, f: &Formula, env: &mut Vec<Option<Elem>>) -> bool {
        let get = |env: &[Option<Elem>], v: crate::formulas::Var| env[v.index()].expect("bound variable");
        match f {
            Formula::Atom { rel, args } => {
                let (a, b) = (get(env, args[0]), get(env, args[1]));
                match rel.as_ref() {
                    "<" => a.less(b),
                    "S" => self.successor(a, b),
                    other => panic!("unexpected symbol `{other}`"),
                }
            }
            Formula::Eq(a, b) => get(env, *a) == get(env, *b),
            Formula::Not(g) => !self.eval(g, env),
            Formula::And(gs) => gs.iter().all(|g| self.eval(g, env)),
            Formula::Or(gs) => gs.iter().any(|g| self.eval(g, env)),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Quant(q, v, g) => {
                let want = *q == Quant::Exists;
                let saved = env[v.index()];
                env[v.index()] = None;
                let cands = self.candidates(env);
                let mut result = !want;
                for c in cands {
                    env[v.index()] = Some(c);
                    if self.eval(g, env) == want {
                        result = want;
                        break;
                    }
                }
                env[v.index()] = saved;
                result
            }
        }
    }
}

impl fmt::Display for OrderShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|r| r.symbol()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for OrderShape {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let regions = s
            .split('+')
            .map(|part| match part.trim() {
                "1" => Ok(Region::Point),
                "Q" => Ok(Region::Dense),
                "2Q" | "2·Q" => Ok(Region::DensePairs),
                other => Err(TheoryError::Config(format!("unknown order region `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if regions.is_empty() {
            return Err(TheoryError::Config("empty order shape".into()));
        }
        Ok(OrderShape(regions))
    }
}
