use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UpParseError {
    #[error("expected `<prefix>;<period>`, got {0:?}")]
    Shape(String),
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("unexpected character {0:?}; only 0 and 1 are allowed")]
    BadChar(char),
}

/// An ultimately periodic point of Cantor space: `prefix` followed by
/// `period` repeated forever.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPPoint {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

fn bits_of(s: &str) -> Result<Vec<bool>, UpParseError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            c => Err(UpParseError::BadChar(c)),
        })
        .collect()
}

impl UPPoint {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self, UpParseError> {
        if period.is_empty() {
            return Err(UpParseError::EmptyPeriod);
        }
        Ok(UPPoint { prefix, period })
    }

    /// The point `n ↦ f(n)`, given that `f` is periodic with period `period`
    /// from position `prefix` on.
    pub fn from_fn(prefix: usize, period: usize, f: impl Fn(usize) -> bool) -> Self {
        assert!(period >= 1);
        UPPoint { prefix: (0..prefix).map(&f).collect(), period: (prefix..prefix + period).map(f).collect() }
    }

    pub fn constant(b: bool) -> Self {
        UPPoint { prefix: Vec::new(), period: vec![b] }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn bit(&self, n: usize) -> bool {
        match self.prefix.get(n) {
            Some(&b) => b,
            None => self.period[(n - self.prefix.len()) % self.period.len()],
        }
    }

    /// The first `n` bits.
    pub fn take(&self, n: usize) -> Vec<bool> {
        (0..n).map(|i| self.bit(i)).collect()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..).map(move |i| self.bit(i))
    }

    pub fn period_has(&self, b: bool) -> bool {
        self.period.contains(&b)
    }

    pub fn has_anywhere(&self, b: bool) -> bool {
        self.prefix.contains(&b) || self.period.contains(&b)
    }

    /// Track `k` of `m` interleaved tracks: `n ↦ self(m·n + k)`.
    pub fn track(&self, k: usize, m: usize) -> UPPoint {
        assert!(k < m);
        let pre = self.prefix.len().div_ceil(m);
        UPPoint::from_fn(pre, self.period.len(), |n| self.bit(m * n + k)).minimized()
    }

    /// Interleaves points: position `m·n + k` carries `tracks[k](n)`.
    pub fn interleave(tracks: &[UPPoint]) -> UPPoint {
        let m = tracks.len();
        assert!(m >= 1);
        let pre = tracks.iter().map(|t| t.prefix.len()).max().unwrap() * m;
        let per = tracks.iter().map(|t| t.period.len()).fold(1, lcm) * m;
        UPPoint::from_fn(pre, per, |i| tracks[i % m].bit(i / m)).minimized()
    }

    /// Shortest period, then shortest prefix. Equal points have equal
    /// minimized forms.
    pub fn minimized(&self) -> UPPoint {
        let p = self.period.len();
        let per = (1..=p)
            .filter(|d| p.is_multiple_of(*d))
            .find(|&d| (0..p).all(|i| self.period[i] == self.period[i % d]))
            .unwrap();
        let mut period: Vec<bool> = self.period[..per].to_vec();
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last != period[per - 1] {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        UPPoint { prefix, period }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl FromStr for UPPoint {
    type Err = UpParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (pre, per) = s.split_once(';').ok_or_else(|| UpParseError::Shape(s.to_string()))?;
        UPPoint::new(bits_of(pre.trim())?, bits_of(per.trim())?)
    }
}

impl fmt::Display for UPPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.prefix {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(";")?;
        for &b in &self.period {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for UPPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPPoint({self})")
    }
}

/// Cantor pairing `⟨m,n⟩ = (m+n)(m+n+1)/2 + n`.
pub fn pair(m: usize, n: usize) -> usize {
    (m + n) * (m + n + 1) / 2 + n
}

/// Inverse of [`pair`].
pub fn unpair(z: usize) -> (usize, usize) {
    let mut t = (((8 * z + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
    while (t + 1) * (t + 2) / 2 <= z {
        t += 1;
    }
    while t * (t + 1) / 2 > z {
        t -= 1;
    }
    let n = z - t * (t + 1) / 2;
    (t - n, n)
}

/// A point of `2^(ω×ω)` read through Cantor pairing: `x(m,n) = q(⟨m,n⟩)`.
/// Here `m` indexes columns and `n` rows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatrixPoint(pub UPPoint);

impl MatrixPoint {
    pub fn get(&self, m: usize, n: usize) -> bool {
        self.0.bit(pair(m, n))
    }

    pub fn point(&self) -> &UPPoint {
        &self.0
    }

    /// Least `t` with `t(t+1)/2 ≥ L`: from antidiagonal `t` on, every cell
    /// lies in the periodic part.
    pub fn periodic_diagonal(&self) -> usize {
        let l = self.0.prefix.len();
        (0..).find(|t| t * (t + 1) / 2 >= l).unwrap()
    }

    /// Whether column `m` is empty. Cells with `m + n ≥ periodic_diagonal()`
    /// repeat in `n` with period `2P`, so rows below that bound plus `2P`
    /// decide.
    pub fn column_empty(&self, m: usize) -> bool {
        let rows = self.periodic_diagonal().saturating_sub(m) + 2 * self.0.period.len();
        (0..rows).all(|n| !self.get(m, n))
    }

    /// Whether infinitely many columns are empty. Columns from the periodic
    /// diagonal on repeat with period `2P`.
    pub fn infinitely_many_empty_columns(&self) -> bool {
        let j = self.periodic_diagonal();
        (j..j + 2 * self.0.period.len()).any(|m| self.column_empty(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_index() {
        let p: UPPoint = "01;1".parse().unwrap();
        assert_eq!(p.take(4), [false, true, true, true]);
        assert_eq!(p.to_string(), "01;1");
        assert_eq!("0;".parse::<UPPoint>(), Err(UpParseError::EmptyPeriod));
        assert!(matches!("012".parse::<UPPoint>(), Err(UpParseError::Shape(_))));
        assert!(";1".parse::<UPPoint>().unwrap().bit(100));
    }

    #[test]
    fn minimization() {
        let p: UPPoint = "0101;0101".parse().unwrap();
        assert_eq!(p.minimized().to_string(), ";01");
        let q: UPPoint = "1000;00".parse().unwrap();
        assert_eq!(q.minimized().to_string(), "1;0");
    }

    #[test]
    fn tracks_and_interleaving() {
        let p: UPPoint = "110;10".parse().unwrap();
        let (e, o) = (p.track(0, 2), p.track(1, 2));
        for n in 0..50 {
            assert_eq!(e.bit(n), p.bit(2 * n));
            assert_eq!(o.bit(n), p.bit(2 * n + 1));
        }
        let back = UPPoint::interleave(&[e, o]);
        assert_eq!(back, p.minimized());
    }

    #[test]
    fn pairing_is_bijective() {
        for z in 0..5000 {
            let (m, n) = unpair(z);
            assert_eq!(pair(m, n), z);
        }
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 1);
        assert_eq!(pair(0, 1), 2);
    }
}
