//! Cyclic schedules of two sources.
//!
//! A schedule is stored as `(u, u1, r)`: `u` slots per cycle, `u1` of them
//! for source 1, and the placement vector `r` whose `i`-th entry counts the
//! source-2 slots between the `i`-th and `(i+1)`-th source-1 slots
//! (cyclically). The slot string `"12122"` is the schedule `(5, 2, {1, 2})`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::gcd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    One,
    Two,
}

impl Source {
    pub fn other(self) -> Source {
        match self {
            Source::One => Source::Two,
            Source::Two => Source::One,
        }
    }

    /// 0 for source 1, 1 for source 2.
    pub fn index(self) -> usize {
        match self {
            Source::One => 0,
            Source::Two => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Source::One => '1',
            Source::Two => '2',
        }
    }
}

/// A cyclic sequence of slot labels containing both sources.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlotSequence(Vec<Source>);

impl SlotSequence {
    pub fn new(labels: Vec<Source>) -> Result<Self> {
        let has_one = labels.contains(&Source::One);
        let has_two = labels.contains(&Source::Two);
        if !has_one || !has_two {
            return Err(Error::InfeasibleSchedule(
                "slot sequence must contain both sources",
            ));
        }
        Ok(SlotSequence(labels))
    }

    pub fn labels(&self) -> &[Source] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lexicographically smallest rotation (source 1 sorts first).
    pub fn canonical(&self) -> SlotSequence {
        let start = min_rotation(&self.0);
        let mut out = Vec::with_capacity(self.0.len());
        out.extend_from_slice(&self.0[start..]);
        out.extend_from_slice(&self.0[..start]);
        SlotSequence(out)
    }

    pub fn is_canonical(&self) -> bool {
        min_rotation(&self.0) == 0
    }

    /// Equality up to cyclic rotation.
    pub fn same_cycle(&self, other: &SlotSequence) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    /// Insert `source` before position `pos` (`pos == len` appends).
    pub fn inserted(&self, pos: usize, source: Source) -> SlotSequence {
        let mut v = self.0.clone();
        v.insert(pos, source);
        SlotSequence(v)
    }
}

/// Start index of the lexicographically minimal rotation.
fn min_rotation(s: &[Source]) -> usize {
    let n = s.len();
    let mut best = 0;
    for cand in 1..n {
        for k in 0..n {
            let a = s[(cand + k) % n];
            let b = s[(best + k) % n];
            if a != b {
                if a < b {
                    best = cand;
                }
                break;
            }
        }
    }
    best
}

impl FromStr for SlotSequence {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let labels = text
            .trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(Source::One),
                '2' => Ok(Source::Two),
                other => Err(Error::BadSlotChar(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        SlotSequence::new(labels)
    }
}

impl fmt::Display for SlotSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// The `(u, u1, r)` representation of a two-source cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicSchedule {
    placement: Vec<u32>,
    u2: u64,
}

impl CyclicSchedule {
    /// Build from the placement vector alone; `u1 = r.len()`, `u2 = sum(r)`.
    pub fn from_placement(placement: Vec<u32>) -> Result<Self> {
        if placement.is_empty() {
            return Err(Error::InfeasibleSchedule("u1 must be at least 1"));
        }
        let u2: u64 = placement.iter().map(|&x| x as u64).sum();
        if u2 == 0 {
            return Err(Error::InfeasibleSchedule("u must exceed u1"));
        }
        Ok(CyclicSchedule { placement, u2 })
    }

    /// Build from the full tuple, checking `length(r) = u1` and `sum(r) = u - u1`.
    pub fn new(u: u64, u1: u64, placement: Vec<u32>) -> Result<Self> {
        if placement.len() as u64 != u1 {
            return Err(Error::InfeasibleSchedule("length(r) must equal u1"));
        }
        if u <= u1 {
            return Err(Error::InfeasibleSchedule("u must exceed u1"));
        }
        let s = Self::from_placement(placement)?;
        if s.u2 != u - u1 {
            return Err(Error::InfeasibleSchedule("sum(r) must equal u - u1"));
        }
        Ok(s)
    }

    pub fn round_robin() -> Self {
        CyclicSchedule {
            placement: alloc::vec![1],
            u2: 1,
        }
    }

    pub fn u(&self) -> u64 {
        self.u1() + self.u2
    }

    pub fn u1(&self) -> u64 {
        self.placement.len() as u64
    }

    pub fn u2(&self) -> u64 {
        self.u2
    }

    pub fn placement(&self) -> &[u32] {
        &self.placement
    }

    /// `a = u2 / u1`.
    pub fn ratio(&self) -> f64 {
        self.u2 as f64 / self.u1() as f64
    }

    /// Parse the first source-1 slot as the anchor of `r[1]`.
    pub fn from_slots(slots: &SlotSequence) -> Self {
        Self::from_labels(slots.labels(), Source::One)
    }

    /// Placement vector of `own` relative to the cyclic label sequence.
    fn from_labels(labels: &[Source], own: Source) -> Self {
        let n = labels.len();
        let start = labels.iter().position(|&l| l == own).unwrap_or(0);
        let mut placement = Vec::new();
        let mut gap = 0u32;
        for k in 1..=n {
            if labels[(start + k) % n] == own {
                placement.push(gap);
                gap = 0;
            } else {
                gap += 1;
            }
        }
        let u2 = (n - placement.len()) as u64;
        CyclicSchedule { placement, u2 }
    }

    pub fn to_slots(&self) -> SlotSequence {
        let mut labels = Vec::with_capacity(self.u() as usize);
        for &gap in &self.placement {
            labels.push(Source::One);
            labels.extend(core::iter::repeat_n(Source::Two, gap as usize));
        }
        SlotSequence(labels)
    }

    /// The same cycle seen from source 2: `u1' = u2` and `r'` counts source-1
    /// slots between consecutive source-2 slots, anchored at the first
    /// source-2 slot of [`to_slots`](Self::to_slots).
    pub fn dual(&self) -> Self {
        let slots = self.to_slots();
        Self::from_labels(slots.labels(), Source::Two)
    }

    /// Placement vector as seen by `source` (the dual for source 2).
    pub fn placement_for(&self, source: Source) -> Vec<u32> {
        match source {
            Source::One => self.placement.clone(),
            Source::Two => self.dual().placement,
        }
    }

    /// Equality up to rotation of the slot sequence.
    pub fn same_cycle(&self, other: &CyclicSchedule) -> bool {
        self.to_slots().same_cycle(&other.to_slots())
    }

    /// `r̃(i)`: sum over the `u1` cyclic windows of `i` consecutive placement
    /// entries of the squared window sum. `i` is 1-based, `1 <= i <= u1`.
    pub fn r_tilde(&self, i: usize) -> Result<u64> {
        r_tilde(&self.placement, i)
    }
}

/// `r̃(i)` for a bare placement vector.
pub fn r_tilde(placement: &[u32], i: usize) -> Result<u64> {
    let n = placement.len();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let mut window: u64 = placement[..i].iter().map(|&x| x as u64).sum();
    let mut total = 0u64;
    for j in 0..n {
        total += window * window;
        window = window + placement[(j + i) % n] as u64 - placement[j] as u64;
    }
    Ok(total)
}

/// Divide out the common factor of `(u1, u2)`.
pub fn reduce_coprime(u1: u64, u2: u64) -> (u64, u64) {
    let g = gcd(u1, u2).max(1);
    (u1 / g, u2 / g)
}

impl FromStr for CyclicSchedule {
    type Err = Error;

    /// Accepts a slot string (`1221`) or the tuple form `(4, 2, {2,0})`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if !text.starts_with('(') {
            return Ok(CyclicSchedule::from_slots(&text.parse()?));
        }
        let inner = text
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or(Error::BadTuple("unbalanced parentheses"))?;
        let (head, rest) = inner
            .split_once('{')
            .ok_or(Error::BadTuple("missing '{'"))?;
        let body = rest
            .trim_end()
            .strip_suffix('}')
            .ok_or(Error::BadTuple("missing '}'"))?;
        let mut nums = head.split(',').map(str::trim).filter(|t| !t.is_empty());
        let mut number = || -> Result<u64> {
            nums.next()
                .ok_or(Error::BadTuple("expected u and u1"))?
                .parse()
                .map_err(|_| Error::BadTuple("u and u1 must be integers"))
        };
        let (u, u1) = (number()?, number()?);
        if nums.next().is_some() {
            return Err(Error::BadTuple(
                "expected exactly u and u1 before the placement",
            ));
        }
        let placement = body
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<core::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::BadTuple("placement entries must be integers"))?;
        CyclicSchedule::new(u, u1, placement)
    }
}

impl fmt::Display for CyclicSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_slots())
    }
}

impl CyclicSchedule {
    /// `(u, u1, {r1,...})` tuple notation.
    pub fn tuple_string(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = write!(s, "({}, {}, {{", self.u(), self.u1());
        for (k, r) in self.placement.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            let _ = write!(s, "{r}");
        }
        s.push_str("})");
        s
    }
}
