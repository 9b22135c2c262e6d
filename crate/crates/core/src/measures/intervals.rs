use std::fmt;

use crate::syntax::{number_to_string, ConstraintExpr, DistributionExpr, Relation};

/// Interval of the real line; `lo == hi` with both ends closed is a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        // infinite endpoints are never included
        Interval { lo, hi, lo_closed: lo_closed && lo.is_finite(), hi_closed: hi_closed && hi.is_finite() }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, true, x, true)
    }

    pub fn real_line() -> Self {
        Interval::new(f64::NEG_INFINITY, false, f64::INFINITY, false)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && !self.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn intersect(&self, o: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.total_cmp(&o.lo) {
            std::cmp::Ordering::Less => (o.lo, o.lo_closed),
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && o.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.total_cmp(&o.hi) {
            std::cmp::Ordering::Less => (self.hi, self.hi_closed),
            std::cmp::Ordering::Greater => (o.hi, o.hi_closed),
            std::cmp::Ordering::Equal => (self.hi, self.hi_closed && o.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", number_to_string(self.lo));
        }
        let end = |x: f64| match x {
            f64::INFINITY => "inf".to_string(),
            f64::NEG_INFINITY => "-inf".to_string(),
            x => number_to_string(x),
        };
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            end(self.lo),
            end(self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Finite union of disjoint intervals, sorted by lower end. Points of a discrete support are
/// degenerate closed intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for i in v {
            if let Some(last) = out.last_mut() {
                let touches = i.lo < last.hi || (i.lo == last.hi && (i.lo_closed || last.hi_closed));
                if touches {
                    if i.hi > last.hi || (i.hi == last.hi && i.hi_closed) {
                        last.hi = i.hi;
                        last.hi_closed = i.hi_closed;
                    }
                    continue;
                }
            }
            out.push(i);
        }
        IntervalSet { intervals: out }
    }

    pub fn points(xs: &[f64]) -> Self {
        IntervalSet::from_intervals(xs.iter().map(|x| Interval::point(*x)))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn intersect(&self, o: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.intervals.iter().flat_map(|a| o.intervals.iter().map(move |b| a.intersect(b))))
    }

    /// Complement with respect to the whole real line.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let (mut lo, mut lo_closed) = (f64::NEG_INFINITY, false);
        for i in &self.intervals {
            out.push(Interval::new(lo, lo_closed, i.lo, !i.lo_closed));
            lo = i.hi;
            lo_closed = !i.hi_closed;
        }
        out.push(Interval::new(lo, lo_closed, f64::INFINITY, false));
        IntervalSet::from_intervals(out)
    }

    /// Complement within `support`.
    pub fn complement_within(&self, support: &IntervalSet) -> IntervalSet {
        self.complement().intersect(support)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (k, i) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " u ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// The values a variable drawn from `d` can take.
pub fn support(d: &DistributionExpr) -> IntervalSet {
    match *d {
        DistributionExpr::Flip(_) => IntervalSet::points(&[0.0, 1.0]),
        DistributionExpr::Beta(..) => IntervalSet::from_intervals([Interval::new(0.0, true, 1.0, true)]),
        DistributionExpr::Normal(..) => IntervalSet::from_intervals([Interval::real_line()]),
        DistributionExpr::Uniform(lo, hi) => IntervalSet::from_intervals([Interval::new(lo.0, true, hi.0, true)]),
    }
}

/// `{x : x relop bound}` on the whole real line.
pub fn relation_set(relation: Relation, bound: f64) -> IntervalSet {
    let (ninf, inf) = (f64::NEG_INFINITY, f64::INFINITY);
    IntervalSet::from_intervals([match relation {
        Relation::Eq => Interval::point(bound),
        Relation::Lt => Interval::new(ninf, false, bound, false),
        Relation::Le => Interval::new(ninf, false, bound, true),
        Relation::Gt => Interval::new(bound, false, inf, false),
        Relation::Ge => Interval::new(bound, true, inf, false),
    }])
}

/// Values in the support of `d` satisfying `c`.
pub fn constraint_set(d: &DistributionExpr, c: &ConstraintExpr) -> IntervalSet {
    relation_set(c.relation, c.bound.0).intersect(&support(d))
}

/// Values in the support of `d` violating `c`.
pub fn negate_constraint(d: &DistributionExpr, c: &ConstraintExpr) -> IntervalSet {
    constraint_set(d, c).complement_within(&support(d))
}

/// Splits the support of `d` at every bound, giving the coarsest partition on whose cells each
/// of the constraints is constant.
pub fn partition(d: &DistributionExpr, bounds: &[f64]) -> Vec<IntervalSet> {
    let mut bs: Vec<f64> = bounds.to_vec();
    bs.sort_by(f64::total_cmp);
    bs.dedup();
    let mut cells = Vec::new();
    let mut lo = f64::NEG_INFINITY;
    for &b in &bs {
        cells.push(Interval::new(lo, false, b, false));
        cells.push(Interval::point(b));
        lo = b;
    }
    cells.push(Interval::new(lo, false, f64::INFINITY, false));
    let s = support(d);
    cells.into_iter().map(|c| IntervalSet::from_intervals([c]).intersect(&s)).filter(|c| !c.is_empty()).collect()
}
