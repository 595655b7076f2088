//! Closed subsets of the real line: finite unions of closed intervals (with
//! possibly infinite endpoints) plus isolated points.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Closed interval [lo, hi]; `lo` may be −∞ and `hi` may be +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "extended_real")]
    pub lo: f64,
    #[serde(with = "extended_real")]
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!lo.is_nan() && !hi.is_nan());
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumSet {
    intervals: Vec<Interval>,
    points: Vec<f64>,
}

impl SpectrumSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn real_line() -> Self {
        Self::interval(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::from_parts(vec![Interval::new(lo, hi)], vec![])
    }

    pub fn point(x: f64) -> Self {
        Self::from_parts(vec![], vec![x])
    }

    /// (−∞, lower] ∪ [upper, +∞).
    pub fn rays(lower: f64, upper: f64) -> Self {
        Self::from_parts(
            vec![Interval::new(f64::NEG_INFINITY, lower), Interval::new(upper, f64::INFINITY)],
            vec![],
        )
    }

    pub fn points(xs: impl IntoIterator<Item = f64>) -> Self {
        Self::from_parts(vec![], xs.into_iter().collect())
    }

    /// Builds a normalized set; reversed or NaN intervals are dropped.
    pub fn from_parts(intervals: Vec<Interval>, points: Vec<f64>) -> Self {
        let mut s = SpectrumSet { intervals, points };
        s.normalize();
        s
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn isolated_points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x)) || self.points.contains(&x)
    }

    pub fn union(&self, other: &SpectrumSet) -> SpectrumSet {
        let mut intervals = self.intervals.clone();
        intervals.extend_from_slice(&other.intervals);
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Self::from_parts(intervals, points)
    }

    /// Intervals that meet the open interval (lo, hi), clipped to it.
    pub fn intervals_meeting(&self, lo: f64, hi: f64) -> Vec<Interval> {
        self.intervals
            .iter()
            .filter(|iv| iv.hi > lo && iv.lo < hi)
            .map(|iv| Interval::new(iv.lo.max(lo), iv.hi.min(hi)))
            .collect()
    }

    pub fn points_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.points.iter().copied().filter(|&p| lo < p && p < hi).collect()
    }

    fn normalize(&mut self) {
        let mut ivs: Vec<Interval> =
            self.intervals.drain(..).filter(|iv| !iv.lo.is_nan() && !iv.hi.is_nan() && iv.lo <= iv.hi).collect();
        for iv in ivs.iter().filter(|iv| iv.lo == iv.hi && iv.lo.is_finite()) {
            self.points.push(iv.lo);
        }
        ivs.retain(|iv| iv.lo < iv.hi);
        ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        let mut pts: Vec<f64> = self
            .points
            .drain(..)
            .filter(|p| p.is_finite() && !merged.iter().any(|iv| iv.contains(*p)))
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        self.intervals = merged;
        self.points = pts;
    }
}

impl std::fmt::Display for SpectrumSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let mut parts: Vec<(f64, String)> = self
            .intervals
            .iter()
            .map(|iv| {
                let l = if iv.lo.is_infinite() { "(-inf".to_string() } else { format!("[{}", iv.lo) };
                let r = if iv.hi.is_infinite() { "+inf)".to_string() } else { format!("{}]", iv.hi) };
                (iv.lo, format!("{l}, {r}"))
            })
            .collect();
        parts.extend(self.points.iter().map(|p| (*p, format!("{{{p}}}"))));
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let s: Vec<String> = parts.into_iter().map(|p| p.1).collect();
        write!(f, "{}", s.join(" ∪ "))
    }
}

/// Serializes ±∞ as the strings "-inf" / "+inf" so JSON stays lossless.
pub mod extended_real {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *x == f64::INFINITY {
            s.serialize_str("+inf")
        } else if *x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "+inf" | "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("bad extended real {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rays_with_point() {
        let s = SpectrumSet::rays(-1.0, 1.0).union(&SpectrumSet::point(0.0));
        assert_eq!(s.intervals().len(), 2);
        assert_eq!(s.isolated_points(), &[0.0]);
        assert!(s.contains(0.0) && s.contains(-1.0) && s.contains(5.0));
        assert!(!s.contains(0.5));
    }

    #[test]
    fn overlapping_intervals_merge() {
        let s = SpectrumSet::interval(0.0, 2.0).union(&SpectrumSet::interval(1.0, 3.0));
        assert_eq!(s.intervals(), &[Interval::new(0.0, 3.0)]);
    }

    #[test]
    fn touching_rays_give_real_line() {
        assert_eq!(SpectrumSet::rays(0.0, 0.0), SpectrumSet::real_line());
    }

    #[test]
    fn points_are_absorbed_and_degenerate_intervals_become_points() {
        let s = SpectrumSet::from_parts(vec![Interval::new(0.0, 1.0), Interval::new(3.0, 3.0)], vec![1.0, 0.5, 2.0, 2.0]);
        assert_eq!(s.intervals(), &[Interval::new(0.0, 1.0)]);
        assert_eq!(s.isolated_points(), &[2.0, 3.0]);
    }

    #[test]
    fn json_keeps_infinite_endpoints() {
        let s = SpectrumSet::rays(-1.0, 1.0);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"-inf\"") && text.contains("\"+inf\""));
        let back: SpectrumSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn display_orders_components() {
        let s = SpectrumSet::rays(-1.0, 1.0).union(&SpectrumSet::point(0.25));
        assert_eq!(s.to_string(), "(-inf, -1] ∪ {0.25} ∪ [1, +inf)");
        assert_eq!(SpectrumSet::empty().to_string(), "∅");
    }

    fn arb_set() -> impl Strategy<Value = SpectrumSet> {
        let endpoint = prop_oneof![
            1 => Just(f64::NEG_INFINITY),
            1 => Just(f64::INFINITY),
            8 => (-20i32..20).prop_map(|k| k as f64 * 0.5),
        ];
        let iv = (endpoint.clone(), endpoint).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)));
        let pt = (-40i32..40).prop_map(|k| k as f64 * 0.25);
        (prop::collection::vec(iv, 0..5), prop::collection::vec(pt, 0..5))
            .prop_map(|(ivs, pts)| SpectrumSet::from_parts(ivs, pts))
    }

    proptest! {
        #[test]
        fn union_is_a_semilattice(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
            prop_assert_eq!(a.union(&a), a.clone());
        }

        #[test]
        fn union_membership(a in arb_set(), b in arb_set(), k in -100i32..100) {
            let x = k as f64 * 0.125;
            prop_assert_eq!(a.union(&b).contains(x), a.contains(x) || b.contains(x));
        }

        #[test]
        fn normalized_form_is_sorted_and_disjoint(a in arb_set()) {
            for w in a.intervals().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
            for w in a.isolated_points().windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for p in a.isolated_points() {
                prop_assert!(!a.intervals().iter().any(|iv| iv.contains(*p)));
            }
        }
    }
}
