//! Supports on the line, their light-cone dilations and the exclusion
//! triangles that sit over gaps of the initial support.

use std::io::Write;

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Ordered, disjoint union of closed intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupportRegion {
    intervals: Vec<Interval>,
}

fn merge_tolerance(intervals: &[Interval]) -> f64 {
    let scale = intervals
        .iter()
        .map(|iv| iv.lo.abs().max(iv.hi.abs()))
        .fold(1.0, f64::max);
    1e-12 * scale
}

impl SupportRegion {
    pub fn empty() -> Self {
        SupportRegion::default()
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        SupportRegion::new(vec![(lo, hi)])
    }

    /// Sort the pieces and merge any that overlap or touch.
    pub fn new(pieces: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut v = Vec::new();
        for (lo, hi) in pieces {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Parameter(format!("invalid interval [{lo}, {hi}]")));
            }
            v.push(Interval::new(lo, hi));
        }
        Ok(SupportRegion::normalized(v))
    }

    fn normalized(mut v: Vec<Interval>) -> Self {
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let tol = merge_tolerance(&v);
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi + tol => last.hi = last.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        SupportRegion { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Smallest interval containing the region.
    pub fn hull(&self) -> Option<Interval> {
        Some(Interval::new(self.intervals.first()?.lo, self.intervals.last()?.hi))
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Closed membership.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Membership in the interior (boundary points excluded).
    pub fn contains_interior(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.lo < x && x < iv.hi)
    }

    /// Widen every interval by `r` on both sides and merge overlaps.
    pub fn dilate(&self, r: f64) -> SupportRegion {
        assert!(r >= 0.0, "dilation radius must be non-negative");
        if r == 0.0 {
            return self.clone();
        }
        SupportRegion::normalized(
            self.intervals
                .iter()
                .map(|iv| Interval::new(iv.lo - r, iv.hi + r))
                .collect(),
        )
    }

    /// Internal gaps `(hi_k, lo_{k+1})`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].hi, w[1].lo)).collect()
    }

    pub fn is_subset_of(&self, other: &SupportRegion) -> bool {
        let tol = merge_tolerance(&other.intervals);
        self.intervals.iter().all(|iv| {
            other
                .intervals
                .iter()
                .any(|o| o.lo - tol <= iv.lo && iv.hi <= o.hi + tol)
        })
    }
}

/// Space-time triangle over a gap `(a, b)` where the wave function vanishes
/// until the two cones meet at `((a+b)/2, (b−a)/2c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionTriangle {
    pub a: f64,
    pub b: f64,
    pub apex_t: f64,
}

impl ExclusionTriangle {
    pub fn apex_x(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Strictly inside the triangle with the given cone speed.
    pub fn contains(&self, x: f64, t: f64, c: f64) -> bool {
        t >= 0.0 && x - c * t > self.a && x + c * t < self.b
    }
}

pub fn triangles_from_gaps(s: &SupportRegion, c: f64) -> Vec<ExclusionTriangle> {
    s.gaps()
        .into_iter()
        .map(|(a, b)| ExclusionTriangle {
            a,
            b,
            apex_t: if c > 0.0 { (b - a) / (2.0 * c) } else { f64::INFINITY },
        })
        .collect()
}

/// Light cone emanating from an initial support.
#[derive(Debug, Clone, PartialEq)]
pub struct LightConeGeometry {
    pub initial: SupportRegion,
    pub c: f64,
    pub triangles: Vec<ExclusionTriangle>,
    pub hull: Interval,
}

impl LightConeGeometry {
    pub fn new(initial: SupportRegion, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Parameter(format!("cone speed must be >= 0, got {c}")));
        }
        let hull = initial
            .hull()
            .ok_or_else(|| Error::Parameter("initial support is empty".into()))?;
        let triangles = triangles_from_gaps(&initial, c);
        Ok(LightConeGeometry {
            initial,
            c,
            triangles,
            hull,
        })
    }

    /// Region inside the cone at time `t`: the initial support dilated by `c·t`.
    pub fn active_region(&self, t: f64) -> SupportRegion {
        self.initial.dilate(self.c * t.max(0.0))
    }

    /// Apex times in increasing order.
    pub fn apex_times(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.triangles.iter().map(|tr| tr.apex_t).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// CSV rows `t,index,lo,hi` of the active region at each time.
    pub fn write_snapshots<W: Write>(&self, times: &[f64], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "index", "lo", "hi"])?;
        for &t in times {
            for (k, iv) in self.active_region(t).intervals().iter().enumerate() {
                w.write_record([t.to_string(), k.to_string(), iv.lo.to_string(), iv.hi.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_slits() -> SupportRegion {
        SupportRegion::new([(-1.0, 0.0), (2.0, 3.0)]).unwrap()
    }

    fn pieces(s: &SupportRegion) -> Vec<(f64, f64)> {
        s.intervals().iter().map(|iv| (iv.lo, iv.hi)).collect()
    }

    #[test]
    fn dilate_examples() {
        let s = SupportRegion::interval(0.0, 1.0).unwrap();
        assert_eq!(pieces(&s.dilate(0.5)), vec![(-0.5, 1.5)]);
        assert_eq!(s.dilate(0.0), s);
        let s = SupportRegion::new([(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(pieces(&s.dilate(0.6)), vec![(-0.6, 3.6)]);
        assert_eq!(s.dilate(0.4).intervals().len(), 2);
        // touching exactly at the gap midpoint merges
        assert_eq!(s.dilate(0.5).intervals().len(), 1);
    }

    #[test]
    fn construction_sorts_and_merges() {
        let s = SupportRegion::new([(2.0, 3.0), (-1.0, 0.5), (0.0, 1.0)]).unwrap();
        assert_eq!(pieces(&s), vec![(-1.0, 1.0), (2.0, 3.0)]);
        assert!(SupportRegion::new([(1.0, 0.0)]).is_err());
        assert!(SupportRegion::empty().hull().is_none());
    }

    #[test]
    fn triangle_examples() {
        let tr = triangles_from_gaps(&two_slits(), 1.0);
        assert_eq!(tr.len(), 1);
        assert_eq!((tr[0].a, tr[0].b, tr[0].apex_t), (0.0, 2.0, 1.0));
        assert_eq!(tr[0].apex_x(), 1.0);
        assert!(triangles_from_gaps(&SupportRegion::interval(0.0, 1.0).unwrap(), 1.0).is_empty());
        assert_eq!(triangles_from_gaps(&two_slits(), 2.0)[0].apex_t, 0.5);
    }

    #[test]
    fn active_region_examples() {
        let g = LightConeGeometry::new(two_slits(), 1.0).unwrap();
        assert_eq!(g.active_region(0.0), two_slits());
        let r = g.active_region(0.5);
        assert_eq!(pieces(&r), vec![(-1.5, 0.5), (1.5, 3.5)]);
        assert!(!r.contains(1.0));
        let r = g.active_region(1.1);
        assert_eq!(r.intervals().len(), 1);
        let iv = r.intervals()[0];
        assert!((iv.lo + 2.1).abs() < 1e-15 && (iv.hi - 4.1).abs() < 1e-15);
    }

    #[test]
    fn snapshot_csv() {
        let g = LightConeGeometry::new(two_slits(), 1.0).unwrap();
        let mut buf = Vec::new();
        g.write_snapshots(&[0.0, 2.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 + 1);
        assert!(text.starts_with("t,index,lo,hi\n"));
    }

    fn support_strategy() -> impl Strategy<Value = SupportRegion> {
        prop::collection::vec((-10.0f64..10.0, 0.0f64..2.0), 1..5)
            .prop_map(|v| SupportRegion::new(v.into_iter().map(|(a, w)| (a, a + w))).unwrap())
    }

    proptest! {
        #[test]
        fn active_region_is_monotone(s in support_strategy(), t1 in 0.0f64..3.0, dt in 0.0f64..3.0, c in 0.1f64..3.0) {
            let g = LightConeGeometry::new(s, c).unwrap();
            prop_assert!(g.active_region(t1).is_subset_of(&g.active_region(t1 + dt)));
        }

        #[test]
        fn active_region_is_dilation(s in support_strategy(), t in 0.0f64..3.0, c in 0.1f64..3.0) {
            let g = LightConeGeometry::new(s.clone(), c).unwrap();
            prop_assert_eq!(g.active_region(t), s.dilate(c * t));
        }

        #[test]
        fn triangle_points_stay_outside_until_apex(s in support_strategy(), c in 0.1f64..3.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let g = LightConeGeometry::new(s, c).unwrap();
            for tr in &g.triangles {
                let t = u * tr.apex_t;
                let half = (tr.b - tr.a) / 2.0 - c * t;
                let x = tr.apex_x() + (2.0 * v - 1.0) * half * 0.999;
                if tr.contains(x, t, c) {
                    prop_assert!(!g.active_region(t).contains_interior(x));
                }
            }
        }
    }
}
