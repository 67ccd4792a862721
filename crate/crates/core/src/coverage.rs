//! Uniform arms over finite unions of closed sub-intervals of `[0, 1]`, scored
//! by covered measure and estimated by partition occupancy.

use crate::error::{Error, Result};
use crate::model::BanditModel;
use crate::scalar::Real;

/// A finite union of disjoint closed intervals in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet<T> {
    intervals: Vec<(T, T)>,
    measure: T,
}

impl<T: Real> SupportSet<T> {
    /// Validates ordering, disjointness and bounds. Measure 1 (the whole unit
    /// interval) is representable so estimates can be expressed; arms must
    /// satisfy [`SupportSet::is_proper`].
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidParams("support needs at least one interval".into()));
        }
        for &(a, b) in &intervals {
            if !(a >= T::zero() && a < b && b <= T::one()) {
                return Err(Error::InvalidParams(format!(
                    "interval [{a}, {b}] must satisfy 0 <= a < b <= 1"
                )));
            }
        }
        for w in intervals.windows(2) {
            if !(w[0].1 < w[1].0) {
                return Err(Error::InvalidParams(format!(
                    "intervals [{}, {}] and [{}, {}] are unsorted or not disjoint",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        let measure = intervals.iter().fold(T::zero(), |acc, &(a, b)| acc + (b - a));
        Ok(SupportSet { intervals, measure })
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    /// `|S|`.
    pub fn measure(&self) -> T {
        self.measure
    }

    /// `#S`.
    pub fn piece_count(&self) -> usize {
        self.intervals.len()
    }

    /// Member of `F'`: anything but the whole unit interval.
    pub fn is_proper(&self) -> bool {
        self.measure < T::one()
    }

    /// `other ⊆ self`.
    pub fn contains_set(&self, other: &SupportSet<T>) -> bool {
        other
            .intervals
            .iter()
            .all(|&(a, b)| self.intervals.iter().any(|&(c, d)| c <= a && b <= d))
    }

    /// Union of the occupied cells of a width-`1/d` partition, adjacent cells
    /// merged.
    pub fn from_cells(cells: &[bool]) -> Result<Self> {
        let d = T::from_usize(cells.len()).expect("cell count");
        let mut intervals = Vec::new();
        let mut start = None;
        for (k, &occ) in cells.iter().chain(std::iter::once(&false)).enumerate() {
            match (occ, start) {
                (true, None) => start = Some(k),
                (false, Some(s)) => {
                    let a = T::from_usize(s).expect("cell") / d;
                    let b = if k == cells.len() {
                        T::one()
                    } else {
                        T::from_usize(k).expect("cell") / d
                    };
                    intervals.push((a, b));
                    start = None;
                }
                _ => {}
            }
        }
        Self::new(intervals)
    }
}

/// Inverse distribution function of the uniform law on `support`.
pub fn coverage_quantile<T: Real>(support: &SupportSet<T>, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::domain("u", u.f64(), "(0, 1)"));
    }
    let mut remaining = u * support.measure;
    for &(a, b) in &support.intervals {
        let len = b - a;
        if remaining <= len {
            return Ok(a + remaining);
        }
        remaining = remaining - len;
    }
    // Rounding past the last interval.
    Ok(support.intervals.last().expect("nonempty").1)
}

/// Partition size `d_t` and the derived inflation `d̃(t) = d_t + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionSchedule {
    /// `d_t = ⌈√t⌉`.
    #[default]
    Sqrt,
    /// `d_t = max(1, ⌈log₂(t + 1)⌉)`.
    Log2,
}

impl PartitionSchedule {
    pub fn d(&self, t: u64) -> u64 {
        match self {
            PartitionSchedule::Sqrt => {
                let mut r = (t as f64).sqrt() as u64;
                while r * r < t {
                    r += 1;
                }
                while r > 0 && (r - 1) * (r - 1) >= t {
                    r -= 1;
                }
                r.max(1)
            }
            PartitionSchedule::Log2 => {
                let m = t + 1;
                let ceil_log2 = if m <= 1 { 0 } else { 64 - u64::from((m - 1).leading_zeros()) };
                ceil_log2.max(1)
            }
        }
    }

    pub fn d_tilde(&self, t: u64) -> u64 {
        self.d(t) + 1
    }

    /// `min { n : n > d̃(n) }`.
    pub fn n0(&self) -> u64 {
        (1..).find(|&n| n > self.d_tilde(n)).expect("d~ is sublinear")
    }
}

/// Observations of one coverage arm; all are kept because the partition
/// width changes with `t`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoverageStats<T> {
    pub count: u64,
    pub samples: Vec<T>,
    cache: Option<Occupancy>,
}

#[derive(Debug, Clone, PartialEq)]
struct Occupancy {
    d: u64,
    cells: Vec<bool>,
    occupied: u64,
}

fn cell_of<T: Real>(x: T, d: u64) -> usize {
    let k = (x * T::from_u64_lossy(d)).floor().to_usize().unwrap_or(0);
    k.min(d as usize - 1)
}

fn bin<T: Real>(samples: &[T], d: u64) -> Occupancy {
    let mut cells = vec![false; d as usize];
    let mut occupied = 0;
    for &x in samples {
        let k = cell_of(x, d);
        if !cells[k] {
            cells[k] = true;
            occupied += 1;
        }
    }
    Occupancy { d, cells, occupied }
}

impl<T: Real> CoverageStats<T> {
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        let mut s = Self::default();
        for &x in samples {
            s.push(x)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, x: T) -> Result<()> {
        if !(x >= T::zero() && x <= T::one()) {
            return Err(Error::domain("coverage sample", x.f64(), "[0, 1]"));
        }
        self.samples.push(x);
        self.count += 1;
        if let Some(occ) = &mut self.cache {
            let k = cell_of(x, occ.d);
            if !occ.cells[k] {
                occ.cells[k] = true;
                occ.occupied += 1;
            }
        }
        Ok(())
    }

    /// Keeps the memoized occupancy in step with partition size `d`.
    fn refresh(&mut self, d: u64) {
        if self.cache.as_ref().map(|c| c.d) != Some(d) {
            self.cache = Some(bin(&self.samples, d));
        }
    }

    fn cached_measure(&self, d: u64) -> Option<T> {
        self.cache
            .as_ref()
            .filter(|c| c.d == d)
            .map(|c| T::from_u64_lossy(c.occupied) / T::from_u64_lossy(d))
    }
}

/// `|Ŝ_t|` and the occupied cells of the width-`1/d(t)` partition.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEstimate<T> {
    pub measure: T,
    pub cells: Vec<bool>,
}

pub fn coverage_estimate<T: Real>(stats: &CoverageStats<T>, schedule: &PartitionSchedule) -> Result<CoverageEstimate<T>> {
    if stats.count == 0 {
        return Err(Error::Precondition("coverage estimate needs t >= 1".into()));
    }
    let d = schedule.d(stats.count);
    let occ = bin(&stats.samples, d);
    Ok(CoverageEstimate {
        measure: T::from_u64_lossy(occ.occupied) / T::from_u64_lossy(d),
        cells: occ.cells,
    })
}

fn check_measure<T: Real>(what: &'static str, m: T) -> Result<()> {
    if !(m > T::zero() && m < T::one()) {
        return Err(Error::domain(what, m.f64(), "(0, 1)"));
    }
    Ok(())
}

/// `I(f_S, f_T) = ln(|T| / |S|)` when `S ⊆ T`, else `∞`.
pub fn coverage_kl<T: Real>(s_measure: T, t_measure: T, subset: bool) -> Result<T> {
    check_measure("s_measure", s_measure)?;
    check_measure("t_measure", t_measure)?;
    Ok(if subset {
        (t_measure / s_measure).ln()
    } else {
        T::infinity()
    })
}

/// `M(ρ) = ln(ρ / |S|)` for `ρ > |S|`, else 0.
pub fn coverage_m<T: Real>(measure: T, rho: T) -> Result<T> {
    check_measure("measure", measure)?;
    if !(rho <= T::one()) {
        return Err(Error::domain("rho", rho.f64(), "(-inf, 1]"));
    }
    Ok(if rho > measure { (rho / measure).ln() } else { T::zero() })
}

/// `min(|Ŝ| n^{1/(t - d̃(t))}, 1)`.
pub fn coverage_index_at<T: Real>(measure: T, n: u64, t: u64, schedule: &PartitionSchedule) -> Result<T> {
    let dt = schedule.d_tilde(t);
    if t <= dt {
        return Err(Error::Precondition(format!("coverage index needs t > d~(t): t = {t}, d~ = {dt}")));
    }
    let inflation = (T::from_u64_lossy(n).ln() / T::from_u64_lossy(t - dt)).exp();
    Ok((measure * inflation).min(T::one()))
}

pub fn coverage_index<T: Real>(stats: &CoverageStats<T>, n: u64, schedule: &PartitionSchedule) -> Result<T> {
    let t = stats.count;
    if t <= schedule.d_tilde(t) {
        return Err(Error::Precondition(format!("coverage index needs t > d~(t), t = {t}")));
    }
    let d = schedule.d(t);
    let measure = match stats.cached_measure(d) {
        Some(m) => m,
        None => coverage_estimate(stats, schedule)?.measure,
    };
    coverage_index_at(measure, n, t, schedule)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoverageModel {
    pub schedule: PartitionSchedule,
}

impl<T: Real> BanditModel<T> for CoverageModel {
    type Params = SupportSet<T>;
    type Stats = CoverageStats<T>;

    fn name(&self) -> &'static str {
        "coverage"
    }

    fn n0(&self) -> u64 {
        self.schedule.n0()
    }

    fn d_tilde(&self, t: u64) -> u64 {
        self.schedule.d_tilde(t)
    }

    fn validate(&self, arm: &SupportSet<T>) -> Result<()> {
        if !arm.is_proper() {
            return Err(Error::InvalidParams("the whole unit interval is excluded from the family".into()));
        }
        Ok(())
    }

    fn score(&self, arm: &SupportSet<T>) -> T {
        arm.measure()
    }

    fn quantile(&self, arm: &SupportSet<T>, u: T) -> Result<T> {
        coverage_quantile(arm, u)
    }

    fn kl(&self, f: &SupportSet<T>, g: &SupportSet<T>) -> T {
        if g.contains_set(f) {
            (g.measure() / f.measure()).ln()
        } else {
            T::infinity()
        }
    }

    fn m(&self, f: &SupportSet<T>, rho: T) -> Result<T> {
        coverage_m(f.measure(), rho)
    }

    fn new_stats(&self, _arm: &SupportSet<T>) -> CoverageStats<T> {
        CoverageStats::default()
    }

    fn update(&self, stats: &mut CoverageStats<T>, x: T) -> Result<()> {
        stats.push(x)?;
        stats.refresh(self.schedule.d(stats.count));
        Ok(())
    }

    fn count(&self, stats: &CoverageStats<T>) -> u64 {
        stats.count
    }

    fn estimate(&self, stats: &CoverageStats<T>) -> Result<SupportSet<T>> {
        SupportSet::from_cells(&coverage_estimate(stats, &self.schedule)?.cells)
    }

    fn index_at(&self, fhat: &SupportSet<T>, n: u64, t: u64) -> Result<T> {
        coverage_index_at(fhat.measure(), n, t, &self.schedule)
    }

    fn index(&self, stats: &CoverageStats<T>, n: u64) -> Result<T> {
        coverage_index(stats, n, &self.schedule)
    }
}
