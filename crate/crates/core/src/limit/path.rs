//! Discretized paths, reflection, excursions and Poisson marks.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ordered::{ord, OrderedPairVector};
use crate::scalar::Scalar;

/// Real-valued path sampled on the grid `t_i = i dt`, `i = 0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPath<T> {
    dt: T,
    values: Vec<T>,
    /// times of the jumps, if the path has any
    jump_times: Vec<T>,
}

impl<T: Scalar> LimitPath<T> {
    pub fn new(dt: T, values: Vec<T>) -> Result<Self> {
        Self::with_jumps(dt, values, Vec::new())
    }

    pub fn with_jumps(dt: T, values: Vec<T>, mut jump_times: Vec<T>) -> Result<Self> {
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(invalid(format!("grid step {dt} must be positive")));
        }
        if values.is_empty() {
            return Err(invalid("a path needs at least one grid value"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite path value at grid index {i}")));
        }
        jump_times.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self { dt, values, jump_times })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn jump_times(&self) -> &[T] {
        &self.jump_times
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> T {
        T::from_count(i) * self.dt
    }

    pub fn horizon(&self) -> T {
        self.time(self.values.len() - 1)
    }

    /// Value at the last grid point not after `t`.
    pub fn value_at(&self, t: T) -> T {
        let i = (t / self.dt).floor().to_usize().unwrap_or(0).min(self.values.len() - 1);
        self.values[i]
    }

    /// `(t, value)` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W, header: &str) -> Result<()> {
        writeln!(w, "t,{header}")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.time(i), v)?;
        }
        Ok(())
    }
}

/// `S(t) - min_{s <= t} S(s)`.
pub fn reflect<T: Scalar>(p: &LimitPath<T>) -> LimitPath<T> {
    let mut running = T::infinity();
    let values = p
        .values
        .iter()
        .map(|&v| {
            running = running.min(v);
            v - running
        })
        .collect();
    LimitPath { dt: p.dt, values, jump_times: p.jump_times.clone() }
}

/// Excursion `(l, r)` of a discretized path above its running minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excursion<T> {
    pub start: T,
    pub end: T,
    pub length: T,
    pub start_index: usize,
    pub end_index: usize,
    /// false when the path ends before returning to its running minimum
    pub complete: bool,
    pub marks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSet<T> {
    excursions: Vec<Excursion<T>>,
}

impl<T: Scalar> ExcursionSet<T> {
    /// Ordered by length descending, ties by start time.
    pub fn excursions(&self) -> &[Excursion<T>] {
        &self.excursions
    }

    pub fn len(&self) -> usize {
        self.excursions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excursions.is_empty()
    }

    pub fn lengths(&self) -> Vec<T> {
        self.excursions.iter().map(|e| e.length).collect()
    }

    pub fn marks(&self) -> Vec<u64> {
        self.excursions.iter().map(|e| e.marks).collect()
    }

    /// Adds per-cell mark counts (as from [`poisson_marks`]) to the
    /// excursions containing the cells; cells outside every excursion are
    /// dropped.
    pub fn attach_marks(&mut self, cell_counts: &[u64]) {
        for e in &mut self.excursions {
            let hi = e.end_index.min(cell_counts.len());
            e.marks = cell_counts[e.start_index.min(hi)..hi].iter().sum();
        }
    }
}

/// Default excursion tolerance `2 dt max_drift`.
pub fn default_tolerance<T: Scalar>(dt: T, max_drift: T) -> T {
    T::lit(2.0) * dt * max_drift.abs()
}

/// Maximal runs of grid points where the reflected path exceeds `tol`. The
/// excursion runs from the last grid point at or below `tol` before the run
/// to the first one after it.
pub fn excursions<T: Scalar>(p: &LimitPath<T>, tol: T) -> Result<ExcursionSet<T>> {
    if !(tol >= T::zero()) {
        return Err(invalid("excursion tolerance must be nonnegative"));
    }
    let r = reflect(p);
    let v = r.values();
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        if v[i] > tol {
            let first = i;
            while i < v.len() && v[i] > tol {
                i += 1;
            }
            // v[0] is always 0, so first >= 1
            let start_index = first - 1;
            let (end_index, complete) = if i < v.len() { (i, true) } else { (v.len() - 1, false) };
            let (start, end) = (p.time(start_index), p.time(end_index));
            out.push(Excursion { start, end, length: end - start, start_index, end_index, complete, marks: 0 });
        } else {
            i += 1;
        }
    }
    out.sort_by(|a, b| {
        b.length.partial_cmp(&a.length).unwrap_or(std::cmp::Ordering::Equal).then(a.start_index.cmp(&b.start_index))
    });
    Ok(ExcursionSet { excursions: out })
}

/// Counts of an inhomogeneous Poisson process with intensity
/// `scale * reflected(t)`, one count per grid cell `[t_i, t_{i+1})`.
pub fn poisson_marks<T: Scalar, R: Rng + ?Sized>(reflected: &LimitPath<T>, scale: T, rng: &mut R) -> Result<Vec<u64>> {
    if !(scale >= T::zero()) {
        return Err(invalid("mark intensity scale must be nonnegative"));
    }
    let dt = reflected.dt().as_f64();
    let s = scale.as_f64();
    let v = reflected.values();
    let mut counts = Vec::with_capacity(v.len().saturating_sub(1));
    for &x in &v[..v.len() - 1] {
        let x = x.as_f64();
        if x < 0.0 {
            return Err(invalid("reflected path must be nonnegative"));
        }
        let rate = s * x * dt;
        counts.push(if rate > 0.0 {
            Poisson::new(rate).map_err(|e| invalid(e.to_string()))?.sample(rng) as u64
        } else {
            0
        });
    }
    Ok(counts)
}

/// `ord((scale |gamma_j|, N(gamma_j)))`.
pub fn limit_component_vector<T: Scalar>(set: &ExcursionSet<T>, length_scale: T) -> OrderedPairVector<T> {
    ord(set.excursions.iter().map(|e| (e.length * length_scale, e.marks)))
}
