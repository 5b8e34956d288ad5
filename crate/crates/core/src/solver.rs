//! Exact maximisation of the sample variance over an interval box.
//!
//! The sweep visits every distinct endpoint `a_1 < ... < a_m` of the narrowed
//! intervals. At `a_k` the free set `L` holds the indices whose narrowed
//! interval contains `a_k`; every other coordinate is pinned (upper if its
//! narrowed interval starts after `a_k`, lower if it ended before). All
//! `2^|L|` assignments of the free coordinates are walked in reflected Gray
//! code order so that each step is a single O(1) flip of the running
//! `(v1, v2)` pair. Each walk returns the free coordinates to their upper
//! endpoints, after which the indices ending at `a_k` are moved to lower.
//!
//! Every endpoint is swept, not only those inside the range of attainable
//! means. Restricting to that range leaves narrowed intervals lying wholly
//! outside it pinned at the wrong endpoint (`{[0,1],[10,11]}` would report 25
//! instead of 30.25).

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::intgraph::narrowed_bounds;
use crate::model::{Instance, SignVector};
use crate::variance::{flip_delta, variance_direct, CompensatedSum, VarianceState};

/// Largest free set the enumeration accepts.
pub const MAX_ENUMERATION_WIDTH: usize = 62;

/// Distinct narrowed endpoints with the indices beginning and ending at each.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSchedule {
    points: Vec<f64>,
    begin_offsets: Vec<usize>,
    begins: Vec<usize>,
    end_offsets: Vec<usize>,
    ends: Vec<usize>,
    begin_point: Vec<usize>,
    end_point: Vec<usize>,
}

impl SweepSchedule {
    /// Number of distinct points `m`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn begins_at(&self, k: usize) -> &[usize] {
        &self.begins[self.begin_offsets[k]..self.begin_offsets[k + 1]]
    }

    pub fn ends_at(&self, k: usize) -> &[usize] {
        &self.ends[self.end_offsets[k]..self.end_offsets[k + 1]]
    }

    /// Schedule position where the narrowed interval of `i` begins.
    pub fn begin_point_of(&self, i: usize) -> usize {
        self.begin_point[i]
    }

    pub fn end_point_of(&self, i: usize) -> usize {
        self.end_point[i]
    }

    /// Size of the free set at each point (after its begins are merged).
    pub fn widths(&self) -> impl Iterator<Item = usize> + '_ {
        let mut open = 0usize;
        (0..self.len()).map(move |k| {
            open += self.begins_at(k).len();
            let w = open;
            open -= self.ends_at(k).len();
            w
        })
    }

    /// Largest free set over the sweep.
    pub fn max_width(&self) -> usize {
        self.widths().max().unwrap_or(0)
    }
}

/// Sorts all `2n` narrowed endpoints and merges exactly equal values.
pub fn build_schedule(instance: &Instance) -> SweepSchedule {
    let n = instance.len();
    let mut events: Vec<(f64, bool, usize)> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (lo, hi) = narrowed_bounds(instance, i);
        events.push((lo, false, i));
        events.push((hi, true, i));
    }
    events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut points = Vec::with_capacity(2 * n);
    let mut begin_offsets = vec![0];
    let mut end_offsets = vec![0];
    let mut begins = Vec::with_capacity(n);
    let mut ends = Vec::with_capacity(n);
    let mut begin_point = vec![0; n];
    let mut end_point = vec![0; n];

    for (value, is_end, i) in events {
        if points.last() != Some(&value) {
            if !points.is_empty() {
                begin_offsets.push(begins.len());
                end_offsets.push(ends.len());
            }
            points.push(value);
        }
        let k = points.len() - 1;
        if is_end {
            ends.push(i);
            end_point[i] = k;
        } else {
            begins.push(i);
            begin_point[i] = k;
        }
    }
    begin_offsets.push(begins.len());
    end_offsets.push(ends.len());

    SweepSchedule {
        points,
        begin_offsets,
        begins,
        end_offsets,
        ends,
        begin_point,
        end_point,
    }
}

/// Position flipped at step `counter` of a cyclic reflected Gray walk of the
/// given width: the lowest zero bit of the counter, or the top position when
/// the counter is all ones. After `2^width` steps every position has been
/// flipped an even number of times.
#[inline]
pub fn gray_position(counter: u64, width: usize) -> usize {
    (counter.trailing_ones() as usize).min(width - 1)
}

fn check_width(width: usize) -> Result<()> {
    if width > MAX_ENUMERATION_WIDTH {
        Err(Error::WidthExceeded {
            width,
            limit: MAX_ENUMERATION_WIDTH,
        })
    } else {
        Ok(())
    }
}

/// One step of [`traverse_free`].
#[derive(Debug, Clone, Copy)]
pub struct Visit<'a> {
    pub counter: u64,
    /// Position within the free list that was flipped.
    pub position: usize,
    /// Free-list positions currently at their lower endpoint.
    pub lowered: u64,
    pub state: &'a VarianceState,
}

/// Walks all `2^|free|` endpoint assignments of the free coordinates,
/// starting and ending with every free coordinate at its upper endpoint.
/// `visit` is called after each flip. Returns the number of vertices visited.
pub fn traverse_free(
    instance: &Instance,
    free: &[usize],
    state: &mut VarianceState,
    mut visit: impl FnMut(Visit<'_>),
) -> Result<u64> {
    let width = free.len();
    check_width(width)?;
    for &j in free {
        instance.check_index(j)?;
    }
    if width == 0 {
        return Ok(0);
    }
    let deltas: Vec<(f64, f64)> = free.iter().map(|&j| flip_delta(instance, j, -1)).collect();
    let mut lowered = 0u64;
    let total = 1u64 << width;
    for counter in 0..total {
        let p = gray_position(counter, width);
        let bit = 1u64 << p;
        let (d1, d2) = deltas[p];
        if lowered & bit == 0 {
            state.apply(d1, d2);
        } else {
            state.apply(-d1, -d2);
        }
        lowered ^= bit;
        visit(Visit {
            counter,
            position: p,
            lowered,
            state,
        });
    }
    debug_assert_eq!(lowered, 0);
    Ok(total)
}

/// Outcome of [`enumerate_free`].
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnumeration {
    pub best: f64,
    /// Set only when some vertex strictly beat the incoming incumbent.
    pub best_signs: Option<SignVector>,
    pub visited: u64,
}

/// Examines every vertex obtained from `base` by moving any subset of the
/// `free` coordinates to their lower endpoints, keeping the first strict
/// improvement over `best`.
///
/// `base` must have every free coordinate at `+1` and `state` must describe
/// `base`. On return `state` describes `base` again, up to rounding. An empty
/// free list examines nothing: `base` itself is assumed already counted.
pub fn enumerate_free(
    instance: &Instance,
    free: &[usize],
    base: &SignVector,
    state: &mut VarianceState,
    best: f64,
) -> Result<FreeEnumeration> {
    base.check_len(instance.len())?;
    if let Some(&j) = free.iter().find(|&&j| j < base.len() && base.get(j) != 1) {
        return Err(Error::domain(format!(
            "free coordinate {j} must start at its upper endpoint"
        )));
    }
    let mut incumbent = best;
    let mut winner: Option<u64> = None;
    let visited = traverse_free(instance, free, state, |v| {
        let value = v.state.value();
        if value > incumbent {
            incumbent = value;
            winner = Some(v.lowered);
        }
    })?;
    let best_signs = winner.map(|lowered| {
        let mut s = base.clone();
        for (p, &j) in free.iter().enumerate() {
            if lowered >> p & 1 == 1 {
                s.set(j, -1);
            }
        }
        s
    });
    Ok(FreeEnumeration {
        best: incumbent,
        best_signs,
        visited,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Maximum variance, recomputed directly at `argmax_signs`.
    pub max_variance: f64,
    pub argmax_signs: SignVector,
    /// Largest free set seen during the sweep.
    pub omega_observed: usize,
    /// Number of distinct narrowed endpoints.
    pub m: usize,
    /// `1 + sum_k 2^|L_k|`, saturating.
    pub vertices_examined: u64,
    /// Sweep points actually processed.
    pub schedule_points: usize,
    pub wall_time: Duration,
}

struct Incumbent {
    step: usize,
    lowered: Vec<usize>,
}

/// Maximum of the population variance over the box, with its maximiser.
///
/// Refuses with [`Error::WidthExceeded`] (carrying the clique number) when
/// some free set would exceed [`MAX_ENUMERATION_WIDTH`].
pub fn solve_max_variance(instance: &Instance) -> Result<SolveResult> {
    let started = Instant::now();
    let n = instance.len();
    let schedule = build_schedule(instance);
    let omega = schedule.max_width();
    check_width(omega)?;

    // Running sums are kept around the mean center; the schedule still uses
    // the original endpoints so free sets match the intersection graph.
    let shift = {
        let s: CompensatedSum = instance.center().iter().copied().collect();
        s.value() / n as f64
    };
    let work = instance.translated(shift)?;
    let to_lower: Vec<(f64, f64)> = (0..n).map(|j| flip_delta(&work, j, -1)).collect();

    let mut state = VarianceState::at_upper(&work);
    let mut best = state.value();
    let mut incumbent: Option<Incumbent> = None;
    let mut examined: u64 = 1;

    let mut free: Vec<usize> = Vec::with_capacity(omega);
    let mut slot = vec![usize::MAX; n];
    let mut d1 = Vec::with_capacity(omega);
    let mut d2 = Vec::with_capacity(omega);

    for k in 0..schedule.len() {
        for &i in schedule.begins_at(k) {
            slot[i] = free.len();
            free.push(i);
        }

        let width = free.len();
        if width > 0 {
            d1.clear();
            d2.clear();
            for &j in &free {
                d1.push(to_lower[j].0);
                d2.push(to_lower[j].1);
            }
            let mut lowered = 0u64;
            let mut step_best: Option<u64> = None;
            for counter in 0..(1u64 << width) {
                let p = gray_position(counter, width);
                let bit = 1u64 << p;
                if lowered & bit == 0 {
                    state.apply(d1[p], d2[p]);
                } else {
                    state.apply(-d1[p], -d2[p]);
                }
                lowered ^= bit;
                let v = state.value();
                if v > best {
                    best = v;
                    step_best = Some(lowered);
                }
            }
            examined = examined.saturating_add(1u64 << width);
            if let Some(mask) = step_best {
                incumbent = Some(Incumbent {
                    step: k,
                    lowered: (0..width)
                        .filter(|p| mask >> p & 1 == 1)
                        .map(|p| free[p])
                        .collect(),
                });
            }
        }

        for &i in schedule.ends_at(k) {
            let s = slot[i];
            free.swap_remove(s);
            if s < free.len() {
                slot[free[s]] = s;
            }
            slot[i] = usize::MAX;
            state.apply(to_lower[i].0, to_lower[i].1);
        }
    }

    let argmax_signs = match incumbent {
        None => SignVector::all_upper(n),
        Some(inc) => {
            let mut s = SignVector::all_upper(n);
            for i in 0..n {
                if schedule.end_point_of(i) < inc.step {
                    s.set(i, -1);
                }
            }
            for &i in &inc.lowered {
                s.set(i, -1);
            }
            s
        }
    };
    let max_variance = variance_direct(instance, &argmax_signs)?;

    Ok(SolveResult {
        max_variance,
        argmax_signs,
        omega_observed: omega,
        m: schedule.len(),
        vertices_examined: examined,
        schedule_points: schedule.len(),
        wall_time: started.elapsed(),
    })
}
