//! Phenomenology extraction: beat envelopes, the pulse/oscillation event at
//! odd multiples of pi, critical points of density fields, and periodicity
//! measurement.

use crate::dynamics::{DensityField, TimeSeries};
use crate::error::{Error, Result};
use crate::scaled::wrap_phase;
use std::f64::consts::PI;

/// Minimum number of samples between consecutive extrema of the oscillation.
const MIN_EXTREMA_SPACING: usize = 4;

/// Beat-envelope summary of a theta(t) series.
#[derive(Clone, Debug)]
pub struct BeatReport {
    /// Times of the local extrema of |theta - center| (the envelope nodes).
    pub envelope_times: Vec<f64>,
    pub envelope_values: Vec<f64>,
    /// Refined times of the envelope minima, one per beat cycle.
    pub minima_times: Vec<f64>,
    /// Mean spacing of consecutive minima; `None` for degenerate input with
    /// fewer than two minima (e.g. a constant series).
    pub beat_period: Option<f64>,
    pub clamp_count: usize,
}

/// Envelope of the oscillation of `series.theta` around `center`.
///
/// The envelope is the polyline through the local maxima of
/// `|theta(t) - center|`; its local minima are refined by a parabola through
/// the three surrounding envelope nodes and deduplicated so that only one
/// minimum per beat cycle survives.
pub fn beat_envelope(series: &TimeSeries, center: f64) -> Result<BeatReport> {
    let report = envelope_of(&series.times, &series.theta, center)?;
    Ok(BeatReport { clamp_count: series.clamp_count, ..report })
}

fn envelope_of(times: &[f64], values: &[f64], center: f64) -> Result<BeatReport> {
    let y: Vec<f64> = values.iter().map(|v| (v - center).abs()).collect();
    let mut peak_idx = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            peak_idx.push(i);
        }
    }
    if peak_idx.windows(2).any(|w| w[1] - w[0] < MIN_EXTREMA_SPACING) {
        return Err(Error::TooCoarseSampling(MIN_EXTREMA_SPACING));
    }
    let envelope_times: Vec<f64> = peak_idx.iter().map(|&i| times[i]).collect();
    let envelope_values: Vec<f64> = peak_idx.iter().map(|&i| y[i]).collect();

    // candidate minima of the envelope polyline, refined parabolically
    let mut candidates = Vec::new();
    for k in 1..envelope_values.len().saturating_sub(1) {
        if envelope_values[k] < envelope_values[k - 1] && envelope_values[k] < envelope_values[k + 1]
        {
            let t = parabola_vertex(
                envelope_times[k - 1],
                envelope_values[k - 1],
                envelope_times[k],
                envelope_values[k],
                envelope_times[k + 1],
                envelope_values[k + 1],
            );
            candidates.push((t, envelope_values[k]));
        }
    }

    // suppress ripple minima: keep the lowest candidate within a separation
    // window tied to the fast-oscillation scale
    let spacing = median_spacing(&envelope_times);
    let min_separation = 10.0 * spacing;
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut accepted: Vec<(f64, f64)> = Vec::new();
    for (t, v) in candidates {
        if accepted.iter().all(|&(ta, _)| (t - ta).abs() >= min_separation) {
            accepted.push((t, v));
        }
    }
    accepted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let minima_times: Vec<f64> = accepted.iter().map(|&(t, _)| t).collect();

    let beat_period = if minima_times.len() >= 2 {
        let total: f64 = minima_times.windows(2).map(|w| w[1] - w[0]).sum();
        Some(total / (minima_times.len() - 1) as f64)
    } else {
        None
    };

    Ok(BeatReport { envelope_times, envelope_values, minima_times, beat_period, clamp_count: 0 })
}

fn median_spacing(times: &[f64]) -> f64 {
    if times.len() < 2 {
        return 0.0;
    }
    let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    gaps[gaps.len() / 2]
}

/// Vertex abscissa of the parabola through three points, clamped into
/// [t0, t2]; falls back to t1 when the points are not convex.
fn parabola_vertex(t0: f64, v0: f64, t1: f64, v1: f64, t2: f64, v2: f64) -> f64 {
    let d01 = (v1 - v0) / (t1 - t0);
    let d12 = (v2 - v1) / (t2 - t1);
    let curv = (d12 - d01) / (t2 - t0);
    if curv <= 0.0 {
        return t1;
    }
    let t = 0.5 * (t0 + t1) - d01 / (2.0 * curv);
    t.clamp(t0, t2)
}

/// The two behaviors of phi(t) at t* = (2k+1) pi.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TStarEvent {
    /// Rapid passage centered on the azimuth of the initial position: the
    /// graph sweeps once through phi_ref.
    Pulse,
    /// Rapid passage centered on the antipode: plotted against the phi_ref
    /// level the graph swings up, wraps, and returns, oscillating around it.
    Oscillation,
}

/// Classify the phi(t) event at `t_star`.
///
/// Linear trends are fitted separately to the unwrapped phase on the two
/// outer quarters of the window (w/2 <= |t - t*| <= w); their pointwise mean
/// bridges the event.  The event exists when the inner residual against the
/// bridge exceeds five times the outer noise floor (the larger of the two
/// per-side fit residuals).  The kind is decided by where the rapid passage
/// is centered: phi at t* sits on the reference azimuth for a pulse and on
/// its antipode for an oscillation.  The comparison uses `series.phi_ref`,
/// so re-gauging the azimuth (adding a constant to all phases and the
/// reference together) and translating the times leave the outcome
/// unchanged.
pub fn classify_t_star_event(
    series: &TimeSeries,
    t_star: f64,
    window: f64,
) -> Result<TStarEvent> {
    let n_window = series
        .times
        .iter()
        .filter(|&&t| (t - t_star).abs() <= window)
        .count();
    if n_window < 40 {
        return Err(Error::TooCoarseSampling(40));
    }

    let mut left = (Vec::new(), Vec::new());
    let mut right = (Vec::new(), Vec::new());
    let mut inner = Vec::new();
    for (i, &t) in series.times.iter().enumerate() {
        let d = t - t_star;
        if d.abs() <= window && d.abs() >= window / 2.0 {
            let side = if d < 0.0 { &mut left } else { &mut right };
            side.0.push(t);
            side.1.push(series.phi_unwrapped[i]);
        } else if d.abs() < window / 2.0 {
            inner.push(i);
        }
    }
    if left.0.len() < 8 || right.0.len() < 8 || inner.is_empty() {
        return Err(Error::TooCoarseSampling(40));
    }

    let (al, bl) = linear_fit(&left.0, &left.1);
    let (ar, br) = linear_fit(&right.0, &right.1);
    let rms = |ts: &[f64], ps: &[f64], a: f64, b: f64| -> f64 {
        let ss: f64 = ts
            .iter()
            .zip(ps)
            .map(|(&t, &p)| {
                let r = p - (a + b * t);
                r * r
            })
            .sum();
        (ss / ts.len() as f64).sqrt()
    };
    let noise = rms(&left.0, &left.1, al, bl).max(rms(&right.0, &right.1, ar, br));
    let bridge = |t: f64| 0.5 * ((al + bl * t) + (ar + br * t));
    let max_residual = inner
        .iter()
        .map(|&i| (series.phi_unwrapped[i] - bridge(series.times[i])).abs())
        .fold(0.0, f64::max);
    if max_residual < 5.0 * noise.max(1e-12) {
        return Err(Error::IndeterminateEvent);
    }

    // interpolate the unwrapped phase at t* and compare, mod 2pi, with the
    // reference azimuth
    let phi_c = interpolate(&series.times, &series.phi_unwrapped, t_star);
    let delta = wrap_phase(phi_c - series.phi_ref);
    if delta.abs() <= PI / 2.0 {
        Ok(TStarEvent::Pulse)
    } else {
        Ok(TStarEvent::Oscillation)
    }
}

fn linear_fit(ts: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = ts.len() as f64;
    let st: f64 = ts.iter().sum();
    let sy: f64 = ys.iter().sum();
    let stt: f64 = ts.iter().map(|t| t * t).sum();
    let sty: f64 = ts.iter().zip(ys).map(|(t, y)| t * y).sum();
    let denom = n * stt - st * st;
    let b = (n * sty - st * sy) / denom;
    let a = (sy - b * st) / n;
    (a, b)
}

fn interpolate(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    match ts.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => ys[i],
        Err(i) => {
            if i == 0 {
                ys[0]
            } else if i >= ts.len() {
                *ys.last().unwrap()
            } else {
                let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
                ys[i - 1] * (1.0 - w) + ys[i] * w
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalKind {
    Maximum,
    Minimum,
    Saddle,
}

/// A grid node that is extremal or saddle-like against its 8 neighbors.
#[derive(Clone, Copy, Debug)]
pub struct CriticalPoint {
    pub theta_index: usize,
    pub phi_index: usize,
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
    pub kind: CriticalKind,
}

/// Locate critical nodes of a density field.
///
/// Neighbors wrap in phi; stepping over a pole lands on the same theta row
/// shifted by half a turn.  A node is a maximum/minimum when it beats all 8
/// neighbors, and a saddle when the sign of (neighbor - value) alternates at
/// least four times around the neighbor ring while the discrete Hessian
/// (second differences in theta, phi, and mixed) has negative determinant.
/// Results are reliable from about 64x128 upward.
pub fn find_critical_points(field: &DensityField) -> Vec<CriticalPoint> {
    let grid = field.grid();
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let value = |a: i64, b: i64| -> f64 {
        let bw = b.rem_euclid(np as i64) as usize;
        if a < 0 {
            field.value(0, (bw + np / 2) % np)
        } else if a >= nt as i64 {
            field.value(nt - 1, (bw + np / 2) % np)
        } else {
            field.value(a as usize, bw)
        }
    };

    let mut out = Vec::new();
    for a in 0..nt as i64 {
        for b in 0..np as i64 {
            let v = value(a, b);
            // ring in cyclic order: E, NE, N, NW, W, SW, S, SE
            let ring = [
                value(a, b + 1),
                value(a - 1, b + 1),
                value(a - 1, b),
                value(a - 1, b - 1),
                value(a, b - 1),
                value(a + 1, b - 1),
                value(a + 1, b),
                value(a + 1, b + 1),
            ];
            let kind = if ring.iter().all(|&r| r < v) {
                Some(CriticalKind::Maximum)
            } else if ring.iter().all(|&r| r > v) {
                Some(CriticalKind::Minimum)
            } else {
                let signs: Vec<i8> = ring
                    .iter()
                    .filter(|&&r| r != v)
                    .map(|&r| if r > v { 1 } else { -1 })
                    .collect();
                let changes = signs
                    .iter()
                    .zip(signs.iter().cycle().skip(1))
                    .take(signs.len())
                    .filter(|(x, y)| x != y)
                    .count();
                let f_tt = value(a - 1, b) + value(a + 1, b) - 2.0 * v;
                let f_pp = value(a, b - 1) + value(a, b + 1) - 2.0 * v;
                let f_tp = (value(a + 1, b + 1) + value(a - 1, b - 1)
                    - value(a - 1, b + 1)
                    - value(a + 1, b - 1))
                    / 4.0;
                if changes >= 4 && f_tt * f_pp - f_tp * f_tp < 0.0 {
                    Some(CriticalKind::Saddle)
                } else {
                    None
                }
            };
            if let Some(kind) = kind {
                out.push(CriticalPoint {
                    theta_index: a as usize,
                    phi_index: b as usize,
                    theta: grid.theta(a as usize),
                    phi: grid.phi(b as usize),
                    value: v,
                    kind,
                });
            }
        }
    }
    out
}

/// Merge critical points of the same kind that sit within `radius` nodes of
/// each other (phi wraps); each cluster is represented by its strongest node.
pub fn cluster_critical_points(
    points: &[CriticalPoint],
    n_phi: usize,
    radius: usize,
) -> Vec<CriticalPoint> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &k| points[k].value.total_cmp(&points[i].value));
    let mut reps: Vec<CriticalPoint> = Vec::new();
    for i in order {
        let p = points[i];
        let close = reps.iter().any(|r| {
            if r.kind != p.kind {
                return false;
            }
            let dt = r.theta_index.abs_diff(p.theta_index);
            let dp_raw = r.phi_index.abs_diff(p.phi_index);
            let dp = dp_raw.min(n_phi - dp_raw);
            dt <= radius && dp <= radius
        });
        if !close {
            reps.push(p);
        }
    }
    reps.sort_by(|a, b| {
        (a.theta_index, a.phi_index).cmp(&(b.theta_index, b.phi_index))
    });
    reps
}

/// Maximum sup-norm deviation between `producer(t)` and `producer(t + period)`
/// over `samples` probe times spread across one period.
pub fn periodicity_check(
    producer: impl Fn(f64) -> Vec<f64>,
    period: f64,
    samples: usize,
) -> f64 {
    let times: Vec<f64> = (0..samples)
        .map(|k| (k as f64 + 0.25) * period / samples as f64)
        .collect();
    periodicity_check_at(producer, period, &times)
}

/// As [`periodicity_check`] with explicit probe times.
pub fn periodicity_check_at(
    producer: impl Fn(f64) -> Vec<f64>,
    period: f64,
    times: &[f64],
) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in times {
        let a = producer(t);
        let b = producer(t + period);
        assert_eq!(a.len(), b.len(), "producer changed its shape");
        let dev = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::TimeSeries;
    use std::f64::consts::TAU;

    fn synthetic_beat(phase: f64) -> TimeSeries {
        let times: Vec<f64> = (0..4000).map(|k| k as f64 * (4.0 * TAU / 3999.0)).collect();
        let theta: Vec<f64> = times
            .iter()
            .map(|&t| (10.0 * t + phase).sin() * (1.0 + 0.5 * t.cos()))
            .collect();
        TimeSeries::from_theta(times, theta)
    }

    #[test]
    fn synthetic_envelope_minima_and_period() {
        // sin(10 t) (1 + 0.5 cos t): envelope minima at pi and 3 pi, period 2 pi
        let report = beat_envelope(&synthetic_beat(0.0), 0.0).unwrap();
        assert!(!report.minima_times.is_empty());
        let near_pi = report
            .minima_times
            .iter()
            .cloned()
            .min_by(|a, b| (a - PI).abs().total_cmp(&(b - PI).abs()))
            .unwrap();
        assert!((near_pi - PI).abs() < 0.2, "first minimum at {near_pi}");
        let period = report.beat_period.unwrap();
        assert!((period - TAU).abs() <= 0.05 * TAU, "period {period}");
    }

    #[test]
    fn synthetic_envelope_period_across_phases() {
        for k in 0..10 {
            let phase = k as f64 * 0.618;
            let report = beat_envelope(&synthetic_beat(phase), 0.0).unwrap();
            let period = report.beat_period.unwrap();
            assert!((period - TAU).abs() <= 0.05 * TAU, "phase {phase}: period {period}");
        }
    }

    #[test]
    fn constant_series_is_degenerate() {
        let times: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let theta = vec![1.3; 100];
        let report = beat_envelope(&TimeSeries::from_theta(times, theta), 1.3).unwrap();
        assert!(report.minima_times.is_empty());
        assert!(report.beat_period.is_none());
    }

    #[test]
    fn coarse_sampling_is_rejected() {
        // a sawtooth with extrema two samples apart violates the spacing floor
        let times: Vec<f64> = (0..60).map(|k| k as f64 * 1.0).collect();
        let theta: Vec<f64> = (0..60).map(|k| (k % 2) as f64 + 0.1 * (k % 3) as f64).collect();
        let err = beat_envelope(&TimeSeries::from_theta(times, theta), 0.0);
        assert!(matches!(err, Err(Error::TooCoarseSampling(_))));
    }

    #[test]
    fn pure_linear_phase_is_indeterminate() {
        let times: Vec<f64> = (0..2000).map(|k| k as f64 * 0.0126).collect();
        let phi: Vec<f64> = times.iter().map(|&t| 0.3 + 11.0 * t).collect();
        let series = TimeSeries::from_phi_unwrapped(times, phi, 0.3);
        let got = classify_t_star_event(&series, PI, 1.2);
        assert!(matches!(got, Err(Error::IndeterminateEvent)));
    }

    #[test]
    fn classifier_needs_enough_samples() {
        let times: Vec<f64> = (0..30).map(|k| k as f64).collect();
        let phi = times.clone();
        let series = TimeSeries::from_phi_unwrapped(times, phi, 0.0);
        assert!(matches!(
            classify_t_star_event(&series, 15.0, 1.0),
            Err(Error::TooCoarseSampling(_))
        ));
    }

    fn synthetic_step(center_offset: f64, phi_ref: f64, shift: f64) -> TimeSeries {
        // sawtooth trend plus a tanh step of height pi centered so that the
        // passage value at t* is phi_ref + center_offset
        let t_star = PI;
        let slope = 11.5;
        let times: Vec<f64> = (0..2000).map(|k| shift + k as f64 * (8.0 * PI / 1999.0)).collect();
        let phi: Vec<f64> = times
            .iter()
            .map(|&t| {
                let tt = t - shift;
                let step = (PI / 2.0) * ((tt - t_star) / 0.02).tanh();
                // anchor the trend so phi(t*) = phi_ref + center_offset
                phi_ref + center_offset + slope * (tt - t_star) + step
            })
            .collect();
        TimeSeries::from_phi_unwrapped(times, phi, phi_ref)
    }

    #[test]
    fn classifier_separates_center_from_antipode() {
        let s = synthetic_step(0.0, 0.4, 0.0);
        assert_eq!(classify_t_star_event(&s, PI, 1.2).unwrap(), TStarEvent::Pulse);
        let s = synthetic_step(PI, 0.4, 0.0);
        assert_eq!(classify_t_star_event(&s, PI, 1.2).unwrap(), TStarEvent::Oscillation);
    }

    #[test]
    fn classifier_invariances() {
        // re-gauging the azimuth (series and reference together) and shifting
        // the time origin do not change the outcome
        let base = classify_t_star_event(&synthetic_step(0.0, 0.4, 0.0), PI, 1.2).unwrap();
        let mut gauged = synthetic_step(0.0, 0.4, 0.0);
        for p in gauged.phi_unwrapped.iter_mut() {
            *p += 2.13;
        }
        for p in gauged.phi.iter_mut() {
            *p = (*p + 2.13).rem_euclid(TAU);
        }
        gauged.phi_ref += 2.13;
        assert_eq!(classify_t_star_event(&gauged, PI, 1.2).unwrap(), base);

        let shifted = synthetic_step(0.0, 0.4, 5.0);
        assert_eq!(classify_t_star_event(&shifted, PI + 5.0, 1.2).unwrap(), base);
    }

    #[test]
    fn periodicity_of_simple_producers() {
        let producer = |t: f64| vec![t.sin(), (2.0 * t).cos()];
        assert!(periodicity_check(&producer, TAU, 5) < 1e-12);
        assert!(periodicity_check(&producer, PI, 5) > 1e-3);
        let constant = |_: f64| vec![2.5, -1.0];
        assert_eq!(periodicity_check(&constant, 0.77, 5), 0.0);
    }
}
