//! Hypothesis falsification: emptiness of the feasible function set, the
//! curve separating falsified from unfalsified hypothesis pairs, and the
//! recursive stream test with hypothesis inflation.
//!
//! The ground truth is the exact pairwise condition: hypotheses (gamma, eps)
//! are falsified by the data iff some ordered sample pair (j, k) satisfies
//! `y_k - y_j - 2*eps > gamma * ||u_k - u_j||`. Ties (margin exactly zero)
//! are classified unfalsified with the boundary flag set.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::data::{euclidean, BoundingBox, Dataset, Sample, SmHypotheses};
use crate::envelope::Envelope;
use crate::error::{Error, Result};

/// Relative tolerance for flagging near-boundary verdicts.
const BOUNDARY_RTOL: f64 = 1e-12;

/// Outcome of a falsification test.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub falsified: bool,
    /// Worst violating ordered pair and its margin; present iff falsified.
    pub witness: Option<Witness>,
    /// Worst margin within tolerance of zero: the hypotheses graze the data.
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    /// Ordered sample indices (j, k): the cone from j is violated at k.
    pub pair: (usize, usize),
    /// Violation amount; strictly positive.
    pub margin: f64,
}

impl Verdict {
    pub fn witness_pair(&self) -> Option<(usize, usize)> {
        self.witness.map(|w| w.pair)
    }

    pub fn margin(&self) -> Option<f64> {
        self.witness.map(|w| w.margin)
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Verdict", 4)?;
        st.serialize_field("falsified", &self.falsified)?;
        st.serialize_field("witness", &self.witness.map(|w| [w.pair.0, w.pair.1]))?;
        st.serialize_field("margin", &self.witness.map(|w| w.margin))?;
        st.serialize_field("boundary", &self.boundary)?;
        st.end()
    }
}

struct PairScan {
    margin: f64,
    pair: (usize, usize),
    scale: f64,
}

/// Worst ordered-pair violation margin over the dataset.
fn pairwise_worst(data: &Dataset, hyp: SmHypotheses) -> Option<PairScan> {
    let gamma = hyp.gamma();
    let two_eps = 2.0 * hyp.epsilon();
    let samples = data.samples();
    let mut worst: Option<PairScan> = None;
    for j in 0..samples.len() {
        for k in 0..samples.len() {
            if j == k {
                continue;
            }
            let dy = samples[k].output() - samples[j].output();
            let dist = euclidean(samples[k].input(), samples[j].input());
            let margin = dy - two_eps - gamma * dist;
            if worst.as_ref().map(|w| margin > w.margin).unwrap_or(true) {
                worst = Some(PairScan {
                    margin,
                    pair: (j, k),
                    scale: dy.abs().max(two_eps).max(gamma * dist).max(1.0),
                });
            }
        }
    }
    worst
}

fn verdict_from_margin(margin: f64, pair: (usize, usize), scale: f64) -> Verdict {
    let falsified = margin > 0.0;
    Verdict {
        falsified,
        witness: falsified.then_some(Witness { pair, margin }),
        boundary: margin.abs() <= BOUNDARY_RTOL * scale,
    }
}

/// Exact emptiness test of the feasible function set via the pairwise
/// condition; O(M^2).
pub fn falsify(data: &Dataset, hyp: SmHypotheses) -> Verdict {
    match pairwise_worst(data, hyp) {
        Some(scan) => verdict_from_margin(scan.margin, scan.pair, scan.scale),
        // A single sample is always explained by the constant function y_1.
        None => Verdict {
            falsified: false,
            witness: None,
            boundary: false,
        },
    }
}

/// Cross-check path: evaluates the upper envelope at each data point and
/// reports falsification when it drops below `y_k - eps`.
pub fn falsify_via_envelope(data: &Dataset, hyp: SmHypotheses) -> Verdict {
    if data.len() < 2 {
        return Verdict {
            falsified: false,
            witness: None,
            boundary: false,
        };
    }
    let env = Envelope::forced(data.clone(), hyp);
    let eps = hyp.epsilon();
    let gamma = hyp.gamma();

    let mut worst_k = 0;
    let mut worst = f64::NEG_INFINITY;
    for (k, s) in data.samples().iter().enumerate() {
        let margin = (s.output() - eps) - env.upper_at(s.input());
        if margin > worst {
            worst = margin;
            worst_k = k;
        }
    }
    // Locate which sample's cone binds at the worst point.
    let target = data.sample(worst_k);
    let mut arg_j = worst_k;
    let mut best_cone = f64::INFINITY;
    for (j, s) in data.samples().iter().enumerate() {
        if j == worst_k {
            continue;
        }
        let cone = s.output() + eps + gamma * euclidean(target.input(), s.input());
        if cone < best_cone {
            best_cone = cone;
            arg_j = j;
        }
    }
    let scale = target.output().abs().max(best_cone.abs()).max(1.0);
    verdict_from_margin(worst, (arg_j, worst_k), scale)
}

/// One point of the falsification curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub epsilon: f64,
    /// Smallest gamma with a nonempty feasible set at this epsilon;
    /// infinite when duplicate inputs disagree beyond the noise band.
    pub gamma_star: f64,
}

/// The curve gamma*(epsilon) separating falsified from unfalsified
/// hypothesis pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsificationCurve {
    pub points: Vec<CurvePoint>,
}

impl FalsificationCurve {
    /// Writes plot-ready `epsilon,gamma_star` CSV.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "epsilon,gamma_star")?;
        for p in &self.points {
            let g = if p.gamma_star.is_finite() {
                crate::data::fmt_f64(p.gamma_star)
            } else {
                "inf".to_string()
            };
            writeln!(w, "{},{}", crate::data::fmt_f64(p.epsilon), g)?;
        }
        Ok(())
    }
}

/// Smallest gamma making the feasible set nonempty at the given epsilon,
/// in closed form over sample pairs.
pub fn gamma_star(data: &Dataset, epsilon: f64) -> f64 {
    let samples = data.samples();
    let mut worst: f64 = 0.0;
    for j in 0..samples.len() {
        for k in (j + 1)..samples.len() {
            let dy = (samples[k].output() - samples[j].output()).abs();
            let excess = dy - 2.0 * epsilon;
            if excess <= 0.0 {
                continue;
            }
            let dist = euclidean(samples[k].input(), samples[j].input());
            if dist == 0.0 {
                return f64::INFINITY;
            }
            worst = worst.max(excess / dist);
        }
    }
    worst
}

/// Traces gamma*(epsilon) over an ascending epsilon grid.
pub fn falsification_curve(data: &Dataset, eps_grid: &[f64]) -> Result<FalsificationCurve> {
    if eps_grid.is_empty() {
        return Err(Error::EmptyInput("epsilon grid"));
    }
    for w in eps_grid.windows(2) {
        if w[0] > w[1] {
            return Err(Error::InvalidParameter(
                "epsilon grid must be sorted ascending".into(),
            ));
        }
    }
    if eps_grid.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::InvalidParameter(
            "epsilon grid entries must be finite and nonnegative".into(),
        ));
    }
    let points = eps_grid
        .iter()
        .map(|&epsilon| CurvePoint {
            epsilon,
            gamma_star: gamma_star(data, epsilon),
        })
        .collect();
    Ok(FalsificationCurve { points })
}

/// True when appending `(u, y)` to the envelope's dataset would leave its
/// hypotheses unfalsified: `f_lower(u) - eps <= y <= f_upper(u) + eps`.
pub fn datum_consistent(env: &Envelope, u: &[f64], y: f64) -> Result<bool> {
    let band = env.evaluate(u)?;
    let eps = env.hypotheses().epsilon();
    Ok(band.lower - eps <= y && y <= band.upper + eps)
}

/// Hypothesis inflation tuning for the recursive stream.
#[derive(Debug, Clone, Copy)]
pub struct InflationPolicy {
    /// Relative margin by which new hypotheses sit strictly inside the
    /// unfalsified region.
    pub margin: f64,
}

impl Default for InflationPolicy {
    fn default() -> Self {
        Self { margin: 1e-3 }
    }
}

/// A falsification event: the datum that contradicted the hypotheses in
/// force and the inflated replacement pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsificationEvent {
    /// 0-based index of the datum in the pushed stream.
    pub index: usize,
    pub input: Vec<f64>,
    pub output: f64,
    pub before: SmHypotheses,
    pub after: SmHypotheses,
}

/// Recursive stream falsification state: accumulated data, hypotheses in
/// force, their event history, and the growing input box.
#[derive(Debug, Clone)]
pub struct StreamState {
    data: Dataset,
    hyp: SmHypotheses,
    bounds: BoundingBox,
    policy: InflationPolicy,
    events: Vec<FalsificationEvent>,
    pushed: usize,
    // Hypotheses stay on the ray t * (ray_gamma, ray_eps); `demand` tracks the
    // largest t any sample pair seen so far requires, so inflation is a single
    // multiplication instead of a rescan.
    ray: (f64, f64),
    t: f64,
    demand: f64,
}

impl StreamState {
    pub fn new(data: Dataset, hyp: SmHypotheses, policy: InflationPolicy) -> Result<Self> {
        let verdict = falsify(&data, hyp);
        if verdict.falsified {
            return Err(Error::Falsified(verdict));
        }
        let bounds = data.bounding_box().clone();
        let mut state = Self {
            data,
            hyp,
            bounds,
            policy,
            events: Vec::new(),
            pushed: 0,
            ray: (hyp.gamma(), hyp.epsilon()),
            t: 1.0,
            demand: 0.0,
        };
        state.demand = state.full_demand_scan();
        Ok(state)
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn hypotheses(&self) -> SmHypotheses {
        self.hyp
    }

    pub fn bounds(&self) -> &BoundingBox {
        &self.bounds
    }

    pub fn events(&self) -> &[FalsificationEvent] {
        &self.events
    }

    /// Ray-relative inflation factor a pair requires; infinite when the ray
    /// cannot satisfy it (zero denominator with disagreeing outputs).
    fn pair_demand(&self, a: &Sample, b: &Sample) -> f64 {
        let dy = (a.output() - b.output()).abs();
        if dy == 0.0 {
            return 0.0;
        }
        let denom = 2.0 * self.ray.1 + self.ray.0 * euclidean(a.input(), b.input());
        dy / denom
    }

    fn full_demand_scan(&self) -> f64 {
        let samples = self.data.samples();
        let mut worst: f64 = 0.0;
        for j in 0..samples.len() {
            for k in (j + 1)..samples.len() {
                worst = worst.max(self.pair_demand(&samples[j], &samples[k]));
            }
        }
        worst
    }

    fn hyp_on_ray(&self, t: f64) -> SmHypotheses {
        SmHypotheses::new(self.ray.0 * t, self.ray.1 * t).expect("ray stays nonnegative")
    }

    /// Appends one datum. When it contradicts the hypotheses in force, they
    /// are inflated to the smallest point on the current ray strictly inside
    /// the unfalsified region and an event is returned.
    pub fn push(&mut self, datum: Sample) -> Result<Option<FalsificationEvent>> {
        if datum.input_dim() != self.data.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.data.input_dim(),
                got: datum.input_dim(),
            });
        }

        let gamma = self.hyp.gamma();
        let two_eps = 2.0 * self.hyp.epsilon();
        let mut consistent = true;
        let mut new_demand = self.demand;
        for s in self.data.samples() {
            let dy = (datum.output() - s.output()).abs();
            if dy == 0.0 {
                continue;
            }
            let dist = euclidean(datum.input(), s.input());
            if dy > two_eps + gamma * dist {
                consistent = false;
            }
            let denom = 2.0 * self.ray.1 + self.ray.0 * dist;
            new_demand = new_demand.max(dy / denom);
        }

        let index = self.pushed;
        self.pushed += 1;
        self.bounds.extend_to(datum.input());
        self.data.push(datum.clone())?;
        self.demand = new_demand;

        if consistent {
            return Ok(None);
        }

        let before = self.hyp;
        if self.demand.is_finite() {
            self.t = self.demand * (1.0 + self.policy.margin);
            self.hyp = self.hyp_on_ray(self.t);
        } else {
            self.inflate_off_ray();
        }
        let event = FalsificationEvent {
            index,
            input: self.data.samples().last().expect("just pushed").input().to_vec(),
            output: self.data.samples().last().expect("just pushed").output(),
            before,
            after: self.hyp,
        };
        self.events.push(event.clone());
        Ok(Some(event))
    }

    /// Fallback when the ray is degenerate (a zero component that the data
    /// now requires to be positive): jump to a curve-derived pair and rebase
    /// the ray there.
    fn inflate_off_ray(&mut self) {
        let m = 1.0 + self.policy.margin;
        let samples = self.data.samples();
        let mut eps_req: f64 = 0.0;
        for j in 0..samples.len() {
            for k in (j + 1)..samples.len() {
                if euclidean(samples[j].input(), samples[k].input()) == 0.0 {
                    eps_req = eps_req.max((samples[j].output() - samples[k].output()).abs() / 2.0);
                }
            }
        }
        let new_eps = self.hyp.epsilon().max(eps_req) * m;
        let new_gamma = self
            .hyp
            .gamma()
            .max(gamma_star(&self.data, new_eps))
            * m;
        self.hyp = SmHypotheses::new(new_gamma, new_eps).expect("inflated values nonnegative");
        self.ray = (new_gamma, new_eps);
        self.t = 1.0;
        self.demand = self.full_demand_scan();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn hyp(gamma: f64, eps: f64) -> SmHypotheses {
        SmHypotheses::new(gamma, eps).unwrap()
    }

    fn scalar(rows: &[(f64, f64)]) -> Dataset {
        Dataset::from_scalar_rows(rows).unwrap()
    }

    #[test]
    fn single_sample_never_falsified() {
        let d = scalar(&[(3.0, -7.0)]);
        let v = falsify(&d, hyp(0.0, 0.0));
        assert!(!v.falsified);
        assert!(v.witness.is_none());
    }

    #[test]
    fn slope_violation_with_witness_and_margin() {
        // 4 - 0 - 2*1 = 2 > 1*1; margin 1; needs gamma >= 2.
        let d = scalar(&[(0.0, 0.0), (1.0, 4.0)]);
        let v = falsify(&d, hyp(1.0, 1.0));
        assert!(v.falsified);
        let w = v.witness.unwrap();
        assert_eq!(w.pair, (0, 1));
        assert_abs_diff_eq!(w.margin, 1.0, epsilon = 1e-15);
        assert!(!v.boundary);
        assert!(!falsify(&d, hyp(2.0, 1.0)).falsified);
    }

    #[test]
    fn duplicate_inputs_falsify_any_gamma() {
        let d = scalar(&[(0.0, 0.0), (0.0, 3.0)]);
        for gamma in [0.0, 1.0, 1e9] {
            let v = falsify(&d, hyp(gamma, 1.0));
            assert!(v.falsified, "gamma {gamma}");
        }
    }

    #[test]
    fn boundary_tie_is_unfalsified_with_flag() {
        // Margin exactly zero at gamma = 2: dy - 2eps = 2 = gamma * 1.
        let d = scalar(&[(0.0, 0.0), (1.0, 4.0)]);
        let v = falsify(&d, hyp(2.0, 1.0));
        assert!(!v.falsified);
        assert!(v.boundary);
    }

    #[test]
    fn envelope_path_matches_worked_example() {
        let d = scalar(&[(0.0, 0.0), (1.0, 4.0)]);
        let v = falsify_via_envelope(&d, hyp(1.0, 1.0));
        assert!(v.falsified);
        assert_eq!(v.witness_pair(), Some((0, 1)));
        assert_abs_diff_eq!(v.margin().unwrap(), 1.0, epsilon = 1e-15);

        let d2 = scalar(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(!falsify_via_envelope(&d2, hyp(2.0, 0.1)).falsified);

        let d3 = scalar(&[(5.0, 2.0)]);
        assert!(!falsify_via_envelope(&d3, hyp(0.0, 0.0)).falsified);
    }

    #[test]
    fn curve_closed_form_case() {
        let d = scalar(&[(0.0, 0.0), (1.0, 4.0)]);
        let c = falsification_curve(&d, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let gs: Vec<f64> = c.points.iter().map(|p| p.gamma_star).collect();
        assert_eq!(gs, vec![4.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn curve_single_sample_is_zero() {
        let d = scalar(&[(1.0, 1.0)]);
        let c = falsification_curve(&d, &[0.0, 0.5]).unwrap();
        assert!(c.points.iter().all(|p| p.gamma_star == 0.0));
    }

    #[test]
    fn curve_duplicate_inputs_is_infinite() {
        let d = scalar(&[(0.0, 0.0), (0.0, 3.0)]);
        let c = falsification_curve(&d, &[1.0]).unwrap();
        assert!(c.points[0].gamma_star.is_infinite());
        // ...but a wide enough noise band resolves it.
        let c2 = falsification_curve(&d, &[1.5]).unwrap();
        assert_eq!(c2.points[0].gamma_star, 0.0);
    }

    #[test]
    fn curve_rejects_bad_grids() {
        let d = scalar(&[(0.0, 0.0)]);
        assert!(falsification_curve(&d, &[]).is_err());
        assert!(falsification_curve(&d, &[1.0, 0.5]).is_err());
        assert!(falsification_curve(&d, &[-1.0]).is_err());
    }

    #[test]
    fn curve_csv_renders_infinities() {
        let d = scalar(&[(0.0, 0.0), (0.0, 3.0)]);
        let c = falsification_curve(&d, &[0.0]).unwrap();
        let mut buf = Vec::new();
        c.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("epsilon,gamma_star\n"));
        assert!(text.contains(",inf"));
    }

    #[test]
    fn datum_consistency_examples() {
        let env = Envelope::new(scalar(&[(0.0, 0.0)]), hyp(1.0, 0.1)).unwrap();
        assert!(!datum_consistent(&env, &[1.0], 5.0).unwrap());
        assert!(datum_consistent(&env, &[1.0], 0.5).unwrap());
        assert!(datum_consistent(&env, &[0.0], 0.0).unwrap());
    }

    #[test]
    fn datum_consistency_matches_append_falsify() {
        let rows = [(0.0, 0.3), (1.5, -0.2), (2.0, 1.0)];
        let h = hyp(1.2, 0.4);
        let env = Envelope::new(scalar(&rows), h).unwrap();
        for u in [-1.0, 0.2, 1.0, 2.5] {
            for y in [-3.0, -0.5, 0.0, 0.8, 2.0, 4.0] {
                let mut extended = rows.to_vec();
                extended.push((u, y));
                let appended = falsify(&scalar(&extended), h);
                assert_eq!(
                    datum_consistent(&env, &[u], y).unwrap(),
                    !appended.falsified,
                    "u={u} y={y}"
                );
            }
        }
    }

    #[test]
    fn stream_event_inflates_onto_unfalsified_ray() {
        let mut s = StreamState::new(
            scalar(&[(0.0, 0.0)]),
            hyp(1.0, 0.1),
            InflationPolicy::default(),
        )
        .unwrap();
        let ev = s.push(Sample::new(vec![1.0], 5.0).unwrap()).unwrap().unwrap();
        assert_eq!(ev.index, 0);
        assert_eq!(ev.before, hyp(1.0, 0.1));
        let after = s.hypotheses();
        // Ray projection: t = 5/(0.2 + 1) * 1.001.
        assert_abs_diff_eq!(after.gamma(), 5.0 / 1.2 * 1.001, epsilon = 1e-12);
        assert_abs_diff_eq!(after.epsilon(), 0.5 / 1.2 * 1.001, epsilon = 1e-12);
        assert!(after.gamma() * 1.0 >= 5.0 - 2.0 * after.epsilon());
        assert!(!falsify(s.data(), after).falsified);
    }

    #[test]
    fn stream_consistent_and_duplicate_data_cause_no_event() {
        let mut s = StreamState::new(
            scalar(&[(0.0, 0.0)]),
            hyp(1.0, 0.1),
            InflationPolicy::default(),
        )
        .unwrap();
        assert!(s.push(Sample::new(vec![1.0], 0.5).unwrap()).unwrap().is_none());
        assert!(s.push(Sample::new(vec![1.0], 0.5).unwrap()).unwrap().is_none());
        assert_eq!(s.events().len(), 0);
        assert_eq!(s.hypotheses(), hyp(1.0, 0.1));
        assert_eq!(s.data().len(), 3);
    }

    #[test]
    fn stream_rejects_falsified_start_and_bad_dims() {
        assert!(matches!(
            StreamState::new(scalar(&[(0.0, 0.0), (0.0, 3.0)]), hyp(1.0, 1.0), InflationPolicy::default()),
            Err(Error::Falsified(_))
        ));
        let mut s = StreamState::new(scalar(&[(0.0, 0.0)]), hyp(1.0, 1.0), InflationPolicy::default()).unwrap();
        assert!(s.push(Sample::new(vec![0.0, 1.0], 0.0).unwrap()).is_err());
    }

    #[test]
    fn stream_degenerate_ray_falls_back_to_curve() {
        // Zero initial hypotheses cannot be fixed by scaling; the fallback
        // must still land in the unfalsified region.
        let mut s = StreamState::new(
            scalar(&[(0.0, 0.0)]),
            hyp(0.0, 0.0),
            InflationPolicy::default(),
        )
        .unwrap();
        let ev = s.push(Sample::new(vec![1.0], 2.0).unwrap()).unwrap().unwrap();
        assert!(ev.after.gamma() > 0.0);
        assert!(!falsify(s.data(), s.hypotheses()).falsified);
        // Duplicate-input disagreement later forces epsilon up too.
        let ev2 = s.push(Sample::new(vec![1.0], -2.0).unwrap()).unwrap().unwrap();
        assert!(ev2.after.epsilon() >= 2.0);
        assert!(!falsify(s.data(), s.hypotheses()).falsified);
    }

    #[test]
    fn stream_box_tracks_new_inputs() {
        let mut s = StreamState::new(
            scalar(&[(0.0, 0.0), (1.0, 0.5)]),
            hyp(1.0, 0.2),
            InflationPolicy::default(),
        )
        .unwrap();
        s.push(Sample::new(vec![-2.0], 0.1).unwrap()).unwrap();
        assert_eq!(s.bounds().lower(), &[-2.0]);
        assert_eq!(s.bounds().upper(), &[1.0]);
    }

    #[test]
    fn verdict_json_shape() {
        let d = scalar(&[(0.0, 0.0), (1.0, 4.0)]);
        let v = falsify(&d, hyp(1.0, 1.0));
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["falsified"], true);
        assert_eq!(json["witness"][0], 0);
        assert_eq!(json["witness"][1], 1);
        assert_eq!(json["boundary"], false);
        let v2 = falsify(&d, hyp(5.0, 1.0));
        let json2 = serde_json::to_value(&v2).unwrap();
        assert_eq!(json2["witness"], serde_json::Value::Null);
    }

    // Constraint-propagation feasibility oracle, independent of the envelope
    // and pairwise formulas: tighten per-sample value intervals under the
    // Lipschitz coupling until a fixpoint; feasible iff all stay nonempty.
    fn propagation_oracle(data: &Dataset, h: SmHypotheses) -> bool {
        let n = data.len();
        let mut lo: Vec<f64> = data.samples().iter().map(|s| s.output() - h.epsilon()).collect();
        let mut hi: Vec<f64> = data.samples().iter().map(|s| s.output() + h.epsilon()).collect();
        for _ in 0..n {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let d = euclidean(data.sample(a).input(), data.sample(b).input());
                    let new_hi = hi[b] + h.gamma() * d;
                    if new_hi < hi[a] {
                        hi[a] = new_hi;
                        changed = true;
                    }
                    let new_lo = lo[b] - h.gamma() * d;
                    if new_lo > lo[a] {
                        lo[a] = new_lo;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        lo.iter().zip(&hi).all(|(l, u)| l <= u)
    }

    proptest! {
        #[test]
        fn three_way_agreement(
            rows in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..8),
            gamma in 0.0f64..6.0,
            eps in 0.0f64..2.0,
            dup in proptest::bool::ANY,
        ) {
            let mut rows = rows;
            if dup && rows.len() >= 2 {
                rows[0].0 = rows[1].0; // force a duplicate input
            }
            let d = scalar(&rows);
            let h = hyp(gamma, eps);
            let a = falsify(&d, h);
            let b = falsify_via_envelope(&d, h);
            let c = propagation_oracle(&d, h);
            prop_assert_eq!(a.falsified, b.falsified);
            prop_assert_eq!(a.falsified, !c);
        }

        #[test]
        fn curve_is_nonincreasing_and_separates(
            rows in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..8),
            eps_raw in proptest::collection::vec(0.0f64..3.0, 1..6),
        ) {
            let mut eps_grid = eps_raw;
            eps_grid.sort_by(f64::total_cmp);
            let d = scalar(&rows);
            let curve = falsification_curve(&d, &eps_grid).unwrap();
            for w in curve.points.windows(2) {
                prop_assert!(w[1].gamma_star <= w[0].gamma_star);
            }
            for p in &curve.points {
                if p.gamma_star > 0.0 && p.gamma_star.is_finite() {
                    let above = hyp(p.gamma_star * (1.0 + 1e-6), p.epsilon);
                    let below = hyp(p.gamma_star * (1.0 - 1e-6), p.epsilon);
                    prop_assert!(!falsify(&d, above).falsified);
                    prop_assert!(falsify(&d, below).falsified);
                }
            }
        }

        #[test]
        fn stream_hypotheses_never_decrease(
            rows in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..4),
            feed in proptest::collection::vec((-5.0f64..5.0, -8.0f64..8.0), 1..20),
        ) {
            let d = scalar(&rows);
            let start = hyp(0.2, 0.1);
            prop_assume!(!falsify(&d, start).falsified);
            let mut s = StreamState::new(d, start, InflationPolicy::default()).unwrap();
            let mut prev = start;
            for (u, y) in feed {
                s.push(Sample::new(vec![u], y).unwrap()).unwrap();
                let cur = s.hypotheses();
                prop_assert!(cur.gamma() >= prev.gamma());
                prop_assert!(cur.epsilon() >= prev.epsilon());
                prev = cur;
            }
            prop_assert!(!falsify(s.data(), s.hypotheses()).falsified);
        }
    }
}
