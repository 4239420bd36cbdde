//! Parallel transport: reconstructing the motion of the rod from the
//! driver's shape curve `m(t) = (α(t), β(t))`.
//!
//! The shape rates are piecewise constant, so `α` and `β` are advanced
//! exactly and only the pose `(x, y, φ)` goes through the classical
//! fourth-order Runge–Kutta scheme:
//!
//! ```text
//! φ̇ = α̇ (R/l) sinβ,   ẋ = α̇ R cos(β+φ),   ẏ = α̇ R sin(β+φ)
//! ```

use crate::bundle::{CarParams, ConfigTangent, Configuration, Pose, Shape, ShapeTangent};
use crate::connection::horizontal_lift;
use crate::error::{Error, Result};

/// Below this `|sinβ₀|` the fixed-steer solution uses the straight-line branch.
pub const STRAIGHT_LINE_THRESHOLD: f64 = 1e-9;

/// One primitive of a driver program.
///
/// `Drive(Δα)` turns the wheel at unit rate for `|Δα|` seconds and
/// `Steer(Δβ)` does the same for the steering angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Drive(f64),
    Steer(f64),
    Rates {
        alpha_dot: f64,
        beta_dot: f64,
        duration: f64,
    },
}

impl Segment {
    /// `(α̇, β̇, duration)`
    pub fn rates(&self) -> (f64, f64, f64) {
        match *self {
            Segment::Drive(d) => (unit_sign(d), 0.0, d.abs()),
            Segment::Steer(d) => (0.0, unit_sign(d), d.abs()),
            Segment::Rates {
                alpha_dot,
                beta_dot,
                duration,
            } => (alpha_dot, beta_dot, duration),
        }
    }

    /// Net change of the shape over the segment.
    pub fn shape_delta(&self) -> ShapeTangent {
        match *self {
            Segment::Drive(d) => ShapeTangent::new(d, 0.0),
            Segment::Steer(d) => ShapeTangent::new(0.0, d),
            Segment::Rates {
                alpha_dot,
                beta_dot,
                duration,
            } => ShapeTangent::new(alpha_dot * duration, beta_dot * duration),
        }
    }

    pub fn duration(&self) -> f64 {
        self.rates().2
    }

    /// The same segment with the steering direction reversed.
    pub fn mirrored(&self) -> Segment {
        match *self {
            Segment::Steer(d) => Segment::Steer(-d),
            Segment::Rates {
                alpha_dot,
                beta_dot,
                duration,
            } => Segment::Rates {
                alpha_dot,
                beta_dot: -beta_dot,
                duration,
            },
            drive => drive,
        }
    }

    fn is_valid(&self) -> bool {
        match *self {
            Segment::Drive(d) | Segment::Steer(d) => d.is_finite(),
            Segment::Rates {
                alpha_dot,
                beta_dot,
                duration,
            } => {
                alpha_dot.is_finite()
                    && beta_dot.is_finite()
                    && duration.is_finite()
                    && duration >= 0.0
            }
        }
    }
}

fn unit_sign(d: f64) -> f64 {
    if d < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// A finite sequence of driving primitives.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DriverProgram {
    segments: Vec<Segment>,
}

impl DriverProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_segments(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    pub fn push(&mut self, segment: Segment) {
        self.segments.push(segment);
    }

    pub fn extend_from(&mut self, other: &DriverProgram) {
        self.segments.extend_from_slice(&other.segments);
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_shape_change(&self) -> ShapeTangent {
        self.segments
            .iter()
            .fold(ShapeTangent::default(), |acc, s| {
                let d = s.shape_delta();
                ShapeTangent::new(acc.d_alpha + d.d_alpha, acc.d_beta + d.d_beta)
            })
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    pub fn mirrored(&self) -> DriverProgram {
        self.segments.iter().map(Segment::mirrored).collect()
    }

    pub fn validate(&self) -> Result<()> {
        match self.segments.iter().position(|s| !s.is_valid()) {
            Some(index) => Err(Error::InvalidSegment { index }),
            None => Ok(()),
        }
    }
}

impl FromIterator<Segment> for DriverProgram {
    fn from_iter<I: IntoIterator<Item = Segment>>(iter: I) -> Self {
        Self::from_segments(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub config: Configuration,
}

/// Time-ordered samples of a horizontal lift.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    /// Builds a trajectory from samples; `None` unless it is non-empty with
    /// strictly increasing times.
    pub fn from_samples(samples: Vec<Sample>) -> Option<Self> {
        if samples.is_empty()
            || samples
                .windows(2)
                .any(|w| w[1].t.partial_cmp(&w[0].t) != Some(std::cmp::Ordering::Greater))
        {
            return None;
        }
        Some(Self { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("trajectory is never empty")
    }
}

/// State handed to an observer after every accepted step (and once at the start).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub config: Configuration,
    pub alpha_dot: f64,
    pub beta_dot: f64,
}

/// Right-hand side of the transport equations as a full tangent on `P`.
pub fn transport_derivative(
    p: &Configuration,
    alpha_dot: f64,
    beta_dot: f64,
    k: &CarParams,
) -> ConfigTangent {
    horizontal_lift(p, &ShapeTangent::new(alpha_dot, beta_dot), k)
}

fn pose_rate(shape: &Shape, pose: &Pose, alpha_dot: f64, k: &CarParams) -> [f64; 3] {
    let r = k.wheel_radius();
    let heading = shape.beta + pose.phi;
    [
        alpha_dot * r * heading.cos(),
        alpha_dot * r * heading.sin(),
        alpha_dot * k.ratio() * shape.beta.sin(),
    ]
}

fn shifted(pose: &Pose, rate: &[f64; 3], h: f64) -> Pose {
    Pose::new(
        pose.x + h * rate[0],
        pose.y + h * rate[1],
        pose.phi + h * rate[2],
    )
}

fn rk4_pose(
    start: &Shape,
    pose: &Pose,
    tau: f64,
    dt: f64,
    alpha_dot: f64,
    beta_dot: f64,
    k: &CarParams,
) -> Pose {
    let shape_at = |s: f64| Shape::new(start.alpha + alpha_dot * s, start.beta + beta_dot * s);
    let mid = shape_at(tau + 0.5 * dt);
    let k1 = pose_rate(&shape_at(tau), pose, alpha_dot, k);
    let k2 = pose_rate(&mid, &shifted(pose, &k1, 0.5 * dt), alpha_dot, k);
    let k3 = pose_rate(&mid, &shifted(pose, &k2, 0.5 * dt), alpha_dot, k);
    let k4 = pose_rate(&shape_at(tau + dt), &shifted(pose, &k3, dt), alpha_dot, k);
    let w = dt / 6.0;
    Pose::new(
        pose.x + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        pose.y + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        pose.phi + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )
}

fn check_steering(limit: f64, t0: f64, beta0: f64, beta_dot: f64, duration: f64) -> Result<()> {
    if beta0.abs() > limit {
        return Err(Error::SteeringLimit {
            t: t0,
            beta: beta0,
            limit,
        });
    }
    let beta1 = beta0 + beta_dot * duration;
    if beta1.abs() > limit {
        let bound = limit.copysign(beta_dot);
        let tau = (bound - beta0) / beta_dot;
        return Err(Error::SteeringLimit {
            t: t0 + tau,
            beta: beta1,
            limit,
        });
    }
    Ok(())
}

/// Integrates `program` from `p0`, reporting every node to `observer`.
///
/// Segment ends always fall on integration nodes; the final step of a segment
/// is shortened as needed. Zero-length segments are skipped. Returns the
/// final configuration and time.
pub fn integrate_observed<F>(
    program: &DriverProgram,
    p0: &Configuration,
    k: &CarParams,
    step: f64,
    steering_limit: Option<f64>,
    mut observer: F,
) -> Result<Sample>
where
    F: FnMut(&StepRecord),
{
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::NonPositiveStep(step));
    }
    if !p0.is_finite() {
        return Err(Error::NonFiniteConfiguration);
    }
    program.validate()?;

    let mut t = 0.0;
    let mut current = *p0;
    let first = program
        .segments()
        .iter()
        .map(Segment::rates)
        .find(|r| r.2 > 0.0)
        .unwrap_or((0.0, 0.0, 0.0));
    observer(&StepRecord {
        t,
        config: current,
        alpha_dot: first.0,
        beta_dot: first.1,
    });

    for segment in program.segments() {
        let (alpha_dot, beta_dot, duration) = segment.rates();
        if let Some(limit) = steering_limit {
            check_steering(limit, t, current.shape.beta, beta_dot, duration)?;
        }
        if duration == 0.0 {
            continue;
        }
        let start_shape = current.shape;
        let delta = segment.shape_delta();
        let steps = ((duration / step) - 1e-9).ceil().max(1.0) as u64;
        let mut pose = current.pose;
        for i in 0..steps {
            let tau = i as f64 * step;
            let last = i + 1 == steps;
            let dt = if last { duration - tau } else { step };
            pose = rk4_pose(&start_shape, &pose, tau, dt, alpha_dot, beta_dot, k);
            let (shape, elapsed) = if last {
                (
                    Shape::new(
                        start_shape.alpha + delta.d_alpha,
                        start_shape.beta + delta.d_beta,
                    ),
                    duration,
                )
            } else {
                let s = tau + dt;
                (
                    Shape::new(
                        start_shape.alpha + alpha_dot * s,
                        start_shape.beta + beta_dot * s,
                    ),
                    s,
                )
            };
            current = Configuration::from_parts(shape, pose);
            observer(&StepRecord {
                t: t + elapsed,
                config: current,
                alpha_dot,
                beta_dot,
            });
        }
        t += duration;
    }
    Ok(Sample { t, config: current })
}

/// Horizontal lift of the program's shape curve, sampled at every node.
pub fn integrate(
    program: &DriverProgram,
    p0: &Configuration,
    k: &CarParams,
    step: f64,
) -> Result<Trajectory> {
    integrate_with_limit(program, p0, k, step, None)
}

/// As [`integrate`], failing with [`Error::SteeringLimit`] at the first time
/// `|β|` exceeds `steering_limit`.
pub fn integrate_with_limit(
    program: &DriverProgram,
    p0: &Configuration,
    k: &CarParams,
    step: f64,
    steering_limit: Option<f64>,
) -> Result<Trajectory> {
    let mut samples = Vec::new();
    integrate_observed(program, p0, k, step, steering_limit, |r| {
        samples.push(Sample {
            t: r.t,
            config: r.config,
        })
    })?;
    Ok(Trajectory { samples })
}

/// Final configuration only, without storing samples.
pub fn integrate_endpoint(
    program: &DriverProgram,
    p0: &Configuration,
    k: &CarParams,
    step: f64,
) -> Result<Configuration> {
    integrate_observed(program, p0, k, step, None, |_| {}).map(|s| s.config)
}

/// Exact pose after driving `alpha` with the steering held at `beta0`.
///
/// For `sinβ₀ ≠ 0` the front axle runs on a circle of radius `l/sinβ₀`;
/// otherwise it runs straight along the rod.
pub fn fixed_steer_closed_form(beta0: f64, alpha: f64, start: &Pose, k: &CarParams) -> Pose {
    let sin_b = beta0.sin();
    if sin_b.abs() < STRAIGHT_LINE_THRESHOLD {
        let r = k.wheel_radius();
        return Pose::new(
            start.x + alpha * r * start.phi.cos(),
            start.y + alpha * r * start.phi.sin(),
            start.phi,
        );
    }
    let phi = start.phi + alpha * k.ratio() * sin_b;
    let radius = k.rod_length() / sin_b;
    Pose::new(
        start.x + radius * ((phi + beta0).sin() - (start.phi + beta0).sin()),
        start.y - radius * ((phi + beta0).cos() - (start.phi + beta0).cos()),
        phi,
    )
}

/// Circle traced by the front axle at fixed steering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningCircle {
    /// Signed radius `l / sinβ₀`.
    pub radius: f64,
    pub center: [f64; 2],
}

/// `None` on the straight-line branch.
pub fn fixed_steer_circle(beta0: f64, start: &Pose, k: &CarParams) -> Option<TurningCircle> {
    let sin_b = beta0.sin();
    if sin_b.abs() < STRAIGHT_LINE_THRESHOLD {
        return None;
    }
    let radius = k.rod_length() / sin_b;
    let heading = start.phi + beta0;
    Some(TurningCircle {
        radius,
        center: [
            start.x - radius * heading.sin(),
            start.y + radius * heading.cos(),
        ],
    })
}
