//! Parking cycles: closed loops in shape space whose lifts end displaced
//! along the fiber.
//!
//! Flow compositions are executed in time order exactly as listed in each
//! `*_program` function. With `χ^U_t` the flow of `U` for time `t`, the four
//! moves `V(−ε), U(−ε), V(+ε), U(+ε)` land at `χ^[U,V]_{−ε²}(p)` up to
//! `O(ε³)`, where `[U,V]` is the ordinary Lie bracket of vector fields.
//! Nesting that loop gives ten-move cycles whose net effect is an iterated
//! bracket flowed for `−ε⁴`, up to `O(ε⁵)`.

use crate::bundle::{CarParams, ConfigTangent, Configuration, ShapeTangent};
use crate::connection::horizontal_alpha;
use crate::error::{Error, Result};
use crate::transport::{fixed_steer_closed_form, integrate_endpoint, DriverProgram, Segment};

/// Upper bound on parking cycles unless the caller supplies one.
pub const DEFAULT_CYCLE_CAP: u64 = 1_000_000;

/// Largest cycle size for which the planner's accuracy contract holds.
pub const MAX_PARKING_EPS: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub start: Configuration,
    pub end: Configuration,
    pub predicted_end: Configuration,
    pub epsilon: f64,
    /// Largest pose-component deviation of `end` from `predicted_end`.
    pub residual: f64,
}

/// The three cycles with a known leading-order effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    /// Four moves; effect `χ^[Hα,Hβ]_{−ε²}`.
    Simple,
    /// Ten moves; effect `χ^[Hα,[Hα,Hβ]]_{−ε⁴}`, a sideways shift.
    Sideways,
    /// Ten moves; effect `χ^[Hβ,[Hα,Hβ]]_{−ε⁴}`, driving with the wheel locked.
    Slip,
}

impl CycleKind {
    pub fn program(self, eps: f64) -> DriverProgram {
        match self {
            CycleKind::Simple => simple_cycle_program(eps),
            CycleKind::Sideways => sideways_cycle_program(eps),
            CycleKind::Slip => slip_cycle_program(eps),
        }
    }

    pub fn predict(self, p: &Configuration, eps: f64, k: &CarParams) -> Configuration {
        match self {
            CycleKind::Simple => predict_simple_cycle(p, eps, k),
            CycleKind::Sideways => predict_sideways(p, eps, k),
            CycleKind::Slip => predict_slip(p, eps, k),
        }
    }

    pub fn run(
        self,
        p: &Configuration,
        eps: f64,
        k: &CarParams,
        step: f64,
    ) -> Result<Configuration> {
        run_cycle(&self.program(eps), p, eps, k, step)
    }

    pub fn report(
        self,
        p: &Configuration,
        eps: f64,
        k: &CarParams,
        step: f64,
    ) -> Result<CycleReport> {
        let end = self.run(p, eps, k, step)?;
        let predicted_end = self.predict(p, eps, k);
        Ok(CycleReport {
            start: *p,
            end,
            predicted_end,
            epsilon: eps,
            residual: end.pose.distance_max(&predicted_end.pose),
        })
    }
}

/// Primitive step inside cycles: `min(step, |ε|/20)`.
pub fn cycle_step(step: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        step
    } else {
        step.min(eps.abs() / 20.0)
    }
}

fn run_cycle(
    program: &DriverProgram,
    p: &Configuration,
    eps: f64,
    k: &CarParams,
    step: f64,
) -> Result<Configuration> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::NonPositiveStep(step));
    }
    integrate_endpoint(program, p, k, cycle_step(step, eps))
}

/// `Steer(−ε), Drive(−ε), Steer(+ε), Drive(+ε)`.
pub fn simple_cycle_program(eps: f64) -> DriverProgram {
    DriverProgram::from_segments(vec![
        Segment::Steer(-eps),
        Segment::Drive(-eps),
        Segment::Steer(eps),
        Segment::Drive(eps),
    ])
}

pub fn simple_cycle(
    p: &Configuration,
    eps: f64,
    k: &CarParams,
    step: f64,
) -> Result<Configuration> {
    CycleKind::Simple.run(p, eps, k, step)
}

/// `(x, y, φ) ↦ (x − ε²R sin(φ+β), y + ε²R cos(φ+β), φ + ε²(R/l) cosβ)`.
pub fn predict_simple_cycle(p: &Configuration, eps: f64, k: &CarParams) -> Configuration {
    let e2 = eps * eps;
    let r = k.wheel_radius();
    let heading = p.pose.phi + p.shape.beta;
    let mut q = *p;
    q.pose.x -= e2 * r * heading.sin();
    q.pose.y += e2 * r * heading.cos();
    q.pose.phi += e2 * k.ratio() * p.shape.beta.cos();
    q
}

/// `[Hα, Hβ] = R{sin(φ+β)∂x − cos(φ+β)∂y − (1/l) cosβ ∂φ}`.
pub fn bracket_ha_hb(p: &Configuration, k: &CarParams) -> ConfigTangent {
    let r = k.wheel_radius();
    let heading = p.pose.phi + p.shape.beta;
    ConfigTangent::new(
        0.0,
        0.0,
        r * heading.sin(),
        -r * heading.cos(),
        -k.ratio() * p.shape.beta.cos(),
    )
}

/// `[Hα, [Hα, Hβ]] = (R²/l)(cosφ ∂y − sinφ ∂x)`.
pub fn bracket_ha_ha_hb(p: &Configuration, k: &CarParams) -> ConfigTangent {
    let c = k.wheel_radius() * k.ratio();
    let (s, co) = p.pose.phi.sin_cos();
    ConfigTangent::new(0.0, 0.0, -c * s, c * co, 0.0)
}

/// `[Hβ, [Hα, Hβ]] = Hα − ∂α`.
pub fn bracket_hb_ha_hb(p: &Configuration, k: &CarParams) -> ConfigTangent {
    horizontal_alpha(p, k) - ConfigTangent::D_ALPHA
}

/// The ten moves of the sideways cycle in time order:
/// `Steer(−ε), Drive(−ε), Steer(ε), Drive(ε), Drive(−ε²), Drive(−ε), Steer(−ε), Drive(ε), Steer(ε), Drive(ε²)`.
pub fn sideways_cycle_program(eps: f64) -> DriverProgram {
    let e2 = eps * eps;
    DriverProgram::from_segments(vec![
        Segment::Steer(-eps),
        Segment::Drive(-eps),
        Segment::Steer(eps),
        Segment::Drive(eps),
        Segment::Drive(-e2),
        Segment::Drive(-eps),
        Segment::Steer(-eps),
        Segment::Drive(eps),
        Segment::Steer(eps),
        Segment::Drive(e2),
    ])
}

pub fn sideways_cycle(
    p: &Configuration,
    eps: f64,
    k: &CarParams,
    step: f64,
) -> Result<Configuration> {
    CycleKind::Sideways.run(p, eps, k, step)
}

/// `(x, y, φ) ↦ (x + ε⁴(R²/l) sinφ, y − ε⁴(R²/l) cosφ, φ)`.
pub fn predict_sideways(p: &Configuration, eps: f64, k: &CarParams) -> Configuration {
    let shift = eps.powi(4) * k.wheel_radius() * k.ratio();
    let (s, c) = p.pose.phi.sin_cos();
    let mut q = *p;
    q.pose.x += shift * s;
    q.pose.y -= shift * c;
    q
}

/// The ten moves of the slip cycle in time order:
/// `Steer(−ε), Drive(−ε), Steer(ε), Drive(ε), Steer(−ε²), Drive(−ε), Steer(−ε), Drive(ε), Steer(ε), Steer(ε²)`.
pub fn slip_cycle_program(eps: f64) -> DriverProgram {
    let e2 = eps * eps;
    DriverProgram::from_segments(vec![
        Segment::Steer(-eps),
        Segment::Drive(-eps),
        Segment::Steer(eps),
        Segment::Drive(eps),
        Segment::Steer(-e2),
        Segment::Drive(-eps),
        Segment::Steer(-eps),
        Segment::Drive(eps),
        Segment::Steer(eps),
        Segment::Steer(e2),
    ])
}

pub fn slip_cycle(p: &Configuration, eps: f64, k: &CarParams, step: f64) -> Result<Configuration> {
    CycleKind::Slip.run(p, eps, k, step)
}

/// Flow of `Hα − ∂α` for time `−ε⁴`: the pose rolls back `ε⁴` of wheel
/// rotation at fixed steering while `α` stays put.
pub fn predict_slip(p: &Configuration, eps: f64, k: &CarParams) -> Configuration {
    let pose = fixed_steer_closed_form(p.shape.beta, -eps.powi(4), &p.pose, k);
    Configuration::from_parts(p.shape, pose)
}

fn lifted_flow(direction: &ShapeTangent, t: f64) -> Segment {
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    Segment::Rates {
        alpha_dot: sign * direction.d_alpha,
        beta_dot: sign * direction.d_beta,
        duration: t.abs(),
    }
}

/// Estimates `[A, B](p)` for the horizontal lifts of two constant shape
/// directions from the four-move loop `B(−ε), A(−ε), B(+ε), A(+ε)`:
/// `(end − start) / (−ε²)`. The error is `O(ε)`.
pub fn commutator_defect(
    p: &Configuration,
    flow_a: &ShapeTangent,
    flow_b: &ShapeTangent,
    eps: f64,
    k: &CarParams,
    step: f64,
) -> Result<ConfigTangent> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
        });
    }
    let program = DriverProgram::from_segments(vec![
        lifted_flow(flow_b, -eps),
        lifted_flow(flow_a, -eps),
        lifted_flow(flow_b, eps),
        lifted_flow(flow_a, eps),
    ]);
    let end = run_cycle(&program, p, eps, k, step)?;
    Ok((-1.0 / (eps * eps)) * end.displacement_from(p))
}

/// `ceil(|lateral| · l / (ε⁴ R²))`, the number of sideways cycles for a shift.
pub fn parking_cycle_count(lateral: f64, eps: f64, k: &CarParams) -> u64 {
    let per_cycle = eps.powi(4) * k.wheel_radius() * k.ratio();
    let exact = lateral.abs() / per_cycle;
    // shave off representation noise so that exact multiples are not rounded up
    (exact * (1.0 - 1e-12)).ceil() as u64
}

/// Concatenated sideways cycles that shift the car by `lateral` to its right
/// (a negative value shifts it left, using the mirrored cycle).
pub fn plan_parallel_park(
    _p: &Configuration,
    lateral: f64,
    eps: f64,
    k: &CarParams,
    cycle_cap: u64,
) -> Result<DriverProgram> {
    if !(eps > 0.0 && eps <= MAX_PARKING_EPS) {
        return Err(Error::EpsOutOfRange(eps));
    }
    if !lateral.is_finite() {
        return Err(Error::NonFiniteLateral(lateral));
    }
    let cycles = parking_cycle_count(lateral, eps, k);
    if cycles > cycle_cap {
        return Err(Error::CycleCapExceeded {
            needed: cycles,
            cap: cycle_cap,
        });
    }
    let cycle = if lateral < 0.0 {
        sideways_cycle_program(eps).mirrored()
    } else {
        sideways_cycle_program(eps)
    };
    let mut program = DriverProgram::new();
    for _ in 0..cycles {
        program.extend_from(&cycle);
    }
    Ok(program)
}

/// Measured result of a parking maneuver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParkingOutcome {
    pub cycles: u64,
    /// Requested offset along the initial left-hand normal `(−sinφ₀, cosφ₀)`, i.e. `−lateral`.
    pub predicted_offset: f64,
    pub achieved_offset: f64,
    pub heading_change: f64,
}

impl ParkingOutcome {
    pub fn measure(start: &Configuration, end: &Configuration, lateral: f64, cycles: u64) -> Self {
        let (s, c) = start.pose.phi.sin_cos();
        let dx = end.pose.x - start.pose.x;
        let dy = end.pose.y - start.pose.y;
        Self {
            cycles,
            predicted_offset: -lateral,
            achieved_offset: -s * dx + c * dy,
            heading_change: end.pose.phi - start.pose.phi,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.predicted_offset == 0.0 {
            self.achieved_offset.abs()
        } else {
            ((self.achieved_offset - self.predicted_offset) / self.predicted_offset).abs()
        }
    }

    /// Offset within `max(5%, 10ε)` relative and `|Δφ| < 10ε²`.
    pub fn within_contract(&self, eps: f64) -> bool {
        let offset_ok = if self.predicted_offset == 0.0 {
            self.achieved_offset.abs() <= f64::EPSILON
        } else {
            self.relative_error() <= (0.05f64).max(10.0 * eps)
        };
        offset_ok && self.heading_change.abs() < 10.0 * eps * eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{section, Shape};
    use approx::assert_abs_diff_eq;

    fn params() -> CarParams {
        CarParams::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn zero_eps_cycles_are_identity() {
        let k = params();
        let p = Configuration::new(0.3, 0.2, 1.0, -1.0, 0.5);
        for kind in [CycleKind::Simple, CycleKind::Sideways, CycleKind::Slip] {
            assert_eq!(kind.run(&p, 0.0, &k, 1e-3).unwrap(), p);
            assert_eq!(kind.predict(&p, 0.0, &k), p);
        }
    }

    #[test]
    fn simple_cycle_from_section() {
        let k = params();
        let eps = 0.01;
        let end = simple_cycle(&section(Shape::new(0.0, 0.0)), eps, &k, 1e-3).unwrap();
        assert_eq!(end.shape, Shape::new(0.0, 0.0));
        assert_abs_diff_eq!(end.pose.x, 0.0, epsilon = 1e-5);
        assert_abs_diff_eq!(end.pose.y, 1e-4, epsilon = 1e-5);
        assert_abs_diff_eq!(end.pose.phi, 5e-5, epsilon = 1e-5);
    }

    #[test]
    fn simple_prediction_example() {
        let k = CarParams::new(1.0, 1.0).unwrap();
        let q = predict_simple_cycle(&Configuration::new(0.4, 0.0, 0.0, 0.0, 0.0), 0.1, &k);
        assert_abs_diff_eq!(q.pose.x, 0.0, epsilon = 1e-17);
        assert_abs_diff_eq!(q.pose.y, 0.01, epsilon = 1e-17);
        assert_abs_diff_eq!(q.pose.phi, 0.01, epsilon = 1e-17);
    }

    #[test]
    fn simple_prediction_is_minus_eps_squared_bracket() {
        let k = params();
        let p = Configuration::new(0.1, 0.9, 0.3, -0.2, 2.0);
        let eps = 0.07;
        let shift = predict_simple_cycle(&p, eps, &k).displacement_from(&p);
        let expected = -(eps * eps) * bracket_ha_hb(&p, &k);
        assert!((shift - expected).max_abs() < 1e-16);
    }

    #[test]
    fn bracket_examples() {
        let k = params();
        let p = Configuration::new(0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(
            (bracket_ha_hb(&p, &k) - ConfigTangent::new(0.0, 0.0, 0.0, -1.0, -0.5)).max_abs()
                < 1e-16
        );
        assert!(
            (bracket_ha_ha_hb(&p, &k) - ConfigTangent::new(0.0, 0.0, 0.0, 0.5, 0.0)).max_abs()
                < 1e-16
        );
        let q = Configuration::new(0.7, 0.4, 1.0, 2.0, -0.3);
        let mut expected = horizontal_alpha(&q, &k);
        expected.d_alpha = 0.0;
        assert_eq!(bracket_hb_ha_hb(&q, &k), expected);
    }

    #[test]
    fn sideways_prediction() {
        let k = CarParams::new(1.0, 1.0).unwrap();
        let q = predict_sideways(
            &Configuration::new(0.0, 0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2),
            0.1,
            &k,
        );
        assert_abs_diff_eq!(q.pose.x, 1e-4, epsilon = 1e-18);
        assert_abs_diff_eq!(q.pose.y, 0.0, epsilon = 1e-18);

        let p = Configuration::new(0.0, 0.3, 0.5, 0.5, 1.234);
        let d = predict_sideways(&p, 0.2, &k).displacement_from(&p);
        let dot = d.d_x * p.pose.phi.cos() + d.d_y * p.pose.phi.sin();
        assert!(dot.abs() < 1e-15);
        assert_eq!(d.d_phi, 0.0);
    }

    #[test]
    fn sideways_at_zero_heading_moves_down() {
        let k = params();
        let eps = 0.1;
        let end = sideways_cycle(&Configuration::default(), eps, &k, 1e-3).unwrap();
        let expected = -eps.powi(4) / 2.0;
        assert!((end.pose.y - expected).abs() < 0.1 * expected.abs());
        assert!(end.distance_max(&predict_sideways(&Configuration::default(), eps, &k)) < 1e-6);
    }

    #[test]
    fn slip_keeps_alpha() {
        let k = params();
        let p = Configuration::new(0.25, 0.6, 0.0, 0.0, 0.1);
        let end = slip_cycle(&p, 0.1, &k, 1e-3).unwrap();
        assert_abs_diff_eq!(end.shape.alpha, p.shape.alpha, epsilon = 1e-12);
        assert_abs_diff_eq!(end.shape.beta, p.shape.beta, epsilon = 1e-12);
        assert!(end.pose.distance_max(&p.pose) > 1e-5);
    }

    #[test]
    fn cycles_reject_bad_step() {
        let k = params();
        assert_eq!(
            simple_cycle(&Configuration::default(), 0.1, &k, 0.0),
            Err(Error::NonPositiveStep(0.0))
        );
        assert!(sideways_cycle(&Configuration::default(), 0.1, &k, -1.0).is_err());
        assert!(slip_cycle(&Configuration::default(), 0.1, &k, f64::NAN).is_err());
    }

    #[test]
    fn commutator_defect_same_field_vanishes() {
        let k = params();
        let p = Configuration::new(0.0, 0.4, 0.2, 0.1, 0.3);
        let a = ShapeTangent::new(1.0, 0.0);
        let d = commutator_defect(&p, &a, &a, 1e-2, &k, 1e-3).unwrap();
        assert!(d.max_abs() < 1e-10, "{d:?}");
    }

    #[test]
    fn commutator_defect_approximates_bracket() {
        let k = params();
        let p = Configuration::new(0.0, 0.4, 0.2, 0.1, 0.3);
        let a = ShapeTangent::new(1.0, 0.0);
        let b = ShapeTangent::new(0.0, 1.0);
        let exact = bracket_ha_hb(&p, &k);
        let d = commutator_defect(&p, &a, &b, 1e-2, &k, 1e-3).unwrap();
        assert!((d - exact).max_abs() < 1e-2 * exact.max_abs());
        assert!(commutator_defect(&p, &a, &b, 0.0, &k, 1e-3).is_err());
        assert!(commutator_defect(&p, &a, &b, 1e-2, &k, 0.0).is_err());
    }

    #[test]
    fn cycle_count_examples() {
        let k = CarParams::new(1.0, 1.0).unwrap();
        assert_eq!(parking_cycle_count(3e-4, 0.1, &k), 3);
        assert_eq!(parking_cycle_count(2e-4, 0.1, &k), 2);
        assert_eq!(parking_cycle_count(1e-3, 0.1, &k), 10);
        assert_eq!(parking_cycle_count(0.0, 0.1, &k), 0);
        let k2 = CarParams::new(1.0, 2.0).unwrap();
        assert_eq!(parking_cycle_count(0.01, 0.2, &k2), 13);
    }

    #[test]
    fn planner_errors_and_trivial_plan() {
        let k = CarParams::new(1.0, 1.0).unwrap();
        let p = Configuration::default();
        assert!(plan_parallel_park(&p, 0.0, 0.1, &k, 10).unwrap().is_empty());
        assert_eq!(
            plan_parallel_park(&p, 1e-3, 0.0, &k, 10),
            Err(Error::EpsOutOfRange(0.0))
        );
        assert_eq!(
            plan_parallel_park(&p, 1e-3, 0.31, &k, 10),
            Err(Error::EpsOutOfRange(0.31))
        );
        assert!(plan_parallel_park(&p, f64::NAN, 0.1, &k, 10).is_err());
        assert_eq!(
            plan_parallel_park(&p, 1e-3, 0.1, &k, 9),
            Err(Error::CycleCapExceeded { needed: 10, cap: 9 })
        );
        let plan = plan_parallel_park(&p, 3e-4, 0.1, &k, 10).unwrap();
        assert_eq!(plan.len(), 30);
        let left = plan_parallel_park(&p, -3e-4, 0.1, &k, 10).unwrap();
        assert_eq!(left, plan.mirrored());
    }
}
