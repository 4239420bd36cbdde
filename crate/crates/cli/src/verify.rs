//! Numerical self-check of the geometric identities behind the model.
//!
//! Every check reduces to one non-negative deviation compared against a
//! tolerance. Convergence-order checks report `|fitted − nominal|`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use carbundle::bundle::act_on_configuration;
use carbundle::connection::{
    connection_form, connection_via_gauge_transform, curvature, curvature_via_structure_equation,
    horizontal_alpha, horizontal_beta,
};
use carbundle::convergence::fitted_order;
use carbundle::heading_field::equivariance_defect;
use carbundle::maneuvers::bracket_ha_hb;
use carbundle::transport::{
    fixed_steer_closed_form, integrate_endpoint, integrate_observed, transport_derivative,
};
use carbundle::{
    fundamental_field, CarParams, ConfigTangent, Configuration, CycleKind, DriverProgram,
    GroupElement, Pose, Segment, Shape,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier, description and default tolerance of every check, in report
/// order.
pub const CHECKS: [(&str, &str, f64); 12] = [
    (
        "connection-gauge",
        "connection formula equals gauge-transformed potential",
        1e-12,
    ),
    (
        "horizontality",
        "connection form vanishes along integrated paths",
        1e-9,
    ),
    (
        "structure-equation",
        "d(omega) + [omega, omega] equals analytic curvature",
        1e-6,
    ),
    (
        "bracket-curvature",
        "[H_alpha, H_beta] equals minus the curvature field",
        1e-12,
    ),
    (
        "simple-cycle-order",
        "simple cycle holonomy error is third order",
        0.2,
    ),
    (
        "sideways-cycle-order",
        "sideways cycle error is fifth order",
        0.2,
    ),
    ("slip-cycle-order", "slip cycle error is fifth order", 0.2),
    (
        "fixed-steer-closed-form",
        "fixed-steer drive matches the circular-arc formula",
        1e-8,
    ),
    (
        "integrator-order",
        "integrator converges at fourth order",
        0.2,
    ),
    (
        "reparametrization",
        "endpoint independent of path speed",
        1e-10,
    ),
    (
        "transport-equivariance",
        "transport commutes with the E(2) action",
        1e-8,
    ),
    (
        "heading-equivariance",
        "heading field is E(2)-equivariant",
        1e-12,
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random samples per identity check.
    pub samples: usize,
    /// Replaces every default tolerance.
    pub tolerance: Option<f64>,
    /// Per-check tolerances, applied after `tolerance`.
    pub overrides: Vec<(String, f64)>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 200,
            tolerance: None,
            overrides: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub key: &'static str,
    pub description: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnknownCheck(pub String);

impl std::fmt::Display for UnknownCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let known: Vec<&str> = CHECKS.iter().map(|c| c.0).collect();
        write!(
            f,
            "unknown check `{}` (known: {})",
            self.0,
            known.join(", ")
        )
    }
}

impl std::error::Error for UnknownCheck {}

impl VerifyConfig {
    fn tolerance_for(&self, key: &str, default: f64) -> f64 {
        self.overrides
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|&(_, v)| v)
            .or(self.tolerance)
            .unwrap_or(default)
    }

    pub fn check_overrides(&self) -> Result<(), UnknownCheck> {
        match self
            .overrides
            .iter()
            .find(|(k, _)| !CHECKS.iter().any(|c| c.0 == k))
        {
            Some((k, _)) => Err(UnknownCheck(k.clone())),
            None => Ok(()),
        }
    }
}

fn random_config(rng: &mut ChaCha8Rng) -> Configuration {
    Configuration::new(
        rng.gen_range(-PI..PI),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-PI..PI),
    )
}

fn random_tangent(rng: &mut ChaCha8Rng) -> ConfigTangent {
    ConfigTangent::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
}

fn random_group(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::new(
        rng.gen_range(-7.0..7.0),
        [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
    )
}

fn random_program(rng: &mut ChaCha8Rng) -> DriverProgram {
    (0..4)
        .map(|_| Segment::Rates {
            alpha_dot: rng.gen_range(-2.0..2.0),
            beta_dot: rng.gen_range(-1.0..1.0),
            duration: rng.gen_range(0.0..0.5),
        })
        .collect()
}

fn max_over<F: FnMut() -> f64>(n: usize, mut f: F) -> f64 {
    (0..n).map(|_| f()).fold(0.0, f64::max)
}

fn list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    parts.join(" ")
}

const EPS_LADDER: [f64; 3] = [0.1, 0.05, 0.025];

fn cycle_order(kind: CycleKind, k: &CarParams) -> (f64, String) {
    let p = Configuration::new(0.3, 0.4, 0.1, -0.2, 0.5);
    let residuals: Vec<f64> = EPS_LADDER
        .iter()
        .map(|&eps| {
            kind.report(&p, eps, k, 1e-3)
                .map_or(f64::NAN, |r| r.residual)
        })
        .collect();
    let order = fitted_order(&EPS_LADDER, &residuals).unwrap_or(f64::NAN);
    (
        order,
        format!("order {order:.3}; residuals {}", list(&residuals)),
    )
}

fn order_deviation(order: f64, nominal: f64) -> f64 {
    if order.is_finite() {
        (order - nominal).abs()
    } else {
        f64::INFINITY
    }
}

fn measure(key: &str, n: usize, rng: &mut ChaCha8Rng) -> (f64, String) {
    let k = CarParams::new(1.0, 2.0).expect("valid parameters");
    match key {
        "connection-gauge" => {
            let d = max_over(n, || {
                let p = random_config(rng);
                let v = random_tangent(rng);
                (connection_form(&p, &v, &k) - connection_via_gauge_transform(&p, &v, &k)).max_abs()
            });
            (d, format!("{n} samples"))
        }
        "horizontality" => {
            let d = max_over(n.div_ceil(10), || {
                let program = random_program(rng);
                let p0 = random_config(rng);
                let mut worst: f64 = 0.0;
                let ok = integrate_observed(&program, &p0, &k, 1e-2, None, |r| {
                    let v = transport_derivative(&r.config, r.alpha_dot, r.beta_dot, &k);
                    worst = worst.max(connection_form(&r.config, &v, &k).max_abs());
                });
                if ok.is_ok() {
                    worst
                } else {
                    f64::INFINITY
                }
            });
            (d, format!("{} random programs", n.div_ceil(10)))
        }
        "structure-equation" => {
            let d = max_over(n, || {
                let p = random_config(rng);
                let (ha, hb) = (horizontal_alpha(&p, &k), horizontal_beta());
                (curvature_via_structure_equation(&p, &ha, &hb, &k) - curvature(&p, &ha, &hb, &k))
                    .max_abs()
            });
            (d, format!("{n} samples, step 1e-5"))
        }
        "bracket-curvature" => {
            let d = max_over(n, || {
                let p = random_config(rng);
                let omega = curvature(&p, &horizontal_alpha(&p, &k), &horizontal_beta(), &k);
                (bracket_ha_hb(&p, &k) - fundamental_field(&(-omega), &p)).max_abs()
            });
            (d, format!("{n} samples"))
        }
        "simple-cycle-order" => {
            let (order, detail) = cycle_order(CycleKind::Simple, &k);
            (order_deviation(order, 3.0), detail)
        }
        "sideways-cycle-order" => {
            let (order, detail) = cycle_order(CycleKind::Sideways, &k);
            (order_deviation(order, 5.0), detail)
        }
        "slip-cycle-order" => {
            let (order, detail) = cycle_order(CycleKind::Slip, &k);
            (order_deviation(order, 5.0), detail)
        }
        "fixed-steer-closed-form" => {
            let mut worst: f64 = 0.0;
            for beta0 in [0.3, 0.7, 1.2] {
                let p0 = Configuration::new(0.0, beta0, 0.0, 0.0, 0.0);
                let program = DriverProgram::from_segments(vec![Segment::Drive(2.0 * PI)]);
                let exact = fixed_steer_closed_form(beta0, 2.0 * PI, &p0.pose, &k);
                worst = worst.max(match integrate_endpoint(&program, &p0, &k, 1e-3) {
                    Ok(end) => end.pose.distance_max(&exact),
                    Err(_) => f64::INFINITY,
                });
            }
            (worst, "beta0 in {0.3, 0.7, 1.2}, one wheel turn".to_owned())
        }
        "integrator-order" => {
            let tight = CarParams::new(1.0, 0.02).expect("valid parameters");
            let p0 = Configuration::from_parts(Shape::new(0.0, 1.2), Pose::new(0.3, -0.1, 0.4));
            let program = DriverProgram::from_segments(vec![Segment::Drive(1.0)]);
            let exact = fixed_steer_closed_form(1.2, 1.0, &p0.pose, &tight);
            let steps = [4e-3, 2e-3, 1e-3];
            let errors: Vec<f64> = steps
                .iter()
                .map(|&h| {
                    integrate_endpoint(&program, &p0, &tight, h)
                        .map_or(f64::NAN, |end| end.pose.distance_max(&exact))
                })
                .collect();
            let order = fitted_order(&steps, &errors).unwrap_or(f64::NAN);
            (
                order_deviation(order, 4.0),
                format!("order {order:.3}; errors {}", list(&errors)),
            )
        }
        "reparametrization" => {
            let d = max_over(n.div_ceil(20), || {
                let p0 = random_config(rng);
                let (a, b, t) = (
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.1..2.0),
                );
                let slow = DriverProgram::from_segments(vec![Segment::Rates {
                    alpha_dot: a,
                    beta_dot: b,
                    duration: t,
                }]);
                let fast = DriverProgram::from_segments(vec![Segment::Rates {
                    alpha_dot: 2.0 * a,
                    beta_dot: 2.0 * b,
                    duration: 0.5 * t,
                }]);
                match (
                    integrate_endpoint(&slow, &p0, &k, 1e-3),
                    integrate_endpoint(&fast, &p0, &k, 1e-3),
                ) {
                    (Ok(x), Ok(y)) => x.distance_max(&y),
                    _ => f64::INFINITY,
                }
            });
            (d, format!("{} random rate pairs", n.div_ceil(20)))
        }
        "transport-equivariance" => {
            let d = max_over(n.div_ceil(10), || {
                let program = random_program(rng);
                let p0 = random_config(rng);
                let g = random_group(rng);
                match (
                    integrate_endpoint(&program, &act_on_configuration(&g, &p0), &k, 1e-2),
                    integrate_endpoint(&program, &p0, &k, 1e-2),
                ) {
                    (Ok(a), Ok(b)) => a.distance_max(&act_on_configuration(&g, &b)),
                    _ => f64::INFINITY,
                }
            });
            (d, format!("{} random programs", n.div_ceil(10)))
        }
        "heading-equivariance" => {
            let d = max_over(n, || {
                let g = random_group(rng);
                equivariance_defect(&g, &random_config(rng))
            });
            (d, format!("{n} samples"))
        }
        _ => unreachable!("unknown check {key}"),
    }
}

/// Runs every check. Each one draws from its own stream derived from the
/// seed, so results do not depend on check order.
pub fn run_checks(config: &VerifyConfig) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(key, description, default))| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let (deviation, detail) = measure(key, config.samples.max(1), &mut rng);
            CheckResult {
                key,
                description,
                deviation: if deviation.is_nan() {
                    f64::INFINITY
                } else {
                    deviation
                },
                tolerance: config.tolerance_for(key, default),
                detail,
            }
        })
        .collect()
}

pub fn render_report(config: &VerifyConfig, results: &[CheckResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "identity checks (seed {}, {} samples per check)",
        config.seed, config.samples
    );
    let _ = writeln!(
        out,
        "{:<6} {:<24} {:>10} {:>10}  description",
        "status", "check", "deviation", "tolerance"
    );
    for r in results {
        let _ = writeln!(
            out,
            "{:<6} {:<24} {:>10.3e} {:>10.3e}  {} [{}]",
            if r.passed() { "PASS" } else { "FAIL" },
            r.key,
            r.deviation,
            r.tolerance,
            r.description,
            r.detail
        );
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    let _ = writeln!(out, "{passed}/{} checks passed", results.len());
    out
}
