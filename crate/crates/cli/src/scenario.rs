//! Scenario files: car parameters, initial configuration and a driver
//! program, as JSON.
//!
//! ```json
//! {"params":{"R":1.0,"l":2.0},
//!  "initial":{"alpha":0,"beta":0,"x":0,"y":0,"phi":0},
//!  "program":[{"op":"drive","delta":0.5},
//!             {"op":"steer","delta":0.3},
//!             {"op":"rates","alpha_dot":1.0,"beta_dot":0.0,"duration":2.0}],
//!  "step":0.001}
//! ```
//!
//! An optional `"steering_limit"` (radians) bounds `|β|` during integration.

use std::fmt;
use std::path::Path;

use carbundle::{CarParams, Configuration, DriverProgram, Segment};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    params: ParamsSpec,
    initial: InitialSpec,
    program: Vec<serde_json::Value>,
    step: f64,
    #[serde(default)]
    steering_limit: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSpec {
    #[serde(rename = "R")]
    wheel_radius: f64,
    l: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSpec {
    alpha: f64,
    beta: f64,
    x: f64,
    y: f64,
    phi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaSpec {
    delta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesSpec {
    alpha_dot: f64,
    beta_dot: f64,
    duration: f64,
}

/// A scenario that failed to load. `field` is the JSON path of the offending
/// value (`"."` when the document itself is malformed).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub field: String,
    pub message: String,
}

impl ScenarioError {
    fn at(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scenario field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ScenarioError {}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: CarParams,
    pub initial: Configuration,
    pub program: DriverProgram,
    pub step: f64,
    pub steering_limit: Option<f64>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::at(".", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            ScenarioError::at(field, e.into_inner().to_string())
        })?;
        de.end()
            .map_err(|e| ScenarioError::at(".", format!("trailing content: {e}")))?;
        file.validate()
    }
}

fn positive(field: &str, value: f64) -> Result<f64, ScenarioError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ScenarioError::at(
            field,
            format!("must be finite and positive, got {value}"),
        ))
    }
}

enum Op {
    Drive(DeltaSpec),
    Steer(DeltaSpec),
    Rates(RatesSpec),
}

/// Segments are dispatched on `"op"` by hand (rather than with a serde tagged
/// enum) so that errors keep the path of the offending field.
fn parse_segment(index: usize, value: serde_json::Value) -> Result<Op, ScenarioError> {
    let here = format!("program[{index}]");
    let serde_json::Value::Object(mut fields) = value else {
        return Err(ScenarioError::at(
            here,
            "expected an object with an \"op\" field",
        ));
    };
    let op = match fields.remove("op") {
        Some(serde_json::Value::String(op)) => op,
        Some(other) => {
            return Err(ScenarioError::at(
                format!("{here}.op"),
                format!("expected a string, got {other}"),
            ))
        }
        None => return Err(ScenarioError::at(here, "missing field `op`")),
    };
    fn body<T: serde::de::DeserializeOwned>(
        here: &str,
        fields: serde_json::Map<String, serde_json::Value>,
    ) -> Result<T, ScenarioError> {
        serde_path_to_error::deserialize(serde_json::Value::Object(fields)).map_err(|e| {
            let field = match e.path().to_string().as_str() {
                "." => here.to_owned(),
                inner => format!("{here}.{inner}"),
            };
            ScenarioError::at(field, e.into_inner().to_string())
        })
    }
    match op.as_str() {
        "drive" => body(&here, fields).map(Op::Drive),
        "steer" => body(&here, fields).map(Op::Steer),
        "rates" => body(&here, fields).map(Op::Rates),
        other => Err(ScenarioError::at(
            format!("{here}.op"),
            format!("unknown op `{other}`, expected drive, steer or rates"),
        )),
    }
}

impl ScenarioFile {
    fn validate(self) -> Result<Scenario, ScenarioError> {
        let r = positive("params.R", self.params.wheel_radius)?;
        let l = positive("params.l", self.params.l)?;
        let params =
            CarParams::new(r, l).map_err(|e| ScenarioError::at("params", e.to_string()))?;
        let step = positive("step", self.step)?;
        let steering_limit = self
            .steering_limit
            .map(|v| positive("steering_limit", v))
            .transpose()?;

        let mut program = DriverProgram::new();
        for (i, value) in self.program.into_iter().enumerate() {
            let segment = match parse_segment(i, value)? {
                Op::Drive(d) => Segment::Drive(d.delta),
                Op::Steer(d) => Segment::Steer(d.delta),
                Op::Rates(r) => {
                    if r.duration < 0.0 {
                        return Err(ScenarioError::at(
                            format!("program[{i}].duration"),
                            format!("must be non-negative, got {}", r.duration),
                        ));
                    }
                    Segment::Rates {
                        alpha_dot: r.alpha_dot,
                        beta_dot: r.beta_dot,
                        duration: r.duration,
                    }
                }
            };
            program.push(segment);
        }
        program
            .validate()
            .map_err(|e| ScenarioError::at("program", e.to_string()))?;

        let s = self.initial;
        Ok(Scenario {
            params,
            initial: Configuration::new(s.alpha, s.beta, s.x, s.y, s.phi),
            program,
            step,
            steering_limit,
        })
    }
}
