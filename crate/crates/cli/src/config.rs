use std::path::Path;

use lipsmooth::action::{ActionSpec, GenMap, Space};
use lipsmooth::conjugacy::CdfKind;
use lipsmooth::demo;
use lipsmooth::freegroup::WeightParams;
use lipsmooth::lcgroup::{Flow, LcParams};
use lipsmooth::Rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

fn default_s() -> String {
    lipsmooth::freegroup::DEFAULT_S.to_string()
}

fn default_radius() -> u32 {
    6
}

fn default_points() -> usize {
    20
}

/// One run: the action, the weight parameter and truncation radius, and the
/// per-command settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// A pinned example action: pl, power, mobius, circle or trivial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Space>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<GenMap>>,
    /// Decimal string, must exceed ln 3.
    #[serde(default = "default_s")]
    pub s: String,
    #[serde(rename = "R", default = "default_radius")]
    pub radius: u32,
    #[serde(default)]
    pub seed: u64,
    /// Sample points `(2k + 1) / 2n` for the distance matrix.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub conjugacy: ConjugacyConfig,
    #[serde(default)]
    pub lcgroup: LcConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConjugacyConfig {
    pub kind: CdfKind,
    pub grid_points: usize,
}

impl Default for ConjugacyConfig {
    fn default() -> Self {
        ConjugacyConfig { kind: CdfKind::Metric, grid_points: lipsmooth::conjugacy::DEFAULT_GRID_POINTS }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LcConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub radius: u32,
    /// Lattice step as `[1, 2^j]`.
    #[serde(with = "pair")]
    pub scan_step: Rational,
    /// Random `(g, h)` samples for quasi-subadditivity.
    pub samples: usize,
    pub flow: FlowConfig,
}

impl Default for LcConfig {
    fn default() -> Self {
        LcConfig {
            d: 2,
            radius: 30,
            scan_step: Rational::new(1.into(), 4.into()),
            samples: 1000,
            flow: FlowConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub flow: Flow,
    /// Radius of the one-dimensional net behind the flow norm.
    #[serde(rename = "L")]
    pub radius: u32,
    #[serde(rename = "T")]
    pub window: u32,
    pub s0: String,
    /// Quadrature step as `[1, 2^k]`.
    #[serde(with = "pair")]
    pub quad_step: Rational,
    pub times: Vec<f64>,
    pub pairs: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            flow: Flow::Mobius,
            radius: 24,
            window: 12,
            s0: "1".into(),
            quad_step: Rational::new(1.into(), 64.into()),
            times: vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0],
            pairs: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Oracles,
    MetricAxioms,
    Lipschitz,
    TailHonesty,
    QuasiInvariance,
    Effectiveness,
    BallInclusion,
    LcNet,
    LcFlow,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Oracles,
        Suite::MetricAxioms,
        Suite::Lipschitz,
        Suite::TailHonesty,
        Suite::QuasiInvariance,
        Suite::Effectiveness,
        Suite::BallInclusion,
        Suite::LcNet,
        Suite::LcFlow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracles => "oracles",
            Suite::MetricAxioms => "metric_axioms",
            Suite::Lipschitz => "lipschitz",
            Suite::TailHonesty => "tail_honesty",
            Suite::QuasiInvariance => "quasi_invariance",
            Suite::Effectiveness => "effectiveness",
            Suite::BallInclusion => "ball_inclusion",
            Suite::LcNet => "lc_net",
            Suite::LcFlow => "lc_flow",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    /// Random point pairs for the Lipschitz check.
    pub pairs: usize,
    /// Pairs for the tail-honesty check.
    pub tail_pairs: usize,
    pub max_word_length: u32,
    /// Subintervals for measure quasi-invariance.
    pub sets: usize,
    pub max_measure_word_length: u32,
    /// Centre and radius for the ball-inclusion search.
    #[serde(with = "pair")]
    pub ball_center: Rational,
    pub ball_radius: f64,
    pub ball_grid: usize,
    /// Pairs `(k, k + 1)·spacing` near 0 for the effectiveness report.
    pub effectiveness_pairs: usize,
    #[serde(with = "pair")]
    pub effectiveness_spacing: Rational,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suites: Suite::ALL.to_vec(),
            pairs: 1000,
            tail_pairs: 50,
            max_word_length: 3,
            sets: 20,
            max_measure_word_length: 2,
            ball_center: Rational::new(0.into(), 1.into()),
            ball_radius: 0.25,
            ball_grid: 257,
            effectiveness_pairs: 20,
            effectiveness_spacing: Rational::new(1.into(), 10_000.into()),
        }
    }
}

mod pair {
    use lipsmooth::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        let n: i64 = q.numer().try_into().map_err(serde::ser::Error::custom)?;
        let d: i64 = q.denom().try_into().map_err(serde::ser::Error::custom)?;
        [n, d].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let [n, den] = <[i64; 2]>::deserialize(d)?;
        if den == 0 {
            return Err(serde::de::Error::custom("denominator is zero"));
        }
        Ok(Rational::new(n.into(), den.into()))
    }
}

/// `q = 1 / 2^k` for some `k`, returning `k`.
fn dyadic_exponent(q: &Rational, field: &str) -> Result<u32, CliError> {
    let one = Rational::new(1.into(), 1.into());
    let mut x = q.clone();
    let mut k = 0;
    while x < one && k < 32 {
        x *= Rational::new(2.into(), 1.into());
        k += 1;
    }
    if x == one {
        Ok(k)
    } else {
        Err(CliError::Config { field: field.into(), reason: "must be 1/2^k".into() })
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
            field: e.path().to_string(),
            reason: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field that the commands rely on.
    pub fn validate(&self) -> Result<(), CliError> {
        self.action()?;
        self.params()?;
        self.scan_exponent()?;
        self.flow_params()?;
        if self.points < 2 {
            return Err(field("points", "need at least two points"));
        }
        if self.conjugacy.grid_points < 2 {
            return Err(field("conjugacy.grid_points", "need at least two points"));
        }
        if !(1..=2).contains(&self.lcgroup.d) {
            return Err(field("lcgroup.d", "must be 1 or 2"));
        }
        if !(self.verify.ball_radius > 0.0) {
            return Err(field("verify.ball_radius", "must be positive"));
        }
        Ok(())
    }

    pub fn action(&self) -> Result<ActionSpec, CliError> {
        match (&self.demo, &self.space, &self.generators) {
            (Some(name), None, None) => demo::by_name(name).ok_or_else(|| {
                field("demo", &format!("unknown demo {name:?}; expected one of {:?}", demo::NAMES))
            }),
            (None, Some(space), Some(gens)) => {
                ActionSpec::new(*space, gens.clone()).map_err(|e| field("generators", &e.to_string()))
            }
            (Some(_), _, _) => Err(field("demo", "give either demo or space and generators, not both")),
            (None, None, _) => Err(field("space", "missing; give space and generators, or demo")),
            (None, Some(_), None) => Err(field("generators", "missing")),
        }
    }

    pub fn params(&self) -> Result<WeightParams, CliError> {
        WeightParams::from_decimal(&self.s).map_err(|e| field("s", &e.to_string()))
    }

    pub fn scan_exponent(&self) -> Result<u32, CliError> {
        let k = dyadic_exponent(&self.lcgroup.scan_step, "lcgroup.scan_step")?;
        if k < 2 {
            return Err(field("lcgroup.scan_step", "must be at most 1/4"));
        }
        Ok(k)
    }

    pub fn flow_params(&self) -> Result<LcParams, CliError> {
        let f = &self.lcgroup.flow;
        let k = dyadic_exponent(&f.quad_step, "lcgroup.flow.quad_step")?;
        LcParams::new(&f.s0, f.window, k).map_err(|e| field("lcgroup.flow", &e.to_string()))
    }

    /// Canonical JSON of the effective configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

fn field(name: &str, reason: &str) -> CliError {
    CliError::Config { field: name.into(), reason: reason.into() }
}
