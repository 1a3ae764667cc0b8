//! Nine shifted and rotated test functions modelled on CEC2013.
//!
//! Instances are generated from a seed rather than read from the official
//! data files: shifts are uniform in `[-80, 80]^D` and rotations are random
//! orthogonal matrices. The optimum sits at the first shift with value equal
//! to the function's bias.

mod functions;
mod rotation;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use functions::CoreFunction;
pub use rotation::{random_rotation, Rotation};

use crate::source::Mt19937;
use crate::{Error, Result};

pub const SEARCH_LO: f64 = -100.0;
pub const SEARCH_HI: f64 = 100.0;
const SHIFT_RANGE: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchmarkId {
    F1,
    F5,
    F9,
    F13,
    F15,
    F16,
    F17,
    F22,
    F23,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 9] = [
        BenchmarkId::F1,
        BenchmarkId::F5,
        BenchmarkId::F9,
        BenchmarkId::F13,
        BenchmarkId::F15,
        BenchmarkId::F16,
        BenchmarkId::F17,
        BenchmarkId::F22,
        BenchmarkId::F23,
    ];

    pub fn number(self) -> u32 {
        match self {
            BenchmarkId::F1 => 1,
            BenchmarkId::F5 => 5,
            BenchmarkId::F9 => 9,
            BenchmarkId::F13 => 13,
            BenchmarkId::F15 => 15,
            BenchmarkId::F16 => 16,
            BenchmarkId::F17 => 17,
            BenchmarkId::F22 => 22,
            BenchmarkId::F23 => 23,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkId::F1 => "Sphere",
            BenchmarkId::F5 => "Different Powers",
            BenchmarkId::F9 => "Rotated Weierstrass",
            BenchmarkId::F13 => "Non-Continuous Rotated Rastrigin",
            BenchmarkId::F15 => "Rotated Schwefel",
            BenchmarkId::F16 => "Rotated Katsuura",
            BenchmarkId::F17 => "Lunacek Bi-Rastrigin",
            BenchmarkId::F22 => "Composition Function 2",
            BenchmarkId::F23 => "Composition Function 3",
        }
    }

    /// Global minimum value.
    pub fn bias(self) -> f64 {
        match self {
            BenchmarkId::F1 => -1400.0,
            BenchmarkId::F5 => -1000.0,
            BenchmarkId::F9 => -600.0,
            BenchmarkId::F13 => -200.0,
            BenchmarkId::F15 => 100.0,
            BenchmarkId::F16 => 200.0,
            BenchmarkId::F17 => 300.0,
            BenchmarkId::F22 => 800.0,
            BenchmarkId::F23 => 900.0,
        }
    }

    pub fn core(self) -> CoreFunction {
        match self {
            BenchmarkId::F1 => CoreFunction::Sphere,
            BenchmarkId::F5 => CoreFunction::DifferentPowers,
            BenchmarkId::F9 => CoreFunction::Weierstrass,
            BenchmarkId::F13 => CoreFunction::NonContinuousRastrigin,
            BenchmarkId::F15 | BenchmarkId::F22 | BenchmarkId::F23 => CoreFunction::Schwefel,
            BenchmarkId::F16 => CoreFunction::Katsuura,
            BenchmarkId::F17 => CoreFunction::LunacekBiRastrigin,
        }
    }

    /// Factor applied to `x - o` before rotation.
    pub fn input_scale(self) -> f64 {
        match self {
            BenchmarkId::F9 => 0.5 / 100.0,
            BenchmarkId::F15 | BenchmarkId::F22 | BenchmarkId::F23 => 10.0,
            BenchmarkId::F16 => 5.0 / 100.0,
            BenchmarkId::F17 => 10.0 / 100.0,
            _ => 1.0,
        }
    }

    pub fn is_rotated(self) -> bool {
        matches!(
            self,
            BenchmarkId::F9 | BenchmarkId::F13 | BenchmarkId::F15 | BenchmarkId::F16 | BenchmarkId::F23
        )
    }

    pub fn is_composition(self) -> bool {
        matches!(self, BenchmarkId::F22 | BenchmarkId::F23)
    }

    fn component_count(self) -> usize {
        if self.is_composition() {
            3
        } else {
            1
        }
    }

    /// Tolerance on `evaluate(o1) - bias`. Schwefel-based functions carry the
    /// residual of the 420.97 offset constant.
    pub fn optimum_tolerance(self, dim: usize) -> f64 {
        match self.core() {
            CoreFunction::Schwefel => 1e-3 * dim as f64,
            _ => 1e-8,
        }
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.number())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: u32 = s
            .trim()
            .trim_start_matches(['f', 'F'])
            .parse()
            .map_err(|_| Error::invalid(format!("unknown benchmark {s:?}")))?;
        BenchmarkId::ALL
            .into_iter()
            .find(|id| id.number() == n)
            .ok_or_else(|| Error::invalid(format!("benchmark f{n} is not part of the suite")))
    }
}

impl Serialize for BenchmarkId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BenchmarkId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Fixed parameters of composition functions 2 and 3.
pub const COMPOSITION_SIGMA: [f64; 3] = [20.0, 20.0, 20.0];
pub const COMPOSITION_LAMBDA: [f64; 3] = [1.0, 1.0, 1.0];
pub const COMPOSITION_BIAS: [f64; 3] = [0.0, 100.0, 200.0];

/// One shifted and rotated copy of a core function.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub shift: Vec<f64>,
    pub rotation: Rotation,
}

/// A concrete function instance: id, dimension and generated transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkInstance {
    id: BenchmarkId,
    dim: usize,
    seed: u64,
    transforms: Vec<Transform>,
}

pub fn make_instance(id: BenchmarkId, dim: usize, seed: u64) -> Result<BenchmarkInstance> {
    if !(2..=100).contains(&dim) {
        return Err(Error::invalid(format!("dimension must be in 2..=100, got {dim}")));
    }
    let mut mt = Mt19937::from_parts(seed, &[id.number(), dim as u32]);
    let mut transforms = Vec::with_capacity(id.component_count());
    for _ in 0..id.component_count() {
        let shift = (0..dim)
            .map(|_| -SHIFT_RANGE + 2.0 * SHIFT_RANGE * mt.next_f64())
            .collect();
        let rotation = if id.is_rotated() {
            random_rotation(dim, &mut mt)?
        } else {
            Rotation::identity(dim)
        };
        transforms.push(Transform { shift, rotation });
    }
    Ok(BenchmarkInstance {
        id,
        dim,
        seed,
        transforms,
    })
}

impl BenchmarkInstance {
    pub fn new(id: BenchmarkId, dim: usize, seed: u64) -> Result<Self> {
        make_instance(id, dim, seed)
    }

    /// Builds an instance from explicit transforms (one, or three for
    /// compositions).
    pub fn from_transforms(id: BenchmarkId, seed: u64, transforms: Vec<Transform>) -> Result<Self> {
        if transforms.len() != id.component_count() {
            return Err(Error::invalid(format!(
                "{id} needs {} transform(s), got {}",
                id.component_count(),
                transforms.len()
            )));
        }
        let dim = transforms[0].shift.len();
        for t in &transforms {
            if t.shift.len() != dim || t.rotation.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: t.rotation.dim().min(t.shift.len()),
                });
            }
        }
        Ok(BenchmarkInstance {
            id,
            dim,
            seed,
            transforms,
        })
    }

    pub fn id(&self) -> BenchmarkId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bias(&self) -> f64 {
        self.id.bias()
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    /// Location of the global optimum.
    pub fn optimum(&self) -> &[f64] {
        &self.transforms[0].shift
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let core = self.id.core();
        let scale = self.id.input_scale();
        if !self.id.is_composition() {
            let t = &self.transforms[0];
            return Ok(core.eval(&transformed(x, t, scale)) + self.bias());
        }
        let components: Vec<Component<'_>> = self
            .transforms
            .iter()
            .enumerate()
            .map(|(i, t)| Component {
                core,
                transform: t,
                input_scale: scale,
                sigma: COMPOSITION_SIGMA[i],
                lambda: COMPOSITION_LAMBDA[i],
                bias: COMPOSITION_BIAS[i],
            })
            .collect();
        Ok(compose(&components, x, self.bias()))
    }

    pub fn to_file(&self) -> InstanceFile {
        let mut it = self.transforms.iter();
        let first = it.next().expect("instance has at least one transform");
        InstanceFile {
            id: self.id,
            dim: self.dim,
            shift: first.shift.clone(),
            rotation: first.rotation.rows(),
            seed: self.seed,
            extra_components: it
                .map(|t| ComponentFile {
                    shift: t.shift.clone(),
                    rotation: t.rotation.rows(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        if file.shift.len() != file.dim {
            return Err(Error::DimensionMismatch {
                expected: file.dim,
                actual: file.shift.len(),
            });
        }
        let mut transforms = vec![Transform {
            shift: file.shift,
            rotation: Rotation::from_rows(file.rotation)?,
        }];
        for c in file.extra_components {
            transforms.push(Transform {
                shift: c.shift,
                rotation: Rotation::from_rows(c.rotation)?,
            });
        }
        BenchmarkInstance::from_transforms(file.id, file.seed, transforms)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_file())?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        BenchmarkInstance::from_file(serde_json::from_str(&text)?)
    }
}

/// `scale * M (x - o)`.
fn transformed(x: &[f64], t: &Transform, scale: f64) -> Vec<f64> {
    let diff: Vec<f64> = x.iter().zip(&t.shift).map(|(a, o)| scale * (a - o)).collect();
    let mut z = vec![0.0; diff.len()];
    t.rotation.apply(&diff, &mut z);
    z
}

/// Unbiased core value of `id` at an already transformed point.
pub fn base_function(id: BenchmarkId, z: &[f64]) -> f64 {
    id.core().eval(z)
}

/// JSON layout used to pin an instance across machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub id: BenchmarkId,
    #[serde(rename = "D")]
    pub dim: usize,
    pub shift: Vec<f64>,
    pub rotation: Vec<Vec<f64>>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_components: Vec<ComponentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentFile {
    pub shift: Vec<f64>,
    pub rotation: Vec<Vec<f64>>,
}

/// One term of a composition function.
#[derive(Debug, Clone, Copy)]
pub struct Component<'a> {
    pub core: CoreFunction,
    pub transform: &'a Transform,
    pub input_scale: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub bias: f64,
}

/// Weighted blend of components; the weight of component `i` decays with
/// the squared distance from `x` to its shift.
pub fn compose(components: &[Component<'_>], x: &[f64], bias: f64) -> f64 {
    assert!(!components.is_empty(), "composition needs at least one component");
    let d = x.len() as f64;
    let dist2: Vec<f64> = components
        .iter()
        .map(|c| x.iter().zip(&c.transform.shift).map(|(a, o)| (a - o).powi(2)).sum())
        .collect();

    let weights: Vec<f64> = match dist2.iter().position(|&s| s == 0.0) {
        Some(hit) => (0..components.len()).map(|i| if i == hit { 1.0 } else { 0.0 }).collect(),
        None => {
            let raw: Vec<f64> = components
                .iter()
                .zip(&dist2)
                .map(|(c, &s)| (1.0 / s.sqrt()) * (-s / (2.0 * d * c.sigma * c.sigma)).exp())
                .collect();
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                raw.iter().map(|w| w / total).collect()
            } else {
                vec![1.0 / components.len() as f64; components.len()]
            }
        }
    };

    let blended: f64 = components
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w != 0.0)
        .map(|(c, &w)| {
            let z = transformed(x, c.transform, c.input_scale);
            w * (c.lambda * c.core.eval(&z) + c.bias)
        })
        .sum();
    blended + bias
}
