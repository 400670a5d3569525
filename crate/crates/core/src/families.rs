//! Parameterized classifier families whose Shapley values admit a zero for
//! the only relevant feature while every irrelevant feature gets a nonzero
//! value.
//!
//! Every family predicts `α` whenever `x1 = 1`; the rows with `x1 = 0` hold
//! the parameters `σ1, σ2, …` in a fixed layout. Shapley values at the
//! family's instance are linear in `(α, σ1, …)`; the coefficient tables below
//! were derived by hand and are checked against the numeric engine.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explain::{relevancy_report, Engine};
use crate::model::{Backend, Model, TabularClassifier};
use crate::problem::ExplanationProblem;
use crate::rational::RationalJson;
use crate::report::to_json_text;
use crate::shapley::shapley_values;
use crate::space::{ClassValue, FeatureSet, FeatureSpace, Limits, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Two binary features; `x1=0` rows hold `γ` (x2=0) and `β` (x2=1).
    A,
    /// Three binary features; `x1=0` rows hold `σ_{2·x2+x3+1}`.
    B,
    /// Binary `x1`, ternary `x2, x3`; `x1=0` rows hold `σ_{3·x2+x3+1}`.
    C,
    /// Binary `x1, x2`, ternary `x3`; `x1=0` rows hold `σ_{3·x2+x3+1}`.
    C5,
    /// Binary `x1..x3`, ternary `x4`; `x1=0` rows hold `σ_{2·x2+x3+1}` when
    /// `x4=1` and 0 otherwise.
    D,
}

struct Layout {
    domains: &'static [u32],
    instance: &'static [u32],
    /// Common denominator of the Shapley forms.
    den: i64,
    /// Per feature, coefficients of `(α, σ1, …)`.
    forms: &'static [&'static [i64]],
}

const A: Layout = Layout {
    domains: &[2, 2],
    instance: &[1, 1],
    den: 8,
    forms: &[&[4, -3, -1], &[0, 1, -1]],
};

const B: Layout = Layout {
    domains: &[2, 2, 2],
    instance: &[1, 1, 1],
    den: 24,
    forms: &[
        &[12, -1, -2, -2, -7],
        &[0, -1, -2, 1, 2],
        &[0, -1, 1, -2, 2],
    ],
};

const C: Layout = Layout {
    domains: &[2, 3, 3],
    instance: &[1, 2, 2],
    den: 108,
    forms: &[
        &[54, -2, -2, -5, -2, -2, -5, -5, -5, -26],
        &[0, -2, -2, -5, -2, -2, -5, 4, 4, 10],
        &[0, -2, -2, 4, -2, -2, 4, -5, -5, 10],
    ],
};

const C5: Layout = Layout {
    domains: &[2, 2, 3],
    instance: &[1, 1, 2],
    den: 72,
    forms: &[
        &[36, -2, -2, -5, -4, -4, -19],
        &[0, -2, -2, -5, 2, 2, 5],
        &[0, -2, -2, 4, -4, -4, 8],
    ],
};

const D: Layout = Layout {
    domains: &[2, 2, 2, 3],
    instance: &[1, 1, 1, 2],
    den: 288,
    forms: &[
        &[144, -3, -5, -5, -11],
        &[0, -3, -5, 3, 5],
        &[0, -3, 3, -5, 5],
        &[0, -3, -5, -5, -11],
    ],
};

impl FamilyId {
    pub const ALL: [FamilyId; 5] = [FamilyId::A, FamilyId::B, FamilyId::C, FamilyId::C5, FamilyId::D];

    fn layout(self) -> &'static Layout {
        match self {
            FamilyId::A => &A,
            FamilyId::B => &B,
            FamilyId::C => &C,
            FamilyId::C5 => &C5,
            FamilyId::D => &D,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::A => "a",
            FamilyId::B => "b",
            FamilyId::C => "c",
            FamilyId::C5 => "c5",
            FamilyId::D => "d",
        }
    }

    /// Number of `σ` parameters (for A: `β, γ`).
    pub fn sigma_count(self) -> usize {
        self.layout().forms[0].len() - 1
    }

    pub fn space(self) -> FeatureSpace {
        FeatureSpace::new(self.layout().domains.to_vec()).expect("family spaces are valid")
    }

    /// The instance every family is analysed at.
    pub fn instance(self) -> Point {
        Point::from(self.layout().instance.to_vec())
    }

    /// The published parameter choice `(α, σ…)`.
    pub fn published_params(self) -> (i64, Vec<i64>) {
        match self {
            FamilyId::A => (3, vec![4, 0]),
            FamilyId::B => (1, vec![0, 3, 3, 0]),
            FamilyId::C => (1, vec![0, 2, 0, 0, 5, 0, 0, 8, 0]),
            FamilyId::C5 => (1, vec![2, 0, 0, 4, 4, 0]),
            FamilyId::D => (1, vec![5, 2, 4, 9]),
        }
    }

    /// Class of `x` for parameters `(alpha, sigma)`.
    pub fn classify(self, alpha: i64, sigma: &[i64], x: &[u32]) -> ClassValue {
        if x[0] == 1 {
            return alpha;
        }
        match self {
            FamilyId::A => sigma[1 - x[1] as usize],
            FamilyId::B => sigma[(2 * x[1] + x[2]) as usize],
            FamilyId::C | FamilyId::C5 => sigma[(3 * x[1] + x[2]) as usize],
            FamilyId::D => {
                if x[3] == 1 {
                    sigma[(2 * x[1] + x[2]) as usize]
                } else {
                    0
                }
            }
        }
    }

    fn check_arity(self, sigma: &[i64]) -> Result<()> {
        if sigma.len() != self.sigma_count() {
            return Err(Error::input(format!(
                "family {} takes {} σ parameters, got {}",
                self.name(),
                self.sigma_count(),
                sigma.len()
            )));
        }
        Ok(())
    }

    /// The family's table for arbitrary parameters. Fails only when the
    /// parameters make the classifier constant.
    pub fn table(self, alpha: i64, sigma: &[i64], limits: &Limits) -> Result<TabularClassifier> {
        self.check_arity(sigma)?;
        TabularClassifier::from_fn(self.space(), |x| self.classify(alpha, sigma, x), limits)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(FamilyId::A),
            "b" => Ok(FamilyId::B),
            "c" => Ok(FamilyId::C),
            "c5" => Ok(FamilyId::C5),
            "d" => Ok(FamilyId::D),
            _ => Err(Error::input(format!("unknown family {s:?}; expected a, b, c, c5 or d"))),
        }
    }
}

/// Closed-form Shapley values at the family's instance for `(alpha, sigma)`.
pub fn symbolic_sv(family: FamilyId, alpha: i64, sigma: &[i64]) -> Result<Vec<BigRational>> {
    family.check_arity(sigma)?;
    let layout = family.layout();
    Ok(layout
        .forms
        .iter()
        .map(|form| {
            let num: i128 = std::iter::once(alpha)
                .chain(sigma.iter().copied())
                .zip(form.iter())
                .map(|(p, &c)| p as i128 * c as i128)
                .sum();
            BigRational::new(num.into(), layout.den.into())
        })
        .collect())
}

/// A validated family instantiation: the relevancy precondition holds, so
/// feature 1 is the only relevant feature at the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    family: FamilyId,
    alpha: i64,
    sigma: Vec<i64>,
    scale: i64,
}

impl FamilySpec {
    pub fn new(family: FamilyId, alpha: i64, sigma: Vec<i64>) -> Result<Self> {
        family.check_arity(&sigma)?;
        if let Some(s) = sigma.iter().find(|&&s| s == alpha) {
            return Err(Error::input(format!(
                "α must differ from every σ, but α = σ = {s}"
            )));
        }
        // x4 ∈ {0, 2} rows with x1 = 0 are fixed at 0
        if family == FamilyId::D && alpha == 0 {
            return Err(Error::input("family d requires α ≠ 0"));
        }
        Ok(FamilySpec {
            family,
            alpha,
            sigma,
            scale: 1,
        })
    }

    /// Multiplies every parameter by `psi`.
    pub fn scaled(self, psi: i64) -> Result<Self> {
        if psi < 1 {
            return Err(Error::input("scale must be at least 1"));
        }
        let mul = |p: i64| {
            p.checked_mul(psi)
                .ok_or(Error::Overflow("scaled family parameters"))
        };
        Ok(FamilySpec {
            family: self.family,
            alpha: mul(self.alpha)?,
            sigma: self.sigma.iter().map(|&s| mul(s)).collect::<Result<_>>()?,
            scale: self.scale * psi,
        })
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    pub fn sigma(&self) -> &[i64] {
        &self.sigma
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn symbolic_sv(&self) -> Vec<BigRational> {
        symbolic_sv(self.family, self.alpha, &self.sigma).expect("arity checked on construction")
    }

    /// The concrete classifier and the instance it is analysed at.
    pub fn instantiate(&self, limits: &Limits) -> Result<(TabularClassifier, Point)> {
        let t = self.family.table(self.alpha, &self.sigma, limits)?;
        Ok((t, self.family.instance()))
    }

    /// Whether the closed form gives a zero for feature 1 and nonzero values
    /// for every other feature.
    pub fn meets_goal(&self) -> bool {
        let sv = self.symbolic_sv();
        sv[0].is_zero() && sv[1..].iter().all(|q| !q.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// The published parameters, multiplied by `scale`.
    Published { scale: i64 },
    /// Lexicographic search over `σ ∈ 0..=max` (σ1 slowest), stopping after
    /// `budget` candidates.
    Grid { max: i64, budget: u64 },
    /// Uniform draws of `σ ∈ 0..=max` from a ChaCha8 stream seeded with `seed`.
    Random { seed: u64, max: i64, budget: u64 },
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Grid {
            max: 12,
            budget: 1_000_000,
        }
    }
}

/// `α` from the feature-1 form set to zero, if it is an integer.
fn alpha_for(family: FamilyId, sigma: &[i64]) -> Option<i64> {
    let form = family.layout().forms[0];
    let rest: i128 = sigma
        .iter()
        .zip(&form[1..])
        .map(|(&s, &c)| s as i128 * c as i128)
        .sum();
    let c = form[0] as i128;
    (rest % c == 0).then(|| i64::try_from(-rest / c).ok()).flatten()
}

fn accept(family: FamilyId, sigma: &[i64]) -> Option<FamilySpec> {
    let alpha = alpha_for(family, sigma)?;
    FamilySpec::new(family, alpha, sigma.to_vec())
        .ok()
        .filter(FamilySpec::meets_goal)
}

/// Parameters for which feature 1 is the only relevant feature, its Shapley
/// value is zero, and every other Shapley value is nonzero.
pub fn solve_family(family: FamilyId, strategy: Strategy) -> Result<FamilySpec> {
    let k = family.sigma_count();
    match strategy {
        Strategy::Published { scale } => {
            let (alpha, sigma) = family.published_params();
            FamilySpec::new(family, alpha, sigma)?.scaled(scale)
        }
        Strategy::Grid { max, budget } => {
            if max < 0 {
                return Err(Error::input("grid maximum must be non-negative"));
            }
            let mut sigma = vec![0i64; k];
            let mut examined = 0u64;
            while examined < budget {
                examined += 1;
                if let Some(spec) = accept(family, &sigma) {
                    return Ok(spec);
                }
                // odometer, last parameter fastest
                let mut j = k;
                loop {
                    if j == 0 {
                        return Err(Error::NoSolution(examined));
                    }
                    j -= 1;
                    if sigma[j] < max {
                        sigma[j] += 1;
                        break;
                    }
                    sigma[j] = 0;
                }
            }
            Err(Error::NoSolution(examined))
        }
        Strategy::Random { seed, max, budget } => {
            if max < 0 {
                return Err(Error::input("grid maximum must be non-negative"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..budget {
                let sigma: Vec<i64> = (0..k).map(|_| rng.random_range(0..=max)).collect();
                if let Some(spec) = accept(family, &sigma) {
                    return Ok(spec);
                }
            }
            Err(Error::NoSolution(budget))
        }
    }
}

#[derive(Serialize)]
struct ParamsJson {
    alpha: i64,
    sigma: Vec<i64>,
    scale: i64,
}

#[derive(Serialize)]
struct SvEntry {
    feature: usize,
    #[serde(flatten)]
    value: RationalJson,
}

#[derive(Serialize)]
struct CertificateJson {
    family: &'static str,
    params: ParamsJson,
    sv: Vec<SvEntry>,
    axps: Vec<Vec<usize>>,
    constraints_checked: bool,
}

/// Numeric evidence for an instantiated family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub spec: FamilySpec,
    pub sv: Vec<BigRational>,
    pub axps: Vec<FeatureSet>,
    /// Numeric values equal the closed form, `Sv(1) = 0`, every other value
    /// is nonzero, and the AXps are exactly `{{1}}`.
    pub constraints_checked: bool,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        to_json_text(&CertificateJson {
            family: self.spec.family.name(),
            params: ParamsJson {
                alpha: self.spec.alpha,
                sigma: self.spec.sigma.clone(),
                scale: self.spec.scale,
            },
            sv: self
                .sv
                .iter()
                .enumerate()
                .map(|(i, q)| SvEntry {
                    feature: i + 1,
                    value: q.into(),
                })
                .collect(),
            axps: self.axps.iter().map(|s| s.to_one_based()).collect(),
            constraints_checked: self.constraints_checked,
        })
    }
}

/// Instantiates `spec` and recomputes its Shapley values and explanations.
pub fn certify(spec: &FamilySpec, limits: &Limits) -> Result<(Model, Point, Certificate)> {
    let (table, v) = spec.instantiate(limits)?;
    let model = Model::Table(table);
    let p = ExplanationProblem::new(&model, v.clone())?.with_limits(*limits);
    let sv = shapley_values(&p, Backend::Enumerate)?.sv;
    let axps = relevancy_report(&p, Engine::Duality)?.axps;
    let constraints_checked = sv == spec.symbolic_sv()
        && spec.meets_goal()
        && axps == vec![FeatureSet::singleton(0)];
    let cert = Certificate {
        spec: spec.clone(),
        sv,
        axps,
        constraints_checked,
    };
    Ok((model, v, cert))
}
