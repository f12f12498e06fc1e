//! Ising and QUBO problem modeling.
//!
//! Two spin conventions are in play in this crate and they are never mixed
//! implicitly:
//!
//! | context                  | mapping            | meaning                    |
//! |--------------------------|--------------------|----------------------------|
//! | gate-based circuits      | `q_i = (1 - s_i)/2` | qubit 0 means spin +1      |
//! | annealing sample strings | `x_i = (1 + s_i)/2` | character '1' means spin +1 |
//!
//! [`crate::state::StateVector::ising_expectation`] uses the first;
//! [`crate::anneal`] and [`crate::optimize`] report samples in the second.
//! Conversions between QUBO bits and spins in this module always use
//! `x_i = (1 + s_i)/2`.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Brute-force search walks all `2^n` configurations; 24 variables keeps
/// that in the tens of millions.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Errors raised by model construction and evaluation.
#[derive(Debug, Error)]
pub enum IsingError {
    #[error("variable index {index} out of range for {num_variables} variables")]
    IndexOutOfRange { index: usize, num_variables: usize },
    #[error("coupling must join two distinct variables, got ({i}, {i})")]
    SelfCoupling { i: usize },
    #[error("configuration length {got} does not match {expected} variables")]
    ConfigLengthMismatch { expected: usize, got: usize },
    #[error("spin value {value} at position {index} is not +1 or -1")]
    BadSpinValue { index: usize, value: i8 },
    #[error("binary value {value} at position {index} is not 0 or 1")]
    BadBinaryValue { index: usize, value: u8 },
    #[error("brute force is capped at {BRUTE_FORCE_MAX_VARS} variables, model has {num_variables}")]
    BruteForceCapExceeded { num_variables: usize },
    #[error("invalid {which} range [{lo}, {hi}]: must satisfy lo < 0 < hi")]
    BadRange { which: &'static str, lo: f64, hi: f64 },
    #[error("penalty needs at least one constraint coefficient")]
    EmptyConstraint,
    #[error("penalty weight must be nonnegative, got {lambda}")]
    NegativePenalty { lambda: f64 },
    #[error("relation between {i} and {j} is specified twice with different values")]
    ConflictingRelation { i: usize, j: usize },
    #[error("prior placement for plant {plant} must be -1 or +1, got {pot}")]
    BadPot { plant: usize, pot: i8 },
    #[error("problem JSON: {0}")]
    BadJson(String),
}

/// A spin configuration with entries in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    values: Vec<i8>,
}

impl SpinConfig {
    pub fn new(values: Vec<i8>) -> Result<Self, IsingError> {
        for (index, &value) in values.iter().enumerate() {
            if value != 1 && value != -1 {
                return Err(IsingError::BadSpinValue { index, value });
            }
        }
        Ok(SpinConfig { values })
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// The QUBO bits under the annealing convention `x_i = (1 + s_i)/2`.
    pub fn to_binary(&self) -> Vec<u8> {
        self.values.iter().map(|&s| ((1 + s) / 2) as u8).collect()
    }

    /// Builds spins from QUBO bits, `s_i = 2 x_i - 1`.
    pub fn from_binary(bits: &[u8]) -> Result<Self, IsingError> {
        for (index, &value) in bits.iter().enumerate() {
            if value > 1 {
                return Err(IsingError::BadBinaryValue { index, value });
            }
        }
        Ok(SpinConfig {
            values: bits.iter().map(|&x| 2 * (x as i8) - 1).collect(),
        })
    }

    /// Renders the annealing-convention bitstring ('1' means spin +1).
    pub fn to_bitstring(&self) -> String {
        self.to_binary().iter().map(|&x| if x == 1 { '1' } else { '0' }).collect()
    }
}

/// An Ising energy function
/// `E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    num_variables: usize,
    h: BTreeMap<usize, f64>,
    j: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingModel {
    pub fn new(num_variables: usize) -> Self {
        IsingModel {
            num_variables,
            h: BTreeMap::new(),
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    /// The three-variable model used throughout the QAOA examples:
    /// `h = (-1, 1/2, -1/2)`, `J01 = J12 = 1/2`, minimum -3 at `(+1,-1,+1)`.
    pub fn example_three_spin() -> Self {
        let mut m = IsingModel::new(3);
        m.set_field(0, -1.0).unwrap();
        m.set_field(1, 0.5).unwrap();
        m.set_field(2, -0.5).unwrap();
        m.set_coupling(0, 1, 0.5).unwrap();
        m.set_coupling(1, 2, 0.5).unwrap();
        m
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn fields(&self) -> &BTreeMap<usize, f64> {
        &self.h
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.j
    }

    /// Sets `h_i`; a zero value removes the entry.
    pub fn set_field(&mut self, i: usize, value: f64) -> Result<(), IsingError> {
        if i >= self.num_variables {
            return Err(IsingError::IndexOutOfRange {
                index: i,
                num_variables: self.num_variables,
            });
        }
        if value == 0.0 {
            self.h.remove(&i);
        } else {
            self.h.insert(i, value);
        }
        Ok(())
    }

    /// Sets `J_ij` (order-insensitive, stored with `i < j`); zero removes.
    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<(), IsingError> {
        if i == j {
            return Err(IsingError::SelfCoupling { i });
        }
        for index in [i, j] {
            if index >= self.num_variables {
                return Err(IsingError::IndexOutOfRange {
                    index,
                    num_variables: self.num_variables,
                });
            }
        }
        let key = (i.min(j), i.max(j));
        if value == 0.0 {
            self.j.remove(&key);
        } else {
            self.j.insert(key, value);
        }
        Ok(())
    }

    /// Adds to an existing field value.
    pub fn add_field(&mut self, i: usize, delta: f64) -> Result<(), IsingError> {
        let current = self.h.get(&i).copied().unwrap_or(0.0);
        self.set_field(i, current + delta)
    }

    /// Adds to an existing coupling value.
    pub fn add_coupling(&mut self, i: usize, j: usize, delta: f64) -> Result<(), IsingError> {
        let key = (i.min(j), i.max(j));
        let current = self.j.get(&key).copied().unwrap_or(0.0);
        self.set_coupling(i, j, current + delta)
    }

    /// Every variable index that carries a field or coupling, ascending.
    pub fn variables(&self) -> Vec<usize> {
        let mut seen: BTreeSet<usize> = self.h.keys().copied().collect();
        for &(i, j) in self.j.keys() {
            seen.insert(i);
            seen.insert(j);
        }
        seen.into_iter().collect()
    }

    /// Evaluates the energy of a full spin configuration.
    pub fn energy(&self, config: &SpinConfig) -> Result<f64, IsingError> {
        if config.values.len() != self.num_variables {
            return Err(IsingError::ConfigLengthMismatch {
                expected: self.num_variables,
                got: config.values.len(),
            });
        }
        let s = |i: usize| config.values[i] as f64;
        let mut e = self.offset;
        for (&i, &h) in &self.h {
            e += h * s(i);
        }
        for (&(i, j), &coupling) in &self.j {
            e += coupling * s(i) * s(j);
        }
        Ok(e)
    }

    /// Exhaustive ground-state search over all `2^n` configurations.
    pub fn brute_force_solve(&self) -> Result<BruteForceResult, IsingError> {
        if self.num_variables > BRUTE_FORCE_MAX_VARS {
            return Err(IsingError::BruteForceCapExceeded {
                num_variables: self.num_variables,
            });
        }
        let n = self.num_variables;
        let mut best = f64::INFINITY;
        let mut configs: Vec<SpinConfig> = Vec::new();
        for code in 0u64..(1u64 << n) {
            // Bit b of `code` is variable b, 1 meaning spin +1.
            let values: Vec<i8> = (0..n)
                .map(|b| if (code >> b) & 1 == 1 { 1 } else { -1 })
                .collect();
            let config = SpinConfig { values };
            let e = self.energy(&config)?;
            if e < best {
                best = e;
                configs.clear();
                configs.push(config);
            } else if e == best {
                configs.push(config);
            }
        }
        let degeneracy = configs.len();
        Ok(BruteForceResult {
            configs,
            energy: best,
            degeneracy,
        })
    }
}

/// Outcome of an exhaustive Ising minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Every configuration attaining the minimum.
    pub configs: Vec<SpinConfig>,
    pub energy: f64,
    pub degeneracy: usize,
}

/// A QUBO energy function
/// `E(x) = sum_{i<=j} Q_ij x_i x_j + offset` over bits `x_i` in {0, 1};
/// diagonal entries are the linear terms since `x_i^2 = x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_variables: usize,
    q: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboModel {
    pub fn new(num_variables: usize) -> Self {
        QuboModel {
            num_variables,
            q: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn coefficients(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.q
    }

    /// Sets `Q_ij` (order-insensitive, stored with `i <= j`); zero removes.
    pub fn set_coefficient(&mut self, i: usize, j: usize, value: f64) -> Result<(), IsingError> {
        for index in [i, j] {
            if index >= self.num_variables {
                return Err(IsingError::IndexOutOfRange {
                    index,
                    num_variables: self.num_variables,
                });
            }
        }
        let key = (i.min(j), i.max(j));
        if value == 0.0 {
            self.q.remove(&key);
        } else {
            self.q.insert(key, value);
        }
        Ok(())
    }

    /// Adds to an existing coefficient.
    pub fn add_coefficient(&mut self, i: usize, j: usize, delta: f64) -> Result<(), IsingError> {
        let key = (i.min(j), i.max(j));
        let current = self.q.get(&key).copied().unwrap_or(0.0);
        self.set_coefficient(i, j, current + delta)
    }

    /// Evaluates the energy of a bit assignment.
    pub fn energy(&self, bits: &[u8]) -> Result<f64, IsingError> {
        if bits.len() != self.num_variables {
            return Err(IsingError::ConfigLengthMismatch {
                expected: self.num_variables,
                got: bits.len(),
            });
        }
        for (index, &value) in bits.iter().enumerate() {
            if value > 1 {
                return Err(IsingError::BadBinaryValue { index, value });
            }
        }
        let mut e = self.offset;
        for (&(i, j), &q) in &self.q {
            e += q * (bits[i] as f64) * (bits[j] as f64);
        }
        Ok(e)
    }

    /// Exhaustive minimization over all bit assignments.
    pub fn brute_force_solve(&self) -> Result<QuboBruteForceResult, IsingError> {
        if self.num_variables > BRUTE_FORCE_MAX_VARS {
            return Err(IsingError::BruteForceCapExceeded {
                num_variables: self.num_variables,
            });
        }
        let n = self.num_variables;
        let mut best = f64::INFINITY;
        let mut configs: Vec<Vec<u8>> = Vec::new();
        for code in 0u64..(1u64 << n) {
            let bits: Vec<u8> = (0..n).map(|b| ((code >> b) & 1) as u8).collect();
            let e = self.energy(&bits)?;
            if e < best {
                best = e;
                configs.clear();
                configs.push(bits);
            } else if e == best {
                configs.push(bits);
            }
        }
        let degeneracy = configs.len();
        Ok(QuboBruteForceResult {
            configs,
            energy: best,
            degeneracy,
        })
    }
}

/// Outcome of an exhaustive QUBO minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboBruteForceResult {
    pub configs: Vec<Vec<u8>>,
    pub energy: f64,
    pub degeneracy: usize,
}

/// Rewrites a QUBO over bits as an Ising model over spins via
/// `x_i = (1 + s_i)/2`; energies agree exactly, offsets included.
pub fn qubo_to_ising(q: &QuboModel) -> IsingModel {
    let mut m = IsingModel::new(q.num_variables);
    m.offset = q.offset;
    for (&(i, j), &v) in &q.q {
        if i == j {
            // a x = a(1+s)/2
            m.add_field(i, v / 2.0).unwrap();
            m.offset += v / 2.0;
        } else {
            // b x_i x_j = b(1+s_i)(1+s_j)/4
            m.add_coupling(i, j, v / 4.0).unwrap();
            m.add_field(i, v / 4.0).unwrap();
            m.add_field(j, v / 4.0).unwrap();
            m.offset += v / 4.0;
        }
    }
    m
}

/// The inverse rewrite, `s_i = 2 x_i - 1`; round-trips exactly.
pub fn ising_to_qubo(m: &IsingModel) -> QuboModel {
    let mut q = QuboModel::new(m.num_variables);
    q.offset = m.offset;
    for (&i, &h) in &m.h {
        // h s = 2h x - h
        q.add_coefficient(i, i, 2.0 * h).unwrap();
        q.offset -= h;
    }
    for (&(i, j), &coupling) in &m.j {
        // J s_i s_j = 4J x_i x_j - 2J x_i - 2J x_j + J
        q.add_coefficient(i, j, 4.0 * coupling).unwrap();
        q.add_coefficient(i, i, -2.0 * coupling).unwrap();
        q.add_coefficient(j, j, -2.0 * coupling).unwrap();
        q.offset += coupling;
    }
    q
}

/// Scales a model's coefficients into hardware-style ranges.
///
/// The factor is the largest of `max h / h_max`, `min h / h_min`,
/// `max J / J_max`, `min J / J_min` (terms included only when the
/// corresponding extreme sticks out on that side). When the factor exceeds
/// 1 every `h` and `J` is divided by it, leaving the offset alone; smaller
/// factors leave the model unchanged since it already fits.
pub fn rescale(
    model: &IsingModel,
    h_range: (f64, f64),
    j_range: (f64, f64),
) -> Result<(IsingModel, f64), IsingError> {
    let (h_min, h_max) = h_range;
    if !(h_min < 0.0 && 0.0 < h_max) {
        return Err(IsingError::BadRange {
            which: "field",
            lo: h_min,
            hi: h_max,
        });
    }
    let (j_min, j_max) = j_range;
    if !(j_min < 0.0 && 0.0 < j_max) {
        return Err(IsingError::BadRange {
            which: "coupling",
            lo: j_min,
            hi: j_max,
        });
    }
    fn fold(r: f64, values: impl Iterator<Item = f64> + Clone, lo: f64, hi: f64) -> f64 {
        let mut r = r;
        let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
        if max > 0.0 {
            r = r.max(max / hi);
        }
        let min = values.fold(f64::INFINITY, f64::min);
        if min < 0.0 {
            r = r.max(min / lo);
        }
        r
    }
    let mut r = fold(0.0, model.h.values().copied(), h_min, h_max);
    r = fold(r, model.j.values().copied(), j_min, j_max);
    if r <= 1.0 {
        return Ok((model.clone(), r));
    }
    let mut scaled = model.clone();
    for v in scaled.h.values_mut() {
        *v /= r;
    }
    for v in scaled.j.values_mut() {
        *v /= r;
    }
    Ok((scaled, r))
}

/// Adds the quadratic penalty `lambda (sum_i a_i x_i - c)^2` to a QUBO,
/// expanded with `x_i^2 = x_i`: each diagonal gains
/// `lambda (a_i^2 - 2 c a_i)`, each pair gains `2 lambda a_i a_j`, and the
/// offset gains `lambda c^2`.
pub fn add_equality_penalty(
    q: &QuboModel,
    coeffs: &BTreeMap<usize, f64>,
    c: f64,
    lambda: f64,
) -> Result<QuboModel, IsingError> {
    if coeffs.is_empty() {
        return Err(IsingError::EmptyConstraint);
    }
    if lambda < 0.0 {
        return Err(IsingError::NegativePenalty { lambda });
    }
    let mut out = q.clone();
    for (&i, &a) in coeffs {
        out.add_coefficient(i, i, lambda * (a * a - 2.0 * c * a))?;
    }
    let keys: Vec<usize> = coeffs.keys().copied().collect();
    for (idx, &i) in keys.iter().enumerate() {
        for &j in &keys[idx + 1..] {
            out.add_coefficient(i, j, 2.0 * lambda * coeffs[&i] * coeffs[&j])?;
        }
    }
    out.set_offset(out.offset() + lambda * c * c);
    Ok(out)
}

/// How two plants get along when potted together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Good,
    Neutral,
    Bad,
}

/// Builds the plant-placement model: two pots encoded as spin values, a
/// coupling of -1 for pairs that thrive together, +1 for pairs that clash,
/// nothing for indifferent pairs.
///
/// A prior placement of plant `i` in pot `p` adds the field
/// `h_i = -replant_cost * p`, so keeping the plant where it is lowers the
/// energy by the cost of moving it.
pub fn build_garden_model(
    relations: &BTreeMap<(usize, usize), Relation>,
    prior_placements: &BTreeMap<usize, i8>,
    replant_cost: f64,
) -> Result<IsingModel, IsingError> {
    let mut canonical: BTreeMap<(usize, usize), Relation> = BTreeMap::new();
    let mut max_index = 0;
    for (&(i, j), &rel) in relations {
        if i == j {
            return Err(IsingError::SelfCoupling { i });
        }
        max_index = max_index.max(i).max(j);
        let key = (i.min(j), i.max(j));
        if let Some(&existing) = canonical.get(&key) {
            if existing != rel {
                return Err(IsingError::ConflictingRelation { i: key.0, j: key.1 });
            }
        }
        canonical.insert(key, rel);
    }
    for (&plant, &pot) in prior_placements {
        if pot != 1 && pot != -1 {
            return Err(IsingError::BadPot { plant, pot });
        }
        max_index = max_index.max(plant);
    }
    let mut model = IsingModel::new(max_index + 1);
    for (&(i, j), &rel) in &canonical {
        let coupling = match rel {
            Relation::Good => -1.0,
            Relation::Bad => 1.0,
            Relation::Neutral => continue,
        };
        model.set_coupling(i, j, coupling)?;
    }
    for (&plant, &pot) in prior_placements {
        model.add_field(plant, -replant_cost * f64::from(pot))?;
    }
    Ok(model)
}

/// A problem in either domain, as read from problem JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Ising(IsingModel),
    Qubo(QuboModel),
}

/// Serializes a problem to the interchange JSON form:
/// `{"type":..., "num_variables":..., "linear":{"i":v},
/// "quadratic":{"i,j":v}, "offset":v}`.
pub fn problem_to_json(problem: &Problem) -> String {
    use serde_json::{json, Map, Value};
    let (kind, n, linear, quadratic, offset) = match problem {
        Problem::Ising(m) => {
            let linear: Map<String, Value> = m
                .fields()
                .iter()
                .map(|(i, v)| (i.to_string(), json!(v)))
                .collect();
            let quadratic: Map<String, Value> = m
                .couplings()
                .iter()
                .map(|((i, j), v)| (format!("{i},{j}"), json!(v)))
                .collect();
            ("ising", m.num_variables(), linear, quadratic, m.offset())
        }
        Problem::Qubo(q) => {
            let mut linear = Map::new();
            let mut quadratic = Map::new();
            for (&(i, j), v) in q.coefficients() {
                if i == j {
                    linear.insert(i.to_string(), json!(v));
                } else {
                    quadratic.insert(format!("{i},{j}"), json!(v));
                }
            }
            ("qubo", q.num_variables(), linear, quadratic, q.offset())
        }
    };
    serde_json::to_string_pretty(&json!({
        "type": kind,
        "num_variables": n,
        "linear": linear,
        "quadratic": quadratic,
        "offset": offset,
    }))
    .expect("maps of numbers always serialize")
}

/// Parses the interchange JSON form back into a problem.
pub fn parse_problem_json(text: &str) -> Result<Problem, IsingError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IsingError::BadJson(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| IsingError::BadJson("top level must be an object".into()))?;
    let kind = obj
        .get("type")
        .and_then(|v| v.as_str())
        .ok_or_else(|| IsingError::BadJson("missing \"type\"".into()))?;
    let n = obj
        .get("num_variables")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| IsingError::BadJson("missing \"num_variables\"".into()))?
        as usize;
    let offset = obj.get("offset").and_then(|v| v.as_f64()).unwrap_or(0.0);
    let parse_index = |s: &str| -> Result<usize, IsingError> {
        s.trim()
            .parse()
            .map_err(|_| IsingError::BadJson(format!("bad variable index {s:?}")))
    };
    let empty = serde_json::Map::new();
    let linear = obj
        .get("linear")
        .map(|v| {
            v.as_object()
                .ok_or_else(|| IsingError::BadJson("\"linear\" must be an object".into()))
        })
        .transpose()?
        .unwrap_or(&empty);
    let quadratic = obj
        .get("quadratic")
        .map(|v| {
            v.as_object()
                .ok_or_else(|| IsingError::BadJson("\"quadratic\" must be an object".into()))
        })
        .transpose()?
        .unwrap_or(&empty);
    let number = |key: &str, v: &serde_json::Value| -> Result<f64, IsingError> {
        v.as_f64()
            .ok_or_else(|| IsingError::BadJson(format!("value for {key:?} must be a number")))
    };
    match kind {
        "ising" => {
            let mut m = IsingModel::new(n);
            m.set_offset(offset);
            for (key, v) in linear {
                m.add_field(parse_index(key)?, number(key, v)?)?;
            }
            for (key, v) in quadratic {
                let (i, j) = key
                    .split_once(',')
                    .ok_or_else(|| IsingError::BadJson(format!("bad pair key {key:?}")))?;
                m.add_coupling(parse_index(i)?, parse_index(j)?, number(key, v)?)?;
            }
            Ok(Problem::Ising(m))
        }
        "qubo" => {
            let mut q = QuboModel::new(n);
            q.set_offset(offset);
            for (key, v) in linear {
                let i = parse_index(key)?;
                q.add_coefficient(i, i, number(key, v)?)?;
            }
            for (key, v) in quadratic {
                let (i, j) = key
                    .split_once(',')
                    .ok_or_else(|| IsingError::BadJson(format!("bad pair key {key:?}")))?;
                q.add_coefficient(parse_index(i)?, parse_index(j)?, number(key, v)?)?;
            }
            Ok(Problem::Qubo(q))
        }
        other => Err(IsingError::BadJson(format!(
            "unknown problem type {other:?}"
        ))),
    }
}
