use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

use super::EmpiricalDistribution;

const PROB_SUM_TOL: f64 = 1e-12;
const CSV_PROB_SUM_TOL: f64 = 1e-9;

/// A finite probability space carrying named random variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpace {
    probs: Vec<f64>,
    vars: BTreeMap<String, Vec<f64>>,
}

impl ScenarioSpace {
    /// Every probability must be strictly positive; they must sum to one within `1e-12`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::BadWeights(format!("state probability {p} is not strictly positive")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::BadWeights(format!("state probabilities sum to {total}")));
        }
        Ok(Self { probs, vars: BTreeMap::new() })
    }

    /// `n` equally likely states.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn with_var(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.insert_var(name, values)?;
        Ok(self)
    }

    pub fn insert_var(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.probs.len() {
            return Err(Error::DimensionMismatch { expected: self.probs.len(), got: values.len() });
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(v));
        }
        self.vars.insert(name.into(), values);
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn var(&self, name: &str) -> Result<&[f64]> {
        self.vars
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn var_names(&self) -> impl Iterator<Item = &str> {
        self.vars.keys().map(String::as_str)
    }

    /// Law of a named variable: distinct values with aggregated probabilities.
    pub fn law_of(&self, name: &str) -> Result<EmpiricalDistribution> {
        EmpiricalDistribution::from_values_weights(self.var(name)?, &self.probs)
    }

    /// Reads a scenario table: header row, first column `prob`, one column per variable.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("prob") {
            return Err(Error::BadScenario("first column must be named `prob`".into()));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut probs = Vec::new();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != names.len() + 1 {
                return Err(Error::BadScenario(format!("row {} has {} fields", line + 1, record.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::BadScenario(format!("row {}: cannot parse `{s}`", line + 1)))
            };
            probs.push(parse(&record[0])?);
            for (col, field) in columns.iter_mut().zip(record.iter().skip(1)) {
                col.push(parse(field)?);
            }
        }
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > CSV_PROB_SUM_TOL {
            return Err(Error::BadWeights(format!("probabilities sum to {total}, expected 1 within 1e-9")));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let mut space = Self::new(probs)?;
        for (name, col) in names.into_iter().zip(columns) {
            space.insert_var(name, col)?;
        }
        Ok(space)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }
}
