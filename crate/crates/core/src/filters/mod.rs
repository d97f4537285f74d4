//! Naive Bayes triangulation and the recursive set-membership filter, plus
//! the robot-localization scenario builders.

mod scenario;

use std::collections::BTreeMap;

pub use scenario::{
    build_localization_scenario, connected_components, free_space, parse_scenario, scenario_dynamics, sensor_relation,
    Scenario, Sensor,
};

use crate::error::{Error, Result};
use crate::geometry::{Region, Verdict};
use crate::network::{Dag, UncertaintyNetwork};
use crate::uncertainty::{
    check_conditional_validity, information_map, otimes, ConditionalMap, ValidityReport, VariableSignature,
};

/// A state `X` with a prior and independent observations `Y_k | X`.
#[derive(Debug, Clone)]
pub struct NaiveBayesModel {
    prior: Region,
    maps: Vec<ConditionalMap>,
    validity: Vec<ValidityReport>,
}

fn state_sig(dim: usize) -> VariableSignature {
    VariableSignature::new("x", dim).expect("positive dimension")
}

impl NaiveBayesModel {
    /// `relations[k]` is a region over `(x, y_k)`. Each must be definite on
    /// the prior (a sampled verdict is accepted).
    pub fn new(prior: Region, relations: Vec<(usize, Region)>) -> Result<Self> {
        let n = prior.dim();
        let mut maps = Vec::with_capacity(relations.len());
        let mut validity = Vec::with_capacity(relations.len());
        for (k, (ydim, rel)) in relations.into_iter().enumerate() {
            let m = ConditionalMap::single(state_sig(n), VariableSignature::new(format!("y{}", k + 1), ydim)?, rel)?;
            let report = check_conditional_validity(&m, &prior, &Region::full(ydim))?;
            if report.definite == Verdict::False {
                return Err(Error::InvalidArgument(format!(
                    "observation map {} is empty for some state in the prior",
                    k + 1
                )));
            }
            maps.push(m);
            validity.push(report);
        }
        Ok(NaiveBayesModel { prior, maps, validity })
    }

    pub fn prior(&self) -> &Region {
        &self.prior
    }

    pub fn maps(&self) -> &[ConditionalMap] {
        &self.maps
    }

    pub fn validity(&self) -> &[ValidityReport] {
        &self.validity
    }

    /// The star network: node 0 is the state, node `k` observation `k`.
    pub fn to_network(&self) -> Result<UncertaintyNetwork> {
        let k = self.maps.len();
        let dag = Dag::new(0..=k, (1..=k).map(|i| (0, i)))?;
        let mut vars = BTreeMap::from([(0, state_sig(self.prior.dim()))]);
        let mut factors = BTreeMap::from([(0, self.prior.clone())]);
        for (i, m) in self.maps.iter().enumerate() {
            vars.insert(i + 1, m.target().clone());
            factors.insert(i + 1, m.relation().clone());
        }
        UncertaintyNetwork::without_definiteness_check(dag, vars, factors)
    }
}

/// `U_X ∩ I₁(y₁) ∩ … ∩ I_N(y_N)`.
pub fn naive_bayes_posterior(m: &NaiveBayesModel, observations: &[Vec<f64>]) -> Result<Region> {
    if observations.len() != m.maps.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} observations, got {}",
            m.maps.len(),
            observations.len()
        )));
    }
    let mut post = m.prior.clone();
    for (map, y) in m.maps.iter().zip(observations) {
        post = post.intersect(&information_map(map, y)?)?;
    }
    Ok(post)
}

/// Prior on `X₀`, transition relations over `(x_{t−1}, x_t)` and observation
/// relations over `(x_t, y_t)` for `t = 1..T`.
#[derive(Debug, Clone)]
pub struct DynamicsModel {
    prior: Region,
    transitions: Vec<ConditionalMap>,
    observations: Vec<ConditionalMap>,
}

fn x_sig(t: usize, n: usize) -> VariableSignature {
    VariableSignature::new(format!("x{t}"), n).expect("positive dimension")
}

impl DynamicsModel {
    pub fn new(prior: Region, transitions: Vec<Region>, observations: Vec<(usize, Region)>) -> Result<Self> {
        if transitions.len() != observations.len() {
            return Err(Error::InvalidArgument(
                "one transition and one observation relation per step".into(),
            ));
        }
        let n = prior.dim();
        let mut tr = Vec::new();
        let mut ob = Vec::new();
        for (t, (rel, (ydim, orel))) in transitions.into_iter().zip(observations).enumerate() {
            let t = t + 1;
            tr.push(ConditionalMap::single(x_sig(t - 1, n), x_sig(t, n), rel)?);
            ob.push(ConditionalMap::single(
                x_sig(t, n),
                VariableSignature::new(format!("y{t}"), ydim)?,
                orel,
            )?);
        }
        Ok(DynamicsModel {
            prior,
            transitions: tr,
            observations: ob,
        })
    }

    /// Same relations at every step.
    pub fn stationary(
        prior: Region,
        transition: Region,
        ydim: usize,
        observation: Region,
        horizon: usize,
    ) -> Result<Self> {
        DynamicsModel::new(prior, vec![transition; horizon], vec![(ydim, observation); horizon])
    }

    pub fn horizon(&self) -> usize {
        self.transitions.len()
    }

    pub fn state_dim(&self) -> usize {
        self.prior.dim()
    }

    pub fn prior(&self) -> &Region {
        &self.prior
    }

    fn check_measurements(&self, ys: &[Vec<f64>]) -> Result<()> {
        if ys.len() != self.horizon() {
            return Err(Error::InvalidArgument(format!(
                "expected {} measurements, got {}",
                self.horizon(),
                ys.len()
            )));
        }
        for (m, y) in self.observations.iter().zip(ys) {
            if y.len() != m.target().dim {
                return Err(Error::DimensionMismatch {
                    expected: m.target().dim,
                    found: y.len(),
                });
            }
        }
        Ok(())
    }

    /// The chain network `X₀ → X₁ → … → X_T`, `X_t → Y_t`. Node ids: `X_t` is
    /// `2t`, `Y_t` is `2t − 1`.
    pub fn to_network(&self) -> Result<UncertaintyNetwork> {
        let t_max = self.horizon();
        let n = self.state_dim();
        let mut edges = Vec::new();
        let mut vars = BTreeMap::from([(0, x_sig(0, n))]);
        let mut factors = BTreeMap::from([(0, self.prior.clone())]);
        for t in 1..=t_max {
            edges.push((2 * t - 2, 2 * t));
            edges.push((2 * t, 2 * t - 1));
            vars.insert(2 * t, x_sig(t, n));
            vars.insert(2 * t - 1, self.observations[t - 1].target().clone());
            factors.insert(2 * t, self.transitions[t - 1].relation().clone());
            factors.insert(2 * t - 1, self.observations[t - 1].relation().clone());
        }
        let dag = Dag::new(0..=2 * t_max, edges)?;
        UncertaintyNetwork::without_definiteness_check(dag, vars, factors)
    }
}

/// Per-step posteriors `R₁ … R_T` (fewer when the measurements become
/// inconsistent with the model; `inconsistent_at` names that step).
#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub regions: Vec<Region>,
    pub inconsistent_at: Option<usize>,
}

impl FilterOutput {
    pub fn last(&self) -> Option<&Region> {
        self.regions.last()
    }
}

/// Predict `R⁻_t = Π_{X_t}[R_{t−1} ⊗ P_{X_t|X_{t−1}}]`, update
/// `R_t = R⁻_t ∩ I_t(y_t)`.
pub fn set_membership_filter(d: &DynamicsModel, ys: &[Vec<f64>]) -> Result<FilterOutput> {
    d.check_measurements(ys)?;
    let mut r = d.prior.clone();
    let mut regions = Vec::with_capacity(ys.len());
    for (t, y) in ys.iter().enumerate() {
        let tr = &d.transitions[t];
        let joint = otimes(&r, tr)?;
        let predicted = joint.marginal_joint(&[tr.target().name.as_str()])?;
        r = predicted
            .uncertainty()
            .intersect(&information_map(&d.observations[t], y)?)?
            .reduced();
        let empty = r.is_empty() == Verdict::True;
        regions.push(r.clone());
        if empty {
            return Ok(FilterOutput {
                regions,
                inconsistent_at: Some(t + 1),
            });
        }
    }
    Ok(FilterOutput {
        regions,
        inconsistent_at: None,
    })
}

/// `P_{X_{0:T}|Y_{1:T}}(y_{1:T})`, blocks `X₀ … X_T`.
pub fn batch_trajectory_posterior(d: &DynamicsModel, ys: &[Vec<f64>]) -> Result<Region> {
    d.check_measurements(ys)?;
    if d.horizon() == 0 {
        return Ok(d.prior.clone());
    }
    let net = d.to_network()?;
    let evidence: Vec<(usize, Vec<f64>)> = ys.iter().enumerate().map(|(t, y)| (2 * t + 1, y.clone())).collect();
    let query: Vec<usize> = (0..=d.horizon()).map(|t| 2 * t).collect();
    net.network_posterior(&evidence, &query)
}
