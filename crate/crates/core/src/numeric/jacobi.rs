//! Jacobi fields along a solution, a finite-difference linearization oracle,
//! and the residual of `s + εψ` in the original equations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::expr::Symbol;
use crate::jet::{BundleSpec, MultiIndex};
use crate::variational::{EquationSystem, Structure};

use super::compile::{compile, NormalForm};
use super::program::Program;
use super::rk4::{integrate, Trajectory};
use super::NumericError;

/// Norm used by [`perturbation_residual`].
pub const RESIDUAL_NORM: &str = "max-over-grid";

/// A deviation pair with initial data for the base solution and the
/// Jacobi field.
#[derive(Clone, Debug)]
pub struct JacobiProblem {
    system: EquationSystem,
    normal: NormalForm,
    base_init: BTreeMap<String, f64>,
    jacobi_init: BTreeMap<String, f64>,
    t0: f64,
    t1: f64,
    dt: f64,
}

fn check_keys(
    given: &BTreeMap<String, f64>,
    expected: &[String],
    what: &str,
) -> Result<(), NumericError> {
    let expected: BTreeSet<&str> = expected.iter().map(String::as_str).collect();
    for name in expected.iter() {
        if !given.contains_key(*name) {
            return Err(NumericError::InitialData(format!(
                "missing {what} value for `{name}`"
            )));
        }
    }
    for name in given.keys() {
        if !expected.contains(name.as_str()) {
            let listed: Vec<&str> = expected.iter().copied().collect();
            return Err(NumericError::InitialData(format!(
                "`{name}` is not a {what} state variable (expected {})",
                listed.join(", ")
            )));
        }
    }
    Ok(())
}

impl JacobiProblem {
    /// Compiles `system` and checks that the initial data names exactly the
    /// base and vertical state variables.
    pub fn new(
        system: EquationSystem,
        base_init: BTreeMap<String, f64>,
        jacobi_init: BTreeMap<String, f64>,
        t0: f64,
        t1: f64,
        dt: f64,
    ) -> Result<Self, NumericError> {
        if system.structure() != Structure::DeviationPair {
            return Err(NumericError::NotDeviation);
        }
        super::rk4::time_grid(t0, t1, dt)?;
        let normal = compile(&system)?;
        let (base, vertical) = split_names(&normal);
        check_keys(&base_init, &base, "base")?;
        check_keys(&jacobi_init, &vertical, "jacobi")?;
        Ok(JacobiProblem {
            system,
            normal,
            base_init,
            jacobi_init,
            t0,
            t1,
            dt,
        })
    }

    pub fn system(&self) -> &EquationSystem {
        &self.system
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.normal
    }

    pub fn interval(&self) -> (f64, f64, f64) {
        (self.t0, self.t1, self.dt)
    }

    pub fn base_state_names(&self) -> Vec<String> {
        split_names(&self.normal).0
    }

    pub fn jacobi_state_names(&self) -> Vec<String> {
        split_names(&self.normal).1
    }

    fn initial_state(&self) -> Vec<f64> {
        let sys = &self.normal.system;
        sys.state_names()
            .iter()
            .zip(sys.vertical_mask())
            .map(|(name, &v)| {
                if v {
                    self.jacobi_init[name]
                } else {
                    self.base_init[name]
                }
            })
            .collect()
    }

    /// The original block on its own, compiled.
    fn original(&self) -> Result<NormalForm, NumericError> {
        let spec = self.system.spec().clone();
        compile(&EquationSystem::new(
            self.system.original_block().to_vec(),
            spec,
            Structure::Plain,
        ))
    }

    /// Name of the vertical partner of a base state symbol.
    fn partner(&self, s: &Symbol) -> String {
        let spec = self.system.spec();
        let c = spec
            .jet_coordinate(s)
            .expect("state symbols are jet coordinates");
        spec.jet_name(&c.vertical_partner())
    }
}

fn split_names(nf: &NormalForm) -> (Vec<String>, Vec<String>) {
    let mut base = Vec::new();
    let mut vertical = Vec::new();
    for (name, &v) in nf
        .system
        .state_names()
        .into_iter()
        .zip(nf.system.vertical_mask())
    {
        if v {
            vertical.push(name);
        } else {
            base.push(name);
        }
    }
    (base, vertical)
}

/// Base and vertical state variable names of a deviation system, the keys
/// [`JacobiProblem::new`] expects.
pub fn deviation_state_names(
    system: &EquationSystem,
) -> Result<(Vec<String>, Vec<String>), NumericError> {
    Ok(split_names(&compile(system)?))
}

/// Integrates the full deviation pair and splits the result into the base
/// solution `s` and the Jacobi field `ψ`.
pub fn solve_jacobi(prob: &JacobiProblem) -> Result<(Trajectory, Trajectory), NumericError> {
    let full = integrate(
        &prob.normal.system,
        &prob.initial_state(),
        prob.t0,
        prob.t1,
        prob.dt,
    )?;
    let mask = prob.normal.system.vertical_mask();
    let base: Vec<usize> = (0..mask.len()).filter(|&k| !mask[k]).collect();
    let vertical: Vec<usize> = (0..mask.len()).filter(|&k| mask[k]).collect();
    Ok((full.select(&base), full.select(&vertical)))
}

fn base_runs(
    prob: &JacobiProblem,
    eps: f64,
) -> Result<(NormalForm, Trajectory, Trajectory), NumericError> {
    let original = prob.original()?;
    let names = original.system.state_names();
    let z0: Vec<f64> = names.iter().map(|n| prob.base_init[n]).collect();
    let perturbed: Vec<f64> = original
        .system
        .state()
        .iter()
        .zip(&z0)
        .map(|(s, z)| {
            z + eps
                * prob
                    .jacobi_init
                    .get(&prob.partner(s))
                    .copied()
                    .unwrap_or(0.0)
        })
        .collect();
    let s = integrate(&original.system, &z0, prob.t0, prob.t1, prob.dt)?;
    let s_eps = integrate(&original.system, &perturbed, prob.t0, prob.t1, prob.dt)?;
    Ok((original, s, s_eps))
}

/// `(s_ε - s)/ε`, where `s_ε` solves the original equations from initial
/// data shifted by `ε` times the Jacobi data. Columns carry the vertical
/// names so the result lines up with [`solve_jacobi`].
pub fn finite_difference_jacobi(
    prob: &JacobiProblem,
    eps: f64,
) -> Result<Trajectory, NumericError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(NumericError::InvalidEpsilon(eps));
    }
    let (original, s, s_eps) = base_runs(prob, eps)?;
    let states = s
        .states
        .iter()
        .zip(&s_eps.states)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (y - x) / eps).collect())
        .collect();
    Ok(Trajectory {
        names: original
            .system
            .state()
            .iter()
            .map(|s| prob.partner(s))
            .collect(),
        times: s.times,
        states,
        step: s.step,
        method: s.method,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualRow {
    pub eps: f64,
    pub residual: f64,
}

/// Residuals per `ε`, with the least-squares slope of `ln r` against
/// `ln ε` over the rows where both are positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualTable {
    pub rows: Vec<ResidualRow>,
    pub exponent: Option<f64>,
    pub norm: &'static str,
}

impl ResidualTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,residual\n");
        for r in &self.rows {
            out.push_str(&format!("{:.16e},{:.16e}\n", r.eps, r.residual));
        }
        out
    }
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Weights `w` with `Σ w_j f(x_j) ≈ f'(x_at)`: the derivative of the
/// interpolating polynomial through `nodes`.
fn derivative_weights(nodes: &[f64], at: usize) -> Vec<f64> {
    let x = nodes[at];
    (0..nodes.len())
        .map(|j| {
            if j == at {
                return (0..nodes.len())
                    .filter(|&i| i != at)
                    .map(|i| 1.0 / (x - nodes[i]))
                    .sum();
            }
            let mut num = 1.0;
            let mut den = 1.0;
            for i in 0..nodes.len() {
                if i != j {
                    den *= nodes[j] - nodes[i];
                    if i != at {
                        num *= x - nodes[i];
                    }
                }
            }
            num / den
        })
        .collect()
}

/// Derivative at interior point `k` from the five surrounding grid points
/// (three on grids shorter than five), shifted inward near the ends.
fn grid_derivative(times: &[f64], f: impl Fn(usize) -> f64, k: usize) -> f64 {
    let width = times.len().min(5);
    let start = k.saturating_sub(width / 2).min(times.len() - width);
    let w = derivative_weights(&times[start..start + width], k - start);
    w.iter().enumerate().map(|(j, wj)| wj * f(start + j)).sum()
}

/// Max over interior grid points of `|E^A|` evaluated on the jet of
/// `s + εψ`.
///
/// Jets below the system order come from the integrated states. The highest
/// derivative is the one the equation gives for `s` plus `ε` times a
/// five-point difference of `ψ`; endpoints are excluded.
pub fn perturbation_residual(
    prob: &JacobiProblem,
    eps: &[f64],
) -> Result<ResidualTable, NumericError> {
    if let Some(&bad) = eps.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(NumericError::InvalidEpsilon(bad));
    }
    let (s, psi) = solve_jacobi(prob)?;
    if s.len() < 3 {
        return Err(NumericError::InvalidGrid(
            "the residual needs at least three grid points".into(),
        ));
    }
    let original = prob.original()?;
    let spec: &BundleSpec = prob.system.spec();
    let state = original.system.state();
    let d = state.len();

    let psi_index = |sym: &Symbol| -> Result<usize, NumericError> {
        let name = prob.partner(sym);
        psi.index_of(&name)
            .ok_or_else(|| NumericError::NotNormalForm {
                equation: None,
                reason: format!("`{name}` is missing from the deviation block"),
            })
    };
    let psi_of_state = state.iter().map(psi_index).collect::<Result<Vec<_>, _>>()?;

    let mut slots: HashMap<Symbol, usize> = HashMap::new();
    slots.insert(original.system.base().clone(), 0);
    for (k, sym) in state.iter().enumerate() {
        slots.insert(sym.clone(), k + 1);
    }
    // (top symbol, its solved value on s, ψ column below the top)
    let mut tops = Vec::new();
    for v in &original.variables {
        let top = spec.jet_symbol(&v.coordinate.with_index(MultiIndex::new(vec![0; v.order])));
        let below = spec.jet_symbol(
            &v.coordinate
                .with_index(MultiIndex::new(vec![0; v.order - 1])),
        );
        let solved = Program::compile(&original.solved[&top], &slots)
            .map_err(|s| NumericError::UnknownSymbol(s.name().to_string()))?;
        tops.push((top, solved, psi_index(&below)?));
    }
    for (j, (top, _, _)) in tops.iter().enumerate() {
        slots.insert(top.clone(), d + 1 + j);
    }
    let params = spec.param_bindings();
    let equations = prob
        .system
        .original_block()
        .iter()
        .map(|e| Program::compile(&e.substitute(&params), &slots))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|s| NumericError::UnknownSymbol(s.name().to_string()))?;

    // the unperturbed top derivatives and ψ's difference quotients do not
    // depend on ε
    let n = s.len();
    let mut base_slots = Vec::with_capacity(d + 1);
    let mut per_point = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        base_slots.clear();
        base_slots.push(s.times[k]);
        base_slots.extend_from_slice(&s.states[k]);
        let top_values: Vec<(f64, f64)> = tops
            .iter()
            .map(|(_, solved, col)| {
                let fd = grid_derivative(&psi.times, |i| psi.states[i][*col], k);
                (solved.eval(&base_slots), fd)
            })
            .collect();
        per_point.push((k, top_values));
    }

    let mut rows = Vec::with_capacity(eps.len());
    let mut slots_eps = vec![0.0; d + 1 + tops.len()];
    for &e in eps {
        let mut worst: f64 = 0.0;
        for (k, top_values) in &per_point {
            slots_eps[0] = s.times[*k];
            for i in 0..d {
                slots_eps[i + 1] = s.states[*k][i] + e * psi.states[*k][psi_of_state[i]];
            }
            for (j, (top_s, fd)) in top_values.iter().enumerate() {
                slots_eps[d + 1 + j] = top_s + e * fd;
            }
            for eq in &equations {
                let r = eq.eval(&slots_eps).abs();
                if !r.is_finite() {
                    return Err(NumericError::NonFinite { t: s.times[*k] });
                }
                worst = worst.max(r);
            }
        }
        rows.push(ResidualRow {
            eps: e,
            residual: worst,
        });
    }
    let exponent = log_log_slope(&rows.iter().map(|r| (r.eps, r.residual)).collect::<Vec<_>>());
    Ok(ResidualTable {
        rows,
        exponent,
        norm: RESIDUAL_NORM,
    })
}

/// Max-norm distance between two trajectories on the same grid, matching
/// columns by name.
pub fn max_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, name) in a.names.iter().enumerate() {
        let Some(i) = b.index_of(name) else {
            return f64::INFINITY;
        };
        for (za, zb) in a.states.iter().zip(&b.states) {
            worst = worst.max((za[j] - zb[i]).abs());
        }
    }
    worst
}
