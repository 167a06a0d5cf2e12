use std::io::{self, Write};

use super::compile::FirstOrderSystem;
use super::NumericError;

/// A sampled solution. `states[k]` is the state at `times[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub names: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub step: f64,
    pub method: &'static str,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.index_of(name)?;
        Some(self.states.iter().map(|z| z[k]).collect())
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    /// Keeps the components at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Trajectory {
        Trajectory {
            names: indices.iter().map(|&k| self.names[k].clone()).collect(),
            times: self.times.clone(),
            states: self
                .states
                .iter()
                .map(|z| indices.iter().map(|&k| z[k]).collect())
                .collect(),
            step: self.step,
            method: self.method,
        }
    }

    /// Side-by-side columns of two trajectories on the same grid.
    pub fn join(&self, other: &Trajectory) -> Trajectory {
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        Trajectory {
            names,
            times: self.times.clone(),
            states: self
                .states
                .iter()
                .zip(&other.states)
                .map(|(a, b)| a.iter().chain(b).copied().collect())
                .collect(),
            step: self.step,
            method: self.method,
        }
    }

    /// Header `t,<names>`; one row per grid point, 17 significant digits.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        write!(out, "t")?;
        for n in &self.names {
            write!(out, ",{n}")?;
        }
        writeln!(out)?;
        for (t, z) in self.times.iter().zip(&self.states) {
            write!(out, "{t:.16e}")?;
            for v in z {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// The grid `t0, t0 + dt, ..., t1`; the last step is shortened when `dt`
/// does not divide `t1 - t0`.
pub fn time_grid(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>, NumericError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(NumericError::InvalidGrid(format!(
            "step {dt} must be positive"
        )));
    }
    if t1.partial_cmp(&t0) != Some(std::cmp::Ordering::Greater)
        || !t0.is_finite()
        || !t1.is_finite()
    {
        return Err(NumericError::InvalidGrid(format!(
            "interval [{t0}, {t1}] is empty"
        )));
    }
    let steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * dt).collect();
    grid.push(t1);
    Ok(grid)
}

/// Classical fixed-step fourth-order Runge-Kutta.
pub fn integrate(
    f: &FirstOrderSystem,
    z0: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory, NumericError> {
    let d = f.dimension();
    if z0.len() != d {
        return Err(NumericError::Dimension {
            expected: d,
            found: z0.len(),
        });
    }
    if z0.iter().any(|v| !v.is_finite()) {
        return Err(NumericError::NonFinite { t: t0 });
    }
    let grid = time_grid(t0, t1, dt)?;
    let mut states = Vec::with_capacity(grid.len());
    states.push(z0.to_vec());

    let mut scratch = Vec::with_capacity(d + 1);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut stage = vec![0.0; d];
    let mut z = z0.to_vec();
    for w in grid.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        f.eval_into(t, &z, &mut scratch, &mut k1);
        for i in 0..d {
            stage[i] = z[i] + 0.5 * h * k1[i];
        }
        f.eval_into(t + 0.5 * h, &stage, &mut scratch, &mut k2);
        for i in 0..d {
            stage[i] = z[i] + 0.5 * h * k2[i];
        }
        f.eval_into(t + 0.5 * h, &stage, &mut scratch, &mut k3);
        for i in 0..d {
            stage[i] = z[i] + h * k3[i];
        }
        f.eval_into(t + h, &stage, &mut scratch, &mut k4);
        for i in 0..d {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(NumericError::NonFinite { t });
        }
        states.push(z.clone());
    }
    Ok(Trajectory {
        names: f.state_names(),
        times: grid,
        states,
        step: dt,
        method: "rk4",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Expr, Symbol, SymbolKind};

    fn t() -> Symbol {
        Symbol::new("t", SymbolKind::Base)
    }

    fn y() -> Symbol {
        Symbol::new("y", SymbolKind::Fibre)
    }

    #[test]
    fn exponential_growth_reaches_e() {
        let f = FirstOrderSystem::new(t(), vec![y()], vec![Expr::sym(y())]).unwrap();
        let traj = integrate(&f, &[1.0], 0.0, 1.0, 1e-3).unwrap();
        assert_eq!(traj.len(), 1001);
        assert!((traj.last().unwrap()[0] - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn oscillator_energy_drift_is_small() {
        let v = Symbol::new("y_t", SymbolKind::Jet);
        let f = FirstOrderSystem::new(
            t(),
            vec![y(), v.clone()],
            vec![Expr::sym(v), -Expr::sym(y())],
        )
        .unwrap();
        let traj = integrate(&f, &[1.0, 0.0], 0.0, 100.0, 1e-3).unwrap();
        let energy = |z: &[f64]| 0.5 * (z[0] * z[0] + z[1] * z[1]);
        let drift = (energy(traj.last().unwrap()) - 0.5).abs() / 0.5;
        assert!(drift < 1e-8, "drift {drift}");
    }

    #[test]
    fn zero_field_is_constant() {
        let f = FirstOrderSystem::new(t(), vec![y()], vec![Expr::zero()]).unwrap();
        let traj = integrate(&f, &[0.25], 0.0, 2.0, 0.1).unwrap();
        assert!(traj.states.iter().all(|z| z[0] == 0.25));
    }

    #[test]
    fn final_partial_step() {
        let grid = time_grid(0.0, 1.05, 0.1).unwrap();
        assert_eq!(grid.len(), 12);
        assert_eq!(*grid.last().unwrap(), 1.05);
        assert!((grid[10] - 1.0).abs() < 1e-15);
        // exact division up to rounding gives no sliver step
        assert_eq!(time_grid(0.0, 0.3, 0.1).unwrap().len(), 4);
    }

    #[test]
    fn blow_up_reports_last_valid_time() {
        // y' = y^2, y(0) = 1 explodes at t = 1
        let f = FirstOrderSystem::new(t(), vec![y()], vec![Expr::sym(y()).powi(2)]).unwrap();
        match integrate(&f, &[1.0], 0.0, 2.0, 1e-2) {
            Err(NumericError::NonFinite { t }) => assert!(t > 0.9 && t < 2.0, "t = {t}"),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_grids_and_dimensions() {
        let f = FirstOrderSystem::new(t(), vec![y()], vec![Expr::zero()]).unwrap();
        assert!(matches!(
            integrate(&f, &[1.0], 0.0, 1.0, 0.0),
            Err(NumericError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate(&f, &[1.0], 1.0, 0.0, 0.1),
            Err(NumericError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate(&f, &[1.0, 2.0], 0.0, 1.0, 0.1),
            Err(NumericError::Dimension { .. })
        ));
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let f = FirstOrderSystem::new(t(), vec![y()], vec![Expr::one()]).unwrap();
        let csv = integrate(&f, &[0.1], 0.0, 0.5, 0.5).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,y");
        assert_eq!(lines[1], "0.0000000000000000e0,1.0000000000000001e-1");
        let value: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(value, 0.6);
    }

    #[test]
    fn integration_is_bit_reproducible() {
        let f = FirstOrderSystem::new(
            t(),
            vec![y()],
            vec![Expr::apply(
                crate::expr::Func::Sin,
                Expr::sym(y()) * Expr::sym(t()),
            )],
        )
        .unwrap();
        let a = integrate(&f, &[0.3], 0.0, 3.0, 1e-2).unwrap();
        let b = integrate(&f, &[0.3], 0.0, 3.0, 1e-2).unwrap();
        assert_eq!(a, b);
    }
}
