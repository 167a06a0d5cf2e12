//! Covariant Hamilton equations on the Legendre bundle and the vertical
//! Hamiltonian.
//!
//! On a vertical extension the conjugate pairs are `(y^i, ṗ^λ_i)` and
//! `(v^i, p^λ_i)`, read off the form `(ṗ dy + p dv) ∧ ω_λ - d_V𝓗 ω`.

use crate::expr::{EquivalenceConfig, Expr};
use crate::jet::{self, BundleSpec, Field, JetCoordinate, JetError, MultiIndex};
use crate::variational::{
    self, pair, CommutationReport, EquationSystem, Structure, VariationalError,
};

/// A Hamiltonian density `𝓗(x, y, p)` in a single chart.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSystem {
    density: Expr,
    spec: BundleSpec,
}

impl HamiltonianSystem {
    /// Adds momenta to `spec` and raises its order to at least one (the
    /// Hamilton equations are first order).
    pub fn new(density: Expr, spec: BundleSpec) -> Result<Self, VariationalError> {
        let order = spec.order().max(1);
        let spec = spec.with_momenta().with_order(order);
        let density = density.normalize();
        spec.check_symbols(&density)?;
        for s in density.free_symbols() {
            if let Some(c) = spec.jet_coordinate(&s) {
                if c.vertical && !spec.is_vertical() {
                    return Err(VariationalError::UnexpectedVertical(s.name().to_string()));
                }
                if c.order() > 0 {
                    return Err(VariationalError::OrderExceeded {
                        symbol: s.name().to_string(),
                        found: c.order(),
                        order: 0,
                    });
                }
            }
        }
        Ok(HamiltonianSystem { density, spec })
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn is_vertical(&self) -> bool {
        self.spec.is_vertical()
    }

    /// The momentum conjugate to configuration coordinate `q` along base
    /// direction `direction`.
    pub fn conjugate(&self, q: &JetCoordinate, direction: usize) -> JetCoordinate {
        let Field::Fibre(fibre) = q.field else {
            unreachable!("configuration coordinates are fibre coordinates")
        };
        let momentum = Field::Momentum {
            base: direction,
            fibre,
        };
        let vertical = self.spec.is_vertical() && !q.vertical;
        JetCoordinate::new(momentum, MultiIndex::empty(), vertical)
    }
}

/// `y^i_λ - ∂𝓗/∂p^λ_i = 0` for every `(i, λ)`, then
/// `Σ_λ d_λ p^λ_i + ∂𝓗/∂y^i = 0` for every `i`.
pub fn hamilton_equations(h: &HamiltonianSystem) -> Result<EquationSystem, VariationalError> {
    let spec = &h.spec;
    let n = spec.dim_base();
    let config = spec.configuration();
    let mut velocity = Vec::with_capacity(config.len() * n);
    let mut momentum = Vec::with_capacity(config.len());
    for q in &config {
        let mut divergence = Vec::with_capacity(n);
        for d in 0..n {
            let p = h.conjugate(q, d);
            let q_d = spec.jet(&q.prolonged(d));
            velocity.push((q_d - h.density.diff(&spec.jet_symbol(&p))).normalize());
            divergence.push(jet::total_derivative(&spec.jet(&p), d, spec)?);
        }
        divergence.push(h.density.diff(&spec.jet_symbol(q)));
        momentum.push(Expr::sum(divergence).normalize());
    }
    velocity.extend(momentum);
    Ok(EquationSystem::new(
        velocity,
        spec.clone(),
        Structure::Plain,
    ))
}

/// `V𝓗 = d_V 𝓗 = v^j ∂_j 𝓗 + ṗ^μ_j ∂𝓗/∂p^μ_j` on the doubled space.
pub fn vertical_hamiltonian(h: &HamiltonianSystem) -> Result<HamiltonianSystem, VariationalError> {
    let spec = h.spec.vertical_extension()?;
    let density = jet::vertical_derivative(&h.density, &h.spec)?;
    Ok(HamiltonianSystem { density, spec })
}

/// Checks that the Hamilton equations of `VH` are the deviation of the
/// Hamilton equations of `H`, pairing the `(y, ṗ)` velocity equations and
/// `v` momentum equations with the original block and the rest with its
/// vertical derivative.
pub fn check_hamilton_deviation_commute(
    h: &HamiltonianSystem,
    config: &EquivalenceConfig,
) -> Result<CommutationReport, VariationalError> {
    if h.is_vertical() {
        return Err(JetError::VerticalTwice.into());
    }
    let vh = vertical_hamiltonian(h)?;
    let lhs = hamilton_equations(&vh)?;
    let rhs = variational::deviation_system(&hamilton_equations(h)?.to_operator()?)?;
    let (a, b) = (lhs.equations(), rhs.equations());

    let n = h.spec.dim_base();
    let m = h.spec.fibre().len();
    let block = m * n + m;
    let names = |k: usize| vh.spec.jet_name(&vh.spec.configuration()[k]);
    let base = |d: usize| h.spec.base()[d].as_str();
    let mut pairs = Vec::with_capacity(2 * block);
    for i in 0..m {
        for d in 0..n {
            pairs.push(pair(
                format!(
                    "VH velocity[{}, {}] = velocity[{}, {}]",
                    names(i),
                    base(d),
                    names(i),
                    base(d)
                ),
                &a[i * n + d],
                &b[i * n + d],
                config,
            ));
            pairs.push(pair(
                format!(
                    "VH velocity[{}, {}] = d_V velocity[{}, {}]",
                    names(m + i),
                    base(d),
                    names(i),
                    base(d)
                ),
                &a[(m + i) * n + d],
                &b[block + i * n + d],
                config,
            ));
        }
        pairs.push(pair(
            format!("VH momentum[{}] = momentum[{}]", names(m + i), names(i)),
            &a[2 * m * n + m + i],
            &b[m * n + i],
            config,
        ));
        pairs.push(pair(
            format!("VH momentum[{}] = d_V momentum[{}]", names(i), names(i)),
            &a[2 * m * n + i],
            &b[block + m * n + i],
            config,
        ));
    }
    Ok(CommutationReport {
        theorem: "Hamilton(VH) = V(Hamilton(H))".to_string(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Func;

    fn spec_t() -> BundleSpec {
        BundleSpec::new(&["t"], &["y"])
            .unwrap()
            .with_momenta()
            .with_param("omega", None)
            .unwrap()
    }

    fn var(spec: &BundleSpec, name: &str) -> Expr {
        Expr::sym(spec.symbol(name).unwrap())
    }

    fn half() -> Expr {
        Expr::rational(1, 2)
    }

    fn oscillator() -> HamiltonianSystem {
        let spec = spec_t();
        let (p, y, w) = (var(&spec, "pt_y"), var(&spec, "y"), var(&spec, "omega"));
        HamiltonianSystem::new(half() * p.powi(2) + half() * w.powi(2) * y.powi(2), spec).unwrap()
    }

    fn pendulum() -> HamiltonianSystem {
        let spec = spec_t();
        let density = half() * var(&spec, "pt_y").powi(2) - Expr::apply(Func::Cos, var(&spec, "y"));
        HamiltonianSystem::new(density, spec).unwrap()
    }

    fn strings(sys: &EquationSystem) -> Vec<String> {
        sys.equations().iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn oscillator_hamilton_equations() {
        let sys = hamilton_equations(&oscillator()).unwrap();
        assert_eq!(strings(&sys), ["y_t - pt_y", "pt_y_t + omega^2*y"]);
    }

    #[test]
    fn pendulum_hamilton_equations() {
        let sys = hamilton_equations(&pendulum()).unwrap();
        assert_eq!(strings(&sys), ["y_t - pt_y", "sin(y) + pt_y_t"]);
    }

    #[test]
    fn covariant_field_equations_sum_the_divergence() {
        let spec = BundleSpec::new(&["x", "t"], &["y"]).unwrap().with_momenta();
        let density = half() * (var(&spec, "px_y").powi(2) + var(&spec, "pt_y").powi(2));
        let sys = hamilton_equations(&HamiltonianSystem::new(density, spec).unwrap()).unwrap();
        assert_eq!(
            strings(&sys),
            ["y_x - px_y", "y_t - pt_y", "px_y_x + pt_y_t"]
        );
    }

    #[test]
    fn vertical_hamiltonian_examples() {
        let spec = spec_t();
        let p = var(&spec, "pt_y");
        let free = HamiltonianSystem::new(half() * p.powi(2), spec.clone()).unwrap();
        assert_eq!(
            vertical_hamiltonian(&free).unwrap().density().to_string(),
            "pt_y*vpt_y"
        );
        assert_eq!(
            vertical_hamiltonian(&oscillator())
                .unwrap()
                .density()
                .to_string(),
            "pt_y*vpt_y + omega^2*v_y*y"
        );
        assert_eq!(
            vertical_hamiltonian(&pendulum())
                .unwrap()
                .density()
                .to_string(),
            "v_y*sin(y) + pt_y*vpt_y"
        );
    }

    #[test]
    fn vertical_conjugates_are_swapped() {
        let vh = vertical_hamiltonian(&oscillator()).unwrap();
        let sys = hamilton_equations(&vh).unwrap();
        assert_eq!(
            strings(&sys),
            [
                "y_t - pt_y",
                "-vpt_y + v_y_t",
                "vpt_y_t + omega^2*v_y",
                "pt_y_t + omega^2*y"
            ]
        );
    }

    #[test]
    fn oscillator_deviation_commutes() {
        let report =
            check_hamilton_deviation_commute(&oscillator(), &EquivalenceConfig::default()).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.pairs.len(), 4);
    }

    #[test]
    fn pendulum_deviation_matches_hand_expansion() {
        let report =
            check_hamilton_deviation_commute(&pendulum(), &EquivalenceConfig::default()).unwrap();
        assert!(report.passed(), "{report}");
        let spec = spec_t();
        // deviation of {y_t - p = 0, p_t + sin y = 0}, expanded by hand
        let dv_vel = var(&spec, "v_y_t") - var(&spec, "vpt_y");
        let dv_mom =
            var(&spec, "vpt_y_t") + Expr::apply(Func::Cos, var(&spec, "y")) * var(&spec, "v_y");
        assert_eq!(report.pairs[1].rhs, dv_vel.normalize());
        assert_eq!(report.pairs[3].rhs, dv_mom.normalize());
    }

    #[test]
    fn linear_hamiltonian_sides_coincide_verbatim() {
        let spec = spec_t();
        let density = Expr::int(3) * var(&spec, "pt_y") + Expr::int(2) * var(&spec, "y");
        let h = HamiltonianSystem::new(density, spec).unwrap();
        let report = check_hamilton_deviation_commute(&h, &EquivalenceConfig::default()).unwrap();
        for p in &report.pairs {
            assert_eq!(p.lhs, p.rhs, "{}", p.label);
        }
    }

    #[test]
    fn rejects_jets_and_repeated_extension() {
        let spec = spec_t();
        assert!(HamiltonianSystem::new(var(&spec, "y_t"), spec.clone()).is_err());
        assert!(HamiltonianSystem::new(var(&spec, "v_y"), spec).is_err());
        let vh = vertical_hamiltonian(&oscillator()).unwrap();
        assert!(vertical_hamiltonian(&vh).is_err());
        assert!(check_hamilton_deviation_commute(&vh, &EquivalenceConfig::default()).is_err());
    }

    #[test]
    fn equation_count() {
        let spec = BundleSpec::new(&["x", "t"], &["u", "w"])
            .unwrap()
            .with_momenta();
        let density = var(&spec, "px_u") * var(&spec, "pt_w") + var(&spec, "u") * var(&spec, "w");
        let sys = hamilton_equations(&HamiltonianSystem::new(density, spec).unwrap()).unwrap();
        assert_eq!(sys.equations().len(), 2 * 2 + 2);
    }
}
