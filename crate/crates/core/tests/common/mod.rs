#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use jetvar::frontend::{Model, ModelKind};
use jetvar::numeric::JacobiProblem;

pub fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn model_path(name: &str) -> PathBuf {
    models_dir().join(format!("{name}.eqn"))
}

pub fn model_text(name: &str) -> String {
    std::fs::read_to_string(model_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn model(name: &str) -> Model {
    Model::parse(&model_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every corpus model, sorted by name.
pub fn corpus() -> Vec<(String, Model)> {
    let mut names: Vec<String> = std::fs::read_dir(models_dir())
        .expect("models directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            (path.extension()? == "eqn").then(|| path.file_stem()?.to_str().map(str::to_string))?
        })
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), model(&n))).collect()
}

pub fn is_lagrangian(m: &Model) -> bool {
    matches!(m.kind(), ModelKind::Lagrangian(_))
}

pub fn is_hamiltonian(m: &Model) -> bool {
    matches!(m.kind(), ModelKind::Hamiltonian(_))
}

/// Initial data for a corpus model on a one-dimensional base.
pub struct OdeCase {
    pub name: &'static str,
    pub init: &'static [(&'static str, f64)],
    pub jacobi: &'static [(&'static str, f64)],
    pub t1: f64,
    pub linear: bool,
}

impl OdeCase {
    pub fn problem(&self, dt: f64) -> JacobiProblem {
        let to_map = |pairs: &[(&str, f64)]| {
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect::<BTreeMap<_, _>>()
        };
        let system = model(self.name).deviation().unwrap();
        JacobiProblem::new(
            system,
            to_map(self.init),
            to_map(self.jacobi),
            0.0,
            self.t1,
            dt,
        )
        .unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }
}

pub const ODE_CASES: &[OdeCase] = &[
    OdeCase {
        name: "oscillator",
        init: &[("y", 0.0), ("y_t", 1.0)],
        jacobi: &[("v_y", 1.0), ("v_y_t", 0.0)],
        t1: 5.0,
        linear: true,
    },
    OdeCase {
        name: "pendulum",
        init: &[("y", 1.0), ("y_t", 0.0)],
        jacobi: &[("v_y", 0.3), ("v_y_t", -0.2)],
        t1: 5.0,
        linear: false,
    },
    OdeCase {
        name: "free",
        init: &[("y", 0.0), ("y_t", 1.0)],
        jacobi: &[("v_y", 0.5), ("v_y_t", 1.0)],
        t1: 5.0,
        linear: true,
    },
    OdeCase {
        name: "cubic",
        init: &[("y", 0.5), ("y_t", 0.0)],
        jacobi: &[("v_y", 0.2), ("v_y_t", 0.1)],
        t1: 2.0,
        linear: false,
    },
    OdeCase {
        name: "sphere",
        init: &[
            ("theta", 1.0),
            ("theta_t", 0.1),
            ("phi", 0.0),
            ("phi_t", 1.0),
        ],
        jacobi: &[
            ("v_theta", 0.1),
            ("v_theta_t", 1.0),
            ("v_phi", 0.2),
            ("v_phi_t", 0.0),
        ],
        t1: 3.0,
        linear: false,
    },
    OdeCase {
        name: "duffing",
        init: &[("y", 1.0), ("y_t", 0.0)],
        jacobi: &[("v_y", 0.3), ("v_y_t", 0.1)],
        t1: 5.0,
        linear: false,
    },
    OdeCase {
        name: "coupled",
        init: &[("q", 1.0), ("q_t", 0.0), ("r", 0.0), ("r_t", 0.5)],
        jacobi: &[("v_q", 0.2), ("v_q_t", 0.0), ("v_r", 0.0), ("v_r_t", 0.3)],
        t1: 5.0,
        linear: false,
    },
    OdeCase {
        name: "kepler",
        init: &[("r", 1.0), ("r_t", 0.1), ("phi", 0.0), ("phi_t", 1.1)],
        jacobi: &[
            ("v_r", 0.1),
            ("v_r_t", 0.0),
            ("v_phi", 0.0),
            ("v_phi_t", 0.1),
        ],
        t1: 5.0,
        linear: false,
    },
    OdeCase {
        name: "pais_uhlenbeck",
        init: &[("y", 1.0), ("y_t", 0.0), ("y_tt", 0.0), ("y_ttt", 0.0)],
        jacobi: &[
            ("v_y", 0.5),
            ("v_y_t", 0.1),
            ("v_y_tt", 0.0),
            ("v_y_ttt", 0.0),
        ],
        t1: 5.0,
        linear: true,
    },
    OdeCase {
        name: "riccati",
        init: &[("y", 0.0)],
        jacobi: &[("v_y", 1.0)],
        t1: 1.0,
        linear: false,
    },
    OdeCase {
        name: "vdp",
        init: &[("y", 2.0), ("y_t", 0.0)],
        jacobi: &[("v_y", 0.1), ("v_y_t", 0.2)],
        t1: 5.0,
        linear: false,
    },
    OdeCase {
        name: "ham_oscillator",
        init: &[("y", 0.0), ("pt_y", 1.0)],
        jacobi: &[("v_y", 1.0), ("vpt_y", 0.0)],
        t1: 5.0,
        linear: true,
    },
    OdeCase {
        name: "ham_pendulum",
        init: &[("y", 1.0), ("pt_y", 0.0)],
        jacobi: &[("v_y", 0.3), ("vpt_y", -0.2)],
        t1: 5.0,
        linear: false,
    },
    OdeCase {
        name: "ham_quartic",
        init: &[("y", 1.0), ("pt_y", 0.0)],
        jacobi: &[("v_y", 0.2), ("vpt_y", 0.1)],
        t1: 5.0,
        linear: false,
    },
    OdeCase {
        name: "ham_coupled",
        init: &[("q", 1.0), ("r", 0.5), ("pt_q", 0.0), ("pt_r", 0.3)],
        jacobi: &[("v_q", 0.1), ("v_r", 0.0), ("vpt_q", 0.0), ("vpt_r", 0.2)],
        t1: 5.0,
        linear: false,
    },
];

pub fn ode_case(name: &str) -> &'static OdeCase {
    ODE_CASES
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no case {name}"))
}
