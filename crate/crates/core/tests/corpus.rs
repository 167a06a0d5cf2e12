mod common;

use jetvar::expr::{Equivalence, EquivalenceConfig};
use jetvar::frontend::{render_model, render_system, Format, Model};

use common::{corpus, is_hamiltonian, is_lagrangian};

#[test]
fn corpus_is_broad_enough() {
    let models = corpus();
    let lagrangians: Vec<_> = models.iter().filter(|(_, m)| is_lagrangian(m)).collect();
    assert!(lagrangians.len() >= 10);
    assert!(lagrangians.iter().any(|(_, m)| m.spec().fibre().len() > 1));
    assert!(lagrangians.iter().any(|(_, m)| m.spec().dim_base() > 1));
    assert!(models.iter().filter(|(_, m)| is_hamiltonian(m)).count() >= 4);
}

#[test]
fn every_model_passes_its_check() {
    for seed in [0, 1, 99] {
        let config = EquivalenceConfig::with_seed(seed);
        for (name, m) in corpus() {
            let report = m.check(&config).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(report.passed(), "{name}:\n{report}");
        }
    }
}

#[test]
fn text_rendering_round_trips() {
    for (name, m) in corpus() {
        let text = render_model(&m, Format::Text);
        let again = Model::parse_with_order(&text, Some(m.spec().order()))
            .unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(again, m, "{name}");
    }
}

#[test]
fn json_renderings_are_valid() {
    for (name, m) in corpus() {
        let doc: serde_json::Value = serde_json::from_str(&render_model(&m, Format::Json)).unwrap();
        assert!(doc["kind"].is_string(), "{name}");
        let sys = m.deviation().unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&render_system(&sys, Format::Json)).unwrap();
        assert_eq!(
            doc["equations"].as_array().unwrap().len(),
            sys.equations().len(),
            "{name}"
        );
    }
}

#[test]
fn latex_renderings_are_balanced() {
    for (name, m) in corpus() {
        let sys = m.deviation().unwrap();
        for line in render_system(&sys, Format::Latex).lines() {
            let opens = line.matches('{').count();
            assert_eq!(opens, line.matches('}').count(), "{name}: {line}");
            assert_eq!(
                line.matches("\\left(").count(),
                line.matches("\\right)").count(),
                "{name}: {line}"
            );
            assert!(
                line.starts_with("\\[") && line.ends_with("= 0 \\]"),
                "{name}: {line}"
            );
        }
    }
}

#[test]
fn deviation_doubles_the_equations() {
    for (name, m) in corpus() {
        let n = m.equations().unwrap().equations().len();
        let sys = m.deviation().unwrap();
        assert_eq!(sys.original_block().len(), n, "{name}");
        assert_eq!(sys.vertical_block().len(), n, "{name}");
        assert_eq!(
            sys.original_block(),
            m.equations().unwrap().equations(),
            "{name}"
        );
    }
}

#[test]
fn vertical_hamiltonians_keep_velocity_equations_verbatim() {
    for (name, m) in corpus().into_iter().filter(|(_, m)| is_hamiltonian(m)) {
        let report = m.check(&EquivalenceConfig::default()).unwrap();
        let verbatim: Vec<_> = report
            .pairs
            .iter()
            .filter(|p| p.label.starts_with("VH velocity") && !p.label.contains("d_V"))
            .collect();
        assert_eq!(
            verbatim.len(),
            m.spec().fibre().len() * m.spec().dim_base(),
            "{name}"
        );
        for p in verbatim {
            assert_eq!(p.outcome, Equivalence::Symbolic, "{name}: {}", p.label);
            assert_eq!(p.lhs, p.rhs, "{name}: {}", p.label);
        }
    }
}
