//! Instance generators: the windowed circle model, synthetic finite-group instances and random
//! complexes for property tests.

pub mod circle;
pub mod random;
pub mod synthetic;

use std::collections::BTreeMap;

use crate::action::{
    verify_witness, ActionFile, Automorphism, Family, GeneratorEntry, Generator, GroupAction,
    HomotopyWitness, LiftModel, Word,
};
use crate::chains::{is_alternating, is_cycle, Chain};
use crate::error::{Error, Result};
use crate::multicomplex::{Complex, Multicomplex};
use crate::rational::{qi, serde_q, Q};

use circle::{CircleWindow, LiftMap};

/// The circle with `m` marked points, lift-coded simplices of diameter at most `W·m`.
#[derive(Clone, Debug)]
pub struct CircleModel {
    pub window: CircleWindow,
    pub action: GroupAction,
    pub action_file: ActionFile,
    pub cycle: Chain,
}

impl CircleModel {
    pub fn m(&self) -> usize {
        self.window.m
    }

    /// The window as an explicit multicomplex (small windows only).
    pub fn explicit(&self) -> Result<Multicomplex> {
        self.window.to_multicomplex()
    }

    pub fn lift(&self, label: &str) -> Result<LiftMap> {
        match self.action.generator(label).map(|g| &g.map) {
            Some(Automorphism::Lift(l)) => Ok(l.clone()),
            _ => Err(Error::invalid(format!("unknown generator `{label}`"))),
        }
    }
}

/// Action file for lift generators: vertex tables for reference, maps in `lift_model`.
pub fn lift_action_file(m: usize, gens: &[(String, LiftMap)]) -> ActionFile {
    ActionFile {
        family: Some(Family::Lift),
        generators: gens
            .iter()
            .map(|(label, l)| GeneratorEntry {
                label: label.clone(),
                vertex_map: (0..m)
                    .map(|r| (circle::vertex_name(r), circle::vertex_name(l.residue_image(r))))
                    .collect(),
                simplex_map: BTreeMap::new(),
            })
            .collect(),
        witnesses: Vec::new(),
        lift_model: Some(LiftModel {
            modulus: m,
            displacements: gens.iter().map(|(label, l)| (label.clone(), l.disp.clone())).collect(),
        }),
        word_budget: None,
    }
}

/// Circle model with transpositions `g_k`, shifts `s_k` and based loops `l_k`.
pub fn gen_circle_model(m: usize, windings: Q, cap: usize) -> Result<CircleModel> {
    if windings < qi(2) {
        return Err(Error::invalid("circle window needs W >= 2"));
    }
    let window = CircleWindow::new(m, windings, cap.max(1))?;
    let gens = circle::circle_generators(m);
    let action = GroupAction::lift(
        m,
        gens.iter()
            .map(|(label, l)| Generator {
                label: label.clone(),
                map: Automorphism::Lift(l.clone()),
            })
            .collect(),
    )?;
    let cycle = circle::fundamental_cycle(&window, m)?;
    if !is_alternating(&cycle) || !is_cycle(&window, &cycle)? {
        return Err(Error::invalid("fundamental chain is not an alternating cycle"));
    }
    for g in &action.generators {
        crate::action::apply(&window, &g.map, &g.label, &cycle)?;
    }
    Ok(CircleModel {
        window,
        action_file: lift_action_file(m, &gens),
        action,
        cycle,
    })
}

/// Parameters of a lazily resolved circle window, as stored in a complex file.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WindowSpec {
    pub modulus: usize,
    #[serde(with = "serde_q")]
    pub windings: Q,
    pub cap: usize,
}

/// A complex file: an explicit multicomplex, or `{"window": {...}}` for a circle window.
#[derive(Clone, Debug)]
pub enum LoadedComplex {
    Explicit(Multicomplex),
    Window(CircleWindow),
}

impl LoadedComplex {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        match v.get("window") {
            Some(w) => {
                let spec: WindowSpec = serde_json::from_value(w.clone())?;
                Ok(LoadedComplex::Window(CircleWindow::new(spec.modulus, spec.windings, spec.cap)?))
            }
            None => Ok(LoadedComplex::Explicit(Multicomplex::from_json_str(s)?)),
        }
    }

    pub fn complex(&self) -> &dyn Complex {
        match self {
            LoadedComplex::Explicit(k) => k,
            LoadedComplex::Window(w) => w,
        }
    }

    pub fn explicit(&self) -> Option<&Multicomplex> {
        match self {
            LoadedComplex::Explicit(k) => Some(k),
            LoadedComplex::Window(_) => None,
        }
    }

    /// The action file's group acting on this complex.
    pub fn action(&self, af: &ActionFile) -> Result<GroupAction> {
        if let Some(a) = af.lift_action() {
            return a;
        }
        match self {
            LoadedComplex::Explicit(k) => af.to_action(k),
            LoadedComplex::Window(_) => Err(Error::invalid("a circle window needs a lift_model action")),
        }
    }
}

/// Complex-file form of a circle window.
pub fn window_file_value(w: &CircleWindow) -> serde_json::Value {
    serde_json::json!({
        "window": WindowSpec { modulus: w.m, windings: w.windings.clone(), cap: w.cap },
        "vertices": (0..w.m).map(circle::vertex_name).collect::<Vec<_>>(),
    })
}

/// Prism homotopy for a lift map on an explicit window, verified on its domain before return.
pub fn prism_witness(k: &Multicomplex, element: Word, lift: LiftMap, cap: usize) -> Result<HomotopyWitness> {
    let w = HomotopyWitness::prism(element, lift, cap);
    let rep = verify_witness(k, &w);
    if let Some(f) = rep.failure {
        return Err(Error::Witness(format!("prism witness fails at {}: {}", f.sigma, f.reason)));
    }
    Ok(w)
}

/// Checks that a complex contains every simplex of a chain.
pub fn chain_fits(k: &dyn Complex, c: &Chain) -> bool {
    c.check_on(k).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology_lp::{class_of, homology};

    #[test]
    fn circle_model_small_window() {
        let model = gen_circle_model(3, qi(2), 2).unwrap();
        let k = model.explicit().unwrap();
        assert!(crate::multicomplex::validate(&k).is_ok());
        assert!(chain_fits(&k, &model.cycle));
        let h = homology(&k, 1).unwrap();
        assert!(h.dimension >= 1);
        assert!(class_of(&k, &h, &model.cycle).unwrap().iter().any(|x| *x != Q::from_integer(0.into())));
        for s in model.cycle.support_simplices() {
            assert!(model.action.stabilizer_sign_search(&k, &s).unwrap().is_some());
        }
        let w = prism_witness(&k, Word::gen("g0"), model.lift("g0").unwrap(), 2).unwrap();
        assert!(w.bound(1) <= qi(2));
        assert!(gen_circle_model(3, qi(1), 2).is_err());
        assert!(gen_circle_model(2, qi(4), 2).is_err());
        let v = window_file_value(&model.window);
        match LoadedComplex::from_json_str(&v.to_string()).unwrap() {
            LoadedComplex::Window(w) => assert_eq!((w.m, w.windings, w.cap), (3, qi(2), 2)),
            LoadedComplex::Explicit(_) => panic!("window expected"),
        }
        let e = LoadedComplex::from_json_str(&k.to_json_string()).unwrap();
        assert_eq!(e.explicit(), Some(&k));
        let reloaded = e.action(&model.action_file).unwrap();
        assert_eq!(reloaded.family, Family::Lift);
    }
}
