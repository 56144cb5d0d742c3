//! The full verification suite, seeded and deterministic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::report::{Verdict, VerificationReport};
use crate::symmetry::{self, FiniteSymmetryModel};
use crate::{evariables, qubit, spin_checks};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub prop1_directions: usize,
    pub cor1_directions: usize,
    pub collision_samples: usize,
    pub cor2_directions: usize,
    pub prop2_samples: usize,
    pub covering_pairs: usize,
    pub coarse_samples: usize,
    pub max_word_len: usize,
    pub eps: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            prop1_directions: 100,
            cor1_directions: 20,
            collision_samples: 100,
            cor2_directions: 10,
            prop2_samples: 1000,
            covering_pairs: 500,
            coarse_samples: 50,
            max_word_len: symmetry::DEFAULT_MAX_WORD_LEN,
            eps: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: String,
    pub reports: Vec<VerificationReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub sections: Vec<Section>,
}

impl SuiteReport {
    pub fn reports(&self) -> impl Iterator<Item = &VerificationReport> {
        self.sections.iter().flat_map(|s| s.reports.iter())
    }

    pub fn any_fail(&self) -> bool {
        self.reports().any(|r| r.verdict == Verdict::Fail)
    }
}

/// Each check draws from its own stream so adding samples to one check
/// leaves the others unchanged.
fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Every model check on one model: structure, assumptions, and the states.
pub fn model_reports(m: &FiniteSymmetryModel, max_len: usize, eps: f64, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut out = vec![symmetry::validate_model(m)];
    out.extend(symmetry::check_assumptions(m, max_len, &mut stream(seed, 100))?);
    match symmetry::verify_theorem1(m, max_len, eps) {
        Ok(r) => out.push(r),
        Err(crate::Error::HilbertDimensionTooSmall(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

pub fn bundled_models() -> Vec<(&'static str, &'static str)> {
    vec![("two_variable", symmetry::TWO_VARIABLE_MODEL), ("bad_model", symmetry::BAD_MODEL)]
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let spins = spin_checks::default_spins();
    let spin_reports = vec![
        spin_checks::verify_prop1(&spins, cfg.prop1_directions, &mut stream(cfg.seed, 1))?,
        spin_checks::verify_cor1(&spins, cfg.cor1_directions, cfg.collision_samples, &mut stream(cfg.seed, 2))?,
        spin_checks::verify_cor2(&spins, cfg.cor2_directions, &mut stream(cfg.seed, 3))?,
        qubit::verify_prop2_with_covering(cfg.prop2_samples, cfg.covering_pairs, cfg.eps, &mut stream(cfg.seed, 4))?,
    ];
    let mut sections = vec![
        Section { name: "spin".into(), reports: spin_reports },
        Section {
            name: "evariables".into(),
            reports: vec![evariables::verify_coarse_graining(cfg.coarse_samples, &mut stream(cfg.seed, 5))?],
        },
    ];
    for (name, text) in bundled_models() {
        let m = FiniteSymmetryModel::from_json(text)?;
        sections.push(Section {
            name: format!("model:{name}"),
            reports: model_reports(&m, cfg.max_word_len, cfg.eps, cfg.seed)?,
        });
    }
    Ok(SuiteReport { seed: cfg.seed, sections })
}
