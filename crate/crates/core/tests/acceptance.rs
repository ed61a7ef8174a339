//! Acceptance suite: every release-gating claim, one test per criterion.
//!
//! Run `cargo test --test acceptance -- --show-output` to see the
//! one-line PASS/FAIL summary of each criterion with its measured
//! residual and threshold.

use neqcoh::verify::{run_check, VerifyOptions};

fn criterion(names: &[&str]) {
    let opts = VerifyOptions::default();
    let mut failed = false;
    for name in names {
        let outcome = run_check(name, &opts).expect("known check name");
        println!("{}", outcome.summary_line());
        failed |= !outcome.passed;
    }
    assert!(!failed, "criterion failed, see output above");
}

#[test]
fn criterion_01_equilibrium_limit() {
    criterion(&["equilibrium-gibbs"]);
}

#[test]
fn criterion_02_secular_consistency() {
    criterion(&["secular-consistency"]);
}

#[test]
fn criterion_03_coherence_surfaces() {
    criterion(&["lambda-coherence-surface", "vee-coherence-comparison"]);
}

#[test]
fn criterion_04_determinant_formula() {
    criterion(&["determinant-formula"]);
}

#[test]
fn criterion_05_zero_coherence_conditions() {
    criterion(&["zero-coherence-conditions"]);
}

#[test]
fn criterion_06_flux_coherence_identity() {
    criterion(&["flux-coherence-identity"]);
}

#[test]
fn criterion_07_method_agreement_and_initial_state_independence() {
    criterion(&["method-agreement", "initial-state-independence"]);
}

#[test]
fn criterion_08_generator_correctness() {
    criterion(&["generator-cross-validation"]);
}

#[test]
fn criterion_09_integrator_order() {
    criterion(&["integrator-order"]);
}

#[test]
fn criterion_10_degeneracy_detection() {
    criterion(&["degeneracy-detection"]);
}

#[test]
fn detailed_balance_baseline() {
    criterion(&["micro-reversibility"]);
}
