//! One test per acceptance criterion. Each prints a PASS/FAIL line with the
//! computed values before asserting.

use bjss_core::ledger::discrepancy_ledger;
use bjss_core::reproduce::{self, CriterionResult, ReproduceOptions};

fn report(r: CriterionResult) {
    println!("{}", r.line());
    assert!(r.pass, "{}", r.line());
}

fn opts() -> ReproduceOptions {
    ReproduceOptions::default()
}

#[test]
fn criterion_01_werner_ch_threshold() {
    report(reproduce::criterion_1(&opts()));
}

#[test]
fn criterion_02_werner_ch_chsh_coincide() {
    report(reproduce::criterion_2(&opts()));
}

#[test]
fn criterion_03_ch_threshold() {
    report(reproduce::criterion_3(&opts()));
}

#[test]
fn criterion_04_chsh_threshold() {
    report(reproduce::criterion_4(&opts()));
}

#[test]
fn criterion_05_mixed_ch_threshold() {
    report(reproduce::criterion_5(&opts()));
}

#[test]
fn criterion_06_threshold_ordering() {
    report(reproduce::criterion_6(&opts()));
}

#[test]
fn criterion_07_approximation_convergence() {
    report(reproduce::criterion_7(&opts()));
}

#[test]
fn criterion_08_oracle_equivalence() {
    report(reproduce::criterion_8(&opts()));
}

#[test]
fn criterion_09_probability_axioms() {
    report(reproduce::criterion_9(&opts()));
}

#[test]
fn criterion_10_discrepancy_ledger() {
    let ledger = discrepancy_ledger(100.0).unwrap();
    report(reproduce::criterion_10(&ledger));
}
