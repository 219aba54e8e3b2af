//! One test per acceptance criterion, each writing a PASS or FAIL line to
//! stderr (uncaptured, so the lines show up in plain `cargo test` output).

use elliptica_cli::acceptance::{run, Level};
use elliptica_core::Tolerances;
use std::io::Write;

fn check(id: u8) {
    let out = run(id, Level::Full, &Tolerances::default());
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", out.line());
    assert!(out.passed, "{}", out.line());
}

#[test]
fn criterion_01_stable_ellipticity() {
    check(1);
}

#[test]
fn criterion_02_sl2_component_counts() {
    check(2);
}

#[test]
fn criterion_03_sp4_alcove_geometry() {
    check(3);
}

#[test]
fn criterion_04_su21_single_component() {
    check(4);
}

#[test]
fn criterion_05_basic_interval() {
    check(5);
}

#[test]
fn criterion_06_quasimorphism() {
    check(6);
}

#[test]
fn criterion_07_time_function() {
    check(7);
}

#[test]
fn criterion_08_exit_time() {
    check(8);
}

#[test]
fn criterion_09_jordan_exp() {
    check(9);
}

#[test]
fn criterion_10_properness() {
    check(10);
}
