//! Grid operators and closed forms against the frozen oracle table.

use fracml::functions::{Polynomial, RealFunction};
use fracml::operators::{abc_derivative, abr_derivative, Grid};
use fracml::oracles::{golden_rows, parse_golden, GoldenRow, OracleConfig};
use fracml::special::{ml, FractionalOrder, MlParameters};

fn frozen() -> Vec<GoldenRow> {
    let text = include_str!("data/golden.tsv");
    parse_golden(text).expect("golden table parses")
}

fn poly(name: &str) -> Polynomial {
    match name {
        "1" => Polynomial(vec![1.0]),
        "t" => Polynomial(vec![0.0, 1.0]),
        "t^2" => Polynomial(vec![0.0, 0.0, 1.0]),
        other => panic!("unexpected function {other}"),
    }
}

#[test]
fn table_is_complete_and_sharp() {
    let rows = frozen();
    assert_eq!(rows.len(), 34);
    for r in &rows {
        assert!(r.err_est <= 1e-7, "{r:?}");
    }
}

#[test]
fn grid_operators_match_oracle() {
    for r in frozen().iter().filter(|r| r.quantity == "abc" || r.quantity == "abr") {
        let ord = FractionalOrder::unit(r.alpha).unwrap();
        let grid = Grid::new(0.0, r.t, 2048).unwrap();
        let s = poly(&r.function).sample(&grid);
        let d = if r.quantity == "abc" { abc_derivative(&s, &ord) } else { abr_derivative(&s, &ord) }.unwrap();
        let got = d.value(2048);
        assert!((got - r.value).abs() <= 1e-5, "{} {} alpha {}: {got} vs {}", r.quantity, r.function, r.alpha, r.value);
    }
}

#[test]
fn abc_of_t_at_half() {
    let r = frozen()
        .into_iter()
        .find(|r| r.quantity == "abc" && r.function == "t" && r.alpha == 0.5)
        .unwrap();
    let grid = Grid::new(0.0, 1.0, 2048).unwrap();
    let d = abc_derivative(&poly("t").sample(&grid), &FractionalOrder::unit(0.5).unwrap()).unwrap();
    assert!((d.value(2048) - r.value).abs() <= 1e-5);
    // the product quadrature is exact for linear data up to the kernel moments
    assert!((d.value(2048) - r.value).abs() <= 1e-12);
}

#[test]
fn convolution_rows_match_closed_form() {
    for r in frozen().iter().filter(|r| r.quantity == "conv") {
        let p = MlParameters::new(r.alpha, r.alpha + 1.0).unwrap();
        let exact = r.t.powf(r.alpha) * ml(p, r.param * r.t.powf(r.alpha)).unwrap();
        assert!((exact - r.value).abs() <= 1e-12, "{r:?}: {exact}");
    }
}

#[test]
fn erfc_rows_match_series() {
    let p = MlParameters::one(0.5).unwrap();
    for r in frozen().iter().filter(|r| r.quantity == "erfc") {
        let v = ml(p, -r.param).unwrap();
        assert!((v - r.value).abs() <= 1e-13 * r.value.abs().max(1.0), "{r:?}: {v}");
    }
}

#[test]
fn regeneration_reproduces_table() {
    let fresh = golden_rows(&OracleConfig::default()).unwrap();
    let old = frozen();
    assert_eq!(fresh.len(), old.len());
    for (a, b) in fresh.iter().zip(&old) {
        assert_eq!((&a.quantity, &a.function), (&b.quantity, &b.function));
        assert!((a.value - b.value).abs() <= 1e-15 * b.value.abs().max(1.0), "{a:?} vs {b:?}");
    }
}
