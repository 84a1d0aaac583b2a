//! Truncated q-series with exact coefficients: Eisenstein series, eta, theta, and
//! the ring operations between them.

use qbracket::rational::{fmt, int};
use qbracket::series::{euler, QSeries};
use qbracket::special::{eisenstein, eta_series, theta_deriv_series, theta_product_form};

fn show(name: &str, s: &QSeries) {
    println!("{name:>12}: {}", s.to_json());
}

fn main() {
    let order = 8;
    show("G2", &eisenstein(2, order).unwrap());
    show("G4", &eisenstein(4, order).unwrap());
    show("eta", &eta_series(order));

    // (q;q)_inf times its inverse is 1 through the truncation order.
    let e = euler(order);
    let unit = &e * &e.inv().unwrap();
    println!("(q)_inf / (q)_inf is one: {}", unit.is_one());

    // The sum and product forms of Theta(x) at x = 4 agree.
    let s = int(2);
    let sum_form = theta_deriv_series(0, &s, order);
    show("Theta(4)", &sum_form);
    println!("product form agrees: {}", sum_form == theta_product_form(&s, order));
    println!("leading coefficient: {}", fmt(&sum_form.coeffs()[0]));
}
