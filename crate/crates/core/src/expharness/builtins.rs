//! The built-in scenario catalog.

use super::scenario::{Comparator::*, Expectation, Kind, Provenance::*, Scenario};
use super::HarnessError;

const EXPANDER: &str = "x^2 + x*y + y^2";
const QUARTIC: &str = "x + y + (x^2 + y^2)^2";
const OCTIC: &str = "x + y + (x^2 + y^2)^4";
const MAIN_SCALES: &str = "10..14";
const WEB_SCALES: &str = "8..10";
const PINS: &str = "0,0;1,0;0,1";
const WEB_DOMAIN: &str = "0.3,0.7,0.3,0.7";

fn growth(name: &str, poly: &str) -> Scenario {
    Scenario::new(name, Kind::Growth)
        .param("poly", poly)
        .param("gen", "ap")
        .param("scales", MAIN_SCALES)
        .param("measure", "image,energy")
}

fn web(name: &str) -> Scenario {
    Scenario::new(name, Kind::Web)
        .param("pins", PINS)
        .param("domain", WEB_DOMAIN)
        .param("pattern", "1,2")
        .param("base", 4)
        .param("alpha", "1/2")
        .param("scales", WEB_SCALES)
}

fn e(metric: &str, cmp: super::Comparator, target: f64, prov: super::Provenance) -> Expectation {
    Expectation::new(metric, cmp, target, prov)
}

/// All built-in scenarios, in a fixed order.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        // sums of a progression: image ~ delta^-alpha, energy ~ delta^-3 alpha
        growth("special_form_collapse", "x + y")
            .param("alpha", "1/2")
            .param("eta", 0)
            .expect(e("energy_exponent", Approx, 1.5, Paper))
            .expect(e("image_exponent", Approx, 0.5, Paper).with_tolerance(0.1))
            .expect(e("cs_violations", Le, 0.0, Paper)),
        // an expander cannot push the image past the whole interval
        growth("eps_alpha_cap", EXPANDER)
            .param("alpha", "3/4")
            .param("eta", 0)
            .expect(e("image_exponent", Le, 1.0, Paper).with_tolerance(0.15))
            .expect(e("image_exponent", Approx, 1.014, Derived).with_tolerance(0.05))
            .expect(e("cs_violations", Le, 0.0, Paper)),
        // eta < 1/D: the degree-D term stays below one cell on A x A
        growth("eta_depends_on_D", OCTIC)
            .param("alpha", "1/2")
            .param("eta", "1/4")
            .param("compare_poly", "x + y")
            .expect(e("image_exponent", Approx, 0.5, Paper).with_tolerance(0.1))
            .expect(e("image_gap", Approx, 0.0, Derived).with_tolerance(0.01))
            .expect(e("cs_violations", Le, 0.0, Paper)),
        // energy on [0, delta^(1/D)/4]^4 ~ delta^(-3 alpha + 3/D); larger D, larger energy
        growth("eps_D_energy", QUARTIC)
            .param("alpha", "1/2")
            .param("eta", 0)
            .param("compare_poly", OCTIC)
            .param("restrict_exponent", "1/4")
            .param("restrict_scales", "16..30:2")
            .expect(e("restricted_energy_exponent", Approx, 0.75, Paper))
            .expect(e("energy_order_violations", Le, 0.0, Paper))
            .expect(e("cs_violations", Le, 0.0, Paper)),
        // x + y + c Q looks additive until delta drops below c
        growth("small_c_delta", "x + y + 1/64*(x^2 + y^2)^2")
            .param("alpha", "1/2")
            .param("eta", 0)
            .param("scales", "12..16")
            .param("shallow_scales", "3..6")
            .param("compare_poly", "x + y")
            .expect(e("shallow_gap", Approx, 0.0, Paper).with_tolerance(0.05))
            .expect(e("image_gap", Gt, 0.0, Paper))
            .expect(e("cs_violations", Le, 0.0, Paper)),
        growth("expander_growth", EXPANDER)
            .param("alpha", "1/2")
            .param("eta", 0)
            .param("compare_poly", "x + y")
            .expect(e("image_gap", Gt, 0.0, Paper))
            .expect(e("image_exponent", Approx, 0.974, Derived).with_tolerance(0.05))
            .expect(e("cs_violations", Le, 0.0, Paper)),
        // X = phi1^-1(X1) cap phi2^-1(X2) for pinned distances; phi3 must grow
        web("three_projection")
            .expect(e("margin_min", Gt, 0.0, Paper))
            .expect(e("margin_monotone", Ge, 1.0, Paper))
            .expect(e("phi12_excess", Le, 0.1, Derived))
            .expect(e("image3_exponent", Approx, 0.824, Derived).with_tolerance(0.05)),
        web("pinned_distance")
            .param("pattern", "1,3")
            .param("curvature_samples", 100)
            .param("seed", 1)
            .expect(e("max_margin_min", Gt, 0.0, Paper))
            .expect(e("curvature_nonzero_fraction", Ge, 0.9, Paper)),
    ]
}

pub fn builtin_scenario(name: &str) -> Result<Scenario, HarnessError> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| HarnessError::UnknownScenario(name.to_string()))
}
