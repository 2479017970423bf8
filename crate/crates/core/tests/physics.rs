//! Cross-method validation of the closed-form spectrum on molecular and
//! natural-units parameter sets: the finite-difference and Numerov solvers
//! must agree with each other and with the closed form after Richardson
//! extrapolation, on every state with n <= 5, l <= 5.

use pseudoharmonic::model::{MolecularParams, PseudoharmonicModel, QuantumNumbers};
use pseudoharmonic::molecules::default_registry;
use pseudoharmonic::oracle::cross_validate;
use pseudoharmonic::units::PhysicalConstants;

const LADDER_BASE_POINTS: usize = 4000;

fn assert_routes_agree(
    constants: &PhysicalConstants,
    params: &MolecularParams,
    label: &str,
) {
    let model = PseudoharmonicModel::with_constants(params.clone(), constants.clone());
    for l in 0..=5u32 {
        let checks = cross_validate(constants, params, l, 5, LADDER_BASE_POINTS)
            .unwrap_or_else(|e| panic!("{label} l={l}: {e}"));
        for c in &checks {
            let gap = (c.fd.extrapolated - c.numerov.extrapolated).abs();
            assert!(
                gap <= 1e-9,
                "{label} (n={}, l={}): fd {:.12} vs numerov {:.12}, gap {gap:.3e}",
                c.n,
                c.l,
                c.fd.extrapolated,
                c.numerov.extrapolated
            );
            let closed = model.energy(QuantumNumbers::new(c.n, c.l));
            let dev = (closed - c.fd.extrapolated).abs();
            assert!(
                dev <= 1e-8,
                "{label} (n={}, l={}): closed {closed:.12} vs fd {:.12}, dev {dev:.3e}",
                c.n,
                c.l,
                c.fd.extrapolated
            );
        }
    }
}

#[test]
fn routes_agree_on_molecular_states() {
    let constants = PhysicalConstants::codata2018();
    for record in default_registry() {
        assert_routes_agree(&constants, &record.params, &record.name);
    }
}

#[test]
fn routes_agree_on_natural_units() {
    let constants = PhysicalConstants::natural();
    let params = MolecularParams::new(0.5, 1.0, 1.0).unwrap();
    assert_routes_agree(&constants, &params, "natural");
}
