//! Shared fixtures for the criterion benches.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use raa_core::channel::{effective_channel, generate_multi_user};
use raa_core::{AntennaPattern, ArrayModel, Complex64, LinkBudget, RaaGeometry, ScenarioConfig};

/// The 16-element, 25-ray array with directional elements.
pub fn default_array() -> (RaaGeometry, AntennaPattern) {
    let geom = RaaGeometry::with_defaults(16, 0.5 * PI).expect("default geometry is valid");
    (geom, AntennaPattern::raa_directional())
}

/// Effective channels of the five-user scenario on the default array.
pub fn multi_user_channels(seed: u64) -> (Vec<Vec<Complex64>>, LinkBudget) {
    let (geom, pattern) = default_array();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = generate_multi_user(&ScenarioConfig::multi_user(), &mut rng)
        .expect("default scenario is valid");
    let channels = users
        .iter()
        .map(|u| effective_channel(ArrayModel::Raa(&geom), &pattern, u))
        .collect();
    let budget = LinkBudget::from_db(10.0, geom.elements_per_ray()).expect("finite SNR");
    (channels, budget)
}
