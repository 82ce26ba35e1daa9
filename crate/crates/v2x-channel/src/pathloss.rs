//! Urban sidelink pathloss with shadowing and vehicle blockage loss.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{ChannelError, LinkClass, LinkGeometry, RadioParams};

/// Median pathloss in dB, without shadowing or blockage terms.
///
/// LOS and NLOSv: `38.77 + 16.7·log10(d) + 18.2·log10(fc)`;
/// NLOS: `36.85 + 30·log10(d) + 18.9·log10(fc)`; `d` in meters, `fc` in GHz.
pub fn pathloss_db(class: LinkClass, distance_m: f64, fc_ghz: f64) -> Result<f64, ChannelError> {
    if distance_m <= 0.0 {
        return Err(ChannelError::NonPositiveDistance(distance_m));
    }
    let d = distance_m.log10();
    let f = fc_ghz.log10();
    Ok(match class {
        LinkClass::Los | LinkClass::NLosV => 38.77 + 16.7 * d + 18.2 * f,
        LinkClass::NLos => 36.85 + 30.0 * d + 18.9 * f,
    })
}

/// One shadowing draw, Normal(0, σ²) dB with the class-dependent σ.
pub fn sample_shadowing_db<R: Rng>(class: LinkClass, params: &RadioParams, rng: &mut R) -> f64 {
    let normal = Normal::new(0.0, params.shadow_std_db(class)).expect("valid std");
    normal.sample(rng)
}

/// Total blockage loss of `blockers` vehicles, each max{0, Normal(μ, σ²)} dB.
pub fn sample_blockage_loss_db<R: Rng>(blockers: usize, params: &RadioParams, rng: &mut R) -> f64 {
    let normal = Normal::new(params.blockage_mean_db, params.blockage_std_db).expect("valid std");
    (0..blockers).map(|_| normal.sample(rng).max(0.0)).sum()
}

/// Full pathloss draw: median + shadowing, plus per-blocker losses on NLOSv.
pub fn sample_pathloss_db<R: Rng>(
    geometry: &LinkGeometry,
    params: &RadioParams,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    let class = crate::classify_link(geometry);
    let mut pl = pathloss_db(class, geometry.distance_m, geometry.fc_ghz)?;
    pl += sample_shadowing_db(class, params, rng);
    if class == LinkClass::NLosV {
        pl += sample_blockage_loss_db(geometry.blockers, params, rng);
    }
    Ok(pl)
}
