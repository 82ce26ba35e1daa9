//! Link budget: Shannon rate and the resulting down-sampling ratio.

use crate::RadioParams;

/// Achievable rate in bits/s over the allocated band `η·W`.
///
/// The receiver filters to its allocation, so noise power is integrated
/// over `η·W` as well:
/// `noise_dBm = psd + 10·log10(η·W) + NF`, `SNR_dB = P_tx − PL − noise`,
/// `rate = η·W·log2(1 + SNR)`.
pub fn shannon_rate_bps(eta: f64, pathloss_db_total: f64, params: &RadioParams) -> f64 {
    debug_assert!(eta > 0.0 && eta <= 1.0, "eta must lie in (0,1]");
    let band_hz = eta * params.bandwidth_hz;
    let noise_dbm = params.noise_psd_dbm_hz + 10.0 * band_hz.log10() + params.noise_figure_db;
    let snr_db = params.tx_power_dbm - pathloss_db_total - noise_dbm;
    let snr = 10f64.powf(snr_db / 10.0);
    band_hz * (1.0 + snr).log2()
}

/// Fraction of the sensor frame that fits through the link in one slot:
/// `ρ = min(1, rate·Δt / frame_bits)`.
pub fn downsample_ratio(rate_bps: f64, delta_t_s: f64, frame_bits: f64) -> f64 {
    debug_assert!(delta_t_s > 0.0 && frame_bits > 0.0);
    (rate_bps * delta_t_s / frame_bits).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_band_rate_anchor() {
        // η = 1, PL = 86.1995 dB: noise ≈ −90.229 dBm, SNR ≈ 27.03 dB,
        // rate ≈ 2.695e8 b/s.
        let params = RadioParams::default();
        let rate = shannon_rate_bps(1.0, 86.1995066, &params);
        assert!(
            (rate - 2.695e8).abs() / 2.695e8 < 0.01,
            "rate {} not within 1% of 2.695e8",
            rate
        );
    }

    #[test]
    fn rate_vanishes_under_huge_pathloss() {
        let params = RadioParams::default();
        let rate = shannon_rate_bps(1.0, 400.0, &params);
        assert!(rate < 1.0, "rate {} should be ~0", rate);
    }

    #[test]
    fn halving_eta_keeps_more_than_half_the_rate() {
        // Noise power halves with the allocation, so rate(η/2) > rate(η)/2.
        let params = RadioParams::default();
        for pl in [70.0, 86.2, 100.0, 120.0] {
            let full = shannon_rate_bps(1.0, pl, &params);
            let half = shannon_rate_bps(0.5, pl, &params);
            assert!(half > full / 2.0, "PL {}: {} vs {}", pl, half, full / 2.0);
        }
    }

    #[test]
    fn rate_monotone_in_eta_and_pathloss() {
        let params = RadioParams::default();
        let mut prev = 0.0;
        for eta in [0.04, 0.2, 1.0] {
            let r = shannon_rate_bps(eta, 90.0, &params);
            assert!(r > prev);
            prev = r;
        }
        let mut prev = f64::INFINITY;
        for pl in [80.0, 90.0, 100.0, 110.0] {
            let r = shannon_rate_bps(1.0, pl, &params);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn downsample_anchor() {
        // 64-channel frame at Δt = 0.1 s is 3.327 Mb; half the bits in one
        // slot give ρ = 0.5.
        let frame_bits = 33.27e6 * 0.1;
        assert_eq!(frame_bits, 3.327e6);
        let rho = downsample_ratio(1.6635e6 / 0.1, 0.1, frame_bits);
        assert!((rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn downsample_clamps_and_vanishes() {
        assert_eq!(downsample_ratio(1e9, 0.1, 3.327e6), 1.0);
        assert_eq!(downsample_ratio(0.0, 0.1, 3.327e6), 0.0);
    }

    #[test]
    fn downsample_monotonicity() {
        let base = downsample_ratio(1e7, 0.1, 3.327e6);
        assert!(downsample_ratio(2e7, 0.1, 3.327e6) >= base);
        assert!(downsample_ratio(1e7, 0.1, 6.654e6) <= base);
    }
}
