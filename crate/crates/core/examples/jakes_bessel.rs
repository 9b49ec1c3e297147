//! The Bessel J0 kernel behind the residual Doppler, and the correction window built from it.

use otfs_trmrc::bessel::bessel_j0;
use otfs_trmrc::metrics::jakes_expectation_check;
use otfs_trmrc::receiver::make_rdc_window;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> otfs_trmrc::Result<()> {
    for x in [0.0, 0.5, 1.0, 2.404825557695773, 5.0, 20.0] {
        println!("J0({x:>8.4}) = {:+.10}", bessel_j0(x));
    }

    let offsets = [0.25, 0.5, 1.0, 2.0];
    let check = jakes_expectation_check(1.0, &offsets, 1_000_000, &mut ChaCha8Rng::seed_from_u64(3))?;
    for ((d, dev), im) in offsets.iter().zip(&check.deviations).zip(&check.imaginary) {
        println!("E[exp(j cos(theta) {d})] vs J0: |diff| {dev:.1e}, Im {im:+.1e}");
    }

    // M = 128, D = 64, v_max = 10.9 kHz at two sampling rates.
    for ts in [1.0 / 4.95e6, 1.0 / (128.0 * 15e3)] {
        let w = make_rdc_window(128, 64, 10_900.0, ts, 0.1)?;
        println!(
            "T_s {:>6.1} ns: beta {:.4}, edge weight {:.3}, clipped rows {}",
            ts * 1e9,
            w.beta,
            w.coeffs[0],
            w.clipped_count()
        );
    }
    Ok(())
}
