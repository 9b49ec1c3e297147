use num_complex::Complex64;
use otfs_trmrc::grid::{otfs_demodulate, otfs_modulate, DelayDopplerGrid};
use otfs_trmrc::qam::{qam_demap, qam_map, Constellation};
use proptest::prelude::*;

fn grid_strategy(m: usize, n: usize) -> impl Strategy<Value = DelayDopplerGrid> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), m * n).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        DelayDopplerGrid::from_vec(m, n, data).unwrap()
    })
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..9, 1usize..9)
}

proptest! {
    #[test]
    fn modulation_is_linear(
        (x1, x2) in dims().prop_flat_map(|(m, n)| (grid_strategy(m, n), grid_strategy(m, n))),
        a in (-3.0f64..3.0, -3.0f64..3.0),
        b in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let (m, n) = (x1.delay_bins(), x1.doppler_bins());
        let mix: Vec<_> = x1.as_slice().iter().zip(x2.as_slice()).map(|(u, v)| a * u + b * v).collect();
        let lhs = otfs_modulate(&DelayDopplerGrid::from_vec(m, n, mix).unwrap()).samples;
        let s1 = otfs_modulate(&x1).samples;
        let s2 = otfs_modulate(&x2).samples;
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (a * s1[i] + b * s2[i])).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_energy(x in dims().prop_flat_map(|(m, n)| grid_strategy(m, n))) {
        let frame = otfs_modulate(&x);
        prop_assert_eq!(frame.len(), x.delay_bins() * x.doppler_bins());
        if x.energy() > 0.0 {
            prop_assert!((frame.energy() - x.energy()).abs() / x.energy() < 1e-10);
        }
        let y = otfs_demodulate(&frame, x.delay_bins(), x.doppler_bins()).unwrap();
        for (u, v) in x.as_slice().iter().zip(y.as_slice()) {
            prop_assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn qam_round_trip(order in prop::sample::select(vec![4usize, 16, 64]), seed in any::<u64>()) {
        let c = Constellation::new(order).unwrap();
        let k = c.bits_per_symbol();
        let bits: Vec<u8> = (0..k * 37).map(|i| ((seed >> (i % 64)) & 1) as u8 ^ (i % 3 == 0) as u8).collect();
        let syms = qam_map(&bits, &c).unwrap();
        prop_assert_eq!(qam_demap(&syms, &c), bits);
    }
}
