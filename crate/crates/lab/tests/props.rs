use kinklab::config::{parse_str, resolved_text};
use kinklab::heatmap::{encode_pgm, FieldSel};
use kinklab::snapshot::{read_snapshot, write_snapshot};
use kinklab_core::field::{Boundary, FieldState, Grid};
use proptest::prelude::*;

fn state(cells: Vec<usize>, k: usize, values: &[f64], time: f64) -> FieldState<f64> {
    let dim = cells.len();
    let g = Grid::new(&cells, &vec![-0.25; dim], 0.05, Boundary::Periodic).unwrap();
    let mut s = FieldState::vacuum(g, k, 0.07).unwrap();
    let n = s.grid.len();
    for c in 0..k {
        for i in 0..n {
            s.u[c][i] = values[(c * n + i) % values.len()];
            s.ut[c][i] = -values[(c * n + 3 * i + 1) % values.len()];
        }
    }
    s.time = time;
    s
}

proptest! {
    #[test]
    fn snapshots_round_trip_bit_exact(
        cells in prop::collection::vec(8usize..14, 1..=3),
        k in 1usize..=2,
        values in prop::collection::vec(-1e3f64..1e3, 1..64),
        time in 0.0f64..10.0,
    ) {
        let s = state(cells, k, &values, time);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &s).unwrap();
        let back = read_snapshot(&mut buf.as_slice(), Boundary::Periodic).unwrap();
        let bits = |v: &Vec<Vec<f64>>| v.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back.u), bits(&s.u));
        prop_assert_eq!(bits(&back.ut), bits(&s.ut));
        prop_assert_eq!(back.time.to_bits(), s.time.to_bits());
        prop_assert_eq!(back.grid.cells(), s.grid.cells());
    }

    #[test]
    fn pgm_spans_the_full_range(
        w in 8usize..20,
        h in 8usize..20,
        values in prop::collection::vec(-5.0f64..5.0, 2..40),
    ) {
        let s = state(vec![w, h], 1, &values, 0.0);
        let (bytes, lo, hi) = encode_pgm(&s, FieldSel::U0).unwrap();
        let header = format!("P5\n{w} {h}\n65535\n");
        prop_assert_eq!(&bytes[..header.len()], header.as_bytes());
        prop_assert_eq!(bytes.len(), header.len() + 2 * w * h);
        let samples: Vec<u16> = bytes[header.len()..].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
        if hi > lo {
            prop_assert_eq!(samples.iter().copied().max(), Some(65535));
            prop_assert_eq!(samples.iter().copied().min(), Some(0));
        } else {
            prop_assert!(samples.iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn resolved_config_round_trips(
        eps in 0.02f64..0.2,
        cells in 32usize..400,
        cfl in 0.1f64..1.0,
        speed in -0.9f64..0.9,
    ) {
        let h = eps / 8.0;
        let text = format!(
            "name = p\nmodel.epsilon = {eps}\ngrid.dim = 1\ngrid.cells = {cells}\ngrid.spacing = {h}\n\
             grid.boundary = neumann\nsolver.cfl_fraction = {cfl}\nsolver.t_end = 0\n\
             initial.kind = kink\ninitial.speed = {speed}\n"
        );
        let s = parse_str(&text).unwrap();
        let again = parse_str(&resolved_text(&s)).unwrap();
        prop_assert_eq!(s, again);
    }
}
