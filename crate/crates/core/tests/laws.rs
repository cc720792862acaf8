mod common;

use chancalc::channel::Channel;
use chancalc::disint::{dagger_channel, dagger_state};
use chancalc::kernel::Scalar;
use chancalc::laws;
use common::{arb_channel, arb_sizes, spaces, Kind};
use proptest::prelude::*;

fn chan(ins: usize, outs: usize, kind: Kind) -> BoxedStrategy<Channel> {
    (arb_sizes(0, ins), arb_sizes(1, outs))
        .prop_flat_map(move |(i, o)| arb_channel(spaces(&i), spaces(&o), kind))
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nrm_rows_are_total_or_zero(f in chan(2, 2, Kind::Sub)) {
        for m in f.nrm().row_masses() {
            prop_assert!(m.is_zero() || m.is_one());
        }
    }

    #[test]
    fn dom_of_total_is_truth(f in chan(2, 2, Kind::Total)) {
        prop_assert!(f.dom().data().iter().all(Scalar::is_one));
        prop_assert_eq!(f.nrm(), f);
    }

    #[test]
    fn composition_is_associative(
        (f, g, h) in (arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1)).prop_flat_map(|(a, b, c, d)| (
            arb_channel(spaces(&a), spaces(&b), Kind::Sub),
            arb_channel(spaces(&b), spaces(&c), Kind::Sub),
            arb_channel(spaces(&c), spaces(&d), Kind::Sub),
        ))
    ) {
        prop_assert_eq!(f.then(&g).unwrap().then(&h).unwrap(), f.then(&g.then(&h).unwrap()).unwrap());
    }

    #[test]
    fn tensor_interchange(
        (f, g, h, k) in (arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1))
            .prop_flat_map(|(a, b, c, x, y, z)| (
                arb_channel(spaces(&a), spaces(&b), Kind::Sub),
                arb_channel(spaces(&b), spaces(&c), Kind::Sub),
                arb_channel(spaces(&x), spaces(&y), Kind::Sub),
                arb_channel(spaces(&y), spaces(&z), Kind::Sub),
            ))
    ) {
        let lhs = f.tensor(&h).then(&g.tensor(&k)).unwrap();
        let rhs = f.then(&g).unwrap().tensor(&h.then(&k).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nested_boxes_collapse(
        (m, rho) in (arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1)).prop_flat_map(|(x, r, y)| {
            let ins: Vec<usize> = x.iter().chain(&r).copied().collect();
            (arb_channel(spaces(&ins), spaces(&y), Kind::Sub), arb_channel(vec![], spaces(&r), Kind::Sub))
        })
    ) {
        let (l, r) = laws::nested_box(&m, &rho).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn dagger_of_dagger_at_pushforward(
        (f, w) in (arb_sizes(1, 1), arb_sizes(1, 1)).prop_flat_map(|(y, z)| (
            arb_channel(spaces(&y), spaces(&z), Kind::FullTotal),
            arb_channel(vec![], spaces(&y), Kind::FullTotal),
        ))
    ) {
        // With full support everywhere, inverting twice gives back f.
        let d = dagger_state(&f, &w).unwrap();
        let back = dagger_state(&d, &w.then(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn channel_dagger_rejects_partial_prior(
        (f, c) in (arb_sizes(1, 1), arb_sizes(1, 1), arb_sizes(1, 1)).prop_flat_map(|(x, y, z)| (
            arb_channel(spaces(&y), spaces(&z), Kind::Sub),
            arb_channel(spaces(&x), spaces(&y), Kind::Total),
        ))
    ) {
        let half = c.scale(&Scalar::new(1, 2)).unwrap();
        prop_assert!(dagger_channel(&f, &half).is_err());
        prop_assert!(dagger_channel(&f, &c).is_ok());
    }
}

#[test]
fn box_removal_fails_without_full_support() {
    let x = common::space(3);
    let w = Channel::joint_state(vec![x], vec![Scalar::new(1, 2), Scalar::zero(), Scalar::new(1, 2)]).unwrap();
    let (l, r) = laws::box_removal_state(&w).unwrap();
    assert_ne!(l, r);
}

#[test]
fn pullout_needs_total_channel() {
    let x = common::space(2);
    let h = Channel::identity(&[x.clone()]).scale(&Scalar::new(1, 2)).unwrap();
    let f = Channel::identity(&[x]);
    assert!(laws::nrm_channel_pullout(&f, &h).is_err());
}
