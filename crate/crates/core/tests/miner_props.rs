use num_bigint::BigInt;
use num_rational::BigRational;
use thetarel::miner::{mine, mine_series, BivarIntPoly, UBinding, VBinding};
use thetarel::series::Rat;
use thetarel::ThetaSpec;

fn u(a: i64, p: i64, power: u32) -> UBinding {
    UBinding::new(ThetaSpec::from_ints(a, p).unwrap(), power)
}

fn mined(b: UBinding, v: VBinding, s_max: u32, order: i64) -> BivarIntPoly {
    let o = Rat::from_integer(order);
    mine_series(&b.series(o).unwrap(), &v.series(o).unwrap(), s_max).unwrap().poly
}

#[test]
fn stable_when_the_order_grows() {
    for (b, v, s, m) in [
        (u(1, 4, 12), VBinding::M, 3, 120),
        (u(-2, 8, 12), VBinding::MQ2Squared, 5, 110),
        (u(-1, 6, 6), VBinding::SqrtM, 4, 100),
    ] {
        assert_eq!(mined(b, v, s, m), mined(b, v, s, m + 40), "{b} vs {v}");
    }
}

#[test]
fn table4_relation_is_rediscovered_exactly() {
    let rel = mine(u(-2, 8, 12), VBinding::MQ2Squared, 5, Rat::from_integer(150), &[Rat::from_integer(1)], 40).unwrap();
    let expected = BivarIntPoly::from_i64(&[(4, 1, -1), (2, 1, -64), (0, 2, 256), (0, 1, -512), (0, 0, 256)]).unwrap();
    assert_eq!(rel.poly, expected);
    assert_eq!(rel.degree, 4);
}

#[test]
fn scaling_u_rescales_the_relation() {
    let b = u(1, 4, 12);
    let order = Rat::from_integer(100);
    let us = b.series(order).unwrap();
    let vs = VBinding::M.series(order).unwrap();
    let base = mine_series(&us, &vs, 3).unwrap().poly;
    let two = BigRational::from_integer(BigInt::from(2));
    let scaled = mine_series(&us.scale(&two), &vs, 3).unwrap().poly;
    let half = BigRational::new(1.into(), 2.into());
    assert_eq!(scaled, base.substitute_scaled_u(&half).unwrap());
}

#[test]
fn no_relation_reports_rank_profile() {
    let b = UBinding::new(ThetaSpec::from_ints(1, 5).unwrap(), 15).with_nome(2);
    let err = mine(b, VBinding::Eta5Q4Pow5, 3, Rat::from_integer(120), &[], 30).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("no relation up to s = 3"), "{msg}");
    assert!(msg.contains("rank"), "{msg}");
}

#[test]
fn short_series_is_an_insufficient_order_error() {
    let order = Rat::from_integer(12);
    let err = mine_series(&u(1, 3, 12).series(order).unwrap(), &VBinding::M.series(order).unwrap(), 6).unwrap_err();
    assert!(matches!(err, thetarel::Error::InsufficientOrder { .. }), "{err}");
}

#[test]
fn relation_json_round_trip() {
    let rel = mine(u(1, 4, 12), VBinding::M, 3, Rat::from_integer(80), &[Rat::from_integer(2)], 30).unwrap();
    let back = thetarel::miner::MinedRelation::from_json_value(rel.to_json_value()).unwrap();
    assert_eq!(back.poly, rel.poly);
    assert_eq!(back.u, rel.u);
    assert_eq!(back.v, rel.v);
    assert_eq!(back.validated_grid_order, rel.validated_grid_order);
}
