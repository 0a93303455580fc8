use std::sync::Arc;
use medopt::encode::*;
use medopt::solve::certify;

fn main() {
    let mut spec = AuctionSpec::uniform_grid(2, 5, 1.0, 2);
    if std::env::var("PER_ROUND").is_ok() { spec.upfront_valuations = false; }
    if std::env::var("PUBLIC").is_ok() { spec.public_bids = true; }
    if std::env::var("SEES").is_ok() { spec.deviator_sees_bids = true; }
    let m = Arc::new(encode_sequential_auction(spec).unwrap());
    for (name, kind) in [
        ("SP", MechanismKind::SecondPrice),
        ("FP", MechanismKind::FirstPrice),
        ("R1/4", MechanismKind::SecondPriceReserve(0.25)),
        ("R1/2", MechanismKind::SecondPriceReserve(0.5)),
        ("R3/4", MechanismKind::SecondPriceReserve(0.75)),
    ] {
        let mu = fixed_mechanism(kind, &m).unwrap();
        let cert = certify(&m, &mu).unwrap();
        let expl: f64 = cert.per_player_gains.iter().sum();
        println!("{name}: revenue {:.6} exploitability {:.6} gains {:?}", cert.objective, expl, cert.per_player_gains);
    }
}
