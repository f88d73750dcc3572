use std::time::Instant;
use wadaflow_core::wada::{schedule_trace, wada_certificate, ConstructionPlan};

#[test]
fn dbg_days() {
    let t0 = Instant::now();
    let plan = ConstructionPlan::standard(2, 4).unwrap();
    let trace = schedule_trace(&plan).unwrap();
    let mut prev = 0;
    for (k, m) in trace.iter().enumerate() {
        let w = m.water_count();
        println!("day {}: water {} (+{})", k + 1, w, w - prev);
        prev = w;
    }
    let m = trace.last().unwrap();
    let cert = wada_certificate(m);
    println!("{:?} elapsed {:?}", cert, t0.elapsed());
    assert!(m.land_connected());
}
