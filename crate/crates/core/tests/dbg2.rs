use wadaflow_core::wada::{schedule_trace, ConstructionPlan};

#[test]
fn dbg_evolution() {
    let plan = ConstructionPlan::standard(2, 4).unwrap();
    let trace = schedule_trace(&plan).unwrap();
    for (k, m) in trace.iter().enumerate() {
        let worst: Vec<u32> = (1..=3u8).map(|l| m.max_land_distance(l)).collect();
        println!("day {:2}: water {:4} worst {:?}", k + 1, m.water_count(), worst);
    }
}
