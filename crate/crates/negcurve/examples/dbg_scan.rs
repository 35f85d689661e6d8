use std::time::Instant;
use negcurve::invariants::scan_strata;
use negcurve::linalg::rat;

fn main() {
    let z01 = vec![rat(0, 1), rat(1, 1)];
    let zpm = vec![rat(0, 1), rat(1, 1), rat(-1, 1)];

    let t = Instant::now();
    let table = scan_strata(1, 3, &z01, 10, 2_000).unwrap();
    println!("k=1 j=3 {{0,1}} full: {} pts in {:?}; strata {:?}",
        table.points.len(), t.elapsed(),
        table.strata.keys().collect::<Vec<_>>());

    let t = Instant::now();
    let table = scan_strata(3, 6, &zpm, 2, 2_000).unwrap();
    println!("k=3 j=6 {{0,1,-1}} pairs: {} pts in {:?}; chis: {:?}",
        table.points.len(), t.elapsed(),
        table.strata.iter().map(|((h,w),_)| h+w).collect::<std::collections::BTreeSet<_>>());

    let t = Instant::now();
    let table = scan_strata(1, 5, &zpm, 2, 6_000).unwrap();
    println!("k=1 j=5 {{0,1,-1}} pairs: {} pts in {:?}", table.points.len(), t.elapsed());
}
