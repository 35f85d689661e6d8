use std::time::Instant;
use negcurve::bundle::BundleSpec;
use negcurve::invariants::enumerate_grid;
use negcurve::invariants::invariants;
use negcurve::linalg::rat;

fn main() {
    let coeffs = vec![rat(0, 1), rat(1, 1)];
    let grid = enumerate_grid(1, 3, &coeffs, 10);
    println!("{} points", grid.len());
    let mut times: Vec<(u128, String)> = Vec::new();
    let start = Instant::now();
    for p in grid {
        let text = p.to_string();
        let b = BundleSpec::new(1, 3, p).unwrap();
        let t = Instant::now();
        let _ = invariants(&b).unwrap();
        times.push((t.elapsed().as_millis(), text));
    }
    println!("total {:?}", start.elapsed());
    times.sort();
    times.reverse();
    for (ms, p) in times.iter().take(8) {
        println!("  {ms} ms  {p}");
    }
    let sum: u128 = times.iter().map(|(m, _)| m).sum();
    println!("sum of per-point: {sum} ms");
}
