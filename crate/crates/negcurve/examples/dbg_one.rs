use std::time::Instant;
use negcurve::bundle::BundleSpec;
use negcurve::width::{width_computation, SheafModel};

fn main() {
    let p = "u + z*u + z^2*u^2 + z*u^3 + z^2*u^3";
    let b = BundleSpec::new(1, 3, p.parse().unwrap()).unwrap();
    let model = SheafModel::extension(&b);
    let d0 = model.default_truncation();
    for t in d0..=(d0 + 2) {
        let now = Instant::now();
        let w = width_computation(&model, t).unwrap();
        println!("D={t}: w={} in {:?} (M={}, MVV={}, gens={:?}, duals={:?})",
            w.width, now.elapsed(), w.module_dim, w.double_dual_dim,
            w.generator_degrees, w.dual_generator_degrees);
    }
}
