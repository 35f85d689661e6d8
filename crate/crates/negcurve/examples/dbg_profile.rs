use std::time::Instant;
use negcurve::bundle::BundleSpec;
use negcurve::width::{width_computation, SheafModel};
use negcurve::height::height;

fn main() {
    for (k, j, p) in [(1i64, 3i64, "u + z*u^2"), (1, 5, "z*u + z^2*u^3"), (3, 6, "z^-1*u + z^4*u^2")] {
        let b = BundleSpec::new(k, j, p.parse().unwrap()).unwrap();
        let model = SheafModel::extension(&b);
        let d0 = model.default_truncation();
        let t = Instant::now();
        let w = width_computation(&model, d0).unwrap();
        let tw = t.elapsed();
        let t = Instant::now();
        let w1 = width_computation(&model, d0 + 1).unwrap();
        let tw1 = t.elapsed();
        let t = Instant::now();
        let h = height(&b).unwrap();
        let th = t.elapsed();
        println!("k={k} j={j} p={p}: D0={d0} w={}/{} ({tw:?} + {tw1:?}), h={h} ({th:?}) dims M={} MVV={}",
            w.width, w1.width, w.module_dim, w.double_dual_dim);
    }
}
