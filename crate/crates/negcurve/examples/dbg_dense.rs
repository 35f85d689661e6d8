use std::time::Instant;
use negcurve::bundle::{canonical_window, BundleSpec};
use negcurve::surface::LaurentPoly2;
use negcurve::width::{width_computation, SheafModel};
use negcurve::linalg::rat;

fn main() {
    for (k, j) in [(1i64, 3i64), (1, 4)] {
        let mut p = LaurentPoly2::zero();
        for m in canonical_window(k, j) {
            p.add_term(rat(1, 1), m.s, m.r);
        }
        println!("k={k} j={j} dense p = {p}");
        let b = BundleSpec::new(k, j, p).unwrap();
        let model = SheafModel::extension(&b);
        let d0 = model.default_truncation();
        for t in [d0, d0 + 1] {
            let now = Instant::now();
            let w = width_computation(&model, t).unwrap();
            println!("  D={t}: w={} in {:?} (M={}, MVV={}, gens={:?}, duals={:?})",
                w.width, now.elapsed(), w.module_dim, w.double_dual_dim,
                w.generator_degrees, w.dual_generator_degrees);
        }
    }
}
