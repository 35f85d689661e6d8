use negcurve::bundle::BundleSpec;
use negcurve::width::{width_computation, SheafModel};

fn main() {
    for (k, d) in [(2i64, 3i64), (1, 3), (3, 4), (2, -3)] {
        let model = SheafModel::line_bundle(k, d).unwrap();
        let d0 = model.default_truncation();
        for t in d0..=(d0 + 3) {
            match width_computation(&model, t) {
                Ok(w) => println!(
                    "O({d}) Z_{k} D={t}: width={} dimM={} dimMVV={} gens={:?} duals={:?}",
                    w.width, w.module_dim, w.double_dual_dim, w.generator_degrees, w.dual_generator_degrees
                ),
                Err(e) => println!("O({d}) Z_{k} D={t}: ERR {e}"),
            }
        }
    }
    for (k, j, p) in [(2i64, 3i64, "u"), (2, 3, "z*u")] {
        let b = BundleSpec::new(k, j, p.parse().unwrap()).unwrap();
        let model = SheafModel::extension(&b);
        let d0 = model.default_truncation();
        for t in d0..=(d0 + 2) {
            match width_computation(&model, t) {
                Ok(w) => println!(
                    "E({k},{j},{p}) D={t}: width={} dimM={} dimMVV={} gens={:?} duals={:?}",
                    w.width, w.module_dim, w.double_dual_dim, w.generator_degrees, w.dual_generator_degrees
                ),
                Err(e) => println!("E({k},{j},{p}) D={t}: ERR {e}"),
            }
        }
    }
}
