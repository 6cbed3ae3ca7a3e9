use dirty_region::mc_oracle::SampleConfig;
use dirty_region::verification::verify_all;

fn main() {
    let t = std::time::Instant::now();
    let v = verify_all(SampleConfig::default()).expect("verification");
    for f in &v.formulas {
        println!("{:<32} cases {:>4} max error {:.3e} {}", f.name, f.cases, f.max_error, f.passed);
    }
    for m in &v.monte_carlo {
        println!("{:<10} {:<20} exact {:.5} estimate {:.5} error {:.2e} {}", m.model, m.term, m.exact, m.estimate, m.error, m.passed);
    }
    println!("passed {} in {:.2?}", v.passed, t.elapsed());
}
