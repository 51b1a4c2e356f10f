use logdmod::cli::*;
use logdmod::ncgb::GbConfig;

fn main() {
    let cfg = GbConfig::default();
    let t0 = std::time::Instant::now();
    let r = suite_bernstein(17, 500, &cfg).unwrap();
    println!("{} in {:?}", r.line(), t0.elapsed());
    let t0 = std::time::Instant::now();
    let r = suite_restriction(18, 100, &cfg).unwrap();
    println!("{} in {:?}", r.line(), t0.elapsed());
    let t0 = std::time::Instant::now();
    let r = suite_duality_dim(19, 100, &cfg).unwrap();
    println!("{} in {:?}", r.line(), t0.elapsed());
    let t0 = std::time::Instant::now();
    let r = suite_additivity(20, 100, &cfg).unwrap();
    println!("{} in {:?}", r.line(), t0.elapsed());
}
