use ringbragg::fit::models::*;
use ringbragg::geometry::*;
use ringbragg::series::*;

fn main() {
    let probe = ProbeGeometry::new(852.347, 0.0).unwrap();
    let array = AtomArray::new(2, 14_000.0).unwrap();
    let scan = bragg_scan(&array, &probe, 13_500.0, 16_000.0, 80).unwrap();
    let cw = SpectrumSeries::new(scan.spacing.clone(), scan.rate_cw.clone(), Channel::Cw).unwrap();
    let ccw = SpectrumSeries::new(scan.spacing, scan.rate_ccw, Channel::Ccw).unwrap();
    match fit_separation(&cw, &ccw, 2, 852.347) {
        Ok(f) => println!(
            "pcw={} pccw={} phi={} rss={:.6e} start={}",
            f.period_cw.value, f.period_ccw.value, f.phi_deg.value, f.fit.rss, f.fit.start_index
        ),
        Err(e) => println!("ERR: {e}"),
    }
}
