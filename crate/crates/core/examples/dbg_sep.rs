// scratch diagnostic
use ringbragg::fit::models as m;
use ringbragg::fit::solver::*;
use ringbragg::geometry::*;
use ringbragg::series::*;

fn main() {
    let probe = ProbeGeometry::new(852.347, -5.07).unwrap();
    let array = AtomArray::new(2, 14_000.0).unwrap();
    let scan = bragg_scan(&array, &probe, 13_500.0, 16_000.0, 80).unwrap();
    let p_cw = interference_period(&probe, CavityMode::Cw);
    let p_ccw = interference_period(&probe, CavityMode::Ccw);
    println!("true periods: {p_cw} {p_ccw}");
    let cw = SpectrumSeries::new(scan.spacing.clone(), scan.rate_cw, Channel::Cw).unwrap();
    let ccw = SpectrumSeries::new(scan.spacing, scan.rate_ccw, Channel::Ccw).unwrap();
    let fitres = m::fit_separation(&cw, &ccw, 2, 852.347);
    match fitres {
        Ok(f) => println!("fit: pcw={} pccw={} rss={:.3e} conv={} start={} c={} {} {} {}",
            f.period_cw.value, f.period_ccw.value, f.fit.rss, f.fit.converged, f.fit.start_index,
            f.c0_cw.value, f.c1_cw.value, f.c0_ccw.value, f.c1_ccw.value),
        Err(e) => println!("err: {e}"),
    }
}
