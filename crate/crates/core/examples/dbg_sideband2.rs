use ringbragg::cavity::CavityParams;
use ringbragg::series::linspace;
use ringbragg::sidebands::*;

fn spec(cav: &CavityParams, grid: &[f64], wa: f64, wr: f64, na: f64, nr: f64, amp: f64) -> Vec<f64> {
    let tau = 2.0 * std::f64::consts::PI;
    let axial = ThermalMode::new(wa, na, (tau * 2.07e3 / wa).sqrt(), MotionLabel::Axial).unwrap();
    let radial = ThermalMode::new(wr, nr, (tau * 2.07e3 / wr).sqrt(), MotionLabel::Radial).unwrap();
    cavity_spectrum(&[axial, radial], cav, amp, 0.0, grid, &SpectrumTruncation::default())
        .unwrap()
        .rate
}

fn main() {
    let tau = 2.0 * std::f64::consts::PI;
    let cav = CavityParams::new(tau * 36.7e3, 21.0, tau * 5.22e6, tau * 8.417e6).unwrap();
    let grid = linspace(-tau * 250.0e3, tau * 250.0e3, 351);
    let truth = spec(&cav, &grid, tau * 20e3, tau * 89e3, 3.4, 0.17, 1.0);
    let fitted = spec(&cav, &grid, tau * 20e3, tau * 89e3, 0.5411268065117047, 0.027056340324819645, 0.15915494309186867);
    let rss: f64 = truth.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    println!("rss between truth and fitted params: {rss:.6e}");
    println!("truth[0..4]  = {:?}", &truth[0..4]);
    println!("fitted[0..4] = {:?}", &fitted[0..4]);
    let mid = 175;
    println!("truth[mid]  = {}  fitted[mid] = {}", truth[mid], fitted[mid]);
}
