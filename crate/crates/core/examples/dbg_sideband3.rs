use ringbragg::cavity::CavityParams;
use ringbragg::series::linspace;
use ringbragg::sidebands::*;

fn main() {
    let tau = 2.0 * std::f64::consts::PI;
    let cav = CavityParams::new(tau * 36.7e3, 21.0, tau * 5.22e6, tau * 8.417e6).unwrap();
    let grid = linspace(-tau * 250.0e3, tau * 250.0e3, 351);
    let wa = tau * 20e3;
    let wr = tau * 89e3;
    let axial = ThermalMode::new(wa, 3.4, (tau * 2.07e3 / wa).sqrt(), MotionLabel::Axial).unwrap();
    let radial = ThermalMode::new(wr, 0.17, (tau * 2.07e3 / wr).sqrt(), MotionLabel::Radial).unwrap();
    let spec = cavity_spectrum(&[axial, radial], &cav, 1.0, 0.0, &grid, &SpectrumTruncation::default()).unwrap();
    println!("data[0] = {}   data[175] = {}", spec.rate[0], spec.rate[175]);
    println!("eta_ax = {}  eta_rad = {}", axial.lamb_dicke(), radial.lamb_dicke());
    println!("P_ax(0) = {}", sideband_fraction(&axial, 0));
    println!("P_ax(-1) = {}", sideband_fraction(&axial, -1));
    println!("P_rad(0) = {}", sideband_fraction(&radial, 0));
    // second eval with identical args
    let spec2 = cavity_spectrum(&[axial, radial], &cav, 1.0, 0.0, &grid, &SpectrumTruncation::default()).unwrap();
    println!("repeatable: {}", spec.rate == spec2.rate);
}
