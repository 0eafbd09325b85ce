use ringbragg::cavity::CavityParams;
use ringbragg::fit::models::*;
use ringbragg::series::linspace;
use ringbragg::sidebands::*;

fn main() {
    let tau = 2.0 * std::f64::consts::PI;
    let cav = CavityParams::new(tau * 36.7e3, 21.0, tau * 5.22e6, tau * 8.417e6).unwrap();
    let truth = SidebandInit {
        cavity_center: 0.0,
        omega_axial: tau * 20.0e3,
        omega_radial: tau * 89.0e3,
        n_axial: 3.4,
        n_radial: 0.17,
        amplitude: 1.0,
    };
    let grid = linspace(-tau * 250.0e3, tau * 250.0e3, 351);
    let axial = ThermalMode::new(truth.omega_axial, truth.n_axial,
        (tau * 2.07e3 / truth.omega_axial).sqrt(), MotionLabel::Axial).unwrap();
    let radial = ThermalMode::new(truth.omega_radial, truth.n_radial,
        (tau * 2.07e3 / truth.omega_radial).sqrt(), MotionLabel::Radial).unwrap();
    let spectrum = cavity_spectrum(&[axial, radial], &cav, 1.0, 0.0, &grid,
        &SpectrumTruncation::default()).unwrap();
    let start = SidebandInit {
        cavity_center: tau * 3.0e3,
        omega_axial: tau * 24.0e3,
        omega_radial: tau * 80.0e3,
        n_axial: 6.0,
        n_radial: 0.5,
        amplitude: 0.7,
    };
    let config = SidebandFitConfig { cavity: cav, init: start,
        truncation: SpectrumTruncation::default(), pin_radial: false };
    let fit = fit_sideband_spectrum(&spectrum, &config).unwrap();
    println!("conv={} iters={} rss={:.3e} degenerate={}", fit.fit.converged, fit.fit.iterations, fit.fit.rss, fit.degenerate);
    for (name, v) in [("wc", fit.cavity_center), ("wa", fit.omega_axial), ("wr", fit.omega_radial),
                      ("na", fit.n_axial), ("nr", fit.n_radial), ("amp", fit.amplitude)] {
        println!("{name}: {} +- {}", v.value / tau, v.std_err / tau);
    }
}
