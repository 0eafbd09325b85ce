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
    let grid = linspace(-tau * 150.0e3, tau * 150.0e3, 301);
    let axial = ThermalMode::new(truth.omega_axial, truth.n_axial,
        (tau * 2.07e3 / truth.omega_axial).sqrt(), MotionLabel::Axial).unwrap();
    let spectrum = cavity_spectrum(&[axial], &cav, 1.0, 0.0, &grid, &SpectrumTruncation::default()).unwrap();
    let full = SidebandFitConfig { cavity: cav, init: truth, truncation: SpectrumTruncation::default(), pin_radial: false };
    let fit = fit_sideband_spectrum(&spectrum, &full).unwrap();
    println!("conv={} iters={} rss={:.3e} degenerate={}", fit.fit.converged, fit.fit.iterations, fit.fit.rss, fit.degenerate);
    println!("wr = {} +- {}", fit.omega_radial.value / tau, fit.omega_radial.std_err / tau);
    println!("nr = {} +- {}", fit.n_radial.value, fit.n_radial.std_err);
    println!("na = {} +- {}", fit.n_axial.value, fit.n_axial.std_err);
    println!("amp = {} +- {}", fit.amplitude.value, fit.amplitude.std_err);
}
