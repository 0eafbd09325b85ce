use ringbragg::cavity::{empty_cavity_spectrum, CavityParams};
use ringbragg::fit::models::fit_lorentzian_doublet;
use ringbragg::series::{linspace, Channel, SpectrumSeries};

fn main() {
    let tau = 2.0 * std::f64::consts::PI;
    let cav = CavityParams::new(tau * 36.7e3, 21.0, tau * 5.22e6, tau * 8.417e6).unwrap();
    let grid = linspace(-tau * 5.6e6, tau * 5.6e6, 1601);
    let spec = empty_cavity_spectrum(&cav, &grid).unwrap();
    let series = SpectrumSeries::new(grid, spec.total.rate, Channel::Total).unwrap();
    let fit = fit_lorentzian_doublet(&series).unwrap();
    println!(
        "split={} width={} rss={:.3e} conv={} iters={} centers=({},{}) amps=({},{}) off={}",
        fit.splitting.value / tau,
        fit.width.value / tau,
        fit.fit.rss,
        fit.fit.converged,
        fit.fit.iterations,
        fit.center_low.value / tau,
        fit.center_high.value / tau,
        fit.amp_low.value,
        fit.amp_high.value,
        fit.offset.value
    );
}
