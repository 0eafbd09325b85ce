use num_complex::Complex64;
use ringbragg::geometry::*;

fn power(x: &[f64], y: &[f64], mean: f64, freq: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        acc += Complex64::from_polar(yi - mean, -2.0 * std::f64::consts::PI * freq * xi);
    }
    acc.norm_sqr()
}

fn main() {
    let probe = ProbeGeometry::new(852.347, 0.0).unwrap();
    let array = AtomArray::new(2, 14_000.0).unwrap();
    let scan = bragg_scan(&array, &probe, 13_500.0, 16_000.0, 80).unwrap();
    let x = &scan.spacing;
    let y = &scan.rate_cw;
    let n = x.len();
    let range = x[n - 1] - x[0];
    let mean: f64 = y.iter().sum::<f64>() / n as f64;
    let df = 1.0 / (4.0 * range);
    let pw: Vec<(f64, f64)> = (1..=2 * (n - 1))
        .map(|j| (j as f64 * df, power(x, y, mean, j as f64 * df)))
        .collect();
    let mut peaks: Vec<(f64, f64)> = pw
        .windows(3)
        .filter(|w| w[1].1 >= w[0].1 && w[1].1 >= w[2].1)
        .map(|w| w[1])
        .collect();
    peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    println!("true f = {}", 1.0 / 852.347);
    for (f, p) in peaks.iter().take(6) {
        println!("peak f={f:.8e} period={:.3} power={p:.3e}", 1.0 / f);
    }
}
