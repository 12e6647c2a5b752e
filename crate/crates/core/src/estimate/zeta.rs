/// Bernoulli numbers B_2, B_4, ..., B_20 divided by (2j)!.
const B2J_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

/// Hurwitz zeta `sum_{k>=0} (k + a)^{-s}` for `s > 1`, `a > 0`, by
/// Euler-Maclaurin summation after `N` explicit terms.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + N as f64;
    let xs = x.powf(-s);
    sum += x * xs / (s - 1.0) + 0.5 * xs;
    // Rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}.
    let mut fact = s;
    let mut pow = xs / x;
    let inv_x2 = 1.0 / (x * x);
    for (j, b) in B2J_OVER_FACT.iter().enumerate() {
        let term = b * fact * pow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64;
        fact *= (s + m + 1.0) * (s + m + 2.0);
        pow *= inv_x2;
    }
    sum
}
