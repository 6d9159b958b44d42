//! High-accuracy special functions: erf/erfc, the standard normal CDF, and
//! the gamma function.
//!
//! The error function uses the rational Chebyshev approximations of W. J.
//! Cody (SPECFUN), accurate to a few ulp across the real line; the normal CDF
//! built on it is validated against independent adaptive quadrature to 1e-12
//! in the verify suite. The gamma function uses a Lanczos approximation
//! (g = 7, 9 terms), ~1e-13 relative over the arguments used here, with an
//! exact half-integer recursion available as a cross-check.

/// erf(x), Cody's rational approximation.
pub fn erf(x: f64) -> f64 {
    if x.abs() <= 0.46875 {
        erf_small(x)
    } else {
        let e = erfc_abs(x.abs());
        if x > 0.0 {
            1.0 - e
        } else {
            e - 1.0
        }
    }
}

/// erfc(x) = 1 - erf(x), computed without cancellation for large x.
pub fn erfc(x: f64) -> f64 {
    if x.abs() <= 0.46875 {
        1.0 - erf_small(x)
    } else if x > 0.0 {
        erfc_abs(x)
    } else {
        2.0 - erfc_abs(-x)
    }
}

// |x| <= 0.46875 branch: erf(x) = x * P(x^2)/Q(x^2).
fn erf_small(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    let z = x * x;
    let mut num = A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    x * (num + A[3]) / (den + B[3])
}

// erfc(y) for y > 0.46875.
fn erfc_abs(y: f64) -> f64 {
    debug_assert!(y > 0.46875);
    let r = if y <= 4.0 {
        const C: [f64; 9] = [
            5.64188496988670089e-1,
            8.88314979438837594e0,
            6.61191906371416295e1,
            2.98635138197400131e2,
            8.81952221241769090e2,
            1.71204761263407058e3,
            2.05107837782607147e3,
            1.23033935479799725e3,
            2.15311535474403846e-8,
        ];
        const D: [f64; 8] = [
            1.57449261107098347e1,
            1.17693950891312499e2,
            5.37181101862009858e2,
            1.62138957456669019e3,
            3.29079923573345963e3,
            4.36261909014324716e3,
            3.43936767414372164e3,
            1.23033935480374942e3,
        ];
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else if y < 26.6 {
        const P: [f64; 6] = [
            3.05326634961232344e-1,
            3.60344899949804439e-1,
            1.25781726111229246e-1,
            1.60837851487422766e-2,
            6.58749161529837803e-4,
            1.63153871373020978e-2,
        ];
        const Q: [f64; 5] = [
            2.56852019228982242e0,
            1.87295284992346047e0,
            5.27905102951428412e-1,
            6.05183413124413191e-2,
            2.33520497626869185e-3,
        ];
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let r = z * (num + P[4]) / (den + Q[4]);
        const FRAC_1_SQRT_PI: f64 = 5.6418958354775628695e-1;
        (FRAC_1_SQRT_PI - r) / y
    } else {
        return 0.0;
    };
    // exp(-y^2) split to preserve accuracy: y^2 = ysq^2 + (y-ysq)(y+ysq)
    // with ysq a 1/16 lattice point, so ysq*ysq is exact.
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF, accurate to ~1e-15 absolute.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = G[0];
    for (i, &g) in G.iter().enumerate().skip(1) {
        a += g / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Gamma(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Exact Gamma at integer or half-integer arguments `2x` in {1, 2, 3, ...},
/// via the recursion Gamma(x+1) = x Gamma(x) from Gamma(1) = 1 and
/// Gamma(1/2) = sqrt(pi). Cross-check for the Lanczos route.
pub fn gamma_half_integer(two_x: u32) -> f64 {
    assert!(two_x >= 1, "argument must be a positive half-integer");
    let mut v = if two_x % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut k = if two_x % 2 == 0 { 2u32 } else { 1u32 };
    while k < two_x {
        v *= k as f64 / 2.0;
        k += 2;
    }
    v
}
