//! Special functions and numerical integration shared by the distribution families.

/// Hurwitz zeta `sum_{k>=0} (k + a)^{-s}` for `s > 1`, `a > 0`, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    if s <= 1.0 {
        return f64::INFINITY;
    }
    // B_2 .. B_14
    const BERNOULLI: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    const N: usize = 24;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + a).powf(-s);
    }
    let x = N as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * x.powf(-s);
    // rising product s (s+1) ... (s + 2j - 2), divided by (2j)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j + 1;
        sum += b / fact * rising * xpow;
        let (lo, hi) = ((2 * j - 1) as f64, (2 * j) as f64);
        rising *= (s + lo) * (s + hi);
        fact *= (hi + 1.0) * (hi + 2.0);
        xpow /= x * x;
    }
    sum
}

/// Signed Stirling numbers of the first kind: `(k)_m = sum_i s(m, i) k^i`.
pub fn stirling_first(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for n in 0..m {
        let mut next = vec![0.0; row.len() + 1];
        for (i, c) in row.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= n as f64 * c;
        }
        row = next;
    }
    row
}

/// Stirling numbers of the second kind: `k^j = sum_i S(j, i) (k)_i`.
pub fn stirling_second(j: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..j {
        let mut next = vec![0.0; row.len() + 1];
        for (i, c) in row.iter().enumerate() {
            next[i] += i as f64 * c;
            next[i + 1] += c;
        }
        row = next;
    }
    row
}

/// Falling factorial `k (k-1) ... (k-m+1)`.
pub fn falling(k: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (k - i as f64))
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let points: Vec<f64> = (0..=8).map(|i| a + (b - a) * i as f64 / 8.0).collect();
    integrate_partition(f, &points, rel_tol)
}

/// `∫_0^upper f` over the geometric partition `0, h, 2h, 4h, ...`, for integrands
/// with structure on scale `h` and a long smooth tail.
pub fn integrate_geometric<F: Fn(f64) -> f64>(f: F, h: f64, upper: f64, rel_tol: f64) -> f64 {
    let mut points = vec![0.0];
    let mut edge = h.min(upper);
    while edge < upper {
        points.push(edge);
        edge *= 2.0;
    }
    points.push(upper);
    integrate_partition(f, &points, rel_tol)
}

/// Globally adaptive: bisect the interval with the largest error estimate until
/// the summed estimate meets `rel_tol` relative to the total.
pub fn integrate_partition<F: Fn(f64) -> f64>(f: F, points: &[f64], rel_tol: f64) -> f64 {
    struct Piece {
        lo: f64,
        hi: f64,
        est: f64,
        err: f64,
    }
    let mut pieces: Vec<Piece> = points
        .windows(2)
        .map(|w| {
            let (est, err) = gauss_kronrod(&f, w[0], w[1]);
            Piece {
                lo: w[0],
                hi: w[1],
                est,
                err,
            }
        })
        .collect();
    for _ in 0..5_000 {
        let total: f64 = pieces.iter().map(|p| p.est).sum();
        let err: f64 = pieces.iter().map(|p| p.err).sum();
        if err <= rel_tol * total.abs() || err < f64::MIN_POSITIVE {
            break;
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .map(|(i, _)| i)
            .expect("non-empty partition");
        let Piece { lo, hi, .. } = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        for (l, h) in [(lo, mid), (mid, hi)] {
            let (est, err) = gauss_kronrod(&f, l, h);
            pieces.push(Piece {
                lo: l,
                hi: h,
                est,
                err,
            });
        }
    }
    pieces.iter().map(|p| p.est).sum()
}
