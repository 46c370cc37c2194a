//! Reference evaluators that share no code with the library: a Taylor-series
//! exponential, the textbook shifted-probability formula and direct
//! enumeration of the 2x2 game.

#![allow(dead_code)]

/// Values evaluated at 40 significant digits and rounded to f64.
pub mod frozen {
    /// 1 / (1 + e^-5)
    pub const P_WIN_0_5: f64 = 0.993_307_149_075_715;
    /// 1 / (1 + e^-1.2)
    pub const P_WIN_0_12: f64 = 0.768_524_783_499_017_6;
    /// 1 / (1 + e^6)
    pub const P_LOSE_0_6: f64 = 0.002_472_623_156_634_774;
    /// 1 / (1 + e^-1.5)
    pub const P_RACING_VS_PAUSER: f64 = 0.817_574_476_193_643_7;
    /// 1 / (1 + e^1.5)
    pub const P_PAUSING_VS_RACER: f64 = 0.182_425_523_806_356_3;
    /// (1/0.15)(1 - e^-1.5)(0.5) - 1
    pub const LC_PARITY: f64 = 1.589_566_132_838_567_2;
    /// (0.85/0.15)(e^1.5 - 1)(0.5) - 1
    pub const FUB_PARITY: f64 = 8.864_785_699_291_184;
    /// LC at parity with W = 0.7
    pub const LC_PARITY_W07: f64 = 0.812_696_292_986_997_1;
    /// LC at parity with sigma = 0.2
    pub const LC_PARITY_SIGMA02: f64 = 0.758_778_157_529_951;
    /// FC at delta = 0.6, figure-1 regime
    pub const FC_0_6: f64 = -0.987_193_957_628_612_4;
}

/// e^x by argument halving and a Taylor polynomial, then repeated squaring.
pub fn series_exp(x: f64) -> f64 {
    let mut k = 0;
    let mut r = x;
    while r.abs() > 1e-3 {
        r /= 2.0;
        k += 1;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..=12 {
        term *= r / n as f64;
        sum += term;
    }
    for _ in 0..k {
        sum *= sum;
    }
    sum
}

pub fn oracle_logistic(x: f64) -> f64 {
    1.0 / (1.0 + series_exp(-x))
}

/// Closed forms evaluated with the series exponential.
pub fn oracle_threshold(code: &str, delta: f64, w: f64, sigma: f64, s: f64) -> f64 {
    let b = (1.0 - s) / sigma;
    let k_safe = w / (1.0 - s) * (1.0 - series_exp(-b));
    let k_sucker = s * w / (1.0 - s) * (series_exp(b) - 1.0);
    let p_win = oracle_logistic(delta / sigma);
    let p_lose = oracle_logistic(-delta / sigma);
    match code {
        "FC" => k_safe * p_lose - 1.0,
        "FUB" => k_sucker * p_lose - 1.0,
        "LC" => k_safe * p_win - 1.0,
        "LUB" => k_sucker * p_win - 1.0,
        _ => panic!("unknown threshold {code}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Pause,
    Race,
}

pub const MOVES: [Move; 2] = [Move::Pause, Move::Race];

/// Expected utilities `(frontrunner, laggard)` for one profile, evaluated
/// literally as `P(win) * win + P(lose) * lose` with
/// `P^R = P / (P + (1 - P) e^-B)` and `P^S = P / (P + (1 - P) e^B)`.
pub fn oracle_payoffs(
    f: Move,
    l: Move,
    delta: f64,
    w: f64,
    c: f64,
    sigma: f64,
    s: f64,
) -> (f64, f64) {
    let b = (1.0 - s) / sigma;
    let base = oracle_logistic(delta / sigma);
    let p_front = match (f, l) {
        (Move::Race, Move::Pause) => base / (base + (1.0 - base) * series_exp(-b)),
        (Move::Pause, Move::Race) => base / (base + (1.0 - base) * series_exp(b)),
        _ => base,
    };
    let safety = |m: Move| if m == Move::Pause { 1.0 } else { s };
    let eu = |own: Move, rival: Move, p: f64| {
        let so = safety(own);
        let sr = safety(rival);
        p * (so - (1.0 - so) * c) + (1.0 - p) * (sr * (1.0 - w) - (1.0 - sr) * c)
    };
    (eu(f, l, p_front), eu(l, f, 1.0 - p_front))
}

/// Pure equilibria by checking every unilateral deviation (ties favor pause,
/// i.e. pausing is kept when it is at least as good).
pub fn oracle_equilibria(delta: f64, w: f64, c: f64, sigma: f64, s: f64) -> Vec<(Move, Move)> {
    let mut out = Vec::new();
    for f in MOVES {
        for l in MOVES {
            let stays = |mine: Move, alt: f64, cur: f64| match mine {
                Move::Pause => cur >= alt,
                Move::Race => cur > alt,
            };
            let (cur_f, cur_l) = oracle_payoffs(f, l, delta, w, c, sigma, s);
            let other = |m: Move| {
                if m == Move::Pause {
                    Move::Race
                } else {
                    Move::Pause
                }
            };
            let (dev_f, _) = oracle_payoffs(other(f), l, delta, w, c, sigma, s);
            let (_, dev_l) = oracle_payoffs(f, other(l), delta, w, c, sigma, s);
            if stays(f, dev_f, cur_f) && stays(l, dev_l, cur_l) {
                out.push((f, l));
            }
        }
    }
    out
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
