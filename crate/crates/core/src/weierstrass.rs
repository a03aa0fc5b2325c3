//! The hexagonal lattice `L = omega * Z[tau]` and its Weierstrass functions.
//!
//! The real period constant `omega = 3.0599080741...` is defined by
//! `wp'(z)^2 = 4 wp(z)^3 - 1` on `L`, i.e. `g_2(L) = 0`, `g_3(L) = 1`.  It is
//! computed by two independent routes that must agree:
//!
//! * route (a): `omega = (140 G_6)^(1/6)` with
//!   `G_6 = (2 pi^6 / 945) E_6(q)`, `q = -exp(-pi sqrt(3))`,
//!   `E_6 = 1 - 504 sum sigma_5(n) q^n`;
//! * route (b): `omega = 2 * integral_{e_1}^{inf} dx / sqrt(4x^3 - 1)` with
//!   `e_1 = 4^(-1/3)`, evaluated by tanh-sinh quadrature after the
//!   cancellation-free substitution `x = e_1 + t^2`, `t = s/(1-s)`.
//!
//! Around the origin `wp(z) = z^(-2) (1 + sum_k c_k z^(2k-2))` where the
//! `c_k` are exact rationals with `c_2 = 0`, `c_3 = 1/28` and
//! `c_k = 3 / ((2k+1)(k-3)) * sum_{m=2}^{k-2} c_m c_{k-m}`; only the `c_{3j}`
//! are nonzero.  Arguments are reduced modulo `L` into the fundamental
//! hexagon (covering radius `omega / sqrt(3)`), where the Laurent tail decays
//! by a factor 3 per `z^2` order, so `ceil(P log(10)/log(3)) + 8` terms give
//! `P` digits.  Every `wp` evaluation is followed by a differential-equation
//! self-check.
//!
//! Quasi-periods enter through `eta(alpha) = 2 pi conj(alpha) / (sqrt(3)
//! omega^2)` (the lattice has area `sqrt(3) omega^2 / 2` and `s_2(L) = 0`),
//! giving `zeta(z + alpha) = zeta(z) + eta(alpha)` and the nonholomorphic
//! `E_1^*(z) = zeta(z) - 2 pi conj(z) / (sqrt(3) omega^2)`.

use crate::eisenstein::{EisensteinInt, ZERO};
use crate::numerics::{self, digits_to_bits, BigComplex, BigReal, ConstantSet};
use crate::{CheckRow, Error, Result};
use rug::Rational;

/// An exact lattice argument `omega * num / den` with `num` in `Z[tau]`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct KPoint {
    /// Numerator in `Z[tau]`.
    pub num: EisensteinInt,
    /// Positive rational denominator.
    pub den: i128,
}

impl KPoint {
    /// Builds `omega * num / den`, normalizing the denominator sign and
    /// clearing common integer factors.
    pub fn new(num: EisensteinInt, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_i128(gcd_i128(num.a.abs(), num.b.abs()), den);
        if g > 1 {
            num = EisensteinInt::new(num.a / g, num.b / g);
            den /= g;
        }
        Ok(KPoint { num, den })
    }

    /// Exact complex conjugate (the lattice is conjugation-stable).
    pub fn conj(&self) -> KPoint {
        KPoint {
            num: self.num.conj(),
            den: self.den,
        }
    }

    /// Exact sum.
    pub fn add(&self, other: &KPoint) -> Result<KPoint> {
        let num = EisensteinInt::new(
            self.num.a * other.den + other.num.a * self.den,
            self.num.b * other.den + other.num.b * self.den,
        );
        KPoint::new(num, self.den * other.den)
    }

    /// True when the point lies on the lattice itself.
    pub fn is_lattice(&self) -> bool {
        self.num.a % self.den == 0 && self.num.b % self.den == 0
    }

    /// Exact reduction: returns `(reduced, lambda)` with
    /// `self = reduced + lambda * omega` and `norm(reduced.num)` minimal.
    pub fn reduce(&self) -> (KPoint, EisensteinInt) {
        let qa = round_nearest_i128(self.num.a, self.den);
        let qb = round_nearest_i128(self.num.b, self.den);
        let mut best: Option<(i128, EisensteinInt)> = None;
        for da in -1..=1i128 {
            for db in -1..=1i128 {
                let lam = EisensteinInt::new(qa + da, qb + db);
                let r = EisensteinInt::new(
                    self.num.a - lam.a * self.den,
                    self.num.b - lam.b * self.den,
                );
                let n = r.norm();
                if best.map_or(true, |(bn, _)| n < bn) {
                    best = Some((n, lam));
                }
            }
        }
        let (_, lam) = best.expect("scan is nonempty");
        let red = EisensteinInt::new(
            self.num.a - lam.a * self.den,
            self.num.b - lam.b * self.den,
        );
        (
            KPoint {
                num: red,
                den: self.den,
            },
            lam,
        )
    }

    /// Embeds as a complex number at the context precision.
    pub fn to_complex(&self, ctx: &LatticeContext) -> BigComplex {
        let z = ctx.embed(&self.num);
        z.scale(&ctx.omega)
            .unscale(&BigReal::from_i128(self.den, ctx.prec))
    }
}

impl std::fmt::Display for KPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) omega / {}", self.num, self.den)
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn round_nearest_i128(p: i128, n: i128) -> i128 {
    debug_assert!(n > 0);
    let mut q = p.div_euclid(n);
    let r = p.rem_euclid(n);
    if 2 * r > n || (2 * r == n && q < 0) {
        q += 1;
    }
    q
}

/// Result of a `wp` evaluation: a lattice pole or the pair `(wp, wp')`.
#[derive(Clone, Debug)]
pub enum WpEval {
    /// The argument is (numerically) a lattice point.
    Pole,
    /// Function and derivative values.
    Values {
        /// `wp(z)`.
        wp: BigComplex,
        /// `wp'(z)`.
        wp_prime: BigComplex,
    },
}

/// Result of a `zeta` or `E_1^*` evaluation.
#[derive(Clone, Debug)]
pub enum PointEval {
    /// The argument is (numerically) a lattice point.
    Pole,
    /// The value.
    Value(BigComplex),
}

/// Exact Laurent coefficients `[c_2, c_3, ...]`; entry `i` multiplies
/// `z^(2(i+1))` in `wp(z) - z^(-2)`, and the count covers `P` digits at the
/// covering radius.
pub fn laurent_coefficients(digits: u32) -> Vec<Rational> {
    let k_order = (digits as f64 * std::f64::consts::LN_10 / 3f64.ln()).ceil() as usize + 8;
    let kmax = k_order + 1;
    let mut c: Vec<Rational> = vec![Rational::new(); kmax + 1];
    if kmax >= 3 {
        c[3] = Rational::from((1, 28));
    }
    for k in 4..=kmax {
        let mut s = Rational::new();
        for m in 2..=(k - 2) {
            s += Rational::from(&c[m] * &c[k - m]);
        }
        let denom = (2 * k as i64 + 1) * (k as i64 - 3);
        c[k] = s * Rational::from((3, denom));
    }
    c.drain(..2);
    c
}

/// The hexagonal lattice at a fixed working precision.
///
/// Construction computes `omega` by both routes (they must agree to
/// `10^(5-P)`), the exact Laurent table, and the derived constants; the
/// evaluators `wp`, `zeta`, `e1_star` then work anywhere via lattice
/// reduction.
pub struct LatticeContext {
    digits: u32,
    prec: u32,
    consts: ConstantSet,
    omega: BigReal,
    eta_coeff: BigReal,
    covering_radius: BigReal,
    wp_coeffs: Vec<BigReal>,
    wpp_coeffs: Vec<BigReal>,
    zeta_coeffs: Vec<BigReal>,
}

impl LatticeContext {
    /// Builds the context for `digits` requested decimal digits.
    pub fn new(digits: u32) -> Result<Self> {
        let digits = digits.max(20);
        let wdigits = digits + 15;
        let prec = digits_to_bits(wdigits);
        let consts = numerics::constants(wdigits);
        let (omega_a, _omega_b) = omega_routes(wdigits)?;
        let omega = BigReal::from_float(rug::Float::with_val(prec, omega_a.as_float()));
        // eta(alpha) = eta_coeff * conj(alpha), eta_coeff = 2 pi / (sqrt(3) omega^2)
        let two_pi = &consts.pi + &consts.pi;
        let eta_coeff = &two_pi / &(&consts.sqrt3 * &omega.square());
        let covering_radius = &omega / &consts.sqrt3;
        let rationals = laurent_coefficients(wdigits);
        // Entry i corresponds to c_{i+2}; keep only the nonzero c_{3j}.
        let jmax = (rationals.len() + 1) / 3;
        let mut wp_coeffs = Vec::with_capacity(jmax);
        let mut wpp_coeffs = Vec::with_capacity(jmax);
        let mut zeta_coeffs = Vec::with_capacity(jmax);
        for j in 1..=jmax {
            let k = 3 * j;
            let c = &rationals[k - 2];
            let cf = BigReal::from_rational(c, prec);
            wp_coeffs.push(cf.clone());
            wpp_coeffs.push(&cf * &BigReal::from_i64(6 * j as i64 - 2, prec));
            let c_over = Rational::from(c / (6 * j as i64 - 1));
            zeta_coeffs.push(BigReal::from_rational(&c_over, prec));
        }
        Ok(LatticeContext {
            digits,
            prec,
            consts,
            omega,
            eta_coeff,
            covering_radius,
            wp_coeffs,
            wpp_coeffs,
            zeta_coeffs,
        })
    }

    /// Requested decimal digits `P`.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// The constant set at working precision.
    pub fn consts(&self) -> &ConstantSet {
        &self.consts
    }

    /// The real period constant `omega`.
    pub fn omega(&self) -> &BigReal {
        &self.omega
    }

    /// `2 pi / (sqrt(3) omega^2)`.
    pub fn eta_coeff(&self) -> &BigReal {
        &self.eta_coeff
    }

    /// Covering radius `omega / sqrt(3)` of the reduction domain.
    pub fn covering_radius(&self) -> &BigReal {
        &self.covering_radius
    }

    /// Embeds `a + b*tau` as `a - b/2 + i b sqrt(3)/2`.
    pub fn embed(&self, x: &EisensteinInt) -> BigComplex {
        let a = BigReal::from_i128(x.a, self.prec);
        let b = BigReal::from_i128(x.b, self.prec);
        let half = BigReal::from_f64(0.5, self.prec);
        let re = &a - &(&b * &half);
        let im = &(&b * &self.consts.sqrt3) * &half;
        BigComplex::new(re, im)
    }

    /// Reduces `z` modulo the lattice: returns `(z_red, lambda)` with
    /// `z = z_red + lambda * omega` and `|z_red|` at most the covering radius
    /// (up to roundoff).
    pub fn reduce_mod_lattice(&self, z: &BigComplex) -> Result<(BigComplex, EisensteinInt)> {
        // Lattice coordinates: z = (x + y tau) omega with
        // x = re(z/omega) + im(z/omega)/sqrt(3), y = 2 im(z/omega)/sqrt(3).
        let zw = z.unscale(&self.omega);
        let im_over_s3 = &zw.im / &self.consts.sqrt3;
        let x = &zw.re + &im_over_s3;
        let y = &im_over_s3 + &im_over_s3;
        let qa = x.round_to_i128().ok_or_else(|| Error::Invariant {
            detail: "argument too large for lattice reduction".into(),
        })?;
        let qb = y.round_to_i128().ok_or_else(|| Error::Invariant {
            detail: "argument too large for lattice reduction".into(),
        })?;
        let mut best: Option<(BigReal, EisensteinInt, BigComplex)> = None;
        for da in -1..=1i128 {
            for db in -1..=1i128 {
                let lam = EisensteinInt::new(qa + da, qb + db);
                let lam_c = self.embed(&lam).scale(&self.omega);
                let red = z - &lam_c;
                let n = red.norm2();
                let better = match &best {
                    None => true,
                    Some((bn, _, _)) => n < *bn,
                };
                if better {
                    best = Some((n, lam, red));
                }
            }
        }
        let (_, lam, red) = best.expect("scan is nonempty");
        Ok((red, lam))
    }

    fn pole_tolerance(&self) -> BigReal {
        &BigReal::pow10(5 - self.digits as i64, self.prec) * &self.omega
    }

    /// Laurent evaluation of `(wp, wp')` at a reduced argument.
    fn series_wp(&self, z: &BigComplex) -> (BigComplex, BigComplex) {
        let z2 = z * z;
        let z3 = &z2 * z;
        let w = &(&z2 * &z2) * &z2;
        let one = BigReal::from_i64(1, self.prec);
        let mut s1 = BigComplex::from_real(one);
        let mut s2 = BigComplex::from_real(BigReal::from_i64(-2, self.prec));
        let mut pw = w.clone();
        for (cw, cwp) in self.wp_coeffs.iter().zip(&self.wpp_coeffs) {
            s1 = &s1 + &pw.scale(cw);
            s2 = &s2 + &pw.scale(cwp);
            pw = &pw * &w;
        }
        (&s1 / &z2, &s2 / &z3)
    }

    /// Laurent evaluation of `zeta` at a reduced argument.
    fn series_zeta(&self, z: &BigComplex) -> BigComplex {
        let z2 = z * z;
        let w = &(&z2 * &z2) * &z2;
        let mut s = BigComplex::from_real(BigReal::from_i64(1, self.prec));
        let mut pw = w.clone();
        for cz in &self.zeta_coeffs {
            s = &s - &pw.scale(cz);
            pw = &pw * &w;
        }
        &s / z
    }

    fn self_check(&self, z: &BigComplex, wp: &BigComplex, wp_prime: &BigComplex) -> Result<()> {
        let one = BigComplex::from_real(BigReal::from_i64(1, self.prec));
        let four = BigReal::from_i64(4, self.prec);
        let wp3 = &(wp * wp) * wp;
        let residual = &(wp_prime * wp_prime) - &(&wp3.scale(&four) - &one);
        let mag = wp.abs();
        let one_r = BigReal::from_i64(1, self.prec);
        let scale = if mag > one_r {
            &(&mag * &mag) * &mag
        } else {
            one_r
        };
        let tol = &BigReal::pow10(8 - self.digits as i64, self.prec) * &scale;
        let err = residual.abs();
        if !(err <= tol) || !wp.is_finite() || !wp_prime.is_finite() {
            return Err(Error::SelfCheckFailed {
                at: format!("{:.20}", z),
                residual: err.to_decimal(8),
                tolerance: tol.to_decimal(8),
            });
        }
        Ok(())
    }

    /// `wp` and `wp'` at a complex argument, reduced modulo the lattice.
    pub fn wp(&self, z: &BigComplex) -> Result<WpEval> {
        let (red, _) = self.reduce_mod_lattice(z)?;
        if red.abs() <= self.pole_tolerance() {
            return Ok(WpEval::Pole);
        }
        let (wp, wp_prime) = self.series_wp(&red);
        self.self_check(&red, &wp, &wp_prime)?;
        Ok(WpEval::Values { wp, wp_prime })
    }

    /// `wp` and `wp'` at an exact lattice argument; poles are detected exactly.
    pub fn wp_at(&self, p: &KPoint) -> Result<WpEval> {
        let (red, _) = p.reduce();
        if red.num == ZERO {
            return Ok(WpEval::Pole);
        }
        let z = red.to_complex(self);
        let (wp, wp_prime) = self.series_wp(&z);
        self.self_check(&z, &wp, &wp_prime)?;
        Ok(WpEval::Values { wp, wp_prime })
    }

    /// Weierstrass `zeta` at a complex argument, using
    /// `zeta(z + lambda omega) = zeta(z) + eta_coeff * conj(lambda omega)`.
    pub fn zeta(&self, z: &BigComplex) -> Result<PointEval> {
        let (red, lam) = self.reduce_mod_lattice(z)?;
        if red.abs() <= self.pole_tolerance() {
            return Ok(PointEval::Pole);
        }
        let base = self.series_zeta(&red);
        let corr = self
            .embed(&lam.conj())
            .scale(&self.omega)
            .scale(&self.eta_coeff);
        Ok(PointEval::Value(&base + &corr))
    }

    /// `zeta` at an exact lattice argument.
    pub fn zeta_at(&self, p: &KPoint) -> Result<PointEval> {
        let (red, lam) = p.reduce();
        if red.num == ZERO {
            return Ok(PointEval::Pole);
        }
        let z = red.to_complex(self);
        let base = self.series_zeta(&z);
        let corr = self
            .embed(&lam.conj())
            .scale(&self.omega)
            .scale(&self.eta_coeff);
        Ok(PointEval::Value(&base + &corr))
    }

    /// The nonholomorphic Eisenstein value
    /// `E_1^*(z) = zeta(z) - eta_coeff * conj(z)`, with `conj(z)` taken from
    /// the exact input components.
    pub fn e1_star(&self, z: &BigComplex) -> Result<PointEval> {
        match self.zeta(z)? {
            PointEval::Pole => Ok(PointEval::Pole),
            PointEval::Value(v) => {
                let corr = z.conj().scale(&self.eta_coeff);
                Ok(PointEval::Value(&v - &corr))
            }
        }
    }

    /// `E_1^*` at an exact lattice argument.
    pub fn e1_star_at(&self, p: &KPoint) -> Result<PointEval> {
        match self.zeta_at(p)? {
            PointEval::Pole => Ok(PointEval::Pole),
            PointEval::Value(v) => {
                let corr = p.conj().to_complex(self).scale(&self.eta_coeff);
                Ok(PointEval::Value(&v - &corr))
            }
        }
    }
}

fn sigma5(n: u64) -> u64 {
    let mut s = 0u64;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += d.pow(5);
            let e = n / d;
            if e != d {
                s += e.pow(5);
            }
        }
        d += 1;
    }
    s
}

fn omega_route_qseries(prec: u32, tail_digits: u32) -> BigReal {
    let pi = BigReal::pi(prec);
    let sqrt3 = BigReal::from_i64(3, prec).sqrt();
    // q = -exp(-pi sqrt(3)); track x = |q|^n and alternate signs.
    let x = (-&(&pi * &sqrt3)).exp();
    let threshold = BigReal::pow10(-(tail_digits as i64), prec);
    let mut sum = BigReal::zero(prec);
    let mut xn = x.clone();
    let mut n = 1u64;
    loop {
        let term = &BigReal::from_i128(sigma5(n) as i128, prec) * &xn;
        if n % 2 == 1 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
        if term.abs() < threshold {
            break;
        }
        xn = &xn * &x;
        n += 1;
    }
    let e6 = &BigReal::from_i64(1, prec) - &(&BigReal::from_i64(504, prec) * &sum);
    // G_6 = 2 zeta(6) E_6 = (2 pi^6 / 945) E_6
    let pi2 = pi.square();
    let pi6 = &(&pi2 * &pi2) * &pi2;
    let g6 = &(&(&pi6 + &pi6) / &BigReal::from_i64(945, prec)) * &e6;
    (&BigReal::from_i64(140, prec) * &g6).root(6)
}

fn omega_route_quadrature(prec: u32, target_digits: u32) -> Result<BigReal> {
    let pi = BigReal::pi(prec);
    let half_pi = &pi * &BigReal::from_f64(0.5, prec);
    let e1 = BigReal::from_f64(0.25, prec).cbrt();
    let e1_sq = e1.square();
    // Node weight: with t = exp(2v), v = (pi/2) sinh(u), the integral
    // 2 * int dt / sqrt(x^2 + e1 x + e1^2), x = e1 + t^2, becomes
    // 2 pi h * sum cosh(u_j) exp(2 v_j) / sqrt(q(x_j)).
    let m_ln10 = (target_digits as f64 + 8.0) * std::f64::consts::LN_10;
    let umax = (m_ln10 / std::f64::consts::PI).asinh() + 0.5;
    let tol = BigReal::pow10(-(target_digits as i64 + 4), prec);
    let mut prev: Option<BigReal> = None;
    let mut h = 0.5f64;
    for level in 0..14 {
        let jmax = (umax / h).ceil() as i64;
        let hf = BigReal::from_f64(h, prec);
        let mut terms: Vec<BigComplex> = Vec::with_capacity((2 * jmax + 1) as usize);
        for j in -jmax..=jmax {
            let u = &hf * &BigReal::from_i64(j, prec);
            let eu = u.exp();
            let inv_eu = eu.recip();
            let two = BigReal::from_i64(2, prec);
            let cosh_u = &(&eu + &inv_eu) / &two;
            let sinh_u = &(&eu - &inv_eu) / &two;
            let v = &half_pi * &sinh_u;
            let t = (&v + &v).exp();
            let x = &e1 + &t.square();
            let q = &(&x.square() + &(&e1 * &x)) + &e1_sq;
            let term = &(&cosh_u * &t) / &q.sqrt();
            terms.push(BigComplex::from_real(term));
        }
        let sum = numerics::deterministic_sum(&terms, prec).re;
        let two = BigReal::from_i64(2, prec);
        let value = &(&(&two * &pi) * &hf) * &sum;
        if let Some(p) = &prev {
            let delta = (&value - p).abs();
            if delta < tol && level >= 3 {
                return Ok(value);
            }
        }
        prev = Some(value);
        h *= 0.5;
    }
    Err(Error::QuadratureDivergence {
        delta: prev
            .map(|p| p.to_decimal(8))
            .unwrap_or_else(|| "unknown".into()),
    })
}

/// Computes `omega` by both routes at `digits` decimal digits; returns
/// `(q_series, quadrature)` after checking agreement to `10^(5 - digits)`.
pub fn omega_routes(digits: u32) -> Result<(BigReal, BigReal)> {
    let work_digits = digits + 10;
    let prec = digits_to_bits(work_digits);
    let a = omega_route_qseries(prec, work_digits + 5);
    let b = omega_route_quadrature(prec, work_digits)?;
    let tol = BigReal::pow10(5 - digits as i64, prec);
    let diff = (&a - &b).abs();
    if !(diff <= tol) {
        return Err(Error::PeriodRouteMismatch {
            difference: diff.to_decimal(8),
            tolerance: tol.to_decimal(8),
        });
    }
    Ok((a, b))
}

/// The period constant `omega` to `digits` digits (q-series route, after the
/// two-route agreement check).
pub fn compute_omega(digits: u32) -> Result<BigReal> {
    Ok(omega_routes(digits)?.0)
}

/// The 17 pinned special values of `wp`, `wp'`, and `zeta` at the division
/// points of the fundamental cell, checked to `10^(10 - P)`.
pub fn special_value_suite(ctx: &LatticeContext) -> Result<Vec<CheckRow>> {
    let prec = ctx.prec();
    let c = ctx.consts();
    let one = BigReal::from_i64(1, prec);
    let three = BigReal::from_i64(3, prec);
    let omega = ctx.omega();
    let pi_over_s3w = &c.pi / &(&c.sqrt3 * omega);
    let inv_s3 = c.sqrt3.recip();
    // sqrt(3) / (cbrt(2) - 2)
    let s3_over_c2m2 = &c.sqrt3 / &(&c.cbrt2 - &BigReal::from_i64(2, prec));
    let real = |v: BigReal| BigComplex::from_real(v);
    let imag = |v: BigReal| BigComplex::new(BigReal::zero(prec), v);

    let kp = |a: i128, b: i128, den: i128| KPoint::new(EisensteinInt::new(a, b), den).unwrap();
    enum Kind {
        Wp,
        WpPrime,
        Zeta,
    }
    let rows_spec: Vec<(String, Kind, KPoint, BigComplex)> = vec![
        (
            "wp(omega/3) = 1".into(),
            Kind::Wp,
            kp(1, 0, 3),
            real(one.clone()),
        ),
        (
            "wp'(omega/3) = -sqrt(3)".into(),
            Kind::WpPrime,
            kp(1, 0, 3),
            real(-&c.sqrt3),
        ),
        (
            "zeta(omega/2) = pi/(sqrt(3) omega)".into(),
            Kind::Zeta,
            kp(1, 0, 2),
            real(pi_over_s3w.clone()),
        ),
        (
            "zeta(omega/3) = 2pi/(3 sqrt(3) omega) + 1/sqrt(3)".into(),
            Kind::Zeta,
            kp(1, 0, 3),
            real(
                &(&(&pi_over_s3w + &pi_over_s3w) / &three) + &inv_s3,
            ),
        ),
        (
            "zeta(2 omega/3) = 4pi/(3 sqrt(3) omega) - 1/sqrt(3)".into(),
            Kind::Zeta,
            kp(2, 0, 3),
            real(
                &(&(&BigReal::from_i64(4, prec) * &pi_over_s3w) / &three) - &inv_s3,
            ),
        ),
        (
            "wp'(omega/2) = 0".into(),
            Kind::WpPrime,
            kp(1, 0, 2),
            BigComplex::zero(prec),
        ),
        (
            "wp(2 omega/3) = 1".into(),
            Kind::Wp,
            kp(2, 0, 3),
            real(one.clone()),
        ),
        (
            "wp'(2 omega/3) = sqrt(3)".into(),
            Kind::WpPrime,
            kp(2, 0, 3),
            real(c.sqrt3.clone()),
        ),
        (
            "wp(omega/2) = cbrt(2)/2".into(),
            Kind::Wp,
            kp(1, 0, 2),
            real(&c.cbrt2 / &BigReal::from_i64(2, prec)),
        ),
        (
            "zeta(5 omega/6) = 5pi/(3 sqrt(3) omega) + 1/sqrt(3) + sqrt(3)/(cbrt(2) - 2)".into(),
            Kind::Zeta,
            kp(5, 0, 6),
            real(
                &(&(&(&BigReal::from_i64(5, prec) * &pi_over_s3w) / &three) + &inv_s3)
                    + &s3_over_c2m2,
            ),
        ),
        (
            "zeta(omega/6) = pi/(3 sqrt(3) omega) - 1/sqrt(3) - sqrt(3)/(cbrt(2) - 2)".into(),
            Kind::Zeta,
            kp(1, 0, 6),
            real(
                &(&(&pi_over_s3w / &three) - &inv_s3) - &s3_over_c2m2,
            ),
        ),
        (
            "wp(omega/6) = 1 + cbrt(2) + cbrt(4)".into(),
            Kind::Wp,
            kp(1, 0, 6),
            real(&(&one + &c.cbrt2) + &c.cbrt4),
        ),
        (
            "wp'(omega/6) = -sqrt(3)(3 + 2 cbrt(2) + 2 cbrt(4))".into(),
            Kind::WpPrime,
            kp(1, 0, 6),
            real(
                -&(&c.sqrt3
                    * &(&(&three + &(&c.cbrt2 + &c.cbrt2)) + &(&c.cbrt4 + &c.cbrt4))),
            ),
        ),
        (
            "wp(sqrt(-3) omega/6) = -cbrt(2)".into(),
            Kind::Wp,
            kp(1, 2, 6),
            real(-&c.cbrt2),
        ),
        (
            "wp(omega/sqrt(-3)) = 0".into(),
            Kind::Wp,
            kp(-1, -2, 3),
            BigComplex::zero(prec),
        ),
        (
            "wp'(sqrt(-3) omega/6) = -3i".into(),
            Kind::WpPrime,
            kp(1, 2, 6),
            imag(-&three),
        ),
        (
            "zeta(sqrt(-3) omega/6) = -pi i/(3 omega) - i cbrt(4)/2".into(),
            Kind::Zeta,
            kp(1, 2, 6),
            imag(
                -&(&(&c.pi / &(&three * omega)) + &(&c.cbrt4 / &BigReal::from_i64(2, prec))),
            ),
        ),
    ];

    let tol = BigReal::pow10(10 - ctx.digits() as i64, prec);
    let mut rows = Vec::with_capacity(rows_spec.len());
    for (name, kind, point, expected) in rows_spec {
        let value = match kind {
            Kind::Wp | Kind::WpPrime => match ctx.wp_at(&point)? {
                WpEval::Pole => {
                    return Err(Error::Invariant {
                        detail: format!("unexpected pole at {point}"),
                    })
                }
                WpEval::Values { wp, wp_prime } => match kind {
                    Kind::Wp => wp,
                    _ => wp_prime,
                },
            },
            Kind::Zeta => match ctx.zeta_at(&point)? {
                PointEval::Pole => {
                    return Err(Error::Invariant {
                        detail: format!("unexpected pole at {point}"),
                    })
                }
                PointEval::Value(v) => v,
            },
        };
        let err = (&value - &expected).abs();
        rows.push(CheckRow {
            pass: err <= tol,
            name,
            error: err.to_decimal(8),
            tolerance: tol.to_decimal(8),
            witness: None,
        });
    }
    Ok(rows)
}
