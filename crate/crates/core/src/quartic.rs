//! The symmetric quartics `x⁴ + a x² + a y² + y⁴ = b`, their quadratic
//! twists, the two covering maps to `y² = x(x² − 4ax − (16b + 4a²))` and the
//! height comparisons between them.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::elliptic::{ECPoint, EllipticCurve};
use crate::error::{precondition, Error, Result};
use crate::exact::{
    factorize, int, is_squarefree, p_adic_abs, rational_sqrt, serde_bigint, serde_rational, IntPoly,
    RatPoly, Rational,
};

/// `F^(α) = F_(αa, α²b)`; `alpha = 1` is the untwisted curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymQuartic {
    #[serde(with = "serde_rational")]
    a: Rational,
    #[serde(with = "serde_rational")]
    b: Rational,
    #[serde(with = "serde_bigint")]
    alpha: BigInt,
}

/// An affine rational point. Over ℚ the curves have no points at infinity,
/// see [`infinity_points`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuarticPoint {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
}

impl QuarticPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        QuarticPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        QuarticPoint::new(int(x), int(y))
    }

    pub fn swap(&self) -> Self {
        QuarticPoint::new(self.y.clone(), self.x.clone())
    }

    /// Weil height of `[x : y : 1]` in the projective plane.
    pub fn weil_height(&self) -> f64 {
        crate::exact::log_abs(&self.projective_max())
    }

    fn projective_max(&self) -> BigInt {
        let z = self.x.denom().lcm(self.y.denom());
        let xi = (&self.x * Rational::from_integer(z.clone())).to_integer();
        let yi = (&self.y * Rational::from_integer(z.clone())).to_integer();
        xi.abs().max(yi.abs()).max(z)
    }
}

impl fmt::Display for QuarticPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `b·(a² + 2b)·(a² + 4b)`.
pub fn discriminant(a: &Rational, b: &Rational) -> Rational {
    let a2 = a * a;
    let two = int(2);
    let four = int(4);
    b * (&a2 + &two * b) * (&a2 + &four * b)
}

impl SymQuartic {
    pub fn new(a: Rational, b: Rational, alpha: BigInt) -> Result<Self> {
        if alpha.is_zero() || !is_squarefree(&alpha)? {
            return precondition(format!("twist parameter {alpha} is not a nonzero squarefree integer"));
        }
        let f = SymQuartic { a, b, alpha };
        if discriminant(&f.twisted_a(), &f.twisted_b()).is_zero() {
            return Err(Error::Singular(format!("{f} has vanishing discriminant")));
        }
        Ok(f)
    }

    pub fn untwisted(a: Rational, b: Rational) -> Result<Self> {
        Self::new(a, b, BigInt::one())
    }

    pub fn from_ints(a: i64, b: i64, alpha: i64) -> Result<Self> {
        Self::new(int(a), int(b), BigInt::from(alpha))
    }

    /// The untwisted curve through `(x, y)` with the given `a`.
    pub fn through_point(a: Rational, x: &Rational, y: &Rational) -> Result<(Self, QuarticPoint)> {
        let x2 = x * x;
        let y2 = y * y;
        let b = &x2 * &x2 + &a * &x2 + &a * &y2 + &y2 * &y2;
        let f = Self::untwisted(a, b)?;
        Ok((f, QuarticPoint::new(x.clone(), y.clone())))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn alpha(&self) -> &BigInt {
        &self.alpha
    }

    pub fn twisted_a(&self) -> Rational {
        &self.a * Rational::from_integer(self.alpha.clone())
    }

    pub fn twisted_b(&self) -> Rational {
        &self.b * Rational::from_integer(&self.alpha * &self.alpha)
    }

    pub fn discriminant(&self) -> Rational {
        discriminant(&self.twisted_a(), &self.twisted_b())
    }

    /// `x⁴ + a'x² + a'y² + y⁴ − b'`.
    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let a = self.twisted_a();
        let x2 = x * x;
        let y2 = y * y;
        &x2 * &x2 + &a * (&x2 + &y2) + &y2 * &y2 - self.twisted_b()
    }

    pub fn contains(&self, p: &QuarticPoint) -> bool {
        self.eval(&p.x, &p.y).is_zero()
    }

    fn check(&self, p: &QuarticPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(format!("{p} is not on {self}")))
        }
    }

    /// Rational `y` with `(x, y)` on the curve.
    pub fn ys_at(&self, x: &Rational) -> BTreeSet<Rational> {
        // y⁴ + a'y² + (x⁴ + a'x² − b') = 0 as a quadratic in y²
        let a = self.twisted_a();
        let x2 = x * x;
        let c = &x2 * &x2 + &a * &x2 - self.twisted_b();
        let mut out = BTreeSet::new();
        for s in rational_quadratic_roots(&Rational::one(), &a, &c) {
            if let Some(r) = rational_sqrt(&s) {
                out.insert(-r.clone());
                out.insert(r);
            }
        }
        out
    }
}

impl fmt::Display for SymQuartic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_({}, {})", self.a, self.b)?;
        if !self.alpha.is_one() {
            write!(f, "^({})", self.alpha)?;
        }
        Ok(())
    }
}

/// Rational roots of `a t² + b t + c` with `a ≠ 0`.
pub(crate) fn rational_quadratic_roots(a: &Rational, b: &Rational, c: &Rational) -> Vec<Rational> {
    let disc = b * b - int(4) * a * c;
    match rational_sqrt(&disc) {
        None => Vec::new(),
        Some(r) if r.is_zero() => vec![-b / (int(2) * a)],
        Some(r) => vec![(-b - &r) / (int(2) * a), (-b + r) / (int(2) * a)],
    }
}

/// `E^(α)`: `y² = x(x² − 4a'x − (16b' + 4a'²))`.
pub fn companion_curve(f: &SymQuartic) -> Result<EllipticCurve> {
    let a = f.twisted_a();
    let b = f.twisted_b();
    EllipticCurve::new(int(-4) * &a, -(int(16) * b + int(4) * &a * &a), Rational::zero())
}

fn phi1_raw(a: &Rational, x: &Rational, y: &Rational) -> ECPoint {
    ECPoint::new(int(-4) * x * x, x * (int(8) * y * y + int(4) * a))
}

/// `φ1(x, y) = (−4x², x(8y² + 4a'))`, `φ2 = φ1 ∘ swap`.
pub fn phi(i: u8, p: &QuarticPoint, f: &SymQuartic) -> Result<ECPoint> {
    f.check(p)?;
    let a = f.twisted_a();
    match i {
        1 => Ok(phi1_raw(&a, &p.x, &p.y)),
        2 => Ok(phi1_raw(&a, &p.y, &p.x)),
        _ => precondition(format!("map index must be 1 or 2, got {i}")),
    }
}

/// All rational points of `F` sent to `q` by `φ_i`.
pub fn phi_preimages(i: u8, q: &ECPoint, f: &SymQuartic) -> Result<BTreeSet<QuarticPoint>> {
    if i != 1 && i != 2 {
        return precondition(format!("map index must be 1 or 2, got {i}"));
    }
    let ECPoint::Affine { x: qx, y: qy } = q else {
        return precondition("the point at infinity has no affine preimage");
    };
    let a = f.twisted_a();
    let mut out = BTreeSet::new();
    if let Some(x) = rational_sqrt(&(-qx / int(4))) {
        if x.is_zero() {
            // Every point on the line x = 0 maps to (0, 0).
            if qy.is_zero() {
                for y in f.ys_at(&x) {
                    out.insert(QuarticPoint::new(x.clone(), y));
                }
            }
        } else {
            for sx in [x.clone(), -x] {
                let y2 = (qy / &sx - int(4) * &a) / int(8);
                if let Some(y) = rational_sqrt(&y2) {
                    for sy in [y.clone(), -y] {
                        let p = QuarticPoint::new(sx.clone(), sy);
                        if f.contains(&p) {
                            out.insert(p);
                        }
                    }
                }
            }
        }
    }
    if i == 2 {
        out = out.into_iter().map(|p| p.swap()).collect();
    }
    Ok(out)
}

/// `Π_v max{|1/4|_v, |a/4|_v, |a|_v, |b|_v}` over all places of ℚ.
pub fn kappa(a: &Rational, b: &Rational) -> Rational {
    let quarter = Rational::new(BigInt::one(), BigInt::from(4));
    let a4 = a / int(4);
    let terms = [quarter, a4, a.clone(), b.clone()];
    let mut k = terms
        .iter()
        .map(|t| t.abs())
        .max()
        .unwrap();
    let mut primes: BTreeSet<BigInt> = BTreeSet::new();
    primes.insert(BigInt::from(2));
    for q in [a, b] {
        for n in [q.numer(), q.denom()] {
            if !n.is_zero() && !n.abs().is_one() {
                primes.extend(factorize(n).into_iter().map(|(p, _)| p));
            }
        }
    }
    for p in primes {
        k *= terms.iter().map(|t| p_adic_abs(t, &p)).max().unwrap();
    }
    k
}

/// Both sides of `2h_F(P) − log 12 − log κ ≤ h(x(φ_i(P))) ≤ 2h_F(P) + log 24`
/// for `i = 1, 2`, compared exactly after exponentiating.
pub fn height_sandwich_check(p: &QuarticPoint, f: &SymQuartic) -> Result<bool> {
    f.check(p)?;
    let k = kappa(&f.twisted_a(), &f.twisted_b());
    let hf = p.projective_max();
    let hf2 = Rational::from_integer(&hf * &hf);
    for i in [1, 2] {
        let img = phi(i, p, f)?;
        let x = img.x().expect("affine image");
        let he = Rational::from_integer(x.numer().abs().max(x.denom().clone()));
        if hf2 > int(12) * &k * &he || he > int(24) * &hf2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The closed form for `x(φ1(P) + φ2(P))`; `None` on the pole `x + y = 0`.
pub fn phi_sum_x_closed_form(p: &QuarticPoint, f: &SymQuartic) -> Result<Option<Rational>> {
    f.check(p)?;
    let (x, y) = (&p.x, &p.y);
    let s = x + y;
    if s.is_zero() {
        return Ok(None);
    }
    let a = f.twisted_a();
    let two = int(2);
    let xy = x * y;
    let num = (&two * &xy) * (&two * &xy)
        + (&two * &s) * (&two * &s) * (x * x + y * y)
        + int(4) * &a * (x * x + &xy + y * y)
        + &a * &a;
    Ok(Some(num / (&s * &s)))
}

/// `φ1(P) + φ2(P)` by the group law.
pub fn phi_sum(p: &QuarticPoint, f: &SymQuartic) -> Result<ECPoint> {
    let e = companion_curve(f)?;
    e.add(&phi(1, p, f)?, &phi(2, p, f)?)
}

/// Degrees of the covering maps read off from the closed forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreePairing {
    pub deg_phi1: u32,
    pub deg_phi2: u32,
    pub deg_sum: u32,
    pub pairing_11: i64,
    pub pairing_12: i64,
}

/// Degree data for `φ1`, `φ2` and `φ1 + φ2`.
///
/// The x-coordinate of each map is a ratio of binary forms restricted to
/// the quartic; when the forms share no zero on the curve its degree is
/// `4 · (form degree)` by Bézout, and the map to `E` has half that degree.
/// Base-point freeness is checked with resultants along each component of
/// the denominator.
pub fn degree_pairing(f: &SymQuartic) -> Result<DegreePairing> {
    let a = f.twisted_a();
    let b = f.twisted_b();
    let q = |c: &[Rational]| RatPoly::new(c.to_vec());

    // x∘φ1 = −4x²/z² has no base point (x = z = 0 forces y = 0), so it
    // has degree 8 on the quartic.
    let deg_phi1: u32 = 4;

    // At infinity: y = t·x with t⁴ + 1 = 0, numerator 4t² + 4(1+t)²(1+t²).
    let at_infinity = q(&[int(1), int(0), int(0), int(0), int(1)]);
    let num_inf = q(&[int(4), int(8), int(12), int(8), int(4)]);
    if at_infinity.resultant(&num_inf).is_zero() {
        return Err(Error::Inconsistent("φ1 + φ2 has a base point at infinity".into()));
    }
    // On x + y = 0: curve 2x⁴ + 2a x² − b, numerator (2x² + a)².
    let on_antidiagonal = q(&[-b.clone(), int(0), int(2) * &a, int(0), int(2)]);
    let half = q(&[a.clone(), int(0), int(2)]);
    if on_antidiagonal.resultant(&(&half * &half)).is_zero() {
        return Err(Error::Inconsistent("φ1 + φ2 has a base point on x + y = 0".into()));
    }
    let deg_sum: u32 = 8;

    // ⟨φ, φ⟩ = ½(deg 2φ − 2 deg φ) with deg 2φ = 4 deg φ.
    let pairing_11 = (4 * deg_phi1 as i64 - 2 * deg_phi1 as i64) / 2;
    let pairing_12 = (deg_sum as i64 - 2 * deg_phi1 as i64) / 2;
    Ok(DegreePairing {
        deg_phi1,
        deg_phi2: deg_phi1,
        deg_sum,
        pairing_11,
        pairing_12,
    })
}

/// `C: X^2m + aX^m + aY^m + Y^2m = b` with the genus `m − 1` curve
/// `B: y² = −x^2m − a x^m + (a²/4 + b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HigherSym {
    pub m: u32,
    #[serde(with = "serde_rational")]
    pub a: Rational,
    #[serde(with = "serde_rational")]
    pub b: Rational,
}

impl HigherSym {
    pub fn new(m: u32, a: Rational, b: Rational) -> Result<Self> {
        if m < 3 || m.is_multiple_of(2) {
            return precondition(format!("m must be odd and at least 3, got {m}"));
        }
        Ok(HigherSym { m, a, b })
    }

    pub fn on_c(&self, x: &Rational, y: &Rational) -> bool {
        let xm = num_traits::pow(x.clone(), self.m as usize);
        let ym = num_traits::pow(y.clone(), self.m as usize);
        &xm * &xm + &self.a * &xm + &self.a * &ym + &ym * &ym == self.b
    }

    pub fn on_b(&self, x: &Rational, y: &Rational) -> bool {
        let xm = num_traits::pow(x.clone(), self.m as usize);
        let c = &self.a * &self.a / int(4) + &self.b;
        y * y == -(&xm * &xm) - &self.a * &xm + c
    }
}

/// Whether `(x, y^m + a/2)` and `(y, x^m + a/2)` both lie on `B`, which is
/// what makes the two maps into the Jacobian well defined.
pub fn higher_membership(h: &HigherSym, x: &Rational, y: &Rational) -> Result<bool> {
    if !h.on_c(x, y) {
        return Err(Error::NotOnCurve(format!("({x}, {y}) is not on C")));
    }
    let half_a = &h.a / int(2);
    let ym = num_traits::pow(y.clone(), h.m as usize);
    let xm = num_traits::pow(x.clone(), h.m as usize);
    Ok(h.on_b(x, &(ym + &half_a)) && h.on_b(y, &(xm + half_a)))
}

/// Points at infinity `[1 : ζ : 0]` with `ζ^2m + 1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinityReport {
    pub m: u32,
    pub equation: String,
    #[serde(with = "serde_rational::vec")]
    pub rational_zetas: Vec<Rational>,
}

pub fn infinity_points(h: &HigherSym) -> InfinityReport {
    let mut c = vec![BigInt::zero(); 2 * h.m as usize + 1];
    c[0] = BigInt::one();
    c[2 * h.m as usize] = BigInt::one();
    let poly = IntPoly::new(c);
    InfinityReport {
        m: h.m,
        equation: format!("{poly} = 0"),
        rational_zetas: poly.rational_roots().into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn x4() -> SymQuartic {
        SymQuartic::from_ints(-4, -3, 1).unwrap()
    }

    #[test]
    fn companion_models() {
        let e = companion_curve(&x4()).unwrap();
        assert_eq!((e.a2(), e.a4()), (&int(16), &int(-16)));
        let e = companion_curve(&SymQuartic::from_ints(-4, -6, 1).unwrap()).unwrap();
        assert_eq!((e.a2(), e.a4()), (&int(16), &int(32)));
        let e = companion_curve(&SymQuartic::from_ints(-4, -6, 5).unwrap()).unwrap();
        assert_eq!((e.a2(), e.a4()), (&int(80), &int(800)));
        assert!(SymQuartic::from_ints(1, 0, 1).is_err());
        assert!(SymQuartic::from_ints(-4, -6, 12).is_err());
    }

    #[test]
    fn maps_and_preimages() {
        let f = x4();
        let p = QuarticPoint::from_ints(1, 0);
        assert_eq!(phi(1, &p, &f).unwrap(), ECPoint::from_ints(-4, -16));
        let q = QuarticPoint::from_ints(-2, 1);
        assert_eq!(phi(1, &q, &f).unwrap(), ECPoint::from_ints(-16, 16));

        let pre = phi_preimages(1, &ECPoint::from_ints(-4, -16), &f).unwrap();
        let want: BTreeSet<_> = [(1, 0), (-1, 2), (-1, -2)]
            .iter()
            .map(|&(x, y)| QuarticPoint::from_ints(x, y))
            .collect();
        assert_eq!(pre, want);
        let pre = phi_preimages(1, &ECPoint::from_ints(-16, 16), &f).unwrap();
        let want: BTreeSet<_> = [(-2, 1), (-2, -1)]
            .iter()
            .map(|&(x, y)| QuarticPoint::from_ints(x, y))
            .collect();
        assert_eq!(pre, want);
        assert!(phi_preimages(1, &ECPoint::from_ints(4, -16), &f).unwrap().is_empty());
        let at_zero = phi_preimages(1, &ECPoint::from_ints(0, 0), &f).unwrap();
        assert_eq!(at_zero.len(), 2);
        assert!(phi_preimages(1, &ECPoint::Infinity, &f).is_err());
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(&int(-4), &int(-3)), int(16));
        assert_eq!(kappa(&int(-4), &int(-6)), int(24));
        assert_eq!(kappa(&int(0), &int(1)), int(4));
        assert_eq!(kappa(&rat(1, 3), &int(1)), int(12));
    }

    #[test]
    fn closed_form_at_small_point() {
        let f = x4();
        let p = QuarticPoint::from_ints(1, 0);
        assert_eq!(phi_sum_x_closed_form(&p, &f).unwrap(), Some(int(4)));
        assert_eq!(phi_sum(&p, &f).unwrap().x(), Some(&int(4)));
        let on_pole = SymQuartic::through_point(int(-4), &int(3), &int(-3)).unwrap();
        assert_eq!(phi_sum_x_closed_form(&on_pole.1, &on_pole.0).unwrap(), None);
        assert_eq!(phi_sum(&on_pole.1, &on_pole.0).unwrap(), ECPoint::Infinity);
    }

    #[test]
    fn pairing() {
        let d = degree_pairing(&x4()).unwrap();
        assert_eq!((d.deg_phi1, d.deg_sum, d.pairing_11, d.pairing_12), (4, 8, 4, 0));
    }

    #[test]
    fn higher_family() {
        let h = HigherSym::new(3, int(0), int(2)).unwrap();
        assert!(higher_membership(&h, &int(1), &int(1)).unwrap());
        assert!(higher_membership(&h, &int(1), &int(2)).is_err());
        assert!(infinity_points(&h).rational_zetas.is_empty());
        assert!(HigherSym::new(4, int(0), int(1)).is_err());
    }
}
