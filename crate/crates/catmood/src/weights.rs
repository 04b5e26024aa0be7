//! Interpolatory differentiation weights on uniform 2P-point stencils.
//!
//! A table holds the coefficients `gamma_j` such that
//!
//! ```text
//! f^(k)(x_i + q*dx)  ~=  (1/dx^k) * sum_{j=-P+1}^{P} gamma_j * f(x_{i+j})
//! ```
//!
//! i.e. the k-th derivative of the Lagrange interpolant through the 2P
//! nodes `x_{i-P+1}, ..., x_{i+P}`, evaluated at offset `q` (in units of
//! `dx`). Node coordinates are kept in integer units so one table serves
//! every grid; the caller supplies the spacing at application time.
//!
//! Tables are constructed in exact rational arithmetic and only rounded
//! to `f64` at the end, so the monomial-exactness property holds to
//! machine precision even for P = 3.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::WeightError;

/// Exact rational number, reduced, with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const HALF: Rational = Rational { num: 1, den: 2 };

    /// Reduced rational `num/den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational denominator must be nonzero");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn add(self, other: Rational) -> Rational {
        let num =
            (self.num as i128) * (other.den as i128) + (other.num as i128) * (self.den as i128);
        let den = (self.den as i128) * (other.den as i128);
        Rational::from_i128(num, den)
    }

    fn mul(self, other: Rational) -> Rational {
        let num = (self.num as i128) * (other.num as i128);
        let den = (self.den as i128) * (other.den as i128);
        Rational::from_i128(num, den)
    }

    fn div(self, other: Rational) -> Rational {
        assert!(other.num != 0, "rational division by zero");
        let num = (self.num as i128) * (other.den as i128);
        let den = (self.den as i128) * (other.num as i128);
        Rational::from_i128(num, den)
    }

    fn from_i128(num: i128, den: i128) -> Rational {
        assert!(den != 0);
        let sign: i128 = if den < 0 { -1 } else { 1 };
        let g = gcd128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let num = sign * num / g;
        let den = sign * den / g;
        assert!(
            num.abs() <= i64::MAX as i128 && den <= i64::MAX as i128,
            "rational overflow in weight construction"
        );
        Rational {
            num: num as i64,
            den: den as i64,
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Polynomial with exact rational coefficients, ascending powers.
#[derive(Clone)]
struct Poly(Vec<Rational>);

impl Poly {
    fn one() -> Self {
        Poly(vec![Rational::from(1)])
    }

    /// Multiply in place by the monic factor `(x - root)`.
    fn mul_linear(&mut self, root: Rational) {
        let n = self.0.len();
        let mut out = vec![Rational::ZERO; n + 1];
        let neg_root = Rational::ZERO.add(Rational::from(-1).mul(root));
        for (i, &c) in self.0.iter().enumerate() {
            out[i + 1] = out[i + 1].add(c);
            out[i] = out[i].add(c.mul(neg_root));
        }
        self.0 = out;
    }

    fn scale(&mut self, factor: Rational) {
        for c in &mut self.0 {
            *c = c.mul(factor);
        }
    }

    fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![Rational::ZERO]);
        }
        Poly(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c.mul(Rational::from(i as i64 + 1)))
                .collect(),
        )
    }

    fn eval(&self, x: Rational) -> Rational {
        let mut acc = Rational::ZERO;
        for &c in self.0.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

/// Differentiation/interpolation coefficients for one `(P, k, q)` triple.
///
/// `gamma[w]` multiplies the value at node `j = -P+1+w`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    p: usize,
    k: usize,
    q: Rational,
    gamma: Vec<f64>,
}

impl WeightTable {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> Rational {
        self.q
    }

    /// Coefficients over nodes `j = -P+1 ..= P`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Leftmost node index `-P+1`.
    pub fn first_node(&self) -> i64 {
        1 - self.p as i64
    }

    /// `sum_j gamma_j * values_j / spacing^k`.
    ///
    /// The same table differentiates in space (spacing = dx) or in time
    /// (spacing = dt); only the node axis changes meaning.
    pub fn apply(&self, values: &[f64], spacing: f64) -> f64 {
        debug_assert_eq!(values.len(), self.gamma.len());
        let mut acc = 0.0;
        for (g, v) in self.gamma.iter().zip(values) {
            acc += g * v;
        }
        if self.k == 0 {
            acc
        } else {
            acc / spacing.powi(self.k as i32)
        }
    }
}

/// Build the unique k-th-derivative weights at offset `q` over the 2P
/// nodes `j = -P+1 ..= P` (integer units of the spacing).
///
/// Exact for every polynomial of degree at most `2P-1`. Fails when
/// `k >= 2P`, since the interpolant has degree `2P-1`.
pub fn make_weights(p: usize, k: usize, q: Rational) -> Result<WeightTable, WeightError> {
    assert!(p >= 1, "stencil half-width P must be at least 1");
    let n_nodes = 2 * p;
    if k >= n_nodes {
        return Err(WeightError::DerivativeOrderTooHigh { k, n_nodes });
    }
    let nodes: Vec<i64> = (1 - p as i64..=p as i64).collect();
    let mut gamma = Vec::with_capacity(n_nodes);
    for &j0 in &nodes {
        // Lagrange basis polynomial for node j0, differentiated k times.
        let mut basis = Poly::one();
        let mut denom = Rational::from(1);
        for &j in &nodes {
            if j != j0 {
                basis.mul_linear(Rational::from(j));
                denom = denom.mul(Rational::from(j0 - j));
            }
        }
        basis.scale(Rational::from(1).div(denom));
        for _ in 0..k {
            basis = basis.derivative();
        }
        gamma.push(basis.eval(q).to_f64());
    }
    Ok(WeightTable { p, k, q, gamma })
}

/// Conservative interface-value weights over the 2P nodes
/// `j = -P+1 ..= P`: the value at the central face `x_i + dx/2` of the
/// function whose sliding cell average reproduces the nodal data.
///
/// These are what a conservative point-value scheme needs at the
/// interface: the telescoped difference
/// `(sum_j w_j f_{i+j} - sum_j w_j f_{i-1+j}) / dx` equals `f'(x_i)`
/// exactly for polynomials up to degree 2P, which plain midpoint
/// interpolation only achieves up to degree 2 regardless of P.
///
/// Built from the primitive-function trick: treat the nodal values as
/// cell averages, interpolate the primitive through the 2P+1
/// surrounding faces, differentiate at the central face.
pub fn make_face_reconstruction(p: usize) -> WeightTable {
    assert!(p >= 1, "stencil half-width P must be at least 1");
    let n = 2 * p;
    // Primitive nodes at the faces m + 1/2 for m = -P ..= P.
    let nodes: Vec<Rational> = (-(p as i64)..=p as i64)
        .map(|m| Rational::new(2 * m + 1, 2))
        .collect();
    // lambda_m = derivative at 1/2 of the Lagrange basis of node m.
    let mut lambda = Vec::with_capacity(n + 1);
    for (m, &node_m) in nodes.iter().enumerate() {
        let mut basis = Poly::one();
        let mut denom = Rational::from(1);
        for (l, &node_l) in nodes.iter().enumerate() {
            if l != m {
                basis.mul_linear(node_l);
                denom = denom.mul(node_m.add(Rational::from(-1).mul(node_l)));
            }
        }
        basis.scale(Rational::from(1).div(denom));
        lambda.push(basis.derivative().eval(Rational::HALF));
    }
    // The primitive at face m+1/2 sums the nodal values j <= m, so the
    // weight of node j collects every lambda_m with m >= j.
    let gamma = (1 - p as i64..=p as i64)
        .map(|j| {
            let mut w = Rational::ZERO;
            for m in j..=p as i64 {
                w = w.add(lambda[(m + p as i64) as usize]);
            }
            w.to_f64()
        })
        .collect();
    WeightTable {
        p,
        k: 0,
        q: Rational::HALF,
        gamma,
    }
}

/// Shared cache of weight tables keyed by `(P, k, q)`.
///
/// Tables are immutable once built; concurrent readers are fine.
#[derive(Default)]
pub struct WeightCache {
    map: RwLock<HashMap<(usize, usize, Rational), Arc<WeightTable>>>,
}

impl WeightCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: usize, k: usize, q: Rational) -> Result<Arc<WeightTable>, WeightError> {
        if let Some(hit) = self.map.read().unwrap().get(&(p, k, q)) {
            return Ok(Arc::clone(hit));
        }
        let table = Arc::new(make_weights(p, k, q)?);
        let mut map = self.map.write().unwrap();
        Ok(Arc::clone(map.entry((p, k, q)).or_insert(table)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn midpoint_interpolation_p1() {
        let t = make_weights(1, 0, Rational::HALF).unwrap();
        assert_eq!(t.gamma(), &[0.5, 0.5]);
    }

    #[test]
    fn two_point_difference() {
        let t = make_weights(1, 1, Rational::ZERO).unwrap();
        assert_eq!(t.gamma(), &[-1.0, 1.0]);
    }

    #[test]
    fn four_point_first_derivative_at_node_zero() {
        // Differentiating the four Lagrange basis polynomials over
        // nodes {-1,0,1,2} at x=0 gives these coefficients exactly.
        let t = make_weights(2, 1, Rational::ZERO).unwrap();
        let expected = [-1.0 / 3.0, -0.5, 1.0, -1.0 / 6.0];
        for (g, e) in t.gamma().iter().zip(expected) {
            assert_abs_diff_eq!(g, &e, epsilon = 0.0);
        }
    }

    #[test]
    fn apply_reproduces_divided_difference() {
        let t = make_weights(1, 1, Rational::ZERO).unwrap();
        assert_eq!(t.apply(&[3.0, 5.0], 0.5), 4.0);
    }

    #[test]
    fn apply_on_constants() {
        let d = make_weights(3, 1, Rational::from(2)).unwrap();
        assert_abs_diff_eq!(d.apply(&[7.0; 6], 0.1), 0.0, epsilon = 1e-12);
        let i = make_weights(3, 0, Rational::HALF).unwrap();
        assert_abs_diff_eq!(i.apply(&[7.0; 6], 0.1), 7.0, epsilon = 1e-12);
    }

    #[test]
    fn weight_sums() {
        for p in 1..=3 {
            for k in 0..2 * p {
                let t = make_weights(p, k, Rational::HALF).unwrap();
                let sum: f64 = t.gamma().iter().sum();
                let expect = if k == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(sum, expect, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn midpoint_interpolation_is_symmetric() {
        // gamma_j == gamma_{1-j} for k=0, q=1/2.
        for p in 1..=3 {
            let t = make_weights(p, 0, Rational::HALF).unwrap();
            let g = t.gamma();
            for w in 0..g.len() {
                assert_eq!(g[w], g[g.len() - 1 - w], "p={p} w={w}");
            }
        }
    }

    /// Independent oracle: evaluate the k-th derivative of x^s at q
    /// analytically and compare against the weighted nodal sum.
    fn monomial_derivative(s: usize, k: usize, q: f64) -> f64 {
        if k > s {
            return 0.0;
        }
        let mut coeff = 1.0;
        for i in 0..k {
            coeff *= (s - i) as f64;
        }
        coeff * q.powi((s - k) as i32)
    }

    #[test]
    fn monomial_exactness_up_to_degree_2p_minus_1() {
        let offsets = |p: i64| {
            let mut qs = vec![Rational::HALF, Rational::ZERO];
            qs.extend((1 - p..=p).map(Rational::from));
            qs
        };
        for p in 1usize..=3 {
            for q in offsets(p as i64) {
                for k in 0..2 * p {
                    let t = make_weights(p, k, q).unwrap();
                    for s in 0..2 * p {
                        let values: Vec<f64> = (1 - p as i64..=p as i64)
                            .map(|j| (j as f64).powi(s as i32))
                            .collect();
                        let got = t.apply(&values, 1.0);
                        let want = monomial_derivative(s, k, q.to_f64());
                        assert_abs_diff_eq!(got, want, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn face_reconstruction_known_coefficients() {
        assert_eq!(make_face_reconstruction(1).gamma(), &[0.5, 0.5]);
        let w4 = make_face_reconstruction(2);
        let expect4 = [-1.0 / 12.0, 7.0 / 12.0, 7.0 / 12.0, -1.0 / 12.0];
        for (g, e) in w4.gamma().iter().zip(expect4) {
            assert_abs_diff_eq!(g, &e, epsilon = 1e-16);
        }
        let w6 = make_face_reconstruction(3);
        let expect6 = [
            1.0 / 60.0,
            -8.0 / 60.0,
            37.0 / 60.0,
            37.0 / 60.0,
            -8.0 / 60.0,
            1.0 / 60.0,
        ];
        for (g, e) in w6.gamma().iter().zip(expect6) {
            assert_abs_diff_eq!(g, &e, epsilon = 1e-16);
        }
    }

    #[test]
    fn face_reconstruction_difference_is_an_exact_derivative() {
        // (sum_j w_j m_{i+j} - sum_j w_j m_{i-1+j}) / dx == m'(x_i)
        // for monomials up to degree 2P.
        for p in 1usize..=3 {
            let w = make_face_reconstruction(p);
            for s in 0..=2 * p {
                let m = |x: f64| x.powi(s as i32);
                let plus: f64 = w
                    .gamma()
                    .iter()
                    .zip(1 - p as i64..=p as i64)
                    .map(|(g, j)| g * m(j as f64))
                    .sum();
                let minus: f64 = w
                    .gamma()
                    .iter()
                    .zip(1 - p as i64..=p as i64)
                    .map(|(g, j)| g * m(j as f64 - 1.0))
                    .sum();
                let want = if s == 1 { 1.0 } else { 0.0 }; // d/dx x^s at 0
                assert_abs_diff_eq!(plus - minus, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn derivative_order_too_high_is_rejected() {
        let err = make_weights(2, 4, Rational::ZERO).unwrap_err();
        assert_eq!(
            err,
            WeightError::DerivativeOrderTooHigh { k: 4, n_nodes: 4 }
        );
    }

    #[test]
    fn cache_returns_identical_tables() {
        let cache = WeightCache::new();
        let a = cache.get(3, 2, Rational::ZERO).unwrap();
        let b = cache.get(3, 2, Rational::ZERO).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(
            a.gamma(),
            make_weights(3, 2, Rational::ZERO).unwrap().gamma()
        );
    }

    #[test]
    fn rational_display_and_accessors() {
        let q = Rational::new(-2, -4);
        assert_eq!((q.numer(), q.denom()), (1, 2));
        assert_eq!(q.to_string(), "1/2");
        assert_eq!(Rational::from(3).to_string(), "3");
    }
}
