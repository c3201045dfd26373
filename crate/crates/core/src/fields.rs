//! Prime-power finite fields GF(p^k) for q = p^k <= 64.
//!
//! Elements are stored as coefficient vectors over GF(p) (constant term
//! first) and reduced modulo a fixed monic irreducible polynomial. The
//! polynomials are the Conway polynomials for each (p, k), so element
//! indexing, and hence every matrix built on top of it, is reproducible.
//!
//! The canonical index of an element is the base-p number whose i-th digit
//! is the coefficient of x^i; index 0 is the zero element, index 1 is one.

use std::fmt;
use std::sync::Arc;

use crate::error::{QcextError, Result};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: usize = 64;

/// Conway polynomials, coefficients from the constant term upward.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 2, &[3, 6, 1]),
];

/// Parameters of GF(p^k).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    irreducible: Vec<u32>,
    q: usize,
}

impl FieldSpec {
    /// Builds a field from an explicit modulus, checking irreducibility by
    /// exhaustive trial division.
    pub fn new(p: u32, k: u32, irreducible: Vec<u32>) -> Result<Self> {
        if !is_prime(p as usize) {
            return Err(QcextError::InvalidParameter(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(QcextError::InvalidParameter("extension degree must be >= 1".into()));
        }
        let q = (p as usize)
            .checked_pow(k)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(QcextError::FieldTooLarge(usize::MAX))?;
        if irreducible.len() != k as usize + 1 || irreducible[k as usize] != 1 {
            return Err(QcextError::InvalidParameter(
                "modulus must be monic of degree k".into(),
            ));
        }
        if irreducible.iter().any(|&c| c >= p) {
            return Err(QcextError::InvalidParameter("modulus coefficient out of range".into()));
        }
        if !is_irreducible(&irreducible, p) {
            return Err(QcextError::InvalidParameter("modulus is reducible".into()));
        }
        Ok(FieldSpec { p, k, irreducible, q })
    }

    /// The field of order `q`, using the built-in polynomial table.
    pub fn for_order(q: usize) -> Result<Self> {
        if q > MAX_FIELD_ORDER {
            return Err(QcextError::FieldTooLarge(q));
        }
        let (p, k) = prime_power(q).ok_or(QcextError::NotPrimePower(q))?;
        if k == 1 {
            return FieldSpec::new(p, 1, vec![0, 1]);
        }
        let poly = CONWAY
            .iter()
            .find(|(pp, kk, _)| *pp == p && *kk == k)
            .map(|(_, _, c)| c.to_vec())
            .ok_or(QcextError::FieldTooLarge(q))?;
        FieldSpec::new(p, k, poly)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn irreducible(&self) -> &[u32] {
        &self.irreducible
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            spec: Arc::clone(self),
            coeffs: vec![0; self.k as usize],
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.element(1)
    }

    /// The element with canonical index `index`.
    ///
    /// Panics if `index >= q`.
    pub fn element(self: &Arc<Self>, index: usize) -> FieldElement {
        assert!(index < self.q, "field index {index} out of range for GF({})", self.q);
        let mut coeffs = Vec::with_capacity(self.k as usize);
        let mut rest = index;
        for _ in 0..self.k {
            coeffs.push((rest % self.p as usize) as u32);
            rest /= self.p as usize;
        }
        FieldElement {
            spec: Arc::clone(self),
            coeffs,
        }
    }

    /// Element from explicit coefficients (constant term first).
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(QcextError::InvalidParameter(format!(
                "coefficients {coeffs:?} do not describe an element of GF({})",
                self.q
            )));
        }
        Ok(FieldElement {
            spec: Arc::clone(self),
            coeffs: coeffs.to_vec(),
        })
    }
}

/// An element of GF(p^k) in polynomial representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Canonical base-p index.
    pub fn index(&self) -> usize {
        self.coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.spec.p as usize + c as usize)
    }

    fn pow(&self, mut e: usize) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.spec.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_unchecked(&acc, &base);
            }
            base = mul_unchecked(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})[{:?}]", self.spec.q, self.coeffs)
    }
}

fn check_same(x: &FieldElement, y: &FieldElement) -> Result<()> {
    if Arc::ptr_eq(&x.spec, &y.spec) || x.spec == y.spec {
        Ok(())
    } else {
        Err(QcextError::FieldMismatch)
    }
}

pub fn gf_add(x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    check_same(x, y)?;
    let p = x.spec.p;
    let coeffs = x
        .coeffs
        .iter()
        .zip(&y.coeffs)
        .map(|(a, b)| (a + b) % p)
        .collect();
    Ok(FieldElement {
        spec: Arc::clone(&x.spec),
        coeffs,
    })
}

pub fn gf_neg(x: &FieldElement) -> FieldElement {
    let p = x.spec.p;
    FieldElement {
        spec: Arc::clone(&x.spec),
        coeffs: x.coeffs.iter().map(|&a| (p - a) % p).collect(),
    }
}

pub fn gf_sub(x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    gf_add(x, &gf_neg(y))
}

pub fn gf_mul(x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    check_same(x, y)?;
    Ok(mul_unchecked(x, y))
}

fn mul_unchecked(x: &FieldElement, y: &FieldElement) -> FieldElement {
    let spec = &x.spec;
    let p = spec.p as u64;
    let k = spec.k as usize;
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &a) in x.coeffs.iter().enumerate() {
        for (j, &b) in y.coeffs.iter().enumerate() {
            prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
        }
    }
    // Reduce with x^k = -(m_0 + ... + m_{k-1} x^{k-1}).
    for deg in (k..prod.len()).rev() {
        let lead = prod[deg];
        if lead == 0 {
            continue;
        }
        prod[deg] = 0;
        for (t, &m) in spec.irreducible[..k].iter().enumerate() {
            let idx = deg - k + t;
            prod[idx] = (prod[idx] + (p - lead) * m as u64) % p;
        }
    }
    FieldElement {
        spec: Arc::clone(spec),
        coeffs: prod[..k].iter().map(|&c| c as u32).collect(),
    }
}

pub fn gf_inv(x: &FieldElement) -> Result<FieldElement> {
    if x.is_zero() {
        return Err(QcextError::ZeroInverse);
    }
    // x^(q-2) by Lagrange.
    Ok(x.pow(x.spec.q - 2))
}

/// Absolute trace Tr(x) = x + x^p + ... + x^(p^(k-1)), an element of GF(p).
pub fn gf_trace(x: &FieldElement) -> u32 {
    let p = x.spec.p as usize;
    let mut acc = x.spec.zero();
    let mut term = x.clone();
    for _ in 0..x.spec.k {
        acc = gf_add(&acc, &term).expect("same field");
        term = term.pow(p);
    }
    debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
    acc.coeffs[0]
}

/// All q elements in canonical index order.
pub fn enumerate(spec: &Arc<FieldSpec>) -> Vec<FieldElement> {
    (0..spec.q).map(|i| spec.element(i)).collect()
}

/// Addition, multiplication and trace tables over canonical indices.
#[derive(Clone, Debug)]
pub struct FieldTables {
    spec: Arc<FieldSpec>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u32>,
}

impl FieldTables {
    pub fn new(spec: Arc<FieldSpec>) -> Self {
        let q = spec.q;
        let elems = enumerate(&spec);
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                add[i * q + j] = gf_add(x, y).expect("same field").index() as u16;
                mul[i * q + j] = mul_unchecked(x, y).index() as u16;
            }
        }
        let neg = elems.iter().map(|x| gf_neg(x).index() as u16).collect();
        let inv = elems
            .iter()
            .map(|x| gf_inv(x).map(|y| y.index() as u16).unwrap_or(0))
            .collect();
        let trace = elems.iter().map(gf_trace).collect();
        FieldTables {
            spec,
            add,
            mul,
            neg,
            inv,
            trace,
        }
    }

    pub fn for_order(q: usize) -> Result<Self> {
        Ok(FieldTables::new(Arc::new(FieldSpec::for_order(q)?)))
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn q(&self) -> usize {
        self.spec.q
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.spec.q + y] as usize
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.spec.q + y] as usize
    }

    pub fn neg(&self, x: usize) -> usize {
        self.neg[x] as usize
    }

    /// Inverse of a nonzero element; `inv(0)` is reported as 0.
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x] as usize
    }

    pub fn trace(&self, x: usize) -> u32 {
        self.trace[x]
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Returns (p, k) with q = p^k, or None.
pub fn prime_power(q: usize) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p as u32, k))
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                divisor.push((rest % p as usize) as u32);
                rest /= p as usize;
            }
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(num: &[u32], monic: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = monic.len() - 1;
    let p = p as u64;
    for deg in (dd..r.len()).rev() {
        let lead = r[deg];
        if lead == 0 {
            continue;
        }
        for (t, &m) in monic.iter().enumerate() {
            let idx = deg - dd + t;
            r[idx] = (r[idx] + (p - lead) * m as u64 % p) % p;
        }
    }
    r.truncate(dd);
    r.into_iter().map(|c| c as u32).collect()
}
