//! Exact arithmetic in the field pair GF(q) ⊂ GF(q²).
//!
//! GF(q²) is built as GF(p)[u]/(m(u)) with `m` the smallest monic irreducible
//! polynomial of degree 2h over GF(p) (coefficients compared as the integer
//! `Σ c_i p^i`). An element is stored as that same integer, so the derived
//! `Ord` on [`Fq2Element`] is the canonical element order used everywhere for
//! enumeration and export.
//!
//! GF(q) is identified with `{x : x^q = x}`. Its elements carry integer
//! *labels* `0..q`: label `Σ c_i p^i` is the element `Σ c_i r^i`, where `r` is
//! the smallest root in GF(q²) of the smallest monic irreducible polynomial of
//! degree h over GF(p). For prime q the label is the residue itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported value of q².
pub const MAX_ORDER: u64 = 1 << 20;
/// Fields up to this order get exp/log/frobenius tables.
const TABLE_LIMIT: u32 = 1 << 16;
const NOT_IN_SUBFIELD: u32 = u32::MAX;

/// An element of GF(q²), identified by its canonical index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fq2Element(u32);

impl Fq2Element {
    pub const ZERO: Self = Fq2Element(0);
    pub const ONE: Self = Fq2Element(1);

    /// Canonical index `Σ c_i p^i` of the coordinate vector.
    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Caller guarantees `i` is below the field order.
    pub(crate) const fn from_index_unchecked(i: u32) -> Self {
        Fq2Element(i)
    }
}

/// Polynomials over GF(p), coefficient vectors low degree first, trimmed.
mod gfp {
    pub(super) fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub(super) fn inv(x: u32, p: u32) -> u32 {
        debug_assert!(!x.is_multiple_of(p));
        pow(x, p as u64 - 2, p)
    }

    pub(super) fn pow(x: u32, mut e: u64, p: u32) -> u32 {
        let (mut base, mut acc) = (x as u64 % p as u64, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        acc as u32
    }

    pub(super) fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let len = a.len().max(b.len());
        let out = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub(super) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    /// Quotient and remainder of `a` by nonzero `b`.
    pub(super) fn divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let b = trim(b.to_vec());
        assert!(!b.is_empty(), "polynomial division by zero");
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let lead_inv = inv(*b.last().unwrap(), p) as u64;
        let mut quot = vec![0u32; r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = (*r.last().unwrap() as u64 * lead_inv % p as u64) as u32;
            quot[shift] = c;
            for (i, &bc) in b.iter().enumerate() {
                let t = (c as u64 * bc as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
            r = trim(r);
        }
        (trim(quot), r)
    }

    pub(super) fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        divrem(a, b, p).1
    }

    pub(super) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub(super) fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Ben-Or irreducibility test for a monic polynomial of degree ≥ 1.
    pub(super) fn is_irreducible(f: &[u32], p: u32) -> bool {
        let d = f.len() - 1;
        let x = vec![0, 1];
        let mut t = x.clone();
        for _ in 1..=d / 2 {
            t = powmod(&t, p as u64, f, p);
            let g = gcd(f, &sub(&t, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// Smallest monic irreducible polynomial of degree `d` over GF(p), ordered
    /// by the integer `Σ c_i p^i` of its lower coefficients.
    pub(super) fn smallest_irreducible(d: usize, p: u32) -> Vec<u32> {
        let count = (p as u64).pow(d as u32);
        (0..count)
            .map(|code| {
                let mut f = Vec::with_capacity(d + 1);
                let mut c = code;
                for _ in 0..d {
                    f.push((c % p as u64) as u32);
                    c /= p as u64;
                }
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree")
    }
}

fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut h) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        h += 1;
    }
    (rest == 1).then_some((p as u32, h))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    frob: Vec<u32>,
}

/// Serializable description of a [`FieldCtx`]. Elements are digit vectors
/// over GF(p) in basis order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescription {
    pub p: u32,
    pub h: u32,
    pub q: u32,
    pub modulus_q: Vec<u32>,
    pub modulus_q2: Vec<u32>,
    pub epsilon: Vec<u32>,
    pub theta: Vec<u32>,
    pub transversal: Vec<Vec<u32>>,
}

/// GF(q) ⊂ GF(q²) together with the basis element ε and the transversal C.
///
/// Immutable after construction.
pub struct FieldCtx {
    p: u32,
    h: u32,
    q: u32,
    order: u32,
    degree: usize,
    modulus_q: Vec<u32>,
    modulus_q2: Vec<u32>,
    tables: Option<Tables>,
    subfield: Vec<Fq2Element>,
    subfield_label: Vec<u32>,
    epsilon: Fq2Element,
    theta: Fq2Element,
    transversal: Vec<Fq2Element>,
    t0: Vec<Fq2Element>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("h", &self.h)
            .field("modulus_q2", &self.modulus_q2)
            .field("epsilon", &self.epsilon)
            .finish()
    }
}

impl FieldCtx {
    /// Builds GF(q) ⊂ GF(q²) deterministically.
    pub fn new(q: u32) -> Result<Self> {
        let (p, h) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        let order64 = q as u64 * q as u64;
        if order64 > MAX_ORDER {
            return Err(Error::FieldTooLarge(order64));
        }
        let order = order64 as u32;
        let degree = 2 * h as usize;
        let mut ctx = FieldCtx {
            p,
            h,
            q,
            order,
            degree,
            modulus_q: gfp::smallest_irreducible(h as usize, p),
            modulus_q2: gfp::smallest_irreducible(degree, p),
            tables: None,
            subfield: Vec::new(),
            subfield_label: Vec::new(),
            epsilon: Fq2Element::ZERO,
            theta: Fq2Element::ZERO,
            transversal: Vec::new(),
            t0: Vec::new(),
        };
        if order <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        ctx.build_subfield();
        ctx.epsilon = ctx.choose_epsilon();
        ctx.theta = ctx.sub(ctx.frobenius(ctx.epsilon), ctx.epsilon);
        ctx.transversal = ctx.subfield.iter().map(|&s| ctx.mul(ctx.epsilon, s)).collect();
        ctx.t0 = ctx.subfield.iter().map(|&s| ctx.mul(ctx.theta, s)).collect();
        ctx.t0.sort();
        Ok(ctx)
    }

    fn build_tables(&self) -> Tables {
        let n = self.order as usize;
        let group = self.order as u64 - 1;
        let factors = prime_factors(group);
        let g = (1..self.order)
            .map(Fq2Element)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_with(g, group / r, Self::mul_poly) != Fq2Element::ONE)
            })
            .expect("GF(q^2)* is cyclic");
        let mut exp = vec![0u32; 2 * (n - 1)];
        let mut log = vec![0u32; n];
        let mut x = Fq2Element::ONE;
        for i in 0..n - 1 {
            exp[i] = x.0;
            exp[i + n - 1] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_poly(x, g);
        }
        let frob = (0..self.order)
            .map(|x| {
                if x == 0 {
                    0
                } else {
                    let l = log[x as usize] as u64 * self.q as u64 % group;
                    exp[l as usize]
                }
            })
            .collect();
        Tables { exp, log, frob }
    }

    fn build_subfield(&mut self) {
        let root = self
            .elements()
            .find(|&x| self.eval_gfp_poly(&self.modulus_q, x).is_zero())
            .expect("the degree-h modulus splits in GF(q^2)");
        let mut powers = Vec::with_capacity(self.h as usize);
        let mut r = Fq2Element::ONE;
        for _ in 0..self.h {
            powers.push(r);
            r = self.mul(r, root);
        }
        self.subfield_label = vec![NOT_IN_SUBFIELD; self.order as usize];
        self.subfield = (0..self.q)
            .map(|label| {
                let mut acc = Fq2Element::ZERO;
                let mut c = label;
                for &rp in &powers {
                    acc = self.add(acc, self.mul(self.from_prime(c % self.p), rp));
                    c /= self.p;
                }
                acc
            })
            .collect();
        for (label, x) in self.subfield.iter().enumerate() {
            self.subfield_label[x.0 as usize] = label as u32;
        }
    }

    fn choose_epsilon(&self) -> Fq2Element {
        if self.p == 2 {
            self.elements()
                .find(|&x| self.frobenius(x) == self.add(Fq2Element::ONE, x))
                .expect("an element with x^q = 1 + x exists in even characteristic")
        } else {
            self.elements()
                .find(|&x| !self.is_in_subfield(x) && self.trace(x).is_zero())
                .expect("a trace-zero element outside GF(q) exists in odd characteristic")
        }
    }

    fn eval_gfp_poly(&self, f: &[u32], x: Fq2Element) -> Fq2Element {
        f.iter()
            .rev()
            .fold(Fq2Element::ZERO, |acc, &c| self.add(self.mul(acc, x), self.from_prime(c)))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// q², the number of elements of GF(q²).
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus_q(&self) -> &[u32] {
        &self.modulus_q
    }

    pub fn modulus_q2(&self) -> &[u32] {
        &self.modulus_q2
    }

    /// All of GF(q²) in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fq2Element> + Clone {
        (0..self.order).map(Fq2Element)
    }

    pub fn element(&self, index: u64) -> Result<Fq2Element> {
        if index < self.order as u64 {
            Ok(Fq2Element(index as u32))
        } else {
            Err(Error::ElementOutOfRange { index, order: self.order })
        }
    }

    /// The image of the integer `c` in the prime field.
    pub fn from_prime(&self, c: u32) -> Fq2Element {
        Fq2Element(c % self.p)
    }

    /// Coordinates over GF(p) in the basis `1, u, …, u^{2h-1}`.
    pub fn digits(&self, x: Fq2Element) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree);
        let mut v = x.0;
        for _ in 0..self.degree {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Fq2Element> {
        if digits.len() > self.degree || digits.iter().any(|&d| d >= self.p) {
            return Err(Error::ParseElement(format!("{digits:?}")));
        }
        Ok(Fq2Element(digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)))
    }

    /// Canonical text form: GF(p) digits in basis order joined by `:`.
    pub fn format(&self, x: Fq2Element) -> String {
        let d: Vec<String> = self.digits(x).iter().map(u32::to_string).collect();
        d.join(":")
    }

    /// Accepts either the `:`-joined digit form or the bare canonical index.
    pub fn parse(&self, s: &str) -> Result<Fq2Element> {
        let s = s.trim();
        if s.contains(':') {
            let digits = s
                .split(':')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::ParseElement(s.to_string()))?;
            self.from_digits(&digits)
        } else {
            let v: u64 = s.parse().map_err(|_| Error::ParseElement(s.to_string()))?;
            self.element(v)
        }
    }

    pub fn add(&self, x: Fq2Element, y: Fq2Element) -> Fq2Element {
        if self.p == 2 {
            return Fq2Element(x.0 ^ y.0);
        }
        let p = self.p;
        let (mut a, mut b, mut r, mut m) = (x.0, y.0, 0u32, 1u32);
        while a > 0 || b > 0 {
            r += (a % p + b % p) % p * m;
            a /= p;
            b /= p;
            m = m.wrapping_mul(p);
        }
        Fq2Element(r)
    }

    pub fn neg(&self, x: Fq2Element) -> Fq2Element {
        if self.p == 2 {
            return x;
        }
        let p = self.p;
        let (mut a, mut r, mut m) = (x.0, 0u32, 1u32);
        while a > 0 {
            r += (p - a % p) % p * m;
            a /= p;
            m = m.wrapping_mul(p);
        }
        Fq2Element(r)
    }

    pub fn sub(&self, x: Fq2Element, y: Fq2Element) -> Fq2Element {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Fq2Element, y: Fq2Element) -> Fq2Element {
        match &self.tables {
            Some(t) => {
                if x.0 == 0 || y.0 == 0 {
                    Fq2Element::ZERO
                } else {
                    let l = t.log[x.0 as usize] + t.log[y.0 as usize];
                    Fq2Element(t.exp[l as usize])
                }
            }
            None => self.mul_poly(x, y),
        }
    }

    /// Multiplication through polynomial representatives, never touching the
    /// lookup tables. Used to build the tables and by the reference oracles.
    pub fn mul_poly(&self, x: Fq2Element, y: Fq2Element) -> Fq2Element {
        let prod = gfp::mul(&gfp::trim(self.digits(x)), &gfp::trim(self.digits(y)), self.p);
        let r = gfp::rem(&prod, &self.modulus_q2, self.p);
        self.from_digits(&r).expect("reduced polynomial fits the basis")
    }

    /// Multiplicative inverse via extended Euclid on polynomial representatives.
    pub fn inv(&self, x: Fq2Element) -> Option<Fq2Element> {
        if x.is_zero() {
            return None;
        }
        if let Some(t) = &self.tables {
            let l = (self.order - 1 - t.log[x.0 as usize]) % (self.order - 1);
            return Some(Fq2Element(t.exp[l as usize]));
        }
        let p = self.p;
        let (mut r0, mut r1) = (self.modulus_q2.clone(), gfp::trim(self.digits(x)));
        let (mut s0, mut s1) = (Vec::new(), vec![1u32]);
        while !r1.is_empty() {
            let (quot, r) = gfp::divrem(&r0, &r1, p);
            let s = gfp::sub(&s0, &gfp::mul(&quot, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        debug_assert_eq!(r0.len(), 1);
        let c = gfp::inv(r0[0], p);
        let inv = gfp::rem(&gfp::mul(&s0, &[c], p), &self.modulus_q2, p);
        Some(self.from_digits(&inv).expect("reduced polynomial fits the basis"))
    }

    pub fn div(&self, x: Fq2Element, y: Fq2Element) -> Option<Fq2Element> {
        self.inv(y).map(|yi| self.mul(x, yi))
    }

    pub fn pow(&self, x: Fq2Element, e: u64) -> Fq2Element {
        self.pow_with(x, e, Self::mul)
    }

    fn pow_with(
        &self,
        x: Fq2Element,
        mut e: u64,
        mul: fn(&Self, Fq2Element, Fq2Element) -> Fq2Element,
    ) -> Fq2Element {
        let (mut base, mut acc) = (x, Fq2Element::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(self, acc, base);
            }
            base = mul(self, base, base);
            e >>= 1;
        }
        acc
    }

    /// `x ↦ x^q`.
    pub fn frobenius(&self, x: Fq2Element) -> Fq2Element {
        match &self.tables {
            Some(t) => Fq2Element(t.frob[x.0 as usize]),
            None => self.pow(x, self.q as u64),
        }
    }

    /// Relative trace `x + x^q`, a map GF(q²) → GF(q).
    pub fn trace(&self, x: Fq2Element) -> Fq2Element {
        self.add(x, self.frobenius(x))
    }

    /// Relative norm `x^{q+1}`, a map GF(q²) → GF(q).
    pub fn norm(&self, x: Fq2Element) -> Fq2Element {
        self.mul(x, self.frobenius(x))
    }

    /// Absolute trace `Σ_{i<h} x^{p^i}` of GF(q) over GF(p).
    pub fn absolute_trace(&self, x: Fq2Element) -> Fq2Element {
        let mut acc = Fq2Element::ZERO;
        let mut y = x;
        for _ in 0..self.h {
            acc = self.add(acc, y);
            y = self.pow(y, self.p as u64);
        }
        acc
    }

    pub fn is_in_subfield(&self, x: Fq2Element) -> bool {
        self.subfield_label[x.0 as usize] != NOT_IN_SUBFIELD
    }

    /// GF(q) in label order.
    pub fn subfield(&self) -> &[Fq2Element] {
        &self.subfield
    }

    pub fn subfield_label(&self, x: Fq2Element) -> Option<u32> {
        let l = self.subfield_label[x.0 as usize];
        (l != NOT_IN_SUBFIELD).then_some(l)
    }

    /// Whether a nonzero element of GF(q) is a square in GF(q).
    pub fn is_square_in_subfield(&self, x: Fq2Element) -> bool {
        debug_assert!(self.is_in_subfield(x));
        if x.is_zero() || self.p == 2 {
            return true;
        }
        self.pow(x, (self.q as u64 - 1) / 2) == Fq2Element::ONE
    }

    /// Smallest-label generator of GF(q)*.
    pub fn subfield_primitive(&self) -> Fq2Element {
        let group = self.q as u64 - 1;
        let factors = prime_factors(group);
        self.subfield[1..]
            .iter()
            .copied()
            .find(|&w| factors.iter().all(|&r| self.pow(w, group / r) != Fq2Element::ONE))
            .expect("GF(q)* is cyclic")
    }

    /// The basis element ε with `(1, ε)` a GF(q)-basis of GF(q²).
    pub fn epsilon(&self) -> Fq2Element {
        self.epsilon
    }

    /// `a_0 = ε^q + ε`.
    pub fn a0(&self) -> Fq2Element {
        self.trace(self.epsilon)
    }

    /// `θ = a_0 − 2ε = ε^q − ε`; the trace-zero elements are exactly `θ·GF(q)`.
    pub fn theta(&self) -> Fq2Element {
        self.theta
    }

    /// The transversal `C = ε·GF(q)`, in label order of GF(q). Starts with 0.
    pub fn transversal(&self) -> &[Fq2Element] {
        &self.transversal
    }

    /// T0, the trace-zero elements, in canonical order.
    pub fn t0_set(&self) -> &[Fq2Element] {
        &self.t0
    }

    /// Coordinates `(x0, x1)` in GF(q) with `x = x0 + ε·x1`.
    pub fn decompose(&self, x: Fq2Element) -> (Fq2Element, Fq2Element) {
        // x - x^q = (ε - ε^q)·x1 = -θ·x1
        let x1 = self
            .div(self.sub(self.frobenius(x), x), self.theta)
            .expect("theta is nonzero");
        let x0 = self.sub(x, self.mul(self.epsilon, x1));
        (x0, x1)
    }

    pub fn recompose(&self, x0: Fq2Element, x1: Fq2Element) -> Fq2Element {
        self.add(x0, self.mul(self.epsilon, x1))
    }

    /// All `Z` with `Z^q − Z = d`: a coset of GF(q) when `tr(d) = 0`, else empty.
    pub fn artin_schreier_roots(&self, d: Fq2Element) -> Vec<Fq2Element> {
        match self.unique_root_in_transversal(d) {
            Ok(z) => self.subfield.iter().map(|&s| self.add(z, s)).collect(),
            Err(_) => Vec::new(),
        }
    }

    /// The single root of `Z^q − Z = d` lying in the transversal.
    pub fn unique_root_in_transversal(&self, d: Fq2Element) -> Result<Fq2Element> {
        if !self.trace(d).is_zero() {
            return Err(Error::NonZeroTrace);
        }
        // (z0 + ε z1)^q − (z0 + ε z1) = θ z1, so z1 = d/θ and z0 = 0 picks C.
        let z1 = self.div(d, self.theta).expect("theta is nonzero");
        Ok(self.mul(self.epsilon, z1))
    }

    pub fn describe(&self) -> FieldDescription {
        FieldDescription {
            p: self.p,
            h: self.h,
            q: self.q,
            modulus_q: self.modulus_q.clone(),
            modulus_q2: self.modulus_q2.clone(),
            epsilon: self.digits(self.epsilon),
            theta: self.digits(self.theta),
            transversal: self.transversal.iter().map(|&c| self.digits(c)).collect(),
        }
    }

    /// Rebuilds a context from its description, rejecting descriptions that do
    /// not match the deterministic construction.
    pub fn from_description(desc: &FieldDescription) -> Result<Self> {
        let ctx = FieldCtx::new(desc.q)?;
        if ctx.describe() != *desc {
            return Err(Error::InvalidParams(
                "field description does not match the canonical construction".into(),
            ));
        }
        Ok(ctx)
    }

    /// Sum of a sequence of elements.
    pub fn sum<I: IntoIterator<Item = Fq2Element>>(&self, it: I) -> Fq2Element {
        it.into_iter().fold(Fq2Element::ZERO, |acc, x| self.add(acc, x))
    }

    /// Dot product of two equal-length slices.
    pub fn dot(&self, x: &[Fq2Element], y: &[Fq2Element]) -> Fq2Element {
        debug_assert_eq!(x.len(), y.len());
        self.sum(x.iter().zip(y).map(|(&a, &b)| self.mul(a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf9() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(FieldCtx::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(FieldCtx::new(1).unwrap_err(), Error::NotPrimePower(1));
        assert!(matches!(FieldCtx::new(2048), Err(Error::FieldTooLarge(_))));
    }

    #[test]
    fn gf9_uses_u_squared_plus_one() {
        let ctx = gf9();
        assert_eq!(ctx.modulus_q2(), &[1, 0, 1]);
        let u = ctx.from_digits(&[0, 1]).unwrap();
        // u + u^3 = u + u·u^2 = u − u = 0
        assert_eq!(ctx.trace(u), Fq2Element::ZERO);
        assert_eq!(ctx.norm(u), Fq2Element::ONE);
        assert_eq!(ctx.pow(u, 4), Fq2Element::ONE);
    }

    #[test]
    fn trace_and_norm_of_constants() {
        for q in [2, 3, 4, 5, 8, 9] {
            let ctx = FieldCtx::new(q).unwrap();
            assert_eq!(ctx.trace(Fq2Element::ZERO), Fq2Element::ZERO);
            assert_eq!(ctx.norm(Fq2Element::ZERO), Fq2Element::ZERO);
            assert_eq!(ctx.norm(Fq2Element::ONE), Fq2Element::ONE);
            assert_eq!(ctx.trace(Fq2Element::ONE), ctx.from_prime(2));
        }
    }

    #[test]
    fn epsilon_invariants() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let ctx = FieldCtx::new(q).unwrap();
            let e = ctx.epsilon();
            assert!(!ctx.is_in_subfield(e));
            if q % 2 == 1 {
                assert!(ctx.trace(e).is_zero(), "q={q}");
            } else {
                assert_eq!(ctx.frobenius(e), ctx.add(Fq2Element::ONE, e), "q={q}");
            }
            let c = ctx.transversal();
            assert_eq!(c.len(), q as usize);
            assert_eq!(c[0], Fq2Element::ZERO);
            // every coset x + GF(q) meets C exactly once
            for x in ctx.elements() {
                let hits = c
                    .iter()
                    .filter(|&&t| ctx.is_in_subfield(ctx.sub(x, t)))
                    .count();
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn t0_small_cases() {
        let ctx = FieldCtx::new(2).unwrap();
        let t0: Vec<_> = ctx.elements().filter(|&x| ctx.trace(x).is_zero()).collect();
        assert_eq!(t0, ctx.subfield().to_vec().tap_sorted());
        assert_eq!(ctx.t0_set(), t0.as_slice());

        let ctx = gf9();
        let e = ctx.epsilon();
        let mut expected = vec![Fq2Element::ZERO, e, ctx.add(e, e)];
        expected.sort();
        assert_eq!(ctx.t0_set(), expected.as_slice());
    }

    #[test]
    fn t0_is_theta_times_subfield() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let ctx = FieldCtx::new(q).unwrap();
            let mut scaled: Vec<_> = ctx.subfield().iter().map(|&s| ctx.mul(ctx.theta(), s)).collect();
            scaled.sort();
            assert_eq!(ctx.t0_set(), scaled.as_slice());
            assert!(ctx.t0_set().contains(&Fq2Element::ZERO));
            if q % 2 == 0 {
                let mut sub = ctx.subfield().to_vec();
                sub.sort();
                assert_eq!(ctx.t0_set(), sub.as_slice());
            }
        }
    }

    #[test]
    fn artin_schreier_matches_scan() {
        for q in [2, 3, 4, 5] {
            let ctx = FieldCtx::new(q).unwrap();
            for d in ctx.elements() {
                let mut scan: Vec<_> = ctx
                    .elements()
                    .filter(|&z| ctx.sub(ctx.frobenius(z), z) == d)
                    .collect();
                scan.sort();
                let mut roots = ctx.artin_schreier_roots(d);
                roots.sort();
                assert_eq!(roots, scan);
                if ctx.trace(d).is_zero() {
                    assert_eq!(roots.len(), q as usize);
                    let z = ctx.unique_root_in_transversal(d).unwrap();
                    let in_c: Vec<_> = roots.iter().filter(|r| ctx.transversal().contains(r)).collect();
                    assert_eq!(in_c, vec![&z]);
                } else {
                    assert!(roots.is_empty());
                    assert_eq!(ctx.unique_root_in_transversal(d), Err(Error::NonZeroTrace));
                }
            }
            let mut sub = ctx.subfield().to_vec();
            sub.sort();
            let mut r0 = ctx.artin_schreier_roots(Fq2Element::ZERO);
            r0.sort();
            assert_eq!(r0, sub);
            assert_eq!(ctx.unique_root_in_transversal(Fq2Element::ZERO), Ok(Fq2Element::ZERO));
        }
    }

    #[test]
    fn gf9_trace_zero_coset_example() {
        let ctx = gf9();
        let e = ctx.epsilon();
        let d = ctx.sub(e, ctx.frobenius(e));
        assert_eq!(d, ctx.add(e, e));
        let roots = ctx.artin_schreier_roots(d);
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!(ctx.is_in_subfield(ctx.sub(*r, roots[0])));
        }
    }

    #[test]
    fn table_and_polynomial_paths_agree() {
        let ctx = FieldCtx::new(9).unwrap();
        for x in ctx.elements() {
            for y in ctx.elements().step_by(7) {
                assert_eq!(ctx.mul(x, y), ctx.mul_poly(x, y));
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        // q² = 66049 is above the table limit.
        let ctx = FieldCtx::new(257).unwrap();
        assert!(ctx.tables.is_none());
        let x = ctx.element(12345).unwrap();
        let xi = ctx.inv(x).unwrap();
        assert_eq!(ctx.mul(x, xi), Fq2Element::ONE);
        assert_eq!(ctx.frobenius(ctx.frobenius(x)), x);
        assert!(ctx.is_in_subfield(ctx.norm(x)));
        assert!(ctx.trace(ctx.epsilon()).is_zero());
        assert!(!ctx.is_in_subfield(ctx.epsilon()));
    }

    #[test]
    fn subfield_labels_for_prime_q() {
        let ctx = FieldCtx::new(7).unwrap();
        for c in 0..7 {
            assert_eq!(ctx.subfield()[c as usize], ctx.from_prime(c));
        }
        assert_eq!(ctx.subfield_primitive(), ctx.from_prime(3));
    }

    #[test]
    fn exhaustive_small_field_laws() {
        for q in [2, 3, 4, 5] {
            let ctx = FieldCtx::new(q).unwrap();
            for x in ctx.elements() {
                assert_eq!(ctx.frobenius(ctx.frobenius(x)), x);
                assert_eq!(ctx.is_in_subfield(x), ctx.frobenius(x) == x);
                let (x0, x1) = ctx.decompose(x);
                assert!(ctx.is_in_subfield(x0) && ctx.is_in_subfield(x1));
                assert_eq!(ctx.recompose(x0, x1), x);
                for y in ctx.elements() {
                    assert_eq!(ctx.trace(ctx.add(x, y)), ctx.add(ctx.trace(x), ctx.trace(y)));
                    assert_eq!(ctx.norm(ctx.mul(x, y)), ctx.mul(ctx.norm(x), ctx.norm(y)));
                }
            }
        }
    }

    #[test]
    fn description_roundtrip() {
        let ctx = FieldCtx::new(8).unwrap();
        let desc = ctx.describe();
        let json = serde_json::to_string(&desc).unwrap();
        let back: FieldDescription = serde_json::from_str(&json).unwrap();
        assert_eq!(FieldCtx::from_description(&back).unwrap().describe(), desc);
    }

    #[test]
    fn parse_and_format() {
        let ctx = FieldCtx::new(9).unwrap();
        for x in ctx.elements() {
            assert_eq!(ctx.parse(&ctx.format(x)).unwrap(), x);
            assert_eq!(ctx.parse(&x.index().to_string()).unwrap(), x);
        }
        assert!(ctx.parse("81").is_err());
        assert!(ctx.parse("3:0:0:0").is_err());
        assert!(ctx.parse("abc").is_err());
    }

    trait TapSorted {
        fn tap_sorted(self) -> Self;
    }
    impl TapSorted for Vec<Fq2Element> {
        fn tap_sorted(mut self) -> Self {
            self.sort();
            self
        }
    }

    proptest! {
        #[test]
        fn field_laws_random(q in prop::sample::select(vec![7u32, 8, 9, 11, 16, 25, 27, 32]),
                             xi in 0u32..1024, yi in 0u32..1024, zi in 0u32..1024) {
            let ctx = FieldCtx::new(q).unwrap();
            let n = ctx.order();
            let (x, y, z) = (Fq2Element(xi % n), Fq2Element(yi % n), Fq2Element(zi % n));
            prop_assert_eq!(ctx.frobenius(ctx.frobenius(x)), x);
            prop_assert_eq!(ctx.trace(ctx.add(x, y)), ctx.add(ctx.trace(x), ctx.trace(y)));
            prop_assert_eq!(ctx.norm(ctx.mul(x, y)), ctx.mul(ctx.norm(x), ctx.norm(y)));
            prop_assert!(ctx.is_in_subfield(ctx.trace(x)));
            prop_assert!(ctx.is_in_subfield(ctx.norm(x)));
            prop_assert_eq!(ctx.mul(x, ctx.add(y, z)), ctx.add(ctx.mul(x, y), ctx.mul(x, z)));
            prop_assert_eq!(ctx.sub(ctx.add(x, y), y), x);
            let (x0, x1) = ctx.decompose(x);
            prop_assert_eq!(ctx.recompose(x0, x1), x);
            if !x.is_zero() {
                prop_assert_eq!(ctx.mul(x, ctx.inv(x).unwrap()), Fq2Element::ONE);
            }
        }
    }
}
