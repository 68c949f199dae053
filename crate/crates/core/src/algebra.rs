//! The free graded-commutative differential algebra generated by even jet
//! variables u^{α,(s)} and odd variables θ_α^{(s)}, with `ParamPoly`
//! coefficients. Values are immutable and kept in a unique canonical form:
//! monomials are sorted, odd factors are strictly increasing (Koszul signs
//! absorbed into coefficients), and zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::context::{require_same, ChartId, Ctx};
use crate::error::{Error, Result};
use crate::param::{rat_int, ParamPoly, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

/// A single generator u^{field,(order)} or θ_field^{(order)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub parity: Parity,
    pub field: usize,
    pub order: u32,
}

impl Generator {
    pub fn even(field: usize, order: u32) -> Self {
        Generator {
            parity: Parity::Even,
            field,
            order,
        }
    }
    pub fn odd(field: usize, order: u32) -> Self {
        Generator {
            parity: Parity::Odd,
            field,
            order,
        }
    }
}

/// Key of a differential monomial: the strictly increasing odd factor list
/// and the sorted even exponent list. The coefficient lives beside it in the
/// polynomial map.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffKey {
    /// (field, order), strictly increasing.
    pub odd: Vec<(usize, u32)>,
    /// ((field, order), exponent), sorted by generator, exponent != 0.
    pub even: Vec<((usize, u32), i64)>,
}

impl DiffKey {
    pub fn unit() -> Self {
        DiffKey {
            odd: Vec::new(),
            even: Vec::new(),
        }
    }

    pub fn theta_degree(&self) -> usize {
        self.odd.len()
    }

    pub fn is_unit(&self) -> bool {
        self.odd.is_empty() && self.even.is_empty()
    }
}

// Canonical monomial order: theta-degree, then the odd factor sequence, then
// the even exponent multi-index (parameter multi-indices are ordered inside
// ParamPoly).
impl Ord for DiffKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.odd
            .len()
            .cmp(&other.odd.len())
            .then_with(|| self.odd.cmp(&other.odd))
            .then_with(|| self.even.cmp(&other.even))
    }
}

impl PartialOrd for DiffKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sort an odd factor list, tracking the permutation sign; `None` when a
/// factor repeats (the monomial is zero).
fn sort_odd(mut list: Vec<(usize, u32)>) -> Option<(Vec<(usize, u32)>, i32)> {
    let mut sign = 1i32;
    for i in 1..list.len() {
        let mut j = i;
        while j > 0 && list[j - 1] > list[j] {
            list.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in list.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((list, sign))
}

/// Merge two strictly increasing odd lists with the Koszul sign; `None` on a
/// repeated factor.
fn merge_odd(a: &[(usize, u32)], b: &[(usize, u32)]) -> Option<(Vec<(usize, u32)>, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut sign = 1i32;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                // b[j] moves past the remaining a-factors
                if (a.len() - i) % 2 == 1 {
                    sign = -sign;
                }
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

fn merge_even(
    a: &[((usize, u32), i64)],
    b: &[((usize, u32), i64)],
) -> Vec<((usize, u32), i64)> {
    let mut out: Vec<((usize, u32), i64)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A canonical graded differential polynomial.
#[derive(Clone)]
pub struct DiffPoly {
    ctx: Ctx,
    chart: ChartId,
    terms: BTreeMap<DiffKey, ParamPoly>,
}

impl PartialEq for DiffPoly {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.terms == other.terms && *self.ctx == *other.ctx
    }
}
impl Eq for DiffPoly {}

impl DiffPoly {
    pub fn zero(ctx: &Ctx, chart: ChartId) -> Self {
        DiffPoly {
            ctx: ctx.clone(),
            chart,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Ctx, chart: ChartId, c: Rat) -> Self {
        let mut p = Self::zero(ctx, chart);
        p.insert(DiffKey::unit(), ParamPoly::constant(ctx.nparams(), c));
        p
    }

    pub fn one(ctx: &Ctx, chart: ChartId) -> Self {
        Self::constant(ctx, chart, rat_int(1))
    }

    pub fn from_scalar(ctx: &Ctx, chart: ChartId, c: ParamPoly) -> Self {
        let mut p = Self::zero(ctx, chart);
        p.insert(DiffKey::unit(), c);
        p
    }

    pub fn param(ctx: &Ctx, chart: ChartId, idx: usize) -> Self {
        Self::from_scalar(ctx, chart, ParamPoly::param(ctx.nparams(), idx))
    }

    pub fn generator(ctx: &Ctx, chart: ChartId, g: Generator) -> Self {
        Self::gen_pow(ctx, chart, g, 1).expect("exponent 1 is always valid")
    }

    /// A generator raised to an integer power; negative powers are only legal
    /// for order-0 even generators in Laurent charts, and odd exponents only
    /// in {0, 1}.
    pub fn gen_pow(ctx: &Ctx, chart: ChartId, g: Generator, exp: i64) -> Result<Self> {
        if g.field >= ctx.chart(chart).n_fields() {
            return Err(Error::Shape(format!(
                "field index {} out of range in chart `{}`",
                g.field,
                ctx.chart(chart).name
            )));
        }
        let mut p = Self::zero(ctx, chart);
        if exp == 0 {
            return Ok(Self::one(ctx, chart));
        }
        let key = match g.parity {
            Parity::Even => {
                if exp < 0 && (g.order > 0 || !ctx.chart(chart).laurent[g.field]) {
                    return Err(Error::LaurentUnsupported(format!(
                        "negative exponent on {} requires an order-0 generator in a Laurent chart",
                        ctx.chart(chart).fields[g.field]
                    )));
                }
                DiffKey {
                    odd: vec![],
                    even: vec![((g.field, g.order), exp)],
                }
            }
            Parity::Odd => {
                if exp != 1 {
                    return Err(Error::Parity(format!(
                        "odd generator {} admits exponents 0 and 1 only",
                        ctx.chart(chart).thetas[g.field]
                    )));
                }
                DiffKey {
                    odd: vec![(g.field, g.order)],
                    even: vec![],
                }
            }
        };
        p.insert(key, ParamPoly::one(ctx.nparams()));
        Ok(p)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffKey, &ParamPoly)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, key: DiffKey, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        debug_assert!(key.even.iter().all(|&((f, s), e)| {
            e != 0 && (e > 0 || (s == 0 && self.ctx.chart(self.chart).laurent[f]))
        }));
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same(&self.ctx, self.chart, &other.ctx, other.chart)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.scale(c));
        }
        out
    }

    pub fn scale_param(&self, c: &ParamPoly) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.mul(c));
        }
        out
    }

    /// Graded-commutative product with Koszul signs.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        require_same(&self.ctx, self.chart, &other.ctx, other.chart)?;
        let mut out = Self::zero(&self.ctx, self.chart);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if let Some((odd, sign)) = merge_odd(&ka.odd, &kb.odd) {
                    let even = merge_even(&ka.even, &kb.even);
                    let mut coeff = ca.mul(cb);
                    if sign < 0 {
                        coeff = coeff.neg();
                    }
                    out.insert(DiffKey { odd, even }, coeff);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one(&self.ctx, self.chart);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The even derivation ∂ with ∂u^{α,(s)} = u^{α,(s+1)} and
    /// ∂θ_α^{(s)} = θ_α^{(s+1)}, extended by the Leibniz rule.
    pub fn total_derivative(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (k, c) in &self.terms {
            // even factors
            for (idx, &((f, s), e)) in k.even.iter().enumerate() {
                let mut even: Vec<((usize, u32), i64)> = Vec::with_capacity(k.even.len() + 1);
                even.extend_from_slice(&k.even[..idx]);
                if e != 1 {
                    even.push(((f, s), e - 1));
                }
                even.extend_from_slice(&k.even[idx + 1..]);
                let bump = vec![((f, s + 1), 1i64)];
                let even = merge_even(&even, &bump);
                out.insert(
                    DiffKey {
                        odd: k.odd.clone(),
                        even,
                    },
                    c.scale(&rat_int(e)),
                );
            }
            // odd factors
            for (pos, &(f, s)) in k.odd.iter().enumerate() {
                let mut odd = k.odd.clone();
                odd[pos] = (f, s + 1);
                if let Some((odd, sign)) = sort_odd(odd) {
                    let coeff = if sign < 0 { c.neg() } else { c.clone() };
                    out.insert(
                        DiffKey {
                            odd,
                            even: k.even.clone(),
                        },
                        coeff,
                    );
                }
            }
        }
        out
    }

    /// Partial derivative with respect to a single generator; for odd
    /// generators this is the left graded derivative.
    pub fn partial(&self, g: Generator) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (k, c) in &self.terms {
            match g.parity {
                Parity::Even => {
                    if let Some(idx) = k.even.iter().position(|&(gg, _)| gg == (g.field, g.order))
                    {
                        let e = k.even[idx].1;
                        let mut even = k.even.clone();
                        if e == 1 {
                            even.remove(idx);
                        } else {
                            even[idx].1 = e - 1;
                        }
                        out.insert(
                            DiffKey {
                                odd: k.odd.clone(),
                                even,
                            },
                            c.scale(&rat_int(e)),
                        );
                    }
                }
                Parity::Odd => {
                    if let Some(pos) = k.odd.iter().position(|&gg| gg == (g.field, g.order)) {
                        let mut odd = k.odd.clone();
                        odd.remove(pos);
                        let coeff = if pos % 2 == 1 { c.neg() } else { c.clone() };
                        out.insert(
                            DiffKey {
                                odd,
                                even: k.even.clone(),
                            },
                            coeff,
                        );
                    }
                }
            }
        }
        out
    }

    /// θ-degree when homogeneous.
    pub fn homogeneous_theta_degree(&self) -> Option<usize> {
        let mut deg = None;
        for k in self.terms.keys() {
            match deg {
                None => deg = Some(k.theta_degree()),
                Some(d) if d != k.theta_degree() => return None,
                _ => {}
            }
        }
        deg.or(Some(0))
    }

    /// The component of the given θ-degree.
    pub fn theta_component(&self, degree: usize) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (k, c) in &self.terms {
            if k.theta_degree() == degree {
                out.insert(k.clone(), c.clone());
            }
        }
        out
    }

    pub fn max_theta_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.theta_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn is_even_poly(&self) -> bool {
        self.terms.keys().all(|k| k.odd.is_empty())
    }

    /// The coefficient of the unit monomial (the value at all generators 0).
    pub fn constant_term(&self) -> ParamPoly {
        self.terms
            .get(&DiffKey::unit())
            .cloned()
            .unwrap_or_else(|| ParamPoly::zero(self.ctx.nparams()))
    }

    pub fn coefficient(&self, key: &DiffKey) -> ParamPoly {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| ParamPoly::zero(self.ctx.nparams()))
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.terms
            .keys()
            .any(|k| k.even.iter().any(|&(_, e)| e < 0))
    }

    /// Largest jet order of an even generator of the given field, or `None`
    /// if the field does not occur.
    pub fn max_even_order(&self, field: usize) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|k| k.even.iter())
            .filter(|&&((f, _), _)| f == field)
            .map(|&((_, s), _)| s)
            .max()
    }

    pub fn max_odd_order(&self, field: usize) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|k| k.odd.iter())
            .filter(|&&(f, _)| f == field)
            .map(|&(_, s)| s)
            .max()
    }

    /// The unique differential-algebra homomorphism extending `map`; higher
    /// jets go to iterated total derivatives of the order-0 images.
    pub fn substitute(&self, map: &SubstMap) -> Result<Self> {
        let n = self.ctx.chart(self.chart).n_fields();
        if map.even_images.len() != n || map.odd_images.len() != n {
            return Err(Error::IncompleteMap(format!(
                "expected {n} even and {n} odd images"
            )));
        }
        if self.ctx.nparams() != map.ctx().nparams() {
            return Err(Error::ContextMismatch(
                "substitution target declares a different parameter list".into(),
            ));
        }
        let tctx = map.ctx().clone();
        let tchart = map.chart();
        // prolongation caches
        let mut ev: Vec<Vec<DiffPoly>> = map.even_images.iter().map(|p| vec![p.clone()]).collect();
        let mut od: Vec<Vec<DiffPoly>> = map.odd_images.iter().map(|p| vec![p.clone()]).collect();
        let mut jet = |cache: &mut Vec<Vec<DiffPoly>>, f: usize, s: u32| -> DiffPoly {
            while cache[f].len() <= s as usize {
                let next = cache[f].last().unwrap().total_derivative();
                cache[f].push(next);
            }
            cache[f][s as usize].clone()
        };
        let mut out = Self::zero(&tctx, tchart);
        for (k, c) in &self.terms {
            let mut acc = DiffPoly::from_scalar(&tctx, tchart, c.clone());
            for &((f, s), e) in &k.even {
                let img = jet(&mut ev, f, s);
                let factor = if e >= 0 {
                    img.pow(e as u32)?
                } else {
                    invert_monomial(&img)?.pow((-e) as u32)?
                };
                acc = acc.mul(&factor)?;
            }
            for &(f, s) in &k.odd {
                let img = jet(&mut od, f, s);
                acc = acc.mul(&img)?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }
}

/// Substitution data: an image for every order-0 generator of the source
/// chart, expressed in the target chart.
pub struct SubstMap {
    pub even_images: Vec<DiffPoly>,
    pub odd_images: Vec<DiffPoly>,
}

impl SubstMap {
    pub fn new(even_images: Vec<DiffPoly>, odd_images: Vec<DiffPoly>) -> Result<Self> {
        let first = even_images
            .first()
            .or_else(|| odd_images.first())
            .ok_or_else(|| Error::IncompleteMap("empty substitution map".into()))?;
        let (ctx, chart) = (first.ctx().clone(), first.chart());
        for p in even_images.iter().chain(odd_images.iter()) {
            require_same(&ctx, chart, p.ctx(), p.chart())?;
        }
        for (i, p) in even_images.iter().enumerate() {
            if !p.is_even_poly() {
                return Err(Error::Parity(format!(
                    "even image #{i} contains odd variables"
                )));
            }
        }
        for (i, p) in odd_images.iter().enumerate() {
            if p.homogeneous_theta_degree() != Some(1) && !p.is_zero() {
                return Err(Error::Parity(format!(
                    "odd image #{i} must be homogeneous of θ-degree 1"
                )));
            }
        }
        Ok(SubstMap {
            even_images,
            odd_images,
        })
    }

    /// Identity map on a chart.
    pub fn identity(ctx: &Ctx, chart: ChartId) -> Self {
        let n = ctx.chart(chart).n_fields();
        let even = (0..n)
            .map(|f| DiffPoly::generator(ctx, chart, Generator::even(f, 0)))
            .collect();
        let odd = (0..n)
            .map(|f| DiffPoly::generator(ctx, chart, Generator::odd(f, 0)))
            .collect();
        SubstMap {
            even_images: even,
            odd_images: odd,
        }
    }

    fn ctx(&self) -> &Ctx {
        self.even_images
            .first()
            .or_else(|| self.odd_images.first())
            .map(|p| p.ctx())
            .expect("maps are non-empty by construction")
    }

    fn chart(&self) -> ChartId {
        self.even_images
            .first()
            .or_else(|| self.odd_images.first())
            .map(|p| p.chart())
            .expect("maps are non-empty by construction")
    }
}

/// Inverse of a single even monomial with invertible rational coefficient.
fn invert_monomial(p: &DiffPoly) -> Result<DiffPoly> {
    if p.n_terms() != 1 {
        return Err(Error::SingularMap(
            "negative powers need a one-term invertible image".into(),
        ));
    }
    let (key, coeff) = p.terms().next().unwrap();
    if !key.odd.is_empty() {
        return Err(Error::Parity("cannot invert an odd monomial".into()));
    }
    if !coeff.is_constant() {
        return Err(Error::SingularMap(
            "cannot invert a parameter-dependent coefficient".into(),
        ));
    }
    let c = coeff.constant_term();
    if c == Rat::from(num::BigInt::from(0)) {
        return Err(Error::SingularMap("division by zero image".into()));
    }
    let mut out = DiffPoly::zero(p.ctx(), p.chart());
    let inv_coeff = ParamPoly::constant(p.ctx().nparams(), num::BigRational::from_integer(1.into()) / c);
    let even: Vec<((usize, u32), i64)> = key.even.iter().map(|&(g, e)| (g, -e)).collect();
    for &((f, s), e) in &even {
        if e < 0 && (s > 0 || !p.ctx().chart(p.chart()).laurent[f]) {
            return Err(Error::LaurentUnsupported(format!(
                "inverse would need a negative power of {}^({})",
                p.ctx().chart(p.chart()).fields[f],
                s
            )));
        }
    }
    out.insert(
        DiffKey {
            odd: vec![],
            even,
        },
        inv_coeff,
    );
    Ok(out)
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::printer::render_diff_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;

    fn scalar_ctx() -> Ctx {
        Context::builder()
            .params(["c"])
            .chart("U", &["u"], true)
            .build()
    }

    fn u(ctx: &Ctx, s: u32) -> DiffPoly {
        DiffPoly::generator(ctx, ChartId(0), Generator::even(0, s))
    }
    fn th(ctx: &Ctx, s: u32) -> DiffPoly {
        DiffPoly::generator(ctx, ChartId(0), Generator::odd(0, s))
    }

    #[test]
    fn odd_square_is_zero() {
        let ctx = scalar_ctx();
        let t = th(&ctx, 0);
        assert!(t.mul(&t).unwrap().is_zero());
    }

    #[test]
    fn koszul_sign_on_swap() {
        let ctx = Context::builder().chart("U", &["u", "v"], false).build();
        let t1 = DiffPoly::generator(&ctx, ChartId(0), Generator::odd(0, 0));
        let t2 = DiffPoly::generator(&ctx, ChartId(0), Generator::odd(1, 0));
        let a = t2.mul(&t1).unwrap();
        let b = t1.mul(&t2).unwrap().neg();
        assert_eq!(a, b);
    }

    #[test]
    fn even_coefficients_commute_through() {
        // (u θ1)·(u^{(1)} θ2) = u u^{(1)} θ1θ2
        let ctx = Context::builder().chart("U", &["u", "v"], false).build();
        let c = ChartId(0);
        let u0 = DiffPoly::generator(&ctx, c, Generator::even(0, 0));
        let u1 = DiffPoly::generator(&ctx, c, Generator::even(0, 1));
        let t1 = DiffPoly::generator(&ctx, c, Generator::odd(0, 0));
        let t2 = DiffPoly::generator(&ctx, c, Generator::odd(1, 0));
        let lhs = u0.mul(&t1).unwrap().mul(&u1.mul(&t2).unwrap()).unwrap();
        let rhs = u0
            .mul(&u1)
            .unwrap()
            .mul(&t1.mul(&t2).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn total_derivative_examples() {
        let ctx = scalar_ctx();
        // ∂u = u'
        assert_eq!(u(&ctx, 0).total_derivative(), u(&ctx, 1));
        // ∂(u^{-1}) = -u^{-2} u'
        let um1 = DiffPoly::gen_pow(&ctx, ChartId(0), Generator::even(0, 0), -1).unwrap();
        let um2 = DiffPoly::gen_pow(&ctx, ChartId(0), Generator::even(0, 0), -2).unwrap();
        let expect = um2.mul(&u(&ctx, 1)).unwrap().neg();
        assert_eq!(um1.total_derivative(), expect);
        // ∂(θθ') = θθ''
        let p = th(&ctx, 0).mul(&th(&ctx, 1)).unwrap();
        let expect = th(&ctx, 0).mul(&th(&ctx, 2)).unwrap();
        assert_eq!(p.total_derivative(), expect);
    }

    #[test]
    fn partial_examples() {
        let ctx = scalar_ctx();
        let p = th(&ctx, 0).mul(&th(&ctx, 1)).unwrap();
        // ∂/∂θ (θθ') = θ'
        assert_eq!(p.partial(Generator::odd(0, 0)), th(&ctx, 1));
        // ∂/∂θ' (θθ') = -θ
        assert_eq!(p.partial(Generator::odd(0, 1)), th(&ctx, 0).neg());
        // ∂/∂u (u² u') = 2 u u'
        let q = u(&ctx, 0)
            .pow(2)
            .unwrap()
            .mul(&u(&ctx, 1))
            .unwrap();
        let expect = u(&ctx, 0).mul(&u(&ctx, 1)).unwrap().scale(&rat_int(2));
        assert_eq!(q.partial(Generator::even(0, 0)), expect);
    }

    #[test]
    fn substitute_prolongation() {
        // Two Laurent charts u, v with u -> 1/v, θ_u -> -v² θ_v.
        let ctx = Context::builder()
            .chart("U", &["u"], true)
            .chart("V", &["v"], true)
            .build();
        let cu = ChartId(0);
        let cv = ChartId(1);
        let v0 = DiffPoly::generator(&ctx, cv, Generator::even(0, 0));
        let v1 = DiffPoly::generator(&ctx, cv, Generator::even(0, 1));
        let tv0 = DiffPoly::generator(&ctx, cv, Generator::odd(0, 0));
        let tv1 = DiffPoly::generator(&ctx, cv, Generator::odd(0, 1));
        let vinv = DiffPoly::gen_pow(&ctx, cv, Generator::even(0, 0), -1).unwrap();
        let vm2 = DiffPoly::gen_pow(&ctx, cv, Generator::even(0, 0), -2).unwrap();
        let map = SubstMap::new(
            vec![vinv],
            vec![v0.pow(2).unwrap().neg().mul(&tv0).unwrap()],
        )
        .unwrap();

        // u' -> -v^{-2} v'
        let u1 = DiffPoly::generator(&ctx, cu, Generator::even(0, 1));
        let expect = vm2.mul(&v1).unwrap().neg();
        assert_eq!(u1.substitute(&map).unwrap(), expect);

        // θ_u' -> -2 v v' θ_v - v² θ_v'  (one total derivative of the image)
        let tu1 = DiffPoly::generator(&ctx, cu, Generator::odd(0, 1));
        let got = tu1.substitute(&map).unwrap();
        let expect = v0
            .mul(&v1)
            .unwrap()
            .mul(&tv0)
            .unwrap()
            .scale(&rat_int(-2))
            .add(&v0.pow(2).unwrap().mul(&tv1).unwrap().neg())
            .unwrap();
        assert_eq!(got, expect);

        // identity map fixes everything
        let id = SubstMap::identity(&ctx, cu);
        let p = u1
            .mul(&DiffPoly::generator(&ctx, cu, Generator::odd(0, 0)))
            .unwrap();
        assert_eq!(p.substitute(&id).unwrap(), p);
    }

    #[test]
    fn missing_and_mismatched_images_error() {
        let ctx = scalar_ctx();
        let c0 = ChartId(0);
        // parity error: odd image of θ-degree 0
        let bad = SubstMap::new(vec![u(&ctx, 0)], vec![u(&ctx, 0)]);
        assert!(matches!(bad, Err(Error::Parity(_))));
        // incomplete map
        let got = u(&ctx, 0).substitute(&SubstMap {
            even_images: vec![],
            odd_images: vec![th(&ctx, 0)],
        });
        assert!(matches!(got, Err(Error::IncompleteMap(_))));
        let _ = c0;
    }
}
