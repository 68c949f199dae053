//! Sparse polynomials in declared parameter symbols with exact rational
//! coefficients. These are the scalars of the whole engine: every
//! differential-polynomial coefficient is a `ParamPoly`.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

/// Exact rational scalar.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

/// A polynomial in the declared parameters, stored as a sorted map from
/// exponent vectors to nonzero rational coefficients. The exponent vector
/// length equals the number of declared parameters; the map order is the
/// lexicographic order on exponent vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    nparams: usize,
    terms: BTreeMap<Vec<u16>, Rat>,
}

impl ParamPoly {
    pub fn zero(nparams: usize) -> Self {
        ParamPoly {
            nparams,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nparams: usize, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nparams], c);
        }
        ParamPoly { nparams, terms }
    }

    pub fn one(nparams: usize) -> Self {
        Self::constant(nparams, Rat::one())
    }

    /// The monomial consisting of the single parameter with index `idx`.
    pub fn param(nparams: usize, idx: usize) -> Self {
        assert!(idx < nparams, "parameter index out of range");
        let mut exps = vec![0u16; nparams];
        exps[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, Rat::one());
        ParamPoly { nparams, terms }
    }

    pub fn monomial(nparams: usize, exps: Vec<u16>, c: Rat) -> Self {
        assert_eq!(exps.len(), nparams);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        ParamPoly { nparams, terms }
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// The coefficient of the constant (all-zero exponent) monomial.
    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&vec![0u16; self.nparams])
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rat)> {
        self.terms.iter()
    }

    fn insert(&mut self, exps: Vec<u16>, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nparams, other.nparams);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nparams, other.nparams);
        let mut out = ParamPoly::zero(self.nparams);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert(exps, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return ParamPoly::zero(self.nparams);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    /// Substitute rational values for every parameter.
    pub fn eval(&self, values: &[Rat]) -> Rat {
        assert_eq!(values.len(), self.nparams);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term *= &values[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitute a polynomial for each parameter (all images over the same
    /// parameter list, of length `target_nparams`).
    pub fn subst(&self, images: &[ParamPoly], target_nparams: usize) -> ParamPoly {
        assert_eq!(images.len(), self.nparams);
        let mut acc = ParamPoly::zero(target_nparams);
        for (e, c) in &self.terms {
            let mut term = ParamPoly::constant(target_nparams, c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term.mul(&images[i]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Render with the given parameter names; canonical and injective.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (j, &k) in e.iter().enumerate() {
                if k == 1 {
                    factors.push(names[j].clone());
                } else if k > 1 {
                    factors.push(format!("{}^{}", names[j], k));
                }
            }
            let abs = c.abs();
            let lead = if factors.is_empty() || !abs.is_one() {
                vec![format_rat(&abs)]
            } else {
                vec![]
            };
            let body = lead
                .into_iter()
                .chain(factors)
                .collect::<Vec<_>>()
                .join("*");
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&body);
        }
        out
    }
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nparams).map(|i| format!("p{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_identities_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut p = ParamPoly::zero(3);
            for _ in 0..rng.gen_range(0..4) {
                let exps: Vec<u16> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                let c = rat(rng.gen_range(-5..=5), rng.gen_range(1..=4));
                p = p.add(&ParamPoly::monomial(3, exps, c));
            }
            p
        };
        for _ in 0..100 {
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            let c = rand_poly(&mut rng);
            // associativity and commutativity
            assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            assert_eq!(a.mul(&b), b.mul(&a));
            // distributivity
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            // canonical form: a - a = 0
            assert!(a.sub(&a).is_zero());
        }
    }

    #[test]
    fn eval_matches_subst() {
        let a = ParamPoly::param(2, 0)
            .mul(&ParamPoly::param(2, 0))
            .add(&ParamPoly::param(2, 1).scale(&rat(3, 2)));
        // a = x^2 + 3/2 y at x=2, y=4 -> 4 + 6 = 10
        assert_eq!(a.eval(&[rat_int(2), rat_int(4)]), rat_int(10));
    }

    #[test]
    fn render_is_canonical() {
        let a = ParamPoly::param(2, 1)
            .scale(&rat(-1, 2))
            .add(&ParamPoly::one(2));
        assert_eq!(a.render(&["a".into(), "b".into()]), "1 - 1/2*b");
    }
}
