//! Finite-dimensional polyvector calculus on affine space: the
//! Schouten–Nijenhuis bracket, Poisson bivector checks, constant R-matrix
//! deformations of the subregular sl₃ classical finite W-algebra, Hamiltonian
//! vector fields, Poisson pencils, and the level-0 arc-space lift.

use std::collections::BTreeMap;

use crate::algebra::{DiffPoly, Generator};
use crate::context::{require_same, ChartId, Context, Ctx};
use crate::error::{Error, Result};
use crate::lambda::HamOperator;
use crate::param::{rat, rat_int, ParamPoly, Rat};

/// Endomorphism data R^i_j(∂) = Σ_k r_k ∂^k with parameter coefficients;
/// the constant case has only k = 0 entries.
#[derive(Clone, PartialEq, Eq)]
pub struct RMatrix {
    n: usize,
    nparams: usize,
    entries: Vec<BTreeMap<u32, ParamPoly>>,
}

impl RMatrix {
    pub fn zero(n: usize, nparams: usize) -> Self {
        RMatrix {
            n,
            nparams,
            entries: vec![BTreeMap::new(); n * n],
        }
    }

    pub fn identity(n: usize, nparams: usize) -> Self {
        let mut r = Self::zero(n, nparams);
        for i in 0..n {
            r.set_constant(i, i, ParamPoly::one(nparams));
        }
        r
    }

    pub fn from_constant(entries: Vec<Vec<ParamPoly>>) -> Result<Self> {
        let n = entries.len();
        let nparams = entries
            .first()
            .and_then(|r| r.first())
            .map(|p| p.nparams())
            .ok_or_else(|| Error::Shape("empty R-matrix".into()))?;
        let mut out = Self::zero(n, nparams);
        for (i, row) in entries.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape("ragged R-matrix".into()));
            }
            for (j, p) in row.into_iter().enumerate() {
                out.set_constant(i, j, p);
            }
        }
        Ok(out)
    }

    pub fn set_constant(&mut self, i: usize, j: usize, p: ParamPoly) {
        self.set_term(i, j, 0, p);
    }

    pub fn set_term(&mut self, i: usize, j: usize, k: u32, p: ParamPoly) {
        assert_eq!(p.nparams(), self.nparams);
        let slot = &mut self.entries[i * self.n + j];
        if p.is_zero() {
            slot.remove(&k);
        } else {
            slot.insert(k, p);
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &BTreeMap<u32, ParamPoly> {
        &self.entries[i * self.n + j]
    }

    pub fn constant_entry(&self, i: usize, j: usize) -> ParamPoly {
        self.entry(i, j)
            .get(&0)
            .cloned()
            .unwrap_or_else(|| ParamPoly::zero(self.nparams))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn is_constant(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.keys().all(|&k| k == 0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.nparams != other.nparams {
            return Err(Error::Shape("R-matrix shapes differ".into()));
        }
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                for (&k, p) in other.entry(i, j) {
                    let cur = out.entries[i * self.n + j]
                        .get(&k)
                        .cloned()
                        .unwrap_or_else(|| ParamPoly::zero(self.nparams));
                    out.set_term(i, j, k, cur.add(p));
                }
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (0..self.nparams).map(|i| format!("p{i}")).collect();
        for i in 0..self.n {
            for j in 0..self.n {
                let cell: Vec<String> = self
                    .entry(i, j)
                    .iter()
                    .map(|(k, p)| format!("({})*D^{k}", p.render(&names)))
                    .collect();
                let body = if cell.is_empty() {
                    "0".to_string()
                } else {
                    cell.join(" + ")
                };
                writeln!(f, "R[{}][{}] = {}", i + 1, j + 1, body)?;
            }
        }
        Ok(())
    }
}

/// A polyvector field: a differential polynomial using only order-0
/// generators (θ-degree p ↔ p-vector).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyVector(DiffPoly);

impl PolyVector {
    pub fn new(p: DiffPoly) -> Result<Self> {
        let ok = p.terms().all(|(k, _)| {
            k.even.iter().all(|&((_, s), _)| s == 0) && k.odd.iter().all(|&(_, s)| s == 0)
        });
        if !ok {
            return Err(Error::Shape(
                "polyvector fields use order-0 generators only".into(),
            ));
        }
        Ok(PolyVector(p))
    }

    pub fn value(&self) -> &DiffPoly {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Finite odd-symplectic Schouten–Nijenhuis bracket:
/// [A,B] = Σ_i ∂A/∂θ_i ∂B/∂u_i + (−1)^p ∂A/∂u_i ∂B/∂θ_i on θ-degree-p A.
pub fn sn_bracket(a: &PolyVector, b: &PolyVector) -> Result<PolyVector> {
    let (pa, pb) = (&a.0, &b.0);
    require_same(pa.ctx(), pa.chart(), pb.ctx(), pb.chart())?;
    let ctx = pa.ctx().clone();
    let chart = pa.chart();
    let n = ctx.chart(chart).n_fields();
    let mut out = DiffPoly::zero(&ctx, chart);
    for p in 0..=pa.max_theta_degree() {
        let ap = pa.theta_component(p);
        if ap.is_zero() {
            continue;
        }
        for i in 0..n {
            let da_th = ap.partial(Generator::odd(i, 0));
            let db_u = pb.partial(Generator::even(i, 0));
            out = out.add(&da_th.mul(&db_u)?)?;
            let da_u = ap.partial(Generator::even(i, 0));
            let db_th = pb.partial(Generator::odd(i, 0));
            let second = da_u.mul(&db_th)?;
            out = out.add(&if p % 2 == 0 { second } else { second.neg() })?;
        }
    }
    PolyVector::new(out)
}

/// Skew matrix Π^{ij} = {u_i, u_j} of polynomials in the u's.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoisson {
    ctx: Ctx,
    chart: ChartId,
    n: usize,
    entries: Vec<DiffPoly>,
}

impl FinitePoisson {
    pub fn new(entries: Vec<Vec<DiffPoly>>) -> Result<Self> {
        let n = entries.len();
        let first = entries
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::Shape("empty bivector matrix".into()))?;
        let (ctx, chart) = (first.ctx().clone(), first.chart());
        if ctx.chart(chart).n_fields() != n {
            return Err(Error::Shape(format!(
                "matrix is {n}×{n} but the chart declares {} fields",
                ctx.chart(chart).n_fields()
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &entries {
            if row.len() != n {
                return Err(Error::Shape("ragged bivector matrix".into()));
            }
            for p in row {
                require_same(&ctx, chart, p.ctx(), p.chart())?;
                PolyVector::new(p.clone())?;
                if !p.is_even_poly() {
                    return Err(Error::Parity("bivector entries must be even".into()));
                }
                flat.push(p.clone());
            }
        }
        for i in 0..n {
            if !flat[i * n + i].is_zero() {
                return Err(Error::Shape("bivector diagonal must vanish".into()));
            }
            for j in 0..n {
                if !flat[i * n + j].add(&flat[j * n + i])?.is_zero() {
                    return Err(Error::Shape(format!(
                        "bivector matrix is not skew at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(FinitePoisson {
            ctx,
            chart,
            n,
            entries: flat,
        })
    }

    pub fn zero(ctx: &Ctx, chart: ChartId) -> Self {
        let n = ctx.chart(chart).n_fields();
        FinitePoisson {
            ctx: ctx.clone(),
            chart,
            n,
            entries: vec![DiffPoly::zero(ctx, chart); n * n],
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &DiffPoly {
        &self.entries[i * self.n + j]
    }

    /// {f, g} = Σ_{ij} ∂f/∂u_i Π^{ij} ∂g/∂u_j.
    pub fn poisson_bracket(&self, f: &DiffPoly, g: &DiffPoly) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero(&self.ctx, self.chart);
        for i in 0..self.n {
            let df = f.partial(Generator::even(i, 0));
            if df.is_zero() {
                continue;
            }
            for j in 0..self.n {
                let dg = g.partial(Generator::even(j, 0));
                if dg.is_zero() {
                    continue;
                }
                out = out.add(&df.mul(self.entry(i, j))?.mul(&dg)?)?;
            }
        }
        Ok(out)
    }

    /// The bivector ½ Σ_{ij} Π^{ij} θ_i θ_j.
    pub fn bivector(&self) -> PolyVector {
        let mut out = DiffPoly::zero(&self.ctx, self.chart);
        for i in 0..self.n {
            for j in 0..self.n {
                let ti = DiffPoly::generator(&self.ctx, self.chart, Generator::odd(i, 0));
                let tj = DiffPoly::generator(&self.ctx, self.chart, Generator::odd(j, 0));
                let term = self
                    .entry(i, j)
                    .mul(&ti)
                    .and_then(|p| p.mul(&tj))
                    .expect("same context");
                out = out.add(&term.scale(&rat(1, 2))).expect("same context");
            }
        }
        PolyVector::new(out).expect("order-0 by construction")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same(&self.ctx, self.chart, &other.ctx, other.chart)?;
        let mut entries = Vec::with_capacity(self.n * self.n);
        for (a, b) in self.entries.iter().zip(&other.entries) {
            entries.push(a.add(b)?);
        }
        Ok(FinitePoisson {
            ctx: self.ctx.clone(),
            chart: self.chart,
            n: self.n,
            entries,
        })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        FinitePoisson {
            ctx: self.ctx.clone(),
            chart: self.chart,
            n: self.n,
            entries: self.entries.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    /// Half the self-bracket ½[π, π]; zero iff Π is Poisson.
    pub fn jacobiator(&self) -> Result<PolyVector> {
        let pi = self.bivector();
        let br = sn_bracket(&pi, &pi)?;
        PolyVector::new(br.value().scale(&rat(1, 2)))
    }

    pub fn is_poisson(&self) -> Result<bool> {
        Ok(self.jacobiator()?.is_zero())
    }

    /// Hamiltonian vector field u̇_i = Σ_j Π^{ij} ∂h/∂u_j.
    pub fn hamiltonian_vf(&self, h: &DiffPoly) -> Result<Vec<DiffPoly>> {
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = DiffPoly::zero(&self.ctx, self.chart);
            for j in 0..self.n {
                let dh = h.partial(Generator::even(j, 0));
                acc = acc.add(&self.entry(i, j).mul(&dh)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Level-0 lift: the λ-constant operator with {u^α_λ u^β} = Π^{αβ}.
    pub fn arc_lift(&self) -> HamOperator {
        let mut h = HamOperator::zero(&self.ctx, self.chart);
        for a in 0..self.n {
            for b in 0..self.n {
                h.add_entry_term(a, b, 0, self.entry(b, a).clone());
            }
        }
        h
    }
}

impl std::fmt::Debug for FinitePoisson {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                writeln!(f, "Pi[{}][{}] = {:?}", i + 1, j + 1, self.entry(i, j))?;
            }
        }
        Ok(())
    }
}

/// Π_R^{ij} = {R(u_i), u_j} + {u_i, R(u_j)} for a constant R, i.e.
/// Π_R = R·Π + Π·Rᵀ entry-wise.
pub fn r_deform(h: &FinitePoisson, r: &RMatrix) -> Result<FinitePoisson> {
    if r.size() != h.size() {
        return Err(Error::Shape("R-matrix and bivector dimensions differ".into()));
    }
    if !r.is_constant() {
        return Err(Error::Precondition(
            "finite R-deformation requires a constant R-matrix".into(),
        ));
    }
    if r.nparams() != h.ctx().nparams() {
        return Err(Error::Shape(
            "R-matrix parameters do not match the context".into(),
        ));
    }
    let n = h.size();
    let (ctx, chart) = (h.ctx().clone(), h.chart());
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = DiffPoly::zero(&ctx, chart);
            for k in 0..n {
                let rik = DiffPoly::from_scalar(&ctx, chart, r.constant_entry(i, k));
                acc = acc.add(&rik.mul(h.entry(k, j))?)?;
                let rjk = DiffPoly::from_scalar(&ctx, chart, r.constant_entry(j, k));
                acc = acc.add(&h.entry(i, k).mul(&rjk)?)?;
            }
            row.push(acc);
        }
        rows.push(row);
    }
    FinitePoisson::new(rows)
}

/// The parameter-polynomial coefficients of ½[Π_R, Π_R]; their common
/// vanishing is equivalent to Π_R being Poisson for all parameter values.
pub fn constraint_quadrics(h: &FinitePoisson, r: &RMatrix) -> Result<Vec<ParamPoly>> {
    let pi_r = r_deform(h, r)?;
    let tri = pi_r.jacobiator()?;
    let mut out: Vec<ParamPoly> = Vec::new();
    for (_, c) in tri.value().terms() {
        if !out.contains(c) {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// True iff H + εM is Poisson for every ε, i.e. the mixed Schouten bracket
/// [H, M] vanishes (both arguments assumed Poisson).
pub fn pencil_check(h: &FinitePoisson, m: &FinitePoisson) -> Result<bool> {
    Ok(sn_bracket(&h.bivector(), &m.bivector())?.is_zero())
}

/// Report of the per-type R-matrix conditions, cross-checked against the
/// constraint quadrics.
#[derive(Clone, Debug)]
pub struct TypeReport {
    /// Which shape the matrix has (diagonal / upper triangular / mixed), if any.
    pub shape: Option<&'static str>,
    /// Residuals of the per-type closed-form conditions, rendered.
    pub condition_residuals: Vec<(String, bool)>,
    /// All five quadrics vanish after substituting this R.
    pub quadrics_vanish: bool,
    pub is_r_matrix: bool,
}

pub struct Sl3Subregular {
    pub ctx: Ctx,
    pub chart: ChartId,
    pub h: FinitePoisson,
    /// Poisson center S = u₂³/6 + u₁u₃.
    pub center_s: DiffPoly,
    /// Second integral J = u₁² + u₃².
    pub integral_j: DiffPoly,
    /// The five quadrics f₁…f₅ cutting out the constant R-matrix locus.
    pub quadrics: Vec<ParamPoly>,
    /// Fully symbolic R with entries R₁₁…R₃₃.
    pub r_symbolic: RMatrix,
}

pub const SL3_PARAMS: [&str; 10] = [
    "R11", "R12", "R13", "R21", "R22", "R23", "R31", "R32", "R33", "eps",
];

fn sl3_param(name: &str) -> usize {
    SL3_PARAMS.iter().position(|&p| p == name).unwrap()
}

/// The subregular sl₃ classical finite W-algebra dataset.
pub fn sl3_subregular() -> Sl3Subregular {
    let ctx = Context::builder()
        .params(SL3_PARAMS)
        .chart("w", &["u1", "u2", "u3"], false)
        .build();
    let chart = ChartId(0);
    let np = ctx.nparams();
    let u = |i: usize| DiffPoly::generator(&ctx, chart, Generator::even(i, 0));
    let zero = DiffPoly::zero(&ctx, chart);

    // H = [[0, −2u₁, u₂²], [2u₁, 0, −2u₃], [−u₂², 2u₃, 0]]
    let m12 = u(0).scale(&rat_int(-2));
    let m13 = u(1).pow(2).unwrap();
    let m23 = u(2).scale(&rat_int(-2));
    let h = FinitePoisson::new(vec![
        vec![zero.clone(), m12.clone(), m13.clone()],
        vec![m12.neg(), zero.clone(), m23.clone()],
        vec![m13.neg(), m23.neg(), zero.clone()],
    ])
    .expect("sl3 matrix is skew");

    let center_s = u(1)
        .pow(3)
        .unwrap()
        .scale(&rat(1, 6))
        .add(&u(0).mul(&u(2)).unwrap())
        .unwrap();
    let integral_j = u(0).pow(2).unwrap().add(&u(2).pow(2).unwrap()).unwrap();

    let p = |name: &str| ParamPoly::param(np, sl3_param(name));
    let f1 = p("R11")
        .mul(&p("R21"))
        .add(&p("R21").mul(&p("R22")))
        .add(&p("R23").mul(&p("R31")));
    let f2 = p("R12")
        .mul(&p("R31"))
        .add(&p("R22").mul(&p("R32")))
        .add(&p("R32").mul(&p("R33")));
    let f3 = p("R11")
        .mul(&p("R11"))
        .add(&p("R12").mul(&p("R21")))
        .sub(&p("R23").mul(&p("R32")))
        .sub(&p("R33").mul(&p("R33")));
    let f4 = p("R13")
        .mul(&p("R21"))
        .add(&p("R22").mul(&p("R23")))
        .add(&p("R23").mul(&p("R33")));
    let f5 = p("R11")
        .mul(&p("R12"))
        .add(&p("R12").mul(&p("R22")))
        .add(&p("R13").mul(&p("R32")));

    let mut r_symbolic = RMatrix::zero(3, np);
    for i in 0..3 {
        for j in 0..3 {
            let name = format!("R{}{}", i + 1, j + 1);
            r_symbolic.set_constant(i, j, ParamPoly::param(np, sl3_param(&name)));
        }
    }

    Sl3Subregular {
        ctx,
        chart,
        h,
        center_s,
        integral_j,
        quadrics: vec![f1, f2, f3, f4, f5],
        r_symbolic,
    }
}

impl Sl3Subregular {
    /// Substitute the entries of `r` for the symbolic parameters R₁₁…R₃₃ in
    /// a quadric (other parameters pass through).
    pub fn eval_quadric_at(&self, q: &ParamPoly, r: &RMatrix) -> ParamPoly {
        let np = self.ctx.nparams();
        let mut images: Vec<ParamPoly> = (0..np).map(|i| ParamPoly::param(np, i)).collect();
        for i in 0..3 {
            for j in 0..3 {
                images[sl3_param(&format!("R{}{}", i + 1, j + 1))] = r.constant_entry(i, j);
            }
        }
        q.subst(&images, np)
    }

    /// Classify a (constant) endomorphism against the three named families
    /// and cross-check with the quadrics.
    pub fn check_type(&self, r: &RMatrix) -> Result<TypeReport> {
        if !r.is_constant() || r.size() != 3 {
            return Err(Error::Shape("type check expects a constant 3×3 R".into()));
        }
        let e = |i: usize, j: usize| r.constant_entry(i, j);
        let zero = |i: usize, j: usize| e(i, j).is_zero();
        let diagonal = zero(0, 1) && zero(0, 2) && zero(1, 0) && zero(1, 2) && zero(2, 0) && zero(2, 1);
        let upper = zero(1, 0) && zero(2, 0) && zero(2, 1);
        let mixed = zero(0, 1) && zero(1, 0) && zero(1, 2) && zero(2, 1);

        let shape = if diagonal {
            Some("diagonal (Type I candidate)")
        } else if upper {
            Some("upper triangular (Type II candidate)")
        } else if mixed {
            Some("mixed (Type III candidate)")
        } else {
            None
        };

        let sq_diff = e(0, 0).mul(&e(0, 0)).sub(&e(2, 2).mul(&e(2, 2)));
        let c2 = e(0, 1).mul(&e(0, 0).add(&e(1, 1)));
        let c3 = e(1, 2).mul(&e(1, 1).add(&e(2, 2)));
        let mut condition_residuals = vec![(
            "R11^2 - R33^2".to_string(),
            sq_diff.is_zero(),
        )];
        if upper && !diagonal {
            condition_residuals.push(("R12*(R11 + R22)".to_string(), c2.is_zero()));
            condition_residuals.push(("R23*(R22 + R33)".to_string(), c3.is_zero()));
        }

        let quadrics_vanish = self
            .quadrics
            .iter()
            .all(|q| self.eval_quadric_at(q, r).is_zero());
        Ok(TypeReport {
            shape,
            condition_residuals,
            quadrics_vanish,
            is_r_matrix: quadrics_vanish,
        })
    }

    /// Type III (mixed) symbolic matrix on the + branch R₁₁ = R₃₃, with free
    /// entries R₃₃, R₂₂, R₁₃, R₃₁.
    pub fn type_iii_symbolic(&self) -> RMatrix {
        let np = self.ctx.nparams();
        let p = |name: &str| ParamPoly::param(np, sl3_param(name));
        let mut r = RMatrix::zero(3, np);
        r.set_constant(0, 0, p("R33"));
        r.set_constant(0, 2, p("R13"));
        r.set_constant(1, 1, p("R22"));
        r.set_constant(2, 0, p("R31"));
        r.set_constant(2, 2, p("R33"));
        r
    }

    /// Type III with Δ = 0 and R₁₃ = R₃₁ = 1 (the normalized flow).
    pub fn type_iii_normalized(&self) -> RMatrix {
        let np = self.ctx.nparams();
        let one = ParamPoly::one(np);
        let mut r = RMatrix::zero(3, np);
        r.set_constant(0, 0, one.clone());
        r.set_constant(0, 2, one.clone());
        r.set_constant(1, 1, one.clone());
        r.set_constant(2, 0, one.clone());
        r.set_constant(2, 2, one);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl3_is_poisson_and_s_is_central() {
        let d = sl3_subregular();
        assert!(d.h.is_poisson().unwrap());
        let vf = d.h.hamiltonian_vf(&d.center_s).unwrap();
        assert!(vf.iter().all(|p| p.is_zero()));
        // {u1, u2} = H^{12} = -2 u1
        let u1 = DiffPoly::generator(&d.ctx, d.chart, Generator::even(0, 0));
        let u2 = DiffPoly::generator(&d.ctx, d.chart, Generator::even(1, 0));
        assert_eq!(
            d.h.poisson_bracket(&u1, &u2).unwrap(),
            u1.scale(&rat_int(-2))
        );
    }

    #[test]
    fn kks_sl2_bivector_is_poisson() {
        // π^{12} = u3, π^{23} = u1, π^{31} = u2 (structure constants of so(3)-like
        // rescaled sl2): linear bivectors from Lie brackets are Poisson.
        let ctx = Context::builder()
            .chart("g", &["x1", "x2", "x3"], false)
            .build();
        let chart = ChartId(0);
        let u = |i: usize| DiffPoly::generator(&ctx, chart, Generator::even(i, 0));
        let z = DiffPoly::zero(&ctx, chart);
        let pi = FinitePoisson::new(vec![
            vec![z.clone(), u(2), u(1).neg()],
            vec![u(2).neg(), z.clone(), u(0)],
            vec![u(1), u(0).neg(), z.clone()],
        ])
        .unwrap();
        assert!(pi.is_poisson().unwrap());
    }

    #[test]
    fn constant_bivectors_commute() {
        let ctx = Context::builder().chart("a", &["x", "y"], false).build();
        let chart = ChartId(0);
        let one = DiffPoly::one(&ctx, chart);
        let z = DiffPoly::zero(&ctx, chart);
        let pi = FinitePoisson::new(vec![vec![z.clone(), one.clone()], vec![one.neg(), z]])
            .unwrap();
        assert!(sn_bracket(&pi.bivector(), &pi.bivector()).unwrap().is_zero());
    }

    #[test]
    fn r_deform_identity_doubles() {
        let d = sl3_subregular();
        let r = RMatrix::identity(3, d.ctx.nparams());
        let pi = r_deform(&d.h, &r).unwrap();
        assert_eq!(pi, d.h.scale(&rat_int(2)));
        let rz = RMatrix::zero(3, d.ctx.nparams());
        assert!(r_deform(&d.h, &rz).unwrap().is_zero());
    }

    #[test]
    fn type_iii_entries_match_direct_expansion() {
        let d = sl3_subregular();
        let r = d.type_iii_symbolic();
        let pi = r_deform(&d.h, &r).unwrap();
        let np = d.ctx.nparams();
        let p = |name: &str| ParamPoly::param(np, sl3_param(name));
        let u = |i: usize| DiffPoly::generator(&d.ctx, d.chart, Generator::even(i, 0));
        // Π^{13} = (R11 + R33) u2²; here R11 = R33 on the + branch: 2 R33 u2²
        let expect13 = u(1)
            .pow(2)
            .unwrap()
            .scale_param(&p("R33").add(&p("R33")));
        assert_eq!(pi.entry(0, 2), &expect13);
        // Π^{12} = −2(R11 + R22) u1 + 2 R13 u3 with R11 = R33
        let expect12 = u(0)
            .scale_param(&p("R33").add(&p("R22")))
            .scale(&rat_int(-2))
            .add(&u(2).scale_param(&p("R13")).scale(&rat_int(2)))
            .unwrap();
        assert_eq!(pi.entry(0, 1), &expect12);
    }

    #[test]
    fn r_deform_is_linear_in_r() {
        let d = sl3_subregular();
        let np = d.ctx.nparams();
        let mut r1 = RMatrix::zero(3, np);
        r1.set_constant(0, 2, ParamPoly::param(np, 2));
        r1.set_constant(1, 1, ParamPoly::one(np));
        let mut r2 = RMatrix::zero(3, np);
        r2.set_constant(2, 0, ParamPoly::param(np, 6));
        r2.set_constant(0, 0, ParamPoly::param(np, 0));
        let lhs = r_deform(&d.h, &r1.add(&r2).unwrap()).unwrap();
        let rhs = r_deform(&d.h, &r1)
            .unwrap()
            .add(&r_deform(&d.h, &r2).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}
