//! λ-polynomial calculus: matrix differential operators H(∂), the Master
//! Formula extension of a generator bracket table, skew and Jacobi residuals,
//! and R-matrix deformations of bracket tables.
//!
//! Index convention: the operator matrix encodes {u^α_λ u^β} = H^{βα}(λ).

use std::collections::BTreeMap;

use crate::algebra::{DiffPoly, Generator};
use crate::context::{require_same, ChartId, Ctx};
use crate::error::{Error, Result};
use crate::finite::RMatrix;
use crate::param::{rat_int, ParamPoly, Rat};

/// Polynomial in the formal even variable λ with `DiffPoly` coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct LambdaPoly {
    ctx: Ctx,
    chart: ChartId,
    coeffs: BTreeMap<u32, DiffPoly>,
}

impl LambdaPoly {
    pub fn zero(ctx: &Ctx, chart: ChartId) -> Self {
        LambdaPoly {
            ctx: ctx.clone(),
            chart,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_diff(p: DiffPoly) -> Self {
        let mut out = Self::zero(p.ctx(), p.chart());
        out.insert(0, p);
        out
    }

    pub fn monomial(k: u32, p: DiffPoly) -> Self {
        let mut out = Self::zero(p.ctx(), p.chart());
        out.insert(k, p);
        out
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn insert(&mut self, k: u32, p: DiffPoly) {
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(k) {
            Entry::Vacant(v) => {
                v.insert(p);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&p).expect("same context by construction");
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, DiffPoly> {
        &self.coeffs
    }

    pub fn coeff(&self, k: u32) -> DiffPoly {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| DiffPoly::zero(&self.ctx, self.chart))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().max().copied()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same(&self.ctx, self.chart, &other.ctx, other.chart)?;
        let mut out = self.clone();
        for (&k, p) in &other.coeffs {
            out.insert(k, p.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (&k, p) in &self.coeffs {
            out.insert(k, p.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (&k, p) in &self.coeffs {
            out.insert(k, p.scale(c));
        }
        out
    }

    /// Left multiplication by a differential polynomial, coefficient-wise.
    pub fn mul_diff(&self, d: &DiffPoly) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (&k, p) in &self.coeffs {
            out.insert(k, d.mul(p)?);
        }
        Ok(out)
    }

    /// Product of two λ-polynomials, treating λ as a commuting formal
    /// variable (used by the parser and by constant-coefficient tables).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        require_same(&self.ctx, self.chart, &other.ctx, other.chart)?;
        let mut out = Self::zero(&self.ctx, self.chart);
        for (&i, p) in &self.coeffs {
            for (&j, q) in &other.coeffs {
                out.insert(i + j, p.mul(q)?);
            }
        }
        Ok(out)
    }

    /// Apply the operator (λ + ∂), with ∂ acting on everything to the right.
    pub fn apply_lambda_del(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (&k, p) in &self.coeffs {
            out.insert(k + 1, p.clone());
            out.insert(k, p.total_derivative());
        }
        out
    }

    /// Apply (−λ − ∂).
    pub fn apply_neg_lambda_del(&self) -> Self {
        self.apply_lambda_del().neg()
    }

    pub fn apply_lambda_del_n(&self, n: u32) -> Self {
        let mut acc = self.clone();
        for _ in 0..n {
            acc = acc.apply_lambda_del();
        }
        acc
    }

    pub fn apply_neg_lambda_del_n(&self, n: u32) -> Self {
        let mut acc = self.clone();
        for _ in 0..n {
            acc = acc.apply_neg_lambda_del();
        }
        acc
    }

    /// Evaluate at λ = 0.
    pub fn at_zero(&self) -> DiffPoly {
        self.coeff(0)
    }

    /// Substitute λ → λ + μ, landing in two-variable polynomials.
    pub fn subst_lambda_plus_mu(&self) -> LambdaMuPoly {
        let mut out = LambdaMuPoly::zero(&self.ctx, self.chart);
        for (&k, p) in &self.coeffs {
            for r in 0..=k {
                let c = binomial(k, r);
                out.insert((r, k - r), p.scale(&c));
            }
        }
        out
    }
}

impl std::fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::printer::render_lambda_poly(self))
    }
}

fn binomial(n: u32, k: u32) -> Rat {
    let mut num = rat_int(1);
    for i in 0..k {
        num = num * rat_int((n - i) as i64) / rat_int((i + 1) as i64);
    }
    num
}

/// Polynomial in two formal even variables λ, μ.
#[derive(Clone, PartialEq, Eq)]
pub struct LambdaMuPoly {
    ctx: Ctx,
    chart: ChartId,
    coeffs: BTreeMap<(u32, u32), DiffPoly>,
}

impl LambdaMuPoly {
    pub fn zero(ctx: &Ctx, chart: ChartId) -> Self {
        LambdaMuPoly {
            ctx: ctx.clone(),
            chart,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: (u32, u32), p: DiffPoly) {
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(key) {
            Entry::Vacant(v) => {
                v.insert(p);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&p).expect("same context by construction");
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), DiffPoly> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same(&self.ctx, self.chart, &other.ctx, other.chart)?;
        let mut out = self.clone();
        for (&k, p) in &other.coeffs {
            out.insert(k, p.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for (&k, p) in &self.coeffs {
            out.insert(k, p.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }
}

impl std::fmt::Debug for LambdaMuPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::printer::render_lambda_mu_poly(self))
    }
}

/// N×N matrix of differential operators H^{αβ}(∂) = Σ_s h^{αβ}_s ∂^s with
/// differential-polynomial coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct HamOperator {
    ctx: Ctx,
    chart: ChartId,
    n: usize,
    /// row-major (α, β) → map jet-order s → coefficient h^{αβ}_s
    entries: Vec<BTreeMap<u32, DiffPoly>>,
}

impl HamOperator {
    pub fn zero(ctx: &Ctx, chart: ChartId) -> Self {
        let n = ctx.chart(chart).n_fields();
        HamOperator {
            ctx: ctx.clone(),
            chart,
            n,
            entries: vec![BTreeMap::new(); n * n],
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

    pub fn entry(&self, alpha: usize, beta: usize) -> &BTreeMap<u32, DiffPoly> {
        &self.entries[alpha * self.n + beta]
    }

    pub fn add_entry_term(&mut self, alpha: usize, beta: usize, s: u32, h: DiffPoly) {
        if h.is_zero() {
            return;
        }
        let slot = &mut self.entries[alpha * self.n + beta];
        use std::collections::btree_map::Entry;
        match slot.entry(s) {
            Entry::Vacant(v) => {
                v.insert(h);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&h).expect("same context by construction");
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Build from a bracket table T with T[α][β](λ) = {u^α_λ u^β}; the
    /// operator is the transpose, H^{βα}(λ) = T[α][β](λ).
    pub fn from_bracket_table(table: Vec<Vec<LambdaPoly>>) -> Result<Self> {
        let n = table.len();
        let first = table
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::Shape("empty bracket table".into()))?;
        let (ctx, chart) = (first.ctx().clone(), first.chart());
        if ctx.chart(chart).n_fields() != n {
            return Err(Error::Shape(format!(
                "table is {n}×{n} but the chart declares {} fields",
                ctx.chart(chart).n_fields()
            )));
        }
        let mut out = Self::zero(&ctx, chart);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape("ragged bracket table".into()));
            }
            for (b, cell) in row.iter().enumerate() {
                require_same(&ctx, chart, cell.ctx(), cell.chart())?;
                for (&s, p) in cell.coeffs() {
                    out.add_entry_term(b, a, s, p.clone());
                }
            }
        }
        Ok(out)
    }

    /// The bracket table view: {u^α_λ u^β} = H^{βα}(λ).
    pub fn bracket_entry(&self, alpha: usize, beta: usize) -> LambdaPoly {
        self.entry_lambda(beta, alpha)
    }

    /// The operator entry H^{αβ} as a polynomial in λ.
    pub fn entry_lambda(&self, alpha: usize, beta: usize) -> LambdaPoly {
        let mut out = LambdaPoly::zero(&self.ctx, self.chart);
        for (&s, p) in self.entry(alpha, beta) {
            out.insert(s, p.clone());
        }
        out
    }

    /// Apply H^{αβ}(λ+∂) to a λ-polynomial, coefficients multiplying on the
    /// left and each (λ+∂) acting on everything to its right.
    fn apply_entry_shifted(&self, alpha: usize, beta: usize, x: &LambdaPoly) -> Result<LambdaPoly> {
        let mut out = LambdaPoly::zero(&self.ctx, self.chart);
        for (&s, h) in self.entry(alpha, beta) {
            let shifted = x.apply_lambda_del_n(s);
            out = out.add(&shifted.mul_diff(h)?)?;
        }
        Ok(out)
    }

    /// Master Formula: {a_λ b} for even differential polynomials a, b.
    pub fn master_bracket(&self, a: &DiffPoly, b: &DiffPoly) -> Result<LambdaPoly> {
        require_same(&self.ctx, self.chart, a.ctx(), a.chart())?;
        require_same(&self.ctx, self.chart, b.ctx(), b.chart())?;
        if !a.is_even_poly() || !b.is_even_poly() {
            return Err(Error::Parity(
                "master bracket arguments must be even (no θ variables)".into(),
            ));
        }
        let mut out = LambdaPoly::zero(&self.ctx, self.chart);
        for beta in 0..self.n {
            let bmax = match b.max_even_order(beta) {
                Some(m) => m,
                None => continue,
            };
            for nn in 0..=bmax {
                let db = b.partial(Generator::even(beta, nn));
                if db.is_zero() {
                    continue;
                }
                for alpha in 0..self.n {
                    let amax = match a.max_even_order(alpha) {
                        Some(m) => m,
                        None => continue,
                    };
                    for mm in 0..=amax {
                        let da = a.partial(Generator::even(alpha, mm));
                        if da.is_zero() {
                            continue;
                        }
                        let x = LambdaPoly::from_diff(da).apply_neg_lambda_del_n(mm);
                        let y = self.apply_entry_shifted(beta, alpha, &x)?;
                        let z = y.apply_lambda_del_n(nn);
                        out = out.add(&z.mul_diff(&db)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Residual of skew-symmetry: H^{αβ}(λ) + H^{βα}(−λ−∂), where ∂ acts on
    /// the coefficients. Zero everywhere iff the operator is skew-adjoint.
    pub fn skew_residual(&self) -> Vec<Vec<LambdaPoly>> {
        let mut out = Vec::with_capacity(self.n);
        for a in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for b in 0..self.n {
                let mut res = self.entry_lambda(a, b);
                for (&s, h) in self.entry(b, a) {
                    let term = LambdaPoly::from_diff(h.clone()).apply_neg_lambda_del_n(s);
                    res = res.add(&term).expect("same context");
                }
                row.push(res);
            }
            out.push(row);
        }
        out
    }

    pub fn is_skew_adjoint(&self) -> bool {
        self.skew_residual()
            .iter()
            .all(|row| row.iter().all(|p| p.is_zero()))
    }

    /// Formal adjoint: (H*)^{αβ} = Σ_s (−∂)^s ∘ h^{βα}_s expanded into
    /// Σ_t g_t ∂^t form.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for a in 0..self.n {
            for b in 0..self.n {
                for (&s, h) in self.entry(b, a) {
                    // (−∂)^s ∘ h = Σ_j (−1)^s C(s,j) (∂^{s−j} h) ∂^j
                    let mut ders = vec![h.clone()];
                    for _ in 0..s {
                        ders.push(ders.last().unwrap().total_derivative());
                    }
                    for j in 0..=s {
                        let mut c = binomial(s, j);
                        if s % 2 == 1 {
                            c = -c;
                        }
                        out.add_entry_term(a, b, j, ders[(s - j) as usize].scale(&c));
                    }
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for a in 0..self.n {
            for b in 0..self.n {
                for (&s, h) in self.entry(a, b) {
                    out.add_entry_term(a, b, s, h.neg());
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same(&self.ctx, self.chart, &other.ctx, other.chart)?;
        let mut out = self.clone();
        for a in 0..self.n {
            for b in 0..self.n {
                for (&s, h) in other.entry(a, b) {
                    out.add_entry_term(a, b, s, h.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(&self.ctx, self.chart);
        for a in 0..self.n {
            for b in 0..self.n {
                for (&s, h) in self.entry(a, b) {
                    out.add_entry_term(a, b, s, h.scale(c));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_empty())
    }

    /// Jacobi residual J^{αβγ}(λ,μ) =
    /// {u^α_λ{u^β_μ u^γ}} − {u^β_μ{u^α_λ u^γ}} − {{u^α_λ u^β}_{λ+μ} u^γ}.
    pub fn jacobi_residual(&self, alpha: usize, beta: usize, gamma: usize) -> Result<LambdaMuPoly> {
        let ua = DiffPoly::generator(&self.ctx, self.chart, Generator::even(alpha, 0));
        let ub = DiffPoly::generator(&self.ctx, self.chart, Generator::even(beta, 0));
        let ug = DiffPoly::generator(&self.ctx, self.chart, Generator::even(gamma, 0));

        let mut term1 = LambdaMuPoly::zero(&self.ctx, self.chart);
        for (&k, d) in self.entry_lambda(gamma, beta).coeffs() {
            let br = self.master_bracket(&ua, d)?;
            for (&i, c) in br.coeffs() {
                term1.insert((i, k), c.clone());
            }
        }

        let mut term2 = LambdaMuPoly::zero(&self.ctx, self.chart);
        for (&k, e) in self.entry_lambda(gamma, alpha).coeffs() {
            let br = self.master_bracket(&ub, e)?; // polynomial in μ
            for (&j, c) in br.coeffs() {
                term2.insert((k, j), c.clone());
            }
        }

        let mut term3 = LambdaMuPoly::zero(&self.ctx, self.chart);
        for (&k, ck) in self.entry_lambda(beta, alpha).coeffs() {
            let br = self.master_bracket(ck, &ug)?; // polynomial in ν
            for (&(i, j), c) in br.subst_lambda_plus_mu().coeffs() {
                term3.insert((i + k, j), c.clone());
            }
        }

        term1.sub(&term2)?.sub(&term3)
    }

    /// All Jacobi residuals; requires a skew-adjoint operator.
    pub fn jacobi_residuals(&self) -> Result<Vec<((usize, usize, usize), LambdaMuPoly)>> {
        if !self.is_skew_adjoint() {
            return Err(Error::Precondition(
                "jacobi check requires a skew-adjoint operator (skew residual nonzero)".into(),
            ));
        }
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                for g in 0..self.n {
                    out.push(((a, b, g), self.jacobi_residual(a, b, g)?));
                }
            }
        }
        Ok(out)
    }

    pub fn is_hamiltonian_by_jacobi(&self) -> Result<bool> {
        Ok(self.jacobi_residuals()?.iter().all(|(_, r)| r.is_zero()))
    }

    /// Deformed table: {u^α_λ u^β}_R = {R(u^α)_λ u^β} + {u^α_λ R(u^β)} for
    /// R(u^α) = Σ_γ R^α_γ(∂) u^γ, using sesquilinearity for the ∂-entries.
    pub fn deform(&self, r: &RMatrix) -> Result<HamOperator> {
        if r.size() != self.n {
            return Err(Error::Shape(format!(
                "R-matrix is {}×{} but the operator is {}×{}",
                r.size(),
                r.size(),
                self.n,
                self.n
            )));
        }
        let nparams = self.ctx.nparams();
        if r.nparams() != nparams {
            return Err(Error::Shape(
                "R-matrix parameters do not match the context".into(),
            ));
        }
        let mut out = Self::zero(&self.ctx, self.chart);
        for beta in 0..self.n {
            for alpha in 0..self.n {
                let mut acc = LambdaPoly::zero(&self.ctx, self.chart);
                for gamma in 0..self.n {
                    // {R(u^α)_λ u^β}: Σ_k r_k (−λ)^k H^{βγ}(λ)
                    for (&k, rc) in r.entry(alpha, gamma) {
                        let mut term = self.entry_lambda(beta, gamma);
                        term = LambdaPoly::monomial(k, DiffPoly::from_scalar(&self.ctx, self.chart, rc.clone()))
                            .mul(&term)?;
                        if k % 2 == 1 {
                            term = term.neg();
                        }
                        acc = acc.add(&term)?;
                    }
                    // {u^α_λ R(u^β)}: Σ_k r_k (λ+∂)^k ▷ H^{γα}(λ)
                    for (&k, rc) in r.entry(beta, gamma) {
                        let shifted = self.entry_lambda(gamma, alpha).apply_lambda_del_n(k);
                        let term = shifted
                            .mul_diff(&DiffPoly::from_scalar(&self.ctx, self.chart, rc.clone()))?;
                        acc = acc.add(&term)?;
                    }
                }
                for (&s, c) in acc.coeffs() {
                    out.add_entry_term(beta, alpha, s, c.clone());
                }
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for HamOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for a in 0..self.n {
            for b in 0..self.n {
                writeln!(
                    f,
                    "H[{}][{}] = {}",
                    a + 1,
                    b + 1,
                    crate::printer::render_lambda_poly_with(&self.entry_lambda(a, b), "D")
                )?;
            }
        }
        Ok(())
    }
}
