//! Local functionals (densities modulo total derivatives and constants), the
//! graded Lie bracket on them, the Hamiltonian decision via the self-bracket,
//! the derived bracket, Maurer–Cartan residuals, and extraction of parameter
//! constraint ideals.

use crate::algebra::DiffPoly;
use crate::context::require_same;
use crate::error::{Error, Result};
use crate::lambda::HamOperator;
use crate::param::{rat, rat_int, ParamPoly};
use crate::variational::{
    euler_all, euler_even, euler_odd, normalize2, normalizing_operator, operator_to_density,
    Density,
};

/// The class ∫p of a density p. Stored through a canonical representative:
/// every θ-degree-p ≥ 1 component is replaced by 𝒩(component)/p, which
/// depends only on the class; the θ-degree-0 component is kept as-is (its
/// class is compared through Euler derivatives).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalFunctional {
    density: DiffPoly,
}

impl LocalFunctional {
    pub fn new(density: &Density) -> Self {
        let mut canon = density.theta_component(0);
        for p in 1..=density.max_theta_degree() {
            let comp = density.theta_component(p);
            if comp.is_zero() {
                continue;
            }
            let norm = normalizing_operator(&comp).scale(&rat(1, p as i64));
            canon = canon.add(&norm).expect("same context");
        }
        LocalFunctional { density: canon }
    }

    pub fn density(&self) -> &DiffPoly {
        &self.density
    }

    /// Class-level zero test. Components of θ-degree ≥ 1 are zero iff the
    /// canonical representative is; the θ-degree-0 component is zero iff all
    /// its Euler derivatives vanish (exactness up to a constant), which needs
    /// a polynomial density.
    pub fn is_zero(&self) -> Result<bool> {
        let deg0 = self.density.theta_component(0);
        let rest = self.density.sub(&deg0).expect("same context");
        if !rest.is_zero() {
            return Ok(false);
        }
        if deg0.is_zero() {
            return Ok(true);
        }
        if deg0.has_negative_exponent() {
            return Err(Error::LaurentUnsupported(
                "zero test of a Laurent degree-0 functional".into(),
            ));
        }
        Ok(euler_all(&deg0).iter().all(|d| d.is_zero()))
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        let diff = LocalFunctional {
            density: self.density.sub(&other.density)?,
        };
        diff.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(LocalFunctional {
            density: self.density.add(&other.density)?,
        })
    }

    pub fn neg(&self) -> Self {
        LocalFunctional {
            density: self.density.neg(),
        }
    }

    pub fn scale(&self, c: &crate::param::Rat) -> Self {
        LocalFunctional {
            density: self.density.scale(c),
        }
    }
}

/// Density of the bracket {∫P, ∫Q}:
/// Σ_σ δP/δθ_σ δQ/δu^σ + (−1)^p δP/δu^σ δQ/δθ_σ, applied per homogeneous
/// θ-component of P.
pub fn nrb_density(p: &DiffPoly, q: &DiffPoly) -> Result<DiffPoly> {
    require_same(p.ctx(), p.chart(), q.ctx(), q.chart())?;
    let n = p.ctx().chart(p.chart()).n_fields();
    let mut out = DiffPoly::zero(p.ctx(), p.chart());
    for deg in 0..=p.max_theta_degree() {
        let comp = p.theta_component(deg);
        if comp.is_zero() {
            continue;
        }
        for sigma in 0..n {
            let a = euler_odd(&comp, sigma).mul(&euler_even(q, sigma))?;
            out = out.add(&a)?;
            let b = euler_even(&comp, sigma).mul(&euler_odd(q, sigma))?;
            out = out.add(&if deg % 2 == 0 { b } else { b.neg() })?;
        }
    }
    Ok(out)
}

/// The graded Lie bracket on local functionals.
pub fn nrb_bracket(p: &LocalFunctional, q: &LocalFunctional) -> Result<LocalFunctional> {
    Ok(LocalFunctional::new(&nrb_density(
        p.density(),
        q.density(),
    )?))
}

#[derive(Clone, Debug)]
pub struct HamiltonianVerdict {
    pub hamiltonian: bool,
    /// Nonzero Euler derivatives of the self-bracket density (empty when
    /// Hamiltonian).
    pub witness: Vec<DiffPoly>,
}

/// Decide [∫P, ∫P] = 0 for a θ-degree-2 density, reporting the nonzero Euler
/// derivatives of the residual as witness. The density is first normalized
/// (skew part extracted).
pub fn is_hamiltonian(p: &Density) -> Result<HamiltonianVerdict> {
    let h = normalize2(p)?;
    is_hamiltonian_operator(&h)
}

pub fn is_hamiltonian_operator(h: &HamOperator) -> Result<HamiltonianVerdict> {
    let pc = operator_to_density(h)?;
    let residual = nrb_density(&pc, &pc)?;
    let witness: Vec<DiffPoly> = euler_all(&residual)
        .into_iter()
        .filter(|d| !d.is_zero())
        .collect();
    if witness.is_empty() {
        if !residual.constant_term().is_zero() {
            return Ok(HamiltonianVerdict {
                hamiltonian: false,
                witness: vec![DiffPoly::from_scalar(
                    residual.ctx(),
                    residual.chart(),
                    residual.constant_term(),
                )],
            });
        }
        if residual.has_negative_exponent() {
            // Euler kernel no longer characterizes exactness here.
            return Err(Error::LaurentUnsupported(
                "cannot certify exactness of a Laurent self-bracket residual".into(),
            ));
        }
        Ok(HamiltonianVerdict {
            hamiltonian: true,
            witness,
        })
    } else {
        Ok(HamiltonianVerdict {
            hamiltonian: false,
            witness,
        })
    }
}

/// The parameter-polynomial coefficients of all Euler derivatives of the
/// self-bracket density; their common vanishing is equivalent to the density
/// being Hamiltonian for every parameter value.
pub fn constraint_ideal(p: &Density) -> Result<Vec<ParamPoly>> {
    let h = normalize2(p)?;
    let pc = operator_to_density(&h)?;
    let residual = nrb_density(&pc, &pc)?;
    let mut out: Vec<ParamPoly> = Vec::new();
    let mut push = |c: &ParamPoly| {
        if !c.is_zero() && !out.contains(c) {
            out.push(c.clone());
        }
    };
    for d in euler_all(&residual) {
        for (_, c) in d.terms() {
            push(c);
        }
    }
    push(&residual.constant_term());
    Ok(out)
}

/// Derived bracket of degree-0 functionals: {F,G}_P = −{{∫P, F}, G},
/// cross-checked against the operator form ∫ δG/δu^β H^{βα}(∂) δF/δu^α.
pub fn derived_bracket(
    p: &Density,
    f: &LocalFunctional,
    g: &LocalFunctional,
) -> Result<LocalFunctional> {
    if f.density().max_theta_degree() != 0 || g.density().max_theta_degree() != 0 {
        return Err(Error::Degree(
            "derived bracket takes θ-degree-0 functionals".into(),
        ));
    }
    let h = normalize2(p)?;
    let pc = LocalFunctional::new(&operator_to_density(&h)?);
    let nested = nrb_bracket(&nrb_bracket(&pc, f)?, g)?.neg();

    // operator route
    let (ctx, chart) = (p.ctx().clone(), p.chart());
    let n = ctx.chart(chart).n_fields();
    let mut op_density = DiffPoly::zero(&ctx, chart);
    for beta in 0..n {
        let dg = euler_even(g.density(), beta);
        if dg.is_zero() {
            continue;
        }
        for alpha in 0..n {
            let df = euler_even(f.density(), alpha);
            if df.is_zero() {
                continue;
            }
            for (&s, coeff) in h.entry(beta, alpha) {
                let mut der = df.clone();
                for _ in 0..s {
                    der = der.total_derivative();
                }
                op_density = op_density.add(&dg.mul(coeff)?.mul(&der)?)?;
            }
        }
    }
    let operator_form = LocalFunctional::new(&op_density);
    if !nested.equals(&operator_form)? {
        return Err(Error::Precondition(
            "derived bracket cross-check failed: nested and operator forms differ".into(),
        ));
    }
    Ok(nested)
}

/// Maurer–Cartan residual [∫P, Θ] + ½[Θ, Θ] with Θ = ∫(Π − P). The algebraic
/// identity residual = ½([∫Π,∫Π] − [∫P,∫P]) is asserted internally.
pub fn mc_residual(p: &Density, pi: &Density) -> Result<LocalFunctional> {
    require_same(p.ctx(), p.chart(), pi.ctx(), pi.chart())?;
    let fp = LocalFunctional::new(p);
    let theta = LocalFunctional::new(&pi.sub(p)?);
    let residual = nrb_bracket(&fp, &theta)?
        .add(&nrb_bracket(&theta, &theta)?.scale(&rat(1, 2)))?;

    let fpi = LocalFunctional::new(pi);
    let check = nrb_bracket(&fpi, &fpi)?
        .add(&nrb_bracket(&fp, &fp)?.neg())?
        .scale(&rat(1, 2));
    if residual != check {
        return Err(Error::Precondition(
            "Maurer–Cartan identity residual ≠ ½([Π,Π] − [P,P]); engine invariant violated".into(),
        ));
    }
    Ok(residual)
}

/// Convenience: the self-bracket local functional [∫P, ∫P].
pub fn self_bracket(p: &Density) -> Result<LocalFunctional> {
    let f = LocalFunctional::new(p);
    nrb_bracket(&f, &f)
}

/// ∫ X^α θ_α with X^α = −H^{αβ}(∂) δf/δu^β — the Hamiltonian flow datum
/// {∫P, ∫f} for θ-degree-0 f, computed in closed form.
pub fn hamiltonian_flow_density(h: &HamOperator, f: &DiffPoly) -> Result<DiffPoly> {
    let (ctx, chart) = (h.ctx().clone(), h.chart());
    let n = h.size();
    let mut out = DiffPoly::zero(&ctx, chart);
    for alpha in 0..n {
        let theta = DiffPoly::generator(&ctx, chart, crate::algebra::Generator::odd(alpha, 0));
        for beta in 0..n {
            let df = euler_even(f, beta);
            if df.is_zero() {
                continue;
            }
            for (&s, coeff) in h.entry(alpha, beta) {
                let mut der = df.clone();
                for _ in 0..s {
                    der = der.total_derivative();
                }
                let x = coeff.mul(&der)?.scale(&rat_int(-1));
                out = out.add(&x.mul(&theta)?)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator;
    use crate::context::{ChartId, Context, Ctx};
    use crate::variational::is_exact;

    fn scalar_ctx() -> Ctx {
        Context::builder()
            .params(["c"])
            .chart("U", &["u"], false)
            .build()
    }
    fn u(ctx: &Ctx, s: u32) -> DiffPoly {
        DiffPoly::generator(ctx, ChartId(0), Generator::even(0, s))
    }
    fn th(ctx: &Ctx, s: u32) -> DiffPoly {
        DiffPoly::generator(ctx, ChartId(0), Generator::odd(0, s))
    }
    fn heisenberg_density(ctx: &Ctx) -> DiffPoly {
        th(ctx, 0).mul(&th(ctx, 1)).unwrap().scale(&rat(1, 2))
    }
    fn virasoro_density(ctx: &Ctx) -> DiffPoly {
        let c = DiffPoly::param(ctx, ChartId(0), 0);
        u(ctx, 0)
            .mul(&th(ctx, 0))
            .unwrap()
            .mul(&th(ctx, 1))
            .unwrap()
            .add(
                &c.mul(&th(ctx, 0))
                    .unwrap()
                    .mul(&th(ctx, 3))
                    .unwrap()
                    .scale(&rat(1, 2)),
            )
            .unwrap()
    }

    #[test]
    fn heisenberg_self_bracket_is_exactly_zero() {
        let ctx = scalar_ctx();
        let p = heisenberg_density(&ctx);
        let d = nrb_density(&p, &p).unwrap();
        assert!(d.is_zero());
        let v = is_hamiltonian(&p).unwrap();
        assert!(v.hamiltonian && v.witness.is_empty());
    }

    #[test]
    fn virasoro_self_bracket_density_is_exact() {
        let ctx = scalar_ctx();
        let p = virasoro_density(&ctx);
        let d = nrb_density(&p, &p).unwrap();
        // 2c·θθ'θ''' = 2c·∂(θθ'θ'')
        let expect = th(&ctx, 0)
            .mul(&th(&ctx, 1))
            .unwrap()
            .mul(&th(&ctx, 2))
            .unwrap()
            .total_derivative()
            .scale_param(&ParamPoly::param(1, 0))
            .scale(&rat_int(2));
        assert_eq!(d, expect);
        assert!(is_exact(&d).unwrap());
        assert!(is_hamiltonian(&p).unwrap().hamiltonian);
    }

    #[test]
    fn hydrodynamic_family_is_hamiltonian() {
        // f₁ = 2q with q = u² gives the density u²θθ'; the skew normal form
        // supplies the q'u' term automatically and the structure is Poisson.
        let ctx = scalar_ctx();
        let p = u(&ctx, 0)
            .pow(2)
            .unwrap()
            .mul(&th(&ctx, 0))
            .unwrap()
            .mul(&th(&ctx, 1))
            .unwrap();
        let v = is_hamiltonian(&p).unwrap();
        assert!(v.hamiltonian, "q = u² hydrodynamic density is Hamiltonian");
    }

    #[test]
    fn jet_coefficient_fails_with_witness() {
        let ctx = scalar_ctx();
        // f₁ = 2u′: density u′θθ′ is not Hamiltonian
        let p = u(&ctx, 1)
            .mul(&th(&ctx, 0))
            .unwrap()
            .mul(&th(&ctx, 1))
            .unwrap();
        let v = is_hamiltonian(&p).unwrap();
        assert!(!v.hamiltonian);
        assert!(!v.witness.is_empty());
    }

    #[test]
    fn flow_density_shape() {
        // [∫P, ∫f] = ∫ X^α θ_α with X = −H δf/δu (derived-bracket proof shape)
        let ctx = scalar_ctx();
        let p = heisenberg_density(&ctx);
        let f = LocalFunctional::new(&u(&ctx, 0).pow(2).unwrap().scale(&rat(1, 2)));
        let h = normalize2(&p).unwrap();
        let closed = hamiltonian_flow_density(&h, f.density()).unwrap();
        let pc = LocalFunctional::new(&operator_to_density(&h).unwrap());
        let via_bracket = nrb_bracket(&pc, &f).unwrap();
        assert!(via_bracket
            .equals(&LocalFunctional::new(&closed))
            .unwrap());
        // X = −∂(u) = −u′: closed density −u′θ
        assert_eq!(closed, u(&ctx, 1).neg().mul(&th(&ctx, 0)).unwrap());
    }

    #[test]
    fn derived_bracket_cross_paths() {
        let ctx = scalar_ctx();
        // Heisenberg with F = G = ∫u²/2 → ∫u u′ = 0
        let p = heisenberg_density(&ctx);
        let f = LocalFunctional::new(&u(&ctx, 0).pow(2).unwrap().scale(&rat(1, 2)));
        let out = derived_bracket(&p, &f, &f).unwrap();
        assert!(out.is_zero().unwrap());

        // Virasoro with F = ∫u²/2, G = ∫u³/6: both routes agree (checked
        // inside) and the bracket is skew: {F,G} = −{G,F}
        let p = virasoro_density(&ctx);
        let g = LocalFunctional::new(&u(&ctx, 0).pow(3).unwrap().scale(&rat(1, 6)));
        let fg = derived_bracket(&p, &f, &g).unwrap();
        let gf = derived_bracket(&p, &g, &f).unwrap();
        assert!(fg.add(&gf).unwrap().is_zero().unwrap());
    }

    #[test]
    fn mc_residual_cases() {
        let ctx = scalar_ctx();
        let p = virasoro_density(&ctx);
        // Π = P → 0
        assert!(mc_residual(&p, &p).unwrap().is_zero().unwrap());
        // Π Hamiltonian (Heisenberg) → 0 by the internal identity
        let pi = heisenberg_density(&ctx);
        assert!(mc_residual(&p, &pi).unwrap().is_zero().unwrap());
        // non-Hamiltonian deformation → nonzero
        let bad = p
            .add(&u(&ctx, 1).mul(&th(&ctx, 0)).unwrap().mul(&th(&ctx, 1)).unwrap())
            .unwrap();
        assert!(!mc_residual(&p, &bad).unwrap().is_zero().unwrap());
    }

    #[test]
    fn virasoro_constraint_ideal_is_empty() {
        let ctx = scalar_ctx();
        let p = virasoro_density(&ctx);
        assert!(constraint_ideal(&p).unwrap().is_empty());
    }
}
