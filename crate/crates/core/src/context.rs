//! Declaration context: parameter symbols and charts (field names, theta
//! names, Laurent flags). Every symbolic value carries a shared context and a
//! chart id; operations on values from different contexts or charts fail.

use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub fields: Vec<String>,
    pub thetas: Vec<String>,
    /// Per-field flag: order-0 generators may carry negative exponents.
    pub laurent: Vec<bool>,
}

impl Chart {
    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Context {
    pub params: Vec<String>,
    pub charts: Vec<Chart>,
}

pub type Ctx = Arc<Context>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChartId(pub usize);

impl Context {
    pub fn builder() -> ContextBuilder {
        ContextBuilder::default()
    }

    pub fn nparams(&self) -> usize {
        self.params.len()
    }

    pub fn chart(&self, id: ChartId) -> &Chart {
        &self.charts[id.0]
    }

    pub fn chart_by_name(&self, name: &str) -> Result<ChartId> {
        self.charts
            .iter()
            .position(|c| c.name == name)
            .map(ChartId)
            .ok_or_else(|| Error::Config(format!("no chart named `{name}`")))
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }
}

/// Checks that two values may be combined.
pub fn require_same(a: &Ctx, ca: ChartId, b: &Ctx, cb: ChartId) -> Result<()> {
    if !Arc::ptr_eq(a, b) && **a != **b {
        return Err(Error::ContextMismatch(
            "operands declared in different contexts".into(),
        ));
    }
    if ca != cb {
        return Err(Error::ContextMismatch(format!(
            "operands live in different charts `{}` and `{}`",
            a.chart(ca).name,
            b.chart(cb).name
        )));
    }
    Ok(())
}

#[derive(Default)]
pub struct ContextBuilder {
    params: Vec<String>,
    charts: Vec<Chart>,
}

impl ContextBuilder {
    pub fn params<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.params = names.into_iter().map(Into::into).collect();
        self
    }

    /// Add a chart with default theta names (`th` for a scalar field, else
    /// `th1`, `th2`, ...).
    pub fn chart<S: Into<String>>(self, name: S, fields: &[&str], laurent: bool) -> Self {
        let fields: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
        let lf = vec![laurent; fields.len()];
        self.chart_full(name, fields, None, lf)
    }

    pub fn chart_full<S: Into<String>>(
        mut self,
        name: S,
        fields: Vec<String>,
        thetas: Option<Vec<String>>,
        laurent: Vec<bool>,
    ) -> Self {
        let thetas = thetas.unwrap_or_else(|| default_theta_names(&fields));
        assert_eq!(fields.len(), thetas.len());
        assert_eq!(fields.len(), laurent.len());
        self.charts.push(Chart {
            name: name.into(),
            fields,
            thetas,
            laurent,
        });
        self
    }

    pub fn build(self) -> Ctx {
        self.build_checked().expect("invalid context declaration")
    }

    pub fn build_checked(self) -> Result<Ctx> {
        let field_count = self.charts.first().map(|c| c.n_fields());
        for c in &self.charts {
            if Some(c.n_fields()) != field_count {
                return Err(Error::Config(
                    "all charts must declare the same number of fields".into(),
                ));
            }
        }
        const RESERVED: [&str; 3] = ["L", "M", "D"];
        for c in &self.charts {
            let mut seen: Vec<&String> = self.params.iter().collect();
            for name in c.fields.iter().chain(c.thetas.iter()) {
                if seen.contains(&name) {
                    return Err(Error::Config(format!(
                        "name `{name}` declared twice in the scope of chart `{}`",
                        c.name
                    )));
                }
                seen.push(name);
            }
            for name in seen {
                if RESERVED.contains(&name.as_str()) {
                    return Err(Error::Config(format!("`{name}` is a reserved token")));
                }
            }
        }
        Ok(Arc::new(Context {
            params: self.params,
            charts: self.charts,
        }))
    }
}

pub fn default_theta_names(fields: &[String]) -> Vec<String> {
    if fields.len() == 1 {
        vec!["th".to_string()]
    } else {
        (1..=fields.len()).map(|i| format!("th{i}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_defaults() {
        let ctx = Context::builder()
            .params(["c"])
            .chart("U1", &["u"], false)
            .build();
        assert_eq!(ctx.chart(ChartId(0)).thetas, vec!["th"]);
        assert_eq!(ctx.nparams(), 1);
    }

    #[test]
    fn mismatched_contexts_rejected() {
        let a = Context::builder().chart("U", &["u"], false).build();
        let b = Context::builder().chart("V", &["v"], false).build();
        assert!(require_same(&a, ChartId(0), &b, ChartId(0)).is_err());
        assert!(require_same(&a, ChartId(0), &a, ChartId(0)).is_ok());
    }
}
