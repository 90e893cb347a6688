//! Built-in test functions and their serializable descriptions.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::assignment::{PrimeAssignment, PrimeRule, UNIT_DISC_SLACK};
use crate::error::{Error, Result};

/// Family names accepted by [`catalog_get`].
pub const FAMILIES: [&str; 7] =
    ["liouville", "archimedean_twist", "kronecker", "interval_indicator", "power_omega", "twisted", "product"];

/// Serializable description of a catalog function. Composite families
/// (`twisted`, `product`) carry their operands in `of`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub of: Vec<FunctionSpec>,
}

impl FunctionSpec {
    fn leaf(name: &str, params: &[(&str, f64)]) -> Self {
        Self {
            name: name.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            of: Vec::new(),
        }
    }

    pub fn liouville() -> Self {
        Self::leaf("liouville", &[])
    }

    /// `f(p) = p^{it}`.
    pub fn archimedean(t: f64) -> Self {
        Self::leaf("archimedean_twist", &[("t", t)])
    }

    pub fn kronecker(d: i64) -> Self {
        Self::leaf("kronecker", &[("d", d as f64)])
    }

    pub fn interval(y: f64) -> Self {
        Self::leaf("interval_indicator", &[("y", y)])
    }

    /// `f(n) = v^{Omega(n)}`.
    pub fn power_omega(v: f64) -> Self {
        Self::leaf("power_omega", &[("v", v)])
    }

    pub fn power_omega_complex(v: Complex64) -> Self {
        Self::leaf("power_omega", &[("v", v.re), ("v_im", v.im)])
    }

    /// The constant function 1.
    pub fn one() -> Self {
        Self::power_omega(1.0)
    }

    /// `f(p) p^{-it}`.
    pub fn twisted(base: FunctionSpec, t: f64) -> Self {
        Self { name: "twisted".into(), params: [("t".to_string(), t)].into(), of: vec![base] }
    }

    pub fn product(a: FunctionSpec, b: FunctionSpec) -> Self {
        Self { name: "product".into(), params: BTreeMap::new(), of: vec![a, b] }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("function specs always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Parses either JSON or the shorthand `name` / `name:k=v,k=v`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Self::from_json(s);
        }
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (s, ""),
        };
        let mut params = BTreeMap::new();
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::arg(format!("`{v}` is not a number")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(Self { name: name.to_string(), params, of: Vec::new() })
    }

    fn param(&self, key: &str) -> Result<f64> {
        let v = *self
            .params
            .get(key)
            .ok_or_else(|| Error::arg(format!("`{}` needs parameter `{key}`", self.name)))?;
        if !v.is_finite() {
            return Err(Error::arg(format!("parameter `{key}` must be finite")));
        }
        Ok(v)
    }

    fn allow_only(&self, keys: &[&str]) -> Result<()> {
        if let Some(k) = self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(Error::arg(format!("`{}` does not take parameter `{k}`", self.name)));
        }
        Ok(())
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.of.len() != n {
            return Err(Error::arg(format!("`{}` takes {n} operand(s), got {}", self.name, self.of.len())));
        }
        Ok(())
    }

    /// Builds the prime rule, validating parameters.
    pub fn rule(&self) -> Result<PrimeRule> {
        let leaf = |s: &Self| if s.of.is_empty() { Ok(()) } else { s.arity(0) };
        match self.name.as_str() {
            "liouville" => {
                leaf(self)?;
                self.allow_only(&[])?;
                Ok(PrimeRule::Constant(Complex64::new(-1.0, 0.0)))
            }
            "archimedean_twist" => {
                leaf(self)?;
                self.allow_only(&["t"])?;
                Ok(PrimeRule::Archimedean { t: self.param("t")? })
            }
            "kronecker" => {
                leaf(self)?;
                self.allow_only(&["d"])?;
                let d = self.param("d")?;
                if d == 0.0 || d.fract() != 0.0 || d.abs() > 1e15 {
                    return Err(Error::arg(format!("kronecker needs a nonzero integer d, got {d}")));
                }
                Ok(PrimeRule::Kronecker { d: d as i64 })
            }
            "interval_indicator" => {
                leaf(self)?;
                self.allow_only(&["y"])?;
                let y = self.param("y")?;
                if y < 1.0 {
                    return Err(Error::arg("interval_indicator needs y >= 1"));
                }
                Ok(PrimeRule::Interval { y })
            }
            "power_omega" => {
                leaf(self)?;
                self.allow_only(&["v", "v_im"])?;
                let v = Complex64::new(self.param("v")?, self.params.get("v_im").copied().unwrap_or(0.0));
                if v.norm() > 1.0 + UNIT_DISC_SLACK {
                    return Err(Error::OutsideUnitDisc { name: "v".into(), modulus: v.norm() });
                }
                Ok(PrimeRule::Constant(v))
            }
            "twisted" => {
                self.arity(1)?;
                self.allow_only(&["t"])?;
                Ok(self.of[0].rule()?.twisted(self.param("t")?))
            }
            "product" => {
                self.arity(2)?;
                self.allow_only(&[])?;
                Ok(PrimeRule::Product(Box::new(self.of[0].rule()?), Box::new(self.of[1].rule()?)))
            }
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let kv: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, ":{}", kv.join(","))?;
        }
        if !self.of.is_empty() {
            let ops: Vec<String> = self.of.iter().map(|s| s.to_string()).collect();
            write!(f, "({})", ops.join(";"))?;
        }
        Ok(())
    }
}

/// Resolves a spec to its prime assignment.
pub fn catalog_get(spec: &FunctionSpec) -> Result<PrimeAssignment> {
    Ok(PrimeAssignment::new(spec.to_string(), spec.rule()?))
}

/// `g(p) = f(p) p^{-it}`.
pub fn twist(f: &PrimeAssignment, t: f64) -> PrimeAssignment {
    PrimeAssignment::new(format!("twisted:t={t}({})", f.label), f.rule.clone().twisted(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(spec: &FunctionSpec, p: u64) -> Complex64 {
        catalog_get(spec).unwrap().eval_at_prime(p)
    }

    #[test]
    fn documented_values() {
        assert_eq!(at(&FunctionSpec::liouville(), 7919), Complex64::new(-1.0, 0.0));
        let iv = FunctionSpec::interval(100.0);
        assert_eq!(at(&iv, 101).re, 1.0);
        assert_eq!(at(&iv, 97).re, 0.0);
        assert_eq!(at(&iv, 211).re, 0.0);
        assert_eq!(at(&iv, 199).re, 1.0);
        let k = FunctionSpec::kronecker(5);
        assert_eq!(at(&k, 2).re, -1.0);
        assert_eq!(at(&k, 3).re, -1.0);
        assert_eq!(at(&k, 11).re, 1.0);
        assert_eq!(at(&k, 5).re, 0.0);
    }

    #[test]
    fn errors() {
        let bad = FunctionSpec { name: "zeta".into(), params: BTreeMap::new(), of: vec![] };
        assert!(matches!(catalog_get(&bad), Err(Error::UnknownFunction(_))));
        assert!(matches!(catalog_get(&FunctionSpec::power_omega(1.5)), Err(Error::OutsideUnitDisc { .. })));
        let missing = FunctionSpec { name: "kronecker".into(), params: BTreeMap::new(), of: vec![] };
        assert!(matches!(catalog_get(&missing), Err(Error::Argument(_))));
        assert!(catalog_get(&FunctionSpec::parse("kronecker:d=2.5").unwrap()).is_err());
    }

    #[test]
    fn twists_compose() {
        let f = catalog_get(&FunctionSpec::kronecker(-3)).unwrap();
        let once = twist(&twist(&f, 1.25), -0.5);
        let direct = twist(&f, 0.75);
        for p in [2u64, 3, 5, 7, 10007] {
            assert!((once.eval_at_prime(p) - direct.eval_at_prime(p)).norm() < 1e-12);
            assert_eq!(twist(&f, 0.0).eval_at_prime(p), f.eval_at_prime(p));
        }
        let lam = twist(&catalog_get(&FunctionSpec::liouville()).unwrap(), 2.0);
        let z = lam.eval_at_prime(13);
        assert!((z.norm() - 1.0).abs() < 1e-15);
        assert!((z + Complex64::from_polar(1.0, -2.0 * 13f64.ln())).norm() < 1e-15);
    }

    #[test]
    fn json_and_shorthand() {
        let spec = FunctionSpec::product(FunctionSpec::kronecker(5), FunctionSpec::twisted(FunctionSpec::liouville(), 0.3));
        let json = spec.to_json();
        assert_eq!(FunctionSpec::from_json(&json).unwrap(), spec);
        assert_eq!(FunctionSpec::parse(&json).unwrap(), spec);
        assert_eq!(FunctionSpec::parse("kronecker:d=5").unwrap(), FunctionSpec::kronecker(5));
        assert_eq!(FunctionSpec::parse("liouville").unwrap(), FunctionSpec::liouville());
    }
}
