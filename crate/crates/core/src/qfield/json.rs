//! JSON forms of [`Poly`] and [`RatFunc`].
//!
//! ```text
//! {"vars":["q","xn","xj"],"terms":[{"coeff":"-3","exps":[2,0,1]}]}
//! {"num":<poly>,"den":<poly>}
//! ```
//!
//! Coefficients are decimal strings. `xi` is listed (as a fourth variable)
//! only when some term uses it.

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{Monomial, Poly, Var, NVARS};
use super::ratfunc::RatFunc;

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    exps: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    vars: Vec<String>,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    num: Poly,
    den: Poly,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let nvars = if self.uses(Var::Xi) { 4 } else { 3 };
        let repr = PolyRepr {
            vars: Var::ALL[..nvars].iter().map(|v| v.name().to_string()).collect(),
            terms: self
                .terms()
                .rev()
                .map(|(m, c)| TermRepr {
                    coeff: c.to_string(),
                    exps: m.0[..nvars].to_vec(),
                })
                .collect(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let vars: Vec<Var> = repr
            .vars
            .iter()
            .map(|name| Var::from_name(name).ok_or_else(|| D::Error::custom(format!("unknown variable {name:?}"))))
            .collect::<Result<_, _>>()?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            if t.exps.len() != vars.len() {
                return Err(D::Error::custom(format!(
                    "term has {} exponents for {} variables",
                    t.exps.len(),
                    vars.len()
                )));
            }
            let coeff: BigInt = t
                .coeff
                .parse()
                .map_err(|_| D::Error::custom(format!("invalid integer coefficient {:?}", t.coeff)))?;
            let mut e = [0u32; NVARS];
            for (v, x) in vars.iter().zip(&t.exps) {
                e[v.index()] += x;
            }
            terms.push((Monomial(e), coeff));
        }
        Ok(Poly::from_terms(terms))
    }
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatFuncRepr {
            num: self.num().clone(),
            den: self.den().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = RatFuncRepr::deserialize(d)?;
        RatFunc::new(repr.num, repr.den).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_wire_format() {
        let p = &Poly::from_q_coeffs(&[-1, 0, 3]) + &Poly::var(Var::Xj);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"vars":["q","xn","xj"],"terms":[{"coeff":"3","exps":[2,0,0]},{"coeff":"1","exps":[0,0,1]},{"coeff":"-1","exps":[0,0,0]}]}"#
        );
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn big_coefficients_survive() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let p = Poly::constant(big);
        let back: Poly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn ratfunc_is_canonicalized_on_read() {
        let s = r#"{"num":{"vars":["q"],"terms":[{"coeff":"1","exps":[2]},{"coeff":"-1","exps":[0]}]},
                    "den":{"vars":["q"],"terms":[{"coeff":"1","exps":[1]},{"coeff":"-1","exps":[0]}]}}"#;
        let r: RatFunc = serde_json::from_str(s).unwrap();
        assert_eq!(r, RatFunc::from_poly(Poly::from_q_coeffs(&[1, 1])));
        let zero_den = r#"{"num":{"vars":[],"terms":[]},"den":{"vars":[],"terms":[]}}"#;
        assert!(serde_json::from_str::<RatFunc>(zero_den).is_err());
    }
}
