//! JSON forms of operators, tables and telescoping certificates.
//!
//! ```text
//! {"inhomog": <ratfunc>|null, "terms": [{"sn": 1, "sj": 0, "coeff": <ratfunc>}]}
//! {"mode": "exact", "points": [{"n": 0, "j": 0, "value": <ratfunc>}]}
//! {"mode": "mod", "prime": p, "q": r, "points": [{"n": 0, "j": 0, "value": 17}]}
//! {"operator": <operator>, "certificate": <operator>}
//! ```
//!
//! `si` and `i` are optional and default to 0. Modular values may be given as
//! numbers or decimal strings.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{OreOperator, Point, SequenceTable, Shift, TelescopingCertificate};
use crate::qfield::{PrimePoint, RatFunc};

fn is_zero(x: &u32) -> bool {
    *x == 0
}

fn is_zero_i64(x: &i64) -> bool {
    *x == 0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRepr {
    sn: u32,
    sj: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    si: u32,
    coeff: RatFunc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorRepr {
    inhomog: Option<RatFunc>,
    terms: Vec<TermRepr>,
}

impl Serialize for OreOperator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        OperatorRepr {
            inhomog: self.inhomogeneous().cloned(),
            terms: self
                .terms()
                .iter()
                .map(|(u, c)| TermRepr {
                    sn: u.n,
                    sj: u.j,
                    si: u.i,
                    coeff: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OreOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(d)?;
        Ok(OreOperator::from_terms(
            repr.terms.into_iter().map(|t| (Shift::new(t.sn, t.sj, t.si), t.coeff)),
            repr.inhomog,
        ))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Residue {
    Num(u64),
    Str(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Mod(Residue),
    Exact(RatFunc),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRepr {
    n: i64,
    j: i64,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    i: i64,
    value: ValueRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRepr {
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    points: Vec<PointRepr>,
}

impl Serialize for SequenceTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let point = |p: &Point, value| PointRepr {
            n: p.n,
            j: p.j,
            i: p.i,
            value,
        };
        let repr = match self {
            SequenceTable::Exact(m) => TableRepr {
                mode: "exact".into(),
                prime: None,
                q: None,
                points: m.iter().map(|(p, v)| point(p, ValueRepr::Exact(v.clone()))).collect(),
            },
            SequenceTable::Modular { point: pt, values } => TableRepr {
                mode: "mod".into(),
                prime: Some(pt.prime()),
                q: Some(pt.q()),
                points: values.iter().map(|(p, v)| point(p, ValueRepr::Mod(Residue::Num(*v)))).collect(),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SequenceTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TableRepr::deserialize(d)?;
        let mut t = match repr.mode.as_str() {
            "exact" => SequenceTable::exact(),
            "mod" => {
                let (Some(p), Some(q)) = (repr.prime, repr.q) else {
                    return Err(D::Error::custom("a modular table needs \"prime\" and \"q\""));
                };
                SequenceTable::modular(PrimePoint::new(p, q).map_err(D::Error::custom)?)
            }
            other => return Err(D::Error::custom(format!("unknown table mode {other:?}"))),
        };
        for pr in repr.points {
            let at = Point::new(pr.n, pr.j, pr.i);
            let res = match (pr.value, &t) {
                (ValueRepr::Exact(r), SequenceTable::Exact(_)) => t.insert_exact(at, r),
                (ValueRepr::Mod(Residue::Num(v)), SequenceTable::Modular { .. }) => t.insert_mod(at, v),
                (ValueRepr::Mod(Residue::Str(s)), SequenceTable::Modular { point, .. }) => {
                    let v: num_bigint::BigInt =
                        s.parse().map_err(|_| D::Error::custom(format!("invalid residue {s:?} at {at}")))?;
                    let r = crate::qfield::modular::reduce(&v, point.prime());
                    t.insert_mod(at, r)
                }
                _ => return Err(D::Error::custom(format!("value at {at} does not match the table mode"))),
            };
            res.map_err(D::Error::custom)?;
        }
        Ok(t)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateRepr {
    operator: OreOperator,
    certificate: OreOperator,
}

impl Serialize for TelescopingCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateRepr {
            operator: self.operator().clone(),
            certificate: self.certificate().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TelescopingCertificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = CertificateRepr::deserialize(d)?;
        TelescopingCertificate::new(repr.operator, repr.certificate).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{Poly, Var};

    #[test]
    fn operator_round_trip() {
        let xn = RatFunc::new(Poly::var(Var::Xn), Poly::from_q_coeffs(&[1, -1])).unwrap();
        let op = (&OreOperator::term(Shift::new(1, 1, 1), xn) - &OreOperator::one())
            .with_inhomogeneous(Some(RatFunc::from_int(3)));
        let s = serde_json::to_string(&op).unwrap();
        assert!(s.contains("\"si\":1"));
        let back: OreOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
        let plain: OreOperator =
            serde_json::from_str(r#"{"inhomog":null,"terms":[{"sn":2,"sj":0,"coeff":{"num":{"vars":[],"terms":[{"coeff":"1","exps":[]}]},"den":{"vars":[],"terms":[{"coeff":"1","exps":[]}]}}}]}"#).unwrap();
        assert_eq!(plain, OreOperator::shift(2, 0));
    }

    #[test]
    fn table_round_trips() {
        let exact = SequenceTable::from_fn_exact((0..3).map(|n| Point::nj(n, 1)), |p| RatFunc::from_int(p.n));
        let back: SequenceTable = serde_json::from_str(&serde_json::to_string(&exact).unwrap()).unwrap();
        assert_eq!(back, exact);

        let pt = PrimePoint::new(1_000_000_007, 5).unwrap();
        let m = exact.project(&pt).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with(r#"{"mode":"mod","prime":1000000007,"q":5"#));
        assert_eq!(serde_json::from_str::<SequenceTable>(&s).unwrap(), m);

        let str_value = r#"{"mode":"mod","prime":1000000007,"q":5,"points":[{"n":0,"j":0,"value":"-1"}]}"#;
        let t: SequenceTable = serde_json::from_str(str_value).unwrap();
        assert_eq!(t.get_mod(&Point::nj(0, 0)), Some(1_000_000_006));
    }

    #[test]
    fn malformed_tables_are_rejected() {
        for bad in [
            r#"{"mode":"mod","points":[]}"#,
            r#"{"mode":"weird","points":[]}"#,
            r#"{"mode":"exact","points":[{"n":0,"j":0,"value":4}]}"#,
            r#"{"mode":"mod","prime":7,"q":3,"points":[{"n":0,"j":0,"value":"x"}]}"#,
        ] {
            assert!(serde_json::from_str::<SequenceTable>(bad).is_err(), "{bad}");
        }
    }
}
