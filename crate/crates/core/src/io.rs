//! JSON documents: lattices (with an optional congruence), QO-systems,
//! dimension vectors and dimension reports.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::congruence::Congruence;
use crate::dimension::DimensionMonoid;
use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;
use crate::primitive::{DimVector, ExtNat, QoSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub name: String,
    pub elements: Vec<String>,
    pub covers: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub congruence: Option<Vec<Vec<String>>>,
}

impl LatticeFile {
    pub fn from_lattice(l: &FiniteLattice, congruence: Option<&Congruence>) -> Self {
        LatticeFile {
            name: l.name_label().to_string(),
            elements: l.names().to_vec(),
            covers: l.covers().iter().map(|&(a, b)| [l.name(a).to_string(), l.name(b).to_string()]).collect(),
            congruence: congruence.map(|c| c.to_named_blocks(l)),
        }
    }

    pub fn build(&self) -> Result<(FiniteLattice, Option<Congruence>)> {
        let mut seen = BTreeSet::new();
        for c in &self.covers {
            if !seen.insert(c) {
                return Err(Error::Duplicate(format!("cover {} -> {}", c[0], c[1])));
            }
        }
        let elements: Vec<&str> = self.elements.iter().map(String::as_str).collect();
        let covers: Vec<(&str, &str)> = self.covers.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
        let l = FiniteLattice::from_names(&self.name, &elements, &covers)?;
        let congruence = match &self.congruence {
            None => None,
            Some(blocks) => {
                let idx = blocks
                    .iter()
                    .map(|b| b.iter().map(|x| l.index_of(x)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Some(Congruence::from_blocks(&l, &idx)?)
            }
        };
        Ok((l, congruence))
    }
}

pub fn parse_lattice(text: &str) -> Result<(FiniteLattice, Option<Congruence>)> {
    serde_json::from_str::<LatticeFile>(text)?.build()
}

pub fn lattice_to_json(l: &FiniteLattice, congruence: Option<&Congruence>) -> String {
    serde_json::to_string_pretty(&LatticeFile::from_lattice(l, congruence)).expect("serializable")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QoSystemFile {
    pub points: Vec<String>,
    pub rel: Vec<[String; 2]>,
}

impl QoSystemFile {
    pub fn from_qo(qo: &QoSystem) -> Self {
        QoSystemFile {
            points: qo.names().to_vec(),
            rel: qo.pairs().into_iter().map(|(p, q)| [qo.name(p).to_string(), qo.name(q).to_string()]).collect(),
        }
    }

    pub fn build(&self) -> Result<QoSystem> {
        let points: Vec<&str> = self.points.iter().map(String::as_str).collect();
        let rel: Vec<(&str, &str)> = self.rel.iter().map(|[p, q]| (p.as_str(), q.as_str())).collect();
        QoSystem::from_named(&points, &rel)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coordinate {
    Finite(u64),
    Infinite(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimVectorFile {
    pub values: BTreeMap<String, Coordinate>,
}

impl DimVectorFile {
    pub fn from_vector(qo: &QoSystem, v: &DimVector) -> Self {
        let values = (0..qo.len())
            .map(|p| {
                let c = match v[p].finite() {
                    Some(k) => Coordinate::Finite(k),
                    None => Coordinate::Infinite("inf".into()),
                };
                (qo.name(p).to_string(), c)
            })
            .collect();
        DimVectorFile { values }
    }

    /// Points missing from `values` are zero.
    pub fn build(&self, qo: &QoSystem) -> Result<DimVector> {
        let mut v = qo.zero();
        for (name, c) in &self.values {
            let p = qo.index_of(name)?;
            v.0[p] = match c {
                Coordinate::Finite(k) => ExtNat::fin(*k),
                Coordinate::Infinite(s) if s == "inf" => ExtNat::INF,
                Coordinate::Infinite(s) => return Err(Error::Parse(format!("bad coordinate `{s}`"))),
            };
        }
        qo.check_f(&v)?;
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFile {
    pub point: String,
    pub intervals: Vec<String>,
}

/// The `dim` report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub lattice: String,
    pub qosystem: QoSystemFile,
    /// Prime interval `lo..hi` to its point.
    pub generators: BTreeMap<String, String>,
    pub p0: Vec<String>,
    pub classes: Vec<ClassFile>,
}

impl DimReport {
    pub fn new(d: &DimensionMonoid<'_>) -> Self {
        let l = d.lattice;
        let iv = |a: usize, b: usize| format!("{}..{}", l.name(a), l.name(b));
        let generators = d
            .primes()
            .iter()
            .enumerate()
            .map(|(i, p)| (iv(p.lower, p.upper), d.qo.name(d.point_of_prime(i)).to_string()))
            .collect();
        let classes = d
            .classes()
            .into_iter()
            .enumerate()
            .map(|(p, ivs)| ClassFile {
                point: d.qo.name(p).to_string(),
                intervals: ivs.iter().map(|x| iv(x.lower, x.upper)).collect(),
            })
            .collect();
        DimReport {
            lattice: l.name_label().to_string(),
            qosystem: QoSystemFile::from_qo(&d.qo),
            generators,
            p0: d.qo.p0().into_iter().map(|p| d.qo.name(p).to_string()).collect(),
            classes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::congruence::principal_congruence;
    use crate::dimension::dimension_monoid;

    #[test]
    fn lattice_round_trip() {
        let l = builtin("N5").unwrap();
        let theta = principal_congruence(&l, 0, 2);
        let text = lattice_to_json(&l, Some(&theta));
        let (back, c) = parse_lattice(&text).unwrap();
        assert_eq!(back, l);
        assert_eq!(c, Some(theta));
        assert_eq!(parse_lattice(&lattice_to_json(&back, None)).unwrap().1, None);
    }

    #[test]
    fn lattice_rejections() {
        let dup = r#"{"name":"x","elements":["0","1"],"covers":[["0","1"],["0","1"]]}"#;
        assert!(matches!(parse_lattice(dup), Err(Error::Duplicate(_))));
        let bad = r#"{"name":"x","elements":["0","1"],"covers":[["0","2"]]}"#;
        assert!(matches!(parse_lattice(bad), Err(Error::UnknownElement(_))));
        let not_con = r#"{"name":"x","elements":["0","a","b","1"],"covers":[["0","a"],["0","b"],["a","1"],["b","1"]],"congruence":[["0","a"],["b"],["1"]]}"#;
        assert!(matches!(parse_lattice(not_con), Err(Error::NotACongruence(_))));
        assert!(matches!(parse_lattice("{"), Err(Error::Json(_))));
    }

    #[test]
    fn vectors_and_systems() {
        let l = builtin("N5").unwrap();
        let d = dimension_monoid(&l);
        let f = QoSystemFile::from_qo(&d.qo);
        assert_eq!(f.build().unwrap(), d.qo);
        let v = d.delta(0, 4);
        let text = serde_json::to_string(&DimVectorFile::from_vector(&d.qo, &v)).unwrap();
        assert!(text.contains("\"inf\""));
        let back: DimVectorFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build(&d.qo).unwrap(), v);
        let report = DimReport::new(&d);
        let s = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<DimReport>(&s).unwrap(), report);
        assert_eq!(report.generators.len(), 5);
    }
}
