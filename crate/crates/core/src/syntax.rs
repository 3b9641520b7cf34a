//! Prefix-notation text grammar for measures, product measures, machines,
//! selection strategies and sequence-set families.
//!
//! ```text
//! measure  := FAIR | BERNOULLI r | DIRAC point | MIX (r measure)+ | SCALE r measure
//!           | SUM k measure^k | SUMGEO measure | RESTRICT measure clopen
//!           | TABLE [ word=value ... ]
//!           | JOIN product | MARG1 product | MARG2 product | @path
//! product  := PRODUCT measure measure | DIAGONAL measure | SPLIT measure
//! machine  := ID | VN | TAIL | PROJ_EVEN | PROJ_ODD | CDFINV measure
//!           | GRAPH machine | COMPOSE machine machine | SELECT strategy
//!           | SEQSET family | TRANSPORT measure measure point depth
//! strategy := STRIDE k offset | TREE [ history=index ... ]
//! family   := XOR k | COORD k | SETS k clopen^k
//! clopen   := [ word ... ]
//! ```
//!
//! `MIX` reads weight/measure pairs until the weights reach one. `@path`
//! loads a measure file: a `MEASURE <label>` line followed by an expression.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::extractors::{seqset_machine, selection_machine, SelectionStrategy, SequenceSetFamily};
use crate::machine::{
    cdf_inversion_map, compose, graph_machine, identity, project_even, project_odd, tail_map, MonotoneMachine,
};
use crate::measure::{
    bernoulli, diagonal, dirac, disjoint_sum, fair_coin, geometric_sum, join_transfer, marginal1, marginal2, mix,
    product, restrict_to_clopen, scale, split_transfer, tabulated, ClopenSet, CylinderMeasure, MeasureError,
    ProductCylinderMeasure,
};
use crate::point::PointOracle;
use crate::rational::{one, parse_rat, Rat};
use crate::transport::{make_instance, transport_machine, TransportPlan};
use crate::word::BinWord;

/// Histories audited when a `SELECT` strategy is parsed.
pub const SELECT_AUDIT_DEPTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("expected {0}, found end of input")]
    UnexpectedEnd(&'static str),
    #[error("expected {expected}, found `{found}`")]
    Unexpected { expected: &'static str, found: String },
    #[error("trailing input starting at `{0}`")]
    Trailing(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("{0}")]
    Construction(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Reads several expressions in sequence from one token stream.
pub struct Tokens {
    toks: Vec<String>,
    pos: usize,
}

impl Tokens {
    pub fn new(src: &str) -> Self {
        let spaced = src.replace('[', " [ ").replace(']', " ] ");
        Tokens { toks: spaced.split_whitespace().map(str::to_string).collect(), pos: 0 }
    }

    fn next(&mut self, expected: &'static str) -> Result<String, ParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or(ParseError::UnexpectedEnd(expected))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(String::as_str)
    }

    fn expect(&mut self, lit: &'static str) -> Result<(), ParseError> {
        let t = self.next(lit)?;
        if t != lit {
            return Err(ParseError::Unexpected { expected: lit, found: t });
        }
        Ok(())
    }

    pub fn rational(&mut self) -> Result<Rat, ParseError> {
        let t = self.next("a rational")?;
        parse_rat(&t).map_err(|_| ParseError::Unexpected { expected: "a rational", found: t })
    }

    pub fn natural(&mut self) -> Result<usize, ParseError> {
        let t = self.next("a natural number")?;
        t.parse().map_err(|_| ParseError::Unexpected { expected: "a natural number", found: t })
    }

    pub fn word(&mut self) -> Result<BinWord, ParseError> {
        let t = self.next("a binary word")?;
        t.parse().map_err(|_| ParseError::Unexpected { expected: "a binary word", found: t })
    }

    pub fn point(&mut self) -> Result<PointOracle, ParseError> {
        let t = self.next("a point")?;
        t.parse().map_err(|_| ParseError::Unexpected { expected: "a point", found: t })
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::Trailing(t.to_string())),
        }
    }

    pub fn clopen(&mut self) -> Result<ClopenSet, ParseError> {
        self.expect("[")?;
        let mut words = Vec::new();
        while self.peek() != Some("]") {
            words.push(self.word()?);
        }
        self.expect("]")?;
        Ok(ClopenSet::new(words))
    }

    pub fn measure(&mut self) -> Result<CylinderMeasure, ParseError> {
        let tag = self.next("a measure")?;
        if let Some(path) = tag.strip_prefix('@') {
            return load_measure_file(path).map(|(_, m)| m);
        }
        Ok(match tag.as_str() {
            "FAIR" => fair_coin(),
            "BERNOULLI" => bernoulli(self.rational()?)?,
            "DIRAC" => dirac(self.point()?),
            "MIX" => {
                let (mut weights, mut parts) = (Vec::new(), Vec::new());
                let mut total = Rat::from_integer(0.into());
                while total < one() {
                    let w = self.rational()?;
                    total += &w;
                    weights.push(w);
                    parts.push(self.measure()?);
                }
                mix(weights, parts)?
            }
            "SCALE" => {
                let r = self.rational()?;
                scale(r, self.measure()?)?
            }
            "SUM" => {
                let k = self.natural()?;
                let parts = (0..k).map(|_| self.measure()).collect::<Result<Vec<_>, _>>()?;
                disjoint_sum(parts)?
            }
            "SUMGEO" => geometric_sum(self.measure()?)?,
            "TABLE" => {
                self.expect("[")?;
                let mut table = BTreeMap::new();
                while self.peek() != Some("]") {
                    let entry = self.next("word=value")?;
                    let bad = || ParseError::Unexpected { expected: "word=value", found: entry.clone() };
                    let (w, v) = entry.split_once('=').ok_or_else(bad)?;
                    table.insert(w.parse::<BinWord>().map_err(|_| bad())?, parse_rat(v).map_err(|_| bad())?);
                }
                self.expect("]")?;
                tabulated(table)
            }
            "RESTRICT" => {
                let m = self.measure()?;
                restrict_to_clopen(m, self.clopen()?)
            }
            "JOIN" => join_transfer(self.product()?),
            "MARG1" => marginal1(self.product()?),
            "MARG2" => marginal2(self.product()?),
            _ => return Err(ParseError::Unexpected { expected: "a measure", found: tag }),
        })
    }

    pub fn product(&mut self) -> Result<ProductCylinderMeasure, ParseError> {
        let tag = self.next("a product measure")?;
        Ok(match tag.as_str() {
            "PRODUCT" => {
                let a = self.measure()?;
                product(a, self.measure()?)
            }
            "DIAGONAL" => diagonal(self.measure()?),
            "SPLIT" => split_transfer(self.measure()?),
            _ => return Err(ParseError::Unexpected { expected: "a product measure", found: tag }),
        })
    }

    pub fn strategy(&mut self) -> Result<SelectionStrategy, ParseError> {
        let tag = self.next("a strategy")?;
        match tag.as_str() {
            "STRIDE" => {
                let stride = self.natural()?;
                let offset = self.natural()?;
                if stride == 0 {
                    return Err(ParseError::Construction("stride must be positive".into()));
                }
                Ok(SelectionStrategy::Stride { stride, offset })
            }
            "TREE" => {
                self.expect("[")?;
                let mut map = BTreeMap::new();
                while self.peek() != Some("]") {
                    let entry = self.next("history=index")?;
                    let bad = || ParseError::Unexpected { expected: "history=index", found: entry.clone() };
                    let (h, i) = entry.split_once('=').ok_or_else(bad)?;
                    let h: BinWord = h.parse().map_err(|_| bad())?;
                    let i: usize = i.parse().map_err(|_| bad())?;
                    map.insert(h, i);
                }
                self.expect("]")?;
                Ok(SelectionStrategy::Tree(map))
            }
            _ => Err(ParseError::Unexpected { expected: "a strategy", found: tag }),
        }
    }

    pub fn family(&mut self) -> Result<SequenceSetFamily, ParseError> {
        let tag = self.next("a set family")?;
        match tag.as_str() {
            "XOR" => Ok(SequenceSetFamily::xor(self.natural()?)),
            "COORD" => Ok(SequenceSetFamily::coordinates(self.natural()?)),
            "SETS" => {
                let k = self.natural()?;
                let sets = (0..k).map(|_| self.clopen()).collect::<Result<Vec<_>, _>>()?;
                Ok(SequenceSetFamily::new(sets))
            }
            _ => Err(ParseError::Unexpected { expected: "a set family", found: tag }),
        }
    }

    pub fn machine(&mut self) -> Result<MonotoneMachine, ParseError> {
        let tag = self.next("a machine")?;
        let built = |e: &dyn std::fmt::Display| ParseError::Construction(e.to_string());
        Ok(match tag.as_str() {
            "ID" => identity(),
            "VN" => crate::extractors::von_neumann(),
            "TAIL" => tail_map(),
            "PROJ_EVEN" => project_even(),
            "PROJ_ODD" => project_odd(),
            "CDFINV" => cdf_inversion_map(self.measure()?).map_err(|e| built(&e))?,
            "GRAPH" => graph_machine(self.machine()?),
            "COMPOSE" => {
                let outer = self.machine()?;
                compose(outer, self.machine()?)
            }
            "SELECT" => selection_machine(self.strategy()?, SELECT_AUDIT_DEPTH).map_err(|e| built(&e))?,
            "SEQSET" => seqset_machine(self.family()?).map_err(|e| built(&e))?,
            "TRANSPORT" => {
                let mu = self.measure()?;
                let nu_prime = self.measure()?;
                let x0 = self.point()?;
                let depth = self.natural()?;
                let inst = make_instance(mu, nu_prime, x0).map_err(|e| built(&e))?;
                transport_machine(Arc::new(TransportPlan::new(inst, depth)))
            }
            _ => return Err(ParseError::Unexpected { expected: "a machine", found: tag }),
        })
    }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Tokens) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut t = Tokens::new(src);
    let v = f(&mut t)?;
    t.finish()?;
    Ok(v)
}

pub fn parse_measure(src: &str) -> Result<CylinderMeasure, ParseError> {
    whole(src, Tokens::measure)
}

pub fn parse_product(src: &str) -> Result<ProductCylinderMeasure, ParseError> {
    whole(src, Tokens::product)
}

pub fn parse_machine(src: &str) -> Result<MonotoneMachine, ParseError> {
    whole(src, Tokens::machine)
}

pub fn parse_strategy(src: &str) -> Result<SelectionStrategy, ParseError> {
    whole(src, Tokens::strategy)
}

pub fn parse_family(src: &str) -> Result<SequenceSetFamily, ParseError> {
    whole(src, Tokens::family)
}

pub fn parse_clopen(src: &str) -> Result<ClopenSet, ParseError> {
    whole(src, Tokens::clopen)
}

/// Parses `MEASURE <label>` followed by an expression. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_measure_file(text: &str) -> Result<(String, CylinderMeasure), ParseError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or(ParseError::UnexpectedEnd("MEASURE header"))?;
    let label = header
        .strip_prefix("MEASURE")
        .ok_or_else(|| ParseError::Unexpected { expected: "MEASURE header", found: header.to_string() })?
        .trim()
        .to_string();
    let body: Vec<&str> = lines.collect();
    Ok((label, parse_measure(&body.join(" "))?))
}

/// `MEASURE <label>` plus the measure's own expression.
pub fn format_measure_file(label: &str, m: &CylinderMeasure) -> String {
    format!("MEASURE {label}\n{}\n", m.label())
}

fn load_measure_file(path: &str) -> Result<(String, CylinderMeasure), ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::Io { path: path.to_string(), message: e.to_string() })?;
    parse_measure_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::pushforward_bounds;
    use crate::rational::{dyadic, rat};
    use crate::word::w;
    use proptest::prelude::*;

    #[test]
    fn builtins() {
        assert_eq!(parse_measure("FAIR").unwrap().eval(&w("010")), rat(1, 8));
        assert_eq!(parse_measure("BERNOULLI 2/3").unwrap().eval(&w("11")), rat(4, 9));
        let m = parse_measure("MIX 3/4 FAIR 1/4 DIRAC 0").unwrap();
        assert_eq!(m.eval(&w("0")), rat(5, 8));
        assert_eq!(m.label(), "MIX 3/4 FAIR 1/4 DIRAC (0)");
        assert_eq!(parse_measure("DIRAC 000…").unwrap().eval(&w("000")), rat(1, 1));
        let r = parse_measure("RESTRICT FAIR [0 11]").unwrap();
        assert_eq!(r.total(), rat(3, 4));
        assert_eq!(parse_measure("MARG1 PRODUCT BERNOULLI 1/3 FAIR").unwrap().eval(&w("1")), rat(1, 3));
        assert_eq!(parse_measure("SUMGEO FAIR").unwrap().eval(&w("01")), rat(1, 4));
    }

    #[test]
    fn tables() {
        let t = parse_measure("TABLE [ ε=1 0=1/2 1=1/4 ]").unwrap();
        assert_eq!(t.eval(&w("10")), rat(1, 8));
        assert_eq!(t.label(), "TABLE [ ε=1/1 0=1/2 1=1/4 ]");
        assert_eq!(parse_measure(t.label()).unwrap().eval(&w("0")), rat(1, 2));
        assert!(!crate::measure::check_additivity(&t, 3).passed());
        assert!(parse_measure("TABLE [ 0:1 ]").is_err());
    }

    #[test]
    fn errors() {
        assert_eq!(parse_measure("").unwrap_err(), ParseError::UnexpectedEnd("a measure"));
        assert!(matches!(parse_measure("FAIR FAIR"), Err(ParseError::Trailing(_))));
        assert!(matches!(parse_measure("MIX 3/4 FAIR 1/2 FAIR"), Err(ParseError::Measure(_))));
        assert!(matches!(parse_measure("BERNOULLI 3/2"), Err(ParseError::Measure(_))));
        assert!(matches!(parse_measure("COIN"), Err(ParseError::Unexpected { .. })));
        assert!(matches!(parse_machine("CDFINV SCALE 1/2 FAIR"), Err(ParseError::Construction(_))));
        assert!(matches!(parse_machine("SEQSET SETS 2 [1] [1]"), Err(ParseError::Construction(_))));
        assert!(matches!(parse_measure("@/nonexistent/file"), Err(ParseError::Io { .. })));
    }

    #[test]
    fn machines() {
        let vn = parse_machine("VN").unwrap();
        assert_eq!(vn.step(&w("100111")), w("10"));
        let c = parse_machine("COMPOSE VN CDFINV FAIR").unwrap();
        assert_eq!(c.step(&w("0110")), w("01"));
        let s = parse_machine("SELECT TREE [ ε=0 0=1 1=2 ]").unwrap();
        assert_eq!(s.step(&w("101")), w("110"));
        let s2 = parse_machine(&format!("SELECT {}", parse_strategy("STRIDE 2 1").unwrap())).unwrap();
        assert_eq!(s2.step(&w("0101")), w("11"));
        let fam = parse_family("SETS 2 [1] [01 10]").unwrap();
        assert_eq!(fam, SequenceSetFamily::xor(2));
        let t = parse_machine("TRANSPORT FAIR DIRAC 0 0 2").unwrap();
        assert_eq!(t.label(), "TRANSPORT FAIR DIRAC (0) (0) 2");
        assert!(parse_machine(t.label()).is_ok());
        let b = pushforward_bounds(&parse_machine("TAIL").unwrap(), &parse_measure("SUM 2 SCALE 1/2 FAIR SCALE 1/2 FAIR").unwrap(), &w("0"), 6);
        assert!(b.is_point() && b.contains(&dyadic(1)));
    }

    #[test]
    fn measure_files() {
        let dir = std::env::temp_dir().join(format!("cantor-syntax-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("witness.m");
        let m = parse_measure("MIX 3/4 FAIR 1/4 DIRAC 0").unwrap();
        std::fs::write(&path, format_measure_file("witness", &m)).unwrap();
        let loaded = parse_measure(&format!("@{}", path.display())).unwrap();
        assert_eq!(loaded.eval(&w("00")), m.eval(&w("00")));
        let (label, _) = parse_measure_file(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(label, "witness");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    fn leaf() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("FAIR".to_string()),
            (1i64..6, 7i64..9).prop_map(|(p, q)| format!("BERNOULLI {p}/{q}")),
            "[01]{1,3}".prop_map(|c| format!("DIRAC {c}")),
        ]
    }

    fn expr() -> impl Strategy<Value = String> {
        leaf().prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("MIX 1/3 {a} 2/3 {b}")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("JOIN PRODUCT {a} {b}")),
                leaf().prop_map(|a| format!("MARG2 SPLIT {a}")),
                (inner.clone(), "[01]{0,2}").prop_map(|(a, c)| format!("RESTRICT {a} [{c}]")),
                leaf().prop_map(|a| format!("SUM 2 SCALE 1/2 {a} SCALE 1/2 FAIR")),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn labels_reparse_to_the_same_measure(src in expr()) {
            let m = parse_measure(&src).unwrap();
            let again = parse_measure(m.label()).unwrap();
            prop_assert_eq!(again.label(), m.label());
            for s in BinWord::all_up_to(4) {
                prop_assert_eq!(again.eval(&s), m.eval(&s));
            }
        }
    }
}
