use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::taxonomy::{Concept, Taxonomy};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Mle,
    GoodTuring,
    /// Values read from an IC file.
    Given,
}

/// `-log_base(p)`; zero probability maps to `+inf`.
pub fn information_content(prob: f64, log_base: f64) -> f64 {
    if prob >= 1.0 {
        0.0
    } else if prob <= 0.0 {
        f64::INFINITY
    } else if log_base == 2.0 {
        -prob.log2()
    } else {
        -prob.ln() / log_base.ln()
    }
}

pub(crate) fn check_log_base(log_base: f64) -> Result<()> {
    if log_base.is_finite() && log_base > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "log base must be > 1, got {log_base}"
        )))
    }
}

/// Per-concept probability and information content, indexed by [`Concept`].
#[derive(Clone, Debug, PartialEq)]
pub struct IcTable {
    prob: Vec<f64>,
    ic: Vec<f64>,
    log_base: f64,
    estimator: Estimator,
}

impl IcTable {
    pub fn from_probabilities(prob: Vec<f64>, log_base: f64, estimator: Estimator) -> Result<Self> {
        check_log_base(log_base)?;
        if let Some(p) = prob.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidConfig(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        let ic = prob
            .iter()
            .map(|&p| information_content(p, log_base))
            .collect();
        Ok(IcTable {
            prob,
            ic,
            log_base,
            estimator,
        })
    }

    /// Build from IC values directly; probabilities are `log_base^-ic`.
    pub fn from_ic(t: &Taxonomy, ic: Vec<f64>, log_base: f64) -> Result<Self> {
        check_log_base(log_base)?;
        if ic.len() != t.len() {
            return Err(Error::LengthMismatch(ic.len(), t.len()));
        }
        if let Some(v) = ic.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "information content {v} is negative"
            )));
        }
        let prob = ic.iter().map(|&v| log_base.powf(-v)).collect();
        Ok(IcTable {
            prob,
            ic,
            log_base,
            estimator: Estimator::Given,
        })
    }

    pub fn prob(&self, c: Concept) -> f64 {
        self.prob[c.index()]
    }

    /// May be `+inf` for zero-probability concepts.
    pub fn ic(&self, c: Concept) -> f64 {
        self.ic[c.index()]
    }

    /// Like [`IcTable::ic`] but refuses infinite values.
    pub fn finite_ic(&self, t: &Taxonomy, c: Concept) -> Result<f64> {
        let v = self.ic(c);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InfiniteIc(t.id(c).to_string()))
        }
    }

    pub fn len(&self) -> usize {
        self.ic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ic.is_empty()
    }

    pub fn log_base(&self) -> f64 {
        self.log_base
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    /// `<id>\t<prob>\t<ic>` per concept, sorted by id. Both numbers carry
    /// 12 significant digits.
    pub fn write_tsv<W: Write>(&self, t: &Taxonomy, mut out: W) -> std::io::Result<()> {
        let mut rows: Vec<Concept> = t.concepts().collect();
        rows.sort_by(|a, b| t.id(*a).cmp(t.id(*b)));
        for c in rows {
            writeln!(
                out,
                "{}\t{}\t{}",
                t.id(c),
                format_sig(self.prob(c)),
                format_sig(self.ic(c))
            )?;
        }
        Ok(())
    }

    /// Read the format written by [`IcTable::write_tsv`]. The IC column is
    /// authoritative. A virtual root missing from the file gets IC 0.
    pub fn load<R: BufRead>(t: &Taxonomy, source: R, log_base: f64) -> Result<Self> {
        check_log_base(log_base)?;
        let mut values: HashMap<Concept, (f64, f64)> = HashMap::new();
        for (i, line) in source.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let content = line.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let syntax = |message: String| Error::Syntax {
                line: line_no,
                message,
            };
            let (id, prob, ic) = match tokens.as_slice() {
                [] => continue,
                [id, prob, ic] => (*id, *prob, *ic),
                _ => return Err(syntax("expected `<concept> <prob> <ic>`".into())),
            };
            let c = t.concept(id)?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| syntax(format!("invalid number `{s}`")))
            };
            let (prob, ic) = (parse(prob)?, parse(ic)?);
            if !(0.0..=1.0).contains(&prob) || ic.is_nan() || ic < 0.0 {
                return Err(syntax(format!("values out of range for `{id}`")));
            }
            if values.insert(c, (prob, ic)).is_some() {
                return Err(Error::DuplicateConcept {
                    line: line_no,
                    id: id.to_string(),
                });
            }
        }
        if let Some(v) = t.virtual_root() {
            values.entry(v).or_insert((1.0, 0.0));
        }
        let mut prob = Vec::with_capacity(t.len());
        let mut ic = Vec::with_capacity(t.len());
        for c in t.concepts() {
            let (p, v) = values.get(&c).copied().ok_or_else(|| {
                Error::InvalidConfig(format!("IC file has no entry for `{}`", t.id(c)))
            })?;
            prob.push(p);
            ic.push(v);
        }
        Ok(IcTable {
            prob,
            ic,
            log_base,
            estimator: Estimator::Given,
        })
    }
}

/// Scientific notation with 12 significant digits; `inf` and `0` verbatim.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::parse_taxonomy;

    #[test]
    fn analytic_values() {
        assert_eq!(information_content(1.0, 2.0), 0.0);
        assert_eq!(information_content(0.25, 2.0), 2.0);
        assert_eq!(information_content(0.0, 2.0), f64::INFINITY);
        assert!((information_content(0.01, 10.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_base_must_exceed_one() {
        assert!(IcTable::from_probabilities(vec![0.5], 1.0, Estimator::Mle).is_err());
        assert!(IcTable::from_probabilities(vec![1.5], 2.0, Estimator::Mle).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let t = parse_taxonomy("node b\nnode a\nedge a b isa\n".as_bytes()).unwrap();
        let table = IcTable::from_probabilities(vec![1.0, 0.3], 2.0, Estimator::Mle).unwrap();
        let mut buf = Vec::new();
        table.write_tsv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "a\t3.00000000000e-1\t1.73696559417e0\nb\t1.00000000000e0\t0\n"
        );
        let back = IcTable::load(&t, text.as_bytes(), 2.0).unwrap();
        let a = t.concept("a").unwrap();
        assert!((back.ic(a) - table.ic(a)).abs() < 1e-10);
    }

    #[test]
    fn load_checks_coverage() {
        let t = parse_taxonomy("node a\nnode b\nedge a b isa\n".as_bytes()).unwrap();
        assert!(IcTable::load(&t, "a 0.5 1\n".as_bytes(), 2.0).is_err());
        assert_eq!(
            IcTable::load(&t, "zz 0.5 1\n".as_bytes(), 2.0).unwrap_err(),
            Error::UnknownConcept("zz".into())
        );
        let inf = IcTable::load(&t, "a 0 inf\nb 1 0\n".as_bytes(), 2.0).unwrap();
        assert!(inf.ic(t.concept("a").unwrap()).is_infinite());
        assert!(inf.finite_ic(&t, t.concept("a").unwrap()).is_err());
    }

    #[test]
    fn virtual_root_defaults_to_zero_ic() {
        let t = parse_taxonomy("node a\nnode x\n".as_bytes()).unwrap();
        let ic = IcTable::load(&t, "a 0.5 1\nx 0.5 1\n".as_bytes(), 2.0).unwrap();
        assert_eq!(ic.ic(t.virtual_root().unwrap()), 0.0);
    }
}
