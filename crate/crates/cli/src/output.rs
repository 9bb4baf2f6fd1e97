//! Fixed-precision TSV and JSON rendering.

use std::io::Write;

use anyhow::Result;
use serde_json::{json, Value};
use taxosim::{EvalReport, MeasureResult, SweepGrid, Taxonomy};

/// Similarity and distance values.
pub fn value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.10}")
    } else {
        x.to_string()
    }
}

/// Correlation coefficients.
pub fn corr(r: f64) -> String {
    format!("{r:.6}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn json_line(out: &mut impl Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

pub fn measure_json(t: &Taxonomy, measure: &str, w1: &str, w2: &str, r: &MeasureResult) -> Value {
    let id = |c: taxosim::Concept| t.id(c).to_string();
    json!({
        "measure": measure,
        "word1": w1,
        "word2": w2,
        "value": r.value,
        "kind": r.kind,
        "sense1": r.senses.map(|s| id(s.0)),
        "sense2": r.senses.map(|s| id(s.1)),
        "subsumer": r.subsumer.map(id),
        "path_len": r.path_len,
    })
}

pub fn measure_tsv(
    out: &mut impl Write,
    t: &Taxonomy,
    measure: &str,
    w1: &str,
    w2: &str,
    r: &MeasureResult,
) -> Result<()> {
    let id = |c: taxosim::Concept| t.id(c).to_string();
    let kind = match r.kind {
        taxosim::ResultKind::Similarity => "similarity",
        taxosim::ResultKind::Distance => "distance",
    };
    writeln!(
        out,
        "measure\tword1\tword2\tvalue\tkind\tsense1\tsense2\tsubsumer\tpath_len"
    )?;
    writeln!(
        out,
        "{measure}\t{w1}\t{w2}\t{}\t{kind}\t{}\t{}\t{}\t{}",
        value(r.value),
        opt(r.senses.map(|s| id(s.0))),
        opt(r.senses.map(|s| id(s.1))),
        opt(r.subsumer.map(id)),
        opt(r.path_len),
    )?;
    Ok(())
}

pub fn reports_tsv(out: &mut impl Write, reports: &[EvalReport]) -> Result<()> {
    writeln!(out, "dataset\ttarget\tn\tr\tskipped")?;
    for rep in reports {
        let skipped: Vec<String> = rep
            .skipped
            .iter()
            .map(|s| format!("{}/{}", s.word1, s.word2))
            .collect();
        let skipped = if skipped.is_empty() {
            "-".to_string()
        } else {
            skipped.join(",")
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{skipped}",
            rep.dataset,
            rep.target,
            rep.n,
            corr(rep.r)
        )?;
    }
    Ok(())
}

/// Rows are alphas, columns betas, then the best cell.
pub fn grid_tsv(out: &mut impl Write, g: &SweepGrid) -> Result<()> {
    write!(out, "alpha\\beta")?;
    for b in &g.betas {
        write!(out, "\t{b}")?;
    }
    writeln!(out)?;
    for (a, row) in g.alphas.iter().zip(&g.r) {
        write!(out, "{a}")?;
        for r in row {
            write!(out, "\t{}", corr(*r))?;
        }
        writeln!(out)?;
    }
    let (a, b) = g.best_alpha_beta();
    writeln!(out, "best\talpha={a}\tbeta={b}\tr={}", corr(g.best_r()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_precision() {
        assert_eq!(value(8.3), "8.3000000000");
        assert_eq!(value(f64::INFINITY), "inf");
        assert_eq!(corr(0.79409651), "0.794097");
    }

    #[test]
    fn grid_layout() {
        let g = SweepGrid {
            alphas: vec![1.0, 0.0],
            betas: vec![0.5],
            r: vec![vec![0.25], vec![0.75]],
            best: (1, 0),
        };
        let mut buf = Vec::new();
        grid_tsv(&mut buf, &g).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "alpha\\beta\t0.5\n1\t0.250000\n0\t0.750000\nbest\talpha=0\tbeta=0.5\tr=0.750000\n"
        );
    }
}
