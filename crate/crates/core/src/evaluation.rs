//! Scoring measures against human similarity ratings.
//!
//! Ratings files are whitespace-separated tables with a header row. The
//! first three columns are the two words and the reference rating; any
//! further columns are named extras and may hold `NA`.

use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{
    distance_to_similarity, word_similarity, Measure, MeasureConfig, ResultKind,
};
use crate::stats::IcTable;
use crate::taxonomy::Taxonomy;

/// Depth exponents of the default parameter grid.
pub const DEFAULT_ALPHAS: [f64; 6] = [2.0, 1.0, 0.5, 0.0, -1.0, -2.0];
/// Density factors of the default parameter grid.
pub const DEFAULT_BETAS: [f64; 4] = [1.0, 0.5, 0.3, 0.2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatingRow {
    pub word1: String,
    pub word2: String,
    pub rating: f64,
    /// One entry per extra column; `None` for `NA`.
    pub extras: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatingDataset {
    name: String,
    rating_column: String,
    columns: Vec<String>,
    rows: Vec<RatingRow>,
}

pub fn load_ratings<R: BufRead>(source: R, name: &str) -> Result<RatingDataset> {
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim_start().starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let syntax = |message: String| Error::Syntax {
            line: line_no,
            message,
        };
        let Some(columns) = &header else {
            if fields.len() < 3 {
                return Err(syntax(
                    "header needs at least word1, word2 and rating columns".into(),
                ));
            }
            header = Some(fields.iter().map(|s| s.to_string()).collect());
            continue;
        };
        if fields.len() != columns.len() {
            return Err(syntax(format!(
                "expected {} fields, found {}",
                columns.len(),
                fields.len()
            )));
        }
        let rating: f64 = match fields[2] {
            "NA" => return Err(syntax("NA is not allowed in the rating column".into())),
            s => s
                .parse()
                .map_err(|_| syntax(format!("invalid rating `{s}`")))?,
        };
        if !rating.is_finite() {
            return Err(syntax(format!("rating must be finite, got {rating}")));
        }
        let extras = fields[3..]
            .iter()
            .map(|&s| match s {
                "NA" => Ok(None),
                s => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| syntax(format!("invalid value `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(RatingRow {
            word1: fields[0].to_string(),
            word2: fields[1].to_string(),
            rating,
            extras,
        });
    }
    let header = header.ok_or_else(|| Error::Syntax {
        line: 0,
        message: "ratings file has no header".into(),
    })?;
    if rows.len() < 2 {
        return Err(Error::Syntax {
            line: 0,
            message: format!(
                "a ratings dataset needs at least 2 rows, found {}",
                rows.len()
            ),
        });
    }
    Ok(RatingDataset {
        name: name.to_string(),
        rating_column: header[2].clone(),
        columns: header[3..].to_vec(),
        rows,
    })
}

impl RatingDataset {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rating_column(&self) -> &str {
        &self.rating_column
    }

    /// Names of the extra columns.
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[RatingRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn position(&self, w1: &str, w2: &str) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| (r.word1 == w1 && r.word2 == w2) || (r.word1 == w2 && r.word2 == w1))
    }

    /// Remove the pair (in either order), returning its former index and row.
    pub fn remove_pair(&mut self, w1: &str, w2: &str) -> Result<(usize, RatingRow)> {
        let i = self
            .position(w1, w2)
            .ok_or_else(|| Error::PairNotFound(w1.to_string(), w2.to_string()))?;
        Ok((i, self.rows.remove(i)))
    }

    pub fn insert_row(&mut self, index: usize, row: RatingRow) -> Result<()> {
        if row.extras.len() != self.columns.len() {
            return Err(Error::LengthMismatch(row.extras.len(), self.columns.len()));
        }
        self.rows.insert(index.min(self.rows.len()), row);
        Ok(())
    }
}

/// Copy of `ds` without the pair `w1`-`w2`.
pub fn ablate_pair(ds: &RatingDataset, w1: &str, w2: &str) -> Result<RatingDataset> {
    let mut out = ds.clone();
    out.remove_pair(w1, w2)?;
    out.name = format!("{}-without-{w1}-{w2}", ds.name);
    Ok(out)
}

/// Sample Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "correlation needs at least 2 points, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("first series"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("second series"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedPair {
    pub word1: String,
    pub word2: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    /// Column name or measure id.
    pub target: String,
    pub n: usize,
    pub r: f64,
    pub skipped: Vec<SkippedPair>,
}

fn report(
    ds: &RatingDataset,
    target: &str,
    scored: Vec<Result<f64, String>>,
) -> Result<EvalReport> {
    let mut human = Vec::new();
    let mut machine = Vec::new();
    let mut skipped = Vec::new();
    for (row, s) in ds.rows.iter().zip(scored) {
        match s {
            Ok(v) => {
                human.push(row.rating);
                machine.push(v);
            }
            Err(reason) => skipped.push(SkippedPair {
                word1: row.word1.clone(),
                word2: row.word2.clone(),
                reason,
            }),
        }
    }
    if human.len() < 2 {
        return Err(Error::EmptyUsableSet(target.to_string()));
    }
    Ok(EvalReport {
        dataset: ds.name.clone(),
        target: target.to_string(),
        n: human.len(),
        r: pearson(&human, &machine)?,
        skipped,
    })
}

/// Correlation of the rating column with an extra column, rows with `NA`
/// left out.
pub fn evaluate_column(ds: &RatingDataset, column: &str) -> Result<EvalReport> {
    let j = ds
        .columns
        .iter()
        .position(|c| c == column)
        .ok_or_else(|| Error::UnknownColumn(column.to_string()))?;
    let scored = ds
        .rows
        .iter()
        .map(|r| r.extras[j].ok_or_else(|| "NA".to_string()))
        .collect();
    report(ds, column, scored)
}

/// Score every pair with `measure` and correlate with the ratings. Distances
/// are turned into similarities first. Pairs that cannot be scored are
/// skipped with the reason.
pub fn evaluate_measure(
    t: &Taxonomy,
    ic: Option<&IcTable>,
    cfg: &MeasureConfig,
    measure: Measure,
    ds: &RatingDataset,
) -> Result<EvalReport> {
    if measure.needs_ic() && ic.is_none() {
        return Err(Error::InvalidConfig(format!(
            "measure `{measure}` needs information content"
        )));
    }
    let conversion = cfg.conversion_for(t);
    let scored = ds
        .rows
        .iter()
        .map(|row| {
            let r = word_similarity(t, ic, cfg, measure, &row.word1, &row.word2)
                .map_err(|e| e.to_string())?;
            Ok(match r.kind {
                ResultKind::Similarity => r.value,
                ResultKind::Distance => distance_to_similarity(&r, conversion).value,
            })
        })
        .collect();
    report(ds, measure.id(), scored)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `r[i][j]` is the correlation at `alphas[i]`, `betas[j]`.
    pub r: Vec<Vec<f64>>,
    /// Row and column of the best cell; the first one wins ties.
    pub best: (usize, usize),
}

impl SweepGrid {
    pub fn best_alpha_beta(&self) -> (f64, f64) {
        (self.alphas[self.best.0], self.betas[self.best.1])
    }

    pub fn best_r(&self) -> f64 {
        self.r[self.best.0][self.best.1]
    }
}

/// Correlation of the combined distance over an alpha x beta grid. Other
/// settings come from `base`. Negative alphas are evaluated with a warning.
pub fn parameter_sweep(
    t: &Taxonomy,
    ic: &IcTable,
    base: &MeasureConfig,
    ds: &RatingDataset,
    alphas: &[f64],
    betas: &[f64],
) -> Result<SweepGrid> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(Error::InvalidConfig("parameter grid is empty".into()));
    }
    let cells: Vec<(usize, usize)> = (0..alphas.len())
        .flat_map(|i| (0..betas.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| {
            let cfg = MeasureConfig {
                alpha: alphas[i],
                beta: betas[j],
                ..base.clone()
            };
            cfg.validate_allowing_negative_alpha()?;
            evaluate_measure(t, Some(ic), &cfg, Measure::Jc, ds).map(|rep| rep.r)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut r = vec![vec![0.0; betas.len()]; alphas.len()];
    let mut best = (0, 0);
    for (&(i, j), &v) in cells.iter().zip(&values) {
        r[i][j] = v;
        if v > r[best.0][best.1] {
            best = (i, j);
        }
    }
    Ok(SweepGrid {
        alphas: alphas.to_vec(),
        betas: betas.to_vec(),
        r,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "w1\tw2\tscore\tx\ty\n\
        a\tb\t3.0\t1.0\tNA\n\
        c\td\t2.0\t2.0\t5\n\
        e\tf\t1.0\t3.5\t4\n";

    fn ds() -> RatingDataset {
        load_ratings(SMALL.as_bytes(), "small").unwrap()
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(
            pearson(&[1.0, 2.0], &[1.0]).unwrap_err(),
            Error::LengthMismatch(2, 1)
        );
        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::ZeroVariance(_))
        ));
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn loads_rows_and_na() {
        let d = ds();
        assert_eq!(d.len(), 3);
        assert_eq!(d.rating_column(), "score");
        assert_eq!(d.columns(), ["x", "y"]);
        assert_eq!(d.rows()[0].extras, vec![Some(1.0), None]);
    }

    #[test]
    fn space_separated_rows_parse() {
        let src = "word1 word2 mc replication sim_edge sim_node sim_dist\n\
                   car automobile 3.92 3.9 30 10.358 30\n\
                   cemetery woodland 0.95 NA 0 0 10.672\n";
        let d = load_ratings(src.as_bytes(), "t").unwrap();
        assert_eq!(d.rows()[0].extras.len(), 4);
        assert_eq!(d.rows()[1].extras[0], None);
        assert_eq!(d.rows()[1].extras[3], Some(10.672));
    }

    #[test]
    fn rejects_bad_files() {
        let na = "a b r\nx y NA\nz w 1\n";
        assert!(matches!(
            load_ratings(na.as_bytes(), "t"),
            Err(Error::Syntax { line: 2, .. })
        ));
        let short = "a b r c\nx y 1\n";
        assert!(matches!(
            load_ratings(short.as_bytes(), "t"),
            Err(Error::Syntax { line: 2, .. })
        ));
        let one = "a b r\nx y 1\n";
        assert!(load_ratings(one.as_bytes(), "t").is_err());
        let bad = "a b r\nx y one\nz w 1\n";
        assert!(load_ratings(bad.as_bytes(), "t").is_err());
    }

    #[test]
    fn column_evaluation_skips_na() {
        let d = ds();
        let rep = evaluate_column(&d, "x").unwrap();
        assert_eq!(rep.n, 3);
        assert!(rep.r < -0.9);
        let rep = evaluate_column(&d, "y").unwrap();
        assert_eq!(rep.n, 2);
        assert_eq!(rep.skipped.len(), 1);
        assert_eq!(rep.skipped[0].reason, "NA");
        assert_eq!(rep.n + rep.skipped.len(), d.len());
        assert_eq!(
            evaluate_column(&d, "nope").unwrap_err(),
            Error::UnknownColumn("nope".into())
        );
    }

    #[test]
    fn ablation() {
        let d = ds();
        let cut = ablate_pair(&d, "d", "c").unwrap();
        assert_eq!(cut.len(), 2);
        assert_eq!(cut.name(), "small-without-d-c");
        assert!(matches!(
            ablate_pair(&d, "a", "z"),
            Err(Error::PairNotFound(..))
        ));

        let mut m = d.clone();
        let (i, row) = m.remove_pair("c", "d").unwrap();
        m.insert_row(i, row).unwrap();
        assert_eq!(m.rows(), d.rows());
    }
}
