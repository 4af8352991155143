use std::io::Write;

use super::AucEstimate;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub classifier: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Pooled number of out-of-fold documents.
    pub samples: usize,
    /// Folds where precision or recall had a zero denominator.
    pub degenerate_folds: usize,
    pub auc: Option<AucEstimate>,
}

/// Rows of a classification report, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassificationReport {
    pub rows: Vec<ReportRow>,
}

const COLUMNS: &str = "Classifier\tPrecision\tRecall\tF1-Score\tAccuracy\tSamples";

impl ClassificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn row(&self, classifier: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.classifier == classifier)
    }

    /// The report with metrics rounded to two decimals.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{COLUMNS}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{}",
                r.classifier, r.precision, r.recall, r.f1, r.accuracy, r.samples
            )?;
        }
        Ok(())
    }

    /// Full-precision companion of [`Self::write_tsv`] with the AUC pair and
    /// the degenerate-fold count appended.
    pub fn write_full_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{COLUMNS}\tAUC-Trapezoid\tAUC-Pairwise\tDegenerateFolds")?;
        for r in &self.rows {
            let (t, p) = match r.auc {
                Some(a) => (a.trapezoid.to_string(), a.pairwise.to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{t}\t{p}\t{}",
                r.classifier,
                r.precision,
                r.recall,
                r.f1,
                r.accuracy,
                r.samples,
                r.degenerate_folds
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounded_and_full_layouts() {
        let mut report = ClassificationReport::new();
        report.push(ReportRow {
            classifier: "Logistic Regression".into(),
            precision: 0.86,
            recall: 0.82,
            f1: super::super::f1(0.86, 0.82),
            accuracy: 0.8249,
            samples: 332421,
            degenerate_folds: 0,
            auc: Some(AucEstimate {
                trapezoid: 0.9,
                pairwise: 0.9,
            }),
        });
        let mut short = Vec::new();
        report.write_tsv(&mut short).unwrap();
        assert_eq!(
            String::from_utf8(short).unwrap(),
            "Classifier\tPrecision\tRecall\tF1-Score\tAccuracy\tSamples\n\
             Logistic Regression\t0.86\t0.82\t0.84\t0.82\t332421\n"
        );
        let mut full = Vec::new();
        report.write_full_tsv(&mut full).unwrap();
        let full = String::from_utf8(full).unwrap();
        assert!(full
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("Logistic Regression\t0.86\t0.82\t0.839"));
        assert!(full.lines().nth(1).unwrap().ends_with("\t0.9\t0.9\t0"));
        assert!(report.row("Logistic Regression").is_some());
    }
}
