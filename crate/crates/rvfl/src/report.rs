//! Friedman / Nemenyi analysis of an accuracy table.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rvfl_core::numerics::Matrix;
use rvfl_core::stats::{
    f_critical, friedman_chi2, friedman_f, nemenyi_cd, pairwise_significance, rank_rows, FStatistic, RankTable,
    SignificanceMatrix,
};

use crate::error::{config_err, Error, Result};
use crate::results::{parse_rows, Status, COLUMNS};

/// Accuracy of each method (column) on each dataset (row).
#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyTable {
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
    pub accuracy: Matrix,
}

fn index_of(list: &mut Vec<String>, name: &str) -> usize {
    list.iter().position(|n| n == name).unwrap_or_else(|| {
        list.push(name.to_string());
        list.len() - 1
    })
}

/// Rows named `base/split` count as one dataset.
fn base_name(dataset: &str) -> &str {
    dataset.split_once('/').map_or(dataset, |(b, _)| b)
}

/// Builds the table from a results file; every cell must have an `ok` row.
/// Datasets with several splits enter the rank test once, with the
/// accuracy averaged over their splits.
pub fn from_results(text: &str, source: &str) -> Result<AccuracyTable> {
    let rows = parse_rows(text, source)?;
    let (mut datasets, mut methods, mut splits) = (Vec::new(), Vec::new(), Vec::new());
    for r in &rows {
        index_of(&mut datasets, base_name(&r.dataset));
        index_of(&mut methods, &r.method);
        index_of(&mut splits, &r.dataset);
    }
    // every (split, method) pair needs an ok row
    let k = methods.len();
    let mut seen: Vec<Option<f64>> = vec![None; splits.len() * k];
    let mut failed = vec![false; seen.len()];
    for r in &rows {
        let i = index_of(&mut splits, &r.dataset) * k + index_of(&mut methods, &r.method);
        match (r.status, r.test_accuracy) {
            (Status::Ok, Some(a)) => {
                if seen[i].replace(a).is_some() {
                    return Err(config_err!("{source}: duplicate row for {} / {}", r.dataset, r.method));
                }
            }
            _ => failed[i] = true,
        }
    }
    let missing: Vec<String> = (0..seen.len())
        .filter(|&i| seen[i].is_none())
        .map(|i| {
            let note = if failed[i] { " (failed)" } else { "" };
            format!("{} / {}{note}", splits[i / k], methods[i % k])
        })
        .collect();
    if !missing.is_empty() {
        return Err(config_err!("{source}: no accuracy for {}", missing.join(", ")));
    }
    let mut sum = vec![0.0; datasets.len() * k];
    let mut count = vec![0usize; datasets.len() * k];
    for (i, a) in seen.iter().enumerate() {
        let d = index_of(&mut datasets, base_name(&splits[i / k]));
        sum[d * k + i % k] += a.expect("checked");
        count[d * k + i % k] += 1;
    }
    let data = sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect();
    Ok(AccuracyTable {
        accuracy: Matrix::from_vec(datasets.len(), k, data)?,
        datasets,
        methods,
    })
}

/// Wide form: a `dataset` column followed by one column per method.
pub fn from_wide(text: &str, source: &str) -> Result<AccuracyTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| config_err!("{source}: {e}"))?.clone();
    let methods: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut datasets = Vec::new();
    let mut data = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| config_err!("{source}: row {row}: {e}"))?;
        datasets.push(rec.get(0).unwrap_or_default().to_string());
        for (col, field) in rec.iter().enumerate().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| config_err!("{source}: row {row}, column '{}': '{field}' is not a number", header.get(col).unwrap_or("?")))?;
            data.push(v);
        }
    }
    Ok(AccuracyTable {
        accuracy: Matrix::from_vec(datasets.len(), methods.len(), data)
            .map_err(|e| config_err!("{source}: {e}"))?,
        datasets,
        methods,
    })
}

/// Reads either a results table or a wide accuracy table.
pub fn read_table(path: &Path) -> Result<AccuracyTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    if text.lines().next().is_some_and(|h| h.starts_with(&COLUMNS[..3].join(","))) {
        from_results(&text, &source)
    } else {
        from_wide(&text, &source)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatsReport {
    pub table: AccuracyTable,
    pub ranks: RankTable,
    pub chi2: f64,
    /// `None` when every dataset ranks the methods identically.
    pub f: Option<FStatistic>,
    pub f_critical: f64,
    pub cd: f64,
    pub significance: SignificanceMatrix,
    pub alpha: f64,
}

pub fn analyze(table: AccuracyTable, alpha: f64) -> Result<StatsReport> {
    let (big_m, m) = table.accuracy.shape();
    if m < 2 || big_m < 2 {
        return Err(config_err!(
            "the rank tests need at least 2 methods and 2 datasets, got {m} and {big_m}"
        ));
    }
    let ranks = rank_rows(&table.accuracy)?;
    let chi2 = friedman_chi2(&ranks.mean_ranks, big_m)?;
    let f = friedman_f(chi2, big_m, m).ok();
    Ok(StatsReport {
        f_critical: f_critical(alpha, m - 1, (m - 1) * (big_m - 1))?,
        cd: nemenyi_cd(m, big_m, alpha)?,
        significance: pairwise_significance(&ranks.mean_ranks, big_m, alpha)?,
        table,
        ranks,
        chi2,
        f,
        alpha,
    })
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).map_err(|e| Error::Runtime(e.to_string()))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Runtime(e.to_string()))?).expect("utf-8"))
}

impl StatsReport {
    pub fn ranks_csv(&self) -> Result<String> {
        let t = &self.table;
        let mut rows = vec![std::iter::once("dataset".to_string()).chain(t.methods.iter().cloned()).collect()];
        for (i, d) in t.datasets.iter().enumerate() {
            rows.push(std::iter::once(d.clone()).chain(self.ranks.ranks.row(i).iter().map(|r| r.to_string())).collect());
        }
        rows.push(std::iter::once("mean rank".to_string()).chain(self.ranks.mean_ranks.iter().map(|r| r.to_string())).collect());
        csv_text(rows)
    }

    pub fn significance_csv(&self) -> Result<String> {
        let names = &self.table.methods;
        let mut rows = vec![std::iter::once(String::new()).chain(names.iter().cloned()).collect::<Vec<_>>()];
        for (i, n) in names.iter().enumerate() {
            rows.push(
                std::iter::once(n.clone())
                    .chain((0..names.len()).map(|j| self.significance.get(i, j).symbol().to_string()))
                    .collect(),
            );
        }
        csv_text(rows)
    }

    pub fn markdown(&self) -> String {
        let t = &self.table;
        let (big_m, m) = t.accuracy.shape();
        let mut s = String::new();
        let _ = writeln!(s, "# Rank analysis\n");
        let _ = writeln!(s, "{m} methods on {big_m} datasets, alpha = {}.\n", self.alpha);
        let _ = writeln!(s, "| method | mean rank |\n|---|---|");
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| self.ranks.mean_ranks[a].total_cmp(&self.ranks.mean_ranks[b]));
        for j in order {
            let _ = writeln!(s, "| {} | {:.3} |", t.methods[j], self.ranks.mean_ranks[j]);
        }
        let _ = writeln!(s, "\n## Friedman test\n");
        let _ = writeln!(s, "- chi-square: {:.3} ({} d.f.)", self.chi2, m - 1);
        match &self.f {
            Some(f) => {
                let verdict = if f.value > self.f_critical { "rejected" } else { "not rejected" };
                let _ = writeln!(
                    s,
                    "- F statistic: {:.3} with ({}, {}) d.f., critical value {:.3}; equal performance {verdict}",
                    f.value, f.df1, f.df2, self.f_critical
                );
            }
            None => {
                let _ = writeln!(s, "- F statistic: undefined (all datasets rank the methods identically)");
            }
        }
        let _ = writeln!(s, "\n## Nemenyi post-hoc test\n");
        let _ = writeln!(s, "Critical difference: {:.3}. `s+`: row method significantly better than column method; `s-`: worse.\n", self.cd);
        let _ = writeln!(s, "| | {} |", t.methods.join(" | "));
        let _ = writeln!(s, "|---|{}", "---|".repeat(m));
        for i in 0..m {
            let cells: Vec<&str> = (0..m).map(|j| self.significance.get(i, j).symbol()).collect();
            let _ = writeln!(s, "| {} | {} |", t.methods[i], cells.join(" | "));
        }
        s
    }

    /// Writes `ranks.csv`, `significance.csv` and `report.md` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = [
            ("ranks.csv", self.ranks_csv()?),
            ("significance.csv", self.significance_csv()?),
            ("report.md", self.markdown()),
        ];
        let mut out = Vec::new();
        for (name, text) in files {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
            out.push(p);
        }
        Ok(out)
    }
}
