//! Descriptor tables, Pearson correlation, least squares and orderings.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const VOLUME: &str = "volume";
pub const ENERGY: &str = "relative_energy";

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },
    #[error("column {0} has zero variance")]
    ZeroVariance(String),
    #[error("design matrix is rank deficient; dependent columns: {0:?}")]
    RankDeficient(Vec<String>),
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("column {0} already exists")]
    DuplicateColumn(String),
    #[error("bad value {value:?} in column {column} for id {id}")]
    BadValue { id: String, column: String, value: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Rows keyed by graph id with named numeric columns; `None` marks a
/// missing value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DescriptorTable {
    ids: Vec<String>,
    names: Vec<String>,
    columns: Vec<Vec<Option<f64>>>,
}

impl DescriptorTable {
    pub fn new(names: &[&str]) -> Self {
        Self {
            ids: Vec::new(),
            names: names.iter().map(|s| s.to_string()).collect(),
            columns: vec![Vec::new(); names.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn push(&mut self, id: impl Into<String>, values: &[Option<f64>]) -> Result<(), StatsError> {
        let id = id.into();
        if values.len() != self.names.len() {
            return Err(StatsError::LengthMismatch(values.len(), self.names.len()));
        }
        if self.ids.contains(&id) {
            return Err(StatsError::DuplicateId(id));
        }
        self.ids.push(id);
        for (col, &v) in self.columns.iter_mut().zip(values) {
            col.push(v);
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Result<&[Option<f64>], StatsError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.columns[k].as_slice())
            .ok_or_else(|| StatsError::MissingColumn(name.to_string()))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn value(&self, row: usize, name: &str) -> Result<Option<f64>, StatsError> {
        Ok(self.column(name)?[row])
    }

    pub fn add_column(&mut self, name: &str, values: Vec<Option<f64>>) -> Result<(), StatsError> {
        if self.has_column(name) {
            return Err(StatsError::DuplicateColumn(name.to_string()));
        }
        if values.len() != self.len() {
            return Err(StatsError::LengthMismatch(values.len(), self.len()));
        }
        self.names.push(name.to_string());
        self.columns.push(values);
        Ok(())
    }

    /// Left join on id: rows of `self` without a match get `None`.
    pub fn join(&mut self, other: &DescriptorTable) -> Result<(), StatsError> {
        let index: HashMap<&str, usize> = other
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        for (name, col) in other.names.iter().zip(&other.columns) {
            let values = self
                .ids
                .iter()
                .map(|id| index.get(id.as_str()).and_then(|&i| col[i]))
                .collect();
            self.add_column(name, values)?;
        }
        Ok(())
    }

    /// Rows whose `name` column equals `value`.
    pub fn filter_eq(&self, name: &str, value: f64) -> Result<DescriptorTable, StatsError> {
        let col = self.column(name)?;
        let mut out = DescriptorTable {
            ids: Vec::new(),
            names: self.names.clone(),
            columns: vec![Vec::new(); self.names.len()],
        };
        for (i, v) in col.iter().enumerate() {
            if *v == Some(value) {
                out.ids.push(self.ids[i].clone());
                for (dst, src) in out.columns.iter_mut().zip(&self.columns) {
                    dst.push(src[i]);
                }
            }
        }
        Ok(out)
    }

    /// CSV with an `id` column first; empty cells are missing values.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, StatsError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let names: Vec<&str> = headers.iter().skip(1).collect();
        let mut table = DescriptorTable::new(&names);
        for record in rdr.records() {
            let record = record?;
            let id = record.get(0).unwrap_or_default().to_string();
            let mut values = Vec::with_capacity(names.len());
            for (k, name) in names.iter().enumerate() {
                let cell = record.get(k + 1).unwrap_or_default().trim();
                if cell.is_empty() {
                    values.push(None);
                } else {
                    let v = cell.parse::<f64>().map_err(|_| StatsError::BadValue {
                        id: id.clone(),
                        column: name.to_string(),
                        value: cell.to_string(),
                    })?;
                    values.push(Some(v));
                }
            }
            table.push(id, &values)?;
        }
        Ok(table)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), StatsError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["id".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.ids.iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend(self.columns.iter().map(|c| c[i].map(format_value).unwrap_or_default()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integers print without a fractional part, everything else with the
/// shortest round-trip representation.
pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn pairs(x: &[Option<f64>], y: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    x.iter()
        .zip(y)
        .filter_map(|(a, b)| Some((a.as_ref().copied()?, b.as_ref().copied()?)))
        .unzip()
}

/// Pearson correlation coefficient.
pub fn pcc(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewRows { need: 2, got: x.len() });
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
        return Err(StatsError::ZeroVariance("x".into()));
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance("y".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// PCC of two table columns, skipping rows where either is missing.
pub fn pcc_columns(table: &DescriptorTable, a: &str, b: &str) -> Result<f64, StatsError> {
    let (x, y) = pairs(table.column(a)?, table.column(b)?);
    pcc(&x, &y).map_err(|e| match e {
        StatsError::ZeroVariance(w) => StatsError::ZeroVariance(if w == "x" { a } else { b }.to_string()),
        other => other,
    })
}

/// Symmetric PCC matrix; entries that cannot be computed are `None`.
pub fn pcc_matrix(table: &DescriptorTable, names: &[&str]) -> Result<Vec<Vec<Option<f64>>>, StatsError> {
    for n in names {
        table.column(n)?;
    }
    Ok(names
        .iter()
        .map(|a| names.iter().map(|b| pcc_columns(table, a, b).ok()).collect())
        .collect())
}

pub fn write_pcc_matrix<W: Write>(writer: W, names: &[&str], m: &[Vec<Option<f64>>]) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![""];
    header.extend_from_slice(names);
    w.write_record(&header)?;
    for (name, row) in names.iter().zip(m) {
        let mut rec = vec![name.to_string()];
        rec.extend(row.iter().map(|v| v.map(|x| format!("{x:.6}")).unwrap_or_default()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub target: String,
    pub features: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    /// Rows used after dropping rows with any missing value.
    pub n_rows: usize,
}

impl RegressionModel {
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(features).map(|(c, x)| c * x).sum::<f64>()
    }
}

/// Ordinary least squares with intercept via Householder QR.
pub fn ols_fit(table: &DescriptorTable, target: &str, features: &[&str]) -> Result<RegressionModel, StatsError> {
    let y_col = table.column(target)?;
    let x_cols: Vec<&[Option<f64>]> = features.iter().map(|f| table.column(f)).collect::<Result<_, _>>()?;
    let rows: Vec<usize> = (0..table.len())
        .filter(|&i| y_col[i].is_some() && x_cols.iter().all(|c| c[i].is_some()))
        .collect();
    let p = features.len() + 1;
    if rows.len() < p {
        return Err(StatsError::TooFewRows { need: p, got: rows.len() });
    }
    let x = DMatrix::from_fn(rows.len(), p, |r, c| {
        if c == 0 { 1.0 } else { x_cols[c - 1][rows[r]].unwrap() }
    });
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|&i| y_col[i].unwrap()));

    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|k| x.column(k).norm()).fold(0.0, f64::max);
    let dependent: Vec<String> = (0..p)
        .filter(|&k| r[(k, k)].abs() <= 1e-10 * scale.max(1.0))
        .map(|k| if k == 0 { "intercept".to_string() } else { features[k - 1].to_string() })
        .collect();
    if !dependent.is_empty() {
        return Err(StatsError::RankDeficient(dependent));
    }
    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| StatsError::RankDeficient(vec![]))?;

    let fitted = &x * &beta;
    let mean = y.mean();
    let ss_res = (&y - &fitted).norm_squared();
    let ss_tot = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(RegressionModel {
        target: target.to_string(),
        features: features.iter().map(|s| s.to_string()).collect(),
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
        r_squared,
        n_rows: rows.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub min_id: String,
    pub min_volume: f64,
    pub max_id: String,
    pub max_volume: f64,
    /// Ids by ascending volume, ties by id: position `i` is `hv_{i+1}`.
    pub ranked: Vec<String>,
}

/// Volume ordering; rows without a volume are left out.
pub fn order_and_extremes(table: &DescriptorTable) -> Result<Option<Extremes>, StatsError> {
    let vol = table.column(VOLUME)?;
    let mut rows: Vec<(f64, &str)> = vol
        .iter()
        .zip(table.ids())
        .filter_map(|(v, id)| v.map(|v| (v, id.as_str())))
        .collect();
    if rows.is_empty() {
        return Ok(None);
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    Ok(Some(Extremes {
        min_id: first.1.to_string(),
        min_volume: first.0,
        max_id: last.1.to_string(),
        max_volume: last.0,
        ranked: rows.iter().map(|r| r.1.to_string()).collect(),
    }))
}

/// Number of distinct values after rounding to `decimals` places.
pub fn distinct_count(values: &[f64], decimals: u32) -> usize {
    let scale = 10f64.powi(decimals as i32);
    let mut keys: Vec<i64> = values.iter().map(|v| (v * scale).round() as i64).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpGroup {
    pub np: u32,
    pub count: usize,
    pub slope: Option<f64>,
    pub pcc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Two largest volumes are the two lowest energies and the three
    /// smallest volumes the three highest energies.
    pub extremes_match: bool,
    pub pcc: f64,
    /// `|pcc| > 0.6`.
    pub strong_correlation: bool,
    pub np_groups: Vec<NpGroup>,
    /// `None` when no group with Np in 4..=14 has a defined correlation.
    pub np_sign_agreement: Option<bool>,
}

pub const NP_GROUP_RANGE: std::ops::RangeInclusive<u32> = 4..=14;

fn top_ids(rows: &[(f64, f64, &str)], by_volume: bool, largest: bool, k: usize) -> Vec<String> {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| {
        let (x, y) = if by_volume { (a.0, b.0) } else { (a.1, b.1) };
        let o = x.total_cmp(&y).then_with(|| a.2.cmp(b.2));
        if largest { o.reverse() } else { o }
    });
    let mut ids: Vec<String> = sorted.iter().take(k).map(|r| r.2.to_string()).collect();
    ids.sort();
    ids
}

/// Checks volume against the relative-energy column.
pub fn stability_criteria_check(table: &DescriptorTable) -> Result<StabilityReport, StatsError> {
    let energy = table.column(ENERGY)?;
    let vol = table.column(VOLUME)?;
    let rows: Vec<(f64, f64, &str)> = (0..table.len())
        .filter_map(|i| Some((vol[i]?, energy[i]?, table.ids()[i].as_str())))
        .collect();
    if rows.len() < 5 {
        return Err(StatsError::TooFewRows { need: 5, got: rows.len() });
    }
    let extremes_match = top_ids(&rows, true, true, 2) == top_ids(&rows, false, false, 2)
        && top_ids(&rows, true, false, 3) == top_ids(&rows, false, true, 3);
    let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.0, r.1)).unzip();
    let pcc_all = pcc(&x, &y)?;

    let mut np_groups = Vec::new();
    if table.has_column("Np") {
        let np = table.column("Np")?;
        let mut groups: BTreeMap<u32, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for i in 0..table.len() {
            if let (Some(k), Some(v), Some(e)) = (np[i], vol[i], energy[i]) {
                let g = groups.entry(k as u32).or_default();
                g.0.push(v);
                g.1.push(e);
            }
        }
        for (k, (v, e)) in groups {
            let r = pcc(&v, &e).ok();
            let slope = r.map(|r| {
                let sd = |s: &[f64]| {
                    let m = s.iter().sum::<f64>() / s.len() as f64;
                    s.iter().map(|x| (x - m).powi(2)).sum::<f64>().sqrt()
                };
                r * sd(&e) / sd(&v)
            });
            np_groups.push(NpGroup { np: k, count: v.len(), slope, pcc: r });
        }
    }
    let signs: Vec<f64> = np_groups
        .iter()
        .filter(|g| NP_GROUP_RANGE.contains(&g.np))
        .filter_map(|g| g.pcc)
        .map(f64::signum)
        .collect();
    let np_sign_agreement = (!signs.is_empty()).then(|| signs.iter().all(|&s| s == signs[0]));
    Ok(StabilityReport {
        extremes_match,
        pcc: pcc_all,
        strong_correlation: pcc_all.abs() > 0.6,
        np_groups,
        np_sign_agreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcc_basics() {
        let x = [1.0, 2.0, 4.0, 7.0];
        assert!((pcc(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 7.0).collect();
        assert!((pcc(&x, &y).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(pcc(&x, &[1.0; 4]), Err(StatsError::ZeroVariance(_))));
        assert!(matches!(pcc(&x, &[1.0]), Err(StatsError::LengthMismatch(4, 1))));
    }

    #[test]
    fn pairwise_exclusion() {
        let mut t = DescriptorTable::new(&["a", "b"]);
        t.push("1", &[Some(1.0), Some(2.0)]).unwrap();
        t.push("2", &[Some(2.0), None]).unwrap();
        t.push("3", &[Some(3.0), Some(6.0)]).unwrap();
        t.push("4", &[None, Some(0.0)]).unwrap();
        assert!((pcc_columns(&t, "a", "b").unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(t.push("1", &[None, None]), Err(StatsError::DuplicateId(_))));
    }

    #[test]
    fn exact_linear_fit() {
        let mut t = DescriptorTable::new(&["a", "b", "y"]);
        for i in 0..10 {
            let (a, b) = (i as f64, ((i * i) % 7) as f64);
            t.push(i.to_string(), &[Some(a), Some(b), Some(2.0 * a - b + 3.0)]).unwrap();
        }
        let m = ols_fit(&t, "y", &["a", "b"]).unwrap();
        assert!((m.intercept - 3.0).abs() < 1e-10);
        assert!((m.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((m.coefficients[1] + 1.0).abs() < 1e-10);
        assert!((m.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_named() {
        let mut t = DescriptorTable::new(&["a", "b", "y"]);
        for i in 0..6 {
            let a = i as f64;
            t.push(i.to_string(), &[Some(a), Some(2.0 * a), Some(a * a)]).unwrap();
        }
        match ols_fit(&t, "y", &["a", "b"]) {
            Err(StatsError::RankDeficient(cols)) => assert_eq!(cols, vec!["b".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extremes_with_ties() {
        let mut t = DescriptorTable::new(&[VOLUME]);
        t.push("b", &[Some(2.0)]).unwrap();
        t.push("a", &[Some(2.0)]).unwrap();
        t.push("c", &[Some(1.0)]).unwrap();
        let e = order_and_extremes(&t).unwrap().unwrap();
        assert_eq!(e.ranked, ["c", "a", "b"]);
        assert_eq!((e.min_id.as_str(), e.max_id.as_str()), ("c", "b"));

        let mut one = DescriptorTable::new(&[VOLUME]);
        one.push("x", &[Some(4.3)]).unwrap();
        let e = order_and_extremes(&one).unwrap().unwrap();
        assert_eq!(e.min_volume, e.max_volume);
        assert!(order_and_extremes(&DescriptorTable::new(&[VOLUME])).unwrap().is_none());
    }

    #[test]
    fn distinct_volumes() {
        assert_eq!(distinct_count(&[1.0000001, 1.0000002, 1.5], 6), 2);
        assert_eq!(distinct_count(&[1.0000001, 1.0000002, 1.5], 7), 3);
    }

    #[test]
    fn anticorrelated_energy_passes() {
        let mut t = DescriptorTable::new(&[VOLUME, ENERGY, "Np"]);
        for i in 0..30 {
            let v = 20.0 + i as f64 * 0.1 + ((i * 7) % 5) as f64 * 0.01;
            t.push(i.to_string(), &[Some(v), Some(-v), Some((4 + i % 5) as f64)]).unwrap();
        }
        let r = stability_criteria_check(&t).unwrap();
        assert!(r.extremes_match);
        assert!(r.strong_correlation && (r.pcc + 1.0).abs() < 1e-12);
        assert_eq!(r.np_sign_agreement, Some(true));
        assert!(r.np_groups.iter().all(|g| g.slope.unwrap() < 0.0));
    }

    #[test]
    fn criterion_three_not_applicable() {
        let mut t = DescriptorTable::new(&[VOLUME, ENERGY, "Np"]);
        for i in 0..10 {
            t.push(i.to_string(), &[Some(i as f64), Some(-(i as f64)), Some(20.0)]).unwrap();
        }
        assert_eq!(stability_criteria_check(&t).unwrap().np_sign_agreement, None);
        let no_energy = DescriptorTable::new(&[VOLUME]);
        assert!(matches!(stability_criteria_check(&no_energy), Err(StatsError::MissingColumn(_))));
    }

    #[test]
    fn csv_round_trip_and_join() {
        let mut t = DescriptorTable::new(&["N", VOLUME]);
        t.push("g1", &[Some(20.0), Some(4.306208)]).unwrap();
        t.push("g2", &[Some(24.0), None]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "id,N,volume\ng1,20,4.306208\ng2,24,\n");
        let back = DescriptorTable::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, t);

        let ext = DescriptorTable::read_csv("id,relative_energy\ng2,1.5\nzz,3\n".as_bytes()).unwrap();
        let mut joined = back.clone();
        joined.join(&ext).unwrap();
        assert_eq!(joined.column(ENERGY).unwrap(), &[None, Some(1.5)]);
        assert!(DescriptorTable::read_csv("id,a\nx,abc\n".as_bytes()).is_err());
    }
}
