use serde::{Deserialize, Serialize};

use super::{EmbeddedPointSet, Metric};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Raw, unvalidated distance table as read from a file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub base: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum Violation {
    NonFinite { p: usize, q: usize, value: f64 },
    Diagonal { p: usize, value: f64 },
    /// `d(p, q) <= 0` for distinct points (pseudometrics are rejected).
    Positivity { p: usize, q: usize, value: f64 },
    Symmetry { p: usize, q: usize, pq: f64, qp: f64 },
    /// `d(p, q) > d(p, r) + d(r, q)`.
    Triangle { p: usize, q: usize, r: usize, direct: f64, via: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every metric axiom. Structural problems (non-square table, base
/// out of range, duplicate names) are errors; axiom failures are listed in
/// the report with the offending indices.
pub fn validate_metric(raw: &DistanceMatrix, tol: &Tolerances) -> Result<ValidationReport> {
    let n = raw.names.len();
    if raw.rows.len() != n {
        return Err(Error::Structure(format!(
            "{} point names but {} matrix rows",
            n,
            raw.rows.len()
        )));
    }
    if let Some((i, row)) = raw.rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Structure(format!(
            "matrix row {} has {} entries, expected {}",
            i,
            row.len(),
            n
        )));
    }
    if n == 0 {
        return Err(Error::Structure("empty point set".into()));
    }
    if raw.base >= n {
        return Err(Error::Structure(format!("base index {} out of range", raw.base)));
    }
    let mut sorted: Vec<&String> = raw.names.iter().collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Structure(format!("duplicate point name {:?}", w[0])));
    }

    let d = |i: usize, j: usize| raw.rows[i][j];
    let mut violations = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if !d(p, q).is_finite() {
                violations.push(Violation::NonFinite { p, q, value: d(p, q) });
            }
        }
    }
    if !violations.is_empty() {
        return Ok(ValidationReport { violations });
    }
    for p in 0..n {
        if d(p, p).abs() > tol.tau {
            violations.push(Violation::Diagonal { p, value: d(p, p) });
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            if (d(p, q) - d(q, p)).abs() > tol.tau {
                violations.push(Violation::Symmetry { p, q, pq: d(p, q), qp: d(q, p) });
            }
            if d(p, q) <= 0.0 || d(q, p) <= 0.0 {
                violations.push(Violation::Positivity { p, q, value: d(p, q).min(d(q, p)) });
            }
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            for r in 0..n {
                if r == p || r == q {
                    continue;
                }
                let via = d(p, r) + d(r, q);
                if d(p, q) > via + tol.tau {
                    violations.push(Violation::Triangle { p, q, r, direct: d(p, q), via });
                }
            }
        }
    }
    Ok(ValidationReport { violations })
}

/// A validated finite pointed metric space.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    names: Vec<String>,
    dist: Vec<f64>,
    base: usize,
    embedding: Option<EmbeddedPointSet>,
}

impl FiniteMetricSpace {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, base: usize) -> Result<Self> {
        Self::from_matrix(DistanceMatrix { names, rows, base })
    }

    pub fn from_matrix(raw: DistanceMatrix) -> Result<Self> {
        let report = validate_metric(&raw, &Tolerances::default())?;
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidMetric(format!(
                "{} violation(s), first: {:?}",
                report.violations.len(),
                v
            )));
        }
        let n = raw.names.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    // symmetrize exactly so d(i,j) == d(j,i) bit for bit
                    dist[i * n + j] = 0.5 * (raw.rows[i][j] + raw.rows[j][i]);
                }
            }
        }
        Ok(Self { names: raw.names, dist, base: raw.base, embedding: None })
    }

    /// Tabulate an embedded point set. Validation still runs.
    pub fn from_embedded(points: EmbeddedPointSet, names: Option<Vec<String>>) -> Result<Self> {
        let n = points.len();
        let names = match names {
            Some(names) if names.len() != n => {
                return Err(Error::Structure(format!(
                    "{} names for {} coordinates",
                    names.len(),
                    n
                )))
            }
            Some(names) => names,
            None => (0..n).map(|i| format!("p{i}")).collect(),
        };
        let rows = (0..n).map(|i| (0..n).map(|j| points.d(i, j)).collect()).collect();
        let mut space = Self::from_matrix(DistanceMatrix { names, rows, base: points.base() })?;
        space.embedding = Some(points);
        Ok(space)
    }

    pub fn to_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        DistanceMatrix {
            names: self.names.clone(),
            rows: (0..n).map(|i| self.dist[i * n..(i + 1) * n].to_vec()).collect(),
            base: self.base,
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn embedding(&self) -> Option<&EmbeddedPointSet> {
        self.embedding.as_ref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    /// Smallest distance between distinct points; `None` for a singleton.
    pub fn min_distance(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .min_by(f64::total_cmp)
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::Domain(format!("point index {i} out of range")))
        }
    }

    pub(crate) fn check_distinct(&self, x: usize, y: usize) -> Result<()> {
        self.check_index(x)?;
        self.check_index(y)?;
        if x == y {
            return Err(Error::Domain(format!(
                "points must be distinct, got {} twice",
                self.name(x)
            )));
        }
        Ok(())
    }
}

impl Metric for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.names.len()
    }

    #[inline]
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.names.len() + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(rows: Vec<Vec<f64>>) -> DistanceMatrix {
        let names = (0..rows.len()).map(|i| ["a", "b", "c", "d"][i].to_string()).collect();
        DistanceMatrix { names, rows, base: 0 }
    }

    #[test]
    fn equilateral_is_valid() {
        let r = raw(vec![vec![0., 1., 1.], vec![1., 0., 1.], vec![1., 1., 0.]]);
        assert!(validate_metric(&r, &Tolerances::default()).unwrap().is_valid());
    }

    #[test]
    fn triangle_violation_names_the_triple() {
        // d(a,b)=3, d(b,c)=1, d(a,c)=1
        let r = raw(vec![vec![0., 3., 1.], vec![3., 0., 1.], vec![1., 1., 0.]]);
        let rep = validate_metric(&r, &Tolerances::default()).unwrap();
        assert_eq!(
            rep.violations,
            vec![Violation::Triangle { p: 0, q: 1, r: 2, direct: 3.0, via: 2.0 }]
        );
    }

    #[test]
    fn pseudometric_rejected() {
        let r = raw(vec![vec![0., 0., 1.], vec![0., 0., 1.], vec![1., 1., 0.]]);
        let rep = validate_metric(&r, &Tolerances::default()).unwrap();
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Positivity { p: 0, q: 1, .. })));
        assert!(FiniteMetricSpace::from_matrix(r).is_err());
    }

    #[test]
    fn asymmetry_and_diagonal_reported() {
        let r = raw(vec![vec![0.5, 1.], vec![2., 0.]]);
        let rep = validate_metric(&r, &Tolerances::default()).unwrap();
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::Diagonal { p: 0, .. })));
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::Symmetry { .. })));
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let r = DistanceMatrix {
            names: vec!["a".into(), "b".into()],
            rows: vec![vec![0., 1.], vec![1.]],
            base: 0,
        };
        assert!(matches!(validate_metric(&r, &Tolerances::default()), Err(Error::Structure(_))));
        let r = DistanceMatrix { names: vec!["a".into()], rows: vec![vec![0.]], base: 3 };
        assert!(matches!(validate_metric(&r, &Tolerances::default()), Err(Error::Structure(_))));
    }

    #[test]
    fn names_resolve() {
        let s = FiniteMetricSpace::new(
            vec!["x".into(), "y".into()],
            vec![vec![0., 2.], vec![2., 0.]],
            0,
        )
        .unwrap();
        assert_eq!(s.index_of("y"), Some(1));
        assert_eq!(s.index_of("z"), None);
        assert_eq!(s.min_distance(), Some(2.0));
    }
}
