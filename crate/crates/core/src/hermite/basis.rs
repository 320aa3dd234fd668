//! Basis truncations and operator matrices in the Hermite basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Version tag of the multi-index enumeration, recorded in serialized output.
pub const ORDERING_VERSION: &str = "graded-lex-v1";

/// Matrices larger than this many rows are refused.
pub const MAX_DIM: usize = 1 << 14;

/// Truncation of L^2(R^n) to tensor products `h_{a_1} x .. x h_{a_n}` with every `a_i < N`.
///
/// Multi-indices are enumerated by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisTruncation {
    n: usize,
    per_axis: usize,
    indices: Vec<Vec<usize>>,
}

impl BasisTruncation {
    pub fn new(n: usize, per_axis: usize) -> Result<Self> {
        if n == 0 || per_axis == 0 {
            return Err(Error::InvalidArgument(format!(
                "truncation needs n >= 1 and N >= 1, got n = {n}, N = {per_axis}"
            )));
        }
        let size = per_axis
            .checked_pow(n as u32)
            .filter(|&s| s <= MAX_DIM)
            .ok_or_else(|| Error::InvalidArgument(format!("truncation N^n = {per_axis}^{n} is too large")))?;
        let mut indices: Vec<Vec<usize>> = (0..size)
            .map(|mut i| {
                let mut digits = vec![0usize; n];
                for d in digits.iter_mut().rev() {
                    *d = i % per_axis;
                    i /= per_axis;
                }
                digits
            })
            .collect();
        indices.sort_by(|a, b| {
            let da: usize = a.iter().sum();
            let db: usize = b.iter().sum();
            da.cmp(&db).then_with(|| a.cmp(b))
        });
        Ok(Self { n, per_axis, indices })
    }

    pub fn one_dim(per_axis: usize) -> Result<Self> {
        Self::new(1, per_axis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn multi_index(&self, i: usize) -> &[usize] {
        &self.indices[i]
    }

    pub fn multi_indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn position(&self, multi: &[usize]) -> Option<usize> {
        self.indices.iter().position(|m| m == multi)
    }
}

/// Truncated operator: entry `(a, b)` is `<T h_b, h_a>`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    trunc: BasisTruncation,
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(trunc: BasisTruncation, entries: DMatrix<Complex64>) -> Result<Self> {
        let d = trunc.size();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, truncation needs {d}x{d}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator matrix has non-finite entries".into()));
        }
        Ok(Self { trunc, entries })
    }

    pub fn zeros(trunc: BasisTruncation) -> Self {
        let d = trunc.size();
        Self { trunc, entries: DMatrix::zeros(d, d) }
    }

    pub fn identity(trunc: BasisTruncation) -> Self {
        let d = trunc.size();
        Self { trunc, entries: DMatrix::identity(d, d) }
    }

    pub fn trunc(&self) -> &BasisTruncation {
        &self.trunc
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self { trunc: self.trunc.clone(), entries: self.entries.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { trunc: self.trunc.clone(), entries: &self.entries * &other.entries })
    }

    pub fn scale(&self, w: Complex64) -> Self {
        Self { trunc: self.trunc.clone(), entries: self.entries.map(|z| z * w) }
    }

    /// `self += w * other`.
    pub fn add_scaled(&mut self, w: Complex64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        self.entries.zip_apply(&other.entries, |a, b| *a += w * b);
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { trunc: self.trunc.clone(), entries: &self.entries - &other.entries })
    }

    /// Top-left `k x k` block.
    pub fn block(&self, k: usize) -> DMatrix<Complex64> {
        let k = k.min(self.dim());
        self.entries.view((0, 0), (k, k)).into_owned()
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(&self.entries)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::InvalidArgument(format!(
                "truncation mismatch: (n = {}, N = {}) vs (n = {}, N = {})",
                self.trunc.n, self.trunc.per_axis, other.trunc.n, other.trunc.per_axis
            )));
        }
        Ok(())
    }

    /// CSV with a `#` header recording `n`, `N` and the ordering version,
    /// then one line per row of interleaved `re,im` pairs.
    pub fn to_csv(&self, extra_header: &[String]) -> String {
        let mut out = String::new();
        out.push_str("# weyl-operator-matrix v1\n");
        out.push_str(&format!(
            "# n={} N={} dim={} ordering={}\n",
            self.trunc.n,
            self.trunc.per_axis,
            self.dim(),
            ORDERING_VERSION
        ));
        for line in extra_header {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .flat_map(|c| {
                    let z = self.entries[(r, c)];
                    [format!("{:e}", z.re), format!("{:e}", z.im)]
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut n = None;
        let mut per_axis = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for tok in header.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("n=") {
                        n = v.parse::<usize>().ok();
                    } else if let Some(v) = tok.strip_prefix("N=") {
                        per_axis = v.parse::<usize>().ok();
                    } else if let Some(v) = tok.strip_prefix("ordering=") {
                        if v != ORDERING_VERSION {
                            return Err(Error::Schema(format!("unsupported ordering `{v}`")));
                        }
                    }
                }
                continue;
            }
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Schema(format!("line {}: {e}", lineno + 1)))?;
            rows.push(row);
        }
        let (n, per_axis) = match (n, per_axis) {
            (Some(n), Some(p)) => (n, p),
            _ => return Err(Error::Schema("missing `n=` / `N=` header".into())),
        };
        let trunc = BasisTruncation::new(n, per_axis)?;
        let d = trunc.size();
        if rows.len() != d || rows.iter().any(|r| r.len() != 2 * d) {
            return Err(Error::Schema(format!("expected {d} rows of {} values", 2 * d)));
        }
        let entries = DMatrix::from_fn(d, d, |r, c| Complex64::new(rows[r][2 * c], rows[r][2 * c + 1]));
        Self::new(trunc, entries)
    }
}

pub fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_ordering_two_dims() {
        let t = BasisTruncation::new(2, 3).unwrap();
        assert_eq!(t.size(), 9);
        let expect: Vec<Vec<usize>> = vec![
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
            vec![1, 2],
            vec![2, 1],
            vec![2, 2],
        ];
        assert_eq!(t.multi_indices(), expect.as_slice());
        assert_eq!(t.position(&[1, 1]), Some(4));
    }

    #[test]
    fn enumeration_is_a_bijection() {
        let t = BasisTruncation::new(3, 4).unwrap();
        let mut seen = t.multi_indices().to_vec();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 64);
        assert!(seen.iter().all(|m| m.iter().all(|&a| a < 4)));
    }

    #[test]
    fn csv_round_trip() {
        let t = BasisTruncation::one_dim(3).unwrap();
        let m = DMatrix::from_fn(3, 3, |r, c| Complex64::new(r as f64 + 0.1, -(c as f64) / 3.0));
        let op = OperatorMatrix::new(t, m).unwrap();
        let csv = op.to_csv(&["config_hash=abc".into()]);
        assert!(csv.starts_with("# weyl-operator-matrix v1\n# n=1 N=3 dim=3 ordering=graded-lex-v1\n"));
        assert_eq!(OperatorMatrix::from_csv(&csv).unwrap(), op);
    }

    #[test]
    fn rejects_bad_shapes() {
        let t = BasisTruncation::one_dim(2).unwrap();
        assert!(OperatorMatrix::new(t.clone(), DMatrix::zeros(3, 3)).is_err());
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(OperatorMatrix::new(t, m).is_err());
    }
}
