//! Size of the critical set `{(s, t) : gamma'(s) = +-delta'(t)}` of the sum map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Chart;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalArea {
    pub eta: f64,
    /// Parameter-box area of the cells within `eta` of the critical set.
    pub area: f64,
    pub fraction: f64,
}

fn unit_tangents(c: &Chart, grid: usize) -> Result<(Vec<[f64; 2]>, f64)> {
    if c.param_dim() != 1 || c.n() != 1 {
        return Err(Error::InvalidArgument(format!("chart `{}` is not a planar curve", c.name())));
    }
    let (lo, hi) = c.domain()[0];
    let h = (hi - lo) / grid as f64;
    let v = (0..grid)
        .map(|i| {
            let d = c.derivative(lo + h * (i as f64 + 0.5), 1)?;
            let len = d[0].hypot(d[1]);
            if len == 0.0 {
                return Err(Error::RankDeficient { index: i, param: vec![lo + h * (i as f64 + 0.5)] });
            }
            Ok([d[0] / len, d[1] / len])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((v, hi - lo))
}

/// Area of `{(s, t) : min(|T_a(s) - T_b(t)|, |T_a(s) + T_b(t)|) < eta}` on a `grid x grid`
/// cell-center sampling, with `T` the unit tangents, for each `eta`.
pub fn critical_set_area(a: &Chart, b: &Chart, grid: usize, etas: &[f64]) -> Result<Vec<CriticalArea>> {
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    let (ta, la) = unit_tangents(a, grid)?;
    let (tb, lb) = unit_tangents(b, grid)?;
    let mut dist = Vec::with_capacity(grid * grid);
    for u in &ta {
        for v in &tb {
            let minus = (u[0] - v[0]).hypot(u[1] - v[1]);
            let plus = (u[0] + v[0]).hypot(u[1] + v[1]);
            dist.push(minus.min(plus));
        }
    }
    let total = (grid * grid) as f64;
    Ok(etas
        .iter()
        .map(|&eta| {
            let hits = dist.iter().filter(|&&d| d < eta).count() as f64;
            CriticalArea { eta, area: hits / total * la * lb, fraction: hits / total }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;
    use crate::measures::curve_catalog;

    #[test]
    fn parallel_segments_are_fully_critical() {
        let a = curve_catalog("line_segment", &json!({"a": [0.0, 0.0], "b": [1.0, 0.0]})).unwrap();
        let b = curve_catalog("line_segment", &json!({"a": [0.0, 1.0], "b": [2.0, 1.0]})).unwrap();
        let r = critical_set_area(&a, &b, 32, &[0.1, 0.01]).unwrap();
        assert!(r.iter().all(|c| c.fraction == 1.0 && (c.area - 1.0).abs() < 1e-15));
    }

    #[test]
    fn circles_shrink() {
        let c = curve_catalog("circle", &json!({})).unwrap();
        let r = critical_set_area(&c, &c, 512, &[0.2, 0.1, 0.05]).unwrap();
        assert!(r[0].area > r[1].area && r[1].area > r[2].area && r[2].area > 0.0);
    }
}
