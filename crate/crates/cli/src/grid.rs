use std::str::FromStr;

use anyhow::{bail, Context};
use serde::Serialize;

/// Inclusive uniform grid written `lo:hi:n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        // weighted form keeps grids symmetric about 0 exactly mirrored
        let m = (self.n - 1) as f64;
        (0..self.n)
            .map(|k| {
                let k = k as f64;
                self.lo * ((m - k) / m) + self.hi * (k / m)
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("expected lo:hi:n, got {s:?}");
        }
        let lo: f64 = parts[0].trim().parse().with_context(|| format!("bad lower bound {:?}", parts[0]))?;
        let hi: f64 = parts[1].trim().parse().with_context(|| format!("bad upper bound {:?}", parts[1]))?;
        let n: usize = parts[2].trim().parse().with_context(|| format!("bad point count {:?}", parts[2]))?;
        if !lo.is_finite() || !hi.is_finite() {
            bail!("grid bounds must be finite");
        }
        if n == 0 {
            bail!("grid needs at least one point");
        }
        if n > 1 && !(hi > lo) {
            bail!("grid upper bound must exceed the lower bound");
        }
        Ok(Grid { lo, hi, n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_expand() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let one: Grid = "2.5:2.5:1".parse().unwrap();
        assert_eq!(one.points(), vec![2.5]);
        let sym: Grid = "-0.9:0.9:19".parse().unwrap();
        let p = sym.points();
        assert_eq!(p[9], 0.0);
        assert!((0..19).all(|k| p[k] == -p[18 - k]));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["0:1", "a:1:3", "0:1:0", "1:0:4", "0:inf:3"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
