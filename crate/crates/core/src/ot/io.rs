//! CSV dumps of transport instances.
//!
//! Header `measure,weight,c0,...,c{d-1}`, then one row per atom: the `x`
//! atoms first, then the `y` atoms.

use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::ot::{check_same_dim, DiscreteMeasure};

pub fn write_instance(path: impl AsRef<Path>, x: &DiscreteMeasure, y: &DiscreteMeasure) -> Result<()> {
    check_same_dim(x, y)?;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["measure".to_string(), "weight".to_string()];
    header.extend((0..x.dim()).map(|k| format!("c{k}")));
    w.write_record(&header)?;
    for (tag, mu) in [("x", x), ("y", y)] {
        for i in 0..mu.len() {
            let mut rec = vec![tag.to_string(), mu.weights()[i].to_string()];
            rec.extend(mu.point(i).iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    let mut r = csv::Reader::from_path(path)?;
    let d = r.headers()?.len().checked_sub(2).filter(|d| *d > 0).ok_or_else(|| invalid("instance header needs coordinate columns"))?;
    let mut parts: [(Vec<f64>, Vec<f64>); 2] = Default::default();
    for rec in r.records() {
        let rec = rec?;
        let side = match &rec[0] {
            "x" => 0,
            "y" => 1,
            other => return Err(invalid(format!("unknown measure tag `{other}`"))),
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| invalid(format!("not a number: `{s}`")));
        parts[side].1.push(num(&rec[1])?);
        for k in 0..d {
            parts[side].0.push(num(rec.get(2 + k).ok_or(Error::DimensionMismatch { expected: d + 2, found: rec.len() })?)?);
        }
    }
    let [(xc, xw), (yc, yw)] = parts;
    Ok((DiscreteMeasure::new(d, xc, xw)?, DiscreteMeasure::new(d, yc, yw)?))
}
