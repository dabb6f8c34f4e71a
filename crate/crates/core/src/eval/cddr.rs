use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::CddrManifest;

/// Relative performance drop `(m_within - m_cross) / m_within`.
pub fn cddr(m_within: f64, m_cross: f64) -> Result<f64> {
    if !(m_within.is_finite() && m_cross.is_finite()) {
        return Err(Error::invalid("performance values must be finite"));
    }
    if m_within == 0.0 {
        return Err(Error::invalid("within-domain performance is zero"));
    }
    Ok((m_within - m_cross) / m_within)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CddrRecord {
    pub setting: String,
    pub m_within: f64,
    pub m_cross: f64,
    pub cddr: f64,
}

impl CddrRecord {
    pub fn new(setting: impl Into<String>, m_within: f64, m_cross: f64) -> Result<Self> {
        Ok(Self {
            setting: setting.into(),
            m_within,
            m_cross,
            cddr: cddr(m_within, m_cross)?,
        })
    }
}

/// Pearson product-moment correlation.
pub fn distance_cddr_correlation(distances: &[f64], cddrs: &[f64]) -> Result<f64> {
    if distances.len() != cddrs.len() {
        return Err(Error::invalid(format!(
            "series lengths differ: {} vs {}",
            distances.len(),
            cddrs.len()
        )));
    }
    if distances.len() < 2 {
        return Err(Error::invalid("correlation needs at least two settings"));
    }
    if distances.iter().chain(cddrs).any(|v| !v.is_finite()) {
        return Err(Error::invalid("series must be finite"));
    }
    let centred = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| x - m).collect::<Vec<_>>()
    };
    let (x, y) = (centred(distances), centred(cddrs));
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("a series is constant".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub metric: String,
    pub pearson: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CddrReport {
    pub records: Vec<CddrRecord>,
    pub correlations: Vec<CorrelationRecord>,
}

/// CDDR per setting, then the correlation of each distance column with the
/// CDDR column. Every setting must report the same distance names.
pub fn cddr_report(manifest: &CddrManifest) -> Result<CddrReport> {
    let entries = &manifest.settings;
    if entries.is_empty() {
        return Err(Error::invalid("manifest lists no settings"));
    }
    let names: Vec<&String> = entries[0].distances.keys().collect();
    let mut columns: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut records = Vec::with_capacity(entries.len());
    for e in entries {
        if e.distances.keys().collect::<Vec<_>>() != names {
            return Err(Error::invalid(format!(
                "setting '{}' reports a different set of distances",
                e.setting
            )));
        }
        for (k, &v) in &e.distances {
            columns.entry(k).or_default().push(v);
        }
        records.push(CddrRecord::new(&e.setting, e.m_within, e.m_cross)?);
    }
    let drops: Vec<f64> = records.iter().map(|r| r.cddr).collect();
    let correlations = columns
        .into_iter()
        .map(|(metric, xs)| match distance_cddr_correlation(&xs, &drops) {
            Ok(r) => CorrelationRecord { metric: metric.into(), pearson: Some(r), error: None },
            Err(e) => CorrelationRecord { metric: metric.into(), pearson: None, error: Some(e.to_string()) },
        })
        .collect();
    Ok(CddrReport { records, correlations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_arithmetic() {
        assert_eq!(cddr(0.8, 0.8).unwrap(), 0.0);
        assert_eq!(cddr(0.8, 0.4).unwrap(), 0.5);
        assert!((cddr(0.626, 0.626 * (1.0 - 0.0726)).unwrap() - 0.0726).abs() < 1e-12);
        assert!(cddr(0.0, 0.3).is_err());
    }

    #[test]
    fn record_invariant() {
        let r = CddrRecord::new("macenko", 0.9, 0.7).unwrap();
        assert_eq!(r.cddr, (r.m_within - r.m_cross) / r.m_within);
    }

    #[test]
    fn pearson_basics() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        assert!((distance_cddr_correlation(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((distance_cddr_correlation(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            distance_cddr_correlation(&x, &[1.0; 4]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(distance_cddr_correlation(&x, &[1.0, 2.0]).is_err());
        assert!(distance_cddr_correlation(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn pearson_against_independent_oracle() {
        // Reference values computed with numpy.corrcoef.
        let drops = [0.3469, 0.1204, 0.1459, 0.0726];
        let cols = [
            ([0.4282, 0.2243, 0.0459, 0.0254], 0.882650605829509),
            ([36.9427, 30.9044, 20.2304, 13.0406], 0.799206906359308),
        ];
        for (xs, want) in cols {
            let got = distance_cddr_correlation(&xs, &drops).unwrap();
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}
