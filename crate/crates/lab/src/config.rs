use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::ber::BerScheme;
use crate::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    BerUncoded,
    BerCoded,
    RatesTable3,
    EnergyTable4,
    RegionLocus,
    Netsched,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::BerUncoded => "ber-uncoded",
            Self::BerCoded => "ber-coded",
            Self::RatesTable3 => "rates-table3",
            Self::EnergyTable4 => "energy-table4",
            Self::RegionLocus => "region-locus",
            Self::Netsched => "netsched",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        [Self::BerUncoded, Self::BerCoded, Self::RatesTable3, Self::EnergyTable4, Self::RegionLocus, Self::Netsched]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LabError::usage(format!("unknown experiment kind {s:?}")))
    }
}

/// Everything one run needs. For the table kinds `ebn0_grid` holds the
/// power grid in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub scheme: BerScheme,
    pub delta: f64,
    pub phi: f64,
    pub ebn0_grid: Vec<f64>,
    pub packets: usize,
    pub source_bits: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub const TABLE_GRID_DB: [f64; 6] = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0];

impl ExperimentConfig {
    /// Desk-scale defaults for each kind.
    pub fn new(kind: ExperimentKind) -> Self {
        let coded = kind == ExperimentKind::BerCoded;
        let ebn0_grid = match kind {
            ExperimentKind::BerUncoded => (0..=7).map(|i| 2.0 * i as f64).collect(),
            ExperimentKind::BerCoded => (0..=8).map(|i| 0.5 * i as f64).collect(),
            _ => TABLE_GRID_DB.to_vec(),
        };
        Self {
            kind,
            scheme: if coded { BerScheme::JointCnc } else { BerScheme::Uncoded },
            delta: 0.0,
            phi: 0.0,
            ebn0_grid,
            packets: 200,
            source_bits: if coded { 4096 } else { 2048 },
            max_iter: 50,
            seed: 1,
            out: None,
        }
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::usage(format!("line {}: expected key = value", no + 1)))?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                LabError::Usage(m) => LabError::usage(format!("line {}: {m}", no + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn load(kind: ExperimentKind, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::usage(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::new(kind);
        cfg.apply_text(&text)?;
        if cfg.kind != kind && !(cfg.kind.is_ber() && kind.is_ber()) {
            return Err(LabError::usage(format!("config is for {}, not {}", cfg.kind, kind)));
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kind" => {
                self.kind = value.parse()?;
                match self.kind {
                    ExperimentKind::BerUncoded => self.scheme = BerScheme::Uncoded,
                    ExperimentKind::BerCoded if self.scheme == BerScheme::Uncoded => self.scheme = BerScheme::JointCnc,
                    _ => {}
                }
            }
            "scheme" => {
                self.scheme = value.parse()?;
                self.kind = if self.scheme == BerScheme::Uncoded { ExperimentKind::BerUncoded } else { ExperimentKind::BerCoded };
            }
            "delta" => self.delta = number(key, value)?,
            "phi" => self.phi = number(key, value)?,
            "ebn0_grid" => self.ebn0_grid = parse_grid(value)?,
            "packets" => self.packets = number(key, value)?,
            "source_bits" => self.source_bits = number(key, value)?,
            "max_iter" => self.max_iter = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(LabError::usage(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_grid.is_empty() {
            return Err(LabError::usage("empty grid"));
        }
        if self.kind.is_ber() {
            if self.packets == 0 {
                return Err(LabError::usage("packets must be at least 1"));
            }
            if self.source_bits == 0 || !self.source_bits.is_multiple_of(2) {
                return Err(LabError::usage("packets need a positive even bit count"));
            }
            if !(0.0..1.0).contains(&self.delta) || !self.phi.is_finite() {
                return Err(LabError::usage("delta must lie in [0, 1) and phi must be finite"));
            }
            if self.kind == ExperimentKind::BerCoded && self.scheme == BerScheme::Uncoded {
                return Err(LabError::usage("coded runs need a decoder scheme"));
            }
        } else if self.ebn0_grid.iter().any(|x| !x.is_finite()) {
            return Err(LabError::usage("grid values must be finite"));
        }
        Ok(())
    }
}

impl ExperimentKind {
    pub fn is_ber(self) -> bool {
        matches!(self, Self::BerUncoded | Self::BerCoded)
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| LabError::usage(format!("bad value {value:?} for {key}")))
}

/// `start:step:stop` (inclusive) or a comma list. `inf` marks a noise-free point.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(LabError::usage("empty grid"));
    }
    let bad = || LabError::usage(format!("bad grid {text:?}"));
    let parse = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| bad())?;
        if v.is_nan() || v == f64::NEG_INFINITY {
            return Err(bad());
        }
        Ok(v)
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (parse(start)?, parse(step)?, parse(stop)?);
            if !(start.is_finite() && step.is_finite() && stop.is_finite()) || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 10_000 {
                return Err(bad());
            }
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        [_] => text.split(',').filter(|s| !s.trim().is_empty()).map(parse).collect::<Result<Vec<_>>>().and_then(|g| {
            if g.is_empty() {
                Err(LabError::usage("empty grid"))
            } else {
                Ok(g)
            }
        }),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:2:6").unwrap(), vec![0.0, 2.0, 4.0, 6.0]);
        assert_eq!(parse_grid("0:0.1:0.3").unwrap().len(), 4);
        assert_eq!(parse_grid("1, 3.5,inf").unwrap(), vec![1.0, 3.5, f64::INFINITY]);
        for bad in ["", " , ", "1:0:3", "3:1:1", "a", "1:2", "nan"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_text() {
        let mut c = ExperimentConfig::new(ExperimentKind::BerUncoded);
        c.apply_text("# sweep\nscheme = xor-cd\ndelta = 0.5\nebn0_grid = 1,2\npackets = 7 # few\n").unwrap();
        assert_eq!(c.kind, ExperimentKind::BerCoded);
        assert_eq!((c.scheme, c.delta, c.packets), (BerScheme::XorCd, 0.5, 7));
        assert!(matches!(c.apply_text("colour = red"), Err(LabError::Usage(_))));
        assert!(c.apply_text("packets = many").is_err());
        assert!(c.apply_text("no equals sign").is_err());
        c.packets = 0;
        assert!(c.validate().is_err());
    }
}
