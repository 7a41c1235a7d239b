//! Experiment configuration files.
//!
//! ```toml
//! measure = "fair.toml"            # path relative to this file, or inline table
//! approximation = "f.toml"         # likewise
//! table = "km-B14-cap32.table"     # optional; otherwise looked up in the cache
//! horizon = 12
//! n_max = 5
//! seeds = [1, 2, 3]
//!
//! [budget]
//! max_len = 14
//! out_cap = 32
//!
//! [bound]
//! kind = "pow2"                    # or "table" with values = ["1/2^2", ...]
//! scale = 1
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hippo_lab_core::approx::{LogApproximation, RuleRegistry};
use hippo_lab_core::complexity::{ComplexityTable, EnumerationBudget};
use hippo_lab_core::measure::{Measure, MeasureRegistry, MeasureSpec};
use hippo_lab_core::randomness::LevelBound;
use hippo_lab_core::Dyadic;

pub const MAX_HORIZON: usize = 16;
pub const MAX_LEVELS: u64 = 32;
pub const CACHE_ENV: &str = "HIPPO_LAB_CACHE";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    Path(PathBuf),
    Inline(toml::Table),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundConfig {
    Pow2 {
        #[serde(default = "one")]
        scale: u64,
    },
    Table {
        values: Vec<Dyadic>,
    },
}

fn one() -> u64 {
    1
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig::Pow2 { scale: 1 }
    }
}

impl BoundConfig {
    pub fn to_bound(&self) -> Result<LevelBound> {
        Ok(match self {
            BoundConfig::Pow2 { scale } => LevelBound::PowTwo { scale: *scale },
            BoundConfig::Table { values } => LevelBound::table(values.clone())?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub measure: Option<Source>,
    pub approximation: Option<Source>,
    pub table: Option<PathBuf>,
    pub budget: Option<EnumerationBudget>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_levels")]
    pub n_max: u64,
    #[serde(default)]
    pub bound: BoundConfig,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_horizon() -> usize {
    12
}

fn default_levels() -> u64 {
    5
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            measure: None,
            approximation: None,
            table: None,
            budget: None,
            horizon: default_horizon(),
            n_max: default_levels(),
            bound: BoundConfig::default(),
            seeds: Vec::new(),
            base_dir: PathBuf::from("."),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(&read(path)?).with_context(|| format!("invalid config {}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.check_limits()?;
        Ok(cfg)
    }

    pub fn check_limits(&self) -> Result<()> {
        if self.horizon > MAX_HORIZON {
            bail!("horizon {} exceeds the limit {MAX_HORIZON}", self.horizon);
        }
        if self.n_max == 0 || self.n_max > MAX_LEVELS {
            bail!("n_max must lie in 1..={MAX_LEVELS}");
        }
        if let Some(b) = self.budget {
            EnumerationBudget::new(b.max_len, b.out_cap)?;
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn source_text(&self, src: &Source) -> Result<String> {
        match src {
            Source::Path(p) => read(&self.resolve(p)),
            Source::Inline(t) => Ok(toml::to_string(t)?),
        }
    }

    pub fn measure_spec(&self) -> Result<Option<MeasureSpec>> {
        self.measure
            .as_ref()
            .map(|s| Ok(MeasureSpec::from_toml(&self.source_text(s)?)?))
            .transpose()
    }

    pub fn build_measure(&self) -> Result<Option<Box<dyn Measure>>> {
        self.measure_spec()?
            .map(|spec| Ok(MeasureRegistry::default().build(&spec)?))
            .transpose()
    }

    pub fn build_approximation(&self) -> Result<Option<LogApproximation>> {
        self.approximation
            .as_ref()
            .map(|s| Ok(LogApproximation::from_toml(&self.source_text(s)?, &RuleRegistry::default())?))
            .transpose()
    }

    /// The configured table file, or the cached one for the configured budget.
    pub fn table_path(&self) -> Result<PathBuf> {
        if let Some(p) = &self.table {
            return Ok(self.resolve(p));
        }
        match self.budget {
            Some(b) => Ok(cache_dir().join(table_file_name(b))),
            None => bail!("config names neither a table file nor a budget"),
        }
    }

    pub fn load_table(&self) -> Result<ComplexityTable> {
        let path = self.table_path()?;
        if !path.exists() {
            bail!(
                "complexity table {} not found; run `hippo-lab enum` first",
                path.display()
            );
        }
        Ok(ComplexityTable::from_text(&read(&path)?)?)
    }
}

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("hippo-lab-cache"))
}

pub fn table_file_name(b: EnumerationBudget) -> String {
    format!("km-B{}-cap{}.table", b.max_len, b.out_cap)
}

pub fn load_approximation(path: &Path) -> Result<LogApproximation> {
    Ok(LogApproximation::from_toml(&read(path)?, &RuleRegistry::default())?)
}

pub fn load_measure(path: &Path) -> Result<Box<dyn Measure>> {
    let spec = MeasureSpec::from_toml(&read(path)?)?;
    Ok(MeasureRegistry::default().build(&spec)?)
}

pub fn read_file(path: &Path) -> Result<String> {
    read(path)
}
