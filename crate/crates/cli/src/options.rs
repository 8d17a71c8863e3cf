use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use glyphspec_core::io::read_json;
use glyphspec_core::svm::GridBase;
use glyphspec_core::PipelineConfig;

#[derive(Debug, Parser)]
#[command(
    name = "glyphspec",
    version,
    about = "Spectral graph features and fused SVMs for handwritten glyphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. Flags override the config file.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Spectral feature length.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Train:validation:test percentages, e.g. 60:20:20.
    #[arg(long, global = true, value_parser = parse_ratios)]
    pub ratios: Option<[u32; 3]>,
    /// Number of randomized trials.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Use the configured per-feature-type (C, gamma) instead of grid search.
    #[arg(long, global = true)]
    pub fixed_params: bool,
    /// Spacing of the default search grid.
    #[arg(long, global = true, value_enum)]
    pub grid_base: Option<GridBaseArg>,
    /// Z-score features using training statistics.
    #[arg(long, global = true)]
    pub scale_features: bool,
    /// Also write intermediate images as PGM.
    #[arg(long, global = true)]
    pub debug: bool,
    /// Debug-level logging.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GridBaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "10")]
    Ten,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic labelled glyph dataset with a manifest.
    Synth {
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long, default_value_t = 100)]
        per_class: usize,
    },
    /// Extract the interest-point graph of an image or every image in a directory.
    Graph { input: PathBuf },
    /// Write spectral features of every manifest image as CSV.
    Features { manifest: PathBuf },
    /// Train the three classifiers and the fusion model.
    Train { manifest: PathBuf },
    /// Classify one image with a trained model bundle.
    Predict { bundle: PathBuf, image: PathBuf },
    /// Run repeated randomized trials and write reports.
    Evaluate { manifest: PathBuf },
}

fn parse_ratios(s: &str) -> Result<[u32; 3], String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:c, got {s:?}"));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| format!("not a percentage: {p:?}"))?;
    }
    Ok(out)
}

impl GlobalArgs {
    /// Config file (or defaults) with flag overrides applied, validated.
    pub fn config(&self) -> Result<PipelineConfig> {
        let mut c: PipelineConfig = match &self.config {
            Some(path) => {
                read_json(path).with_context(|| format!("reading config {}", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.ratios {
            c.ratios = v;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if self.fixed_params {
            c.fixed_params = true;
        }
        if let Some(v) = self.grid_base {
            c.grid_base = match v {
                GridBaseArg::Two => GridBase::Two,
                GridBaseArg::Ten => GridBase::Ten,
            };
        }
        if self.scale_features {
            c.scale_features = true;
        }
        if let Err(e) = c.validate() {
            bail!("invalid configuration: {e}");
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_parse() {
        assert_eq!(parse_ratios("60:20:20"), Ok([60, 20, 20]));
        assert!(parse_ratios("60:40").is_err());
        assert!(parse_ratios("a:b:c").is_err());
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::parse_from([
            "glyphspec",
            "evaluate",
            "m.csv",
            "--n",
            "5",
            "--trials",
            "2",
            "--grid-base",
            "2",
        ]);
        let c = cli.global.config().unwrap();
        assert_eq!((c.n, c.trials, c.grid_base), (5, 2, GridBase::Two));
        let cli = Cli::parse_from(["glyphspec", "--ratios", "50:30:30", "evaluate", "m.csv"]);
        assert!(cli.global.config().is_err());
    }
}
