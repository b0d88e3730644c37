use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lowner_core::matcore::SpectralBounds;
use lowner_core::verify::SpectrumLaw;
use lowner_core::ProbeConfig;

#[derive(Parser, Debug)]
#[command(name = "lowner", version, about = "Operator means, Kantorovich constants and randomized checks of operator inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON/CSV result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Where to write the run manifest; defaults to `<out>.manifest.json`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run registered checks: `all`, a group, an id prefix or an exact id.
    Verify {
        id: String,
        /// Keep only checks whose last id segment equals this exponent.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// List the registered checks.
    List,
    /// Evaluate a functional on matrices read from JSON files.
    Eval {
        /// Functional spec JSON; fields default to identity maps and functions.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Functional::F2)]
        functional: Functional,
        /// Exponent slot of the Lieb form.
        #[arg(long, value_enum, default_value_t = Lieb::Concave)]
        mode: Lieb,
        /// Matrix files `A` and, for two-slot functionals, `B`.
        #[arg(required = true, num_args = 1..=2)]
        matrices: Vec<PathBuf>,
    },
    /// Sweep an exponent and report violation counts as CSV.
    Scan {
        #[arg(value_enum, default_value_t = Family::CarlenLieb)]
        family: Family,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.5,1,1.5,2,2.5,3")]
        p_grid: Vec<f64>,
        /// Positive map for map-based families.
        #[arg(long, default_value = "avg:2")]
        map: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Print K(h, p), S(h) and S(h^p) as JSON.
    Constants {
        #[arg(long)]
        h: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest_file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Functional {
    F1,
    F2,
    F3,
    TraceF2,
    Lieb,
    Determinant,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Lieb {
    Concave,
    Convex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    CarlenLieb,
    ReverseJensen,
    MinkowskiSandwich,
    TraceMinkowski,
    DeterminantMinkowski,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Spectrum {
    Uniform,
    LogUniform,
}

/// Sampling flags; unset flags keep the library defaults.
#[derive(Args, Debug, Clone)]
pub struct RunFlags {
    /// Matrix dimension `n` or range `lo:hi`.
    #[arg(long)]
    pub dim: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Spectral window `m:M`.
    #[arg(long)]
    pub window: Option<String>,
    /// Comma-separated weights in [0, 1], or `full`.
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[arg(long, value_enum)]
    pub spectrum: Option<Spectrum>,
    /// Hill-climbing steps on the worst trial.
    #[arg(long)]
    pub refine: Option<usize>,
}

fn pair<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<(T, T)> {
    let (a, b) = s.split_once(':').ok_or_else(|| anyhow::anyhow!("{what} must look like a:b, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad {what} component `{x}`"));
    Ok((parse(a)?, parse(b)?))
}

impl RunFlags {
    pub fn config(&self) -> anyhow::Result<ProbeConfig> {
        let mut c = ProbeConfig::default();
        if let Some(d) = &self.dim {
            let (lo, hi) = if d.contains(':') {
                pair::<usize>(d, "--dim")?
            } else {
                let n = d.parse()?;
                (n, n)
            };
            c.dim_min = lo;
            c.dim_max = hi;
        }
        if let Some(t) = self.trials {
            c.trials = t;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = self.tol {
            c.tol = t;
        }
        if let Some(w) = &self.window {
            let (m, big_m) = pair::<f64>(w, "--window")?;
            c.window = SpectralBounds::new(m, big_m)?;
        }
        if let Some(g) = &self.lambda_grid {
            c.lambda_grid = if g == "full" {
                ProbeConfig::full_lambda_grid()
            } else {
                g.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>()?
            };
        }
        if let Some(s) = self.spectrum {
            c.spectrum = match s {
                Spectrum::Uniform => SpectrumLaw::Uniform,
                Spectrum::LogUniform => SpectrumLaw::LogUniform,
            };
        }
        if let Some(r) = self.refine {
            c.refine_steps = r;
        }
        c.validate()?;
        Ok(c)
    }
}
