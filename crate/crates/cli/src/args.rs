use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub const SCHEMAS: &str = "\
Artifacts are written to <out>/<command>.json, plus <out>/<command>.csv for
the commands below. CSV files start with two '#' lines (tool version and the
normalized config) followed by the header row:

  lemma-r         z,r
  witness-build   q,w,w_prime,a,a_prime,r_envelope
  witness-verify  N,ratio_max,ratio_min,residual,maxR
  symmetry        element,transformed,image,rel_err,pass
  rate-scan       eps,best_phi,decrease,family,params
  bracket-eval    p,q,value

Field specs: zero, p, q, sin-p, sin-q, cos-p, cos-q, trig:<seed>, sin-sin
(expands to sin-p,sin-q), witness (expands to witness-f,witness-g),
witness-f, witness-g, or the path of a CSV field.
Domain specs: auto, torus, rect:p0,p1,q0,q1[,margin]. auto (the default) is the
torus, or a rectangle around the supports when a witness field is used.
The output directory is --out, else \"out\" in the config file, else
$PRIG_OUT_DIR, else the working directory.

Exit status: 0 all checks pass, 1 a mathematical check failed,
2 usage or precondition error, 3 missing file or i/o error.";

#[derive(Debug, Parser)]
#[command(name = "prig", version, about = "Poisson-bracket rigidity experiments", after_help = SCHEMAS)]
pub struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Comma-separated field specs.
    #[arg(long, global = true, value_delimiter = ',')]
    pub fields: Option<Vec<String>>,
    /// Grid size per axis.
    #[arg(long = "n", global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub domain: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Discretization tolerance factor (tolerance = factor * h^2).
    #[arg(long, global = true)]
    pub disc_factor: Option<f64>,
    /// Relative tolerance of quadrature identities.
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact check of a flow-word expansion (3.2 or 3.3).
    Bch {
        #[arg(long)]
        which: Option<String>,
        /// Truncation order in tau.
        #[arg(short = 'T', long = "T")]
        t: Option<usize>,
    },
    /// Extrema of r(z) = (alpha z + 1)^2 - gamma (z + alpha) on [-1, 1].
    LemmaR {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        bound: Option<f64>,
        /// Number of z samples in the CSV.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Build the counterexample pair and check its invariants.
    WitnessBuild {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Double-bracket ratios of the counterexample for each N.
    WitnessVerify {
        #[arg(long = "N", value_delimiter = ',')]
        n_list: Option<Vec<u64>>,
        #[arg(long)]
        grid_n: Option<usize>,
    },
    /// max {{F,G},F} >= |{F,G}|^2 / (2 osc G).
    LhCheck,
    /// Ratio of osc (ad_F)^N G, or of the iterated word, to its bracket bound.
    Kolmogorov {
        #[arg(long = "N")]
        power: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Optional threshold C_N; the check passes when ratio >= C_N.
        #[arg(long = "c-n")]
        c_n: Option<f64>,
    },
    /// Two fields: the I{F,G} identity and Psi; three fields: int {P,Q}R = int {R,P}Q.
    IntegralIdentity,
    /// Bound on Y for the pair (sF, tG).
    YBound {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Dihedral and scaling identities of the weighted double-bracket functional.
    Symmetry {
        /// Four non-negative weights.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Option<Vec<f64>>,
        /// Subset of a,b,c,scale.
        #[arg(long, value_delimiter = ',')]
        elements: Option<Vec<String>>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Perturbation search for the decrease of a functional over an eps grid.
    RateScan {
        /// maxFG or double.
        #[arg(long)]
        which: Option<String>,
        #[arg(long)]
        eps_min: Option<f64>,
        #[arg(long)]
        eps_max: Option<f64>,
        #[arg(long)]
        eps_count: Option<usize>,
        /// Members evaluated per (eps, family).
        #[arg(long)]
        budget: Option<usize>,
        /// Subset of oscillatory,modulated,random-fourier.
        #[arg(long, value_delimiter = ',')]
        families: Option<Vec<String>>,
        /// Base search grid; defaults to --n when that is given.
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long)]
        max_grid_n: Option<usize>,
        #[arg(long)]
        lambda_max: Option<f64>,
    },
    /// Sample a bracket word such as {{F,G},F} on the grid.
    BracketEval {
        #[arg(long)]
        word: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bch { .. } => "bch",
            Command::LemmaR { .. } => "lemma-r",
            Command::WitnessBuild { .. } => "witness-build",
            Command::WitnessVerify { .. } => "witness-verify",
            Command::LhCheck => "lh-check",
            Command::Kolmogorov { .. } => "kolmogorov",
            Command::IntegralIdentity => "integral-identity",
            Command::YBound { .. } => "y-bound",
            Command::Symmetry { .. } => "symmetry",
            Command::RateScan { .. } => "rate-scan",
            Command::BracketEval { .. } => "bracket-eval",
        }
    }
}
