use std::path::{Path, PathBuf};

use poisson_rigidity::field::Tolerances;
use poisson_rigidity::rates::{FamilyKind, PhiSpec, SearchOptions};
use poisson_rigidity::witness::WitnessConfig;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Cli, Command};
use crate::error::CliError;
use crate::fields;

pub const OUT_DIR_ENV: &str = "PRIG_OUT_DIR";
pub const DEFAULT_N: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BchSection {
    pub which: String,
    #[serde(rename = "T")]
    pub t: usize,
}

impl Default for BchSection {
    fn default() -> Self {
        Self { which: "3.2".into(), t: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaRSection {
    pub alpha: f64,
    pub gamma: f64,
    pub bound: f64,
    pub samples: usize,
}

impl Default for LemmaRSection {
    fn default() -> Self {
        Self { alpha: 1.1, gamma: 1.63, bound: 0.99, samples: 201 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KolmogorovSection {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub c_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YBoundSection {
    pub s: f64,
    pub t: f64,
    pub steps: usize,
}

impl Default for YBoundSection {
    fn default() -> Self {
        Self { s: 0.1, t: 0.1, steps: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymmetrySection {
    pub v: [f64; 4],
    pub elements: Vec<String>,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for SymmetrySection {
    fn default() -> Self {
        Self {
            v: [1.0, 2.0, 3.0, 4.0],
            elements: ["a", "b", "c", "scale"].map(String::from).to_vec(),
            alpha: 2.0,
            beta: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateScanSection {
    pub which: PhiSpec,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_count: usize,
    pub families: Vec<FamilyKind>,
    pub search: SearchOptions,
}

impl Default for RateScanSection {
    fn default() -> Self {
        Self {
            which: PhiSpec::MaxFG,
            eps_min: 1e-4,
            eps_max: 1e-1,
            eps_count: 10,
            families: FamilyKind::ALL.to_vec(),
            search: SearchOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BracketEvalSection {
    pub word: String,
}

impl Default for BracketEvalSection {
    fn default() -> Self {
        Self { word: "{{F,G},F}".into() }
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub command: Option<String>,
    pub domain: Option<String>,
    pub n: Option<usize>,
    pub fields: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub tolerances: Option<Tolerances>,
    pub bch: Option<BchSection>,
    pub lemma_r: Option<LemmaRSection>,
    pub witness: Option<WitnessConfig>,
    pub kolmogorov: Option<KolmogorovSection>,
    pub y_bound: Option<YBoundSection>,
    pub symmetry: Option<SymmetrySection>,
    pub rate_scan: Option<RateScanSection>,
    pub bracket_eval: Option<BracketEvalSection>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::MissingFile(path.display().to_string()),
            _ => CliError::Io(format!("{}: {e}", path.display())),
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Grid settings shared by the field commands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub domain: String,
    pub n: usize,
    pub fields: Vec<String>,
    pub tolerances: Tolerances,
}

/// The normalized run configuration: file values, then flags, then defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub grid: GridConfig,
    pub bch: BchSection,
    pub lemma_r: LemmaRSection,
    pub witness: WitnessConfig,
    pub kolmogorov: KolmogorovSection,
    pub y_bound: YBoundSection,
    pub symmetry: SymmetrySection,
    pub rate_scan: RateScanSection,
    pub bracket_eval: BracketEvalSection,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn default_fields(command: &str) -> Vec<String> {
    let v: &[&str] = match command {
        "symmetry" => &["trig:1", "trig:2"],
        _ => &["sin-p", "sin-q"],
    };
    v.iter().map(|s| s.to_string()).collect()
}

fn parse_which(s: &str) -> Result<PhiSpec, CliError> {
    s.parse().map_err(|e: poisson_rigidity::rates::RateError| CliError::Usage(e.to_string()))
}

pub fn parse_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let command = cli.command.name();
    if let Some(c) = &file.command {
        if c != command {
            return Err(CliError::Usage(format!("config file is for command {c:?}, not {command:?}")));
        }
    }
    let out = cli
        .out
        .clone()
        .or(file.out.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let mut tolerances = file.tolerances.unwrap_or_default();
    set(&mut tolerances.disc_factor, cli.disc_factor);
    set(&mut tolerances.quad, cli.quad_tol);
    let grid = GridConfig {
        domain: cli.domain.clone().or(file.domain).unwrap_or_else(|| "auto".into()),
        n: cli.n.or(file.n).unwrap_or(DEFAULT_N),
        fields: cli.fields.clone().or(file.fields).unwrap_or_else(|| default_fields(command)),
        tolerances,
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);

    let mut cfg = RunConfig {
        command,
        seed,
        threads: cli.threads.or(file.threads),
        out,
        grid,
        bch: file.bch.unwrap_or_default(),
        lemma_r: file.lemma_r.unwrap_or_default(),
        witness: file.witness.unwrap_or_default(),
        kolmogorov: file.kolmogorov.unwrap_or_default(),
        y_bound: file.y_bound.unwrap_or_default(),
        symmetry: file.symmetry.unwrap_or_default(),
        rate_scan: file.rate_scan.unwrap_or_default(),
        bracket_eval: file.bracket_eval.unwrap_or_default(),
    };
    if cfg.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }

    match &cli.command {
        Command::Bch { which, t } => {
            set(&mut cfg.bch.which, which.clone());
            set(&mut cfg.bch.t, *t);
            if !matches!(cfg.bch.which.as_str(), "3.2" | "3.3") {
                return Err(CliError::Usage(format!("--which must be 3.2 or 3.3, got {:?}", cfg.bch.which)));
            }
        }
        Command::LemmaR { alpha, gamma, bound, samples } => {
            let s = &mut cfg.lemma_r;
            set(&mut s.alpha, *alpha);
            set(&mut s.gamma, *gamma);
            set(&mut s.bound, *bound);
            set(&mut s.samples, *samples);
            if s.samples < 2 {
                return Err(CliError::Usage("--samples must be at least 2".into()));
            }
        }
        Command::WitnessBuild { delta, c1, kappa } => {
            set(&mut cfg.witness.delta, *delta);
            set(&mut cfg.witness.c1, *c1);
            if kappa.is_some() {
                cfg.witness.kappa = *kappa;
            }
        }
        Command::WitnessVerify { n_list, grid_n } => {
            set(&mut cfg.witness.n_list, n_list.clone());
            set(&mut cfg.witness.grid_n, *grid_n);
            if cfg.witness.n_list.is_empty() {
                return Err(CliError::Usage("--N needs at least one value".into()));
            }
        }
        Command::Kolmogorov { power, k, m, c_n } => {
            let s = &mut cfg.kolmogorov;
            if power.is_some() || k.is_some() || m.is_some() {
                (s.n, s.k, s.m) = (*power, *k, *m);
            }
            set(&mut s.c_n, c_n.map(Some));
            match (s.n, s.k, s.m) {
                (None, None, None) => s.n = Some(2),
                (Some(_), None, None) | (None, Some(_), Some(_)) => {}
                _ => return Err(CliError::Usage("give either --N or both --k and --m".into())),
            }
        }
        Command::YBound { s, t, steps } => {
            let y = &mut cfg.y_bound;
            set(&mut y.s, *s);
            set(&mut y.t, *t);
            set(&mut y.steps, *steps);
        }
        Command::Symmetry { v, elements, alpha, beta } => {
            let sy = &mut cfg.symmetry;
            if let Some(v) = v {
                sy.v = v
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Usage(format!("--v needs 4 weights, got {}", v.len())))?;
            }
            set(&mut sy.elements, elements.clone());
            set(&mut sy.alpha, *alpha);
            set(&mut sy.beta, *beta);
        }
        Command::RateScan {
            which,
            eps_min,
            eps_max,
            eps_count,
            budget,
            families,
            grid_n,
            max_grid_n,
            lambda_max,
        } => {
            let r = &mut cfg.rate_scan;
            if let Some(w) = which {
                r.which = parse_which(w)?;
            }
            set(&mut r.eps_min, *eps_min);
            set(&mut r.eps_max, *eps_max);
            set(&mut r.eps_count, *eps_count);
            set(&mut r.search.budget, *budget);
            set(&mut r.search.grid_n, cli.n.or(file.n));
            set(&mut r.search.grid_n, *grid_n);
            cfg.grid.n = r.search.grid_n;
            set(&mut r.search.max_grid_n, *max_grid_n);
            if lambda_max.is_some() {
                r.search.lambda_max = *lambda_max;
            }
            if let Some(fs) = families {
                r.families = fs
                    .iter()
                    .map(|f| f.parse::<FamilyKind>().map_err(|e| CliError::Usage(e.to_string())))
                    .collect::<Result<_, _>>()?;
            }
            if cli.seed.is_some() || file.seed.is_some() {
                r.search.seed = seed;
            }
            if !(r.eps_min > 0.0 && r.eps_max > r.eps_min) || r.eps_count < 3 {
                return Err(CliError::Usage(format!(
                    "eps grid needs 0 < eps_min < eps_max and at least 3 points, got {} .. {} ({})",
                    r.eps_min, r.eps_max, r.eps_count
                )));
            }
        }
        Command::BracketEval { word } => set(&mut cfg.bracket_eval.word, word.clone()),
        Command::LhCheck | Command::IntegralIdentity => {}
    }

    if cfg.uses_fields() {
        for spec in &cfg.grid.fields {
            fields::check_spec(spec)?;
        }
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn uses_fields(&self) -> bool {
        matches!(
            self.command,
            "lh-check" | "kolmogorov" | "integral-identity" | "y-bound" | "symmetry" | "rate-scan" | "bracket-eval"
        )
    }

    /// The normalized config as echoed into artifacts. The output location
    /// and the thread cap are left out: neither affects any result.
    pub fn echo(&self) -> Value {
        let mut v = json!({ "command": self.command, "seed": self.seed });
        let obj = v.as_object_mut().expect("object literal");
        if self.uses_fields() {
            obj.insert("grid".into(), serde_json::to_value(&self.grid).expect("serializable"));
        }
        let section = match self.command {
            "bch" => Some(("bch", serde_json::to_value(&self.bch))),
            "lemma-r" => Some(("lemma_r", serde_json::to_value(&self.lemma_r))),
            "witness-build" | "witness-verify" => Some(("witness", serde_json::to_value(&self.witness))),
            "kolmogorov" => Some(("kolmogorov", serde_json::to_value(&self.kolmogorov))),
            "y-bound" => Some(("y_bound", serde_json::to_value(&self.y_bound))),
            "symmetry" => Some(("symmetry", serde_json::to_value(&self.symmetry))),
            "rate-scan" => Some(("rate_scan", serde_json::to_value(&self.rate_scan))),
            "bracket-eval" => Some(("bracket_eval", serde_json::to_value(&self.bracket_eval))),
            _ => None,
        };
        if let Some((key, val)) = section {
            obj.insert(key.into(), val.expect("serializable"));
        }
        if self.uses_fields() && self.grid.fields.iter().any(|f| f.starts_with("witness")) {
            obj.insert("witness".into(), serde_json::to_value(&self.witness).expect("serializable"));
        }
        v
    }
}
