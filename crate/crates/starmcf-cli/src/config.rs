//! TOML configuration schema for the command-line tool.

use serde::Deserialize;

fn default_nx() -> usize {
    256
}

fn default_nt() -> usize {
    200
}

fn default_store_every() -> usize {
    1
}

fn default_substeps() -> usize {
    8
}

fn default_renorm() -> usize {
    16
}

fn default_w_convention() -> String {
    "quarter".into()
}

/// Grid and solver settings shared by the potential-producing commands.
#[derive(Debug, Clone, Deserialize)]
pub struct GenerateConfig {
    pub kind: String,
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_nt")]
    pub nt: usize,
    /// Spatial period; defaults depend on the kind.
    pub length: Option<f64>,
    /// Native time span of the stored grid.
    pub t_end: Option<f64>,
    #[serde(default)]
    pub sigma: i32,
    /// Soliton amplitude.
    pub amp: Option<f64>,
    /// Plane-wave amplitude and integer wavenumber.
    pub amplitude: Option<f64>,
    pub wavenumber: Option<i32>,
    /// Backlund pole and direction, as [re, im] pairs.
    pub alpha: Option<[f64; 2]>,
    pub v: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CurveConfig {
    pub space: String,
    /// Path to a potential dataset; alternatively an inline source.
    pub potential: Option<String>,
    pub source: Option<GenerateConfig>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    /// H3 spectral value as [re, im].
    pub lambda: Option<[f64; 2]>,
    #[serde(default = "default_substeps")]
    pub substeps_per_cell: usize,
    #[serde(default = "default_renorm")]
    pub renormalize_every: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CauchyCommandConfig {
    pub initial_curve: String,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub periodic: bool,
    pub declared_holonomy: Option<f64>,
    #[serde(default = "default_store_every")]
    pub store_every: usize,
    #[serde(default = "default_substeps")]
    pub substeps_per_cell: usize,
    #[serde(default = "default_renorm")]
    pub renormalize_every: usize,
    /// Also write the transported frames at the two anchors.
    #[serde(default)]
    pub write_frames: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BacklundCommandConfig {
    pub alpha: [f64; 2],
    pub v: [[f64; 2]; 2],
    /// Base potential: inline source (vacuum/soliton/plane-wave) on which
    /// the dressing acts.
    pub source: GenerateConfig,
    /// Spectral values of the reconstruction the dressed curve uses.
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    #[serde(default = "default_w_convention")]
    pub w_convention: String,
    /// Run both W conventions and record their flow residuals.
    #[serde(default)]
    pub compare_conventions: bool,
    /// Also dress the reconstructed curve (S3).
    #[serde(default)]
    pub dress_curve: bool,
    #[serde(default = "default_substeps")]
    pub substeps_per_cell: usize,
    #[serde(default = "default_renorm")]
    pub renormalize_every: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RootConfig {
    pub generate: Option<GenerateConfig>,
    pub curve: Option<CurveConfig>,
    pub cauchy: Option<CauchyCommandConfig>,
    pub backlund: Option<BacklundCommandConfig>,
}
