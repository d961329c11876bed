//! Implementations of the CLI subcommands.

use crate::config::*;
use crate::io::*;
use crate::CliError;
use num_complex::Complex64 as C64;
use starmcf::backlund::{bt_curve_s3, bt_nls, BtParams, WConvention};
use starmcf::cauchy::{solve_cauchy_s3, solve_periodic_cauchy_s3, CauchyConfig, CauchyProblem};
use starmcf::frames::{transport_frame, FrameGrid, TransportConfig};
use starmcf::geometry::{
    holonomy, mcf_residual, parallel_frame_along_curve, sym_curve_h3, sym_curve_s3, CurveGrid,
    Space,
};
use starmcf::hierarchy::Sigma;
use starmcf::potential::{nls_to_gp, pde_residual, soliton_exact, PotentialGrid};
use starmcf::Error;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

fn lib_err(e: Error) -> CliError {
    match e {
        Error::Divergence(m) => CliError::Divergence(m),
        Error::Config(m) | Error::Domain(m) | Error::Degenerate(m) => CliError::Usage(m),
        Error::Inconsistent(m) => CliError::Validation(m),
    }
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn grid_meta(nx: usize, nt: usize, dx: f64, dt: f64, wrap_column: bool) -> GridMeta {
    let cols = if wrap_column { nx - 1 } else { nx };
    GridMeta { nx, nt, dx, dt, period: dx * cols as f64, wrap_column }
}

fn sigma_of(v: i32) -> Result<Sigma, CliError> {
    Sigma::from_int(v).map_err(lib_err)
}

/// Build the potential grid described by a generate config.
pub fn build_potential(cfg: &GenerateConfig) -> Result<(PotentialGrid, Vec<(String, f64)>), CliError> {
    let sigma = sigma_of(cfg.sigma)?;
    let nx = cfg.nx;
    let nt = cfg.nt;
    if nt < 3 {
        return Err(CliError::Usage("nt must be at least 3".into()));
    }
    match cfg.kind.as_str() {
        "vacuum" => {
            let length = cfg.length.unwrap_or(2.0 * PI);
            let t_end = cfg.t_end.unwrap_or(1.0);
            let q = PotentialGrid::from_fn(nx, nt, length / nx as f64, t_end / (nt - 1) as f64, sigma, |_, _| {
                C64::new(0.0, 0.0)
            })
            .map_err(lib_err)?;
            Ok((q, vec![]))
        }
        "soliton" => {
            let amp = cfg.amp.unwrap_or(1.0);
            if amp <= 0.0 {
                return Err(CliError::Usage(format!("field 'amp' must be positive, got {amp}")));
            }
            let length = cfg.length.unwrap_or(16.0 * PI / amp);
            let t_end = cfg.t_end.unwrap_or(1.0);
            let s = sigma.as_f64();
            let q = PotentialGrid::from_fn(nx, nt, length / nx as f64, t_end / (nt - 1) as f64, sigma, |x, t| {
                C64::from_polar(1.0, 0.5 * s * t) * soliton_exact(amp, x - length / 2.0, t)
            })
            .map_err(lib_err)?;
            Ok((q, vec![("amp".into(), amp)]))
        }
        "plane-wave" => {
            let a = cfg.amplitude.unwrap_or(1.0);
            let k = cfg.wavenumber.unwrap_or(1) as f64;
            let length = cfg.length.unwrap_or(2.0 * PI);
            let t_end = cfg.t_end.unwrap_or(1.0);
            let omega = 0.5 * (2.0 * a * a + sigma.as_f64() - k * k);
            let q = PotentialGrid::from_fn(nx, nt, length / nx as f64, t_end / (nt - 1) as f64, sigma, |x, t| {
                C64::from_polar(a, k * x + omega * t)
            })
            .map_err(lib_err)?;
            Ok((q, vec![("amplitude".into(), a), ("wavenumber".into(), k), ("omega".into(), omega)]))
        }
        "backlund" => {
            // algebraic dressing of the NLS vacuum
            if sigma != Sigma::Zero {
                return Err(CliError::Usage(
                    "field 'sigma' must be 0 for kind = backlund (NLS dressing)".into(),
                ));
            }
            let alpha = cfg
                .alpha
                .map(|a| C64::new(a[0], a[1]))
                .ok_or_else(|| CliError::Usage("field 'alpha' is required for kind = backlund".into()))?;
            let v = cfg
                .v
                .map(|v| [C64::new(v[0][0], v[0][1]), C64::new(v[1][0], v[1][1])])
                .ok_or_else(|| CliError::Usage("field 'v' is required for kind = backlund".into()))?;
            let params = BtParams::new(alpha, v).map_err(lib_err)?;
            let length = cfg.length.unwrap_or(8.0 * PI / alpha.im.abs());
            let t_end = cfg.t_end.unwrap_or(0.1);
            let dx = length / nx as f64;
            let dt = t_end / (nt - 1) as f64;
            let q = PotentialGrid::from_fn(nx, nt, dx, dt, Sigma::Zero, |_, _| C64::new(0.0, 0.0))
                .map_err(lib_err)?;
            let (_, a_mat, _, _) = starmcf::mat2::quaternion_basis();
            let e_alpha = FrameGrid::from_fn(alpha, Sigma::Zero, nx, nt, dx, dt, |x, t| {
                a_mat.scale(alpha * (x - length / 2.0) + alpha * alpha * t).exp()
            });
            let dressed = bt_nls(&q, &e_alpha, &params).map_err(lib_err)?;
            let max_abs = dressed
                .q_new
                .values()
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            Ok((
                dressed.q_new,
                vec![
                    ("alpha_re".into(), alpha.re),
                    ("alpha_im".into(), alpha.im),
                    ("max_abs_q".into(), max_abs),
                    ("min_direction_norm".into(), dressed.min_direction_norm),
                ],
            ))
        }
        other => Err(CliError::Usage(format!(
            "field 'kind' must be vacuum | soliton | plane-wave | backlund, got {other:?}"
        ))),
    }
}

pub fn cmd_generate(cfg: &GenerateConfig, out: &Path) -> Result<Manifest, CliError> {
    ensure_out(out)?;
    let (q, params) = build_potential(cfg)?;
    let residual = pde_residual(&q).map_err(lib_err)?;
    let tol = match cfg.kind.as_str() {
        "soliton" | "backlund" => 1e-6,
        _ => 1e-5,
    };
    let checks = vec![Check::new("pde_residual", residual, tol)];
    write_potential_csv(&out.join("potential.csv"), &q)?;
    let manifest = Manifest {
        tool: tool_version(),
        kind: cfg.kind.clone(),
        files: vec!["potential.csv".into()],
        grid: grid_meta(q.nx, q.nt, q.dx, q.dt, false),
        sigma: cfg.sigma,
        space: None,
        lambda: vec![],
        params,
        checks: checks.clone(),
        overall_pass: checks.iter().all(|c| c.pass),
    };
    write_manifest(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn transport_cfg(substeps: usize, renorm: usize) -> TransportConfig {
    TransportConfig { substeps_per_cell: substeps, renormalize_every: renorm }
}

fn load_or_build_potential(
    potential: &Option<String>,
    source: &Option<GenerateConfig>,
    want_sigma: Sigma,
) -> Result<PotentialGrid, CliError> {
    match (potential, source) {
        (Some(dir), None) => {
            let dir = PathBuf::from(dir);
            let manifest = read_manifest(&dir.join("manifest.json"))?;
            let sigma = sigma_of(manifest.sigma)?;
            let q = read_potential_csv(&dir.join("potential.csv"), sigma)?;
            if sigma == want_sigma {
                Ok(q)
            } else if sigma == Sigma::Zero {
                nls_to_gp(&q, want_sigma).map_err(lib_err)
            } else {
                Err(CliError::Usage(format!(
                    "potential dataset has sigma {} but the command needs {}",
                    manifest.sigma,
                    want_sigma.as_f64()
                )))
            }
        }
        (None, Some(src)) => {
            let (q, _) = build_potential(src)?;
            if q.sigma == want_sigma {
                Ok(q)
            } else if q.sigma == Sigma::Zero {
                nls_to_gp(&q, want_sigma).map_err(lib_err)
            } else {
                Err(CliError::Usage("source sigma does not match the command".into()))
            }
        }
        _ => Err(CliError::Usage(
            "exactly one of 'potential' (dataset dir) or 'source' (inline spec) is required".into(),
        )),
    }
}

fn curve_checks(curve: &CurveGrid, closed: bool) -> Result<Vec<Check>, CliError> {
    let mut checks = vec![
        Check::new("membership_defect", curve.max_membership_defect(), 1e-6),
        Check::new("arclength_defect", curve.max_arclength_defect(), 1e-5),
        Check::new("mcf_residual", mcf_residual(curve).map_err(lib_err)?, 1e-3),
    ];
    if closed {
        let drift = curve.closure_drift().map_err(lib_err)?;
        checks.push(Check::new(
            "closure_drift",
            drift.into_iter().fold(0.0, f64::max),
            1e-5,
        ));
    }
    Ok(checks)
}

/// Per-row normal holonomy of a closed S3 curve, as (max drift, value).
fn holonomy_drift(curve: &CurveGrid) -> Result<Option<(f64, f64)>, CliError> {
    if curve.space != Space::S3 || curve.nt < 2 {
        return Ok(None);
    }
    let n = curve.nx - 1;
    let mut h0 = None;
    let mut drift = 0.0f64;
    for j in 0..curve.nt {
        let row: Vec<[f64; 4]> = (0..n).map(|i| curve.sample(i, j)).collect();
        let pf = match parallel_frame_along_curve(&row, curve.dx, Space::S3, true) {
            Ok(pf) => pf,
            Err(_) => return Ok(None),
        };
        let h = holonomy(&pf.seed_omega, curve.dx);
        match h0 {
            None => h0 = Some(h),
            Some(base) => drift = drift.max((h - base).abs()),
        }
    }
    Ok(h0.map(|h| (drift, h)))
}

pub fn cmd_curve(cfg: &CurveConfig, out: &Path) -> Result<Manifest, CliError> {
    ensure_out(out)?;
    let tcfg = transport_cfg(cfg.substeps_per_cell, cfg.renormalize_every);
    let q = load_or_build_potential(&cfg.potential, &cfg.source, Sigma::Plus)?;
    let (curve, lambda, mut checks, space) = match cfg.space.as_str() {
        "s3" => {
            let l1 = cfg.lambda1.ok_or_else(|| CliError::Usage("field 'lambda1' required for s3".into()))?;
            let l2 = cfg.lambda2.ok_or_else(|| CliError::Usage("field 'lambda2' required for s3".into()))?;
            let sym = sym_curve_s3(&q, l1, l2, starmcf::mat2::CMat2::identity(), starmcf::mat2::CMat2::identity(), &tcfg)
                .map_err(lib_err)?;
            let closed = sym
                .curve
                .closure_drift()
                .map(|d| d.into_iter().fold(0.0, f64::max) < 1e-5)
                .unwrap_or(false);
            let mut checks = curve_checks(&sym.curve, closed)?;
            if closed {
                if let Some((drift, value)) = holonomy_drift(&sym.curve)? {
                    checks.push(Check::new("holonomy_drift", drift, 1e-6));
                    checks.push(Check::info("holonomy", value));
                }
            }
            (sym.curve, vec![l1, l2], checks, "s3")
        }
        "h3" => {
            let lam = cfg.lambda.ok_or_else(|| CliError::Usage("field 'lambda' required for h3".into()))?;
            let lam = C64::new(lam[0], lam[1]);
            if lam.im >= 0.0 {
                return Err(CliError::Usage(format!(
                    "h3 spectral value must have Im < 0, got {lam}"
                )));
            }
            let sym = sym_curve_h3(&q, lam, starmcf::mat2::CMat2::identity(), &tcfg).map_err(lib_err)?;
            let checks = vec![
                Check::new("membership_defect", sym.curve.max_membership_defect(), 1e-7),
                Check::new("arclength_defect", sym.curve.max_arclength_defect(), 1e-5),
                Check::new("hermiticity_defect", sym.hermiticity_defect, 1e-7),
                Check::new("det_defect", sym.det_defect, 1e-7),
                Check::new("mcf_residual", mcf_residual(&sym.curve).map_err(lib_err)?, 1e-3),
            ];
            (sym.curve, vec![lam.re, lam.im], checks, "h3")
        }
        other => {
            return Err(CliError::Usage(format!(
                "field 'space' must be s3 or h3, got {other:?}"
            )))
        }
    };
    checks.insert(0, Check::info("nx", curve.nx as f64));
    write_curve_csv(&out.join("curve.csv"), &curve)?;
    let manifest = Manifest {
        tool: tool_version(),
        kind: "curve".into(),
        files: vec!["curve.csv".into()],
        grid: grid_meta(curve.nx, curve.nt, curve.dx, curve.dt, true),
        sigma: 1,
        space: Some(space.into()),
        lambda,
        params: vec![],
        checks: checks.clone(),
        overall_pass: checks.iter().all(|c| c.pass),
    };
    write_manifest(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

pub fn cmd_cauchy(cfg: &CauchyCommandConfig, out: &Path) -> Result<Manifest, CliError> {
    ensure_out(out)?;
    let path = PathBuf::from(&cfg.initial_curve);
    let initial = read_curve_csv(&path, Space::S3, false)?;
    // take the t = 0 block as the initial row
    let gamma0: Vec<[f64; 4]> = (0..initial.nx).map(|i| initial.sample(i, 0)).collect();
    let problem = CauchyProblem {
        gamma0,
        dx: initial.dx,
        periodic: cfg.periodic,
        declared_holonomy: cfg.declared_holonomy,
    };
    let ccfg = CauchyConfig {
        dt_flow: cfg.dt,
        t_end: cfg.t_end,
        store_every: cfg.store_every,
        transport: transport_cfg(cfg.substeps_per_cell, cfg.renormalize_every),
    };
    let sol = if cfg.periodic {
        solve_periodic_cauchy_s3(&problem, &ccfg)
    } else {
        solve_cauchy_s3(&problem, &ccfg)
    }
    .map_err(lib_err)?;

    let r = &sol.report;
    let mut checks = vec![
        Check::new("initial_reproduction_error", r.initial_reproduction_error, 1e-4),
        Check::new("membership_defect", r.membership_defect, 1e-4),
        Check::new("arclength_defect", r.arclength_defect, 1e-5),
        Check::new("mcf_residual", r.mcf_residual, 1e-3),
        Check::info("correction_norm", r.correction_norm),
        Check::info("measured_holonomy", r.measured_holonomy),
    ];
    if cfg.periodic {
        checks.push(Check::new(
            "closure_drift",
            r.closure_drift.iter().cloned().fold(0.0, f64::max),
            1e-5,
        ));
        if let Some((d1, d2)) = r.frame_periodicity_drift {
            checks.push(Check::new("frame_periodicity_drift", d1.max(d2), 1e-6));
        }
        let hdrift = r
            .holonomy_per_row
            .iter()
            .map(|h| (h - r.measured_holonomy).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new("holonomy_drift", hdrift, 1e-6));
    }

    write_curve_csv(&out.join("curve.csv"), &sol.gamma)?;
    write_potential_csv(&out.join("potential.csv"), &sol.q)?;
    let mut files = vec!["curve.csv".into(), "potential.csv".into()];
    if cfg.write_frames {
        for (name, lam) in [("frame1.csv", sol.lambda1), ("frame2.csv", sol.lambda2)] {
            let f = transport_frame(&sol.q, C64::new(lam, 0.0), starmcf::mat2::CMat2::identity(), &ccfg.transport)
                .map_err(lib_err)?;
            write_frame_csv(&out.join(name), &f)?;
            files.push(name.into());
        }
    }
    let manifest = Manifest {
        tool: tool_version(),
        kind: "cauchy".into(),
        files,
        grid: grid_meta(sol.gamma.nx, sol.gamma.nt, sol.gamma.dx, sol.gamma.dt, true),
        sigma: 1,
        space: Some("s3".into()),
        lambda: vec![sol.lambda1, sol.lambda2],
        params: vec![("t_end".into(), cfg.t_end), ("dt".into(), cfg.dt)],
        checks: checks.clone(),
        overall_pass: checks.iter().all(|c| c.pass),
    };
    write_manifest(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn write_frame_csv(path: &Path, f: &FrameGrid) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str("x,t,re_e00,im_e00,re_e01,im_e01,re_e10,im_e10,re_e11,im_e11\n");
    let fmt = |v: f64| format!("{v:.16e}");
    for j in 0..f.nt {
        for i in 0..f.nx {
            let m = f.value(i, j).m;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                fmt(i as f64 * f.dx),
                fmt(j as f64 * f.dt),
                fmt(m[0][0].re),
                fmt(m[0][0].im),
                fmt(m[0][1].re),
                fmt(m[0][1].im),
                fmt(m[1][0].re),
                fmt(m[1][0].im),
                fmt(m[1][1].re),
                fmt(m[1][1].im)
            ));
        }
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn cmd_backlund(cfg: &BacklundCommandConfig, out: &Path) -> Result<Manifest, CliError> {
    ensure_out(out)?;
    let tcfg = transport_cfg(cfg.substeps_per_cell, cfg.renormalize_every);
    let alpha = C64::new(cfg.alpha[0], cfg.alpha[1]);
    let v = [C64::new(cfg.v[0][0], cfg.v[0][1]), C64::new(cfg.v[1][0], cfg.v[1][1])];
    let params = BtParams::new(alpha, v).map_err(lib_err)?;

    // NLS-side dressing of the source potential
    let mut nls_src = cfg.source.clone();
    nls_src.sigma = 0;
    let (q_nls, _) = build_potential(&nls_src)?;
    let e_alpha = transport_frame(&q_nls, alpha, starmcf::mat2::CMat2::identity(), &tcfg).map_err(lib_err)?;
    let dressed = bt_nls(&q_nls, &e_alpha, &params).map_err(lib_err)?;
    let nls_residual = pde_residual(&dressed.q_new).map_err(lib_err)?;
    write_potential_csv(&out.join("dressed_potential.csv"), &dressed.q_new)?;
    let mut files = vec!["dressed_potential.csv".into()];
    let mut checks = vec![
        Check::new("dressed_nls_residual", nls_residual, 1e-5),
        Check::info("min_direction_norm", dressed.min_direction_norm),
    ];
    let mut lambda = vec![];

    if cfg.dress_curve {
        let l1 = cfg.lambda1.unwrap_or(1.0);
        let l2 = cfg.lambda2.unwrap_or(0.0);
        lambda = vec![l1, l2];
        let q_gp = nls_to_gp(&q_nls, Sigma::Plus).map_err(lib_err)?;
        let sym = sym_curve_s3(&q_gp, l1, l2, starmcf::mat2::CMat2::identity(), starmcf::mat2::CMat2::identity(), &tcfg)
            .map_err(lib_err)?;
        let conventions: Vec<(WConvention, &str)> = if cfg.compare_conventions {
            vec![(WConvention::QuarterSigma, "quarter"), (WConvention::FullSigma, "full")]
        } else {
            match cfg.w_convention.as_str() {
                "quarter" => vec![(WConvention::QuarterSigma, "quarter")],
                "full" => vec![(WConvention::FullSigma, "full")],
                other => {
                    return Err(CliError::Usage(format!(
                        "field 'w_convention' must be quarter or full, got {other:?}"
                    )))
                }
            }
        };
        let mut passing = 0;
        for (conv, name) in &conventions {
            let bt = bt_curve_s3(&sym, &q_gp, &params, *conv, &tcfg).map_err(lib_err)?;
            let res = mcf_residual(&bt.curve).map_err(lib_err)?;
            if res <= 1e-3 {
                passing += 1;
            }
            checks.push(Check::info(&format!("mcf_residual_{name}_w"), res));
            if *name == "quarter" || conventions.len() == 1 {
                checks.push(Check::new("dressed_membership_defect", bt.curve.max_membership_defect(), 1e-6));
                checks.push(Check::new("dressed_mcf_residual", res, 1e-3));
                checks.push(Check::info("two_term_deviation", bt.two_term_deviation));
                checks.push(Check::info("raw_span_defect", bt.raw_span_defect));
                write_curve_csv(&out.join("dressed_curve.csv"), &bt.curve)?;
                files.push("dressed_curve.csv".into());
            }
        }
        if cfg.compare_conventions {
            checks.push(Check::new("conventions_passing_flow_residual", passing as f64 - 1.0, 0.0));
        }
    }

    let manifest = Manifest {
        tool: tool_version(),
        kind: "backlund".into(),
        files,
        grid: grid_meta(dressed.q_new.nx, dressed.q_new.nt, dressed.q_new.dx, dressed.q_new.dt, false),
        sigma: 0,
        space: None,
        lambda,
        params: vec![
            ("alpha_re".into(), alpha.re),
            ("alpha_im".into(), alpha.im),
            ("v0_re".into(), v[0].re),
            ("v0_im".into(), v[0].im),
            ("v1_re".into(), v[1].re),
            ("v1_im".into(), v[1].im),
        ],
        checks: checks.clone(),
        overall_pass: checks.iter().all(|c| c.pass),
    };
    write_manifest(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Re-run every applicable residual and invariant on a stored dataset.
pub fn cmd_validate(dirs: &[PathBuf]) -> Result<Vec<(PathBuf, Vec<Check>, bool)>, CliError> {
    let mut results = Vec::new();
    for dir in dirs {
        let manifest = read_manifest(&dir.join("manifest.json"))?;
        let mut checks = Vec::new();
        for file in &manifest.files {
            let path = dir.join(file);
            if file.ends_with("potential.csv") {
                let sigma = sigma_of(manifest.sigma)?;
                let q = read_potential_csv(&path, sigma)?;
                if q.nt >= 3 {
                    let r = pde_residual(&q).map_err(lib_err)?;
                    let tol = manifest
                        .checks
                        .iter()
                        .find(|c| c.name.contains("residual"))
                        .map(|c| c.tolerance)
                        .unwrap_or(1e-5);
                    checks.push(Check::new(&format!("{file}: pde_residual"), r, tol));
                }
            } else if file.ends_with("curve.csv") {
                let space = match manifest.space.as_deref() {
                    Some("h3") => Space::H3,
                    _ => Space::S3,
                };
                let curve = read_curve_csv(&path, space, manifest.grid.wrap_column)?;
                let membership_tol = if space == Space::H3 { 1e-7 } else { 1e-6 };
                checks.push(Check::new(
                    &format!("{file}: membership_defect"),
                    curve.max_membership_defect(),
                    membership_tol,
                ));
                checks.push(Check::new(
                    &format!("{file}: arclength_defect"),
                    curve.max_arclength_defect(),
                    1e-4,
                ));
                if curve.nt >= 3 {
                    checks.push(Check::new(
                        &format!("{file}: mcf_residual"),
                        mcf_residual(&curve).map_err(lib_err)?,
                        1e-3,
                    ));
                }
            }
        }
        let pass = checks.iter().all(|c| c.pass);
        results.push((dir.clone(), checks, pass));
    }
    Ok(results)
}
