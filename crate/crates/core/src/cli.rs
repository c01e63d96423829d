//! Command-line front end: single-point amplitude evaluation, cross-section
//! sweeps, the identity-verification suite, and limit comparisons.
//!
//! Exit codes: 0 success, 1 internal or numerical failure, 2 invalid
//! physics input. Flags override config-file entries, which override
//! defaults. Sweep output is deterministic for a fixed configuration,
//! whatever the `--jobs` setting.

use crate::amplitude::oracle::{default_m_max, oracle_amplitude, OracleTier};
use crate::amplitude::{closed_form_amplitude, structure_params, AmplitudeError};
use crate::cross_section::{differential_xsec, nr_limit, polarization_density, ur_limit, RegimeCheck};
use crate::kinematics::{solve_pair, FluxParam, KinematicsError, PhotonIn, Polarization};
use crate::specfun::QuadratureConfig;
use crate::verify::{print_table, reports_to_json, run_all, VerifyConfig, DEFAULT_SEED};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_PHYSICS: i32 = 2;

const USAGE: &str = "usage: abpair <amplitude|xsec|verify|limits> [--flag value ...]

common flags:
  --mass M          particle mass (default 1)
  --alpha A         coupling, e^2 = alpha (default 1/137.035999)
  --flux F          magnetic flux in flux quanta
  --kappa K         photon energy
  --k-perp X        particle transverse momentum
  --k3 X            particle momentum along the string
  --phi-perp X      particle azimuth
  --phip-perp X     antiparticle azimuth
  --phi-k X         photon azimuth
  --pol s|p         photon linear polarization (default s)
  --out PATH        output file (default stdout)
  --format csv|json output format (default csv)
  --config PATH     flat key=value config file (flags win)
  --seed N          seed for randomized grids (default 0x5EED)
  --jobs N          worker threads for sweeps (default 1)

amplitude: --oracle tierA|tierB adds a brute-force cross-check column,
           --mmax N overrides the winding cutoff
xsec:      --sweep k_perp|k3|phi_perp|phip_perp|delta|kappa
           --start A --stop B --steps N (>= 2), --gnuplot-script
verify:    --tol-scale X scales every tolerance
limits:    --regime nr|ur
";

/// Flat run configuration backing every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mass: f64,
    pub alpha: f64,
    pub flux_f: f64,
    pub quad: QuadratureConfig,
    pub seed: u64,
    pub output_path: Option<String>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Sweep request: one axis, inclusive endpoints, everything else fixed.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    KPerp,
    K3,
    PhiPerp,
    PhipPerp,
    Delta,
    Kappa,
}

impl SweepAxis {
    fn parse(s: &str) -> Option<SweepAxis> {
        Some(match s {
            "k_perp" | "k-perp" => SweepAxis::KPerp,
            "k3" => SweepAxis::K3,
            "phi_perp" | "phi-perp" => SweepAxis::PhiPerp,
            "phip_perp" | "phip-perp" => SweepAxis::PhipPerp,
            "delta" => SweepAxis::Delta,
            "kappa" => SweepAxis::Kappa,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            SweepAxis::KPerp => "k_perp",
            SweepAxis::K3 => "k3",
            SweepAxis::PhiPerp => "phi_perp",
            SweepAxis::PhipPerp => "phip_perp",
            SweepAxis::Delta => "delta",
            SweepAxis::Kappa => "kappa",
        }
    }
}

struct Args {
    values: BTreeMap<String, String>,
}

impl Args {
    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| format!("flag --{key}: cannot parse '{v}' as a number")),
        }
    }

    fn f64_required(&self, key: &str) -> Result<f64, String> {
        self.get(key)
            .ok_or(format!("missing required flag --{key}"))?
            .parse::<f64>()
            .map_err(|_| format!("flag --{key}: not a number"))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| format!("flag --{key}: cannot parse '{v}' as an integer")),
        }
    }
}

fn parse_args(argv: &[String]) -> Result<(String, Args), String> {
    if argv.is_empty() {
        return Err("missing subcommand".into());
    }
    let cmd = argv[0].clone();
    let mut values = BTreeMap::new();
    let mut i = 1;
    while i < argv.len() {
        let tok = &argv[i];
        let Some(key) = tok.strip_prefix("--") else {
            return Err(format!("unexpected positional argument '{tok}'"));
        };
        // boolean flags take no value
        if key == "gnuplot-script" {
            values.insert(key.to_string(), "true".into());
            i += 1;
            continue;
        }
        let Some(v) = argv.get(i + 1) else {
            return Err(format!("flag --{key} needs a value"));
        };
        values.insert(key.to_string(), v.clone());
        i += 2;
    }
    // config file fills in anything the flags left unset
    if let Some(path) = values.get("config").cloned() {
        let text = fs::read_to_string(&path).map_err(|e| format!("config {path}: {e}"))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("config {path}:{}: expected key=value", lineno + 1));
            };
            let k = k.trim().to_string();
            values.entry(k).or_insert_with(|| v.trim().to_string());
        }
    }
    Ok((cmd, Args { values }))
}

fn run_config(args: &Args) -> Result<RunConfig, String> {
    let format = match args.get("format").unwrap_or("csv") {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(format!("unknown format '{other}' (csv or json)")),
    };
    let mut quad = QuadratureConfig::default();
    if let Some(v) = args.get("rel-tol") {
        quad.rel_tol = v.parse().map_err(|_| "bad --rel-tol")?;
    }
    if let Some(v) = args.get("abs-tol") {
        quad.abs_tol = v.parse().map_err(|_| "bad --abs-tol")?;
    }
    Ok(RunConfig {
        mass: args.f64_or("mass", 1.0)?,
        alpha: args.f64_or("alpha", 1.0 / 137.035999)?,
        flux_f: args.f64_or("flux", 0.0)?,
        quad,
        seed: args
            .get("seed")
            .map(|s| s.parse::<u64>().map_err(|_| "bad --seed"))
            .transpose()?
            .unwrap_or(DEFAULT_SEED),
        output_path: args.get("out").map(|s| s.to_string()),
        format,
    })
}

/// Entry point used by `main` and the integration tests.
pub fn run(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match parse_args(argv) {
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}\n{USAGE}");
            EXIT_NUMERICAL
        }
        Ok((cmd, args)) => match cmd.as_str() {
            "amplitude" => cmd_amplitude(&args, stdout, stderr),
            "xsec" => cmd_xsec(&args, stdout, stderr),
            "verify" => cmd_verify(&args, stdout, stderr),
            "limits" => cmd_limits(&args, stdout, stderr),
            "help" | "--help" | "-h" => {
                let _ = writeln!(stdout, "{USAGE}");
                EXIT_OK
            }
            other => {
                let _ = writeln!(stderr, "error: unknown subcommand '{other}'\n{USAGE}");
                EXIT_NUMERICAL
            }
        },
    }
}

fn physics_exit(stderr: &mut dyn Write, what: &str) -> i32 {
    let _ = writeln!(stderr, "rejected: {what}");
    EXIT_PHYSICS
}

struct Point {
    flux: FluxParam,
    photon: PhotonIn,
    pair: crate::kinematics::PairOut,
}

/// Build a kinematic point from flags; distinguishes physics rejections
/// from parse problems.
fn build_point(args: &Args, cfg: &RunConfig, pol: Polarization) -> Result<Point, (i32, String)> {
    let kappa = args.f64_required("kappa").map_err(|e| (EXIT_NUMERICAL, e))?;
    let k_perp = args.f64_required("k-perp").map_err(|e| (EXIT_NUMERICAL, e))?;
    let k3 = args.f64_or("k3", 0.0).map_err(|e| (EXIT_NUMERICAL, e))?;
    let phi_perp = args.f64_or("phi-perp", 0.0).map_err(|e| (EXIT_NUMERICAL, e))?;
    let phip_perp = args.f64_or("phip-perp", 0.0).map_err(|e| (EXIT_NUMERICAL, e))?;
    let phi_k = args.f64_or("phi-k", 0.0).map_err(|e| (EXIT_NUMERICAL, e))?;
    let flux = FluxParam::new(cfg.flux_f).map_err(|e| (EXIT_PHYSICS, e.to_string()))?;
    let photon = PhotonIn::normal_incidence(kappa, phi_k, pol)
        .map_err(|e| (EXIT_PHYSICS, e.to_string()))?;
    let pair = solve_pair(kappa, k_perp, k3, cfg.mass, phi_perp, phip_perp)
        .map_err(|e| (EXIT_PHYSICS, describe_kin_error(&e)))?;
    Ok(Point { flux, photon, pair })
}

fn describe_kin_error(e: &KinematicsError) -> String {
    e.to_string()
}

fn describe_amp_error(e: &AmplitudeError) -> String {
    match e {
        AmplitudeError::MomentumExcessViolated { .. } => {
            format!("momentum excess condition failed: {e}")
        }
        _ => e.to_string(),
    }
}

fn parse_pol(args: &Args) -> Result<Polarization, String> {
    match args.get("pol").unwrap_or("s") {
        "s" | "S" => Ok(Polarization::S),
        "p" | "P" => Ok(Polarization::P),
        other => Err(format!("unknown polarization '{other}' (s or p)")),
    }
}

fn write_out(cfg: &RunConfig, stdout: &mut dyn Write, content: &str) -> std::io::Result<()> {
    match &cfg.output_path {
        Some(path) => fs::write(path, content),
        None => stdout.write_all(content.as_bytes()),
    }
}

// ---------------------------------------------------------------------------
// amplitude
// ---------------------------------------------------------------------------

fn cmd_amplitude(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cfg = match run_config(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let pol = match parse_pol(args) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let point = match build_point(args, &cfg, pol) {
        Ok(p) => p,
        Err((code, msg)) => {
            return if code == EXIT_PHYSICS {
                physics_exit(stderr, &msg)
            } else {
                let _ = writeln!(stderr, "error: {msg}");
                code
            }
        }
    };
    let sp = match structure_params(
        point.pair.k_perp,
        point.pair.kp_perp,
        point.photon.kappa_perp(),
        point.pair.phi_perp,
        point.pair.phip_perp,
        point.photon.phi(),
    ) {
        Ok(s) => s,
        Err(e) => return physics_exit(stderr, &describe_amp_error(&e)),
    };
    let d = match closed_form_amplitude(&point.flux, &point.photon, &point.pair) {
        Ok(d) => d,
        Err(e) => return physics_exit(stderr, &describe_amp_error(&e)),
    };

    let oracle_resid = match args.get("oracle") {
        None => None,
        Some(tier_str) => {
            let tier = match tier_str {
                "tierA" | "tiera" | "a" | "A" => OracleTier::A,
                "tierB" | "tierb" | "b" | "B" => OracleTier::B,
                other => {
                    let _ = writeln!(stderr, "error: unknown oracle tier '{other}'");
                    return EXIT_NUMERICAL;
                }
            };
            let m_max = match args.get("mmax") {
                Some(v) => match v.parse::<usize>() {
                    Ok(m) => m,
                    Err(_) => {
                        let _ = writeln!(stderr, "error: bad --mmax");
                        return EXIT_NUMERICAL;
                    }
                },
                None => match default_m_max(&sp, 1e-14) {
                    Ok(m) => m,
                    Err(e) => {
                        let _ = writeln!(stderr, "error: {e}");
                        return EXIT_NUMERICAL;
                    }
                },
            };
            match oracle_amplitude(&point.flux, &point.photon, &point.pair, m_max, tier, &cfg.quad)
            {
                Ok(o) => {
                    let scale = d.norm().max(1e-300);
                    let resid = ((d.d1 - o.amplitude.d1).norm_sqr()
                        + (d.d2 - o.amplitude.d2).norm_sqr()
                        + (d.dz - o.amplitude.dz).norm_sqr())
                    .sqrt()
                        / scale;
                    Some((resid, m_max))
                }
                Err(e) => {
                    let _ = writeln!(stderr, "error: oracle failed: {e}");
                    return EXIT_NUMERICAL;
                }
            }
        }
    };

    let mut fields: Vec<(&str, String)> = vec![
        ("flux", fmt(point.flux.flux())),
        ("delta", fmt(point.flux.delta())),
        ("kappa", fmt(point.photon.kappa())),
        ("k_perp", fmt(point.pair.k_perp)),
        ("kp_perp", fmt(point.pair.kp_perp)),
        ("k3", fmt(point.pair.k3)),
        ("d1_re", fmt(d.d1.re)),
        ("d1_im", fmt(d.d1.im)),
        ("d2_re", fmt(d.d2.re)),
        ("d2_im", fmt(d.d2.im)),
        ("dz_re", fmt(d.dz.re)),
        ("dz_im", fmt(d.dz.im)),
        ("a", fmt(sp.a)),
        ("b", fmt(sp.b)),
        ("d_norm", fmt(sp.d_norm)),
        ("a_coeff", fmt(sp.a_coeff)),
        ("b_coeff", fmt(sp.b_coeff)),
        ("sigma_plus_re", fmt(sp.sigma_plus.re)),
        ("sigma_plus_im", fmt(sp.sigma_plus.im)),
        ("sigma_minus_re", fmt(sp.sigma_minus.re)),
        ("sigma_minus_im", fmt(sp.sigma_minus.im)),
    ];
    if let Some((resid, m_max)) = oracle_resid {
        fields.push(("oracle_rel_residual", fmt(resid)));
        fields.push(("oracle_m_max", m_max.to_string()));
    }

    let content = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("# schema=1\n");
            s.push_str(&fields.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(","));
            s.push('\n');
            s.push_str(
                &fields
                    .iter()
                    .map(|(_, v)| v.clone())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            s.push('\n');
            s
        }
        OutputFormat::Json => {
            let body = fields
                .iter()
                .map(|(k, v)| format!("  \"{k}\": {v}"))
                .collect::<Vec<_>>()
                .join(",\n");
            format!("{{\n{body}\n}}\n")
        }
    };
    if let Err(e) = write_out(&cfg, stdout, &content) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_NUMERICAL;
    }
    EXIT_OK
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

// ---------------------------------------------------------------------------
// xsec sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    axis_value: f64,
    fields: Result<RowData, String>,
}

struct RowData {
    delta: f64,
    kappa: f64,
    k_perp: f64,
    kp_perp: f64,
    k3: f64,
    phi_perp: f64,
    phip_perp: f64,
    phi_k: f64,
    lambda_s: f64,
    lambda_p: f64,
    dsigma: f64,
}

fn cmd_xsec(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cfg = match run_config(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let pol = match parse_pol(args) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let axis = match args.get("sweep").and_then(SweepAxis::parse) {
        Some(a) => a,
        None => {
            let _ = writeln!(
                stderr,
                "error: --sweep must be one of k_perp|k3|phi_perp|phip_perp|delta|kappa"
            );
            return EXIT_NUMERICAL;
        }
    };
    let (start, stop) = match (args.f64_required("start"), args.f64_required("stop")) {
        (Ok(a), Ok(b)) if a < b => (a, b),
        (Ok(_), Ok(_)) => {
            let _ = writeln!(stderr, "error: need --start < --stop");
            return EXIT_NUMERICAL;
        }
        (Err(e), _) | (_, Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let steps = match args.usize_or("steps", 0) {
        Ok(s) if s >= 2 => s,
        _ => {
            let _ = writeln!(stderr, "error: --steps must be >= 2");
            return EXIT_NUMERICAL;
        }
    };
    let sweep = SweepSpec {
        axis,
        start,
        stop,
        steps,
    };
    let jobs = args.usize_or("jobs", 1).unwrap_or(1).max(1);

    // fixed parameters; the swept one may be absent from the flags
    let need = |key: &str, swept: SweepAxis| -> Result<f64, String> {
        if axis == swept {
            Ok(f64::NAN)
        } else {
            args.f64_required(key)
        }
    };
    let base = (|| -> Result<(f64, f64, f64, f64, f64, f64), String> {
        Ok((
            need("kappa", SweepAxis::Kappa)?,
            need("k-perp", SweepAxis::KPerp)?,
            args.f64_or("k3", 0.0)?,
            args.f64_or("phi-perp", 0.0)?,
            args.f64_or("phip-perp", 0.0)?,
            args.f64_or("phi-k", 0.0)?,
        ))
    })();
    let (kappa0, kperp0, k30, phi0, phip0, phik0) = match base {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };

    let eval_one = |x: f64| -> Result<RowData, String> {
        let mut kappa = kappa0;
        let mut k_perp = kperp0;
        let mut k3 = k30;
        let mut phi_perp = phi0;
        let mut phip_perp = phip0;
        let mut flux_f = cfg.flux_f;
        match sweep.axis {
            SweepAxis::KPerp => k_perp = x,
            SweepAxis::K3 => k3 = x,
            SweepAxis::PhiPerp => phi_perp = x,
            SweepAxis::PhipPerp => phip_perp = x,
            SweepAxis::Kappa => kappa = x,
            SweepAxis::Delta => flux_f = cfg.flux_f.floor() + x,
        }
        let flux = FluxParam::new(flux_f).map_err(|e| e.to_string())?;
        let photon = PhotonIn::normal_incidence(kappa, phik0, pol).map_err(|e| e.to_string())?;
        let pair = solve_pair(kappa, k_perp, k3, cfg.mass, phi_perp, phip_perp)
            .map_err(|e| describe_kin_error(&e))?;
        let x = differential_xsec(&flux, &photon, &pair, cfg.alpha)
            .map_err(|e| describe_amp_error(&e))?;
        Ok(RowData {
            delta: flux.delta(),
            kappa,
            k_perp,
            kp_perp: pair.kp_perp,
            k3,
            phi_perp,
            phip_perp,
            phi_k: phik0,
            lambda_s: x.density.lambda_s,
            lambda_p: x.density.lambda_p,
            dsigma: x.value,
        })
    };

    let grid: Vec<f64> = (0..steps)
        .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
        .collect();
    let mut rows: Vec<Option<SweepRow>> = Vec::with_capacity(steps);
    rows.resize_with(steps, || None);

    if jobs <= 1 {
        for (i, &x) in grid.iter().enumerate() {
            rows[i] = Some(SweepRow {
                axis_value: x,
                fields: eval_one(x),
            });
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<Option<SweepRow>>> =
            (0..steps).map(|_| std::sync::Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(steps) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= steps {
                        break;
                    }
                    let row = SweepRow {
                        axis_value: grid[i],
                        fields: eval_one(grid[i]),
                    };
                    *slots[i].lock().unwrap() = Some(row);
                });
            }
        });
        for (i, slot) in slots.into_iter().enumerate() {
            rows[i] = slot.into_inner().unwrap();
        }
    }

    let content = render_sweep(&cfg, &sweep, rows.into_iter().map(|r| r.unwrap()).collect());
    if let Err(e) = write_out(&cfg, stdout, &content) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_NUMERICAL;
    }
    if args.get("gnuplot-script").is_some() {
        if let Some(path) = &cfg.output_path {
            let gp = gnuplot_script(path, sweep.axis.name());
            if let Err(e) = fs::write(format!("{path}.gp"), gp) {
                let _ = writeln!(stderr, "error: cannot write gnuplot script: {e}");
                return EXIT_NUMERICAL;
            }
        } else {
            let _ = writeln!(stderr, "note: --gnuplot-script needs --out; skipped");
        }
    }
    EXIT_OK
}

fn render_sweep(cfg: &RunConfig, sweep: &SweepSpec, rows: Vec<SweepRow>) -> String {
    match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::new();
            s.push_str("# schema=1\n");
            s.push_str("# units: natural (hbar = c = 1), momenta in units of the mass parameter\n");
            s.push_str(&format!("# sweep axis: {}\n", sweep.axis.name()));
            s.push_str(
                "axis_value,delta,kappa,k_perp,kp_perp,k3,phi_perp,phip_perp,phi_k,lambda_s,lambda_p,dsigma,reason\n",
            );
            for r in rows {
                match r.fields {
                    Ok(d) => s.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{},ok\n",
                        fmt(r.axis_value),
                        fmt(d.delta),
                        fmt(d.kappa),
                        fmt(d.k_perp),
                        fmt(d.kp_perp),
                        fmt(d.k3),
                        fmt(d.phi_perp),
                        fmt(d.phip_perp),
                        fmt(d.phi_k),
                        fmt(d.lambda_s),
                        fmt(d.lambda_p),
                        fmt(d.dsigma),
                    )),
                    Err(reason) => s.push_str(&format!(
                        "{},,,,,,,,,,,,skipped: {}\n",
                        fmt(r.axis_value),
                        reason.replace(',', ";")
                    )),
                }
            }
            s
        }
        OutputFormat::Json => {
            let mut items = Vec::new();
            for r in rows {
                items.push(match r.fields {
                    Ok(d) => format!(
                        "  {{\"axis_value\": {}, \"delta\": {}, \"kappa\": {}, \"k_perp\": {}, \"kp_perp\": {}, \"k3\": {}, \"lambda_s\": {}, \"lambda_p\": {}, \"dsigma\": {}}}",
                        fmt(r.axis_value), fmt(d.delta), fmt(d.kappa), fmt(d.k_perp),
                        fmt(d.kp_perp), fmt(d.k3), fmt(d.lambda_s), fmt(d.lambda_p), fmt(d.dsigma)
                    ),
                    Err(reason) => format!(
                        "  {{\"axis_value\": {}, \"skipped\": \"{}\"}}",
                        fmt(r.axis_value),
                        reason.replace('"', "'")
                    ),
                });
            }
            format!(
                "{{\n\"sweep\": \"{}\",\n\"rows\": [\n{}\n]\n}}\n",
                sweep.axis.name(),
                items.join(",\n")
            )
        }
    }
}

fn gnuplot_script(csv_path: &str, axis: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set xlabel '{axis}'\n\
         set ylabel 'd sigma (natural units)'\n\
         set logscale y\n\
         plot '{csv_path}' using 1:12 every ::1 with linespoints title 'dsigma'\n"
    )
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cfg = match run_config(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let tol_scale = match args.f64_or("tol-scale", 1.0) {
        Ok(t) if t.is_finite() && t > 0.0 => t,
        _ => {
            let _ = writeln!(stderr, "error: --tol-scale must be positive");
            return EXIT_NUMERICAL;
        }
    };
    let vcfg = VerifyConfig {
        seed: cfg.seed,
        tol_scale,
        quad: cfg.quad.clone(),
    };
    let reports = run_all(&vcfg);
    if print_table(stdout, &reports).is_err() {
        return EXIT_NUMERICAL;
    }
    let json = reports_to_json(&reports, vcfg.seed);
    if let Some(path) = &cfg.output_path {
        if let Err(e) = fs::write(path, &json) {
            let _ = writeln!(stderr, "error: cannot write report: {e}");
            return EXIT_NUMERICAL;
        }
    }
    let failing: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.identity_name.as_str())
        .collect();
    if failing.is_empty() {
        EXIT_OK
    } else {
        let _ = writeln!(stderr, "failing identities: {}", failing.join(", "));
        EXIT_NUMERICAL
    }
}

// ---------------------------------------------------------------------------
// limits
// ---------------------------------------------------------------------------

fn cmd_limits(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cfg = match run_config(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let flux = match FluxParam::new(if cfg.flux_f == 0.0 { 0.3 } else { cfg.flux_f }) {
        Ok(f) => f,
        Err(e) => return physics_exit(stderr, &e.to_string()),
    };
    // an explicit --kappa is appended to the built-in schedule
    let extra = match args.f64_or("kappa", f64::NAN) {
        Ok(v) if v.is_finite() => Some(v),
        Ok(_) => None,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_NUMERICAL;
        }
    };
    match args.get("regime") {
        Some("nr") => cmd_limits_nr(&cfg, &flux, extra, stdout, stderr),
        Some("ur") => cmd_limits_ur(&cfg, &flux, stdout, stderr),
        _ => {
            let _ = writeln!(stderr, "error: --regime must be nr or ur");
            EXIT_NUMERICAL
        }
    }
}

fn cmd_limits_nr(
    cfg: &RunConfig,
    flux: &FluxParam,
    extra_kappa: Option<f64>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let m = cfg.mass;
    let mut out = String::new();
    out.push_str("# near-threshold comparison: full density vs limiting form\n");
    out.push_str("t=kappa/2M-1,lambda_s_full,lambda_s_limit,rel_dev_s,lambda_p_over_s,regime\n");
    let mut schedule = vec![1e-2, 1e-3, 1e-4];
    if let Some(k) = extra_kappa {
        let t = k / (2.0 * m) - 1.0;
        if t <= 0.0 {
            return physics_exit(stderr, &format!("kappa {k} at or below threshold"));
        }
        schedule.insert(0, t);
    }
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for &t in &schedule {
        let kappa = 2.0 * m * (1.0 + t);
        let ktot = m * (2.0 * t + t * t).sqrt();
        let k3 = 0.4 * ktot;
        let k_perp = (ktot * ktot - k3 * k3).sqrt();
        let photon = match PhotonIn::normal_incidence(kappa, 1.3, Polarization::S) {
            Ok(p) => p,
            Err(e) => return physics_exit(stderr, &e.to_string()),
        };
        let pair = match solve_pair(kappa, k_perp, k3, m, 0.7, 2.9) {
            Ok(p) => p,
            Err(e) => return physics_exit(stderr, &describe_kin_error(&e)),
        };
        let sp = match structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        ) {
            Ok(s) => s,
            Err(e) => return physics_exit(stderr, &describe_amp_error(&e)),
        };
        let full = polarization_density(&sp, &pair, flux);
        let nr = match nr_limit(flux, &photon, &pair) {
            Ok(n) => n,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_NUMERICAL;
            }
        };
        let rel = (full.lambda_s - nr.density.lambda_s).abs() / full.lambda_s;
        if rel >= prev {
            monotone = false;
        }
        prev = rel;
        let regime = match nr.regime {
            RegimeCheck::Inside => "inside",
            RegimeCheck::Marginal => "marginal (warning)",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(t),
            fmt(full.lambda_s),
            fmt(nr.density.lambda_s),
            fmt(rel),
            fmt(full.lambda_p / full.lambda_s),
            regime
        ));
    }
    out.push_str(&format!("# deviations decrease monotonically: {monotone}\n"));
    if write_out(cfg, stdout, &out).is_err() {
        return EXIT_NUMERICAL;
    }
    EXIT_OK
}

fn cmd_limits_ur(
    cfg: &RunConfig,
    flux: &FluxParam,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let m = cfg.mass;
    let mut out = String::new();
    out.push_str("# high-energy collinear comparison\n");
    out.push_str("kappa_over_m,sigma_ratio_minus_a_over_b,lambda_s_full,lambda_s_ur,rel_dev,regime\n");
    for &r in &[1e2, 1e3] {
        let kappa = r * m;
        let k3 = 0.8 * m;
        let eps = kappa / 2.0;
        let k_perp = (eps * eps - k3 * k3 - m * m).sqrt();
        let photon = match PhotonIn::normal_incidence(kappa, 0.9, Polarization::S) {
            Ok(p) => p,
            Err(e) => return physics_exit(stderr, &e.to_string()),
        };
        let pair = match solve_pair(kappa, k_perp, k3, m, 0.9, 0.9) {
            Ok(p) => p,
            Err(e) => return physics_exit(stderr, &describe_kin_error(&e)),
        };
        let sp = match structure_params(
            pair.k_perp,
            pair.kp_perp,
            photon.kappa_perp(),
            pair.phi_perp,
            pair.phip_perp,
            photon.phi(),
        ) {
            Ok(s) => s,
            Err(e) => return physics_exit(stderr, &describe_amp_error(&e)),
        };
        let full = polarization_density(&sp, &pair, flux);
        let ur = match ur_limit(&sp, flux, &pair) {
            Ok(u) => u,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_NUMERICAL;
            }
        };
        let ratio_dev = (ur.sigma_minus_ur / ur.sigma_plus_ur - sp.a / sp.b).abs();
        let rel = (full.lambda_s - ur.density.lambda_s).abs() / full.lambda_s;
        let regime = match ur.regime {
            RegimeCheck::Inside => "inside",
            RegimeCheck::Marginal => "marginal (warning)",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(r),
            fmt(ratio_dev),
            fmt(full.lambda_s),
            fmt(ur.density.lambda_s),
            fmt(rel),
            regime
        ));
    }
    if write_out(cfg, stdout, &out).is_err() {
        return EXIT_NUMERICAL;
    }
    EXIT_OK
}
