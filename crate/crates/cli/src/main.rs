//! `hblab`: command-line front end for the H(b) toolkit.
//!
//! Exit codes: 0 success, 1 domain error (JSON reason on stderr),
//! 2 usage or literal parse error.

mod args;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hblab::boundary::literal::{parse_exact, parse_function};
use hblab::boundary::UnitCircleFunction;
use hblab::clark::clark_measure;
use hblab::cyclicity::{
    analyze, decay_table, decay_table_exact, estimate_from_decay, theorem_a_check, theorem_b_check, theorem_c_check,
    AnalyzeOptions, CyclicityReport, DecayThresholds,
};
use hblab::emit;
use hblab::factor::mate_of_b;
use hblab::hb::{truncation_degree, HbSpace};
use hblab::models::{
    dirichlet_cyclic, dirichlet_norm, dirichlet_norm_exact, theta_cyclic, theta_model, universal_cyclicity,
    DirichletSpec,
};
use hblab::par::{configure_threads, Exec};
use hblab::poly::{CPoly, QPoly};
use hblab::scalar::C64;
use hblab::sigma::{sigma_bounds, sigma_bounds_from_phi, toeplitz_kernel_sections};
use hblab::{Config, HbError};

#[derive(Parser, Debug)]
#[command(name = "hblab", version, about = "Cyclic vectors in de Branges-Rovnyak spaces")]
struct Cli {
    /// Boundary quadrature grid size.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Use exact Gaussian-rational arithmetic where the command supports it.
    #[arg(long, global = true)]
    exact: bool,
    /// Modulus below which a point value counts as zero.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Run every inner loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    A,
    B,
    C,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Pythagorean mate a of b.
    Mate {
        #[arg(long)]
        b: String,
    },
    /// Non-extremality check for b.
    Validate {
        #[arg(long)]
        b: String,
    },
    /// Norm of f in H(b) and its mate coefficients.
    Norm {
        #[arg(long)]
        b: String,
        #[arg(long)]
        f: String,
    },
    /// Distance table d_N^2 = dist(1, f P_N)^2 as CSV.
    Decay {
        #[arg(long)]
        b: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 60)]
        n: usize,
    },
    /// Finite-defect classifier report.
    Classify {
        #[arg(long)]
        b: String,
        #[arg(long)]
        f: String,
        /// Also run the atom sweep and the decay heuristic.
        #[arg(long)]
        full: bool,
    },
    /// Clark measure at alpha = e^{i angle} as CSV.
    Clark {
        #[arg(long)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Bounds on the local non-exposure set.
    Sigma {
        #[arg(long, conflicts_with = "phi", required_unless_present = "phi")]
        b: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        /// Comma-separated section sizes; prints singular values as CSV.
        #[arg(long)]
        sections: Option<String>,
    },
    /// Sufficiency certificates.
    Certify {
        #[arg(long, value_enum, ignore_case = true)]
        rule: Rule,
        #[arg(long, conflicts_with = "phi", required_unless_present = "phi")]
        b: Option<String>,
        /// Build the space from a polynomial phi instead of b.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        f: Option<String>,
        /// Rule A: arcs `start:end` (or `full`) where 1/a is square integrable.
        #[arg(long = "e-arcs", allow_hyphen_values = true, default_value = "")]
        e_arcs: String,
        /// Rule A: arcs where f is bounded below.
        #[arg(long = "f-arcs", allow_hyphen_values = true, default_value = "")]
        f_arcs: String,
        /// Rule B: `center:width:eta` items.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        cover: String,
        /// Rule C: polynomial g.
        #[arg(long)]
        g: Option<String>,
    },
    /// Dirichlet-type space with finitely many atoms.
    Dirichlet {
        /// `angle:weight` pairs, e.g. `0:1,pi:0.5`.
        #[arg(long, allow_hyphen_values = true)]
        atoms: String,
        #[arg(long)]
        f: String,
    },
    /// Model space with b = (1 + theta)/2.
    Theta {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        f: String,
    },
    /// Cyclicity of b and of reproducing kernels.
    Universal {
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Acceptance criteria and invariant suite.
    Verify,
}

enum Failure {
    Usage(String),
    Domain(HbError),
}

impl From<HbError> for Failure {
    fn from(e: HbError) -> Self {
        match e {
            HbError::Parse { reason } => Failure::Usage(reason),
            e => Failure::Domain(e),
        }
    }
}

type Out = std::result::Result<String, Failure>;

fn usage(msg: String) -> Failure {
    Failure::Usage(msg)
}

fn config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = Config::default().with_exact(cli.exact);
    if let Some(n) = cli.grid {
        cfg = cfg.with_grid(n).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!("--tol must be positive, got {t}")));
        }
        cfg.zero_tol = t;
    }
    if cli.sequential {
        cfg = cfg.with_exec(Exec::Sequential);
    }
    Ok(cfg)
}

fn space(b: &str, cfg: Config) -> Result<HbSpace, Failure> {
    Ok(HbSpace::new(parse_function(b)?, cfg)?)
}

/// Polynomial coefficients of `g`, via a Taylor truncation when `g` is rational.
fn as_poly(g: &UnitCircleFunction) -> Result<CPoly, Failure> {
    match g.as_polynomial() {
        Some(p) => Ok(p.clone()),
        None => Ok(CPoly::new(g.taylor(truncation_degree(g)?)?)),
    }
}

fn poly_arg(s: &str) -> Result<CPoly, Failure> {
    as_poly(&parse_function(s)?)
}

/// Exact polynomial literal; rational literals with a constant denominator are accepted.
fn exact_poly(s: &str) -> Result<QPoly, Failure> {
    let (n, d) = parse_exact(s)?;
    if d.degree() != Some(0) {
        return Err(HbError::NotPolynomial.into());
    }
    let c = d.coeff(0);
    Ok(QPoly::new(n.coeffs().iter().map(|x| x.clone() / c.clone()).collect()))
}

fn function_json(g: &UnitCircleFunction) -> Value {
    json!({ "num": g.num().coeffs(), "den": g.den().coeffs() })
}

macro_rules! report {
    ($cmd:expr, $inputs:expr, $cfg:expr, $body:expr $(,)?) => {
        Ok(emit::report($cmd, $inputs, $cfg, $body)?)
    };
}

fn run(cli: &Cli) -> Out {
    let cfg = config(cli)?;
    match &cli.cmd {
        Cmd::Mate { b } => {
            let bf = parse_function(b)?;
            let a = mate_of_b(&bf, &cfg)?;
            report!("mate", json!({ "b": b }), &cfg, json!({ "a": function_json(&a) }))
        }
        Cmd::Validate { b } => {
            let s = space(b, cfg)?;
            report!("validate", json!({ "b": b }), &cfg, json!({ "non_extreme": true, "validation": s.validation() }))
        }
        Cmd::Norm { b, f } => {
            let s = space(b, cfg)?;
            let inputs = json!({ "b": b, "f": f });
            if cfg.exact {
                let el = s.element_exact(&exact_poly(f)?)?;
                let exact = el.exact_norm_sq().map(|q| q.to_string());
                return report!(
                    "norm",
                    inputs,
                    &cfg,
                    json!({ "norm_sq": el.norm_sq(), "norm_sq_exact": exact, "mate": el.mate().coeffs() }),
                );
            }
            let el = s.element_from_function(&parse_function(f)?)?;
            report!(
                "norm",
                inputs,
                &cfg,
                json!({ "norm_sq": el.norm_sq(), "mate": el.mate().coeffs(), "residual": el.residual() }),
            )
        }
        Cmd::Decay { b, f, n } => {
            let s = space(b, cfg)?;
            let table = if cfg.exact { decay_table_exact(&s, &exact_poly(f)?, *n)? } else { decay_table(&s, &poly_arg(f)?, *n)? };
            let est = estimate_from_decay(&table, &DecayThresholds::default());
            Ok(emit::decay_csv(&table, Some(&est))?)
        }
        Cmd::Classify { b, f, full } => {
            let s = space(b, cfg)?;
            let fp = poly_arg(f)?;
            let opts = if *full {
                AnalyzeOptions::default()
            } else {
                AnalyzeOptions { decay_n: None, necessity: false, ..AnalyzeOptions::default() }
            };
            let r = analyze(&s, &fp, &opts)?;
            report!("classify", json!({ "b": b, "f": f, "full": full }), &cfg, &r)
        }
        Cmd::Clark { b, alpha, samples } => {
            let s = space(b, cfg)?;
            let t = args::angle(alpha).map_err(usage)?;
            let mu = clark_measure(&s, C64::from_polar(1.0, t))?;
            Ok(emit::clark_csv(&mu, *samples)?)
        }
        Cmd::Sigma { b, phi, sections } => {
            let (bounds, phi_fn) = match (b, phi) {
                (Some(b), _) => {
                    let s = space(b, cfg)?;
                    let bounds = sigma_bounds(&s)?;
                    let phi_fn = hblab::clark::phi_alpha(&s, bounds.reference_alpha)?;
                    (bounds, phi_fn)
                }
                (None, Some(p)) => {
                    let phi_fn = parse_function(p)?;
                    (sigma_bounds_from_phi(&phi_fn, cfg)?, phi_fn)
                }
                (None, None) => return Err(usage("one of --b or --phi is required".into())),
            };
            if let Some(list) = sections {
                let sizes = list
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| usage(format!("bad section size {x:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let reps = sizes.iter().map(|&n| toeplitz_kernel_sections(&phi_fn, n)).collect::<hblab::Result<Vec<_>>>()?;
                return Ok(emit::sections_csv(&reps)?);
            }
            report!("sigma", json!({ "b": b, "phi": phi }), &cfg, &bounds)
        }
        Cmd::Certify { rule, b, phi, f, e_arcs, f_arcs, cover, g } => {
            let s = match (b, phi) {
                (Some(b), _) => space(b, cfg)?,
                (None, Some(p)) => HbSpace::from_phi(&parse_function(p)?, cfg)?,
                (None, None) => return Err(usage("one of --b or --phi is required".into())),
            };
            let need_f = || f.as_deref().ok_or_else(|| usage("--f is required for this rule".into())).and_then(poly_arg);
            let inputs = json!({ "rule": format!("{rule:?}"), "b": b, "phi": phi, "f": f, "g": g });
            let (evidence, outer) = match rule {
                Rule::A => {
                    let fp = need_f()?;
                    let e = args::arcs(e_arcs).map_err(usage)?;
                    let fa = args::arcs(f_arcs).map_err(usage)?;
                    (theorem_a_check(&s, &fp, &e, &fa)?.evidence(&fp), None)
                }
                Rule::B => {
                    let fp = need_f()?;
                    let items = args::cover(cover).map_err(usage)?;
                    (theorem_b_check(&s, &fp, &items)?.evidence(&fp), None)
                }
                Rule::C => {
                    let gp = poly_arg(g.as_deref().ok_or_else(|| usage("--g is required for rule C".into()))?)?;
                    let out = theorem_c_check(&s, &gp)?;
                    (out.certificate?.evidence(&gp), Some(function_json(&out.outer)))
                }
            };
            let r = CyclicityReport::single(evidence);
            report!("certify", inputs, &cfg, json!({ "report": r, "outer_part": outer }))
        }
        Cmd::Dirichlet { atoms, f } => {
            let spec = DirichletSpec::new(args::atoms(atoms).map_err(usage)?)?;
            let fp = poly_arg(f)?;
            let norm = dirichlet_norm(&spec, &fp);
            let exact = if cfg.exact {
                let ex = spec.to_exact().ok_or_else(|| HbError::ExactUnavailable { reason: "atoms are not rational points".into() })?;
                let (d, total) = dirichlet_norm_exact(&ex, &exact_poly(f)?)?;
                Some(json!({ "dirichlet": d.to_string(), "total": total.to_string() }))
            } else {
                None
            };
            let r = dirichlet_cyclic(&spec, &fp)?;
            report!(
                "dirichlet",
                json!({ "atoms": atoms, "f": f }),
                &cfg,
                json!({ "atoms": spec.atoms(), "norm": norm, "norm_exact": exact, "report": r }),
            )
        }
        Cmd::Theta { theta, f } => {
            let model = theta_model(&parse_function(theta)?, &cfg)?;
            let r = theta_cyclic(&model, &poly_arg(f)?)?;
            report!("theta", json!({ "theta": theta, "f": f }), &cfg, json!({ "model": model.summary(), "report": r }))
        }
        Cmd::Universal { b, seed } => {
            let s = space(b, cfg)?;
            report!("universal", json!({ "b": b, "seed": seed }), &cfg, universal_cyclicity(&s, *seed)?)
        }
        Cmd::Verify => {
            let checks = hblab::verify::all(cfg);
            let mut out: Vec<String> = checks.iter().map(|c| c.line()).collect();
            let failed = checks.iter().filter(|c| !c.passed).count();
            out.push(format!("{} checks, {} failed", checks.len(), failed));
            let text = out.join("\n");
            if failed > 0 {
                let _ = writeln!(std::io::stdout().lock(), "{text}");
                return Err(Failure::Domain(HbError::Numerical { reason: format!("{failed} verification check(s) failed") }));
            }
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("HB_LAB_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                configure_threads(Some(n));
            }
            _ => {
                eprintln!("HB_LAB_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli) {
        Ok(text) => {
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", json!({ "error": "usage", "message": msg }));
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(1)
        }
    }
}
