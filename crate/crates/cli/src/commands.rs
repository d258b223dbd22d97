use std::fs;
use std::path::{Path, PathBuf};

use dirac_tori::io::{to_json_pretty, ImmersionJson, LatticeSpec, SpectralSetJson};
use dirac_tori::pipeline::{example_immersion, synthesize};
use dirac_tori::spectral::DEFAULT_TOL;
use dirac_tori::surface::{export_mesh, verify_against_spinor, SurfaceMesh};
use dirac_tori::{
    auto_picks, classify_rectangular, construct_coefficients, dual_basis, spectral_set, spectrum_search, verify as verify_surface,
    Eigenvalue, ExactLatticeBasis, PickPolicy, QuadScalar, SpinStructure, SpinorField, SurfaceImmersion, Tolerances,
};
use serde_json::json;

use crate::config::{self, JobConfig, Picks, PicksSpec};
use crate::{Failure, LatticeArgs, ToleranceArgs};

const DEFAULT_MU_MAX: f64 = 10.0;
const DEFAULT_MIN_CARD: usize = 6;
const DEFAULT_GRID: usize = 128;

fn lattice_spec(args: &LatticeArgs, cfg: &JobConfig) -> Result<LatticeSpec, Failure> {
    if let Some(t) = &args.tau {
        return config::tau_spec(t);
    }
    if let (Some(a), Some(b)) = (&args.gamma1, &args.gamma2) {
        return config::gamma_spec(a, b);
    }
    if let Some(l) = &args.lattice {
        return config::lattice_json(l);
    }
    cfg.lattice
        .clone()
        .ok_or_else(|| Failure::usage("a lattice is required (--tau, --gamma1/--gamma2, --lattice or config)".into()))
}

fn spin(args: &LatticeArgs, cfg: &JobConfig) -> Result<SpinStructure, Failure> {
    match (&args.spin, &cfg.spin) {
        (Some(s), _) => config::spin_from_pair(&config::spin_flag(s)?),
        (None, Some(p)) => config::spin_from_pair(p),
        (None, None) => Ok(SpinStructure::TRIVIAL),
    }
}

fn tolerances(args: &ToleranceArgs, cfg: &JobConfig) -> Result<Tolerances, Failure> {
    let mut t = cfg.tolerances.unwrap_or_default();
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut t.pde, args.tol_pde);
    set(&mut t.closedness, args.tol_closedness);
    set(&mut t.period, args.tol_period);
    set(&mut t.conformal, args.tol_conformal);
    set(&mut t.half_density, args.tol_half_density);
    for v in [t.pde, t.closedness, t.period, t.conformal, t.half_density] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Failure::usage(format!("tolerances must be positive and finite, got {}", v)));
        }
    }
    Ok(t)
}

fn grid(n: Option<usize>, cfg: &JobConfig) -> Result<usize, Failure> {
    let n = n.or(cfg.n).unwrap_or(DEFAULT_GRID);
    if n < 16 {
        return Err(Failure::usage(format!("grid size must be at least 16, got {}", n)));
    }
    Ok(n)
}

fn lattice_json(basis: &dirac_tori::LatticeBasis) -> serde_json::Value {
    json!({
        "gamma1": [basis.gamma1().re, basis.gamma1().im],
        "gamma2": [basis.gamma2().re, basis.gamma2().im],
    })
}

fn dual_json(dual: &dirac_tori::DualBasis) -> serde_json::Value {
    json!({
        "omega1": [dual.omega1().re, dual.omega1().im],
        "omega2": [dual.omega2().re, dual.omega2().im],
    })
}

fn parse_mu(s: &str) -> Result<Eigenvalue, Failure> {
    s.parse().map_err(|e: dirac_tori::Error| Failure::usage(format!("invalid mu {:?}: {}", s, e)))
}

pub fn spectrum(
    cfg: &JobConfig,
    args: &LatticeArgs,
    mu: Option<String>,
    mu_max: Option<f64>,
    min_card: Option<usize>,
) -> Result<u8, Failure> {
    let basis = config::basis(&lattice_spec(args, cfg)?)?;
    let spin = spin(args, cfg)?;
    let dual = dual_basis(&basis)?;
    let mu = mu.or_else(|| cfg.mu.clone()).filter(|m| m != "auto-min" && m != "auto");
    let mut out = json!({
        "lattice": lattice_json(&basis),
        "dual": dual_json(&dual),
        "spin": [spin.halves().0, spin.halves().1],
    });
    match mu {
        Some(m) => {
            let set = spectral_set(&dual, spin, &parse_mu(&m)?, DEFAULT_TOL)?;
            out["spectral_set"] = serde_json::to_value(SpectralSetJson::from(&set)).expect("serializable");
        }
        None => {
            let mu_max = mu_max.or(cfg.mu_max).unwrap_or(DEFAULT_MU_MAX);
            let min_card = min_card.or(cfg.min_card).unwrap_or(DEFAULT_MIN_CARD);
            let rows = spectrum_search(&dual, spin, mu_max, min_card)?;
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "mu": r.mu,
                        "mu_sq": r.mu_sq_exact.as_ref().map(|q| q.to_string()),
                        "cardinality": r.cardinality,
                    })
                })
                .collect();
            out["spectrum"] = json!(rows);
        }
    }
    print!("{}", to_json_pretty(&out));
    Ok(0)
}

pub struct SynthOptions {
    pub lattice: LatticeArgs,
    pub mu: Option<String>,
    pub mu_max: Option<f64>,
    pub picks: Option<String>,
    pub seed_scale: Option<String>,
    pub example_paper: bool,
    pub n: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub force: bool,
    pub tol: ToleranceArgs,
}

fn out_dir(flag: &Option<PathBuf>, cfg: &JobConfig) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(config::OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn build_spinor(cfg: &JobConfig, o: &SynthOptions) -> Result<(dirac_tori::LatticeBasis, SpinorField), Failure> {
    let basis = config::basis(&lattice_spec(&o.lattice, cfg)?)?;
    let spin = spin(&o.lattice, cfg)?;
    let dual = dual_basis(&basis)?;
    let mu_text = o
        .mu
        .clone()
        .or_else(|| cfg.mu.clone())
        .ok_or_else(|| Failure::usage("--mu is required (a value or \"auto-min\")".into()))?;
    let mu = if mu_text == "auto-min" {
        let mu_max = o.mu_max.or(cfg.mu_max).unwrap_or(DEFAULT_MU_MAX);
        let rows = spectrum_search(&dual, spin, mu_max, 6)?;
        let row = rows.first().ok_or_else(|| Failure {
            code: 3,
            message: format!("no eigenvalue up to {} carries the six frequencies a closed Dirac torus needs", mu_max),
        })?;
        match &row.mu_sq_exact {
            Some(sq) => Eigenvalue::sqrt_of(sq.clone()),
            None => Eigenvalue::from_f64(row.mu),
        }
    } else {
        parse_mu(&mu_text)?
    };
    let set = spectral_set(&dual, spin, &mu, DEFAULT_TOL)?;
    if set.len() < 6 {
        return Err(Failure {
            code: 3,
            message: format!(
                "no closed Dirac torus at mu = {}: #Γ' = {}, but the closing conditions force a zero spinor unless #Γ' >= 6",
                mu,
                set.len()
            ),
        });
    }
    let picks_spec = match (&o.picks, &cfg.picks) {
        (Some(p), _) => PicksSpec::Text(p.clone()),
        (None, Some(p)) => p.clone(),
        (None, None) => PicksSpec::Text("auto".into()),
    };
    let policy = PickPolicy::default();
    let picks = match config::parse_picks(&picks_spec)? {
        Picks::Given(p) => p,
        Picks::Auto => auto_picks(&set, policy)
            .ok_or_else(|| Failure::usage(format!("no admissible pick triple on #Γ' = {}", set.len())))?,
    };
    let seed = o.seed_scale.clone().or_else(|| cfg.seed_scale.clone()).unwrap_or_else(|| "1".into());
    let seed = config::parse_complex(&seed)?;
    if seed.norm() == 0.0 {
        return Err(Failure::usage("seed scale must be nonzero".into()));
    }
    let coeffs = construct_coefficients(&set, picks, seed, policy)?;
    Ok((basis, SpinorField::new(set, coeffs)?))
}

fn check_writable(path: &Path, force: bool) -> Result<(), Failure> {
    if path.exists() && !force {
        return Err(Failure::usage(format!("{} exists; pass --force to overwrite", path.display())));
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {}", path.display(), e)))
}

pub fn synth(cfg: &JobConfig, o: &SynthOptions) -> Result<u8, Failure> {
    let n = grid(o.n, cfg)?;
    let tol = tolerances(&o.tol, cfg)?;
    let (spinor, f) = if o.example_paper {
        example_immersion()?
    } else {
        let (basis, spinor) = build_spinor(cfg, o)?;
        let f = synthesize(&spinor, &basis, true)?;
        (spinor, f)
    };
    let report = verify_surface(&f, Some(&spinor), n, &tol);

    let dir = out_dir(&o.out_dir, cfg);
    fs::create_dir_all(&dir).map_err(|e| Failure::usage(format!("cannot create {}: {}", dir.display(), e)))?;
    let obj = dir.join("torus.obj");
    let imm = dir.join("torus.json");
    let rep = dir.join("report.json");
    for p in [&obj, &imm, &rep] {
        check_writable(p, o.force)?;
    }
    let mesh = SurfaceMesh::build(&f, n)?;
    let mut buf = Vec::new();
    mesh.write_obj(&mut buf).expect("in-memory write");
    fs::write(&obj, buf).map_err(|e| Failure::usage(format!("cannot write {}: {}", obj.display(), e)))?;
    write_text(&imm, &to_json_pretty(&ImmersionJson::new(&f, Some(&spinor))))?;
    let report_text = to_json_pretty(&report);
    write_text(&rep, &report_text)?;
    print!("{}", report_text);

    if report.passed {
        Ok(0)
    } else {
        Err(Failure { code: 4, message: format!("verification failed: {}", report.failures.join("; ")) })
    }
}

fn load_immersion(path: &Path) -> Result<(SurfaceImmersion, Option<SpinorField>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {}", path.display(), e)))?;
    let parsed: ImmersionJson =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid immersion JSON {}: {}", path.display(), e)))?;
    let f = parsed.immersion()?;
    let spinor = parsed.spinor_field()?;
    Ok((f, spinor))
}

pub fn verify(cfg: &JobConfig, path: &Path, n: Option<usize>, tol: &ToleranceArgs) -> Result<u8, Failure> {
    let n = grid(n, cfg)?;
    let tol = tolerances(tol, cfg)?;
    let (f, spinor) = load_immersion(path)?;
    let report = match &spinor {
        Some(s) => verify_against_spinor(&f, s, n, &tol),
        None => verify_surface(&f, None, n, &tol),
    };
    print!("{}", to_json_pretty(&report));
    if report.passed {
        Ok(0)
    } else {
        Err(Failure { code: 4, message: format!("verification failed: {}", report.failures.join("; ")) })
    }
}

pub fn export(cfg: &JobConfig, path: &Path, out: &Path, n: Option<usize>, force: bool) -> Result<u8, Failure> {
    let n = grid(n, cfg)?;
    let (f, _) = load_immersion(path)?;
    check_writable(out, force)?;
    let mesh = export_mesh(&f, n, out, force)?;
    eprintln!("wrote {} vertices, {} faces to {}", mesh.vertices.len(), mesh.faces.len(), out.display());
    Ok(0)
}

fn check_field(value: &QuadScalar, d: Option<u64>) -> Result<(), Failure> {
    if let Some(d) = d {
        if value.field() != 1 && value.field() != dirac_tori::exact::squarefree_split(d).1 {
            return Err(Failure::usage(format!("{} does not lie in Q(sqrt({}))", value, d)));
        }
    }
    Ok(())
}

pub fn classify(
    rect_tau_sq: Option<String>,
    d: Option<u64>,
    tau: Option<String>,
    gammas: Option<(String, String)>,
    dual: bool,
    bound: u64,
) -> Result<u8, Failure> {
    if d == Some(0) {
        return Err(Failure::usage("d must be a positive integer".into()));
    }
    let verdict = if let Some(t2) = rect_tau_sq {
        let value: QuadScalar = t2.parse().map_err(|e| Failure::usage(format!("invalid tau^2 {:?}: {}", t2, e)))?;
        check_field(&value, d)?;
        classify_rectangular(&value)?
    } else {
        let basis = match (tau, gammas) {
            (Some(t), _) => ExactLatticeBasis::from_tau(config::parse_exact_complex(&t)?)?,
            (None, Some((a, b))) => ExactLatticeBasis::new(config::parse_exact_complex(&a)?, config::parse_exact_complex(&b)?)?,
            (None, None) => return Err(Failure::usage("classify needs --rect-tau-sq, --tau or --gamma1/--gamma2".into())),
        };
        for v in [&basis.omega1().re, &basis.omega1().im, &basis.omega2().re, &basis.omega2().im] {
            check_field(v, d)?;
        }
        let searched = if dual { basis } else { basis.dual() };
        dirac_tori::classify(&searched, bound)?
    };
    print!("{}", to_json_pretty(&verdict));
    Ok(if verdict.exists() { 0 } else { 1 })
}
