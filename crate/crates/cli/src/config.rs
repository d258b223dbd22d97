//! Job configuration: JSON config files, flag parsing helpers and merging.

use std::path::{Path, PathBuf};

use dirac_tori::io::{LatticeSpec, Scalar};
use dirac_tori::{ExactComplex, LatticeBasis, SpinStructure, Tolerances};
use num_complex::Complex64;
use serde::Deserialize;

use crate::Failure;

pub const OUT_DIR_ENV: &str = "DIRAC_TORI_OUT_DIR";

/// Everything `--config` may set. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub lattice: Option<LatticeSpec>,
    /// `[s1, s2]` with entries `0` or `"1/2"`.
    pub spin: Option<[Scalar; 2]>,
    /// `"sqrtN"`, a decimal, or `"auto-min"`.
    pub mu: Option<String>,
    pub mu_max: Option<f64>,
    pub min_card: Option<usize>,
    /// `"m,n;m,n;m,n"`, `"auto"`, or a list of three pairs.
    pub picks: Option<PicksSpec>,
    pub seed_scale: Option<String>,
    pub n: Option<usize>,
    pub tolerances: Option<Tolerances>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PicksSpec {
    Text(String),
    List([[i64; 2]; 3]),
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {}", path.display(), e)))?;
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid config {}: {}", path.display(), e)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Picks {
    Auto,
    Given([(i64, i64); 3]),
}

pub fn parse_picks(spec: &PicksSpec) -> Result<Picks, Failure> {
    match spec {
        PicksSpec::List(l) => Ok(Picks::Given(l.map(|p| (p[0], p[1])))),
        PicksSpec::Text(s) if s.trim() == "auto" => Ok(Picks::Auto),
        PicksSpec::Text(s) => {
            let parts: Vec<&str> = s.split(';').collect();
            if parts.len() != 3 {
                return Err(Failure::usage(format!("expected three picks \"m,n;m,n;m,n\", got {:?}", s)));
            }
            let mut out = [(0, 0); 3];
            for (slot, part) in out.iter_mut().zip(parts) {
                let (m, n) = part
                    .split_once(',')
                    .ok_or_else(|| Failure::usage(format!("malformed pick {:?}", part)))?;
                let m = m.trim().parse().map_err(|_| Failure::usage(format!("malformed pick {:?}", part)))?;
                let n = n.trim().parse().map_err(|_| Failure::usage(format!("malformed pick {:?}", part)))?;
                *slot = (m, n);
            }
            Ok(Picks::Given(out))
        }
    }
}

/// Splits a complex literal into real and imaginary text.
///
/// Accepts `"re,im"`, `"i"`, `"-i"`, `"2i"`, `"0.5+1.5i"`, `"1/2-3/4i"` and plain reals.
pub fn split_complex(s: &str) -> Result<(String, String), Failure> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Failure::usage("empty complex literal".to_string()));
    }
    if let Some((re, im)) = t.split_once(',') {
        return Ok((re.to_string(), im.to_string()));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok((t, "0".to_string()));
    };
    // find the sign separating the real part, skipping exponent signs
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        other => other.trim_start_matches('+').trim_end_matches('*').to_string(),
    };
    Ok((re.to_string(), im))
}

pub fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let (re, im) = split_complex(s)?;
    let value = |x: &str| {
        Scalar::Str(x.to_string())
            .value()
            .map_err(|_| Failure::usage(format!("malformed complex number {:?}", s)))
    };
    let z = Complex64::new(value(&re)?, value(&im)?);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Failure::usage(format!("malformed complex number {:?}", s)));
    }
    Ok(z)
}

pub fn parse_exact_complex(s: &str) -> Result<ExactComplex, Failure> {
    let (re, im) = split_complex(s)?;
    format!("{},{}", re, im)
        .parse()
        .map_err(|e| Failure::usage(format!("malformed exact complex {:?}: {}", s, e)))
}

pub fn tau_spec(s: &str) -> Result<LatticeSpec, Failure> {
    let (re, im) = split_complex(s)?;
    let spec = LatticeSpec::Tau { tau: [Scalar::Str(re), Scalar::Str(im)] };
    // reject malformed literals early
    if let LatticeSpec::Tau { tau } = &spec {
        for x in tau {
            x.value().map_err(|_| Failure::usage(format!("malformed tau {:?}", s)))?;
        }
    }
    Ok(spec)
}

pub fn gamma_spec(g1: &str, g2: &str) -> Result<LatticeSpec, Failure> {
    let a = parse_complex(g1)?;
    let b = parse_complex(g2)?;
    Ok(LatticeSpec::Generators { gamma1: [a.re, a.im], gamma2: [b.re, b.im] })
}

/// Inline JSON or a path to a JSON file.
pub fn lattice_json(arg: &str) -> Result<LatticeSpec, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::usage(format!("cannot read lattice {}: {}", arg, e)))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid lattice JSON: {}", e)))
}

pub fn basis(spec: &LatticeSpec) -> Result<LatticeBasis, Failure> {
    spec.to_basis().map_err(|e| Failure::usage(format!("invalid lattice: {}", e)))
}

fn half_flag(x: &Scalar) -> Result<u8, Failure> {
    let r = x.rational().ok_or_else(|| Failure::usage(format!("spin entries must be 0 or 1/2, got {:?}", x)))?;
    let twice = r * num_rational::BigRational::from_integer(2.into());
    if twice == num_rational::BigRational::from_integer(0.into()) {
        Ok(0)
    } else if twice == num_rational::BigRational::from_integer(1.into()) {
        Ok(1)
    } else {
        Err(Failure::usage(format!("spin entries must be 0 or 1/2, got {:?}", x)))
    }
}

pub fn spin_from_pair(pair: &[Scalar; 2]) -> Result<SpinStructure, Failure> {
    SpinStructure::from_twice(half_flag(&pair[0])?, half_flag(&pair[1])?).map_err(|e| Failure::usage(e.to_string()))
}

/// `"s1,s2"` with entries `0`, `1/2` or `0.5`.
pub fn spin_flag(s: &str) -> Result<[Scalar; 2], Failure> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Failure::usage(format!("spin must be \"s1,s2\", got {:?}", s)))?;
    Ok([Scalar::Str(a.trim().to_string()), Scalar::Str(b.trim().to_string())])
}
