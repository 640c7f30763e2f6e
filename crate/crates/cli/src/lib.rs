//! Command implementations behind the `demjanenko` binary.
//!
//! Every command returns a [`ResultEnvelope`] whose payload is the
//! serialized certificate or report. Rationals are written as
//! `{"num": "...", "den": "..."}` with decimal strings.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use demjanenko_core::demjanenko::{certify, DemjanenkoInput, PointCertificate};
use demjanenko_core::descent::{
    hasse_candidate_verdict, quartic_residue_criterion, root_number, selmer_rank_bound, selmer_sets, HasseVerdict,
    Verdict,
};
use demjanenko_core::dynamics::{
    chebyshev_curve_points, orbit_tail, preperiodic_points, shifted_intersection, CaseTag, ChebCertificate, PolyMap,
};
use demjanenko_core::elliptic::{naive_height, ECPoint, EllipticCurve, HeightContext};
use demjanenko_core::exact::{is_prime, IntPoly};
use demjanenko_core::localglobal::LocalStatus;
use demjanenko_core::quartic::SymQuartic;
use demjanenko_core::{Error as CoreError, Rational};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable naming the scan cache directory.
pub const CACHE_ENV: &str = "DEMJANENKO_CACHE";

const HASSE_CACHE_FILE: &str = "hasse-scan.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub command: String,
    pub inputs: String,
    pub payload: Value,
    pub assumptions: Vec<String>,
    pub toolkit_version: String,
    /// Seconds since the Unix epoch. The only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

impl ResultEnvelope {
    fn new(command: &str, inputs: String, payload: Value, assumptions: Vec<String>) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ResultEnvelope {
            command: command.to_string(),
            inputs,
            payload,
            assumptions,
            toolkit_version: TOOLKIT_VERSION.to_string(),
            timestamp,
        }
    }
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Certified = 0,
    Failure = 1,
    Precondition = 2,
    Undetermined = 3,
}

/// A finished command: the envelope plus the exit code it implies.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub envelope: ResultEnvelope,
    pub exit: ExitCode,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input: malformed numbers, singular curves, off-curve points.
    Precondition(String),
    Io(std::io::Error),
    /// A core consistency check failed or precision ran out.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Precondition(_) => ExitCode::Precondition,
            _ => ExitCode::Failure,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Precondition(_) => "precondition",
            CliError::Io(_) => "io",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Precondition(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
            CliError::Internal(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Precondition(_) | CoreError::NotOnCurve(_) | CoreError::Singular(_) => {
                CliError::Precondition(e.to_string())
            }
            CoreError::Inconsistent(_) | CoreError::Precision(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("serialization: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Precondition(msg.into())
}

/// Parses `n` or `n/d` into a rational in lowest terms.
pub fn parse_rational(s: &str) -> CliResult<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad(format!("malformed rational {s:?}")))?;
    let den: BigInt = d.parse().map_err(|_| bad(format!("malformed rational {s:?}")))?;
    if den == BigInt::from(0) {
        return Err(bad(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Parses an affine point written `x,y`.
pub fn parse_point(s: &str) -> CliResult<ECPoint> {
    let (x, y) = s
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split_once(',')
        .ok_or_else(|| bad(format!("point {s:?} must be written x,y")))?;
    Ok(ECPoint::new(parse_rational(x)?, parse_rational(y)?))
}

fn parse_list(s: &str) -> CliResult<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

fn rat_json(q: &Rational) -> Value {
    json!({ "num": q.numer().to_string(), "den": q.denom().to_string() })
}

fn rats_json<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> Value {
    Value::Array(qs.into_iter().map(rat_json).collect())
}

fn point_json(p: &ECPoint) -> Value {
    match (p.x(), p.y()) {
        (Some(x), Some(y)) => json!([rat_json(x), rat_json(y)]),
        _ => json!("infinity"),
    }
}

#[derive(Clone, Debug)]
pub struct QuarticArgs {
    pub a: String,
    pub b: String,
    pub alpha: i64,
    pub generator: Option<String>,
    pub rank: Option<u8>,
    pub min_window: u64,
    pub tol: f64,
}

impl Default for QuarticArgs {
    fn default() -> Self {
        QuarticArgs {
            a: "0".into(),
            b: "0".into(),
            alpha: 1,
            generator: None,
            rank: None,
            min_window: 40,
            tol: 1e-10,
        }
    }
}

pub fn cmd_quartic(args: &QuarticArgs) -> CliResult<Outcome> {
    let a = parse_rational(&args.a)?;
    let b = parse_rational(&args.b)?;
    let curve = SymQuartic::new(a.clone(), b.clone(), BigInt::from(args.alpha))?;
    let generator = args.generator.as_deref().map(parse_point).transpose()?;
    let rank = match (args.rank, &generator) {
        (Some(r), _) => r,
        (None, Some(_)) => 1,
        (None, None) => return Err(bad("give --generator for rank one, or --rank 0")),
    };
    let inputs = format!(
        "a={a} b={b} alpha={} generator={} rank={rank} min_window={}",
        args.alpha,
        generator.as_ref().map_or("none".to_string(), |g| g.to_string()),
        args.min_window
    );
    let inp = DemjanenkoInput::derive(curve, generator, rank, args.tol)?.with_min_window(args.min_window);
    let cert = certify(&inp)?;
    let assumptions = cert.conditional_on.clone();
    Ok(Outcome {
        envelope: ResultEnvelope::new("quartic", inputs, serde_json::to_value(&cert)?, assumptions),
        exit: ExitCode::Certified,
    })
}

/// Reads a certificate back out of a `quartic` envelope.
pub fn quartic_certificate(env: &ResultEnvelope) -> CliResult<PointCertificate> {
    Ok(serde_json::from_value(env.payload.clone())?)
}

pub fn cmd_cheb(d: u32) -> CliResult<Outcome> {
    let cert = chebyshev_curve_points(d)?;
    let exit = if cert.case == CaseTag::Conjectural {
        ExitCode::Undetermined
    } else {
        ExitCode::Certified
    };
    let assumptions = cert.imports.clone();
    Ok(Outcome {
        envelope: ResultEnvelope::new("cheb", format!("d={d}"), serde_json::to_value(&cert)?, assumptions),
        exit,
    })
}

pub fn cheb_certificate(env: &ResultEnvelope) -> CliResult<ChebCertificate> {
    Ok(serde_json::from_value(env.payload.clone())?)
}

pub fn cmd_heights(curve: &str, point: &str, tol: f64) -> CliResult<Outcome> {
    let c = parse_list(curve)?;
    let [a2, a4, a6]: [Rational; 3] = c
        .try_into()
        .map_err(|_| bad("curve must be given as a2,a4,a6"))?;
    let e = EllipticCurve::new(a2, a4, a6)?;
    let p = parse_point(point)?;
    if !e.contains(&p) {
        return Err(bad(format!("{p} is not on {e}")));
    }
    let ctx = HeightContext::new(&e)?;
    let gap = ctx.gap();
    let hhat = ctx.canonical_height(&e, &p, tol)?;
    let payload = json!({
        "curve": [rat_json(e.a2()), rat_json(e.a4()), rat_json(e.a6())],
        "point": point_json(&p),
        "naive_height": naive_height(&p),
        "canonical_height": hhat,
        "tolerance": tol,
        "gap_lower": gap.lower,
        "gap_upper": gap.upper,
    });
    Ok(Outcome {
        envelope: ResultEnvelope::new("heights", format!("curve={e} point={p} tol={tol:e}"), payload, vec![]),
        exit: ExitCode::Certified,
    })
}

pub fn cmd_descent(p: u64) -> CliResult<Outcome> {
    let (s, t) = selmer_sets(p)?;
    let strs = |set: &std::collections::BTreeSet<BigInt>| set.iter().map(|d| d.to_string()).collect::<Vec<_>>();
    let payload = json!({
        "p": p,
        "selmer_set": strs(&s),
        "dual_selmer_set": strs(&t),
        "selmer_rank_bound": selmer_rank_bound(p)?,
        "quartic_residue": quartic_residue_criterion(p)?,
        "root_number": serde_json::to_value(root_number(p)?)?,
    });
    Ok(Outcome {
        envelope: ResultEnvelope::new("descent", format!("p={p}"), payload, vec![]),
        exit: ExitCode::Certified,
    })
}

#[derive(Clone, Debug)]
pub struct OrbitArgs {
    /// Coefficients of `f`, constant term first.
    pub poly: String,
    /// `L(x) = c + m x` written `c,m`.
    pub shift: String,
    pub start: String,
    pub beta: Option<String>,
    pub n: u32,
    pub horizon: usize,
    pub preperiodic_cap: Option<u64>,
}

impl Default for OrbitArgs {
    fn default() -> Self {
        OrbitArgs {
            poly: "-2,0,1".into(),
            shift: "1,-1".into(),
            start: "0".into(),
            beta: None,
            n: 0,
            horizon: 32,
            preperiodic_cap: None,
        }
    }
}

pub fn cmd_orbit(args: &OrbitArgs) -> CliResult<Outcome> {
    let coeffs: Vec<BigInt> = parse_list(&args.poly)?
        .into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(bad("polynomial coefficients must be integers"))
            }
        })
        .collect::<CliResult<_>>()?;
    let f = IntPoly::new(coeffs);
    let shift = parse_list(&args.shift)?;
    let [l_const, l_lin]: [Rational; 2] = shift.try_into().map_err(|_| bad("shift must be written c,m"))?;
    let map = PolyMap::new(f.clone(), l_const, l_lin)?;
    let alpha = parse_rational(&args.start)?;
    let tail = orbit_tail(&map, args.n, &alpha, args.horizon)?;
    let mut payload = json!({
        "orbit": rats_json(&tail.values),
        "periodic": tail.periodic,
    });
    let mut exact = tail.periodic;
    if let Some(beta) = &args.beta {
        let beta = parse_rational(beta)?;
        let meet = shifted_intersection(&map, args.n, &alpha, &beta, args.horizon)?;
        exact &= meet.exact;
        payload["shifted_intersection"] = rats_json(&meet.values);
        payload["intersection_exact"] = json!(meet.exact);
    }
    if let Some(cap) = args.preperiodic_cap {
        payload["preperiodic"] = rats_json(&preperiodic_points(&f, cap)?);
    }
    let inputs = format!(
        "poly={} shift={} start={} beta={} n={} horizon={}",
        args.poly,
        args.shift,
        args.start,
        args.beta.as_deref().unwrap_or("none"),
        args.n,
        args.horizon
    );
    Ok(Outcome {
        envelope: ResultEnvelope::new("orbit", inputs, payload, vec![]),
        exit: if exact { ExitCode::Certified } else { ExitCode::Undetermined },
    })
}

/// One line of the scan cache.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    input_hash: String,
    checksum: String,
    payload: Value,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn cache_key(p: u64, assume_parity: bool) -> String {
    format!("hasse-scan/v{TOOLKIT_VERSION}/p={p}/parity={assume_parity}")
}

impl CacheEntry {
    fn new(key: String, payload: Value) -> CliResult<Self> {
        let checksum = sha256_hex(serde_json::to_string(&payload)?.as_bytes());
        Ok(CacheEntry {
            input_hash: sha256_hex(key.as_bytes()),
            key,
            checksum,
            payload,
        })
    }

    fn intact(&self) -> bool {
        let Ok(body) = serde_json::to_string(&self.payload) else {
            return false;
        };
        self.input_hash == sha256_hex(self.key.as_bytes()) && self.checksum == sha256_hex(body.as_bytes())
    }
}

/// Counts from one pass over the cache.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub computed: usize,
    /// Lines that failed to parse or whose hashes did not match.
    pub rejected: usize,
}

/// Append-only JSONL cache, held under an exclusive advisory lock.
struct ScanCache {
    file: File,
    entries: BTreeMap<String, Value>,
    rejected: usize,
}

impl ScanCache {
    fn open(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(HASSE_CACHE_FILE);
        let file = OpenOptions::new().read(true).append(true).create(true).open(&path)?;
        file.try_lock().map_err(|e| match e {
            std::fs::TryLockError::WouldBlock => {
                CliError::Io(std::io::Error::other(format!("{} is locked by another process", path.display())))
            }
            std::fs::TryLockError::Error(e) => CliError::Io(e),
        })?;
        let mut entries = BTreeMap::new();
        let mut rejected = 0;
        for line in BufReader::new(&file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheEntry>(&line) {
                Ok(e) if e.intact() => {
                    entries.insert(e.key, e.payload);
                }
                _ => rejected += 1,
            }
        }
        Ok(ScanCache { file, entries, rejected })
    }

    fn append(&mut self, key: String, payload: Value) -> CliResult<()> {
        let entry = CacheEntry::new(key.clone(), payload.clone())?;
        let mut line = serde_json::to_string(&entry)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        self.entries.insert(key, payload);
        Ok(())
    }
}

impl Drop for ScanCache {
    fn drop(&mut self) {
        let _ = self.file.unlock();
    }
}

#[derive(Clone, Debug)]
pub struct HasseScanArgs {
    pub lo: u64,
    pub hi: u64,
    pub assume_parity: bool,
    pub cache_dir: Option<PathBuf>,
}

/// Primes `p ≡ 1 (mod 24)` in `[lo, hi]`. Those `≡ 1 (mod 48)` are recorded
/// as failing the congruence gate; the rest get full verdicts.
pub fn scan_primes(lo: u64, hi: u64) -> Vec<u64> {
    let start = lo + (1 + 24 - lo % 24) % 24;
    (start..=hi)
        .step_by(24)
        .filter(|&p| is_prime(&BigInt::from(p)))
        .collect()
}

pub fn cmd_hasse_scan(args: &HasseScanArgs) -> CliResult<(Outcome, CacheStats)> {
    if args.lo < 3 || args.lo > args.hi {
        return Err(bad(format!("need 3 ≤ lo ≤ hi, got [{}, {}]", args.lo, args.hi)));
    }
    let mut cache = args.cache_dir.as_deref().map(ScanCache::open).transpose()?;
    let mut stats = CacheStats {
        rejected: cache.as_ref().map_or(0, |c| c.rejected),
        ..Default::default()
    };
    let mut verdicts = Vec::new();
    for p in scan_primes(args.lo, args.hi) {
        let key = cache_key(p, args.assume_parity);
        if let Some(v) = cache.as_ref().and_then(|c| c.entries.get(&key)) {
            if serde_json::from_value::<HasseVerdict>(v.clone()).is_ok() {
                stats.hits += 1;
                verdicts.push(v.clone());
                continue;
            }
        }
        let v = serde_json::to_value(hasse_candidate_verdict(p, args.assume_parity)?)?;
        stats.computed += 1;
        if let Some(c) = cache.as_mut() {
            c.append(key, v.clone())?;
        }
        verdicts.push(v);
    }
    let parsed: Vec<HasseVerdict> = verdicts
        .iter()
        .map(|v| serde_json::from_value(v.clone()))
        .collect::<Result<_, _>>()?;
    let undetermined = parsed.iter().any(|v| {
        v.verdict == Verdict::RankNotDetermined || v.local_reports.iter().any(|r| r.status == LocalStatus::Undetermined)
    });
    let mut assumptions: Vec<String> = parsed.iter().flat_map(|v| v.assumptions.iter().cloned()).collect();
    assumptions.sort();
    assumptions.dedup();
    let inputs = format!("lo={} hi={} assume_parity={}", args.lo, args.hi, args.assume_parity);
    let outcome = Outcome {
        envelope: ResultEnvelope::new("hasse-scan", inputs, Value::Array(verdicts), assumptions),
        exit: if undetermined { ExitCode::Undetermined } else { ExitCode::Certified },
    };
    Ok((outcome, stats))
}

/// Short human-readable summary of an envelope.
pub fn render_text(env: &ResultEnvelope) -> String {
    let mut out = format!("{} [{}]\n", env.command, env.inputs);
    let p = &env.payload;
    match env.command.as_str() {
        "quartic" => {
            if let Ok(c) = serde_json::from_value::<PointCertificate>(p.clone()) {
                out += &format!(
                    "index bound {}, window {} (derived {})\n{} points:\n",
                    c.index_bound,
                    c.n_window,
                    c.derived_window,
                    c.points.len()
                );
                for pt in &c.points {
                    out += &format!("  {pt}\n");
                }
            }
        }
        "cheb" => {
            if let Ok(c) = serde_json::from_value::<ChebCertificate>(p.clone()) {
                out += &format!("case: {}\n{} points:\n", c.case, c.points.len());
                for pt in &c.points {
                    out += &format!("  {pt}\n");
                }
                for n in &c.notes {
                    out += &format!("note: {n}\n");
                }
            }
        }
        "hasse-scan" => {
            if let Ok(vs) = serde_json::from_value::<Vec<HasseVerdict>>(p.clone()) {
                for v in vs {
                    out += &format!(
                        "p = {:<8} locally solvable: {:<5} selmer bound: {:<4} verdict: {:?}\n",
                        v.p,
                        v.locally_solvable,
                        v.selmer_bound.map_or("-".into(), |b| b.to_string()),
                        v.verdict
                    );
                }
            }
        }
        _ => out += &format!("{}\n", serde_json::to_string_pretty(p).unwrap_or_default()),
    }
    for a in &env.assumptions {
        out += &format!("assumes: {a}\n");
    }
    out
}
