use std::path::{Path, PathBuf};
use std::sync::Arc;

use mdlab::family::{
    averaged_upper_bound, convergence_report, fejer_multiplier, pointwise_residual, ConvergenceRow, FamilyPoint,
    FejerParams,
};
use mdlab::group::spec::GroupSpec;
use mdlab::group::{Ball, Group, GroupKind, GroupLimits};
use mdlab::linalg::{CMatrix, CVector, C64, ONE};
use mdlab::multiplier::io::{write_bracket_csv, MultiplierLiteral};
use mdlab::multiplier::{
    certificate_from_unitary_rep, coset_mismatches, density_certificate, density_quadrature_error, extension_limit,
    extension_run, l2_certificate, lifted_section, m2_lower_bound, regular_coefficient_certificate, sup_on_ball,
    verify_certificate, FactorizationCertificate, Multiplier, NormBracket, TrivialRep, VerifyConfig,
};
use mdlab::schur::{self, schur_norm, SchurProblem};
use rayon::prelude::*;

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::output::{header_lines, Sink};

pub struct Ctx {
    pub cfg: Config,
    pub group_path: Option<PathBuf>,
    pub sink: Sink,
}

impl Ctx {
    fn limits(&self) -> GroupLimits {
        GroupLimits { ball_size_cap: self.cfg.ball_size_cap, length_radius_cap: self.cfg.length_radius_cap }
    }

    fn load_group(&self, path: &Path) -> Result<Group> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read group file {}: {e}", path.display())))?;
        Ok(GroupSpec::from_json(&text)?.build()?)
    }

    fn group(&self) -> Result<Arc<Group>> {
        let path =
            self.group_path.as_deref().ok_or_else(|| CliError::Validation("this command needs --group FILE".into()))?;
        Ok(Arc::new(self.load_group(path)?.with_limits(self.limits())))
    }

    fn group_or(&self, default: Group) -> Result<Arc<Group>> {
        match &self.group_path {
            Some(p) => Ok(Arc::new(self.load_group(p)?.with_limits(self.limits()))),
            None => Ok(Arc::new(default.with_limits(self.limits()))),
        }
    }

    /// Command, parameters, group and every config value, in that order.
    fn header(&self, command: &str, params: &[(&str, String)], group: Option<&Group>) -> Vec<(String, String)> {
        let mut h = vec![("command".to_string(), command.to_string())];
        h.extend(params.iter().map(|(k, v)| (k.to_string(), v.clone())));
        if let Some(g) = group {
            let spec = serde_json::to_string(&GroupSpec::of(g)).expect("group spec serializes");
            h.push(("group".into(), spec));
        }
        h.extend(self.cfg.header());
        h
    }

    fn verify_config(&self) -> VerifyConfig {
        VerifyConfig { exhaustive_cap: self.cfg.exhaustive_cap, samples: self.cfg.samples, seed: self.cfg.seed }
    }
}

fn radius_arg(r: i64) -> Result<usize> {
    usize::try_from(r).map_err(|_| CliError::Validation(format!("radius must be nonnegative, got {r}")))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn ball(ctx: &Ctx, radius: i64) -> Result<()> {
    let radius = radius_arg(radius)?;
    let group = ctx.group()?;
    let ball = group.ball(radius)?;
    let mut buf = header_lines(&ctx.header("ball", &[("R", radius.to_string())], Some(&group))).into_bytes();
    ball.write_csv(&mut buf)?;
    ctx.sink.emit("ball.csv", &buf)
}

fn read_matrix(path: &Path) -> Result<CMatrix> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Validation(format!("cannot read matrix {}: {e}", path.display())))?;
    let m = if bytes.starts_with(b"SCHR1") {
        schur::read_binary(bytes.as_slice())?
    } else {
        schur::read_csv(bytes.as_slice())?
    };
    Ok(m)
}

fn rows_matrix(vs: &[CVector]) -> CMatrix {
    let cols = vs.first().map_or(0, |v| v.len());
    CMatrix::from_fn(vs.len(), cols, |i, j| vs[i][j])
}

pub fn schur(ctx: &Ctx, matrix: &Path) -> Result<()> {
    let a = read_matrix(matrix)?;
    let problem = SchurProblem::new(a).with_tol(ctx.cfg.tol).with_max_iter(ctx.cfg.max_iter);
    let sol = schur_norm(&problem)?;
    let params = [
        ("matrix", matrix.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned())),
        ("shape", format!("{}x{}", problem.a.nrows(), problem.a.ncols())),
    ];
    let mut text = header_lines(&ctx.header("schur", &params, None));
    text.push_str("value,lower,upper,gap,iterations,converged,witness_dim,witness_residual,flags\n");
    let flags = if sol.converged { "certified" } else { "not_converged" };
    text.push_str(&format!(
        "{:.6},{:.12e},{:.12e},{:.3e},{},{},{},{:.3e},{}\n",
        sol.value,
        sol.lower,
        sol.upper,
        sol.gap(),
        sol.iterations,
        sol.converged,
        sol.witness_dim(),
        sol.witness_residual,
        flags
    ));
    ctx.sink.emit("schur.csv", text.as_bytes())?;
    if ctx.sink.has_dir() {
        for (name, vs) in [("witness_x.csv", &sol.xs), ("witness_y.csv", &sol.ys)] {
            let mut buf = Vec::new();
            schur::write_csv(&rows_matrix(vs), &mut buf)?;
            ctx.sink.emit_file(name, &buf)?;
        }
    }
    if !sol.converged {
        return Err(CliError::NonConvergence(format!(
            "Schur SDP stopped after {} iterations with gap {:.3e}",
            sol.iterations,
            sol.gap()
        )));
    }
    Ok(())
}

/// What the literal says about the multiplier, for choosing a certificate.
#[derive(Clone, Copy, Debug)]
enum Form {
    Constant(C64),
    FiniteSupport,
    Fejer { n: usize, r: f64 },
    Other,
}

impl Form {
    fn of(lit: &MultiplierLiteral) -> Form {
        if let Some(c) = lit.constant {
            Form::Constant(c.into())
        } else if let Some(f) = &lit.fejer {
            Form::Fejer { n: f.n, r: f.r }
        } else if lit.support.is_some()
            || lit.radial.as_ref().is_some_and(|r| r.tail.is_none_or(|t| C64::from(t) == C64::new(0.0, 0.0)))
        {
            Form::FiniteSupport
        } else {
            Form::Other
        }
    }
}

struct Bound {
    value: f64,
    provenance: String,
    flags: Vec<String>,
    /// Set when a certificate failed its own verification.
    failure: Option<String>,
}

/// A certificate for `φ` plus flags qualifying its bound.
fn certificate_for(
    ctx: &Ctx,
    phi: &Multiplier,
    form: Form,
    d: usize,
) -> Result<Option<(FactorizationCertificate, Vec<String>)>> {
    let group = phi.group().clone();
    let mut flags = Vec::new();
    let finite = matches!(form, Form::FiniteSupport | Form::Fejer { .. });
    let cert = match (form, group.kind()) {
        (Form::Constant(c), _) => Some(certificate_from_unitary_rep(
            Arc::new(TrivialRep::new(group.clone())),
            CVector::from_element(1, c),
            CVector::from_element(1, ONE),
            d,
        )?),
        _ if group.is_finite() => Some(regular_coefficient_certificate(phi, d)?),
        (_, GroupKind::Zn { n }) if finite && (1..=3).contains(n) => {
            // exact for the periodization; the ℤⁿ norm is within the trapezoid error
            let nodes = ctx.cfg.density_nodes[n - 1];
            let err = density_quadrature_error(phi, nodes)?;
            flags.push(format!("quadrature(Q={nodes},err<={err:.1e})"));
            Some(density_certificate(phi, nodes, d)?)
        }
        _ if finite => Some(l2_certificate(phi, ctx.cfg.verify_radius, d)?),
        _ => None,
    };
    Ok(cert.map(|c| (c, flags)))
}

fn upper_bound(ctx: &Ctx, phi: &Multiplier, form: Form, d: usize) -> Result<Bound> {
    if let (Form::Fejer { n, r }, GroupKind::Free { rank }) = (form, phi.group().kind()) {
        let avg = averaged_upper_bound(&FejerParams::new(n, r)?, *rank, ctx.cfg.family_radius, d)?;
        return Ok(Bound {
            value: avg.upper,
            provenance: format!("family_average(N={n},r={r},Q={})", avg.params.nodes),
            flags: avg.flags,
            failure: None,
        });
    }
    let Some((cert, mut flags)) = certificate_for(ctx, phi, form, d)? else {
        return Ok(Bound {
            value: f64::INFINITY,
            provenance: "none".into(),
            flags: vec!["no_certificate".into()],
            failure: None,
        });
    };
    let ball = phi.group().ball(ctx.cfg.verify_radius)?;
    let report = verify_certificate(&cert, phi, &ball, &ctx.verify_config())?;
    if cert.empirical {
        flags.push("empirical".to_string());
    }
    if !report.exhaustive {
        flags.push(format!("sampled_verification(coverage={:.3e})", report.coverage));
    }
    let mut failure = None;
    if !(report.residual <= ctx.cfg.verify_tol) {
        flags.push(format!("verify_failed(residual={:.3e})", report.residual));
        failure = Some(format!("certificate {} misses the multiplier by {:.3e}", cert.label, report.residual));
    }
    Ok(Bound { value: cert.bound(), provenance: cert.label.clone(), flags, failure })
}

fn lower_bound(ctx: &Ctx, phi: &Multiplier, ball: &Ball, d: usize) -> Result<Bound> {
    if d < 2 {
        return Ok(Bound {
            value: sup_on_ball(phi, ball)?,
            provenance: format!("sup(B_{})", ball.radius()),
            flags: vec![],
            failure: None,
        });
    }
    if ball.len() > ctx.cfg.sdp_size_cap {
        return Err(CliError::Resource(format!(
            "Gram truncation of size {} exceeds sdp_size_cap {}",
            ball.len(),
            ctx.cfg.sdp_size_cap
        )));
    }
    let m = m2_lower_bound(phi, ball.elements(), ctx.cfg.tol)?;
    let mut b = Bound {
        value: m.lower,
        provenance: format!("schur_dual(B_{},n={})", ball.radius(), m.size),
        flags: vec![],
        failure: None,
    };
    if !m.converged {
        b.flags.push("sdp_not_converged".into());
        b.failure = Some(format!("SDP on B_{} did not converge", ball.radius()));
    }
    Ok(b)
}

pub fn bracket(ctx: &Ctx, multiplier: &Path, d: usize, radius: i64) -> Result<()> {
    let radius = radius_arg(radius)?;
    if d == 0 {
        return Err(CliError::Validation("d must be at least 1".into()));
    }
    let group = ctx.group()?;
    let text = std::fs::read_to_string(multiplier)
        .map_err(|e| CliError::Validation(format!("cannot read multiplier {}: {e}", multiplier.display())))?;
    let lit = MultiplierLiteral::from_json(&text)?;
    let phi = lit.build(group.clone())?;
    let ball = group.ball(radius)?;

    let lower = lower_bound(ctx, &phi, &ball, d)?;
    let upper = upper_bound(ctx, &phi, Form::of(&lit), d)?;
    let mut b = NormBracket::new(phi.name(), d, radius)
        .with_lower(lower.value, lower.provenance)
        .with_upper(upper.value, upper.provenance);
    for f in lower.flags.iter().chain(&upper.flags) {
        b.flag(f.clone());
    }
    let unsound = b.check_soundness(ctx.cfg.tol).err();

    let literal = serde_json::to_string(&lit).expect("literal serializes");
    let header = ctx.header(
        "bracket",
        &[("d", d.to_string()), ("R", radius.to_string()), ("multiplier", literal)],
        Some(&group),
    );
    let mut buf = Vec::new();
    write_bracket_csv(&header, &[b], &mut buf)?;
    ctx.sink.emit("bracket.csv", &buf)?;

    if let Some(e) = unsound {
        return Err(e.into());
    }
    if let Some(msg) = lower.failure.or(upper.failure) {
        return Err(CliError::NonConvergence(msg));
    }
    Ok(())
}

pub struct FejerArgs {
    pub r: Vec<f64>,
    pub n: Vec<usize>,
    pub pairs: bool,
    pub d: usize,
    pub window: Option<usize>,
    pub c: f64,
    pub target_ratio: f64,
    pub lower_radius: Option<usize>,
}

fn fejer_row(
    ctx: &Ctx,
    group: &Arc<Group>,
    lower_ball: &Ball,
    window: &Ball,
    idx: usize,
    n: usize,
    r: f64,
    d: usize,
) -> Result<(ConvergenceRow, Option<String>)> {
    let phi = fejer_multiplier(group.clone(), n, r)?;
    let residual = pointwise_residual(&phi, window)?;
    let lower = lower_bound(ctx, &phi, lower_ball, d)?;
    let upper = upper_bound(ctx, &phi, Form::Fejer { n, r }, d)?;
    let mut flags = vec![format!("lower={}", lower.provenance), format!("upper={}", upper.provenance)];
    let certified = lower.flags.is_empty() && upper.flags.is_empty();
    flags.extend(lower.flags.iter().chain(&upper.flags).cloned());
    if certified {
        flags.push("certified".into());
    }
    if lower.value > upper.value + ctx.cfg.tol {
        flags.push("UNSOUND".into());
    }
    let failure = lower.failure.or(upper.failure).or_else(|| {
        (lower.value > upper.value + ctx.cfg.tol)
            .then(|| format!("bracket inverted at N={n}, r={r}: {} > {}", lower.value, upper.value))
    });
    let row = ConvergenceRow {
        n: idx,
        big_n: n,
        r,
        pointwise_residual: residual,
        lower: lower.value,
        upper: upper.value,
        flags,
    };
    Ok((row, failure))
}

pub fn fejer(ctx: &Ctx, a: &FejerArgs) -> Result<()> {
    if a.r.is_empty() || a.n.is_empty() {
        return Err(CliError::Validation("--r and --n need at least one value each".into()));
    }
    if let Some(bad) = a.r.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(CliError::Validation(format!("r must lie in [0, 1), got {bad}")));
    }
    if a.pairs && a.r.len() != a.n.len() {
        return Err(CliError::Validation("--pairs needs lists of equal length".into()));
    }
    if a.d == 0 || !(a.c.is_finite() && a.c > 0.0) || !(a.target_ratio > 0.0) {
        return Err(CliError::Validation("need d ≥ 1, C > 0 and target ratio > 0".into()));
    }
    let group = ctx.group()?;
    let window_radius = a.window.unwrap_or(ctx.cfg.window_radius);
    let window = group.ball(window_radius)?;
    let lower_radius = a.lower_radius.unwrap_or(match group.kind() {
        GroupKind::Zn { n: 1 } => 15,
        _ => 2,
    });
    let lower_ball = group.ball(lower_radius)?;

    let sequences: Vec<(String, Vec<(f64, usize)>)> = if a.pairs {
        vec![("fejer.csv".into(), a.r.iter().copied().zip(a.n.iter().copied()).collect())]
    } else {
        a.r.iter().map(|&r| (format!("fejer_r{r}.csv"), a.n.iter().map(|&n| (r, n)).collect())).collect()
    };

    let mut failures = Vec::new();
    for (name, seq) in &sequences {
        let rows = seq
            .par_iter()
            .enumerate()
            .map(|(i, &(r, n))| fejer_row(ctx, &group, &lower_ball, &window, i + 1, n, r, a.d))
            .collect::<Result<Vec<_>>>()?;
        let (rows, fails): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        failures.extend(fails.into_iter().flatten());
        let report = convergence_report(&group, a.d, window_radius, a.c, a.target_ratio, rows);
        let pairs: Vec<String> = seq.iter().map(|(r, n)| format!("({n};{r})")).collect();
        let header =
            ctx.header("fejer", &[("sequence_N_r", pairs.join(" ")), ("lower_radius", lower_radius.to_string())], None);
        ctx.sink.emit(name, report.to_csv(&header).as_bytes())?;
    }
    match failures.into_iter().next() {
        Some(msg) => Err(CliError::NonConvergence(msg)),
        None => Ok(()),
    }
}

pub struct ExtensionArgs {
    pub k: Vec<usize>,
    pub radius: i64,
    pub c: Option<f64>,
    pub target_ratio: f64,
}

pub fn extension(ctx: &Ctx, a: &ExtensionArgs) -> Result<()> {
    let radius = radius_arg(a.radius)?;
    if a.k.is_empty() || a.k.contains(&0) {
        return Err(CliError::Validation("--k needs positive values".into()));
    }
    let group = ctx.group_or(Group::sl2z_semidirect())?;
    let qs = group.quotient_structure()?;
    let quotient = Arc::new(qs.quotient_group().clone());
    let ball = group.ball(radius)?;

    let runs =
        a.k.par_iter()
            .map(|&k| {
                let run = extension_run(group.clone(), k, &ball)?;
                let psi = fejer_multiplier(quotient.clone(), k, run.r)?;
                let limit = extension_limit(&lifted_section(&psi, group.clone())?)?;
                let (bad, checked) = coset_mismatches(&limit, &ball)?;
                Ok((run, bad, checked))
            })
            .collect::<Result<Vec<_>>>()?;

    let mut coset_ok = true;
    let mut rows = Vec::with_capacity(runs.len());
    for (i, (run, bad, checked)) in runs.into_iter().enumerate() {
        coset_ok &= bad == 0;
        let mut flags = run.flags;
        flags.push(format!("coset_mismatches={bad}/{checked}"));
        rows.push(ConvergenceRow {
            n: i + 1,
            big_n: run.k,
            r: run.r,
            pointwise_residual: run.pointwise_residual,
            lower: run.lower,
            upper: run.upper,
            flags,
        });
    }
    let c = a.c.unwrap_or(f64::INFINITY);
    let report = convergence_report(&group, 1, radius, c, a.target_ratio, rows);
    let header = ctx.header(
        "extension",
        &[
            ("k", join(&a.k)),
            ("R", radius.to_string()),
            ("coset_check", if coset_ok { "pass" } else { "FAIL" }.to_string()),
        ],
        Some(&group),
    );
    ctx.sink.emit("extension.csv", report.to_csv(&header).as_bytes())?;
    if !coset_ok {
        return Err(CliError::NonConvergence("limit object is not constant on cosets".into()));
    }
    Ok(())
}

fn default_grid() -> Vec<C64> {
    let mut zs = Vec::new();
    for r in [0.3, 0.6, 0.9] {
        zs.push(C64::new(r, 0.0));
        zs.push(C64::from_polar(r, std::f64::consts::FRAC_PI_4));
        zs.push(C64::new(0.0, r));
    }
    zs
}

pub fn report(ctx: &Ctx, z: &[String], radius: usize, rank: usize) -> Result<()> {
    let zs = if z.is_empty() {
        default_grid()
    } else {
        z.iter()
            .map(|s| schur::parse_complex(s).ok_or_else(|| CliError::Validation(format!("cannot parse z = `{s}`"))))
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(bad) = zs.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(CliError::Validation(format!("z must lie in the open unit disk, got {bad}")));
    }
    if rank == 0 {
        return Err(CliError::Validation("rank must be positive".into()));
    }
    let group = Arc::new(Group::free(rank).with_limits(ctx.limits()));
    let ball = Arc::new(group.ball(radius)?);
    let contracts = zs
        .par_iter()
        .map(|&z| Ok(FamilyPoint::on_ball(group.clone(), ball.clone(), z)?.contract().clone()))
        .collect::<Result<Vec<_>>>()?;
    let passed = contracts.iter().all(|c| c.passed());
    let doc = serde_json::json!({
        "command": "report",
        "rank": rank,
        "R": radius,
        "config": ctx.cfg,
        "flags": ["empirical_bound"],
        "passed": passed,
        "contracts": contracts,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    ctx.sink.emit("report.json", text.as_bytes())?;
    if !passed {
        return Err(CliError::NonConvergence("family contract failed at some grid point".into()));
    }
    Ok(())
}
