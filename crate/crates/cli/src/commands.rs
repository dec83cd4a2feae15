use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use simkit::linalg::{self, c, max_abs_diff, real, CMatrix};
use simkit::qrep::states_equivalent;
use simkit::separability::{check_ensemble, ensemble_for_alpha, partial_transpose_matrix, ppt_check};
use simkit::simulability::{
    classify, epsilon_resources, lambda_minus, lambda_minus_rank_two, s_min, staircase, ResourceFamily, SimulatingSpin,
};
use simkit::sphere::make_sphere_grid;
use simkit::spin::rotation_matrix;
use simkit::states::{isotropic, werner};
use simkit::tables::{self, AlphaResourceRow, EpsilonResourceRow, WitnessRow, SCHEMA_VERSION};
use simkit::{DensityMatrix, Error, SpinValue, Subsystem};

use crate::output::{emit, json_text};
use crate::{AlphaRange, Cli, Command, Common, Format, RankTwoParams, ResourceKind, WitnessFamily};

pub enum Status {
    Ok,
    VerificationFailed,
}

pub enum CliError {
    Usage(String),
    Other(anyhow::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidRange { .. }
            | Error::InvalidParameter { .. }
            | Error::AlphaOutOfRange(_)
            | Error::PositivityViolation { .. } => CliError::Usage(e.to_string()),
            other => CliError::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn write(common: &Common, text: &str) -> Result<()> {
    Ok(emit(common.out.as_deref(), text)?)
}

fn check_common(common: &Common) -> Result<()> {
    if !(common.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    if common.grid_degree == Some(0) {
        return Err(usage("--grid-degree must be positive"));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Status> {
    let common = &cli.common;
    check_common(common)?;
    match &cli.command {
        Command::Staircase { range } => cmd_staircase(common, range),
        Command::Classify { alpha, range } => cmd_classify(common, alpha, range),
        Command::Certify { alpha } => cmd_certify(common, *alpha),
        Command::Witness { family, spin_twice, params } => cmd_witness(common, *family, spin_twice, params),
        Command::Resources { range, family, epsilon, params } => cmd_resources(common, range, family, epsilon, params),
        Command::Selftest { trials } => cmd_selftest(common, *trials),
    }
}

fn cmd_staircase(common: &Common, range: &AlphaRange) -> Result<Status> {
    let (lo, hi, step) = range.resolve(-0.95, -0.85, 1e-3);
    let rows = staircase(lo, hi, step)?;
    let text = match common.format {
        Format::Csv => tables::staircase_csv(&rows)?,
        Format::Json => json_text(&tables::staircase_json(&rows)?),
    };
    write(common, &text)?;
    Ok(Status::Ok)
}

/// Uniform grid `lo, lo + step, ...` up to `hi`, validated.
fn alpha_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(usage("alpha range must be finite"));
    }
    if lo > hi {
        return Err(usage(format!("--alpha-lo {lo} exceeds --alpha-hi {hi}")));
    }
    if !(step > 0.0) {
        return Err(usage("--step must be positive"));
    }
    if lo < -1.0 || hi > 1.0 / 3.0 + 1e-12 {
        return Err(usage(format!("alpha range [{lo}, {hi}] leaves [-1, 1/3]")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn cmd_classify(common: &Common, alphas: &[f64], range: &AlphaRange) -> Result<Status> {
    let alphas = if alphas.is_empty() {
        let (lo, hi, step) = range.resolve(-1.0, 1.0 / 3.0, 0.05);
        alpha_grid(lo, hi, step)?
    } else {
        alphas.to_vec()
    };
    let reports = alphas.iter().map(|&a| classify(a)).collect::<simkit::Result<Vec<_>>>()?;
    let text = match common.format {
        Format::Csv => tables::classification_csv(&reports),
        Format::Json => json_text(&tables::classification_json(&reports)),
    };
    write(common, &text)?;
    Ok(Status::Ok)
}

const CERTIFY_HEADER: &str =
    "alpha,spin_twice,grid_degree,entries,reconstruction_residual,factorization_residual,passed";

fn cmd_certify(common: &Common, alpha: f64) -> Result<Status> {
    let report = classify(alpha)?;
    let s = match report.s_min {
        SimulatingSpin::Finite(s) => s,
        SimulatingSpin::Infinite => {
            let reason = "the singlet (alpha = -1) is the only exceptional Werner state: \
                          no finite spin admits a separable state with the same Q function";
            let text = match common.format {
                Format::Csv => format!("alpha,refused,reason\n{alpha:.12},true,exceptional_point\n"),
                Format::Json => json_text(&json!({
                    "schema": SCHEMA_VERSION,
                    "kind": "refusal",
                    "alpha": alpha,
                    "region": report.region,
                    "reason": reason,
                })),
            };
            write(common, &text)?;
            return Ok(Status::VerificationFailed);
        }
    };
    let degree = common.grid_degree.unwrap_or(2 * s.twice() as usize);
    let grid = make_sphere_grid(degree);
    let target = isotropic(s, alpha)?;
    let ensemble = match ensemble_for_alpha(s, alpha, &grid) {
        Ok(e) => e,
        Err(Error::EnsembleMismatch { residual, degree }) => {
            eprintln!("error: grid degree {degree} reproduces the target only to {residual:.3e}");
            return Ok(Status::VerificationFailed);
        }
        Err(e) => return Err(e.into()),
    };
    let check = check_ensemble(&ensemble, &target, common.tol);
    let text = match common.format {
        Format::Csv => format!(
            "{CERTIFY_HEADER}\n{alpha:.12},{},{degree},{},{:e},{:e},{}\n",
            s.twice(),
            ensemble.len(),
            check.reconstruction_residual,
            check.factorization_residual,
            check.passed
        ),
        Format::Json => json_text(&json!({
            "schema": SCHEMA_VERSION,
            "kind": "lhv_certificate",
            "alpha": alpha,
            "region": report.region,
            "spin_twice": s.twice(),
            "grid_degree": degree,
            "target": { "family": "isotropic", "spin_twice": s.twice(), "alpha": alpha },
            "ensemble": ensemble.to_json_value(),
            "verification": check,
        })),
    };
    write(common, &text)?;
    Ok(if check.passed { Status::Ok } else { Status::VerificationFailed })
}

fn cmd_witness(common: &Common, family: WitnessFamily, spins: &[u32], params: &RankTwoParams) -> Result<Status> {
    if spins.is_empty() || spins.contains(&0) {
        return Err(usage("--spin-twice needs positive values"));
    }
    let mut rows = Vec::with_capacity(spins.len());
    for &t in spins {
        let s = SpinValue::from_twice(t);
        let row = match family {
            WitnessFamily::Pure => {
                let theta = params.theta.unwrap_or(FRAC_PI_2);
                WitnessRow {
                    family: "pure",
                    s_twice: t,
                    theta,
                    theta_p: None,
                    mu: None,
                    lambda_minus: lambda_minus(s, theta)?,
                }
            }
            WitnessFamily::RankTwo => {
                let theta = params.theta.unwrap_or(FRAC_PI_3);
                let theta_p = params.theta_p.unwrap_or(FRAC_PI_6);
                WitnessRow {
                    family: "rank_two",
                    s_twice: t,
                    theta,
                    theta_p: Some(theta_p),
                    mu: Some(params.mu),
                    lambda_minus: lambda_minus_rank_two(s, params.mu, theta, theta_p)?,
                }
            }
        };
        rows.push(row);
    }
    let text = match common.format {
        Format::Csv => tables::witness_csv(&rows),
        Format::Json => json_text(&tables::witness_json(&rows)),
    };
    write(common, &text)?;
    Ok(Status::Ok)
}

fn resource_family(kind: ResourceKind, params: &RankTwoParams) -> ResourceFamily {
    match kind {
        ResourceKind::Bell => ResourceFamily::Bell,
        ResourceKind::Pure => ResourceFamily::Pure { theta: params.theta.unwrap_or(FRAC_PI_2) },
        ResourceKind::RankTwo => ResourceFamily::RankTwo {
            mu: params.mu,
            theta: params.theta.unwrap_or(FRAC_PI_3),
            theta_p: params.theta_p.unwrap_or(FRAC_PI_6),
        },
    }
}

fn cmd_resources(
    common: &Common,
    range: &AlphaRange,
    kinds: &[ResourceKind],
    epsilons: &[f64],
    params: &RankTwoParams,
) -> Result<Status> {
    let (lo, hi, step) = range.resolve(-0.9, -0.4, 0.05);
    let alpha_rows =
        alpha_grid(lo, hi, step)?.into_iter().map(AlphaResourceRow::new).collect::<simkit::Result<Vec<_>>>()?;
    if !(0.0..=1.0).contains(&params.mu) {
        return Err(usage(format!("--mu {} outside [0, 1]", params.mu)));
    }
    let mut eps_rows = Vec::new();
    for &kind in kinds {
        let family = resource_family(kind, params);
        for &epsilon in epsilons {
            let (estimate, note) = match epsilon_resources(family, epsilon) {
                Ok(est) if est.n_h_epsilon < 1.0 => (Some(est), "nonzero_entanglement"),
                Ok(est) => (Some(est), ""),
                Err(Error::SeparableLimit) => (None, "separable_limit"),
                Err(e) => return Err(e.into()),
            };
            eps_rows.push(EpsilonResourceRow { family, estimate, epsilon, note: note.to_string() });
        }
    }
    let text = match common.format {
        Format::Csv => tables::resources_csv(&alpha_rows, &eps_rows),
        Format::Json => json_text(&tables::resources_json(&alpha_rows, &eps_rows)),
    };
    write(common, &text)?;
    Ok(Status::Ok)
}

const SELFTEST_HEADER: &str = "check,trials,max_residual,tol,passed";

fn random_density(rng: &mut impl Rng, d_a: usize, d_b: usize) -> Result<DensityMatrix> {
    let n = d_a * d_b;
    let g = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    Ok(DensityMatrix::new(d_a, d_b, m * real(1.0 / tr))?)
}

fn random_qubit_unitary(rng: &mut impl Rng) -> CMatrix {
    rotation_matrix(SpinValue::HALF, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
}

fn cmd_selftest(common: &Common, trials: usize) -> Result<Status> {
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut worst = [0.0f64; 5];
    for _ in 0..trials {
        let rho = random_density(&mut rng, 2, 3)?;
        let pt = partial_transpose_matrix(rho.matrix(), 2, 3, Subsystem::B);
        worst[0] = worst[0].max(max_abs_diff(&partial_transpose_matrix(&pt, 2, 3, Subsystem::B), rho.matrix()));

        let back = DensityMatrix::from_json(&rho.to_json()?)?;
        worst[1] = worst[1].max(max_abs_diff(back.matrix(), rho.matrix()));

        let alpha = rng.gen_range(-1.0..1.0 / 3.0);
        let w = werner(alpha)?;
        let moved = w.local_transform(&random_qubit_unitary(&mut rng), &random_qubit_unitary(&mut rng));
        let d = ppt_check(&w, common.tol).min_eigenvalue - ppt_check(&moved, common.tol).min_eigenvalue;
        worst[2] = worst[2].max(d.abs());

        let alpha = rng.gen_range(-0.8..1.0 / 3.0);
        let s = s_min(alpha)?.finite().expect("alpha > -1");
        let degree = common.grid_degree.unwrap_or(2 * s.twice() as usize);
        let target = isotropic(s, alpha)?;
        let residual = match ensemble_for_alpha(s, alpha, &make_sphere_grid(degree)) {
            Ok(ens) => {
                let v = check_ensemble(&ens, &target, common.tol);
                v.reconstruction_residual.max(v.factorization_residual)
            }
            Err(Error::EnsembleMismatch { residual, .. }) => residual,
            Err(e) => return Err(e.into()),
        };
        worst[3] = worst[3].max(residual);

        let r = states_equivalent(&target, &werner(alpha)?, common.tol);
        worst[4] = worst[4].max(r.max_coeff_deviation.max(r.excess_rank_leakage));
    }
    let names = [
        "partial_transpose_involution",
        "state_json_round_trip",
        "local_unitary_ppt_invariance",
        "ensemble_reconstruction",
        "isotropic_werner_equivalence",
    ];
    let passed: Vec<bool> = worst.iter().map(|&r| r <= common.tol).collect();
    let text = match common.format {
        Format::Csv => {
            let mut out = format!("{SELFTEST_HEADER}\n");
            for ((name, r), ok) in names.iter().zip(worst).zip(&passed) {
                out.push_str(&format!("{name},{trials},{r:e},{:e},{ok}\n", common.tol));
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = names
                .iter()
                .zip(worst)
                .zip(&passed)
                .map(|((name, r), ok)| json!({ "check": name, "trials": trials, "max_residual": r, "tol": common.tol, "passed": ok }))
                .collect();
            json_text(&json!({ "schema": SCHEMA_VERSION, "seed": common.seed, "rows": rows }))
        }
    };
    write(common, &text)?;
    Ok(if passed.iter().all(|&p| p) { Status::Ok } else { Status::VerificationFailed })
}
