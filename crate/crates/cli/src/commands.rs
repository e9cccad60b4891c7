use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use shell_rhs::bounds::{kernel_bound_audit, polar_grid, wavefunction_growth_profile, Profile, Ray};
use shell_rhs::evolution::{semigroup_asymmetry_with, EvolutionReport};
use shell_rhs::hardy::{
    fourier_transform, is_hardy, make_bump, uniform_grid, BumpSpec, HalfPlane, HardyReport, SampledFunction, Side,
    Verdict, DEFAULT_Y_SAMPLES,
};
use shell_rhs::scatter::{continued_ket, find_poles, s_matrix, KRect, PoleSearch, PoleSearchOptions, Sheet, Sign};
use shell_rhs::spectral::TransformPlan;
use shell_rhs::suites::{hardy_suite, position_suite};

use crate::config::RunConfig;
use crate::output::Emitter;
use crate::UsageError;

type Written = Vec<PathBuf>;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SheetArg {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SideArg {
    Positive,
    Negative,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SmatrixArgs {
    #[arg(long, default_value_t = 0.01)]
    e_min: f64,
    /// Defaults to the config's eMax.
    #[arg(long)]
    e_max: Option<f64>,
    /// Defaults to the config's ePoints.
    #[arg(long)]
    points: Option<usize>,
    /// Also scan [0,4]×[−1,0] in k and write poles.json.
    #[arg(long)]
    poles: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PolesArgs {
    #[arg(long, default_value_t = 0.0)]
    re_min: f64,
    #[arg(long, default_value_t = 4.0)]
    re_max: f64,
    #[arg(long, default_value_t = -1.0)]
    im_min: f64,
    #[arg(long, default_value_t = 0.0)]
    im_max: f64,
    /// Initial contour samples per rectangle edge.
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct WavefunctionArgs {
    /// Real part of the energy.
    #[arg(long)]
    energy: f64,
    /// Imaginary part of the energy.
    #[arg(long, default_value_t = 0.0)]
    energy_im: f64,
    #[arg(long, value_enum, default_value_t = SheetArg::First)]
    sheet: SheetArg,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TransformArgs {
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    sign: SignArg,
    /// CSV file with columns abscissa,re,im; a radial input is mapped to
    /// energy, an energy input back to position. Without it the standard
    /// position suite is transformed.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BumpArgs {
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    /// Power of the polynomial factor ((t−t0)/w)^degree.
    #[arg(long, default_value_t = 0)]
    degree: u32,
    /// Modulation frequency ω in e^{iωt}.
    #[arg(long, default_value_t = 0.0)]
    frequency: f64,
    /// Time-grid points across the support plus a margin.
    #[arg(long, default_value_t = 2001)]
    points: usize,
}

impl BumpArgs {
    /// Support defaults to `near..far` from the origin on the chosen side.
    fn sampled(&self, default_side: SideArg, near: f64, far: f64) -> anyhow::Result<(BumpSpec, SampledFunction)> {
        let side = match self.side.unwrap_or(default_side) {
            SideArg::Positive => Side::Positive,
            SideArg::Negative => Side::Negative,
        };
        let (d0, d1) = match side {
            Side::Positive => (near, far),
            Side::Negative => (-far, -near),
        };
        let spec = BumpSpec::new(self.t0.unwrap_or(d0), self.t1.unwrap_or(d1), side)
            .with_modulation(self.degree, self.frequency);
        spec.validate().map_err(|e| usage(e.to_string()))?;
        let margin = 0.5 * spec.width();
        let f = make_bump(spec, &uniform_grid(spec.t0 - margin, spec.t1 + margin, self.points))?;
        Ok((spec, f))
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct HardyArgs {
    #[command(flatten)]
    bump: BumpArgs,
    /// Distances from the real axis to probe.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y_samples: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SemigroupArgs {
    #[command(flatten)]
    bump: BumpArgs,
    /// Evolution times.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,0,1")]
    t_list: Vec<f64>,
    /// Defaults to the sign matching the bump's side.
    #[arg(long, value_enum)]
    sign: Option<SignArg>,
    /// Run the seeded Hardy suite of this many bumps instead of one bump.
    #[arg(long)]
    suite: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y_samples: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundsArgs {
    #[command(subcommand)]
    mode: BoundsMode,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProfileArg {
    Bump,
    Gaussian,
    Zero,
}

#[derive(Debug, Subcommand)]
enum BoundsMode {
    /// |⟨z⁺|r⟩| on a polar grid of lower-half-plane energies
    #[command(allow_negative_numbers = true)]
    Kernel {
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,5,10,20,50,100")]
        moduli: Vec<f64>,
        /// Number of equally spaced angles in [−π, 0].
        #[arg(long, default_value_t = 9)]
        angles: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1.5,3,10")]
        radii: Vec<f64>,
    },
    /// |φ⁺(z(s))| along a ray on the second sheet
    #[command(allow_negative_numbers = true)]
    Ray {
        /// Angle θ of z = s·e^{iθ}; omit for the negative real axis.
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long, value_enum, default_value_t = ProfileArg::Bump)]
        profile: ProfileArg,
        /// Support of the bump profile.
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 3.0)]
        hi: f64,
        /// Width parameter a of r·exp(−r²/a).
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20,30,50,70,100")]
        s_values: Vec<f64>,
    },
}

pub fn smatrix(cfg: &RunConfig, args: SmatrixArgs) -> anyhow::Result<Written> {
    let e_max = args.e_max.unwrap_or(cfg.grids.e_max);
    let n = args.points.unwrap_or(cfg.grids.e_points);
    if !(args.e_min > 0.0 && e_max > args.e_min) || n == 0 {
        return Err(usage(format!(
            "need 0 < e-min < e-max and points > 0 (got {}, {e_max}, {n})",
            args.e_min
        )));
    }
    let rows = linspace(args.e_min, e_max, n)
        .into_iter()
        .map(|e| {
            let s = s_matrix(&cfg.potential, Complex64::new(e, 0.0), Sheet::First)?;
            Ok(vec![e, s.re, s.im, s.norm(), s.arg()])
        })
        .collect::<shell_rhs::Result<Vec<_>>>()?;
    let mut out = Emitter::new(&cfg.output, "smatrix", cfg)?;
    out.table("smatrix.csv", &["E", "re_S", "im_S", "abs_S", "phase"], &rows)?;
    if args.poles {
        let search = find_poles(&cfg.potential, KRect::new(0.0, 4.0, -1.0, 0.0), &pole_options(cfg, 64))?;
        out.json("poles.json", &PoleTable::from(&search))?;
    }
    Ok(out.written().to_vec())
}

fn pole_options(cfg: &RunConfig, samples: usize) -> PoleSearchOptions {
    PoleSearchOptions {
        contour_samples: samples,
        tol: cfg.tolerances.pole,
        ..PoleSearchOptions::default()
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PoleRow {
    k_re: f64,
    k_im: f64,
    e_r: f64,
    gamma: f64,
    residual: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PoleTable {
    region: [f64; 4],
    winding: i64,
    poles: Vec<PoleRow>,
    zeros: Vec<[f64; 2]>,
    virtual_states: Vec<[f64; 2]>,
}

impl From<&PoleSearch> for PoleTable {
    fn from(s: &PoleSearch) -> Self {
        let r = &s.region;
        Self {
            region: [r.re_min, r.re_max, r.im_min, r.im_max],
            winding: s.winding,
            poles: s
                .poles
                .iter()
                .map(|p| PoleRow {
                    k_re: p.k_pole.k.re,
                    k_im: p.k_pole.k.im,
                    e_r: p.e_r,
                    gamma: p.gamma,
                    residual: p.residual,
                })
                .collect(),
            zeros: s.zeros.iter().map(|z| [z.re, z.im]).collect(),
            virtual_states: s.virtual_states.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

pub fn poles(cfg: &RunConfig, args: PolesArgs) -> anyhow::Result<Written> {
    let rect = KRect::new(args.re_min, args.re_max, args.im_min, args.im_max);
    let search = find_poles(&cfg.potential, rect, &pole_options(cfg, args.samples))?;
    let mut out = Emitter::new(&cfg.output, "poles", cfg)?;
    out.json("poles.json", &PoleTable::from(&search))?;
    Ok(out.written().to_vec())
}

pub fn wavefunction(cfg: &RunConfig, args: WavefunctionArgs) -> anyhow::Result<Written> {
    let z = Complex64::new(args.energy, args.energy_im);
    let sheet = match args.sheet {
        SheetArg::First => Sheet::First,
        SheetArg::Second => Sheet::Second,
    };
    let rows = linspace(0.0, cfg.grids.r_max, cfg.grids.r_points)
        .into_iter()
        .map(|r| {
            let v = continued_ket(&cfg.potential, z, sheet, args.sign.into(), r)?;
            Ok(vec![r, v.re, v.im, v.norm()])
        })
        .collect::<shell_rhs::Result<Vec<_>>>()?;
    let mut out = Emitter::new(&cfg.output, "wavefunction", cfg)?;
    out.table("wavefunction.csv", &["r", "re", "im", "abs"], &rows)?;
    Ok(out.written().to_vec())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TransformRow {
    name: String,
    direction: &'static str,
    input_norm: f64,
    output_norm: f64,
    parseval_defect: f64,
    round_trip_error: f64,
    file: String,
}

pub fn transform(cfg: &RunConfig, args: TransformArgs) -> anyhow::Result<Written> {
    let plan = TransformPlan::builder(cfg.potential)
        .sign(args.sign.into())
        .r_cutoff(cfg.grids.r_max)
        .e_cutoff(cfg.grids.e_max)
        .build()?;
    let mut out = Emitter::new(&cfg.output, "transform", cfg)?;
    let mut rows = Vec::new();
    let inputs: Vec<(String, SampledFunction)> = match &args.input {
        Some(path) => {
            let file = std::fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
            vec![("input".to_string(), SampledFunction::read_csv(file)?)]
        }
        None => position_suite()
            .into_iter()
            .map(|f| {
                Ok((
                    f.name.to_string(),
                    plan.position_function(plan.sample_position(|r| f.eval(r)))?,
                ))
            })
            .collect::<shell_rhs::Result<_>>()?,
    };
    for (i, (name, f)) in inputs.into_iter().enumerate() {
        let to_energy = f.domain == shell_rhs::hardy::DomainTag::RadialHalfline;
        let (direction, result, back) = if to_energy {
            let t = plan.to_energy(&f)?;
            let back = plan.to_position(&t.function)?.function;
            ("to-energy", t, back)
        } else {
            let t = plan.to_position(&f)?;
            let back = plan.to_energy(&t.function)?.function;
            ("to-position", t, back)
        };
        let original = if to_energy {
            plan.position_function(plan.sample_position(|r| f.interpolate(r)))?
        } else {
            plan.energy_function(plan.sample_energy(|e| f.interpolate(e)))?
        };
        let diff = back.combine(Complex64::new(1.0, 0.0), &original, Complex64::new(-1.0, 0.0))?;
        let round_trip = weighted(&plan, &diff, to_energy) / weighted(&plan, &original, to_energy);
        let file = format!("transform_{i}.csv");
        out.with_csv(&file, |w, h| result.function.write_csv(w, h))?;
        rows.push(TransformRow {
            name,
            direction,
            input_norm: result.input_norm,
            output_norm: result.output_norm,
            parseval_defect: result.parseval_defect,
            round_trip_error: round_trip,
            file,
        });
    }
    out.json("transform.json", &rows)?;
    Ok(out.written().to_vec())
}

fn weighted(plan: &TransformPlan, f: &SampledFunction, position: bool) -> f64 {
    if position {
        plan.position_norm(&f.values)
    } else {
        plan.energy_norm(&f.values)
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct HardyOutput {
    bump: BumpSpec,
    verdicts: Verdicts,
    upper: HardyReport,
    lower: HardyReport,
}

#[derive(Serialize)]
struct Verdicts {
    upper: Verdict,
    lower: Verdict,
}

pub fn hardy(cfg: &RunConfig, args: HardyArgs) -> anyhow::Result<Written> {
    let (spec, f) = args.bump.sampled(SideArg::Negative, 1.0, 2.0)?;
    let ft = fourier_transform(&f)?;
    let y = args.y_samples.unwrap_or_else(|| DEFAULT_Y_SAMPLES.to_vec());
    let tol = cfg.tolerances.hardy;
    let upper = is_hardy(&ft, HalfPlane::Upper, &y, tol);
    let lower = is_hardy(&ft, HalfPlane::Lower, &y, tol);
    let mut out = Emitter::new(&cfg.output, "hardy", cfg)?;
    out.with_csv("fourier.csv", |w, h| ft.write_csv(w, h))?;
    out.json(
        "hardy.json",
        &HardyOutput {
            bump: spec,
            verdicts: Verdicts {
                upper: upper.verdict,
                lower: lower.verdict,
            },
            upper,
            lower,
        },
    )?;
    Ok(out.written().to_vec())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SuiteOutput {
    seed: u64,
    t_values: Vec<f64>,
    /// Fraction of inputs whose verdicts are PASS for every t ≥ 0 and FAIL
    /// for every t < 0.
    asymmetric_fraction: f64,
    cases: Vec<SuiteCase>,
}

#[derive(Serialize)]
struct SuiteCase {
    bump: BumpSpec,
    report: EvolutionReport,
}

fn matching(side: Side) -> Sign {
    match side {
        Side::Positive => Sign::Minus,
        Side::Negative => Sign::Plus,
    }
}

pub fn semigroup(cfg: &RunConfig, args: SemigroupArgs) -> anyhow::Result<Written> {
    let y = args.y_samples.clone().unwrap_or_else(|| DEFAULT_Y_SAMPLES.to_vec());
    let tol = cfg.tolerances.hardy;
    let mut out = Emitter::new(&cfg.output, "semigroup", cfg)?;
    if let Some(n) = args.suite {
        let mut cases = Vec::new();
        for spec in hardy_suite(cfg.seed, n) {
            let margin = 0.5 * spec.width();
            let f = make_bump(
                spec,
                &uniform_grid(spec.t0 - margin, spec.t1 + margin, args.bump.points),
            )?;
            let sign = args.sign.map(Sign::from).unwrap_or(matching(spec.side));
            let report = semigroup_asymmetry_with(&fourier_transform(&f)?, sign, &args.t_list, &y, tol)?;
            cases.push(SuiteCase { bump: spec, report });
        }
        let good = cases
            .iter()
            .filter(|c| {
                c.report
                    .t_values
                    .iter()
                    .zip(&c.report.verdicts)
                    .all(|(t, v)| *v == if *t >= 0.0 { Verdict::Pass } else { Verdict::Fail })
            })
            .count();
        out.json(
            "semigroup_suite.json",
            &SuiteOutput {
                seed: cfg.seed,
                t_values: args.t_list.clone(),
                asymmetric_fraction: if cases.is_empty() {
                    0.0
                } else {
                    good as f64 / cases.len() as f64
                },
                cases,
            },
        )?;
    } else {
        let (spec, f) = args.bump.sampled(SideArg::Positive, 0.2, 0.8)?;
        let sign = args.sign.map(Sign::from).unwrap_or(matching(spec.side));
        let report = semigroup_asymmetry_with(&fourier_transform(&f)?, sign, &args.t_list, &y, tol)?;
        out.json("semigroup.json", &SuiteCase { bump: spec, report })?;
    }
    Ok(out.written().to_vec())
}

pub fn bounds(cfg: &RunConfig, args: BoundsArgs) -> anyhow::Result<Written> {
    let mut out = Emitter::new(&cfg.output, "bounds", cfg)?;
    match args.mode {
        BoundsMode::Kernel { moduli, angles, radii } => {
            if angles < 2 {
                return Err(usage("--angles needs at least 2"));
            }
            let thetas: Vec<f64> = (0..angles)
                .map(|i| {
                    if i + 1 == angles {
                        -std::f64::consts::PI
                    } else {
                        -std::f64::consts::PI * i as f64 / (angles - 1) as f64
                    }
                })
                .collect();
            let rep = kernel_bound_audit(&cfg.potential, &polar_grid(&moduli, &thetas), &radii)?;
            out.with_csv("bounds.csv", |w, h| rep.write_csv(w, h))?;
            out.json("bounds.json", &rep)?;
        }
        BoundsMode::Ray {
            angle,
            profile,
            lo,
            hi,
            a,
            s_values,
        } => {
            let ray = angle.map_or(Ray::NegativeAxis, |angle| Ray::Direction { angle });
            let phi = match profile {
                ProfileArg::Bump => Profile::Bump { lo, hi },
                ProfileArg::Gaussian => Profile::Gaussian { a },
                ProfileArg::Zero => Profile::Zero,
            };
            let prof = wavefunction_growth_profile(&cfg.potential, &phi, ray, &s_values).map_err(|e| match e {
                shell_rhs::Error::InvalidInput(m) => usage(m),
                other => other.into(),
            })?;
            out.with_csv("growth.csv", |w, h| prof.write_csv(w, h))?;
            out.json("growth.json", &prof)?;
        }
    }
    Ok(out.written().to_vec())
}
