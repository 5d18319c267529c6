use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::funcspace::{RandomFunctionParams, RankFrequencyFunction};
use crate::operators::OperatorKind;
use crate::report::{Counterexample, Verdict, VerificationReport};
use crate::solver::SolveConfig;
use crate::thresholds::ThresholdFamily;

use super::{describe, reversal_instance, solve, sub_seed, theta_from_psi, STRICT_GAP};

/// Operator/threshold pairing whose bundle is tested for the impact axioms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "setting", rename_all = "snake_case")]
pub enum ImpactSetting {
    /// `T` against `A = θx^p` on random decreasing functions.
    Standard { operator: OperatorKind, p: f64 },
    /// Identity against `A = θ(2S − x)` on lines `c − εx` with `εS < c/2`.
    Reversal,
}

impl ImpactSetting {
    pub fn operator(&self) -> OperatorKind {
        match self {
            ImpactSetting::Standard { operator, .. } => *operator,
            ImpactSetting::Reversal => OperatorKind::Identity,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ImpactSetting::Standard { operator, p } => format!("{}/p={p}", operator.name()),
            ImpactSetting::Reversal => "reversal".to_string(),
        }
    }

    /// A function of the setting and its threshold family.
    pub fn draw(&self, seed: u64) -> (RankFrequencyFunction<f64>, ThresholdFamily<f64>) {
        match *self {
            ImpactSetting::Standard { p, .. } => (
                RankFrequencyFunction::random_function(seed, &RandomFunctionParams::default()),
                ThresholdFamily::Power { p, shift: 0.0 },
            ),
            ImpactSetting::Reversal => {
                let inst = reversal_instance(seed);
                (inst.f, inst.family)
            }
        }
    }
}

/// One report per axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub setting: ImpactSetting,
    pub ax1: VerificationReport,
    pub ax2: VerificationReport,
    pub ax3: VerificationReport,
    pub ax4: VerificationReport,
}

impl ImpactReport {
    pub fn reports(&self) -> [&VerificationReport; 4] {
        [&self.ax1, &self.ax2, &self.ax3, &self.ax4]
    }

    pub fn into_reports(self) -> [VerificationReport; 4] {
        [self.ax1, self.ax2, self.ax3, self.ax4]
    }

    pub fn passed(&self) -> bool {
        self.reports().iter().all(|r| r.verdict == Verdict::Pass)
    }

    /// All four axioms folded into a single report.
    pub fn combined(&self) -> VerificationReport {
        let mut all = VerificationReport::new(format!("impact_axioms[{}]", self.setting.label()));
        for r in self.reports() {
            all.absorb(r.clone());
        }
        all
    }
}

const STREAM_AX1: u64 = 101;
const STREAM_AX2: u64 = 102;
const STREAM_AX3: u64 = 103;
const STREAM_AX4: u64 = 104;

struct Ctx<'a> {
    kind: OperatorKind,
    cfg: &'a SolveConfig<f64>,
}

impl Ctx<'_> {
    fn solve(
        &self,
        f: &RankFrequencyFunction<f64>,
        family: &ThresholdFamily<f64>,
        theta: f64,
    ) -> Option<f64> {
        solve(f, self.kind, family, theta, None, self.cfg)
    }

    fn psi(
        &self,
        f: &RankFrequencyFunction<f64>,
        family: &ThresholdFamily<f64>,
        x: f64,
    ) -> Option<f64> {
        theta_from_psi(f, self.kind, family, x)
    }
}

/// `g` equal to `f` on `[a, cut]` and linear from `(cut, f(cut))` down to
/// `(S, w·f(cut))` afterwards.
fn diverging_tail(
    f: &RankFrequencyFunction<f64>,
    cut: f64,
    w: f64,
) -> Option<RankFrequencyFunction<f64>> {
    let (_, s) = f.domain();
    let at_cut = f.value(cut);
    let mut pts: Vec<(f64, f64)> = f.breakpoints().filter(|&(x, _)| x < cut).collect();
    pts.push((cut, at_cut));
    pts.push((s, w * at_cut));
    RankFrequencyFunction::new(pts).ok()
}

/// AX.1 to AX.4 over `trials` seeded draws of `setting`.
///
/// * AX.1: `m_θ(0)` is the support start, and `m_θ(f)` lies strictly
///   above it for nonzero `f` at `θ = ψ_f(x)`.
/// * AX.2: `f ≤ g` (checked) implies `m_θ(f) ≤ m_θ(g)`.
/// * AX.3: `g = f + ramp` on `[0, a′]` with `a′ > a` so `f <_a g`; for `θ`
///   drawn from `ψ_f((0, a]) ∪ ψ_g((0, a])`, `m_θ(f) < m_θ(g)` strictly.
/// * AX.4: `g = f` on `[0, a]` with a different tail; for `θ` from
///   `ψ_f((0, a])`, `m_θ(f) = m_θ(g)` within `abs_tol_x`.
///
/// Draws where either solve fails are vacuous.
pub fn check_impact_axioms(
    setting: ImpactSetting,
    master_seed: u64,
    trials: usize,
    cfg: &SolveConfig<f64>,
) -> ImpactReport {
    let label = setting.label();
    let ctx = Ctx {
        kind: setting.operator(),
        cfg,
    };
    let mut ax1 = VerificationReport::new(format!("ax1[{label}]"));
    let mut ax2 = VerificationReport::new(format!("ax2[{label}]"));
    let mut ax3 = VerificationReport::new(format!("ax3[{label}]"));
    let mut ax4 = VerificationReport::new(format!("ax4[{label}]"));
    let weak_slack = 2.0 * cfg.abs_tol_x;

    for t in 0..trials as u64 {
        // AX.1
        let seed = sub_seed(master_seed, STREAM_AX1, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, family) = setting.draw(rng.gen());
        let (a, s) = f.domain();
        let zero = RankFrequencyFunction::zero(a, s).expect("valid domain");
        let theta = 10f64.powf(rng.gen_range(-1.0..1.0));
        match ctx.solve(&zero, &family, theta) {
            Some(m) => ax1.check(m == a, || {
                Counterexample::new(describe(&zero, ctx.kind, &family), m, a)
                    .with_seed(seed)
                    .with_theta(theta)
                    .with_note("null function must map to the support start")
            }),
            None => ax1.record_vacuous(),
        }
        let x = a + rng.gen_range(0.05..0.95) * (s - a);
        match ctx
            .psi(&f, &family, x)
            .and_then(|th| ctx.solve(&f, &family, th).map(|m| (th, m)))
        {
            Some((theta, m)) => ax1.check(m - a > STRICT_GAP, || {
                Counterexample::new(describe(&f, ctx.kind, &family), m, a)
                    .with_seed(seed)
                    .with_theta(theta)
                    .with_slack(STRICT_GAP)
                    .with_note("nonzero function must map above the support start")
            }),
            None => ax1.record_vacuous(),
        }

        // AX.2
        let seed = sub_seed(master_seed, STREAM_AX2, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, family) = setting.draw(rng.gen());
        let (a, s) = f.domain();
        let g = match setting {
            ImpactSetting::Standard { .. } => {
                let bump = RankFrequencyFunction::random_on_domain(
                    rng.gen(),
                    a,
                    s,
                    &RandomFunctionParams::default(),
                );
                bump.scale(rng.gen_range(0.01..1.0)).and_then(|b| f.add(&b))
            }
            ImpactSetting::Reversal => f.scale(1.0 + rng.gen_range(0.01..0.5)),
        };
        let x = a + rng.gen_range(0.05..0.95) * (s - a);
        let from_g = rng.gen_bool(0.5);
        let trial = g.ok().filter(|g| f.leq(g).unwrap_or(false)).and_then(|g| {
            let theta = ctx.psi(if from_g { &g } else { &f }, &family, x)?;
            Some((
                theta,
                ctx.solve(&f, &family, theta)?,
                ctx.solve(&g, &family, theta)?,
                g,
            ))
        });
        match trial {
            Some((theta, mf, mg, g)) => ax2.check(mf <= mg + weak_slack, || {
                Counterexample::new(
                    format!("{} g#{}", describe(&f, ctx.kind, &family), g.digest()),
                    mf,
                    mg,
                )
                .with_seed(seed)
                .with_theta(theta)
                .with_slack(weak_slack)
                .with_note("f <= g but m(f) > m(g)")
            }),
            None => ax2.record_vacuous(),
        }

        // AX.3
        let seed = sub_seed(master_seed, STREAM_AX3, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, family) = setting.draw(rng.gen());
        let (a, s) = f.domain();
        let cut = a + rng.gen_range(0.2..0.8) * (s - a);
        let ramp_end = cut + rng.gen_range(0.1..1.0) * (s - cut);
        let height = rng.gen_range(0.1..1.0) * f.ys()[0];
        let x = a + rng.gen_range(0.05..1.0) * (cut - a);
        let from_g = rng.gen_bool(0.5);
        let g = RankFrequencyFunction::ramp(a, ramp_end, s, height).and_then(|r| f.add(&r));
        let trial = g
            .ok()
            .filter(|g| f.lt_on_prefix(g, cut).unwrap_or(false))
            .and_then(|g| {
                let theta = ctx.psi(if from_g { &g } else { &f }, &family, x)?;
                Some((
                    theta,
                    ctx.solve(&f, &family, theta)?,
                    ctx.solve(&g, &family, theta)?,
                    g,
                ))
            });
        match trial {
            Some((theta, mf, mg, g)) => ax3.check(mg - mf > STRICT_GAP, || {
                Counterexample::new(
                    format!("{} g#{}", describe(&f, ctx.kind, &family), g.digest()),
                    mf,
                    mg,
                )
                .with_seed(seed)
                .with_theta(theta)
                .with_slack(STRICT_GAP)
                .with_note(format!(
                    "f < g on [{a}, {cut}] but m(g) - m(f) <= {STRICT_GAP:e}"
                ))
            }),
            None => ax3.record_vacuous(),
        }

        // AX.4
        let seed = sub_seed(master_seed, STREAM_AX4, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, family) = setting.draw(rng.gen());
        let (a, s) = f.domain();
        let cut = a + rng.gen_range(0.2..0.8) * (s - a);
        let w = rng.gen_range(0.0..1.0);
        let x = a + rng.gen_range(0.05..1.0) * (cut - a);
        let trial = diverging_tail(&f, cut, w)
            .filter(|g| f.eq_on_prefix(g, cut).unwrap_or(false))
            .and_then(|g| {
                let theta = ctx.psi(&f, &family, x)?;
                Some((
                    theta,
                    ctx.solve(&f, &family, theta)?,
                    ctx.solve(&g, &family, theta)?,
                    g,
                ))
            });
        match trial {
            Some((theta, mf, mg, g)) => ax4.check((mf - mg).abs() <= cfg.abs_tol_x, || {
                Counterexample::new(
                    format!("{} g#{}", describe(&f, ctx.kind, &family), g.digest()),
                    mf,
                    mg,
                )
                .with_seed(seed)
                .with_theta(theta)
                .with_slack(cfg.abs_tol_x)
                .with_note(format!("f = g on [{a}, {cut}] but solutions differ"))
            }),
            None => ax4.record_vacuous(),
        }
    }
    ImpactReport {
        setting,
        ax1,
        ax2,
        ax3,
        ax4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_config;

    #[test]
    fn hirsch_and_g_settings_pass() {
        for operator in [OperatorKind::Identity, OperatorKind::Averaging] {
            let r = check_impact_axioms(
                ImpactSetting::Standard { operator, p: 1.0 },
                11,
                25,
                &verify_config(),
            );
            for ax in r.reports() {
                assert_eq!(
                    ax.verdict,
                    Verdict::Pass,
                    "{}: {:?}",
                    ax.property,
                    ax.failures.first()
                );
            }
        }
    }

    #[test]
    fn reversal_setting_breaks_monotonicity_axioms() {
        let r = check_impact_axioms(ImpactSetting::Reversal, 11, 25, &verify_config());
        assert!(r.ax2.verdict == Verdict::Fail || r.ax3.verdict == Verdict::Fail);
        assert!(!r.passed());
    }

    #[test]
    fn diverging_tail_keeps_the_prefix() {
        let f = RankFrequencyFunction::new(vec![(0.0, 9.0), (2.0, 5.0), (6.0, 4.0), (8.0, 1.0)])
            .unwrap();
        let g = diverging_tail(&f, 3.0, 0.0).unwrap();
        assert!(f.eq_on_prefix(&g, 3.0).unwrap());
        assert_eq!(g.eval(8.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let r = check_impact_axioms(
            ImpactSetting::Standard {
                operator: OperatorKind::Identity,
                p: 1.0,
            },
            1,
            0,
            &verify_config(),
        );
        assert!(r.reports().iter().all(|x| x.verdict == Verdict::Vacuous));
    }
}
