use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{propose_next, GpModel, KernelParams, Objective};
use crate::error::{Error, Result};
use crate::hyperspace::{ConfigPoint, EncodedPoint, SpaceDef};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: usize = 50;
pub const DEFAULT_INIT: usize = 10;
pub const DEFAULT_CANDIDATES: usize = 2000;
pub const DEFAULT_SEED: u64 = 42;

/// Lengthscales and noise variances searched when refitting.
const REFIT_LENGTHSCALES: [f64; 20] = [
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0,
];
const REFIT_NOISE: [f64; 5] = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
const REFIT_EVERY: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct BoConfig {
    pub budget: usize,
    pub init: usize,
    pub candidates: usize,
    pub seed: u64,
    pub lengthscale: f64,
    pub noise_var: f64,
    /// Re-select lengthscale and noise by marginal likelihood every few
    /// evaluations.
    pub refit: bool,
}

impl Default for BoConfig {
    fn default() -> Self {
        BoConfig {
            budget: DEFAULT_BUDGET,
            init: DEFAULT_INIT,
            candidates: DEFAULT_CANDIDATES,
            seed: DEFAULT_SEED,
            lengthscale: 0.5,
            noise_var: 1e-4,
            refit: false,
        }
    }
}

impl BoConfig {
    /// Rejects `init == 0`, `budget < init` and non-positive kernel settings.
    pub fn check(&self) -> Result<()> {
        if self.init == 0 || self.budget < self.init {
            return Err(Error::Invalid(format!(
                "need budget >= init >= 1, got budget {} and init {}",
                self.budget, self.init
            )));
        }
        if !(self.lengthscale > 0.0 && self.noise_var >= 0.0) {
            return Err(Error::Invalid("lengthscale must be positive and noise non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation<F> {
    pub x: EncodedPoint<F>,
    pub point: ConfigPoint<F>,
    pub y: F,
}

/// One line of the history file.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRecord<F> {
    pub iteration: usize,
    pub point: ConfigPoint<F>,
    pub y: F,
    pub incumbent: F,
}

impl<F: Scalar> HistoryRecord<F> {
    /// `iteration<TAB>key=value,...<TAB>y<TAB>incumbent`, newline terminated.
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\n",
            self.iteration,
            self.point.to_kv_inline(),
            self.y,
            self.incumbent
        )
    }
}

pub fn parse_history<F: Scalar>(text: &str) -> Result<Vec<HistoryRecord<F>>> {
    let mut out: Vec<HistoryRecord<F>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [iteration, point, y, incumbent] = fields[..] else {
            return Err(Error::parse(line, format!("expected 4 tab-separated fields, found {}", fields.len())));
        };
        let iteration: usize = iteration
            .parse()
            .map_err(|_| Error::parse(line, format!("bad iteration {iteration:?}")))?;
        if iteration != out.len() + 1 {
            return Err(Error::parse(line, format!("expected iteration {}, found {iteration}", out.len() + 1)));
        }
        let point = ConfigPoint::parse_kv(point).map_err(|e| Error::parse(line, e.to_string()))?;
        let number = |s: &str| -> Result<F> {
            s.parse()
                .ok()
                .filter(|v: &F| v.is_finite())
                .ok_or_else(|| Error::parse(line, format!("bad value {s:?}")))
        };
        let y = number(y)?;
        let incumbent = number(incumbent)?;
        let running = out.last().map_or(y, |r| r.incumbent.max(y));
        if incumbent != running {
            return Err(Error::parse(line, format!("incumbent {incumbent} disagrees with history ({running})")));
        }
        out.push(HistoryRecord {
            iteration,
            point,
            y,
            incumbent,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BoState<F> {
    pub history: Vec<Observation<F>>,
    pub budget: usize,
    pub seed: u64,
    best: Option<usize>,
}

impl<F: Scalar> BoState<F> {
    fn new(budget: usize, seed: u64) -> Self {
        BoState {
            history: Vec::with_capacity(budget),
            budget,
            seed,
            best: None,
        }
    }

    fn push(&mut self, obs: Observation<F>) {
        if self.best.is_none_or(|b| obs.y > self.history[b].y) {
            self.best = Some(self.history.len());
        }
        self.history.push(obs);
    }

    /// Best point and value so far; the earliest wins ties.
    pub fn best(&self) -> Option<(&ConfigPoint<F>, F)> {
        self.best.map(|b| (&self.history[b].point, self.history[b].y))
    }

    pub fn incumbent(&self) -> F {
        self.best().map_or(F::neg_infinity(), |(_, y)| y)
    }

    /// Running maximum after each evaluation.
    pub fn incumbent_trace(&self) -> Vec<F> {
        self.history
            .iter()
            .scan(F::neg_infinity(), |best, o| {
                *best = best.max(o.y);
                Some(*best)
            })
            .collect()
    }

    fn targets(&self) -> Vec<F> {
        self.history.iter().map(|o| o.y).collect()
    }

    fn inputs(&self) -> Vec<Vec<F>> {
        self.history.iter().map(|o| o.x.as_slice().to_vec()).collect()
    }

    fn record(&self) -> HistoryRecord<F> {
        let last = self.history.last().expect("non-empty history");
        HistoryRecord {
            iteration: self.history.len(),
            point: last.point,
            y: last.y,
            incumbent: self.incumbent(),
        }
    }
}

/// Random stream for one evaluation. Each iteration has its own stream, so a
/// resumed run draws the same numbers as an uninterrupted one.
pub fn iteration_rng(seed: u64, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration as u64);
    rng
}

/// Lengthscale and noise maximizing the marginal likelihood over the grid;
/// `None` if no grid point gives a usable fit.
pub fn refit_kernel<F: Scalar>(xs: &[Vec<F>], ys: &[F]) -> Option<KernelParams<F>> {
    let mut best: Option<(F, KernelParams<F>)> = None;
    for &l in &REFIT_LENGTHSCALES {
        for &n in &REFIT_NOISE {
            let params = KernelParams::from_targets(ys, F::lit(l), F::lit(n));
            let Ok(gp) = GpModel::fit(xs, ys, params) else {
                continue;
            };
            let lml = gp.log_marginal_likelihood();
            if lml.is_finite() && best.is_none_or(|(b, _)| lml > b) {
                best = Some((lml, params));
            }
        }
    }
    best.map(|(_, p)| p)
}

struct KernelSchedule<F> {
    refit: bool,
    init: usize,
    default: (F, F),
    cached: Option<(usize, F, F)>,
}

impl<F: Scalar> KernelSchedule<F> {
    fn params(&mut self, xs: &[Vec<F>], ys: &[F]) -> KernelParams<F> {
        let n = ys.len();
        let (l, noise) = if self.refit && n >= self.init {
            // refits happen at n = init, init + 5, ...; recomputed from the
            // prefix so a resumed run agrees with an uninterrupted one
            let at = n - (n - self.init) % REFIT_EVERY;
            match self.cached {
                Some((c, l, s)) if c == at => (l, s),
                _ => {
                    let (l, s) = refit_kernel(&xs[..at], &ys[..at])
                        .map_or(self.default, |p| (p.lengthscale, p.noise_var));
                    self.cached = Some((at, l, s));
                    (l, s)
                }
            }
        } else {
            self.default
        };
        KernelParams::from_targets(ys, l, noise)
    }
}

/// Sequential optimization: `init` random points, then GP-guided proposals
/// until `budget` evaluations exist. `resume` replays earlier records first.
/// `on_record` sees each new evaluation as soon as it is made; an objective
/// failure stops the loop after the records already emitted.
pub fn run_bo_loop<F, O>(
    objective: &O,
    space: &SpaceDef,
    config: &BoConfig,
    resume: &[HistoryRecord<F>],
    mut on_record: impl FnMut(&HistoryRecord<F>) -> Result<()>,
) -> Result<BoState<F>>
where
    F: Scalar,
    O: Objective<F> + ?Sized,
{
    config.check()?;
    if resume.len() > config.budget {
        return Err(Error::Invalid(format!(
            "history has {} evaluations, more than the budget {}",
            resume.len(),
            config.budget
        )));
    }
    let mut state = BoState::new(config.budget, config.seed);
    for r in resume {
        let x = space.encode(&r.point)?;
        state.push(Observation {
            x,
            point: r.point,
            y: r.y,
        });
    }
    let mut schedule = KernelSchedule {
        refit: config.refit,
        init: config.init,
        default: (F::lit(config.lengthscale), F::lit(config.noise_var)),
        cached: None,
    };

    for iteration in state.history.len() + 1..=config.budget {
        let mut rng = iteration_rng(config.seed, iteration);
        let point = if iteration <= config.init {
            space.sample_random(&mut rng)
        } else {
            let (xs, ys) = (state.inputs(), state.targets());
            let params = schedule.params(&xs, &ys);
            let gp = GpModel::fit(&xs, &ys, params)?;
            propose_next(&gp, space, state.incumbent(), config.candidates, &mut rng).0
        };
        let y = objective.evaluate(&point).map_err(|e| Error::Objective {
            iteration,
            message: e.to_string(),
        })?;
        if !y.is_finite() {
            return Err(Error::Objective {
                iteration,
                message: format!("non-finite value {y}"),
            });
        }
        let x = space.encode(&point)?;
        state.push(Observation { x, point, y });
        on_record(&state.record())?;
    }
    Ok(state)
}

/// History file text for a finished state.
pub fn format_history<F: Scalar>(state: &BoState<F>) -> String {
    let mut out = String::new();
    let trace = state.incumbent_trace();
    for (i, (o, inc)) in state.history.iter().zip(trace).enumerate() {
        let _ = write!(
            out,
            "{}",
            HistoryRecord {
                iteration: i + 1,
                point: o.point,
                y: o.y,
                incumbent: inc,
            }
            .to_line()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::RetrievalModel;

    /// One [0,1] coordinate per model.
    fn coordinate(p: &ConfigPoint<f64>) -> f64 {
        let r = &p.retrieval;
        match r.model {
            RetrievalModel::Tfidf => r.tfidf_b,
            RetrievalModel::Bm25 => r.bm25_b,
            RetrievalModel::LmJm => r.lambda_doc,
            RetrievalModel::LmDir => r.mu_dir / 3000.0,
            RetrievalModel::LmTs => r.lambda_ts,
        }
    }

    fn quadratic(p: &ConfigPoint<f64>) -> Result<f64> {
        Ok(-(coordinate(p) - 0.3).powi(2))
    }

    fn run(config: &BoConfig) -> BoState<f64> {
        run_bo_loop(&quadratic, &SpaceDef::standard(), config, &[], |_| Ok(())).unwrap()
    }

    #[test]
    fn budget_equal_to_init_is_random_search() {
        let config = BoConfig {
            budget: 6,
            init: 6,
            ..BoConfig::default()
        };
        let state = run(&config);
        let space = SpaceDef::standard();
        for (i, o) in state.history.iter().enumerate() {
            let p: ConfigPoint<f64> = space.sample_random(&mut iteration_rng(42, i + 1));
            assert_eq!(o.point, p);
        }
        let max = state.history.iter().map(|o| o.y).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(state.incumbent(), max);
    }

    #[test]
    fn quadratic_optimum_found() {
        let mut hits = 0;
        for seed in 0..10 {
            let config = BoConfig {
                budget: 20,
                init: 5,
                candidates: 500,
                seed,
                ..BoConfig::default()
            };
            let state = run(&config);
            let (best, _) = state.best().unwrap();
            if (coordinate(best) - 0.3).abs() <= 0.05 {
                hits += 1;
            }
            let trace = state.incumbent_trace();
            assert!(trace.windows(2).all(|w| w[1] >= w[0]));
        }
        assert!(hits >= 9, "{hits}/10");
    }

    #[test]
    fn deterministic_history() {
        let config = BoConfig {
            budget: 15,
            init: 4,
            candidates: 200,
            refit: true,
            ..BoConfig::default()
        };
        assert_eq!(format_history(&run(&config)), format_history(&run(&config)));
    }

    #[test]
    fn resume_matches_uninterrupted() {
        let space = SpaceDef::standard();
        let config = BoConfig {
            budget: 14,
            init: 4,
            candidates: 200,
            refit: true,
            ..BoConfig::default()
        };
        let full = format_history(&run(&config));
        // stop after 9 evaluations, then resume from the streamed lines
        let mut streamed = String::new();
        run_bo_loop(&quadratic, &space, &BoConfig { budget: 9, ..config.clone() }, &[], |r| {
            streamed.push_str(&r.to_line());
            Ok(())
        })
        .unwrap();
        let records = parse_history::<f64>(&streamed).unwrap();
        let mut rest = streamed.clone();
        run_bo_loop(&quadratic, &space, &config, &records, |r| {
            rest.push_str(&r.to_line());
            Ok(())
        })
        .unwrap();
        assert_eq!(rest, full);
    }

    #[test]
    fn objective_failure_keeps_emitted_records() {
        let calls = std::cell::Cell::new(0);
        let failing = |p: &ConfigPoint<f64>| {
            calls.set(calls.get() + 1);
            if calls.get() == 3 {
                Err(Error::Invalid("boom".into()))
            } else {
                quadratic(p)
            }
        };
        let mut lines = 0;
        let err = run_bo_loop(&failing, &SpaceDef::standard(), &BoConfig::default(), &[], |_| {
            lines += 1;
            Ok(())
        })
        .unwrap_err();
        assert!(matches!(err, Error::Objective { iteration: 3, .. }));
        assert_eq!(lines, 2);
    }

    #[test]
    fn history_parse_checks() {
        let p = ConfigPoint::<f64>::default().to_kv_inline();
        assert!(parse_history::<f64>(&format!("1\t{p}\t0.5\t0.5\n2\t{p}\t0.25\t0.5\n")).is_ok());
        assert!(matches!(
            parse_history::<f64>(&format!("1\t{p}\t0.5\t0.5\n3\t{p}\t0.25\t0.5\n")),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_history::<f64>(&format!("1\t{p}\t0.5\t0.7\n")).is_err());
        assert!(parse_history::<f64>("1\tx\t0.5\n").is_err());
    }

    #[test]
    fn bad_budget_rejected() {
        let config = BoConfig {
            budget: 3,
            init: 5,
            ..BoConfig::default()
        };
        assert!(run_bo_loop(&quadratic, &SpaceDef::standard(), &config, &[], |_| Ok(())).is_err());
    }
}
