//! Acceptance report: one PASS/FAIL line per check, non-zero exit if any
//! check fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use hybrid_lfc::diesel::{diesel_plant_step, DieselPlantParams, DieselPlantState};
use hybrid_lfc::kernel::{LagBlock, Scheme};
use hybrid_lfc::output::{read_timeseries, write_timeseries};
use hybrid_lfc::pso::{ise, pso_optimize, PsoSettings};
use hybrid_lfc::scenario::{LoadSegment, Scenario};
use hybrid_lfc::wind::{droop_power, power_coefficient, reserve_power};
use hybrid_lfc::{
    evaluate_candidate, load_scenario, run_observed, run_simulation, run_with_gains, tune,
    tuner_settings, Gains, TimeSeriesRecord,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const CASES: u32 = 100;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, criterion: u32, what: &str, passed: bool, detail: String) {
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("{tag} [{criterion}] {what}: {detail}");
        if !passed {
            self.failures += 1;
        }
    }
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn power_sharing(report: &mut Report) {
    let scenario = load_scenario(scenario_dir().join("two_load.toml")).unwrap();
    let start = Instant::now();
    let result = run_simulation(&scenario).unwrap();
    let elapsed = start.elapsed();
    for (seg, (wind, diesel)) in result
        .summary
        .segments
        .iter()
        .zip([(275.0, 20.0), (276.0, 30.0)])
    {
        report.check(
            1,
            &format!("steady wind power at {} kW load", seg.load_kw),
            within(seg.steady_p_wind_kw, wind, 2.0),
            format!("{:.3} kW, target {wind} ± 2 kW", seg.steady_p_wind_kw),
        );
        report.check(
            1,
            &format!("steady diesel power at {} kW load", seg.load_kw),
            within(seg.steady_p_diesel_kw, diesel, 2.0),
            format!("{:.3} kW, target {diesel} ± 2 kW", seg.steady_p_diesel_kw),
        );
    }
    report.check(
        1,
        "120 s simulation runtime",
        elapsed < Duration::from_secs(5),
        format!("{elapsed:.2?}, limit 5 s"),
    );
}

fn frequency_regulation(report: &mut Report) {
    let scenario = load_scenario(scenario_dir().join("two_load.toml")).unwrap();
    let result = run_simulation(&scenario).unwrap();
    for seg in &result.summary.segments {
        report.check(
            2,
            &format!("|Δf| at end of segment {}–{} s", seg.start, seg.end),
            seg.final_abs_delta_f_hz < 1e-3,
            format!("{:.3e} Hz, limit 1e-3 Hz", seg.final_abs_delta_f_hz),
        );
    }
    let step = result.summary.segments.last().unwrap();
    report.check(
        2,
        "transient |Δf| after the 11 kW step",
        step.max_abs_delta_f_hz < 0.5,
        format!("{:.4} Hz, limit 0.5 Hz", step.max_abs_delta_f_hz),
    );

    let step306 = load_scenario(scenario_dir().join("step_306.toml")).unwrap();
    let r = run_with_gains(&step306, Gains::LOAD_306).unwrap();
    let last = r.records.last().unwrap();
    let cost = evaluate_candidate(&step306, &Gains::LOAD_306.to_array());
    report.check(
        2,
        "306 kW gains: |Δf(t_end)| on the 306 kW step",
        last.delta_f_hz.abs() < 1e-3 && cost.is_finite(),
        format!(
            "{:.3e} Hz at {} s (ISE {cost:.4e}), limit 1e-3 Hz",
            last.delta_f_hz.abs(),
            last.t
        ),
    );
}

fn reserve(report: &mut Report) {
    let r = reserve_power(310e3, 275e3).unwrap();
    report.check(
        3,
        "reserve at 310 kW available, 275 kW dispatched",
        r == 35e3,
        format!("{} kW", r / 1e3),
    );

    let mut files: Vec<_> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    for path in files {
        let scenario = load_scenario(&path).unwrap();
        let mut min = f64::INFINITY;
        run_observed(&scenario, None, |v| min = min.min(v.wind.p_reserve)).unwrap();
        report.check(
            3,
            &format!(
                "reserve never negative in {}",
                path.file_name().unwrap().to_string_lossy()
            ),
            min >= 0.0,
            format!("minimum {:.3} kW", min / 1e3),
        );
    }
}

fn analytic_oracles(report: &mut Report) {
    let mut lag = LagBlock::new(1.0, 2.0, 0.0).unwrap();
    for _ in 0..200 {
        lag = lag.step(1.0, 0.01, Scheme::Rk4);
    }
    let err = (lag.output() - (1.0 - (-1.0f64).exp())).abs();
    report.check(
        4,
        "lag step response at t = T",
        err < 1e-6,
        format!("error {err:.2e}, limit 1e-6"),
    );

    let dt = 0.001;
    let n = (2.0 * std::f64::consts::PI / dt).round() as usize;
    let f: Vec<f64> = (0..=n).map(|k| (k as f64 * dt).sin()).collect();
    let v = ise(&f, &vec![0.0; f.len()], dt).unwrap();
    report.check(
        4,
        "ISE of sin(t) over one period",
        within(v, std::f64::consts::PI, 1e-3),
        format!("{v:.6}, target π ± 1e-3"),
    );

    let mut s = Scenario::default();
    s.solver.t_end = 400.0;
    s.load = vec![
        LoadSegment {
            start_s: 0.0,
            load_kw: 295.0,
            wind_pcmd_kw: None,
            gains: None,
        },
        LoadSegment {
            start_s: 5.0,
            load_kw: 306.0,
            wind_pcmd_kw: None,
            gains: None,
        },
    ];
    let gains = Gains {
        kp: 0.0,
        ki: 0.0,
        r: 0.4219,
    };
    let last = *run_with_gains(&s, gains).unwrap().records.last().unwrap();
    let (f_nom, base) = (50.0, 350e3);
    let droop_sum = 0.012e6 * f_nom / base + 1.0 / gains.r + (35e3 / 0.5) * f_nom / base;
    let expected = -(11e3 / base) / droop_sum * f_nom;
    report.check(
        4,
        "droop-only steady-state Δf",
        within(last.delta_f_hz, expected, 1e-3),
        format!("{:.5} Hz, closed form {expected:.5} Hz", last.delta_f_hz),
    );
}

fn pso_sanity(report: &mut Report) {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let settings = PsoSettings::new(vec![(-5.0, 5.0); 3], 1);
    let start = Instant::now();
    let result = pso_optimize(&sphere, &settings).unwrap();
    let elapsed = start.elapsed();
    report.check(
        5,
        "sphere, population 100, 150 iterations",
        result.best_cost < 1e-4 && elapsed < Duration::from_secs(1),
        format!(
            "best {:.2e} in {elapsed:.2?}, limits 1e-4 and 1 s",
            result.best_cost
        ),
    );

    let mut monotone = true;
    let mut deterministic = true;
    let mut s = Scenario::default();
    s.solver.t_end = 20.0;
    s.load[1].start_s = 5.0;
    let fitness = |x: &[f64]| evaluate_candidate(&s, x);
    for seed in 0..5u64 {
        let mut settings = PsoSettings::new(vec![(0.0, 10.0), (0.0, 1.0), (0.05, 1.0)], seed);
        settings.population = 10;
        settings.iterations = 6;
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| pso_optimize(&fitness, &settings).unwrap())
        };
        let (one, four) = (run(1), run(4));
        monotone &= one.trace.windows(2).all(|w| w[1] <= w[0]);
        deterministic &= one.best_position == four.best_position && one.trace == four.trace;
        let sphere_run = pso_optimize(
            &sphere,
            &PsoSettings {
                seed,
                ..PsoSettings::new(vec![(-5.0, 5.0); 3], seed)
            },
        );
        monotone &= sphere_run.unwrap().trace.windows(2).all(|w| w[1] <= w[0]);
    }
    report.check(5, "global best never increases", monotone, "10 runs".into());
    report.check(
        5,
        "same seed, 1 vs 4 worker threads",
        deterministic,
        "5 seeds".into(),
    );
}

fn tuning_dominance(report: &mut Report) {
    let scenario = load_scenario(scenario_dir().join("step_295.toml")).unwrap();
    let settings = tuner_settings(&scenario, scenario.pso.seed);
    let reference = evaluate_candidate(&scenario, &Gains::LOAD_295.to_array());
    let start = Instant::now();
    let tuned = tune(&scenario, &settings).unwrap();
    let elapsed = start.elapsed();
    let g = tuned.gains;
    report.check(
        6,
        "tuned ISE ≤ ISE of the 295 kW reference gains",
        tuned.best_cost <= reference,
        format!(
            "{:.4e} ≤ {reference:.4e} (kp {:.4}, ki {:.4}, r {:.4})",
            tuned.best_cost, g.kp, g.ki, g.r
        ),
    );
    report.check(
        6,
        "full tune, 100 × 150 simulations",
        elapsed < Duration::from_secs(600) && tuned.evaluations == 15_000,
        format!(
            "{} evaluations in {elapsed:.1?}, limit 10 min",
            tuned.evaluations
        ),
    );
}

fn property_suites(report: &mut Report) {
    let mut run = |name: &str, f: &dyn Fn(&mut TestRunner) -> Result<(), String>| {
        let mut runner = TestRunner::new(Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        });
        let outcome = f(&mut runner);
        report.check(
            7,
            name,
            outcome.is_ok(),
            match outcome {
                Ok(()) => format!("{CASES} cases"),
                Err(e) => e,
            },
        );
    };

    run("diesel power bounds and rate limit", &|runner| {
        let strategy = (
            prop::collection::vec(-2.0f64..2.0, 1..30),
            0.0f64..10.0,
            0.0f64..1.0,
            0.05f64..1.0,
        );
        runner
            .run(&strategy, |(freq, kp, ki, r)| {
                let params = DieselPlantParams {
                    gains: Gains { kp, ki, r },
                    ..DieselPlantParams::default()
                };
                let mut state = DieselPlantState::steady(&params).unwrap();
                for k in 0..400 {
                    let next =
                        diesel_plant_step(&state, &params, freq[k % freq.len()], 0.01, Scheme::Rk4);
                    prop_assert!((0.0..=40e3).contains(&next.p_diesel));
                    prop_assert!((next.p_diesel - state.p_diesel).abs() <= 12.0 * (1.0 + 1e-12));
                    state = next;
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    });

    run("wind droop is odd", &|runner| {
        runner
            .run(&(-1.0f64..1.0, 0.0f64..1e6), |(df, gain)| {
                prop_assert_eq!(droop_power(-df, gain), -droop_power(df, gain));
                Ok(())
            })
            .map_err(|e| e.to_string())
    });

    run("Cp polynomial equals brute-force double sum", &|runner| {
        let strategy = (
            prop::array::uniform5(prop::array::uniform5(-1.0f64..1.0)),
            0.0f64..15.0,
            0.0f64..30.0,
        );
        runner
            .run(&strategy, |(alpha, lambda, beta)| {
                let mut brute = 0.0;
                for (i, row) in alpha.iter().enumerate() {
                    for (j, a) in row.iter().enumerate() {
                        brute += a * beta.powi(i as i32) * lambda.powi(j as i32);
                    }
                }
                let fast = power_coefficient(lambda, beta, &alpha);
                prop_assert!((fast - brute).abs() <= 1e-9 * (1.0 + brute.abs()));
                Ok(())
            })
            .map_err(|e| e.to_string())
    });

    run("per-step energy bookkeeping", &|runner| {
        let strategy = (280.0f64..320.0, 0.0f64..10.0, 0.0f64..1.0, 0.05f64..1.0);
        runner
            .run(&strategy, |(load, kp, ki, r)| {
                let mut s = Scenario::default();
                s.solver.t_end = 20.0;
                s.load = vec![
                    LoadSegment {
                        start_s: 0.0,
                        load_kw: 295.0,
                        wind_pcmd_kw: None,
                        gains: None,
                    },
                    LoadSegment {
                        start_s: 2.0,
                        load_kw: load,
                        wind_pcmd_kw: None,
                        gains: None,
                    },
                ];
                let grid = s.grid_params();
                let mut worst: f64 = 0.0;
                let outcome = run_observed(&s, Some(Gains { kp, ki, r }), |v| {
                    let net = v.wind.p_grid + v.diesel.p_diesel - v.p_load;
                    worst = worst.max((net - grid.implied_accelerating_power(v.grid)).abs());
                });
                prop_assume!(outcome.is_ok());
                prop_assert!(worst < 1e-6, "mismatch {} W", worst);
                Ok(())
            })
            .map_err(|e| e.to_string())
    });

    run("time-series CSV round trip", &|runner| {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("timeseries.csv");
        runner
            .run(
                &prop::collection::vec(prop::array::uniform7(-1e6f64..1e6), 0..30),
                |rows| {
                    let records: Vec<TimeSeriesRecord> = rows
                        .iter()
                        .enumerate()
                        .map(|(k, v)| TimeSeriesRecord {
                            t: k as f64 * 0.1,
                            delta_f_hz: v[0] * 1e-7,
                            p_wind_kw: v[1],
                            p_diesel_kw: v[2],
                            p_load_kw: v[3],
                            p_reserve_kw: v[4] / 7.0,
                            u_pi: v[5] * v[6],
                        })
                        .collect();
                    write_timeseries(&path, &records).unwrap();
                    prop_assert_eq!(read_timeseries(&path).unwrap(), records);
                    Ok(())
                },
            )
            .map_err(|e| e.to_string())
    });
}

fn main() {
    let mut report = Report { failures: 0 };
    power_sharing(&mut report);
    frequency_regulation(&mut report);
    reserve(&mut report);
    analytic_oracles(&mut report);
    pso_sanity(&mut report);
    tuning_dominance(&mut report);
    property_suites(&mut report);
    if report.failures > 0 {
        println!("{} acceptance check(s) failed", report.failures);
        std::process::exit(1);
    }
    println!("all acceptance checks passed");
}
