//! Subcommand bodies. Each returns a JSON-ready result, a human summary and,
//! for sweeps, a curve.

use coin_duel::evolving::tie_prob_evolving_exact;
use coin_duel::exact::{expected_turns, tie_prob_finite, tie_prob_truncated, StartCounts};
use coin_duel::fitting::{gompertz_fit, pearson, powerlaw_fit, powerlaw_predict, FitResult};
use coin_duel::markov::outcome_dist_dp;
use coin_duel::montecarlo::{
    derive_seed, simulate_evolving, simulate_multicoin, simulate_standard, tie_curve_vs_p,
};
use coin_duel::multicoin::{
    duality_check, round_count_pmf, tie_prob_from_rounds, CoinSet, MulticoinGame, TieConvention,
};
use coin_duel::rational::{parse_rational, ratio, to_f64, Rational};
use coin_duel::{HazardGame, SimReport};
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use crate::grid::{all_in_unit_interval, parse_count_grid, parse_int_list, parse_step_grid};
use crate::report::{CurveFile, ExactValue, Outcome};
use crate::{usage, CliError, Command};

type CmdResult = Result<Outcome, CliError>;

pub fn run(command: &Command) -> CmdResult {
    match command {
        Command::ExactTie(a) => exact_tie(a),
        Command::ExpectedTurns(a) => expected_turns_cmd(a),
        Command::TieCurve(a) => tie_curve(a),
        Command::Powerlaw(a) => powerlaw(a),
        Command::Multicoin(a) => multicoin(a),
        Command::Evolving(a) => evolving(a),
        Command::Correlation(a) => correlation(a),
        Command::Replay(_) => Err(usage("replay cannot be nested")),
    }
}

fn need_runs(runs: u64) -> Result<u64, CliError> {
    if runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    Ok(runs)
}

fn exact_tie(a: &crate::ExactTieArgs) -> CmdResult {
    let (i1, i2) = match (a.k, a.i1, a.i2) {
        (Some(k), _, _) => (k, k),
        (None, Some(i1), Some(i2)) => (i1, i2),
        _ => return Err(usage("give --k, or both --i1 and --i2")),
    };
    if i1 < 1 || i2 < 1 {
        return Err(usage("starting counts must be at least 1"));
    }
    let p =
        parse_rational(&a.p).ok_or_else(|| usage(format!("cannot parse probability `{}`", a.p)))?;
    let (method, tie, p1, p2) = if i1 == i2 && p == ratio(1, 2) {
        // symmetric fair game: the closed form, wins split evenly
        let tie = tie_prob_finite(i1)?;
        let each = (Rational::one() - &tie) / ratio(2, 1);
        ("finite-sum", tie, each.clone(), each)
    } else {
        let d = outcome_dist_dp(i1, i2, &p)?;
        ("lattice-dp", d.tie, d.p1_wins, d.p2_wins)
    };
    let tie = ExactValue::of(&tie);
    let text = format!("{}\n", tie.text());
    let result = json!({
        "i1": i1,
        "i2": i2,
        "p_heads": ExactValue::of(&p),
        "method": method,
        "tie": tie,
        "p1_wins": ExactValue::of(&p1),
        "p2_wins": ExactValue::of(&p2),
    });
    Ok(Outcome {
        result,
        text,
        curve: None,
    })
}

#[derive(Serialize)]
struct TurnsSimulation {
    runs: u64,
    seed: u64,
    mean_turns: f64,
    stderr: f64,
    z_score: f64,
    within_3_stderr: bool,
}

fn z_score(estimate: f64, reference: f64, stderr: f64) -> f64 {
    if stderr > 0.0 {
        (estimate - reference) / stderr
    } else if estimate == reference {
        0.0
    } else {
        f64::INFINITY.copysign(estimate - reference)
    }
}

fn expected_turns_cmd(a: &crate::ExpectedTurnsArgs) -> CmdResult {
    let start = StartCounts::new(a.i1, a.i2)?;
    let exact = expected_turns(start);
    let exact_f = to_f64(&exact);
    let value = ExactValue::of(&exact);
    let mut text = format!("{}\n", value.text());
    let simulation = match a.simulate {
        Some(runs) => {
            let r = simulate_standard(start, 0.5, need_runs(runs)?, a.seed)?;
            let z = z_score(r.mean_turns, exact_f, r.mean_turns_stderr);
            text.push_str(&format!(
                "simulated {:.6} +- {:.6} over {} runs (z = {:.3})\n",
                r.mean_turns, r.mean_turns_stderr, runs, z
            ));
            Some(TurnsSimulation {
                runs,
                seed: a.seed,
                mean_turns: r.mean_turns,
                stderr: r.mean_turns_stderr,
                z_score: z,
                within_3_stderr: z.abs() <= 3.0,
            })
        }
        None => None,
    };
    let result =
        json!({ "i1": a.i1, "i2": a.i2, "expected_turns": value, "simulation": simulation });
    Ok(Outcome {
        result,
        text,
        curve: None,
    })
}

fn tie_curve(a: &crate::TieCurveArgs) -> CmdResult {
    let ks: Vec<u64> = parse_int_list(&a.ks).map_err(usage)?;
    if ks.contains(&0) {
        return Err(usage("starting counts must be at least 1"));
    }
    let grid = parse_step_grid(&a.p_grid).map_err(usage)?;
    if !all_in_unit_interval(&grid) {
        return Err(usage("head probabilities must lie in (0, 1]"));
    }
    let runs = need_runs(a.runs)?;
    let mut curve = CurveFile::new(&["p_heads", "k", "tie_rate", "tie_rate_stderr", "exact_tie"]);
    for (i, &k) in ks.iter().enumerate() {
        for pt in tie_curve_vs_p(k, &grid, runs, derive_seed(a.seed, i as u64))? {
            curve.push(vec![pt.p, k as f64, pt.tie_rate, pt.stderr, pt.exact]);
        }
    }
    curve.sort();
    let result = json!({ "ks": ks, "runs": runs, "points": curve.rows.len() });
    Ok(Outcome {
        result,
        text: curve.text_table(),
        curve: Some(curve),
    })
}

fn powerlaw(a: &crate::PowerlawArgs) -> CmdResult {
    if a.k_min < 1 || a.k_max <= a.k_min {
        return Err(usage("need 1 <= --k-min < --k-max"));
    }
    let points: Vec<(f64, f64)> = (a.k_min..=a.k_max)
        .map(|k| Ok((k as f64, to_f64(&tie_prob_finite(k)?))))
        .collect::<Result<_, CliError>>()?;
    let fit = powerlaw_fit(&points)?;
    let series = tie_prob_truncated(a.check_at, a.eps)?;
    let predicted = powerlaw_predict(&fit, a.check_at as f64);
    let abs_error = (predicted - series.value).abs();

    let mut curve = CurveFile::new(&["k", "exact_tie", "fitted_tie"]);
    for &(k, y) in &points {
        curve.push(vec![k, y, powerlaw_predict(&fit, k)]);
    }
    let intercept = fit.param("intercept").unwrap_or(f64::NAN);
    let slope = fit.param("slope").unwrap_or(f64::NAN);
    let text = format!(
        "ln P(tie) = {intercept:.6} {slope:+.6} ln k   (P(tie) ~ {:.6} k^{slope:.6})\n\
         k = {}: fitted {predicted:.6e}, series {:.6e} (tail <= {:.1e}), |error| = {abs_error:.3e}\n",
        intercept.exp(),
        a.check_at,
        series.value,
        series.tail_bound,
    );
    let result = json!({
        "k_min": a.k_min,
        "k_max": a.k_max,
        "fit": fit,
        "prefactor": intercept.exp(),
        "check": {
            "k": a.check_at,
            "predicted": predicted,
            "series": series,
            "abs_error": abs_error,
        },
    });
    Ok(Outcome {
        result,
        text,
        curve: Some(curve),
    })
}

fn report_text(label: &str, r: &SimReport) -> String {
    format!(
        "{label}: tie rate {:.6} +- {:.6} ({} ties, {} capped, {} runs)\n",
        r.tie_rate, r.tie_rate_stderr, r.ties, r.capped, r.runs
    )
}

#[derive(Serialize)]
struct ExactRounds {
    tie: f64,
    unresolved_mass: f64,
}

fn exact_rounds(game: &MulticoinGame, convention: TieConvention) -> Result<ExactRounds, CliError> {
    let pmf = round_count_pmf(game)?;
    let tie = tie_prob_from_rounds(&pmf, convention);
    Ok(ExactRounds {
        tie: to_f64(&tie),
        unresolved_mass: to_f64(pmf.residual()),
    })
}

fn multicoin(a: &crate::MulticoinArgs) -> CmdResult {
    let coins = CoinSet::new(parse_int_list(&a.coins).map_err(usage)?)?;
    let game = match a.horizon {
        Some(h) => MulticoinGame::with_limits(coins, a.target, a.floor, h)?,
        None => {
            let default = MulticoinGame::new(coins, a.target)?;
            MulticoinGame::with_limits(default.coins, a.target, a.floor, default.horizon)?
        }
    };
    if a.runs.is_none() && !a.exact && !a.dual_check {
        return Err(usage("nothing to do: give --runs, --exact or --dual-check"));
    }
    let convention = if a.include_capped || a.legacy_accumulation {
        TieConvention::IncludeCapped
    } else {
        TieConvention::ExcludeCapped
    };
    let runs = a.runs.map(need_runs).transpose()?;
    let mut text = format!(
        "coins {} target {} horizon {}\n",
        game.coins, game.target, game.horizon
    );

    let simulation = match runs {
        Some(runs) => {
            let r = simulate_multicoin(&game, convention, a.legacy_accumulation, runs, a.seed)?;
            text.push_str(&report_text("simulated", &r));
            Some(r)
        }
        None => None,
    };
    let exact = if a.exact {
        let e = exact_rounds(&game, convention)?;
        text.push_str(&format!(
            "exact: tie {:.10} (unresolved mass {:.3e})\n",
            e.tie, e.unresolved_mass
        ));
        Some(e)
    } else {
        None
    };
    let dual = if a.dual_check {
        let check = duality_check(&game.coins)?;
        let dual_game = game.dual();
        text.push_str(&format!(
            "dual {}: zero-sum {}, increment distributions equal {}\n",
            dual_game.coins, check.zero_sum, check.pmf_equal
        ));
        let dual_runs = runs.unwrap_or(100_000);
        let primary = match &simulation {
            Some(r) => r.clone(),
            None => {
                simulate_multicoin(&game, convention, a.legacy_accumulation, dual_runs, a.seed)?
            }
        };
        let mirrored = simulate_multicoin(
            &dual_game,
            convention,
            a.legacy_accumulation,
            dual_runs,
            derive_seed(a.seed, 1),
        )?;
        let pooled = (primary.tie_rate_stderr.powi(2) + mirrored.tie_rate_stderr.powi(2)).sqrt();
        let diff = mirrored.tie_rate - primary.tie_rate;
        let z = z_score(mirrored.tie_rate, primary.tie_rate, pooled);
        text.push_str(&report_text("dual simulated", &mirrored));
        text.push_str(&format!("difference {diff:+.6} = {z:+.3} pooled stderr\n"));
        let dual_exact = if a.exact {
            Some(exact_rounds(&dual_game, convention)?)
        } else {
            None
        };
        Some(json!({
            "coins": dual_game.coins,
            "zero_sum": check.zero_sum,
            "increment_pmf_equal": check.pmf_equal,
            "primary_simulation": primary,
            "simulation": mirrored,
            "tie_rate_difference": diff,
            "pooled_stderr": pooled,
            "z_score": z,
            "exact": dual_exact,
        }))
    } else {
        None
    };
    let result = json!({
        "game": game,
        "convention": convention,
        "legacy_accumulation": a.legacy_accumulation,
        "simulation": simulation,
        "exact": exact,
        "dual": dual,
    });
    Ok(Outcome {
        result,
        text,
        curve: None,
    })
}

fn rate_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let grid = parse_count_grid(text).map_err(usage)?;
    if grid.is_empty() || grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(usage("hazard rates must be positive and finite"));
    }
    Ok(grid)
}

fn evolving(a: &crate::EvolvingArgs) -> CmdResult {
    let lambdas = rate_grid(&a.lambda_grid)?;
    if a.runs.is_none() && !a.exact {
        return Err(usage("nothing to do: give --runs and/or --exact"));
    }
    let runs = a.runs.map(need_runs).transpose()?;
    let mut columns = vec!["lambda"];
    if runs.is_some() {
        columns.extend(["tie_rate", "tie_rate_stderr"]);
    }
    if a.exact {
        columns.push("exact_tie");
    }
    let mut curve = CurveFile::new(&columns);
    for (i, &lambda) in lambdas.iter().enumerate() {
        let game = HazardGame::new(a.n, lambda)?;
        let mut row = vec![lambda];
        if let Some(runs) = runs {
            let r = simulate_evolving(game, runs, derive_seed(a.seed, i as u64))?;
            row.extend([r.tie_rate, r.tie_rate_stderr]);
        }
        if a.exact {
            row.push(tie_prob_evolving_exact(&game, a.eps)?);
        }
        curve.push(row);
    }
    curve.sort();
    let mut text = curve.text_table();
    let fit = if a.fit_gompertz {
        let y_col = curve.columns.len() - if a.exact { 1 } else { 2 };
        let points: Vec<(f64, f64)> = curve.rows.iter().map(|r| (r[0], r[y_col])).collect();
        let fit = gompertz_fit(&points)?;
        text.push_str(&gompertz_text(&fit));
        Some(fit)
    } else {
        None
    };
    let result = json!({ "n": a.n, "runs": runs, "points": curve.rows.len(), "gompertz": fit });
    Ok(Outcome {
        result,
        text,
        curve: Some(curve),
    })
}

fn gompertz_text(fit: &FitResult) -> String {
    let p = |name| fit.param(name).unwrap_or(f64::NAN);
    format!(
        "gompertz: L = {:.6}, g = {:.6}, lambda0 = {:.6} (rss {:.3e}, converged {})\n",
        p("L"),
        p("g"),
        p("lambda0"),
        fit.residual_sum_squares,
        fit.converged
    )
}

fn correlation(a: &crate::CorrelationArgs) -> CmdResult {
    let lambdas = rate_grid(&a.lambda_grid)?;
    let ns: Vec<u64> = parse_int_list(&a.n_grid).map_err(usage)?;
    let runs = need_runs(a.runs)?;
    let mut columns = vec!["lambda", "n", "tie_rate", "tie_rate_stderr"];
    if a.exact {
        columns.push("exact_tie");
    }
    let mut curve = CurveFile::new(&columns);
    let mut cell = 0u64;
    for &n in &ns {
        for &lambda in &lambdas {
            let game = HazardGame::new(n, lambda)?;
            let r = simulate_evolving(game, runs, derive_seed(a.seed, cell))?;
            cell += 1;
            let mut row = vec![lambda, n as f64, r.tie_rate, r.tie_rate_stderr];
            if a.exact {
                row.push(tie_prob_evolving_exact(&game, 1e-12)?);
            }
            curve.push(row);
        }
    }
    curve.sort();
    let column = |i: usize| -> Vec<f64> { curve.rows.iter().map(|r| r[i]).collect() };
    let r_lambda = pearson(&column(0), &column(2))?;
    let r_n = pearson(&column(1), &column(2))?;
    let mut text = format!("r_lambda = {r_lambda:.6}\nr_n = {r_n:.6}\n");
    let exact = if a.exact {
        let el = pearson(&column(0), &column(4))?;
        let en = pearson(&column(1), &column(4))?;
        text.push_str(&format!("exact: r_lambda = {el:.6}, r_n = {en:.6}\n"));
        Some(json!({ "r_lambda": el, "r_n": en }))
    } else {
        None
    };
    let result = json!({
        "runs_per_cell": runs,
        "cells": curve.rows.len(),
        "r_lambda": r_lambda,
        "r_n": r_n,
        "exact": exact,
    });
    Ok(Outcome {
        result,
        text,
        curve: Some(curve),
    })
}
