//! Command-line driver: parses presentations, dispatches to the library
//! pipelines, and emits machine-readable reports.
//!
//! Exit codes: 0 on success, 2 when the only outcome is inconclusive
//! (budget exhaustion, undecided distance), 1 on errors.

mod input;
mod render;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use l2rank_core::bounds::{self, BoundReport, DistanceResult, Evidence, MarkedGroup};
use l2rank_core::presentations::parse_word;
use l2rank_core::quotients::{self, FiniteQuotient};
use l2rank_core::spectral;
use l2rank_core::zlinalg;
use l2rank_core::{
    augment_matrix, fox_jacobian, ratio_string, smith_normal_form, Parsed, Presentation,
};

use input::InputSpec;
use render::{format_report, ratio_json, Format};

/// Default search budget for quotient pools.
const DEFAULT_MAX_QUOTIENTS: usize = 32;
/// Default membership search depth for `dist`.
const DEFAULT_MEMBERSHIP_BUDGET: usize = 2;

#[derive(Parser)]
#[command(
    name = "l2rank",
    version,
    about = "First L2-Betti-number estimates, torsion lower bounds, and normal-rank witnesses for finitely presented groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Budget for coset enumeration (total cosets ever defined).
    #[arg(long, global = true, default_value_t = 20000)]
    max_cosets: usize,

    /// Largest permutation degree in quotient searches.
    #[arg(long, global = true, default_value_t = 5)]
    max_degree: usize,

    /// Maximum chain length for l2-approx.
    #[arg(long, global = true, default_value_t = 3)]
    chain: usize,

    /// Order cap for materialized quotients and intersections.
    #[arg(long, global = true, default_value_t = 5000)]
    order_cap: usize,

    /// Worker threads for per-quotient jobs (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Seed recorded for reproducibility; all searches are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// First Betti number and abelianization torsion.
    Betti1 {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
    },
    /// Fox Jacobian and its augmentation.
    Fox {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
    },
    /// Smith normal form of the augmented Fox Jacobian.
    Snf {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
    },
    /// Sum of reciprocal torsion exponents.
    Sigma {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
    },
    /// Torsion lower bound with irreducibility certificates.
    PtBound {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
    },
    /// Normal-rank witness via quotient collapse.
    NrkCheck {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
        /// Words whose normal closure should be the whole group.
        #[arg(long = "kill", required = true)]
        kill: Vec<String>,
    },
    /// Finite-quotient chain and Betti-ratio estimates.
    L2Approx {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
    },
    /// Spectral measure of the Fox matrix over a searched quotient.
    Spectral {
        input: Option<String>,
        #[arg(long)]
        inline: Option<String>,
        /// Epsilon grid for the small-spectrum bound table.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
    },
    /// Marked-groups distance between two presentations.
    Dist {
        a: String,
        b: String,
        #[arg(long, default_value_t = 4)]
        max_radius: usize,
        #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_BUDGET)]
        membership_budget: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs != 1 {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if cli.jobs > 0 {
            builder = builder.num_threads(cli.jobs);
        }
        // A failed second initialization only matters in tests; ignore it.
        let _ = builder.build_global();
    }
    match run(&cli) {
        Ok(outcome) => {
            let text = format_report(&outcome.report, cli.format);
            let write_result = match &cli.output {
                Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| anyhow!(e)),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| anyhow!(e)),
            };
            if let Err(e) = write_result {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if outcome.inconclusive {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

struct Outcome {
    report: Value,
    inconclusive: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            inconclusive: false,
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Betti1 { input, inline } => {
            let p = InputSpec::new(input, inline)?.load()?.into_presentation();
            let b = zlinalg::betti1(&p);
            Ok(Outcome::ok(json!({
                "rank": b.rank,
                "torsion": torsion_json(&b.torsion),
            })))
        }
        Command::Fox { input, inline } => {
            let p = InputSpec::new(input, inline)?.load()?.into_presentation();
            let jac = fox_jacobian(&p);
            let names = p.generator_names();
            let rows: Vec<Value> = (0..jac.rows())
                .map(|i| {
                    Value::Array(
                        (0..jac.cols())
                            .map(|j| Value::String(jac.get(i, j).format_with(names)))
                            .collect(),
                    )
                })
                .collect();
            let aug = augment_matrix(&jac);
            let aug_rows: Vec<Value> = (0..aug.rows())
                .map(|i| {
                    Value::Array((0..aug.cols()).map(|j| int_json(aug.get(i, j))).collect())
                })
                .collect();
            Ok(Outcome::ok(json!({
                "generators": names,
                "jacobian": rows,
                "augmented": aug_rows,
            })))
        }
        Command::Snf { input, inline } => {
            let p = InputSpec::new(input, inline)?.load()?.into_presentation();
            let snf = smith_normal_form(&augment_matrix(&fox_jacobian(&p)));
            Ok(Outcome::ok(json!({
                "diagonal": snf.diagonal.iter().map(int_json).collect::<Vec<_>>(),
                "rank": snf.rank,
                "torsion": torsion_json(&snf.torsion),
                "perfect": zlinalg::is_perfect(&p),
            })))
        }
        Command::Sigma { input, inline } => {
            let parsed = InputSpec::new(input, inline)?.load()?;
            let tp = torsion_presentation(&parsed)?;
            let exponents: Vec<u64> = tp.torsion_relators().iter().map(|r| r.1).collect();
            Ok(Outcome::ok(json!({
                "sigma": ratio_string(&bounds::sigma(&tp)),
                "exponents": exponents,
            })))
        }
        Command::PtBound { input, inline } => {
            let parsed = InputSpec::new(input, inline)?.load()?;
            let tp = torsion_presentation(&parsed)?;
            let cert = certifying_quotient(&tp, cli)?;
            let lower = bounds::pt_lower_bound(&tp, cert.as_ref());
            let upper = bounds::generator_bound(tp.base());
            let mut report = bound_report_json(&lower);
            report["upper"] = ratio_json(upper.upper.as_ref());
            report["sigma"] = Value::String(ratio_string(&bounds::sigma(&tp)));
            let inconclusive = !lower.certified;
            Ok(Outcome {
                report,
                inconclusive,
            })
        }
        Command::NrkCheck {
            input,
            inline,
            kill,
        } => {
            let parsed = InputSpec::new(input, inline)?.load()?;
            let p = parsed.presentation().clone();
            let words = kill
                .iter()
                .map(|text| {
                    parse_word(text, p.generator_names())
                        .with_context(|| format!("parsing --kill word `{text}`"))
                })
                .collect::<Result<Vec<_>>>()?;
            let report = bounds::normal_rank_witness(&p, &words, cli.max_cosets);
            let mut value = bound_report_json(&report);
            value["killed"] = json!(kill);
            if let Some(note) = InputSpec::new(input, inline)?.fixture_note() {
                value["note"] = json!(note);
            }
            if report.certified {
                value["nrk_upper"] = json!(words.len());
                // Contrast with the torsion lower bound when available.
                if let Some(tp) = parsed.torsion() {
                    let cert = certifying_quotient(tp, cli)?;
                    let lower = bounds::pt_lower_bound(tp, cert.as_ref());
                    if lower.certified && !lower.vacuous {
                        let naive = num_rational::BigRational::from_integer(
                            (words.len() as i64 - 1).into(),
                        );
                        let exceeds = lower.lower.clone().unwrap() > naive;
                        value["betti_lower_bound"] = ratio_json(lower.lower.as_ref());
                        value["exceeds_nrk_minus_one"] = json!(exceeds);
                    }
                }
            }
            let inconclusive = !report.certified;
            Ok(Outcome {
                report: value,
                inconclusive,
            })
        }
        Command::L2Approx { input, inline } => {
            let parsed = InputSpec::new(input, inline)?.load()?;
            let p = parsed.presentation().clone();
            let pool =
                quotients::search_finite_quotients(&p, cli.max_degree, DEFAULT_MAX_QUOTIENTS)?;
            let chain = quotients::build_chain(&p, &pool, cli.chain, cli.order_cap);
            if chain.quotients.is_empty() {
                // Inconclusive, not an error: the group may simply have no
                // small quotients (perfect groups, say).
                return Ok(Outcome {
                    report: json!({
                        "presentation": p.to_text(),
                        "chain": [],
                        "limsup_lower_bound": Value::Null,
                        "intersection_trivial_certified": false,
                        "note": format!(
                            "no nontrivial finite quotient found at degree <= {}",
                            cli.max_degree
                        ),
                    }),
                    inconclusive: true,
                });
            }
            let est = quotients::luck_estimate(&p, &chain);
            let samples: Vec<Value> = est
                .samples
                .iter()
                .map(|s| {
                    json!({
                        "index": s.index,
                        "betti1": s.betti1,
                        "ratio": ratio_string(&s.ratio),
                    })
                })
                .collect();
            Ok(Outcome::ok(json!({
                "presentation": p.to_text(),
                "chain": samples,
                "limsup_lower_bound": ratio_string(&est.limsup_lower_bound),
                "intersection_trivial_certified": est.intersection_trivial_certified,
            })))
        }
        Command::Spectral { input, inline, eps } => {
            let parsed = InputSpec::new(input, inline)?.load()?;
            let p = parsed.presentation().clone();
            let pool =
                quotients::search_finite_quotients(&p, cli.max_degree, DEFAULT_MAX_QUOTIENTS)?;
            let q = pool
                .iter()
                .filter(|q| q.order() <= cli.order_cap)
                .max_by_key(|q| q.order())
                .ok_or_else(|| anyhow!("no finite quotient found"))?;
            Ok(Outcome::ok(spectral_report(&p, q, eps, cli)?))
        }
        Command::Dist {
            a,
            b,
            max_radius,
            membership_budget,
        } => {
            let pa = InputSpec::positional(a)?.load()?.into_presentation();
            let pb = InputSpec::positional(b)?.load()?.into_presentation();
            if pa.rank() != pb.rank() {
                bail!("marked groups must have the same number of generators");
            }
            let ma = MarkedGroup::from_presentation(&pa, *membership_budget);
            let mb = MarkedGroup::from_presentation(&pb, *membership_budget);
            let d = bounds::marked_distance(&ma, &mb, *max_radius);
            let (report, inconclusive) = distance_json(&d, &pa, *max_radius);
            Ok(Outcome {
                report,
                inconclusive,
            })
        }
    }
}

fn torsion_presentation(parsed: &Parsed) -> Result<l2rank_core::TorsionPresentation> {
    parsed
        .torsion()
        .cloned()
        .ok_or_else(|| anyhow!("presentation is not in torsion form (every relator must be R^n)"))
}

/// Smallest searched quotient witnessing every relator order, if any.
fn certifying_quotient(
    tp: &l2rank_core::TorsionPresentation,
    cli: &Cli,
) -> Result<Option<FiniteQuotient>> {
    let pool =
        quotients::search_finite_quotients(tp.base(), cli.max_degree, DEFAULT_MAX_QUOTIENTS)?;
    Ok(pool
        .into_iter()
        .find(|q| {
            tp.torsion_relators()
                .iter()
                .all(|(root, n)| q.word_order(root) as u64 == *n)
        }))
}

fn int_json(v: &num_bigint::BigInt) -> Value {
    use num_traits::ToPrimitive;
    match v.to_i64() {
        Some(small) => json!(small),
        None => Value::String(v.to_string()),
    }
}

fn torsion_json(torsion: &[num_bigint::BigInt]) -> Vec<Value> {
    torsion.iter().map(int_json).collect()
}

fn evidence_json(evidence: &[Evidence]) -> Vec<Value> {
    evidence
        .iter()
        .map(|e| match e {
            Evidence::RelatorOrders {
                quotient_order,
                relators,
            } => {
                let rows: Vec<Value> = relators
                    .iter()
                    .map(|(root, exp, ord)| {
                        json!({"root": root, "exponent": exp, "witnessed_order": ord})
                    })
                    .collect();
                json!({
                    "kind": "relator_orders",
                    "quotient_order": quotient_order,
                    "relators": rows,
                })
            }
            Evidence::GeneratorCount { generators } => {
                json!({"kind": "generator_count", "generators": generators})
            }
            Evidence::TrivialQuotient {
                killed,
                cosets_defined,
            } => json!({
                "kind": "trivial_quotient",
                "killed": killed,
                "cosets_defined": cosets_defined,
            }),
        })
        .collect()
}

fn bound_report_json(r: &BoundReport) -> Value {
    json!({
        "lower": ratio_json(r.lower.as_ref()),
        "upper": ratio_json(r.upper.as_ref()),
        "certified": r.certified,
        "vacuous": r.vacuous,
        "certificates": evidence_json(&r.evidence),
    })
}

fn spectral_report(p: &Presentation, q: &FiniteQuotient, eps: &[f64], cli: &Cli) -> Result<Value> {
    let jac = fox_jacobian(p);
    let names = p.generator_names();
    let matrix_text: Vec<Vec<String>> = (0..jac.rows())
        .map(|i| {
            (0..jac.cols())
                .map(|j| jac.get(i, j).format_with(names))
                .collect()
        })
        .collect();
    let mu = spectral::spectral_measure(&jac, q);
    let atoms: Vec<Value> = mu
        .atoms
        .iter()
        .map(|(e, m)| json!([e, ratio_string(m)]))
        .collect();
    let z1 = spectral::z1_dimension_estimate(p, &[], q);
    let mut moments = serde_json::Map::new();
    // Moments are taken on the measure's self-adjoint matrix.
    let moment_matrix = if mu.squared {
        &jac.adjoint_transpose() * &jac
    } else {
        jac.clone()
    };
    for n in 0..=6u32 {
        let c = spectral::moment_check(&moment_matrix, q, n)
            .map_err(|e| anyhow!("moment check failed: {e}"))?;
        moments.insert(
            n.to_string(),
            json!({
                "symbolic": ratio_string(&c.symbolic),
                "numeric": c.numeric,
            }),
        );
    }
    let mut report = json!({
        "matrix": matrix_text,
        "quotient_order": q.order(),
        "squared": mu.squared,
        "atoms": atoms,
        "moments": Value::Object(moments),
        "z1_dimension": ratio_string(&z1.z1_dimension),
        // The cocycle identity behind z1 assumes an infinite group, where
        // the zeroth L2-Betti number vanishes; this is not auto-detected.
        "beta0_assumed_zero": true,
    });
    if !eps.is_empty() {
        // Evaluate the small-spectrum bound over the searched chain so the
        // table covers a refining family rather than a single quotient.
        let pool = quotients::search_finite_quotients(p, cli.max_degree, DEFAULT_MAX_QUOTIENTS)?;
        let chain = quotients::build_chain(p, &pool, cli.chain, cli.order_cap);
        let measures: Vec<_> = chain
            .quotients
            .iter()
            .map(|q| spectral::spectral_measure(&jac, q))
            .collect();
        if !measures.is_empty() {
            let bound = spectral::log_bound_report(&measures, 1.0, eps);
            let rows: Vec<Value> = bound
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "quotient_order": chain.quotients[r.measure_index].order(),
                        "eps": r.eps,
                        "mass_below": ratio_string(&r.mass_below),
                        "zero_mass": ratio_string(&r.zero_mass),
                        "required_c": r.required_c,
                    })
                })
                .collect();
            report["log_bound"] = json!({
                "minimal_c": bound.minimal_c,
                "rows": rows,
            });
        }
    }
    Ok(report)
}

fn distance_json(d: &DistanceResult, p: &Presentation, max_radius: usize) -> (Value, bool) {
    let names = p.generator_names();
    match d {
        DistanceResult::Exact {
            agreement_radius,
            witness,
            witness_in_first,
        } => (
            json!({
                "kind": "exact",
                "distance": format!("2^-{agreement_radius}"),
                "value": 2f64.powi(-(*agreement_radius as i32)),
                "agreement_radius": agreement_radius,
                "witness": witness.format_with(names),
                "witness_in_first": witness_in_first,
            }),
            false,
        ),
        DistanceResult::AgreementUpTo { max_radius: r } => (
            json!({
                "kind": "agreement",
                "distance": "0",
                "value": 0.0,
                "agreement_radius": r,
                "note": format!(
                    "balls agree through radius {r}; not a proof of equality, distance at most 2^-{r}"
                ),
            }),
            false,
        ),
        DistanceResult::Interval {
            lower_exponent,
            upper_exponent,
            undecided,
        } => {
            let undecided: Vec<String> = undecided.iter().map(|w| w.format_with(names)).collect();
            (
                json!({
                    "kind": "interval",
                    "lower": lower_exponent.map(|k| format!("2^-{k}")),
                    "upper": format!("2^-{upper_exponent}"),
                    "max_radius": max_radius,
                    "undecided": undecided,
                }),
                true,
            )
        }
    }
}
