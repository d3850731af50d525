use crate::OptimizeArgs;
use anyhow::{bail, Context, Result};
use lodis::combinatorics::Occupation;
use lodis::discriminate::{
    bound_completely, bound_general, bound_singly, optimize, success_completely_classical,
    success_probability, success_singly_oracle, CostKind, DiscriminationProblem,
    DiscriminationResult, OptimizeConfig,
};
use lodis::schur_weyl::DENSE_DIMENSION_CAP;

fn parse_outcome(text: &str, modes: usize) -> Result<Occupation> {
    let counts: Vec<usize> = text
        .chars()
        .map(|c| c.to_digit(10).map(|v| v as usize).context("outcome must be digits"))
        .collect::<Result<_>>()?;
    if counts.len() != modes {
        bail!("outcome {text} must have {modes} digits");
    }
    Ok(Occupation::new(counts))
}

fn target_bound(args: &OptimizeArgs, label: Option<&Occupation>) -> Option<(String, f64)> {
    match args.target.as_str() {
        "s" => Some((bound_singly(args.photons).to_string(), bound_singly(args.photons).value())),
        "sm" => Some((bound_singly(args.photons).to_string(), bound_singly(args.photons).value())),
        "d" => {
            Some((bound_completely(args.photons).to_string(), bound_completely(args.photons).value()))
        }
        _ => label.map(|l| {
            let b = bound_general(l);
            (b.to_string(), b.value())
        }),
    }
}

pub fn run(args: &OptimizeArgs) -> Result<()> {
    if let Some(jobs) = args.jobs {
        // a failure here means a pool already exists; that is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let cache = args.cache.resolve();
    let n = args.photons;

    // named-network evaluation mode: score a fixed interferometer
    if let Some(network) = &args.network {
        let within_budget = (n as u128).checked_pow(n as u32).is_some_and(|v| {
            v <= DENSE_DIMENSION_CAP
        });
        if within_budget {
            let target = crate::spec::parse_target(n, &args.target, args.bad_mode, &cache)?;
            let modes = target.state.modes();
            let u = crate::spec::parse_network(modes, network)?;
            let transform = crate::spec::load_transform(&cache, n, modes)?;
            let problem = DiscriminationProblem::with_epsilon(
                target.state.clone(),
                lodis::states::rho_indistinguishable(n),
                args.epsilon,
            )?;
            return report(args, &target.name, success_probability(&u, &problem, &transform)?);
        } else {
            // beyond the dense budget only the closed-form families remain
            let u = crate::spec::parse_network(n, network)?;
            match args.target.as_str() {
                "d" => {
                    return report(
                        args,
                        "completely distinguishable",
                        success_completely_classical(&u, n, args.epsilon)?,
                    )
                }
                "s" => {
                    let bad = args.bad_mode.unwrap_or(n);
                    return report(
                        args,
                        &format!("singly distinguishable (bad mode {bad})"),
                        success_singly_oracle(&u, n, bad, args.epsilon)?,
                    );
                }
                other => bail!(
                    "target {other:?} needs the dense transform, which is over budget at N={n}; \
                     only d and s evaluate at this size"
                ),
            }
        }
    }

    // search mode
    let target = crate::spec::parse_target(n, &args.target, args.bad_mode, &cache)?;
    let modes = target.state.modes();
    let transform = crate::spec::load_transform(&cache, n, modes)?;
    let reference = if modes == n && target.state.part(&lodis::combinatorics::Partition::symmetric(n)).is_some()
    {
        lodis::states::rho_indistinguishable(n)
    } else {
        bail!("optimization targets must be coincident-input states on N modes");
    };
    let problem =
        DiscriminationProblem::with_epsilon(target.state.clone(), reference, args.epsilon)?;

    let mut config = OptimizeConfig::new(n, args.restarts, args.seed);
    if let Some(ladder) = &args.xi_ladder {
        config.xi_ladder = ladder
            .split(',')
            .map(|s| s.trim().parse::<f64>().context("ξ ladder must be numbers"))
            .collect::<Result<_>>()?;
    }
    if args.force_coincidence || args.eta.is_some() {
        let eta = args.eta.unwrap_or(10.0);
        if args.xi_ladder.is_none() {
            config.xi_ladder = vec![6.0];
        }
        config.cost = CostKind::ForcedCoincidence { eta };
    }
    if let Some(outcome) = &args.single_outcome {
        config.cost = CostKind::SingleOutcome(parse_outcome(outcome, modes)?);
    }
    let result = optimize(&problem, &config, &transform)?;
    report(args, &target.name, result)
}

fn report(
    args: &OptimizeArgs,
    target_name: &str,
    result: DiscriminationResult,
) -> Result<()> {
    let label = crate::spec::parse_target(
        args.photons,
        &args.target,
        args.bad_mode,
        &args.cache.resolve(),
    )
    .ok()
    .and_then(|t| t.label_occupation);
    let bound = target_bound(args, label.as_ref());
    match &bound {
        Some((text, value)) => println!(
            "success {:.10}  bound {text} = {value:.10}  outcomes in D: {}",
            result.success,
            result.discriminating.len()
        ),
        None => println!(
            "success {:.10}  outcomes in D: {}",
            result.success,
            result.discriminating.len()
        ),
    }
    if let Some(path) = &args.out {
        let mut doc = result.to_json();
        let obj = doc.as_object_mut().expect("object");
        obj.insert(
            "problem".into(),
            serde_json::json!({
                "photons": args.photons,
                "target": target_name,
                "epsilon": args.epsilon,
            }),
        );
        if let Some((text, value)) = bound {
            obj.insert("bound".into(), serde_json::json!({ "exact": text, "value": value }));
        }
        std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&doc)?))
            .with_context(|| format!("writing {}", path.display()))?;
        println!("result written to {}", path.display());
    }
    Ok(())
}
