use anyhow::{bail, Result};
use emcomm_core::consistency::{
    non_degeneracy, receiver_simplicity, semantic_consistency, spatial_meaningfulness, ReceiverTable,
};
use emcomm_core::games::{eval_game, synchronized_receiver, Evaluation, Receiver};
use emcomm_core::io::Dataset;
use emcomm_core::model::game::GameSpec;
use emcomm_core::model::input::InputSpace;
use emcomm_core::model::labels::LabelMap;
use emcomm_core::model::message::MessageSpace;
use emcomm_core::model::protocol::Protocol;
use emcomm_core::objectives::{
    convexity_check, disc_objective, global_conditional_entropy, label_conditional_entropy, objective,
    reco_objective, supervised_loss_scale, supervised_objective,
};
use emcomm_core::optimize::{exhaustive_search, search_size, VALUE_TOLERANCE};
use emcomm_core::rng;
use rand::Rng;
use serde_json::{json, Value};

use crate::args::{GlobalArgs, VerifyArgs};
use crate::inputs;
use crate::report::Report;
use crate::ExpectationFailed;

pub const GAP_TOLERANCE: f64 = 1e-10;

struct Instance {
    space: InputSpace,
    protocol: Protocol,
    labels: Option<LabelMap>,
}

fn random_instance(seed: u64, i: u64, args: &VerifyArgs, uniform: bool, num_labels: Option<usize>) -> Instance {
    let mut r = rng::substream(seed, rng::INSTANCES, i);
    let n = match num_labels {
        Some(l) => l * r.gen_range(1..=(args.max_n / l).max(1)),
        None => r.gen_range(2..=args.max_n.max(2)),
    };
    let dim = r.gen_range(1..=args.max_dim.max(1));
    let k = r.gen_range(1..=args.max_k.max(1));
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| r.gen_range(-5.0..5.0)).collect()).collect();
    let space = if uniform {
        InputSpace::uniform(points)
    } else {
        let masses: Vec<f64> = (0..n).map(|_| r.gen_range(0.1..1.0)).collect();
        InputSpace::from_masses(points, &masses)
    }
    .expect("generated space is valid");
    let protocol = Protocol::new((0..n).map(|_| r.gen_range(0..k)).collect(), k).expect("valid protocol");
    let labels = num_labels.map(|l| {
        let mut v: Vec<usize> = (0..n).map(|x| x % l).collect();
        for j in (1..n).rev() {
            v.swap(j, r.gen_range(0..=j));
        }
        LabelMap::from_indices(v).expect("labels cover every class")
    });
    Instance { space, protocol, labels }
}

fn population(global: &GlobalArgs, args: &VerifyArgs, lemma: &str) -> Result<Vec<Instance>> {
    if let (Some(input), Some(proto)) = (&args.input, &args.protocol) {
        let data = inputs::dataset(input)?;
        let pf = inputs::protocol(proto, &data, None)?;
        let attrs = inputs::attributes(args.labels.as_deref(), &data)?;
        return Ok(vec![Instance {
            space: data.space,
            protocol: pf.protocol,
            labels: attrs.into_iter().next().map(|(_, l)| l),
        }]);
    }
    let labelled = matches!(lemma, "a2" | "a3");
    Ok((0..args.protocols as u64)
        .map(|i| {
            let labels = labelled.then(|| if lemma == "a2" { 2 } else { 2 + (i as usize % 2) });
            random_instance(global.seed, i, args, labelled, labels)
        })
        .collect())
}

fn exact_loss(inst: &Instance, spec: &GameSpec) -> Result<(f64, Option<f64>)> {
    let receiver = synchronized_receiver(&inst.protocol, &inst.space, spec)?;
    let report = eval_game(&inst.protocol, &receiver, &inst.space, spec)?;
    let se = match report.evaluation {
        Evaluation::Exact => None,
        Evaluation::MonteCarlo { .. } => report.std_error,
    };
    Ok((report.expected.expect_finite(), se))
}

fn lemma(global: &GlobalArgs, args: &VerifyArgs, which: &str) -> Result<Value> {
    let which = which.to_ascii_lowercase();
    let d = args.game.candidates();
    let instances = population(global, args, &which)?;
    let mut max_gap: f64 = 0.0;
    let mut max_z: f64 = 0.0;
    let mut sampled = 0;
    let mut ok = true;
    for inst in &instances {
        let (spec, closed) = match which.as_str() {
            "1" => (GameSpec::reconstruction(), reco_objective(&inst.protocol, &inst.space)),
            "2" => (GameSpec::discrimination(d), disc_objective(&inst.protocol, &inst.space, d)?.value),
            "a1" => (GameSpec::global(), global_conditional_entropy(&inst.protocol, &inst.space)),
            "a2" | "a3" => {
                let Some(labels) = inst.labels.clone() else { bail!("lemma {which} needs labels") };
                if which == "a2" {
                    let s = supervised_objective(&inst.protocol, &inst.space, &labels)?.value;
                    (GameSpec::supervised(2, labels.clone()), supervised_loss_scale(labels.num_labels()) * s)
                } else {
                    let h = label_conditional_entropy(&inst.protocol, &inst.space, &labels)?;
                    (GameSpec::classification(labels), h)
                }
            }
            other => bail!("unknown lemma `{other}` (expected 1, 2, a1, a2 or a3)"),
        };
        let spec = spec.with_seed(global.seed).with_samples(global.samples);
        let (loss, se) = exact_loss(inst, &spec)?;
        let gap = (loss - closed).abs();
        match se {
            Some(se) => {
                sampled += 1;
                let z = if se > 0.0 { gap / se } else if gap == 0.0 { 0.0 } else { f64::INFINITY };
                max_z = max_z.max(z);
                ok &= z <= 4.0;
            }
            None => {
                max_gap = max_gap.max(gap);
                ok &= gap < GAP_TOLERANCE;
            }
        }
    }
    Ok(json!({
        "check": format!("lemma {which}"),
        "verdict": ok,
        "instances": instances.len(),
        "exact_instances": instances.len() - sampled,
        "sampled_instances": sampled,
        "max_abs_gap": max_gap,
        "max_standard_errors": max_z,
        "tolerance": GAP_TOLERANCE,
        "candidates": d,
    }))
}

struct Files {
    data: Dataset,
    protocol: Protocol,
    messages: MessageSpace,
    spec: GameSpec,
}

fn files(global: &GlobalArgs, args: &VerifyArgs) -> Result<Files> {
    let input = inputs::require(args.input.as_deref(), "input")?;
    let proto = inputs::require(args.protocol.as_deref(), "protocol")?;
    let data = inputs::dataset(input)?;
    let pf = inputs::protocol(proto, &data, None)?;
    let attrs = inputs::attributes(args.labels.as_deref(), &data)?;
    let spec = inputs::game_spec(&args.game, &attrs, global)?;
    Ok(Files {
        data,
        protocol: pf.protocol,
        messages: pf.messages,
        spec,
    })
}

fn definition(global: &GlobalArgs, args: &VerifyArgs, which: &str) -> Result<Value> {
    let f = files(global, args)?;
    let space = &f.data.space;
    let eps0 = || args.epsilon0.map(Ok).unwrap_or_else(|| f.messages.epsilon_m());
    Ok(match which {
        "3" => {
            let sc = semantic_consistency(&f.protocol, space);
            json!({
                "check": "definition 3",
                "verdict": sc.consistent,
                "boundary": sc.boundary,
                "total_variance": sc.total,
                "explained_variance": sc.explained,
                "unexplained_variance": sc.unexplained,
            })
        }
        "4" => {
            let s = spatial_meaningfulness(&f.protocol, space, &f.messages, eps0()?)?;
            json!({
                "check": "definition 4",
                "verdict": s.meaningful,
                "epsilon0": s.epsilon0,
                "epsilon_m": s.epsilon_m,
                "thresholds": s.checks,
                "warnings": s.warnings,
            })
        }
        "5" => {
            let receiver = synchronized_receiver(&f.protocol, space, &f.spec)?;
            let table = match &receiver {
                Receiver::Reconstruction(r) => ReceiverTable::reconstruction(r, &f.messages)?,
                Receiver::Discrimination(r) => ReceiverTable::discrimination(r, &f.messages, space, f.spec.candidates)?,
                Receiver::Global(_) => bail!("simplicity is defined for reconstruction and discrimination receivers"),
            };
            let s = receiver_simplicity(&table, eps0()?, space)?;
            json!({
                "check": "definition 5",
                "verdict": s.simple,
                "game": f.spec.kind.name(),
                "k": s.k,
                "worst_ratio": s.worst_ratio,
                "witness": s.witness,
                "duplicate_conflict": s.duplicate_conflict,
                "embedding": s.embedding,
            })
        }
        "6" => {
            let receiver = synchronized_receiver(&f.protocol, space, &f.spec)?;
            let nd = non_degeneracy(&receiver, space, &f.spec)?;
            json!({
                "check": "definition 6",
                "verdict": nd.non_degenerate,
                "game": f.spec.kind.name(),
                "sup_loss": crate::report::loss_value(nd.sup_loss),
                "constant_loss": nd.constant_loss,
            })
        }
        other => bail!("unknown definition `{other}` (expected 3, 4, 5 or 6)"),
    })
}

fn corollary(args: &VerifyArgs, which: &str) -> Result<Value> {
    if which != "1" {
        bail!("unknown corollary `{which}` (expected 1)");
    }
    let space = match &args.input {
        Some(p) => inputs::dataset(p)?.space,
        None => InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0])?,
    };
    let (n, k) = (space.len(), args.k);
    let ds = args.game.d.map_or(vec![2, 3], |d| vec![d]);
    let mut results = Vec::new();
    let mut ok = space.is_uniform(1e-12) && k > 0 && n % k == 0;
    if ok {
        let total = search_size(n, k)?;
        let messages = MessageSpace::scalars(&(0..k).map(|m| m as f64).collect::<Vec<_>>())?;
        for &d in &ds {
            let spec = GameSpec::discrimination(d);
            let best = exhaustive_search(&space, &messages, &spec)?;
            let mut equal = 0u64;
            let mut attaining = 0u64;
            for i in 0..total {
                let p = Protocol::from_index(i, n, k);
                if p.class_sizes().iter().all(|&s| s == n / k) {
                    equal += 1;
                    if objective(&p, &space, &spec)? <= best.value + VALUE_TOLERANCE {
                        attaining += 1;
                    }
                }
            }
            ok &= equal == attaining;
            results.push(json!({
                "d": d,
                "optimum": best.value,
                "optimal_protocols": best.optimal.len(),
                "equal_mass_partitions": equal,
                "equal_mass_optimal": attaining,
            }));
        }
    }
    let mut convex = Vec::new();
    for d in [2, 3, 5, 41] {
        let c = convexity_check(d, 1e-3)?;
        ok &= c;
        convex.push(json!({ "d": d, "convex": c }));
    }
    Ok(json!({
        "check": "corollary 1",
        "verdict": ok,
        "inputs": n,
        "messages": k,
        "uniform_and_divisible": space.is_uniform(1e-12) && k > 0 && n % k == 0,
        "per_d": results,
        "convexity": convex,
    }))
}

pub fn run(global: &GlobalArgs, args: &VerifyArgs) -> Result<()> {
    if args.lemma.is_empty() && args.def.is_empty() && args.corollary.is_empty() {
        bail!("nothing to verify: pass --lemma, --def or --corollary");
    }
    let mut verdicts = Vec::new();
    for l in &args.lemma {
        verdicts.push(lemma(global, args, l)?);
    }
    for d in &args.def {
        verdicts.push(definition(global, args, d)?);
    }
    for c in &args.corollary {
        verdicts.push(corollary(args, c)?);
    }
    let all = verdicts.iter().all(|v| v["verdict"] == json!(true));
    let mut report = Report::new("verify", global);
    report.insert("verdicts", json!(verdicts));
    report.insert("all", all);
    report.emit(global)?;
    if let Some(want) = args.expect {
        let wrong: Vec<String> = verdicts
            .iter()
            .filter(|v| v["verdict"] != json!(want))
            .map(|v| v["check"].as_str().unwrap_or("?").to_string())
            .collect();
        if !wrong.is_empty() {
            return Err(ExpectationFailed(format!("expected {want} for: {}", wrong.join(", "))).into());
        }
    }
    Ok(())
}
