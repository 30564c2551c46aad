use anyhow::{bail, Context, Result};
use emcomm_core::io::write_protocol_csv;
use emcomm_core::metrics::message_variance;
use emcomm_core::model::game::GameKind;
use emcomm_core::model::message::MessageSpace;
use emcomm_core::model::protocol::Protocol;
use emcomm_core::objectives::objective;
use emcomm_core::optimize::{
    balanced_partition, exhaustive_search_with, kmeans_alternation, search_size, KmeansInit, PartitionFlavor,
};
use emcomm_core::Exec;
use serde_json::json;

use crate::args::{Flavor, GlobalArgs, Method, OptimizeArgs};
use crate::inputs;
use crate::report::{round12, write_file, Report};

fn parse_centroids(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(|p| {
            p.split(',')
                .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad centroid coordinate `{v}`")))
                .collect()
        })
        .collect()
}

/// Messages in order of first use, as symbol strings of one length.
pub fn canonical_messages(protocol: &Protocol) -> Result<(Protocol, MessageSpace)> {
    let k = protocol.unique_messages();
    let canonical = Protocol::new(protocol.canonical(), k)?;
    let vocab = k.clamp(1, 36) as u32;
    let mut len = 1;
    while (vocab as u64).pow(len as u32) < k as u64 {
        len += 1;
    }
    Ok((canonical, MessageSpace::first_sequences(vocab, len, k)?))
}

pub fn run(global: &GlobalArgs, args: &OptimizeArgs) -> Result<()> {
    let dataset = inputs::dataset(&args.input)?;
    let attrs = inputs::attributes(args.labels.as_deref(), &dataset)?;
    let spec = inputs::game_spec(&args.game, &attrs, global)?;
    let space = &dataset.space;
    let mut report = Report::new("optimize", global);
    report.insert("game", spec.kind.name());
    report.insert("k", args.k);

    let (protocol, trace) = match args.method {
        Method::Kmeans => {
            if spec.kind != GameKind::Reconstruction {
                bail!("k-means alternation applies to the reconstruction game only");
            }
            let init = match &args.centroids {
                Some(text) => KmeansInit::Centroids(parse_centroids(text)?),
                None => KmeansInit::Seeded(global.seed),
            };
            let r = kmeans_alternation(space, args.k, init, args.max_iters, args.tol)?;
            report.insert("method", "kmeans");
            report.insert("rounds", r.rounds);
            report.insert("converged", r.converged);
            report.insert("reseeds", r.reseeds);
            (r.protocol, r.trace)
        }
        Method::Exhaustive => {
            search_size(space.len(), args.k)?;
            let r = exhaustive_search_with(space, args.k, &spec, Exec::default())?;
            report.insert("method", "exhaustive");
            report.insert("evaluated", r.evaluated);
            report.insert("optimal_count", r.optimal.len());
            report.insert("optimal_up_to_relabeling", r.canonical.len());
            report.insert("uniform_optimum", r.uniform_optimum);
            let best = r.optimal.into_iter().next().context("empty search")?;
            (best, vec![r.value])
        }
        Method::Balanced => {
            let flavor = match args.flavor {
                Flavor::Greedy => PartitionFlavor::GreedyUniform,
                Flavor::Adversarial => PartitionFlavor::AdversarialAntipodal,
            };
            let p = balanced_partition(space, args.k, flavor)?;
            report.insert("method", "balanced");
            let value = objective(&p, space, &spec)?;
            (p, vec![value])
        }
    };

    let (protocol, messages) = canonical_messages(&protocol)?;
    let value = objective(&protocol, space, &spec);
    report.insert(
        "final",
        json!({
            "objective": value.as_ref().map_or_else(|e| json!({ "error": e.to_string() }), |v| json!(v)),
            "unique_messages": protocol.unique_messages(),
            "message_variance": message_variance(&protocol, space),
        }),
    );
    report.insert("trace", json!(trace));
    let assignment: Vec<String> = protocol.assignment().iter().map(|&m| messages.message(m).to_string()).collect();
    report.insert("protocol", json!(assignment));

    if let Some(dir) = &global.out {
        let mut buf = Vec::new();
        write_protocol_csv(&mut buf, &dataset.ids, &protocol, Some(&messages))?;
        write_file(&dir.join("protocol.csv"), &String::from_utf8(buf)?)?;
        let mut trace_csv = String::from("iteration,objective\n");
        for (i, v) in trace.iter().enumerate() {
            trace_csv.push_str(&format!("{i},{}\n", round12(*v)));
        }
        write_file(&dir.join("trace.csv"), &trace_csv)?;
    }
    report.emit(global)
}
