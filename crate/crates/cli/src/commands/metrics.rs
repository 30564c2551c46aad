use anyhow::Result;
use emcomm_core::io::Dataset;
use emcomm_core::metrics::{
    cluster_variance, discrimination_accuracy, disentanglement, message_variance, purity, random_baseline, topsim,
    AccuracyReceiver, DisentanglementKind, PurityMode,
};
use emcomm_core::model::labels::LabelMap;
use emcomm_core::model::message::{parse_symbols, MessageSpace};
use emcomm_core::model::protocol::Protocol;
use emcomm_core::Error;
use serde_json::{json, Map, Value};

use crate::args::{DataArgs, GlobalArgs, MetricArgs};
use crate::inputs;
use crate::report::Report;

fn error_entry(e: impl std::fmt::Display) -> Value {
    json!({ "error": e.to_string() })
}

fn entry(r: emcomm_core::Result<f64>) -> Value {
    r.map_or_else(error_entry, |v| json!(v))
}

/// The flat metric table; failures become `{"error": ...}` entries.
pub fn metric_fields(
    protocol: &Protocol,
    messages: &MessageSpace,
    data: &Dataset,
    attrs: &[(String, LabelMap)],
    args: &MetricArgs,
    seed: u64,
) -> Map<String, Value> {
    let space = &data.space;
    let labels: Vec<LabelMap> = attrs.iter().map(|(_, l)| l.clone()).collect();
    let mut m = Map::new();
    m.insert("unique_messages".into(), json!(protocol.unique_messages()));
    m.insert("message_variance".into(), json!(message_variance(protocol, space)));

    let metric = |p: &Protocol| Ok(message_variance(p, space));
    match random_baseline(protocol, space, metric, args.repeats, seed) {
        Ok(b) => {
            m.insert("baseline_mean".into(), json!(b.mean));
            m.insert("baseline_std".into(), json!(b.std));
            if !b.warnings.is_empty() {
                m.insert("baseline_warnings".into(), json!(b.warnings));
            }
        }
        Err(e) => {
            m.insert("baseline_mean".into(), error_entry(&e));
            m.insert("baseline_std".into(), error_entry(&e));
        }
    }

    let no_labels = || error_entry("no labels given");
    let p = if labels.is_empty() {
        no_labels()
    } else {
        entry(purity(protocol, &labels, PurityMode::Attribute(0)))
    };
    m.insert("purity".into(), p);
    let p = if labels.is_empty() {
        no_labels()
    } else {
        entry(purity(protocol, &labels, PurityMode::Max))
    };
    m.insert("max_purity".into(), p);

    let t = match topsim(protocol, space, messages) {
        Ok(v) => json!(v),
        Err(Error::ZeroVariance(_)) => json!("undefined"),
        Err(e) => error_entry(e),
    };
    m.insert("topsim".into(), t);

    for (key, kind) in [
        ("posdis", DisentanglementKind::PosDis),
        ("bosdis", DisentanglementKind::BosDis),
        ("sposdis", DisentanglementKind::SPosDis),
    ] {
        m.insert(key.into(), entry(disentanglement(protocol, messages, &labels, kind)));
    }
    m.insert("disentanglement_normalization".into(), json!("mean over units"));

    let cv = if args.groups.is_empty() {
        error_entry("no symbol groups given")
    } else {
        args.groups
            .iter()
            .map(|g| parse_symbols(g))
            .collect::<emcomm_core::Result<Vec<_>>>()
            .and_then(|groups| cluster_variance(protocol, space, messages, &groups))
            .map_or_else(error_entry, |v| json!(v))
    };
    m.insert("cluster_variance".into(), cv);

    let acc = discrimination_accuracy(protocol, space, AccuracyReceiver::Synchronized, args.accuracy_d, seed, args.trials)
        .map(|r| r.accuracy);
    m.insert("disc_accuracy".into(), entry(acc));
    m.insert("disc_accuracy_candidates".into(), json!(args.accuracy_d));
    m
}

pub fn run(global: &GlobalArgs, data: &DataArgs, args: &MetricArgs) -> Result<()> {
    let dataset = inputs::dataset(&data.input)?;
    let pf = inputs::protocol(&data.protocol, &dataset, data.vocab)?;
    let attrs = inputs::attributes(data.labels.as_deref(), &dataset)?;
    let mut report = Report::new("metrics", global);
    for (k, v) in metric_fields(&pf.protocol, &pf.messages, &dataset, &attrs, args, global.seed) {
        report.insert(&k, v);
    }
    report.emit(global)
}
