use anyhow::Result;
use emcomm_core::consistency::{semantic_consistency, spatial_meaningfulness};
use emcomm_core::games::{eval_game, synchronized_receiver, Evaluation};
use emcomm_core::model::game::GameKind;
use emcomm_core::objectives::objective;
use serde_json::{json, Value};

use crate::args::{DataArgs, GameArgs, GlobalArgs, MetricArgs};
use crate::commands::metrics::metric_fields;
use crate::inputs;
use crate::report::{info_scale, loss_value, Report};

pub fn run(
    global: &GlobalArgs,
    data: &DataArgs,
    game: &GameArgs,
    metrics: &MetricArgs,
    epsilon0: Option<f64>,
) -> Result<()> {
    let dataset = inputs::dataset(&data.input)?;
    let pf = inputs::protocol(&data.protocol, &dataset, data.vocab)?;
    let attrs = inputs::attributes(data.labels.as_deref(), &dataset)?;
    let spec = inputs::game_spec(game, &attrs, global)?;
    let space = &dataset.space;
    let protocol = &pf.protocol;
    let scale = match spec.kind {
        GameKind::Reconstruction => 1.0,
        _ => info_scale(global.log_base),
    };

    let mut report = Report::new("analyze", global);
    report.insert("game", spec.kind.name());
    report.insert("candidates", spec.candidates);
    report.insert("inputs", space.len());

    let loss = synchronized_receiver(protocol, space, &spec).and_then(|r| eval_game(protocol, &r, space, &spec));
    let loss = match loss {
        Ok(l) => {
            let mode = match l.evaluation {
                Evaluation::Exact => "exact",
                Evaluation::MonteCarlo { .. } => "monte-carlo",
            };
            json!({
                "expected": loss_value(l.expected.scale(scale)),
                "evaluation": mode,
                "std_error": l.std_error.map(|s| s * scale),
            })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    report.insert("loss", loss);

    let obj_scale = if spec.kind == GameKind::Supervised { 1.0 } else { scale };
    let obj = objective(protocol, space, &spec).map_or_else(|e| json!({ "error": e.to_string() }), |v| json!(v * obj_scale));
    report.insert("objective", obj);

    let sc = semantic_consistency(protocol, space);
    report.insert(
        "semantic_consistency",
        json!({
            "consistent": sc.consistent,
            "boundary": sc.boundary,
            "total_variance": sc.total,
            "explained_variance": sc.explained,
            "unexplained_variance": sc.unexplained,
        }),
    );

    let spatial = epsilon0
        .map(Ok)
        .unwrap_or_else(|| pf.messages.epsilon_m())
        .and_then(|eps| spatial_meaningfulness(protocol, space, &pf.messages, eps));
    let spatial: Value = match spatial {
        Ok(s) => json!({
            "meaningful": s.meaningful,
            "epsilon0": s.epsilon0,
            "epsilon_m": s.epsilon_m,
            "thresholds": s.checks,
            "warnings": s.warnings,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    report.insert("spatial_meaningfulness", spatial);

    let fields = metric_fields(protocol, &pf.messages, &dataset, &attrs, metrics, global.seed);
    report.insert("metrics", serde_json::Value::Object(fields));
    report.emit(global)
}
