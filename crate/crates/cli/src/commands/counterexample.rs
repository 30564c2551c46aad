use anyhow::Result;
use emcomm_core::counterexamples::{build_anticonsistent_optimal, build_thm5_instance, verify_thm2, verify_thm5, Verdict};
use emcomm_core::games::{DiscriminationReceiver, Receiver};
use emcomm_core::io::{write_input_csv, write_protocol_csv, Dataset};
use emcomm_core::model::input::InputSpace;
use emcomm_core::model::message::MessageSpace;
use emcomm_core::model::protocol::Protocol;
use serde_json::json;

use crate::args::{GlobalArgs, Which};
use crate::report::{write_file, write_json, Report};
use crate::ExpectationFailed;

fn dataset(space: InputSpace) -> Dataset {
    Dataset {
        ids: (1..=space.len()).map(|i| format!("x{i}")).collect(),
        space,
        labels: None,
    }
}

fn write_files(dir: &std::path::Path, prefix: &str, data: &Dataset, protocol: &Protocol, messages: &MessageSpace) -> Result<()> {
    let mut buf = Vec::new();
    write_input_csv(&mut buf, data)?;
    write_file(&dir.join(format!("{prefix}-space.csv")), &String::from_utf8(buf)?)?;
    let mut buf = Vec::new();
    write_protocol_csv(&mut buf, &data.ids, protocol, Some(messages))?;
    write_file(&dir.join(format!("{prefix}-protocol.csv")), &String::from_utf8(buf)?)?;
    Ok(())
}

pub fn run(global: &GlobalArgs, which: Which, expect: Option<bool>) -> Result<()> {
    let (name, verdict): (&str, Verdict) = match which {
        Which::Thm5 => ("thm5", verify_thm5()?),
        Which::Thm2 => ("thm2", verify_thm2()?),
    };
    if let Some(dir) = &global.out {
        match which {
            Which::Thm5 => {
                let inst = build_thm5_instance();
                let data = dataset(inst.space.clone());
                // symbol k-1 stands for message k
                let symbols = MessageSpace::first_sequences(6, 1, 6)?;
                write_files(dir, name, &data, &inst.protocol, &symbols)?;
                if let Receiver::Discrimination(DiscriminationReceiver::Dense(t)) = &inst.receiver {
                    write_json(&dir.join(format!("{name}-receiver.json")), t.to_json(Some(&inst.messages))?)?;
                }
            }
            Which::Thm2 => {
                let b = InputSpace::uniform_scalars(&[0.0, 1.0, 2.0, 3.0])?;
                let built = build_anticonsistent_optimal(&b, 2)?;
                let symbols = MessageSpace::first_sequences(2, 1, 2)?;
                write_files(dir, name, &dataset(b), &built.protocol, &symbols)?;
            }
        }
    }
    let mut report = Report::new("counterexample", global);
    report.insert("which", name);
    report.insert("verdict", serde_json::to_value(&verdict)?);
    report.insert("all_passed", verdict.all_passed);
    report.insert(
        "first_failure",
        verdict.first_failure().map_or(json!(null), |s| json!(s.step.to_string())),
    );
    report.emit(global)?;
    if let Some(want) = expect {
        if want != verdict.all_passed {
            return Err(ExpectationFailed(format!("{name}: expected {want}, got {}", verdict.all_passed)).into());
        }
    }
    Ok(())
}
