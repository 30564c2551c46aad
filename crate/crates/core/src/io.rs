//! Reading and writing input spaces, protocols and label tables.
//!
//! Input spaces: CSV `id,x0,x1,...,weight[,label]` or JSON
//! `[{"id", "x": [...], "weight", "label"?}]`. Protocols: CSV `id,message`
//! or JSON `[{"id", "message"}]`, messages written as symbol strings.
//! Label tables: CSV `id,attr1,attr2,...`.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::input::InputSpace;
use crate::model::labels::LabelMap;
use crate::model::message::{parse_symbols, symbols_to_string, MessageMetric, MessageSpace};
use crate::model::protocol::Protocol;

/// A parsed input-space file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub space: InputSpace,
    pub labels: Option<LabelMap>,
}

impl Dataset {
    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()
    }
}

fn parse_err(line: u64, column: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => parse_err(p.line(), 1, e.to_string()),
        None => Error::Io(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    if e.is_io() {
        Error::Io(e.to_string())
    } else {
        parse_err(e.line() as u64, e.column() as u64, e.to_string())
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input)
}

fn build_dataset(ids: Vec<String>, points: Vec<Vec<f64>>, weights: Vec<f64>, labels: Option<Vec<String>>) -> Result<Dataset> {
    let mut seen = HashMap::new();
    for (i, id) in ids.iter().enumerate() {
        if let Some(prev) = seen.insert(id.as_str(), i) {
            return Err(Error::InvalidInputSpace(format!("duplicate id `{id}` (rows {} and {})", prev + 1, i + 1)));
        }
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidInputSpace("weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        warn!("weights sum to {total}; normalizing");
    }
    let space = InputSpace::from_masses(points, &weights)?;
    let labels = labels.map(|l| LabelMap::from_strings(&l)).transpose()?;
    Ok(Dataset { ids, space, labels })
}

/// Parses an input-space CSV.
pub fn read_input_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.first() != Some(&"id") {
        return Err(parse_err(1, 1, "first column must be `id`"));
    }
    let weight_col = cols
        .iter()
        .position(|&c| c == "weight")
        .ok_or_else(|| parse_err(1, 1, "missing `weight` column"))?;
    let dims = weight_col - 1;
    if dims == 0 {
        return Err(parse_err(1, 2, "need at least one coordinate column"));
    }
    for (j, &c) in cols[1..weight_col].iter().enumerate() {
        if c != format!("x{j}") {
            return Err(parse_err(1, j as u64 + 2, format!("expected column `x{j}`, found `{c}`")));
        }
    }
    let label_col = match cols.len() - weight_col {
        1 => None,
        2 if cols[weight_col + 1] == "label" => Some(weight_col + 1),
        _ => return Err(parse_err(1, weight_col as u64 + 2, "only `label` may follow `weight`")),
    };
    let mut ids = Vec::new();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut labels = label_col.map(|_| Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |j: usize| -> Result<f64> {
            let raw = rec.get(j).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, j as u64 + 1, format!("`{raw}` is not a finite number")))
        };
        ids.push(rec.get(0).unwrap_or("").to_string());
        points.push((1..=dims).map(field).collect::<Result<Vec<_>>>()?);
        weights.push(field(weight_col)?);
        if let (Some(l), Some(c)) = (labels.as_mut(), label_col) {
            l.push(rec.get(c).unwrap_or("").to_string());
        }
    }
    if ids.is_empty() {
        return Err(parse_err(2, 1, "no data rows"));
    }
    build_dataset(ids, points, weights, labels)
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonPoint {
    id: String,
    x: Vec<f64>,
    weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

pub fn read_input_json(text: &str) -> Result<Dataset> {
    let rows: Vec<JsonPoint> = serde_json::from_str(text).map_err(json_err)?;
    if rows.is_empty() {
        return Err(parse_err(1, 1, "no points"));
    }
    let has_labels = rows[0].label.is_some();
    if rows.iter().any(|r| r.label.is_some() != has_labels) {
        return Err(Error::InvalidInputSpace("labels must be given for all points or none".into()));
    }
    let labels = has_labels.then(|| rows.iter().map(|r| r.label.clone().unwrap_or_default()).collect());
    let ids = rows.iter().map(|r| r.id.clone()).collect();
    let weights = rows.iter().map(|r| r.weight).collect();
    let points = rows.into_iter().map(|r| r.x).collect();
    build_dataset(ids, points, weights, labels)
}

/// Reads an input space, choosing the format by extension.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = read_file(path)?;
    if is_json(path) {
        read_input_json(&text)
    } else {
        read_input_csv(text.as_bytes())
    }
}

/// Protocol together with the messages it uses (in order of first use).
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolFile {
    pub protocol: Protocol,
    pub messages: MessageSpace,
}

fn build_protocol(rows: Vec<(u64, String, String)>, dataset: &Dataset, vocab: Option<u32>) -> Result<ProtocolFile> {
    let index = dataset.index_of();
    let mut assignment = vec![usize::MAX; dataset.ids.len()];
    let mut atoms: Vec<Vec<u32>> = Vec::new();
    let mut lookup: HashMap<Vec<u32>, usize> = HashMap::new();
    for (line, id, message) in rows {
        let &x = index
            .get(id.as_str())
            .ok_or_else(|| parse_err(line, 1, format!("unknown id `{id}`")))?;
        if assignment[x] != usize::MAX {
            return Err(parse_err(line, 1, format!("id `{id}` assigned twice")));
        }
        let symbols = parse_symbols(&message).map_err(|e| parse_err(line, 2, e.to_string()))?;
        let next = atoms.len();
        let m = *lookup.entry(symbols.clone()).or_insert_with(|| {
            atoms.push(symbols);
            next
        });
        assignment[x] = m;
    }
    if let Some(x) = assignment.iter().position(|&m| m == usize::MAX) {
        return Err(Error::InvalidProtocol(format!("no message for id `{}`", dataset.ids[x])));
    }
    let needed = atoms.iter().flatten().max().map_or(1, |m| m + 1);
    let vocab = vocab.unwrap_or(needed).max(needed);
    let fixed = atoms.iter().all(|a| a.len() == atoms[0].len());
    let metric = if fixed { MessageMetric::Hamming } else { MessageMetric::Edit };
    let k = atoms.len();
    let messages = MessageSpace::symbols_with_metric(vocab, atoms, metric)?;
    Ok(ProtocolFile {
        protocol: Protocol::new(assignment, k)?,
        messages,
    })
}

pub fn read_protocol_csv<R: Read>(input: R, dataset: &Dataset, vocab: Option<u32>) -> Result<ProtocolFile> {
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "message"] {
        return Err(parse_err(1, 1, "protocol header must be `id,message`"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec[0].to_string(), rec[1].to_string()));
    }
    build_protocol(rows, dataset, vocab)
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonAssignment {
    id: String,
    message: String,
}

pub fn read_protocol_json(text: &str, dataset: &Dataset, vocab: Option<u32>) -> Result<ProtocolFile> {
    let rows: Vec<JsonAssignment> = serde_json::from_str(text).map_err(json_err)?;
    build_protocol(
        rows.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r.id, r.message)).collect(),
        dataset,
        vocab,
    )
}

pub fn load_protocol(path: &Path, dataset: &Dataset, vocab: Option<u32>) -> Result<ProtocolFile> {
    let text = read_file(path)?;
    if is_json(path) {
        read_protocol_json(&text, dataset, vocab)
    } else {
        read_protocol_csv(text.as_bytes(), dataset, vocab)
    }
}

/// Attribute columns of a label table, in header order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelTable {
    pub names: Vec<String>,
    pub attributes: Vec<LabelMap>,
}

pub fn read_labels_csv<R: Read>(input: R, dataset: &Dataset) -> Result<LabelTable> {
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.get(0) != Some("id") || headers.len() < 2 {
        return Err(parse_err(1, 1, "label header must be `id,attr...`"));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let index = dataset.index_of();
    let mut columns: Vec<Vec<Option<String>>> = vec![vec![None; dataset.ids.len()]; names.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let &x = index
            .get(&rec[0])
            .ok_or_else(|| parse_err(line, 1, format!("unknown id `{}`", &rec[0])))?;
        for (j, col) in columns.iter_mut().enumerate() {
            col[x] = Some(rec[j + 1].to_string());
        }
    }
    let attributes = columns
        .into_iter()
        .zip(&names)
        .map(|(col, name)| {
            let vals: Option<Vec<String>> = col.into_iter().collect();
            let vals = vals.ok_or_else(|| Error::InvalidLabels(format!("attribute `{name}` misses some ids")))?;
            LabelMap::from_strings(&vals)
        })
        .collect::<Result<_>>()?;
    Ok(LabelTable { names, attributes })
}

pub fn load_labels(path: &Path, dataset: &Dataset) -> Result<LabelTable> {
    read_labels_csv(read_file(path)?.as_bytes(), dataset)
}

/// Message string for message `m`: its symbols, or the index in base 36
/// when the space has no symbol form.
pub fn message_string(messages: Option<&MessageSpace>, m: usize) -> String {
    match messages.and_then(|s| (m < s.len()).then(|| s.message(m).to_string())) {
        Some(s) => s,
        None => symbols_to_string(&[m as u32]),
    }
}

pub fn write_protocol_csv<W: Write>(out: W, ids: &[String], protocol: &Protocol, messages: Option<&MessageSpace>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "message"]).map_err(csv_err)?;
    for (id, &m) in ids.iter().zip(protocol.assignment()) {
        w.write_record([id.as_str(), &message_string(messages, m)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_input_csv<W: Write>(out: W, dataset: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dims = dataset.space.dim();
    let mut header: Vec<String> = vec!["id".into()];
    header.extend((0..dims).map(|j| format!("x{j}")));
    header.push("weight".into());
    if dataset.labels.is_some() {
        header.push("label".into());
    }
    w.write_record(&header).map_err(csv_err)?;
    for (i, id) in dataset.ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(dataset.space.point(i).iter().map(|v| v.to_string()));
        row.push(dataset.space.weight(i).to_string());
        if let Some(l) = &dataset.labels {
            row.push(l.names()[l.label(i)].clone());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
