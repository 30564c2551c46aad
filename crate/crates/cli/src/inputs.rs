//! File loading with input errors tagged for exit status 2.

use std::path::Path;

use anyhow::{bail, Result};
use emcomm_core::io::{self, Dataset, ProtocolFile};
use emcomm_core::model::game::{GameKind, GameSpec};
use emcomm_core::model::labels::LabelMap;

use crate::args::{GameArgs, GlobalArgs};
use crate::InputFailure;

fn tag(path: &Path, e: emcomm_core::Error) -> anyhow::Error {
    anyhow::Error::new(InputFailure(format!("{}: {e}", path.display())))
}

pub fn dataset(path: &Path) -> Result<Dataset> {
    io::load_dataset(path).map_err(|e| tag(path, e))
}

pub fn protocol(path: &Path, data: &Dataset, vocab: Option<u32>) -> Result<ProtocolFile> {
    io::load_protocol(path, data, vocab).map_err(|e| tag(path, e))
}

/// Named attributes from a label table, or the input file's label column.
pub fn attributes(labels: Option<&Path>, data: &Dataset) -> Result<Vec<(String, LabelMap)>> {
    if let Some(path) = labels {
        let table = io::load_labels(path, data).map_err(|e| tag(path, e))?;
        return Ok(table.names.into_iter().zip(table.attributes).collect());
    }
    Ok(data.labels.iter().map(|l| ("label".to_string(), l.clone())).collect())
}

pub fn require<'a>(path: Option<&'a Path>, flag: &str) -> Result<&'a Path> {
    match path {
        Some(p) => Ok(p),
        None => Err(anyhow::Error::new(InputFailure(format!("--{flag} is required here")))),
    }
}

/// Game spec for the chosen game, seeded from the global flags.
pub fn game_spec(game: &GameArgs, attrs: &[(String, LabelMap)], global: &GlobalArgs) -> Result<GameSpec> {
    let kind = GameKind::from(game.game);
    let label = || -> Result<LabelMap> {
        match &game.label_attr {
            Some(name) => match attrs.iter().find(|(n, _)| n == name) {
                Some((_, l)) => Ok(l.clone()),
                None => bail!("no attribute named `{name}`"),
            },
            None => match attrs.first() {
                Some((_, l)) => Ok(l.clone()),
                None => bail!("the {} game needs labels", kind.name()),
            },
        }
    };
    let spec = match kind {
        GameKind::Reconstruction => GameSpec::reconstruction(),
        GameKind::Discrimination => GameSpec::discrimination(game.candidates()),
        GameKind::Global => GameSpec::global(),
        GameKind::Supervised => GameSpec::supervised(game.candidates(), label()?),
        GameKind::Classification => GameSpec::classification(label()?),
    };
    Ok(spec.with_seed(global.seed).with_samples(global.samples))
}
