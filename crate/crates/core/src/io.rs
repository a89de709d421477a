//! JSON formats for processes and supermaps.
//!
//! Matrix entries are `[re, im]` pairs in row-major nesting.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::Process;
use crate::supermap::BipartiteSupermap;
use crate::tensor::{ComplexMatrix, SystemDims, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessJson {
    #[serde(rename = "in")]
    pub in_dims: Vec<usize>,
    #[serde(rename = "out")]
    pub out_dims: Vec<usize>,
    pub choi: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotsJson {
    pub a: [usize; 2],
    pub b: [usize; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupermapJson {
    pub process: ProcessJson,
    pub slots: SlotsJson,
}

impl From<&Process> for ProcessJson {
    fn from(p: &Process) -> Self {
        ProcessJson {
            in_dims: p.in_sys().dims().to_vec(),
            out_dims: p.out_sys().dims().to_vec(),
            choi: p
                .choi()
                .iter_rows()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<ProcessJson> for Process {
    type Error = Error;

    fn try_from(j: ProcessJson) -> Result<Process> {
        let in_sys = SystemDims::new(j.in_dims).map_err(format_err)?;
        let out_sys = SystemDims::new(j.out_dims).map_err(format_err)?;
        let rows: Vec<Vec<C64>> = j
            .choi
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        let choi = if rows.is_empty() {
            ComplexMatrix::zeros(0, 0)
        } else {
            ComplexMatrix::from_rows(&rows).map_err(format_err)?
        };
        Process::new(in_sys, out_sys, choi).map_err(format_err)
    }
}

impl From<&BipartiteSupermap> for SupermapJson {
    fn from(w: &BipartiteSupermap) -> Self {
        let (a, b) = (w.slot_a(), w.slot_b());
        SupermapJson {
            process: w.body().into(),
            slots: SlotsJson {
                a: [a.0, a.1],
                b: [b.0, b.1],
            },
        }
    }
}

impl TryFrom<SupermapJson> for BipartiteSupermap {
    type Error = Error;

    fn try_from(j: SupermapJson) -> Result<BipartiteSupermap> {
        let body = Process::try_from(j.process)?;
        BipartiteSupermap::new(
            body,
            (j.slots.a[0], j.slots.a[1]),
            (j.slots.b[0], j.slots.b[1]),
        )
        .map_err(format_err)
    }
}

fn format_err(e: Error) -> Error {
    match e {
        Error::Format(_) => e,
        other => Error::Format(other.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn process_to_json(p: &Process) -> String {
    serde_json::to_string(&ProcessJson::from(p)).expect("finite matrices always serialise")
}

pub fn process_from_json(s: &str) -> Result<Process> {
    serde_json::from_str::<ProcessJson>(s)
        .map_err(json_err)?
        .try_into()
}

pub fn supermap_to_json(w: &BipartiteSupermap) -> String {
    serde_json::to_string(&SupermapJson::from(w)).expect("finite matrices always serialise")
}

pub fn supermap_from_json(s: &str) -> Result<BipartiteSupermap> {
    serde_json::from_str::<SupermapJson>(s)
        .map_err(json_err)?
        .try_into()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_process(path: &Path) -> Result<Process> {
    process_from_json(&read(path)?)
}

pub fn read_supermap(path: &Path) -> Result<BipartiteSupermap> {
    supermap_from_json(&read(path)?)
}

pub fn write_process(path: &Path, p: &Process) -> Result<()> {
    std::fs::write(path, process_to_json(p))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_supermap(path: &Path, w: &BipartiteSupermap) -> Result<()> {
    std::fs::write(path, supermap_to_json(w))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supermap::{fixed_order_a_then_b, SlotDims};

    #[test]
    fn process_round_trip_is_exact() {
        let p =
            Process::random_causal_channel(&SystemDims::of(&[2]), &SystemDims::of(&[3]), None, 4)
                .unwrap();
        let back = process_from_json(&process_to_json(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn supermap_round_trip() {
        let w = fixed_order_a_then_b(SlotDims::uniform(2)).unwrap();
        let back = supermap_from_json(&supermap_to_json(&w)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn layout_matches_format() {
        let p = Process::discard(&SystemDims::of(&[1]));
        assert_eq!(
            process_to_json(&p),
            r#"{"in":[1],"out":[],"choi":[[[1.0,0.0]]]}"#
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(process_from_json("{"), Err(Error::Format(_))));
        let wrong = r#"{"in":[2],"out":[],"choi":[[[1.0,0.0]]]}"#;
        assert!(matches!(process_from_json(wrong), Err(Error::Format(_))));
        let ragged = r#"{"in":[2],"out":[],"choi":[[[1.0,0.0],[0.0,0.0]],[[1.0,0.0]]]}"#;
        assert!(matches!(process_from_json(ragged), Err(Error::Format(_))));
        let zero = r#"{"in":[0],"out":[],"choi":[]}"#;
        assert!(process_from_json(zero).is_err());
    }
}
