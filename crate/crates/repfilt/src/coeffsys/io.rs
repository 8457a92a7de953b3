//! Coefficient-system file format (UTF-8 JSON).
//!
//! Schema: `{name, base, flags, groups:[{class_key, indecomposables:
//! [{label,dim}], unit, weyl:[[perm]], res:{class:[[int]]},
//! ind:{class:[[int]]}}]}`. Matrices are row = source indecomposable,
//! column = target indecomposable; `weyl` lists one label permutation per
//! Weyl-group element in the canonical element order of `weyl_group`;
//! tables refer to the canonical chosen embedding for each class pair (the
//! minimal subgroup of the lower class inside the upper representative).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::SystemError;
use crate::groups::PermGroup;

use super::{Base, ClassData, CoefficientSystem, Flags, Indecomposable};

#[derive(Serialize, Deserialize)]
struct FileSystem {
    name: String,
    base: String,
    flags: FileFlags,
    groups: Vec<FileClass>,
}

#[derive(Serialize, Deserialize)]
struct FileFlags {
    semisimple: bool,
    frobenius: bool,
    mackey: bool,
}

#[derive(Serialize, Deserialize)]
struct FileClass {
    class_key: FileClassKey,
    indecomposables: Vec<FileIndec>,
    unit: Option<String>,
    weyl: Option<Vec<Vec<u16>>>,
    res: Option<BTreeMap<String, Vec<Vec<i64>>>>,
    ind: Option<BTreeMap<String, Vec<Vec<i64>>>>,
}

#[derive(Serialize, Deserialize)]
struct FileClassKey {
    index: usize,
    order: usize,
    name: String,
}

#[derive(Serialize, Deserialize)]
struct FileIndec {
    label: String,
    dim: u32,
}

fn to_file(sys: &CoefficientSystem, g: &PermGroup) -> Result<FileSystem, SystemError> {
    let data = g.subgroup_data()?;
    let groups = sys
        .classes
        .iter()
        .enumerate()
        .map(|(c, class)| FileClass {
            class_key: FileClassKey {
                index: c,
                order: data.classes[c].order,
                name: g.class_name(c),
            },
            indecomposables: class
                .indecs
                .iter()
                .map(|i| FileIndec {
                    label: i.label.clone(),
                    dim: i.dim,
                })
                .collect(),
            unit: Some(class.indecs[class.unit].label.clone()),
            weyl: Some(class.weyl_perms.clone()),
            res: Some(
                class
                    .res
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect(),
            ),
            ind: Some(
                class
                    .ind
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect(),
            ),
        })
        .collect();
    Ok(FileSystem {
        name: sys.name.clone(),
        base: sys.base.as_str(),
        flags: FileFlags {
            semisimple: sys.flags.semisimple,
            frobenius: sys.flags.frobenius,
            mackey: sys.flags.mackey,
        },
        groups,
    })
}

/// Canonical serialized form: pretty JSON with sorted table keys and a
/// trailing newline. Saving the result of a load reproduces the bytes.
pub fn system_to_canonical_json(
    sys: &CoefficientSystem,
    g: &PermGroup,
) -> Result<String, SystemError> {
    let file = to_file(sys, g)?;
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| SystemError::File {
        path: "<memory>".into(),
        reason: e.to_string(),
    })?;
    text.push('\n');
    Ok(text)
}

pub fn save_system(sys: &CoefficientSystem, g: &PermGroup, path: &Path) -> Result<(), SystemError> {
    let text = system_to_canonical_json(sys, g)?;
    std::fs::write(path, text).map_err(|e| SystemError::File {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn parse_system_json(text: &str, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
    let file: FileSystem = serde_json::from_str(text).map_err(|e| SystemError::File {
        path: "<input>".into(),
        reason: e.to_string(),
    })?;
    let data = g.subgroup_data()?;
    if file.groups.len() != data.classes.len() {
        return Err(SystemError::Structural {
            location: "groups".into(),
            reason: format!(
                "file lists {} subgroup classes, group {} has {}",
                file.groups.len(),
                g.name(),
                data.classes.len()
            ),
        });
    }
    let mut classes = Vec::with_capacity(file.groups.len());
    for (c, fc) in file.groups.iter().enumerate() {
        let loc = format!("class {} ({})", c, fc.class_key.name);
        if fc.class_key.index != c {
            return Err(SystemError::Structural {
                location: loc,
                reason: "class entries must appear in index order".into(),
            });
        }
        if fc.class_key.order != data.classes[c].order {
            return Err(SystemError::Structural {
                location: loc,
                reason: format!(
                    "class order {} does not match the group's class order {}",
                    fc.class_key.order, data.classes[c].order
                ),
            });
        }
        let indecs: Vec<Indecomposable> = fc
            .indecomposables
            .iter()
            .map(|i| Indecomposable {
                label: i.label.clone(),
                dim: i.dim,
            })
            .collect();
        let unit_label = fc.unit.as_ref().ok_or_else(|| SystemError::Structural {
            location: loc.clone(),
            reason: "missing unit label".into(),
        })?;
        let unit = indecs
            .iter()
            .position(|i| &i.label == unit_label)
            .ok_or_else(|| SystemError::Structural {
                location: loc.clone(),
                reason: format!("unit label `{unit_label}` is not an indecomposable"),
            })?;
        let weyl_perms = fc.weyl.clone().ok_or_else(|| SystemError::Structural {
            location: loc.clone(),
            reason: "missing Weyl table".into(),
        })?;
        let parse_keys = |m: &Option<BTreeMap<String, Vec<Vec<i64>>>>,
                          what: &str|
         -> Result<BTreeMap<usize, Vec<Vec<i64>>>, SystemError> {
            let m = m.as_ref().ok_or_else(|| SystemError::Structural {
                location: loc.clone(),
                reason: format!("missing {what} tables"),
            })?;
            m.iter()
                .map(|(k, v)| {
                    let key: usize = k.parse().map_err(|_| SystemError::Structural {
                        location: loc.clone(),
                        reason: format!("bad {what} key `{k}`"),
                    })?;
                    Ok((key, v.clone()))
                })
                .collect()
        };
        classes.push(ClassData {
            indecs,
            unit,
            weyl_perms,
            res: parse_keys(&fc.res, "res")?,
            ind: parse_keys(&fc.ind, "ind")?,
        });
    }
    Ok(CoefficientSystem {
        name: file.name,
        base: Base::parse(&file.base)?,
        flags: Flags {
            semisimple: file.flags.semisimple,
            frobenius: file.flags.frobenius,
            mackey: file.flags.mackey,
        },
        classes,
    })
}

/// Loads and structurally checks a system file against the group. The
/// returned system still needs `validate` for the identity checks; loading
/// only guarantees well-formedness.
pub fn load_system(path: &Path, g: &PermGroup) -> Result<CoefficientSystem, SystemError> {
    let text = std::fs::read_to_string(path).map_err(|e| SystemError::File {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_system_json(&text, g)
}
