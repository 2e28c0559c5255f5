//! JSON group specifications.
//!
//! ```json
//! {"kind": "free", "rank": 2}
//! {"kind": "zn", "n": 2}
//! {"kind": "finite", "table": [[0,1],[1,0]], "generators": [1]}
//! {"kind": "sl2z"}
//! {"kind": "sl2z_semidirect"}
//! ```

use serde::{Deserialize, Serialize};

use super::{Group, GroupError, GroupKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Free {
        rank: usize,
    },
    Zn {
        n: usize,
    },
    Finite {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<usize>>,
    },
    Sl2z,
    Sl2zSemidirect,
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<GroupSpec, GroupError> {
        serde_json::from_str(text).map_err(|e| GroupError::InvalidSpec(e.to_string()))
    }

    pub fn build(&self) -> Result<Group, GroupError> {
        match self {
            GroupSpec::Free { rank } => Ok(Group::free(*rank)),
            GroupSpec::Zn { n } => Ok(Group::zn(*n)),
            GroupSpec::Finite { table, generators } => Group::finite(table.clone(), generators.clone()),
            GroupSpec::Sl2z => Ok(Group::sl2z()),
            GroupSpec::Sl2zSemidirect => Ok(Group::sl2z_semidirect()),
        }
    }

    pub fn of(group: &Group) -> GroupSpec {
        match group.kind() {
            GroupKind::Free { rank } => GroupSpec::Free { rank: *rank },
            GroupKind::Zn { n } => GroupSpec::Zn { n: *n },
            GroupKind::Finite { table, .. } => GroupSpec::Finite {
                table: table.as_ref().clone(),
                generators: Some(
                    group
                        .generators()
                        .iter()
                        .filter_map(|g| match g {
                            super::Element::Index(i) => Some(*i),
                            _ => None,
                        })
                        .collect(),
                ),
            },
            GroupKind::Sl2z => GroupSpec::Sl2z,
            GroupKind::Sl2zSemidirect => GroupSpec::Sl2zSemidirect,
        }
    }
}
