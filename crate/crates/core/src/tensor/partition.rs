use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::{MultipartiteOperator, SubsystemDims, TensorError};
use crate::C64;

/// Grouping of elementary subsystems into parties.
///
/// Stored 0-based; the text form is 1-based, e.g. `1,2|3,4` for the
/// bipartition {1,2}:{3,4}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Partition {
    groups: Vec<Vec<usize>>,
}

impl Partition {
    /// Groups of 0-based subsystem indices; must be disjoint, nonempty, and
    /// cover `0..K` where K is the total number of members.
    pub fn new(groups: Vec<Vec<usize>>) -> Result<Self, TensorError> {
        let k: usize = groups.iter().map(Vec::len).sum();
        if groups.is_empty() {
            return Err(TensorError::InvalidPartition("no groups".into()));
        }
        let mut seen = vec![false; k];
        for (g, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(TensorError::InvalidPartition(format!("group {} is empty", g + 1)));
            }
            for &i in group {
                if i >= k {
                    return Err(TensorError::InvalidPartition(format!(
                        "subsystem {} out of range 1..={k}",
                        i + 1
                    )));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(TensorError::InvalidPartition(format!(
                        "subsystem {} appears twice",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { groups })
    }

    /// Every subsystem its own party.
    pub fn finest(k: usize) -> Self {
        Self {
            groups: (0..k).map(|i| vec![i]).collect(),
        }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Number of parties K.
    pub fn num_parties(&self) -> usize {
        self.groups.len()
    }

    /// Number of elementary subsystems covered.
    pub fn num_subsystems(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Elementary subsystems in party order.
    pub fn order(&self) -> Vec<usize> {
        self.groups.iter().flatten().copied().collect()
    }

    /// True when the groups already list the subsystems as `0, 1, ..., K-1`.
    pub fn is_contiguous(&self) -> bool {
        self.order().iter().enumerate().all(|(k, &i)| k == i)
    }

    /// Brace label, e.g. `{1,2}:{3,4}`.
    pub fn braces(&self) -> String {
        self.groups
            .iter()
            .map(|g| {
                let members: Vec<String> = g.iter().map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", members.join(","))
            })
            .collect::<Vec<_>>()
            .join(":")
    }
}

impl FromStr for Partition {
    type Err = TensorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut groups = Vec::new();
        for part in s.trim().split('|') {
            let mut group = Vec::new();
            for item in part.split(',') {
                let item = item.trim();
                let index: usize = item.parse().map_err(|_| {
                    TensorError::InvalidPartition(format!("`{item}` is not a subsystem index"))
                })?;
                if index == 0 {
                    return Err(TensorError::InvalidPartition(
                        "subsystem indices are 1-based".into(),
                    ));
                }
                group.push(index - 1);
            }
            groups.push(group);
        }
        Self::new(groups)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .groups
            .iter()
            .map(|g| g.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", text.join("|"))
    }
}

impl TryFrom<String> for Partition {
    type Error = TensorError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Partition> for String {
    fn from(p: Partition) -> Self {
        p.to_string()
    }
}

/// Result of regrouping an operator by a partition.
#[derive(Debug, Clone)]
pub struct CoarseGrained {
    pub operator: MultipartiteOperator,
    /// `permutation[k]` is the original (0-based) subsystem placed at position `k`
    /// before grouping; the identity for contiguous partitions.
    pub permutation: Vec<usize>,
}

/// For subsystems reordered as `order`, maps each new flat index to the old one.
pub fn subsystem_permutation(
    dims: &SubsystemDims,
    order: &[usize],
) -> Result<(SubsystemDims, Vec<usize>), TensorError> {
    let n = dims.len();
    let mut check = order.to_vec();
    check.sort_unstable();
    if check != (0..n).collect::<Vec<_>>() {
        return Err(TensorError::InvalidPartition(format!(
            "{order:?} is not a permutation of {n} subsystems"
        )));
    }
    let new_dims = SubsystemDims::new(order.iter().map(|&i| dims.get(i)).collect())?;
    let mut old_idx = vec![0; n];
    let map = (0..dims.total())
        .map(|flat| {
            let new_idx = new_dims.unflatten_index(flat);
            for (k, &i) in order.iter().enumerate() {
                old_idx[i] = new_idx[k];
            }
            dims.flatten_index(&old_idx)
        })
        .collect();
    Ok((new_dims, map))
}

/// Conjugates a row-major D x D matrix by the basis permutation `map`.
pub(crate) fn permute_matrix(matrix: &[C64], map: &[usize]) -> Vec<C64> {
    let d = map.len();
    let mut out = Vec::with_capacity(d * d);
    for &row in map {
        out.extend(map.iter().map(|&col| matrix[row * d + col]));
    }
    out
}

impl MultipartiteOperator {
    /// Reorders the tensor factors: new subsystem `k` is old subsystem `order[k]`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<Self, TensorError> {
        let (new_dims, map) = subsystem_permutation(self.dims(), order)?;
        Ok(Self::from_parts_unchecked(new_dims, permute_matrix(self.as_slice(), &map)))
    }

    /// Groups subsystems into parties; non-contiguous groups are first brought
    /// together by a recorded subsystem permutation.
    pub fn coarse_grain(&self, partition: &Partition) -> Result<CoarseGrained, TensorError> {
        if partition.num_subsystems() != self.dims().len() {
            return Err(TensorError::InvalidPartition(format!(
                "partition `{partition}` covers {} subsystems but the operator has {}",
                partition.num_subsystems(),
                self.dims().len()
            )));
        }
        let permutation = partition.order();
        let permuted = if partition.is_contiguous() {
            self.clone()
        } else {
            self.permute_subsystems(&permutation)?
        };
        let party_dims = partition
            .groups()
            .iter()
            .map(|g| g.iter().map(|&i| self.dims().get(i)).product())
            .collect();
        let operator = permuted.with_dims(SubsystemDims::new(party_dims)?)?;
        Ok(CoarseGrained {
            operator,
            permutation,
        })
    }
}

/// All set partitions of `k` subsystems (restricted-growth order). Bell-number
/// growth limits this to `k <= 6`.
pub fn enumerate_partitions(k: usize) -> Result<Vec<Partition>, TensorError> {
    if k == 0 || k > 6 {
        return Err(TensorError::InvalidPartition(format!(
            "partition enumeration supports 1..=6 subsystems, got {k}"
        )));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; k];
    loop {
        let parts = labels.iter().max().unwrap() + 1;
        let mut groups = vec![Vec::new(); parts];
        for (i, &l) in labels.iter().enumerate() {
            groups[l].push(i);
        }
        out.push(Partition { groups });
        // next restricted growth string
        let mut i = k - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let prefix_max = labels[..i].iter().copied().max().unwrap();
            if labels[i] <= prefix_max {
                labels[i] += 1;
                labels[i + 1..].iter_mut().for_each(|l| *l = 0);
                break;
            }
            i -= 1;
        }
    }
}
