//! Either index behind one interface, plus index files.

use std::fs;
use std::path::Path;

use gridmatch_core::geometry::PointSet;
use gridmatch_core::index::{
    peek_kind, CompactIndex, IndexKind, MultiSnapIndex, QueryMode, QueryOptions, QueryResult, Registry,
};

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Compact,
    MultiSnap,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Compact => "compact",
            Kind::MultiSnap => "multisnap",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyIndex {
    Compact(CompactIndex),
    MultiSnap(MultiSnapIndex),
}

impl AnyIndex {
    pub fn new(kind: Kind, max_level: u32, budget: u64) -> Result<Self, Error> {
        Ok(match kind {
            Kind::Compact => AnyIndex::Compact(CompactIndex::new(max_level)?),
            Kind::MultiSnap => AnyIndex::MultiSnap(MultiSnapIndex::with_budget(max_level, budget)?),
        })
    }

    pub fn build(kind: Kind, max_level: u32, budget: u64, sets: Vec<PointSet>) -> Result<Self, Error> {
        let mut index = Self::new(kind, max_level, budget)?;
        for set in sets {
            index.insert(set)?;
        }
        Ok(index)
    }

    pub fn insert(&mut self, set: PointSet) -> Result<(), Error> {
        match self {
            AnyIndex::Compact(i) => i.insert(set)?,
            AnyIndex::MultiSnap(i) => i.insert(set)?,
        };
        Ok(())
    }

    pub fn kind(&self) -> Kind {
        match self {
            AnyIndex::Compact(_) => Kind::Compact,
            AnyIndex::MultiSnap(_) => Kind::MultiSnap,
        }
    }

    pub fn max_level(&self) -> u32 {
        match self {
            AnyIndex::Compact(i) => i.max_level(),
            AnyIndex::MultiSnap(i) => i.max_level(),
        }
    }

    pub fn registry(&self) -> &Registry {
        match self {
            AnyIndex::Compact(i) => i.registry(),
            AnyIndex::MultiSnap(i) => i.registry(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            AnyIndex::Compact(i) => i.node_count(),
            AnyIndex::MultiSnap(i) => i.node_count(),
        }
    }

    /// `(cardinality, nodes, leaves)` per trie.
    pub fn trie_sizes(&self) -> Vec<(usize, usize, usize)> {
        let tries = match self {
            AnyIndex::Compact(i) => i.tries(),
            AnyIndex::MultiSnap(i) => i.tries(),
        };
        tries
            .iter()
            .map(|(&k, t)| (k, t.node_count(), t.leaf_count()))
            .collect()
    }

    /// The multisnap index only answers nearest queries.
    pub fn query(
        &self,
        query: &PointSet,
        mode: QueryMode,
        options: &QueryOptions,
    ) -> Result<QueryResult, Error> {
        match self {
            AnyIndex::Compact(i) => Ok(i.query(query, mode, options)),
            AnyIndex::MultiSnap(i) => match mode {
                QueryMode::Nearest => Ok(i.query_nearest(query)),
                _ => Err(Error::Usage(
                    "the multisnap index answers nearest queries only".into(),
                )),
            },
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            AnyIndex::Compact(i) => i.to_bytes(),
            AnyIndex::MultiSnap(i) => i.to_bytes(),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Error> {
        Ok(match peek_kind(bytes)? {
            IndexKind::Compact => AnyIndex::Compact(CompactIndex::from_bytes(bytes)?),
            IndexKind::MultiSnap => AnyIndex::MultiSnap(MultiSnapIndex::from_bytes(bytes)?),
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gridmatch_core::index::DEFAULT_BUDGET;

    fn sets() -> Vec<PointSet> {
        vec![
            PointSet::from_coords("a", &[(0.1, 0.1)]).unwrap(),
            PointSet::from_coords("b", &[(0.2, 0.8), (0.9, 0.4)]).unwrap(),
            PointSet::from_coords("c", &[(0.5, 0.5), (0.6, 0.6)]).unwrap(),
        ]
    }

    #[test]
    fn build_shapes() {
        let compact = AnyIndex::build(Kind::Compact, 10, DEFAULT_BUDGET, sets()).unwrap();
        let sizes = compact.trie_sizes();
        assert_eq!(sizes.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2]);
        // One path per stored set.
        assert_eq!(sizes.iter().map(|s| s.2).sum::<usize>(), 3);
        let multi = AnyIndex::build(Kind::MultiSnap, 10, DEFAULT_BUDGET, sets()).unwrap();
        assert!(multi.node_count() >= compact.node_count());
    }

    #[test]
    fn bytes_round_trip() {
        for kind in [Kind::Compact, Kind::MultiSnap] {
            let index = AnyIndex::build(kind, 8, DEFAULT_BUDGET, sets()).unwrap();
            let back = AnyIndex::from_bytes(&index.to_bytes()).unwrap();
            assert_eq!(back, index);
            assert_eq!(back.kind(), kind);
        }
        assert!(AnyIndex::from_bytes(b"nope").is_err());
    }

    #[test]
    fn multisnap_rejects_subset_mode() {
        let multi = AnyIndex::build(Kind::MultiSnap, 6, DEFAULT_BUDGET, sets()).unwrap();
        let q = PointSet::from_coords("q", &[(0.1, 0.1)]).unwrap();
        assert!(multi
            .query(&q, QueryMode::Subset, &QueryOptions::default())
            .is_err());
        assert!(multi
            .query(&q, QueryMode::Nearest, &QueryOptions::default())
            .is_ok());
    }
}
