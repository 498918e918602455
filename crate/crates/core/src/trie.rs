//! 9-ary prefix tree over direction strings.
//!
//! One trie holds strings of a single block size `k` (the point-set
//! cardinality). A node at depth `d * k` closes the description of a level-`d`
//! distribution; its finisher list names the point sets that own it.
//!
//! # Serialized form
//!
//! ```text
//! trie  := varint(cardinality) varint(max_level) node
//! node  := varint(finisher_count) varint(owner)* (symbol node)* 0xFF
//! ```
//!
//! `symbol` is the direction byte `0..=8`; children are written in symbol
//! order, so equal tries always serialize to the same bytes.

use alloc::vec::Vec;

use crate::codec::{put_varint, Reader};
use crate::encoding::Direction;
use crate::{Error, Result};

const NO_CHILD: u32 = u32::MAX;
const POP: u8 = 0xFF;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> Self {
        NodeId(i as u32)
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Node {
    children: [u32; 9],
    depth: u32,
    finishers: Vec<u32>,
}

impl Node {
    fn new(depth: u32) -> Self {
        Node {
            children: [NO_CHILD; 9],
            depth,
            finishers: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trie {
    nodes: Vec<Node>,
    cardinality: usize,
    max_level: u32,
}

impl Trie {
    pub fn new(cardinality: usize, max_level: u32) -> Result<Self> {
        if cardinality == 0 {
            return Err(Error::EmptyPointSet);
        }
        if max_level == 0 {
            return Err(Error::InvalidLevel(0));
        }
        Ok(Trie {
            nodes: alloc::vec![Node::new(0)],
            cardinality,
            max_level,
        })
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.children.iter().all(|&c| c == NO_CHILD))
            .count()
    }

    pub fn depth(&self, node: NodeId) -> u32 {
        self.nodes[node.index()].depth
    }

    /// Point sets whose distribution ends at `node`, in insertion order.
    pub fn finishers(&self, node: NodeId) -> &[u32] {
        &self.nodes[node.index()].finishers
    }

    pub fn child(&self, node: NodeId, symbol: Direction) -> Option<NodeId> {
        let c = self.nodes[node.index()].children[symbol.index() as usize];
        (c != NO_CHILD).then_some(NodeId(c))
    }

    /// Existing children in symbol order.
    pub fn children(&self, node: NodeId) -> impl Iterator<Item = (Direction, NodeId)> + '_ {
        self.nodes[node.index()]
            .children
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != NO_CHILD)
            .map(|(i, &c)| (Direction::ALL[i], NodeId(c)))
    }

    /// Inserts a whole string from the root.
    pub fn insert(&mut self, symbols: &[Direction], owner: u32) -> Result<NodeId> {
        self.extend(self.root(), symbols, owner)
    }

    /// Continues the path at `from` with `symbols`, creating nodes as needed,
    /// and records `owner` at each block boundary passed (including the end).
    pub fn extend(&mut self, from: NodeId, symbols: &[Direction], owner: u32) -> Result<NodeId> {
        let k = self.cardinality;
        let start = self.depth(from) as usize;
        let end = start + symbols.len();
        if !start.is_multiple_of(k) || !end.is_multiple_of(k) {
            return Err(Error::BlockSizeMismatch {
                block: k,
                len: symbols.len(),
            });
        }
        if end / k > self.max_level as usize {
            return Err(Error::TooDeep {
                levels: end / k,
                max_level: self.max_level,
            });
        }
        let mut cur = from.0;
        for (offset, &s) in symbols.iter().enumerate() {
            let slot = s.index() as usize;
            let next = self.nodes[cur as usize].children[slot];
            cur = if next == NO_CHILD {
                let id = self.nodes.len() as u32;
                self.nodes.push(Node::new((start + offset + 1) as u32));
                self.nodes[cur as usize].children[slot] = id;
                id
            } else {
                next
            };
            if (start + offset + 1).is_multiple_of(k) {
                let fin = &mut self.nodes[cur as usize].finishers;
                if fin.last() != Some(&owner) && !fin.contains(&owner) {
                    fin.push(owner);
                }
            }
        }
        Ok(NodeId(cur))
    }

    /// Follows `symbols` from the root as far as the trie allows. Returns the
    /// last node reached and the number of symbols consumed.
    pub fn walk(&self, symbols: &[Direction]) -> (NodeId, usize) {
        self.walk_from(self.root(), symbols)
    }

    pub fn walk_from(&self, from: NodeId, symbols: &[Direction]) -> (NodeId, usize) {
        let mut cur = from;
        for (i, &s) in symbols.iter().enumerate() {
            match self.child(cur, s) {
                Some(next) => cur = next,
                None => return (cur, i),
            }
        }
        (cur, symbols.len())
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        put_varint(out, self.cardinality as u64);
        put_varint(out, self.max_level as u64);
        // (node, next child slot to visit)
        let mut stack: Vec<(u32, usize)> = alloc::vec![(0, 0)];
        self.write_finishers(0, out);
        while let Some(top) = stack.last_mut() {
            let node = &self.nodes[top.0 as usize];
            match (top.1..9).find(|&i| node.children[i] != NO_CHILD) {
                Some(slot) => {
                    top.1 = slot + 1;
                    let child = node.children[slot];
                    out.push(slot as u8);
                    self.write_finishers(child, out);
                    stack.push((child, 0));
                }
                None => {
                    out.push(POP);
                    stack.pop();
                }
            }
        }
    }

    fn write_finishers(&self, node: u32, out: &mut Vec<u8>) {
        let fin = &self.nodes[node as usize].finishers;
        put_varint(out, fin.len() as u64);
        for &owner in fin {
            put_varint(out, owner as u64);
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out);
        out
    }

    pub(crate) fn read_from(r: &mut Reader<'_>) -> Result<Trie> {
        let cardinality = r.varint()? as usize;
        let max_level = r.varint_u32()?;
        let mut trie = Trie::new(cardinality, max_level).map_err(|_| Error::Corrupt("trie header"))?;
        trie.nodes[0].finishers = read_finishers(r)?;
        let mut stack: Vec<u32> = alloc::vec![0];
        while let Some(&top) = stack.last() {
            let b = r.byte()?;
            if b == POP {
                stack.pop();
                continue;
            }
            let dir = Direction::from_index(b).ok_or(Error::Corrupt("bad symbol byte"))?;
            let slot = dir.index() as usize;
            if trie.nodes[top as usize].children[slot] != NO_CHILD {
                return Err(Error::Corrupt("duplicate child edge"));
            }
            let depth = trie.nodes[top as usize].depth + 1;
            if depth as usize > cardinality * max_level as usize {
                return Err(Error::Corrupt("path deeper than max level"));
            }
            let id = trie.nodes.len() as u32;
            let mut node = Node::new(depth);
            node.finishers = read_finishers(r)?;
            if !node.finishers.is_empty() && !(depth as usize).is_multiple_of(cardinality) {
                return Err(Error::Corrupt("finishers off a block boundary"));
            }
            trie.nodes.push(node);
            trie.nodes[top as usize].children[slot] = id;
            stack.push(id);
        }
        Ok(trie)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Trie> {
        let mut r = Reader::new(bytes);
        let trie = Trie::read_from(&mut r)?;
        if !r.is_empty() {
            return Err(Error::Corrupt("trailing bytes after trie"));
        }
        Ok(trie)
    }
}

/// Structural equality: same paths, same finisher lists.
impl PartialEq for Trie {
    fn eq(&self, other: &Self) -> bool {
        self.to_bytes() == other.to_bytes()
    }
}

fn read_finishers(r: &mut Reader<'_>) -> Result<Vec<u32>> {
    let count = r.varint()? as usize;
    let mut fin = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        fin.push(r.varint_u32()?);
    }
    Ok(fin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use Direction::*;

    #[test]
    fn insert_records_owner_at_block_ends() {
        let mut t = Trie::new(2, 1).unwrap();
        let end = t.insert(&[I, NE], 7).unwrap();
        assert_eq!(t.depth(end), 2);
        assert_eq!(t.finishers(end), &[7]);
        let (mid, used) = t.walk(&[I]);
        assert_eq!(used, 1);
        assert!(t.finishers(mid).is_empty());
        assert!(t.finishers(t.root()).is_empty());
    }

    #[test]
    fn reinsert_is_idempotent() {
        let mut t = Trie::new(2, 1).unwrap();
        t.insert(&[I, NE], 0).unwrap();
        let before = t.clone();
        t.insert(&[I, NE], 0).unwrap();
        assert_eq!(t, before);
    }

    #[test]
    fn single_point_strings_share_the_root() {
        let mut t = Trie::new(1, 1).unwrap();
        t.insert(&[I], 0).unwrap();
        t.insert(&[N], 1).unwrap();
        let kids: Vec<_> = t.children(t.root()).map(|(s, _)| s).collect();
        assert_eq!(kids, vec![I, N]);
        for (_, c) in t.children(t.root()) {
            assert_eq!(t.finishers(c).len(), 1);
        }
    }

    #[test]
    fn walk_stops_at_missing_edges() {
        let mut t = Trie::new(2, 1).unwrap();
        assert_eq!(t.walk(&[I, NE]), (t.root(), 0));
        let leaf = t.insert(&[I, NE], 0).unwrap();
        assert_eq!(t.walk(&[I, NE]), (leaf, 2));
        let (node, used) = t.walk(&[I, SW]);
        assert_eq!((t.depth(node), used), (1, 1));
        assert_eq!(t.children(leaf).count(), 0);
    }

    #[test]
    fn all_nine_children_in_order() {
        let mut t = Trie::new(1, 1).unwrap();
        for (i, d) in Direction::ALL.into_iter().rev().enumerate() {
            t.insert(&[d], i as u32).unwrap();
        }
        let kids: Vec<_> = t.children(t.root()).map(|(s, _)| s).collect();
        assert_eq!(kids, Direction::ALL.to_vec());
    }

    #[test]
    fn rejects_partial_blocks_and_overlong_strings() {
        let mut t = Trie::new(2, 1).unwrap();
        assert!(matches!(t.insert(&[I], 0), Err(Error::BlockSizeMismatch { .. })));
        assert!(matches!(t.insert(&[I, I, I, I], 0), Err(Error::TooDeep { .. })));
    }

    #[test]
    fn serialization_round_trip() {
        let mut t = Trie::new(2, 3).unwrap();
        t.insert(&[I, NE, NE, I], 0).unwrap();
        t.insert(&[I, NE, I, I, E, SW], 1).unwrap();
        t.insert(&[N, N], 2).unwrap();
        let bytes = t.to_bytes();
        let back = Trie::from_bytes(&bytes).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_bytes(), bytes);
        assert!(Trie::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
