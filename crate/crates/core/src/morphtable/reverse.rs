use std::collections::HashMap;

use super::MorphTable;

/// Two surfaces rendering to the same token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub sequence: Vec<String>,
    pub kept: String,
    pub dropped: String,
}

#[derive(Debug, Clone, Default)]
struct Node {
    children: HashMap<String, usize>,
    surface: Option<String>,
}

/// Rendered morpheme sequence -> surface word, stored as a token trie so
/// prefix queries are cheap.
#[derive(Debug, Clone)]
pub struct ReverseMorphTable {
    nodes: Vec<Node>,
    len: usize,
    collisions: Vec<Collision>,
}

impl Default for ReverseMorphTable {
    fn default() -> Self {
        Self { nodes: vec![Node::default()], len: 0, collisions: Vec::new() }
    }
}

impl ReverseMorphTable {
    /// Colliding sequences keep the lexicographically smallest surface.
    pub fn build(table: &MorphTable) -> Self {
        let mut rt = Self::default();
        // Entries iterate in surface order, so the first writer is the winner.
        for e in table.entries() {
            rt.insert(e.rendered(), e.surface());
        }
        rt
    }

    fn insert(&mut self, seq: &[String], surface: &str) {
        let mut at = 0;
        for tok in seq {
            at = match self.nodes[at].children.get(tok) {
                Some(&next) => next,
                None => {
                    let next = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[at].children.insert(tok.clone(), next);
                    next
                }
            };
        }
        match &self.nodes[at].surface {
            Some(kept) => self.collisions.push(Collision {
                sequence: seq.to_vec(),
                kept: kept.clone(),
                dropped: surface.to_string(),
            }),
            None => {
                self.nodes[at].surface = Some(surface.to_string());
                self.len += 1;
            }
        }
    }

    fn node<S: AsRef<str>>(&self, seq: &[S]) -> Option<&Node> {
        let mut at = 0;
        for tok in seq {
            at = *self.nodes[at].children.get(tok.as_ref())?;
        }
        Some(&self.nodes[at])
    }

    /// Surface for an exact token sequence.
    pub fn get<S: AsRef<str>>(&self, seq: &[S]) -> Option<&str> {
        self.node(seq)?.surface.as_deref()
    }

    /// True when `seq` is a prefix of (or equal to) some key.
    pub fn is_prefix<S: AsRef<str>>(&self, seq: &[S]) -> bool {
        self.node(seq).is_some()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn collisions(&self) -> &[Collision] {
        &self.collisions
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::entry;
    use super::*;

    #[test]
    fn inverts_the_table() {
        let t = MorphTable::from_entries([entry("batting", &["bat", "#ing"]), entry("decompress", &["de#", "compress"])]);
        let rt = t.build_reverse();
        assert_eq!(rt.get(&["bat", "#ing"]), Some("batting"));
        assert_eq!(rt.get(&["bat"]), None);
        assert!(rt.is_prefix(&["de#"]));
        assert!(rt.is_prefix(&["de#", "compress"]));
        assert!(!rt.is_prefix(&["compress"]));
        assert_eq!(rt.len(), 2);
        assert!(rt.collisions().is_empty());
    }

    #[test]
    fn empty_table() {
        let rt = MorphTable::default().build_reverse();
        assert!(rt.is_empty());
        assert_eq!(rt.get::<&str>(&[]), None);
    }

    #[test]
    fn collision_keeps_smaller_surface() {
        let t = MorphTable::from_entries([
            entry("archeologist", &["archaeo#", "#logy", "#ist"]),
            entry("archaeologist", &["archaeo#", "#logy", "#ist"]),
        ]);
        let rt = t.build_reverse();
        assert_eq!(rt.get(&["archaeo#", "#logy", "#ist"]), Some("archaeologist"));
        assert_eq!(
            rt.collisions(),
            [Collision {
                sequence: vec!["archaeo#".into(), "#logy".into(), "#ist".into()],
                kept: "archaeologist".into(),
                dropped: "archeologist".into(),
            }]
        );
    }
}
