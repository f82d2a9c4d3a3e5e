use std::collections::HashMap;

use crate::text::Phrase;

#[derive(Debug, Default, Clone)]
struct Node {
    children: HashMap<String, usize>,
    terminal: bool,
}

/// Token-keyed trie answering "longest entry starting here" queries.
#[derive(Debug, Clone)]
pub struct PhraseTrie {
    nodes: Vec<Node>,
    len: usize,
}

impl Default for PhraseTrie {
    fn default() -> Self {
        PhraseTrie {
            nodes: vec![Node::default()],
            len: 0,
        }
    }
}

impl PhraseTrie {
    pub fn insert(&mut self, phrase: &Phrase) {
        if phrase.is_empty() {
            return;
        }
        let mut at = 0;
        for tok in phrase.tokens() {
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
        if !self.nodes[at].terminal {
            self.nodes[at].terminal = true;
            self.len += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Token count of the longest entry equal to a prefix of `tokens`.
    pub fn longest_prefix<S: AsRef<str>>(&self, tokens: &[S]) -> Option<usize> {
        let mut at = 0;
        let mut best = None;
        for (i, tok) in tokens.iter().enumerate() {
            match self.nodes[at].children.get(tok.as_ref()) {
                Some(&next) => at = next,
                None => break,
            }
            if self.nodes[at].terminal {
                best = Some(i + 1);
            }
        }
        best
    }
}

impl<'a> FromIterator<&'a Phrase> for PhraseTrie {
    fn from_iter<I: IntoIterator<Item = &'a Phrase>>(iter: I) -> Self {
        let mut trie = PhraseTrie::default();
        for p in iter {
            trie.insert(p);
        }
        trie
    }
}
