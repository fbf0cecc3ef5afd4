//! Live DOM: an arena-backed tree instantiated from [`DomNodeSpec`] and
//! mutated through recorded operations (`innerHTML`, `document.write`).
//!
//! Two serializations matter: the full one (used by the non-intrusiveness
//! check) and the digest one (element tags plus security-relevant attributes,
//! text ignored) that defines crawl-state identity.

use std::collections::BTreeMap;

use crate::bundle::DomNodeSpec;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Element {
        tag: String,
        attrs: BTreeMap<String, String>,
    },
    Text(String),
}

#[derive(Debug, Clone)]
pub struct DomNode {
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub attached: bool,
}

#[derive(Debug, Clone)]
pub struct Dom {
    arena: Vec<DomNode>,
    root: NodeId,
}

impl Dom {
    pub fn from_spec(spec: &DomNodeSpec) -> Dom {
        let mut dom = Dom {
            arena: Vec::new(),
            root: 0,
        };
        let root = dom.build_spec(spec, None);
        dom.root = root;
        dom
    }

    fn build_spec(&mut self, spec: &DomNodeSpec, parent: Option<NodeId>) -> NodeId {
        if spec.tag == "#text" {
            return self.push(
                NodeKind::Text(spec.text.clone().unwrap_or_default()),
                parent,
            );
        }
        let id = self.push(
            NodeKind::Element {
                tag: spec.tag.clone(),
                attrs: spec.attrs.clone(),
            },
            parent,
        );
        if let Some(text) = &spec.text {
            let t = self.push(NodeKind::Text(text.clone()), Some(id));
            self.arena[id].children.push(t);
        }
        for child in &spec.children {
            let c = self.build_spec(child, Some(id));
            self.arena[id].children.push(c);
        }
        id
    }

    fn push(&mut self, kind: NodeKind, parent: Option<NodeId>) -> NodeId {
        let id = self.arena.len();
        self.arena.push(DomNode {
            kind,
            children: Vec::new(),
            parent,
            attached: true,
        });
        id
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &DomNode {
        &self.arena[id]
    }

    pub fn is_attached(&self, id: NodeId) -> bool {
        let mut cur = id;
        loop {
            if !self.arena[cur].attached {
                return false;
            }
            match self.arena[cur].parent {
                Some(p) => cur = p,
                None => return cur == self.root,
            }
        }
    }

    pub fn tag(&self, id: NodeId) -> Option<&str> {
        match &self.arena[id].kind {
            NodeKind::Element { tag, .. } => Some(tag),
            NodeKind::Text(_) => None,
        }
    }

    pub fn attr(&self, id: NodeId, name: &str) -> Option<&str> {
        match &self.arena[id].kind {
            NodeKind::Element { attrs, .. } => attrs.get(name).map(|s| s.as_str()),
            NodeKind::Text(_) => None,
        }
    }

    pub fn set_attr(&mut self, id: NodeId, name: &str, value: &str) {
        if let NodeKind::Element { attrs, .. } = &mut self.arena[id].kind {
            attrs.insert(name.to_string(), value.to_string());
        }
    }

    /// First element with the given id attribute, in document order, looking
    /// only at the attached tree.
    pub fn element_by_id(&self, wanted: &str) -> Option<NodeId> {
        self.elements_in_order()
            .into_iter()
            .find(|&id| self.attr(id, "id") == Some(wanted))
    }

    /// All attached element ids in document (pre-order) order.
    pub fn elements_in_order(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.collect_elements(self.root, &mut out);
        out
    }

    fn collect_elements(&self, id: NodeId, out: &mut Vec<NodeId>) {
        if matches!(self.arena[id].kind, NodeKind::Element { .. }) {
            out.push(id);
        }
        for &child in &self.arena[id].children {
            self.collect_elements(child, out);
        }
    }

    /// Root-to-node child index path; `None` for detached nodes.
    pub fn path_of(&self, id: NodeId) -> Option<Vec<usize>> {
        if !self.is_attached(id) {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = id;
        while let Some(parent) = self.arena[cur].parent {
            let idx = self.arena[parent]
                .children
                .iter()
                .position(|&c| c == cur)?;
            path.push(idx);
            cur = parent;
        }
        if cur != self.root {
            return None;
        }
        path.reverse();
        Some(path)
    }

    pub fn resolve_path(&self, path: &[usize]) -> Option<NodeId> {
        let mut cur = self.root;
        for &idx in path {
            cur = *self.arena[cur].children.get(idx)?;
        }
        Some(cur)
    }

    fn detach_subtree(&mut self, id: NodeId) {
        self.arena[id].attached = false;
        let children = self.arena[id].children.clone();
        for child in children {
            self.detach_subtree(child);
        }
    }

    /// Replace an element's children with the parse of an HTML fragment.
    /// Fragments that do not parse become a single text node.
    pub fn set_inner_html(&mut self, id: NodeId, html: &str) {
        let old = std::mem::take(&mut self.arena[id].children);
        for child in old {
            self.detach_subtree(child);
        }
        let new_children = match parse_fragment(html) {
            Some(nodes) => nodes
                .iter()
                .map(|spec| self.build_spec(spec, Some(id)))
                .collect(),
            None => vec![self.push(NodeKind::Text(html.to_string()), Some(id))],
        };
        self.arena[id].children = new_children;
    }

    /// `document.write` semantics after load: append to the document root.
    pub fn document_write(&mut self, html: &str) {
        let root = self.root;
        let appended: Vec<NodeId> = match parse_fragment(html) {
            Some(nodes) => nodes
                .iter()
                .map(|spec| self.build_spec(spec, Some(root)))
                .collect(),
            None => vec![self.push(NodeKind::Text(html.to_string()), Some(root))],
        };
        self.arena[root].children.extend(appended);
    }

    pub fn serialize_inner(&self, id: NodeId) -> String {
        let mut out = String::new();
        for &child in &self.arena[id].children {
            self.serialize_node(child, &mut out);
        }
        out
    }

    /// Full canonical serialization, attributes in sorted order.
    pub fn serialize_full(&self) -> String {
        let mut out = String::new();
        self.serialize_node(self.root, &mut out);
        out
    }

    fn serialize_node(&self, id: NodeId, out: &mut String) {
        match &self.arena[id].kind {
            NodeKind::Text(text) => out.push_str(text),
            NodeKind::Element { tag, attrs } => {
                out.push('<');
                out.push_str(tag);
                for (name, value) in attrs {
                    out.push(' ');
                    out.push_str(name);
                    out.push_str("=\"");
                    out.push_str(value);
                    out.push('"');
                }
                out.push('>');
                for &child in &self.arena[id].children {
                    self.serialize_node(child, out);
                }
                out.push_str("</");
                out.push_str(tag);
                out.push('>');
            }
        }
    }

    /// Digest serialization: tags plus id/href/handler attributes, text nodes
    /// ignored, so cosmetic text churn does not split crawl states.
    pub fn digest_serialization(&self) -> String {
        let mut out = String::new();
        self.digest_node(self.root, &mut out);
        out
    }

    fn digest_node(&self, id: NodeId, out: &mut String) {
        if let NodeKind::Element { tag, attrs } = &self.arena[id].kind {
            out.push('<');
            out.push_str(tag);
            for (name, value) in attrs {
                if name == "id" || name == "href" || name.starts_with("on") {
                    out.push(' ');
                    out.push_str(name);
                    out.push('=');
                    out.push_str(value);
                }
            }
            out.push('>');
            for &child in &self.arena[id].children {
                self.digest_node(child, out);
            }
            out.push_str("</>");
        }
    }

    /// Stable 64-bit FNV-1a over the digest serialization.
    pub fn digest(&self) -> u64 {
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        for byte in self.digest_serialization().as_bytes() {
            hash ^= u64::from(*byte);
            hash = hash.wrapping_mul(0x1000_0000_01b3);
        }
        hash
    }

    pub fn element_count(&self) -> usize {
        self.elements_in_order().len()
    }

    /// Pre-order tag sequence, the input to the structure diff.
    pub fn tag_sequence(&self) -> Vec<String> {
        self.elements_in_order()
            .into_iter()
            .map(|id| self.tag(id).unwrap_or_default().to_string())
            .collect()
    }
}

/// Parse a small, strict HTML fragment: a sequence of elements and text.
/// Elements are `<tag a="v" b='v'>children</tag>` or `<tag/>`; anything that
/// fails to parse yields `None` and the caller falls back to a text node.
pub fn parse_fragment(input: &str) -> Option<Vec<DomNodeSpec>> {
    if !input.contains('<') {
        return None;
    }
    let chars: Vec<char> = input.chars().collect();
    let mut pos = 0usize;
    let nodes = parse_nodes(&chars, &mut pos, None)?;
    if pos != chars.len() || nodes.is_empty() {
        return None;
    }
    Some(nodes)
}

fn parse_nodes(
    chars: &[char],
    pos: &mut usize,
    closing: Option<&str>,
) -> Option<Vec<DomNodeSpec>> {
    let mut nodes = Vec::new();
    loop {
        if *pos >= chars.len() {
            return if closing.is_none() { Some(nodes) } else { None };
        }
        if chars[*pos] == '<' {
            if chars.get(*pos + 1) == Some(&'/') {
                let close = closing?;
                *pos += 2;
                let name = read_name(chars, pos)?;
                if name != close || chars.get(*pos) != Some(&'>') {
                    return None;
                }
                *pos += 1;
                return Some(nodes);
            }
            nodes.push(parse_element(chars, pos)?);
        } else {
            let mut text = String::new();
            while *pos < chars.len() && chars[*pos] != '<' {
                text.push(chars[*pos]);
                *pos += 1;
            }
            let mut node = DomNodeSpec::element("#text");
            node.text = Some(text);
            nodes.push(node);
        }
    }
}

fn parse_element(chars: &[char], pos: &mut usize) -> Option<DomNodeSpec> {
    *pos += 1; // consume '<'
    let tag = read_name(chars, pos)?;
    let mut node = DomNodeSpec::element(&tag);
    loop {
        skip_spaces(chars, pos);
        match chars.get(*pos) {
            Some('>') => {
                *pos += 1;
                node.children = parse_nodes(chars, pos, Some(&tag))?
                    .into_iter()
                    .collect();
                return Some(finish(node));
            }
            Some('/') if chars.get(*pos + 1) == Some(&'>') => {
                *pos += 2;
                return Some(finish(node));
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = read_name(chars, pos)?;
                if chars.get(*pos) != Some(&'=') {
                    return None;
                }
                *pos += 1;
                let quote = *chars.get(*pos)?;
                if quote != '"' && quote != '\'' {
                    return None;
                }
                *pos += 1;
                let mut value = String::new();
                while *pos < chars.len() && chars[*pos] != quote {
                    value.push(chars[*pos]);
                    *pos += 1;
                }
                if *pos >= chars.len() {
                    return None;
                }
                *pos += 1;
                node.attrs.insert(name.to_ascii_lowercase(), value);
            }
            _ => return None,
        }
    }
}

/// Inline `#text` pseudo-children become real text content.
fn finish(mut node: DomNodeSpec) -> DomNodeSpec {
    if node.children.len() == 1 && node.children[0].tag == "#text" {
        node.text = node.children[0].text.clone();
        node.children.clear();
    }
    node
}

fn read_name(chars: &[char], pos: &mut usize) -> Option<String> {
    let start = *pos;
    while *pos < chars.len() && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '-') {
        *pos += 1;
    }
    if *pos == start {
        None
    } else {
        Some(chars[start..*pos].iter().collect())
    }
}

fn skip_spaces(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragment_with_handler_attr() {
        let nodes = parse_fragment("<button id='b2' onclick='level2'>go</button>").unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].tag, "button");
        assert_eq!(nodes[0].attrs.get("onclick").unwrap(), "level2");
        assert_eq!(nodes[0].text.as_deref(), Some("go"));
    }

    #[test]
    fn plain_text_is_not_a_fragment() {
        assert!(parse_fragment("mode: show").is_none());
        assert!(parse_fragment("<broken").is_none());
    }

    #[test]
    fn inner_html_changes_digest_but_text_does_not() {
        let spec: DomNodeSpec = serde_json::from_str(
            r#"{"tag":"body","children":[{"tag":"div","attrs":{"id":"slot"}}]}"#,
        )
        .unwrap();
        let mut dom = Dom::from_spec(&spec);
        let before = dom.digest();

        dom.document_write("hello");
        assert_eq!(dom.digest(), before, "text append must not change digest");

        let slot = dom.element_by_id("slot").unwrap();
        dom.set_inner_html(slot, "<button id='b1' onclick='go'>x</button>");
        assert_ne!(dom.digest(), before);
        assert!(dom.element_by_id("b1").is_some());
    }

    #[test]
    fn paths_resolve_and_detach() {
        let spec: DomNodeSpec = serde_json::from_str(
            r#"{"tag":"body","children":[{"tag":"div","attrs":{"id":"slot"},
                "children":[{"tag":"button","attrs":{"id":"b1"}}]}]}"#,
        )
        .unwrap();
        let mut dom = Dom::from_spec(&spec);
        let b1 = dom.element_by_id("b1").unwrap();
        let path = dom.path_of(b1).unwrap();
        assert_eq!(dom.resolve_path(&path), Some(b1));

        let slot = dom.element_by_id("slot").unwrap();
        dom.set_inner_html(slot, "<p>gone</p>");
        assert!(!dom.is_attached(b1));
        assert!(dom.path_of(b1).is_none());
    }
}
