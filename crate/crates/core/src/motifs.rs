//! Semantic motif extraction.
//!
//! Three orders of motifs are drawn from a graph:
//!
//! * **attribute motifs** — (label, constant) pairs on an instance node;
//! * **instance motifs** — the (frame-generalized) concept alone when the
//!   node has no attributes, else one (concept, attribute-motif) pair per
//!   attribute;
//! * **relation motifs** — (source instance motif, role, target instance
//!   motif), one per combination of endpoint instance motifs.
//!
//! A graph's motif set is the union of the enabled kinds, stored as
//! canonical strings. Disabling the attribute kind also removes attribute
//! nesting from instance and relation motifs; disabling the instance kind
//! only stops bare emission — relation motifs keep their nested endpoints.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::amr::{AmrGraph, Constant};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttributeMotif {
    pub label: String,
    pub value: Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceMotif {
    pub concept: String,
    pub attribute: Option<AttributeMotif>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationMotif {
    pub source: InstanceMotif,
    pub role: String,
    pub target: InstanceMotif,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Motif {
    Attribute(AttributeMotif),
    Instance(InstanceMotif),
    Relation(RelationMotif),
}

/// Escape the canonical-string delimiters so distinct motifs can never
/// collide as strings, whatever their labels contain.
fn push_escaped(out: &mut String, s: &str) {
    for c in s.chars() {
        if matches!(c, '\\' | '(' | ')' | ',') {
            out.push('\\');
        }
        out.push(c);
    }
}

fn push_constant(out: &mut String, c: &Constant) {
    out.push(c.kind_tag());
    out.push(':');
    push_escaped(out, &c.lexical);
}

impl AttributeMotif {
    fn write(&self, out: &mut String) {
        out.push_str("A(");
        push_escaped(out, &self.label);
        out.push(',');
        push_constant(out, &self.value);
        out.push(')');
    }
}

impl InstanceMotif {
    fn write(&self, out: &mut String) {
        out.push_str("I(");
        push_escaped(out, &self.concept);
        if let Some(a) = &self.attribute {
            out.push(',');
            a.write(out);
        }
        out.push(')');
    }
}

impl RelationMotif {
    fn write(&self, out: &mut String) {
        out.push_str("R(");
        self.source.write(out);
        out.push(',');
        push_escaped(out, &self.role);
        out.push(',');
        self.target.write(out);
        out.push(')');
    }
}

impl Motif {
    /// Fully parenthesized prefix form, e.g. `A(polarity,y:-)`,
    /// `I(speak,A(polarity,y:-))`, `R(I(person),name,I(name,A(op1,s:Helen)))`.
    /// Injective over distinct motifs.
    pub fn canonical_string(&self) -> String {
        let mut out = String::new();
        match self {
            Motif::Attribute(a) => a.write(&mut out),
            Motif::Instance(i) => i.write(&mut out),
            Motif::Relation(r) => r.write(&mut out),
        }
        out
    }
}

impl fmt::Display for Motif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

/// A graph's feature set: canonical motif strings with set semantics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MotifSet {
    motifs: BTreeSet<String>,
}

impl MotifSet {
    pub fn insert(&mut self, m: &Motif) {
        self.motifs.insert(m.canonical_string());
    }

    pub fn len(&self) -> usize {
        self.motifs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motifs.is_empty()
    }

    pub fn contains(&self, canonical: &str) -> bool {
        self.motifs.contains(canonical)
    }

    /// Sorted canonical strings.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.motifs.iter().map(String::as_str)
    }

    pub fn as_set(&self) -> &BTreeSet<String> {
        &self.motifs
    }
}

impl FromIterator<String> for MotifSet {
    fn from_iter<T: IntoIterator<Item = String>>(iter: T) -> Self {
        MotifSet { motifs: iter.into_iter().collect() }
    }
}

/// Which motif kinds contribute to a motif set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MotifKinds {
    pub attribute: bool,
    pub instance: bool,
    pub relation: bool,
}

impl Default for MotifKinds {
    fn default() -> Self {
        MotifKinds { attribute: true, instance: true, relation: true }
    }
}

impl MotifKinds {
    pub const NONE: MotifKinds =
        MotifKinds { attribute: false, instance: false, relation: false };

    /// Parse a comma-separated subset of `a`, `i`, `r`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut kinds = MotifKinds::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "a" | "attribute" => kinds.attribute = true,
                "i" | "instance" => kinds.instance = true,
                "r" | "relation" => kinds.relation = true,
                other => return Err(format!("unknown motif kind `{other}` (expected a, i, r)")),
            }
        }
        Ok(kinds)
    }
}

impl fmt::Display for MotifKinds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.attribute {
            parts.push("a");
        }
        if self.instance {
            parts.push("i");
        }
        if self.relation {
            parts.push("r");
        }
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Error)]
pub enum MotifError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("relation index {0} out of range")]
    UnknownEdge(usize),
}

#[derive(Debug, Error)]
pub enum FrameMapError {
    #[error("{path}:{line}: expected `frame<TAB>generalized`")]
    MalformedRow { path: String, line: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Lookup table from verb-frame concepts to generalized frames. Lookup of
/// an unmapped frame returns the frame itself, and only concepts shaped
/// like a frame (`lemma-NN`) are looked up at all; entity concepts pass
/// through untouched.
#[derive(Debug, Clone, Default)]
pub struct FrameMap {
    entries: HashMap<String, String>,
}

impl FrameMap {
    /// The identity map.
    pub fn identity() -> Self {
        FrameMap::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        FrameMap { entries: entries.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn generalize<'a>(&'a self, concept: &'a str) -> &'a str {
        if !is_frame_concept(concept) {
            return concept;
        }
        self.entries.get(concept).map(String::as_str).unwrap_or(concept)
    }

    /// Load a two-column TSV (`frame<TAB>generalized`). Blank lines and
    /// `#` comments are skipped. A missing file yields the identity map
    /// with a warning.
    pub fn load(path: &Path) -> Result<Self, FrameMapError> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                log::warn!("frame map {} not found; using identity map", path.display());
                return Ok(FrameMap::identity());
            }
            Err(source) => {
                return Err(FrameMapError::Io { path: path.display().to_string(), source })
            }
        };
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match line.split('\t').collect::<Vec<_>>()[..] {
                [frame, general] if !frame.trim().is_empty() && !general.trim().is_empty() => {
                    entries.insert(frame.trim().to_owned(), general.trim().to_owned());
                }
                _ => {
                    return Err(FrameMapError::MalformedRow {
                        path: path.display().to_string(),
                        line: i + 1,
                    })
                }
            }
        }
        Ok(FrameMap { entries })
    }
}

/// `lemma-NN`: hyphen followed by a two-or-more digit sense suffix.
pub fn is_frame_concept(concept: &str) -> bool {
    match concept.rsplit_once('-') {
        Some((lemma, sense)) => {
            !lemma.is_empty() && sense.len() >= 2 && sense.chars().all(|c| c.is_ascii_digit())
        }
        None => false,
    }
}

/// Attribute motifs of one node: one per attribute edge leaving it.
pub fn attribute_motifs(g: &AmrGraph, node: &str) -> Result<BTreeSet<Motif>, MotifError> {
    if g.concept(node).is_none() {
        return Err(MotifError::UnknownNode(node.to_owned()));
    }
    Ok(node_attribute_motifs(g, node).into_iter().map(Motif::Attribute).collect())
}

fn node_attribute_motifs(g: &AmrGraph, node: &str) -> BTreeSet<AttributeMotif> {
    g.attributes_of(node)
        .map(|a| AttributeMotif { label: a.label.clone(), value: a.value.clone() })
        .collect()
}

/// Instance motifs of one node under a frame map: the generalized concept
/// alone if the node has no attributes, else one (concept, attribute) pair
/// per attribute motif.
pub fn instance_motifs(
    g: &AmrGraph,
    node: &str,
    frames: &FrameMap,
) -> Result<BTreeSet<Motif>, MotifError> {
    if g.concept(node).is_none() {
        return Err(MotifError::UnknownNode(node.to_owned()));
    }
    Ok(node_instance_motifs(g, node, frames, true).into_iter().map(Motif::Instance).collect())
}

fn node_instance_motifs(
    g: &AmrGraph,
    node: &str,
    frames: &FrameMap,
    nest_attributes: bool,
) -> Vec<InstanceMotif> {
    let concept = frames.generalize(g.concept(node).expect("checked node")).to_owned();
    if nest_attributes {
        let attrs = node_attribute_motifs(g, node);
        if !attrs.is_empty() {
            return attrs
                .into_iter()
                .map(|a| InstanceMotif { concept: concept.clone(), attribute: Some(a) })
                .collect();
        }
    }
    vec![InstanceMotif { concept, attribute: None }]
}

/// Relation motifs of one relation edge (by index into `g.relations()`):
/// the cross product of the endpoint instance motifs.
pub fn relation_motifs(
    g: &AmrGraph,
    edge: usize,
    frames: &FrameMap,
) -> Result<BTreeSet<Motif>, MotifError> {
    let r = g.relations().get(edge).ok_or(MotifError::UnknownEdge(edge))?;
    let sources = node_instance_motifs(g, &r.source, frames, true);
    let targets = node_instance_motifs(g, &r.target, frames, true);
    let mut out = BTreeSet::new();
    for s in &sources {
        for t in &targets {
            out.insert(Motif::Relation(RelationMotif {
                source: s.clone(),
                role: r.role.clone(),
                target: t.clone(),
            }));
        }
    }
    Ok(out)
}

/// Union of the enabled motif kinds over the whole graph, canonically
/// serialized. With the attribute kind disabled, instance motifs (and the
/// endpoints of relation motifs) fall back to bare concepts.
pub fn motif_set(g: &AmrGraph, frames: &FrameMap, kinds: MotifKinds) -> MotifSet {
    let mut set = MotifSet::default();
    if !kinds.attribute && !kinds.instance && !kinds.relation {
        return set;
    }

    let nest = kinds.attribute;
    let mut instance_cache: HashMap<&str, Vec<InstanceMotif>> = HashMap::new();
    for node in g.instances().keys() {
        let motifs = node_instance_motifs(g, node, frames, nest);
        if kinds.instance {
            for m in &motifs {
                set.insert(&Motif::Instance(m.clone()));
            }
        }
        instance_cache.insert(node.as_str(), motifs);
    }
    if kinds.attribute {
        for a in g.attributes() {
            set.insert(&Motif::Attribute(AttributeMotif {
                label: a.label.clone(),
                value: a.value.clone(),
            }));
        }
    }
    if kinds.relation {
        for r in g.relations() {
            let sources = &instance_cache[r.source.as_str()];
            let targets = &instance_cache[r.target.as_str()];
            for s in sources {
                for t in targets {
                    set.insert(&Motif::Relation(RelationMotif {
                        source: s.clone(),
                        role: r.role.clone(),
                        target: t.clone(),
                    }));
                }
            }
        }
    }
    set
}

/// All labels in the graph as a plain string set: instance concepts, role
/// labels, attribute labels, and constant lexical forms, duplicates
/// collapsed. Carries no structural information.
pub fn label_set(g: &AmrGraph) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for concept in g.instances().values() {
        out.insert(concept.clone());
    }
    for r in g.relations() {
        out.insert(r.role.clone());
    }
    for a in g.attributes() {
        out.insert(a.label.clone());
        out.insert(a.value.lexical.clone());
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::parse_penman;

    fn fig2_bottom() -> AmrGraph {
        parse_penman(
            "(t / talk-01 :polarity - \
              :ARG0 (p / person :name (n / name :op1 \"Helen\")) \
              :ARG1 (o / politics) \
              :ARG2 (p2 / person :name (n2 / name :op1 \"Maya\")))",
        )
        .unwrap()
    }

    fn speak_frames() -> FrameMap {
        FrameMap::from_entries([("talk-01".to_owned(), "speak".to_owned())])
    }

    #[test]
    fn attribute_motifs_per_node() {
        let g = fig2_bottom();
        let talk: Vec<String> =
            attribute_motifs(&g, "t").unwrap().iter().map(|m| m.canonical_string()).collect();
        assert_eq!(talk, ["A(polarity,y:-)"]);
        let helen: Vec<String> =
            attribute_motifs(&g, "n").unwrap().iter().map(|m| m.canonical_string()).collect();
        assert_eq!(helen, ["A(op1,s:Helen)"]);

        let fig1 =
            parse_penman("(c / cut-01 :polarity - :ARG0 (h / he) :ARG1 (a / apple))").unwrap();
        assert!(attribute_motifs(&fig1, "a").unwrap().is_empty());
        assert!(matches!(
            attribute_motifs(&fig1, "zz"),
            Err(MotifError::UnknownNode(_))
        ));
    }

    #[test]
    fn instance_motifs_substitute_frames_and_nest_attributes() {
        let g = fig2_bottom();
        let frames = speak_frames();
        let talk: Vec<String> =
            instance_motifs(&g, "t", &frames).unwrap().iter().map(|m| m.canonical_string()).collect();
        assert_eq!(talk, ["I(speak,A(polarity,y:-))"]);
        let person: Vec<String> =
            instance_motifs(&g, "p", &frames).unwrap().iter().map(|m| m.canonical_string()).collect();
        assert_eq!(person, ["I(person)"]);
    }

    #[test]
    fn multi_attribute_nodes_fan_out() {
        let g = parse_penman("(d / date-entity :month 3 :day 29 :mod late)").unwrap();
        let motifs = instance_motifs(&g, "d", &FrameMap::identity()).unwrap();
        assert_eq!(motifs.len(), 3);
        for m in &motifs {
            match m {
                Motif::Instance(i) => assert!(i.attribute.is_some()),
                other => panic!("unexpected motif {other}"),
            }
        }
    }

    #[test]
    fn relation_motifs_cross_endpoint_instances() {
        let g = fig2_bottom();
        let frames = speak_frames();
        // ARG1 edge: talk-01 -> politics.
        let arg1 = g.relations().iter().position(|r| r.role == "ARG1").unwrap();
        let motifs: Vec<String> =
            relation_motifs(&g, arg1, &frames).unwrap().iter().map(|m| m.canonical_string()).collect();
        assert_eq!(motifs, ["R(I(speak,A(polarity,y:-)),ARG1,I(politics))"]);

        // First name edge: person -> name(op1 "Helen").
        let name = g
            .relations()
            .iter()
            .position(|r| r.role == "name" && r.target == "n")
            .unwrap();
        let motifs: Vec<String> =
            relation_motifs(&g, name, &frames).unwrap().iter().map(|m| m.canonical_string()).collect();
        assert_eq!(motifs, ["R(I(person),name,I(name,A(op1,s:Helen)))"]);

        assert!(matches!(relation_motifs(&g, 99, &frames), Err(MotifError::UnknownEdge(99))));
    }

    #[test]
    fn relation_motif_count_is_a_product() {
        let g = parse_penman(
            "(s / she :mod x :mod y :ARG0-of (d / date-entity :month 3 :day 29 :mod late))",
        )
        .unwrap();
        // Edge d -> s after normalization: source has 3 attrs, target 2.
        let edge = g.relations().iter().position(|r| r.role == "ARG0").unwrap();
        let motifs = relation_motifs(&g, edge, &FrameMap::identity()).unwrap();
        assert_eq!(motifs.len(), 6);
    }

    #[test]
    fn motif_set_matches_worked_enumeration() {
        let g = fig2_bottom();
        let set = motif_set(&g, &speak_frames(), MotifKinds::default());
        let expected: BTreeSet<&str> = [
            "A(polarity,y:-)",
            "A(op1,s:Helen)",
            "A(op1,s:Maya)",
            "I(speak,A(polarity,y:-))",
            "I(person)",
            "I(politics)",
            "I(name,A(op1,s:Helen))",
            "I(name,A(op1,s:Maya))",
            "R(I(speak,A(polarity,y:-)),ARG0,I(person))",
            "R(I(speak,A(polarity,y:-)),ARG1,I(politics))",
            "R(I(speak,A(polarity,y:-)),ARG2,I(person))",
            "R(I(person),name,I(name,A(op1,s:Helen)))",
            "R(I(person),name,I(name,A(op1,s:Maya)))",
        ]
        .into_iter()
        .collect();
        let got: BTreeSet<&str> = set.iter().collect();
        assert_eq!(got, expected);
        assert_eq!(set.len(), 13);
    }

    #[test]
    fn empty_kinds_give_empty_set() {
        let g = fig2_bottom();
        assert!(motif_set(&g, &FrameMap::identity(), MotifKinds::NONE).is_empty());
        let single = parse_penman("(p / person)").unwrap();
        let set = motif_set(&single, &FrameMap::identity(), MotifKinds::default());
        assert_eq!(set.iter().collect::<Vec<_>>(), ["I(person)"]);
    }

    #[test]
    fn disabling_attributes_flattens_nesting() {
        let g = fig2_bottom();
        let kinds = MotifKinds { attribute: false, instance: true, relation: true };
        let set = motif_set(&g, &speak_frames(), kinds);
        assert!(set.contains("I(speak)"));
        assert!(set.contains("R(I(speak),ARG1,I(politics))"));
        assert!(!set.iter().any(|m| m.contains("A(")));
    }

    #[test]
    fn disabling_instances_keeps_nested_relation_endpoints() {
        let g = fig2_bottom();
        let kinds = MotifKinds { attribute: true, instance: false, relation: true };
        let set = motif_set(&g, &speak_frames(), kinds);
        assert!(set.contains("R(I(speak,A(polarity,y:-)),ARG1,I(politics))"));
        assert!(!set.iter().any(|m| m.starts_with("I(")));
    }

    #[test]
    fn label_set_collapses_duplicates() {
        let g = fig2_bottom();
        let labels = label_set(&g);
        let expected: BTreeSet<String> = [
            "talk-01", "person", "politics", "name", "ARG0", "ARG1", "ARG2", "-", "Helen",
            "Maya", "polarity", "op1",
        ]
        .into_iter()
        .map(str::to_owned)
        .collect();
        // `name` doubles as a concept and a role and appears once.
        assert_eq!(labels, expected);
        assert_eq!(labels.len(), 12);

        let single = parse_penman("(p / person)").unwrap();
        assert_eq!(label_set(&single).into_iter().collect::<Vec<_>>(), ["person"]);
    }

    #[test]
    fn label_set_ignores_structure() {
        let a = parse_penman("(x / go-02 :ARG0 (y / he) :time (z / now))").unwrap();
        let b = parse_penman("(x / go-02 :ARG0 (z / now) :time (y / he))").unwrap();
        assert_eq!(label_set(&a), label_set(&b));
    }

    #[test]
    fn frame_concept_pattern() {
        assert!(is_frame_concept("cut-01"));
        assert!(is_frame_concept("be-located-at-91"));
        assert!(!is_frame_concept("apple"));
        assert!(!is_frame_concept("amr-empty"));
        assert!(!is_frame_concept("-01"));
        assert!(!is_frame_concept("x-1"));
    }

    #[test]
    fn frame_map_lookup_rules() {
        let frames = speak_frames();
        assert_eq!(frames.generalize("talk-01"), "speak");
        assert_eq!(frames.generalize("cut-01"), "cut-01");
        assert_eq!(frames.generalize("apple"), "apple");
        // Entity concepts are never looked up even if an entry exists.
        let sneaky = FrameMap::from_entries([("apple".to_owned(), "fruit".to_owned())]);
        assert_eq!(sneaky.generalize("apple"), "apple");
    }

    #[test]
    fn frame_map_loads_tsv() {
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frames.tsv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "talk-01\tspeak").unwrap();
        writeln!(f, "# comment").unwrap();
        writeln!(f).unwrap();
        writeln!(f, "cut-01\tcut").unwrap();
        drop(f);
        let frames = FrameMap::load(&path).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames.generalize("talk-01"), "speak");

        let missing = FrameMap::load(&dir.path().join("absent.tsv")).unwrap();
        assert!(missing.is_empty());

        std::fs::write(&path, "talk-01 speak\n").unwrap();
        let err = FrameMap::load(&path).unwrap_err();
        assert!(matches!(err, FrameMapError::MalformedRow { line: 1, .. }));

        std::fs::write(&path, "").unwrap();
        assert!(FrameMap::load(&path).unwrap().is_empty());
    }

    #[test]
    fn canonical_strings_escape_delimiters() {
        let nasty = Motif::Attribute(AttributeMotif {
            label: "op,1".into(),
            value: Constant::string("a(b),c\\d"),
        });
        assert_eq!(nasty.canonical_string(), r"A(op\,1,s:a\(b\)\,c\\d)");
    }
}
