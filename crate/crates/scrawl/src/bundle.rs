//! Application bundles: the on-disk format describing an app under test.
//!
//! A bundle is a directory with a `manifest.json` naming the seed URL and the
//! pages; each page carries a DOM tree (nested JSON) and an ordered list of
//! `.gs` script files. The exact schema ships as
//! `schemas/manifest.schema.json` in the repository root.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gsl::{parse_script, Script, ScriptId};
use crate::weburl::Url;

/// One DOM node as declared in the manifest. Attribute names are lowercase;
/// `href` values are either relative paths or absolute URLs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomNodeSpec {
    pub tag: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<DomNodeSpec>,
}

impl DomNodeSpec {
    pub fn element(tag: &str) -> Self {
        DomNodeSpec {
            tag: tag.to_string(),
            attrs: BTreeMap::new(),
            text: None,
            children: Vec::new(),
        }
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a DomNodeSpec)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageSpec {
    pub path: String,
    pub dom: DomNodeSpec,
    pub scripts: Vec<ScriptId>,
}

/// Per-bundle analysis configuration. Form payloads double as the value used
/// when the input generator introduces an absent query key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    #[serde(default = "default_payloads")]
    pub form_payloads: Vec<String>,
}

fn default_payloads() -> Vec<String> {
    vec!["payload1".to_string()]
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            form_payloads: default_payloads(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AppBundle {
    pub seed_url: Url,
    pub pages: Vec<PageSpec>,
    pub config: AnalysisConfig,
    pub scripts: BTreeMap<ScriptId, Script>,
}

impl AppBundle {
    pub fn page_for_path(&self, path: &str) -> Option<&PageSpec> {
        self.pages.iter().find(|p| p.path == path)
    }

    pub fn script(&self, id: &ScriptId) -> Option<&Script> {
        self.scripts.get(id)
    }

    pub fn page_scripts(&self, page: &PageSpec) -> Vec<&Script> {
        page.scripts
            .iter()
            .filter_map(|id| self.scripts.get(id))
            .collect()
    }
}

#[derive(Debug, Clone, Error)]
pub struct BundleError {
    pub problems: Vec<String>,
}

impl fmt::Display for BundleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid bundle ({} problems):", self.problems.len())?;
        for p in &self.problems {
            write!(f, "\n  - {p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct ManifestDoc {
    seed_url: String,
    #[serde(default)]
    config: Option<AnalysisConfig>,
    pages: Vec<ManifestPage>,
}

#[derive(Debug, Deserialize)]
struct ManifestPage {
    path: String,
    dom: DomNodeSpec,
    #[serde(default)]
    scripts: Vec<String>,
}

/// Load and validate a bundle directory. Every problem found is collected
/// and reported together rather than failing on the first one.
pub fn load_bundle(root: &Path) -> Result<AppBundle, BundleError> {
    let mut problems = Vec::new();

    let manifest_path = root.join("manifest.json");
    let manifest_text = match std::fs::read_to_string(&manifest_path) {
        Ok(t) => t,
        Err(_) => {
            return Err(BundleError {
                problems: vec![format!("missing manifest: {}", manifest_path.display())],
            })
        }
    };
    let doc: ManifestDoc = match serde_json::from_str(&manifest_text) {
        Ok(d) => d,
        Err(e) => {
            return Err(BundleError {
                problems: vec![format!("manifest.json: {e}")],
            })
        }
    };

    let seed_url = match Url::parse(&doc.seed_url) {
        Ok(u) => Some(u),
        Err(e) => {
            problems.push(format!("seed_url: {e}"));
            None
        }
    };

    // Parse each distinct script file once; pages may share them.
    let mut scripts: BTreeMap<ScriptId, Script> = BTreeMap::new();
    let mut pages: Vec<PageSpec> = Vec::new();
    for page in &doc.pages {
        let mut ids = Vec::new();
        for file in &page.scripts {
            let id = ScriptId::new(file.clone());
            if !scripts.contains_key(&id) {
                let path = root.join(file);
                match std::fs::read_to_string(&path) {
                    Ok(text) => match parse_script(&text, file.clone()) {
                        Ok(script) => {
                            scripts.insert(id.clone(), script);
                        }
                        Err(e) => problems.push(format!("script {file}: {e}")),
                    },
                    Err(_) => problems.push(format!("missing script file: {file}")),
                }
            }
            ids.push(id);
        }
        pages.push(PageSpec {
            path: page.path.clone(),
            dom: page.dom.clone(),
            scripts: ids,
        });
    }

    for page in &pages {
        validate_page(page, &mut problems);
    }

    if let Some(seed) = &seed_url {
        let matching = pages.iter().filter(|p| p.path == seed.path()).count();
        if matching != 1 {
            problems.push(format!(
                "seed url path `{}` must match exactly one page, found {matching}",
                seed.path()
            ));
        }
        // Every in-host hyperlink must resolve to a page; other hosts are
        // external and left alone.
        let page_paths: BTreeSet<&str> = pages.iter().map(|p| p.path.as_str()).collect();
        for page in &pages {
            for href in extract_static_links_spec(&page.dom) {
                match seed.join_href(&href) {
                    Ok(resolved) => {
                        if resolved.host() == seed.host()
                            && !page_paths.contains(resolved.path())
                        {
                            problems.push(format!(
                                "page `{}`: unresolved link `{href}`",
                                page.path
                            ));
                        }
                    }
                    Err(e) => problems.push(format!("page `{}`: {e}", page.path)),
                }
            }
        }
    }

    if problems.is_empty() {
        Ok(AppBundle {
            seed_url: seed_url.expect("validated"),
            pages,
            config: doc.config.unwrap_or_default(),
            scripts,
        })
    } else {
        Err(BundleError { problems })
    }
}

fn validate_page(page: &PageSpec, problems: &mut Vec<String>) {
    let mut seen_ids = BTreeSet::new();
    page.dom.walk(&mut |node| {
        for name in node.attrs.keys() {
            if name.chars().any(|c| c.is_ascii_uppercase()) {
                problems.push(format!(
                    "page `{}`: attribute `{name}` must be lowercase",
                    page.path
                ));
            }
        }
        if let Some(id) = node.attrs.get("id") {
            if !seen_ids.insert(id.clone()) {
                problems.push(format!("page `{}`: duplicate element id `{id}`", page.path));
            }
        }
    });
}

/// Hrefs of anchor-like elements in document order, deduplicated.
pub fn extract_static_links(page: &PageSpec) -> Vec<String> {
    extract_static_links_spec(&page.dom)
}

fn extract_static_links_spec(dom: &DomNodeSpec) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    dom.walk(&mut |node| {
        if matches!(node.tag.as_str(), "a" | "area") {
            if let Some(href) = node.attrs.get("href") {
                if seen.insert(href.clone()) {
                    out.push(href.clone());
                }
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page_with_anchors(hrefs: &[&str]) -> PageSpec {
        let mut dom = DomNodeSpec::element("body");
        for href in hrefs {
            let mut a = DomNodeSpec::element("a");
            a.attrs.insert("href".to_string(), href.to_string());
            dom.children.push(a);
        }
        PageSpec {
            path: "/".to_string(),
            dom,
            scripts: Vec::new(),
        }
    }

    #[test]
    fn links_in_document_order() {
        let page = page_with_anchors(&["/a", "/b"]);
        assert_eq!(extract_static_links(&page), vec!["/a", "/b"]);
    }

    #[test]
    fn duplicate_links_collapse() {
        let page = page_with_anchors(&["/a", "/a"]);
        assert_eq!(extract_static_links(&page), vec!["/a"]);
    }

    #[test]
    fn missing_manifest_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_bundle(dir.path()).unwrap_err();
        assert!(err.problems[0].contains("missing manifest"));
    }

    #[test]
    fn absent_script_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{
                "seed_url": "http://app.local/",
                "pages": [{"path": "/", "dom": {"tag": "body"}, "scripts": ["ghost.gs"]}]
            }"#,
        )
        .unwrap();
        let err = load_bundle(dir.path()).unwrap_err();
        assert!(err.problems.iter().any(|p| p.contains("ghost.gs")));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{
                "seed_url": "http://app.local/",
                "pages": [{"path": "/", "dom": {"tag": "body", "children": [
                    {"tag": "div", "attrs": {"id": "x"}},
                    {"tag": "div", "attrs": {"id": "x"}}
                ]}, "scripts": []}]
            }"#,
        )
        .unwrap();
        let err = load_bundle(dir.path()).unwrap_err();
        assert!(err.problems.iter().any(|p| p.contains("duplicate element id")));
    }
}
