//! Minimal URL model: `scheme://host/path?query#fragment`. The query is kept
//! as ordered key=value pairs and all comparisons happen on the raw string,
//! so a URL round-trips byte-for-byte through parse and rebuild.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Url {
    raw: String,
    scheme: String,
    host: String,
    path: String,
    query: Vec<(String, String)>,
    fragment: Option<String>,
}

impl Url {
    pub fn parse(raw: &str) -> Result<Url, UrlError> {
        let (scheme, rest) = raw
            .split_once("://")
            .ok_or_else(|| UrlError::new(raw, "missing scheme"))?;
        if scheme.is_empty() {
            return Err(UrlError::new(raw, "missing scheme"));
        }
        let (before_frag, fragment) = match rest.split_once('#') {
            Some((b, f)) => (b, Some(f.to_string())),
            None => (rest, None),
        };
        let (before_query, query_str) = match before_frag.split_once('?') {
            Some((b, q)) => (b, Some(q)),
            None => (before_frag, None),
        };
        let (host, path) = match before_query.find('/') {
            Some(idx) => (
                before_query[..idx].to_string(),
                before_query[idx..].to_string(),
            ),
            None => (before_query.to_string(), "/".to_string()),
        };
        if host.is_empty() {
            return Err(UrlError::new(raw, "missing host"));
        }
        let query = query_str
            .map(|q| {
                q.split('&')
                    .filter(|kv| !kv.is_empty())
                    .map(|kv| match kv.split_once('=') {
                        Some((k, v)) => (k.to_string(), v.to_string()),
                        None => (kv.to_string(), String::new()),
                    })
                    .collect()
            })
            .unwrap_or_default();
        Ok(Url {
            raw: raw.to_string(),
            scheme: scheme.to_string(),
            host: host.to_string(),
            path,
            query,
            fragment,
        })
    }

    fn rebuild(
        scheme: &str,
        host: &str,
        path: &str,
        query: &[(String, String)],
        fragment: Option<&str>,
    ) -> Url {
        let mut raw = format!("{scheme}://{host}{path}");
        if !query.is_empty() {
            raw.push('?');
            for (i, (k, v)) in query.iter().enumerate() {
                if i > 0 {
                    raw.push('&');
                }
                raw.push_str(k);
                raw.push('=');
                raw.push_str(v);
            }
        }
        if let Some(f) = fragment {
            raw.push('#');
            raw.push_str(f);
        }
        Url {
            raw,
            scheme: scheme.to_string(),
            host: host.to_string(),
            path: path.to_string(),
            query: query.to_vec(),
            fragment: fragment.map(|f| f.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    pub fn host(&self) -> &str {
        &self.host
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn query(&self) -> &[(String, String)] {
        &self.query
    }

    pub fn query_value(&self, key: &str) -> Option<&str> {
        self.query
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn fragment(&self) -> Option<&str> {
        self.fragment.as_deref()
    }

    /// `location.hash` semantics: `#fragment`, or empty when absent.
    pub fn hash_string(&self) -> String {
        match &self.fragment {
            Some(f) => format!("#{f}"),
            None => String::new(),
        }
    }

    /// `location.search` semantics: `?key=value&...`, or empty when absent.
    pub fn search_string(&self) -> String {
        if self.query.is_empty() {
            return String::new();
        }
        let pairs: Vec<String> = self
            .query
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("?{}", pairs.join("&"))
    }

    pub fn with_fragment(&self, fragment: Option<&str>) -> Url {
        Url::rebuild(&self.scheme, &self.host, &self.path, &self.query, fragment)
    }

    pub fn with_path(&self, path: &str) -> Url {
        Url::rebuild(
            &self.scheme,
            &self.host,
            path,
            &self.query,
            self.fragment.as_deref(),
        )
    }

    pub fn with_query(&self, query: Vec<(String, String)>) -> Url {
        Url::rebuild(
            &self.scheme,
            &self.host,
            &self.path,
            &query,
            self.fragment.as_deref(),
        )
    }

    pub fn with_appended_query(&self, key: &str, value: &str) -> Url {
        let mut query = self.query.clone();
        query.push((key.to_string(), value.to_string()));
        self.with_query(query)
    }

    /// Resolve an href attribute against this URL. Relative hrefs are paths
    /// within the same host; absolute ones parse on their own.
    pub fn join_href(&self, href: &str) -> Result<Url, UrlError> {
        if href.contains("://") {
            Url::parse(href)
        } else if let Some(path) = href.strip_prefix('/') {
            Ok(Url::rebuild(
                &self.scheme,
                &self.host,
                &format!("/{path}"),
                &[],
                None,
            ))
        } else {
            Err(UrlError::new(href, "href must be absolute or begin with /"))
        }
    }
}

impl fmt::Display for Url {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl Serialize for Url {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.raw)
    }
}

impl<'de> Deserialize<'de> for Url {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Url::parse(&raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("invalid url `{url}`: {message}")]
pub struct UrlError {
    pub url: String,
    pub message: String,
}

impl UrlError {
    fn new(url: &str, message: impl Into<String>) -> Self {
        UrlError {
            url: url.to_string(),
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_components() {
        let u = Url::parse("http://app.local/widget?theme=dark&x=1#top").unwrap();
        assert_eq!(u.host(), "app.local");
        assert_eq!(u.path(), "/widget");
        assert_eq!(u.query_value("theme"), Some("dark"));
        assert_eq!(u.fragment(), Some("top"));
        assert_eq!(u.hash_string(), "#top");
        assert_eq!(u.search_string(), "?theme=dark&x=1");
    }

    #[test]
    fn bare_host_gets_root_path() {
        let u = Url::parse("http://app.local#action").unwrap();
        assert_eq!(u.path(), "/");
        assert_eq!(u.fragment(), Some("action"));
    }

    #[test]
    fn fragment_swap_preserves_everything_else() {
        let u = Url::parse("http://app.local/#action").unwrap();
        let swapped = u.with_fragment(Some("show"));
        assert_eq!(swapped.as_str(), "http://app.local/#show");
    }

    #[test]
    fn appended_query_round_trips() {
        let u = Url::parse("http://app.local/widget").unwrap();
        let q = u.with_appended_query("theme", "payload1");
        assert_eq!(q.as_str(), "http://app.local/widget?theme=payload1");
        assert_eq!(q.search_string(), "?theme=payload1");
    }

    #[test]
    fn join_href_variants() {
        let base = Url::parse("http://app.local/index").unwrap();
        assert_eq!(base.join_href("/a").unwrap().as_str(), "http://app.local/a");
        assert_eq!(
            base.join_href("http://other.example/x").unwrap().host(),
            "other.example"
        );
        assert!(base.join_href("relative").is_err());
    }
}
