//! Exact-phrase hit counts with a mandatory write-through cache.
//!
//! Live lookups are opt-in. The endpoint receives `GET <endpoint>?q="<phrase>"`
//! and must answer with either a bare integer or a JSON object carrying a
//! non-negative integer `count` field.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use super::ResourceError;

#[derive(Debug, Clone, PartialEq)]
pub struct HitConfig {
    pub network_enabled: bool,
    pub endpoint: Option<String>,
    pub timeout: Duration,
}

impl Default for HitConfig {
    fn default() -> Self {
        Self {
            network_enabled: false,
            endpoint: None,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Debug)]
pub struct HitCountProvider {
    cache: Mutex<BTreeMap<String, u64>>,
    cache_path: Option<PathBuf>,
    config: HitConfig,
}

pub(crate) fn parse_count_body(body: &str) -> Option<u64> {
    let v: serde_json::Value = serde_json::from_str(body.trim()).ok()?;
    match v {
        serde_json::Value::Number(n) => n.as_u64(),
        serde_json::Value::Object(m) => m.get("count")?.as_u64(),
        _ => None,
    }
}

impl HitCountProvider {
    /// In-memory provider with the given cache and no backing file.
    pub fn in_memory(cache: BTreeMap<String, u64>, config: HitConfig) -> Self {
        Self {
            cache: Mutex::new(cache),
            cache_path: None,
            config,
        }
    }

    /// Opens (or starts) the cache file at `path`; new entries are written
    /// back to it.
    pub fn open(path: impl Into<PathBuf>, config: HitConfig) -> Result<Self, ResourceError> {
        let path = path.into();
        let cache = if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| ResourceError::io(&path, e))?;
            if text.trim().is_empty() {
                BTreeMap::new()
            } else {
                serde_json::from_str(&text).map_err(|e| ResourceError::parse("hit-count cache", 0, e))?
            }
        } else {
            BTreeMap::new()
        };
        Ok(Self {
            cache: Mutex::new(cache),
            cache_path: Some(path),
            config,
        })
    }

    pub fn config(&self) -> &HitConfig {
        &self.config
    }

    pub fn cache_path(&self) -> Option<&Path> {
        self.cache_path.as_deref()
    }

    pub fn cached(&self, phrase: &str) -> Option<u64> {
        self.lock().get(phrase).copied()
    }

    pub fn snapshot(&self) -> BTreeMap<String, u64> {
        self.lock().clone()
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.lock().is_empty()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, BTreeMap<String, u64>> {
        self.cache.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Count for `phrase`; cached values never touch the network.
    pub fn hit_count(&self, phrase: &str) -> Result<u64, ResourceError> {
        if phrase.trim().is_empty() {
            return Err(ResourceError::EmptyPhrase);
        }
        if let Some(c) = self.cached(phrase) {
            return Ok(c);
        }
        let endpoint = match (&self.config.network_enabled, &self.config.endpoint) {
            (true, Some(e)) => e,
            _ => return Err(ResourceError::CacheMissOffline(phrase.to_string())),
        };
        let count = self.fetch(endpoint, phrase)?;
        self.store(phrase, count)?;
        Ok(count)
    }

    fn fetch(&self, endpoint: &str, phrase: &str) -> Result<u64, ResourceError> {
        let agent = ureq::AgentBuilder::new().timeout(self.config.timeout).build();
        let body = agent
            .get(endpoint)
            .query("q", &format!("\"{phrase}\""))
            .call()
            .map_err(|e| ResourceError::Network(e.to_string()))?
            .into_string()
            .map_err(|e| ResourceError::Network(e.to_string()))?;
        parse_count_body(&body)
            .ok_or_else(|| ResourceError::Network(format!("unparseable hit-count response `{}`", body.trim())))
    }

    /// Inserts a count and persists the cache file (if any) before returning.
    pub fn store(&self, phrase: &str, count: u64) -> Result<(), ResourceError> {
        let mut cache = self.lock();
        cache.insert(phrase.to_string(), count);
        if let Some(path) = &self.cache_path {
            let tmp = path.with_extension("json.tmp");
            let text = serde_json::to_string_pretty(&*cache).expect("string map serializes");
            fs::write(&tmp, text).map_err(|e| ResourceError::io(&tmp, e))?;
            fs::rename(&tmp, path).map_err(|e| ResourceError::io(path, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// Serves `n` requests, answering each with `body`; returns the URL and
    /// a handle yielding the request lines seen.
    fn stub_server(body: &'static str, n: usize) -> (String, std::thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/count", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let mut seen = Vec::new();
            for stream in listener.incoming().take(n) {
                let mut s = stream.unwrap();
                let mut buf = [0u8; 4096];
                let k = s.read(&mut buf).unwrap();
                let req = String::from_utf8_lossy(&buf[..k]).to_string();
                seen.push(req.lines().next().unwrap_or_default().to_string());
                let resp = format!(
                    "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    body.len(),
                    body
                );
                s.write_all(resp.as_bytes()).unwrap();
            }
            seen
        });
        (url, handle)
    }

    #[test]
    fn cache_passthrough_offline() {
        let p = HitCountProvider::in_memory(BTreeMap::from([("clever cat".to_string(), 120)]), HitConfig::default());
        assert_eq!(p.hit_count("clever cat").unwrap(), 120);
        assert!(matches!(p.hit_count("clever mouse"), Err(ResourceError::CacheMissOffline(_))));
        assert!(matches!(p.hit_count(" "), Err(ResourceError::EmptyPhrase)));
    }

    #[test]
    fn live_lookup_writes_through() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hits.json");
        let (url, server) = stub_server("{\"count\": 4321}", 1);
        let online = HitCountProvider::open(
            &path,
            HitConfig {
                network_enabled: true,
                endpoint: Some(url),
                ..HitConfig::default()
            },
        )
        .unwrap();
        assert_eq!(online.hit_count("clever mouse").unwrap(), 4321);
        // second call is served from cache: the stub only answers once
        assert_eq!(online.hit_count("clever mouse").unwrap(), 4321);
        let seen = server.join().unwrap();
        assert_eq!(seen.len(), 1);
        assert!(seen[0].contains("q=%22clever") || seen[0].contains("q=\"clever"), "{}", seen[0]);

        let offline = HitCountProvider::open(&path, HitConfig::default()).unwrap();
        assert_eq!(offline.hit_count("clever mouse").unwrap(), 4321);
    }

    #[test]
    fn bad_response_is_not_cached() {
        let (url, server) = stub_server("about 12 results", 1);
        let p = HitCountProvider::in_memory(
            BTreeMap::new(),
            HitConfig {
                network_enabled: true,
                endpoint: Some(url),
                ..HitConfig::default()
            },
        );
        assert!(matches!(p.hit_count("cat was"), Err(ResourceError::Network(_))));
        server.join().unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn count_body_formats() {
        assert_eq!(parse_count_body("17\n"), Some(17));
        assert_eq!(parse_count_body("{\"count\": 3, \"x\": 1}"), Some(3));
        assert_eq!(parse_count_body("{\"count\": -3}"), None);
        assert_eq!(parse_count_body("nope"), None);
    }
}
