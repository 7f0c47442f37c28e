use std::path::{Component, Path, PathBuf};

use serde::Serialize;
use url::Url;

use crate::eval::StepKind;
use crate::trace::{expand, search, ElisionPolicy, SearchQuery, WireTrace, FLAG_NAMES};

use super::session::Session;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

const JSON: &str = "application/json";
const TEXT: &str = "text/plain; charset=utf-8";

impl Response {
    fn json<T: Serialize>(value: &T) -> Response {
        let mut body = serde_json::to_string_pretty(value).expect("response serializes");
        body.push('\n');
        Response {
            status: 200,
            content_type: JSON,
            body: body.into_bytes(),
        }
    }

    fn error(status: u16, message: impl Into<String>) -> Response {
        let mut body = message.into();
        body.push('\n');
        Response {
            status,
            content_type: TEXT,
            body: body.into_bytes(),
        }
    }
}

#[derive(Serialize)]
struct ExpandedStep {
    i: usize,
    kind: &'static str,
    before: String,
    redex: [usize; 2],
    after: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    stdout: Option<String>,
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "1" | "true" | "on" => Some(true),
        "0" | "false" | "off" => Some(false),
        _ => None,
    }
}

/// Read-only HTTP view of one recorded session.
pub struct Server {
    session: Session,
    ui_dir: Option<PathBuf>,
}

impl Server {
    pub fn new(session: Session, ui_dir: Option<PathBuf>) -> Self {
        Server { session, ui_dir }
    }

    /// Routes one GET request given its path and query string.
    pub fn handle(&self, target: &str) -> Response {
        let Ok(url) = Url::parse("http://localhost").and_then(|base| base.join(target)) else {
            return Response::error(400, "malformed request target");
        };
        let params: Vec<(String, String)> = url.query_pairs().into_owned().collect();
        let segments: Vec<&str> = url.path().trim_start_matches('/').split('/').collect();
        match segments.as_slice() {
            ["api", "trace"] => self.trace(&params),
            ["api", "step", i, "expand"] => self.expand(i, &params),
            ["api", "search"] => self.search(&params),
            ["api", "source"] => Response {
                status: 200,
                content_type: TEXT,
                body: self.session.source.clone().into_bytes(),
            },
            ["api", ..] => Response::error(404, "no such endpoint"),
            _ => self.static_file(url.path()),
        }
    }

    /// Policy from `policy=a,b,...` (listed flags on, others off) and
    /// per-flag `name=0|1` overrides. `extra` names other accepted keys.
    fn policy(params: &[(String, String)], extra: &[&str]) -> Result<ElisionPolicy, Response> {
        let mut policy = ElisionPolicy::default();
        for (k, v) in params {
            if k == "policy" {
                for name in ["a", "b", "c", "d", "e", "f", "g", "stdlib", "naive"] {
                    policy.set(name, false).expect("known flag");
                }
                for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    policy
                        .set(name, true)
                        .map_err(|e| Response::error(400, e.to_string()))?;
                }
            }
        }
        for (k, v) in params {
            if k == "policy" || extra.contains(&k.as_str()) {
                continue;
            }
            if !FLAG_NAMES.contains(&k.as_str()) {
                return Err(Response::error(400, format!("unknown parameter '{k}'")));
            }
            let on = parse_bool(v).ok_or_else(|| Response::error(400, format!("bad value for '{k}'")))?;
            policy.set(k, on).expect("known flag");
        }
        Ok(policy)
    }

    fn trace(&self, params: &[(String, String)]) -> Response {
        match Self::policy(params, &[]) {
            Ok(policy) => {
                let display = self.session.compose(&policy);
                let wire = WireTrace::new(&display, &self.session.source, &policy, &self.session.result.outcome);
                Response {
                    status: 200,
                    content_type: JSON,
                    body: wire.to_json().into_bytes(),
                }
            }
            Err(r) => r,
        }
    }

    fn expand(&self, index: &str, params: &[(String, String)]) -> Response {
        let policy = match Self::policy(params, &[]) {
            Ok(p) => p,
            Err(r) => return r,
        };
        let Ok(index) = index.parse::<usize>() else {
            return Response::error(404, "no such step");
        };
        let display = self.session.compose(&policy);
        match expand(&self.session.result.trace, &display, index) {
            Ok(views) => Response::json(
                &views
                    .into_iter()
                    .map(|v| ExpandedStep {
                        i: v.index,
                        kind: v.kind.name(),
                        before: v.before,
                        redex: [v.redex.0, v.redex.1],
                        after: v.after,
                        stdout: v.stdout,
                    })
                    .collect::<Vec<_>>(),
            ),
            Err(e) => Response::error(404, e.to_string()),
        }
    }

    fn search(&self, params: &[(String, String)]) -> Response {
        let policy = match Self::policy(params, &["mode", "q", "case"]) {
            Ok(p) => p,
            Err(r) => return r,
        };
        let get = |key: &str| params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let Some(q) = get("q") else {
            return Response::error(400, "missing 'q'");
        };
        let query = match get("mode").unwrap_or("substring") {
            "substring" => SearchQuery::substring(q),
            "function" => SearchQuery::function(q),
            "exception" => SearchQuery::exception(q),
            "kind" => match q.parse::<StepKind>() {
                Ok(k) => SearchQuery::kind(k),
                Err(e) => return Response::error(400, e),
            },
            other => return Response::error(400, format!("unknown search mode '{other}'")),
        };
        let query = match get("case").map(parse_bool) {
            None | Some(Some(true)) => query,
            Some(Some(false)) => query.ignore_case(),
            Some(None) => return Response::error(400, "bad value for 'case'"),
        };
        let display = self.session.compose(&policy);
        Response::json(&search(&self.session.result.trace, &display, &query))
    }

    fn static_file(&self, path: &str) -> Response {
        let Some(root) = &self.ui_dir else {
            return Response::error(404, "no UI bundle configured");
        };
        let rel = Path::new(path.trim_start_matches('/'));
        if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
            return Response::error(404, "not found");
        }
        let mut file = root.join(rel);
        if path.ends_with('/') || rel.as_os_str().is_empty() {
            file = file.join("index.html");
        }
        match std::fs::read(&file) {
            Ok(body) => Response {
                status: 200,
                content_type: content_type(&file),
                body,
            },
            Err(_) => Response::error(404, "not found"),
        }
    }

    /// Answers requests on `port` until the process is stopped.
    pub fn listen(&self, port: u16) -> std::io::Result<()> {
        let server = tiny_http::Server::http(("127.0.0.1", port)).map_err(std::io::Error::other)?;
        eprintln!("serving on http://127.0.0.1:{port}/");
        for request in server.incoming_requests() {
            let response = if *request.method() == tiny_http::Method::Get {
                self.handle(request.url())
            } else {
                Response::error(405, "only GET is supported")
            };
            let header = tiny_http::Header::from_bytes(&b"Content-Type"[..], response.content_type.as_bytes())
                .expect("static header is valid");
            let reply = tiny_http::Response::from_data(response.body)
                .with_status_code(response.status)
                .with_header(header);
            if let Err(e) = request.respond(reply) {
                eprintln!("failed to send response: {e}");
            }
        }
        Ok(())
    }
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => JSON,
        Some("svg") => "image/svg+xml",
        _ => "application/octet-stream",
    }
}
