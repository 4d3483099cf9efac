//! A scripted HTTP server on 127.0.0.1 for exercising the live clients offline.

use axum::body::Body;
use axum::extract::Request;
use axum::http::{HeaderName, HeaderValue, StatusCode};
use axum::response::Response;
use axum::Router;
use expertquest::sources::{Clock, FakeClock};
use std::sync::{Arc, Mutex};
use std::time::Duration;

#[derive(Debug, Clone)]
pub struct Logged {
    pub method: String,
    /// Path plus query string.
    pub target: String,
    pub authorization: Option<String>,
    pub body: String,
    /// Fake-clock time when the request arrived.
    pub at: Duration,
}

pub struct Reply {
    pub status: u16,
    pub headers: Vec<(&'static str, String)>,
    pub body: String,
}

impl Reply {
    pub fn json(status: u16, body: impl Into<String>) -> Self {
        Reply { status, headers: vec![("content-type", "application/json".into())], body: body.into() }
    }

    pub fn header(mut self, name: &'static str, value: impl Into<String>) -> Self {
        self.headers.push((name, value.into()));
        self
    }
}

type Handler = dyn Fn(&Logged, usize) -> Reply + Send + Sync;

pub struct Stub {
    pub base: String,
    log: Arc<Mutex<Vec<Logged>>>,
}

impl Stub {
    /// Serve `handler(request, index_of_request)` until the test process exits.
    pub fn start(clock: Arc<FakeClock>, handler: impl Fn(&Logged, usize) -> Reply + Send + Sync + 'static) -> Stub {
        let log: Arc<Mutex<Vec<Logged>>> = Arc::default();
        let handler: Arc<Handler> = Arc::new(handler);
        let std_listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        std_listener.set_nonblocking(true).unwrap();
        let base = format!("http://{}", std_listener.local_addr().unwrap());
        let state = log.clone();
        std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
            rt.block_on(async move {
                let app = Router::new().fallback(move |req: Request| {
                    let (log, handler, clock) = (state.clone(), handler.clone(), clock.clone());
                    async move {
                        let (parts, body) = req.into_parts();
                        let body = axum::body::to_bytes(body, 1 << 20).await.unwrap();
                        let entry = Logged {
                            method: parts.method.to_string(),
                            target: parts.uri.path_and_query().map(|p| p.to_string()).unwrap_or_default(),
                            authorization: parts.headers.get("authorization").map(|v| v.to_str().unwrap().to_string()),
                            body: String::from_utf8_lossy(&body).into_owned(),
                            at: clock.now(),
                        };
                        let index = {
                            let mut log = log.lock().unwrap();
                            log.push(entry.clone());
                            log.len() - 1
                        };
                        let reply = handler(&entry, index);
                        let mut resp = Response::new(Body::from(reply.body));
                        *resp.status_mut() = StatusCode::from_u16(reply.status).unwrap();
                        for (k, v) in reply.headers {
                            resp.headers_mut().insert(HeaderName::from_static(k), HeaderValue::from_str(&v).unwrap());
                        }
                        resp
                    }
                });
                let listener = tokio::net::TcpListener::from_std(std_listener).unwrap();
                axum::serve(listener, app).await.unwrap();
            });
        });
        Stub { base, log }
    }

    pub fn requests(&self) -> Vec<Logged> {
        self.log.lock().unwrap().clone()
    }
}
