use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use spacevolve::llm::{extract_program, Gateway, GenerationConfig, HttpBackend, HttpConfig, LlmError};

/// Serves one canned HTTP response per entry, returning each request body.
fn stub(responses: Vec<(u16, String)>) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = thread::spawn(move || {
        let mut bodies = Vec::new();
        for (status, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = line.trim().to_string();
                }
                if line == "\r\n" || line.is_empty() {
                    break;
                }
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            bodies.push(format!("{auth}\n{}", String::from_utf8(buf).unwrap()));
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
        bodies
    });
    (format!("http://{addr}/v1"), handle)
}

fn http_gateway(base: &str, budget: u64) -> Gateway {
    let mut cfg = HttpConfig::new(base, "sekret");
    cfg.backoff = vec![Duration::ZERO; 3];
    cfg.timeout = Duration::from_secs(10);
    Gateway::new(Arc::new(HttpBackend::new(cfg)), budget, GenerationConfig { model: "m".into(), ..Default::default() })
}

const OK_BODY: &str = r#"{"choices":[{"message":{"role":"assistant","content":"def priority():\n    return 1\n"}}]}"#;

#[test]
fn http_round_trip() {
    let (base, server) = stub(vec![(200, OK_BODY.into())]);
    let gw = http_gateway(&base, 5);
    assert_eq!(gw.call(0, "hello").unwrap(), "def priority():\n    return 1\n");
    let seen = server.join().unwrap();
    assert!(seen[0].to_ascii_lowercase().starts_with("authorization: bearer sekret"));
    let body: serde_json::Value = serde_json::from_str(seen[0].split_once('\n').unwrap().1).unwrap();
    assert_eq!(body["model"], "m");
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], "hello");
}

#[test]
fn http_retries_then_succeeds() {
    let (base, server) = stub(vec![(500, "{}".into()), (429, "{}".into()), (200, OK_BODY.into())]);
    let gw = http_gateway(&base, 5);
    assert!(gw.call(0, "x").is_ok());
    assert_eq!(server.join().unwrap().len(), 3);
    assert_eq!(gw.budget().used(), 1);
}

#[test]
fn http_gives_up_after_retries() {
    let (base, server) = stub(vec![(503, "{}".into()); 4]);
    let gw = http_gateway(&base, 5);
    match gw.call(0, "x") {
        Err(LlmError::Transport { attempts, .. }) => assert_eq!(attempts, 4),
        other => panic!("{other:?}"),
    }
    server.join().unwrap();
    assert_eq!(gw.budget().used(), 1);
}

#[test]
fn http_malformed() {
    let (base, server) = stub(vec![(200, r#"{"choices":[]}"#.into())]);
    let gw = http_gateway(&base, 5);
    assert!(matches!(gw.call(0, "x"), Err(LlmError::MalformedResponse(_))));
    server.join().unwrap();
}

#[test]
fn extraction_examples() {
    let fenced = "```python\ndef priority(el, n):\n    return sum(el)\n```";
    assert_eq!(extract_program(fenced).unwrap().text, "def priority(el, n):\n    return sum(el)\n");
    let restated = "def priority_v0(el, n):\n    return 0.0\n\n\ndef priority_new(el, n):\n    return 1.0\n";
    assert!(extract_program(restated).unwrap().text.starts_with("def priority_new("));
    assert!(extract_program("Sorry, no code today.").is_err());
}
