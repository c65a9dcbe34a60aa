//! Drives the HTTP API end to end against a server on a local port: ingest,
//! background training job, detection and segment lookup.
//!
//! ```text
//! cargo run --release --example http_service
//! ```
//!
//! To keep a server running instead, use the binary:
//! `plagdet serve --engine <dir> --bind 127.0.0.1:8080`.

use std::thread::sleep;
use std::time::Duration;

use plagdet::corpus::{write_jsonl, ParaphraseProvider};
use plagdet::demo::{demo_config, demo_library, demo_training_pairs};
use plagdet::service::{spawn_background, Engine, ServeOptions};
use serde_json::{json, Value};

struct Client {
    base: String,
    agent: ureq::Agent,
}

impl Client {
    fn get(&self, path: &str) -> (u16, Value) {
        let mut resp = self.agent.get(format!("{}{path}", self.base)).call().expect("request");
        (resp.status().as_u16(), resp.body_mut().read_json().expect("json body"))
    }

    fn post(&self, path: &str, body: &Value) -> (u16, Value) {
        let mut resp = self
            .agent
            .post(format!("{}{path}", self.base))
            .send_json(body)
            .expect("request");
        (resp.status().as_u16(), resp.body_mut().read_json().expect("json body"))
    }
}

fn main() -> plagdet::Result<()> {
    let seed = 1;
    let addr = spawn_background(Engine::new(demo_config(seed))?, "127.0.0.1:0", ServeOptions::default())?;
    let client = Client {
        base: format!("http://{addr}"),
        agent: ureq::Agent::config_builder().http_status_as_error(false).build().into(),
    };
    println!("server on {}", client.base);
    let (status, body) = client.get("/health");
    println!("GET /health -> {status} {body}");

    let (status, body) = client.post("/detect", &json!({ "text": "anything" }));
    println!("POST /detect on an empty engine -> {status} {body}");

    let library = demo_library(seed);
    let (status, body) = client.post("/ingest", &json!({ "corpus": library }));
    println!("POST /ingest -> {status} {body}");

    let dataset = std::env::temp_dir().join("plagdet_http_example.jsonl");
    write_jsonl(&dataset, &demo_training_pairs(seed)?)?;
    let (status, body) = client.post("/train", &json!({ "dataset": dataset }));
    println!("POST /train -> {status} {body}");
    let job = body["job_id"].as_u64().expect("job id");
    loop {
        let (_, status) = client.get(&format!("/jobs/{job}"));
        match status["state"].as_str() {
            Some("running") => {
                println!("  job {job}: {} epochs done", status["epochs_done"]);
                sleep(Duration::from_secs(2));
            }
            _ => {
                println!("  job {job}: {}", status["state"]);
                break;
            }
        }
    }
    std::fs::remove_file(&dataset)?;

    let source = &library[42];
    let query = ParaphraseProvider::rule_stub(3).paraphrase(&source.text)?;
    let (status, report) = client.post("/detect", &json!({ "text": query, "k": 5 }));
    println!("\nPOST /detect -> {status}, query is a paraphrase of #{}", source.id);
    for c in report["candidates"].as_array().expect("candidates") {
        let probs: Vec<String> = c["probabilities"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|p| format!("{:.2}", p.as_f64().unwrap_or(f64::NAN)))
            .collect();
        let label = c["label_name"].as_str().unwrap_or("");
        println!(
            "  #{:<2} id {:<4} {label:<20} [{}]",
            c["rank"],
            c["segment_id"],
            probs.join(", ")
        );
    }

    let (status, segment) = client.get(&format!("/segments/{}", source.id));
    println!("\nGET /segments/{} -> {status} doc {}", source.id, segment["doc_id"]);
    let (status, body) = client.post("/detect", &json!({ "text": "x", "top_k": 3 }));
    println!("POST /detect with an unknown field -> {status} {body}");
    Ok(())
}
