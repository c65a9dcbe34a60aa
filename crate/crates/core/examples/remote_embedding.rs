//! Uses the remote embedding provider against a toy embedding service that
//! answers `{"texts": [..]}` with 26-dimensional letter histograms.

use axum::routing::post;
use axum::{Json, Router};
use plagdet::embed::EmbeddingProviderConfig;
use serde_json::{json, Value};

async fn embed(Json(body): Json<Value>) -> Json<Value> {
    let vectors: Vec<Vec<f32>> = body["texts"]
        .as_array()
        .map(|texts| {
            texts
                .iter()
                .map(|t| {
                    let mut v = vec![0.0f32; 26];
                    for c in t.as_str().unwrap_or("").chars().filter(char::is_ascii_alphabetic) {
                        v[(c.to_ascii_lowercase() as u8 - b'a') as usize] += 1.0;
                    }
                    v
                })
                .collect()
        })
        .unwrap_or_default();
    Json(json!({ "vectors": vectors }))
}

fn main() -> plagdet::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let addr = listener.local_addr()?;
    runtime.spawn(async move { axum::serve(listener, Router::new().route("/embed", post(embed))).await });

    let config = EmbeddingProviderConfig::remote(format!("http://{addr}/embed"), 26);
    let embedder = config.build()?;
    let texts = ["listen", "silent", "enlist", "banana"];
    let vectors = embedder.embed_batch(&texts)?;
    for (t, v) in texts.iter().zip(&vectors) {
        println!(
            "{t:>7}: cos(listen) = {:.3}, norm {:.3}",
            v.cosine(&vectors[0]),
            v.norm()
        );
    }

    let wrong = EmbeddingProviderConfig::remote(format!("http://{addr}/embed"), 32).build()?;
    println!("\nwith the wrong dimension: {}", wrong.embed("listen").unwrap_err());
    let down = EmbeddingProviderConfig::remote("http://127.0.0.1:9/embed", 26).build()?;
    println!("with nothing listening: {}", down.embed("listen").unwrap_err());
    Ok(())
}
