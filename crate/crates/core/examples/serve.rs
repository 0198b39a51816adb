//! Runs the HTTP API in-process on the bundled corpus and exercises it
//! with a few requests before shutting down. Pass `--forever` to keep it
//! running.

use std::path::PathBuf;

use proncoach::service::{build, ServiceConfig};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let config = ServiceConfig {
        corpus: data.join("corpus.json"),
        assets: data.join("assets"),
        seed: Some(42),
        ..ServiceConfig::default()
    };
    let (state, app) = build(&config)?;
    state.set_corpus(proncoach::content::load_corpus(&config.corpus, &config.assets)?);

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    println!("listening on http://{addr}");
    let server = tokio::spawn(async move { axum::serve(listener, app).await });
    if std::env::args().any(|a| a == "--forever") {
        server.await??;
        return Ok(());
    }

    let client = reqwest::Client::new();
    let item: serde_json::Value =
        serde_json::from_slice(&client.get(format!("http://{addr}/api/v1/items/random")).send().await?.bytes().await?)?;
    println!("random item: {} {}", item["id"], item["vowelized_text"]);

    let boundary = "example-boundary";
    let body = format!(
        "--{boundary}\r\nContent-Disposition: form-data; name=\"hypothesis_text\"\r\n\r\n{}\r\n--{boundary}--\r\n",
        item["vowelized_text"].as_str().unwrap_or_default()
    );
    let resp = client
        .post(format!("http://{addr}/api/v1/items/{}/attempts", item["id"].as_str().unwrap_or_default()))
        .header("content-type", format!("multipart/form-data; boundary={boundary}"))
        .body(body)
        .send()
        .await?;
    let fb: serde_json::Value = serde_json::from_slice(&resp.bytes().await?)?;
    println!("identity attempt: value {} stars {}", fb["utterance"]["value"], fb["utterance"]["stars"]);

    let asset = item["audio_normal_ref"].as_str().unwrap_or_default();
    let resp = client.get(format!("http://{addr}/api/v1/assets/{asset}")).send().await?;
    let content_type = resp.headers().get("content-type").cloned();
    println!("{asset}: {} {:?}, {} bytes", resp.status(), content_type, resp.bytes().await?.len());
    Ok(())
}
