//! Session server: one isolated simulator per WebSocket connection, speaking
//! JSON text frames.
//!
//! A session runs `hello → configure → (reset → step*)* → close`. Any message
//! out of order is answered with a `bad_state` error and leaves the session
//! unchanged. Camera frames travel base64-encoded; an unreachable shortest-path
//! distance is sent as -1.

mod protocol;
mod session;

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use futures_util::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio_tungstenite::tungstenite::Message;

pub use protocol::{
    encode_observation, ClientMessage, ErrorCode, SceneSource, SensorLayout, ServerMessage, SessionConfig, WireContact,
    WireFrame, WireMeasurements, WireReading, PROTOCOL_VERSION,
};
pub use session::{Session, SessionOptions, SessionState, MAX_REPEAT};

/// Accept connections until the listener fails. Session ids count up from 1
/// per server.
pub async fn serve(listener: TcpListener, opts: SessionOptions) -> std::io::Result<()> {
    let opts = Arc::new(opts);
    let counter = Arc::new(AtomicU64::new(1));
    loop {
        let (stream, peer) = listener.accept().await?;
        let id = counter.fetch_add(1, Ordering::Relaxed).to_string();
        let opts = opts.clone();
        tokio::spawn(async move {
            if let Err(e) = connection(stream, peer, id.clone(), (*opts).clone()).await {
                log::warn!("session {id} ({peer}): {e}");
            }
        });
    }
}

async fn connection(
    stream: TcpStream,
    peer: SocketAddr,
    id: String,
    opts: SessionOptions,
) -> Result<(), tokio_tungstenite::tungstenite::Error> {
    let mut ws = tokio_tungstenite::accept_async(stream).await?;
    log::info!("session {id} opened by {peer}");
    let mut session = Some(Session::new(id.clone(), opts));
    while let Some(msg) = ws.next().await {
        let reply = match msg? {
            Message::Text(text) => {
                let mut s = session.take().expect("session present between messages");
                // simulation is CPU-bound; keep it off the reactor threads
                let (s, reply) = tokio::task::spawn_blocking(move || {
                    let reply = s.handle_text(&text);
                    (s, reply)
                })
                .await
                .expect("session handler panicked");
                let closed = s.is_closed();
                session = Some(s);
                ws.send(Message::Text(reply)).await?;
                if closed {
                    break;
                }
                continue;
            }
            Message::Binary(_) => ServerMessage::error(ErrorCode::BadMessage, "binary frames are not supported").to_json(),
            Message::Close(_) => break,
            _ => continue,
        };
        ws.send(Message::Text(reply)).await?;
    }
    let _ = ws.close(None).await;
    log::info!("session {id} closed");
    Ok(())
}
