#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::process::{Child, Command, Stdio};

use futures_util::{SinkExt, StreamExt};
use navsim::geom::Vec2;
use navsim::nav::OccupancyGrid;
use tokio_tungstenite::tungstenite::Message;

/// Shortest-path distances by repeated relaxation over every cell until
/// nothing changes. Same move set as the production field: 8-connected, no
/// corner cutting, axial cost `res`, diagonal cost `res·√2`.
pub fn bellman_ford(g: &OccupancyGrid, goals: &[usize]) -> Vec<f64> {
    let (w, h) = (g.width() as i64, g.height() as i64);
    let free = |x: i64, z: i64| x >= 0 && z >= 0 && x < w && z < h && g.is_free((z * w + x) as usize);
    let axial = g.resolution();
    let diagonal = g.resolution() * std::f64::consts::SQRT_2;
    let mut dist = vec![f64::INFINITY; g.len()];
    for &c in goals {
        dist[c] = 0.0;
    }
    loop {
        let mut changed = false;
        for z in 0..h {
            for x in 0..w {
                if !free(x, z) {
                    continue;
                }
                let here = (z * w + x) as usize;
                for dz in -1..=1i64 {
                    for dx in -1..=1i64 {
                        if (dx, dz) == (0, 0) || !free(x + dx, z + dz) {
                            continue;
                        }
                        let diag = dx != 0 && dz != 0;
                        if diag && !(free(x + dx, z) && free(x, z + dz)) {
                            continue;
                        }
                        let from = ((z + dz) * w + x + dx) as usize;
                        let cand = dist[from] + if diag { diagonal } else { axial };
                        if cand < dist[here] {
                            dist[here] = cand;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Distance along a unit ray to an upright box, by testing each of the six
/// face planes and keeping hits inside the face. `None` on a miss.
#[allow(clippy::too_many_arguments)]
pub fn ray_box_faces(o: [f64; 3], d: [f64; 3], center: Vec2, half: Vec2, yaw: f64, y0: f64, y1: f64) -> Option<f64> {
    // local axes: u along the box's local x, v along its local z
    let u = Vec2::new(yaw.cos(), -yaw.sin());
    let v = Vec2::new(yaw.sin(), yaw.cos());
    let rel = Vec2::new(o[0] - center.x, o[2] - center.z);
    let (ou, ov, oy) = (rel.dot(u), rel.dot(v), o[1]);
    let dh = Vec2::new(d[0], d[2]);
    let (du, dv, dy) = (dh.dot(u), dh.dot(v), d[1]);
    let eps = 1e-9;
    let inside = |a: f64, lo: f64, hi: f64| a >= lo - eps && a <= hi + eps;
    let mut best: Option<f64> = None;
    let mut consider = |t: f64, pu: f64, pv: f64, py: f64| {
        if t > 0.0 && inside(pu, -half.x, half.x) && inside(pv, -half.z, half.z) && inside(py, y0, y1) {
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    };
    for s in [-1.0, 1.0] {
        if du != 0.0 {
            let t = (s * half.x - ou) / du;
            consider(t, s * half.x, ov + t * dv, oy + t * dy);
        }
        if dv != 0.0 {
            let t = (s * half.z - ov) / dv;
            consider(t, ou + t * du, s * half.z, oy + t * dy);
        }
    }
    for plane in [y0, y1] {
        if dy != 0.0 {
            let t = (plane - oy) / dy;
            consider(t, ou + t * du, ov + t * dv, plane);
        }
    }
    best
}

/// A `navsim-server` child process bound to a free local port.
pub struct ServerProcess {
    child: Child,
    pub addr: String,
}

impl ServerProcess {
    pub fn spawn() -> ServerProcess {
        Self::spawn_with(&[], None)
    }

    pub fn spawn_with(extra: &[&str], seed_env: Option<&str>) -> ServerProcess {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_navsim-server"));
        cmd.args(["--bind", "127.0.0.1:0", "--log-level", "warn"]).args(extra);
        match seed_env {
            Some(v) => cmd.env("NAVSIM_SEED", v),
            None => cmd.env_remove("NAVSIM_SEED"),
        };
        let mut child = cmd
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn navsim-server");
        let mut line = String::new();
        BufReader::new(child.stdout.take().expect("piped stdout"))
            .read_line(&mut line)
            .expect("read server banner");
        let addr = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        ServerProcess { child, addr }
    }

    pub fn url(&self) -> String {
        format!("ws://{}", self.addr)
    }
}

impl Drop for ServerProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Send each message in order over one connection and collect the replies.
pub async fn exchange(url: &str, messages: &[String]) -> Vec<String> {
    let (mut ws, _) = tokio_tungstenite::connect_async(url).await.expect("connect");
    let mut replies = Vec::with_capacity(messages.len());
    for m in messages {
        ws.send(Message::Text(m.clone())).await.expect("send");
        loop {
            match ws.next().await.expect("reply").expect("frame") {
                Message::Text(t) => {
                    replies.push(t);
                    break;
                }
                Message::Ping(_) | Message::Pong(_) => continue,
                other => panic!("unexpected frame {other:?}"),
            }
        }
    }
    replies
}

/// Blocking wrapper around [`exchange`].
pub fn exchange_blocking(url: &str, messages: &[String]) -> Vec<String> {
    tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .expect("runtime")
        .block_on(exchange(url, messages))
}

/// A recorded session: configuration, reset seed and action sequence.
pub fn transcript(config: serde_json::Value, seed: u64, actions: &[&str]) -> Vec<String> {
    let mut m = vec![
        serde_json::json!({"type": "hello", "version": "1"}).to_string(),
        serde_json::json!({"type": "configure", "config": config}).to_string(),
        serde_json::json!({"type": "reset", "seed": seed}).to_string(),
    ];
    m.extend(
        actions
            .iter()
            .map(|a| serde_json::json!({"type": "step", "action": a}).to_string()),
    );
    m.push(serde_json::json!({"type": "close"}).to_string());
    m
}
