//! One task owns each session. Handlers talk to it over a command channel;
//! every emitted trace record is also broadcast to event-stream subscribers.

use std::time::Duration;

use colav_core::{Characteristic, Playback, Result, Session, SessionSnapshot, TraceEntry, Verdict};
use tokio::sync::{broadcast, mpsc, oneshot};
use tokio::time::{interval, Instant, MissedTickBehavior};

use super::error::ApiError;

const EVENT_BUFFER: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaybackAction {
    Play,
    Pause,
    Seek(f64),
}

type Reply<T> = oneshot::Sender<T>;

enum Command {
    Snapshot(Reply<SessionSnapshot>),
    Playback(PlaybackAction, Reply<Result<SessionSnapshot>>),
    Decision(Verdict, Reply<Result<SessionSnapshot>>),
    Foil(Characteristic, Reply<Result<SessionSnapshot>>),
    Subscribe(u64, Reply<Subscription>),
}

/// Records after the requested sequence number, plus a receiver for
/// everything emitted afterwards. Taken atomically, so nothing is lost.
pub struct Subscription {
    pub backlog: Vec<TraceEntry>,
    pub live: broadcast::Receiver<TraceEntry>,
}

#[derive(Clone)]
pub struct SessionHandle {
    tx: mpsc::Sender<Command>,
}

impl SessionHandle {
    /// Spawns the owning task. `period` is the wall-clock time per tick
    /// while playing.
    pub fn spawn(session: Session, period: Duration) -> Self {
        let (tx, rx) = mpsc::channel(64);
        let (events, _) = broadcast::channel(EVENT_BUFFER);
        tokio::spawn(run(session, rx, events, period));
        Self { tx }
    }

    async fn ask<T>(&self, make: impl FnOnce(Reply<T>) -> Command) -> Result<T, ApiError> {
        let (reply, rx) = oneshot::channel();
        self.tx.send(make(reply)).await.map_err(|_| ApiError::gone())?;
        rx.await.map_err(|_| ApiError::gone())
    }

    pub async fn snapshot(&self) -> Result<SessionSnapshot, ApiError> {
        self.ask(Command::Snapshot).await
    }

    pub async fn playback(&self, action: PlaybackAction) -> Result<SessionSnapshot, ApiError> {
        Ok(self.ask(|r| Command::Playback(action, r)).await??)
    }

    pub async fn decide(&self, verdict: Verdict) -> Result<SessionSnapshot, ApiError> {
        Ok(self.ask(|r| Command::Decision(verdict, r)).await??)
    }

    pub async fn set_foil(&self, c: Characteristic) -> Result<SessionSnapshot, ApiError> {
        Ok(self.ask(|r| Command::Foil(c, r)).await??)
    }

    pub async fn subscribe(&self, after: u64) -> Result<Subscription, ApiError> {
        self.ask(|r| Command::Subscribe(after, r)).await
    }
}

async fn run(
    mut session: Session,
    mut rx: mpsc::Receiver<Command>,
    events: broadcast::Sender<TraceEntry>,
    period: Duration,
) {
    let mut ticker = interval(period);
    ticker.set_missed_tick_behavior(MissedTickBehavior::Delay);
    loop {
        let playing = session.playback() == Playback::Playing;
        tokio::select! {
            cmd = rx.recv() => {
                let Some(cmd) = cmd else { break };
                let was_playing = playing;
                session = handle(session, cmd, &events).await;
                if !was_playing && session.playback() == Playback::Playing {
                    ticker.reset_at(Instant::now() + period);
                }
            }
            _ = ticker.tick(), if playing => {
                match session.step() {
                    Ok(out) => publish(&events, out),
                    Err(e) => {
                        tracing::error!(session = session.id(), "step failed, pausing: {e}");
                        session.pause();
                    }
                }
            }
        }
    }
    tracing::debug!(session = session.id(), "session worker stopped");
}

async fn handle(mut session: Session, cmd: Command, events: &broadcast::Sender<TraceEntry>) -> Session {
    match cmd {
        Command::Snapshot(reply) => {
            let _ = reply.send(session.snapshot());
        }
        Command::Playback(action, reply) => {
            let result = match action {
                PlaybackAction::Play => {
                    session.play();
                    Ok(())
                }
                PlaybackAction::Pause => {
                    session.pause();
                    Ok(())
                }
                PlaybackAction::Seek(target) => {
                    // re-simulation can take a while; keep it off the async workers
                    let joined = tokio::task::spawn_blocking(move || {
                        let out = session.seek(target);
                        (session, out)
                    })
                    .await;
                    let (s, out) = joined.unwrap_or_else(|e| std::panic::resume_unwind(e.into_panic()));
                    session = s;
                    out.map(|entries| publish(events, entries))
                }
            };
            let _ = reply.send(result.map(|()| session.snapshot()));
        }
        Command::Decision(verdict, reply) => {
            let result = session.record_decision(verdict).map(|e| publish(events, vec![e]));
            let _ = reply.send(result.map(|()| session.snapshot()));
        }
        Command::Foil(c, reply) => {
            let result = session.set_foil_characteristic(c).map(|e| publish(events, vec![e]));
            let _ = reply.send(result.map(|()| session.snapshot()));
        }
        Command::Subscribe(after, reply) => {
            let _ = reply.send(Subscription {
                backlog: session.records_after(after).to_vec(),
                live: events.subscribe(),
            });
        }
    }
    session
}

fn publish(events: &broadcast::Sender<TraceEntry>, entries: Vec<TraceEntry>) {
    for e in entries {
        // no subscribers is fine
        let _ = events.send(e);
    }
}
