//! Interactive sessions: a network, its growing history, and a store to keep them in.
//!
//! Sessions live in memory. A [`SessionStore`] built with a directory also
//! writes each session to `<dir>/<id>.json` after every change and reloads
//! them on start.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::error::{Error, Result};
use crate::history::{History, Snapshot};
use crate::network::{Network, NetworkDoc};
use crate::planner::{plan_explanation, ExplanationPlan, PlannerConfig, SupportSelection};
use crate::realize::{realize, RealizedExplanation};

/// Plans and realizes the explanation for `node = state` over `[from_t, to_t]`.
///
/// This is the one code path behind both the CLI and the HTTP API, so the two
/// produce identical text for identical inputs.
pub fn explain_window(
    history: &History,
    node: &str,
    state: &str,
    from_t: usize,
    to_t: usize,
    selection: SupportSelection,
    config: &PlannerConfig,
) -> Result<(ExplanationPlan, RealizedExplanation)> {
    if !(config.rho > 0.0 && config.rho < 1.0) {
        return Err(Error::Invalid(format!("rho must lie in (0, 1), got {}", config.rho)));
    }
    if !(config.eps_bel >= 0.0 && config.eps_bel.is_finite()) {
        return Err(Error::Invalid(format!(
            "eps_bel must be non-negative, got {}",
            config.eps_bel
        )));
    }
    let k = history.node_index(node)?;
    let f = history.state_index(k, state)?;
    let plan = plan_explanation(history, node, f, from_t, to_t, selection, config)?;
    let text = realize(&plan)?;
    Ok((plan, text))
}

/// Splits `NODE=state` into its parts.
pub fn parse_focal(raw: &str) -> Result<(&str, &str)> {
    match raw.split_once('=') {
        Some((node, state)) if !node.is_empty() && !state.is_empty() => Ok((node, state)),
        _ => Err(Error::Invalid(format!(
            "focal must look like NODE=state, got `{raw}`"
        ))),
    }
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: Uuid,
    pub network: Network,
    pub history: History,
    pub created: u64,
    pub updated: u64,
}

/// On-disk form of a session.
#[derive(Serialize, Deserialize)]
struct SessionFile {
    id: Uuid,
    network: NetworkDoc,
    history: History,
    created: u64,
    updated: u64,
}

impl Session {
    pub fn new(network: Network) -> Result<Self> {
        let history = History::initial(&network)?;
        let now = now_secs();
        Ok(Session {
            id: Uuid::new_v4(),
            network,
            history,
            created: now,
            updated: now,
        })
    }

    pub fn preview(&self, node: &str, state: &str) -> Result<Snapshot> {
        self.history.preview(&self.network, node, state)
    }

    pub fn ground(&mut self, node: &str, state: &str) -> Result<&Snapshot> {
        self.history.ground(&self.network, node, state)?;
        self.updated = now_secs();
        Ok(self.history.latest())
    }

    pub fn explain(
        &self,
        node: &str,
        state: &str,
        from_t: usize,
        to_t: usize,
        selection: SupportSelection,
        config: &PlannerConfig,
    ) -> Result<(ExplanationPlan, RealizedExplanation)> {
        explain_window(&self.history, node, state, from_t, to_t, selection, config)
    }

    fn to_file(&self) -> SessionFile {
        SessionFile {
            id: self.id,
            network: self.network.to_doc(),
            history: self.history.clone(),
            created: self.created,
            updated: self.updated,
        }
    }

    fn from_file(file: SessionFile) -> Result<Self> {
        let network = Network::from_doc(&file.network)?;
        if file.history.network_id() != network.id() {
            return Err(Error::Invalid(format!(
                "session {} history does not belong to its network",
                file.id
            )));
        }
        Ok(Session {
            id: file.id,
            network,
            history: file.history,
            created: file.created,
            updated: file.updated,
        })
    }
}

pub type SharedSession = Arc<Mutex<Session>>;

#[derive(Debug, Clone, Default)]
pub struct SessionStore {
    sessions: Arc<RwLock<HashMap<Uuid, SharedSession>>>,
    dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// A store that persists to `dir`, loading any sessions already there.
    pub fn persistent(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let file: SessionFile = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
            let session = Session::from_file(file)?;
            sessions.insert(session.id, Arc::new(Mutex::new(session)));
        }
        Ok(SessionStore {
            sessions: Arc::new(RwLock::new(sessions)),
            dir: Some(dir),
        })
    }

    pub fn create(&self, network: Network) -> Result<SharedSession> {
        let session = Session::new(network)?;
        self.save(&session)?;
        let id = session.id;
        let shared = Arc::new(Mutex::new(session));
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, shared.clone());
        Ok(shared)
    }

    pub fn get(&self, id: &Uuid) -> Option<SharedSession> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
    }

    pub fn remove(&self, id: &Uuid) -> Result<bool> {
        let removed = self
            .sessions
            .write()
            .expect("session map poisoned")
            .remove(id)
            .is_some();
        if removed {
            if let Some(path) = self.path_for(id) {
                if path.exists() {
                    std::fs::remove_file(path)?;
                }
            }
        }
        Ok(removed)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the session to disk if the store is persistent. A no-op otherwise.
    pub fn save(&self, session: &Session) -> Result<()> {
        let Some(path) = self.path_for(&session.id) else {
            return Ok(());
        };
        let body = serde_json::to_string_pretty(&session.to_file())?;
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, body)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    fn path_for(&self, id: &Uuid) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}.json")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::load_network;

    const CHAIN: &str = r#"{"id": "chain", "nodes": [
        {"id": "A", "states": ["a1", "a2"], "prior": [0.6, 0.4]},
        {"id": "B", "states": ["b1", "b2", "b3"], "parent": "A",
         "cpt": [[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]]},
        {"id": "C", "states": ["c1", "c2"], "parent": "B",
         "cpt": [[0.9, 0.1], [0.5, 0.5], [0.05, 0.95]]}
    ]}"#;

    #[test]
    fn focal_parsing() {
        assert_eq!(parse_focal("B=b_1").unwrap(), ("B", "b_1"));
        assert!(parse_focal("B").is_err());
        assert!(parse_focal("=b").is_err());
    }

    #[test]
    fn preview_does_not_commit() {
        let store = SessionStore::in_memory();
        let s = store.create(load_network(CHAIN).unwrap()).unwrap();
        let mut s = s.lock().unwrap();
        let before = s.history.clone();
        let snap = s.preview("C", "c1").unwrap();
        assert_eq!(snap.t, 1);
        assert_eq!(s.history, before);
        s.ground("C", "c1").unwrap();
        assert_eq!(s.history.len(), 2);
        assert_eq!(s.history.latest(), &snap);
    }

    #[test]
    fn persistence_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::persistent(dir.path()).unwrap();
        let shared = store.create(load_network(CHAIN).unwrap()).unwrap();
        let id = {
            let mut s = shared.lock().unwrap();
            s.ground("C", "c2").unwrap();
            store.save(&s).unwrap();
            s.id
        };

        let reopened = SessionStore::persistent(dir.path()).unwrap();
        let s = reopened.get(&id).unwrap();
        let s = s.lock().unwrap();
        assert_eq!(s.history, shared.lock().unwrap().history);

        assert!(reopened.remove(&id).unwrap());
        assert!(!dir.path().join(format!("{id}.json")).exists());
        assert!(!reopened.remove(&id).unwrap());
    }

    #[test]
    fn rejects_bad_planner_config() {
        let net = load_network(CHAIN).unwrap();
        let s = Session::new(net).unwrap();
        let cfg = PlannerConfig { rho: 1.5, ..Default::default() };
        let err = s
            .explain("B", "b1", 0, 1, SupportSelection::Auto, &cfg)
            .unwrap_err();
        assert_eq!(err.code(), "invalid_argument");
    }
}
