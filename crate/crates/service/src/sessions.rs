//! Enumeration sessions keyed by unguessable ids, with idle expiry and a
//! cap on how many may exist at once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::rngs::OsRng;
use rand::RngCore;
use twist_core::pipeline::{Enumerator, Found, SolveError, Step};

/// One solve: the enumerator and the model most recently served.
pub struct SessionRecord {
    enumerator: Enumerator,
    current: Found,
    served: usize,
    exhausted: bool,
    pub created: Instant,
}

/// Outcome of asking a session for another model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Advance {
    Model(Found),
    Exhausted,
    Unknown,
}

impl SessionRecord {
    pub fn new(enumerator: Enumerator, first: Found) -> Self {
        SessionRecord {
            enumerator,
            current: first,
            served: 1,
            exhausted: false,
            created: Instant::now(),
        }
    }

    pub fn current(&self) -> &Found {
        &self.current
    }

    pub fn served(&self) -> usize {
        self.served
    }

    /// Next distinct model. Once exhausted the solver is not called again.
    pub fn advance(&mut self) -> Result<Advance, SolveError> {
        if self.exhausted {
            return Ok(Advance::Exhausted);
        }
        Ok(match self.enumerator.next_model()? {
            Step::Model(f) => {
                self.current = f.clone();
                self.served += 1;
                Advance::Model(f)
            }
            Step::Exhausted => {
                self.exhausted = true;
                Advance::Exhausted
            }
            Step::Unknown => Advance::Unknown,
        })
    }
}

struct Entry {
    record: Arc<Mutex<SessionRecord>>,
    last_used: Instant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoreFull;

pub struct SessionStore {
    entries: Mutex<HashMap<String, Entry>>,
    ttl: Duration,
    cap: usize,
}

impl SessionStore {
    pub fn new(ttl: Duration, cap: usize) -> Self {
        SessionStore {
            entries: Mutex::new(HashMap::new()),
            ttl,
            cap,
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<String, Entry>> {
        // A panic while holding the map lock leaves the map itself intact.
        self.entries.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn purge(&self, map: &mut HashMap<String, Entry>) -> usize {
        let before = map.len();
        let now = Instant::now();
        map.retain(|_, e| now.duration_since(e.last_used) < self.ttl);
        before - map.len()
    }

    /// Drops idle sessions; returns how many were removed.
    pub fn sweep(&self) -> usize {
        let mut map = self.lock();
        self.purge(&mut map)
    }

    pub fn len(&self) -> usize {
        let mut map = self.lock();
        self.purge(&mut map);
        map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_room(&self) -> bool {
        self.len() < self.cap
    }

    pub fn insert(&self, record: SessionRecord) -> Result<String, StoreFull> {
        let mut map = self.lock();
        self.purge(&mut map);
        if map.len() >= self.cap {
            return Err(StoreFull);
        }
        let id = loop {
            let id = new_id();
            if !map.contains_key(&id) {
                break id;
            }
        };
        map.insert(
            id.clone(),
            Entry {
                record: Arc::new(Mutex::new(record)),
                last_used: Instant::now(),
            },
        );
        Ok(id)
    }

    /// The live session `id`, refreshing its idle timer.
    pub fn get(&self, id: &str) -> Option<Arc<Mutex<SessionRecord>>> {
        let mut map = self.lock();
        self.purge(&mut map);
        let e = map.get_mut(id)?;
        e.last_used = Instant::now();
        Some(e.record.clone())
    }
}

/// 128 random bits from the operating system, as 32 hex digits.
pub fn new_id() -> String {
    let mut bytes = [0u8; 16];
    OsRng.fill_bytes(&mut bytes);
    format!("{:032x}", u128::from_be_bytes(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use twist_core::pipeline::{compile, SolveOptions};

    fn record(src: &str) -> SessionRecord {
        let c = compile(src).unwrap();
        let opts = SolveOptions::default();
        let mut e = Enumerator::new(&c, c.backend(opts.encoding).unwrap(), &opts);
        let Step::Model(first) = e.next_model().unwrap() else { panic!() };
        SessionRecord::new(e, first)
    }

    #[test]
    fn ids_are_distinct_hex() {
        let a = new_id();
        assert_eq!(a.len(), 32);
        assert!(a.chars().all(|c| c.is_ascii_hexdigit()));
        assert_ne!(a, new_id());
    }

    #[test]
    fn cap_and_expiry() {
        let s = SessionStore::new(Duration::from_millis(40), 2);
        let a = s.insert(record("p")).unwrap();
        s.insert(record("p")).unwrap();
        assert_eq!(s.insert(record("p")), Err(StoreFull));
        assert!(s.get(&a).is_some());
        std::thread::sleep(Duration::from_millis(60));
        assert!(s.get(&a).is_none());
        assert!(s.is_empty());
        assert!(s.insert(record("p")).is_ok());
    }

    #[test]
    fn advance_until_exhausted() {
        let mut r = record("p or q");
        assert!(matches!(r.advance().unwrap(), Advance::Model(_)));
        assert!(matches!(r.advance().unwrap(), Advance::Model(_)));
        assert_eq!(r.advance().unwrap(), Advance::Exhausted);
        assert_eq!(r.advance().unwrap(), Advance::Exhausted);
        assert_eq!(r.served(), 3);
    }
}
