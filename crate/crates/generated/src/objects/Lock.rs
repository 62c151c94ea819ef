// @generated by tsop from object spec sha256:da03c8d9bfecf6ac27a7b9c89e6d5a6dd04ae3bd9d453c6e753dfae5682763f9
// Do not edit; regenerate with `tsop generate`.
//
// object Lock
// protocol *acquire . (UNLOCKED + LOCKED . release)
// states over (LOCKED, UNLOCKED, acquire, release):
//   #0 0000
//   #1 1000
//   #2 0100
//   #3 00$0
//   #4 0001
//   #5 10$0
//   #6 1001
//   #7 01$0
//   #8 00$1
//   #9 10$1

#![allow(
    non_snake_case,
    non_camel_case_types,
    dead_code,
    unused_variables,
    clippy::all
)]

use std::fmt;
use std::marker::PhantomData;
use std::sync::{Condvar, Mutex, MutexGuard, PoisonError};

/// A message arrived in a state without a receive transition for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolViolation {
    pub tag: &'static str,
    pub state: usize,
    pub counters: &'static str,
}

impl fmt::Display for ProtocolViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "protocol violation on Lock: `{}` received in state #{} ({})",
            self.tag, self.state, self.counters
        )
    }
}

impl std::error::Error for ProtocolViolation {}

fn wait<'a, T>(cv: &Condvar, guard: MutexGuard<'a, T>) -> MutexGuard<'a, T> {
    cv.wait(guard).unwrap_or_else(PoisonError::into_inner)
}

const LABELS: [&str; 10] = [
    "0000", "1000", "0100", "00$0", "0001", "10$0", "1001", "01$0", "00$1", "10$1",
];

struct Inner<V> {
    state: usize,
    queue_acquire: usize,
    values: PhantomData<fn() -> V>,
}

pub struct Lock<V> {
    lock: Mutex<Inner<V>>,
    try_acquire: Condvar,
    try_release: Condvar,
}

impl<V: Clone> Lock<V> {
    /// An instance in the initial state, before the constructor sends.
    pub(crate) fn uninit() -> Self {
        Lock {
            lock: Mutex::new(Inner {
                state: 0,
                queue_acquire: 0,
                values: PhantomData,
            }),
            try_acquire: Condvar::new(),
            try_release: Condvar::new(),
        }
    }

    pub fn new() -> Result<Self, ProtocolViolation> {
        let this = Self::uninit();
        this.run_init()?;
        Ok(this)
    }

    /// The constructor sends.
    pub(crate) fn run_init(&self) -> Result<(), ProtocolViolation> {
        self.UNLOCKED()?;
        Ok(())
    }

    /// Index of the current automaton state.
    pub fn current_state(&self) -> usize {
        self.lock().state
    }

    /// Counter tuple of the current state.
    pub fn counters(&self) -> &'static str {
        LABELS[self.lock().state]
    }

    fn lock(&self) -> MutexGuard<'_, Inner<V>> {
        self.lock.lock().unwrap_or_else(PoisonError::into_inner)
    }

    fn violation(tag: &'static str, state: usize) -> ProtocolViolation {
        ProtocolViolation {
            tag,
            state,
            counters: LABELS[state],
        }
    }

    fn wake(&self, state: usize) {
        match state {
            6 | 9 => self.try_release.notify_all(),
            7 => self.try_acquire.notify_all(),
            _ => {}
        }
    }

    pub(crate) fn LOCKED(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => inner.state = 1,
            3 => inner.state = 5,
            4 => {
                inner.state = 6;
                self.try_release.notify_all();
            }
            8 => {
                inner.state = 9;
                self.try_release.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("LOCKED", s));
            }
        }
        Ok(())
    }

    pub(crate) fn UNLOCKED(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => inner.state = 2,
            3 => {
                inner.state = 7;
                self.try_acquire.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("UNLOCKED", s));
            }
        }
        Ok(())
    }

    pub fn acquire(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_acquire += 1;
        match inner.state {
            0 => inner.state = 3,
            1 => inner.state = 5,
            2 => {
                inner.state = 7;
                self.try_acquire.notify_all();
            }
            3 | 5 | 7 | 8 | 9 => {}
            4 => inner.state = 8,
            6 => {
                inner.state = 9;
                self.try_release.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("acquire", s));
            }
        }
        loop {
            match inner.state {
                7 => {
                    inner.queue_acquire -= 1;
                    inner.state = if inner.queue_acquire == 0 { 0 } else { 3 };
                    drop(inner);
                    return self.when_UNLOCKED_acquire();
                }
                _ => inner = wait(&self.try_acquire, inner),
            }
        }
    }

    pub fn release(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => inner.state = 4,
            1 => {
                inner.state = 6;
                self.try_release.notify_all();
            }
            3 => inner.state = 8,
            5 => {
                inner.state = 9;
                self.try_release.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("release", s));
            }
        }
        loop {
            match inner.state {
                6 => {
                    inner.state = 0;
                    drop(inner);
                    return self.when_LOCKED_release();
                }
                9 => {
                    inner.state = 3;
                    drop(inner);
                    return self.when_LOCKED_release();
                }
                _ => inner = wait(&self.try_release, inner),
            }
        }
    }

    fn when_UNLOCKED_acquire(&self) -> Result<(), ProtocolViolation> {
        self.LOCKED()?;
        Ok(())
    }

    fn when_LOCKED_release(&self) -> Result<(), ProtocolViolation> {
        self.UNLOCKED()?;
        Ok(())
    }
}
