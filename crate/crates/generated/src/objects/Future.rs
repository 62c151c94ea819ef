// @generated by tsop from object spec sha256:de291e8686d305281188ab75b6bcbc532011e20e80f3b946a2bbd7f736a70c15
// Do not edit; regenerate with `tsop generate`.
//
// object Future
// protocol *get . (EMPTY . put + FULL)
// states over (EMPTY, FULL, get, put):
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
            "protocol violation on Future: `{}` received in state #{} ({})",
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
    queue_FULL: Option<V>,
    queue_get: usize,
    values: PhantomData<fn() -> V>,
}

pub struct Future<V> {
    lock: Mutex<Inner<V>>,
    try_get: Condvar,
    try_put: Condvar,
}

impl<V: Clone> Future<V> {
    /// An instance in the initial state, before the constructor sends.
    pub(crate) fn uninit() -> Self {
        Future {
            lock: Mutex::new(Inner {
                state: 0,
                queue_FULL: None,
                queue_get: 0,
                values: PhantomData,
            }),
            try_get: Condvar::new(),
            try_put: Condvar::new(),
        }
    }

    pub fn new() -> Result<Self, ProtocolViolation> {
        let this = Self::uninit();
        this.run_init()?;
        Ok(this)
    }

    /// The constructor sends.
    pub(crate) fn run_init(&self) -> Result<(), ProtocolViolation> {
        self.EMPTY()?;
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
            6 | 9 => self.try_put.notify_all(),
            7 => self.try_get.notify_all(),
            _ => {}
        }
    }

    pub(crate) fn EMPTY(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => inner.state = 1,
            3 => inner.state = 5,
            4 => {
                inner.state = 6;
                self.try_put.notify_all();
            }
            8 => {
                inner.state = 9;
                self.try_put.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("EMPTY", s));
            }
        }
        Ok(())
    }

    pub(crate) fn FULL(&self, x: V) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_FULL = Some(x);
        match inner.state {
            0 => inner.state = 2,
            3 => {
                inner.state = 7;
                self.try_get.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("FULL", s));
            }
        }
        Ok(())
    }

    pub fn get(&self) -> Result<V, ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_get += 1;
        match inner.state {
            0 => inner.state = 3,
            1 => inner.state = 5,
            2 => {
                inner.state = 7;
                self.try_get.notify_all();
            }
            3 | 5 | 7 | 8 | 9 => {}
            4 => inner.state = 8,
            6 => {
                inner.state = 9;
                self.try_put.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("get", s));
            }
        }
        loop {
            match inner.state {
                7 => {
                    inner.queue_get -= 1;
                    let x = inner.queue_FULL.take().expect("FULL pending");
                    inner.state = if inner.queue_get == 0 { 0 } else { 3 };
                    drop(inner);
                    return self.when_FULL_get(x);
                }
                _ => inner = wait(&self.try_get, inner),
            }
        }
    }

    pub fn put(&self, x: V) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => inner.state = 4,
            1 => {
                inner.state = 6;
                self.try_put.notify_all();
            }
            3 => inner.state = 8,
            5 => {
                inner.state = 9;
                self.try_put.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("put", s));
            }
        }
        loop {
            match inner.state {
                6 => {
                    inner.state = 0;
                    drop(inner);
                    return self.when_EMPTY_put(x);
                }
                9 => {
                    inner.state = 3;
                    drop(inner);
                    return self.when_EMPTY_put(x);
                }
                _ => inner = wait(&self.try_put, inner),
            }
        }
    }

    fn when_EMPTY_put(&self, x: V) -> Result<(), ProtocolViolation> {
        self.FULL(x)?;
        Ok(())
    }

    fn when_FULL_get(&self, x: V) -> Result<V, ProtocolViolation> {
        self.FULL(x.clone())?;
        Ok(x)
    }
}
